//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use mfp_core::benchmark::{
    homogeneous_cases, homogeneous_on_grid_cases, plate_coarse_grid_cases, run_benchmark,
    BenchmarkConfig,
};
use mfp_core::fem::{
    self, Dirichlet, Discretization, EquilibriumSolver, LoadProgram, NewtonSettings, PlateMesh,
    QuadMesh,
};
use mfp_core::grid::{GridSpec, Spacing};
use mfp_core::matcher::{scan_parallel, scan_sequential};
use mfp_core::metrics::{e_compr, e_incompr, ErrorConfig};
use mfp_core::supervised::HomogeneousProtocol;
use mfp_core::unsupervised::PlateProtocol;
use mfp_core::{
    match_fingerprint, Database, DeformationGradient, Family, MatchOptions, MaterialModel,
    Protocol, Record,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn params_equal(a: &MaterialModel, b: &MaterialModel, tol: f64) -> bool {
    a.family() == b.family()
        && a.theta().len() == b.theta().len()
        && a.theta().iter().zip(b.theta()).all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
        && a.alpha().iter().zip(b.alpha()).all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let db = Database::generate(
        Protocol::Homogeneous(HomogeneousProtocol::default()),
        &GridSpec::supervised_default(),
    )
    .expect("supervised database");
    let cfg = ErrorConfig::default();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut models = Vec::new();
    for case in homogeneous_on_grid_cases() {
        let raw = db.protocol().simulate(&case.truth).expect("truth fingerprint");
        let m = match_fingerprint(&db, &raw, &MatchOptions::default()).expect("match");
        models.push((case, m.model));
    }
    let elapsed = start.elapsed();
    for (case, model) in &models {
        let e = e_incompr(&case.truth, model, &cfg).expect("error metric").value;
        worst = worst.max(e);
        if !params_equal(model, &case.truth, 1e-12) || e > 1e-12 {
            failures.push(format!("{} -> {model} (E={e:.2e})", case.name));
        }
    }
    let pass = db.len() == 502 && failures.is_empty() && elapsed < Duration::from_secs(5);
    check(
        pass,
        format!(
            "n_d={} exact={}/5 max E_incompr={worst:.1e} time={:.2}s{}",
            db.len(),
            5 - failures.len(),
            elapsed.as_secs_f64(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(" failed: {}", failures.join("; "))
            }
        ),
    )
}

fn criterion_2() -> Outcome {
    use Family::*;
    let cfg = ErrorConfig::default();
    let inc = |f, a: &[f64], al: &[f64]| MaterialModel::incompressible(f, a, al).unwrap();
    let comp = |f, t0, a: &[f64], al: &[f64]| MaterialModel::compressible(f, t0, a, al).unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    let incompressible = [
        ("blatz-ko 1%", inc(BlatzKo, &[50.0], &[]), inc(BlatzKo, &[50.35], &[]), 6.98e-3),
        (
            "mooney-rivlin 1%",
            inc(MooneyRivlin, &[10.0, 40.0], &[]),
            inc(MooneyRivlin, &[9.47, 40.73], &[]),
            3.70e-3,
        ),
        (
            "mooney-rivlin 5%",
            inc(MooneyRivlin, &[10.0, 40.0], &[]),
            inc(MooneyRivlin, &[12.28, 36.83], &[]),
            1.69e-2,
        ),
    ];
    for (name, truth, disc, target) in incompressible {
        let e = e_incompr(&truth, &disc, &cfg).unwrap().value;
        let ok = rel(e, target) <= 0.05;
        pass &= ok;
        lines.push(format!("{name} {e:.3e}/{target:.2e}{}", if ok { "" } else { " FAIL" }));
    }
    let compressible = [
        (
            "blatz-ko 1%",
            comp(BlatzKo, 5.0, &[50.0], &[]),
            comp(BlatzKo, 5.05, &[49.52], &[]),
            8.61e-3,
        ),
        (
            "blatz-ko 5%",
            comp(BlatzKo, 5.0, &[50.0], &[]),
            comp(BlatzKo, 5.19, &[48.25], &[]),
            3.13e-2,
        ),
        (
            "demiray 1%",
            comp(Demiray, 5.0, &[10.0], &[8.0]),
            comp(Demiray, 5.0, &[10.01], &[8.0]),
            6.27e-4,
        ),
    ];
    for (name, truth, disc, target) in compressible {
        let e = e_compr(&truth, &disc, &cfg).unwrap().value;
        let ok = rel(e, target) <= 0.10;
        pass &= ok;
        lines.push(format!("{name} {e:.3e}/{target:.2e}{}", if ok { "" } else { " FAIL" }));
    }
    check(pass, lines.join(", "))
}

fn supervised_db() -> Database {
    Database::generate(
        Protocol::Homogeneous(HomogeneousProtocol::default()),
        &GridSpec::supervised_default(),
    )
    .expect("supervised database")
}

fn criterion_3(db: &Database) -> Outcome {
    let start = Instant::now();
    let config = BenchmarkConfig {
        levels: vec![0.01, 0.05],
        ..BenchmarkConfig::default()
    };
    let report = run_benchmark(db, &homogeneous_cases(), &config);
    let elapsed = start.elapsed();
    let mut pass = elapsed < Duration::from_secs(60);
    let mut lines = Vec::new();
    for s in &report.summaries {
        let med = s.median_e_incompr.unwrap_or(f64::INFINITY);
        let ok = s.failures == 0
            && if s.level == 0.01 {
                med <= 2e-2 && s.family_hit_rate >= 0.8
            } else {
                med <= 0.3
            };
        pass &= ok;
        lines.push(format!(
            "{}@{}%: med {med:.2e} hit {:.0}%{}",
            s.case,
            s.level * 100.0,
            s.family_hit_rate * 100.0,
            if ok { "" } else { " FAIL" }
        ));
    }
    check(
        pass,
        format!("{} time={:.1}s", lines.join(", "), elapsed.as_secs_f64()),
    )
}

fn criterion_4(db: &Database) -> Outcome {
    let config = BenchmarkConfig {
        levels: vec![0.05],
        ..BenchmarkConfig::default()
    };
    let cases: Vec<_> = homogeneous_cases()
        .into_iter()
        .filter(|c| c.truth.family() == Family::NeoHooke)
        .collect();
    let report = run_benchmark(db, &cases, &config);
    let mut ogden = 0;
    let mut bad = Vec::new();
    for r in &report.rows {
        if r.family == Some(Family::Ogden) {
            ogden += 1;
            let a = r.alpha[0];
            let e = r.e_incompr.unwrap_or(f64::INFINITY);
            if (a - 2.0).abs() > 0.5 || e > 5e-2 {
                bad.push(format!("seed {} alpha={a:.2} E={e:.2e}", r.seed));
            }
        }
    }
    check(
        bad.is_empty() && report.rows.iter().all(|r| r.error.is_none()),
        format!(
            "{ogden}/{} seeds resolved to Ogden, {} outside |alpha-2|<=0.5, E<=5e-2{}",
            report.rows.len(),
            bad.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(": {}", bad.join("; "))
            }
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let protocol = PlateProtocol::default();
    let db = Database::generate(
        Protocol::Plate(protocol.clone()),
        &GridSpec::unsupervised(10, Spacing::Linear),
    )
    .expect("plate database");
    let gen_time = start.elapsed();

    // re-simulate each record from its absolute parameters
    use rayon::prelude::*;
    let opts = MatchOptions::default();
    let worst: Vec<(usize, usize, f64)> = (0..db.len())
        .into_par_iter()
        .map(|i| {
            let model = db.rescale(i, db.records()[i].source_norm).unwrap();
            let raw = db.protocol().simulate(&model).unwrap();
            let m = match_fingerprint(&db, &raw, &opts).unwrap();
            (i, m.best.index, m.best.similarity)
        })
        .collect();
    let self_ok = worst.iter().all(|&(i, j, s)| i == j && s >= 2.0 - 1e-8 && s <= 2.0 + 1e-12);
    let min_sim = worst.iter().map(|w| w.2).fold(f64::INFINITY, f64::min);

    let cfg = ErrorConfig::default();
    let mut exact = 0;
    let mut max_e = 0.0f64;
    let cases = plate_coarse_grid_cases();
    for case in &cases {
        let raw = db.protocol().simulate(&case.truth).unwrap();
        let m = match_fingerprint(&db, &raw, &opts).unwrap();
        let e = e_compr(&case.truth, &m.model, &cfg).unwrap().value;
        max_e = max_e.max(e);
        if params_equal(&m.model, &case.truth, 1e-8) && e <= 1e-10 {
            exact += 1;
        } else {
            eprintln!("  {}: discovered {} E_compr={e:.2e}", case.name, m.model);
        }
    }
    let elapsed = start.elapsed();
    check(
        db.len() == 320
            && self_ok
            && exact == cases.len()
            && elapsed < Duration::from_secs(15 * 60),
        format!(
            "n_d={} self-match min similarity={min_sim:.12} exact={exact}/{} max E_compr={max_e:.1e} \
             generation={:.1}s total={:.1}s",
            db.len(),
            cases.len(),
            gen_time.as_secs_f64(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // patch test on a distorted 3x3 patch
    let mut mesh = QuadMesh::rectangle(1.0, 1.0, 3, 3);
    let interior = [5usize, 6, 9, 10];
    for (n, s) in interior.iter().zip([[0.05, 0.03], [-0.04, 0.06], [0.03, -0.05], [-0.06, -0.02]]) {
        mesh.nodes[*n][0] += s[0];
        mesh.nodes[*n][1] += s[1];
    }
    let f = [[1.1, 0.08], [-0.04, 0.93]];
    let mut bc = Dirichlet {
        dofs: vec![],
        unit_values: vec![],
    };
    for (n, x) in mesh.nodes.iter().enumerate() {
        if !interior.contains(&n) {
            bc.dofs.extend([2 * n, 2 * n + 1]);
            bc.unit_values.push((f[0][0] - 1.0) * x[0] + f[0][1] * x[1]);
            bc.unit_values.push(f[1][0] * x[0] + (f[1][1] - 1.0) * x[1]);
        }
    }
    let model = MaterialModel::compressible(Family::NeoHooke, 2.0, &[1.0], &[]).unwrap();
    let disc = Discretization::new(&mesh).unwrap();
    let u = EquilibriumSolver::new(&disc, &model, &bc, NewtonSettings::default())
        .run(&[1.0])
        .unwrap()
        .remove(0)
        .displacement;
    let exact = model
        .piola_stress(&DeformationGradient::plane_strain(f[0][0], f[0][1], f[1][0], f[1][1]))
        .unwrap();
    let mut patch_err = 0.0f64;
    for e in 0..mesh.elements.len() {
        for q in 0..4 {
            let p = model.piola_stress(&disc.deformation(e, q, &u)).unwrap();
            patch_err = patch_err.max((p - exact).norm() / exact.norm());
        }
    }
    pass &= patch_err <= 1e-9;
    notes.push(format!("patch {patch_err:.1e}"));

    // internal forces vs energy differences
    let plate1 = PlateMesh::build(&Default::default(), 1).unwrap();
    let disc1 = Discretization::new(&plate1.mesh).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u: Vec<f64> = (0..plate1.mesh.n_dofs()).map(|_| rng.gen_range(-0.01..0.01)).collect();
    let r = disc1.internal_forces(&model, &u).unwrap();
    let scale = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut fd_err = 0.0f64;
    for _ in 0..20 {
        let d = rng.gen_range(0..u.len());
        let h = 1e-6;
        let (mut up, mut um) = (u.clone(), u.clone());
        up[d] += h;
        um[d] -= h;
        let fd = (disc1.energy(&model, &up).unwrap() - disc1.energy(&model, &um).unwrap()) / (2.0 * h);
        fd_err = fd_err.max((fd - r[d]).abs() / scale);
    }
    pass &= fd_err <= 1e-5;
    notes.push(format!("residual-vs-energy {fd_err:.1e}"));

    // theta scaling per family
    let program = LoadProgram::default();
    let settings = NewtonSettings::default();
    let models = [
        MaterialModel::compressible(Family::BlatzKo, 2.0, &[1.0], &[]),
        MaterialModel::compressible(Family::Demiray, 2.0, &[1.0], &[2.0]),
        MaterialModel::compressible(Family::Gent, 2.0, &[1.0], &[0.5]),
        MaterialModel::compressible(Family::MooneyRivlin, 2.0, &[1.0, 0.5], &[]),
        MaterialModel::compressible(Family::NeoHooke, 2.0, &[1.0], &[]),
    ];
    let mut scale_err = 0.0f64;
    for m in models {
        let m = m.unwrap();
        let a = fem::solve(&m, &plate1, &program, settings).unwrap();
        let b = fem::solve(&m.scaled(10.0).unwrap(), &plate1, &program, settings).unwrap();
        for s in 0..program.steps {
            scale_err = scale_err
                .max(rel(b.r1[s], 10.0 * a.r1[s]))
                .max(rel(b.r2[s], 10.0 * a.r2[s]));
            let na = mfp_core::norm(&a.probe_displacements[s]);
            let diff: Vec<f64> = a.probe_displacements[s]
                .iter()
                .zip(&b.probe_displacements[s])
                .map(|(x, y)| x - y)
                .collect();
            scale_err = scale_err.max(mfp_core::norm(&diff) / na);
        }
    }
    pass &= scale_err <= 1e-8;
    notes.push(format!("theta-scaling {scale_err:.1e}"));

    // refinement
    let nh = MaterialModel::compressible(Family::NeoHooke, 1.0, &[1.0], &[]).unwrap();
    let level = PlateProtocol::default().mesh_level;
    let r2 = |l: u32| {
        let pm = PlateMesh::build(&Default::default(), l).unwrap();
        *fem::solve(&nh, &pm, &program, settings).unwrap().r2.last().unwrap()
    };
    let (coarse, fine) = (r2(level), r2(level + 1));
    let change = rel(coarse, fine);
    pass &= change < 0.01;
    notes.push(format!("refinement L{level}->L{} {:.3}%", level + 1, 100.0 * change));

    check(pass, notes.join(", "))
}

fn criterion_7() -> Outcome {
    let protocol = HomogeneousProtocol::default();
    let n_f = protocol.len();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for _ in 0..10_000 {
        let v: Vec<f64> = (0..n_f).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = mfp_core::norm(&v);
        rows.push(v.iter().map(|x| x / n).collect());
        let family = Family::ALL[rng.gen_range(0..Family::ALL.len())];
        records.push(Record {
            family,
            theta_bar: (0..family.n_theta())
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.1..1.0) })
                .collect(),
            alpha: (0..family.n_alpha()).map(|_| rng.gen_range(0.1..1.0)).collect(),
            source_norm: n,
        });
    }
    let db = Database::new(Protocol::Homogeneous(protocol), rows, records).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();

    let mut identical = 0;
    let queries: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..n_f).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    for q in &queries {
        let s = scan_sequential(db.matrix(), n_f, q);
        let p = scan_parallel(db.matrix(), n_f, q);
        let bitwise = s.iter().zip(&p).all(|(a, b)| a.to_bits() == b.to_bits());
        let seq = match_fingerprint(&db, q, &MatchOptions { parallel: false, ..Default::default() }).unwrap();
        let par = match_fingerprint(&db, q, &MatchOptions::default()).unwrap();
        if bitwise && seq.best.index == par.best.index && seq.best.similarity.to_bits() == par.best.similarity.to_bits() {
            identical += 1;
        }
    }
    pass &= identical == queries.len();
    notes.push(format!("parallel==sequential {identical}/{}", queries.len()));

    let mut invariant = 0;
    for q in &queries {
        let base = match_fingerprint(&db, q, &MatchOptions::default()).unwrap();
        let ok = [1e-3, 1.0, 1e3].iter().all(|a| {
            let scaled: Vec<f64> = q.iter().map(|x| a * x).collect();
            let m = match_fingerprint(&db, &scaled, &MatchOptions::default()).unwrap();
            m.best.index == base.best.index && (m.best.similarity - base.best.similarity).abs() <= 1e-14
        });
        invariant += ok as usize;
    }
    pass &= invariant == queries.len();
    notes.push(format!("scale invariance {invariant}/{}", queries.len()));

    let mut reduce = 0;
    for q in &queries {
        let plain = match_fingerprint(&db, q, &MatchOptions::default()).unwrap();
        let zero = match_fingerprint(&db, q, &MatchOptions { sparsity_weight: 0.0, ..Default::default() }).unwrap();
        reduce += (plain == zero && plain.best.score == plain.best.similarity) as usize;
    }
    pass &= reduce == queries.len();
    notes.push(format!("zero sparsity weight {reduce}/{}", queries.len()));
    check(pass, notes.join(", "))
}

fn main() {
    let mut failed = Vec::new();
    let mut report = |id: &str, title: &str, o: Outcome| {
        println!(
            "criterion {id} [{}] {title}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(id.to_string());
        }
    };
    report("1", "supervised exact recovery", criterion_1());
    report("2", "error-metric reproduction", criterion_2());
    let db = supervised_db();
    report("3", "noise robustness over 100 seeds", criterion_3(&db));
    report("4", "Neo-Hooke/Ogden equivalence", criterion_4(&db));
    report("5", "plate pipeline self-consistency", criterion_5());
    report("6", "finite element verification", criterion_6());
    report("7", "matcher correctness", criterion_7());
    println!(
        "criterion 8 [EXCLUDED] single-seed noisy parameters and absolute plate curves are not \
         pointwise targets; covered by criteria 3-5"
    );
    if !failed.is_empty() {
        println!("acceptance: failing criteria {}", failed.join(", "));
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass");
}
