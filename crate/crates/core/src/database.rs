//! Fingerprint databases and their binary file format.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic        4 bytes   "MFPD"
//! version      u32       1
//! kind         u8        1 = homogeneous, 2 = plate
//! desc_len     u32
//! descriptor   desc_len bytes of UTF-8 JSON
//! desc_hash    32 bytes  SHA-256 of the descriptor
//! n_d          u64       record count
//! n_f          u64       fingerprint length
//! matrix       n_d * n_f f64, row-major
//! records      n_d times: family u8, n_theta u8, theta_bar f64..,
//!                         n_alpha u8, alpha f64.., source_norm f64
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{Family, MaterialModel, Regime};
use crate::supervised::{self, HomogeneousProtocol};
use crate::unsupervised::{self, PlateFingerprint, PlateProtocol};

const MAGIC: &[u8; 4] = b"MFPD";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Uniaxial tension and simple shear stresses.
    Homogeneous,
    /// Plate with a hole: reaction forces and probe displacements.
    Plate,
}

impl ExperimentKind {
    fn tag(self) -> u8 {
        match self {
            ExperimentKind::Homogeneous => 1,
            ExperimentKind::Plate => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Protocol {
    Homogeneous(HomogeneousProtocol),
    Plate(PlateProtocol),
}

/// Serialized form hashed into the file header; it carries the layout and
/// noise conventions as well as the numeric protocol.
#[derive(Serialize)]
struct Descriptor<'a> {
    protocol: &'a Protocol,
    layout: &'static str,
    regime: Regime,
    element: Option<&'static str>,
    noise: &'static str,
}

impl Protocol {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Protocol::Homogeneous(_) => ExperimentKind::Homogeneous,
            Protocol::Plate(_) => ExperimentKind::Plate,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Protocol::Homogeneous(p) => p.len(),
            Protocol::Plate(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn regime(&self) -> Regime {
        match self {
            Protocol::Homogeneous(_) => Regime::IncompressibleLagrange,
            Protocol::Plate(_) => Regime::CompressiblePenalty,
        }
    }

    /// Length of the force part under split normalization, if any.
    pub fn force_len(&self) -> Option<usize> {
        match self {
            Protocol::Homogeneous(_) => None,
            Protocol::Plate(p) => Some(p.force_len()),
        }
    }

    pub fn column_names(&self) -> Vec<String> {
        match self {
            Protocol::Homogeneous(p) => p.column_names(),
            Protocol::Plate(p) => p.column_names(),
        }
    }

    pub fn descriptor(&self) -> String {
        let d = match self {
            Protocol::Homogeneous(_) => Descriptor {
                protocol: self,
                layout: "ut-then-ss",
                regime: self.regime(),
                element: None,
                noise: "std=level*max|f|",
            },
            Protocol::Plate(_) => Descriptor {
                protocol: self,
                layout: "r1-steps,r2-steps|per-step(u1-probes,u2-probes)",
                regime: self.regime(),
                element: Some("q4-gauss2x2-total-lagrangian-plane-strain"),
                noise: "std=level*max|part| per force/displacement part",
            },
        };
        serde_json::to_string(&d).expect("protocol serializes")
    }

    pub fn hash_bytes(&self) -> [u8; 32] {
        Sha256::digest(self.descriptor().as_bytes()).into()
    }

    /// Hex SHA-256 of the descriptor.
    pub fn hash(&self) -> String {
        self.hash_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Raw fingerprint of `model` under this protocol.
    pub fn simulate(&self, model: &MaterialModel) -> Result<Vec<f64>> {
        match self {
            Protocol::Homogeneous(p) => supervised::simulate_fingerprint(model, p),
            Protocol::Plate(p) => Ok(unsupervised::fem_fingerprint(model, &p.mesh()?, p)?.concat()),
        }
    }

    /// Normalizes a raw fingerprint; returns the unit form and the norm used
    /// for rescaling theta (full norm, or force-part norm for plates).
    pub fn normalize(&self, raw: &[f64]) -> Result<(Vec<f64>, f64)> {
        if raw.len() != self.len() {
            return Err(Error::ProtocolMismatch(format!(
                "fingerprint has {} values, protocol expects {}",
                raw.len(),
                self.len()
            )));
        }
        let (fbar, _, norm) = match self {
            Protocol::Homogeneous(_) => supervised::normalize(raw, &[])?,
            Protocol::Plate(p) => {
                unsupervised::normalize(&PlateFingerprint::split(raw, p.force_len()), &[])?
            }
        };
        Ok((fbar, norm))
    }

    /// Largest attainable similarity: number of unit parts.
    pub fn max_similarity(&self) -> f64 {
        match self {
            Protocol::Homogeneous(_) => 1.0,
            Protocol::Plate(_) => 2.0,
        }
    }
}

/// Model metadata stored beside each normalized fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub family: Family,
    pub theta_bar: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Norm divided out of the source fingerprint.
    pub source_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Database {
    protocol: Protocol,
    n_f: usize,
    matrix: Vec<f64>,
    records: Vec<Record>,
}

impl Database {
    pub fn new(protocol: Protocol, rows: Vec<Vec<f64>>, records: Vec<Record>) -> Result<Self> {
        let n_f = protocol.len();
        if rows.len() != records.len() {
            return Err(Error::Format(format!(
                "{} fingerprints but {} records",
                rows.len(),
                records.len()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n_f) {
            return Err(Error::ProtocolMismatch(format!(
                "row of length {} in a database of width {n_f}",
                r.len()
            )));
        }
        Ok(Self {
            protocol,
            n_f,
            matrix: rows.concat(),
            records,
        })
    }

    /// Simulates and normalizes every grid point.
    pub fn generate(protocol: Protocol, grid: &GridSpec) -> Result<Self> {
        let (rows, records) = match &protocol {
            Protocol::Homogeneous(p) => supervised::generate_database(p, grid)?,
            Protocol::Plate(p) => unsupervised::generate_database(p, grid)?,
        };
        Self::new(protocol, rows, records)
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn kind(&self) -> ExperimentKind {
        self.protocol.kind()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_f(&self) -> usize {
        self.n_f
    }

    /// Row-major `len() x n_f()` matrix of normalized fingerprints.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.n_f..(i + 1) * self.n_f]
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    /// Model of record `i` with theta rescaled by `norm`.
    pub fn rescale(&self, i: usize, norm: f64) -> Result<MaterialModel> {
        let r = &self.records[i];
        MaterialModel::new(
            r.family,
            self.protocol.regime(),
            r.theta_bar.iter().map(|t| norm * t).collect(),
            r.alpha.clone(),
        )
    }

    /// Raw fingerprint reconstructed from record `i`.
    pub fn raw_fingerprint(&self, i: usize) -> Vec<f64> {
        let row = self.row(i);
        let s = self.records[i].source_norm;
        match self.protocol.force_len() {
            None => row.iter().map(|v| v * s).collect(),
            // the displacement part keeps unit length
            Some(k) => row
                .iter()
                .enumerate()
                .map(|(j, v)| if j < k { v * s } else { *v })
                .collect(),
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let desc = self.protocol.descriptor();
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&[self.kind().tag()])?;
        w.write_all(&(desc.len() as u32).to_le_bytes())?;
        w.write_all(desc.as_bytes())?;
        w.write_all(&self.protocol.hash_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&(self.n_f as u64).to_le_bytes())?;
        for v in &self.matrix {
            w.write_all(&v.to_le_bytes())?;
        }
        for r in &self.records {
            w.write_all(&[r.family.id(), r.theta_bar.len() as u8])?;
            for t in &r.theta_bar {
                w.write_all(&t.to_le_bytes())?;
            }
            w.write_all(&[r.alpha.len() as u8])?;
            for a in &r.alpha {
                w.write_all(&a.to_le_bytes())?;
            }
            w.write_all(&r.source_norm.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a fingerprint database (bad magic)".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let tag = read_u8(&mut r)?;
        let desc_len = read_u32(&mut r)? as usize;
        let mut desc = vec![0u8; desc_len];
        r.read_exact(&mut desc)?;
        let mut stored_hash = [0u8; 32];
        r.read_exact(&mut stored_hash)?;
        let desc_hash: [u8; 32] = Sha256::digest(&desc).into();
        if desc_hash != stored_hash {
            return Err(Error::Format("protocol descriptor hash does not match".into()));
        }
        let value: serde_json::Value = serde_json::from_slice(&desc)?;
        let protocol: Protocol = serde_json::from_value(
            value
                .get("protocol")
                .cloned()
                .ok_or_else(|| Error::Format("descriptor lacks a protocol".into()))?,
        )?;
        if protocol.kind().tag() != tag {
            return Err(Error::Format(format!(
                "kind tag {tag} disagrees with the descriptor"
            )));
        }
        if protocol.hash_bytes() != stored_hash {
            return Err(Error::ProtocolMismatch(
                "descriptor was written by an incompatible build".into(),
            ));
        }
        let n_d = read_u64(&mut r)? as usize;
        let n_f = read_u64(&mut r)? as usize;
        if n_f != protocol.len() {
            return Err(Error::Format(format!(
                "header width {n_f} but protocol implies {}",
                protocol.len()
            )));
        }
        let total = n_d
            .checked_mul(n_f)
            .ok_or_else(|| Error::Format("matrix size overflows".into()))?;
        let mut bytes = vec![0u8; total * 8];
        r.read_exact(&mut bytes)?;
        let matrix = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let mut records = Vec::with_capacity(n_d);
        for _ in 0..n_d {
            let id = read_u8(&mut r)?;
            let family =
                Family::from_id(id).ok_or_else(|| Error::Format(format!("unknown family id {id}")))?;
            let nt = read_u8(&mut r)? as usize;
            let theta_bar = (0..nt).map(|_| read_f64(&mut r)).collect::<Result<_>>()?;
            let na = read_u8(&mut r)? as usize;
            let alpha = (0..na).map(|_| read_f64(&mut r)).collect::<Result<_>>()?;
            let source_norm = read_f64(&mut r)?;
            records.push(Record {
                family,
                theta_bar,
                alpha,
                source_norm,
            });
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after the last record".into()));
        }
        Ok(Self {
            protocol,
            n_f,
            matrix,
            records,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
