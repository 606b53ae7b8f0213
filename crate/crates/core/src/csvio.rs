//! CSV files for queries and database exports.
//!
//! A query file starts with an optional `# protocol_hash=<hex>` comment,
//! followed by a header row and one query per row. Fingerprint columns are
//! named by the protocol (`ut_0`, `ss_0`, `r1_t1`, `u2_t3_p7`, ...) and may
//! appear in any order; an optional `label` column names each query, and all
//! other columns are ignored. Database exports use the same fingerprint
//! columns, so an export can be read back as a query file.

use std::io::{Read, Write};

use crate::database::{Database, Protocol};
use crate::error::{Error, Result};

const HASH_KEY: &str = "protocol_hash=";

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub label: String,
    pub values: Vec<f64>,
}

/// Writes raw fingerprints with the protocol hash and canonical columns.
pub fn write_queries<W: Write>(mut w: W, protocol: &Protocol, queries: &[Query]) -> Result<()> {
    writeln!(w, "# {HASH_KEY}{}", protocol.hash())?;
    let mut cw = csv::Writer::from_writer(w);
    let mut header = vec!["label".to_string()];
    header.extend(protocol.column_names());
    cw.write_record(&header)?;
    for q in queries {
        if q.values.len() != protocol.len() {
            return Err(Error::ProtocolMismatch(format!(
                "query '{}' has {} values, protocol expects {}",
                q.label,
                q.values.len(),
                protocol.len()
            )));
        }
        let mut row = vec![q.label.clone()];
        row.extend(q.values.iter().map(f64::to_string));
        cw.write_record(&row)?;
    }
    cw.flush()?;
    Ok(())
}

/// Reads queries for `protocol`; a hash comment, if present, must match.
pub fn read_queries<R: Read>(mut r: R, protocol: &Protocol) -> Result<Vec<Query>> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let expected = protocol.hash();
    for line in text.lines().take_while(|l| l.trim_start().starts_with('#')) {
        let body = line.trim_start().trim_start_matches('#').trim();
        if let Some(hash) = body.strip_prefix(HASH_KEY) {
            if hash.trim() != expected {
                return Err(Error::ProtocolMismatch(format!(
                    "query protocol {} differs from database protocol {expected}",
                    hash.trim()
                )));
            }
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let position = |name: &str| header.iter().position(|h| h == name);
    let columns: Vec<usize> = protocol
        .column_names()
        .iter()
        .map(|name| {
            position(name).ok_or_else(|| {
                Error::ProtocolMismatch(format!("query file lacks column '{name}'"))
            })
        })
        .collect::<Result<_>>()?;
    let label_col = position("label").or_else(|| position("index"));

    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let values = columns
            .iter()
            .map(|&c| {
                let cell = rec.get(c).unwrap_or("");
                cell.parse::<f64>().map_err(|_| {
                    Error::Format(format!("row {}: '{cell}' is not a number", i + 1))
                })
            })
            .collect::<Result<_>>()?;
        let label = label_col
            .and_then(|c| rec.get(c))
            .map_or_else(|| format!("q{i}"), str::to_string);
        out.push(Query { label, values });
    }
    if out.is_empty() {
        return Err(Error::Format("query file has no rows".into()));
    }
    Ok(out)
}

/// Writes every record: metadata columns, then the normalized fingerprint.
pub fn export_database<W: Write>(mut w: W, db: &Database) -> Result<()> {
    writeln!(w, "# {HASH_KEY}{}", db.protocol().hash())?;
    let n_theta = db.records().iter().map(|r| r.theta_bar.len()).max().unwrap_or(0);
    let n_alpha = db.records().iter().map(|r| r.alpha.len()).max().unwrap_or(0);
    let mut header = vec!["index".to_string(), "family".to_string()];
    header.extend((0..n_theta).map(|k| format!("theta_bar_{k}")));
    header.extend((0..n_alpha).map(|k| format!("alpha_{k}")));
    header.push("source_norm".into());
    header.extend(db.protocol().column_names());
    let mut cw = csv::Writer::from_writer(w);
    cw.write_record(&header)?;
    let padded = |v: &[f64], n: usize| -> Vec<String> {
        (0..n)
            .map(|k| v.get(k).map(f64::to_string).unwrap_or_default())
            .collect()
    };
    for (i, r) in db.records().iter().enumerate() {
        let mut row = vec![i.to_string(), r.family.name().to_string()];
        row.extend(padded(&r.theta_bar, n_theta));
        row.extend(padded(&r.alpha, n_alpha));
        row.push(r.source_norm.to_string());
        row.extend(db.row(i).iter().map(f64::to_string));
        cw.write_record(&row)?;
    }
    cw.flush()?;
    Ok(())
}
