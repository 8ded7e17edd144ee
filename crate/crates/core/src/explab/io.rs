//! Flat-file output. Numbers are written as the shortest decimal that parses
//! back to the same `f64`, so CSV files round-trip bit for bit.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{MeshPoint, Quantity, SweepRecord, SweepSpec};
use crate::error::{Error, Result};

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn columns(quantities: &[Quantity]) -> Vec<&'static str> {
    let mut cols = vec!["delta", "t"];
    for q in Quantity::ALL {
        if !quantities.contains(&q) {
            continue;
        }
        cols.extend_from_slice(match q {
            Quantity::F => &["F"][..],
            Quantity::C => &["C"],
            Quantity::P => &["P"],
            Quantity::Chi => &["chi0", "chi1", "chi2", "chi3", "m_star"],
            Quantity::Shrink => &["delta_x", "delta_y", "delta_z"],
            Quantity::BlochCoeff => &["bloch_x", "bloch_y", "bloch_z"],
        });
    }
    cols.push("engine_disagreement");
    cols
}

fn field(r: &SweepRecord, col: &str) -> String {
    let v = match col {
        "delta" => r.delta,
        "t" => r.t,
        "F" => r.f,
        "C" => r.c,
        "P" => r.p,
        "chi0" => r.chi[0],
        "chi1" => r.chi[1],
        "chi2" => r.chi[2],
        "chi3" => r.chi[3],
        "m_star" => return r.m_star.to_string(),
        "delta_x" => r.delta_x,
        "delta_y" => r.delta_y,
        "delta_z" => r.delta_z,
        "bloch_x" => r.bloch_x,
        "bloch_y" => r.bloch_y,
        "bloch_z" => r.bloch_z,
        "engine_disagreement" => r.engine_disagreement,
        _ => unreachable!("unknown column {col}"),
    };
    fmt_num(v)
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Writes the selected columns of `records` with a header row.
pub fn emit_csv<W: Write>(w: W, records: &[SweepRecord], quantities: &[Quantity]) -> Result<()> {
    let cols = columns(quantities);
    let mut out = csv_writer(w);
    out.write_record(&cols)?;
    for r in records {
        out.write_record(cols.iter().map(|c| field(r, c)))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads records written by [`emit_csv`] with every quantity selected.
/// Column order is free; every column must be present.
pub fn parse_csv<R: Read>(r: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(r);
    let header: HashMap<String, usize> = rdr
        .headers()?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.to_string(), i))
        .collect();
    let cols = columns(&Quantity::ALL);
    if let Some(missing) = cols.iter().find(|c| !header.contains_key(**c)) {
        return Err(Error::Config(format!("CSV lacks column '{missing}'")));
    }
    let mut records = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let get = |c: &str| -> Result<f64> {
            let s = &row[header[c]];
            s.parse()
                .map_err(|_| Error::Config(format!("row {}: bad {c} value '{s}'", line + 1)))
        };
        let m_star = row[header["m_star"]]
            .parse()
            .map_err(|_| Error::Config(format!("row {}: bad m_star", line + 1)))?;
        records.push(SweepRecord {
            delta: get("delta")?,
            t: get("t")?,
            f: get("F")?,
            c: get("C")?,
            p: get("P")?,
            chi: [get("chi0")?, get("chi1")?, get("chi2")?, get("chi3")?],
            m_star,
            delta_x: get("delta_x")?,
            delta_y: get("delta_y")?,
            delta_z: get("delta_z")?,
            bloch_x: get("bloch_x")?,
            bloch_y: get("bloch_y")?,
            bloch_z: get("bloch_z")?,
            engine_disagreement: get("engine_disagreement")?,
        });
    }
    Ok(records)
}

/// A sweep as one JSON object: the resolved spec and the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub meta: SweepSpec,
    pub records: Vec<SweepRecord>,
}

fn json_keys(quantities: &[Quantity]) -> Vec<&'static str> {
    let mut keys = vec!["delta", "t"];
    for q in Quantity::ALL.into_iter().filter(|q| quantities.contains(q)) {
        keys.extend_from_slice(match q {
            Quantity::F => &["F"][..],
            Quantity::C => &["C"],
            Quantity::P => &["P"],
            Quantity::Chi => &["chi", "m_star"],
            Quantity::Shrink => &["delta_x", "delta_y", "delta_z"],
            Quantity::BlochCoeff => &["bloch_x", "bloch_y", "bloch_z"],
        });
    }
    keys.push("engine_disagreement");
    keys
}

/// Writes `{"meta": spec, "records": [...]}`, keeping only the keys of the
/// quantities selected in `spec`.
pub fn emit_json<W: Write>(mut w: W, spec: &SweepSpec, records: &[SweepRecord]) -> Result<()> {
    let keys = json_keys(&spec.quantities);
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let Value::Object(full) = serde_json::to_value(r)? else {
            unreachable!("records serialize to objects")
        };
        let row: Map<String, Value> =
            full.into_iter().filter(|(k, _)| keys.contains(&k.as_str())).collect();
        rows.push(Value::Object(row));
    }
    let mut doc = Map::new();
    doc.insert("meta".into(), serde_json::to_value(spec)?);
    doc.insert("records".into(), Value::Array(rows));
    serde_json::to_writer_pretty(&mut w, &Value::Object(doc))?;
    writeln!(w)?;
    Ok(())
}

/// Reads a document written by [`emit_json`] with every quantity selected.
pub fn parse_json<R: Read>(r: R) -> Result<SweepDocument> {
    Ok(serde_json::from_reader(r)?)
}

/// Mesh as CSV with columns `theta,phi,x,y,z`.
pub fn write_mesh_csv<W: Write>(w: W, mesh: &[MeshPoint]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["theta", "phi", "x", "y", "z"])?;
    for p in mesh {
        out.write_record([p.theta, p.phi, p.x, p.y, p.z].map(fmt_num))?;
    }
    out.flush()?;
    Ok(())
}
