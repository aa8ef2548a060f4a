//! File formats.
//!
//! Problems are a single JSON object:
//!
//! ```json
//! {"version": "1", "num_spins": 8, "h": [0, ...], "j": [[0, 4, -1.0], ...], "metadata": {...}}
//! ```
//!
//! Sample sets are JSON Lines. The first line is a header
//! `{"#meta": {"version": "1", "problem_id": "...", "num_spins": N}}`, every
//! following line one sample
//! `{"run": k, "time_ns": t, "energy": e, "spins": "<hex>"}` where `spins` is
//! the packed configuration (spin `8k + b` in bit `b` of byte `k`).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{IsingProblem, Sample, SampleSet, SpinConfiguration};
use crate::error::{Error, Result};
use crate::FORMAT_VERSION;

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    version: String,
    num_spins: usize,
    h: Vec<f64>,
    j: Vec<(usize, usize, f64)>,
    #[serde(default)]
    metadata: BTreeMap<String, Value>,
}

pub fn problem_to_json(problem: &IsingProblem) -> Result<String> {
    let file = ProblemFile {
        version: FORMAT_VERSION.to_string(),
        num_spins: problem.num_spins(),
        h: problem.linear().to_vec(),
        j: problem.couplings().iter().map(|c| (c.i, c.j, c.value)).collect(),
        metadata: problem.metadata().clone(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn problem_from_json(text: &str) -> Result<IsingProblem> {
    let file: ProblemFile = serde_json::from_str(text)?;
    if file.version != FORMAT_VERSION {
        return Err(Error::format(1, format!("unsupported problem version {:?}", file.version)));
    }
    Ok(IsingProblem::new(file.num_spins, file.h, file.j)?.with_metadata_map(file.metadata))
}

pub fn write_problem(path: impl AsRef<Path>, problem: &IsingProblem) -> Result<()> {
    let mut text = problem_to_json(problem)?;
    text.push('\n');
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| at(path, e))?;
    Ok(())
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<IsingProblem> {
    let path = path.as_ref();
    problem_from_json(&std::fs::read_to_string(path).map_err(|e| at(path, e))?)
}

#[derive(Serialize, Deserialize)]
struct SampleMeta {
    version: String,
    problem_id: String,
    num_spins: usize,
}

#[derive(Serialize, Deserialize)]
struct MetaLine {
    #[serde(rename = "#meta")]
    meta: SampleMeta,
}

#[derive(Serialize, Deserialize)]
struct SampleLine {
    run: u32,
    time_ns: u64,
    energy: f64,
    spins: String,
}

pub fn write_samples_to<W: Write>(mut out: W, set: &SampleSet) -> Result<()> {
    let meta = MetaLine {
        meta: SampleMeta {
            version: FORMAT_VERSION.to_string(),
            problem_id: set.problem_id.clone(),
            num_spins: set.num_spins,
        },
    };
    serde_json::to_writer(&mut out, &meta)?;
    out.write_all(b"\n")?;
    for s in set {
        let line = SampleLine {
            run: s.run_index,
            time_ns: s.time_ns,
            energy: s.energy,
            spins: s.config.to_hex(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn samples_to_jsonl(set: &SampleSet) -> Result<String> {
    let mut buf = Vec::new();
    write_samples_to(&mut buf, set)?;
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

pub fn write_samples(path: impl AsRef<Path>, set: &SampleSet) -> Result<()> {
    let path = path.as_ref();
    write_samples_to(BufWriter::new(File::create(path).map_err(|e| at(path, e))?), set)
}

/// Parses a JSON Lines sample stream.
///
/// `expected_spins` is checked against the header and every row; it is
/// required when the stream has no `#meta` header.
pub fn read_samples_from<R: BufRead>(reader: R, expected_spins: Option<usize>) -> Result<SampleSet> {
    let mut set: Option<SampleSet> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if set.is_none() {
            let value: Value = serde_json::from_str(&line).map_err(|e| Error::format(lineno, e.to_string()))?;
            if value.get("#meta").is_some() {
                let meta: MetaLine = serde_json::from_value(value).map_err(|e| Error::format(lineno, e.to_string()))?;
                if meta.meta.version != FORMAT_VERSION {
                    return Err(Error::format(lineno, format!("unsupported sample version {:?}", meta.meta.version)));
                }
                if let Some(n) = expected_spins {
                    if n != meta.meta.num_spins {
                        return Err(Error::format(
                            lineno,
                            format!("header declares {} spins, problem has {n}", meta.meta.num_spins),
                        ));
                    }
                }
                set = Some(SampleSet::new(meta.meta.problem_id, meta.meta.num_spins));
                continue;
            }
            let n = expected_spins.ok_or_else(|| Error::format(lineno, "missing #meta header and no spin count given"))?;
            set = Some(SampleSet::new("", n));
        }
        let set = set.as_mut().unwrap();
        let row: SampleLine = serde_json::from_str(&line).map_err(|e| Error::format(lineno, e.to_string()))?;
        let config = SpinConfiguration::from_hex(set.num_spins, &row.spins).map_err(|e| Error::format(lineno, e.to_string()))?;
        if !row.energy.is_finite() {
            return Err(Error::format(lineno, "energy is not finite"));
        }
        set.samples.push(Sample {
            config,
            energy: row.energy,
            time_ns: row.time_ns,
            run_index: row.run,
        });
    }
    match set {
        Some(set) => Ok(set),
        None => {
            let n = expected_spins.ok_or_else(|| Error::format(0, "empty sample file and no spin count given"))?;
            Ok(SampleSet::new("", n))
        }
    }
}

pub fn samples_from_jsonl(text: &str, expected_spins: Option<usize>) -> Result<SampleSet> {
    read_samples_from(text.as_bytes(), expected_spins)
}

pub fn read_samples(path: impl AsRef<Path>, expected_spins: Option<usize>) -> Result<SampleSet> {
    let path = path.as_ref();
    read_samples_from(BufReader::new(File::open(path).map_err(|e| at(path, e))?), expected_spins)
}

/// Prefixes an I/O error with the file it concerns.
fn at(path: &Path, e: std::io::Error) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}
