use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::{CurveFile, ResultRecord};
use crate::error::{Error, Result};

/// Header of `results.csv`.
pub const CSV_HEADER: &str = "instance,class,L,solver,params_hash,target_diversity,p,n_runs,t_a_ns,ttd_ns,censored";

/// Percentile `q ∈ [0, 1]` of sorted data, interpolating linearly between
/// order statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SortedRow {
    class: String,
    solver: String,
    params_hash: String,
    rank: usize,
    instance: String,
    ttd_ns: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CensoredRow {
    class: String,
    solver: String,
    params_hash: String,
    finite: usize,
    censored: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct PairRow {
    instance: String,
    class: String,
    solver_a: String,
    solver_b: String,
    ttd_a_ns: f64,
    ttd_b_ns: f64,
    censored_a: bool,
    censored_b: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct BandRow {
    instance: String,
    solver: String,
    params_hash: String,
    time_ns: u64,
    p5: f64,
    p50: f64,
    p95: f64,
}

/// Counts of rows written by [`write_report`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub records: usize,
    pub sorted_rows: usize,
    pub censored: usize,
    pub pairs: usize,
    pub band_rows: usize,
}

fn solver_key(r: &ResultRecord) -> String {
    format!("{}-{}", r.solver, r.params_hash)
}

/// Reads `records.json` and `curves/` from `results_dir` and writes
/// `sorted_ttd.csv`, `censored.csv`, `pairwise_ttd.csv` and
/// `diversity_bands.csv` to `out_dir`.
pub fn write_report(results_dir: &Path, out_dir: &Path) -> Result<ReportSummary> {
    let records: Vec<ResultRecord> = serde_json::from_str(&std::fs::read_to_string(results_dir.join("records.json"))?)?;
    if records.is_empty() {
        return Err(Error::invalid("no records to report"));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut summary = ReportSummary {
        records: records.len(),
        ..ReportSummary::default()
    };

    // Finite TTDs sorted per class and solver setting; censored ones only counted.
    let mut groups: BTreeMap<(String, String, String), Vec<&ResultRecord>> = BTreeMap::new();
    for r in &records {
        groups
            .entry((r.class.clone(), r.solver.to_string(), r.params_hash.clone()))
            .or_default()
            .push(r);
    }
    let mut sorted = csv::Writer::from_path(out_dir.join("sorted_ttd.csv"))?;
    let mut censored = csv::Writer::from_path(out_dir.join("censored.csv"))?;
    for ((class, solver, hash), group) in &groups {
        let mut finite: Vec<(f64, &str)> = group
            .iter()
            .filter_map(|r| r.ttd.ttd_ns.map(|t| (t, r.instance.as_str())))
            .collect();
        finite.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
        for (rank, (ttd_ns, instance)) in finite.iter().enumerate() {
            sorted.serialize(SortedRow {
                class: class.clone(),
                solver: solver.clone(),
                params_hash: hash.clone(),
                rank: rank + 1,
                instance: instance.to_string(),
                ttd_ns: *ttd_ns,
            })?;
        }
        let n_censored = group.len() - finite.len();
        summary.sorted_rows += finite.len();
        summary.censored += n_censored;
        censored.serialize(CensoredRow {
            class: class.clone(),
            solver: solver.clone(),
            params_hash: hash.clone(),
            finite: finite.len(),
            censored: n_censored,
        })?;
    }
    sorted.flush()?;
    censored.flush()?;

    // Instance-by-instance comparison of every pair of solver settings.
    let mut by_instance: BTreeMap<&str, Vec<&ResultRecord>> = BTreeMap::new();
    for r in &records {
        by_instance.entry(r.instance.as_str()).or_default().push(r);
    }
    let mut pairs = csv::Writer::from_path(out_dir.join("pairwise_ttd.csv"))?;
    for (instance, rs) in &by_instance {
        for (i, a) in rs.iter().enumerate() {
            for b in &rs[i + 1..] {
                pairs.serialize(PairRow {
                    instance: instance.to_string(),
                    class: a.class.clone(),
                    solver_a: solver_key(a),
                    solver_b: solver_key(b),
                    ttd_a_ns: a.ttd.ttd_ns.unwrap_or(f64::INFINITY),
                    ttd_b_ns: b.ttd.ttd_ns.unwrap_or(f64::INFINITY),
                    censored_a: a.ttd.censored,
                    censored_b: b.ttd.censored,
                })?;
                summary.pairs += 1;
            }
        }
    }
    pairs.flush()?;

    // Diversity percentile bands across experiments.
    let mut bands = csv::Writer::from_path(out_dir.join("diversity_bands.csv"))?;
    for r in &records {
        let name = format!("{}__{}-{}.json", r.instance, r.solver, r.params_hash);
        let path = results_dir.join("curves").join(name);
        if !path.exists() {
            continue;
        }
        let file: CurveFile = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        for &k in &file.runs {
            let t = k * file.t_a_ns;
            let mut values: Vec<f64> = file.curves.iter().map(|c| c.value_at(t) as f64).collect();
            values.sort_by(f64::total_cmp);
            bands.serialize(BandRow {
                instance: r.instance.clone(),
                solver: r.solver.to_string(),
                params_hash: r.params_hash.clone(),
                time_ns: t,
                p5: percentile(&values, 0.05),
                p50: percentile(&values, 0.5),
                p95: percentile(&values, 0.95),
            })?;
            summary.band_rows += 1;
        }
    }
    bands.flush()?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&data, 0.0), 1.0);
        assert_eq!(percentile(&data, 0.5), 3.0);
        assert_eq!(percentile(&data, 1.0), 5.0);
        assert!((percentile(&data, 0.05) - 1.2).abs() < 1e-12);
        assert_eq!(percentile(&[7.0; 10], 0.95) - percentile(&[7.0; 10], 0.05), 0.0);
        assert!(percentile(&[], 0.5).is_nan());
    }
}
