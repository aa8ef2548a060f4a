use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::ApproximationSpec;
use crate::diversity::IncrementalLna;
use crate::error::{Error, Result};
use crate::ising::SampleSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub time_ns: u64,
    pub diversity: usize,
}

/// Diversity of the fit samples emitted up to each grid time.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityCurve {
    pub points: Vec<CurvePoint>,
}

impl DiversityCurve {
    /// Step-function value at `t`: the last grid point at or before `t`,
    /// 0 before the first one.
    pub fn value_at(&self, t: u64) -> usize {
        let k = self.points.partition_point(|p| p.time_ns <= t);
        if k == 0 {
            0
        } else {
            self.points[k - 1].diversity
        }
    }

    /// First grid time with diversity ≥ `target`.
    pub fn first_time_reaching(&self, target: usize) -> Option<u64> {
        self.points.iter().find(|p| p.diversity >= target).map(|p| p.time_ns)
    }

    pub fn final_value(&self) -> usize {
        self.points.last().map_or(0, |p| p.diversity)
    }
}

/// Evaluates the diversity lower bound at each time in `time_grid`.
///
/// Fit samples are fed in order of emission time and every shuffle keeps
/// one priority per solution across the whole run. A greedy scan can lose
/// a vertex when more arrive, so each point holds the best value seen up to
/// its time and the curve never decreases.
pub fn diversity_over_time(
    run: &SampleSet,
    spec: &ApproximationSpec,
    time_grid: &[u64],
    shuffles: usize,
    seed: u64,
) -> Result<DiversityCurve> {
    if time_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("time grid must be sorted"));
    }
    let threshold = spec.energy_threshold();
    let mut fit: Vec<_> = run.iter().filter(|s| s.energy <= threshold).collect();
    fit.sort_by_key(|s| s.time_ns);
    let mut seen = HashSet::new();
    fit.retain(|s| seen.insert(&s.config));

    let mut lna = IncrementalLna::new(spec.radius, run.num_spins, shuffles, seed)?;
    let mut next = 0;
    let mut points = Vec::with_capacity(time_grid.len());
    let mut best = 0;
    for &t in time_grid {
        let end = next + fit[next..].partition_point(|s| s.time_ns <= t);
        lna.extend(fit[next..end].iter().map(|s| s.config.clone()))?;
        next = end;
        best = best.max(lna.best());
        points.push(CurvePoint { time_ns: t, diversity: best });
    }
    Ok(DiversityCurve { points })
}

/// Fraction of experiments whose diversity at `t` reaches `target`.
pub fn estimate_success_probability(curves: &[DiversityCurve], target: usize, t: u64) -> Result<f64> {
    if curves.is_empty() {
        return Err(Error::invalid("at least one experiment is required"));
    }
    let hits = curves.iter().filter(|c| c.value_at(t) >= target).count();
    Ok(hits as f64 / curves.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{Sample, SpinConfiguration};

    fn spec() -> ApproximationSpec {
        ApproximationSpec::new(0.1, -10.0, 10.0, 0.3).unwrap()
    }

    fn run() -> SampleSet {
        let mut set = SampleSet::new("p", 8);
        let a = SpinConfiguration::all_up(8);
        let entries = [
            (a.clone(), 5.0, 10),
            (a.clone(), -10.0, 30),
            (a.complement(), -9.0, 20),
            (SpinConfiguration::from_spins(&[1, 1, 1, 1, -1, -1, -1, -1]).unwrap(), -10.0, 50),
        ];
        for (config, energy, time_ns) in entries {
            set.samples.push(Sample { config, energy, time_ns, run_index: 0 });
        }
        set
    }

    #[test]
    fn burn_in_then_growth() {
        let curve = diversity_over_time(&run(), &spec(), &[0, 10, 20, 30, 40, 50, u64::MAX], 4, 0).unwrap();
        let values: Vec<_> = curve.points.iter().map(|p| p.diversity).collect();
        assert_eq!(values, vec![0, 0, 1, 2, 2, 3, 3]);
        assert_eq!(curve.value_at(5), 0);
        assert_eq!(curve.value_at(45), 2);
        assert_eq!(curve.first_time_reaching(2), Some(30));
        assert_eq!(curve.first_time_reaching(4), None);
        assert!(diversity_over_time(&run(), &spec(), &[5, 1], 4, 0).is_err());
    }

    #[test]
    fn success_fractions() {
        let reach = DiversityCurve { points: vec![CurvePoint { time_ns: 10, diversity: 3 }] };
        let miss = DiversityCurve { points: vec![CurvePoint { time_ns: 10, diversity: 1 }] };
        assert_eq!(estimate_success_probability(&[reach.clone(), reach.clone()], 3, 10).unwrap(), 1.0);
        assert_eq!(estimate_success_probability(std::slice::from_ref(&miss), 3, 10).unwrap(), 0.0);
        let mut curves = vec![reach; 73];
        curves.extend(std::iter::repeat_n(miss, 27));
        assert_eq!(estimate_success_probability(&curves, 3, 100).unwrap(), 0.73);
        assert!(estimate_success_probability(&[], 1, 0).is_err());
    }
}
