use std::collections::{BTreeMap, HashSet};

use serde_json::Value;

use super::{Gauge, SpinConfiguration};
use crate::error::{check_len, Error, Result};
use crate::topology::{Graph, TwoColoring};

/// A pairwise coupling `J_ij` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Ising energy function `H(s) = Σ h_i s_i + Σ_{i<j} J_ij s_i s_j`.
///
/// Problems are immutable; transformations return new problems. Zero
/// couplings are never stored.
#[derive(Clone, Debug)]
pub struct IsingProblem {
    num_spins: usize,
    linear: Vec<f64>,
    couplings: Vec<Coupling>,
    metadata: BTreeMap<String, Value>,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl PartialEq for IsingProblem {
    fn eq(&self, other: &Self) -> bool {
        self.num_spins == other.num_spins
            && self.linear == other.linear
            && self.couplings == other.couplings
            && self.metadata == other.metadata
    }
}

impl IsingProblem {
    /// Validates and builds a problem. Pairs given as `(j, i)` are
    /// normalised to `i < j`; zero couplings are dropped.
    pub fn new<I>(num_spins: usize, linear: Vec<f64>, couplings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if num_spins == 0 {
            return Err(Error::invalid("a problem needs at least one spin"));
        }
        check_len(num_spins, linear.len())?;
        if let Some(i) = linear.iter().position(|h| !h.is_finite()) {
            return Err(Error::invalid(format!("field h_{i} is not finite")));
        }
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        for (a, b, value) in couplings {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if i == j {
                return Err(Error::invalid(format!("self-coupling on spin {i}")));
            }
            if j >= num_spins {
                return Err(Error::invalid(format!("coupling ({a}, {b}) out of range for {num_spins} spins")));
            }
            if !value.is_finite() {
                return Err(Error::invalid(format!("coupling ({i}, {j}) is not finite")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::invalid(format!("duplicate coupling ({i}, {j})")));
            }
            if value != 0.0 {
                stored.push(Coupling { i, j, value });
            }
        }
        let mut neighbors = vec![Vec::new(); num_spins];
        for c in &stored {
            neighbors[c.i].push((c.j, c.value));
            neighbors[c.j].push((c.i, c.value));
        }
        Ok(Self {
            num_spins,
            linear,
            couplings: stored,
            metadata: BTreeMap::new(),
            neighbors,
        })
    }

    /// Zero-field problem.
    pub fn from_couplings<I>(num_spins: usize, couplings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::new(num_spins, vec![0.0; num_spins], couplings)
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn with_metadata_map(mut self, metadata: BTreeMap<String, Value>) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn metadata(&self) -> &BTreeMap<String, Value> {
        &self.metadata
    }

    /// `(j, J_ij)` for every coupling touching spin `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    /// Identifier from the `id` metadata key, falling back to an empty string.
    pub fn id(&self) -> &str {
        self.metadata.get("id").and_then(Value::as_str).unwrap_or("")
    }

    pub fn has_zero_field(&self) -> bool {
        self.linear.iter().all(|&h| h == 0.0)
    }

    /// The coupling graph (edges in storage order).
    pub fn coupling_graph(&self) -> Graph {
        Graph::new(self.num_spins, self.couplings.iter().map(|c| (c.i, c.j)).collect())
            .expect("stored couplings are in range")
    }

    /// Energy of `config`.
    pub fn energy(&self, config: &SpinConfiguration) -> Result<f64> {
        check_len(self.num_spins, config.len())?;
        Ok(self.energy_of_spins(&config.to_spin_vec()))
    }

    /// Energy of an unpacked `±1` vector; the length must equal `num_spins`.
    pub fn energy_of_spins(&self, spins: &[i8]) -> f64 {
        debug_assert_eq!(spins.len(), self.num_spins);
        let field: f64 = self.linear.iter().zip(spins).map(|(h, &s)| h * s as f64).sum();
        let pair: f64 = self
            .couplings
            .iter()
            .map(|c| c.value * (spins[c.i] * spins[c.j]) as f64)
            .sum();
        field + pair
    }

    pub fn energies(&self, configs: &[SpinConfiguration]) -> Result<Vec<f64>> {
        configs.iter().map(|c| self.energy(c)).collect()
    }

    /// Spin-reversal transform `h_i -> α_i h_i`, `J_ij -> α_i α_j J_ij`.
    pub fn gauge_transform(&self, gauge: &Gauge) -> Result<Self> {
        check_len(self.num_spins, gauge.len())?;
        let a = gauge.signs();
        let linear = self.linear.iter().zip(a).map(|(h, &s)| h * s as f64).collect();
        let couplings = self
            .couplings
            .iter()
            .map(|c| (c.i, c.j, c.value * (a[c.i] * a[c.j]) as f64));
        Ok(Self::new(self.num_spins, linear, couplings)?.with_metadata_map(self.metadata.clone()))
    }

    /// The problem `-H`.
    pub fn negated(&self) -> Self {
        let linear = self.linear.iter().map(|h| -h).collect();
        let couplings = self.couplings.iter().map(|c| (c.i, c.j, -c.value));
        Self::new(self.num_spins, linear, couplings)
            .expect("negation preserves validity")
            .with_metadata_map(self.metadata.clone())
    }

    /// Maximum energy of a zero-field problem on a bipartite coupling graph.
    ///
    /// Flipping one colour class negates every coupling term, so the
    /// spectrum is symmetric and `E_max = -E_min`; `e_min` comes from the
    /// caller's minimum-energy search.
    pub fn max_energy_bipartite(&self, coloring: &TwoColoring, e_min: f64) -> Result<f64> {
        if !self.has_zero_field() {
            return Err(Error::Precondition("bipartite energy symmetry requires zero field".into()));
        }
        check_len(self.num_spins, coloring.len())?;
        coloring.validate(self.couplings.iter().map(|c| (c.i, c.j)))?;
        Ok(-e_min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_spin_energies() {
        let p = IsingProblem::from_couplings(2, [(0, 1, 1.0)]).unwrap();
        let up = SpinConfiguration::from_spins(&[1, 1]).unwrap();
        let mixed = SpinConfiguration::from_spins(&[1, -1]).unwrap();
        assert_eq!(p.energy(&up).unwrap(), 1.0);
        assert_eq!(p.energy(&mixed).unwrap(), -1.0);
        assert!(p.energy(&SpinConfiguration::all_up(3)).is_err());
    }

    #[test]
    fn empty_problem_has_zero_energy() {
        let p = IsingProblem::from_couplings(5, []).unwrap();
        assert_eq!(p.energy(&SpinConfiguration::all_down(5)).unwrap(), 0.0);
        assert!(p.energies(&[]).unwrap().is_empty());
    }

    #[test]
    fn construction_rules() {
        assert!(IsingProblem::from_couplings(0, []).is_err());
        assert!(IsingProblem::from_couplings(2, [(0, 0, 1.0)]).is_err());
        assert!(IsingProblem::from_couplings(2, [(0, 2, 1.0)]).is_err());
        assert!(IsingProblem::from_couplings(3, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        let p = IsingProblem::from_couplings(3, [(2, 1, 1.0), (0, 1, 0.0)]).unwrap();
        assert_eq!(p.couplings(), &[Coupling { i: 1, j: 2, value: 1.0 }]);
    }

    #[test]
    fn field_terms_count() {
        let p = IsingProblem::new(2, vec![0.5, -2.0], [(0, 1, 1.0)]).unwrap();
        let c = SpinConfiguration::from_spins(&[-1, 1]).unwrap();
        assert_eq!(p.energy(&c).unwrap(), -0.5 - 2.0 - 1.0);
    }

    #[test]
    fn gauge_examples() {
        let p = IsingProblem::from_couplings(2, [(0, 1, 1.0)]).unwrap();
        let g = Gauge::new(vec![1, -1]).unwrap();
        assert_eq!(p.gauge_transform(&g).unwrap().couplings()[0].value, -1.0);
        assert_eq!(p.gauge_transform(&Gauge::identity(2)).unwrap(), p);
        assert_eq!(p.gauge_transform(&Gauge::new(vec![-1, -1]).unwrap()).unwrap(), p);
        assert!(p.gauge_transform(&Gauge::identity(3)).is_err());
    }

    #[test]
    fn bipartite_max_energy() {
        let p = IsingProblem::from_couplings(2, [(0, 1, 1.0)]).unwrap();
        let good = TwoColoring::new(vec![0, 1]);
        assert_eq!(p.max_energy_bipartite(&good, -10.0).unwrap(), 10.0);
        let bad = TwoColoring::new(vec![0, 0]);
        assert!(matches!(p.max_energy_bipartite(&bad, -1.0), Err(Error::ImproperColoring(0, 1))));
        let field = IsingProblem::new(2, vec![1.0, 0.0], [(0, 1, 1.0)]).unwrap();
        assert!(matches!(field.max_energy_bipartite(&good, -1.0), Err(Error::Precondition(_))));
        let empty = IsingProblem::from_couplings(3, []).unwrap();
        assert_eq!(empty.max_energy_bipartite(&TwoColoring::new(vec![0; 3]), 0.0).unwrap(), 0.0);
    }
}
