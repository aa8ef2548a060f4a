//! Acceptance suite. Each criterion runs in isolation and prints one
//! PASS/FAIL line; the process fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;

use divbench::diversity::{
    exact_mis_bruteforce, greedy_coloring_upper_bound, lna_best_of_shuffles, lna_lower_bound, Adjacency, SimpleGraph,
};
use divbench::harness::{import_reference, reference_bounds, run_benchmark, ExperimentConfig};
use divbench::ising::io::{write_problem, write_samples};

use divbench::metrics::{diversity_over_time, run_grid, target_diversity, ttd, ApproximationSpec, Ttd};
use divbench::rng::stream_rng;
use divbench::solvers::{
    icm_move, run_pt_with_stats, IcmRungs, Replica, LadderSpec, PreparedSolver, PtConfig, PtParams, SolverKind, SolverSpec,
    TemperatureLadder,
};
use divbench::topology::{gen_ac3, gen_dcl, gen_ran1, ChimeraGraph, DclParams};
use divbench::{Gauge, IsingProblem, Sample, SampleSet, SpinConfiguration};

// Oracles written against the raw coefficient lists.

fn energy_oracle(problem: &IsingProblem, spins: &[i8]) -> f64 {
    let field: f64 = problem.linear().iter().zip(spins).map(|(h, &s)| h * s as f64).sum();
    let coupling: f64 = problem
        .couplings()
        .iter()
        .map(|c| c.value * (spins[c.i] * spins[c.j]) as f64)
        .sum();
    field + coupling
}

fn spins_of(n: usize, mask: u64) -> Vec<i8> {
    (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect()
}

/// (E_min, E_max) by enumerating all 2^N states.
fn enumerate_spectrum(problem: &IsingProblem) -> (f64, f64) {
    let n = problem.num_spins();
    assert!(n <= 24);
    (0..1u64 << n)
        .map(|m| energy_oracle(problem, &spins_of(n, m)))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)))
}

/// Maximum independent set by checking every vertex subset.
fn mis_by_subsets(g: &SimpleGraph) -> usize {
    let n = g.num_vertices();
    let adj: Vec<u32> = (0..n)
        .map(|v| (0..n).filter(|&u| g.adjacent(u, v)).fold(0, |m, u| m | 1 << u))
        .collect();
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn hamming(a: &[i8], b: &[i8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

// Criteria.

fn sandwich() -> Result<String, String> {
    let mut rng = stream_rng(2024, 1);
    let mut tight = 0;
    for k in 0..200u64 {
        let n = rng.gen_range(1..=18);
        let density = rng.gen_range(0.1..0.9);
        let g = SimpleGraph::random(n, density, k);
        let lower = lna_best_of_shuffles(&g, 100, k).map_err(|e| e.to_string())?;
        let exact = exact_mis_bruteforce(&g).map_err(|e| e.to_string())?;
        let upper = greedy_coloring_upper_bound(&g);
        let oracle = mis_by_subsets(&g);
        if exact != oracle {
            return Err(format!("graph {k}: exact search {exact}, subset oracle {oracle}"));
        }
        if !(lower <= exact && exact <= upper) {
            return Err(format!("graph {k}: {lower} <= {exact} <= {upper} violated"));
        }
        tight += (lower == exact) as usize;
    }
    if tight < 180 {
        return Err(format!("lower bound exact on {tight}/200 graphs, need 180"));
    }
    Ok(format!("0 violations, lower bound exact on {tight}/200"))
}

fn optimal_permutation_exists() -> Result<String, String> {
    let mut rng = stream_rng(77, 2);
    let mut checked = 0;
    for k in 0..50u64 {
        let n = rng.gen_range(1..=12);
        let g = SimpleGraph::random(n, rng.gen_range(0.1..0.9), 1000 + k);
        if n > 8 {
            continue;
        }
        let best = permutations(n)
            .iter()
            .map(|p| lna_lower_bound(&g, p).unwrap().size())
            .max()
            .unwrap();
        let exact = mis_by_subsets(&g);
        if best != exact {
            return Err(format!("graph {k} ({n} vertices): best scan {best}, MIS {exact}"));
        }
        checked += 1;
    }
    if checked == 0 {
        return Err("suite contained no small graph".into());
    }
    Ok(format!("{checked} graphs with at most 8 vertices"))
}

fn spectrum_symmetry() -> Result<String, String> {
    let lattices = [ChimeraGraph::new(1).unwrap(), ChimeraGraph::rectangular(1, 2).unwrap()];
    for lattice in &lattices {
        for seed in 0..10 {
            let p = gen_ran1(lattice.graph(), seed);
            let (lo, hi) = enumerate_spectrum(&p);
            if hi != -lo {
                return Err(format!("N={} seed {seed}: E_min {lo}, E_max {hi}", p.num_spins()));
            }
        }
    }
    Ok("20 instances, E_max = -E_min".into())
}

fn solver_correctness() -> Result<String, String> {
    let c1 = ChimeraGraph::new(1).unwrap();
    let spec = SolverSpec::PtIcm(PtParams {
        ladder: LadderSpec::default(),
        ..PtParams::default()
    });
    let mut worst = 100;
    for seed in 0..10 {
        for problem in [gen_ran1(c1.graph(), seed), gen_ac3(&c1, seed)] {
            let (ground, _) = enumerate_spectrum(&problem);
            let PreparedSolver::Pt(mut config) = spec.prepare(&problem, seed).map_err(|e| e.to_string())? else {
                return Err("expected a tempering solver".into());
            };
            config.num_copies = 1;
            config.max_sweeps = 10_000;
            config.target_energy = Some(ground + 1e-9);
            let mut hits = 0;
            for run in 0..100 {
                config.seed = run;
                let (_, stats) = run_pt_with_stats(&problem, &config).map_err(|e| e.to_string())?;
                hits += stats.reached_target as usize;
            }
            worst = worst.min(hits);
            if hits < 99 {
                return Err(format!("{} seed {seed}: ground state in {hits}/100 runs", problem.id()));
            }
        }
    }

    let mut rng = stream_rng(5, 4);
    let problems: Vec<IsingProblem> = (1..=3)
        .flat_map(|l| {
            let c = ChimeraGraph::new(l).unwrap();
            vec![gen_ran1(c.graph(), l as u64), gen_ac3(&c, l as u64), gen_dcl(&c, l as u64, &DclParams::default()).unwrap()]
        })
        .collect();
    for m in 0..10_000 {
        let p = &problems[m % problems.len()];
        let mut a = Replica::random(p, &mut rng);
        let mut b = Replica::random(p, &mut rng);
        let before = energy_oracle(p, a.spins()) + energy_oracle(p, b.spins());
        icm_move(p, &mut a, &mut b, &mut rng).map_err(|e| e.to_string())?;
        let after = energy_oracle(p, a.spins()) + energy_oracle(p, b.spins());
        if before != after || a.energy() != energy_oracle(p, a.spins()) {
            return Err(format!("move {m}: pair energy {before} -> {after}"));
        }
    }
    Ok(format!("worst instance {worst}/100 runs; 10000 cluster moves conserve pair energy"))
}

fn gauge_invariance() -> Result<String, String> {
    let mut rng = stream_rng(99, 5);
    for t in 0..1000 {
        let n = rng.gen_range(1..=40);
        let linear: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut couplings = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < 0.2 {
                    couplings.push((i, j, rng.gen_range(-2.0..2.0)));
                }
            }
        }
        let problem = IsingProblem::new(n, linear, couplings).map_err(|e| e.to_string())?;
        let gauge = Gauge::random(n, &mut rng);
        let config = SpinConfiguration::random(n, &mut rng);
        let moved = problem.gauge_transform(&gauge).map_err(|e| e.to_string())?;
        let moved_config = gauge.apply(&config).map_err(|e| e.to_string())?;
        let e = problem.energy(&config).unwrap();
        if moved.energy(&moved_config).unwrap() != e || energy_oracle(&problem, &config.to_spin_vec()) != e {
            return Err(format!("triple {t}: energy changed under gauge"));
        }
    }
    Ok("1000 triples".into())
}

fn clock_accounting() -> Result<String, String> {
    let mut rng = stream_rng(31, 6);
    for t in 0..60 {
        let l = rng.gen_range(1..=3);
        let problem = gen_ran1(ChimeraGraph::new(l).unwrap().graph(), t);
        let n = problem.num_spins() as u64;
        let rungs = rng.gen_range(1..=6);
        let ladder = if rungs == 1 {
            TemperatureLadder::new(vec![1.0])
        } else {
            TemperatureLadder::geometric(0.1, 3.0, rungs)
        }
        .map_err(|e| e.to_string())?;
        let mut config = PtConfig::new(ladder, t);
        config.num_copies = rng.gen_range(1..=4);
        config.sweeps_between_samples = rng.gen_range(1..=7);
        config.max_sweeps = rng.gen_range(1..=60);
        config.icm_enabled = rng.gen();
        config.icm_rungs = if rng.gen() { IcmRungs::All } else { IcmRungs::ColdestHalf };
        config.icm_moves_per_iteration = rng.gen_range(1..=3);
        let replicas = rungs as u64 * if config.icm_enabled { 2 } else { 1 };
        let (set, stats) = run_pt_with_stats(&problem, &config).map_err(|e| e.to_string())?;

        let copies = config.num_copies as u64;
        let sweeps = config.max_sweeps as u64;
        if stats.total_updates != sweeps * replicas * copies * n {
            return Err(format!("config {t}: {} updates, expected {}", stats.total_updates, sweeps * replicas * copies * n));
        }
        let sbs = config.sweeps_between_samples as u64;
        let per_copy = sweeps / sbs;
        if set.len() as u64 != per_copy * copies * replicas {
            return Err(format!("config {t}: {} samples", set.len()));
        }
        for (k, s) in set.iter().enumerate() {
            let emission = k as u64 / replicas;
            let (copy, within) = (emission / per_copy, emission % per_copy);
            let done = copy * sweeps + (within + 1) * sbs;
            if s.time_ns != done * replicas * n || s.run_index as u64 != copy {
                return Err(format!("config {t} sample {k}: time {} expected {}", s.time_ns, done * replicas * n));
            }
        }
    }
    Ok("60 random configurations".into())
}

fn ttd_formula() -> Result<String, String> {
    let check = |p: f64, n: u64, t_a: f64| ttd(p, n, t_a).map_err(|e| e.to_string());
    if check(0.99, 4, 250.0)? != Ttd::Finite(1000.0) {
        return Err("p = 0.99 must give n_runs * t_a".into());
    }
    let oracle_us = 0.01f64.ln() / 0.5f64.ln();
    let Ttd::Finite(got) = check(0.5, 1, 1000.0)? else {
        return Err("p = 0.5 gave no finite value".into());
    };
    if (got / 1000.0 - 6.6439).abs() > 1e-4 || (got / 1000.0 - oracle_us).abs() > 1e-12 {
        return Err(format!("p = 0.5 gave {got} ns"));
    }
    if check(0.0, 10, 1.0)? != Ttd::Unbounded {
        return Err("p = 0 must be unbounded".into());
    }
    Ok(format!("p = 0.5 -> {:.4} us", got / 1000.0))
}

fn diversity_curves_and_import() -> Result<String, String> {
    let err = |e: divbench::Error| e.to_string();
    let problem = gen_ran1(ChimeraGraph::new(4).unwrap().graph(), 3);
    let ladder = LadderSpec::Geometric { beta_min: 0.1, beta_max: 3.0, rungs: 12 };
    let reference_spec = SolverSpec::PtIcm(PtParams {
        ladder: ladder.clone(),
        num_copies: 4,
        max_sweeps: 2000,
        ..PtParams::default()
    });
    let reference = reference_spec.prepare(&problem, 1).map_err(err)?.run(&problem, 1, None).map_err(err)?;
    let bounds = reference_bounds(&problem, &reference, 0, 0).map_err(err)?;
    let spec = ApproximationSpec::new(0.01, bounds.e_min, bounds.e_max, 0.2).map_err(err)?;
    let target = target_diversity(&reference, &spec, 5, 20, 2, "reference").map_err(err)?;

    let solver = SolverSpec::PtIcm(PtParams {
        ladder,
        max_sweeps: 1000,
        sweeps_between_samples: 1,
        ..PtParams::default()
    })
    .prepare(&problem, 0)
    .map_err(err)?;
    let t_a = solver.emission_interval_ns(problem.num_spins());
    let grid: Vec<u64> = run_grid(1000, 60).into_iter().map(|k| k * t_a).collect();
    let threshold = spec.energy_threshold();
    let mut reached = 0;
    for e in 0..8u64 {
        let run = solver.run(&problem, 100 + e, None).map_err(err)?;
        let curve = diversity_over_time(&run, &spec, &grid, 20, e).map_err(err)?;
        let values: Vec<usize> = curve.points.iter().map(|p| p.diversity).collect();
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(format!("experiment {e}: curve decreases"));
        }
        let first_fit = run.iter().filter(|s| s.energy <= threshold).map(|s| s.time_ns).min();
        let Some(first_fit) = first_fit else {
            return Err(format!("experiment {e}: no fit sample"));
        };
        for p in &curve.points {
            if (p.time_ns < first_fit) != (p.diversity == 0) {
                return Err(format!("experiment {e}: value {} at {} ns, first fit at {first_fit}", p.diversity, p.time_ns));
            }
        }
        if values[0] != 0 {
            return Err(format!("experiment {e}: no burn-in before the first fit sample"));
        }
        if values.last() <= values.iter().find(|&&v| v > 0) {
            return Err(format!("experiment {e}: diversity never grows after the first fit sample"));
        }
        reached += (curve.final_value() >= target.value) as usize;
    }

    let planted = planted_cases()?;
    Ok(format!("target {} on C_4, {reached}/8 curves reach it; {planted}", target.value))
}

/// Reference files whose fit solutions form well separated clusters, each
/// cluster a clique of the distance graph. The diversity is the cluster count.
fn planted_cases() -> Result<String, String> {
    let err = |e: divbench::Error| e.to_string();
    const N: usize = 64;
    // Only the last two spins interact, so E ranges over {-1, +1}.
    let problem = IsingProblem::from_couplings(N, [(N - 2, N - 1, -1.0)]).unwrap().with_metadata("id", "planted");
    let radius = 0.1;
    let reach = (radius * N as f64).floor() as usize;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = stream_rng(8, 8);
    for case in 0..10 {
        let clusters = 2 + case;
        let mut centers: Vec<Vec<i8>> = Vec::new();
        while centers.len() < clusters {
            let mut c: Vec<i8> = (0..N).map(|_| if rng.gen() { 1 } else { -1 }).collect();
            c[N - 1] = c[N - 2];
            if centers.iter().all(|o| hamming(o, &c) > 3 * reach) {
                centers.push(c);
            }
        }
        let mut set = SampleSet::for_problem(&problem);
        let mut time = 0;
        for center in &centers {
            for _ in 0..rng.gen_range(1..=15) {
                let mut s = center.clone();
                for _ in 0..reach / 2 {
                    let i = rng.gen_range(0..N - 2);
                    s[i] = -center[i];
                }
                // Unfit decoy far from everything.
                let mut decoy = s.clone();
                decoy[N - 1] = -decoy[N - 2];
                for spins in [s, decoy] {
                    time += 10;
                    let config = SpinConfiguration::from_spins(&spins).unwrap();
                    let energy = energy_oracle(&problem, &spins);
                    set.samples.push(Sample { config, energy, time_ns: time, run_index: 0 });
                }
            }
        }
        let path: PathBuf = dir.path().join(format!("case{case}.jsonl"));
        write_samples(&path, &set).map_err(err)?;
        let (imported, fixed) = import_reference(&problem, &path, true).map_err(err)?;
        assert!(fixed.is_empty());
        let spec = ApproximationSpec::new(0.25, -1.0, 1.0, radius).map_err(err)?;
        let got = target_diversity(&imported, &spec, 3, 10, case as u64, path.display().to_string()).map_err(err)?;
        if got.value != clusters {
            return Err(format!("case {case}: computed {} for {clusters} planted clusters", got.value));
        }
    }
    Ok("10/10 planted reference files recovered".into())
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    for (k, problem) in [gen_ran1(ChimeraGraph::new(2).unwrap().graph(), 1), gen_ac3(&ChimeraGraph::new(2).unwrap(), 2)]
        .into_iter()
        .enumerate()
    {
        let path = dir.path().join(format!("p{k}.json"));
        write_problem(&path, &problem).map_err(|e| e.to_string())?;
        problems.push(path);
    }
    let run = |threads: usize| -> Result<Vec<u8>, String> {
        let mut config = ExperimentConfig::new(problems.clone(), SolverKind::PtIcm);
        config.params = serde_json::json!({"ladder": {"beta_min": 0.2, "beta_max": 3.0, "rungs": 4}, "max_sweeps": 500});
        config.grid.insert("num_copies".into(), vec![serde_json::json!(1), serde_json::json!(2)]);
        config.alpha = 0.05;
        config.radius = 0.2;
        config.num_experiments = 12;
        config.wall_time_ns = 2_000_000;
        config.shuffles = 10;
        config.target_calculations = 3;
        config.master_seed = 42;
        config.threads = Some(threads);
        config.out_dir = dir.path().join(format!("out{threads}"));
        run_benchmark(&config).map_err(|e| e.to_string())?;
        let mut bytes = std::fs::read(config.out_dir.join("records.json")).map_err(|e| e.to_string())?;
        bytes.extend(std::fs::read(config.out_dir.join("results.csv")).map_err(|e| e.to_string())?);
        Ok(bytes)
    };
    let one = run(1)?;
    let eight = run(8)?;
    if one != eight {
        return Err("records differ between 1 and 8 workers".into());
    }
    Ok(format!("{} identical bytes of records", one.len()))
}

type Criterion = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Criterion, Duration); 9] = [
        ("sandwich property", sandwich, Duration::from_secs(60)),
        ("optimal scan order exists", optimal_permutation_exists, Duration::from_secs(60)),
        ("bipartite spectrum symmetry", spectrum_symmetry, Duration::from_secs(60)),
        ("solver correctness", solver_correctness, Duration::from_secs(120)),
        ("gauge invariance", gauge_invariance, Duration::from_secs(5)),
        ("clock accounting", clock_accounting, Duration::from_secs(30)),
        ("time-to-diversity formula", ttd_formula, Duration::from_secs(1)),
        ("diversity curves and reference import", diversity_curves_and_import, Duration::from_secs(300)),
        ("thread-count determinism", determinism, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *limit => Err(format!("{msg}; took {elapsed:.1?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {name} ({msg}) [{elapsed:.2?}]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
