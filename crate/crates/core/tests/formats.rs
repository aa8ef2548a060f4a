use divbench::ising::io::{problem_from_json, problem_to_json, read_samples, samples_from_jsonl, samples_to_jsonl, write_samples};
use divbench::rng::stream_rng;
use divbench::topology::{generate, ChimeraGraph, DclParams, InstanceClass};
use divbench::{IsingProblem, Sample, SampleSet, SpinConfiguration};
use proptest::prelude::*;

fn random_set(n: usize, count: usize, seed: u64) -> SampleSet {
    let problem = generate(InstanceClass::Ran1, &ChimeraGraph::new(1).unwrap(), seed, &DclParams::default()).unwrap();
    let mut rng = stream_rng(seed, 3);
    let mut set = SampleSet::new(problem.id(), n);
    for k in 0..count {
        set.samples.push(Sample {
            config: SpinConfiguration::random(n, &mut rng),
            energy: -(k as f64) * 0.5,
            time_ns: 10 * k as u64,
            run_index: (k % 3) as u32,
        });
    }
    set
}

#[test]
fn generated_problems_roundtrip() {
    for class in InstanceClass::ALL {
        let p = generate(class, &ChimeraGraph::new(2).unwrap(), 4, &DclParams::default()).unwrap();
        let back = problem_from_json(&problem_to_json(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.metadata()["class"], class.as_str());
    }
}

#[test]
fn sample_files_roundtrip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let set = random_set(70, 25, 1);
    write_samples(&path, &set).unwrap();
    assert_eq!(read_samples(&path, Some(70)).unwrap(), set);
    assert!(read_samples(&path, Some(71)).is_err());
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(problem_from_json("{}").is_err());
    assert!(problem_from_json(r#"{"num_spins": 2, "linear": [0, 0], "couplings": [[0, 0, 1.0]]}"#).is_err());
    assert!(samples_from_jsonl("", None).is_err());
    let good = samples_to_jsonl(&random_set(8, 2, 0)).unwrap();
    let broken = good.replace("\"spins\":\"", "\"spins\":\"zz");
    assert!(samples_from_jsonl(&broken, None).is_err());
    assert!(IsingProblem::from_couplings(3, [(0, 5, 1.0)]).is_err());
}

proptest! {
    #[test]
    fn jsonl_roundtrip(n in 1usize..200, count in 0usize..20, seed in any::<u64>()) {
        let set = random_set(n, count, seed);
        let text = samples_to_jsonl(&set).unwrap();
        prop_assert_eq!(samples_from_jsonl(&text, Some(n)).unwrap(), set);
    }
}
