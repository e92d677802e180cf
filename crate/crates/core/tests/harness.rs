use faultlab::harness::{Encryption, InputSource};
use faultlab::{
    collect_experiment, read_records, run_experiment, summarize, Category, Experiment, ExperimentConfig, FaultSite,
    FaultSpec, Mode, RecordWriter, Sampling, SchemeParams, Stage, Target,
};
use proptest::prelude::*;

fn config(mode: Mode, limbs: usize) -> ExperimentConfig {
    ExperimentConfig {
        params: SchemeParams::new(mode, 16, 50, limbs, 30).with_slots(4),
        stages: Stage::ALL.to_vec(),
        targets: Target::ALL.to_vec(),
        sampling: Sampling::RandomSubset { count: 60, seed: 4 },
        scheme_seeds: vec![1, 2],
        input_seeds: vec![1, 2],
        input: InputSource::Uniform { lo: 0.0, hi: 256.0 },
        tau: 1e-3,
        out: None,
        site: FaultSite::Native,
        encryption: Encryption::Public,
        audit_every: 7,
        allow_exhaustive_large: false,
    }
}

#[test]
fn csv_round_trip_of_a_run() {
    let cfg = config(Mode::RnsOnly, 2);
    let mut w = RecordWriter::new(Vec::new());
    let stats = run_experiment(&cfg, 1, |r| w.write(r)).unwrap();
    assert_eq!(stats.seed_pairs, 4);
    assert_eq!(stats.trials, 240);
    let back = read_records(w.into_inner().unwrap().as_slice()).unwrap();
    assert_eq!(back, collect_experiment(&cfg, 1).unwrap());
    assert_eq!(back.iter().filter(|r| r.is_golden()).count(), 4);
}

#[test]
fn runs_are_reproducible_and_seed_sensitive() {
    let cfg = config(Mode::Vanilla, 1);
    let a = collect_experiment(&cfg, 1).unwrap();
    assert_eq!(a, collect_experiment(&cfg, 2).unwrap());
    let mut other = cfg.clone();
    other.scheme_seeds = vec![9, 2];
    let b = collect_experiment(&other, 1).unwrap();
    assert_ne!(a, b);
    // same fault set for every seed pair
    let specs = |rs: &[faultlab::TrialRecord], s: u64, i: u64| -> Vec<FaultSpec> {
        rs.iter()
            .filter(|r| r.scheme_seed == s && r.input_seed == i)
            .filter_map(|r| r.fault)
            .collect()
    };
    assert_eq!(specs(&a, 1, 1), specs(&a, 2, 2));
}

#[test]
fn secret_key_encryption_runs() {
    let mut cfg = config(Mode::RnsNtt, 2);
    cfg.encryption = Encryption::Secret;
    let rs = collect_experiment(&cfg, 1).unwrap();
    let s = summarize(&rs);
    assert_eq!(s.golden_rows, 4);
    assert!(s.groups.iter().map(|g| g.trials).sum::<usize>() == 240);
}

#[test]
fn every_mode_decodes_the_same_golden_output() {
    let outputs: Vec<Vec<f64>> = [(Mode::Vanilla, 1), (Mode::RnsOnly, 1), (Mode::NttOnly, 1), (Mode::RnsNtt, 1)]
        .into_iter()
        .map(|(m, l)| {
            let exp = Experiment::new(config(m, l)).unwrap();
            let keys = exp.keys(3).unwrap();
            exp.golden(&keys, 5).unwrap().output
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn pre_decode_flip_of_an_unread_coefficient_is_invisible() {
    for (mode, limbs) in [(Mode::Vanilla, 1), (Mode::RnsOnly, 2)] {
        let exp = Experiment::new(config(mode, limbs)).unwrap();
        let keys = exp.keys(1).unwrap();
        let g = exp.golden(&keys, 1).unwrap();
        for bit in [0, 20, 45] {
            let spec = FaultSpec::new(Stage::PreDecode, Target::Plaintext, 0, 3, bit).unwrap();
            let out = exp.trial(&keys.0, &g, &spec).unwrap();
            assert_eq!(out.output, g.output);
            assert_eq!(exp.metrics(&g, &out).unwrap().category, Category::Robust);
        }
    }
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("z.txt"), "1.5\n2\n3\n4\n").unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(
        &path,
        "mode = \"rns_ntt\"\nring_degree = 16\nq0_bits = 50\nlimbs = 2\ndelta_log2 = 30\n\
         input_file = \"z.txt\"\nsampling = \"strided:100\"\nscheme_seeds = [1]\ninput_seeds = [1]\n\
         fault_site = \"coefficient_hook\"\nencryption = \"secret\"\nout = \"r.csv\"\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::from_file(&path).unwrap();
    assert_eq!(cfg.params.slots, 4);
    assert_eq!(cfg.site, FaultSite::CoefficientHook);
    assert_eq!(cfg.out.as_deref(), Some(dir.path().join("r.csv").as_path()));
    let rs = collect_experiment(&cfg, 1).unwrap();
    assert_eq!(rs.len(), 1 + (2usize * 2 * 16 * 64).div_ceil(100));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn incremental_trial_equals_full_pipeline(
        mode_idx in 0usize..4,
        stage_idx in 0usize..3,
        c1 in any::<bool>(),
        limb in 0usize..2,
        coeff in 0usize..16,
        bit in 0u32..64,
        hook in any::<bool>(),
    ) {
        let mode = Mode::ALL[mode_idx];
        let limbs = if mode.uses_rns() { 2 } else { 1 };
        let mut cfg = config(mode, limbs);
        if hook {
            cfg.site = FaultSite::CoefficientHook;
        }
        let exp = Experiment::new(cfg).unwrap();
        let stage = Stage::ALL[stage_idx];
        let target = match stage {
            Stage::PostEncrypt if c1 => Target::C1,
            Stage::PostEncrypt => Target::C0,
            _ => Target::Plaintext,
        };
        let width = exp.context().injectable_width();
        let spec = FaultSpec::new(stage, target, limb % exp.context().storage_limbs(), coeff, bit % width).unwrap();
        let keys = exp.keys(7).unwrap();
        let g = exp.golden(&keys, 8).unwrap();
        let fast = exp.trial(&keys.0, &g, &spec).unwrap();
        let full = exp.trial_from_scratch(&keys, &g, &spec).unwrap();
        prop_assert_eq!(fast, full);
    }
}
