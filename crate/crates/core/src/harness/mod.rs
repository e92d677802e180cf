//! Deterministic fault campaigns: seed grid × fault space, one record per trial.

mod config;
mod record;
mod summary;

pub use config::{read_input_file, Encryption, ExperimentConfig, InputSource, Profile, EXHAUSTIVE_LIMIT};
pub use record::{read_records, RecordWriter, TrialRecord, CSV_HEADER};
pub use summary::{summarize, BitProfile, GroupKey, GroupSummary, Summary};

use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::ckks::{Ciphertext, CkksContext, Plaintext, Poly, PublicKey, SecretKey};
use crate::error::{Error, Result};
use crate::fault::{enumerate_faults, flip_poly, inject, FaultSpec, PipelineState, Stage, Target};
use crate::metrics::{evaluate, Metrics};
use crate::seed::derive_rng;

/// Trials evaluated per parallel batch before records are emitted.
const BATCH: usize = 4096;

/// Fault-free pipeline of one seed pair.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldenRun {
    pub scheme_seed: u64,
    pub input_seed: u64,
    pub input: Vec<f64>,
    pub pt: Plaintext,
    pub ct: Ciphertext,
    pub m: Plaintext,
    pub output: Vec<f64>,
}

/// Decoded result of one faulted pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub output: Vec<f64>,
    pub wrapped: bool,
}

/// Keys and pipeline shared by all trials of a configuration.
pub struct Experiment {
    cfg: ExperimentConfig,
    ctx: CkksContext,
}

/// Counters returned by [`run_experiment`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub seed_pairs: usize,
    pub trials: usize,
    pub audits: usize,
}

fn trial_error(spec: &FaultSpec, e: Error) -> Error {
    match e {
        Error::Trial { .. } => e,
        other => Error::Trial {
            spec: spec.to_string(),
            reason: other.to_string(),
        },
    }
}

impl Experiment {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let ctx = CkksContext::new(cfg.params.clone())?;
        Ok(Self { cfg, ctx })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn context(&self) -> &CkksContext {
        &self.ctx
    }

    pub fn keys(&self, scheme_seed: u64) -> Result<(SecretKey, PublicKey)> {
        self.ctx.keygen(scheme_seed)
    }

    fn encrypt_rng(scheme_seed: u64, input_seed: u64) -> ChaCha20Rng {
        derive_rng(scheme_seed, &["encrypt", &input_seed.to_string()])
    }

    fn encrypt(&self, pt: &Plaintext, keys: &(SecretKey, PublicKey), rng: &mut ChaCha20Rng) -> Result<Ciphertext> {
        match self.cfg.encryption {
            Encryption::Public => self.ctx.encrypt_pk(pt, &keys.1, rng),
            Encryption::Secret => self.ctx.encrypt_sk(pt, &keys.0, rng),
        }
    }

    pub fn golden(&self, keys: &(SecretKey, PublicKey), input_seed: u64) -> Result<GoldenRun> {
        let scheme_seed = keys.0.seed();
        let input = self.cfg.input_vector(input_seed)?;
        let pt = self.ctx.encode(&input)?;
        let ct = self.encrypt(&pt, keys, &mut Self::encrypt_rng(scheme_seed, input_seed))?;
        let m = self.ctx.decrypt(&ct, &keys.0)?;
        let output = self.ctx.decode(&m)?;
        Ok(GoldenRun {
            scheme_seed,
            input_seed,
            input,
            pt,
            ct,
            m,
            output,
        })
    }

    /// Faulted decryption result, reusing the golden run: the flip enters
    /// linearly, so only the difference of the flipped polynomial is
    /// propagated (multiplied by the secret for `c1`).
    pub fn faulted_plaintext(&self, sk: &SecretKey, g: &GoldenRun, spec: &FaultSpec) -> Result<(Plaintext, bool)> {
        spec.validate(&self.ctx)?;
        let source = match spec.target {
            Target::Plaintext if spec.stage == Stage::PostEncode => &g.pt.poly,
            Target::Plaintext => &g.m.poly,
            Target::C0 => &g.ct.c0,
            Target::C1 => &g.ct.c1,
        };
        let mut flipped = source.clone();
        let wrapped = flip_poly(&self.ctx, &mut flipped, spec.limb, spec.coeff, spec.bit, self.cfg.site)?;
        if spec.stage == Stage::PreDecode {
            return Ok((Plaintext { poly: flipped, ..g.m.clone() }, wrapped));
        }
        let mut ct = g.ct.clone();
        match spec.target {
            Target::C0 => ct.c0 = flipped,
            Target::C1 => ct.c1 = flipped,
            Target::Plaintext => ct.c0 = delta_onto(&g.ct.c0, source, &flipped)?,
        }
        let m = self.ctx.decrypt_incremental(&ct, &g.ct, &g.m, sk)?;
        Ok((m, wrapped))
    }

    pub fn trial(&self, sk: &SecretKey, g: &GoldenRun, spec: &FaultSpec) -> Result<TrialOutcome> {
        let (m, wrapped) = self.faulted_plaintext(sk, g, spec)?;
        Ok(TrialOutcome {
            output: self.ctx.decode(&m)?,
            wrapped,
        })
    }

    /// The same trial through [`inject`] and the unabridged pipeline.
    pub fn trial_from_scratch(&self, keys: &(SecretKey, PublicKey), g: &GoldenRun, spec: &FaultSpec) -> Result<TrialOutcome> {
        let sk = &keys.0;
        let site = self.cfg.site;
        let (m, wrapped) = match spec.stage {
            Stage::PostEncode => {
                let (st, w) = inject(&self.ctx, &PipelineState::Encoded(g.pt.clone()), spec, site)?;
                let PipelineState::Encoded(pt) = st else { unreachable!() };
                let mut rng = Self::encrypt_rng(g.scheme_seed, g.input_seed);
                let ct = self.encrypt(&pt, keys, &mut rng)?;
                (self.ctx.decrypt(&ct, sk)?, w)
            }
            Stage::PostEncrypt => {
                let (st, w) = inject(&self.ctx, &PipelineState::Encrypted(g.ct.clone()), spec, site)?;
                let PipelineState::Encrypted(ct) = st else { unreachable!() };
                (self.ctx.decrypt(&ct, sk)?, w)
            }
            Stage::PreDecode => {
                let (st, w) = inject(&self.ctx, &PipelineState::Decrypted(g.m.clone()), spec, site)?;
                let PipelineState::Decrypted(m) = st else { unreachable!() };
                (m, w)
            }
        };
        Ok(TrialOutcome {
            output: self.ctx.decode(&m)?,
            wrapped,
        })
    }

    fn audited_trial(&self, keys: &(SecretKey, PublicKey), g: &GoldenRun, spec: &FaultSpec) -> Result<TrialOutcome> {
        let fast = self.trial(&keys.0, g, spec)?;
        let full = self.trial_from_scratch(keys, g, spec)?;
        if fast != full {
            return Err(Error::Trial {
                spec: spec.to_string(),
                reason: "incremental result differs from full recomputation".into(),
            });
        }
        Ok(fast)
    }

    pub fn metrics(&self, g: &GoldenRun, out: &TrialOutcome) -> Result<Metrics> {
        evaluate(&g.output, &out.output, self.cfg.tau)
    }
}

/// `base + (flipped - source)`.
fn delta_onto(base: &Poly, source: &Poly, flipped: &Poly) -> Result<Poly> {
    base.add(&flipped.sub(source)?)
}

/// Run the full seed grid and fault space of `cfg`, calling `emit` for each
/// record in a fixed order: per seed pair, the golden row, then trials in
/// enumeration order. Trials run on `workers` threads (0 = all cores); the
/// output does not depend on the thread count.
pub fn run_experiment<F>(cfg: &ExperimentConfig, workers: usize, mut emit: F) -> Result<RunStats>
where
    F: FnMut(&TrialRecord) -> Result<()>,
{
    let exp = Experiment::new(cfg.clone())?;
    let specs = enumerate_faults(exp.context(), &cfg.stages, &cfg.targets, cfg.sampling);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let params = &cfg.params;
    let mut stats = RunStats::default();
    for &scheme_seed in &cfg.scheme_seeds {
        let keys = exp.keys(scheme_seed)?;
        for &input_seed in &cfg.input_seeds {
            let g = exp.golden(&keys, input_seed)?;
            let first = stats.trials;
            let audit_here = |i: usize| (first + i) % cfg.audit_every == 0;
            if (0..specs.len()).any(audit_here) {
                let again = exp.golden(&exp.keys(scheme_seed)?, input_seed)?;
                if again != g {
                    return Err(Error::Trial {
                        spec: format!("golden {scheme_seed}/{input_seed}"),
                        reason: "cached golden run is not reproducible".into(),
                    });
                }
                stats.audits += 1;
            }
            let golden_metrics = evaluate(&g.output, &g.output, cfg.tau)?;
            emit(&TrialRecord::new(params, None, false, scheme_seed, input_seed, golden_metrics))?;
            for (b, chunk) in specs.chunks(BATCH).enumerate() {
                let base = b * BATCH;
                let results: Vec<(TrialRecord, bool)> = pool.install(|| {
                    chunk
                        .par_iter()
                        .enumerate()
                        .map(|(i, spec)| {
                            let audited = audit_here(base + i);
                            let out = if audited {
                                exp.audited_trial(&keys, &g, spec)
                            } else {
                                exp.trial(&keys.0, &g, spec)
                            }
                            .and_then(|o| Ok((exp.metrics(&g, &o)?, o.wrapped)))
                            .map_err(|e| trial_error(spec, e))?;
                            let rec = TrialRecord::new(params, Some(*spec), out.1, scheme_seed, input_seed, out.0);
                            Ok((rec, audited))
                        })
                        .collect::<Result<_>>()
                })?;
                for (rec, audited) in &results {
                    emit(rec)?;
                    stats.audits += usize::from(*audited);
                }
            }
            stats.trials += specs.len();
            stats.seed_pairs += 1;
        }
    }
    Ok(stats)
}

/// [`run_experiment`] collecting every record in memory.
pub fn collect_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<TrialRecord>> {
    let mut out = Vec::new();
    run_experiment(cfg, workers, |r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok(out)
}
