//! CKKS client pipeline (encode, encrypt, decrypt, decode) with optional RNS
//! and NTT representations, and a deterministic single-bit fault-injection
//! harness built on top of it.

mod dd;
pub mod error;

pub mod ckks;
pub mod fault;
pub mod harness;
pub mod metrics;
pub mod ring_arith;
pub mod rns;
pub mod seed;
pub mod transforms;

pub use ckks::{Ciphertext, CkksContext, Mode, Plaintext, Poly, PublicKey, SchemeParams, SecretKey};
pub use error::{Error, Result};
pub use fault::{
    enumerate_faults, flip_bit_big, flip_bit_word, inject, FaultSite, FaultSpace, FaultSpec, PipelineState,
    Sampling, Stage, Target,
};
pub use harness::{
    collect_experiment, read_records, run_experiment, summarize, Experiment, ExperimentConfig, RecordWriter,
    Summary, TrialRecord,
};
pub use metrics::{classify, evaluate, l2_error, mse, relative_errors, Category, Metrics};
pub use ring_arith::{
    centered, find_ntt_prime, find_primitive_root, mod_mul, negacyclic_mul_schoolbook, BigPoly,
    CompositeModulus, Domain, PrimeModulus, RingPoly,
};
pub use rns::{predict_rns_error, LimbChain, RnsPoly};
pub use seed::derive_rng;
pub use transforms::{ntt_forward, ntt_inverse, EncodingContext, NttTables};
