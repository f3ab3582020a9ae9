//! RBM-assisted construction and simulation of shallow disentangled-UCC
//! ansatzes.
//!
//! The crate covers the full pipeline: FCIDUMP ingestion and MP2 screening
//! (`integrals`), fermion-to-qubit mapping (`pauli`, `qubit_map`), exact
//! statevector simulation with configurable noise (`simulator`), the ordered
//! factor pool with scatterer factorization (`ansatz`), the generative model
//! over configuration probabilities (`rbm`), variational optimizers (`vqe`),
//! the construction loop tying them together (`protocol`), and a dense
//! brute-force verification backend (`oracle`).

pub mod ansatz;
pub mod assets;
pub mod error;
pub mod integrals;
pub mod oracle;
pub mod pauli;
pub mod protocol;
pub mod qubit_map;
pub mod rbm;
pub mod simulator;
pub mod vqe;

pub use ansatz::{
    build_conventional_pool, build_duccsd_pool, excitation_rank, factorize_high_rank,
    reorder_by_probability, AnsatzFactor, Factorization, Generator, GeneratorKind, OrderedAnsatz,
};
pub use error::{Error, Result};
pub use integrals::{
    mp2_amplitude, mp2_energy, parse_fcidump, parse_fcidump_str, scatterer_mp2_measure,
    MolecularIntegrals, SpinOrbitalIndexing,
};
pub use pauli::{PauliString, PauliSum};
pub use protocol::{
    finalize_and_optimize, overlap, run_ts_loop, run_tsqs_extension, step1_prepare_psi_sd,
    step2_build_primary, ProtocolConfig, ProtocolSeeds, ProtocolTrace,
};
pub use simulator::{
    attenuate_by_readout, cnot_cost, expectation, format_bitstring, CompiledAnsatz, Configuration,
    GateCostReport, NoiseConfig, NoiseMode, Statevector,
};
pub use vqe::{
    evaluate, minimize_cg, minimize_spsa, Objective, ObjectiveSpec, OptimizerResult,
    TrajectoryPoint,
};
