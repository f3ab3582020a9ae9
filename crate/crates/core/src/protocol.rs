//! The generative construction loop that grows a shallow ansatz.
//!
//! Starting from an MP2-screened singles/doubles pool, the loop optimizes a
//! reference wavefunction, reads its configuration probabilities, trains an
//! RBM on that distribution, and lets the model propose high-rank
//! determinants. Each proposal is folded into the circuit not as a deep
//! high-rank exponential but as a pair/quadruple of rank-preserving
//! scatterers attached to an existing double, which reproduces the target
//! excitation through commutators at a fraction of the gate cost. The loop
//! repeats with the accepted configurations added to the training set until
//! the model stops proposing anything new.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ansatz::{
    build_duccsd_pool, excitation_rank, factorize_high_rank, reorder_by_probability,
    Factorization, Generator, OrderedAnsatz,
};
use crate::error::{Error, Result};
use crate::integrals::{MolecularIntegrals, SpinOrbitalIndexing};
use crate::pauli::PauliSum;
use crate::qubit_map::jw_hamiltonian;
use crate::rbm::{generate, train_cd, GenerationFilters, RbmHyperparams, RbmModel, TrainingSet};
use crate::simulator::{format_bitstring, Configuration, NoiseConfig, NoiseMode, Statevector};
use crate::vqe::{minimize_cg, minimize_spsa, ObjectiveSpec, OptimizerResult};

/// Seeds for the independent random streams the protocol consumes. Fixing
/// all of them (plus the noise seed) makes a run bit-reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolSeeds {
    /// RBM weight initialization and per-iteration training chains.
    pub rbm_train: u64,
    /// Gibbs generation chains.
    pub generation: u64,
    /// SPSA perturbation stream for noisy optimizations.
    pub optimizer: u64,
}

impl Default for ProtocolSeeds {
    fn default() -> Self {
        ProtocolSeeds {
            rbm_train: 1,
            generation: 202,
            optimizer: 303,
        }
    }
}

/// Tunables for a full construction run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Doubles with |MP2 amplitude| at or below this never enter the pool.
    pub mp2_threshold: f64,
    /// Configurations below this probability are dropped from the primary
    /// subspace, and operators targeting them are removed from the ansatz.
    pub prob_threshold: f64,
    /// Scatterer decompositions with measure at or below this are rejected.
    pub measure_threshold: f64,
    /// Highest excitation rank folded in by the main loop (3 or 4).
    pub target_rank: usize,
    /// Hard cap on construction iterations.
    pub max_iterations: usize,
    /// Stop the reference optimization early: the configuration ranking
    /// only needs relative probabilities, not a converged energy.
    pub partial_opt: bool,
    /// Optimizer iteration budget used when `partial_opt` is set.
    pub partial_opt_iterations: usize,
    /// Gibbs samples drawn per construction iteration.
    pub n_samples: usize,
    /// Gibbs sweeps before a sample is read out.
    pub gibbs_burn_in: usize,
    /// RBM training settings; `None` uses the per-system defaults.
    pub rbm: Option<RbmHyperparams>,
    /// Gradient-norm tolerance for noiseless optimizations.
    pub cg_tol: f64,
    /// Iteration cap for noiseless optimizations.
    pub cg_max_iter: usize,
    /// Iteration cap for noisy (SPSA) optimizations.
    pub spsa_max_iter: usize,
    /// Prepare the reference wavefunction under the configured noise
    /// (variant -1) instead of noiselessly (variant -2, the default).
    pub noisy_reference: bool,
    pub seeds: ProtocolSeeds,
    pub noise: NoiseConfig,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            mp2_threshold: 1e-5,
            prob_threshold: 1e-5,
            measure_threshold: 1e-6,
            target_rank: 3,
            max_iterations: 20,
            partial_opt: false,
            partial_opt_iterations: 5,
            n_samples: 5000,
            gibbs_burn_in: 100,
            rbm: None,
            cg_tol: 1e-7,
            cg_max_iter: 500,
            spsa_max_iter: 500,
            noisy_reference: false,
            seeds: ProtocolSeeds::default(),
            noise: NoiseConfig::noiseless(),
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("mp2_threshold", self.mp2_threshold),
            ("prob_threshold", self.prob_threshold),
            ("measure_threshold", self.measure_threshold),
        ] {
            if !(t >= 0.0) {
                return Err(Error::Consistency(format!(
                    "{name} must be nonnegative, got {t}"
                )));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::Consistency("max_iterations must be >= 1".into()));
        }
        if !(self.target_rank == 3 || self.target_rank == 4) {
            return Err(Error::Consistency(format!(
                "target_rank must be 3 or 4, got {}",
                self.target_rank
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::Consistency("n_samples must be >= 1".into()));
        }
        self.noise.validate()
    }

    fn rbm_hyperparams(&self, n_visible: usize) -> RbmHyperparams {
        self.rbm
            .clone()
            .unwrap_or_else(|| RbmHyperparams::defaults_for(n_visible))
    }
}

/// A configuration probability entry as it appears in the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub bitstring: String,
    pub probability: f64,
}

/// One accepted high-rank fold, with everything needed to replay or audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedRecord {
    pub target_bits: u64,
    pub target: String,
    /// The parent double the scatterers attach to.
    pub double: Generator,
    pub factorization: Factorization,
    /// Probability assigned to the reintroduced configuration.
    pub probability: f64,
}

/// A proposed target that was not folded in, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedRecord {
    pub target_bits: u64,
    pub target: String,
    pub reason: String,
}

/// Everything that happened in one construction iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Training distribution the RBM saw this iteration.
    pub training_set: Vec<TraceEntry>,
    /// Newly proposed targets (deduplicated, not previously seen).
    pub generated: Vec<String>,
    pub accepted: Vec<AcceptedRecord>,
    pub rejected: Vec<RejectedRecord>,
    /// Factor listing of the ansatz after this iteration's insertions.
    pub ansatz: Vec<String>,
    /// Noiseless energy at the warm-start point after the insertions, when
    /// a warm start is available.
    pub energy_warm_start: Option<f64>,
}

/// Append-only, serializable log of one construction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub n_spin: usize,
    pub reference: String,
    /// Energy of the optimized reference wavefunction.
    pub reference_energy: f64,
    /// Function evaluations spent preparing it.
    pub reference_evaluations: usize,
    /// Optimized pool parameters keyed by generator label, for warm starts
    /// and checkpointing.
    pub warm_start_params: BTreeMap<String, f64>,
    /// Normalized primary-subspace distribution (reference excluded).
    pub primary: Vec<TraceEntry>,
    /// Pool after probability screening, before any insertions.
    pub screened_pool: Vec<String>,
    pub iterations: Vec<IterationRecord>,
    /// Set when the loop hit `max_iterations` while still accepting.
    pub truncated: bool,
    pub warnings: Vec<String>,
}

impl ProtocolTrace {
    /// Deterministic JSON rendering; reruns with the same seeds produce
    /// byte-identical output.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The optimized reference wavefunction and the pool that produced it.
#[derive(Debug, Clone)]
pub struct Step1Result {
    /// |Ψ_SD⟩: the pool applied to the mean-field determinant at the
    /// optimized parameters (always built noiselessly; under a noisy
    /// configuration only the parameter search sees noise).
    pub state: Statevector,
    pub pool: OrderedAnsatz,
    pub params: Vec<f64>,
    pub energy: f64,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

/// Build and optimize the screened singles/doubles reference wavefunction.
pub fn step1_prepare_psi_sd(
    ints: &MolecularIntegrals,
    config: &ProtocolConfig,
) -> Result<Step1Result> {
    config.validate()?;
    let indexing = SpinOrbitalIndexing::build(ints, false)?;
    let (pool, warnings) = build_duccsd_pool(&indexing, ints, config.mp2_threshold);
    let hamiltonian = jw_hamiltonian(ints);
    let reference = Statevector::prepare_reference(&indexing);
    let init = vec![0.0; pool.n_parameters()];

    let budget = if config.partial_opt {
        config.partial_opt_iterations
    } else if config.noisy_reference {
        config.spsa_max_iter
    } else {
        config.cg_max_iter
    };

    let result = if config.noisy_reference && config.noise.mode != NoiseMode::Noiseless {
        let spec = ObjectiveSpec {
            hamiltonian,
            ansatz: pool.clone(),
            reference,
            noise: config.noise.clone(),
        };
        minimize_spsa(&spec, &init, budget, config.seeds.optimizer)?
    } else {
        let spec = ObjectiveSpec {
            hamiltonian,
            ansatz: pool.clone(),
            reference,
            noise: NoiseConfig::noiseless(),
        };
        minimize_cg(&spec, &init, config.cg_tol, budget)?
    };

    let indexing = SpinOrbitalIndexing::build(ints, false)?;
    let mut state = Statevector::prepare_reference(&indexing);
    state.apply_ansatz(&pool, &result.best_params)?;
    Ok(Step1Result {
        state,
        pool,
        params: result.best_params.clone(),
        energy: result.best_energy,
        evaluations: result.evaluations,
        warnings,
    })
}

/// The probability-screened pool and the primary-subspace distribution.
#[derive(Debug, Clone)]
pub struct Step2Result {
    pub ansatz: OrderedAnsatz,
    /// Above-threshold configurations of the reference wavefunction,
    /// reference determinant excluded, probabilities renormalized.
    pub primary: Vec<Configuration>,
    pub warnings: Vec<String>,
}

/// Read configuration probabilities off the optimized wavefunction, screen
/// and reorder the operator pool by them, and return the normalized primary
/// distribution that seeds the training set.
pub fn step2_build_primary(
    ansatz: &OrderedAnsatz,
    state: &Statevector,
    config: &ProtocolConfig,
) -> Result<Step2Result> {
    config.validate()?;
    let mut warnings = Vec::new();
    let all = state.basis_probabilities(0.0);
    let screened = reorder_by_probability(ansatz, &all, config.prob_threshold, true)?;

    // The primary subspace holds the determinants one kept pool operator
    // away from the reference — not every populated determinant. The
    // prepared state also carries rank-3+ weight through products of
    // factors, and those configurations must stay out of the training set
    // so the generator can later surface them as genuinely new targets.
    let lookup: BTreeMap<u64, f64> = all.iter().map(|c| (c.bits, c.probability)).collect();
    let mut kept: Vec<Configuration> = Vec::with_capacity(screened.len());
    for factor in screened.factors.iter().filter(|f| f.paired_double.is_none()) {
        let (det, _) = factor.generator.target_determinant(screened.reference)?;
        let p = lookup.get(&det).copied().unwrap_or(0.0);
        kept.push(Configuration::new(det, screened.n_spin, p));
    }
    kept.sort_by(|a, b| {
        b.probability
            .partial_cmp(&a.probability)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.bits.cmp(&b.bits))
    });
    let total: f64 = kept.iter().map(|c| c.probability).sum();
    if kept.is_empty() || total <= 0.0 {
        warnings.push(
            "degenerate primary subspace: no excited configuration above threshold; \
             the screened ansatz is empty"
                .into(),
        );
        return Ok(Step2Result {
            ansatz: screened,
            primary: Vec::new(),
            warnings,
        });
    }
    for c in &mut kept {
        c.probability /= total;
    }
    Ok(Step2Result {
        ansatz: screened,
        primary: kept,
        warnings,
    })
}

/// Label → optimized value map for warm-starting later optimizations.
pub fn warm_start_map(pool: &OrderedAnsatz, params: &[f64]) -> BTreeMap<String, f64> {
    pool.factors
        .iter()
        .zip(params)
        .map(|(f, &theta)| (f.generator.to_string(), theta))
        .collect()
}

/// Initial parameter vector for `ansatz`: mapped generators take their
/// stored value, everything else (scatterers included) starts at zero.
pub fn warm_params_for(ansatz: &OrderedAnsatz, map: &BTreeMap<String, f64>) -> Vec<f64> {
    ansatz
        .factors
        .iter()
        .map(|f| map.get(&f.generator.to_string()).copied().unwrap_or(0.0))
        .collect()
}

struct LoopOutcome {
    truncated: bool,
}

/// Shared construction loop: train, propose, factorize, insert, extend.
/// Targets outside [min_rank, max_rank] are logged and skipped. Returns
/// whether the iteration cap cut the loop off while it was still accepting.
#[allow(clippy::too_many_arguments)]
fn construction_loop(
    ansatz: &mut OrderedAnsatz,
    training: &mut TrainingSet,
    seen: &mut BTreeSet<u64>,
    ints: &MolecularIntegrals,
    indexing: &SpinOrbitalIndexing,
    config: &ProtocolConfig,
    min_rank: usize,
    max_rank: usize,
    hamiltonian: &PauliSum,
    warm: Option<&BTreeMap<String, f64>>,
    seed_offset: u64,
    trace: &mut ProtocolTrace,
) -> Result<LoopOutcome> {
    let n_spin = ansatz.n_spin;
    let reference = ansatz.reference;
    let hyper_base = config.rbm_hyperparams(n_spin);
    hyper_base.validate()?;
    let mut model = RbmModel::initialize(
        n_spin,
        hyper_base.n_hidden,
        config.seeds.rbm_train.wrapping_add(seed_offset),
    );
    let filters = GenerationFilters {
        n_electrons: ints.n_electrons() as u32,
        ms2: ints.ms2(),
        min_rank,
        reference,
        n_spatial: ints.n_spatial(),
    };

    let mut truncated = false;
    for iteration in 1..=config.max_iterations {
        let training_snapshot: Vec<TraceEntry> = training
            .entries
            .iter()
            .map(|&(bits, p)| TraceEntry {
                bitstring: format_bitstring(bits, n_spin),
                probability: p,
            })
            .collect();

        let mut hyper = hyper_base.clone();
        hyper.seed = config
            .seeds
            .rbm_train
            .wrapping_add(seed_offset)
            .wrapping_add(iteration as u64);
        model = train_cd(&model, training, &hyper)?;

        let proposals = generate(
            &model,
            training,
            config.n_samples,
            config.gibbs_burn_in,
            config
                .seeds
                .generation
                .wrapping_add(seed_offset)
                .wrapping_add(iteration as u64),
            &filters,
        );
        let new_targets: Vec<u64> = proposals.difference(seen).copied().collect();

        let mut accepted = Vec::new();
        let mut rejected = Vec::new();
        let mut extensions: Vec<(u64, f64)> = Vec::new();
        for &target in &new_targets {
            seen.insert(target);
            let rank = excitation_rank(target, reference, n_spin)?;
            if rank < min_rank || rank > max_rank {
                rejected.push(RejectedRecord {
                    target_bits: target,
                    target: format_bitstring(target, n_spin),
                    reason: format!("rank {rank} outside the folded range {min_rank}..={max_rank}"),
                });
                continue;
            }
            let (found, warns) =
                factorize_high_rank(target, ansatz, ints, indexing, config.measure_threshold)?;
            trace.warnings.extend(warns);
            match found {
                Some(f) => {
                    let double = ansatz.factors[f.double_slot].generator.clone();
                    let (parent_det, _) = double.target_determinant(reference)?;
                    let parent_prob = training
                        .entries
                        .iter()
                        .find(|&&(bits, _)| bits == parent_det)
                        .map(|&(_, p)| p)
                        .unwrap_or(0.0);
                    // Reintroduced configurations inherit the probability of
                    // their parent double scaled by the squared scatterer
                    // amplitudes, keeping the training distribution honest
                    // about how the target was reached.
                    let probability = parent_prob * f.measure * f.measure;
                    ansatz.insert_scatterers(&f.scatterers, f.double_slot)?;
                    extensions.push((target, probability));
                    accepted.push(AcceptedRecord {
                        target_bits: target,
                        target: format_bitstring(target, n_spin),
                        double,
                        factorization: f,
                        probability,
                    });
                }
                None => {
                    // Rerun unthresholded to tell a missing pairing apart
                    // from a below-threshold one.
                    let (relaxed, _) = factorize_high_rank(target, ansatz, ints, indexing, -1.0)?;
                    let reason = match relaxed {
                        Some(f) => format!(
                            "best decomposition measure {:.6e} not above threshold {:.6e}",
                            f.measure, config.measure_threshold
                        ),
                        None => "no scatterer pairing through the doubles block".into(),
                    };
                    rejected.push(RejectedRecord {
                        target_bits: target,
                        target: format_bitstring(target, n_spin),
                        reason,
                    });
                }
            }
        }

        let energy_warm_start = match warm {
            Some(map) => {
                let params = warm_params_for(ansatz, map);
                let mut state = Statevector::basis_state(n_spin, reference);
                state.apply_ansatz(ansatz, &params)?;
                Some(state.expectation_exact(hamiltonian)?)
            }
            None => None,
        };

        let done = accepted.is_empty();
        trace.iterations.push(IterationRecord {
            iteration,
            training_set: training_snapshot,
            generated: new_targets
                .iter()
                .map(|&t| format_bitstring(t, n_spin))
                .collect(),
            accepted,
            rejected,
            ansatz: ansatz.describe(),
            energy_warm_start,
        });

        if done {
            break;
        }
        let mut entries = training.entries.clone();
        entries.extend(extensions);
        *training = TrainingSet::new(n_spin, entries)?;
        training.normalize()?;
        if iteration == config.max_iterations {
            truncated = true;
        }
    }
    Ok(LoopOutcome { truncated })
}

/// Run the full construction: screened pool, reference optimization,
/// probability readout, and the generative fold-in loop up to
/// `config.target_rank`. Returns the final ansatz and the complete trace.
pub fn run_ts_loop(
    ints: &MolecularIntegrals,
    config: &ProtocolConfig,
) -> Result<(OrderedAnsatz, ProtocolTrace)> {
    config.validate()?;
    let indexing = SpinOrbitalIndexing::build(ints, false)?;
    let hamiltonian = jw_hamiltonian(ints);
    let n_spin = ints.n_spin();

    let step1 = step1_prepare_psi_sd(ints, config)?;
    let step2 = step2_build_primary(&step1.pool, &step1.state, config)?;
    let warm = warm_start_map(&step1.pool, &step1.params);

    let mut trace = ProtocolTrace {
        n_spin,
        reference: format_bitstring(indexing.reference_determinant(), n_spin),
        reference_energy: step1.energy,
        reference_evaluations: step1.evaluations,
        warm_start_params: warm.clone(),
        primary: step2
            .primary
            .iter()
            .map(|c| TraceEntry {
                bitstring: c.bitstring(),
                probability: c.probability,
            })
            .collect(),
        screened_pool: step2.ansatz.describe(),
        iterations: Vec::new(),
        truncated: false,
        warnings: step1
            .warnings
            .iter()
            .chain(&step2.warnings)
            .cloned()
            .collect(),
    };

    let mut ansatz = step2.ansatz;
    if step2.primary.is_empty() {
        return Ok((ansatz, trace));
    }

    let mut training = TrainingSet::new(
        n_spin,
        step2.primary.iter().map(|c| (c.bits, c.probability)).collect(),
    )?;
    training.normalize()?;
    let mut seen: BTreeSet<u64> = training.entries.iter().map(|&(bits, _)| bits).collect();
    seen.insert(ansatz.reference);

    let outcome = construction_loop(
        &mut ansatz,
        &mut training,
        &mut seen,
        ints,
        &indexing,
        config,
        3,
        config.target_rank,
        &hamiltonian,
        Some(&warm),
        0,
        &mut trace,
    )?;
    trace.truncated = outcome.truncated;
    Ok((ansatz, trace))
}

/// Final variational result for a constructed ansatz.
#[derive(Debug, Clone)]
pub struct FinalizeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    /// Noiseless state at the optimized parameters (under a noisy run this
    /// is the ideal-circuit state, useful for overlap diagnostics).
    pub state: Statevector,
    pub optimizer: OptimizerResult,
}

/// Optimize every parameter of the final ansatz — excitations warm-started
/// from `warm_start` when given, scatterers from zero — with the optimizer
/// matching the configured noise mode.
pub fn finalize_and_optimize(
    ansatz: &OrderedAnsatz,
    ints: &MolecularIntegrals,
    config: &ProtocolConfig,
    warm_start: Option<&BTreeMap<String, f64>>,
) -> Result<FinalizeResult> {
    config.validate()?;
    let indexing = SpinOrbitalIndexing::build(ints, false)?;
    let hamiltonian = jw_hamiltonian(ints);
    let reference = Statevector::prepare_reference(&indexing);
    let init = match warm_start {
        Some(map) => warm_params_for(ansatz, map),
        None => vec![0.0; ansatz.n_parameters()],
    };
    let spec = ObjectiveSpec {
        hamiltonian: hamiltonian.clone(),
        ansatz: ansatz.clone(),
        reference,
        noise: config.noise.clone(),
    };
    let optimizer = if config.noise.mode == NoiseMode::Noiseless {
        minimize_cg(&spec, &init, config.cg_tol, config.cg_max_iter)?
    } else {
        minimize_spsa(&spec, &init, config.spsa_max_iter, config.seeds.optimizer)?
    };
    let mut state = Statevector::prepare_reference(&indexing);
    state.apply_ansatz(ansatz, &optimizer.best_params)?;
    Ok(FinalizeResult {
        energy: optimizer.best_energy,
        params: optimizer.best_params.clone(),
        state,
        optimizer,
    })
}

/// Feed an optimized triples-level state back through the loop to fold in
/// explicit quadruples via nested scatterer pairs. Systems with fewer than
/// four electrons cannot host a rank-4 excitation, so they pass through
/// unchanged.
pub fn run_tsqs_extension(
    ansatz: &OrderedAnsatz,
    state: &Statevector,
    ints: &MolecularIntegrals,
    config: &ProtocolConfig,
) -> Result<(OrderedAnsatz, ProtocolTrace)> {
    config.validate()?;
    let indexing = SpinOrbitalIndexing::build(ints, false)?;
    let hamiltonian = jw_hamiltonian(ints);
    let n_spin = ansatz.n_spin;

    let mut trace = ProtocolTrace {
        n_spin,
        reference: format_bitstring(ansatz.reference, n_spin),
        reference_energy: state.expectation_exact(&hamiltonian)?,
        reference_evaluations: 0,
        warm_start_params: BTreeMap::new(),
        primary: Vec::new(),
        screened_pool: ansatz.describe(),
        iterations: Vec::new(),
        truncated: false,
        warnings: Vec::new(),
    };

    let mut extended = ansatz.clone();
    if ints.n_electrons() < 4 {
        trace
            .warnings
            .push("fewer than four electrons: no quadruple sector to fold".into());
        return Ok((extended, trace));
    }

    let kept: Vec<Configuration> = state
        .basis_probabilities(config.prob_threshold)
        .into_iter()
        .filter(|c| c.bits != ansatz.reference)
        .collect();
    let total: f64 = kept.iter().map(|c| c.probability).sum();
    if kept.is_empty() || total <= 0.0 {
        trace
            .warnings
            .push("degenerate input state: no excited configuration above threshold".into());
        return Ok((extended, trace));
    }
    trace.primary = kept
        .iter()
        .map(|c| TraceEntry {
            bitstring: c.bitstring(),
            probability: c.probability / total,
        })
        .collect();

    let mut training = TrainingSet::new(
        n_spin,
        kept.iter().map(|c| (c.bits, c.probability)).collect(),
    )?;
    training.normalize()?;
    let mut seen: BTreeSet<u64> = training.entries.iter().map(|&(bits, _)| bits).collect();
    seen.insert(ansatz.reference);
    // Configurations already folded into the circuit are not new targets.
    for slot in extended.double_slots() {
        let (det, _) = extended.factors[slot]
            .generator
            .target_determinant(extended.reference)?;
        seen.insert(det);
    }

    let outcome = construction_loop(
        &mut extended,
        &mut training,
        &mut seen,
        ints,
        &indexing,
        config,
        4,
        4,
        &hamiltonian,
        None,
        10_000,
        &mut trace,
    )?;
    trace.truncated = outcome.truncated;
    Ok((extended, trace))
}

/// |⟨a|b⟩|: overlap magnitude between two states of equal width.
pub fn overlap(a: &Statevector, b: &Statevector) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}
