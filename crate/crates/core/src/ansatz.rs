//! Fermionic generators, ordered disentangled-UCC ansatzes, and the
//! scatterer factorization search that folds high-rank excitations into a
//! shallow circuit.
//!
//! A `Generator` is the anti-hermitian object kappa = tau - tau^dagger with
//! tau = c[0]^dag c[1]^dag ... d[1] d[0] (d[0] applied first). Index lists are
//! stored ascending; the antisymmetry sign of any reordering is absorbed into
//! the variational parameter. An `OrderedAnsatz` is a product of factor
//! exponentials applied left-to-right as listed: factors[0] acts first on the
//! reference determinant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{
    scatterer_mp2_measure, mp2_amplitude, MolecularIntegrals, SpinOrbitalIndexing,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    /// Particle-hole excitation: destroys occupied, creates virtual orbitals.
    Excitation,
    /// Rank-preserving shifter with one occupied->occupied or
    /// virtual->virtual transition; commuting one with a rank-k excitation
    /// yields a rank-(k+1) excitation.
    Scatterer,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub kind: GeneratorKind,
    /// Creation indices, ascending.
    pub creations: Vec<usize>,
    /// Destruction indices, ascending.
    pub destructions: Vec<usize>,
}

impl Generator {
    pub fn new(kind: GeneratorKind, creations: &[usize], destructions: &[usize]) -> Result<Self> {
        if kind == GeneratorKind::Scatterer && (creations.len() != 2 || destructions.len() != 2) {
            return Err(Error::Arity {
                expected: 2,
                got: creations.len().max(destructions.len()),
            });
        }
        if creations.len() != destructions.len() || creations.is_empty() {
            return Err(Error::Arity {
                expected: creations.len().max(1),
                got: destructions.len(),
            });
        }
        let mut creations = creations.to_vec();
        let mut destructions = destructions.to_vec();
        creations.sort_unstable();
        destructions.sort_unstable();
        let mut all: Vec<usize> = creations.iter().chain(&destructions).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGenerator(format!(
                "repeated index in {creations:?} / {destructions:?}"
            )));
        }
        Ok(Generator {
            kind,
            creations,
            destructions,
        })
    }

    pub fn excitation(creations: &[usize], destructions: &[usize]) -> Result<Self> {
        Self::new(GeneratorKind::Excitation, creations, destructions)
    }

    pub fn scatterer(creations: &[usize], destructions: &[usize]) -> Result<Self> {
        Self::new(GeneratorKind::Scatterer, creations, destructions)
    }

    /// Effective particle-hole rank: list length for excitations, 1 for
    /// scatterers (they shift an existing excitation up by one rank).
    pub fn rank(&self) -> usize {
        match self.kind {
            GeneratorKind::Excitation => self.creations.len(),
            GeneratorKind::Scatterer => 1,
        }
    }

    pub fn max_index(&self) -> usize {
        self.creations
            .iter()
            .chain(&self.destructions)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Check the occupancy pattern against a reference occupation: excitations
    /// destroy occupied and create virtual orbitals; scatterers match one of
    /// the two allowed patterns (see `kind`). All generators must conserve Sz.
    pub fn validate(&self, indexing: &SpinOrbitalIndexing) -> Result<()> {
        if self.max_index() >= indexing.n_spin {
            return Err(Error::Index(format!(
                "generator index beyond {} spin orbitals",
                indexing.n_spin
            )));
        }
        let alpha = |list: &[usize]| {
            list.iter()
                .filter(|&&p| indexing.spin_of(p) == 0)
                .count()
        };
        if alpha(&self.creations) != alpha(&self.destructions) {
            return Err(Error::InvalidGenerator(format!("{self} does not conserve Sz")));
        }
        match self.kind {
            GeneratorKind::Excitation => {
                if self.destructions.iter().any(|&p| !indexing.is_occupied(p))
                    || self.creations.iter().any(|&p| indexing.is_occupied(p))
                {
                    return Err(Error::InvalidGenerator(format!(
                        "{self} is not a particle-hole excitation"
                    )));
                }
            }
            GeneratorKind::Scatterer => {
                let occ_dest = self
                    .destructions
                    .iter()
                    .filter(|&&p| indexing.is_occupied(p))
                    .count();
                let occ_crea = self
                    .creations
                    .iter()
                    .filter(|&&p| indexing.is_occupied(p))
                    .count();
                // Hole pattern: both destructions occupied, creations are one
                // occupied + one virtual. Particle pattern: destructions one
                // occupied + one virtual, creations both virtual.
                let hole_pattern = occ_dest == 2 && occ_crea == 1;
                let particle_pattern = occ_dest == 1 && occ_crea == 0;
                if !hole_pattern && !particle_pattern {
                    return Err(Error::InvalidGenerator(format!(
                        "{self} matches neither scatterer index pattern"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Apply tau to a determinant: destructions in ascending order first,
    /// then creations in descending order, with fermionic parity signs.
    /// Returns None when the result vanishes.
    pub fn apply_tau(&self, det: u64) -> Option<(u64, f64)> {
        let mut det = det;
        let mut sign = 1.0;
        for &p in &self.destructions {
            if det & (1 << p) == 0 {
                return None;
            }
            if (det & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            det &= !(1 << p);
        }
        for &p in self.creations.iter().rev() {
            if det & (1 << p) != 0 {
                return None;
            }
            if (det & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            det |= 1 << p;
        }
        Some((det, sign))
    }

    /// Apply tau^dagger (the reverse map).
    pub fn apply_tau_dagger(&self, det: u64) -> Option<(u64, f64)> {
        let reverse = Generator {
            kind: self.kind,
            creations: self.destructions.clone(),
            destructions: self.creations.clone(),
        };
        // (tau)^dag = d[0]^dag d[1]^dag ... c[1] c[0]: same ascending/descending
        // discipline applies after the swap, and the parity bookkeeping is
        // identical because each elementary factor is self-adjoint up to the
        // occupation flip.
        reverse.apply_tau(det)
    }

    /// Coefficient map of kappa|det> = (tau - tau^dag)|det> as (determinant,
    /// amplitude) pairs. At most two entries.
    pub fn apply_kappa(&self, det: u64) -> Vec<(u64, f64)> {
        let mut out = Vec::with_capacity(2);
        if let Some((d, s)) = self.apply_tau(det) {
            out.push((d, s));
        }
        if let Some((d, s)) = self.apply_tau_dagger(det) {
            out.push((d, -s));
        }
        out
    }

    /// The determinant kappa maps the reference onto, with its sign.
    /// Excitations and scatterers both annihilate the reference through the
    /// dagger branch, so this is just tau|reference>.
    pub fn target_determinant(&self, reference: u64) -> Result<(u64, f64)> {
        self.apply_tau(reference).ok_or_else(|| {
            Error::InvalidGenerator(format!("{self} annihilates the reference determinant"))
        })
    }

    /// Sort key used everywhere a deterministic generator order is needed.
    pub fn sort_key(&self) -> (Vec<usize>, Vec<usize>) {
        (self.destructions.clone(), self.creations.clone())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            GeneratorKind::Excitation => format!("e{}", self.creations.len()),
            GeneratorKind::Scatterer => "s".to_string(),
        };
        let list = |v: &[usize]| {
            v.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{tag}:{}->{}",
            list(&self.destructions),
            list(&self.creations)
        )
    }
}

/// One exponential factor of the ansatz with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzFactor {
    pub generator: Generator,
    /// For scatterers: position (in the factor list) of the double they
    /// multiply onto.
    pub paired_double: Option<usize>,
    /// Configuration probability that ranked this factor, once assigned.
    pub probability: Option<f64>,
    /// MP2 measure, for scatterers.
    pub measure: Option<f64>,
}

impl AnsatzFactor {
    pub fn bare(generator: Generator) -> Self {
        AnsatzFactor {
            generator,
            paired_double: None,
            probability: None,
            measure: None,
        }
    }
}

/// Ordered product of generator exponentials anchored to a reference
/// determinant. `factors[0]` is applied first; blocks run in descending rank
/// (triples if any, then doubles, then singles) with each scatterer placed
/// directly after the double it multiplies (i.e. applied after it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedAnsatz {
    pub n_spin: usize,
    pub reference: u64,
    pub factors: Vec<AnsatzFactor>,
}

impl OrderedAnsatz {
    pub fn empty(n_spin: usize, reference: u64) -> Self {
        OrderedAnsatz {
            n_spin,
            reference,
            factors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn n_parameters(&self) -> usize {
        self.factors.len()
    }

    /// Positions of the rank-2 excitation factors.
    pub fn double_slots(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, f)| {
                f.generator.kind == GeneratorKind::Excitation && f.generator.rank() == 2
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn scatterer_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| f.generator.kind == GeneratorKind::Scatterer)
            .count()
    }

    /// Structural sanity: descending-rank blocks, scatterers contiguous after
    /// their paired double, pairings point at doubles.
    pub fn validate_structure(&self) -> Result<()> {
        let mut last_rank: Option<usize> = None;
        for (i, f) in self.factors.iter().enumerate() {
            match f.generator.kind {
                GeneratorKind::Excitation => {
                    let r = f.generator.rank();
                    if let Some(prev) = last_rank {
                        if r > prev {
                            return Err(Error::Consistency(format!(
                                "factor {i}: rank {r} block after rank {prev}"
                            )));
                        }
                    }
                    last_rank = Some(r);
                }
                GeneratorKind::Scatterer => {
                    let Some(slot) = f.paired_double else {
                        return Err(Error::Pairing(format!("factor {i}: unpaired scatterer")));
                    };
                    let target = &self.factors[slot].generator;
                    if target.kind != GeneratorKind::Excitation || target.rank() != 2 {
                        return Err(Error::Pairing(format!(
                            "factor {i}: scatterer paired to a non-double"
                        )));
                    }
                    // Everything between the double and this scatterer must be
                    // a scatterer on the same double.
                    for j in slot + 1..i {
                        if self.factors[j].paired_double != Some(slot) {
                            return Err(Error::Pairing(format!(
                                "factor {i}: scatterer not contiguous with its double"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Place scatterers directly after the double at `double_slot`; multiple
    /// scatterers stack in insertion order (each applied after the previous).
    pub fn insert_scatterers(&mut self, scatterers: &[Generator], double_slot: usize) -> Result<()> {
        let target = self
            .factors
            .get(double_slot)
            .ok_or_else(|| Error::Pairing(format!("no factor at slot {double_slot}")))?;
        if target.generator.kind != GeneratorKind::Excitation || target.generator.rank() != 2 {
            return Err(Error::Pairing(format!(
                "slot {double_slot} holds {}, not a double excitation",
                target.generator
            )));
        }
        // Skip past scatterers already attached to this double.
        let mut insert_at = double_slot + 1;
        while insert_at < self.factors.len()
            && self.factors[insert_at].paired_double == Some(double_slot)
        {
            insert_at += 1;
        }
        for (offset, s) in scatterers.iter().enumerate() {
            if s.kind != GeneratorKind::Scatterer {
                return Err(Error::Pairing(format!("{s} is not a scatterer")));
            }
            let pos = insert_at + offset;
            // Re-point pairings that referenced slots at or beyond the
            // insertion position.
            for f in &mut self.factors {
                if let Some(p) = f.paired_double {
                    if p >= pos {
                        f.paired_double = Some(p + 1);
                    }
                }
            }
            self.factors.insert(
                pos,
                AnsatzFactor {
                    generator: s.clone(),
                    paired_double: Some(double_slot),
                    probability: None,
                    measure: None,
                },
            );
        }
        Ok(())
    }

    /// Short human-readable factor listing for traces.
    pub fn describe(&self) -> Vec<String> {
        self.factors
            .iter()
            .map(|f| match f.paired_double {
                Some(slot) => format!("{} (on {})", f.generator, self.factors[slot].generator),
                None => f.generator.to_string(),
            })
            .collect()
    }
}

/// All Sz-conserving singles plus MP2-screened doubles (|t| > threshold;
/// threshold 0 keeps every symmetry-allowed double unconditionally). Blocks
/// are ordered doubles-then-singles, each sorted lexicographically by
/// (destructions, creations). Returns screening warnings (degenerate MP2
/// denominators) alongside the pool.
pub fn build_duccsd_pool(
    indexing: &SpinOrbitalIndexing,
    ints: &MolecularIntegrals,
    mp2_threshold: f64,
) -> (OrderedAnsatz, Vec<String>) {
    let mut warnings = Vec::new();
    let mut doubles = Vec::new();
    let occ = &indexing.occupied;
    let virt = &indexing.virtuals;
    for (ii, &i) in occ.iter().enumerate() {
        for &j in &occ[ii + 1..] {
            for (aa, &a) in virt.iter().enumerate() {
                for &b in &virt[aa + 1..] {
                    let gen = Generator::excitation(&[a, b], &[i, j]).expect("distinct indices");
                    if gen.validate(indexing).is_err() {
                        continue; // Sz-violating combination.
                    }
                    if mp2_threshold > 0.0 {
                        match mp2_amplitude(ints, indexing, (i, j), (a, b)) {
                            Ok(t) => {
                                if t.abs() <= mp2_threshold {
                                    continue;
                                }
                            }
                            Err(Error::Degeneracy(msg)) => {
                                // Treated as measure zero: screened out.
                                warnings.push(format!("double {gen} screened out: {msg}"));
                                continue;
                            }
                            Err(_) => continue,
                        }
                    }
                    doubles.push(gen);
                }
            }
        }
    }
    let mut singles = Vec::new();
    for &i in occ {
        for &a in virt {
            if indexing.spin_of(i) != indexing.spin_of(a) {
                continue;
            }
            singles.push(Generator::excitation(&[a], &[i]).expect("distinct indices"));
        }
    }
    doubles.sort_by_key(Generator::sort_key);
    singles.sort_by_key(Generator::sort_key);
    let factors = doubles
        .into_iter()
        .chain(singles)
        .map(AnsatzFactor::bare)
        .collect();
    (
        OrderedAnsatz {
            n_spin: indexing.n_spin,
            reference: indexing.reference_determinant(),
            factors,
        },
        warnings,
    )
}

/// Conventional unscreened pools: ranks lists which excitation ranks to
/// include (e.g. &[1, 2] or &[1, 2, 3]). Blocks run in descending rank, each
/// sorted lexicographically.
pub fn build_conventional_pool(indexing: &SpinOrbitalIndexing, ranks: &[usize]) -> OrderedAnsatz {
    let mut blocks: Vec<Vec<Generator>> = Vec::new();
    let mut sorted_ranks: Vec<usize> = ranks.to_vec();
    sorted_ranks.sort_unstable_by(|a, b| b.cmp(a));
    sorted_ranks.dedup();
    for &rank in &sorted_ranks {
        let mut gens = Vec::new();
        for holes in combinations(&indexing.occupied, rank) {
            for parts in combinations(&indexing.virtuals, rank) {
                let gen = Generator::excitation(&parts, &holes).expect("distinct indices");
                if gen.validate(indexing).is_ok() {
                    gens.push(gen);
                }
            }
        }
        gens.sort_by_key(Generator::sort_key);
        blocks.push(gens);
    }
    OrderedAnsatz {
        n_spin: indexing.n_spin,
        reference: indexing.reference_determinant(),
        factors: blocks.into_iter().flatten().map(AnsatzFactor::bare).collect(),
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Advance the rightmost index that still has room.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] + (k - i) < items.len() {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Number of reference-occupied positions vacated by `config` (equivalently,
/// newly filled positions).
pub fn excitation_rank(config: u64, reference: u64, n_bits: usize) -> Result<usize> {
    let mask = if n_bits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_bits) - 1
    };
    let (config, reference) = (config & mask, reference & mask);
    if config.count_ones() != reference.count_ones() {
        return Err(Error::Sector(format!(
            "particle number {} vs reference {}",
            config.count_ones(),
            reference.count_ones()
        )));
    }
    Ok((reference & !config).count_ones() as usize)
}

/// Reorder by descending configuration probability with lexicographic
/// tie-break, removing factors whose probability falls below the threshold.
/// Doubles keep their attached scatterers (the whole dressed group moves or
/// is removed together). When `screen_singles` is false the singles block is
/// ordered but never removed.
pub fn reorder_by_probability(
    ansatz: &OrderedAnsatz,
    configs: &[crate::simulator::Configuration],
    prob_threshold: f64,
    screen_singles: bool,
) -> Result<OrderedAnsatz> {
    let mut prob_of: std::collections::BTreeMap<u64, f64> = std::collections::BTreeMap::new();
    for c in configs {
        if prob_of.insert(c.bits, c.probability).is_some() {
            return Err(Error::Ambiguity(format!(
                "duplicate configuration {}",
                c.bitstring()
            )));
        }
    }

    // Group factors: each excitation heads a group; scatterers ride with
    // their paired double.
    struct Group {
        head: AnsatzFactor,
        tail: Vec<AnsatzFactor>,
        probability: f64,
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut slot_to_group: std::collections::BTreeMap<usize, usize> =
        std::collections::BTreeMap::new();
    for (i, f) in ansatz.factors.iter().enumerate() {
        match f.generator.kind {
            GeneratorKind::Excitation => {
                let (det, _) = f.generator.target_determinant(ansatz.reference)?;
                let p = prob_of.get(&det).copied().unwrap_or(0.0);
                slot_to_group.insert(i, groups.len());
                groups.push(Group {
                    head: AnsatzFactor {
                        probability: Some(p),
                        ..f.clone()
                    },
                    tail: Vec::new(),
                    probability: p,
                });
            }
            GeneratorKind::Scatterer => {
                let slot = f
                    .paired_double
                    .ok_or_else(|| Error::Pairing("unpaired scatterer".into()))?;
                let g = slot_to_group[&slot];
                groups[g].tail.push(f.clone());
            }
        }
    }

    let keep = |g: &Group| -> bool {
        let rank = g.head.generator.rank();
        if rank == 1 && !screen_singles {
            return true;
        }
        g.probability >= prob_threshold
    };
    let mut kept: Vec<Group> = groups.into_iter().filter(keep).collect();
    // Descending probability within each rank block, descending rank between
    // blocks; lexicographic tie-break on the head generator.
    kept.sort_by(|a, b| {
        b.head
            .generator
            .rank()
            .cmp(&a.head.generator.rank())
            .then(
                b.probability
                    .partial_cmp(&a.probability)
                    .expect("finite probabilities"),
            )
            .then_with(|| a.head.generator.sort_key().cmp(&b.head.generator.sort_key()))
    });

    let mut factors = Vec::new();
    for g in kept {
        let head_pos = factors.len();
        factors.push(g.head);
        for mut s in g.tail {
            s.paired_double = Some(head_pos);
            factors.push(s);
        }
    }
    Ok(OrderedAnsatz {
        n_spin: ansatz.n_spin,
        reference: ansatz.reference,
        factors,
    })
}

/// An accepted scatterer decomposition of a high-rank target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    /// Scatterers in insertion order (innermost commutator first).
    pub scatterers: Vec<Generator>,
    /// Factor-list position of the paired double.
    pub double_slot: usize,
    /// Signed coupling: kappa commutators reproduce lambda * kappa_target.
    pub coupling: f64,
    /// Product of the scatterer MP2 measures that won the selection.
    pub measure: f64,
}

/// Derive the unique scatterer turning the `inner` excitation into `target`
/// (one rank higher), if the index sets allow one. `None` when no single
/// scatterer of either pattern connects them.
fn scatterer_candidate(
    target_holes: &[usize],
    target_parts: &[usize],
    inner_holes: &[usize],
    inner_parts: &[usize],
    indexing: &SpinOrbitalIndexing,
) -> Option<Generator> {
    let diff = |a: &[usize], b: &[usize]| -> Vec<usize> {
        a.iter().filter(|x| !b.contains(x)).copied().collect()
    };
    let holes_outside = diff(inner_holes, target_holes);
    let parts_outside = diff(inner_parts, target_parts);
    let new_holes = diff(target_holes, inner_holes);
    let new_parts = diff(target_parts, inner_parts);

    let gen = match (holes_outside.len(), parts_outside.len()) {
        // Hole pattern: refill the stray hole l, dig the two missing target
        // holes, place the one missing target particle.
        (1, 0) if new_holes.len() == 2 && new_parts.len() == 1 => {
            let creations = [new_parts[0], holes_outside[0]];
            Generator::scatterer(&creations, &new_holes).ok()?
        }
        // Particle pattern: empty the stray particle e, dig the one missing
        // hole, place the two missing target particles.
        (0, 1) if new_holes.len() == 1 && new_parts.len() == 2 => {
            let destructions = [new_holes[0], parts_outside[0]];
            Generator::scatterer(&new_parts, &destructions).ok()?
        }
        _ => return None,
    };
    gen.validate(indexing).ok()?;
    Some(gen)
}

fn bits_of(mask: u64, n_bits: usize) -> Vec<usize> {
    (0..n_bits).filter(|&p| mask & (1 << p) != 0).collect()
}

/// Coefficient of |target> in kappa_s_last ... kappa_s_first kappa_D |ref>.
/// All cross terms where a scatterer meets the bare reference vanish, so this
/// equals the nested-commutator matrix element.
fn chain_coefficient(
    double: &Generator,
    scatterers: &[Generator],
    reference: u64,
    target: u64,
) -> f64 {
    let mut state: Vec<(u64, f64)> = double.apply_kappa(reference);
    for s in scatterers {
        let mut next: std::collections::BTreeMap<u64, f64> = std::collections::BTreeMap::new();
        for (det, amp) in state {
            for (d2, a2) in s.apply_kappa(det) {
                *next.entry(d2).or_insert(0.0) += amp * a2;
            }
        }
        state = next.into_iter().filter(|(_, a)| a.abs() > 1e-12).collect();
    }
    state
        .iter()
        .find(|(d, _)| *d == target)
        .map(|(_, a)| *a)
        .unwrap_or(0.0)
}

/// Search the doubles block for a scatterer decomposition of a rank-3 or
/// rank-4 target determinant. Candidates are ranked by (product of) scatterer
/// MP2 measure; the best one is returned only if its measure strictly exceeds
/// `measure_threshold`. Degenerate measures are treated as zero and reported
/// in the warning list.
pub fn factorize_high_rank(
    target: u64,
    ansatz: &OrderedAnsatz,
    ints: &MolecularIntegrals,
    indexing: &SpinOrbitalIndexing,
    measure_threshold: f64,
) -> Result<(Option<Factorization>, Vec<String>)> {
    let reference = ansatz.reference;
    let rank = excitation_rank(target, reference, ansatz.n_spin)?;
    if rank < 3 {
        return Err(Error::Rank(format!(
            "factorization target must have rank >= 3, got {rank}"
        )));
    }
    if rank > 4 {
        return Err(Error::Rank(format!(
            "no scatterer cascade implemented for rank {rank}"
        )));
    }
    let t_holes = bits_of(reference & !target, ansatz.n_spin);
    let t_parts = bits_of(target & !reference, ansatz.n_spin);

    let mut warnings = Vec::new();
    let mut best: Option<(Factorization, Vec<usize>)> = None;
    let measure_of = |s: &Generator, warnings: &mut Vec<String>| -> f64 {
        match scatterer_mp2_measure(ints, indexing, s) {
            Ok(m) => m,
            Err(Error::Degeneracy(msg)) => {
                warnings.push(format!("scatterer {s} measure set to 0: {msg}"));
                0.0
            }
            Err(_) => 0.0,
        }
    };

    for slot in ansatz.double_slots() {
        let double = &ansatz.factors[slot].generator;
        let d_holes = &double.destructions;
        let d_parts = &double.creations;
        if rank == 3 {
            let Some(s) = scatterer_candidate(&t_holes, &t_parts, d_holes, d_parts, indexing)
            else {
                continue;
            };
            let coupling = resolve_coupling(double, &[s.clone()], reference, target, &t_parts, &t_holes);
            let Some(coupling) = coupling else { continue };
            let measure = measure_of(&s, &mut warnings);
            let dkey = double.sort_key();
            let key: Vec<usize> = dkey
                .0
                .iter()
                .chain(&dkey.1)
                .chain(&s.destructions)
                .chain(&s.creations)
                .copied()
                .collect();
            let cand = Factorization {
                scatterers: vec![s],
                double_slot: slot,
                coupling,
                measure,
            };
            consider(&mut best, cand, key);
        } else {
            // Rank 4: enumerate intermediate triples confined to the union of
            // target and double index sets, requiring a scatterer at each hop.
            let hole_pool: Vec<usize> = union(&t_holes, d_holes);
            let part_pool: Vec<usize> = union(&t_parts, d_parts);
            for mid_holes in combinations(&hole_pool, 3) {
                for mid_parts in combinations(&part_pool, 3) {
                    let Some(s1) =
                        scatterer_candidate(&mid_holes, &mid_parts, d_holes, d_parts, indexing)
                    else {
                        continue;
                    };
                    let Some(s2) =
                        scatterer_candidate(&t_holes, &t_parts, &mid_holes, &mid_parts, indexing)
                    else {
                        continue;
                    };
                    let scatterers = vec![s1, s2];
                    let coupling =
                        resolve_coupling(double, &scatterers, reference, target, &t_parts, &t_holes);
                    let Some(coupling) = coupling else { continue };
                    let m1 = measure_of(&scatterers[0], &mut warnings);
                    let m2 = measure_of(&scatterers[1], &mut warnings);
                    let dkey = double.sort_key();
                    let key: Vec<usize> = dkey
                        .0
                        .iter()
                        .chain(&dkey.1)
                        .chain(&scatterers[0].destructions)
                        .chain(&scatterers[0].creations)
                        .chain(&scatterers[1].destructions)
                        .chain(&scatterers[1].creations)
                        .copied()
                        .collect();
                    let cand = Factorization {
                        scatterers,
                        double_slot: slot,
                        coupling,
                        measure: m1 * m2,
                    };
                    consider(&mut best, cand, key);
                }
            }
        }
    }

    match best {
        Some((f, _)) if f.measure > measure_threshold => Ok((Some(f), warnings)),
        _ => Ok((None, warnings)),
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Determinant-level coupling: coefficient of |target> in the scatterer chain
/// applied to kappa_D|ref>, divided by the sign of the canonical target
/// excitation. Only unit-magnitude couplings are accepted — anything else
/// signals the chain is not plainly proportional to the target excitation.
/// The operator-level proportionality is verified separately by the dense
/// oracle.
fn resolve_coupling(
    double: &Generator,
    scatterers: &[Generator],
    reference: u64,
    target: u64,
    t_parts: &[usize],
    t_holes: &[usize],
) -> Option<f64> {
    let chain = chain_coefficient(double, scatterers, reference, target);
    if (chain.abs() - 1.0).abs() > 1e-9 {
        return None;
    }
    let canonical = Generator::excitation(t_parts, t_holes).ok()?;
    let (det, sign) = canonical.apply_tau(reference)?;
    debug_assert_eq!(det, target);
    Some(chain / sign)
}

fn consider(best: &mut Option<(Factorization, Vec<usize>)>, cand: Factorization, key: Vec<usize>) {
    let replace = match best {
        None => true,
        Some((b, bkey)) => {
            cand.measure > b.measure || (cand.measure == b.measure && key < *bkey)
        }
    };
    if replace {
        *best = Some((cand, key));
    }
}
