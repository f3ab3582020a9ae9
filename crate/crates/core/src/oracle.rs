//! Brute-force verification backend.
//!
//! Everything here is built directly from elementary fermionic matrices and
//! determinant arithmetic, deliberately bypassing the qubit mapping and the
//! statevector simulator so the two implementations can check each other.
//! Exact ground states come from sector-restricted diagonalization: the
//! Hamiltonian conserves particle number and Sz, so the eigenproblem is
//! solved on the determinants sharing the reference's occupation numbers.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::Generator;
use crate::assets;
use crate::error::{Error, Result};
use crate::integrals::{mp2_energy, MolecularIntegrals, SpinOrbitalIndexing};
use crate::pauli::PauliSum;
use crate::simulator::Statevector;

/// Widest register the dense-matrix paths accept.
const DENSE_QUBIT_LIMIT: usize = 12;
/// Widest system fci_ground accepts.
const FCI_SPIN_ORBITAL_LIMIT: usize = 14;

/// A dense 2^n x 2^n operator in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub n_qubits: usize,
    pub matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    fn check_width(n_qubits: usize) -> Result<()> {
        if n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::Resource(format!(
                "dense operators are capped at {DENSE_QUBIT_LIMIT} qubits, got {n_qubits}"
            )));
        }
        Ok(())
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::check_width(n_qubits)?;
        let dim = 1 << n_qubits;
        Ok(DenseOperator {
            n_qubits,
            matrix: DMatrix::zeros(dim, dim),
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, factor: Complex64) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.map(|c| c * factor),
        }
    }

    pub fn dagger(&self) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product, walking the nonzero entries of `other` column by
    /// column. Ladder-operator matrices have at most one entry per column,
    /// so this stays near-linear where naive multiplication would be cubic.
    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            for i in 0..dim {
                let b = other.matrix[(i, j)];
                if b.re == 0.0 && b.im == 0.0 {
                    continue;
                }
                let col = self.matrix.column(i);
                for k in 0..dim {
                    let a = col[k];
                    if a.re != 0.0 || a.im != 0.0 {
                        out[(k, j)] += a * b;
                    }
                }
            }
        }
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: out,
        }
    }

    pub fn commutator(&self, other: &DenseOperator) -> DenseOperator {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.dagger().add(self).max_abs() <= tol
    }

    /// Dense reconstruction of a Pauli-string sum, for cross-module checks.
    pub fn from_pauli_sum(op: &PauliSum) -> Result<DenseOperator> {
        Self::check_width(op.n_qubits())?;
        let mut out = Self::zero(op.n_qubits())?;
        let dim = out.dim() as u64;
        for term in op.terms() {
            let m = term.x_mask;
            let z = term.z_mask;
            let ipow = [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ][((m & z).count_ones() % 4) as usize];
            for x in 0..dim {
                let sign = if (x & z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
                out.matrix[((x ^ m) as usize, x as usize)] += term.coeff * ipow * sign;
            }
        }
        Ok(out)
    }
}

/// Walks one elementary operator over a determinant: returns the new
/// determinant and the fermionic parity sign, or None when annihilated.
fn apply_ladder(det: u64, p: usize, creation: bool) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    if creation == (det & bit != 0) {
        return None;
    }
    let sign = if (det & (bit - 1)).count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    };
    Some((det ^ bit, sign))
}

/// tau = c[0]^dag c[1]^dag ... d[last] ... d[0] applied to a determinant.
fn apply_product(det: u64, creations: &[usize], destructions: &[usize]) -> Option<(u64, f64)> {
    let mut state = det;
    let mut sign = 1.0;
    for &d in destructions {
        let (next, s) = apply_ladder(state, d, false)?;
        state = next;
        sign *= s;
    }
    for &c in creations.iter().rev() {
        let (next, s) = apply_ladder(state, c, true)?;
        state = next;
        sign *= s;
    }
    Some((state, sign))
}

/// Dense matrix of the ordered product c[0]^dag c[1]^dag ... d[last] ... d[0],
/// built from elementary matrices with Jordan-Wigner sign bookkeeping.
pub fn dense_from_fermion_string(
    creations: &[usize],
    destructions: &[usize],
    n_spin: usize,
) -> Result<DenseOperator> {
    let mut seen = std::collections::BTreeSet::new();
    for &p in creations.iter().chain(destructions) {
        if p >= n_spin {
            return Err(Error::Index(format!(
                "mode {p} outside {n_spin} spin orbitals"
            )));
        }
    }
    for &p in creations {
        if !seen.insert((0u8, p)) {
            return Err(Error::InvalidGenerator(format!(
                "creation index {p} repeated"
            )));
        }
    }
    seen.clear();
    for &p in destructions {
        if !seen.insert((1u8, p)) {
            return Err(Error::InvalidGenerator(format!(
                "destruction index {p} repeated"
            )));
        }
    }
    let mut out = DenseOperator::zero(n_spin)?;
    for det in 0..out.dim() as u64 {
        if let Some((target, sign)) = apply_product(det, creations, destructions) {
            out.matrix[(target as usize, det as usize)] = Complex64::new(sign, 0.0);
        }
    }
    Ok(out)
}

/// Dense anti-hermitian kappa = tau - tau^dag of a generator.
pub fn dense_kappa(gen: &Generator, n_spin: usize) -> Result<DenseOperator> {
    let tau = dense_from_fermion_string(&gen.creations, &gen.destructions, n_spin)?;
    let k = tau.sub(&tau.dagger());
    debug_assert!(k.is_anti_hermitian(1e-12));
    Ok(k)
}

/// H|det> as sparse (determinant, coefficient) pairs, straight from the
/// integral tables. All arithmetic is real.
pub fn hamiltonian_determinant_action(
    ints: &MolecularIntegrals,
    det: u64,
) -> Vec<(u64, f64)> {
    let n = ints.n_spin();
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    *acc.entry(det).or_insert(0.0) += ints.core_energy();
    for q in 0..n {
        if det >> q & 1 == 0 {
            continue;
        }
        for p in 0..n {
            let h = ints.h1_so(p, q);
            if h.abs() < 1e-14 {
                continue;
            }
            if let Some((target, sign)) = apply_product(det, &[p], &[q]) {
                *acc.entry(target).or_insert(0.0) += sign * h;
            }
        }
    }
    for r in 0..n {
        if det >> r & 1 == 0 {
            continue;
        }
        for s in r + 1..n {
            if det >> s & 1 == 0 {
                continue;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let v = ints.so_antisym(p, q, r, s);
                    if v.abs() < 1e-14 {
                        continue;
                    }
                    // Destructions read right to left: a_p^dag a_q^dag a_s a_r.
                    if let Some((target, sign)) = apply_product(det, &[p, q], &[r, s]) {
                        *acc.entry(target).or_insert(0.0) += sign * v;
                    }
                }
            }
        }
    }
    acc.into_iter().filter(|(_, c)| c.abs() > 0.0).collect()
}

/// Dense molecular Hamiltonian, independent of the qubit mapping.
pub fn dense_hamiltonian(ints: &MolecularIntegrals) -> Result<DenseOperator> {
    let mut out = DenseOperator::zero(ints.n_spin())?;
    for det in 0..out.dim() as u64 {
        for (target, coeff) in hamiltonian_determinant_action(ints, det) {
            out.matrix[(target as usize, det as usize)] = Complex64::new(coeff, 0.0);
        }
    }
    Ok(out)
}

/// Reference (mean-field) energy as the diagonal Hamiltonian element of the
/// reference determinant.
pub fn hf_energy(ints: &MolecularIntegrals, indexing: &SpinOrbitalIndexing) -> f64 {
    let reference = indexing.reference_determinant();
    hamiltonian_determinant_action(ints, reference)
        .into_iter()
        .find(|&(d, _)| d == reference)
        .map(|(_, c)| c)
        .unwrap_or(0.0)
}

/// Exact ground state in the particle-number/Sz sector of the reference.
/// Returns the energy and the full 2^n statevector, phase-fixed so the
/// largest amplitude is positive real.
pub fn fci_ground(
    ints: &MolecularIntegrals,
    indexing: &SpinOrbitalIndexing,
) -> Result<(f64, Statevector)> {
    let n = ints.n_spin();
    if n > FCI_SPIN_ORBITAL_LIMIT {
        return Err(Error::Resource(format!(
            "exact diagonalization is capped at {FCI_SPIN_ORBITAL_LIMIT} spin orbitals, got {n}"
        )));
    }
    let alpha_mask = indexing.alpha_mask();
    let reference = indexing.reference_determinant();
    let n_alpha = (reference & alpha_mask).count_ones();
    let n_beta = (reference & !alpha_mask).count_ones();
    let basis: Vec<u64> = (0..1u64 << n)
        .filter(|&det| {
            (det & alpha_mask).count_ones() == n_alpha
                && (det & !alpha_mask).count_ones() == n_beta
        })
        .collect();
    let index_of: BTreeMap<u64, usize> =
        basis.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let dim = basis.len();
    let mut sector = DMatrix::<f64>::zeros(dim, dim);
    for (j, &det) in basis.iter().enumerate() {
        for (target, coeff) in hamiltonian_determinant_action(ints, det) {
            let i = *index_of
                .get(&target)
                .expect("Hamiltonian conserves the occupation sector");
            sector[(i, j)] += coeff;
        }
    }
    let eig = SymmetricEigen::new(sector.clone());
    let mut best = 0;
    for i in 1..dim {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let energy = eig.eigenvalues[best];
    let v = eig.eigenvectors.column(best).clone_owned();
    let residual = (&sector * &v - v.scale(energy)).norm();
    if residual > 1e-9 {
        return Err(Error::Consistency(format!(
            "eigenpair residual {residual:.3e} exceeds 1e-9"
        )));
    }
    let mut largest = 0;
    for i in 1..dim {
        if v[i].abs() > v[largest].abs() {
            largest = i;
        }
    }
    let sign = if v[largest] < 0.0 { -1.0 } else { 1.0 };
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (i, &det) in basis.iter().enumerate() {
        amplitudes[det as usize] = Complex64::new(sign * v[i], 0.0);
    }
    Ok((energy, Statevector::from_amplitudes(n, amplitudes)?))
}

fn proportionality(lhs: &DenseOperator, rhs: &DenseOperator, tol: f64) -> Option<f64> {
    let lhs_scale = lhs.max_abs();
    let rhs_scale = rhs.max_abs();
    if lhs_scale <= tol || rhs_scale <= tol {
        return None;
    }
    let dim = rhs.dim();
    let mut pivot = (0, 0);
    let mut pivot_abs = 0.0;
    for j in 0..dim {
        for i in 0..dim {
            let a = rhs.matrix[(i, j)].norm();
            if a > pivot_abs {
                pivot_abs = a;
                pivot = (i, j);
            }
        }
    }
    let lambda = lhs.matrix[pivot] / rhs.matrix[pivot];
    if lambda.im.abs() > tol {
        return None;
    }
    let lambda = Complex64::new(lambda.re, 0.0);
    if lhs.max_abs_diff(&rhs.scale(lambda)) > tol {
        return None;
    }
    Some(lambda.re)
}

/// Dense check of one contraction step: is [kappa_sigma, kappa_double]
/// proportional to kappa_triple? Returns the signed coefficient when the
/// commutator matches within 1e-10, None otherwise (including when the
/// commutator vanishes or the register is too wide for dense work).
pub fn verify_factorization(
    scatterer: &Generator,
    double: &Generator,
    triple: &Generator,
    n_spin: usize,
) -> Option<f64> {
    let ks = dense_kappa(scatterer, n_spin).ok()?;
    let kd = dense_kappa(double, n_spin).ok()?;
    let kt = dense_kappa(triple, n_spin).ok()?;
    proportionality(&ks.commutator(&kd), &kt, 1e-10)
}

/// Dense check of the nested step for quadruples: is
/// [kappa_outer, [kappa_inner, kappa_double]] proportional to
/// kappa_quadruple?
pub fn verify_nested_factorization(
    outer: &Generator,
    inner: &Generator,
    double: &Generator,
    quadruple: &Generator,
    n_spin: usize,
) -> Option<f64> {
    let ko = dense_kappa(outer, n_spin).ok()?;
    let ki = dense_kappa(inner, n_spin).ok()?;
    let kd = dense_kappa(double, n_spin).ok()?;
    let kq = dense_kappa(quadruple, n_spin).ok()?;
    proportionality(&ko.commutator(&ki.commutator(&kd)), &kq, 1e-10)
}

/// Reference energies produced by this module; never hand-entered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoldenEnergies {
    pub fci_energy: f64,
    pub hf_energy: f64,
    /// Total second-order energy (reference + correlation).
    pub mp2_energy: f64,
}

pub type GoldenStore = BTreeMap<String, GoldenEnergies>;

pub fn golden_store_path() -> Result<PathBuf> {
    Ok(assets::asset_root()?.join("golden.json"))
}

pub fn load_golden_store(path: &Path) -> Result<GoldenStore> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn save_golden_store(path: &Path, store: &GoldenStore) -> Result<()> {
    let text = serde_json::to_string_pretty(store)?;
    Ok(std::fs::write(path, text)?)
}

/// Computes the golden energies for one system from scratch.
pub fn compute_golden(
    ints: &MolecularIntegrals,
    indexing: &SpinOrbitalIndexing,
) -> Result<GoldenEnergies> {
    let (fci, _) = fci_ground(ints, indexing)?;
    let hf = hf_energy(ints, indexing);
    let corr = mp2_energy(ints, indexing);
    Ok(GoldenEnergies {
        fci_energy: fci,
        hf_energy: hf,
        mp2_energy: hf + corr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{parse_fcidump, parse_fcidump_str};
    use crate::qubit_map::{jw_generator, jw_hamiltonian};
    use approx::assert_abs_diff_eq;

    #[test]
    fn elementary_creation_matrix() {
        let op = dense_from_fermion_string(&[0], &[], 1).unwrap();
        assert_eq!(op.matrix[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(op.matrix[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(op.matrix[(1, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(op.matrix[(1, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn number_operator_is_diagonal() {
        let op = dense_from_fermion_string(&[1], &[1], 3).unwrap();
        for j in 0..8 {
            for i in 0..8 {
                let expect = if i == j && (j >> 1) & 1 == 1 { 1.0 } else { 0.0 };
                assert_eq!(op.matrix[(i, j)], Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn repeated_indices_are_rejected() {
        let err = dense_from_fermion_string(&[2, 2], &[0], 4).unwrap_err();
        assert!(matches!(err, Error::InvalidGenerator(_)));
    }

    #[test]
    fn dense_kappa_matches_qubit_mapping() {
        for gen in [
            Generator::excitation(&[3], &[0]).unwrap(),
            Generator::excitation(&[3, 4], &[0, 1]).unwrap(),
            Generator::excitation(&[3, 4, 5], &[0, 1, 2]).unwrap(),
            Generator::scatterer(&[2, 4], &[0, 1]).unwrap(),
        ] {
            let direct = dense_kappa(&gen, 6).unwrap();
            let mapped =
                DenseOperator::from_pauli_sum(&jw_generator(&gen, 6).unwrap()).unwrap();
            assert!(
                direct.max_abs_diff(&mapped) < 1e-12,
                "{gen} disagrees between dense and mapped forms"
            );
        }
    }

    #[test]
    fn dense_hamiltonian_matches_qubit_mapping() {
        let ints = parse_fcidump(&assets::asset_path("h2_0.735").unwrap()).unwrap();
        let direct = dense_hamiltonian(&ints).unwrap();
        assert!(direct.is_hermitian(1e-12));
        let mapped = DenseOperator::from_pauli_sum(&jw_hamiltonian(&ints)).unwrap();
        assert!(direct.max_abs_diff(&mapped) < 1e-10);
    }

    #[test]
    fn noninteracting_ground_energy_is_orbital_sum() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n\
                    1.0 1 1 0 0\n2.0 2 2 0 0\n0.5 0 0 0 0\n";
        let ints = parse_fcidump_str(text).unwrap();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let (e, vector) = fci_ground(&ints, &indexing).unwrap();
        assert_abs_diff_eq!(e, 0.5 + 2.0 * 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            vector.probability_of(indexing.reference_determinant()),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn h2_ground_state_matches_the_full_spectrum_and_reference_value() {
        let ints = parse_fcidump(&assets::asset_path("h2_0.735").unwrap()).unwrap();
        let meta = assets::asset_metadata("h2_0.735").unwrap();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let (e, vector) = fci_ground(&ints, &indexing).unwrap();
        assert_abs_diff_eq!(e, meta.reference_energies_hartree.fci, epsilon = 1e-7);
        assert_abs_diff_eq!(vector.norm(), 1.0, epsilon = 1e-10);

        // The sector minimum must appear in the spectrum of the explicit
        // 16x16 matrix. It need not be the global bottom: the unprojected
        // operator reaches other particle sectors, and filling every
        // orbital of this system sits lower than the two-electron ground
        // state.
        let dense = dense_hamiltonian(&ints).unwrap();
        let real = DMatrix::from_fn(16, 16, |i, j| dense.matrix[(i, j)].re);
        let eig = SymmetricEigen::new(real);
        let closest = eig
            .eigenvalues
            .iter()
            .map(|v| (v - e).abs())
            .fold(f64::MAX, f64::min);
        assert!(closest < 1e-9, "sector energy missing from the spectrum: {closest}");
    }

    #[test]
    fn fci_is_invariant_under_virtual_relabeling() {
        let ints = parse_fcidump(&assets::asset_path("h4_1.0").unwrap()).unwrap();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let (e, _) = fci_ground(&ints, &indexing).unwrap();

        // Swap the two virtual spatial orbitals (2 and 3) everywhere.
        let perm = [0usize, 1, 3, 2];
        let n = ints.n_spatial();
        let mut text = String::from("&FCI NORB=4,NELEC=4,MS2=0,\n&END\n");
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = ints.h2(perm[p], perm[q], perm[r], perm[s]);
                        if v != 0.0 {
                            text.push_str(&format!(
                                "{v:.17e} {} {} {} {}\n",
                                p + 1,
                                q + 1,
                                r + 1,
                                s + 1
                            ));
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                let v = ints.h1(perm[p], perm[q]);
                if v != 0.0 {
                    text.push_str(&format!("{v:.17e} {} {} 0 0\n", p + 1, q + 1));
                }
            }
        }
        text.push_str(&format!("{:.17e} 0 0 0 0\n", ints.core_energy()));
        let permuted = parse_fcidump_str(&text).unwrap();
        let pidx = SpinOrbitalIndexing::build(&permuted, false).unwrap();
        let (pe, _) = fci_ground(&permuted, &pidx).unwrap();
        assert_abs_diff_eq!(e, pe, epsilon = 1e-9);
    }

    #[test]
    fn disjoint_generators_do_not_factorize() {
        let sigma = Generator::scatterer(&[2, 6], &[0, 1]).unwrap();
        let double = Generator::excitation(&[5, 7], &[3, 4]).unwrap();
        let triple = Generator::excitation(&[5, 6, 7], &[0, 3, 4]).unwrap();
        assert_eq!(verify_factorization(&sigma, &double, &triple, 8), None);
    }

    #[test]
    fn contraction_on_eight_modes_has_unit_coefficient() {
        // The double digs holes {0,3} and fills {5,6}; the scatterer refills
        // 3, digs {1,2}, and fills 7; together they land on the triple
        // 0,1,2 -> 5,6,7.
        let double = Generator::excitation(&[5, 6], &[0, 3]).unwrap();
        let sigma = Generator::scatterer(&[3, 7], &[1, 2]).unwrap();
        let triple = Generator::excitation(&[5, 6, 7], &[0, 1, 2]).unwrap();
        let lambda = verify_factorization(&sigma, &double, &triple, 8)
            .expect("commutator should close onto the triple");
        assert_abs_diff_eq!(lambda.abs(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn nested_contraction_reaches_a_quadruple() {
        let double = Generator::excitation(&[5, 9], &[0, 1]).unwrap();
        let inner = Generator::scatterer(&[6, 7], &[4, 9]).unwrap();
        let intermediate = Generator::excitation(&[5, 6, 7], &[0, 1, 4]).unwrap();
        let outer = Generator::scatterer(&[4, 8], &[2, 3]).unwrap();
        let quadruple = Generator::excitation(&[5, 6, 7, 8], &[0, 1, 2, 3]).unwrap();

        let first = verify_factorization(&inner, &double, &intermediate, 10)
            .expect("inner step should close onto the intermediate triple");
        assert_abs_diff_eq!(first.abs(), 1.0, epsilon = 1e-10);

        let lambda = verify_nested_factorization(&outer, &inner, &double, &quadruple, 10)
            .expect("nested commutator should close onto the quadruple");
        assert_abs_diff_eq!(lambda.abs(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn golden_store_roundtrips() {
        let dir = std::env::temp_dir().join("golden_roundtrip_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("golden.json");
        let mut store = GoldenStore::new();
        store.insert(
            "h2_0.735".into(),
            GoldenEnergies {
                fci_energy: -1.13730604,
                hf_energy: -1.116999,
                mp2_energy: -1.13002088,
            },
        );
        save_golden_store(&path, &store).unwrap();
        let loaded = load_golden_store(&path).unwrap();
        assert_eq!(loaded, store);
        std::fs::remove_file(&path).ok();
    }
}
