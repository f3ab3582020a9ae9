//! Jordan–Wigner images of ladder operators, fermionic generators, and the
//! molecular Hamiltonian.
//!
//! Qubit q holds the occupation of spin orbital q. A creation operator maps
//! to (X - iY)/2 on its qubit with a Z chain on every lower qubit; products
//! of such images assemble everything else.

use num_complex::Complex64;

use crate::ansatz::Generator;
use crate::error::{Error, Result};
use crate::integrals::MolecularIntegrals;
use crate::pauli::{PauliString, PauliSum};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ladder(p: usize, n_qubits: usize, creation: bool) -> PauliSum {
    let chain = if p == 0 { 0u64 } else { (1u64 << p) - 1 };
    let x = PauliString {
        x_mask: 1 << p,
        z_mask: chain,
        coeff: c(0.5, 0.0),
    };
    let y_sign = if creation { -0.5 } else { 0.5 };
    let y = PauliString {
        x_mask: 1 << p,
        z_mask: chain | (1 << p),
        coeff: c(0.0, y_sign),
    };
    PauliSum::from_terms(n_qubits, vec![x, y])
}

/// Qubit image of the creation operator on spin orbital p.
pub fn jw_creation(p: usize, n_qubits: usize) -> PauliSum {
    ladder(p, n_qubits, true)
}

/// Qubit image of the annihilation operator on spin orbital p.
pub fn jw_annihilation(p: usize, n_qubits: usize) -> PauliSum {
    ladder(p, n_qubits, false)
}

/// Qubit image of the ordered product c[0]^dag c[1]^dag ... d[last] ... d[0].
pub fn jw_fermion_product(
    creations: &[usize],
    destructions: &[usize],
    n_qubits: usize,
) -> Result<PauliSum> {
    for &p in creations.iter().chain(destructions) {
        if p >= n_qubits {
            return Err(Error::Index(format!(
                "spin orbital {p} outside {n_qubits} qubits"
            )));
        }
    }
    let mut acc = PauliSum::identity(n_qubits, c(1.0, 0.0));
    for &p in creations {
        acc = acc.mul(&jw_creation(p, n_qubits));
    }
    for &p in destructions.iter().rev() {
        acc = acc.mul(&jw_annihilation(p, n_qubits));
    }
    Ok(acc)
}

/// Anti-hermitian qubit image of kappa = tau - tau^dagger for any generator.
/// The returned strings mutually commute, which the simulator exploits for
/// exact exponentials.
pub fn jw_generator(gen: &Generator, n_spin: usize) -> Result<PauliSum> {
    if gen.max_index() >= n_spin {
        return Err(Error::Index(format!(
            "generator {gen} outside {n_spin} spin orbitals"
        )));
    }
    let tau = jw_fermion_product(&gen.creations, &gen.destructions, n_spin)?;
    Ok(tau.add(&tau.dagger().scale(c(-1.0, 0.0))))
}

/// Jordan–Wigner image of the full second-quantized Hamiltonian:
/// E_core + sum h_pq a_p^dag a_q + sum_{p<q, r<s} <pq||rs> a_p^dag a_q^dag a_s a_r.
pub fn jw_hamiltonian(ints: &MolecularIntegrals) -> PauliSum {
    let n = ints.n_spin();
    let mut terms: Vec<PauliString> = vec![PauliString::identity(c(ints.core_energy(), 0.0))];
    for p in 0..n {
        for q in 0..n {
            let h = ints.h1_so(p, q);
            if h.abs() < 1e-14 {
                continue;
            }
            let op = jw_fermion_product(&[p], &[q], n).expect("indices in range");
            terms.extend(op.scale(c(h, 0.0)).terms().iter().copied());
        }
    }
    for p in 0..n {
        for q in p + 1..n {
            for r in 0..n {
                for s in r + 1..n {
                    let v = ints.so_antisym(p, q, r, s);
                    if v.abs() < 1e-14 {
                        continue;
                    }
                    // The destruction list reads right to left: [r, s]
                    // places a_r innermost, giving a_p^dag a_q^dag a_s a_r.
                    let op = jw_fermion_product(&[p, q], &[r, s], n).expect("indices in range");
                    terms.extend(op.scale(c(v, 0.0)).terms().iter().copied());
                }
            }
        }
    }
    PauliSum::from_terms(n, terms)
}

/// True iff every pair of strings in the sum commutes.
pub fn pauli_mutually_commute(sum: &PauliSum) -> bool {
    sum.mutually_commute()
}

/// Total particle-number operator sum_p (1 - Z_p)/2.
pub fn number_operator(n_qubits: usize) -> PauliSum {
    let mut terms = vec![PauliString::identity(c(n_qubits as f64 / 2.0, 0.0))];
    for p in 0..n_qubits {
        terms.push(PauliString {
            x_mask: 0,
            z_mask: 1 << p,
            coeff: c(-0.5, 0.0),
        });
    }
    PauliSum::from_terms(n_qubits, terms)
}

/// Total Sz operator in units of hbar: half the alpha-minus-beta occupation.
pub fn sz_operator(n_spatial: usize) -> PauliSum {
    let n = 2 * n_spatial;
    let mut terms = Vec::new();
    for p in 0..n {
        let sign = if p < n_spatial { 0.5 } else { -0.5 };
        // sign * (1 - Z_p)/2
        terms.push(PauliString::identity(c(sign / 2.0, 0.0)));
        terms.push(PauliString {
            x_mask: 0,
            z_mask: 1 << p,
            coeff: c(-sign / 2.0, 0.0),
        });
    }
    PauliSum::from_terms(n, terms)
}

/// Commutator AB - BA as a PauliSum.
pub fn commutator(a: &PauliSum, b: &PauliSum) -> PauliSum {
    a.mul(b).add(&b.mul(a).scale(c(-1.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;
    use crate::integrals::{parse_fcidump, parse_fcidump_str};

    #[test]
    fn single_mode_ladder_operators() {
        // a^dag on one qubit: (X - iY)/2 = [[0,0],[1,0]] — lowers nothing,
        // sets the bit. Its number operator is (1 - Z)/2.
        let cr = jw_creation(0, 1);
        assert_eq!(cr.len(), 2);
        let num = cr.mul(&jw_annihilation(0, 1));
        let lines = num.to_debug_lines();
        assert!(lines.contains(&"+0.5000000 I".to_string()), "{lines:?}");
        assert!(lines.contains(&"-0.5000000 Z".to_string()), "{lines:?}");
        // a a^dag is the complementary projector.
        let hole = jw_annihilation(0, 1).mul(&jw_creation(0, 1));
        assert_eq!(hole.identity_coeff(), c(0.5, 0.0));
    }

    #[test]
    fn single_excitation_is_two_balanced_strings() {
        let gen = Generator::excitation(&[1], &[0]).unwrap();
        let k = jw_generator(&gen, 2).unwrap();
        assert_eq!(k.len(), 2);
        assert!(k.is_anti_hermitian(1e-14));
        assert!(k.mutually_commute());
        for t in k.terms() {
            let axes = t.axes_string(2);
            match axes.as_str() {
                "YX" => assert_eq!(t.coeff, c(0.0, 0.5)),
                "XY" => assert_eq!(t.coeff, c(0.0, -0.5)),
                other => panic!("unexpected string {other}"),
            }
        }
    }

    #[test]
    fn excitation_string_counts_grow_with_rank() {
        let double = Generator::excitation(&[4, 5], &[0, 1]).unwrap();
        let kd = jw_generator(&double, 8).unwrap();
        assert_eq!(kd.len(), 8);
        assert!(kd.is_anti_hermitian(1e-14));
        assert!(kd.mutually_commute());

        let triple = Generator::excitation(&[4, 5, 6], &[0, 1, 2]).unwrap();
        let kt = jw_generator(&triple, 8).unwrap();
        assert_eq!(kt.len(), 32);
        assert!(kt.mutually_commute());

        let scat = Generator::scatterer(&[2, 4], &[0, 1]).unwrap();
        let ks = jw_generator(&scat, 8).unwrap();
        assert_eq!(ks.len(), 8);
        assert!(ks.is_anti_hermitian(1e-14));
        assert!(ks.mutually_commute());
    }

    #[test]
    fn generator_dagger_negates() {
        let gen = Generator::excitation(&[2, 3], &[0, 1]).unwrap();
        let k = jw_generator(&gen, 4).unwrap();
        let neg = k.dagger().add(&k);
        assert!(neg.is_empty(), "kappa^dag != -kappa: {neg}");
    }

    #[test]
    fn number_only_hamiltonian() {
        // One spatial orbital with h1 = 1: H = n_alpha + n_beta.
        let ints =
            parse_fcidump_str("&FCI NORB=1,NELEC=1,MS2=1,\n&END\n1.0 1 1 0 0\n").unwrap();
        let h = jw_hamiltonian(&ints);
        let lines = h.to_debug_lines();
        assert!(lines.contains(&"+1.0000000 II".to_string()), "{lines:?}");
        assert!(lines.contains(&"-0.5000000 ZI".to_string()), "{lines:?}");
        assert!(lines.contains(&"-0.5000000 IZ".to_string()), "{lines:?}");
    }

    #[test]
    fn core_only_hamiltonian_is_scaled_identity() {
        let ints = parse_fcidump_str("&FCI NORB=1,NELEC=0,MS2=0,\n&END\n0.7 0 0 0 0\n").unwrap();
        let h = jw_hamiltonian(&ints);
        assert_eq!(h.len(), 1);
        assert_eq!(h.identity_coeff(), c(0.7, 0.0));
    }

    #[test]
    fn molecular_hamiltonian_respects_symmetries() {
        let ints = parse_fcidump(&assets::asset_path("h2_0.735").unwrap()).unwrap();
        let h = jw_hamiltonian(&ints);
        assert!(h.is_hermitian(1e-12));
        let n = number_operator(4);
        assert!(commutator(&h, &n).is_empty());
        let sz = sz_operator(2);
        assert!(commutator(&h, &sz).is_empty());
    }

    #[test]
    fn generators_commute_with_number_operator() {
        let n = number_operator(8);
        for gen in [
            Generator::excitation(&[4], &[0]).unwrap(),
            Generator::excitation(&[4, 5], &[0, 1]).unwrap(),
            Generator::scatterer(&[2, 4], &[0, 1]).unwrap(),
        ] {
            let k = jw_generator(&gen, 8).unwrap();
            assert!(commutator(&k, &n).is_empty(), "{gen} breaks N");
        }
    }
}
