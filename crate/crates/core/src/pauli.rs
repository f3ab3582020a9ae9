//! Pauli-string algebra on up to 64 qubits.
//!
//! A [`PauliString`] is a literal tensor product of I/X/Y/Z letters with a
//! complex coefficient, encoded as a pair of bit masks: qubit q carries X iff
//! bit q of `x_mask` is set and Z iff bit q of `z_mask` is set; both set means
//! Y. Sums of strings are kept deduplicated and sorted so that construction
//! order never leaks into results.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped from sums.
pub const COEFF_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub x_mask: u64,
    pub z_mask: u64,
    pub coeff: Complex64,
}

impl PauliString {
    pub fn identity(coeff: Complex64) -> Self {
        PauliString { x_mask: 0, z_mask: 0, coeff }
    }

    /// Parse letters like "XIZY"; index 0 of the string is qubit 0.
    pub fn from_axes(axes: &str, coeff: Complex64) -> Result<Self> {
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        for (q, ch) in axes.chars().enumerate() {
            if q >= 64 {
                return Err(Error::Resource("more than 64 qubits".into()));
            }
            match ch {
                'I' => {}
                'X' => x_mask |= 1 << q,
                'Y' => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                }
                'Z' => z_mask |= 1 << q,
                other => return Err(Error::Parse(format!("bad pauli letter '{other}'"))),
            }
        }
        Ok(PauliString { x_mask, z_mask, coeff })
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    pub fn axes_string(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|q| {
                let x = (self.x_mask >> q) & 1 == 1;
                let z = (self.z_mask >> q) & 1 == 1;
                match (x, z) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                }
            })
            .collect()
    }

    /// True iff the two strings commute (even number of positions where the
    /// single-qubit letters anticommute).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        anti % 2 == 0
    }

    /// Product of two strings, tracking the i^k phase from the single-qubit
    /// Pauli algebra (e.g. X·Y = iZ).
    pub fn mul(&self, other: &PauliString) -> PauliString {
        // Letter index: x + 2z, i.e. I=0, X=1, Z=2, Y=3. Entry = power of i.
        const PHASE: [[u8; 4]; 4] = [
            [0, 0, 0, 0], // I·
            [0, 0, 3, 1], // X·{I,X,Z,Y}
            [0, 1, 0, 3], // Z·
            [0, 3, 1, 0], // Y·
        ];
        let mut k = 0u32;
        let mut support = (self.x_mask | self.z_mask) & (other.x_mask | other.z_mask);
        while support != 0 {
            let q = support.trailing_zeros();
            let la = (((self.x_mask >> q) & 1) + 2 * ((self.z_mask >> q) & 1)) as usize;
            let lb = (((other.x_mask >> q) & 1) + 2 * ((other.z_mask >> q) & 1)) as usize;
            k += PHASE[la][lb] as u32;
            support &= support - 1;
        }
        let phase = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        PauliString {
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            coeff: self.coeff * other.coeff * phase,
        }
    }
}

/// Deduplicated linear combination of Pauli strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: Vec::new() }
    }

    pub fn identity(n_qubits: usize, coeff: Complex64) -> Self {
        PauliSum::from_terms(n_qubits, vec![PauliString::identity(coeff)])
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliString>) -> Self {
        let mut map: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for t in terms {
            *map.entry((t.x_mask, t.z_mask)).or_insert(Complex64::new(0.0, 0.0)) += t.coeff;
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| c.norm() >= COEFF_CUTOFF)
            .map(|((x, z), c)| PauliString { x_mask: x, z_mask: z, coeff: c })
            .collect();
        PauliSum { n_qubits, terms }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity string (zero if absent).
    pub fn identity_coeff(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.x_mask == 0 && t.z_mask == 0)
            .map(|t| t.coeff)
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add(&self, other: &PauliSum) -> PauliSum {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        PauliSum::from_terms(self.n_qubits, terms)
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        PauliSum::from_terms(
            self.n_qubits,
            self.terms
                .iter()
                .map(|t| PauliString { coeff: t.coeff * factor, ..*t })
                .collect(),
        )
    }

    /// Operator product (used to assemble ladder-operator strings).
    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        PauliSum::from_terms(self.n_qubits, terms)
    }

    pub fn dagger(&self) -> PauliSum {
        // Strings are hermitian as literal letter products, so only the
        // coefficients conjugate.
        PauliSum::from_terms(
            self.n_qubits,
            self.terms
                .iter()
                .map(|t| PauliString { coeff: t.coeff.conj(), ..*t })
                .collect(),
        )
    }

    /// All coefficients real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.im.abs() <= tol)
    }

    /// All coefficients purely imaginary within `tol`.
    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.re.abs() <= tol)
    }

    /// True iff every pair of strings commutes; guards exact exponentiation.
    pub fn mutually_commute(&self) -> bool {
        for (idx, a) in self.terms.iter().enumerate() {
            for b in &self.terms[idx + 1..] {
                if !a.commutes_with(b) {
                    return false;
                }
            }
        }
        true
    }

    /// Stable text form for golden-file comparisons: one `±c.ccccccc AXES`
    /// line per term, sorted by axes masks.
    pub fn to_debug_lines(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|t| {
                let axes = t.axes_string(self.n_qubits);
                if t.coeff.im.abs() < 1e-12 {
                    format!("{:+.7} {}", t.coeff.re, axes)
                } else if t.coeff.re.abs() < 1e-12 {
                    format!("{:+.7}i {}", t.coeff.im, axes)
                } else {
                    format!("{:+.7}{:+.7}i {}", t.coeff.re, t.coeff.im, axes)
                }
            })
            .collect()
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.to_debug_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_products_match_pauli_algebra() {
        let x = PauliString::from_axes("X", c(1.0, 0.0)).unwrap();
        let y = PauliString::from_axes("Y", c(1.0, 0.0)).unwrap();
        let z = PauliString::from_axes("Z", c(1.0, 0.0)).unwrap();

        let xy = x.mul(&y);
        assert_eq!(xy.axes_string(1), "Z");
        assert_eq!(xy.coeff, c(0.0, 1.0));

        let yx = y.mul(&x);
        assert_eq!(yx.coeff, c(0.0, -1.0));

        let zx = z.mul(&x);
        assert_eq!(zx.axes_string(1), "Y");
        assert_eq!(zx.coeff, c(0.0, 1.0));

        let xz = x.mul(&z);
        assert_eq!(xz.coeff, c(0.0, -1.0));

        let yz = y.mul(&z);
        assert_eq!(yz.axes_string(1), "X");
        assert_eq!(yz.coeff, c(0.0, 1.0));

        let xx = x.mul(&x);
        assert_eq!(xx.weight(), 0);
        assert_eq!(xx.coeff, c(1.0, 0.0));
    }

    #[test]
    fn commutation_counts_anticommuting_positions() {
        let xx = PauliString::from_axes("XX", c(1.0, 0.0)).unwrap();
        let yy = PauliString::from_axes("YY", c(1.0, 0.0)).unwrap();
        let xi = PauliString::from_axes("XI", c(1.0, 0.0)).unwrap();
        let zi = PauliString::from_axes("ZI", c(1.0, 0.0)).unwrap();
        assert!(xx.commutes_with(&yy));
        assert!(!xi.commutes_with(&zi));

        let sum_ok = PauliSum::from_terms(2, vec![xx, yy]);
        assert!(sum_ok.mutually_commute());
        let sum_bad = PauliSum::from_terms(2, vec![xi, zi]);
        assert!(!sum_bad.mutually_commute());
    }

    #[test]
    fn sums_deduplicate_and_drop_tiny_terms() {
        let a = PauliString::from_axes("XZ", c(0.5, 0.0)).unwrap();
        let b = PauliString::from_axes("XZ", c(-0.5, 0.0)).unwrap();
        let id = PauliString::identity(c(2.0, 0.0));
        let sum = PauliSum::from_terms(2, vec![a, b, id]);
        assert_eq!(sum.len(), 1);
        assert_eq!(sum.identity_coeff(), c(2.0, 0.0));
    }

    #[test]
    fn hermiticity_flags() {
        let h = PauliSum::from_terms(
            1,
            vec![PauliString::from_axes("X", c(0.3, 0.0)).unwrap()],
        );
        assert!(h.is_hermitian(1e-14));
        assert!(!h.is_anti_hermitian(1e-14));
        let a = h.scale(c(0.0, 1.0));
        assert!(a.is_anti_hermitian(1e-14));
        assert_eq!(a.dagger().terms()[0].coeff, c(0.0, -0.3));
    }

    #[test]
    fn debug_lines_are_sorted_and_stable() {
        let sum = PauliSum::from_terms(
            2,
            vec![
                PauliString::from_axes("ZI", c(-0.25, 0.0)).unwrap(),
                PauliString::from_axes("XY", c(0.5, 0.0)).unwrap(),
            ],
        );
        let lines = sum.to_debug_lines();
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().any(|l| l == "+0.5000000 XY"));
        assert!(lines.iter().any(|l| l == "-0.2500000 ZI"));
    }

    #[test]
    fn product_of_sums_distributes() {
        // (X + Z)(X - Z) = XX - XZ + ZX - ZZ = -XZ + ZX = -(-iY) + iY = 2iY
        let x = PauliSum::from_terms(1, vec![PauliString::from_axes("X", c(1.0, 0.0)).unwrap()]);
        let z = PauliSum::from_terms(1, vec![PauliString::from_axes("Z", c(1.0, 0.0)).unwrap()]);
        let prod = x.add(&z).mul(&x.add(&z.scale(c(-1.0, 0.0))));
        assert_eq!(prod.len(), 1);
        let t = prod.terms()[0];
        assert_eq!(t.axes_string(1), "Y");
        assert!((t.coeff - c(0.0, 2.0)).norm() < 1e-15);
    }
}
