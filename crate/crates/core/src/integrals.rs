//! FCIDUMP ingestion, spin-orbital expansion, and MP2 screening quantities.
//!
//! Integrals are stored spatially exactly as parsed: `h1` as a symmetric
//! matrix and `h2` in chemists' notation (pq|rs) with the full 8-fold
//! permutational symmetry applied on store. Spin orbitals use block ordering:
//! spatial orbital p with spin alpha is spin orbital p, with spin beta it is
//! p + n_spatial. The antisymmetrized spin-orbital tensor <pq||rs> is built
//! lazily on first use and cached.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use crate::ansatz::{Generator, GeneratorKind};
use crate::error::{Error, Result};

/// Two stored values for the same integral may differ by at most this much.
const DUPLICATE_TOL: f64 = 1e-10;
/// MP2 denominators smaller than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug)]
pub struct MolecularIntegrals {
    n_spatial: usize,
    n_electrons: usize,
    ms2: i32,
    core_energy: f64,
    h1: Vec<f64>,
    h2: Vec<f64>,
    orbital_energies: Option<Vec<f64>>,
    antisym: OnceLock<Vec<f64>>,
}

impl PartialEq for MolecularIntegrals {
    fn eq(&self, other: &Self) -> bool {
        self.n_spatial == other.n_spatial
            && self.n_electrons == other.n_electrons
            && self.ms2 == other.ms2
            && self.core_energy == other.core_energy
            && self.h1 == other.h1
            && self.h2 == other.h2
            && self.orbital_energies == other.orbital_energies
    }
}

impl Clone for MolecularIntegrals {
    fn clone(&self) -> Self {
        MolecularIntegrals {
            n_spatial: self.n_spatial,
            n_electrons: self.n_electrons,
            ms2: self.ms2,
            core_energy: self.core_energy,
            h1: self.h1.clone(),
            h2: self.h2.clone(),
            orbital_energies: self.orbital_energies.clone(),
            antisym: OnceLock::new(),
        }
    }
}

impl MolecularIntegrals {
    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_spin(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn orbital_energies(&self) -> Option<&[f64]> {
        self.orbital_energies.as_deref()
    }

    /// One-electron integral over spatial orbitals.
    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n_spatial + q]
    }

    /// Two-electron integral (pq|rs) over spatial orbitals, chemists' notation.
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spatial;
        self.h2[((p * n + q) * n + r) * n + s]
    }

    /// Spin of a spin orbital: 0 = alpha, 1 = beta.
    pub fn spin_of(&self, p: usize) -> usize {
        p / self.n_spatial
    }

    pub fn spatial_of(&self, p: usize) -> usize {
        p % self.n_spatial
    }

    /// One-electron integral over spin orbitals (diagonal in spin).
    pub fn h1_so(&self, p: usize, q: usize) -> f64 {
        if self.spin_of(p) == self.spin_of(q) {
            self.h1(self.spatial_of(p), self.spatial_of(q))
        } else {
            0.0
        }
    }

    /// Antisymmetrized two-electron integral <pq||rs> over spin orbitals.
    pub fn so_antisym(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spin();
        let cache = self.antisym.get_or_init(|| {
            let mut t = vec![0.0; n * n * n * n];
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let mut v = 0.0;
                            // <pq|rs> = (pr|qs) when spins match pairwise.
                            if self.spin_of(p) == self.spin_of(r)
                                && self.spin_of(q) == self.spin_of(s)
                            {
                                v += self.h2(
                                    self.spatial_of(p),
                                    self.spatial_of(r),
                                    self.spatial_of(q),
                                    self.spatial_of(s),
                                );
                            }
                            if self.spin_of(p) == self.spin_of(s)
                                && self.spin_of(q) == self.spin_of(r)
                            {
                                v -= self.h2(
                                    self.spatial_of(p),
                                    self.spatial_of(s),
                                    self.spatial_of(q),
                                    self.spatial_of(r),
                                );
                            }
                            t[((p * n + q) * n + r) * n + s] = v;
                        }
                    }
                }
            }
            t
        });
        cache[((p * n + q) * n + r) * n + s]
    }

    /// Serialize back to FCIDUMP text; parse -> serialize -> parse is
    /// bit-exact on all stored values.
    pub fn to_fcidump_string(&self) -> String {
        let n = self.n_spatial;
        let mut out = String::new();
        out.push_str(&format!(
            "&FCI NORB={},NELEC={},MS2={},\n&END\n",
            n, self.n_electrons, self.ms2
        ));
        let mut seen = BTreeSet::new();
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        if (p * (p + 1) / 2 + q) < (r * (r + 1) / 2 + s) {
                            continue;
                        }
                        if !seen.insert((p, q, r, s)) {
                            continue;
                        }
                        let v = self.h2(p, q, r, s);
                        if v != 0.0 {
                            out.push_str(&format!(
                                "{:.17e} {} {} {} {}\n",
                                v,
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
            for q in 0..=p {
                let v = self.h1(p, q);
                if v != 0.0 {
                    out.push_str(&format!("{:.17e} {} {} 0 0\n", v, p + 1, q + 1));
                }
            }
        }
        if let Some(eps) = &self.orbital_energies {
            for (p, e) in eps.iter().enumerate() {
                out.push_str(&format!("{:.17e} {} 0 0 0\n", e, p + 1));
            }
        }
        out.push_str(&format!("{:.17e} 0 0 0 0\n", self.core_energy));
        out
    }
}

/// Parse an FCIDUMP file from disk.
pub fn parse_fcidump(path: impl AsRef<Path>) -> Result<MolecularIntegrals> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_fcidump_str(&text)
}

/// Parse FCIDUMP text: a `&FCI NORB=..,NELEC=..,MS2=..` namelist terminated
/// by `&END` or `/`, followed by `value i j k l` lines with 1-based indices.
/// `(i,0,0,0)` lines carry orbital energies and `(0,0,0,0)` the core energy.
pub fn parse_fcidump_str(text: &str) -> Result<MolecularIntegrals> {
    let mut lines = text.lines();
    let mut header = String::new();
    let mut header_done = false;
    for line in lines.by_ref() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        header.push(' ');
        header.push_str(trimmed);
        if trimmed.contains("&END") || trimmed.ends_with('/') || trimmed == "/" {
            header_done = true;
            break;
        }
    }
    if !header_done {
        return Err(Error::Parse("unterminated FCIDUMP header".into()));
    }
    let upper = header.to_uppercase();
    if !upper.contains("&FCI") {
        return Err(Error::Parse("missing &FCI namelist".into()));
    }
    let norb = header_int(&upper, "NORB")?
        .ok_or_else(|| Error::Parse("header does not declare NORB".into()))?;
    let nelec = header_int(&upper, "NELEC")?
        .ok_or_else(|| Error::Parse("header does not declare NELEC".into()))?;
    let ms2 = header_int(&upper, "MS2")?.unwrap_or(0);
    if norb <= 0 || nelec < 0 {
        return Err(Error::Parse(format!("bad NORB={norb} or NELEC={nelec}")));
    }
    let ms2 = i32::try_from(ms2).map_err(|_| Error::Parse(format!("MS2={ms2} out of range")))?;
    let n = norb as usize;
    let n_electrons = nelec as usize;
    if n_electrons > 2 * n {
        return Err(Error::Consistency(format!(
            "NELEC={n_electrons} exceeds 2*NORB={}",
            2 * n
        )));
    }

    let mut h1 = vec![0.0; n * n];
    let mut h1_set = vec![false; n * n];
    let mut h2 = vec![0.0; n * n * n * n];
    let mut h2_set = vec![false; n * n * n * n];
    let mut orbe = vec![0.0; n];
    let mut orbe_set = vec![false; n];
    let mut core = 0.0;
    let mut core_set = false;

    let idx1 = |p: usize, q: usize| p * n + q;
    let idx2 = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;

    for (lineno, line) in lines.enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(Error::Parse(format!(
                "line {}: expected `value i j k l`, got {} tokens",
                lineno + 1,
                tokens.len()
            )));
        }
        // Fortran writers may use D exponents.
        let value: f64 = tokens[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad value '{}'", lineno + 1, tokens[0])))?;
        let mut idx = [0i64; 4];
        for (k, tok) in tokens[1..].iter().enumerate() {
            idx[k] = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad index '{tok}'", lineno + 1)))?;
            if idx[k] < 0 || idx[k] > norb {
                return Err(Error::Index(format!(
                    "line {}: index {} outside [0, {norb}]",
                    lineno + 1,
                    idx[k]
                )));
            }
        }
        let [i, j, k, l] = idx.map(|v| v as usize);
        let store = |slot: &mut f64, set: &mut bool, what: &str| -> Result<()> {
            if *set && (*slot - value).abs() > DUPLICATE_TOL {
                return Err(Error::Consistency(format!(
                    "line {}: {what} restated as {value} but already {}",
                    lineno + 1,
                    *slot
                )));
            }
            if !*set {
                *slot = value;
                *set = true;
            }
            Ok(())
        };
        match (i, j, k, l) {
            (0, 0, 0, 0) => store(&mut core, &mut core_set, "core energy")?,
            (p, 0, 0, 0) => {
                let mut set = orbe_set[p - 1];
                store(&mut orbe[p - 1], &mut set, "orbital energy")?;
                orbe_set[p - 1] = set;
            }
            (p, q, 0, 0) if q > 0 => {
                for (a, b) in [(p - 1, q - 1), (q - 1, p - 1)] {
                    let pos = idx1(a, b);
                    let mut set = h1_set[pos];
                    store(&mut h1[pos], &mut set, "h1 element")?;
                    h1_set[pos] = set;
                }
            }
            (p, q, r, s) if q > 0 && r > 0 && s > 0 => {
                let (p, q, r, s) = (p - 1, q - 1, r - 1, s - 1);
                for (a, b, c, d) in [
                    (p, q, r, s),
                    (q, p, r, s),
                    (p, q, s, r),
                    (q, p, s, r),
                    (r, s, p, q),
                    (s, r, p, q),
                    (r, s, q, p),
                    (s, r, q, p),
                ] {
                    let pos = idx2(a, b, c, d);
                    let mut set = h2_set[pos];
                    store(&mut h2[pos], &mut set, "h2 element")?;
                    h2_set[pos] = set;
                }
            }
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: unsupported index pattern ({i},{j},{k},{l})",
                    lineno + 1
                )))
            }
        }
    }

    let orbital_energies = if orbe_set.iter().all(|&s| s) {
        Some(orbe)
    } else if orbe_set.iter().any(|&s| s) {
        return Err(Error::Consistency(
            "orbital-energy lines present for some but not all orbitals".into(),
        ));
    } else {
        None
    };

    Ok(MolecularIntegrals {
        n_spatial: n,
        n_electrons,
        ms2,
        core_energy: core,
        h1,
        h2,
        orbital_energies,
        antisym: OnceLock::new(),
    })
}

fn header_int(header: &str, key: &str) -> Result<Option<i64>> {
    let Some(pos) = header.find(key) else {
        return Ok(None);
    };
    let rest = &header[pos + key.len()..];
    let rest = rest.trim_start();
    let Some(rest) = rest.strip_prefix('=') else {
        return Err(Error::Parse(format!("malformed {key} assignment")));
    };
    let rest = rest.trim_start();
    let end = rest
        .char_indices()
        .find(|(_, c)| !c.is_ascii_digit() && *c != '-' && *c != '+')
        .map(|(i, _)| i)
        .unwrap_or(rest.len());
    rest[..end]
        .parse()
        .map(Some)
        .map_err(|_| Error::Parse(format!("bad integer for {key}")))
}

/// Block spin-orbital bookkeeping for a Hartree-Fock reference.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOrbitalIndexing {
    pub n_spatial: usize,
    pub n_spin: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    /// HF-occupied spin orbitals, ascending.
    pub occupied: Vec<usize>,
    /// Complement of `occupied`, ascending.
    pub virtuals: Vec<usize>,
    /// Orbital energy per spin orbital.
    pub epsilons: Vec<f64>,
}

impl SpinOrbitalIndexing {
    /// Aufbau occupation from the file's orbital energies, or from the Fock
    /// diagonal when the file omits them. `force_fock` recomputes even when
    /// energies are present.
    pub fn build(ints: &MolecularIntegrals, force_fock: bool) -> Result<Self> {
        let n = ints.n_spatial();
        let n_spin = ints.n_spin();
        let nelec = ints.n_electrons() as i64;
        let ms2 = ints.ms2() as i64;
        if (nelec + ms2) % 2 != 0 || nelec + ms2 < 0 || nelec - ms2 < 0 {
            return Err(Error::Consistency(format!(
                "NELEC={nelec} and MS2={ms2} do not define an occupation"
            )));
        }
        let n_alpha = ((nelec + ms2) / 2) as usize;
        let n_beta = ((nelec - ms2) / 2) as usize;
        if n_alpha > n || n_beta > n {
            return Err(Error::Consistency(format!(
                "occupation {n_alpha}a/{n_beta}b exceeds {n} spatial orbitals"
            )));
        }

        let spatial_eps: Vec<f64> = match (ints.orbital_energies(), force_fock) {
            (Some(eps), false) => eps.to_vec(),
            _ => {
                // Bootstrap: occupy lowest indices, take the Fock diagonal,
                // re-occupy by aufbau on it, and settle with one more pass.
                let occ0 = aufbau((0..n).map(|p| p as f64).collect::<Vec<_>>().as_slice(), n, n_alpha, n_beta);
                let eps0 = fock_diagonal_for(ints, &occ0);
                let spatial0: Vec<f64> = (0..n).map(|p| eps0[p]).collect();
                let occ1 = aufbau(&spatial0, n, n_alpha, n_beta);
                let eps1 = fock_diagonal_for(ints, &occ1);
                (0..n).map(|p| eps1[p]).collect()
            }
        };

        let occupied = aufbau(&spatial_eps, n, n_alpha, n_beta);
        let occ_set: BTreeSet<usize> = occupied.iter().copied().collect();
        let virtuals: Vec<usize> = (0..n_spin).filter(|p| !occ_set.contains(p)).collect();
        let mut epsilons = vec![0.0; n_spin];
        for p in 0..n_spin {
            epsilons[p] = spatial_eps[p % n];
        }
        Ok(SpinOrbitalIndexing {
            n_spatial: n,
            n_spin,
            n_alpha,
            n_beta,
            occupied,
            virtuals,
            epsilons,
        })
    }

    pub fn is_occupied(&self, p: usize) -> bool {
        self.occupied.binary_search(&p).is_ok()
    }

    pub fn spin_of(&self, p: usize) -> usize {
        p / self.n_spatial
    }

    /// Occupation bit mask; bit p is the occupation of spin orbital p.
    pub fn reference_determinant(&self) -> u64 {
        self.occupied.iter().fold(0u64, |acc, &p| acc | (1 << p))
    }

    pub fn alpha_mask(&self) -> u64 {
        (1u64 << self.n_spatial) - 1
    }

    pub fn beta_mask(&self) -> u64 {
        self.alpha_mask() << self.n_spatial
    }
}

/// Occupy the lowest-energy spatial orbitals: `n_alpha` in the alpha block and
/// `n_beta` in the beta block. Stable on ties (lower spatial index first).
fn aufbau(spatial_eps: &[f64], n_spatial: usize, n_alpha: usize, n_beta: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n_spatial).collect();
    order.sort_by(|&a, &b| spatial_eps[a].partial_cmp(&spatial_eps[b]).unwrap().then(a.cmp(&b)));
    let mut occ: Vec<usize> = order[..n_alpha].to_vec();
    occ.extend(order[..n_beta].iter().map(|&p| p + n_spatial));
    occ.sort_unstable();
    occ
}

/// Fock diagonal per spin orbital for an explicit occupation list.
fn fock_diagonal_for(ints: &MolecularIntegrals, occupied: &[usize]) -> Vec<f64> {
    let n_spin = ints.n_spin();
    (0..n_spin)
        .map(|p| {
            let mut e = ints.h1_so(p, p);
            for &q in occupied {
                e += ints.so_antisym(p, q, p, q);
            }
            e
        })
        .collect()
}

/// Fock diagonal per spin orbital; for canonical HF integrals this matches
/// the FCIDUMP orbital-energy lines.
pub fn fock_diagonal(ints: &MolecularIntegrals, indexing: &SpinOrbitalIndexing) -> Vec<f64> {
    fock_diagonal_for(ints, &indexing.occupied)
}

/// First-order doubles amplitude t_ij^ab = <ij||ab> / (e_i + e_j - e_a - e_b)
/// in spin orbitals. Antisymmetric under i<->j and a<->b.
pub fn mp2_amplitude(
    ints: &MolecularIntegrals,
    indexing: &SpinOrbitalIndexing,
    holes: (usize, usize),
    particles: (usize, usize),
) -> Result<f64> {
    let (i, j) = holes;
    let (a, b) = particles;
    debug_assert!(i != j && a != b, "repeated index in doubles amplitude");
    let num = ints.so_antisym(i, j, a, b);
    let den = indexing.epsilons[i] + indexing.epsilons[j]
        - indexing.epsilons[a]
        - indexing.epsilons[b];
    if den.abs() < DEGENERACY_TOL {
        return Err(Error::Degeneracy(format!(
            "doubles denominator vanishes for ({i},{j})->({a},{b})"
        )));
    }
    Ok(num / den)
}

/// Perturbative magnitude assigned to a scatterer: the antisymmetrized
/// integral over its creation/destruction indices divided by the orbital
/// energy gap, in absolute value. The destination/source pattern generalizes
/// the doubles amplitude to occupied->occupied and virtual->virtual
/// transitions; the quotient form here is this artifact's fixed reading of
/// that measure.
pub fn scatterer_mp2_measure(
    ints: &MolecularIntegrals,
    indexing: &SpinOrbitalIndexing,
    scatterer: &Generator,
) -> Result<f64> {
    if scatterer.kind != GeneratorKind::Scatterer {
        return Err(Error::InvalidGenerator(
            "mp2 measure is defined for scatterers only".into(),
        ));
    }
    scatterer.validate(indexing)?;
    let [c1, c2] = [scatterer.creations[0], scatterer.creations[1]];
    let [d1, d2] = [scatterer.destructions[0], scatterer.destructions[1]];
    let num = ints.so_antisym(c1, c2, d1, d2);
    let den = indexing.epsilons[d1] + indexing.epsilons[d2]
        - indexing.epsilons[c1]
        - indexing.epsilons[c2];
    if den.abs() < DEGENERACY_TOL {
        return Err(Error::Degeneracy(format!(
            "scatterer denominator vanishes for ({d1},{d2})->({c1},{c2})"
        )));
    }
    Ok((num / den).abs())
}

/// Second-order correlation energy 1/4 sum |<ij||ab>|^2 / (e_i+e_j-e_a-e_b).
/// Terms with vanishing numerator or degenerate denominator contribute zero.
pub fn mp2_energy(ints: &MolecularIntegrals, indexing: &SpinOrbitalIndexing) -> f64 {
    let mut e = 0.0;
    for (ii, &i) in indexing.occupied.iter().enumerate() {
        for &j in &indexing.occupied[ii + 1..] {
            for (aa, &a) in indexing.virtuals.iter().enumerate() {
                for &b in &indexing.virtuals[aa + 1..] {
                    let num = ints.so_antisym(i, j, a, b);
                    if num.abs() < 1e-14 {
                        continue;
                    }
                    let den = indexing.epsilons[i] + indexing.epsilons[j]
                        - indexing.epsilons[a]
                        - indexing.epsilons[b];
                    if den.abs() < DEGENERACY_TOL {
                        continue;
                    }
                    e += num * num / den;
                }
            }
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;

    #[test]
    fn minimal_one_orbital_file() {
        let text = "&FCI NORB=1,NELEC=1,MS2=1,\n&END\n0.5 1 1 1 1\n-1.0 1 1 0 0\n0.7 0 0 0 0\n";
        let ints = parse_fcidump_str(text).unwrap();
        assert_eq!(ints.n_spatial(), 1);
        assert_eq!(ints.h2(0, 0, 0, 0), 0.5);
        assert_eq!(ints.h1(0, 0), -1.0);
        assert_eq!(ints.core_energy(), 0.7);
        assert!(ints.orbital_energies().is_none());
    }

    #[test]
    fn conflicting_symmetry_images_rejected() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 1 2 1 1\n0.51 2 1 1 1\n";
        match parse_fcidump_str(text) {
            Err(Error::Consistency(_)) => {}
            other => panic!("expected ConsistencyError, got {other:?}"),
        }
    }

    #[test]
    fn agreeing_duplicates_are_tolerated() {
        let text = "&FCI NORB=1,NELEC=1,MS2=1,\n&END\n0.5 1 1 1 1\n0.5 1 1 1 1\n";
        assert!(parse_fcidump_str(text).is_ok());
    }

    #[test]
    fn malformed_header_is_a_parse_error() {
        assert!(matches!(
            parse_fcidump_str("&FCI NELEC=2\n&END\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_fcidump_str("no header at all\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn out_of_range_index_is_an_index_error() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 3 1 1 1\n";
        assert!(matches!(parse_fcidump_str(text), Err(Error::Index(_))));
    }

    #[test]
    fn bundled_h2_reads_back() {
        let ints = parse_fcidump(assets::asset_path("h2_0.735").unwrap()).unwrap();
        assert_eq!(ints.n_spatial(), 2);
        assert_eq!(ints.n_electrons(), 2);
        assert_eq!(ints.ms2(), 0);
        assert!(ints.orbital_energies().is_some());
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let ints = parse_fcidump(assets::asset_path("h4_1.0").unwrap()).unwrap();
        let text = ints.to_fcidump_string();
        let again = parse_fcidump_str(&text).unwrap();
        assert_eq!(ints, again);
    }

    #[test]
    fn eightfold_symmetry_holds_on_store() {
        let ints = parse_fcidump(assets::asset_path("h2_0.735").unwrap()).unwrap();
        let n = ints.n_spatial();
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = ints.h2(p, q, r, s);
                        for w in [
                            ints.h2(q, p, r, s),
                            ints.h2(p, q, s, r),
                            ints.h2(r, s, p, q),
                            ints.h2(s, r, q, p),
                        ] {
                            assert!((v - w).abs() <= 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fock_diagonal_matches_file_energies() {
        let ints = parse_fcidump(assets::asset_path("h2_0.735").unwrap()).unwrap();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let eps = fock_diagonal(&ints, &indexing);
        let file_eps = ints.orbital_energies().unwrap();
        for p in 0..ints.n_spin() {
            assert!(
                (eps[p] - file_eps[p % ints.n_spatial()]).abs() < 1e-8,
                "orbital {p}: {} vs {}",
                eps[p],
                file_eps[p % ints.n_spatial()]
            );
        }
    }

    #[test]
    fn fock_diagonal_without_two_electron_terms() {
        // One occupied orbital, h2 = 0: every eps is the bare h1 diagonal.
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n-1.5 1 1 0 0\n-0.5 2 2 0 0\n";
        let ints = parse_fcidump_str(text).unwrap();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let eps = fock_diagonal(&ints, &indexing);
        assert_eq!(eps, vec![-1.5, -0.5, -1.5, -0.5]);
        // Empty occupation likewise.
        let empty = fock_diagonal_for(&ints, &[]);
        assert_eq!(empty, vec![-1.5, -0.5, -1.5, -0.5]);
    }

    #[test]
    fn aufbau_respects_orbital_energies() {
        // Second orbital is lower: occupation must pick it.
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n-0.5 1 1 0 0\n-1.5 2 2 0 0\n";
        let ints = parse_fcidump_str(text).unwrap();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        assert_eq!(indexing.occupied, vec![1, 3]);
    }

    #[test]
    fn mp2_amplitude_antisymmetry_and_spin_selection() {
        let ints = parse_fcidump(assets::asset_path("h4_1.0").unwrap()).unwrap();
        let idx = SpinOrbitalIndexing::build(&ints, false).unwrap();
        // alpha-alpha double within the alpha block.
        let (i, j) = (idx.occupied[0], idx.occupied[1]);
        let (a, b) = (idx.virtuals[0], idx.virtuals[1]);
        let t = mp2_amplitude(&ints, &idx, (i, j), (a, b)).unwrap();
        let t_swapped = mp2_amplitude(&ints, &idx, (j, i), (a, b)).unwrap();
        assert!((t + t_swapped).abs() < 1e-14);
        let t_particles = mp2_amplitude(&ints, &idx, (i, j), (b, a)).unwrap();
        assert!((t + t_particles).abs() < 1e-14);

        // Net-spin-changing pattern: numerator vanishes by spin orthogonality.
        let beta_virt = *idx.virtuals.iter().find(|&&v| idx.spin_of(v) == 1).unwrap();
        let alpha_virt = *idx.virtuals.iter().find(|&&v| idx.spin_of(v) == 0).unwrap();
        let alpha_occs: Vec<usize> = idx
            .occupied
            .iter()
            .copied()
            .filter(|&p| idx.spin_of(p) == 0)
            .collect();
        let t0 = mp2_amplitude(&ints, &idx, (alpha_occs[0], alpha_occs[1]), (alpha_virt, beta_virt))
            .unwrap();
        assert_eq!(t0, 0.0);
    }

    #[test]
    fn mp2_energy_is_nonpositive_and_zero_without_interaction() {
        let ints = parse_fcidump(assets::asset_path("h2_0.735").unwrap()).unwrap();
        let idx = SpinOrbitalIndexing::build(&ints, false).unwrap();
        assert!(mp2_energy(&ints, &idx) < 0.0);

        let bare = parse_fcidump_str("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n-1.0 1 1 0 0\n").unwrap();
        let bare_idx = SpinOrbitalIndexing::build(&bare, false).unwrap();
        assert_eq!(mp2_energy(&bare, &bare_idx), 0.0);
    }

    #[test]
    fn mp2_energy_matches_brute_force_double_loop() {
        let ints = parse_fcidump(assets::asset_path("h4_1.0").unwrap()).unwrap();
        let idx = SpinOrbitalIndexing::build(&ints, false).unwrap();
        // Independent quarter-sum over all ordered index pairs.
        let mut brute = 0.0;
        for &i in &idx.occupied {
            for &j in &idx.occupied {
                for &a in &idx.virtuals {
                    for &b in &idx.virtuals {
                        let num = ints.so_antisym(i, j, a, b);
                        if num.abs() < 1e-14 {
                            continue;
                        }
                        let den =
                            idx.epsilons[i] + idx.epsilons[j] - idx.epsilons[a] - idx.epsilons[b];
                        brute += 0.25 * num * num / den;
                    }
                }
            }
        }
        assert!((mp2_energy(&ints, &idx) - brute).abs() < 1e-10);
    }
}
