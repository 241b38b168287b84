//! Brute-force reference: the valence-bond state expanded in Schwinger-boson
//! occupations, mapped to a dense vector, and the AKLT Hamiltonian that it
//! must be a ground state of.
//!
//! Spin-1 sites use the basis `(S_z = +1, 0, -1)`, i.e. `(n_a, n_b) = (2,0),
//! (1,1), (0,2)`. Spin-1/2 end sites use `(a, b)`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::boundary::{BoundaryConfig, BoundaryWeights, Distance, Sign};
use crate::error::{Error, Result};
use crate::linalg::{c, reduced_from_pure, ComplexMatrix, DensityMatrix, ZERO};

pub const MAX_GOBC_SITES: usize = 12;
pub const MAX_EFFECTIVE_DIM: usize = 300_000;
pub const MAX_HAMILTONIAN_SITES: usize = 12;
/// Largest chain for which the Hamiltonian is materialised as a dense matrix.
pub const MAX_DENSE_HAMILTONIAN_SITES: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SiteOccupation {
    pub n_a: u8,
    pub n_b: u8,
}

impl SiteOccupation {
    pub fn total(self) -> u8 {
        self.n_a + self.n_b
    }
}

/// Sparse expansion of a product of creation operators acting on the vacuum,
/// in the normalised occupation-number basis.
#[derive(Clone, Debug)]
pub struct FockPolynomial {
    n_sites: usize,
    terms: BTreeMap<Vec<SiteOccupation>, Complex64>,
}

impl FockPolynomial {
    pub fn vacuum(n_sites: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![SiteOccupation::default(); n_sites], c(1.0));
        Self { n_sites, terms }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[SiteOccupation], Complex64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    fn raise(occ: &mut SiteOccupation, mode: Mode) -> f64 {
        let n = match mode {
            Mode::A => &mut occ.n_a,
            Mode::B => &mut occ.n_b,
        };
        *n += 1;
        (*n as f64).sqrt()
    }

    /// Applies `amp * x+_site` for `x = a` or `b`.
    pub fn create(&self, site: usize, mode: Mode, amp: f64) -> Self {
        self.create_pair(&[(site, mode)], amp)
    }

    fn create_pair(&self, ops: &[(usize, Mode)], amp: f64) -> Self {
        let mut terms = BTreeMap::new();
        for (key, &coef) in &self.terms {
            let mut k = key.clone();
            let mut factor = amp;
            for &(site, mode) in ops {
                factor *= Self::raise(&mut k[site], mode);
            }
            *terms.entry(k).or_insert(ZERO) += coef * factor;
        }
        Self {
            n_sites: self.n_sites,
            terms,
        }
    }

    /// Applies the weighted bond `c_ab a+_k b+_{k+1} - c_ba b+_k a+_{k+1}`.
    pub fn apply_bond(&self, k: usize, c_ab: f64, c_ba: f64) -> Self {
        let mut out = self.create_pair(&[(k, Mode::A), (k + 1, Mode::B)], c_ab);
        for (key, coef) in self
            .create_pair(&[(k, Mode::B), (k + 1, Mode::A)], -c_ba)
            .terms
        {
            *out.terms.entry(key).or_insert(ZERO) += coef;
        }
        out.terms.retain(|_, v| *v != ZERO);
        out
    }

    /// Maps onto the spin basis. Every term must put exactly `d - 1` bosons
    /// on a site of local dimension `d`; the result is normalised.
    pub fn to_state(&self, local_dims: Vec<usize>) -> Result<SpinChainState> {
        if local_dims.len() != self.n_sites {
            return Err(Error::Shape(format!(
                "{} local dims for {} sites",
                local_dims.len(),
                self.n_sites
            )));
        }
        let dim: usize = local_dims.iter().product();
        let mut amps = vec![ZERO; dim];
        for (key, &coef) in &self.terms {
            let mut idx = 0;
            for (occ, &d) in key.iter().zip(&local_dims) {
                if occ.total() as usize + 1 != d {
                    return Err(Error::Domain(format!(
                        "occupation {occ:?} does not fit a site of dimension {d}"
                    )));
                }
                idx = idx * d + (d - 1 - occ.n_a as usize);
            }
            amps[idx] += coef;
        }
        SpinChainState::new(local_dims, amps)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinChainState {
    local_dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl SpinChainState {
    /// Normalises `amplitudes`.
    pub fn new(local_dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if local_dims.iter().product::<usize>() != amplitudes.len() {
            return Err(Error::Shape(format!(
                "{} amplitudes for local dims {local_dims:?}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain("state vanishes".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            local_dims,
            amplitudes,
        })
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn overlap(&self, other: &SpinChainState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn reduced_density(&self, sites: &[usize]) -> Result<DensityMatrix> {
        reduced_density(self, sites)
    }
}

pub fn reduced_density(state: &SpinChainState, sites: &[usize]) -> Result<DensityMatrix> {
    reduced_from_pure(&state.amplitudes, &state.local_dims, sites)
}

/// A full chain with general open boundary conditions and the location of
/// its central block.
#[derive(Clone, Debug)]
pub struct GobcChain {
    pub config: BoundaryConfig,
    pub block_len: usize,
    pub state: SpinChainState,
}

impl GobcChain {
    pub fn n_sites(&self) -> usize {
        self.state.n_sites()
    }

    /// Chain indices of the `block_len` central sites.
    pub fn block_sites(&self) -> Vec<usize> {
        let start = self.config.left.sites().unwrap();
        (start..start + self.block_len).collect()
    }
}

fn insertion_mode(sign: Sign) -> Mode {
    match sign {
        Sign::Plus => Mode::A,
        Sign::Minus => Mode::B,
    }
}

/// Full valence-bond chain of `N_l + L + N_r` spin-1 sites with single-boson
/// caps at both ends.
pub fn build_vbs_gobc(config: BoundaryConfig, block_len: usize) -> Result<GobcChain> {
    let (Some(nl), Some(nr)) = (config.left.sites(), config.right.sites()) else {
        return Err(Error::InfiniteDistance);
    };
    let n = nl + nr + block_len;
    if n > MAX_GOBC_SITES {
        return Err(Error::Size(format!(
            "{n} sites exceeds the oracle limit of {MAX_GOBC_SITES}"
        )));
    }
    let mut poly = FockPolynomial::vacuum(n);
    for k in 0..n - 1 {
        poly = poly.apply_bond(k, 1.0, 1.0);
    }
    poly = poly
        .create(0, insertion_mode(config.sign_left), 1.0)
        .create(n - 1, insertion_mode(config.sign_right), 1.0);
    Ok(GobcChain {
        config,
        block_len,
        state: poly.to_state(vec![3; n])?,
    })
}

/// `L` spin-1 sites between two effective spin-1/2 ends (sites `0` and
/// `L + 1`) carrying the reduced wings.
pub fn build_effective_chain(
    wl: &BoundaryWeights,
    wr: &BoundaryWeights,
    block_len: usize,
) -> Result<SpinChainState> {
    if block_len == 0 {
        return Err(Error::Size(
            "effective chain needs at least one bulk site".into(),
        ));
    }
    let dim = 4usize.saturating_mul(3usize.saturating_pow(block_len as u32));
    if dim > MAX_EFFECTIVE_DIM {
        return Err(Error::Size(format!(
            "effective chain dimension {dim} exceeds {MAX_EFFECTIVE_DIM}"
        )));
    }
    let n = block_len + 2;
    let mut poly = FockPolynomial::vacuum(n);
    poly = poly.apply_bond(0, wl.v[0], wl.v[1]);
    for k in 1..n - 2 {
        poly = poly.apply_bond(k, 1.0, 1.0);
    }
    // (I (x) V) on the last bond scales b_{L+1} by v_b and a_{L+1} by v_a
    poly = poly.apply_bond(n - 2, wr.v[1], wr.v[0]);
    let mut dims = vec![3; n];
    dims[0] = 2;
    dims[n - 1] = 2;
    poly.to_state(dims)
}

/// A standalone left wing: `sites` spin-1 sites followed by the wing's half
/// of the first block site as a qubit.
pub fn build_left_wing(sites: u32, sign: Sign) -> Result<SpinChainState> {
    let n = Distance::finite(sites)?.sites().unwrap();
    if n >= MAX_GOBC_SITES {
        return Err(Error::Size(format!("wing of {n} sites")));
    }
    let mut poly = FockPolynomial::vacuum(n + 1);
    for k in 0..n {
        poly = poly.apply_bond(k, 1.0, 1.0);
    }
    poly = poly.create(0, insertion_mode(sign), 1.0);
    let mut dims = vec![3; n + 1];
    dims[n] = 2;
    poly.to_state(dims)
}

/// `(S_x, S_y, S_z)` for spin 1 in the `(+1, 0, -1)` basis.
pub fn spin_one_matrices() -> [ComplexMatrix; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, s);
    let sx = ComplexMatrix::from_real(3, 3, &[0.0, s, 0.0, s, 0.0, s, 0.0, s, 0.0]).unwrap();
    let sy =
        ComplexMatrix::from_vec(3, 3, vec![ZERO, -i, ZERO, i, ZERO, -i, ZERO, i, ZERO]).unwrap();
    let sz = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]);
    [sx, sy, sz]
}

/// `S_j . S_{j+1} + (S_j . S_{j+1})^2 / 3` on two spin-1 sites.
pub fn aklt_bond_term() -> ComplexMatrix {
    let s = spin_one_matrices();
    let mut exchange = ComplexMatrix::zeros(9, 9);
    for m in &s {
        exchange = &exchange + &crate::linalg::kron(m, m);
    }
    &exchange + &(&exchange * &exchange).scale(c(1.0 / 3.0))
}

/// Projector onto total bond spin 2: `(h + 2/3)/2` for the bond term `h`.
pub fn spin_two_projector() -> ComplexMatrix {
    (&aklt_bond_term() + &ComplexMatrix::identity(9).scale(c(2.0 / 3.0))).scale(c(0.5))
}

/// Open AKLT chain applied matrix-free, bond by bond.
#[derive(Clone, Debug)]
pub struct AkltHamiltonian {
    n_sites: usize,
    bond: ComplexMatrix,
}

impl AkltHamiltonian {
    pub fn new(n_sites: usize) -> Result<Self> {
        if !(2..=MAX_HAMILTONIAN_SITES).contains(&n_sites) {
            return Err(Error::Size(format!(
                "AKLT chain needs 2..={MAX_HAMILTONIAN_SITES} sites, got {n_sites}"
            )));
        }
        Ok(Self {
            n_sites,
            bond: aklt_bond_term(),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        3usize.pow(self.n_sites as u32)
    }

    pub fn ground_energy(&self) -> f64 {
        -2.0 / 3.0 * (self.n_sites - 1) as f64
    }

    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; psi.len()];
        for bond in 0..self.n_sites - 1 {
            apply_two_site(&self.bond, self.n_sites, bond, psi, &mut out)?;
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        if self.n_sites > MAX_DENSE_HAMILTONIAN_SITES {
            return Err(Error::Size(format!(
                "dense Hamiltonian limited to {MAX_DENSE_HAMILTONIAN_SITES} sites"
            )));
        }
        let dim = self.dim();
        let mut h = ComplexMatrix::zeros(dim, dim);
        let mut e = vec![ZERO; dim];
        for col in 0..dim {
            e[col] = c(1.0);
            let column = self.apply(&e)?;
            e[col] = ZERO;
            for (row, v) in column.into_iter().enumerate() {
                h[(row, col)] = v;
            }
        }
        Ok(h)
    }
}

/// Accumulates `op` acting on sites `(bond, bond + 1)` of a chain of spin-1
/// sites into `out`.
pub fn apply_two_site(
    op: &ComplexMatrix,
    n_sites: usize,
    bond: usize,
    psi: &[Complex64],
    out: &mut [Complex64],
) -> Result<()> {
    let dim = 3usize.pow(n_sites as u32);
    if psi.len() != dim || out.len() != dim || bond + 1 >= n_sites {
        return Err(Error::Shape(format!(
            "two-site operator on bond {bond} of a {n_sites}-site chain"
        )));
    }
    let inner = 3usize.pow((n_sites - bond - 2) as u32);
    let outer = 3usize.pow(bond as u32);
    let mut local = [ZERO; 9];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * 9 * inner + i;
            for (pair, slot) in local.iter_mut().enumerate() {
                *slot = psi[base + pair * inner];
            }
            for row in 0..9 {
                let mut acc = ZERO;
                for (col, &v) in local.iter().enumerate() {
                    acc += op[(row, col)] * v;
                }
                out[base + row * inner] += acc;
            }
        }
    }
    Ok(())
}

/// Dense AKLT Hamiltonian on an open chain of `n_sites` spin-1 sites.
pub fn aklt_hamiltonian(n_sites: usize) -> Result<ComplexMatrix> {
    AkltHamiltonian::new(n_sites)?.to_dense()
}

/// `|| H psi + (2/3)(N-1) psi ||`.
pub fn verify_ground_state(state: &SpinChainState, n_sites: usize) -> Result<f64> {
    if state.n_sites() != n_sites || state.local_dims.iter().any(|&d| d != 3) {
        return Err(Error::Shape(format!(
            "expected {n_sites} spin-1 sites, got local dims {:?}",
            state.local_dims
        )));
    }
    let h = AkltHamiltonian::new(n_sites)?;
    let e0 = h.ground_energy();
    let h_psi = h.apply(&state.amplitudes)?;
    Ok(h_psi
        .iter()
        .zip(&state.amplitudes)
        .map(|(hp, p)| (hp - p * e0).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Norm of the spin-2 component of each bond.
pub fn bond_spin_two_weights(state: &SpinChainState) -> Result<Vec<f64>> {
    let n = state.n_sites();
    let p2 = spin_two_projector();
    (0..n - 1)
        .map(|bond| {
            let mut out = vec![ZERO; state.amplitudes.len()];
            apply_two_site(&p2, n, bond, &state.amplitudes, &mut out)?;
            Ok(out.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;

    fn all_signs() -> impl Iterator<Item = (Sign, Sign)> {
        Sign::ALL
            .into_iter()
            .flat_map(|a| Sign::ALL.into_iter().map(move |b| (a, b)))
    }

    #[test]
    fn occupations_obey_site_capacity() {
        let chain = build_vbs_gobc(BoundaryConfig::finite(2, 1).unwrap(), 1).unwrap();
        assert_eq!(chain.n_sites(), 4);
        let mut poly = FockPolynomial::vacuum(4);
        for k in 0..3 {
            poly = poly.apply_bond(k, 1.0, 1.0);
        }
        let poly = poly.create(0, Mode::A, 1.0).create(3, Mode::B, 1.0);
        assert!(poly
            .terms()
            .all(|(occ, _)| occ.iter().all(|o| o.total() == 2)));
        // capacity violations are reported, not silently dropped
        assert!(FockPolynomial::vacuum(2)
            .apply_bond(0, 1.0, 1.0)
            .to_state(vec![3, 3])
            .is_err());
    }

    #[test]
    fn two_site_chain_has_no_spin_two_component() {
        let chain = build_vbs_gobc(BoundaryConfig::finite(1, 1).unwrap(), 0).unwrap();
        let norm: f64 = chain.state.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        for w in bond_spin_two_weights(&chain.state).unwrap() {
            assert!(w < 1e-14);
        }
    }

    #[test]
    fn bond_term_spectrum() {
        let ev = hermitian_eigenvalues(&aklt_bond_term()).unwrap();
        for (k, e) in ev.iter().enumerate() {
            let expected = if k < 4 { -2.0 / 3.0 } else { 4.0 / 3.0 };
            assert!((e - expected).abs() < 1e-13, "{k}: {e}");
        }
        let h2 = aklt_hamiltonian(2).unwrap();
        assert!(h2.max_abs_diff(&aklt_bond_term()) < 1e-15);
    }

    #[test]
    fn hamiltonian_commutes_with_total_sz() {
        let n = 3;
        let h = aklt_hamiltonian(n).unwrap();
        let sz: Vec<f64> = (0..27)
            .map(|mut idx| {
                let mut m = 0.0;
                for _ in 0..n {
                    m += 1.0 - (idx % 3) as f64;
                    idx /= 3;
                }
                m
            })
            .collect();
        let szm = ComplexMatrix::from_real_diagonal(&sz);
        assert!((&h * &szm).max_abs_diff(&(&szm * &h)) < 1e-14);
        assert!(h.is_hermitian(1e-14));
    }

    #[test]
    fn hamiltonian_range() {
        assert!(AkltHamiltonian::new(1).is_err());
        assert!(AkltHamiltonian::new(13).is_err());
        assert!(aklt_hamiltonian(8).is_err());
    }

    #[test]
    fn four_site_energy_is_minus_two() {
        let h = AkltHamiltonian::new(4).unwrap();
        for (a, b) in all_signs() {
            let chain =
                build_vbs_gobc(BoundaryConfig::finite(1, 1).unwrap().with_signs(a, b), 2).unwrap();
            let psi = chain.state.amplitudes();
            let e: Complex64 = h
                .apply(psi)
                .unwrap()
                .iter()
                .zip(psi)
                .map(|(x, y)| y.conj() * x)
                .sum();
            assert!((e.re + 2.0).abs() < 1e-13 && e.im.abs() < 1e-14);
        }
    }

    #[test]
    fn ground_state_residuals() {
        for (a, b) in all_signs() {
            for (nl, nr, l) in [(1, 1, 2), (2, 2, 2), (1, 3, 2)] {
                let cfg = BoundaryConfig::finite(nl, nr).unwrap().with_signs(a, b);
                let chain = build_vbs_gobc(cfg, l).unwrap();
                let r = verify_ground_state(&chain.state, chain.n_sites()).unwrap();
                assert!(r <= 1e-10, "{cfg} residual {r}");
            }
        }
    }

    #[test]
    fn random_vector_is_not_a_ground_state() {
        let amps: Vec<Complex64> = (0..81).map(|k| c(((k * 37 % 11) as f64) - 5.0)).collect();
        let state = SpinChainState::new(vec![3; 4], amps).unwrap();
        assert!(verify_ground_state(&state, 4).unwrap() > 0.1);
        assert!(verify_ground_state(&state, 5).is_err());
    }

    #[test]
    fn four_caps_are_independent_ground_states() {
        let states: Vec<SpinChainState> = all_signs()
            .map(|(a, b)| {
                build_vbs_gobc(BoundaryConfig::finite(2, 1).unwrap().with_signs(a, b), 1)
                    .unwrap()
                    .state
            })
            .collect();
        let mut gram = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                gram[(i, j)] = states[i].overlap(&states[j]);
            }
        }
        let ev = hermitian_eigenvalues(&gram).unwrap();
        assert!(ev[0] > 1e-3, "gram spectrum {ev:?}");
    }

    #[test]
    fn oracle_rejects_unrepresentable_chains() {
        let inf = BoundaryConfig::new(Distance::Infinite, Distance::Finite(1));
        assert_eq!(build_vbs_gobc(inf, 2).unwrap_err(), Error::InfiniteDistance);
        assert!(matches!(
            build_vbs_gobc(BoundaryConfig::finite(6, 6).unwrap(), 1),
            Err(Error::Size(_))
        ));
        let w = BoundaryWeights::oriented(Distance::Infinite, Sign::Plus);
        assert!(build_effective_chain(&w, &w, 0).is_err());
        assert!(build_effective_chain(&w, &w, 11).is_err());
        assert!(build_effective_chain(&w, &w, 10).is_ok());
    }

    #[test]
    fn full_chain_keeps_zero_entropy() {
        let chain = build_vbs_gobc(BoundaryConfig::finite(1, 2).unwrap(), 1).unwrap();
        let all: Vec<usize> = (0..chain.n_sites()).collect();
        let rho = chain.state.reduced_density(&all).unwrap();
        assert!(rho.entropy().unwrap().abs() < 1e-10);
    }
}
