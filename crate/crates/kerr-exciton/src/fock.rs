//! Truncated two-mode Fock space: dense operators and quantum states.
//!
//! The composite basis is ordered exciton-major: the state `|n_a, n_c>` sits
//! at flat index `n_a * dim_c + n_c`. Exciton ladder operators therefore
//! shift the flat index by `dim_c`, photon ladder operators by 1.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::C64;

/// Per-mode leakage budget accepted when building truncated coherent states.
pub const COHERENT_LEAKAGE_BUDGET: f64 = 1e-6;

/// Shape of the truncated composite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertConfig {
    dim_a: usize,
    dim_c: usize,
}

impl HilbertConfig {
    /// Both per-mode dimensions must be at least 2.
    pub fn new(dim_a: usize, dim_c: usize) -> Result<Self> {
        if dim_a < 2 || dim_c < 2 {
            return Err(Error::Config(format!(
                "Fock truncation must keep at least 2 levels per mode, got ({dim_a}, {dim_c})"
            )));
        }
        Ok(Self { dim_a, dim_c })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_c(&self) -> usize {
        self.dim_c
    }

    pub fn composite_dim(&self) -> usize {
        self.dim_a * self.dim_c
    }

    /// Flat index of `|n_a, n_c>`.
    pub fn index(&self, n_a: usize, n_c: usize) -> usize {
        debug_assert!(n_a < self.dim_a && n_c < self.dim_c);
        n_a * self.dim_c + n_c
    }

    /// Occupation pair at a flat index.
    pub fn split(&self, index: usize) -> (usize, usize) {
        debug_assert!(index < self.composite_dim());
        (index / self.dim_c, index % self.dim_c)
    }
}

/// Which mode an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exciton,
    Photon,
}

/// Dense operator on the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    config: HilbertConfig,
    matrix: Array2<C64>,
}

impl FockOperator {
    pub fn from_matrix(config: HilbertConfig, matrix: Array2<C64>) -> Self {
        let n = config.composite_dim();
        assert_eq!(
            matrix.dim(),
            (n, n),
            "operator matrix must be {n}x{n} for this space"
        );
        Self { config, matrix }
    }

    pub fn zeros(config: HilbertConfig) -> Self {
        let n = config.composite_dim();
        Self {
            config,
            matrix: Array2::zeros((n, n)),
        }
    }

    pub fn identity(config: HilbertConfig) -> Self {
        let n = config.composite_dim();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        Self { config, matrix: m }
    }

    pub fn config(&self) -> HilbertConfig {
        self.config
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        let n = self.config.composite_dim();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.matrix[(j, i)].conj();
            }
        }
        Self {
            config: self.config,
            matrix: m,
        }
    }

    /// Matrix product `self * rhs`. Panics if the spaces differ.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.config, rhs.config,
            "operator product across different spaces"
        );
        Self {
            config: self.config,
            matrix: self.matrix.dot(&rhs.matrix),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.config, rhs.config,
            "operator sum across different spaces"
        );
        Self {
            config: self.config,
            matrix: &self.matrix + &rhs.matrix,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            config: self.config,
            matrix: self.matrix.mapv(|z| z * factor),
        }
    }

    /// Largest elementwise deviation from hermiticity, `max |M - M'|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.config.composite_dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Applies the operator to a ket.
    pub fn apply(&self, ket: &Array1<C64>) -> Array1<C64> {
        assert_eq!(ket.len(), self.config.composite_dim());
        self.matrix.dot(ket)
    }
}

/// Annihilation operator of `mode`, embedded in the composite space
/// (`a (x) 1` or `1 (x) c`), with `<n-1| a |n> = sqrt(n)`.
pub fn annihilator(config: HilbertConfig, mode: Mode) -> FockOperator {
    let n = config.composite_dim();
    let mut m = Array2::zeros((n, n));
    for idx in 0..n {
        let (na, nc) = config.split(idx);
        match mode {
            Mode::Exciton if na >= 1 => {
                m[(config.index(na - 1, nc), idx)] = C64::new((na as f64).sqrt(), 0.0);
            }
            Mode::Photon if nc >= 1 => {
                m[(config.index(na, nc - 1), idx)] = C64::new((nc as f64).sqrt(), 0.0);
            }
            _ => {}
        }
    }
    FockOperator::from_matrix(config, m)
}

/// Number operator of `mode` in the composite space.
pub fn number_operator(config: HilbertConfig, mode: Mode) -> FockOperator {
    let n = config.composite_dim();
    let mut m = Array2::zeros((n, n));
    for idx in 0..n {
        let (na, nc) = config.split(idx);
        let occ = match mode {
            Mode::Exciton => na,
            Mode::Photon => nc,
        };
        m[(idx, idx)] = C64::new(occ as f64, 0.0);
    }
    FockOperator::from_matrix(config, m)
}

/// Full system Hamiltonian
/// `omega1 a'a + omega2 c'c - g (a'c + c'a) + chi a'a'aa` on the truncated
/// space. Real symmetric by construction.
pub fn build_hamiltonian(config: HilbertConfig, params: &SystemParams) -> FockOperator {
    let n = config.composite_dim();
    let mut m: Array2<C64> = Array2::zeros((n, n));
    for idx in 0..n {
        let (na, nc) = config.split(idx);
        let diag = params.omega1 * na as f64
            + params.omega2 * nc as f64
            + params.chi * (na * na.saturating_sub(1)) as f64;
        m[(idx, idx)] = C64::new(diag, 0.0);
        // a'c |na, nc> -> sqrt((na+1) nc) |na+1, nc-1>, plus the symmetric partner.
        if na + 1 < config.dim_a && nc >= 1 {
            let val = C64::new(-params.g * (((na + 1) * nc) as f64).sqrt(), 0.0);
            let tgt = config.index(na + 1, nc - 1);
            m[(tgt, idx)] += val;
            m[(idx, tgt)] += val;
        }
    }
    FockOperator::from_matrix(config, m)
}

/// Pure or mixed state on the composite space.
#[derive(Debug, Clone, PartialEq)]
pub enum StatePayload {
    Ket(Array1<C64>),
    Density(Array2<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    config: HilbertConfig,
    payload: StatePayload,
}

impl QuantumState {
    /// Wraps a ket, requiring unit norm within 1e-9.
    pub fn ket(config: HilbertConfig, vec: Array1<C64>) -> Result<Self> {
        if vec.len() != config.composite_dim() {
            return Err(Error::DimensionMismatch {
                left: format!("ket of length {}", vec.len()),
                right: format!("space of dimension {}", config.composite_dim()),
            });
        }
        let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NonphysicalState(format!(
                "ket norm {norm} deviates from 1 by more than 1e-9"
            )));
        }
        Ok(Self {
            config,
            payload: StatePayload::Ket(vec),
        })
    }

    /// Wraps a density matrix, requiring hermiticity within 1e-12, unit trace
    /// within 1e-9 and spectrum bounded below by -1e-9.
    pub fn density(config: HilbertConfig, mat: Array2<C64>) -> Result<Self> {
        let n = config.composite_dim();
        if mat.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                left: format!("matrix of shape {:?}", mat.dim()),
                right: format!("space of dimension {n}"),
            });
        }
        let mut herm = 0.0f64;
        for i in 0..n {
            for j in i..n {
                herm = herm.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if herm > 1e-12 {
            return Err(Error::NonphysicalState(format!(
                "density deviates from hermiticity by {herm:.3e}"
            )));
        }
        let trace: C64 = (0..n).map(|i| mat[(i, i)]).sum();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(Error::NonphysicalState(format!(
                "density trace {trace} deviates from 1 by more than 1e-9"
            )));
        }
        let min_eig = min_eigenvalue_hermitian(&mat);
        if min_eig < -1e-9 {
            return Err(Error::NonphysicalState(format!(
                "density has eigenvalue {min_eig:.3e} below -1e-9"
            )));
        }
        Ok(Self {
            config,
            payload: StatePayload::Density(mat),
        })
    }

    pub(crate) fn ket_unchecked(config: HilbertConfig, vec: Array1<C64>) -> Self {
        debug_assert_eq!(vec.len(), config.composite_dim());
        Self {
            config,
            payload: StatePayload::Ket(vec),
        }
    }

    pub(crate) fn density_unchecked(config: HilbertConfig, mat: Array2<C64>) -> Self {
        debug_assert_eq!(mat.dim(), (config.composite_dim(), config.composite_dim()));
        Self {
            config,
            payload: StatePayload::Density(mat),
        }
    }

    pub fn config(&self) -> HilbertConfig {
        self.config
    }

    pub fn payload(&self) -> &StatePayload {
        &self.payload
    }

    pub fn is_density(&self) -> bool {
        matches!(self.payload, StatePayload::Density(_))
    }

    /// Projects a ket onto its density matrix; densities are cloned as-is.
    pub fn to_density(&self) -> Self {
        match &self.payload {
            StatePayload::Density(_) => self.clone(),
            StatePayload::Ket(v) => {
                let n = self.config.composite_dim();
                let mut m = Array2::zeros((n, n));
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = v[i] * v[j].conj();
                    }
                }
                Self::density_unchecked(self.config, m)
            }
        }
    }

    /// Ket norm, or density trace for mixed states.
    pub fn weight(&self) -> f64 {
        match &self.payload {
            StatePayload::Ket(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            StatePayload::Density(m) => {
                (0..self.config.composite_dim()).map(|i| m[(i, i)].re).sum()
            }
        }
    }

    /// Probability of occupying the highest retained level, maximized over
    /// the two modes. This is the truncation-fidelity diagnostic.
    pub fn top_level_occupation(&self) -> f64 {
        let (da, dc) = (self.config.dim_a, self.config.dim_c);
        let prob = |na: usize, nc: usize| -> f64 {
            match &self.payload {
                StatePayload::Ket(v) => v[self.config.index(na, nc)].norm_sqr(),
                StatePayload::Density(m) => {
                    let i = self.config.index(na, nc);
                    m[(i, i)].re
                }
            }
        };
        let top_a: f64 = (0..dc).map(|nc| prob(da - 1, nc)).sum();
        let top_c: f64 = (0..da).map(|na| prob(na, dc - 1)).sum();
        top_a.max(top_c)
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn min_eigenvalue_hermitian(mat: &Array2<C64>) -> f64 {
    let n = mat.dim().0;
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| mat[(i, j)]);
    let eig = m.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &x| acc.min(x))
}

/// Product coherent state `|alpha>_a (x) |beta>_c`, renormalized on the
/// truncated space. Errors if either mode leaves more than
/// [`COHERENT_LEAKAGE_BUDGET`] probability outside its retained levels.
pub fn coherent_state(config: HilbertConfig, alpha: C64, beta: C64) -> Result<QuantumState> {
    let amp_a = coherent_amplitudes(config.dim_a, alpha, "exciton")?;
    let amp_c = coherent_amplitudes(config.dim_c, beta, "photon")?;
    let n = config.composite_dim();
    let mut vec = Array1::zeros(n);
    for na in 0..config.dim_a {
        for nc in 0..config.dim_c {
            vec[config.index(na, nc)] = amp_a[na] * amp_c[nc];
        }
    }
    let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    vec.mapv_inplace(|z| z / norm);
    Ok(QuantumState::ket_unchecked(config, vec))
}

fn coherent_amplitudes(dim: usize, amp: C64, label: &str) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(dim);
    let mut current = C64::new((-0.5 * amp.norm_sqr()).exp(), 0.0);
    let mut kept = 0.0;
    for n in 0..dim {
        if n > 0 {
            current *= amp / (n as f64).sqrt();
        }
        kept += current.norm_sqr();
        out.push(current);
    }
    let leakage = (1.0 - kept).max(0.0);
    if leakage > COHERENT_LEAKAGE_BUDGET {
        return Err(Error::TruncationLeakage {
            leakage,
            budget: COHERENT_LEAKAGE_BUDGET,
            context: format!("{label} coherent amplitude {amp} in {dim} levels"),
        });
    }
    Ok(out)
}

/// Basis state `|n_a, n_c>`.
pub fn fock_state(config: HilbertConfig, n_a: usize, n_c: usize) -> Result<QuantumState> {
    if n_a >= config.dim_a {
        return Err(Error::IndexOutOfRange {
            level: n_a,
            dim: config.dim_a,
        });
    }
    if n_c >= config.dim_c {
        return Err(Error::IndexOutOfRange {
            level: n_c,
            dim: config.dim_c,
        });
    }
    let mut vec = Array1::zeros(config.composite_dim());
    vec[config.index(n_a, n_c)] = C64::new(1.0, 0.0);
    Ok(QuantumState::ket_unchecked(config, vec))
}

/// Expectation value `<O>` in `state`. Complex in general; Hermitian
/// operators give a vanishing imaginary part up to roundoff.
pub fn expectation(state: &QuantumState, op: &FockOperator) -> Result<C64> {
    if state.config() != op.config() {
        return Err(Error::DimensionMismatch {
            left: format!(
                "state on ({}, {})",
                state.config().dim_a(),
                state.config().dim_c()
            ),
            right: format!(
                "operator on ({}, {})",
                op.config().dim_a(),
                op.config().dim_c()
            ),
        });
    }
    match state.payload() {
        StatePayload::Ket(v) => {
            let ov = op.apply(v);
            Ok(v.iter().zip(ov.iter()).map(|(x, y)| x.conj() * y).sum())
        }
        StatePayload::Density(m) => {
            let n = state.config().composite_dim();
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += m[(i, j)] * op.matrix()[(j, i)];
                }
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(da: usize, dc: usize) -> HilbertConfig {
        HilbertConfig::new(da, dc).unwrap()
    }

    #[test]
    fn rejects_degenerate_dimensions() {
        assert!(HilbertConfig::new(1, 5).is_err());
        assert!(HilbertConfig::new(4, 0).is_err());
        assert!(HilbertConfig::new(2, 2).is_ok());
    }

    #[test]
    fn index_round_trip() {
        let cfg = space(5, 3);
        assert_eq!(cfg.composite_dim(), 15);
        for na in 0..5 {
            for nc in 0..3 {
                assert_eq!(cfg.split(cfg.index(na, nc)), (na, nc));
            }
        }
        assert_eq!(cfg.index(2, 1), 7);
    }

    #[test]
    fn annihilator_matrix_elements() {
        let cfg = space(4, 3);
        let a = annihilator(cfg, Mode::Exciton);
        let c = annihilator(cfg, Mode::Photon);
        let sqrt2 = 2f64.sqrt();
        assert!((a.matrix()[(cfg.index(1, 1), cfg.index(2, 1))].re - sqrt2).abs() < 1e-15);
        assert!((c.matrix()[(cfg.index(2, 0), cfg.index(2, 1))].re - 1.0).abs() < 1e-15);
        assert_eq!(
            a.matrix()[(cfg.index(0, 0), cfg.index(0, 1))],
            C64::new(0.0, 0.0)
        );
    }

    #[test]
    fn truncated_commutator_is_identity_on_interior_blocks() {
        let cfg = space(6, 4);
        for (mode, top) in [(Mode::Exciton, 5usize), (Mode::Photon, 3usize)] {
            let a = annihilator(cfg, mode);
            let comm = a
                .mul(&a.adjoint())
                .add(&a.adjoint().mul(&a).scale(C64::new(-1.0, 0.0)));
            for idx in 0..cfg.composite_dim() {
                let (na, nc) = cfg.split(idx);
                let occ = match mode {
                    Mode::Exciton => na,
                    Mode::Photon => nc,
                };
                let expect = if occ == top { -(top as f64) } else { 1.0 };
                assert!(
                    (comm.matrix()[(idx, idx)].re - expect).abs() < 1e-12,
                    "diagonal at {:?}",
                    (na, nc)
                );
            }
        }
    }

    #[test]
    fn vacuum_coherent_state_is_ground_state() {
        let cfg = space(4, 4);
        let st = coherent_state(cfg, C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        match st.payload() {
            StatePayload::Ket(v) => {
                assert!((v[0].re - 1.0).abs() < 1e-15);
                assert!(v.iter().skip(1).all(|z| z.norm() < 1e-15));
            }
            _ => panic!("expected ket"),
        }
    }

    #[test]
    fn coherent_state_moments() {
        let cfg = space(20, 20);
        let alpha = C64::new(2.0, 0.0);
        let beta = C64::from_polar(1.0, -std::f64::consts::PI);
        let st = coherent_state(cfg, alpha, beta).unwrap();

        let n_a = expectation(&st, &number_operator(cfg, Mode::Exciton)).unwrap();
        assert!((n_a.re - 4.0).abs() < 1e-4, "got {}", n_a.re);
        assert!(n_a.im.abs() < 1e-10);

        let a = annihilator(cfg, Mode::Exciton);
        let c = annihilator(cfg, Mode::Photon);
        let ac_dag = a.mul(&c.adjoint());
        let got = expectation(&st, &ac_dag).unwrap();
        let want = alpha * beta.conj();
        assert!((got - want).norm() < 1e-4, "got {got}, want {want}");
    }

    #[test]
    fn coherent_normally_ordered_moments_factorize() {
        let cfg = space(25, 8);
        let alpha = C64::new(2.0, 0.0);
        let beta = C64::new(0.3, 0.0);
        let st = coherent_state(cfg, alpha, beta).unwrap();
        let a = annihilator(cfg, Mode::Exciton);
        let quartic = a.adjoint().mul(&a.adjoint()).mul(&a).mul(&a);
        let got = expectation(&st, &quartic).unwrap().re;
        assert!((got - 16.0).abs() / 16.0 < 1e-6, "got {got}");
    }

    #[test]
    fn coherent_state_rejects_tight_truncation() {
        let cfg = space(6, 6);
        let err = coherent_state(cfg, C64::new(2.0, 0.0), C64::new(0.0, 0.0)).unwrap_err();
        match err {
            Error::TruncationLeakage {
                leakage, budget, ..
            } => {
                assert!(leakage > budget);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn fock_state_bounds_and_occupation() {
        let cfg = space(8, 12);
        let st = fock_state(cfg, 0, 5).unwrap();
        let n_c = expectation(&st, &number_operator(cfg, Mode::Photon)).unwrap();
        assert!((n_c.re - 5.0).abs() < 1e-14);
        match fock_state(cfg, 8, 0).unwrap_err() {
            Error::IndexOutOfRange { level, dim } => {
                assert_eq!((level, dim), (8, 8));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn expectation_requires_matching_spaces() {
        let st = fock_state(space(4, 4), 1, 0).unwrap();
        let op = number_operator(space(5, 4), Mode::Exciton);
        assert!(matches!(
            expectation(&st, &op),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn composite_occupations_sum_for_coherent_input() {
        let cfg = space(20, 20);
        let st = coherent_state(cfg, C64::new(2.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        let total = number_operator(cfg, Mode::Exciton).add(&number_operator(cfg, Mode::Photon));
        let got = expectation(&st, &total).unwrap();
        assert!((got.re - 5.0).abs() < 1e-4);
        let a = annihilator(cfg, Mode::Exciton);
        let c = annihilator(cfg, Mode::Photon);
        let cross = expectation(&st, &a.adjoint().mul(&c)).unwrap();
        assert!((cross - C64::new(2.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn hamiltonian_structure() {
        let cfg = space(20, 20);
        let params = SystemParams::cds();
        let h = build_hamiltonian(cfg, &params);
        assert_eq!(h.hermiticity_deviation(), 0.0);
        let i10 = cfg.index(1, 0);
        assert!((h.matrix()[(i10, i10)].re - 25.277).abs() < 1e-12);
        let i01 = cfg.index(0, 1);
        assert!((h.matrix()[(i01, i10)].re + params.g).abs() < 1e-12);

        let n_tot = number_operator(cfg, Mode::Exciton).add(&number_operator(cfg, Mode::Photon));
        let comm = h.mul(&n_tot).add(&n_tot.mul(&h).scale(C64::new(-1.0, 0.0)));
        let worst = comm
            .matrix()
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm()));
        assert_eq!(worst, 0.0);

        let free = SystemParams::new(25.277, 24.013, 0.0, 0.0).unwrap();
        let h0 = build_hamiltonian(cfg, &free);
        for i in 0..cfg.composite_dim() {
            for j in 0..cfg.composite_dim() {
                if i != j {
                    assert_eq!(h0.matrix()[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn state_constructors_validate() {
        let cfg = space(3, 3);
        let bad = Array1::from_elem(9, C64::new(0.5, 0.0));
        assert!(matches!(
            QuantumState::ket(cfg, bad),
            Err(Error::NonphysicalState(_))
        ));
        let short = Array1::from_elem(4, C64::new(0.0, 0.0));
        assert!(matches!(
            QuantumState::ket(cfg, short),
            Err(Error::DimensionMismatch { .. })
        ));

        let mut nonherm = Array2::zeros((9, 9));
        nonherm[(0, 0)] = C64::new(1.0, 0.0);
        nonherm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(
            QuantumState::density(cfg, nonherm),
            Err(Error::NonphysicalState(_))
        ));

        let mut negative = Array2::zeros((9, 9));
        negative[(0, 0)] = C64::new(1.5, 0.0);
        negative[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(matches!(
            QuantumState::density(cfg, negative),
            Err(Error::NonphysicalState(_))
        ));

        let pure = fock_state(cfg, 1, 1).unwrap().to_density();
        match pure.payload() {
            StatePayload::Density(m) => {
                assert!(QuantumState::density(cfg, m.clone()).is_ok());
            }
            _ => panic!("expected density"),
        }
    }

    #[test]
    fn top_level_occupation_tracks_marginals() {
        let cfg = space(3, 4);
        let st = fock_state(cfg, 2, 0).unwrap();
        assert!((st.top_level_occupation() - 1.0).abs() < 1e-15);
        let st2 = fock_state(cfg, 0, 0).unwrap();
        assert_eq!(st2.top_level_occupation(), 0.0);
    }
}
