//! Nonclassicality witnesses evaluated from exact quantum states.
//!
//! All witnesses reduce to a small set of first and second moments of the
//! mode operators. Those moments are extracted directly from the banded
//! structure of ladder operators in the Fock basis, so no dense operator
//! products are formed. Conventions: quadratures `x = (a + a')/2`,
//! `y = (a - a')/(2i)`, vacuum variance 1/4.
//!
//! - Single-mode squeezing: `var x` or `var y` below 1/4.
//! - Intermodal squeezing: variance of `(x_a + x_c)/sqrt(2)` below 1/4.
//! - Mandel-type antibunching: `D = <N^2> - <N>^2 - <N>` negative.
//! - Intermodal antibunching: `D_ac = <N_a N_c> - <N_a><N_c>` negative.
//! - Hillery-Zubairy entanglement: `HZ1 = <N_a N_c> - |<a'c>|^2` or
//!   `HZ2 = <N_a><N_c> - |<ac>|^2` negative.
//! - Duan-type total variance: `4(var x_ac + var y_ac) - 2` negative.
//! - Steering: `HZ1 + <N_a>/2` (a steers c) or `HZ1 + <N_c>/2` negative.

use crate::dynamics::Trajectory;
use crate::fock::{HilbertConfig, Mode, QuantumState, StatePayload};
use crate::C64;
use ndarray::{Array1, Array2};

/// Witness column names in the canonical output order.
pub const COLUMN_NAMES: [&str; 18] = [
    "N_a", "N_c", "varX_a", "varY_a", "varX_c", "varY_c", "varX_ac", "varY_ac", "D_a", "D_c",
    "D_ac", "g2_a", "g2_c", "HZ1", "HZ2", "Duan", "S_a_to_c", "S_c_to_a",
];

/// Which pipeline produced a witness series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSource {
    Analytic,
    NumericClosed,
    NumericOpen,
}

impl std::fmt::Display for SeriesSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            SeriesSource::Analytic => "analytic",
            SeriesSource::NumericClosed => "numeric-closed",
            SeriesSource::NumericOpen => "numeric-open",
        };
        f.write_str(label)
    }
}

/// Named columns of witness values over a common time grid.
#[derive(Debug, Clone)]
pub struct WitnessSeries {
    grid: Vec<f64>,
    source: SeriesSource,
    columns: Vec<(String, Vec<f64>)>,
}

impl WitnessSeries {
    pub fn new(grid: Vec<f64>, source: SeriesSource) -> Self {
        Self {
            grid,
            source,
            columns: Vec::new(),
        }
    }

    /// Panics on length mismatch or duplicate name; both are programming
    /// errors, not runtime conditions.
    pub fn push_column(&mut self, name: impl AsRef<str>, values: Vec<f64>) {
        let name = name.as_ref();
        assert_eq!(
            values.len(),
            self.grid.len(),
            "column {name} has {} values for a grid of {}",
            values.len(),
            self.grid.len()
        );
        assert!(
            self.columns.iter().all(|(n, _)| n != name),
            "duplicate column {name}"
        );
        self.columns.push((name.to_string(), values));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn source(&self) -> SeriesSource {
        self.source
    }
}

/// First and second moments sufficient for every witness.
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub a: C64,
    pub c: C64,
    pub a2: C64,
    pub c2: C64,
    pub ac: C64,
    pub a_dag_c: C64,
    pub n_a: f64,
    pub n_c: f64,
    pub n_a2: f64,
    pub n_c2: f64,
    pub n_a_n_c: f64,
}

/// Applies the annihilator of `mode` to a ket by index shifts.
fn lowered(config: HilbertConfig, ket: &Array1<C64>, mode: Mode) -> Array1<C64> {
    let n = config.composite_dim();
    let mut out = Array1::zeros(n);
    for idx in 0..n {
        let (na, nc) = config.split(idx);
        match mode {
            Mode::Exciton if na + 1 < config.dim_a() => {
                out[idx] = ket[idx + config.dim_c()] * ((na + 1) as f64).sqrt();
            }
            Mode::Photon if nc + 1 < config.dim_c() => {
                out[idx] = ket[idx + 1] * ((nc + 1) as f64).sqrt();
            }
            _ => {}
        }
    }
    out
}

fn inner(x: &Array1<C64>, y: &Array1<C64>) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

fn moments_from_ket(config: HilbertConfig, ket: &Array1<C64>) -> Moments {
    let a_ket = lowered(config, ket, Mode::Exciton);
    let c_ket = lowered(config, ket, Mode::Photon);
    let aa_ket = lowered(config, &a_ket, Mode::Exciton);
    let cc_ket = lowered(config, &c_ket, Mode::Photon);
    let ac_ket = lowered(config, &c_ket, Mode::Exciton);

    let mut n_a = 0.0;
    let mut n_c = 0.0;
    let mut n_a2 = 0.0;
    let mut n_c2 = 0.0;
    let mut n_a_n_c = 0.0;
    for idx in 0..config.composite_dim() {
        let (na, nc) = config.split(idx);
        let p = ket[idx].norm_sqr();
        n_a += na as f64 * p;
        n_c += nc as f64 * p;
        n_a2 += (na * na) as f64 * p;
        n_c2 += (nc * nc) as f64 * p;
        n_a_n_c += (na * nc) as f64 * p;
    }

    Moments {
        a: inner(ket, &a_ket),
        c: inner(ket, &c_ket),
        a2: inner(ket, &aa_ket),
        c2: inner(ket, &cc_ket),
        ac: inner(ket, &ac_ket),
        a_dag_c: inner(&a_ket, &c_ket),
        n_a,
        n_c,
        n_a2,
        n_c2,
        n_a_n_c,
    }
}

fn moments_from_density(config: HilbertConfig, rho: &Array2<C64>) -> Moments {
    let n = config.composite_dim();
    let s = config.dim_c();
    let mut m = Moments {
        a: C64::new(0.0, 0.0),
        c: C64::new(0.0, 0.0),
        a2: C64::new(0.0, 0.0),
        c2: C64::new(0.0, 0.0),
        ac: C64::new(0.0, 0.0),
        a_dag_c: C64::new(0.0, 0.0),
        n_a: 0.0,
        n_c: 0.0,
        n_a2: 0.0,
        n_c2: 0.0,
        n_a_n_c: 0.0,
    };
    // tr(rho O) picks one band of rho per operator: O connecting |j> to
    // |j'> contributes rho[j, j'] times the matrix element.
    for idx in 0..n {
        let (na, nc) = config.split(idx);
        let (fa, fc) = (na as f64, nc as f64);
        let p = rho[(idx, idx)].re;
        m.n_a += fa * p;
        m.n_c += fc * p;
        m.n_a2 += fa * fa * p;
        m.n_c2 += fc * fc * p;
        m.n_a_n_c += fa * fc * p;

        if na >= 1 {
            m.a += rho[(idx, idx - s)] * fa.sqrt();
        }
        if nc >= 1 {
            m.c += rho[(idx, idx - 1)] * fc.sqrt();
        }
        if na >= 2 {
            m.a2 += rho[(idx, idx - 2 * s)] * (fa * (fa - 1.0)).sqrt();
        }
        if nc >= 2 {
            m.c2 += rho[(idx, idx - 2)] * (fc * (fc - 1.0)).sqrt();
        }
        if na >= 1 && nc >= 1 {
            m.ac += rho[(idx, idx - s - 1)] * (fa * fc).sqrt();
        }
        if na + 1 < config.dim_a() && nc >= 1 {
            m.a_dag_c += rho[(idx, idx + s - 1)] * ((fa + 1.0) * fc).sqrt();
        }
    }
    m
}

/// Extracts all witness moments from a pure or mixed state.
pub fn moments(state: &QuantumState) -> Moments {
    match state.payload() {
        StatePayload::Ket(v) => moments_from_ket(state.config(), v),
        StatePayload::Density(r) => moments_from_density(state.config(), r),
    }
}

/// Six quadrature variances: single-mode x and y for each mode, then the
/// symmetric intermodal combinations `(x_a + x_c)/sqrt(2)` and the same in y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariances {
    pub x_a: f64,
    pub y_a: f64,
    pub x_c: f64,
    pub y_c: f64,
    pub x_ac: f64,
    pub y_ac: f64,
}

impl Moments {
    pub fn quadrature_variances(&self) -> QuadratureVariances {
        let x_a = 0.25 * (1.0 + 2.0 * self.n_a + 2.0 * self.a2.re) - self.a.re * self.a.re;
        let y_a = 0.25 * (1.0 + 2.0 * self.n_a - 2.0 * self.a2.re) - self.a.im * self.a.im;
        let x_c = 0.25 * (1.0 + 2.0 * self.n_c + 2.0 * self.c2.re) - self.c.re * self.c.re;
        let y_c = 0.25 * (1.0 + 2.0 * self.n_c - 2.0 * self.c2.re) - self.c.im * self.c.im;
        let cov_x = 0.5 * (self.ac + self.a_dag_c).re - self.a.re * self.c.re;
        let cov_y = 0.5 * (self.a_dag_c.re - self.ac.re) - self.a.im * self.c.im;
        QuadratureVariances {
            x_a,
            y_a,
            x_c,
            y_c,
            x_ac: 0.5 * (x_a + x_c) + cov_x,
            y_ac: 0.5 * (y_a + y_c) + cov_y,
        }
    }

    /// Mandel-type parameter `<N^2> - <N>^2 - <N>`; negative means
    /// sub-Poissonian statistics.
    pub fn mandel_d(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Exciton => self.n_a2 - self.n_a * self.n_a - self.n_a,
            Mode::Photon => self.n_c2 - self.n_c * self.n_c - self.n_c,
        }
    }

    /// Cross-mode occupation covariance `<N_a N_c> - <N_a><N_c>`.
    pub fn intermodal_d(&self) -> f64 {
        self.n_a_n_c - self.n_a * self.n_c
    }

    /// Hillery-Zubairy witness pair `(HZ1, HZ2)`; either going negative
    /// signals entanglement.
    pub fn hz_witnesses(&self) -> (f64, f64) {
        (
            self.n_a_n_c - self.a_dag_c.norm_sqr(),
            self.n_a * self.n_c - self.ac.norm_sqr(),
        )
    }

    /// Duan-type total variance witness; negative signals entanglement.
    pub fn duan_value(&self) -> f64 {
        let v = self.quadrature_variances();
        4.0 * (v.x_ac + v.y_ac) - 2.0
    }

    /// Steering witness pair `(a steers c, c steers a)`.
    pub fn steering_witnesses(&self) -> (f64, f64) {
        let (hz1, _) = self.hz_witnesses();
        (hz1 + 0.5 * self.n_a, hz1 + 0.5 * self.n_c)
    }

    /// Second-order coherence `g2 = 1 + D/<N>^2`; NaN when the mode is
    /// essentially unoccupied.
    pub fn g2(&self, mode: Mode) -> f64 {
        let n = match mode {
            Mode::Exciton => self.n_a,
            Mode::Photon => self.n_c,
        };
        if n * n < 1e-24 {
            f64::NAN
        } else {
            1.0 + self.mandel_d(mode) / (n * n)
        }
    }

    /// All witness values in [`COLUMN_NAMES`] order.
    pub fn witness_row(&self) -> [f64; 18] {
        let v = self.quadrature_variances();
        let (hz1, hz2) = self.hz_witnesses();
        let (steer_ac, steer_ca) = self.steering_witnesses();
        [
            self.n_a,
            self.n_c,
            v.x_a,
            v.y_a,
            v.x_c,
            v.y_c,
            v.x_ac,
            v.y_ac,
            self.mandel_d(Mode::Exciton),
            self.mandel_d(Mode::Photon),
            self.intermodal_d(),
            self.g2(Mode::Exciton),
            self.g2(Mode::Photon),
            hz1,
            hz2,
            self.duan_value(),
            steer_ac,
            steer_ca,
        ]
    }
}

/// Evaluates every witness along a trajectory.
pub fn witness_series(traj: &Trajectory) -> WitnessSeries {
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(traj.len()); COLUMN_NAMES.len()];
    for state in traj.states() {
        let row = moments(state).witness_row();
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }
    let mut series = WitnessSeries::new(traj.grid().times().to_vec(), traj.source());
    for (name, col) in COLUMN_NAMES.iter().zip(columns) {
        series.push_column(name, col);
    }
    series
}
