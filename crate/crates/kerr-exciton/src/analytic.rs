//! Second-order perturbative solution of the Heisenberg equations.
//!
//! The exciton and photon operators at time `t` are expanded over a fixed
//! operator basis taken at `t = 0`:
//!
//! ```text
//! a(t) = f1 a + f2 c + f3 a'aa + f4 a + f5 a'ac + f6 c'aa + f7 a'aa + f8 a'a'aaa
//! c(t) = h1 c + h2 a + h3 c + h4 a'aa
//! ```
//!
//! with `f1, h1` zeroth order, `f2, f3, h2` first order and the rest second
//! order in the couplings. The coefficient functions have closed forms; an
//! independent fixed-step RK4 integration of their defining ODE system is
//! provided so tests can certify the closed forms without reusing them.
//!
//! All witness expressions here are evaluated on an initial two-mode coherent
//! product state and are meaningful for `g t < 1` and `chi t < 1`.

use crate::dynamics::TimeGrid;
use crate::params::{InitialAmplitudes, SystemParams};
use crate::witnesses::{SeriesSource, WitnessSeries, COLUMN_NAMES};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Coefficient functions of the operator expansion at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub f1: C64,
    pub f2: C64,
    pub f3: C64,
    pub f4: C64,
    pub f5: C64,
    pub f6: C64,
    pub f7: C64,
    pub f8: C64,
    pub h1: C64,
    pub h2: C64,
    pub h3: C64,
    pub h4: C64,
    pub t: f64,
}

impl CoefficientSet {
    fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self {
            f1: one,
            f2: zero,
            f3: zero,
            f4: zero,
            f5: zero,
            f6: zero,
            f7: zero,
            f8: zero,
            h1: one,
            h2: zero,
            h3: zero,
            h4: zero,
            t: 0.0,
        }
    }

    pub fn as_array(&self) -> [C64; 12] {
        [
            self.f1, self.f2, self.f3, self.f4, self.f5, self.f6, self.f7, self.f8, self.h1,
            self.h2, self.h3, self.h4,
        ]
    }

    /// Largest componentwise absolute difference to another set.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// `(exp(i theta) - 1) / theta`, stable near `theta = 0`.
fn e1(theta: f64) -> C64 {
    if theta.abs() < 1e-3 {
        let t2 = theta * theta;
        C64::new(
            -theta / 2.0 + theta * t2 / 24.0,
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
        )
    } else {
        (C64::from_polar(1.0, theta) - 1.0) / theta
    }
}

/// `(exp(i theta) - 1 - i theta) / theta^2`, stable near `theta = 0`.
fn e2(theta: f64) -> C64 {
    if theta.abs() < 1e-3 {
        let t2 = theta * theta;
        C64::new(
            -0.5 + t2 / 24.0 - t2 * t2 / 720.0,
            -theta / 6.0 + theta * t2 / 120.0,
        )
    } else {
        (C64::from_polar(1.0, theta) - 1.0 - I * theta) / (theta * theta)
    }
}

/// Closed-form coefficient functions at time `t`.
///
/// Remains finite and smooth through zero detuning.
pub fn coefficients(t: f64, params: &SystemParams) -> CoefficientSet {
    let (g, chi) = (params.g, params.chi);
    let theta = params.delta_omega() * t;
    let p1 = C64::from_polar(1.0, -params.omega1 * t);
    let p2 = C64::from_polar(1.0, -params.omega2 * t);
    let k1 = e1(theta);
    let k2 = e2(theta);
    let t2 = t * t;

    let f2 = g * t * p1 * k1;
    let f5 = -4.0 * g * chi * t2 * p1 * k2;
    let f7 = -2.0 * chi * chi * t2 * p1;
    CoefficientSet {
        f1: p1,
        f2,
        f3: -2.0 * I * chi * t * p1,
        f4: g * g * t2 * p1 * k2,
        f5,
        f6: 2.0 * g * chi * t2 * p1 * k2.conj(),
        f7,
        f8: f7,
        h1: p2,
        h2: f2,
        h3: g * g * t2 * p2 * k2.conj(),
        h4: 0.5 * f5,
        t,
    }
}

fn derivative(y: &[C64; 12], params: &SystemParams) -> [C64; 12] {
    let (g, chi) = (params.g, params.chi);
    let iw1 = I * params.omega1;
    let iw2 = I * params.omega2;
    let ig = I * g;
    let ichi = I * chi;
    let [f1, f2, f3, f4, f5, f6, f7, f8, h1, h2, h3, h4] = *y;
    let f1n2 = f1.norm_sqr();
    [
        -iw1 * f1,
        -iw1 * f2 + ig * h1,
        -iw1 * f3 - 2.0 * ichi * f1n2 * f1,
        -iw1 * f4 + ig * h2,
        -iw1 * f5 - 4.0 * ichi * f1n2 * f2,
        -iw1 * f6 - 2.0 * ichi * f1 * f1 * f2.conj(),
        -iw1 * f7 - 2.0 * ichi * f1n2 * f3,
        -iw1 * f8 - 4.0 * ichi * f1n2 * f3 - 2.0 * ichi * f1 * f1 * f3.conj(),
        -iw2 * h1,
        -iw2 * h2 + ig * f1,
        -iw2 * h3 + ig * f2,
        -iw2 * h4 + ig * f3,
    ]
}

fn rk4_step(y: &mut [C64; 12], h: f64, params: &SystemParams) {
    let k1 = derivative(y, params);
    let mut y2 = *y;
    for (v, k) in y2.iter_mut().zip(&k1) {
        *v += 0.5 * h * k;
    }
    let k2 = derivative(&y2, params);
    let mut y3 = *y;
    for (v, k) in y3.iter_mut().zip(&k2) {
        *v += 0.5 * h * k;
    }
    let k3 = derivative(&y3, params);
    let mut y4 = *y;
    for (v, k) in y4.iter_mut().zip(&k3) {
        *v += h * k;
    }
    let k4 = derivative(&y4, params);
    for (j, v) in y.iter_mut().enumerate() {
        *v += h / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
    }
}

fn integrate_segment(y: &mut [C64; 12], from: f64, to: f64, step: f64, params: &SystemParams) {
    let span = to - from;
    if span <= 0.0 {
        return;
    }
    let n = (span / step).ceil().max(1.0) as usize;
    let h = span / n as f64;
    for _ in 0..n {
        rk4_step(y, h, params);
    }
}

/// Fixed-step RK4 integration of the coefficient ODE system from the
/// identity initial condition to time `t`.
///
/// This is deliberately independent of [`coefficients`]; tests use it to
/// certify the closed forms. `step` is an upper bound on the internal step.
pub fn coefficient_ode_oracle(t: f64, params: &SystemParams, step: f64) -> CoefficientSet {
    assert!(step > 0.0, "oracle step must be positive");
    assert!(t >= 0.0, "oracle time must be nonnegative");
    let mut y = CoefficientSet::identity().as_array();
    integrate_segment(&mut y, 0.0, t, step, params);
    pack(y, t)
}

/// Same integration, sampled at every time in `times` (nondecreasing, all
/// nonnegative) in a single pass.
pub fn coefficient_ode_oracle_path(
    times: &[f64],
    params: &SystemParams,
    step: f64,
) -> Vec<CoefficientSet> {
    assert!(step > 0.0, "oracle step must be positive");
    let mut y = CoefficientSet::identity().as_array();
    let mut out = Vec::with_capacity(times.len());
    let mut now = 0.0;
    for &t in times {
        assert!(t >= now, "oracle sample times must be nondecreasing");
        integrate_segment(&mut y, now, t, step, params);
        now = t;
        out.push(pack(y, t));
    }
    out
}

fn pack(y: [C64; 12], t: f64) -> CoefficientSet {
    CoefficientSet {
        f1: y[0],
        f2: y[1],
        f3: y[2],
        f4: y[3],
        f5: y[4],
        f6: y[5],
        f7: y[6],
        f8: y[7],
        h1: y[8],
        h2: y[9],
        h3: y[10],
        h4: y[11],
        t,
    }
}

/// Returns a human-readable warning when `t` lies outside the domain where
/// the second-order solution is trustworthy (`g t <= 0.3`, `chi t <= 1`).
pub fn validity_warning(t: f64, params: &SystemParams) -> Option<String> {
    let gt = params.g.abs() * t;
    let ct = params.chi * t;
    if gt > 0.3 || ct > 1.0 {
        Some(format!(
            "perturbative solution evaluated at g t = {gt:.3}, chi t = {ct:.3}; \
             results are qualitative beyond g t = 0.3 or chi t = 1"
        ))
    } else {
        None
    }
}

/// All witness values at one time, evaluated from one coefficient set.
#[derive(Debug, Clone, Copy)]
struct Point {
    n_a: f64,
    n_c: f64,
    var_x_a: f64,
    var_y_a: f64,
    var_x_ac: f64,
    var_y_ac: f64,
    d_a: f64,
    d_c: f64,
    d_ac: f64,
    hz1: f64,
    hz2: f64,
    duan: f64,
}

fn point(co: &CoefficientSet, amps: &InitialAmplitudes) -> Point {
    let al = amps.alpha();
    let be = amps.beta();
    let aa = al.norm_sqr();
    let bb = be.norm_sqr();
    let al2 = al * al;
    let ab = al.conj() * be;

    let n_a = aa
        + co.f2.norm_sqr() * (bb - aa)
        + 2.0 * (co.f1.conj() * co.f2 * ab - co.h1.conj() * co.h4 * aa * ab.conj()).re;
    let n_c = bb
        + co.h2.norm_sqr() * (aa - bb)
        + 2.0 * (co.h1.conj() * co.h2 * ab.conj() + co.h1.conj() * co.h4 * aa * ab.conj()).re;

    let f3sq = co.f3.norm_sqr();
    let cross = co.f1.conj() * co.f5 + 2.0 * co.f1 * co.f6.conj();
    let osc_a = 2.0
        * ((co.f1 * co.f3 + co.f1 * co.f7) * al2
            + co.f1 * co.f5 * al * be
            + 3.0 * co.f3 * co.f3 * aa * al2)
            .re;
    let common_a = 2.0 * f3sq * aa * aa + 2.0 * (cross * ab).re;
    let var_x_a = 0.25 * (1.0 + common_a + osc_a);
    let var_y_a = 0.25 * (1.0 + common_a - osc_a);

    let a_term = co.f1.conj() * co.h2
        + co.h1 * co.f2.conj()
        + cross * ab
        + (2.0 * co.f1 * co.h4.conj() + co.h1 * co.f5.conj() + 2.0 * co.f3 * co.h2.conj()) * aa;
    let b_term = (co.f1 * co.f3 + co.f1 * co.f7 + co.f1 * co.h4 + co.h1 * co.f6 + co.h2 * co.f3)
        * al2
        + co.f1 * co.f5 * al * be
        + 3.0 * co.f3 * co.f3 * aa * al2;
    let var_x_ac = 0.25 * (1.0 + f3sq * aa * aa + a_term.re + b_term.re);
    let var_y_ac = 0.25 * (1.0 + f3sq * aa * aa + a_term.re - b_term.re);

    let d_a = 2.0
        * (2.0
            * (co.f1.conj() * co.f5
                + co.f1 * co.f6.conj()
                + 2.0 * co.f2 * co.f3.conj()
                + co.f1.conj() * co.f1.conj() * co.f2 * co.f3)
            * aa
            * ab)
            .re;
    let d_c = co.f2.norm_sqr() * bb;
    let d_ac =
        2.0 * ((co.f1 * co.f6.conj() + co.f1 * co.f3.conj() * co.h1 * co.h2.conj()) * aa * ab).re;

    let hz1 = f3sq * aa * aa * bb
        + 2.0
            * ((co.f1.conj() * co.f6 - co.f1 * co.f3.conj() * co.h1.conj() * co.h2)
                * aa
                * ab.conj())
            .re;
    let hz2 = f3sq * aa * aa * bb - 2.0 * (co.h1.conj() * co.h4 * aa * ab.conj()).re;
    let duan = 2.0 * (f3sq * aa * aa + a_term.re);

    Point {
        n_a,
        n_c,
        var_x_a,
        var_y_a,
        var_x_ac,
        var_y_ac,
        d_a,
        d_c,
        d_ac,
        hz1,
        hz2,
        duan,
    }
}

/// Mean exciton and photon occupations `(<N_a>, <N_c>)`.
pub fn expected_numbers(t: f64, params: &SystemParams, amps: &InitialAmplitudes) -> (f64, f64) {
    let p = point(&coefficients(t, params), amps);
    (p.n_a, p.n_c)
}

/// Exciton quadrature variances `(var X_a, var Y_a)`; values below 1/4
/// signal single-mode squeezing.
pub fn exciton_quadrature_variances(
    t: f64,
    params: &SystemParams,
    amps: &InitialAmplitudes,
) -> (f64, f64) {
    let p = point(&coefficients(t, params), amps);
    (p.var_x_a, p.var_y_a)
}

/// Photon quadrature variances; identically `(1/4, 1/4)` at this order.
pub fn photon_quadrature_variances(
    _t: f64,
    _params: &SystemParams,
    _amps: &InitialAmplitudes,
) -> (f64, f64) {
    (0.25, 0.25)
}

/// Intermodal quadrature variances `(var X_ac, var Y_ac)` of the coupled
/// quadratures `(X_a + X_c)/sqrt(2)` and `(Y_a + Y_c)/sqrt(2)`.
pub fn intermodal_quadrature_variances(
    t: f64,
    params: &SystemParams,
    amps: &InitialAmplitudes,
) -> (f64, f64) {
    let p = point(&coefficients(t, params), amps);
    (p.var_x_ac, p.var_y_ac)
}

/// Exciton Mandel-type parameter `D_a = <N_a^2> - <N_a>^2 - <N_a>`;
/// negative values signal antibunching.
pub fn antibunching_da(t: f64, params: &SystemParams, amps: &InitialAmplitudes) -> f64 {
    point(&coefficients(t, params), amps).d_a
}

/// Photon Mandel-type parameter `D_c`; nonnegative at this order.
pub fn antibunching_dc(t: f64, params: &SystemParams, amps: &InitialAmplitudes) -> f64 {
    point(&coefficients(t, params), amps).d_c
}

/// Intermodal correlation `D_ac = <N_a N_c> - <N_a><N_c>`; negative values
/// signal intermodal antibunching.
pub fn intermodal_dac(t: f64, params: &SystemParams, amps: &InitialAmplitudes) -> f64 {
    point(&coefficients(t, params), amps).d_ac
}

/// Two-mode entanglement witness `<N_a N_c> - |<a c'>|^2`; negative values
/// certify entanglement.
pub fn hz1_witness(t: f64, params: &SystemParams, amps: &InitialAmplitudes) -> f64 {
    point(&coefficients(t, params), amps).hz1
}

/// Two-mode entanglement witness `<N_a><N_c> - |<a c>|^2`; negative values
/// certify entanglement.
pub fn hz2_witness(t: f64, params: &SystemParams, amps: &InitialAmplitudes) -> f64 {
    point(&coefficients(t, params), amps).hz2
}

/// Duan collective quadrature witness; negative values certify entanglement,
/// and the second-order value is nonnegative on the validity window.
pub fn duan_witness(t: f64, params: &SystemParams, amps: &InitialAmplitudes) -> f64 {
    point(&coefficients(t, params), amps).duan
}

/// Steering witnesses `(S_a->c, S_c->a)`; negativity certifies steering in
/// the labeled direction.
pub fn steering_witnesses(t: f64, params: &SystemParams, amps: &InitialAmplitudes) -> (f64, f64) {
    let p = point(&coefficients(t, params), amps);
    (p.hz1 + 0.5 * p.n_a, p.hz1 + 0.5 * p.n_c)
}

/// Evaluates every witness column over `grid`, returning a series tagged as
/// analytic. Column order matches [`COLUMN_NAMES`].
pub fn analytic_series(
    params: &SystemParams,
    amps: &InitialAmplitudes,
    grid: &TimeGrid,
) -> WitnessSeries {
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); COLUMN_NAMES.len()];
    for &t in grid.times() {
        let p = point(&coefficients(t, params), amps);
        let g2_a = if p.n_a * p.n_a < 1e-24 {
            f64::NAN
        } else {
            1.0 + p.d_a / (p.n_a * p.n_a)
        };
        let g2_c = if p.n_c * p.n_c < 1e-24 {
            f64::NAN
        } else {
            1.0 + p.d_c / (p.n_c * p.n_c)
        };
        let values = [
            p.n_a,
            p.n_c,
            p.var_x_a,
            p.var_y_a,
            0.25,
            0.25,
            p.var_x_ac,
            p.var_y_ac,
            p.d_a,
            p.d_c,
            p.d_ac,
            g2_a,
            g2_c,
            p.hz1,
            p.hz2,
            p.duan,
            p.hz1 + 0.5 * p.n_a,
            p.hz1 + 0.5 * p.n_c,
        ];
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }
    let mut series = WitnessSeries::new(grid.times().to_vec(), SeriesSource::Analytic);
    for (name, col) in COLUMN_NAMES.iter().zip(columns) {
        series.push_column(name, col);
    }
    series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cds() -> SystemParams {
        SystemParams::cds()
    }

    #[test]
    fn zero_time_is_identity() {
        let co = coefficients(0.0, &cds());
        assert_eq!(co.f1, C64::new(1.0, 0.0));
        assert_eq!(co.h1, C64::new(1.0, 0.0));
        for z in [
            co.f2, co.f3, co.f4, co.f5, co.f6, co.f7, co.f8, co.h2, co.h3, co.h4,
        ] {
            assert_eq!(z, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn chi_zero_kills_nonlinear_coefficients() {
        let p = SystemParams::new(25.277, 24.013, 0.0, 1.0).unwrap();
        let co = coefficients(0.27, &p);
        for z in [co.f3, co.f5, co.f6, co.f7, co.f8, co.h4] {
            assert!(z.norm() < 1e-15);
        }
        assert!(co.f2.norm() > 0.1);
    }

    #[test]
    fn closed_forms_match_rk4_oracle_at_reference_point() {
        let p = cds();
        let exact = coefficients(0.1, &p);
        let oracle = coefficient_ode_oracle(0.1, &p, 1e-5);
        assert!(
            exact.max_abs_diff(&oracle) < 1e-8,
            "max diff {:.3e}",
            exact.max_abs_diff(&oracle)
        );
    }

    #[test]
    fn oracle_is_self_consistent_under_step_halving() {
        let p = cds();
        let coarse = coefficient_ode_oracle(0.1, &p, 1e-5);
        let fine = coefficient_ode_oracle(0.1, &p, 5e-6);
        assert!((coarse.f5 - fine.f5).norm() < 1e-7);
        assert!(coarse.max_abs_diff(&fine) < 1e-7);
    }

    #[test]
    fn oracle_path_matches_single_shot() {
        let p = cds();
        let path = coefficient_ode_oracle_path(&[0.0, 0.04, 0.1, 0.1, 0.25], &p, 1e-4);
        assert_eq!(path.len(), 5);
        let single = coefficient_ode_oracle(0.25, &p, 1e-4);
        assert!(path[4].max_abs_diff(&single) < 1e-12);
        assert!(path[0].max_abs_diff(&CoefficientSet::identity()) < 1e-15);
        assert!(path[2].max_abs_diff(&path[3]) < 1e-15);
    }

    #[test]
    fn zeroth_order_coefficients_stay_unimodular() {
        let p = cds();
        for &t in &[0.05, 0.13, 0.3] {
            let co = coefficients(t, &p);
            assert!((co.f1.norm() - 1.0).abs() < 1e-14);
            assert!((co.h1.norm() - 1.0).abs() < 1e-14);
            assert_eq!(co.h2, co.f2);
            assert_eq!(co.f8, co.f7);
        }
    }

    #[test]
    fn linear_sector_preserves_commutator_bookkeeping() {
        for p in [
            cds(),
            SystemParams::new(12.0, 11.5, 0.3, 1.0).unwrap(),
            SystemParams::new(5.0, 5.0, 0.0, 1.0).unwrap(),
        ] {
            for &t in &[0.1, 0.2, 0.3] {
                let co = coefficients(t, &p);
                let scalar = co.f1.norm_sqr() + co.f2.norm_sqr() + 2.0 * (co.f1 * co.f4.conj()).re;
                assert!(
                    (scalar - 1.0).abs() < 1e-6,
                    "bookkeeping scalar {scalar} at t {t}"
                );
            }
        }
    }

    #[test]
    fn total_occupation_is_conserved() {
        let p = cds();
        let amps = InitialAmplitudes::new(2.0, 1.0, 0.7).unwrap();
        let (na0, nc0) = expected_numbers(0.0, &p, &amps);
        assert!((na0 - 4.0).abs() < 1e-12);
        assert!((nc0 - 1.0).abs() < 1e-12);
        for &t in &[0.07, 0.19, 0.3] {
            let (na, nc) = expected_numbers(t, &p, &amps);
            assert!((na + nc - 5.0).abs() < 1e-10, "drift at t {t}");
        }
    }

    #[test]
    fn photon_variances_are_exactly_quarter() {
        let amps = InitialAmplitudes::new(2.0, 1.0, 0.0).unwrap();
        let (vx, vy) = photon_quadrature_variances(0.2, &cds(), &amps);
        assert_eq!((vx, vy), (0.25, 0.25));
    }

    #[test]
    fn phase_is_two_pi_periodic() {
        let p = cds();
        let tau = 2.0 * std::f64::consts::PI;
        let a0 = InitialAmplitudes::new(2.0, 1.0, 0.9).unwrap();
        let a1 = InitialAmplitudes::new(2.0, 1.0, 0.9 + tau).unwrap();
        for &t in &[0.1, 0.3] {
            for (w0, w1) in [
                (hz1_witness(t, &p, &a0), hz1_witness(t, &p, &a1)),
                (hz2_witness(t, &p, &a0), hz2_witness(t, &p, &a1)),
                (antibunching_da(t, &p, &a0), antibunching_da(t, &p, &a1)),
                (intermodal_dac(t, &p, &a0), intermodal_dac(t, &p, &a1)),
            ] {
                assert!((w0 - w1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn witnesses_are_continuous_through_zero_detuning() {
        let amps = InitialAmplitudes::new(2.0, 1.0, 0.4).unwrap();
        let near = SystemParams::new(25.0, 25.0 - 1e-8, 0.05, 1.0).unwrap();
        let off = SystemParams::new(25.0, 25.0 - 1e-3, 0.05, 1.0).unwrap();
        for &t in &[0.05, 0.17, 0.3] {
            let wn = [
                exciton_quadrature_variances(t, &near, &amps).0,
                intermodal_quadrature_variances(t, &near, &amps).1,
                antibunching_da(t, &near, &amps),
                hz1_witness(t, &near, &amps),
                hz2_witness(t, &near, &amps),
                duan_witness(t, &near, &amps),
            ];
            let wo = [
                exciton_quadrature_variances(t, &off, &amps).0,
                intermodal_quadrature_variances(t, &off, &amps).1,
                antibunching_da(t, &off, &amps),
                hz1_witness(t, &off, &amps),
                hz2_witness(t, &off, &amps),
                duan_witness(t, &off, &amps),
            ];
            for (a, b) in wn.iter().zip(wo.iter()) {
                assert!((a - b).abs() < 1e-4, "{a} vs {b} at t {t}");
            }
        }
    }

    #[test]
    fn photon_mandel_term_tracks_f2() {
        let p = cds();
        let amps = InitialAmplitudes::new(2.0, 1.0, 0.0).unwrap();
        let co = coefficients(0.2, &p);
        let dc = antibunching_dc(0.2, &p, &amps);
        assert!((dc - co.f2.norm_sqr()).abs() < 1e-14);
        assert!(dc >= 0.0);
    }

    #[test]
    fn duan_value_is_twice_kerr_quartic() {
        // The oscillator-sector contribution to the collective variances
        // cancels identically, leaving d = 2 |f3|^2 |alpha|^4.
        let p = cds();
        let amps = InitialAmplitudes::new(2.0, 1.0, 1.3).unwrap();
        for &t in &[0.1, 0.3] {
            let co = coefficients(t, &p);
            let d = duan_witness(t, &p, &amps);
            let expect = 2.0 * co.f3.norm_sqr() * 16.0;
            assert!((d - expect).abs() < 1e-12, "{d} vs {expect}");
            assert!(d >= 0.0);
        }
    }

    #[test]
    fn validity_warning_triggers_past_window() {
        let p = cds();
        assert!(validity_warning(0.2, &p).is_none());
        assert!(validity_warning(0.4, &p).is_some());
        let strong = SystemParams::new(10.0, 9.0, 8.0, 0.1).unwrap();
        assert!(validity_warning(0.1, &strong).is_none());
        assert!(validity_warning(0.15, &strong).is_some());
    }

    mod property {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn closed_forms_match_oracle_across_parameter_space(
                omega1 in 0.1f64..30.0,
                omega2 in 0.1f64..30.0,
                chi in 0.0f64..10.0,
                t in 0.0f64..0.3,
            ) {
                let p = SystemParams::new(omega1, omega2, chi, 1.0).unwrap();
                let exact = coefficients(t, &p);
                let oracle = coefficient_ode_oracle(t.max(1e-12), &p, 1e-4);
                prop_assert!(exact.max_abs_diff(&oracle) < 1e-6);
            }

            #[test]
            fn witness_values_are_finite_and_real(
                phi in 0.0f64..7.0,
                t in 0.0f64..0.3,
                chi in 0.0f64..0.5,
            ) {
                let p = SystemParams::new(25.277, 24.013, chi, 1.0).unwrap();
                let amps = InitialAmplitudes::new(2.0, 1.0, phi).unwrap();
                let values = [
                    expected_numbers(t, &p, &amps).0,
                    exciton_quadrature_variances(t, &p, &amps).0,
                    intermodal_quadrature_variances(t, &p, &amps).1,
                    antibunching_da(t, &p, &amps),
                    antibunching_dc(t, &p, &amps),
                    intermodal_dac(t, &p, &amps),
                    hz1_witness(t, &p, &amps),
                    hz2_witness(t, &p, &amps),
                    duan_witness(t, &p, &amps),
                    steering_witnesses(t, &p, &amps).0,
                ];
                for v in values {
                    prop_assert!(v.is_finite());
                }
                prop_assert!(antibunching_dc(t, &p, &amps) >= 0.0);
                prop_assert!(duan_witness(t, &p, &amps) >= 0.0);
            }
        }
    }
}
