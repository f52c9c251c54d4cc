//! Replication quality under finite ancilla squeezing.
//!
//! A realized system degrades the replica through exactly two numbers:
//! u (residual first-class noise reaching the output momentum) and
//! v (second-class noise reaching the output position). The replica is the
//! secret smeared by a position convolution of variance v^2/2a^2 and a
//! momentum convolution of variance u^2/2a^2, giving
//! F = [1 + (u^2+v^2)/2a^2 + u^2 v^2 / 4a^4]^(-1/2) against a coherent
//! secret, independent of the secret amplitude.

use crate::decoder::{self, XiSystem};
use crate::error::{Error, Result};
use crate::gaussian::{overlap, overlap_with_coherent, reduce, GaussianState};
use crate::matlib::{lstsq, norm, Matrix, Tolerance};
use crate::scheme::SchemeView;

/// Consistency bound for the u-expansion residual, relative to the
/// right-hand side scale.
pub const EXPANSION_EPS: f64 = 1e-9;

/// The two degradation amplitudes together with the ancilla width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationParams {
    u: f64,
    v: f64,
    a: f64,
}

impl DegradationParams {
    pub fn new(u: f64, v: f64, a: f64) -> Result<Self> {
        for (name, val) in [("u", u), ("v", v), ("a", a)] {
            if !val.is_finite() {
                return Err(Error::NonFinite { context: format!("degradation parameter {name}") });
            }
        }
        if u < 0.0 || v < 0.0 {
            return Err(Error::InvalidParam {
                context: format!("degradation amplitudes must be nonnegative, got u = {u}, v = {v}"),
            });
        }
        if a <= 0.0 {
            return Err(Error::InvalidParam {
                context: format!("ancilla width a = {a} must be positive"),
            });
        }
        Ok(DegradationParams { u, v, a })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Squeezing parameter r = ln a.
    pub fn r(&self) -> f64 {
        self.a.ln()
    }
}

/// Reads (u, v) off a realized system: v is the norm of the second-class
/// row of the replica equation, u is the norm of the expansion solving the
/// secret coefficients of rows 2..k against their first-class blocks. The
/// expansion is solved in the least-squares sense and must be consistent.
pub fn degradation_params(xi: &XiSystem, a: f64) -> Result<DegradationParams> {
    let k = xi.k();
    let v = norm(xi.gamma(0));
    let b = Matrix::from_fn(k - 1, k - 1, |j, i| xi.beta(j + 1)[i]);
    let alphas: Vec<f64> = (1..k).map(|j| xi.alpha(j)).collect();
    let (u_vec, residual) = lstsq(&b, &alphas, Tolerance::default())?;
    if residual > EXPANSION_EPS * norm(&alphas).max(1.0) {
        return Err(Error::InconsistentExpansion { residual });
    }
    DegradationParams::new(norm(&u_vec), v, a)
}

/// Replication fidelity against a coherent secret.
pub fn analytic_fidelity(p: &DegradationParams) -> f64 {
    let a2 = p.a * p.a;
    let u2 = p.u * p.u;
    let v2 = p.v * p.v;
    (1.0 + (u2 + v2) / (2.0 * a2) + u2 * v2 / (4.0 * a2 * a2)).powf(-0.5)
}

/// Moments of the replica for a coherent secret: the mean survives, the
/// position picks up v^2/2a^2 of extra variance and the momentum u^2/2a^2.
pub fn replicated_state_analytic(
    p: &DegradationParams,
    secret_mean: (f64, f64),
) -> Result<GaussianState> {
    let a2 = p.a * p.a;
    let var_x = 0.5 + p.v * p.v / (2.0 * a2);
    let var_p = 0.5 + p.u * p.u / (2.0 * a2);
    let cov = Matrix::from_rows(&[vec![var_x, 0.0], vec![0.0, var_p]])?;
    GaussianState::new(vec![secret_mean.0, secret_mean.1], cov)
}

/// Fidelity as a function of the squeezing parameter r = ln a on a grid.
pub fn fidelity_curve(u: f64, v: f64, r_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    r_grid
        .iter()
        .map(|&r| {
            if !r.is_finite() {
                return Err(Error::NonFinite { context: format!("grid point {r}") });
            }
            let p = DegradationParams::new(u, v, r.exp())?;
            Ok((r, analytic_fidelity(&p)))
        })
        .collect()
}

/// Runs the full pipeline twice: once through the Gaussian simulation
/// (encode, transform, reduce, overlap) and once through the realized
/// system's (u, v) and the closed form. The two must agree; callers assert
/// the tolerance that suits them.
pub fn end_to_end_fidelity(
    view: &SchemeView,
    collaborators: &[usize],
    a: f64,
    gamma: Option<f64>,
    secret_mean: (f64, f64),
    tol: Tolerance,
) -> Result<(f64, f64)> {
    let rep = decoder::replicate(view, collaborators, secret_mean, a, gamma, tol)?;
    let f_sim = overlap_with_coherent(&rep.replica, secret_mean)?;
    let params = degradation_params(&rep.xi, a)?;
    let f_analytic = analytic_fidelity(&params);
    Ok((f_sim, f_analytic))
}

/// Distinguishability of two secrets from the adversary marginal alone:
/// 1 - Tr[rho1 rho2] / sqrt(Tr[rho1^2] Tr[rho2^2]). The normalization makes
/// identical secrets score exactly zero even though the marginals are
/// mixed; it is one defensible choice among several, kept because it stays
/// inside the validated overlap machinery.
pub fn adversary_leakage(
    view: &SchemeView,
    adversary: &[usize],
    a: f64,
    secrets: ((f64, f64), (f64, f64)),
) -> Result<f64> {
    let k = view.k();
    let n = view.encoding().n();
    if adversary.len() != k - 1 {
        return Err(Error::BadSubset {
            context: format!("adversary coalition must have {} members, got {}", k - 1, adversary.len()),
        });
    }
    let mut sorted = adversary.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::BadSubset { context: format!("duplicate index {}", pair[0]) });
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= n) {
        return Err(Error::BadIndex { index: bad, bound: n });
    }
    if let Some(&held) = sorted.iter().find(|i| view.dropped().contains(i)) {
        return Err(Error::BadSubset { context: format!("share {held} was discarded") });
    }
    let marginal = |secret: (f64, f64)| -> Result<GaussianState> {
        reduce(&view.encode(secret, a)?, &sorted)
    };
    let rho1 = marginal(secrets.0)?;
    let rho2 = marginal(secrets.1)?;
    let cross = overlap(&rho1, &rho2)?;
    let normalized = cross / (rho1.purity()? * rho2.purity()?).sqrt();
    Ok((1.0 - normalized).max(0.0))
}

/// Direct numerical integration of the replica kernel, used only to pin
/// the closed-form moment calculus.
pub mod quadrature {
    use super::DegradationParams;

    const NODES: usize = 200;
    const HALF_WIDTH: f64 = 8.0;

    /// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on
    /// the recurrence.
    pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for m in 2..=n {
                    let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    nodes[i] = -x;
                    nodes[n - 1 - i] = x;
                    weights[i] = w;
                    weights[n - 1 - i] = w;
                    break;
                }
            }
        }
        (nodes, weights)
    }

    /// The replica kernel at (x, x') for a coherent secret centred at the
    /// origin, up to the secret's momentum phase, which cancels against the
    /// bra-ket phases in the fidelity integrand. The inner convolution over
    /// the smearing variable is carried out in closed form.
    fn kernel(p: &DegradationParams, x: f64, xp: f64) -> f64 {
        let c = 0.5 * (x + xp);
        let d = 0.5 * (x - xp);
        let decohere = (-p.u * p.u * (x - xp) * (x - xp) / (4.0 * p.a * p.a)).exp();
        let pi = std::f64::consts::PI;
        let smear = if p.v == 0.0 {
            (-c * c).exp()
        } else {
            let q = (p.a / p.v) * (p.a / p.v);
            (pi / (1.0 + q)).sqrt() * (-c * c * q / (1.0 + q)).exp()
        };
        decohere * pi.powf(-0.5) * (-d * d).exp() * smear
    }

    /// Fidelity of the replica against the coherent secret by direct 2D
    /// quadrature of <psi| rho' |psi> and 1D quadrature of the trace. The
    /// secret mean drops out exactly, so the kernel is evaluated in
    /// centred coordinates.
    pub fn fidelity(p: &DegradationParams) -> f64 {
        fidelity_with_nodes(p, NODES)
    }

    pub fn fidelity_with_nodes(p: &DegradationParams, n: usize) -> f64 {
        let (nodes, weights) = gauss_legendre(n);
        let pi = std::f64::consts::PI;
        let xs: Vec<f64> = nodes.iter().map(|t| t * HALF_WIDTH).collect();
        let ws: Vec<f64> = weights.iter().map(|w| w * HALF_WIDTH).collect();
        let mut numerator = 0.0;
        for (x, wx) in xs.iter().zip(&ws) {
            for (xp, wxp) in xs.iter().zip(&ws) {
                let bra_ket = pi.powf(-0.5) * (-0.5 * x * x - 0.5 * xp * xp).exp();
                numerator += wx * wxp * bra_ket * kernel(p, *x, *xp);
            }
        }
        // the trace integrand can be much wider than the fidelity one
        let q = if p.v == 0.0 { f64::INFINITY } else { (p.a / p.v) * (p.a / p.v) };
        let trace_sigma = if q.is_finite() { ((1.0 + q) / (2.0 * q)).sqrt() } else { (0.5f64).sqrt() };
        let trace_half_width = (8.0 * trace_sigma).max(HALF_WIDTH);
        let mut trace = 0.0;
        for (t, w) in nodes.iter().zip(&weights) {
            let x = t * trace_half_width;
            trace += w * trace_half_width * kernel(p, x, x);
        }
        numerator / trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{random_encoding, ThresholdParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn golden_view() -> SchemeView {
        random_encoding(ThresholdParams::canonical(2).unwrap(), 42).unwrap()
    }

    fn xi_from(rows: &[Vec<f64>], k: usize) -> XiSystem {
        XiSystem::from_matrix(k, Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(matches!(
            DegradationParams::new(-0.1, 0.0, 1.0),
            Err(Error::InvalidParam { .. })
        ));
        assert!(matches!(
            DegradationParams::new(0.0, 0.0, 0.0),
            Err(Error::InvalidParam { .. })
        ));
        assert!(matches!(
            DegradationParams::new(f64::NAN, 0.0, 1.0),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn analytic_fixtures() {
        let perfect = DegradationParams::new(0.0, 0.0, 3.7).unwrap();
        assert_eq!(analytic_fidelity(&perfect), 1.0);
        let solid = DegradationParams::new(0.5, 1.0, 1.0).unwrap();
        let f = analytic_fidelity(&solid);
        assert!((f - 1.6875f64.powf(-0.5)).abs() < 1e-15);
        assert!((f - 0.76980).abs() < 1e-5);
        let dashed = DegradationParams::new(3.0, 5.0, 1.0).unwrap();
        let f = analytic_fidelity(&dashed);
        assert!((f - 74.25f64.powf(-0.5)).abs() < 1e-15);
        assert!((f - 0.11605).abs() < 1e-5);
    }

    #[test]
    fn fidelity_symmetric_under_uv_swap() {
        for (u, v, a) in [(0.5, 1.0, 1.0), (3.0, 5.0, 0.4), (2.0, 0.0, 2.5)] {
            let p1 = DegradationParams::new(u, v, a).unwrap();
            let p2 = DegradationParams::new(v, u, a).unwrap();
            assert_eq!(analytic_fidelity(&p1), analytic_fidelity(&p2));
        }
        // the moments do distinguish the two orderings
        let m1 = replicated_state_analytic(&DegradationParams::new(1.0, 2.0, 1.0).unwrap(), (0.0, 0.0)).unwrap();
        let m2 = replicated_state_analytic(&DegradationParams::new(2.0, 1.0, 1.0).unwrap(), (0.0, 0.0)).unwrap();
        assert!((m1.var_x(0) - m2.var_x(0)).abs() > 1.0);
    }

    #[test]
    fn replicated_state_moments() {
        let p = DegradationParams::new(0.0, 0.0, 1.0).unwrap();
        let st = replicated_state_analytic(&p, (1.5, -0.5)).unwrap();
        assert_eq!(st.mean(), &[1.5, -0.5]);
        assert_eq!(st.var_x(0), 0.5);
        assert_eq!(st.var_p(0), 0.5);
        let p = DegradationParams::new(3.0, 5.0, 2.0).unwrap();
        let st = replicated_state_analytic(&p, (0.0, 0.0)).unwrap();
        assert!((st.var_x(0) - (0.5 + 25.0 / 8.0)).abs() < 1e-15);
        assert!((st.var_p(0) - (0.5 + 9.0 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn replicated_overlap_reproduces_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u = rng.gen_range(0.0..4.0);
            let v = rng.gen_range(0.0..4.0);
            let a = rng.gen_range(0.2..5.0);
            let mean = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let p = DegradationParams::new(u, v, a).unwrap();
            let st = replicated_state_analytic(&p, mean).unwrap();
            let f = overlap_with_coherent(&st, mean).unwrap();
            assert!((f - analytic_fidelity(&p)).abs() <= 1e-9, "u={u} v={v} a={a}");
        }
    }

    #[test]
    fn degradation_from_realized_system() {
        // k = 2: one expansion coefficient u = alpha2 / beta2
        let xi = xi_from(
            &[vec![1.0, 0.0, 0.5], vec![1.0, 2.0, 0.3], vec![0.4, 2.0, 0.9]],
            2,
        );
        let p = degradation_params(&xi, 1.0).unwrap();
        assert!((p.u() - 0.5).abs() < 1e-12);
        assert!((p.v() - 0.5).abs() < 1e-12);
        assert!((analytic_fidelity(&p) - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_decode_gives_zero_degradation() {
        let xi = xi_from(
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.7], vec![0.4, 2.0, 0.9]],
            2,
        );
        let p = degradation_params(&xi, 2.0).unwrap();
        assert_eq!(p.u(), 0.0);
        assert_eq!(p.v(), 0.0);
        assert_eq!(analytic_fidelity(&p), 1.0);
    }

    #[test]
    fn inconsistent_expansion_is_diagnosed() {
        let xi = xi_from(
            &[vec![1.0, 0.0, 0.5], vec![0.7, 0.0, 1.0], vec![0.4, 2.0, 0.9]],
            2,
        );
        match degradation_params(&xi, 1.0) {
            Err(Error::InconsistentExpansion { residual }) => {
                assert!((residual - 0.7).abs() < 1e-12);
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn curve_fixtures_and_monotonicity() {
        let curve = fidelity_curve(0.5, 1.0, &[-5.0, -2.0, 0.0, 1.0, 3.0]).unwrap();
        assert!((curve[2].1 - 0.76980).abs() < 1e-5);
        assert!(curve.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(curve[0].1 < 0.05);
        let dashed = fidelity_curve(3.0, 5.0, &[3.0]).unwrap();
        let expect = (1.0 + 34.0 / (2.0 * 6.0f64.exp()) + 225.0 / (4.0 * 12.0f64.exp())).powf(-0.5);
        assert!((dashed[0].1 - expect).abs() < 1e-15);
        assert!((expect - 0.9794115).abs() < 1e-6);
        assert!(fidelity_curve(0.5, 1.0, &[f64::INFINITY]).is_err());
    }

    #[test]
    fn end_to_end_routes_agree_on_golden_scheme() {
        let view = golden_view();
        for a in [1.0f64.exp().recip(), 1.0, 1.0f64.exp(), 3.0f64.exp()] {
            let (f_sim, f_analytic) =
                end_to_end_fidelity(&view, &[0, 1], a, None, (0.4, -1.1), Tolerance::default())
                    .unwrap();
            assert!((f_sim - f_analytic).abs() <= 1e-6, "a = {a}: {f_sim} vs {f_analytic}");
        }
    }

    #[test]
    fn end_to_end_is_amplitude_independent() {
        let view = golden_view();
        let (f1_sim, f1_an) =
            end_to_end_fidelity(&view, &[1, 2], 1.0, None, (0.0, 0.0), Tolerance::default())
                .unwrap();
        let (f2_sim, f2_an) =
            end_to_end_fidelity(&view, &[1, 2], 1.0, None, (3.0, -2.0), Tolerance::default())
                .unwrap();
        assert_eq!(f1_an, f2_an);
        assert!((f1_sim - f2_sim).abs() <= 1e-9);
    }

    #[test]
    fn end_to_end_approaches_unity() {
        let view = golden_view();
        let (f_sim, f_analytic) =
            end_to_end_fidelity(&view, &[0, 2], 6.0f64.exp(), None, (1.0, 1.0), Tolerance::default())
                .unwrap();
        assert!(f_sim >= 1.0 - 1e-4);
        assert!(f_analytic >= 1.0 - 1e-4);
    }

    #[test]
    fn leakage_zero_for_identical_secrets() {
        let view = golden_view();
        let l = adversary_leakage(&view, &[2], 1.0, ((0.7, -0.3), (0.7, -0.3))).unwrap();
        assert!(l.abs() <= 1e-12);
    }

    #[test]
    fn leakage_positive_then_suppressed_by_squeezing() {
        let view = golden_view();
        let secrets = ((0.0, 0.0), (2.0, 1.0));
        let weak = adversary_leakage(&view, &[2], 1.0, secrets).unwrap();
        let strong = adversary_leakage(&view, &[2], 5.0f64.exp(), secrets).unwrap();
        assert!(weak > 1e-3, "leakage at r=0 should be visible, got {weak}");
        assert!(strong < weak);
        assert!(strong <= 1e-3, "leakage at r=5 should be suppressed, got {strong}");
    }

    #[test]
    fn leakage_rejects_bad_subsets() {
        let view = golden_view();
        assert!(matches!(
            adversary_leakage(&view, &[0, 1], 1.0, ((0.0, 0.0), (1.0, 0.0))),
            Err(Error::BadSubset { .. })
        ));
        assert!(matches!(
            adversary_leakage(&view, &[5], 1.0, ((0.0, 0.0), (1.0, 0.0))),
            Err(Error::BadIndex { .. })
        ));
    }

    #[test]
    fn gauss_legendre_integrates_exactly() {
        let (nodes, weights) = quadrature::gauss_legendre(12);
        // degree-23 polynomial is exact for a 12-point rule
        let int: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x.powi(22)).sum();
        assert!((int - 2.0 / 23.0).abs() < 1e-14);
        let total: f64 = weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // scaled Gaussian over [-8, 8]
        let (nodes, weights) = quadrature::gauss_legendre(80);
        let int: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(t, w)| 8.0 * w * (-(8.0 * t) * (8.0 * t)).exp())
            .sum();
        assert!((int - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quadrature_confirms_closed_form() {
        let points = [
            (0.5, 1.0, 1.0),
            (3.0, 5.0, 1.0f64.exp()),
            (1.0, 0.3, (-1.0f64).exp()),
            (0.0, 2.0, 1.0),
            (2.0, 0.0, 1.0f64.exp()),
        ];
        for (u, v, a) in points {
            let p = DegradationParams::new(u, v, a).unwrap();
            let fq = quadrature::fidelity(&p);
            let fa = analytic_fidelity(&p);
            assert!((fq - fa).abs() <= 1e-7, "u={u} v={v} a={a}: {fq} vs {fa}");
            // resolution self-check
            let fq_coarse = quadrature::fidelity_with_nodes(&p, 150);
            assert!((fq - fq_coarse).abs() <= 1e-9, "u={u} v={v} a={a} not converged");
        }
        let identity = DegradationParams::new(0.0, 0.0, 1.0).unwrap();
        assert!((quadrature::fidelity(&identity) - 1.0).abs() <= 1e-10);
    }
}
