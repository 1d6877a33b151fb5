//! State-independent average fidelity by exact quadrature, closed-form
//! fidelity and probability evaluators, a derivative-free optimizer for
//! the reversal strength, and inequality verdicts over parameter grids.
//!
//! The average over prepared states is taken uniformly in the excited
//! population a1² ∈ [0, 1] and the phase θ ∈ [0, 2π). The integrand is a
//! low-degree polynomial in a1² and a short trigonometric polynomial in
//! θ, so Gauss-Legendre nodes in a1² and uniform periodic nodes in θ
//! integrate it to machine precision at the default node counts.

use crate::channels::{NoiseKind, ProtectionConfig};
use crate::error::{Error, Result};
use crate::protocol::{noisy_resource, run_with_resource, ProtocolMode, TargetState};
use crate::qmath::DensityOperator;
use crate::scalar::{real, Scalar};

/// Tolerance for simulator-versus-closed-form agreement.
pub const ORACLE_EQUIVALENCE_TOL: f64 = 1e-9;

/// Tolerance for the no-improvement inequalities.
pub const NO_IMPROVEMENT_TOL: f64 = 1e-10;

/// Upper bound on the depolarizing fidelity improvement.
pub const DE_MAX_IMPROVEMENT: f64 = 0.018;

/// Quadrature resolution for the state average: Gauss-Legendre nodes on
/// a1² ∈ [0, 1] and uniform periodic nodes on θ ∈ [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    nodes_a: usize,
    nodes_theta: usize,
}

impl QuadratureSpec {
    pub const MIN_NODES_A: usize = 8;
    pub const MIN_NODES_THETA: usize = 16;

    pub fn new(nodes_a: usize, nodes_theta: usize) -> Result<Self> {
        if nodes_a < Self::MIN_NODES_A {
            return Err(Error::ParameterOutOfDomain {
                name: "nodes_a",
                value: nodes_a as f64,
                domain: ">= 8",
            });
        }
        if nodes_theta < Self::MIN_NODES_THETA {
            return Err(Error::ParameterOutOfDomain {
                name: "nodes_theta",
                value: nodes_theta as f64,
                domain: ">= 16",
            });
        }
        Ok(Self {
            nodes_a,
            nodes_theta,
        })
    }

    pub fn nodes_a(&self) -> usize {
        self.nodes_a
    }

    pub fn nodes_theta(&self) -> usize {
        self.nodes_theta
    }

    /// Gauss-Legendre nodes and weights on [0, 1], ascending by node.
    pub fn amplitude_rule<S: Scalar>(&self) -> Vec<(S, S)> {
        gauss_legendre_unit(self.nodes_a)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_a: Self::MIN_NODES_A,
            nodes_theta: Self::MIN_NODES_THETA,
        }
    }
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre_with_derivative<S: Scalar>(n: usize, x: S) -> (S, S) {
    let mut prev = S::one();
    let mut curr = x;
    for k in 2..=n {
        let kf = real::<S>(k as i32);
        let next = (real::<S>(2 * k as i32 - 1) * x * curr - (kf - S::one()) * prev) / kf;
        prev = curr;
        curr = next;
    }
    let dp = real::<S>(n as i32) * (x * curr - prev) / (x * x - S::one());
    (curr, dp)
}

/// Gauss-Legendre rule transplanted from [-1, 1] to [0, 1]; the weights
/// sum to the interval length 1.
fn gauss_legendre_unit<S: Scalar>(n: usize) -> Vec<(S, S)> {
    let half = S::one() / real::<S>(2);
    let quarter = half * half;
    let nf = real::<S>(n as i32);
    let mut rule = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (S::PI() * (real::<S>(i as i32) - quarter) / (nf + half)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= S::epsilon() {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = real::<S>(2) / ((S::one() - x * x) * dp * dp);
        rule.push(((x + S::one()) * half, w * half));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    rule
}

/// State-independent average fidelity: the branch-weighted protocol
/// fidelity integrated uniformly over a1² and θ. The resource is prepared
/// once and reused across all quadrature nodes.
pub fn si_average_fidelity<S: Scalar>(
    kind: NoiseKind,
    lambda: S,
    protection: ProtectionConfig<S>,
    mode: ProtocolMode,
    quad: &QuadratureSpec,
) -> Result<S> {
    let (resource, p_w0, p_v0) = noisy_resource(kind, lambda, protection, mode)?;
    average_over_targets(&resource, p_w0, p_v0, mode, quad)
}

/// The state average of [`si_average_fidelity`] for an already-prepared
/// resource.
pub fn average_over_targets<S: Scalar>(
    resource: &DensityOperator<S>,
    p_w0: S,
    p_v0: S,
    mode: ProtocolMode,
    quad: &QuadratureSpec,
) -> Result<S> {
    let rule = quad.amplitude_rule::<S>();
    let n_theta = quad.nodes_theta;
    let two_pi = S::PI() + S::PI();
    let mut acc = S::zero();
    for k in 0..n_theta {
        let theta = two_pi * real::<S>(k as i32) / real::<S>(n_theta as i32);
        for &(u, w) in &rule {
            let target = TargetState::from_excited_population(u, theta)?;
            let outcome = run_with_resource(resource, p_w0, p_v0, &target, mode)?;
            acc += w * outcome.average_fidelity;
        }
    }
    Ok(acc / real::<S>(n_theta as i32))
}

/// Identifier for each closed-form expression the analysis exposes.
///
/// `FAd`..`FDe` are the unprotected state-independent fidelities; the
/// `Fp*` family adds weak measurement at strength s and reversal at
/// strength r; `ROpt` is the fidelity-maximizing reversal strength under
/// amplitude damping, `FpAdOpt` the fidelity it attains, and `PAd` the
/// total success probability at that optimum. `FpDeOpt` is the optimal
/// protected depolarizing fidelity and `DeSBound` the weak-strength bound
/// of the depolarizing improvement region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedFormId {
    FAd,
    FBf,
    FPf,
    FDe,
    FpAd,
    ROpt,
    FpAdOpt,
    PAd,
    FpBf,
    FpPf,
    FpDe,
    FpDeOpt,
    DeSBound,
}

/// The unprotected closed form for a noise kind.
pub fn plain_form(kind: NoiseKind) -> ClosedFormId {
    match kind {
        NoiseKind::AmplitudeDamping => ClosedFormId::FAd,
        NoiseKind::BitFlip => ClosedFormId::FBf,
        NoiseKind::PhaseFlip => ClosedFormId::FPf,
        NoiseKind::Depolarizing => ClosedFormId::FDe,
    }
}

/// The protected closed form for a noise kind.
pub fn protected_form(kind: NoiseKind) -> ClosedFormId {
    match kind {
        NoiseKind::AmplitudeDamping => ClosedFormId::FpAd,
        NoiseKind::BitFlip => ClosedFormId::FpBf,
        NoiseKind::PhaseFlip => ClosedFormId::FpPf,
        NoiseKind::Depolarizing => ClosedFormId::FpDe,
    }
}

fn check_range<S: Scalar>(
    name: &'static str,
    value: S,
    lo: S,
    hi: S,
    hi_open: bool,
    domain: &'static str,
) -> Result<()> {
    let bad_high = if hi_open { value >= hi } else { value > hi };
    if value < lo || bad_high {
        return Err(Error::domain(name, value, domain));
    }
    Ok(())
}

/// Evaluates the closed form `id` at (lambda, s, r). Forms that do not
/// depend on s or r ignore those arguments; domains are enforced per
/// form. Every expression is a literal transcription evaluated in the
/// scalar's precision.
pub fn closed_form<S: Scalar>(id: ClosedFormId, lambda: S, s: S, r: S) -> Result<S> {
    let zero = S::zero();
    let one = S::one();
    let k = real::<S>;
    let check_lambda_closed = |v| check_range("lambda", v, zero, one, false, "[0, 1]");
    let check_lambda_open = |v| check_range("lambda", v, zero, one, true, "[0, 1)");
    let check_strength = |name, v| check_range(name, v, zero, one, true, "[0, 1)");

    match id {
        ClosedFormId::FAd => {
            check_lambda_closed(lambda)?;
            Ok(one - lambda / k(2))
        }
        ClosedFormId::FBf => {
            check_lambda_closed(lambda)?;
            Ok(k(2) / k(3) * lambda * lambda - lambda + one)
        }
        ClosedFormId::FPf => {
            check_lambda_closed(lambda)?;
            Ok((k(4) * lambda * lambda - k(4) * lambda + k(3)) / k(3))
        }
        ClosedFormId::FDe => {
            check_lambda_closed(lambda)?;
            Ok(k(16) / k(27) * lambda * lambda - k(10) / k(9) * lambda + one)
        }
        ClosedFormId::FpAd => {
            check_lambda_closed(lambda)?;
            check_strength("s", s)?;
            check_strength("r", r)?;
            let num = k(2) * (r * r + r * (s - k(3)) + (s - k(3)) * s + k(3))
                + lambda * lambda * r * (r + one) * (s - one) * (s - one)
                - lambda * (s - one) * (r * (k(3) * s - one) + s - k(3));
            let den = k(3)
                * (r * (lambda * lambda * r * (s - one) * (s - one) + r
                    - k(2) * lambda * (s - one) * (s - one)
                    - k(2))
                    + (s - k(2)) * s
                    + k(2));
            Ok(num / den)
        }
        ClosedFormId::ROpt => {
            check_lambda_open(lambda)?;
            check_strength("s", s)?;
            let ls = lambda * (s - one);
            let delta = (ls * (k(5) * ls + k(4)) + k(4)).sqrt();
            let num = delta + (delta - one) * ls - delta * s
                + lambda * lambda * (s - k(3)) * (s - one) * (s - one)
                - k(2);
            let den = ls * (ls * (ls - k(2)) - one) - k(2);
            Ok(num / den)
        }
        ClosedFormId::FpAdOpt => {
            check_lambda_closed(lambda)?;
            check_strength("s", s)?;
            let root = (k(5) * lambda * lambda - k(4) * lambda + k(5) * lambda * lambda * s * s
                - k(10) * lambda * lambda * s
                + k(4) * lambda * s
                + k(4))
            .sqrt();
            Ok((k(4) - k(2) * lambda + k(2) * lambda * s + root) / k(6))
        }
        ClosedFormId::PAd => {
            check_lambda_open(lambda)?;
            check_strength("s", s)?;
            let ls = lambda * (s - one);
            let delta = (ls * (k(5) * ls + k(4)) + k(4)).sqrt();
            let num = delta * (lambda - one) * (lambda - one) * (s - one) * (s - one);
            let den = delta + ls * (ls * (delta + k(2) * ls + k(2)) + k(2));
            Ok(num / den)
        }
        ClosedFormId::FpBf => {
            check_lambda_closed(lambda)?;
            check_strength("s", s)?;
            check_strength("r", r)?;
            let num = -lambda
                * (k(4) * r * r + r * (s * (k(3) * s - k(2)) - k(6)) + (s - k(6)) * s + k(6))
                + k(2) * (r * r + r * (s - k(3)) + (s - k(3)) * s + k(3))
                + lambda
                    * lambda
                    * (r * (r * ((s - k(2)) * s + k(3)) + s * (s + k(2)) - k(4)) - k(4) * s + k(4));
            let den = k(3)
                * (r * (lambda * lambda * r * ((s - k(2)) * s + k(2))
                    - k(2) * lambda * (r + (s - k(2)) * s)
                    + r
                    - k(2))
                    + (s - k(2)) * s
                    + k(2));
            Ok(num / den)
        }
        ClosedFormId::FpPf => {
            check_lambda_closed(lambda)?;
            check_strength("s", s)?;
            check_strength("r", r)?;
            let num = k(2)
                * (r * r + k(4) * lambda * lambda * (r - one) * (s - one)
                    - k(4) * lambda * (r - one) * (s - one)
                    + r * s
                    - k(3) * r
                    + s * s
                    - k(3) * s
                    + k(3));
            let den = k(3) * ((r - k(2)) * r + (s - k(2)) * s + k(2));
            Ok(num / den)
        }
        ClosedFormId::FpDe => {
            check_lambda_closed(lambda)?;
            check_strength("s", s)?;
            check_strength("r", r)?;
            let num = -k(6)
                * lambda
                * (k(4) * r * r + r * (s * (k(3) * s + k(2)) - k(10)) + (s - k(10)) * s + k(10))
                + k(18) * (r * r + r * (s - k(3)) + (s - k(3)) * s + k(3))
                + k(4)
                    * lambda
                    * lambda
                    * (r * (r * ((s - k(2)) * s + k(3)) + s * (s + k(6)) - k(8)) - k(8) * s + k(8));
            let den = k(12) * lambda * lambda * r * r * ((s - k(2)) * s + k(2))
                - k(36) * lambda * r * (r + (s - k(2)) * s)
                + k(27) * ((r - k(2)) * r + (s - k(2)) * s + k(2));
            Ok(num / den)
        }
        ClosedFormId::FpDeOpt => {
            check_lambda_closed(lambda)?;
            check_strength("s", s)?;
            let shared = k(4) * lambda * lambda * s * s - k(12) * lambda * s * s + k(9) * s * s
                - k(8) * lambda * lambda * s
                + k(24) * lambda * s
                - k(18) * s
                + k(9);
            let num = k(2) * (k(6) * lambda * lambda - k(12) * lambda + shared);
            let den = k(3) * (k(8) * lambda * lambda - k(12) * lambda + shared);
            Ok(num / den)
        }
        ClosedFormId::DeSBound => {
            check_lambda_open(lambda)?;
            let num = k(8) * lambda.powi(4) - k(15) * lambda.powi(3) + k(9) * lambda * lambda;
            let den = (k(2) * lambda - k(3)).powi(3) * (k(8) * lambda - k(3));
            if den == zero {
                return Ok(zero);
            }
            let radicand = -(num / den);
            if radicand < zero {
                return Ok(zero);
            }
            let bound = one - k(2) * S::SQRT_2() * radicand.sqrt();
            Ok(bound.max(zero))
        }
    }
}

/// Result of maximizing the protected average fidelity over the reversal
/// strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult<S: Scalar> {
    pub r_star: S,
    pub f_star: S,
    /// Objective evaluations spent (coarse grid plus golden-section).
    pub iterations: usize,
}

/// Maximizes the state-independent average fidelity over the reversal
/// strength r ∈ [0, 1 - 1e-6] at fixed weak strength `s`: a deterministic
/// 101-point coarse scan followed by golden-section refinement of the
/// bracketing interval down to width 1e-8.
pub fn optimize_r<S: Scalar>(
    kind: NoiseKind,
    lambda: S,
    s: S,
    mode: ProtocolMode,
) -> Result<OptimizationResult<S>> {
    check_range("lambda", lambda, S::zero(), S::one(), true, "[0, 1)")?;
    check_range("s", s, S::zero(), S::one(), true, "[0, 1)")?;
    let quad = QuadratureSpec::default();
    let mut evals = 0usize;
    let mut objective = |r: S| -> Result<S> {
        evals += 1;
        si_average_fidelity(kind, lambda, ProtectionConfig::new(s, r)?, mode, &quad)
    };

    // The best evaluation seen anywhere wins, so refinement can never
    // return a point worse than the coarse scan; at a plateau edge this
    // keeps exact grid values such as r = 0.
    let mut best_r = S::zero();
    let mut best_f = S::neg_infinity();
    let consider = |r: S, f: S, best_r: &mut S, best_f: &mut S| {
        if f > *best_f {
            *best_f = f;
            *best_r = r;
        }
    };

    const COARSE: usize = 101;
    let r_max = S::one() - S::from_f64(1e-6).expect("constant");
    let step = r_max / real::<S>((COARSE - 1) as i32);
    let mut best_index = 0usize;
    let mut best_value = S::neg_infinity();
    for i in 0..COARSE {
        let r = step * real::<S>(i as i32);
        let f = objective(r)?;
        consider(r, f, &mut best_r, &mut best_f);
        if f > best_value {
            best_value = f;
            best_index = i;
        }
    }

    let mut lo = step * real::<S>(best_index.saturating_sub(1) as i32);
    let mut hi = step * real::<S>(best_index.min(COARSE - 2) as i32 + 1);
    let tol = S::from_f64(1e-8)
        .expect("constant")
        .max(S::epsilon() * real::<S>(4));
    let inv_phi = (real::<S>(5).sqrt() - S::one()) / real::<S>(2);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    consider(c, fc, &mut best_r, &mut best_f);
    consider(d, fd, &mut best_r, &mut best_f);
    let mut guard = 0usize;
    while hi - lo > tol && guard < 400 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = objective(c)?;
            consider(c, fc, &mut best_r, &mut best_f);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = objective(d)?;
            consider(d, fd, &mut best_r, &mut best_f);
        }
        guard += 1;
    }
    let midpoint = (lo + hi) / real::<S>(2);
    let f_mid = objective(midpoint)?;
    consider(midpoint, f_mid, &mut best_r, &mut best_f);
    Ok(OptimizationResult {
        r_star: best_r,
        f_star: best_f,
        iterations: evals,
    })
}

/// Simulator-versus-closed-form margin at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginPoint<S: Scalar> {
    pub lambda: S,
    pub s: S,
    pub r: S,
    /// Protected quadrature fidelity at (lambda, s, r).
    pub protected: S,
    /// Unprotected closed-form fidelity at lambda.
    pub plain: S,
    /// protected - plain; positive values mean improvement.
    pub margin: S,
}

/// Grid verdict for the no-improvement inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport<S: Scalar> {
    pub points: Vec<MarginPoint<S>>,
    pub max_margin: S,
    /// True when no grid point improves beyond the tolerance.
    pub no_improvement: bool,
    /// Largest |margin| on the r = s diagonal, when checked.
    pub diagonal_max_gap: Option<S>,
    /// True when the diagonal is an equality within tolerance.
    pub diagonal_equal: Option<bool>,
}

fn inequality_verdict<S: Scalar>(
    kind: NoiseKind,
    lambda_grid: &[S],
    s_grid: &[S],
    r_grid: &[S],
    check_diagonal: bool,
) -> Result<InequalityReport<S>> {
    let quad = QuadratureSpec::default();
    let tol = S::from_f64(NO_IMPROVEMENT_TOL).expect("constant");
    let mut points = Vec::with_capacity(lambda_grid.len() * s_grid.len() * r_grid.len());
    let mut max_margin = S::neg_infinity();
    let mut no_improvement = true;
    let mut diagonal_max_gap = S::zero();
    for &lambda in lambda_grid {
        let plain = closed_form(plain_form(kind), lambda, S::zero(), S::zero())?;
        for &s in s_grid {
            for &r in r_grid {
                let protection = ProtectionConfig::new(s, r)?;
                let protected =
                    si_average_fidelity(kind, lambda, protection, ProtocolMode::Djrsp, &quad)?;
                let margin = protected - plain;
                max_margin = max_margin.max(margin);
                if margin > tol {
                    no_improvement = false;
                }
                if check_diagonal && s == r {
                    diagonal_max_gap = diagonal_max_gap.max(margin.abs());
                }
                points.push(MarginPoint {
                    lambda,
                    s,
                    r,
                    protected,
                    plain,
                    margin,
                });
            }
        }
    }
    let (diagonal_max_gap, diagonal_equal) = if check_diagonal {
        (Some(diagonal_max_gap), Some(diagonal_max_gap <= tol))
    } else {
        (None, None)
    };
    Ok(InequalityReport {
        points,
        max_margin,
        no_improvement,
        diagonal_max_gap,
        diagonal_equal,
    })
}

/// Checks that weak measurement and reversal never improve the bit-flip
/// fidelity on the given grid.
pub fn verdict_bitflip<S: Scalar>(
    lambda_grid: &[S],
    s_grid: &[S],
    r_grid: &[S],
) -> Result<InequalityReport<S>> {
    inequality_verdict(NoiseKind::BitFlip, lambda_grid, s_grid, r_grid, false)
}

/// As [`verdict_bitflip`] for phase flip, additionally checking equality
/// on the r = s diagonal.
pub fn verdict_phaseflip<S: Scalar>(
    lambda_grid: &[S],
    s_grid: &[S],
    r_grid: &[S],
) -> Result<InequalityReport<S>> {
    inequality_verdict(NoiseKind::PhaseFlip, lambda_grid, s_grid, r_grid, true)
}

/// Depolarizing improvement-region analysis at one (lambda, s) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeImprovementRegion<S: Scalar> {
    /// True when (lambda, s) lies strictly inside the improvement region.
    pub improvable: bool,
    /// Weak-strength bound of the region at this lambda; 0 when the
    /// radical has no real value or the bound is negative.
    pub s_bound: S,
    /// Optimal protected fidelity minus the unprotected fidelity.
    pub delta_f: S,
}

/// Evaluates the depolarizing improvement region: the noise-rate window
/// (0.468, 0.75) intersected with s below the radical bound, and the
/// fidelity gain of the optimal protected scheme there.
pub fn de_improvement_region<S: Scalar>(lambda: S, s: S) -> Result<DeImprovementRegion<S>> {
    check_range("lambda", lambda, S::zero(), S::one(), true, "[0, 1)")?;
    check_range("s", s, S::zero(), S::one(), true, "[0, 1)")?;
    let s_bound = closed_form(ClosedFormId::DeSBound, lambda, S::zero(), S::zero())?;
    let lo = S::from_f64(0.468).expect("constant");
    let hi = S::from_f64(0.75).expect("constant");
    let improvable = lambda > lo && lambda < hi && s > S::zero() && s < s_bound;
    let delta_f = closed_form(ClosedFormId::FpDeOpt, lambda, s, S::zero())?
        - closed_form(ClosedFormId::FDe, lambda, S::zero(), S::zero())?;
    Ok(DeImprovementRegion {
        improvable,
        s_bound,
        delta_f,
    })
}
