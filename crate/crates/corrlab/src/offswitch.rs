//! The single-agent off-switch game.
//!
//! An agent holds a Gaussian belief over the utility `U_a` of acting and
//! can act (`a`), switch off (`s`, worth 0), or act under supervision
//! (`w(a)`). The supervising human allows the better option when acting
//! rationally and the worse one otherwise; irrationality is modelled by a
//! sigmoid policy with temperature `beta` (`beta = 0` is the fully
//! rational step function).
//!
//! The continuous belief collapses into two Bernoulli parameters — the
//! probability `p_r` that the human acts rationally and the probability
//! `p_a` that acting is genuinely preferable — after which the game is a
//! three-way comparison of expected values. Both integrals are evaluated
//! by adaptive Simpson quadrature over `[mu - 10 sigma, mu + 10 sigma]`;
//! the discarded tail mass is below 1e-20.

use serde::Serialize;

use crate::adversary::{expected_utilities, AdversaryScenario};
use crate::error::{Error, Result};
use crate::nash::MixedStrategy;

/// Absolute error target for a single adaptive-quadrature call.
const QUAD_EPS: f64 = 1e-11;
/// Half-width of the integration window in standard deviations.
const TAIL_SIGMAS: f64 = 10.0;

/// Gaussian belief over the action utility plus the human irrationality
/// temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffSwitchParams {
    pub mu: f64,
    pub sigma: f64,
    pub beta: f64,
}

impl OffSwitchParams {
    pub fn new(mu: f64, sigma: f64, beta: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "mu must be finite, got {mu}"
            )));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "sigma must be a positive real, got {sigma}"
            )));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidScenario(format!(
                "beta must be nonnegative, got {beta}"
            )));
        }
        Ok(Self { mu, sigma, beta })
    }
}

/// The human's probability of allowing the supervised action to proceed,
/// as a function of its utility. A sigmoid for `beta > 0`; at `beta = 0`
/// the rational step function that allows exactly when `u_a >= 0`.
pub fn human_policy(u_a: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return if u_a >= 0.0 { 1.0 } else { 0.0 };
    }
    // exp overflow saturates to infinity, which this form maps to 0.
    1.0 / (1.0 + (-u_a / beta).exp())
}

/// Standard normal density.
fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn gaussian_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    phi((x - mu) / sigma) / sigma
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, fa, m, fm, left, lm, flm, 0.5 * eps, depth - 1)
        + adaptive_step(f, m, fm, b, fb, right, rm, frm, 0.5 * eps, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    adaptive_step(&f, a, fa, b, fb, whole, m, fm, eps, 48)
}

/// Probability that the human acts rationally, integrating the piecewise
/// policy against the Gaussian belief: the sigmoid above zero utility,
/// its complement below. Exactly 1 at `beta = 0`.
pub fn rationality_mass(params: &OffSwitchParams) -> f64 {
    if params.beta == 0.0 {
        return 1.0;
    }
    let rational = |u: f64| {
        let allow = human_policy(u, params.beta);
        if u >= 0.0 {
            allow
        } else {
            1.0 - allow
        }
    };
    let f = |u: f64| rational(u) * gaussian_pdf(u, params.mu, params.sigma);
    let lo = params.mu - TAIL_SIGMAS * params.sigma;
    let hi = params.mu + TAIL_SIGMAS * params.sigma;
    // The integrand has a kink at zero; split there when it is interior.
    let split = 0.0_f64.clamp(lo, hi);
    let mass = integrate(f, lo, split, QUAD_EPS) + integrate(f, split, hi, QUAD_EPS);
    // Quadrature noise must not push a probability outside [0, 1].
    mass.clamp(0.0, 1.0)
}

/// Probability that acting is preferable, i.e. the Gaussian upper-tail
/// mass at zero, evaluated by quadrature.
pub fn action_preference_mass(params: &OffSwitchParams) -> f64 {
    let lo = params.mu - TAIL_SIGMAS * params.sigma;
    let hi = params.mu + TAIL_SIGMAS * params.sigma;
    let from = 0.0_f64.max(lo);
    if from >= hi {
        return 0.0;
    }
    integrate(
        |u| gaussian_pdf(u, params.mu, params.sigma),
        from,
        hi,
        QUAD_EPS,
    )
    .clamp(0.0, 1.0)
}

/// `E[max(U_a, 0)]` of a Gaussian: `mu Phi(mu/sigma) + sigma phi(mu/sigma)`.
pub fn upper_truncated_mean(mu: f64, sigma: f64) -> f64 {
    let z = mu / sigma;
    mu * normal_cdf(z) + sigma * phi(z)
}

/// `E[min(U_a, 0)] = mu - E[max(U_a, 0)]`.
pub fn lower_truncated_mean(mu: f64, sigma: f64) -> f64 {
    mu - upper_truncated_mean(mu, sigma)
}

/// Solved off-switch game: the two Bernoulli parameters, expected values
/// for `(a, s, w(a))`, and the agent's strategy (uniform over maximal
/// options within 1e-9).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffSwitchSolution {
    pub p_r: f64,
    pub p_a: f64,
    pub strategy: MixedStrategy,
    pub expected_values: [f64; 3],
}

/// Solves the off-switch game by direct expectation: acting is worth
/// `mu`, switching off 0, and supervised play mixes the truncated means
/// by the rationality mass.
pub fn solve_offswitch(params: &OffSwitchParams) -> OffSwitchSolution {
    let p_r = rationality_mass(params);
    let p_a = action_preference_mass(params);
    let e_act = params.mu;
    let e_off = 0.0;
    let e_max = upper_truncated_mean(params.mu, params.sigma);
    let e_min = lower_truncated_mean(params.mu, params.sigma);
    let e_sup = p_r * e_max + (1.0 - p_r) * e_min;
    let expected = [e_act, e_off, e_sup];
    let best = expected.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let maximal: Vec<usize> = (0..3).filter(|&i| expected[i] >= best - 1e-9).collect();
    let mut probs = vec![0.0; 3];
    for &i in &maximal {
        probs[i] = 1.0 / maximal.len() as f64;
    }
    OffSwitchSolution {
        p_r,
        p_a,
        strategy: MixedStrategy::new(probs).expect("argmax mixture is a valid strategy"),
        expected_values: expected,
    }
}

/// Checks that an adversary scenario scaled to `a = b`, `c = d = 0`
/// collapses to the off-switch comparison and returns the matched
/// `(act, off, ask)` utility triple.
///
/// Under that scaling the defender's payoff no longer depends on the
/// adversary's move, so the triple must equal `(E[v], 0, p E[max(v, 0)] +
/// (1 - p) E[min(v, 0)])` where `v` ranges over the believed `a` values.
pub fn reduce_from_adversary(scenario: &AdversaryScenario) -> Result<(f64, f64, f64)> {
    const SCALE_TOL: f64 = 1e-12;
    for (idx, g) in scenario.belief().games().iter().enumerate() {
        if g.rows() != 2 || g.cols() != 2 {
            return Err(Error::InvalidScenario(
                "off-switch reduction needs 2x2 games".to_string(),
            ));
        }
        let (a, b, c, d) = (g.u1(0, 0), g.u1(0, 1), g.u1(1, 0), g.u1(1, 1));
        if (a - b).abs() > SCALE_TOL || c.abs() > SCALE_TOL || d.abs() > SCALE_TOL {
            return Err(Error::InvalidScenario(format!(
                "belief game {idx} violates the a=b, c=d=0 scaling: a={a}, b={b}, c={c}, d={d}"
            )));
        }
    }
    let utilities = expected_utilities(scenario)?;
    let p = scenario.p();
    let mut e_v = 0.0;
    let mut e_up = 0.0;
    let mut e_down = 0.0;
    for (g, w) in scenario.belief().atoms() {
        let v = g.u1(0, 0);
        e_v += w * v;
        e_up += w * v.max(0.0);
        e_down += w * v.min(0.0);
    }
    let expected_ask = p * e_up + (1.0 - p) * e_down;
    let check = |label: &str, got: f64, want: f64| -> Result<()> {
        if (got - want).abs() > 1e-9 {
            return Err(Error::InvalidScenario(format!(
                "reduction mismatch for {label}: scenario gives {got}, off-switch form gives {want}"
            )));
        }
        Ok(())
    };
    check("acting", utilities.alpha, e_v)?;
    check("switching off", utilities.beta, 0.0)?;
    check("asking", utilities.omega, expected_ask)?;
    Ok((utilities.alpha, utilities.beta, utilities.omega))
}
