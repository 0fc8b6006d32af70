//! Noise stability of the extended reconstruction.
//!
//! The reconstruction operator acts frequency-wise through the pseudoinverse
//! `A_Ω†(ξ)`, so its norm is `max_ξ 1/s_min(A_Ω(ξ))` over the packet grid.
//! This module computes that norm and the closed-form estimates around it:
//!
//! * upper bounds `m·β·(1 + m√(n−1))` for `Ω = {0, …, m−1}`, with `β` taken
//!   from the inverse norm of `A_m` on `J` (β₁), from the node separation δ
//!   (β₂), or from the derivative bound γ (β₃);
//! * the lower bound `m·‖A_m⁻¹(1/n)‖` for minimal `Ω = {1, …, (m−1)/2}`;
//! * Gautschi's estimate of a Vandermonde inverse.
//!
//! β₂ and β₃ are reported both as printed and inflated by the `√m` factor
//! carried by the Gautschi estimate; only the inflated values follow from the
//! chain of inequalities, so those are the ones checked against the norm.
//!
//! Suprema over continuous sets are replaced by maxima over the grid points
//! that fall inside them, and the empirical norm uses the same grid.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{check_symmetric_decreasing, Filter};
use crate::linalg::{self, CMatrix, PINV_RCOND};
use crate::reconstruct::{
    check_guarantee_regime, forward, ExtendedOptions, ExtendedSolver, Sampling,
};
use crate::spectral::Signal;
use crate::system::{full_omega, minimal_omega, ExtendedSystem, PlainSystem};

/// Default relative slack on the noise bound.
pub const NOISE_SLACK: f64 = 0.10;

/// Allowed relative gap between the fitted error-vs-σ slope and a proportional fit.
pub const SLOPE_TOLERANCE: f64 = 0.05;

/// Tolerance on `sup|â| ≤ 1`.
const SUP_TOL: f64 = 1e-12;

fn coarse_len(a: &Filter, m: usize) -> Result<usize> {
    crate::system::require_divides(a.len(), m)?;
    Ok(a.len() / m)
}

/// `max_ρ 1/s_min(A_Ω(ρ))` over all packets.
pub fn empirical_pinv_norm(a: &Filter, m: usize, n: usize, omega: &[usize]) -> Result<f64> {
    Ok(pinv_norm_profile(a, m, n, omega)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// `1/s_min(A_Ω(ρ))` for every packet index `ρ`.
pub fn pinv_norm_profile(a: &Filter, m: usize, n: usize, omega: &[usize]) -> Result<Vec<f64>> {
    let coarse = coarse_len(a, m)?;
    if coarse < 4 * m * n {
        return Err(Error::InvalidParameter(format!(
            "grid of {coarse} points over [0,1) is coarser than 4mn = {}",
            4 * m * n
        )));
    }
    let system = ExtendedSystem::new(a, m, n, m, omega)?;
    let mut deficient = Vec::new();
    let mut profile = Vec::with_capacity(system.packets());
    for rho in 0..system.packets() {
        let s = linalg::singular_values(&system.matrix(rho)?);
        let smin = s.get(m * n - 1).copied().unwrap_or(0.0);
        if smin <= PINV_RCOND * s[0] {
            deficient.push(rho);
        }
        profile.push(1.0 / smin);
    }
    if !deficient.is_empty() {
        return Err(Error::RankDeficient(deficient));
    }
    Ok(profile)
}

/// Coarse grid indices inside `J = [1/(4n), 1/2 − 1/(4n)] ∪ [1/2 + 1/(4n), 1 − 1/(4n)]`.
pub fn j_grid(coarse: usize, n: usize) -> Vec<usize> {
    // ξ = ρ/M; compare 4nρ against multiples of M to stay in integers
    let (c, q) = (coarse, 4 * n);
    (0..coarse)
        .filter(|&rho| {
            let x = q * rho;
            (x >= c && x <= 2 * n * c - c) || (x >= 2 * n * c + c && x <= 4 * n * c - c)
        })
        .collect()
}

/// Fine grid indices inside `M = [1/(4mn), 1/2 − 1/(4mn)]`.
pub fn m_grid(len: usize, m: usize, n: usize) -> Vec<usize> {
    let q = 4 * m * n;
    (0..len)
        .filter(|&r| q * r >= len && q * r <= 2 * m * n * len - len)
        .collect()
}

fn check_upper_hypotheses(a: &Filter, m: usize, n: usize, omega: &[usize]) -> Result<()> {
    let check = check_symmetric_decreasing(a);
    if !check.holds {
        return Err(Error::HypothesisViolated(format!(
            "filter must be real, symmetric and strictly decreasing on [0, 1/2] (fails at grid index {:?})",
            check.violation
        )));
    }
    if m.is_multiple_of(2) || n.is_multiple_of(2) {
        return Err(Error::HypothesisViolated(format!(
            "m and n must be odd (m = {m}, n = {n})"
        )));
    }
    let mut sorted = omega.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted != full_omega(m) {
        return Err(Error::HypothesisViolated(format!(
            "upper bounds are stated for Omega = {{0, ..., m-1}}, got {omega:?}"
        )));
    }
    Ok(())
}

fn check_sup_norm(a: &Filter) -> Result<()> {
    let sup = a.sup_abs();
    if sup > 1.0 + SUP_TOL {
        return Err(Error::HypothesisViolated(format!(
            "sup|a^| = {sup} exceeds 1"
        )));
    }
    Ok(())
}

fn j_points(a: &Filter, m: usize, n: usize) -> Result<Vec<usize>> {
    let coarse = coarse_len(a, m)?;
    let j = j_grid(coarse, n);
    if j.len() < 8 * m * n {
        return Err(Error::InvalidParameter(format!(
            "only {} grid points inside J; need at least 8mn = {}",
            j.len(),
            8 * m * n
        )));
    }
    Ok(j)
}

fn upper_bound(m: usize, n: usize, beta: f64) -> f64 {
    let mf = m as f64;
    mf * beta * (1.0 + mf * ((n - 1) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Beta1 {
    /// `max_{ξ∈J} ‖A_m⁻¹(ξ)‖` on the grid.
    pub sup_inverse_norm: f64,
    pub beta: f64,
    pub bound: f64,
}

pub fn bound_beta1(a: &Filter, m: usize, n: usize, omega: &[usize]) -> Result<Beta1> {
    check_upper_hypotheses(a, m, n, omega)?;
    let system = PlainSystem::new(a, m, m)?;
    let mut sup_inverse_norm: f64 = 0.0;
    for rho in j_points(a, m, n)? {
        sup_inverse_norm = sup_inverse_norm.max(1.0 / system.smin(rho)?);
    }
    let beta = (n as f64).max(sup_inverse_norm);
    Ok(Beta1 {
        sup_inverse_norm,
        beta,
        bound: upper_bound(m, n, beta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Beta2 {
    /// Smallest node separation over `ξ ∈ J`.
    pub delta: f64,
    /// `max{n, (2/δ)^{m−1}}`
    pub beta: f64,
    pub bound: f64,
    /// `max{n, √m·(2/δ)^{m−1}}`
    pub beta_inflated: f64,
    pub bound_inflated: f64,
}

pub fn bound_beta2(a: &Filter, m: usize, n: usize, omega: &[usize]) -> Result<Beta2> {
    check_upper_hypotheses(a, m, n, omega)?;
    check_sup_norm(a)?;
    let system = PlainSystem::new(a, m, m)?;
    let mut delta = f64::INFINITY;
    for rho in j_points(a, m, n)? {
        let nodes = system.nodes(rho)?;
        for j in 0..m {
            for i in 0..j {
                delta = delta.min((nodes[j] - nodes[i]).norm());
            }
        }
    }
    if delta <= 0.0 {
        return Err(Error::HypothesisViolated("nodes coincide inside J".into()));
    }
    let core = (2.0 / delta).powi(m as i32 - 1);
    let nf = n as f64;
    let beta = nf.max(core);
    let beta_inflated = nf.max((m as f64).sqrt() * core);
    Ok(Beta2 {
        delta,
        beta,
        bound: upper_bound(m, n, beta),
        beta_inflated,
        bound_inflated: upper_bound(m, n, beta_inflated),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Beta3 {
    /// `min_{ξ∈M} |â′(ξ)|`
    pub gamma: f64,
    /// `max{n, (4mn/γ)^{m−1}}`
    pub beta: f64,
    pub bound: f64,
    /// `max{n, √m·(4mn/γ)^{m−1}}`
    pub beta_inflated: f64,
    pub bound_inflated: f64,
}

/// `min |â′|` over `M = [1/(4mn), 1/2 − 1/(4mn)]`.
///
/// Uses the closed-form derivative at the grid points in `M` and at both
/// endpoints when the filter kind has one, and central differences on the
/// grid otherwise.
pub fn derivative_floor(a: &Filter, m: usize, n: usize) -> Result<f64> {
    let len = a.len();
    let points = m_grid(len, m, n);
    if points.is_empty() {
        return Err(Error::InvalidParameter("no grid points inside M".into()));
    }
    let kind = a.kind();
    let gamma = if kind.derivative(0.25).is_some() {
        let edge = 1.0 / (4 * m * n) as f64;
        points
            .iter()
            .map(|&r| r as f64 / len as f64)
            .chain([edge, 0.5 - edge])
            .map(|xi| kind.derivative(xi).expect("closed form").abs())
            .fold(f64::INFINITY, f64::min)
    } else {
        let resp = a.response();
        let h = len as f64 / 2.0;
        points
            .iter()
            .map(|&r| ((resp[(r + 1) % len].re - resp[(r + len - 1) % len].re) * h).abs())
            .fold(f64::INFINITY, f64::min)
    };
    Ok(gamma)
}

pub fn bound_beta3(a: &Filter, m: usize, n: usize, omega: &[usize]) -> Result<Beta3> {
    check_upper_hypotheses(a, m, n, omega)?;
    check_sup_norm(a)?;
    let gamma = derivative_floor(a, m, n)?;
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::HypothesisViolated(
            "derivative of a^ vanishes inside M".into(),
        ));
    }
    let core = (4.0 * (m * n) as f64 / gamma).powi(m as i32 - 1);
    let nf = n as f64;
    let beta = nf.max(core);
    let beta_inflated = nf.max((m as f64).sqrt() * core);
    Ok(Beta3 {
        gamma,
        beta,
        bound: upper_bound(m, n, beta),
        beta_inflated,
        bound_inflated: upper_bound(m, n, beta_inflated),
    })
}

/// Gautschi's estimate
/// `‖A_m⁻¹(ξ)‖ ≤ √m · max_i ∏_{j≠i} (1 + |x_j|) / |x_j − x_i|` on the nodes of `A_m(ξ)`.
pub fn gautschi_bound(a: &Filter, m: usize, rho: usize) -> Result<f64> {
    let nodes = PlainSystem::new(a, m, m)?.nodes(rho)?;
    gautschi_from_nodes(&nodes)
}

pub fn gautschi_from_nodes(nodes: &[Complex64]) -> Result<f64> {
    let m = nodes.len();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let mut prod = 1.0;
        for j in (0..m).filter(|&j| j != i) {
            let gap = (nodes[j] - nodes[i]).norm();
            if gap == 0.0 {
                return Err(Error::CoincidentNodes {
                    i: i.min(j),
                    j: i.max(j),
                });
            }
            prod *= (1.0 + nodes[j].norm()) / gap;
        }
        worst = worst.max(prod);
    }
    Ok((m as f64).sqrt() * worst)
}

/// `m·‖A_m⁻¹(1/n)‖`, the lower bound for a minimal extra set `|Ω| = (m−1)/2`.
pub fn lower_bound_stablow(a: &Filter, m: usize, n: usize, omega: &[usize]) -> Result<f64> {
    if m == 1 {
        return Ok(0.0);
    }
    check_guarantee_regime(m, n, omega).map_err(|e| Error::HypothesisViolated(e.to_string()))?;
    if omega.len() != (m - 1) / 2 {
        return Err(Error::HypothesisViolated(format!(
            "lower bound needs |Omega| = (m-1)/2 = {}, got {}",
            (m - 1) / 2,
            omega.len()
        )));
    }
    let coarse = coarse_len(a, m)?;
    if coarse % n != 0 {
        return Err(Error::GridMiss {
            numer: 1,
            denom: n,
            grid: coarse,
        });
    }
    let smin = PlainSystem::new(a, m, m)?.smin(coarse / n)?;
    Ok(m as f64 / smin)
}

/// Both sides of the interlacing estimate at packet `rho`:
/// `s_min²(A_Ω(ξ))` and `(1/m²)·λ_{mn−|Ω|}(B(ξ))`, where `B(ξ)` is the
/// block-diagonal matrix of `A_m(ξ + k/n) A_m*(ξ + k/n)`.
pub fn interlacing_check(
    a: &Filter,
    m: usize,
    n: usize,
    omega: &[usize],
    rho: usize,
) -> Result<(f64, f64)> {
    let ext = ExtendedSystem::new(a, m, n, m, omega)?;
    let lhs = ext.smin(rho)?.powi(2);
    let plain = PlainSystem::new(a, m, m)?;
    let mut eigen: Vec<f64> = Vec::with_capacity(m * n);
    for k in 0..n {
        let block = plain.matrix(rho + k * ext.packets())?;
        eigen.extend(linalg::singular_values(&block).into_iter().map(|s| s * s));
    }
    eigen.sort_by(|x, y| y.total_cmp(x));
    let index = m * n - omega.len();
    if index == 0 {
        return Err(Error::InvalidParameter(
            "Omega has at least mn shifts".into(),
        ));
    }
    Ok((lhs, eigen[index - 1] / (m * m) as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub m: usize,
    pub n: usize,
    pub len: usize,
    /// Packet grid resolution `L/m` over `[0, 1)`.
    pub grid: usize,
    /// Norm for the minimal set `Ω = {1, …, (m−1)/2}`.
    pub empirical_norm: f64,
    /// Norm for `Ω = {0, …, m−1}`.
    pub empirical_norm_full: f64,
    pub beta1: Option<Beta1>,
    pub beta2: Option<Beta2>,
    pub beta3: Option<Beta3>,
    pub lower_bound: f64,
    pub j_grid: Vec<usize>,
    pub m_grid: Vec<usize>,
}

impl StabilityReport {
    /// Smallest upper bound that follows from the proofs (β₁ and the inflated β₂, β₃).
    pub fn tightest_upper(&self) -> f64 {
        [
            self.beta1.map(|b| b.bound),
            self.beta2.map(|b| b.bound_inflated),
            self.beta3.map(|b| b.bound_inflated),
        ]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min)
    }

    /// `lower ≤ ‖A_Ω†‖` for the minimal set and `‖A_Ω†‖ ≤ every upper bound` for the full set.
    pub fn sandwich_holds(&self) -> bool {
        self.lower_bound <= self.empirical_norm && self.empirical_norm_full <= self.tightest_upper()
    }
}

/// Everything the stability estimates have to say about one `(a, m, n)`.
pub fn stability_report(a: &Filter, m: usize, n: usize) -> Result<StabilityReport> {
    let full = full_omega(m);
    let minimal = minimal_omega(m);
    let coarse = coarse_len(a, m)?;
    Ok(StabilityReport {
        m,
        n,
        len: a.len(),
        grid: coarse,
        empirical_norm: empirical_pinv_norm(a, m, n, &minimal)?,
        empirical_norm_full: empirical_pinv_norm(a, m, n, &full)?,
        beta1: Some(bound_beta1(a, m, n, &full)?),
        beta2: bound_beta2(a, m, n, &full).ok(),
        beta3: bound_beta3(a, m, n, &full).ok(),
        lower_bound: lower_bound_stablow(a, m, n, &minimal)?,
        j_grid: j_grid(coarse, n),
        m_grid: m_grid(a.len(), m, n),
    })
}

/// Outcome of a Monte-Carlo noise experiment at one noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseTrial {
    pub sigma: f64,
    pub trials: usize,
    /// Sample mean of the RMS error `‖f − f̃‖/√L`.
    pub mean_error: f64,
    /// `‖A_Ω†‖·σ·m^{−1/2}`.
    pub bound: f64,
    pub pinv_norm: f64,
    pub ratio: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSetup<'a> {
    pub f: &'a Signal,
    pub a: &'a Filter,
    pub m: usize,
    pub n: usize,
    pub omega: &'a [usize],
    pub slack: f64,
}

/// Circular complex Gaussian noise of variance `σ²` per sample entry, seeded.
pub fn noise_trial(
    setup: &NoiseSetup<'_>,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<NoiseTrial> {
    let NoiseSetup {
        f,
        a,
        m,
        n,
        omega,
        slack,
    } = *setup;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let pinv_norm = empirical_pinv_norm(a, m, n, omega)?;
    let sampling = Sampling::extended(m, m, n, omega);
    let clean = forward(f, a, &sampling)?;
    let solver = ExtendedSolver::new(a, &sampling, ExtendedOptions::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = sigma / 2f64.sqrt();
    let rms = 1.0 / (f.len() as f64).sqrt();
    let mut total = 0.0;
    for _ in 0..trials {
        let noisy = clean.perturbed(|| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        });
        let rec = solver.solve(&noisy)?;
        total += rec.distance(f) * rms;
    }
    let mean_error = total / trials as f64;
    let bound = pinv_norm * sigma / (m as f64).sqrt();
    let ratio = if bound > 0.0 {
        mean_error / bound
    } else if mean_error > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(NoiseTrial {
        sigma,
        trials,
        mean_error,
        bound,
        pinv_norm,
        ratio,
        violated: mean_error > bound * (1.0 + slack) + 1e-12,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSweep {
    pub points: Vec<NoiseTrial>,
    /// Slope of the least-squares line `error ≈ intercept + slope·σ`.
    pub slope: f64,
    pub intercept: f64,
    /// Constant of the through-origin fit `error ≈ c·σ`.
    pub proportional: f64,
    /// `|slope − c| / c`.
    pub slope_deviation: f64,
}

/// Runs [`noise_trial`] at each level; level `i` uses seed `seed + i`.
pub fn noise_sweep(
    setup: &NoiseSetup<'_>,
    sigmas: &[f64],
    trials: usize,
    seed: u64,
) -> Result<NoiseSweep> {
    let points = sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| noise_trial(setup, sigma, trials, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let (slope, intercept, proportional) = linear_fits(&points);
    let slope_deviation = if proportional != 0.0 {
        ((slope - proportional) / proportional).abs()
    } else {
        0.0
    };
    Ok(NoiseSweep {
        points,
        slope,
        intercept,
        proportional,
        slope_deviation,
    })
}

fn linear_fits(points: &[NoiseTrial]) -> (f64, f64, f64) {
    let k = points.len() as f64;
    if points.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let sx: f64 = points.iter().map(|p| p.sigma).sum();
    let sy: f64 = points.iter().map(|p| p.mean_error).sum();
    let sxx: f64 = points.iter().map(|p| p.sigma * p.sigma).sum();
    let sxy: f64 = points.iter().map(|p| p.sigma * p.mean_error).sum();
    let proportional = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let denom = k * sxx - sx * sx;
    if points.len() < 2 || denom == 0.0 {
        return (proportional, 0.0, proportional);
    }
    let slope = (k * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / k;
    (slope, intercept, proportional)
}

/// Gautschi bound versus the SVD norm `‖A_m⁻¹‖ = 1/s_min` at every coarse
/// grid point; returns `(checked, violations)`. Coincident nodes make the
/// bound infinite.
pub fn gautschi_dominance(a: &Filter, m: usize) -> Result<(usize, Vec<usize>)> {
    let system = PlainSystem::new(a, m, m)?;
    let mut checked = 0;
    let mut violations = Vec::new();
    for rho in 0..system.grid_len() {
        let bound = match gautschi_bound(a, m, rho) {
            Ok(b) => b,
            Err(Error::CoincidentNodes { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let svd_norm = 1.0 / system.smin(rho)?;
        checked += 1;
        if svd_norm > bound * (1.0 + 1e-10) {
            violations.push(rho);
        }
    }
    Ok((checked, violations))
}

/// `‖M⁻¹‖` through an explicit inverse; used to check `1/s_min = ‖M⁻¹‖`.
pub fn inverse_norm(matrix: &CMatrix) -> Option<f64> {
    matrix
        .clone()
        .try_inverse()
        .map(|inv| linalg::spectral_norm(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system_has_unit_norm() {
        // m = n = 1 and no extras: A_Ω = (1/1)·[1]
        let a = Filter::heat(8, 0.5).unwrap();
        assert!((empirical_pinv_norm(&a, 1, 1, &[]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn more_extras_never_hurt() {
        let a = Filter::raised_cosine(3 * 36, 1.0).unwrap();
        let small = empirical_pinv_norm(&a, 3, 3, &[1]).unwrap();
        let large = empirical_pinv_norm(&a, 3, 3, &[0, 1, 2]).unwrap();
        assert!(large <= small * (1.0 + 1e-12));
    }

    #[test]
    fn gautschi_two_by_two() {
        let a = Filter::from_response(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let bound = gautschi_bound(&a, 2, 0).unwrap();
        assert!((bound - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        // [[1,1],[1,0]]⁻¹ = [[0,1],[1,−1]] has norm (1+√5)/2
        let inv = inverse_norm(&crate::system::build_plain(&a, 2, 2, 0).unwrap()).unwrap();
        assert!((inv - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(inv < bound);
    }

    #[test]
    fn gautschi_diverges_near_collision() {
        let a = Filter::raised_cosine(600, 1.0).unwrap();
        assert!(matches!(
            gautschi_bound(&a, 3, 0),
            Err(Error::CoincidentNodes { .. })
        ));
        let near = gautschi_bound(&a, 3, 1).unwrap();
        let far = gautschi_bound(&a, 3, 50).unwrap();
        assert!(near > 10.0 * far);
    }

    #[test]
    fn smin_reciprocal_is_inverse_norm() {
        let a = Filter::heat(60, 0.8).unwrap();
        let system = PlainSystem::new(&a, 3, 3).unwrap();
        for rho in [1, 5, 7, 13] {
            let mat = system.matrix(rho).unwrap();
            let via_inverse = inverse_norm(&mat).unwrap();
            let via_smin = 1.0 / linalg::smin(&mat);
            assert!((via_inverse - via_smin).abs() < 1e-10 * via_smin);
        }
    }

    #[test]
    fn hypotheses_are_enforced() {
        let a = Filter::raised_cosine(3 * 3 * 48, 1.0).unwrap();
        assert!(matches!(
            bound_beta1(&a, 3, 3, &[1]),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            bound_beta1(&a, 3, 4, &[0, 1, 2]),
            Err(Error::HypothesisViolated(_))
        ));
        let delta = Filter::delta(432).unwrap();
        assert!(matches!(
            bound_beta2(&delta, 3, 3, &[0, 1, 2]),
            Err(Error::HypothesisViolated(_))
        ));
        let loud = Filter::from_response(a.response().iter().map(|v| v * 2.0).collect()).unwrap();
        assert!(loud.is_symmetric_decreasing());
        assert!(matches!(
            bound_beta2(&loud, 3, 3, &[0, 1, 2]),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(bound_beta1(&loud, 3, 3, &[0, 1, 2]).is_ok());
    }

    #[test]
    fn beta1_at_least_n() {
        let a = Filter::heat(3 * 7 * 40, 0.5).unwrap();
        let b = bound_beta1(&a, 3, 7, &[0, 1, 2]).unwrap();
        assert!(b.beta >= 7.0);
    }

    #[test]
    fn gamma_matches_calculus() {
        // raised cosine p = 1: |â′(ξ)| = π sin 2πξ is smallest at ξ = 1/(4mn)
        for n in [3, 7, 15] {
            let m = 3;
            let a = Filter::raised_cosine(m * n * 40, 1.0).unwrap();
            let gamma = derivative_floor(&a, m, n).unwrap();
            let expected =
                std::f64::consts::PI * (2.0 * std::f64::consts::PI / (4 * m * n) as f64).sin();
            assert!((gamma - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn gamma_by_differences_for_tables() {
        let a = Filter::raised_cosine(3 * 3 * 400, 1.0).unwrap();
        let table = Filter::from_response(a.response().to_vec()).unwrap();
        let closed = derivative_floor(&a, 3, 3).unwrap();
        let diff = derivative_floor(&table, 3, 3).unwrap();
        assert!((closed - diff).abs() < 1e-3 * closed);
    }

    #[test]
    fn interval_grids() {
        // M = 24, n = 3: J = [2, 10] ∪ [14, 22]
        let j = j_grid(24, 3);
        assert_eq!(j, (2..=10).chain(14..=22).collect::<Vec<_>>());
        // L = 72, m = n = 3: M = [2, 34]
        assert_eq!(m_grid(72, 3, 3), (2..=34).collect::<Vec<_>>());
    }

    #[test]
    fn lower_bound_grid_and_trivial_cases() {
        let a = Filter::raised_cosine(3 * 20, 1.0).unwrap();
        assert_eq!(lower_bound_stablow(&a, 1, 3, &[]).unwrap(), 0.0);
        assert_eq!(
            lower_bound_stablow(&a, 3, 7, &[1]),
            Err(Error::GridMiss {
                numer: 1,
                denom: 7,
                grid: 20
            })
        );
        assert!(matches!(
            lower_bound_stablow(&a, 3, 5, &[1, 2]),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn interlacing_holds() {
        let a = Filter::raised_cosine(3 * 3 * 16, 1.0).unwrap();
        for rho in 0..16 {
            let (lhs, rhs) = interlacing_check(&a, 3, 3, &[1], rho).unwrap();
            assert!(
                lhs <= rhs * (1.0 + 1e-10) + 1e-15,
                "rho {rho}: {lhs} > {rhs}"
            );
        }
    }

    #[test]
    fn noiseless_trial_is_exact() {
        let len = 3 * 3 * 16;
        let a = Filter::raised_cosine(len, 1.0).unwrap();
        let f = Signal::new(
            (0..len)
                .map(|k| Complex64::new((k as f64).sin(), 0.0))
                .collect(),
        )
        .unwrap();
        let setup = NoiseSetup {
            f: &f,
            a: &a,
            m: 3,
            n: 3,
            omega: &[1],
            slack: NOISE_SLACK,
        };
        let trial = noise_trial(&setup, 0.0, 3, 1).unwrap();
        assert!(trial.mean_error <= 1e-8 * f.norm());
        assert!(!trial.violated);
    }
}
