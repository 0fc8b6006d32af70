//! Dynamical sampling in a shift-invariant space `V(φ) = {Σ_k c_k φ(· − k)}`.
//!
//! The coefficient sequence `c` is `L`-periodic, the evolution acts on the
//! real line through a continuous-frequency filter `â(ω)`, and samples are
//! taken at integers. At integer points `a^j ∗ f = c ∗ Φ_j` with
//! `Φ̂_j(ξ) = Σ_k â(ξ + k)^j φ̂(ξ + k)`, so the discrete machinery applies with
//! `Φ̂_j` in place of `â^j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::FilterKind;
use crate::reconstruct::{solve_extended, solve_plain, ExtendedOptions, SampleSet, Sampling};
use crate::spectral::{dft, fft_in_place, Signal};
use crate::system::{PlainSystem, SpectralModel, SINGULAR_TOL};

/// Default periodization half-width `K`.
pub const DEFAULT_TRUNCATION: usize = 512;
/// Default number of synthesis samples per unit length.
pub const DEFAULT_OVERSAMPLE: usize = 16;
/// Largest accepted relative size of the `|k| = K` periodization terms.
pub const TAIL_THRESHOLD: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Generator `φ` of the shift-invariant space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `φ̂ = χ_[−1/2, 1/2)`.
    Sinc,
    /// Centered B-spline of the given degree, `φ̂(ω) = sinc(ω)^{order+1}`.
    Bspline { order: usize },
}

impl Generator {
    pub fn fourier(&self, omega: f64) -> f64 {
        match *self {
            Generator::Sinc => {
                if (-0.5..0.5).contains(&omega) {
                    1.0
                } else {
                    0.0
                }
            }
            Generator::Bspline { order } => sinc(omega).powi(order as i32 + 1),
        }
    }

    /// Half-width of the support in time, if compact.
    fn support(&self) -> Option<f64> {
        match *self {
            Generator::Sinc => None,
            Generator::Bspline { order } => Some((order + 1) as f64 / 2.0),
        }
    }

    /// Time-domain value of a compactly supported generator.
    pub fn eval(&self, x: f64) -> Option<f64> {
        match *self {
            Generator::Sinc => None,
            Generator::Bspline { order } => Some(bspline(order, x)),
        }
    }
}

/// `sin(πω)/(πω)`, with the argument reduced so large `ω` stay accurate.
fn sinc(omega: f64) -> f64 {
    if omega == 0.0 {
        return 1.0;
    }
    let whole = omega.round();
    let frac = omega - whole;
    let sign = if (whole as i64) % 2 == 0 { 1.0 } else { -1.0 };
    sign * (PI * frac).sin() / (PI * omega)
}

/// Centered B-spline of degree `order`:
/// `(1/order!) Σ_{k=0}^{order+1} (−1)^k C(order+1, k) (x + (order+1)/2 − k)_+^order`.
fn bspline(order: usize, x: f64) -> f64 {
    let half = (order + 1) as f64 / 2.0;
    if x.abs() >= half {
        return 0.0;
    }
    let mut binom = 1.0;
    let mut factorial = 1.0;
    for i in 1..=order {
        factorial *= i as f64;
    }
    let mut sum = 0.0;
    for k in 0..=order + 1 {
        let t = x + half - k as f64;
        if t > 0.0 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binom * t.powi(order as i32);
        }
        binom = binom * (order + 1 - k) as f64 / (k + 1) as f64;
    }
    sum / factorial
}

/// Evolution filter on the real line, given by its response `â(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineFilter {
    /// `â ≡ 1`.
    Delta,
    /// A 1-periodic response taken from a discrete filter kind.
    Periodic { filter: FilterKind },
    /// `â(ω) = exp(−t(2πω)²)`.
    Gaussian { t: f64 },
}

impl LineFilter {
    pub fn validate(&self) -> Result<()> {
        match self {
            LineFilter::Periodic {
                filter: FilterKind::Table { .. },
            } => Err(Error::InvalidParameter(
                "a table filter has no values off its grid".into(),
            )),
            LineFilter::Gaussian { t } if !(t.is_finite() && *t >= 0.0) => Err(
                Error::InvalidParameter(format!("gaussian width t = {t} must be finite and >= 0")),
            ),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        match self {
            LineFilter::Delta => Complex64::new(1.0, 0.0),
            LineFilter::Periodic { filter } => filter.eval(omega).unwrap_or(ZERO),
            LineFilter::Gaussian { t } => {
                Complex64::new((-t * (2.0 * PI * omega).powi(2)).exp(), 0.0)
            }
        }
    }
}

/// Representative of `r/L` in `[−1/2, 1/2)`.
fn centered(r: usize, len: usize) -> f64 {
    let r = r % len;
    if 2 * r >= len {
        r as f64 / len as f64 - 1.0
    } else {
        r as f64 / len as f64
    }
}

/// `Φ̂_j` on the `L`-point grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodized {
    pub values: Vec<Complex64>,
    /// Largest `|k| = K` contribution relative to `max |Φ̂_j|`.
    pub tail: f64,
}

/// `Φ̂_j(r/L) = Σ_{|k|≤K} â(ξ + k)^j φ̂(ξ + k)` with `ξ` the representative of
/// `r/L` in `[−1/2, 1/2)`.
pub fn periodize_phi(
    gen: &Generator,
    a: &LineFilter,
    power: usize,
    len: usize,
    truncation: usize,
) -> Result<Periodized> {
    a.validate()?;
    if len == 0 {
        return Err(Error::InvalidParameter(
            "grid length must be positive".into(),
        ));
    }
    if truncation == 0 {
        return Err(Error::InvalidParameter(
            "truncation K must be at least 1".into(),
        ));
    }
    let term = |omega: f64| a.eval(omega).powu(power as u32) * gen.fourier(omega);
    let big_k = truncation as i64;
    let mut values = Vec::with_capacity(len);
    let mut edge: f64 = 0.0;
    for r in 0..len {
        let xi = centered(r, len);
        let mut sum = ZERO;
        for k in -big_k..=big_k {
            sum += term(xi + k as f64);
        }
        edge = edge.max(term(xi + big_k as f64).norm() + term(xi - big_k as f64).norm());
        values.push(sum);
    }
    let top = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tail = if top > 0.0 { edge / top } else { 0.0 };
    if tail > TAIL_THRESHOLD {
        return Err(Error::TailTooLarge {
            tail,
            threshold: TAIL_THRESHOLD,
            k: truncation,
        });
    }
    Ok(Periodized { values, tail })
}

/// Range `(min, max)` of `Σ_{|k|≤K} |φ̂(ξ + k)|²` over the grid.
pub fn riesz_bounds(gen: &Generator, len: usize, truncation: usize) -> (f64, f64) {
    let big_k = truncation as i64;
    (0..len)
        .map(|r| {
            let xi = centered(r, len);
            (-big_k..=big_k)
                .map(|k| gen.fourier(xi + k as f64).powi(2))
                .sum::<f64>()
        })
        .fold((f64::INFINITY, 0.0), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Spectral model whose row `j` holds `Φ̂_j` and whose extra samples see `Φ̂_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SisModel {
    phi: Vec<Vec<Complex64>>,
    tail: f64,
}

impl SisModel {
    /// Periodizes `Φ̂_j` for `j = 0..powers`.
    pub fn new(
        gen: &Generator,
        a: &LineFilter,
        len: usize,
        powers: usize,
        truncation: usize,
    ) -> Result<Self> {
        let mut phi = Vec::with_capacity(powers.max(1));
        let mut tail: f64 = 0.0;
        for j in 0..powers.max(1) {
            let p = periodize_phi(gen, a, j, len, truncation)?;
            tail = tail.max(p.tail);
            phi.push(p.values);
        }
        Ok(Self { phi, tail })
    }

    pub fn phi(&self, power: usize) -> &[Complex64] {
        &self.phi[power]
    }

    pub fn powers(&self) -> usize {
        self.phi.len()
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }
}

impl SpectralModel for SisModel {
    fn grid_len(&self) -> usize {
        self.phi[0].len()
    }

    fn row_entry(&self, power: usize, r: usize) -> Complex64 {
        self.phi[power][r]
    }

    fn extra_weight(&self, r: usize) -> Complex64 {
        self.phi[0][r]
    }
}

/// `m × m` matrices `Ã_m(ξ)` with entry `(j, l) = Φ̂_j((ξ + l)/m)`.
pub fn build_sis_system(
    gen: &Generator,
    a: &LineFilter,
    len: usize,
    m: usize,
    truncation: usize,
) -> Result<SisModel> {
    crate::system::require_divides(len, m)?;
    SisModel::new(gen, a, len, m, truncation)
}

/// Coarse frequencies `ξ = ρ/(L/m)` at which `Ã_m(ξ)` is numerically singular.
pub fn sis_singular_scan(model: &SisModel, m: usize) -> Result<Vec<f64>> {
    let system = PlainSystem::new(model, m, m)?;
    let coarse = system.grid_len() as f64;
    Ok(system
        .singular_set(SINGULAR_TOL)?
        .into_iter()
        .map(|rho| rho as f64 / coarse)
        .collect())
}

/// Outcome of [`reducibility_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Reducibility {
    /// `â(ξ + k) = b̂(ξ)` wherever `φ̂(ξ + k) ≠ 0`; values on the grid, zero where `φ̂` vanishes everywhere.
    Reducible { b_hat: Vec<[f64; 2]> },
    /// `â(xi + k) ≠ â(xi + k_ref)` although `φ̂` is nonzero at both.
    Irreducible { xi: f64, k_ref: i64, k: i64 },
}

/// Decides whether the problem reduces to one on `ℓ²(ℤ)` with a single
/// filter `b̂`, scanning `k = 0, 1, −1, 2, −2, …` up to `K`.
pub fn reducibility_check(
    gen: &Generator,
    a: &LineFilter,
    len: usize,
    truncation: usize,
    tol: f64,
) -> Result<Reducibility> {
    a.validate()?;
    let order = std::iter::once(0).chain((1..=truncation as i64).flat_map(|k| [k, -k]));
    let scan: Vec<i64> = order.collect();
    let mut b_hat = Vec::with_capacity(len);
    for r in 0..len {
        let xi = centered(r, len);
        let mut reference: Option<(i64, Complex64)> = None;
        for &k in &scan {
            let omega = xi + k as f64;
            if gen.fourier(omega).abs() <= tol {
                continue;
            }
            let value = a.eval(omega);
            match reference {
                None => reference = Some((k, value)),
                Some((k_ref, b)) => {
                    if (value - b).norm() > tol * b.norm().max(1.0) {
                        return Ok(Reducibility::Irreducible { xi, k_ref, k });
                    }
                }
            }
        }
        let b = reference.map_or(ZERO, |(_, b)| b);
        b_hat.push([b.re, b.im]);
    }
    Ok(Reducibility::Reducible { b_hat })
}

/// Default grid tolerance `1/(2L)` for [`choose_n`].
pub fn grid_tolerance(len: usize) -> f64 {
    1.0 / (2 * len) as f64
}

/// True when no pairwise difference of `singular` lies within `tol` of any
/// `k/n`, `k = 1..n−1`.
pub fn separates(singular: &[f64], n: usize, tol: f64) -> bool {
    pairwise_differences(singular)
        .iter()
        .all(|&d| (1..n).all(|k| (d - k as f64 / n as f64).abs() > tol))
}

fn pairwise_differences(singular: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, &x) in singular.iter().enumerate() {
        for &y in &singular[i + 1..] {
            out.push((x - y).abs());
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Smallest `n` in `n_min..=n_max` with [`separates`]. Every `n` passes when
/// there is at most one singular frequency, so `n_min` selects how much
/// coupling is wanted.
pub fn choose_n(singular: &[f64], n_min: usize, n_max: usize, tol: f64) -> Result<usize> {
    (n_min.max(1)..=n_max)
        .find(|&n| separates(singular, n, tol))
        .ok_or_else(|| Error::NotFound {
            n_max,
            differences: pairwise_differences(singular),
        })
}

/// Accuracy knobs of the shift-invariant pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SisOptions {
    /// Periodization half-width `K`.
    pub truncation: usize,
    /// Synthesis samples per unit length.
    pub oversample: usize,
    /// Skip the `Ω ⊇ {1, …, m−1}` requirement.
    pub force: bool,
}

impl Default for SisOptions {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            oversample: DEFAULT_OVERSAMPLE,
            force: false,
        }
    }
}

/// Fine samples `f(i/P)`, `i = 0..LP`, of `f = Σ_k c_k φ(· − k)` summed in time.
fn sample_compact(coeffs: &Signal, gen: &Generator, oversample: usize) -> Vec<Complex64> {
    let len = coeffs.len();
    let half = gen.support().expect("compact generator");
    let c = coeffs.values();
    (0..len * oversample)
        .map(|i| {
            let x = i as f64 / oversample as f64;
            let lo = (x - half).ceil() as i64;
            let hi = (x + half).floor() as i64;
            (lo..=hi)
                .map(|j| {
                    c[j.rem_euclid(len as i64) as usize]
                        * gen.eval(x - j as f64).expect("compact generator")
                })
                .sum()
        })
        .collect()
}

/// Fine samples of `a^l ∗ f` from the Fourier series of `f`, whose
/// coefficient at frequency `s/L` is `ĉ(s mod L)·φ̂(s/L)`. Frequencies that
/// alias onto one fine index are summed up to `|s/L| ≈ K`.
fn sample_spectral(
    c_hat: &[Complex64],
    gen: &Generator,
    a: &LineFilter,
    power: usize,
    oversample: usize,
    truncation: usize,
) -> Vec<Complex64> {
    let len = c_hat.len();
    let fine = len * oversample;
    let p = oversample as f64;
    let aliases = truncation.div_ceil(oversample) as i64;
    let mut values: Vec<Complex64> = (0..fine)
        .map(|s| {
            // index s carries frequency s/L, taken in [−P/2, P/2)
            let base = centered(s, fine) * p;
            let weight: Complex64 = (-aliases..=aliases)
                .map(|j| {
                    let omega = base + j as f64 * p;
                    a.eval(omega).powu(power as u32) * gen.fourier(omega)
                })
                .sum();
            c_hat[s % len] * weight * p
        })
        .collect();
    fft_in_place(&mut values, true);
    let scale = 1.0 / fine as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    values
}

/// Samples `y_l(k) = (a^l ∗ f)(mk)` and `extras[c](k) = f(mnk − c)` of
/// `f = Σ_k c_k φ(· − k)`, computed on the fine grid `x = i/P`.
///
/// The initial signal of a compactly supported generator is summed in time;
/// evolved signals come from the Fourier series of `f`.
pub fn sis_forward(
    coeffs: &Signal,
    gen: &Generator,
    a: &LineFilter,
    sampling: &Sampling,
    options: &SisOptions,
) -> Result<SampleSet> {
    a.validate()?;
    let len = coeffs.len();
    let Sampling {
        m,
        rows,
        n,
        ref omega,
    } = *sampling;
    if m == 0 || rows == 0 || n == 0 || options.oversample == 0 || options.truncation == 0 {
        return Err(Error::InvalidParameter(
            "m, N, n, the oversampling factor and K must be positive".into(),
        ));
    }
    crate::system::require_divides(len, m)?;
    if !omega.is_empty() {
        crate::system::require_divides(len, m * n)?;
    }
    let p = options.oversample;
    let c_hat = dft(coeffs);
    let synth = |power: usize| match gen.support() {
        Some(_) if power == 0 || *a == LineFilter::Delta => sample_compact(coeffs, gen, p),
        _ => sample_spectral(c_hat.values(), gen, a, power, p, options.truncation),
    };
    let at_integers = |values: &[Complex64], step: usize, offset: i64| -> Result<Signal> {
        Signal::new(
            (0..len / step)
                .map(|k| {
                    values[(step as i64 * k as i64 - offset).rem_euclid(len as i64) as usize * p]
                })
                .collect(),
        )
    };
    let base = synth(0);
    let mut y = Vec::with_capacity(rows);
    y.push(at_integers(&base, m, 0)?);
    for l in 1..rows {
        y.push(at_integers(&synth(l), m, 0)?);
    }
    let extras = omega
        .iter()
        .map(|&c| Ok((c, at_integers(&base, m * n, c as i64)?)))
        .collect::<Result<_>>()?;
    Ok(SampleSet {
        m,
        n,
        omega: omega.clone(),
        y,
        extras,
    })
}

/// Recovers the coefficient sequence `c` from shift-invariant samples.
pub fn sis_reconstruct(
    samples: &SampleSet,
    gen: &Generator,
    a: &LineFilter,
    options: &SisOptions,
) -> Result<Signal> {
    let m = samples.m;
    let model = SisModel::new(
        gen,
        a,
        samples.signal_len(),
        samples.rows(),
        options.truncation,
    )?;
    if samples.omega.is_empty() && samples.n == 1 {
        return solve_plain(&model, samples);
    }
    if !options.force {
        if let Some(c) = (1..m).find(|c| !samples.omega.contains(c)) {
            return Err(Error::PreconditionViolated(format!(
                "omega must contain 1..=m-1; shift {c} is missing"
            )));
        }
    }
    solve_extended(&model, samples, ExtendedOptions { force: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBIC: Generator = Generator::Bspline { order: 3 };

    #[test]
    fn bspline_matches_fourier_at_integers() {
        // Σ_k β(k) e^{−2πikξ} = Σ_k φ̂(ξ + k)
        let len = 16;
        let p = periodize_phi(&CUBIC, &LineFilter::Delta, 0, len, 512).unwrap();
        for r in 0..len {
            let xi = r as f64 / len as f64;
            let direct: Complex64 = (-2..=2)
                .map(|k: i64| {
                    Complex64::from_polar(bspline(3, k as f64), -2.0 * PI * k as f64 * xi)
                })
                .sum();
            assert!((p.values[r] - direct).norm() < 1e-9, "r = {r}");
            assert!(p.values[r].re > 0.0);
        }
    }

    #[test]
    fn cubic_values() {
        assert!((bspline(3, 0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((bspline(3, 1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(bspline(3, 2.0), 0.0);
        assert!((bspline(1, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sinc_is_exact_at_large_arguments() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(1e6).abs() < 1e-20);
        assert!((sinc(1e6 + 0.5) - 1.0 / (PI * (1e6 + 0.5))).abs() < 1e-18);
    }

    #[test]
    fn sinc_periodization_is_the_filter() {
        let a = LineFilter::Gaussian { t: 0.05 };
        let len = 12;
        let p = periodize_phi(&Generator::Sinc, &a, 2, len, 8).unwrap();
        for r in 0..len {
            let expected = a.eval(centered(r, len)).powu(2);
            assert!((p.values[r] - expected).norm() < 1e-15);
        }
        assert_eq!(p.tail, 0.0);
    }

    #[test]
    fn interpolating_generator_gives_delta() {
        // linear B-spline: φ(k) = δ_k, Φ̂_0 ≡ 1 once the tail is small enough
        let p = periodize_phi(
            &Generator::Bspline { order: 1 },
            &LineFilter::Delta,
            0,
            8,
            8,
        );
        assert!(matches!(p, Err(Error::TailTooLarge { .. })));
        let p = periodize_phi(
            &Generator::Bspline { order: 7 },
            &LineFilter::Delta,
            0,
            8,
            512,
        )
        .unwrap();
        for v in &p.values {
            assert!(v.re > 0.0);
        }
    }

    #[test]
    fn tails_shrink_with_truncation() {
        let tails: Vec<f64> = [16, 64, 256, 1024]
            .into_iter()
            .map(|k| {
                let len = 8;
                let big_k = k as f64;
                (0..len)
                    .map(|r| {
                        let xi = centered(r, len);
                        CUBIC.fourier(xi + big_k).abs() + CUBIC.fourier(xi - big_k).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(tails.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn riesz_surrogate() {
        assert_eq!(riesz_bounds(&Generator::Sinc, 10, 4), (1.0, 1.0));
        let (lo, hi) = riesz_bounds(&CUBIC, 32, 256);
        assert!(lo > 0.0 && hi <= 1.0 + 1e-12);
    }

    #[test]
    fn reducibility_examples() {
        let gauss = LineFilter::Gaussian {
            t: 1.0 / (4.0 * PI * PI),
        };
        assert!(matches!(
            reducibility_check(&Generator::Sinc, &gauss, 8, 16, 1e-12).unwrap(),
            Reducibility::Reducible { .. }
        ));
        assert_eq!(
            reducibility_check(&CUBIC, &gauss, 4, 16, 1e-12).unwrap(),
            Reducibility::Irreducible {
                xi: 0.25,
                k_ref: 0,
                k: 1
            }
        );
        match reducibility_check(&CUBIC, &LineFilter::Delta, 4, 16, 1e-12).unwrap() {
            Reducibility::Reducible { b_hat } => assert!(b_hat.iter().all(|b| *b == [1.0, 0.0])),
            other => panic!("{other:?}"),
        }
        let periodic = LineFilter::Periodic {
            filter: FilterKind::RaisedCosine { p: 1.0 },
        };
        assert!(matches!(
            reducibility_check(&CUBIC, &periodic, 8, 16, 1e-12).unwrap(),
            Reducibility::Reducible { .. }
        ));
    }

    #[test]
    fn choose_n_examples() {
        let tol = grid_tolerance(120);
        assert_eq!(choose_n(&[0.0], 1, 10, tol).unwrap(), 1);
        assert_eq!(choose_n(&[0.0, 0.5], 2, 10, tol).unwrap(), 3);
        for n in [3, 5, 7, 9] {
            assert!(separates(&[0.0, 0.5], n, tol));
        }
        assert!(!separates(&[0.0, 0.5], 4, tol));
        assert_eq!(choose_n(&[0.0, 1.0 / 3.0, 0.5], 2, 10, tol).unwrap(), 5);
        match choose_n(&[0.0, 0.5], 2, 2, tol) {
            Err(Error::NotFound {
                n_max: 2,
                differences,
            }) => assert_eq!(differences, vec![0.5]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symmetric_system_singular_at_zero_and_half() {
        let model =
            build_sis_system(&CUBIC, &LineFilter::Gaussian { t: 0.02 }, 48, 3, 512).unwrap();
        let singular = sis_singular_scan(&model, 3).unwrap();
        assert!(
            singular.contains(&0.0) && singular.contains(&0.5),
            "{singular:?}"
        );
    }

    #[test]
    fn one_by_one_system() {
        let model = build_sis_system(&CUBIC, &LineFilter::Delta, 8, 1, 512).unwrap();
        assert!(sis_singular_scan(&model, 1).unwrap().is_empty());
    }

    #[test]
    fn time_and_frequency_synthesis_agree() {
        let c = Signal::new(
            (0..24)
                .map(|k| Complex64::new((k as f64 * 0.7).cos(), (k as f64).sin()))
                .collect(),
        )
        .unwrap();
        let time = sample_compact(&c, &CUBIC, 4);
        let freq = sample_spectral(dft(&c).values(), &CUBIC, &LineFilter::Delta, 0, 4, 2048);
        let err = time
            .iter()
            .zip(&freq)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let sampling = Sampling::extended(3, 3, 3, &[1, 2]);
        let c = Signal::zeros(36);
        let a = LineFilter::Gaussian { t: 0.02 };
        let opts = SisOptions::default();
        let samples = sis_forward(&c, &CUBIC, &a, &sampling, &opts).unwrap();
        assert!(samples.stacked().iter().all(|v| *v == ZERO));
        let rec = sis_reconstruct(&samples, &CUBIC, &a, &opts).unwrap();
        assert!(rec.norm() == 0.0);
    }

    #[test]
    fn missing_extras_rejected() {
        let sampling = Sampling::extended(3, 3, 3, &[1]);
        let c = Signal::delta(36);
        let a = LineFilter::Gaussian { t: 0.02 };
        let opts = SisOptions::default();
        let samples = sis_forward(&c, &CUBIC, &a, &sampling, &opts).unwrap();
        assert!(matches!(
            sis_reconstruct(&samples, &CUBIC, &a, &opts),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
