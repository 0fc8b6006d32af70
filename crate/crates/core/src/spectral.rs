//! Periodic signals and the discrete Fourier machinery they live on.
//!
//! A [`Signal`] of length `L` stands in for a sequence on the integers with
//! period `L`. Its [`Spectrum`] uses the unnormalized forward transform
//!
//! ```text
//! x̂(r) = Σ_k x(k) · exp(−2πi·kr/L),   r = 0..L−1
//! ```
//!
//! so that index `r` corresponds to the frequency `r/L` on the torus `[0, 1)`.
//! Every frequency formula elsewhere in the crate is written against this
//! convention.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// A finite periodic complex sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<Complex64>,
}

/// DFT coefficients of a [`Signal`] under the crate's transform convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

fn check_values(values: &[Complex64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidSignal("length must be at least 1".into()));
    }
    if let Some(i) = values
        .iter()
        .position(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::InvalidSignal(format!(
            "non-finite value at index {i}"
        )));
    }
    Ok(())
}

impl Signal {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_values(&values)?;
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); len.max(1)],
        }
    }

    /// Unit impulse at index 0.
    pub fn delta(len: usize) -> Self {
        let mut s = Self::zeros(len);
        s.values[0] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    /// `‖self − other‖`; panics on length mismatch.
    pub fn distance(&self, other: &Signal) -> f64 {
        assert_eq!(self.len(), other.len(), "signal lengths differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − reference‖ / ‖reference‖`, or the plain distance when the reference is zero.
    pub fn relative_error(&self, reference: &Signal) -> f64 {
        let d = self.distance(reference);
        let scale = reference.norm();
        if scale > 0.0 {
            d / scale
        } else {
            d
        }
    }
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_values(&values)?;
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    /// Quadrature of the `L²(𝕋)` norm on the grid: `(Σ|s(r)|² / L)^{1/2}`.
    pub fn torus_norm(&self) -> f64 {
        self.norm() / (self.len() as f64).sqrt()
    }
}

pub(crate) fn l2_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Discretization of the torus: `ξ_r = r/L`, `r = 0..L−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    len: usize,
}

impl FrequencyGrid {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter(
                "grid length must be positive".into(),
            ));
        }
        Ok(Self { len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, r: usize) -> f64 {
        r as f64 / self.len as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |r| self.point(r))
    }

    /// Grid index of `numer/denom`, if that fraction lies exactly on the grid.
    pub fn index_of(&self, numer: usize, denom: usize) -> Option<usize> {
        let scaled = numer * self.len;
        (denom > 0 && scaled.is_multiple_of(denom)).then(|| (scaled / denom) % self.len)
    }
}

pub(crate) fn fft_in_place(values: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(values.len())
    } else {
        planner.plan_fft_forward(values.len())
    };
    plan.process(values);
}

pub fn dft(x: &Signal) -> Spectrum {
    let mut values = x.values.clone();
    fft_in_place(&mut values, false);
    Spectrum { values }
}

pub fn idft(s: &Spectrum) -> Signal {
    let mut values = s.values.clone();
    fft_in_place(&mut values, true);
    let scale = 1.0 / values.len() as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    Signal { values }
}

fn require_divides(len: usize, factor: usize) -> Result<()> {
    if factor == 0 || !len.is_multiple_of(factor) {
        return Err(Error::NonDivisibleLength { len, factor });
    }
    Ok(())
}

/// `(S_m x)(k) = x(mk)`.
pub fn subsample(x: &Signal, m: usize) -> Result<Signal> {
    require_divides(x.len(), m)?;
    let values = x.values.iter().step_by(m).copied().collect();
    Ok(Signal { values })
}

/// Frequency side of subsampling: `(1/m) Σ_l s(ρ + l·L/m)`, one value per
/// coarse index `ρ`. Equals `dft(subsample(x, m))` when `s = dft(x)`.
pub fn alias_sum(s: &Spectrum, m: usize) -> Result<Spectrum> {
    require_divides(s.len(), m)?;
    let coarse = s.len() / m;
    let values = (0..coarse)
        .map(|rho| {
            (0..m)
                .map(|l| s.values[rho + l * coarse])
                .sum::<Complex64>()
                / m as f64
        })
        .collect();
    Ok(Spectrum { values })
}

/// Circular right shift: `(T_c x)(k) = x(k − c)`, with `c` taken mod `L`.
pub fn shift(x: &Signal, c: i64) -> Signal {
    let len = x.len() as i64;
    let c = c.rem_euclid(len) as usize;
    let mut values = x.values.clone();
    values.rotate_right(c);
    Signal { values }
}

/// Phase factor picked up by a shift: `dft(shift(x, c))(r) = shift_phase(c, r, L) · dft(x)(r)`.
pub fn shift_phase(c: i64, r: usize, len: usize) -> Complex64 {
    let turns = (c.rem_euclid(len as i64) as usize * r) % len;
    Complex64::from_polar(1.0, -2.0 * PI * turns as f64 / len as f64)
}

/// Frequency folding: component `l` at `ρ` is `s(ρ + l·L/m) / √m`.
///
/// Each component lives on a grid of `L/m` points, so under the grid
/// quadrature of `L²(𝕋)` folding is an isometry:
/// `Σ_l torus_norm(component_l)² = torus_norm(s)²`.
pub fn fold(s: &Spectrum, m: usize) -> Result<Vec<Spectrum>> {
    require_divides(s.len(), m)?;
    let coarse = s.len() / m;
    let scale = 1.0 / (m as f64).sqrt();
    Ok((0..m)
        .map(|l| Spectrum {
            values: s.values[l * coarse..(l + 1) * coarse]
                .iter()
                .map(|v| v * scale)
                .collect(),
        })
        .collect())
}

/// Inverse of [`fold`].
pub fn unfold(components: &[Spectrum]) -> Result<Spectrum> {
    let m = components.len();
    if m == 0 {
        return Err(Error::InvalidParameter("no components to unfold".into()));
    }
    let coarse = components[0].len();
    if let Some(c) = components.iter().find(|c| c.len() != coarse) {
        return Err(Error::LengthMismatch {
            expected: coarse,
            got: c.len(),
        });
    }
    let scale = (m as f64).sqrt();
    Ok(Spectrum {
        values: components
            .iter()
            .flat_map(|c| c.values.iter().map(move |v| v * scale))
            .collect(),
    })
}
