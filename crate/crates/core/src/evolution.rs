//! Evolution filters, stored by their frequency response on the `L`-point grid.
//!
//! One time step maps `f` to `a ∗ f`; in frequency this is pointwise
//! multiplication by `â`, so `l` steps multiply by `â^l`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{dft, idft, Signal, Spectrum};

/// Ties closer than this count as violations of strict monotonicity.
pub const STRICT_DECREASE_TOL: f64 = 1e-14;

/// JSON-loadable description of a filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterKind {
    /// `â ≡ 1`.
    Delta,
    /// `â(ξ) = ((1 + cos 2πξ)/2)^p`.
    RaisedCosine { p: f64 },
    /// `â(ξ) = exp(−t·(2 sin πξ)²)`, the lattice heat kernel.
    Heat { t: f64 },
    /// `â(ξ) = e^{−2πiξ}(2 + cos 2πξ)/3`: no two nodes of `A_m(ξ)` ever coincide.
    PhaseRamp,
    /// Explicit response values `[re, im]` on the grid.
    Table { response: Vec<[f64; 2]> },
}

impl FilterKind {
    /// Closed-form response at an arbitrary frequency, when one exists.
    pub fn eval(&self, xi: f64) -> Option<Complex64> {
        let v = match *self {
            FilterKind::Delta => Complex64::new(1.0, 0.0),
            FilterKind::RaisedCosine { p } => Complex64::new(raised_cosine(xi, p), 0.0),
            FilterKind::Heat { t } => Complex64::new(heat(xi, t), 0.0),
            FilterKind::PhaseRamp => {
                Complex64::from_polar((2.0 + (2.0 * PI * xi).cos()) / 3.0, -2.0 * PI * xi)
            }
            FilterKind::Table { .. } => return None,
        };
        Some(v)
    }

    /// Closed-form derivative `â′(ξ)` for the real kinds.
    pub fn derivative(&self, xi: f64) -> Option<f64> {
        match *self {
            FilterKind::Delta => Some(0.0),
            FilterKind::RaisedCosine { p } => {
                let base = (1.0 + (2.0 * PI * xi).cos()) / 2.0;
                Some(-p * base.powf(p - 1.0) * PI * (2.0 * PI * xi).sin())
            }
            FilterKind::Heat { t } => Some(-4.0 * PI * t * (2.0 * PI * xi).sin() * heat(xi, t)),
            FilterKind::PhaseRamp | FilterKind::Table { .. } => None,
        }
    }
}

fn raised_cosine(xi: f64, p: f64) -> f64 {
    ((1.0 + (2.0 * PI * xi).cos()) / 2.0).max(0.0).powf(p)
}

fn heat(xi: f64, t: f64) -> f64 {
    let s = 2.0 * (PI * xi).sin();
    (-t * s * s).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    kind: FilterKind,
    response: Vec<Complex64>,
    symmetric_decreasing: bool,
}

impl Filter {
    pub fn delta(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter(
                "filter length must be positive".into(),
            ));
        }
        Ok(Self {
            kind: FilterKind::Delta,
            response: vec![Complex64::new(1.0, 0.0); len],
            symmetric_decreasing: false,
        })
    }

    pub fn raised_cosine(len: usize, p: f64) -> Result<Self> {
        if len < 2 || !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "raised cosine needs L >= 2 and p > 0 (got L = {len}, p = {p})"
            )));
        }
        Ok(Self::symmetric(FilterKind::RaisedCosine { p }, len, |xi| {
            raised_cosine(xi, p)
        }))
    }

    pub fn heat(len: usize, t: f64) -> Result<Self> {
        if len < 2 || !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "heat filter needs L >= 2 and t > 0 (got L = {len}, t = {t})"
            )));
        }
        Ok(Self::symmetric(FilterKind::Heat { t }, len, |xi| {
            heat(xi, t)
        }))
    }

    pub fn phase_ramp(len: usize) -> Result<Self> {
        Self::from_kind(&FilterKind::PhaseRamp, len)
    }

    /// Builds a filter from explicit response values. The symmetric-decreasing
    /// flag is derived from the values.
    pub fn from_response(response: Vec<Complex64>) -> Result<Self> {
        let kind = FilterKind::Table {
            response: response.iter().map(|v| [v.re, v.im]).collect(),
        };
        Self::from_kind(&kind, response.len())
    }

    pub fn from_kind(kind: &FilterKind, len: usize) -> Result<Self> {
        let filter = match kind {
            FilterKind::Delta => Self::delta(len)?,
            FilterKind::RaisedCosine { p } => Self::raised_cosine(len, *p)?,
            FilterKind::Heat { t } => Self::heat(len, *t)?,
            FilterKind::PhaseRamp => {
                if len == 0 {
                    return Err(Error::InvalidParameter(
                        "filter length must be positive".into(),
                    ));
                }
                let response = (0..len)
                    .map(|r| kind.eval(r as f64 / len as f64).expect("closed form"))
                    .collect();
                Self {
                    kind: kind.clone(),
                    response,
                    symmetric_decreasing: false,
                }
            }
            FilterKind::Table { response } => {
                if response.len() != len {
                    return Err(Error::LengthMismatch {
                        expected: len,
                        got: response.len(),
                    });
                }
                let response: Vec<Complex64> = response
                    .iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect();
                Spectrum::new(response.clone())?;
                let mut filter = Self {
                    kind: kind.clone(),
                    response,
                    symmetric_decreasing: false,
                };
                filter.symmetric_decreasing = check_symmetric_decreasing(&filter).holds;
                filter
            }
        };
        Ok(filter)
    }

    /// Samples `profile` on `[0, 1/2]` and mirrors it, so `â(r) = â(L−r)` holds bit-exactly.
    fn symmetric(kind: FilterKind, len: usize, profile: impl Fn(f64) -> f64) -> Self {
        let mut response = vec![Complex64::new(0.0, 0.0); len];
        for r in 0..=len / 2 {
            let v = Complex64::new(profile(r as f64 / len as f64), 0.0);
            response[r] = v;
            response[(len - r) % len] = v;
        }
        Self {
            kind,
            response,
            symmetric_decreasing: true,
        }
    }

    pub fn len(&self) -> usize {
        self.response.len()
    }

    pub fn is_empty(&self) -> bool {
        self.response.is_empty()
    }

    pub fn kind(&self) -> &FilterKind {
        &self.kind
    }

    pub fn response(&self) -> &[Complex64] {
        &self.response
    }

    pub fn is_symmetric_decreasing(&self) -> bool {
        self.symmetric_decreasing
    }

    /// `â(r/L)^power`.
    pub fn power(&self, r: usize, power: usize) -> Complex64 {
        self.response[r].powu(power as u32)
    }

    pub fn sup_abs(&self) -> f64 {
        self.response.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Same filter resampled on a grid of a different length. Table filters
    /// have no closed form and cannot be resampled.
    pub fn resample(&self, len: usize) -> Result<Self> {
        match self.kind {
            FilterKind::Table { .. } if len == self.len() => Ok(self.clone()),
            FilterKind::Table { .. } => Err(Error::InvalidParameter(
                "table filters cannot be resampled to a different length".into(),
            )),
            _ => Self::from_kind(&self.kind, len),
        }
    }

    /// Time-domain taps of `a^l` (circular).
    pub fn taps(&self, power: usize) -> Signal {
        let spectrum = Spectrum::new((0..self.len()).map(|r| self.power(r, power)).collect())
            .expect("finite response");
        idft(&spectrum)
    }
}

/// `a^l ∗ f`.
pub fn evolve(f: &Signal, a: &Filter, steps: usize) -> Result<Signal> {
    if f.len() != a.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: f.len(),
        });
    }
    if steps == 0 {
        return Ok(f.clone());
    }
    let spectrum = dft(f);
    let evolved = spectrum
        .values()
        .iter()
        .enumerate()
        .map(|(r, v)| v * a.power(r, steps))
        .collect();
    Ok(idft(&Spectrum::new(evolved)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryCheck {
    pub holds: bool,
    /// First grid index at which the check fails.
    pub violation: Option<usize>,
}

/// Real, even, and strictly decreasing on the grid points of `[0, 1/2]`.
pub fn check_symmetric_decreasing(a: &Filter) -> SymmetryCheck {
    let fail = |r| SymmetryCheck {
        holds: false,
        violation: Some(r),
    };
    let len = a.len();
    let resp = a.response();
    if let Some(r) = resp.iter().position(|v| v.im != 0.0) {
        return fail(r);
    }
    if let Some(r) = (1..len).find(|&r| resp[r].re != resp[len - r].re) {
        return fail(r);
    }
    if let Some(r) = (1..=len / 2).find(|&r| resp[r].re >= resp[r - 1].re - STRICT_DECREASE_TOL) {
        return fail(r);
    }
    SymmetryCheck {
        holds: true,
        violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_signal(len: usize) -> Signal {
        Signal::new(
            (0..len)
                .map(|k| Complex64::new((k as f64 * 1.7).sin(), (k as f64 * 0.3 + 1.0).cos()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn delta_filter_is_identity() {
        let a = Filter::delta(4).unwrap();
        assert!(a.response().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let f = random_signal(4);
        for l in 0..3 {
            assert!(evolve(&f, &a, l).unwrap().distance(&f) < 1e-14);
        }
    }

    #[test]
    fn raised_cosine_values() {
        let a = Filter::raised_cosine(12, 1.0).unwrap();
        assert_eq!(a.response()[0].re, 1.0);
        assert!(a.response()[6].re.abs() < 1e-15);
        assert!((a.response()[1].re - (1.0 + (PI / 6.0).cos()) / 2.0).abs() < 1e-15);
        assert!((a.response()[1].re - 0.93301).abs() < 1e-5);
        for r in 1..12 {
            assert_eq!(a.response()[r], a.response()[12 - r]);
        }
        assert!(a.is_symmetric_decreasing());
    }

    #[test]
    fn heat_values() {
        let t = 0.7;
        let a = Filter::heat(32, t).unwrap();
        assert!((a.response()[16].re - (-4.0 * t).exp()).abs() < 1e-15);
        let check = check_symmetric_decreasing(&Filter::heat(32, 1.0).unwrap());
        assert!(check.holds);
        let tiny = Filter::heat(16, 1e-12).unwrap();
        assert!(tiny.response().iter().all(|v| (v.re - 1.0).abs() < 1e-10));
    }

    #[test]
    fn zero_steps_is_identity() {
        let a = Filter::heat(8, 0.5).unwrap();
        let f = random_signal(8);
        assert_eq!(evolve(&f, &a, 0).unwrap(), f);
    }

    #[test]
    fn evolve_composes() {
        let a = Filter::raised_cosine(16, 1.5).unwrap();
        let f = random_signal(16);
        let direct = evolve(&f, &a, 3).unwrap();
        let stepped = (0..3).fold(f.clone(), |g, _| evolve(&g, &a, 1).unwrap());
        assert!(direct.distance(&stepped) < 1e-10 * f.norm());
    }

    #[test]
    fn evolve_rejects_mismatch() {
        let a = Filter::heat(8, 0.5).unwrap();
        assert_eq!(
            evolve(&random_signal(6), &a, 1),
            Err(Error::LengthMismatch {
                expected: 8,
                got: 6
            })
        );
    }

    #[test]
    fn symmetry_checks() {
        assert!(check_symmetric_decreasing(&Filter::raised_cosine(20, 2.0).unwrap()).holds);
        let delta = check_symmetric_decreasing(&Filter::delta(8).unwrap());
        assert_eq!(
            delta,
            SymmetryCheck {
                holds: false,
                violation: Some(1)
            }
        );

        // cos(4πξ) on 16 points decreases up to ξ = 1/4 (r = 4) and rises at r = 5
        let resp = (0..16)
            .map(|r| Complex64::new((4.0 * PI * r as f64 / 16.0).cos(), 0.0))
            .collect::<Vec<_>>();
        let mut f = Filter::from_response(resp).unwrap();
        // force exact evenness so the scan reaches the monotonicity test
        let mirrored: Vec<Complex64> = (0..16).map(|r| f.response()[r.min(16 - r) % 16]).collect();
        f = Filter::from_response(mirrored).unwrap();
        assert_eq!(
            check_symmetric_decreasing(&f),
            SymmetryCheck {
                holds: false,
                violation: Some(5)
            }
        );
        assert!(!f.is_symmetric_decreasing());
    }

    #[test]
    fn taps_reproduce_convolution() {
        let a = Filter::raised_cosine(8, 1.0).unwrap();
        let f = random_signal(8);
        let taps = a.taps(2);
        let direct: Vec<Complex64> = (0..8)
            .map(|k| {
                (0..8)
                    .map(|j| taps.values()[(k + 8 - j) % 8] * f.values()[j])
                    .sum()
            })
            .collect();
        let via_fft = evolve(&f, &a, 2).unwrap();
        for (x, y) in direct.iter().zip(via_fft.values()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn kind_json_round_trip() {
        let kinds: Vec<FilterKind> = serde_json::from_str(
            r#"[{"kind":"raised_cosine","p":1.0},{"kind":"heat","t":0.5},{"kind":"delta"},
                {"kind":"table","response":[[1,0],[0.5,0],[0.5,0]]}]"#,
        )
        .unwrap();
        assert_eq!(kinds[1], FilterKind::Heat { t: 0.5 });
        let table = Filter::from_kind(&kinds[3], 3).unwrap();
        assert!(table.is_symmetric_decreasing());
    }

    #[test]
    fn closed_form_derivatives() {
        let kinds = [
            FilterKind::RaisedCosine { p: 1.5 },
            FilterKind::Heat { t: 0.4 },
        ];
        for kind in kinds {
            for xi in [0.1, 0.23, 0.37] {
                let h = 1e-6;
                let fd =
                    (kind.eval(xi + h).unwrap().re - kind.eval(xi - h).unwrap().re) / (2.0 * h);
                assert!((fd - kind.derivative(xi).unwrap()).abs() < 1e-7);
            }
        }
    }
}
