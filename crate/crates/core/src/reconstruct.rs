//! Forward dynamical-sampling operator and its inverses.
//!
//! The frequency-domain solvers work one coarse frequency (plain) or one
//! packet of `n` coupled frequencies (extended) at a time. [`dense_oracle`]
//! builds the same measurement map as an explicit `rows × L` matrix so the
//! two routes can be compared on small problems.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve, Filter};
use crate::linalg::{self, CMatrix, CVector, PINV_RCOND};
use crate::spectral::{dft, idft, shift, subsample, Signal, Spectrum};
use crate::system::{
    minimal_omega, require_divides, ExtendedSystem, PlainSystem, SpectralModel, SINGULAR_TOL,
};

/// Largest `L` accepted by [`dense_oracle`].
pub const DENSE_ORACLE_CAP: usize = 512;

/// Dynamical samples `y_l = S_m(a^l ∗ f)` plus extra samples `S_{mn} T_c f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub m: usize,
    pub n: usize,
    pub omega: Vec<usize>,
    pub y: Vec<Signal>,
    pub extras: BTreeMap<usize, Signal>,
}

impl SampleSet {
    pub fn rows(&self) -> usize {
        self.y.len()
    }

    /// Length `L` of the underlying signal.
    pub fn signal_len(&self) -> usize {
        self.y.first().map_or(0, |y| y.len() * self.m)
    }

    fn validate(&self) -> Result<()> {
        let Some(first) = self.y.first() else {
            return Err(Error::InvalidParameter(
                "sample set has no dynamical samples".into(),
            ));
        };
        let coarse = first.len();
        if let Some(y) = self.y.iter().find(|y| y.len() != coarse) {
            return Err(Error::LengthMismatch {
                expected: coarse,
                got: y.len(),
            });
        }
        if !self.omega.is_empty() {
            require_divides(coarse * self.m, self.m * self.n)?;
            let extra_len = coarse / self.n;
            for c in &self.omega {
                let extra = self.extras.get(c).ok_or_else(|| {
                    Error::InvalidParameter(format!("missing extra samples for shift {c}"))
                })?;
                if extra.len() != extra_len {
                    return Err(Error::LengthMismatch {
                        expected: extra_len,
                        got: extra.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// All samples in one vector: `y_0, …, y_{N−1}`, then the extras in `omega` order.
    pub fn stacked(&self) -> CVector {
        let values: Vec<Complex64> = self
            .y
            .iter()
            .chain(self.omega.iter().filter_map(|c| self.extras.get(c)))
            .flat_map(|s| s.values().iter().copied())
            .collect();
        CVector::from_vec(values)
    }

    /// Adds `noise` entry by entry, in [`SampleSet::stacked`] order.
    pub fn perturbed(&self, mut noise: impl FnMut() -> Complex64) -> SampleSet {
        let mut add = |s: &Signal| {
            Signal::new(s.values().iter().map(|v| v + noise()).collect()).expect("finite noise")
        };
        let y = self.y.iter().map(&mut add).collect();
        let extras = self
            .omega
            .iter()
            .filter_map(|c| self.extras.get(c).map(|s| (*c, add(s))))
            .collect();
        SampleSet {
            m: self.m,
            n: self.n,
            omega: self.omega.clone(),
            y,
            extras,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SampleSetWire::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: SampleSetWire = serde_json::from_str(text)?;
        let set = SampleSet::try_from(wire)?;
        set.validate()?;
        Ok(set)
    }
}

/// JSON layout of a [`SampleSet`]; complex values are `[re, im]` pairs and
/// `extras` is keyed by the decimal shift `c`.
#[derive(Debug, Serialize, Deserialize)]
struct SampleSetWire {
    m: usize,
    n: usize,
    omega: Vec<usize>,
    y: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    extras: BTreeMap<usize, Vec<[f64; 2]>>,
}

fn to_pairs(s: &Signal) -> Vec<[f64; 2]> {
    s.values().iter().map(|v| [v.re, v.im]).collect()
}

fn from_pairs(pairs: &[[f64; 2]]) -> Result<Signal> {
    Signal::new(
        pairs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect(),
    )
}

impl From<&SampleSet> for SampleSetWire {
    fn from(s: &SampleSet) -> Self {
        Self {
            m: s.m,
            n: s.n,
            omega: s.omega.clone(),
            y: s.y.iter().map(to_pairs).collect(),
            extras: s.extras.iter().map(|(c, v)| (*c, to_pairs(v))).collect(),
        }
    }
}

impl TryFrom<SampleSetWire> for SampleSet {
    type Error = Error;

    fn try_from(w: SampleSetWire) -> Result<Self> {
        Ok(Self {
            m: w.m,
            n: w.n,
            omega: w.omega,
            y: w.y.iter().map(|v| from_pairs(v)).collect::<Result<_>>()?,
            extras: w
                .extras
                .iter()
                .map(|(c, v)| Ok((*c, from_pairs(v)?)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Measurement parameters shared by the forward map and the dense oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sampling {
    pub m: usize,
    /// Number of time steps `N`.
    pub rows: usize,
    pub n: usize,
    pub omega: Vec<usize>,
}

impl Sampling {
    pub fn plain(m: usize, rows: usize) -> Self {
        Self {
            m,
            rows,
            n: 1,
            omega: Vec::new(),
        }
    }

    pub fn extended(m: usize, rows: usize, n: usize, omega: &[usize]) -> Self {
        Self {
            m,
            rows,
            n,
            omega: omega.to_vec(),
        }
    }

    fn check(&self, len: usize) -> Result<()> {
        if self.m == 0 || self.rows == 0 || self.n == 0 {
            return Err(Error::InvalidParameter(
                "m, N and n must be positive".into(),
            ));
        }
        require_divides(len, self.m)?;
        if !self.omega.is_empty() {
            require_divides(len, self.m * self.n)?;
        }
        Ok(())
    }
}

/// Samples `y_l = S_m(a^l ∗ f)` for `l = 0..N−1` and `extras[c](k) = f(mnk − c)`.
pub fn forward(f: &Signal, a: &Filter, sampling: &Sampling) -> Result<SampleSet> {
    sampling.check(f.len())?;
    let Sampling {
        m,
        rows,
        n,
        ref omega,
    } = *sampling;
    let y = (0..rows)
        .map(|l| subsample(&evolve(f, a, l)?, m))
        .collect::<Result<Vec<_>>>()?;
    let extras = omega
        .iter()
        .map(|&c| Ok((c, subsample(&shift(f, c as i64), m * n)?)))
        .collect::<Result<_>>()?;
    Ok(SampleSet {
        m,
        n,
        omega: omega.clone(),
        y,
        extras,
    })
}

/// Recovers `f` from dynamical samples alone, frequency by frequency.
pub fn reconstruct_plain(samples: &SampleSet, a: &Filter) -> Result<Signal> {
    solve_plain(a, samples)
}

pub(crate) fn solve_plain<S: SpectralModel + ?Sized>(
    model: &S,
    samples: &SampleSet,
) -> Result<Signal> {
    samples.validate()?;
    let (m, rows) = (samples.m, samples.rows());
    let len = model.grid_len();
    if samples.signal_len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: samples.signal_len(),
        });
    }
    if rows < m {
        return Err(Error::PreconditionViolated(format!(
            "need N >= m, got N = {rows}, m = {m}"
        )));
    }
    let system = PlainSystem::new(model, m, rows)?;
    let singular = system.singular_set(SINGULAR_TOL)?;
    if !singular.is_empty() {
        return Err(Error::SingularSystem(singular));
    }
    let coarse = system.grid_len();
    let spectra: Vec<Spectrum> = samples.y.iter().map(dft).collect();
    let mut f_hat = vec![Complex64::new(0.0, 0.0); len];
    let scale = Complex64::new(1.0 / m as f64, 0.0);
    for rho in 0..coarse {
        let a = system.matrix(rho)? * scale;
        let rhs = CVector::from_iterator(rows, spectra.iter().map(|s| s.values()[rho]));
        let x = linalg::lstsq(&a, &rhs);
        for l in 0..m {
            f_hat[rho + l * coarse] = x[l];
        }
    }
    Ok(idft(&Spectrum::new(f_hat)?))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtendedOptions {
    /// Solve even outside the regime where full rank is guaranteed
    /// (`m`, `n` odd and `Ω ⊇ {1, …, (m−1)/2}`).
    pub force: bool,
}

/// Recovers `f` from dynamical samples plus extra samples, one packet
/// `{ξ + k/n}` at a time, through the pseudoinverse of the extended matrix.
pub fn reconstruct_extended(
    samples: &SampleSet,
    a: &Filter,
    options: ExtendedOptions,
) -> Result<Signal> {
    solve_extended(a, samples, options)
}

pub(crate) fn check_guarantee_regime(m: usize, n: usize, omega: &[usize]) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(Error::PreconditionViolated(format!("n = {n} must be odd")));
    }
    if m.is_multiple_of(2) {
        return Err(Error::PreconditionViolated(format!("m = {m} must be odd")));
    }
    if let Some(c) = minimal_omega(m).into_iter().find(|c| !omega.contains(c)) {
        return Err(Error::PreconditionViolated(format!(
            "omega must contain 1..=(m-1)/2; shift {c} is missing"
        )));
    }
    Ok(())
}

pub(crate) fn solve_extended<S: SpectralModel + ?Sized>(
    model: &S,
    samples: &SampleSet,
    options: ExtendedOptions,
) -> Result<Signal> {
    samples.validate()?;
    if !options.force {
        check_guarantee_regime(samples.m, samples.n, &samples.omega)?;
    }
    ExtendedSolver::prepare(model, samples.m, samples.n, samples.rows(), &samples.omega)?
        .solve(samples)
}

/// Extended reconstruction with the pseudoinverse of every packet
/// precomputed, for repeated solves with one measurement setup.
#[derive(Debug, Clone)]
pub struct ExtendedSolver {
    m: usize,
    n: usize,
    rows: usize,
    omega: Vec<usize>,
    len: usize,
    pinvs: Vec<CMatrix>,
}

impl ExtendedSolver {
    pub fn new(a: &Filter, sampling: &Sampling, options: ExtendedOptions) -> Result<Self> {
        sampling.check(a.len())?;
        if !options.force {
            check_guarantee_regime(sampling.m, sampling.n, &sampling.omega)?;
        }
        Self::prepare(a, sampling.m, sampling.n, sampling.rows, &sampling.omega)
    }

    pub(crate) fn prepare<S: SpectralModel + ?Sized>(
        model: &S,
        m: usize,
        n: usize,
        rows: usize,
        omega: &[usize],
    ) -> Result<Self> {
        let system = ExtendedSystem::new(model, m, n, rows, omega)?;
        let mut deficient = Vec::new();
        let mut pinvs = Vec::with_capacity(system.packets());
        for rho in 0..system.packets() {
            let a = system.matrix(rho)?;
            let s = linalg::singular_values(&a);
            let top = s.first().copied().unwrap_or(0.0);
            if s.len() < m * n || s[m * n - 1] <= PINV_RCOND * top {
                deficient.push(rho);
                continue;
            }
            pinvs.push(linalg::pinv(&a, PINV_RCOND));
        }
        if !deficient.is_empty() {
            return Err(Error::RankDeficient(deficient));
        }
        Ok(Self {
            m,
            n,
            rows,
            omega: omega.to_vec(),
            len: model.grid_len(),
            pinvs,
        })
    }

    pub fn solve(&self, samples: &SampleSet) -> Result<Signal> {
        samples.validate()?;
        let (m, n, len) = (self.m, self.n, self.len);
        if samples.signal_len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: samples.signal_len(),
            });
        }
        if samples.m != m
            || samples.n != n
            || samples.rows() != self.rows
            || samples.omega != self.omega
        {
            return Err(Error::ShapeMismatch(
                "sample set does not match the prepared system".into(),
            ));
        }
        let packets = self.pinvs.len();
        let coarse = len / m;
        let y_spectra: Vec<Spectrum> = samples.y.iter().map(dft).collect();
        let extra_spectra: Vec<(usize, Spectrum)> = samples
            .omega
            .iter()
            .map(|c| (*c, dft(&samples.extras[c])))
            .collect();
        let mut f_hat = vec![Complex64::new(0.0, 0.0); len];
        for (rho, pinv) in self.pinvs.iter().enumerate() {
            let mut rhs = Vec::with_capacity(pinv.ncols());
            for (c, spectrum) in &extra_spectra {
                let turns = (c * rho) % len;
                let phase = Complex64::from_polar(1.0, 2.0 * PI * turns as f64 / len as f64);
                rhs.push(phase * spectrum.values()[rho]);
            }
            for k in 0..n {
                for y in &y_spectra {
                    rhs.push(y.values()[rho + k * packets]);
                }
            }
            let x = pinv * CVector::from_vec(rhs);
            for k in 0..n {
                for l in 0..m {
                    f_hat[rho + k * packets + l * coarse] = x[k * m + l];
                }
            }
        }
        Ok(idft(&Spectrum::new(f_hat)?))
    }
}

/// Explicit matrix of the measurement map `f ↦ samples`, rows in
/// [`SampleSet::stacked`] order.
pub fn dense_oracle(a: &Filter, sampling: &Sampling) -> Result<CMatrix> {
    let len = a.len();
    if len > DENSE_ORACLE_CAP {
        return Err(Error::TooLarge {
            len,
            cap: DENSE_ORACLE_CAP,
        });
    }
    sampling.check(len)?;
    let Sampling {
        m,
        rows,
        n,
        ref omega,
    } = *sampling;
    let coarse = len / m;
    let extra_len = if omega.is_empty() { 0 } else { len / (m * n) };
    let mut out = CMatrix::zeros(rows * coarse + omega.len() * extra_len, len);
    for l in 0..rows {
        let taps = a.taps(l);
        for k in 0..coarse {
            for j in 0..len {
                out[(l * coarse + k, j)] = taps.values()[(m * k + len - j) % len];
            }
        }
    }
    let base = rows * coarse;
    for (i, &c) in omega.iter().enumerate() {
        for k in 0..extra_len {
            let j = (m * n * k + len - c % len) % len;
            out[(base + i * extra_len + k, j)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(out)
}

/// Pseudoinverse solve of the dense system.
pub fn dense_solve(oracle: &CMatrix, samples: &SampleSet) -> Result<Signal> {
    let b = samples.stacked();
    if b.len() != oracle.nrows() {
        return Err(Error::LengthMismatch {
            expected: oracle.nrows(),
            got: b.len(),
        });
    }
    let x = linalg::pinv(oracle, PINV_RCOND) * b;
    Signal::new(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(len: usize, seed: f64) -> Signal {
        Signal::new(
            (0..len)
                .map(|k| {
                    Complex64::new(
                        (k as f64 * 0.91 + seed).sin(),
                        (k as f64 * 1.37 - seed).cos(),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn m_one_returns_signal() {
        let f = signal(8, 0.2);
        let a = Filter::heat(8, 0.4).unwrap();
        let samples = forward(&f, &a, &Sampling::plain(1, 1)).unwrap();
        assert_eq!(samples.y[0], f);
        assert!(reconstruct_plain(&samples, &a).unwrap().distance(&f) < 1e-12);
    }

    #[test]
    fn delta_filter_repeats_samples() {
        let f = signal(12, 0.5);
        let samples = forward(&f, &Filter::delta(12).unwrap(), &Sampling::plain(3, 4)).unwrap();
        for y in &samples.y[1..] {
            assert!(y.distance(&samples.y[0]) < 1e-14);
        }
    }

    #[test]
    fn singular_filter_is_reported() {
        let a = Filter::raised_cosine(24, 1.0).unwrap();
        let samples = forward(&signal(24, 0.1), &a, &Sampling::plain(3, 3)).unwrap();
        assert_eq!(
            reconstruct_plain(&samples, &a),
            Err(Error::SingularSystem(vec![0, 4]))
        );
    }

    #[test]
    fn extended_round_trip() {
        let a = Filter::raised_cosine(72, 1.0).unwrap();
        let f = signal(72, 0.3);
        let samples = forward(&f, &a, &Sampling::extended(3, 3, 3, &[1])).unwrap();
        let rec = reconstruct_extended(&samples, &a, ExtendedOptions::default()).unwrap();
        assert!(rec.distance(&f) < 1e-8 * f.norm());
    }

    #[test]
    fn extended_preconditions() {
        let a = Filter::raised_cosine(72, 1.0).unwrap();
        let f = signal(72, 0.3);
        let even = forward(&f, &a, &Sampling::extended(3, 3, 4, &[1])).unwrap();
        assert!(matches!(
            reconstruct_extended(&even, &a, ExtendedOptions::default()),
            Err(Error::PreconditionViolated(_))
        ));
        let none = forward(&f, &a, &Sampling::extended(3, 3, 3, &[])).unwrap();
        assert!(matches!(
            reconstruct_extended(&none, &a, ExtendedOptions::default()),
            Err(Error::PreconditionViolated(_))
        ));
        // ξ = 0 is in packet 0 and ξ = 1/2 (coarse index 12) in packet 12 − 8 = 4
        assert_eq!(
            reconstruct_extended(&none, &a, ExtendedOptions { force: true }),
            Err(Error::RankDeficient(vec![0, 4]))
        );
    }

    #[test]
    fn dense_oracle_structure() {
        let id = dense_oracle(&Filter::heat(6, 0.5).unwrap(), &Sampling::plain(1, 1)).unwrap();
        assert!((id - CMatrix::identity(6, 6)).norm() < 1e-14);

        let dup = dense_oracle(&Filter::delta(8).unwrap(), &Sampling::plain(2, 2)).unwrap();
        assert_eq!(dup.nrows(), 8);
        assert_eq!(linalg::rank(&dup, 1e-10), 4);
        for k in 0..4 {
            for j in 0..8 {
                assert_eq!(dup[(k, j)], dup[(k + 4, j)]);
            }
        }
        assert_eq!(
            dense_oracle(&Filter::delta(600).unwrap(), &Sampling::plain(2, 2)),
            Err(Error::TooLarge {
                len: 600,
                cap: DENSE_ORACLE_CAP
            })
        );
    }

    #[test]
    fn dense_oracle_reproduces_forward() {
        let a = Filter::raised_cosine(36, 1.0).unwrap();
        let f = signal(36, 0.7);
        let sampling = Sampling::extended(3, 3, 3, &[1, 5]);
        let samples = forward(&f, &a, &sampling).unwrap();
        let oracle = dense_oracle(&a, &sampling).unwrap();
        let x = CVector::from_iterator(36, f.values().iter().copied());
        assert!((oracle * x - samples.stacked()).norm() < 1e-12 * f.norm());
    }

    #[test]
    fn json_round_trip() {
        let a = Filter::heat(36, 0.3).unwrap();
        let samples = forward(&signal(36, 0.1), &a, &Sampling::extended(3, 3, 3, &[1, 2])).unwrap();
        let text = samples.to_json().unwrap();
        assert!(text.contains("\"extras\""));
        assert_eq!(SampleSet::from_json(&text).unwrap(), samples);
        let broken = text.replacen("\"n\": 3", "\"n\": 2", 1);
        assert!(SampleSet::from_json(&broken).is_err());
    }
}
