//! Per-frequency system matrices.
//!
//! With `M = L/m` coarse frequencies, coarse index `ρ` stands for `ξ = ρ/M` and
//! the node `â((ξ + l)/m)` sits at fine index `ρ + l·M`. The plain matrix is
//!
//! ```text
//! A_m(ξ)[r][l] = â((ξ + l)/m)^r,   r = 0..N−1, l = 0..m−1
//! ```
//!
//! The extended matrix couples the `n` frequencies `ξ + k/n` of a packet
//! (`ξ = ρ/M`, `ρ < L/(mn)`): one `(1/(mn))·ū_c(k)` row segment per extra shift
//! `c`, then block-diagonal `(1/m)·A_m(ξ + k/n)`. Unknowns are stacked by `k`
//! first, then by `l`, so column `k·m + l` holds the fine index
//! `ρ + k·L/(mn) + l·M`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::Filter;
use crate::linalg::{self, CMatrix};

/// Default relative threshold for declaring a grid frequency singular.
pub const SINGULAR_TOL: f64 = 1e-8;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Source of the per-frequency entries of a dynamical-sampling system.
///
/// For a plain filter the dynamical row `power` at fine index `r` is
/// `â(r/L)^power` and extra-sample rows see the unknowns unweighted. The
/// shift-invariant-space layer substitutes periodized generator values.
pub trait SpectralModel {
    fn grid_len(&self) -> usize;

    fn row_entry(&self, power: usize, r: usize) -> Complex64;

    fn extra_weight(&self, _r: usize) -> Complex64 {
        ONE
    }
}

impl SpectralModel for Filter {
    fn grid_len(&self) -> usize {
        self.len()
    }

    fn row_entry(&self, power: usize, r: usize) -> Complex64 {
        self.power(r, power)
    }
}

pub(crate) fn require_divides(len: usize, factor: usize) -> Result<()> {
    if factor == 0 || !len.is_multiple_of(factor) {
        return Err(Error::NonDivisibleLength { len, factor });
    }
    Ok(())
}

/// `N × m` plain system over a model.
#[derive(Debug, Clone, Copy)]
pub struct PlainSystem<'a, S: SpectralModel + ?Sized> {
    model: &'a S,
    m: usize,
    rows: usize,
}

impl<'a, S: SpectralModel + ?Sized> PlainSystem<'a, S> {
    pub fn new(model: &'a S, m: usize, rows: usize) -> Result<Self> {
        require_divides(model.grid_len(), m)?;
        if rows == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        Ok(Self { model, m, rows })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of coarse frequencies `L/m`.
    pub fn grid_len(&self) -> usize {
        self.model.grid_len() / self.m
    }

    fn check_rho(&self, rho: usize) -> Result<()> {
        if rho >= self.grid_len() {
            return Err(Error::InvalidParameter(format!(
                "grid index {rho} out of range 0..{}",
                self.grid_len()
            )));
        }
        Ok(())
    }

    pub fn matrix(&self, rho: usize) -> Result<CMatrix> {
        self.check_rho(rho)?;
        let coarse = self.grid_len();
        Ok(CMatrix::from_fn(self.rows, self.m, |r, l| {
            self.model.row_entry(r, rho + l * coarse)
        }))
    }

    /// Nodes `â((ξ + l)/m)`: the second row of the matrix.
    pub fn nodes(&self, rho: usize) -> Result<Vec<Complex64>> {
        self.check_rho(rho)?;
        let coarse = self.grid_len();
        Ok((0..self.m)
            .map(|l| self.model.row_entry(1, rho + l * coarse))
            .collect())
    }

    pub fn smin(&self, rho: usize) -> Result<f64> {
        Ok(linalg::smin(&self.matrix(rho)?))
    }

    /// Grid indices whose smallest singular value falls below
    /// `tol · max_ρ smin(ρ)`.
    pub fn singular_set(&self, tol: f64) -> Result<Vec<usize>> {
        let smins: Vec<f64> = (0..self.grid_len())
            .map(|rho| self.smin(rho))
            .collect::<Result<_>>()?;
        let top = smins.iter().copied().fold(0.0, f64::max);
        Ok(smins
            .iter()
            .enumerate()
            .filter(|(_, &s)| top == 0.0 || s < tol * top)
            .map(|(rho, _)| rho)
            .collect())
    }
}

/// Determinant and its two computation routes for a square plain system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    /// `∏_{i<j} (x_j − x_i)` over the nodes.
    pub node_product: Complex64,
    /// Dense LU determinant of the same matrix.
    pub lu: Complex64,
}

pub fn build_plain(a: &Filter, m: usize, rows: usize, rho: usize) -> Result<CMatrix> {
    PlainSystem::new(a, m, rows)?.matrix(rho)
}

/// Determinant of the square system `A_m(ξ)`; needs `N = m`.
pub fn det_plain(a: &Filter, m: usize, rows: usize, rho: usize) -> Result<Determinant> {
    if rows != m {
        return Err(Error::ShapeMismatch(format!(
            "determinant needs N = m, got N = {rows}, m = {m}"
        )));
    }
    let system = PlainSystem::new(a, m, rows)?;
    let nodes = system.nodes(rho)?;
    let mut node_product = ONE;
    for j in 0..m {
        for i in 0..j {
            node_product *= nodes[j] - nodes[i];
        }
    }
    let lu = system.matrix(rho)?.determinant();
    Ok(Determinant { node_product, lu })
}

pub fn smin_plain(a: &Filter, m: usize, rows: usize, rho: usize) -> Result<f64> {
    PlainSystem::new(a, m, rows)?.smin(rho)
}

/// Singular grid frequencies of the square system `A_m`.
pub fn singular_set(a: &Filter, m: usize, tol: f64) -> Result<Vec<usize>> {
    PlainSystem::new(a, m, m)?.singular_set(tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularFrequency {
    /// `ξ = 0`
    Zero,
    /// `ξ = 1/2`
    Half,
}

impl SingularFrequency {
    /// Coarse grid index for a grid of `coarse` points, if representable.
    pub fn grid_index(self, coarse: usize) -> Option<usize> {
        match self {
            SingularFrequency::Zero => Some(0),
            SingularFrequency::Half => coarse.is_multiple_of(2).then_some(coarse / 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasis {
    pub vectors: Vec<Vec<i32>>,
    pub at_frequency: SingularFrequency,
}

/// Kernel of `A_m` at `ξ = 0` or `ξ = 1/2` for a real, even, strictly
/// decreasing filter. At `ξ = 0` the columns `j` and `m − j` coincide; at
/// `ξ = 1/2` the columns `j` and `m − 1 − j` do.
pub fn kernel_basis(m: usize, at: SingularFrequency) -> Result<KernelBasis> {
    if m.is_multiple_of(2) {
        return Err(Error::EvenM(m));
    }
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "kernel basis needs m >= 3, got {m}"
        )));
    }
    let half = (m - 1) / 2;
    let pair = |plus: usize, minus: usize| {
        let mut v = vec![0; m];
        v[plus] = 1;
        v[minus] = -1;
        v
    };
    let vectors = match at {
        SingularFrequency::Zero => (1..=half).map(|j| pair(j, m - j)).collect(),
        SingularFrequency::Half => (0..half).map(|j| pair(j, m - 1 - j)).collect(),
    };
    Ok(KernelBasis {
        vectors,
        at_frequency: at,
    })
}

/// `ū_c(k) = e^{−i2πck/(mn)} (1, e^{−i2πc/m}, …, e^{−i2πc(m−1)/m})`.
pub fn u_row(c: usize, k: usize, m: usize, n: usize) -> Vec<Complex64> {
    let period = m * n;
    (0..m)
        .map(|j| {
            let turns = (c * k + c * j * n) % period;
            Complex64::from_polar(1.0, -2.0 * PI * turns as f64 / period as f64)
        })
        .collect()
}

/// Extended packet system over a model.
#[derive(Debug, Clone)]
pub struct ExtendedSystem<'a, S: SpectralModel + ?Sized> {
    model: &'a S,
    m: usize,
    n: usize,
    rows: usize,
    omega: Vec<usize>,
}

impl<'a, S: SpectralModel + ?Sized> ExtendedSystem<'a, S> {
    pub fn new(model: &'a S, m: usize, n: usize, rows: usize, omega: &[usize]) -> Result<Self> {
        if m == 0 || n == 0 || rows == 0 {
            return Err(Error::InvalidParameter(
                "m, n and N must be positive".into(),
            ));
        }
        require_divides(model.grid_len(), m * n)?;
        if let Some(&c) = omega.iter().find(|&&c| c >= m * n) {
            return Err(Error::InvalidParameter(format!(
                "shift {c} outside 0..{}",
                m * n
            )));
        }
        Ok(Self {
            model,
            m,
            n,
            rows,
            omega: omega.to_vec(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    /// Number of packets `L/(mn)`.
    pub fn packets(&self) -> usize {
        self.model.grid_len() / (self.m * self.n)
    }

    pub fn coarse_len(&self) -> usize {
        self.model.grid_len() / self.m
    }

    /// Fine index held by unknown column `k·m + l` of packet `rho`.
    pub fn fine_index(&self, rho: usize, k: usize, l: usize) -> usize {
        rho + k * self.packets() + l * self.coarse_len()
    }

    pub fn matrix(&self, rho: usize) -> Result<CMatrix> {
        if rho >= self.packets() {
            return Err(Error::InvalidParameter(format!(
                "packet index {rho} out of range 0..{}",
                self.packets()
            )));
        }
        let (m, n) = (self.m, self.n);
        let top = self.omega.len();
        let mut a = CMatrix::zeros(top + self.rows * n, m * n);
        let extra_scale = 1.0 / (m * n) as f64;
        for (row, &c) in self.omega.iter().enumerate() {
            for k in 0..n {
                for (l, u) in u_row(c, k, m, n).into_iter().enumerate() {
                    let r = self.fine_index(rho, k, l);
                    a[(row, k * m + l)] = u * self.model.extra_weight(r) * extra_scale;
                }
            }
        }
        let block_scale = 1.0 / m as f64;
        for k in 0..n {
            for p in 0..self.rows {
                for l in 0..m {
                    let r = self.fine_index(rho, k, l);
                    a[(top + k * self.rows + p, k * m + l)] =
                        self.model.row_entry(p, r) * block_scale;
                }
            }
        }
        Ok(a)
    }

    pub fn smin(&self, rho: usize) -> Result<f64> {
        Ok(linalg::smin(&self.matrix(rho)?))
    }
}

/// `(|Ω| + mn) × mn` extended matrix with square `A_m` blocks.
pub fn build_extended(
    a: &Filter,
    m: usize,
    n: usize,
    omega: &[usize],
    rho: usize,
) -> Result<CMatrix> {
    ExtendedSystem::new(a, m, n, m, omega)?.matrix(rho)
}

/// `Ω = {1, …, (m−1)/2}`.
pub fn minimal_omega(m: usize) -> Vec<usize> {
    (1..=m.saturating_sub(1) / 2).collect()
}

/// `Ω = {0, …, m−1}`.
pub fn full_omega(m: usize) -> Vec<usize> {
    (0..m).collect()
}

#[derive(Debug, Clone)]
pub struct SineTestMatrices {
    /// `U_k · [v_1 … v_{(m−1)/2}]`
    pub b: CMatrix,
    /// `U_k · [w_0 … w_{(m−3)/2}]`
    pub d: CMatrix,
    pub smin_b: f64,
    pub smin_d: f64,
}

/// Closed-form entries of `B` and `D` with `Ω = {1, …, (m−1)/2}`:
///
/// ```text
/// B(c, j) = −2i · e^{−i2πck/(mn)} · sin(2πcj/m)
/// D(c, j) = −2i · e^{−i2πck/(mn)} · e^{iπc/m} · sin(πc(2j+1)/m)
/// ```
pub fn sine_test_matrices(m: usize, n: usize, k: usize) -> Result<SineTestMatrices> {
    if m.is_multiple_of(2) {
        return Err(Error::EvenM(m));
    }
    if m < 3 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need m >= 3 and n >= 1, got m = {m}, n = {n}"
        )));
    }
    let half = (m - 1) / 2;
    let minus_two_i = Complex64::new(0.0, -2.0);
    let packet_phase = |c: usize| {
        Complex64::from_polar(1.0, -2.0 * PI * ((c * k) % (m * n)) as f64 / (m * n) as f64)
    };
    let mf = m as f64;
    let b = CMatrix::from_fn(half, half, |row, col| {
        let (c, j) = (row + 1, col + 1);
        minus_two_i * packet_phase(c) * (2.0 * PI * (c * j) as f64 / mf).sin()
    });
    let d = CMatrix::from_fn(half, half, |row, j| {
        let c = row + 1;
        minus_two_i
            * packet_phase(c)
            * Complex64::from_polar(1.0, PI * c as f64 / mf)
            * (PI * (c * (2 * j + 1)) as f64 / mf).sin()
    });
    let smin_b = linalg::smin(&b);
    let smin_d = linalg::smin(&d);
    Ok(SineTestMatrices {
        b,
        d,
        smin_b,
        smin_d,
    })
}
