//! Finite-section moment problem `∫_A f(x) x^λn w(x) dx = d_n`, solved with
//! the dual family (`f_N = Σ d_n r_n`), plus growth-rate fitting of the data.

use crate::domain::WeightedDomain;
use crate::error::{MuntzError, Result};
use crate::exponents::ExponentSequence;
use crate::gram::{gram, GramOptions};
use crate::linalg;
use crate::scalar::Real;
use crate::series::MuntzSeries;

/// `|d_n| ≤ C a^λn` for every recorded `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit<T> {
    pub a: T,
    pub c: T,
}

/// Least-squares slope of `ln|d_n|` against `λ_n` over the nonzero entries
/// gives `ln a`; `C` is then the smallest constant making the bound hold.
/// A single nonzero entry gives `a = |d|^{1/λ}`, `C = 1`; all-zero data gives
/// `a = C = 0`.
pub fn fit_growth<T: Real>(d: &[T], lambda: &[T]) -> Result<GrowthFit<T>> {
    if d.is_empty() {
        return Err(MuntzError::InvalidArgument("empty moment data".into()));
    }
    if lambda.len() < d.len() {
        return Err(MuntzError::LengthMismatch {
            expected: d.len(),
            got: lambda.len(),
        });
    }
    let points: Vec<(&T, T)> = d
        .iter()
        .zip(lambda)
        .filter(|(v, _)| !v.is_zero())
        .map(|(v, l)| (l, v.abs().ln()))
        .collect();
    let bits = d.iter().chain(lambda).map(Real::precision).max().unwrap_or(53);
    match points.len() {
        0 => Ok(GrowthFit {
            a: T::zero(),
            c: T::zero(),
        }),
        1 => Ok(GrowthFit {
            a: (points[0].1.clone() / points[0].0.clone()).exp(),
            c: T::one(),
        }),
        len => {
            let k = T::from_int(len as i64, bits);
            let mean_x = points.iter().fold(T::zero(), |s, (x, _)| s + (*x).clone()) / k.clone();
            let mean_y = points.iter().fold(T::zero(), |s, (_, y)| s + y.clone()) / k;
            let mut sxy = T::zero();
            let mut sxx = T::zero();
            for (x, y) in &points {
                let dx = (*x).clone() - mean_x.clone();
                sxy.add_mul(&dx, &(y.clone() - mean_y.clone()));
                sxx.add_mul(&dx, &dx);
            }
            let log_a = sxy / sxx;
            let c = points
                .iter()
                .map(|(x, y)| (y.clone() - log_a.clone() * (*x).clone()).exp())
                .fold(T::zero(), T::max_of);
            Ok(GrowthFit { a: log_a.exp(), c })
        }
    }
}

#[derive(Clone, Debug)]
pub struct MomentData<T> {
    pub d: Vec<T>,
    pub fit: GrowthFit<T>,
    /// `fitted a < r_w`
    pub growth_ok: bool,
}

impl<T: Real> MomentData<T> {
    /// Fits the growth of `d` against the leading exponents of `lambda`
    /// (generators are extended if `d` is longer than the stored prefix).
    pub fn new(d: Vec<T>, lambda: &ExponentSequence<T>, r_w: &T) -> Result<Self> {
        let exps = (1..=d.len())
            .map(|k| {
                lambda.term(k).ok_or(MuntzError::LengthMismatch {
                    expected: d.len(),
                    got: lambda.len(),
                })
            })
            .collect::<Result<Vec<T>>>()?;
        let fit = fit_growth(&d, &exps)?;
        let growth_ok = fit.a < *r_w;
        Ok(MomentData { d, fit, growth_ok })
    }
}

/// `Σ_{n≤N} |d_n|·‖r_n^{(N)}‖` and the ratios of its successive terms.
#[derive(Clone, Debug)]
pub struct MomentCertificate<T> {
    pub terms: Vec<T>,
    pub sum: T,
    /// `terms[n+1] / terms[n]` where `terms[n] ≠ 0`.
    pub ratios: Vec<Option<T>>,
    /// False when the data grow too fast for a limit to be predicted.
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct MomentSolution<T> {
    pub series: MuntzSeries<T>,
    /// `⟨f_N, x^λn⟩ − d_n`
    pub residuals: Vec<T>,
    pub certificate: MomentCertificate<T>,
    /// `‖f_N‖ = sqrt(dᵀ G^{-1} d)`
    pub solution_norm: T,
    pub fit: GrowthFit<T>,
    pub growth_ok: bool,
    pub precision_bits: u32,
    pub cond_estimate: T,
}

impl<T: Real> MomentSolution<T> {
    pub fn max_residual(&self) -> T {
        linalg::max_abs(&self.residuals)
    }
}

pub fn solve_moments<T: Real>(
    wd: &WeightedDomain<T>,
    lambda: &ExponentSequence<T>,
    data: &MomentData<T>,
    n: usize,
    opts: &GramOptions,
) -> Result<MomentSolution<T>> {
    if n > data.d.len() {
        return Err(MuntzError::LengthMismatch {
            expected: n,
            got: data.d.len(),
        });
    }
    let g = gram(wd, lambda, n, opts)?;
    let d = &data.d[..n];
    let coeffs = g.solve(d)?;
    let residuals: Vec<T> = g
        .mul_vec(&coeffs)
        .into_iter()
        .zip(d)
        .map(|(m, dn)| m - dn.clone())
        .collect();
    let norm_sq = linalg::dot(&coeffs, d);
    let solution_norm = if norm_sq.is_strictly_positive() {
        norm_sq.sqrt()
    } else {
        T::zero()
    };

    let terms: Vec<T> = d
        .iter()
        .enumerate()
        .map(|(i, dn)| {
            let col = g.inverse_column(i)?;
            Ok(dn.abs() * col[i].sqrt())
        })
        .collect::<Result<Vec<T>>>()?;
    let sum = terms.iter().fold(T::zero(), |s, t| s + t.clone());
    let ratios = terms
        .windows(2)
        .map(|w| (!w[0].is_zero()).then(|| w[1].clone() / w[0].clone()))
        .collect();

    Ok(MomentSolution {
        series: MuntzSeries::on_section(&g, coeffs)?,
        residuals,
        certificate: MomentCertificate {
            terms,
            sum,
            ratios,
            passed: data.growth_ok,
        },
        solution_norm,
        fit: data.fit.clone(),
        growth_ok: data.growth_ok,
        precision_bits: g.precision_bits(),
        cond_estimate: g.cond_estimate().clone(),
    })
}
