//! Müntz series, best-approximation projection, coefficient convergence
//! across sections, the coefficient-removal test, and the Christoffel-function
//! estimate of the `L²` Remez constant.

use rayon::prelude::*;

use crate::domain::WeightedDomain;
use crate::error::{MuntzError, Result};
use crate::exponents::ExponentSequence;
use crate::gram::{gram, GramMatrix, GramOptions};
use crate::linalg::{self, max_abs};
use crate::scalar::Real;

/// `Σ a_n x^λn` over a prefix of an exponent sequence, evaluable on
/// `[0, radius)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MuntzSeries<T> {
    exponents: Vec<T>,
    coeffs: Vec<T>,
    radius: T,
}

impl<T: Real> MuntzSeries<T> {
    pub fn new(exponents: Vec<T>, coeffs: Vec<T>, radius: T) -> Result<Self> {
        if coeffs.len() > exponents.len() {
            return Err(MuntzError::LengthMismatch {
                expected: exponents.len(),
                got: coeffs.len(),
            });
        }
        Ok(MuntzSeries {
            exponents,
            coeffs,
            radius,
        })
    }

    /// Series over the exponents of a Gram section, radius `r_w`.
    pub fn on_section(g: &GramMatrix<T>, coeffs: Vec<T>) -> Result<Self> {
        Self::new(g.exponents().to_vec(), coeffs, g.domain().r_w().clone())
    }

    pub fn zero(exponents: Vec<T>, radius: T) -> Self {
        MuntzSeries {
            exponents,
            coeffs: Vec::new(),
            radius,
        }
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn radius(&self) -> &T {
        &self.radius
    }

    /// `(λ_n, a_n)` pairs with stored coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (&T, &T)> {
        self.exponents.iter().zip(&self.coeffs)
    }

    pub fn with_coeffs(&self, coeffs: Vec<T>) -> Result<Self> {
        Self::new(self.exponents.clone(), coeffs, self.radius.clone())
    }
}

/// `Σ a_n x^λn` for `0 ≤ x < radius`.
pub fn evaluate<T: Real>(s: &MuntzSeries<T>, x: &T) -> Result<T> {
    if x.is_strictly_negative() || *x >= s.radius {
        return Err(MuntzError::OutsideRadius {
            x: x.to_string(),
            radius: s.radius.to_string(),
        });
    }
    let mut acc = T::zero();
    for (lambda, a) in s.terms() {
        acc.add_mul(a, &x.powf(lambda));
    }
    Ok(acc)
}

/// Functions whose inner products with powers have closed forms.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetFunction<T> {
    MuntzCombo(MuntzSeries<T>),
    /// `x^μ`, `μ ≥ 0` (`μ = 0` is the constant 1).
    PurePower(T),
}

impl<T: Real> TargetFunction<T> {
    pub fn pure_power(mu: T) -> Result<Self> {
        if mu.is_strictly_negative() {
            return Err(MuntzError::InvalidArgument(format!(
                "pure power exponent {mu} must be nonnegative"
            )));
        }
        Ok(TargetFunction::PurePower(mu))
    }

    /// `⟨f, x^μ⟩_{w,A}`
    pub fn inner_with_power(&self, wd: &WeightedDomain<T>, mu: &T) -> Result<T> {
        match self {
            TargetFunction::PurePower(p) => wd.power_moment(&(p.clone() + mu.clone())),
            TargetFunction::MuntzCombo(s) => {
                let mut acc = T::zero();
                for (lambda, a) in s.terms() {
                    acc.add_mul(a, &wd.power_moment(&(lambda.clone() + mu.clone()))?);
                }
                Ok(acc)
            }
        }
    }

    /// `‖f‖²_{w,A}`
    pub fn norm_sq(&self, wd: &WeightedDomain<T>) -> Result<T> {
        match self {
            TargetFunction::PurePower(p) => wd.power_moment(&(p.clone() + p.clone())),
            TargetFunction::MuntzCombo(s) => {
                let mut acc = T::zero();
                for (li, ai) in s.terms() {
                    for (lj, aj) in s.terms() {
                        let m = wd.power_moment(&(li.clone() + lj.clone()))?;
                        acc.add_mul(&(ai.clone() * aj.clone()), &m);
                    }
                }
                Ok(acc)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Projection<T> {
    pub series: MuntzSeries<T>,
    /// Moments `b_n = ⟨f, x^λn⟩`.
    pub moments: Vec<T>,
    /// `‖f − P f‖`.
    pub residual: T,
    pub precision_bits: u32,
}

impl<T: Real> Projection<T> {
    /// `max |b − G c|`: how far `f − P f` is from orthogonal to the section.
    pub fn orthogonality_defect(&self, g: &GramMatrix<T>) -> T {
        let gc = g.mul_vec(self.series.coeffs());
        let diff: Vec<T> = self
            .moments
            .iter()
            .zip(gc)
            .map(|(b, x)| b.clone() - x)
            .collect();
        max_abs(&diff)
    }
}

/// Orthogonal projection of `f` onto the span of the section exponents:
/// `c = G^{-1} b` and `residual² = ⟨f,f⟩ − bᵀc`.
pub fn project_in<T: Real>(g: &GramMatrix<T>, f: &TargetFunction<T>) -> Result<Projection<T>> {
    let wd = g.domain();
    let moments = g
        .exponents()
        .iter()
        .map(|lambda| f.inner_with_power(wd, lambda))
        .collect::<Result<Vec<T>>>()?;
    let coeffs = g.solve(&moments)?;
    let residual_sq = f.norm_sq(wd)? - linalg::dot(&moments, &coeffs);
    let residual = if residual_sq.is_strictly_negative() {
        if residual_sq.abs() < g.tolerance() {
            T::zero()
        } else {
            return Err(MuntzError::NegativeResidualSquared(residual_sq.to_sci_string(6)));
        }
    } else if residual_sq.abs() < g.tolerance() * g.tolerance() {
        T::zero()
    } else {
        residual_sq.sqrt()
    };
    Ok(Projection {
        series: MuntzSeries::on_section(g, coeffs)?,
        moments,
        residual,
        precision_bits: g.precision_bits(),
    })
}

pub fn project<T: Real>(
    wd: &WeightedDomain<T>,
    lambda: &ExponentSequence<T>,
    n: usize,
    f: &TargetFunction<T>,
    opts: &GramOptions,
) -> Result<Projection<T>> {
    let g = gram(wd, lambda, n, opts)?;
    project_in(&g, f)
}

/// Best-approximation coefficients at growing sections.
#[derive(Clone, Debug)]
pub struct CoefficientTable<T> {
    pub rows: Vec<(usize, Vec<T>)>,
    /// `differences[n][j] = |a_{N_{j+1}, n} − a_{N_j, n}|` for every index `n`
    /// present in both sections.
    pub differences: Vec<Vec<T>>,
    /// Per index: differences nonincreasing up to the `2^{-P/2}` noise floor.
    pub cauchy_like: Vec<bool>,
    pub residuals: Vec<T>,
    pub precision_bits: u32,
}

pub fn coefficient_convergence<T: Real>(
    wd: &WeightedDomain<T>,
    lambda: &ExponentSequence<T>,
    f: &TargetFunction<T>,
    sections: &[usize],
    opts: &GramOptions,
) -> Result<CoefficientTable<T>> {
    let Some(&largest) = sections.last() else {
        return Err(MuntzError::InvalidArgument("empty section list".into()));
    };
    if sections.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MuntzError::InvalidArgument("section list must increase".into()));
    }
    let full = gram(wd, lambda, largest, opts)?;
    // the target is re-read at the working precision of the factorization
    let mut rows = Vec::with_capacity(sections.len());
    let mut residuals = Vec::with_capacity(sections.len());
    for &size in sections {
        let p = project_in(&full.leading(size)?, f)?;
        residuals.push(p.residual);
        rows.push((size, p.series.coeffs().to_vec()));
    }

    let smallest = sections[0];
    let scale = rows
        .iter()
        .flat_map(|(_, c)| c.iter().map(|x| x.abs()))
        .fold(T::one(), T::max_of);
    let floor = full.tolerance() * scale;
    let mut differences = Vec::with_capacity(smallest);
    let mut cauchy_like = Vec::with_capacity(smallest);
    for idx in 0..smallest {
        let diffs: Vec<T> = rows
            .windows(2)
            .map(|w| (w[1].1[idx].clone() - w[0].1[idx].clone()).abs())
            .collect();
        let ok = diffs
            .windows(2)
            .all(|d| d[1] <= d[0].clone() + floor.clone());
        differences.push(diffs);
        cauchy_like.push(ok);
    }
    Ok(CoefficientTable {
        rows,
        differences,
        cauchy_like,
        residuals,
        precision_bits: full.precision_bits(),
    })
}

/// Residual of projecting `f − a_n x^λn` onto the section without index `n`;
/// zero when `f` lies in the section span.
pub fn removal_test<T: Real>(g: &GramMatrix<T>, f: &MuntzSeries<T>, n: usize) -> Result<T> {
    let dim = g.dim();
    if n >= dim {
        return Err(MuntzError::IndexOutOfRange { index: n, dim });
    }
    if f.coeffs().len() > dim || f.exponents()[..f.coeffs().len()] != g.exponents()[..f.coeffs().len()] {
        return Err(MuntzError::InvalidArgument(
            "combination must use the section exponents".into(),
        ));
    }
    let mut coeffs: Vec<T> = f.coeffs().to_vec();
    coeffs.resize(dim, T::zero());
    coeffs[n] = T::zero();
    match g.without(n)? {
        None => {
            let norm_sq = g.bilinear(&coeffs, &coeffs);
            Ok(if norm_sq.is_strictly_positive() { norm_sq.sqrt() } else { T::zero() })
        }
        Some(reduced) => {
            let remainder = MuntzSeries::on_section(g, coeffs)?;
            Ok(project_in(&reduced, &TargetFunction::MuntzCombo(remainder))?.residual)
        }
    }
}

fn uniform_grid<T: Real>(rho: &T, points: usize, bits: u32) -> Vec<T> {
    let last = T::from_int(points as i64 - 1, bits);
    (0..points)
        .map(|i| rho.clone() * T::from_int(i as i64, bits) / last.clone())
        .collect()
}

/// Prefix sums `K_k(x) = Σ_{j<k} w_j²` with `w = L^{-1} v(x)`, `v_j = x^λj`.
/// `K_N(x) = v(x)ᵀ G^{-1} v(x)` is the reciprocal Christoffel function.
fn christoffel_prefixes<T: Real>(g: &GramMatrix<T>, x: &T) -> Vec<T> {
    let v: Vec<T> = g.exponents().iter().map(|l| x.powf(l)).collect();
    let w = linalg::solve_lower(g.factor(), &v);
    let mut acc = T::zero();
    w.iter()
        .map(|wj| {
            acc.add_mul(wj, wj);
            acc.clone()
        })
        .collect()
}

fn check_grid<T: Real>(rho: &T, grid_points: usize) -> Result<()> {
    if !rho.is_strictly_positive() {
        return Err(MuntzError::InvalidArgument(format!("rho = {rho} must be positive")));
    }
    if grid_points < 2 {
        return Err(MuntzError::InvalidArgument("need at least 2 grid points".into()));
    }
    Ok(())
}

/// `c_N = max_{x ∈ grid[0,ρ]} sqrt(v(x)ᵀ G^{-1} v(x))`: the smallest constant
/// with `|f(x)| ≤ c_N ‖f‖_{L²_w(A)}` on the grid for every `f` in the section
/// span.
pub fn christoffel_remez<T: Real>(g: &GramMatrix<T>, rho: &T, grid_points: usize) -> Result<T> {
    check_grid(rho, grid_points)?;
    let grid = uniform_grid(rho, grid_points, g.precision_bits());
    let best = grid
        .par_iter()
        .map(|x| christoffel_prefixes(g, x).pop().unwrap_or_else(T::zero))
        .reduce(T::zero, T::max_of);
    Ok(best.sqrt())
}

/// `c_N(ρ)` on a table of sections and radii.
#[derive(Clone, Debug)]
pub struct RemezSweep<T> {
    pub sections: Vec<usize>,
    pub rhos: Vec<T>,
    /// `values[i][j] = c_{sections[i]}(rhos[j])`.
    pub values: Vec<Vec<T>>,
    /// Per radius, `c_{N_{i+1}} / c_{N_i}`.
    pub successive_ratios: Vec<Vec<T>>,
    /// Whether each radius lies at or below the left end of `A`.
    pub rho_below_domain: Vec<bool>,
    pub grid_points: usize,
    pub precision_bits: u32,
    pub cond_estimate: T,
}

/// Sweep over increasing sections and increasing radii. All sections share
/// one factorization, so `c_N` is a prefix maximum and nondecreasing in `N`;
/// each radius keeps the running maximum of all grid points evaluated at
/// smaller radii (all lie inside `[0, ρ]`), so `c_N(ρ)` is nondecreasing in
/// `ρ` as well.
pub fn remez_sweep<T: Real>(
    wd: &WeightedDomain<T>,
    lambda: &ExponentSequence<T>,
    sections: &[usize],
    rhos: &[T],
    grid_points: usize,
    opts: &GramOptions,
) -> Result<RemezSweep<T>> {
    let Some(&largest) = sections.last() else {
        return Err(MuntzError::InvalidArgument("empty section list".into()));
    };
    if sections.windows(2).any(|w| w[1] <= w[0]) || sections[0] == 0 {
        return Err(MuntzError::InvalidArgument("section list must increase from 1".into()));
    }
    if rhos.is_empty() || rhos.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MuntzError::InvalidArgument("radii must be nonempty and increasing".into()));
    }
    for rho in rhos {
        check_grid(rho, grid_points)?;
    }
    let g = gram(wd, lambda, largest, opts)?;
    let bits = g.precision_bits();
    let left_end = g.domain().intervals()[0].lo.clone();

    let mut running: Vec<T> = vec![T::zero(); sections.len()];
    let mut per_rho: Vec<Vec<T>> = Vec::with_capacity(rhos.len());
    for rho in rhos {
        let grid = uniform_grid(rho, grid_points, bits);
        let maxima = grid
            .par_iter()
            .map(|x| {
                let k = christoffel_prefixes(&g, x);
                sections.iter().map(|&s| k[s - 1].clone()).collect::<Vec<T>>()
            })
            .reduce(
                || vec![T::zero(); sections.len()],
                |a, b| a.into_iter().zip(b).map(|(x, y)| T::max_of(x, y)).collect(),
            );
        for (r, m) in running.iter_mut().zip(maxima) {
            *r = T::max_of(r.clone(), m);
        }
        per_rho.push(running.iter().map(Real::sqrt).collect());
    }

    let values: Vec<Vec<T>> = (0..sections.len())
        .map(|i| per_rho.iter().map(|col| col[i].clone()).collect())
        .collect();
    let successive_ratios = (0..rhos.len())
        .map(|j| {
            values
                .windows(2)
                .map(|w| w[1][j].clone() / w[0][j].clone())
                .collect()
        })
        .collect();
    Ok(RemezSweep {
        sections: sections.to_vec(),
        rhos: rhos.to_vec(),
        values,
        successive_ratios,
        rho_below_domain: rhos.iter().map(|r| *r <= left_end).collect(),
        grid_points,
        precision_bits: bits,
        cond_estimate: g.cond_estimate().clone(),
    })
}
