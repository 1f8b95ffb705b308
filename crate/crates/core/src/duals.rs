//! Distances `D_n = dist(x^λn, span{x^λk : k ≠ n})`, the biorthogonal dual
//! family `r_n`, and empirical certificates for the exponential lower bound
//! `D_n ≥ u_ε (r_w − ε)^{λn}`.
//!
//! At a finite section `N` everything is read off `G^{-1}`: the dual `r_n` has
//! coefficient vector `G^{-1} e_n`, `‖r_n‖² = (G^{-1})_nn` and `D_n = 1/‖r_n‖`.

use crate::domain::WeightedDomain;
use crate::error::{MuntzError, Result};
use crate::exponents::ExponentSequence;
use crate::gram::{gram, GramMatrix, GramOptions};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct DualFamily<T> {
    coeffs: Matrix<T>,
    norms: Vec<T>,
    distances: Vec<T>,
    precision_bits: u32,
}

impl<T: Real> DualFamily<T> {
    pub fn dim(&self) -> usize {
        self.norms.len()
    }

    /// Column `n` holds the expansion `r_n = Σ_k coeffs[k][n] x^λk`.
    pub fn coeffs(&self) -> &Matrix<T> {
        &self.coeffs
    }

    pub fn column(&self, n: usize) -> Vec<T> {
        self.coeffs.column(n)
    }

    pub fn norms(&self) -> &[T] {
        &self.norms
    }

    pub fn distances(&self) -> &[T] {
        &self.distances
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// `max_{n,m} |⟨r_n, x^λm⟩ − δ_nm|`.
    pub fn biorthogonality_residual(&self, g: &GramMatrix<T>) -> T {
        let pairing = g.entries().matmul(&self.coeffs);
        pairing.sub(&Matrix::identity(self.dim())).max_abs()
    }
}

pub fn dual_family<T: Real>(g: &GramMatrix<T>) -> DualFamily<T> {
    let coeffs = g.inverse();
    let norms: Vec<T> = coeffs.diagonal().iter().map(Real::sqrt).collect();
    let distances = norms.iter().map(|r| T::one() / r.clone()).collect();
    DualFamily {
        coeffs,
        norms,
        distances,
        precision_bits: g.precision_bits(),
    }
}

/// `D_n^{(N)} = ((G^{-1})_nn)^{-1/2}` for 0-based `n`. With `N = 1` this is
/// the norm of `x^λ1` (distance to the empty span).
pub fn distance<T: Real>(g: &GramMatrix<T>, n: usize) -> Result<T> {
    let col = g.inverse_column(n)?;
    Ok(T::one() / col[n].sqrt())
}

/// Closed-form unit-interval distance
/// `(2λn+1)^{-1/2} Π_{k<N, k≠n} |λn − λk| / (λn + λk + 1)`,
/// valid only for `A = [0, 1]`, `w ≡ 1`. Indices are 0-based.
pub fn oracle_distance<T: Real>(lambda: &[T], n: usize, section: usize) -> Result<T> {
    if section > lambda.len() || n >= section {
        return Err(MuntzError::IndexOutOfRange {
            index: n,
            dim: section.min(lambda.len()),
        });
    }
    let bits = lambda[n].precision();
    let one = T::one();
    let two = T::from_int(2, bits);
    let ln = &lambda[n];
    let mut value = one.clone() / (two * ln.clone() + one.clone()).sqrt();
    for (k, lk) in lambda[..section].iter().enumerate() {
        if k != n {
            value = value * (ln.clone() - lk.clone()).abs() / (ln.clone() + lk.clone() + one.clone());
        }
    }
    Ok(value)
}

#[derive(Clone, Debug)]
pub struct DistanceReport<T> {
    /// Target index (0-based).
    pub n: usize,
    pub lambda_n: T,
    /// `(N, D_n^{(N)})` per requested section.
    pub sections: Vec<(usize, T)>,
    /// Unit-interval closed form per section, when the domain is `[0,1]`, `w ≡ 1`.
    pub oracle: Option<Vec<T>>,
    pub monotone: bool,
    pub stabilized: bool,
    pub limit_estimate: T,
    pub r_w: T,
    pub precision_bits: u32,
    pub cond_estimate: T,
}

/// True when the domain is exactly `[0, 1]` with unit weight.
pub fn is_unit_interval<T: Real>(wd: &WeightedDomain<T>) -> bool {
    let [iv] = wd.intervals() else {
        return false;
    };
    let w = &wd.weights()[0];
    iv.lo.is_zero() && iv.hi == T::one() && w.coeff == T::one() && w.power.is_zero()
}

/// `D_n^{(N)}` over increasing sections `N ∈ sections` from one factorization
/// of the largest section.
pub fn distance_sweep<T: Real>(
    wd: &WeightedDomain<T>,
    lambda: &ExponentSequence<T>,
    n: usize,
    sections: &[usize],
    rel_tol: &T,
    opts: &GramOptions,
) -> Result<DistanceReport<T>> {
    let Some(&largest) = sections.last() else {
        return Err(MuntzError::InvalidArgument("empty section list".into()));
    };
    if sections.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MuntzError::InvalidArgument("section list must increase".into()));
    }
    if n >= sections[0] {
        return Err(MuntzError::IndexOutOfRange {
            index: n,
            dim: sections[0],
        });
    }
    let full = gram(wd, lambda, largest, opts)?;
    let mut values = Vec::with_capacity(sections.len());
    for &size in sections {
        let section = full.leading(size)?;
        values.push((size, distance(&section, n)?));
    }
    let oracle = if is_unit_interval(full.domain()) {
        Some(
            sections
                .iter()
                .map(|&size| oracle_distance(full.exponents(), n, size))
                .collect::<Result<Vec<T>>>()?,
        )
    } else {
        None
    };
    let monotone = values.windows(2).all(|w| w[1].1 <= w[0].1);
    let stabilized = match values.as_slice() {
        [.., (_, prev), (_, last)] => (prev.clone() - last.clone()) / prev.clone() < *rel_tol,
        _ => false,
    };
    let limit_estimate = values.last().expect("nonempty").1.clone();
    Ok(DistanceReport {
        n,
        lambda_n: full.exponents()[n].clone(),
        sections: values,
        oracle,
        monotone,
        stabilized,
        limit_estimate,
        r_w: full.domain().r_w().clone(),
        precision_bits: full.precision_bits(),
        cond_estimate: full.cond_estimate().clone(),
    })
}

#[derive(Clone, Debug)]
pub struct LowerBoundCertificate<T> {
    pub epsilon: T,
    /// `min D_n^{(N)} / (r_w − ε)^{λn}` over every recorded `(n, N)`.
    pub u_epsilon: T,
    pub pass: bool,
    /// Per section `N`: the minimum ratio over recorded indices.
    pub section_u: Vec<(usize, T)>,
    /// `(max − min) / max` of `section_u`.
    pub variation: T,
    /// `variation < 1/2`.
    pub stable: bool,
    /// `ln D_n / λn` at the largest recorded section, per index.
    pub exponent_slopes: Vec<(usize, T)>,
}

pub fn lower_bound_certificate<T: Real>(
    reports: &[DistanceReport<T>],
    epsilon: &T,
) -> Result<LowerBoundCertificate<T>> {
    let first = reports
        .first()
        .ok_or_else(|| MuntzError::InvalidArgument("no distance reports".into()))?;
    let r_w = first.r_w.clone();
    if !epsilon.is_strictly_positive() || *epsilon >= r_w {
        return Err(MuntzError::BadEpsilon {
            epsilon: epsilon.to_string(),
            r_w: r_w.to_string(),
        });
    }
    let base = r_w - epsilon.clone();

    let mut per_section: Vec<(usize, T)> = Vec::new();
    let mut slopes = Vec::new();
    for report in reports {
        let scale = base.powf(&report.lambda_n);
        for (size, d) in &report.sections {
            let ratio = d.clone() / scale.clone();
            match per_section.iter_mut().find(|(s, _)| s == size) {
                Some((_, u)) => *u = T::min_of(u.clone(), ratio),
                None => per_section.push((*size, ratio)),
            }
        }
        slopes.push((report.n, report.limit_estimate.ln() / report.lambda_n.clone()));
    }
    per_section.sort_by_key(|(s, _)| *s);

    let u_epsilon = per_section
        .iter()
        .map(|(_, u)| u.clone())
        .reduce(T::min_of)
        .expect("every report has a section");
    let hi = per_section
        .iter()
        .map(|(_, u)| u.clone())
        .reduce(T::max_of)
        .expect("nonempty");
    let variation = (hi.clone() - u_epsilon.clone()) / hi;
    let half = T::one() / T::from_int(2, first.precision_bits);
    Ok(LowerBoundCertificate {
        epsilon: epsilon.clone(),
        pass: u_epsilon.is_strictly_positive(),
        stable: variation < half,
        u_epsilon,
        section_u: per_section,
        variation,
        exponent_slopes: slopes,
    })
}
