//! Weighted Gram matrices `G_ij = ⟨x^λi, x^λj⟩_{w,A}` with Cholesky factor,
//! condition guard and automatic precision escalation.

use rayon::prelude::*;

use crate::domain::WeightedDomain;
use crate::error::{MuntzError, Result};
use crate::exponents::ExponentSequence;
use crate::linalg::{self, Matrix};
use crate::scalar::{Real, DEFAULT_PRECISION_BITS};

/// Precision policy for Gram assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GramOptions {
    pub precision_bits: u32,
    /// Escalation ceiling; precision doubles until the guard passes or this
    /// is reached.
    pub max_precision_bits: u32,
}

impl Default for GramOptions {
    fn default() -> Self {
        GramOptions {
            precision_bits: DEFAULT_PRECISION_BITS,
            max_precision_bits: 4096,
        }
    }
}

impl GramOptions {
    pub fn with_precision(bits: u32) -> Self {
        GramOptions {
            precision_bits: bits,
            ..Self::default()
        }
    }
}

/// A factorized section Gram matrix together with the domain and exponents
/// it was assembled from, all at the same precision.
#[derive(Clone, Debug)]
pub struct GramMatrix<T> {
    entries: Matrix<T>,
    chol: Matrix<T>,
    cond_estimate: T,
    precision_bits: u32,
    exponents: Vec<T>,
    domain: WeightedDomain<T>,
    sequence: ExponentSequence<T>,
}

/// Assembles and factorizes the `n × n` section Gram matrix, doubling the
/// precision while the condition estimate exceeds `2^{P/2}`.
pub fn gram<T: Real>(
    wd: &WeightedDomain<T>,
    lambda: &ExponentSequence<T>,
    n: usize,
    opts: &GramOptions,
) -> Result<GramMatrix<T>> {
    if n == 0 || n > lambda.len() {
        return Err(MuntzError::InvalidArgument(format!(
            "section size {n} outside 1..={}",
            lambda.len()
        )));
    }
    if opts.precision_bits < 64 {
        return Err(MuntzError::InvalidArgument(format!(
            "precision {} below the 64-bit minimum",
            opts.precision_bits
        )));
    }
    let ceiling = T::effective_precision(opts.max_precision_bits.max(opts.precision_bits));
    let mut bits = T::effective_precision(opts.precision_bits);
    loop {
        let wd_p = if wd.precision_bits() == bits {
            wd.clone()
        } else {
            wd.at_precision(bits)?
        };
        let seq_p = if lambda.precision_bits() == bits {
            lambda.clone()
        } else {
            lambda.at_precision(bits)?
        };
        let exponents = seq_p.values()[..n].to_vec();
        let entries = assemble(&wd_p, &exponents)?;
        let guard = T::exp2i((bits / 2) as i32, bits);
        let outcome = match linalg::cholesky(&entries) {
            Ok(chol) => {
                let cond_estimate = diagonal_condition(&entries, &chol);
                if cond_estimate <= guard {
                    return Ok(GramMatrix {
                        entries,
                        chol,
                        cond_estimate,
                        precision_bits: bits,
                        exponents,
                        domain: wd_p,
                        sequence: seq_p,
                    });
                }
                MuntzError::PrecisionExhausted {
                    bits,
                    cond: cond_estimate.to_sci_string(6),
                }
            }
            Err(pivot) => MuntzError::NotPositiveDefinite { pivot, bits },
        };
        if bits >= ceiling {
            return Err(outcome);
        }
        bits = (bits * 2).min(ceiling);
    }
}

fn assemble<T: Real>(wd: &WeightedDomain<T>, exponents: &[T]) -> Result<Matrix<T>> {
    let n = exponents.len();
    // upper triangle, row-parallel
    let upper: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| wd.power_moment(&(exponents[i].clone() + exponents[j].clone())))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_fn(n, n, |i, j| {
        if i <= j {
            upper[i][j - i].clone()
        } else {
            upper[j][i - j].clone()
        }
    }))
}

/// Estimate of `κ₂(G)`: the pivot spread `max s / min s`, `s_i = L_ii² / G_ii`,
/// of the diagonally scaled matrix times the spread of the diagonal itself.
/// The second factor matters for absolute residuals such as `G G^{-1} − I`
/// when entry magnitudes differ by many orders (large domains, large
/// exponents).
fn diagonal_condition<T: Real>(entries: &Matrix<T>, chol: &Matrix<T>) -> T {
    let diag = entries.diagonal();
    let pivots: Vec<T> = chol
        .diagonal()
        .into_iter()
        .zip(&diag)
        .map(|(l, g)| l.clone() * l / g.clone())
        .collect();
    let spread = |v: Vec<T>| {
        let hi = v.iter().cloned().reduce(T::max_of);
        let lo = v.into_iter().reduce(T::min_of);
        match (hi, lo) {
            (Some(hi), Some(lo)) => hi / lo,
            _ => T::one(),
        }
    };
    spread(pivots) * spread(diag)
}

impl<T: Real> GramMatrix<T> {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix<T> {
        &self.entries
    }

    /// Lower-triangular Cholesky factor.
    pub fn factor(&self) -> &Matrix<T> {
        &self.chol
    }

    pub fn cond_estimate(&self) -> &T {
        &self.cond_estimate
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Section exponents `λ_1..λ_N` at this matrix's precision.
    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    pub fn domain(&self) -> &WeightedDomain<T> {
        &self.domain
    }

    /// Full exponent sequence (possibly longer than the section).
    pub fn sequence(&self) -> &ExponentSequence<T> {
        &self.sequence
    }

    /// `2^{-P/2}` at this matrix's precision.
    pub fn tolerance(&self) -> T {
        T::half_precision_tolerance(self.precision_bits)
    }

    pub fn from_int(&self, n: i64) -> T {
        T::from_int(n, self.precision_bits)
    }

    /// Solves `G x = b` through the stored factor.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.dim() {
            return Err(MuntzError::LengthMismatch {
                expected: self.dim(),
                got: b.len(),
            });
        }
        let y = linalg::solve_lower(&self.chol, b);
        Ok(linalg::solve_lower_transpose(&self.chol, &y))
    }

    /// Column `n` (0-based) of `G^{-1}`.
    pub fn inverse_column(&self, n: usize) -> Result<Vec<T>> {
        let dim = self.dim();
        if n >= dim {
            return Err(MuntzError::IndexOutOfRange { index: n, dim });
        }
        let e: Vec<T> = (0..dim)
            .map(|i| if i == n { T::one() } else { T::zero() })
            .collect();
        self.solve(&e)
    }

    pub fn inverse(&self) -> Matrix<T> {
        let cols: Vec<Vec<T>> = (0..self.dim())
            .into_par_iter()
            .map(|n| self.inverse_column(n).expect("index in range"))
            .collect();
        Matrix::from_columns(&cols)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        self.entries.mul_vec(v)
    }

    /// Gram bilinear form `xᵀ G y` on coefficient vectors.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        linalg::dot(x, &self.entries.mul_vec(y))
    }

    /// Leading `k`-section. The Cholesky factor of a leading block is the
    /// leading block of the factor, so no refactorization happens.
    pub fn leading(&self, k: usize) -> Result<GramMatrix<T>> {
        if k == 0 || k > self.dim() {
            return Err(MuntzError::IndexOutOfRange {
                index: k,
                dim: self.dim(),
            });
        }
        let chol = self.chol.leading(k);
        let entries = self.entries.leading(k);
        Ok(GramMatrix {
            cond_estimate: diagonal_condition(&entries, &chol),
            entries,
            chol,
            precision_bits: self.precision_bits,
            exponents: self.exponents[..k].to_vec(),
            domain: self.domain.clone(),
            sequence: self.sequence.clone(),
        })
    }

    /// Gram matrix of the section with index `n` removed, refactorized.
    /// Returns `None` when nothing is left.
    pub fn without(&self, n: usize) -> Result<Option<GramMatrix<T>>> {
        let dim = self.dim();
        if n >= dim {
            return Err(MuntzError::IndexOutOfRange { index: n, dim });
        }
        if dim == 1 {
            return Ok(None);
        }
        let keep: Vec<usize> = (0..dim).filter(|&i| i != n).collect();
        let entries = self.entries.principal(&keep);
        let chol = linalg::cholesky(&entries).map_err(|pivot| MuntzError::NotPositiveDefinite {
            pivot,
            bits: self.precision_bits,
        })?;
        Ok(Some(GramMatrix {
            cond_estimate: diagonal_condition(&entries, &chol),
            entries,
            chol,
            precision_bits: self.precision_bits,
            exponents: keep.iter().map(|&i| self.exponents[i].clone()).collect(),
            domain: self.domain.clone(),
            sequence: self.sequence.clone(),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelude::*;
    use crate::domain::DomainSpec;
    use crate::exponents::ExponentSpec;
    use crate::MpFloat;

    fn unit_gram(values: &[&str]) -> GramMatrix<MpFloat> {
        let wd = WeightedDomain::from_spec(&DomainSpec::unit_interval(), 256).unwrap();
        let seq = ExponentSequence::from_spec(&ExponentSpec::explicit(values.iter().copied()), 256).unwrap();
        gram(&wd, &seq, values.len(), &GramOptions::default()).unwrap()
    }

    fn q(num: i64, den: i64) -> MpFloat {
        MpFloat::from_int(num, 256) / MpFloat::from_int(den, 256)
    }

    fn assert_close(a: &MpFloat, b: &MpFloat) {
        let err = (a.clone() - b.clone()).abs();
        let scale = MpFloat::from_int(1, 256) + b.abs();
        assert!(err <= MpFloat::exp2i(-230, 256) * scale, "{a} vs {b}");
    }

    #[test]
    fn two_by_two_unit_entries() {
        let g = unit_gram(&["2", "3"]);
        assert_close(&g.entries()[(0, 0)], &q(1, 5));
        assert_close(&g.entries()[(0, 1)], &q(1, 6));
        assert_close(&g.entries()[(1, 0)], &q(1, 6));
        assert_close(&g.entries()[(1, 1)], &q(1, 7));
        assert_eq!(g.precision_bits(), 256);
    }

    #[test]
    fn scaled_interval_entries() {
        let wd = WeightedDomain::<MpFloat>::from_spec(&DomainSpec::interval("2"), 256).unwrap();
        let seq = ExponentSequence::from_spec(&ExponentSpec::explicit(["2", "3"]), 256).unwrap();
        let g = gram(&wd, &seq, 2, &GramOptions::default()).unwrap();
        assert_close(&g.entries()[(0, 0)], &q(32, 5));
        assert_close(&g.entries()[(0, 1)], &q(32, 3));
        assert_close(&g.entries()[(1, 1)], &q(128, 7));
    }

    #[test]
    fn inverse_columns_of_fixture() {
        let g = unit_gram(&["2", "3"]);
        let c0 = g.inverse_column(0).unwrap();
        let c1 = g.inverse_column(1).unwrap();
        assert_close(&c0[0], &q(180, 1));
        assert_close(&c0[1], &q(-210, 1));
        assert_close(&c1[0], &q(-210, 1));
        assert_close(&c1[1], &q(252, 1));
        assert_eq!(
            g.inverse_column(2).unwrap_err(),
            MuntzError::IndexOutOfRange { index: 2, dim: 2 }
        );
        let single = unit_gram(&["2"]);
        assert_close(&single.inverse_column(0).unwrap()[0], &q(5, 1));
    }

    #[test]
    fn escalates_precision_when_ill_conditioned() {
        let wd = WeightedDomain::<MpFloat>::from_spec(&DomainSpec::unit_interval(), 64).unwrap();
        let seq = ExponentSequence::from_spec(&ExponentSpec::power("1", "1", 14), 64).unwrap();
        let g = gram(&wd, &seq, 14, &GramOptions::with_precision(64)).unwrap();
        assert!(g.precision_bits() > 64);
        let guard = MpFloat::exp2i((g.precision_bits() / 2) as i32, g.precision_bits());
        assert!(*g.cond_estimate() <= guard);
    }

    #[test]
    fn exhausts_at_the_ceiling() {
        let wd = WeightedDomain::<f64>::from_spec(&DomainSpec::unit_interval(), 53).unwrap();
        let seq = ExponentSequence::from_spec(&ExponentSpec::power("1", "1", 12), 53).unwrap();
        let err = gram(&wd, &seq, 12, &GramOptions::default()).unwrap_err();
        assert!(err.is_numerical(), "{err}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let wd = WeightedDomain::<f64>::from_spec(&DomainSpec::unit_interval(), 53).unwrap();
        let seq = ExponentSequence::from_spec(&ExponentSpec::explicit(["2", "3"]), 53).unwrap();
        assert!(gram(&wd, &seq, 3, &GramOptions::default()).is_err());
        assert!(gram(&wd, &seq, 0, &GramOptions::default()).is_err());
        assert!(gram(&wd, &seq, 2, &GramOptions::with_precision(32)).is_err());
    }

    #[test]
    fn leading_block_reuses_factor() {
        let g = unit_gram(&["1", "2", "3", "4"]);
        let g2 = g.leading(2).unwrap();
        let direct = unit_gram(&["1", "2"]);
        for i in 0..2 {
            for j in 0..2 {
                assert_close(&g2.factor()[(i, j)], &direct.factor()[(i, j)]);
            }
        }
    }

    #[test]
    fn removing_an_index() {
        let g = unit_gram(&["2", "3", "5"]);
        let reduced = g.without(1).unwrap().unwrap();
        assert_eq!(reduced.dim(), 2);
        assert_eq!(reduced.exponents()[1].to_f64(), 5.0);
        assert_close(&reduced.entries()[(0, 1)], &q(1, 8));
        assert!(unit_gram(&["2"]).without(0).unwrap().is_none());
    }
}
