//! Finite sections of the diagonal operator `T f = Σ ⟨f, r_n⟩ u_n x^λn`
//! (the dilation `f(x) ↦ f(ρx)` when `u_n = ρ^λn`), its Gram-adjoint,
//! eigen-structure checks, tail bounds, and mixed-system nonsingularity
//! experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MuntzError, Result};
use crate::exponents::ExponentSequence;
use crate::gram::GramMatrix;
use crate::linalg::{self, Matrix};
use crate::scalar::Real;
use crate::series::MuntzSeries;

/// Cap on extra terms summed when a generator tail is extended.
const MAX_TAIL_TERMS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    DiagonalList,
    Dilation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec<T> {
    /// Eigenvalues; empty for `Dilation`, where `u_n = ρ^λn` is computed
    /// from whatever exponents the operator is applied with.
    pub u: Vec<T>,
    pub rho: T,
    pub kind: OperatorKind,
}

impl<T: Real> OperatorSpec<T> {
    pub fn dilation(rho: T) -> Self {
        OperatorSpec {
            u: Vec::new(),
            rho,
            kind: OperatorKind::Dilation,
        }
    }

    pub fn diagonal_list(u: Vec<T>, rho: T) -> Self {
        OperatorSpec {
            u,
            rho,
            kind: OperatorKind::DiagonalList,
        }
    }

    /// Validated `u_1..u_N` for the given exponents.
    pub fn eigenvalues(&self, exponents: &[T]) -> Result<Vec<T>> {
        if !(self.rho.is_strictly_positive() && self.rho < T::one()) {
            return Err(MuntzError::InvalidArgument(format!(
                "rho = {} must lie in (0, 1)",
                self.rho
            )));
        }
        let n = exponents.len();
        let bounds: Vec<T> = exponents.iter().map(|l| self.rho.powf(l)).collect();
        let u = match self.kind {
            OperatorKind::Dilation => bounds.clone(),
            OperatorKind::DiagonalList => {
                if self.u.len() < n {
                    return Err(MuntzError::LengthMismatch {
                        expected: n,
                        got: self.u.len(),
                    });
                }
                self.u[..n].to_vec()
            }
        };
        let slack = T::half_precision_tolerance(self.rho.precision().max(exponents_bits(exponents)));
        for (i, ui) in u.iter().enumerate() {
            if let Some(j) = u[..i].iter().position(|uj| uj == ui) {
                return Err(MuntzError::DuplicateEigenvalue(j, i));
            }
            if ui.is_zero() {
                return Err(MuntzError::ZeroEigenvalue(i));
            }
        }
        for (i, (ui, bound)) in u.iter().zip(&bounds).enumerate() {
            if ui.abs() > bound.clone() * (T::one() + slack.clone()) {
                return Err(MuntzError::BoundViolation { index: i });
            }
        }
        Ok(u)
    }
}

fn exponents_bits<T: Real>(exponents: &[T]) -> u32 {
    exponents.iter().map(Real::precision).max().unwrap_or(53)
}

/// `M = diag(u)` in e-coordinates and its adjoint for the Gram inner
/// product, `M_adj = G^{-1} Mᵀ G`.
pub fn finite_sections<T: Real>(
    spec: &OperatorSpec<T>,
    g: &GramMatrix<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let u = spec.eigenvalues(g.exponents())?;
    let n = g.dim();
    let m = Matrix::from_fn(n, n, |i, j| if i == j { u[i].clone() } else { T::zero() });
    let cols = (0..n)
        .into_par_iter()
        .map(|j| {
            let scaled: Vec<T> = (0..n)
                .map(|i| u[i].clone() * g.entries()[(i, j)].clone())
                .collect();
            g.solve(&scaled)
        })
        .collect::<Result<Vec<Vec<T>>>>()?;
    Ok((m, Matrix::from_columns(&cols)))
}

#[derive(Clone, Debug)]
pub struct EigenReport<T> {
    pub u: Vec<T>,
    /// `M e_k = u_k e_k`
    pub eigen_ok: bool,
    /// `M_adj c_k = u_k c_k` for the dual columns `c_k`, within `2^{-P/2}`.
    pub adjoint_eigen_ok: bool,
    pub adjoint_defect: T,
    pub simplicity_ok: bool,
    pub kernel_trivial_ok: bool,
    /// `max |M M_adj − M_adj M|`
    pub normality_defect: T,
    /// `(m, Σ_{n>m} q^λn)` with `q = 2ρ/(1+ρ)`, `m` counted from 1.
    pub tail_bounds: Vec<(usize, T)>,
    /// `q^{gap}`, the largest admissible ratio of consecutive tail bounds.
    pub tail_ratio_limit: T,
    pub tail_ok: bool,
    /// Whether a generator tail hit the summation cap.
    pub tail_truncated: bool,
    pub precision_bits: u32,
}

/// Tail sums `Σ_{n>m} q^λn` for `m = 0..=N`, extending generator sequences
/// until the remaining terms no longer change the sum.
fn tail_bounds<T: Real>(
    seq: &ExponentSequence<T>,
    section: &[T],
    q: &T,
    bits: u32,
) -> (Vec<(usize, T)>, bool) {
    let n = section.len();
    let mut terms: Vec<T> = Vec::new();
    let mut truncated = false;
    let mut k = n + 1;
    let eps = T::exp2i(-(bits as i32), bits);
    let mut running = T::zero();
    while let Some(lambda) = seq.term(k) {
        let t = q.powf(&lambda);
        let negligible = t.is_zero() || t < eps.clone() * running.clone();
        running = running + t.clone();
        terms.push(t);
        if negligible && seq.len() < k {
            break;
        }
        if terms.len() >= MAX_TAIL_TERMS {
            truncated = true;
            break;
        }
        k += 1;
    }
    let mut beyond = T::zero();
    for t in terms.iter().rev() {
        beyond = beyond + t.clone();
    }
    let mut out = Vec::with_capacity(n + 1);
    if beyond.is_strictly_positive() {
        out.push((n, beyond.clone()));
    }
    let mut acc = beyond;
    for m in (0..n).rev() {
        acc = acc + q.powf(&section[m]);
        out.push((m, acc.clone()));
    }
    out.reverse();
    (out, truncated)
}

pub fn eigen_check<T: Real>(spec: &OperatorSpec<T>, g: &GramMatrix<T>) -> Result<EigenReport<T>> {
    let (m, m_adj) = finite_sections(spec, g)?;
    let u = m.diagonal();
    let n = g.dim();
    let tol = g.tolerance();

    let eigen_ok = (0..n).all(|k| {
        let col = m.column(k);
        (0..n).all(|i| if i == k { col[i] == u[k] } else { col[i].is_zero() })
    });

    let mut adjoint_defect = T::zero();
    let mut adjoint_eigen_ok = true;
    for k in 0..n {
        let c = g.inverse_column(k)?;
        let image = m_adj.mul_vec(&c);
        let err = image
            .iter()
            .zip(&c)
            .map(|(a, b)| (a.clone() - u[k].clone() * b.clone()).abs())
            .fold(T::zero(), T::max_of);
        let scale = T::one() + linalg::max_abs(&c);
        adjoint_eigen_ok &= err <= tol.clone() * scale.clone();
        adjoint_defect = T::max_of(adjoint_defect, err / scale);
    }

    let simplicity_ok = (0..n).all(|i| (0..i).all(|j| u[i] != u[j]));
    let kernel_trivial_ok = u.iter().all(|x| !x.is_zero());
    let normality_defect = m.matmul(&m_adj).sub(&m_adj.matmul(&m)).max_abs();

    let bits = g.precision_bits();
    let rho = spec.rho.clone() + T::from_int(0, bits);
    let q = T::from_int(2, bits) * rho.clone() / (T::one() + rho);
    let (bounds, tail_truncated) = tail_bounds(g.sequence(), g.exponents(), &q, bits);
    let tail_ratio_limit = q.powf(g.sequence().gap());
    let tail_ok = bounds.windows(2).all(|w| {
        w[1].1 < w[0].1 && w[1].1.clone() <= tail_ratio_limit.clone() * w[0].1.clone() * (T::one() + tol.clone())
    });

    Ok(EigenReport {
        u,
        eigen_ok,
        adjoint_eigen_ok,
        adjoint_defect,
        simplicity_ok,
        kernel_trivial_ok,
        normality_defect,
        tail_bounds: bounds,
        tail_ratio_limit,
        tail_ok,
        tail_truncated,
        precision_bits: bits,
    })
}

/// Coefficient-wise `a_n ↦ u_n a_n`.
pub fn apply<T: Real>(spec: &OperatorSpec<T>, s: &MuntzSeries<T>) -> Result<MuntzSeries<T>> {
    let used = s.coeffs().len();
    if spec.kind == OperatorKind::DiagonalList && spec.u.len() < used {
        return Err(MuntzError::LengthMismatch {
            expected: spec.u.len(),
            got: used,
        });
    }
    let u = spec.eigenvalues(&s.exponents()[..used])?;
    let coeffs = s
        .coeffs()
        .iter()
        .zip(u)
        .map(|(a, ui)| a.clone() * ui)
        .collect();
    s.with_coeffs(coeffs)
}

/// Disjoint index sets (0-based) covering the section.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Indices kept as powers `e_n`.
    pub first: Vec<usize>,
    /// Indices replaced by duals `r_n`.
    pub second: Vec<usize>,
}

impl Partition {
    pub fn new(mut first: Vec<usize>, mut second: Vec<usize>) -> Self {
        first.sort_unstable();
        second.sort_unstable();
        Partition { first, second }
    }

    /// Partition whose second set is given by the bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let (second, first): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&i| mask >> i & 1 == 1);
        Partition { first, second }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self.first.iter().chain(&self.second) {
            if i >= n {
                return Err(MuntzError::BadPartition(format!("index {i} outside 0..{n}")));
            }
            if seen[i] {
                return Err(MuntzError::BadPartition(format!("index {i} appears twice")));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(MuntzError::BadPartition(format!("index {i} is not covered")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct MixedSystemReport<T> {
    pub partition: Partition,
    pub mixed_matrix_det: T,
    /// `det((G^{-1})[N2, N2])`, computed independently by Cholesky.
    pub inverse_minor_det: T,
    pub min_singular_value: T,
    pub nonsingular: bool,
    /// True when `A` has no interval ending at `r_A`; hereditary
    /// completeness is not known to hold there.
    pub exploratory: bool,
}

fn mixed_matrix<T: Real>(inverse: &Matrix<T>, p: &Partition) -> Matrix<T> {
    let n = inverse.rows();
    let mut cols: Vec<Vec<T>> = vec![Vec::new(); n];
    for &i in &p.first {
        cols[i] = (0..n).map(|r| if r == i { T::one() } else { T::zero() }).collect();
    }
    for &i in &p.second {
        cols[i] = inverse.column(i);
    }
    Matrix::from_columns(&cols)
}

fn check_with_inverse<T: Real>(
    g: &GramMatrix<T>,
    inverse: &Matrix<T>,
    p: &Partition,
) -> Result<MixedSystemReport<T>> {
    p.validate(g.dim())?;
    let mixed = mixed_matrix(inverse, p);
    let mixed_matrix_det = linalg::determinant(&mixed);
    let inverse_minor_det = if p.second.is_empty() {
        T::one()
    } else {
        let minor = inverse.principal(&p.second);
        let l = linalg::cholesky(&minor).map_err(|pivot| MuntzError::NotPositiveDefinite {
            pivot,
            bits: g.precision_bits(),
        })?;
        l.diagonal().into_iter().fold(T::one(), |acc, x| acc * x.clone() * x)
    };
    let min_singular_value = linalg::singular_values(&mixed)
        .pop()
        .unwrap_or_else(T::zero);
    Ok(MixedSystemReport {
        partition: p.clone(),
        mixed_matrix_det,
        inverse_minor_det,
        nonsingular: min_singular_value > g.tolerance(),
        min_singular_value,
        exploratory: !g.domain().contains_top_interval(),
    })
}

pub fn hereditary_check<T: Real>(g: &GramMatrix<T>, p: &Partition) -> Result<MixedSystemReport<T>> {
    check_with_inverse(g, &g.inverse(), p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionSampling {
    /// All `2^N` partitions; refused for `N > 20`.
    All,
    Random { count: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct HereditarySummary<T> {
    pub dim: usize,
    pub partitions_checked: usize,
    pub all_nonsingular: bool,
    /// Every determinant agrees with the inverse minor within `2^{-P/2}`
    /// relative error.
    pub det_identity_ok: bool,
    /// Largest `|det M − det (G^{-1})[N2,N2]| / |det (G^{-1})[N2,N2]|`.
    pub max_det_mismatch: T,
    pub min_singular_value: T,
    pub worst_partition: Partition,
    pub exploratory: bool,
    pub precision_bits: u32,
}

pub fn hereditary_sweep<T: Real>(
    g: &GramMatrix<T>,
    sampling: PartitionSampling,
) -> Result<HereditarySummary<T>> {
    let n = g.dim();
    let partitions: Vec<Partition> = match sampling {
        PartitionSampling::All => {
            if n > 20 {
                return Err(MuntzError::InvalidArgument(format!(
                    "exhaustive sweep over 2^{n} partitions refused; sample instead"
                )));
            }
            (0..1u64 << n).map(|mask| Partition::from_mask(n, mask)).collect()
        }
        PartitionSampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let (second, first) = (0..n).partition(|_| rng.gen::<bool>());
                    Partition { first, second }
                })
                .collect()
        }
    };
    if partitions.is_empty() {
        return Err(MuntzError::InvalidArgument("no partitions to check".into()));
    }
    let inverse = g.inverse();
    let reports = partitions
        .par_iter()
        .map(|p| check_with_inverse(g, &inverse, p))
        .collect::<Result<Vec<_>>>()?;

    let max_det_mismatch = reports
        .iter()
        .map(|r| {
            (r.mixed_matrix_det.clone() - r.inverse_minor_det.clone()).abs()
                / r.inverse_minor_det.abs()
        })
        .fold(T::zero(), T::max_of);
    let det_identity_ok = max_det_mismatch <= g.tolerance();
    let worst = reports
        .iter()
        .min_by(|a, b| {
            a.min_singular_value
                .partial_cmp(&b.min_singular_value)
                .expect("finite singular values")
        })
        .expect("nonempty");
    Ok(HereditarySummary {
        dim: n,
        partitions_checked: reports.len(),
        all_nonsingular: reports.iter().all(|r| r.nonsingular),
        det_identity_ok,
        max_det_mismatch,
        min_singular_value: worst.min_singular_value.clone(),
        worst_partition: worst.partition.clone(),
        exploratory: worst.exploratory,
        precision_bits: g.precision_bits(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelude::*;
    use crate::domain::{DomainSpec, WeightedDomain};
    use crate::exponents::ExponentSpec;
    use crate::gram::{gram, GramOptions};
    use crate::series::evaluate;
    use crate::MpFloat;

    const P: u32 = 256;

    fn q(num: i64, den: i64) -> MpFloat {
        MpFloat::from_int(num, P) / MpFloat::from_int(den, P)
    }

    fn close(a: &MpFloat, b: &MpFloat) -> bool {
        (a.clone() - b.clone()).abs() <= MpFloat::exp2i(-180, P) * (MpFloat::one() + b.abs())
    }

    fn unit(spec: ExponentSpec, n: usize) -> GramMatrix<MpFloat> {
        let wd = WeightedDomain::from_spec(&DomainSpec::unit_interval(), P).unwrap();
        let seq = ExponentSequence::from_spec(&spec, P).unwrap();
        gram(&wd, &seq, n, &GramOptions::default()).unwrap()
    }

    fn fixture() -> GramMatrix<MpFloat> {
        unit(ExponentSpec::explicit(["2", "3"]), 2)
    }

    #[test]
    fn dilation_sections() {
        let g = fixture();
        let (m, adj) = finite_sections(&OperatorSpec::dilation(q(1, 2)), &g).unwrap();
        assert!(close(&m[(0, 0)], &q(1, 4)) && close(&m[(1, 1)], &q(1, 8)));
        assert!(m[(0, 1)].is_zero() && m[(1, 0)].is_zero());
        let expected = [[q(37, 8), q(15, 4)], [q(-21, 4), q(-17, 4)]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(&adj[(i, j)], &expected[i][j]), "{i},{j}: {}", adj[(i, j)]);
            }
        }
    }

    #[test]
    fn spec_errors() {
        let g = fixture();
        let dup = OperatorSpec::diagonal_list(vec![q(1, 4), q(1, 4)], q(1, 2));
        assert_eq!(finite_sections(&dup, &g).unwrap_err().kind(), "DuplicateEigenvalue");
        let zero = OperatorSpec::diagonal_list(vec![q(1, 4), q(0, 1)], q(1, 2));
        assert_eq!(finite_sections(&zero, &g).unwrap_err().kind(), "ZeroEigenvalue");
        let big = OperatorSpec::diagonal_list(vec![q(1, 2), q(1, 8)], q(1, 2));
        assert_eq!(finite_sections(&big, &g).unwrap_err().kind(), "BoundViolation");
        let short = OperatorSpec::diagonal_list(vec![q(1, 4)], q(1, 2));
        assert_eq!(finite_sections(&short, &g).unwrap_err().kind(), "LengthMismatch");
        assert!(finite_sections(&OperatorSpec::dilation(q(1, 1)), &g).is_err());
    }

    #[test]
    fn eigen_report_fixture() {
        let g = fixture();
        let r = eigen_check(&OperatorSpec::dilation(q(1, 2)), &g).unwrap();
        assert!(r.eigen_ok && r.adjoint_eigen_ok && r.simplicity_ok && r.kernel_trivial_ok);
        assert!(r.normality_defect.is_strictly_positive());
        // explicit list of length 2: bounds at m = 0, 1
        assert_eq!(r.tail_bounds.len(), 2);
        assert!(r.tail_ok);
    }

    #[test]
    fn generator_tails_extend() {
        let g = unit(ExponentSpec::power("1", "2", 4), 4);
        let r = eigen_check(&OperatorSpec::dilation(q(1, 2)), &g).unwrap();
        assert_eq!(r.tail_bounds.len(), 5);
        assert!(r.tail_bounds[4].1.is_strictly_positive());
        assert!(r.tail_ok && !r.tail_truncated);
    }

    #[test]
    fn apply_examples() {
        let g = fixture();
        let t = OperatorSpec::dilation(q(1, 2));
        let s = MuntzSeries::on_section(&g, vec![q(1, 1), q(1, 1)]).unwrap();
        let out = apply(&t, &s).unwrap();
        assert!(close(&out.coeffs()[0], &q(1, 4)) && close(&out.coeffs()[1], &q(1, 8)));
        let x = q(3, 5);
        assert!(close(&evaluate(&out, &x).unwrap(), &evaluate(&s, &(x * q(1, 2))).unwrap()));

        let x2 = MuntzSeries::on_section(&g, vec![q(1, 1)]).unwrap();
        assert!(close(&apply(&t, &x2).unwrap().coeffs()[0], &q(1, 4)));
        let zero = MuntzSeries::zero(g.exponents().to_vec(), q(1, 1));
        assert!(apply(&t, &zero).unwrap().coeffs().is_empty());

        let short = OperatorSpec::diagonal_list(vec![q(1, 4)], q(1, 2));
        assert_eq!(apply(&short, &s).unwrap_err().kind(), "LengthMismatch");
    }

    #[test]
    fn mixed_systems_fixture() {
        let g = fixture();
        let r = hereditary_check(&g, &Partition::new(vec![0], vec![1])).unwrap();
        assert!(close(&r.mixed_matrix_det, &q(252, 1)) && r.nonsingular);
        let r = hereditary_check(&g, &Partition::new(vec![0, 1], vec![])).unwrap();
        assert!(close(&r.mixed_matrix_det, &q(1, 1)));
        let r = hereditary_check(&g, &Partition::new(vec![], vec![0, 1])).unwrap();
        assert!(close(&r.mixed_matrix_det, &q(1260, 1)));
        assert!(close(&r.inverse_minor_det, &q(1260, 1)));
        assert!(!r.exploratory);
    }

    #[test]
    fn bad_partitions() {
        let g = fixture();
        for p in [
            Partition::new(vec![0], vec![0, 1]),
            Partition::new(vec![0], vec![]),
            Partition::new(vec![0, 2], vec![1]),
        ] {
            assert_eq!(hereditary_check(&g, &p).unwrap_err().kind(), "BadPartition");
        }
    }

    #[test]
    fn sweep_all_partitions() {
        let g = unit(ExponentSpec::explicit(["1", "2", "3", "4"]), 4);
        let s = hereditary_sweep(&g, PartitionSampling::All).unwrap();
        assert_eq!(s.partitions_checked, 16);
        assert!(s.all_nonsingular && s.det_identity_ok);
        let a = hereditary_sweep(&g, PartitionSampling::Random { count: 10, seed: 7 }).unwrap();
        let b = hereditary_sweep(&g, PartitionSampling::Random { count: 10, seed: 7 }).unwrap();
        assert_eq!(a.worst_partition, b.worst_partition);
    }
}
