//! Finite unions of intervals carrying a piecewise power-law weight.
//!
//! On each interval `[lo, hi]` the weight is `coeff * x^power`, so every
//! weighted power moment has a closed form and Gram entries carry no
//! quadrature error.

use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::{MuntzError, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub lo: Decimal,
    pub hi: Decimal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub coeff: Decimal,
    pub power: Decimal,
}

/// JSON domain descriptor:
/// `{"intervals":[{"lo":"0","hi":"1"}],"weights":[{"coeff":"1","power":"0"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub intervals: Vec<IntervalSpec>,
    pub weights: Vec<WeightSpec>,
}

impl DomainSpec {
    pub fn new<A, B, C, D>(intervals: Vec<(A, B)>, weights: Vec<(C, D)>) -> Self
    where
        A: Into<Decimal>,
        B: Into<Decimal>,
        C: Into<Decimal>,
        D: Into<Decimal>,
    {
        DomainSpec {
            intervals: intervals
                .into_iter()
                .map(|(lo, hi)| IntervalSpec {
                    lo: lo.into(),
                    hi: hi.into(),
                })
                .collect(),
            weights: weights
                .into_iter()
                .map(|(coeff, power)| WeightSpec {
                    coeff: coeff.into(),
                    power: power.into(),
                })
                .collect(),
        }
    }

    /// `[0, hi]` with unit weight.
    pub fn interval(hi: impl Into<Decimal>) -> Self {
        Self::new(vec![("0", hi.into())], vec![("1", "0")])
    }

    pub fn unit_interval() -> Self {
        Self::interval("1")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightPiece<T> {
    pub coeff: T,
    pub power: T,
}

/// The measurable set `A` (sorted, pairwise disjoint closed intervals) together
/// with the weight `w`, at a fixed working precision.
#[derive(Clone, Debug)]
pub struct WeightedDomain<T> {
    spec: DomainSpec,
    intervals: Vec<Interval<T>>,
    weights: Vec<WeightPiece<T>>,
    r_a: T,
    r_w: T,
    total_measure: T,
    weight_mass: T,
    precision_bits: u32,
}

impl<T: Real> WeightedDomain<T> {
    pub fn from_spec(spec: &DomainSpec, bits: u32) -> Result<Self> {
        if spec.intervals.is_empty() {
            return Err(MuntzError::InvalidArgument("domain has no intervals".into()));
        }
        if spec.intervals.len() != spec.weights.len() {
            return Err(MuntzError::InvalidArgument(format!(
                "{} intervals but {} weight pieces",
                spec.intervals.len(),
                spec.weights.len()
            )));
        }
        let bits = T::effective_precision(bits);
        let zero = T::zero();
        let minus_one = -T::one();

        let mut rows = Vec::with_capacity(spec.intervals.len());
        for (iv, wt) in spec.intervals.iter().zip(&spec.weights) {
            let lo: T = iv.lo.parse(bits)?;
            let hi: T = iv.hi.parse(bits)?;
            let coeff: T = wt.coeff.parse(bits)?;
            let power: T = wt.power.parse(bits)?;
            if lo < zero {
                return Err(MuntzError::NegativeEndpoint(iv.lo.to_string()));
            }
            if hi <= lo {
                return Err(MuntzError::DegenerateInterval {
                    lo: iv.lo.to_string(),
                    hi: iv.hi.to_string(),
                });
            }
            if coeff <= zero {
                return Err(MuntzError::NonpositiveWeight(wt.coeff.to_string()));
            }
            // away from 0 every power is integrable; at 0 we need power > -1
            if lo.is_zero() && power <= minus_one {
                return Err(MuntzError::NonintegrableWeight {
                    power: wt.power.to_string(),
                });
            }
            rows.push((iv.clone(), wt.clone(), Interval { lo, hi }, WeightPiece { coeff, power }));
        }
        rows.sort_by(|a, b| a.2.lo.partial_cmp(&b.2.lo).expect("finite endpoints"));
        for pair in rows.windows(2) {
            if pair[1].2.lo <= pair[0].2.hi {
                let show = |s: &IntervalSpec| format!("{}, {}", s.lo, s.hi);
                return Err(MuntzError::OverlappingIntervals(show(&pair[0].0), show(&pair[1].0)));
            }
        }

        let mut sorted_spec = DomainSpec {
            intervals: Vec::with_capacity(rows.len()),
            weights: Vec::with_capacity(rows.len()),
        };
        let mut intervals = Vec::with_capacity(rows.len());
        let mut weights = Vec::with_capacity(rows.len());
        for (iv, wt, interval, weight) in rows {
            sorted_spec.intervals.push(iv);
            sorted_spec.weights.push(wt);
            intervals.push(interval);
            weights.push(weight);
        }

        let r_a = intervals.last().expect("nonempty").hi.clone();
        let total_measure = intervals
            .iter()
            .fold(T::zero(), |acc, iv| acc + (iv.hi.clone() - iv.lo.clone()));
        let mut domain = WeightedDomain {
            spec: sorted_spec,
            intervals,
            weights,
            r_w: r_a.clone(),
            r_a,
            total_measure,
            weight_mass: T::zero(),
            precision_bits: bits,
        };
        domain.weight_mass = domain.power_moment(&T::zero())?;
        Ok(domain)
    }

    /// Rebuilds from the decimal source at a different precision.
    pub fn at_precision(&self, bits: u32) -> Result<Self> {
        Self::from_spec(&self.spec, bits)
    }

    /// `∫_A x^s w(x) dx`, summed over pieces in closed form.
    pub fn power_moment(&self, s: &T) -> Result<T> {
        if s.is_strictly_negative() {
            return Err(MuntzError::InvalidArgument(format!(
                "moment order {s} must be nonnegative"
            )));
        }
        let mut total = T::zero();
        for (iv, wt) in self.intervals.iter().zip(&self.weights) {
            total = total + piece_moment(iv, wt, s)?;
        }
        Ok(total)
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn weights(&self) -> &[WeightPiece<T>] {
        &self.weights
    }

    /// Essential supremum of `A`.
    pub fn r_a(&self) -> &T {
        &self.r_a
    }

    /// Weighted essential supremum; equals `r_a` for weights positive on `A`.
    pub fn r_w(&self) -> &T {
        &self.r_w
    }

    pub fn total_measure(&self) -> &T {
        &self.total_measure
    }

    pub fn weight_mass(&self) -> &T {
        &self.weight_mass
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Whether `A ⊇ [a, r_A]` for some `a < r_A`. Always true for a finite
    /// union of nondegenerate intervals.
    pub fn contains_top_interval(&self) -> bool {
        self.intervals
            .last()
            .map(|iv| iv.lo < iv.hi && iv.hi == self.r_a)
            .unwrap_or(false)
    }
}

fn piece_moment<T: Real>(iv: &Interval<T>, wt: &WeightPiece<T>, s: &T) -> Result<T> {
    let e = s.clone() + wt.power.clone() + T::one();
    if e.is_zero() {
        // x^{-1}: only reachable when lo > 0
        return Ok(wt.coeff.clone() * (iv.hi.ln() - iv.lo.ln()));
    }
    if iv.lo.is_zero() {
        if !e.is_strictly_positive() {
            return Err(MuntzError::NonintegrableWeight {
                power: wt.power.to_string(),
            });
        }
        return Ok(wt.coeff.clone() * iv.hi.powf(&e) / e);
    }
    Ok(wt.coeff.clone() * (iv.hi.powf(&e) - iv.lo.powf(&e)) / e)
}
