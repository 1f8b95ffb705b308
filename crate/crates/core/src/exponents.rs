//! Exponent sequences `λ_1 < λ_2 < …` for Müntz systems.

use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::{MuntzError, Result};
use crate::scalar::Real;

/// JSON exponent descriptor: `{"kind":"explicit","values":["2","3","5"]}` or
/// `{"kind":"power","c":"1","beta":"2","count":20}` for `λ_n = c·n^β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExponentSpec {
    Explicit { values: Vec<Decimal> },
    Power { c: Decimal, beta: Decimal, count: usize },
}

impl ExponentSpec {
    pub fn explicit<I, D>(values: I) -> Self
    where
        I: IntoIterator<Item = D>,
        D: Into<Decimal>,
    {
        ExponentSpec::Explicit {
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn power(c: impl Into<Decimal>, beta: impl Into<Decimal>, count: usize) -> Self {
        ExponentSpec::Power {
            c: c.into(),
            beta: beta.into(),
            count,
        }
    }

    /// Same descriptor asking for `count` terms. Explicit lists are
    /// truncated, never extended.
    pub fn with_count(&self, count: usize) -> Self {
        match self {
            ExponentSpec::Explicit { values } => ExponentSpec::Explicit {
                values: values.iter().take(count).cloned().collect(),
            },
            ExponentSpec::Power { c, beta, .. } => ExponentSpec::Power {
                c: c.clone(),
                beta: beta.clone(),
                count,
            },
        }
    }

    pub fn is_generator(&self) -> bool {
        matches!(self, ExponentSpec::Power { .. })
    }
}

/// Status of `Σ 1/λ_n < ∞`, which no finite prefix can decide on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summability {
    SummableCertified,
    NonsummableCertified,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct ExponentSequence<T> {
    values: Vec<T>,
    gap: T,
    summability: Summability,
    spec: ExponentSpec,
    precision_bits: u32,
}

impl<T: Real> ExponentSequence<T> {
    pub fn from_spec(spec: &ExponentSpec, bits: u32) -> Result<Self> {
        let bits = T::effective_precision(bits);
        let (values, summability) = match spec {
            ExponentSpec::Explicit { values } => {
                if values.is_empty() {
                    return Err(MuntzError::InvalidArgument("empty exponent list".into()));
                }
                let parsed = values
                    .iter()
                    .map(|d| d.parse::<T>(bits))
                    .collect::<Result<Vec<T>>>()?;
                (parsed, Summability::Unknown)
            }
            ExponentSpec::Power { c, beta, count } => {
                if *count == 0 {
                    return Err(MuntzError::InvalidGenerator("count must be at least 1".into()));
                }
                let c: T = c.parse(bits)?;
                let beta: T = beta.parse(bits)?;
                if !c.is_strictly_positive() {
                    return Err(MuntzError::InvalidGenerator(format!("c = {c} must be positive")));
                }
                if !beta.is_strictly_positive() {
                    return Err(MuntzError::InvalidGenerator(format!(
                        "beta = {beta} must be positive"
                    )));
                }
                let tag = if beta > T::one() {
                    Summability::SummableCertified
                } else {
                    Summability::NonsummableCertified
                };
                let values = (1..=*count)
                    .map(|k| power_term(&c, &beta, k, bits))
                    .collect();
                (values, tag)
            }
        };

        for (index, v) in values.iter().enumerate() {
            if !v.is_strictly_positive() {
                return Err(MuntzError::NonPositive {
                    index,
                    value: v.to_string(),
                });
            }
        }
        for (index, pair) in values.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(MuntzError::NonIncreasing { index: index + 1 });
            }
        }
        let gap = if values.len() == 1 {
            // distance to the origin stands in when there is no pair
            values[0].clone()
        } else {
            values
                .windows(2)
                .map(|p| p[1].clone() - p[0].clone())
                .reduce(T::min_of)
                .expect("at least one pair")
        };

        Ok(ExponentSequence {
            values,
            gap,
            summability,
            spec: spec.clone(),
            precision_bits: bits,
        })
    }

    pub fn at_precision(&self, bits: u32) -> Result<Self> {
        Self::from_spec(&self.spec, bits)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Minimum consecutive difference over the stored prefix.
    pub fn gap(&self) -> &T {
        &self.gap
    }

    pub fn summability(&self) -> Summability {
        self.summability
    }

    pub fn spec(&self) -> &ExponentSpec {
        &self.spec
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// `λ_k` (1-based) beyond the stored prefix; only generators can extend.
    pub fn term(&self, k: usize) -> Option<T> {
        if k >= 1 && k <= self.values.len() {
            return Some(self.values[k - 1].clone());
        }
        match &self.spec {
            ExponentSpec::Power { c, beta, .. } if k >= 1 => {
                let c: T = c.parse(self.precision_bits).ok()?;
                let beta: T = beta.parse(self.precision_bits).ok()?;
                Some(power_term(&c, &beta, k, self.precision_bits))
            }
            _ => None,
        }
    }
}

fn power_term<T: Real>(c: &T, beta: &T, k: usize, bits: u32) -> T {
    c.clone() * T::from_int(k as i64, bits).powf(beta)
}
