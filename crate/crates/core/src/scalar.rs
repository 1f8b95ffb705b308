//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which extends the
//! `num-traits` ring/field vocabulary with the handful of transcendental
//! operations and precision controls that Müntz computations need. The trait
//! is implemented for `f32`, `f64` and the arbitrary-precision
//! [`MpFloat`](crate::MpFloat).

use std::fmt::{Debug, Display};

use num_traits::{Num, Signed};

/// Default mantissa width (bits) used when no precision is supplied.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// A real scalar with a (possibly runtime-selected) binary precision.
///
/// Fixed-width types ignore the `bits` argument of the constructors and report
/// their native mantissa width from [`Real::precision`].
pub trait Real:
    Num + Signed + PartialOrd + Clone + Debug + Display + Send + Sync + 'static
{
    /// Mantissa width of this value in bits.
    fn precision(&self) -> u32;

    /// Largest working precision the type can honor.
    fn max_precision() -> u32;

    /// Precision actually used when `bits` is requested.
    fn effective_precision(bits: u32) -> u32 {
        bits.min(Self::max_precision())
    }

    fn from_int(n: i64, bits: u32) -> Self;

    fn from_float(x: f64, bits: u32) -> Self;

    /// Correctly rounded conversion of a decimal literal such as `"0.1"` or
    /// `"-2.5e-3"`. Returns `None` for malformed or non-finite input.
    fn parse_decimal(s: &str, bits: u32) -> Option<Self>;

    /// Exact power of two `2^e`.
    fn exp2i(e: i32, bits: u32) -> Self;

    fn sqrt(&self) -> Self;

    fn powf(&self, exponent: &Self) -> Self;

    fn ln(&self) -> Self;

    fn exp(&self) -> Self;

    fn to_f64(&self) -> f64;

    fn is_finite(&self) -> bool;

    /// Scientific notation with `digits` significant digits.
    fn to_sci_string(&self, digits: usize) -> String;

    /// `self > 0`. Unlike `Signed::is_positive`, false for `+0.0`.
    fn is_strictly_positive(&self) -> bool {
        *self > Self::zero()
    }

    /// `self < 0`. Unlike `Signed::is_negative`, false for `-0.0`.
    fn is_strictly_negative(&self) -> bool {
        *self < Self::zero()
    }

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self);

    /// Half-precision tolerance `2^{-bits/2}`, the acceptance threshold used
    /// for residuals throughout the crate.
    fn half_precision_tolerance(bits: u32) -> Self {
        let p = Self::effective_precision(bits);
        Self::exp2i(-((p / 2) as i32), p)
    }

    /// Number of decimal digits carried by `bits` of mantissa.
    fn decimal_digits(bits: u32) -> usize {
        let p = Self::effective_precision(bits) as f64;
        ((p * std::f64::consts::LOG10_2).floor() as usize).max(1)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

macro_rules! impl_real_for_primitive {
    ($t:ty, $mantissa:expr) => {
        impl Real for $t {
            fn precision(&self) -> u32 {
                $mantissa
            }

            fn max_precision() -> u32 {
                $mantissa
            }

            fn from_int(n: i64, _bits: u32) -> Self {
                n as $t
            }

            fn from_float(x: f64, _bits: u32) -> Self {
                x as $t
            }

            fn parse_decimal(s: &str, _bits: u32) -> Option<Self> {
                let v: $t = s.trim().parse().ok()?;
                v.is_finite().then_some(v)
            }

            fn exp2i(e: i32, _bits: u32) -> Self {
                (2.0 as $t).powi(e)
            }

            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }

            fn powf(&self, exponent: &Self) -> Self {
                <$t>::powf(*self, *exponent)
            }

            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }

            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }

            fn to_sci_string(&self, digits: usize) -> String {
                format!("{:.*e}", digits.saturating_sub(1), self)
            }

            fn add_mul(&mut self, a: &Self, b: &Self) {
                *self += a * b;
            }
        }
    };
}

impl_real_for_primitive!(f32, 24);
impl_real_for_primitive!(f64, 53);
