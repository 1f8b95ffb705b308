//! Arbitrary-precision binary floating point backed by MPFR.
//!
//! [`MpFloat`] wraps [`rug::Float`]. Binary operations round to the larger of
//! the two operand precisions, so a value created with a small precision (the
//! `zero()`/`one()` constants are 1-bit exact values) adopts the working
//! precision of whatever it is combined with.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Signed, Zero};
use rug::float::Round;
use rug::ops::PowAssign;
use rug::Float;

use crate::scalar::{Real, DEFAULT_PRECISION_BITS};

/// Hard upper bound on requested mantissa width.
pub const MP_MAX_PRECISION_BITS: u32 = 1 << 20;

#[derive(Clone, PartialEq)]
pub struct MpFloat(Float);

impl MpFloat {
    pub fn new(bits: u32) -> Self {
        MpFloat(Float::new(bits))
    }

    pub fn with_val<T>(bits: u32, val: T) -> Self
    where
        Float: rug::Assign<T>,
    {
        MpFloat(Float::with_val(bits, val))
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }

    pub fn into_inner(self) -> Float {
        self.0
    }

    /// Rounds (or exactly widens) to `bits` of mantissa.
    pub fn with_precision(mut self, bits: u32) -> Self {
        self.0.set_prec_round(bits, Round::Nearest);
        self
    }

    fn widened(self, bits: u32) -> Float {
        let mut f = self.0;
        if f.prec() < bits {
            // widening never rounds
            f.set_prec(bits);
        }
        f
    }
}

impl From<Float> for MpFloat {
    fn from(f: Float) -> Self {
        MpFloat(f)
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpFloat({}; {} bits)", self.to_sci_string(20), self.0.prec())
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = <MpFloat as Real>::decimal_digits(self.0.prec());
        f.write_str(&self.to_sci_string(digits))
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binary_op {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign_method:ident) => {
        impl $tr for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                let bits = self.0.prec().max(rhs.0.prec());
                let mut out = self.widened(bits);
                out.$assign_method(&rhs.0);
                MpFloat(out)
            }
        }

        impl<'a> $tr<&'a MpFloat> for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: &'a MpFloat) -> MpFloat {
                let bits = self.0.prec().max(rhs.0.prec());
                let mut out = self.widened(bits);
                out.$assign_method(&rhs.0);
                MpFloat(out)
            }
        }

        impl<'a> $tr<&'a MpFloat> for &'a MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: &'a MpFloat) -> MpFloat {
                self.clone().$method(rhs)
            }
        }

        impl $assign_tr for MpFloat {
            fn $assign_method(&mut self, rhs: MpFloat) {
                self.$assign_method(&rhs);
            }
        }

        impl<'a> $assign_tr<&'a MpFloat> for MpFloat {
            fn $assign_method(&mut self, rhs: &'a MpFloat) {
                if self.0.prec() < rhs.0.prec() {
                    self.0.set_prec(rhs.0.prec());
                }
                self.0.$assign_method(&rhs.0);
            }
        }
    };
}

binary_op!(Add, add, AddAssign, add_assign);
binary_op!(Sub, sub, SubAssign, sub_assign);
binary_op!(Mul, mul, MulAssign, mul_assign);
binary_op!(Div, div, DivAssign, div_assign);

impl Rem for MpFloat {
    type Output = MpFloat;
    fn rem(self, rhs: MpFloat) -> MpFloat {
        let bits = self.0.prec().max(rhs.0.prec());
        let mut out = self.widened(bits);
        out %= &rhs.0;
        MpFloat(out)
    }
}

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(-self.0)
    }
}

impl<'a> Neg for &'a MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(-self.0.clone())
    }
}

impl Zero for MpFloat {
    fn zero() -> Self {
        MpFloat(Float::with_val(rug::float::prec_min(), 0))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for MpFloat {
    fn one() -> Self {
        MpFloat(Float::with_val(rug::float::prec_min(), 1))
    }
}

impl Num for MpFloat {
    type FromStrRadixErr = rug::float::ParseFloatError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32)?;
        Ok(MpFloat(Float::with_val(DEFAULT_PRECISION_BITS, parsed)))
    }
}

impl Signed for MpFloat {
    fn abs(&self) -> Self {
        MpFloat(self.0.clone().abs())
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Self::zero()
        } else {
            self.clone() - other
        }
    }

    fn signum(&self) -> Self {
        if self.0.is_zero() {
            Self::zero()
        } else if self.0.is_sign_negative() {
            -Self::one()
        } else {
            Self::one()
        }
    }

    fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero()
    }

    fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }
}

impl Sum for MpFloat {
    fn sum<I: Iterator<Item = MpFloat>>(iter: I) -> Self {
        iter.fold(MpFloat::zero(), |acc, x| acc + x)
    }
}

impl Real for MpFloat {
    fn precision(&self) -> u32 {
        self.0.prec()
    }

    fn max_precision() -> u32 {
        MP_MAX_PRECISION_BITS
    }

    fn from_int(n: i64, bits: u32) -> Self {
        MpFloat(Float::with_val(bits, n))
    }

    fn from_float(x: f64, bits: u32) -> Self {
        MpFloat(Float::with_val(bits, x))
    }

    fn parse_decimal(s: &str, bits: u32) -> Option<Self> {
        let parsed = Float::parse(s.trim()).ok()?;
        let f = Float::with_val(bits, parsed);
        f.is_finite().then_some(MpFloat(f))
    }

    fn exp2i(e: i32, bits: u32) -> Self {
        let mut f = Float::with_val(bits, 1);
        f <<= e;
        MpFloat(f)
    }

    fn sqrt(&self) -> Self {
        MpFloat(self.0.clone().sqrt())
    }

    fn powf(&self, exponent: &Self) -> Self {
        let bits = self.0.prec().max(exponent.0.prec());
        let mut out = self.clone().widened(bits);
        out.pow_assign(&exponent.0);
        MpFloat(out)
    }

    fn ln(&self) -> Self {
        MpFloat(self.0.clone().ln())
    }

    fn exp(&self) -> Self {
        MpFloat(self.0.clone().exp())
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    fn to_sci_string(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0e0".to_string();
        }
        format!("{:.*e}", digits.max(1), self.0)
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        let bits = a.0.prec().max(b.0.prec());
        if self.0.prec() < bits {
            self.0.set_prec(bits);
        }
        self.0 += &a.0 * &b.0;
    }
}
