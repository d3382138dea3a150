//! Directed fixed-point arithmetic for evaluating closed-form bounds.
//!
//! Values are nonnegative reals stored as an integer mantissa scaled by
//! 10^40, giving 40 decimal digits. Every rounding step is directed (`_up`
//! rounds toward +inf, `_down` toward zero), so an upper bound evaluated
//! with `_up` steps is never smaller than the true value and a lower bound
//! evaluated with `_down` steps is never larger. The only irrational
//! primitive the bound formulas need is the cube root of a rational, which
//! reduces to an integer cube root of the scaled operand.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::cmp::Ordering;
use std::sync::OnceLock;

pub const SCALE_DIGITS: u32 = 40;

fn unit() -> &'static BigUint {
    static UNIT: OnceLock<BigUint> = OnceLock::new();
    UNIT.get_or_init(|| BigUint::from(10u32).pow(SCALE_DIGITS))
}

fn unit_cubed() -> &'static BigUint {
    static UNIT3: OnceLock<BigUint> = OnceLock::new();
    UNIT3.get_or_init(|| unit() * unit() * unit())
}

/// A nonnegative fixed-point real with 40 decimal digits of scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed {
    mant: BigUint,
}

impl Fixed {
    pub fn zero() -> Fixed {
        Fixed { mant: BigUint::zero() }
    }

    pub fn from_int<T: Into<BigUint>>(v: T) -> Fixed {
        Fixed { mant: v.into() * unit() }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn floor_int(&self) -> BigUint {
        &self.mant / unit()
    }

    pub fn to_f64(&self) -> f64 {
        // the mantissa may exceed f64 range; split off the integer part
        let (int, frac) = self.mant.div_rem(unit());
        let int = int.to_f64().unwrap_or(f64::INFINITY);
        let frac = frac.to_f64().unwrap_or(0.0) / 1e40;
        int + frac
    }

    /// Decimal rendering at the full 40-digit scale.
    pub fn to_decimal_string(&self) -> String {
        let (int, frac) = self.mant.div_rem(unit());
        let frac = format!("{:0>width$}", frac.to_string(), width = SCALE_DIGITS as usize);
        format!("{int}.{frac}")
    }

    pub fn mul_down(&self, rhs: &Fixed) -> Fixed {
        Fixed {
            mant: (&self.mant * &rhs.mant) / unit(),
        }
    }

    pub fn mul_up(&self, rhs: &Fixed) -> Fixed {
        Fixed {
            mant: div_ceil(&(&self.mant * &rhs.mant), unit()),
        }
    }

    /// `self / rhs` rounded down; `rhs` must be nonzero.
    pub fn div_down(&self, rhs: &Fixed) -> Fixed {
        Fixed {
            mant: (&self.mant * unit()) / &rhs.mant,
        }
    }

    pub fn div_up(&self, rhs: &Fixed) -> Fixed {
        Fixed {
            mant: div_ceil(&(&self.mant * unit()), &rhs.mant),
        }
    }

    /// Exact subtraction; panics if the result would be negative.
    pub fn sub_exact(&self, rhs: &Fixed) -> Fixed {
        Fixed {
            mant: &self.mant - &rhs.mant,
        }
    }

    pub fn mant(&self) -> &BigUint {
        &self.mant
    }

    #[cfg(test)]
    fn from_mant(mant: BigUint) -> Fixed {
        Fixed { mant }
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.mant.cmp(&other.mant)
    }
}

fn div_ceil(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// `(p/q)^{1/3}` rounded down.
pub fn cbrt_down(p: &BigUint, q: &BigUint) -> Fixed {
    let scaled = (p * unit_cubed()) / q;
    Fixed { mant: scaled.cbrt() }
}

/// `(p/q)^{1/3}` rounded up.
pub fn cbrt_up(p: &BigUint, q: &BigUint) -> Fixed {
    let num = p * unit_cubed();
    let scaled = div_ceil(&num, q);
    let root = scaled.cbrt();
    let exact = &root * &root * &root == scaled && (&num % q).is_zero();
    Fixed {
        mant: if exact { root } else { root + 1u32 },
    }
}
