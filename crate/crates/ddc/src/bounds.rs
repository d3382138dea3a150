//! Closed-form size bounds for DDCs of bounded diameter, evaluated exactly.
//!
//! Integer quantities use arbitrary precision. Real-valued bounds are
//! evaluated in 40-digit fixed point with directed rounding: upper bounds
//! round up, lower bounds round down, so a reported bound is never invalid
//! due to rounding. Lower-bound values below 1 carry no information and are
//! flagged as vacuous instead of being clamped.

use crate::enumerate::ball_size;
use crate::precise::{cbrt_down, cbrt_up, Fixed};
use crate::word::GroupCtx;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

/// Largest `m` with `m(m-1) <= |B_d(e)|`: every DDC of diameter `d` has all
/// its `m(m-1)` differences inside the ball of radius `d`.
pub fn elementary_bound(ctx: &GroupCtx, d: u32) -> BigUint {
    let ball = ball_size(ctx, d);
    let mut m = ball.sqrt();
    while &m * (&m - 1u32) > ball {
        m -= 1u32;
    }
    while (&m + 1u32) * &m <= ball {
        m += 1u32;
    }
    m
}

/// Largest subset of diameter at most `d`, DDC or not. For even `d` this is
/// `|B_{d/2}|` (tight); for odd `d` it is the union of two balls of radius
/// `ρ = (d-1)/2` with centres at distance 1. The second ball contributes
/// only the `(2n-1)^ρ` elements at distance exactly `ρ` from its centre
/// whose geodesic to the first centre passes through the second; anything
/// nearer already lies in the first ball.
pub fn max_subset_size(ctx: &GroupCtx, d: u32) -> BigUint {
    if d.is_multiple_of(2) {
        return ball_size(ctx, d / 2);
    }
    let rho = d / 2;
    let q = BigUint::from(ctx.alphabet_size() - 1);
    ball_size(ctx, rho) + q.pow(rho)
}

/// The closed-form upper bound `c(n) (2n-1)^{d/3}` with
/// `c(n) = 2n(4n²-3n+1) / ((2n-1)^{1/3}((2n-1)^{2/3}-1))`, evaluated with
/// upward rounding. The constant factor is reported separately.
#[derive(Debug, Clone)]
pub struct ThmUpperBound {
    pub constant: Fixed,
    pub value: Fixed,
}

pub fn thm_upper_bound(ctx: &GroupCtx, d: u32) -> Result<ThmUpperBound> {
    if ctx.rank() < 2 {
        return Err(Error::RankTooSmall {
            rank: ctx.rank(),
            needed: "the upper-bound theorem needs rank >= 2",
        });
    }
    if d < 1 {
        return Err(Error::BadDiameter {
            d: d as u64,
            why: "the upper-bound display needs d >= 1",
        });
    }
    let n = ctx.rank() as u64;
    let q = BigUint::from(2 * n - 1);
    let a = Fixed::from_int(2 * n * (4 * n * n - 3 * n + 1));
    let one = BigUint::one();
    // denominator q^{1/3}(q^{2/3}-1), rounded down
    let denom = cbrt_down(&q, &one).mul_down(&cbrt_down(&(&q * &q), &one).sub_exact(&Fixed::from_int(1u32)));
    let constant = a.div_up(&denom);
    let growth = cbrt_up(&q.pow(d), &one);
    let value = constant.mul_up(&growth);
    Ok(ThmUpperBound { constant, value })
}

/// Floor of the upper bound, usable as an integfor search caps.
pub fn thm_upper_floor(ctx: &GroupCtx, d: u32) -> Result<BigUint> {
    Ok(thm_upper_bound(ctx, d)?.value.floor_int())
}

/// Bound on the expected number of bad quadruples in the randomized
/// construction: `(d/3 - 1) · 2n · (2n-1)^{d/3 - 4γ - 1}`, exact (the
/// exponent may be negative, so the value is a rational).
pub fn eta_bound(ctx: &GroupCtx, d: u32, gamma: u32) -> Result<BigRational> {
    if d < 6 || !d.is_multiple_of(6) {
        return Err(Error::BadDiameter {
            d: d as u64,
            why: "eta bound needs d >= 6 with d divisible by 6",
        });
    }
    if gamma < 1 {
        return Err(Error::BadDiameter {
            d: d as u64,
            why: "eta bound needs gamma >= 1",
        });
    }
    let n = ctx.rank() as i64;
    let q = BigInt::from(2 * n - 1);
    let factor = BigRational::from_integer(BigInt::from((d as i64 / 3 - 1) * 2 * n));
    let exponent = d as i64 / 3 - 4 * gamma as i64 - 1;
    let power = if exponent >= 0 {
        BigRational::from_integer(q.pow(exponent as u32))
    } else {
        BigRational::new(BigInt::one(), q.pow((-exponent) as u32))
    };
    Ok(factor * power)
}

/// The probabilistic lower bound `2n(2n-1)^{d/3 - (4/3)log_{2n-1}(d/3) - 5}`
/// for even `d`, rounded down; odd `d` is evaluated at `d - 1`. Using
/// `q^{log_q(d/3)} = d/3`, the value is `2n · (81 q^{d-15} / d⁴)^{1/3}`,
/// which needs only an integer cube root.
#[derive(Debug, Clone)]
pub struct LowerBoundValue {
    pub value: Fixed,
    pub vacuous: bool,
    pub d_used: u32,
}

pub fn lower_bound_formula(ctx: &GroupCtx, d: u32) -> Result<LowerBoundValue> {
    if ctx.rank() < 2 {
        return Err(Error::RankTooSmall {
            rank: ctx.rank(),
            needed: "the lower-bound display needs rank >= 2",
        });
    }
    if d < 6 {
        return Err(Error::BadDiameter {
            d: d as u64,
            why: "the lower-bound display needs d >= 6",
        });
    }
    let d_used = if d.is_multiple_of(2) { d } else { d - 1 };
    let n = ctx.rank() as u64;
    let q = BigUint::from(2 * n - 1);
    let d_big = BigUint::from(d_used);
    let (p, s) = if d_used >= 15 {
        (BigUint::from(81u32) * q.pow(d_used - 15), d_big.pow(4))
    } else {
        (BigUint::from(81u32), d_big.pow(4) * q.pow(15 - d_used))
    };
    let value = Fixed::from_int(2 * n).mul_down(&cbrt_down(&p, &s));
    let vacuous = value < Fixed::from_int(1u32);
    Ok(LowerBoundValue {
        value,
        vacuous,
        d_used,
    })
}

/// All bounds for one `(n, d)`, for reports and cross-validation.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub n: u16,
    pub d: u32,
    pub ball: BigUint,
    pub elementary: BigUint,
    pub subset_max: BigUint,
    pub thm_upper: Option<ThmUpperBound>,
    pub lower_formula: Option<LowerBoundValue>,
    pub eta: Option<BigRational>,
    pub mirror_size: Option<BigUint>,
}

pub fn bounds_report(ctx: &GroupCtx, d: u32, gamma: Option<u32>) -> Bounds {
    let n = ctx.rank();
    let thm_upper = (n >= 2 && d >= 1).then(|| thm_upper_bound(ctx, d).expect("preconditions checked"));
    let lower_formula =
        (n >= 2 && d >= 6).then(|| lower_bound_formula(ctx, d).expect("preconditions checked"));
    let eta = match gamma {
        Some(g) if d >= 6 && d.is_multiple_of(6) && g >= 1 => Some(eta_bound(ctx, d, g).expect("checked")),
        _ => None,
    };
    let mirror_size = (n >= 2 && d >= 4 && d.is_multiple_of(4)).then(|| {
        BigUint::from(ctx.alphabet_size()) * BigUint::from(ctx.alphabet_size() - 1).pow(d / 4 - 1)
    });
    Bounds {
        n,
        d,
        ball: ball_size(ctx, d),
        elementary: elementary_bound(ctx, d),
        subset_max: max_subset_size(ctx, d),
        thm_upper,
        lower_formula,
        eta,
        mirror_size,
    }
}

impl Bounds {
    /// Machine-readable report; each real-valued bound carries its direction
    /// and rounding mode.
    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "n": self.n,
            "d": self.d,
            "ball": self.ball.to_string(),
            "elementary": self.elementary.to_string(),
            "subset_max": self.subset_max.to_string(),
        });
        let map = obj.as_object_mut().unwrap();
        if let Some(t) = &self.thm_upper {
            map.insert(
                "thm_constant".into(),
                real_bound(&t.constant.to_decimal_string(), t.constant.to_f64(), "upper", "up"),
            );
            map.insert(
                "thm_upper".into(),
                real_bound(&t.value.to_decimal_string(), t.value.to_f64(), "upper", "up"),
            );
        }
        if let Some(l) = &self.lower_formula {
            let mut v = real_bound(&l.value.to_decimal_string(), l.value.to_f64(), "lower", "down");
            let m = v.as_object_mut().unwrap();
            m.insert("vacuous".into(), json!(l.vacuous));
            m.insert("d_used".into(), json!(l.d_used));
            map.insert("lower_formula".into(), v);
        }
        if let Some(eta) = &self.eta {
            let mut v = real_bound(&eta.to_string(), eta.to_f64().unwrap_or(f64::NAN), "upper", "exact");
            v.as_object_mut()
                .unwrap()
                .insert("note".into(), json!("bound on the expected number of bad quadruples"));
            map.insert("eta".into(), v);
        }
        if let Some(m_size) = &self.mirror_size {
            map.insert("mirror_size".into(), json!(m_size.to_string()));
        }
        obj
    }
}

fn real_bound(value: &str, approx: f64, direction: &str, rounding: &str) -> Value {
    json!({
        "value": value,
        "approx": approx,
        "direction": direction,
        "rounding": rounding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::iter_ball;
    use crate::word::Word;
    use std::collections::HashSet;

    fn ctx(n: u16) -> GroupCtx {
        GroupCtx::new(n).unwrap()
    }

    #[test]
    fn elementary_examples() {
        assert_eq!(elementary_bound(&ctx(2), 0), BigUint::from(1u32));
        assert_eq!(elementary_bound(&ctx(2), 2), BigUint::from(4u32));
        assert_eq!(elementary_bound(&ctx(2), 4), BigUint::from(13u32));
    }

    #[test]
    fn elementary_is_the_quadratic_inversion() {
        for n in 2u16..=5 {
            for d in 0..=20u32 {
                let c = ctx(n);
                let m = elementary_bound(&c, d);
                let ball = ball_size(&c, d);
                assert!(&m * (&m - 1u32) <= ball);
                assert!((&m + 1u32) * &m > ball);
            }
        }
    }

    #[test]
    fn max_subset_examples() {
        assert_eq!(max_subset_size(&ctx(2), 2), BigUint::from(5u32));
        // |B_1(e) ∪ B_1(x1)| = 5 + 3: the two balls share e and x1
        assert_eq!(max_subset_size(&ctx(2), 3), BigUint::from(8u32));
        assert_eq!(max_subset_size(&ctx(2), 0), BigUint::from(1u32));
        assert_eq!(max_subset_size(&ctx(2), 1), BigUint::from(2u32));
    }

    #[test]
    fn odd_max_subset_matches_two_ball_union_oracle() {
        // brute force: |B_rho(e) ∪ B_rho(x1)| by enumerating B_{rho+1}(e)
        for n in [2u16, 3] {
            let c = ctx(n);
            let x1 = Word::reduce(&[c.check_letter(1).unwrap()], &c).unwrap();
            for d in [1u32, 3, 5] {
                let rho = d / 2;
                let mut union: HashSet<Word> = HashSet::new();
                for w in iter_ball(&c, rho + 1) {
                    if w.len() <= rho as usize || x1.dist(&w) <= rho as usize {
                        union.insert(w);
                    }
                }
                assert_eq!(BigUint::from(union.len()), max_subset_size(&c, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn even_max_subset_is_half_ball() {
        for n in 2u16..=4 {
            for d in (2..=20u32).step_by(2) {
                assert_eq!(max_subset_size(&ctx(n), d), ball_size(&ctx(n), d / 2));
            }
        }
    }

    #[test]
    fn thm_constant_matches_independent_evaluation() {
        // independent double-precision route through libm
        let t = thm_upper_bound(&ctx(2), 3).unwrap();
        let expect = 44.0 / (3f64.powf(1.0 / 3.0) * (3f64.powf(2.0 / 3.0) - 1.0));
        let got = t.constant.to_f64();
        assert!(((got - expect) / expect).abs() < 1e-9, "{got} vs {expect}");
        // frozen 35-digit evaluation (Newton iteration on decimals)
        assert!(t
            .constant
            .to_decimal_string()
            .starts_with("28.24585964561923697940744822061339261"));
        let t3 = thm_upper_bound(&ctx(3), 1).unwrap();
        assert!(t3
            .constant
            .to_decimal_string()
            .starts_with("51.06345646023489141718126441200011265"));
    }

    #[test]
    fn thm_value_examples() {
        // d = 3: the growth factor is exactly 3
        let t = thm_upper_bound(&ctx(2), 3).unwrap();
        assert!(t
            .value
            .to_decimal_string()
            .starts_with("84.7375789368577109382223446618401778"));
        // d = 6, n = 3: constant × 25
        let t = thm_upper_bound(&ctx(3), 6).unwrap();
        assert!(t
            .value
            .to_decimal_string()
            .starts_with("1276.586411505872285429531610300002816"));
    }

    #[test]
    fn thm_ratio_constant_in_d() {
        for n in [2u16, 3] {
            let c = ctx(n);
            let q = BigUint::from(2 * n as u32 - 1);
            for d in 1..=30u32 {
                let a = thm_upper_bound(&c, d).unwrap().value;
                let b = thm_upper_bound(&c, d + 3).unwrap().value;
                // b == q·a up to a few ulps of directed rounding
                let qa = a.mant() * &q;
                let diff = if b.mant() > &qa {
                    b.mant() - &qa
                } else {
                    &qa - b.mant()
                };
                // directed rounding perturbs each value by O(constant) ulps,
                // so the mismatch stays far below one part in 10^35
                assert!(diff <= BigUint::from(1000u32), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn thm_preconditions() {
        assert!(matches!(
            thm_upper_bound(&ctx(1), 3),
            Err(Error::RankTooSmall { .. })
        ));
        assert!(matches!(
            thm_upper_bound(&ctx(2), 0),
            Err(Error::BadDiameter { .. })
        ));
    }

    #[test]
    fn eta_examples() {
        let c = ctx(2);
        assert_eq!(
            eta_bound(&c, 24, 1).unwrap(),
            BigRational::from_integer(BigInt::from(756))
        );
        assert_eq!(
            eta_bound(&c, 6, 1).unwrap(),
            BigRational::new(BigInt::from(4), BigInt::from(27))
        );
        assert_eq!(
            eta_bound(&c, 12, 1).unwrap(),
            BigRational::from_integer(BigInt::from(4))
        );
        assert!(eta_bound(&c, 7, 1).is_err());
        assert!(eta_bound(&c, 12, 0).is_err());
    }

    #[test]
    fn lower_formula_examples() {
        let c = ctx(2);
        // 81·3^9/24^4 = (27/16)^3 exactly, so the value is exactly 6.75
        let l = lower_bound_formula(&c, 24).unwrap();
        assert_eq!(l.value, Fixed::from_int(27u32).div_down(&Fixed::from_int(4u32)));
        assert!(!l.vacuous);
        // independent f64 route through the logarithmic form
        let f = |n: f64, d: f64| {
            let q = 2.0 * n - 1.0;
            2.0 * n * q.powf(d / 3.0 - 4.0 / 3.0 * (d / 3.0).ln() / q.ln() - 5.0)
        };
        for (n, d) in [(2u16, 24u32), (2, 30), (3, 30), (2, 60)] {
            let got = lower_bound_formula(&ctx(n), d).unwrap().value.to_f64();
            let expect = f(n as f64, d as f64);
            assert!(((got - expect) / expect).abs() < 1e-9, "n={n} d={d}: {got} vs {expect}");
        }
        // vacuous at small d
        let small = lower_bound_formula(&c, 6).unwrap();
        assert!(small.vacuous);
        assert!(small
            .value
            .to_decimal_string()
            .starts_with("0.058792631554377758324137245898974"));
    }

    #[test]
    fn lower_formula_odd_d_uses_previous_even() {
        let c = ctx(2);
        let odd = lower_bound_formula(&c, 7).unwrap();
        let even = lower_bound_formula(&c, 6).unwrap();
        assert_eq!(odd.d_used, 6);
        assert_eq!(odd.value, even.value);
        assert!(lower_bound_formula(&c, 5).is_err());
    }

    #[test]
    fn lower_formula_monotone_in_even_d() {
        for n in [2u16, 3] {
            let c = ctx(n);
            let mut prev = lower_bound_formula(&c, 6).unwrap().value;
            for d in (8..=600u32).step_by(2) {
                let cur = lower_bound_formula(&c, d).unwrap().value;
                assert!(cur > prev, "n={n} d={d}");
                prev = cur;
            }
        }
    }

    #[test]
    fn lower_at_most_upper_when_meaningful() {
        for n in 2u16..=5 {
            let c = ctx(n);
            for d in (6..=60u32).step_by(2) {
                let lo = lower_bound_formula(&c, d).unwrap();
                let hi = thm_upper_bound(&c, d).unwrap();
                if !lo.vacuous {
                    assert!(lo.value <= hi.value, "n={n} d={d}");
                }
            }
        }
    }

    #[test]
    fn mirror_size_below_upper_bound() {
        for n in 2u16..=5 {
            let c = ctx(n);
            for d in (4..=60u32).step_by(4) {
                let b = bounds_report(&c, d, None);
                let mirror = b.mirror_size.unwrap();
                let cap = b.thm_upper.unwrap().value;
                assert!(Fixed::from_int(mirror) <= cap, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn report_examples() {
        let b = bounds_report(&ctx(2), 2, None);
        assert_eq!(b.elementary, BigUint::from(4u32));
        assert_eq!(b.subset_max, BigUint::from(5u32));
        assert!(b.eta.is_none());

        let b = bounds_report(&ctx(2), 24, Some(1));
        assert_eq!(b.eta.unwrap(), BigRational::from_integer(BigInt::from(756)));
        assert_eq!(b.mirror_size.unwrap(), BigUint::from(4u32 * 3u32.pow(5)));

        let b = bounds_report(&ctx(2), 0, None);
        assert_eq!(b.ball, BigUint::from(1u32));
        assert_eq!(b.elementary, BigUint::from(1u32));
        assert!(b.thm_upper.is_none());

        let json = bounds_report(&ctx(2), 24, Some(1)).to_json();
        assert_eq!(json["eta"]["approx"], 756.0);
        assert_eq!(json["thm_upper"]["direction"], "upper");
        assert_eq!(json["thm_upper"]["rounding"], "up");
        assert_eq!(json["lower_formula"]["rounding"], "down");
    }

    #[test]
    fn elementary_never_exceeds_subset_max() {
        for n in 2u16..=5 {
            let c = ctx(n);
            for d in (2..=60u32).step_by(2) {
                assert!(elementary_bound(&c, d) <= max_subset_size(&c, d), "n={n} d={d}");
            }
        }
    }
}
