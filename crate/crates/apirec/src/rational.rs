//! Exact nonnegative rational arithmetic.
//!
//! Edge lengths are reciprocals of integer co-usage counts, and tree weights
//! are sums of such reciprocals. Ranking and optimality checks compare these
//! quantities exactly, so they are kept as reduced fractions and only
//! converted to floating point at report boundaries.

use std::cmp::Ordering;
use std::fmt;

/// A nonnegative rational number, always stored reduced with `den >= 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u128,
    den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple, `None` on overflow.
pub fn checked_lcm(a: u128, b: u128) -> Option<u128> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// Full 256-bit product of two u128 values as (high, low) limbs.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = (1u128 << 64) - 1;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);

    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;

    let mid = lh + (ll >> 64);
    let (mid, carry1) = mid.overflowing_add(hl);
    let lo = (mid << 64) | (ll & MASK);
    let hi = hh + (mid >> 64) + ((carry1 as u128) << 64);
    (hi, lo)
}

impl Rational {
    pub fn new(num: u128, den: u128) -> Rational {
        assert!(den != 0, "rational with zero denominator");
        if num == 0 {
            return Rational { num: 0, den: 1 };
        }
        let g = gcd(num, den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }

    pub fn zero() -> Rational {
        Rational { num: 0, den: 1 }
    }

    pub fn from_integer(n: u128) -> Rational {
        Rational { num: n, den: 1 }
    }

    /// 1/c, the length of an edge with co-usage count `c`.
    pub fn reciprocal_of(c: u128) -> Rational {
        Rational::new(1, c)
    }

    /// Exact value of a finite nonnegative `f64`, or `None` when it is
    /// negative, non-finite, or needs a denominator beyond `u128` range.
    pub fn from_f64(x: f64) -> Option<Rational> {
        if !x.is_finite() || x < 0.0 {
            return None;
        }
        if x == 0.0 {
            return Some(Rational::zero());
        }
        // Decompose into integer mantissa and power-of-two exponent.
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = if raw_exp == 0 {
            bits & 0xf_ffff_ffff_ffff // subnormal
        } else {
            (bits & 0xf_ffff_ffff_ffff) | (1 << 52)
        };
        let exp = if raw_exp == 0 { -1074 } else { raw_exp - 1075 };
        let mut num = mantissa as u128;
        let mut shift = exp;
        while shift < 0 && num & 1 == 0 {
            num /= 2;
            shift += 1;
        }
        if shift >= 0 {
            // checked_shl only validates the shift amount, not lost bits.
            if shift as u32 >= num.leading_zeros() {
                return None;
            }
            return Some(Rational::new(num << shift, 1));
        }
        if -shift > 127 {
            return None;
        }
        Some(Rational::new(num, 1u128 << (-shift as u32)))
    }

    pub fn num(&self) -> u128 {
        self.num
    }

    pub fn den(&self) -> u128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn reciprocal(&self) -> Option<Rational> {
        if self.num == 0 {
            None
        } else {
            Some(Rational {
                num: self.den,
                den: self.num,
            })
        }
    }

    pub fn checked_add(&self, other: &Rational) -> Option<Rational> {
        let g = gcd(self.den, other.den);
        let lhs_scale = other.den / g;
        let rhs_scale = self.den / g;
        let den = self.den.checked_mul(lhs_scale)?;
        let num = self
            .num
            .checked_mul(lhs_scale)?
            .checked_add(other.num.checked_mul(rhs_scale)?)?;
        Some(Rational::new(num, den))
    }

    pub fn checked_mul(&self, other: &Rational) -> Option<Rational> {
        // Cross-reduce first to keep intermediates small.
        let g1 = gcd(self.num, other.den);
        let g2 = gcd(other.num, self.den);
        let num = (self.num / g1).checked_mul(other.num / g2)?;
        let den = (self.den / g2).checked_mul(other.den / g1)?;
        Some(Rational::new(num, den))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        self.checked_add(&rhs).expect("rational addition overflow")
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        self.checked_mul(&rhs)
            .expect("rational multiplication overflow")
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        // a/b vs c/d == a*d vs c*b, compared in 256 bits so it never overflows.
        mul_wide(self.num, other.den).cmp(&mul_wide(other.num, self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
