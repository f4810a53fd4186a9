use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An exact dyadic rational `numerator / 2^exponent`.
///
/// Values are kept canonical: the numerator is odd, or the value is zero and
/// the exponent is zero. Structural equality is therefore value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: i64) -> Self {
        let mut d = Dyadic { num: num.into(), exp };
        d.canonicalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.exp <= 0
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz as i64;
        }
    }

    /// Multiplies by `2^k` exactly.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { num: self.num.clone(), exp: self.exp - k }
    }

    /// Numerators of `self` and `other` over the common denominator `2^e`.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.exp.max(other.exp);
        let a = &self.num << ((e - self.exp) as usize);
        let b = &other.num << ((e - other.exp) as usize);
        (a, b, e)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits() as i64;
        if bits <= 53 {
            let m = self.num.to_f64().unwrap();
            return m * 2f64.powi(-(self.exp.clamp(-2000, 2000) as i32));
        }
        // keep the top 60 bits so the mantissa converts exactly enough
        let shift = bits - 60;
        let top = (&self.num >> (shift as usize)).to_f64().unwrap();
        top * 2f64.powf((shift - self.exp) as f64)
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn signum(&self) -> i32 {
        if self.num.is_positive() {
            1
        } else if self.num.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Exact midpoint `(a + b) / 2`.
    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        (self + other).shl(-1)
    }

    /// `(p, q)` with value `p / 2^q`, `p` odd or zero.
    pub fn parts(&self) -> (BigInt, i64) {
        (self.num.clone(), self.exp)
    }

    /// Floor of the value as a big integer.
    pub fn floor(&self) -> BigInt {
        if self.exp <= 0 {
            &self.num << ((-self.exp) as usize)
        } else {
            let d = BigInt::one() << (self.exp as usize);
            self.num.div_floor(&d)
        }
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else if self.exp > 0 {
            write!(f, "{}/2^{}", self.num, self.exp)
        } else {
            write!(f, "{}*2^{}", self.num, -self.exp)
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

/// Wire form `["num", "exp"]`.
impl Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.num.to_string(), self.exp.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [n, e] = <[String; 2]>::deserialize(d)?;
        let num: BigInt = n.parse().map_err(serde::de::Error::custom)?;
        let exp: i64 = e.parse().map_err(serde::de::Error::custom)?;
        Ok(Dyadic::new(num, exp))
    }
}
