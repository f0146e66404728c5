use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

/// An exact complex number `(re + im·i) / 2^denom_log` with integer numerators.
///
/// Values are kept in canonical form: either `denom_log == 0`, or at least one
/// numerator is odd. Zero is always `(0 + 0i) / 1`. Because the representative
/// is unique, structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DyadicGaussian {
    re: BigInt,
    im: BigInt,
    denom_log: u32,
}

fn trailing_zeros(x: &BigInt) -> Option<u64> {
    x.trailing_zeros()
}

impl DyadicGaussian {
    /// Builds `(re + im·i) / 2^denom_log`, cancelling common factors of two.
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>, denom_log: u32) -> Self {
        let mut v = DyadicGaussian {
            re: re.into(),
            im: im.into(),
            denom_log,
        };
        v.normalize();
        v
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::new(0, 1, 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n, 0, 0)
    }

    /// `1 / 2^k`.
    pub fn pow2_inv(k: u32) -> Self {
        Self::new(1, 0, k)
    }

    pub fn re_numer(&self) -> &BigInt {
        &self.re
    }

    pub fn im_numer(&self) -> &BigInt {
        &self.im
    }

    pub fn denom_log(&self) -> u32 {
        self.denom_log
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True when the value is a Gaussian integer.
    pub fn is_integral(&self) -> bool {
        self.denom_log == 0
    }

    pub fn conj(&self) -> Self {
        DyadicGaussian {
            re: self.re.clone(),
            im: -&self.im,
            denom_log: self.denom_log,
        }
    }

    /// Multiplies by `2^k` (k may be negative).
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let r = self.denom_log as i64 - k;
        if r >= 0 {
            Self::new(self.re.clone(), self.im.clone(), r as u32)
        } else {
            let s = (-r) as usize;
            Self::new(&self.re << s, &self.im << s, 0)
        }
    }

    /// Numerators after rescaling to the denominator `2^r`; `None` if the value
    /// needs a larger denominator than `2^r`.
    pub fn numerators_at(&self, r: u32) -> Option<(BigInt, BigInt)> {
        if r < self.denom_log {
            return None;
        }
        let s = (r - self.denom_log) as usize;
        Some((&self.re << s, &self.im << s))
    }

    pub fn to_c64(&self) -> Complex64 {
        let scale = 2f64.powi(-(self.denom_log as i32));
        Complex64::new(big_to_f64(&self.re) * scale, big_to_f64(&self.im) * scale)
    }

    fn normalize(&mut self) {
        if self.re.is_zero() && self.im.is_zero() {
            self.denom_log = 0;
            return;
        }
        if self.denom_log == 0 {
            return;
        }
        let tz = match (trailing_zeros(&self.re), trailing_zeros(&self.im)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        let k = tz.min(self.denom_log as u64);
        if k > 0 {
            self.re >>= k as usize;
            self.im >>= k as usize;
            self.denom_log -= k as u32;
        }
    }

    fn add_signed(&mut self, other: &DyadicGaussian, negate: bool) {
        if other.is_zero() {
            return;
        }
        if self.denom_log < other.denom_log {
            let s = (other.denom_log - self.denom_log) as usize;
            self.re <<= s;
            self.im <<= s;
            self.denom_log = other.denom_log;
        }
        let s = (self.denom_log - other.denom_log) as usize;
        if s == 0 {
            if negate {
                self.re -= &other.re;
                self.im -= &other.im;
            } else {
                self.re += &other.re;
                self.im += &other.im;
            }
        } else if negate {
            self.re -= &other.re << s;
            self.im -= &other.im << s;
        } else {
            self.re += &other.re << s;
            self.im += &other.im << s;
        }
        self.normalize();
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

impl fmt::Debug for DyadicGaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}i)/2^{}", self.re, self.im, self.denom_log)
    }
}

impl fmt::Display for DyadicGaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => format!("{}", self.re),
            (true, false) => format!("{}i", self.im),
            (false, false) => format!("({}{:+}i)", self.re, self.im),
        };
        if self.denom_log == 0 {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/2^{}", self.denom_log)
        }
    }
}

impl From<i64> for DyadicGaussian {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl AddAssign<&DyadicGaussian> for DyadicGaussian {
    fn add_assign(&mut self, rhs: &DyadicGaussian) {
        self.add_signed(rhs, false);
    }
}

impl SubAssign<&DyadicGaussian> for DyadicGaussian {
    fn sub_assign(&mut self, rhs: &DyadicGaussian) {
        self.add_signed(rhs, true);
    }
}

impl Add for &DyadicGaussian {
    type Output = DyadicGaussian;
    fn add(self, rhs: &DyadicGaussian) -> DyadicGaussian {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &DyadicGaussian {
    type Output = DyadicGaussian;
    fn sub(self, rhs: &DyadicGaussian) -> DyadicGaussian {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for DyadicGaussian {
    type Output = DyadicGaussian;
    fn add(mut self, rhs: DyadicGaussian) -> DyadicGaussian {
        self += &rhs;
        self
    }
}

impl Sub for DyadicGaussian {
    type Output = DyadicGaussian;
    fn sub(mut self, rhs: DyadicGaussian) -> DyadicGaussian {
        self -= &rhs;
        self
    }
}

impl Mul for &DyadicGaussian {
    type Output = DyadicGaussian;
    fn mul(self, rhs: &DyadicGaussian) -> DyadicGaussian {
        if self.is_zero() || rhs.is_zero() {
            return DyadicGaussian::zero();
        }
        let denom_log = self.denom_log + rhs.denom_log;
        let (re, im) = if self.im.is_zero() && rhs.im.is_zero() {
            (&self.re * &rhs.re, BigInt::zero())
        } else {
            (
                &self.re * &rhs.re - &self.im * &rhs.im,
                &self.re * &rhs.im + &self.im * &rhs.re,
            )
        };
        // The product of canonical values is canonical except when both
        // numerator pairs share a factor (1+i); normalize handles every case.
        DyadicGaussian::new(re, im, denom_log)
    }
}

impl Mul for DyadicGaussian {
    type Output = DyadicGaussian;
    fn mul(self, rhs: DyadicGaussian) -> DyadicGaussian {
        &self * &rhs
    }
}

impl Neg for &DyadicGaussian {
    type Output = DyadicGaussian;
    fn neg(self) -> DyadicGaussian {
        DyadicGaussian {
            re: -&self.re,
            im: -&self.im,
            denom_log: self.denom_log,
        }
    }
}

impl Neg for DyadicGaussian {
    type Output = DyadicGaussian;
    fn neg(self) -> DyadicGaussian {
        -&self
    }
}
