//! Exact scalars: big rationals and Gaussian rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"` into a rational in lowest terms.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::MalformedRational(s.to_string());
    let parse_int = |x: &str| -> Result<BigInt> {
        let x = x.trim();
        let digits = x
            .strip_prefix('-')
            .or_else(|| x.strip_prefix('+'))
            .unwrap_or(x);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        x.parse::<BigInt>().map_err(|_| bad())
    };
    match t.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(parse_int(t)?)),
    }
}

/// Lowest-terms string form with positive denominator (`"3"`, `"-1/2"`).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `re + i·im` with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(rat(re), rat(im))
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", format_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", format_rational(&self.im));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{} {} {}*i",
            format_rational(&self.re),
            sign,
            format_rational(&self.im.abs())
        )
    }
}

/// Exact field operations used by the elimination routines.
pub trait Field: Clone + PartialEq + fmt::Debug + Zero + One {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    /// Panics on division by zero; callers pivot on nonzero entries only.
    fn div_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

impl Field for Rational {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
}

impl Field for GaussianRational {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self * &o.inv().expect("division by zero Gaussian rational")
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_lowest_terms() {
        assert_eq!(format_rational(&parse_rational("6/-4").unwrap()), "-3/2");
        assert_eq!(format_rational(&parse_rational(" 10 ").unwrap()), "10");
        assert_eq!(format_rational(&parse_rational("0/7").unwrap()), "0");
        assert_eq!(format_rational(&parse_rational("-2/1").unwrap()), "-2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "1/0", "0.5", "a/2", "1/", "/3", "1//2", "--1"] {
            assert!(
                matches!(parse_rational(s), Err(Error::MalformedRational(_))),
                "{s}"
            );
        }
    }

    #[test]
    fn gaussian_arithmetic() {
        let w = GaussianRational::from_ints(1, 1);
        assert_eq!(w.norm_sqr(), rat(2));
        assert_eq!(w.conj().conj(), w);
        assert_eq!(&w * &w.conj(), GaussianRational::from_ints(2, 0));
        let q = GaussianRational::one().div_ref(&w);
        assert_eq!(q, GaussianRational::new(ratio(1, 2), ratio(-1, 2)));
        assert_eq!(w.to_string(), "1 + 1*i");
        assert_eq!(GaussianRational::i().to_string(), "1*i");
    }
}
