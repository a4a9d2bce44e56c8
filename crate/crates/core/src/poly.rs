//! Exact univariate polynomials over the rationals and Gaussian rationals.
//!
//! Besides ring arithmetic this module provides monic gcds, square-free
//! decomposition, the characteristic polynomial of a Hermitian matrix
//! (Faddeev–LeVerrier), and Sturm-sequence root counting and isolation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, Integer, One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::GaussianMatrix;
use crate::number::{format_rational, parse_rational, rat, GaussianRational, Rational};

/// Dense polynomial, `coeffs[i]` multiplies `x^i`. Trailing zeros are trimmed,
/// so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `x − r`.
    pub fn linear(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::number::rational_to_f64(c);
        }
        acc
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(&(Rational::one() / lc)),
        }
    }

    /// Euclidean division; `None` if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dl = d.leading()?.clone();
        let dn = d.coeffs.len();
        let mut rem = self.coeffs.clone();
        if rem.len() < dn {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dn + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dn - 1] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dn - 1);
        Some((Self::new(quot), Self::new(rem)))
    }

    /// Exact quotient if `d` divides `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d)?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.exact_div(self).is_some()
    }

    /// Primitive integer polynomial with the same roots and positive leading
    /// coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * &lcm).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        for c in ints.iter_mut() {
            *c = &*c / &content * &sign;
        }
        ints
    }

    /// Text form in descending powers, e.g. `x^3 - 4*x`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn to_value(&self) -> Value {
        json!({ "coeffs": self.coeffs.iter().map(format_rational).collect::<Vec<_>>() })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let arr = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidGraph("polynomial needs a \"coeffs\" array".into()))?;
        let coeffs = arr
            .iter()
            .map(|c| match c.as_str() {
                Some(s) => parse_rational(s),
                None => Err(Error::MalformedRational(c.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPolynomial({self})")
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if i == 0 {
                write!(f, "{}", format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", format_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a RationalPolynomial> for &'a RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, o: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rational::zero();
        RationalPolynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a RationalPolynomial> for &'a RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, o: &RationalPolynomial) -> RationalPolynomial {
        self + &(-o)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<'a> Mul<&'a RationalPolynomial> for &'a RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, o: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || o.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

/// Monic gcd over ℚ; `gcd(p, 0) = monic(p)` and `gcd(0, 0) = 0`.
pub fn poly_gcd(p: &RationalPolynomial, q: &RationalPolynomial) -> RationalPolynomial {
    let mut a = p.monic();
    let mut b = q.monic();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b).expect("nonzero divisor");
        a = b;
        b = r.monic();
    }
    a
}

/// `p / gcd(p, p')`, monic. Constants (and zero) map to themselves made monic.
pub fn squarefree_part(p: &RationalPolynomial) -> RationalPolynomial {
    if p.degree().unwrap_or(0) == 0 {
        return p.monic();
    }
    let g = poly_gcd(p, &p.derivative());
    p.exact_div(&g).expect("gcd divides p").monic()
}

/// Yun's square-free decomposition: `p = c · Π_i factors[i-1]^i` with each
/// factor monic, square-free, and the factors pairwise coprime.
pub fn squarefree_decomposition(p: &RationalPolynomial) -> Vec<RationalPolynomial> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let dp = p.derivative();
    let a0 = poly_gcd(p, &dp);
    let mut b = p.exact_div(&a0).unwrap().monic();
    let mut c = dp
        .exact_div(&a0)
        .unwrap()
        .scale(&(Rational::one() / p.leading().unwrap()));
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    while b.degree().unwrap_or(0) > 0 {
        let a = poly_gcd(&b, &d);
        b = b.exact_div(&a).unwrap();
        c = d.exact_div(&a).unwrap();
        d = &c - &b.derivative();
        out.push(a);
    }
    out
}

/// Polynomial with Gaussian-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GaussianPolynomial {
    coeffs: Vec<GaussianRational>,
}

impl GaussianPolynomial {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_real(p: &RationalPolynomial) -> Self {
        Self::new(
            p.coeffs()
                .iter()
                .map(|c| GaussianRational::real(c.clone()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn conj(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(GaussianRational::conj).collect(),
        }
    }

    pub fn scale(&self, k: &GaussianRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add_assign(&mut self, o: &Self) {
        if o.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(o.coeffs.len(), GaussianRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a = &*a + b;
        }
        *self = Self::new(std::mem::take(&mut self.coeffs));
    }

    /// Real part as a rational polynomial, or the first offending power if an
    /// imaginary part survives.
    pub fn into_real(self) -> std::result::Result<RationalPolynomial, usize> {
        if let Some(i) = self.coeffs.iter().position(|c| !c.is_real()) {
            return Err(i);
        }
        Ok(RationalPolynomial::new(
            self.coeffs.into_iter().map(|c| c.re).collect(),
        ))
    }
}

fn mat_mul(a: &GaussianMatrix, b: &GaussianMatrix) -> GaussianMatrix {
    let n = a.len();
    let mut out = vec![vec![GaussianRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

/// `det(λI − m)` by the Faddeev–LeVerrier recurrence.
///
/// The matrix must be Hermitian, so every coefficient is real; a surviving
/// imaginary part is reported as an invariant violation.
pub fn char_poly(m: &GaussianMatrix) -> Result<RationalPolynomial> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::Precondition(
            "characteristic polynomial needs a square matrix".into(),
        ));
    }
    let mut c = vec![GaussianRational::zero(); n + 1];
    c[n] = GaussianRational::one();
    let mut mk = vec![vec![GaussianRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = mat_mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = &row[i] + &c[n - k + 1];
        }
        mk = next;
        let am = mat_mul(m, &mk);
        let trace = (0..n).fold(GaussianRational::zero(), |acc, i| acc + am[i][i].clone());
        c[n - k] = -trace.scale(&(Rational::one() / rat(k as i64)));
    }
    GaussianPolynomial::new(c).into_real().map_err(|i| {
        Error::Invariant(format!(
            "characteristic polynomial has a non-real coefficient at x^{i}; matrix is not Hermitian"
        ))
    })
}

/// Sturm chain of `p`, with remainders rescaled by positive constants.
pub fn sturm_sequence(p: &RationalPolynomial) -> Vec<RationalPolynomial> {
    let mut seq = vec![p.clone()];
    let mut cur = p.derivative();
    while !cur.is_zero() {
        seq.push(cur.clone());
        let prev = &seq[seq.len() - 2];
        let (_, r) = prev.div_rem(&cur).unwrap();
        let next = -&r;
        cur = match next.leading() {
            Some(lc) => next.scale(&(Rational::one() / lc.abs())),
            None => next,
        };
    }
    seq
}

fn sign_variations(seq: &[RationalPolynomial], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn count_roots_in_interval(
    p: &RationalPolynomial,
    lo: &Rational,
    hi: &Rational,
) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Precondition(
            "the zero polynomial has infinitely many roots".into(),
        ));
    }
    if lo >= hi {
        return Err(Error::Precondition("interval needs lo < hi".into()));
    }
    let seq = sturm_sequence(&squarefree_part(p));
    Ok(sign_variations(&seq, lo) - sign_variations(&seq, hi))
}

/// `1 + max |a_i / a_n|`: every complex root has modulus below this.
pub fn cauchy_bound(p: &RationalPolynomial) -> Rational {
    let lc = p.leading().expect("nonzero polynomial").abs();
    let m = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs() / &lc)
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatingInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: usize,
}

/// Real roots of a polynomial: exact rational roots with multiplicity, and
/// disjoint rational intervals each containing one irrational root.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RootIsolation {
    pub rational_roots: Vec<(Rational, usize)>,
    pub irrational_intervals: Vec<IsolatingInterval>,
    /// Degree left over for non-real roots, counted with multiplicity.
    pub residual_nonreal_degree: usize,
}

impl RootIsolation {
    pub fn to_value(&self) -> Value {
        json!({
            "rational_roots": self.rational_roots.iter().map(|(r, m)| json!({
                "value": format_rational(r),
                "multiplicity": m,
            })).collect::<Vec<_>>(),
            "intervals": self.irrational_intervals.iter().map(|iv| json!({
                "lo": format_rational(&iv.lo),
                "hi": format_rational(&iv.hi),
                "multiplicity": iv.multiplicity,
            })).collect::<Vec<_>>(),
            "residual_nonreal_degree": self.residual_nonreal_degree,
        })
    }

    pub fn real_root_count(&self) -> usize {
        self.rational_roots.len() + self.irrational_intervals.len()
    }
}

/// Default isolating-interval width is `2^-DEFAULT_WIDTH_LOG2`.
pub const DEFAULT_WIDTH_LOG2: u32 = 20;

pub fn sturm_isolate(p: &RationalPolynomial) -> RootIsolation {
    sturm_isolate_with(p, DEFAULT_WIDTH_LOG2)
}

/// Isolates all real roots of `p`, refining irrational ones to width
/// `≤ 2^-width_log2`.
pub fn sturm_isolate_with(p: &RationalPolynomial, width_log2: u32) -> RootIsolation {
    let mut out = RootIsolation::default();
    let Some(deg) = p.degree() else { return out };
    if deg == 0 {
        return out;
    }
    let sqf = squarefree_part(p);
    let seq = sturm_sequence(&sqf);
    let count =
        |lo: &Rational, hi: &Rational| sign_variations(&seq, lo) - sign_variations(&seq, hi);
    let factors = squarefree_decomposition(p);

    // Rational roots of sqf are k / lead for an integer k.
    let lead = Rational::from_integer(sqf.primitive_integer().last().unwrap().clone());
    let target = Rational::new(BigInt::one(), BigInt::one() << width_log2 as usize);
    let two = rat(2);

    let bound = cauchy_bound(&sqf);
    let mut pending = vec![(-bound.clone(), bound)];
    let mut isolated = Vec::new();
    while let Some((lo, hi)) = pending.pop() {
        match count(&lo, &hi) {
            0 => {}
            1 => isolated.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / &two;
                // Right half pushed first so roots come out in increasing order.
                pending.push((mid.clone(), hi));
                pending.push((lo, mid));
            }
        }
    }

    let mut real_degree = 0;
    for (mut lo, mut hi) in isolated {
        let mut rational = None;
        while rational.is_none() && (&hi - &lo) * &lead >= Rational::one() {
            let mid = (&lo + &hi) / &two;
            if sqf.eval(&mid).is_zero() {
                rational = Some(mid);
            } else if count(&lo, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if rational.is_none() {
            let k = (&hi * &lead).floor();
            let cand = k / &lead;
            if cand > lo && sqf.eval(&cand).is_zero() {
                rational = Some(cand);
            }
        }
        match rational {
            Some(r) => {
                let lin = RationalPolynomial::linear(&r);
                let mut mult = 0;
                let mut rest = p.clone();
                while let Some(q) = rest.exact_div(&lin) {
                    rest = q;
                    mult += 1;
                }
                real_degree += mult;
                out.rational_roots.push((r, mult));
            }
            None => {
                while &hi - &lo > target || sqf.eval(&lo).is_zero() {
                    let mid = (&lo + &hi) / &two;
                    if count(&lo, &mid) == 1 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let multiplicity = factors
                    .iter()
                    .position(|f| (f.eval(&lo) * f.eval(&hi)).is_negative())
                    .map(|i| i + 1)
                    .expect("every root of the square-free part belongs to one factor");
                real_degree += multiplicity;
                out.irrational_intervals.push(IsolatingInterval {
                    lo,
                    hi,
                    multiplicity,
                });
            }
        }
    }
    out.residual_nonreal_degree = deg - real_degree;
    out
}
