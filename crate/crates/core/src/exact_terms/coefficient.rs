use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

/// A Gaussian rational times an integer power of π.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coefficient {
    pub re: BigRational,
    pub im: BigRational,
    pub pi_pow: i32,
}

impl Coefficient {
    pub fn new(re: BigRational, im: BigRational, pi_pow: i32) -> Self {
        let mut c = Self { re, im, pi_pow };
        if c.is_zero() {
            c.pi_pow = 0;
        }
        c
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero(), 0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero(), 0)
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
            0,
        )
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
            0,
        )
    }

    /// `r · π^p` for rational `r`.
    pub fn real_pi(r: BigRational, pi_pow: i32) -> Self {
        Self::new(r, BigRational::zero(), pi_pow)
    }

    /// `i`.
    pub fn imag_unit() -> Self {
        Self::gaussian(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone(), self.pi_pow)
    }

    pub fn times_pi(&self, p: i32) -> Self {
        Self::new(self.re.clone(), self.im.clone(), self.pi_pow + p)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r, self.pi_pow)
    }

    /// Sum of two coefficients with the same π-power; `None` otherwise.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.pi_pow != other.pi_pow {
            return None;
        }
        Some(Self::new(
            &self.re + &other.re,
            &self.im + &other.im,
            self.pi_pow,
        ))
    }

    pub fn to_complex(&self) -> Complex64 {
        let re = rational_to_f64(&self.re);
        let im = rational_to_f64(&self.im);
        Complex64::new(re, im) * std::f64::consts::PI.powi(self.pi_pow)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "re": rational_to_json(&self.re),
            "im": rational_to_json(&self.im),
            "pi_pow": self.pi_pow,
        })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        Some(Self::new(
            rational_from_json(v.get("re")?)?,
            rational_from_json(v.get("im")?)?,
            v.get("pi_pow")?.as_i64()? as i32,
        ))
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;

    fn mul(self, o: &Coefficient) -> Coefficient {
        Coefficient::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
            self.pi_pow + o.pi_pow,
        )
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;

    fn neg(self) -> Coefficient {
        Coefficient::new(-self.re.clone(), -self.im.clone(), self.pi_pow)
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;

    /// Panics on mismatched π-powers; use [`Coefficient::checked_add`] when
    /// that can happen.
    fn add(self, o: &Coefficient) -> Coefficient {
        self.checked_add(o)
            .expect("adding coefficients with different powers of pi")
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => format!("{}", self.re),
            (true, false) => format!("{}i", self.im),
            (false, false) => format!("({} + {}i)", self.re, self.im),
        };
        match self.pi_pow {
            0 => write!(f, "{body}"),
            1 => write!(f, "{body}·π"),
            p => write!(f, "{body}·π^{p}"),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // very large numerators or denominators: shift both before dividing
    let bits = r.numer().bits().max(r.denom().bits()) as i64;
    let shift = (bits - 900).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Integer power of a rational, negative exponents allowed.
pub fn rational_pow(base: &BigRational, e: i64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        out *= base;
    }
    if e < 0 {
        out.recip()
    } else {
        out
    }
}

fn bigint_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn bigint_from_json(v: &Value) -> Option<BigInt> {
    if let Some(i) = v.as_i64() {
        return Some(i.into());
    }
    v.as_str()?.parse().ok()
}

fn rational_to_json(r: &BigRational) -> Value {
    json!([bigint_to_json(r.numer()), bigint_to_json(r.denom())])
}

fn rational_from_json(v: &Value) -> Option<BigRational> {
    let a = v.as_array()?;
    if a.len() != 2 {
        return None;
    }
    let den = bigint_from_json(&a[1])?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(bigint_from_json(&a[0])?, den))
}
