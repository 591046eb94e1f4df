use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use super::coefficient::{rational_pow, Coefficient};
use crate::error::{Error, Result};

/// `Γ(s, 4π g y)` with integer `s` and `g ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaFactor {
    pub s: i64,
    pub g: i64,
}

/// `coeff · y^a · e^{2πi n x} · e^{−2π m y} · [Γ(s, 4π g y)]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactTerm {
    pub coeff: Coefficient,
    pub y_exp: i64,
    pub freq: i64,
    pub decay: i64,
    pub gamma: Option<GammaFactor>,
}

/// Normalization key: everything except the rational part of the coefficient.
pub type TermKey = (i64, i64, i64, Option<GammaFactor>, i32);

impl ExactTerm {
    pub fn new(
        coeff: Coefficient,
        y_exp: i64,
        freq: i64,
        decay: i64,
        gamma: Option<GammaFactor>,
    ) -> Result<Self> {
        if let Some(gf) = gamma {
            if gf.g < 1 {
                return Err(Error::Domain(format!("gamma factor needs g >= 1, got {}", gf.g)));
            }
        }
        Ok(Self {
            coeff,
            y_exp,
            freq,
            decay,
            gamma,
        })
    }

    /// `y^a` with unit coefficient.
    pub fn y_power(a: i64) -> Self {
        Self {
            coeff: Coefficient::one(),
            y_exp: a,
            freq: 0,
            decay: 0,
            gamma: None,
        }
    }

    pub fn key(&self) -> TermKey {
        (self.y_exp, self.freq, self.decay, self.gamma, self.coeff.pi_pow)
    }

    pub fn with_coeff(&self, coeff: Coefficient) -> Self {
        Self {
            coeff,
            ..self.clone()
        }
    }

    pub fn is_holomorphic_type(&self) -> bool {
        self.gamma.is_none() && self.y_exp == 0 && self.decay == self.freq
    }

    /// Product of two terms; fails when both carry a gamma factor.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let gamma = match (self.gamma, other.gamma) {
            (Some(_), Some(_)) => {
                return Err(Error::NotClosed(
                    "product of two incomplete-gamma factors".into(),
                ))
            }
            (g, None) | (None, g) => g,
        };
        Ok(Self {
            coeff: &self.coeff * &other.coeff,
            y_exp: self.y_exp + other.y_exp,
            freq: self.freq + other.freq,
            decay: self.decay + other.decay,
            gamma,
        })
    }

    /// Finite closed form of an integer `Γ(s, 4πg y)` with `s ≥ 1`:
    /// `(s−1)! e^{−4πg y} Σ_{j<s} (4πg y)^j / j!`.
    fn expand_positive_gamma(&self, gf: GammaFactor) -> Vec<ExactTerm> {
        let four_g = BigRational::from_integer((4 * gf.g).into());
        let mut out = Vec::with_capacity(gf.s as usize);
        // (s−1)!/j! for j = s−1 down to 0
        let mut ratio = BigRational::one();
        for j in (0..gf.s).rev() {
            let c = rational_pow(&four_g, j) * &ratio;
            out.push(ExactTerm {
                coeff: self.coeff.scale(&c).times_pi(j as i32),
                y_exp: self.y_exp + j,
                freq: self.freq,
                decay: self.decay + 2 * gf.g,
                gamma: None,
            });
            ratio *= BigRational::from_integer(j.max(1).into());
        }
        out
    }

    /// One step of `Γ(s,x) = (Γ(s+1,x) − x^s e^{−x}) / s` for `s < 0`.
    fn raise_negative_gamma(&self, gf: GammaFactor) -> Vec<ExactTerm> {
        let inv_s = BigRational::new(1.into(), gf.s.into());
        let up = ExactTerm {
            coeff: self.coeff.scale(&inv_s),
            gamma: Some(GammaFactor { s: gf.s + 1, g: gf.g }),
            ..self.clone()
        };
        let four_g = BigRational::from_integer((4 * gf.g).into());
        let c = -(rational_pow(&four_g, gf.s) * &inv_s);
        let elementary = ExactTerm {
            coeff: self.coeff.scale(&c).times_pi(gf.s as i32),
            y_exp: self.y_exp + gf.s,
            freq: self.freq,
            decay: self.decay + 2 * gf.g,
            gamma: None,
        };
        vec![up, elementary]
    }

    /// Rewrites the term over the canonical basis, in which the only remaining
    /// gamma factor is `Γ(0, 4πg y)`.
    pub fn canonical_terms(&self) -> Vec<ExactTerm> {
        match self.gamma {
            None => vec![self.clone()],
            Some(gf) if gf.s >= 1 => self.expand_positive_gamma(gf),
            Some(gf) if gf.s == 0 => vec![self.clone()],
            Some(gf) => self
                .raise_negative_gamma(gf)
                .iter()
                .flat_map(|t| t.canonical_terms())
                .collect(),
        }
    }

    /// Expands only a gamma factor with integer `s ≥ 1`.
    pub fn expand_gamma(&self) -> Vec<ExactTerm> {
        match self.gamma {
            Some(gf) if gf.s >= 1 => self.expand_positive_gamma(gf),
            _ => vec![self.clone()],
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coeff": self.coeff.to_json(),
            "y_exp": self.y_exp,
            "freq": self.freq,
            "decay": self.decay,
            "gamma": self.gamma.map(|g| json!([g.s, g.g])),
        })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let gamma = match v.get("gamma")? {
            Value::Null => None,
            g => {
                let a = g.as_array()?;
                Some(GammaFactor {
                    s: a.first()?.as_i64()?,
                    g: a.get(1)?.as_i64()?,
                })
            }
        };
        ExactTerm::new(
            Coefficient::from_json(v.get("coeff")?)?,
            v.get("y_exp")?.as_i64()?,
            v.get("freq")?.as_i64()?,
            v.get("decay")?.as_i64()?,
            gamma,
        )
        .ok()
    }
}

impl fmt::Display for ExactTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if self.y_exp != 0 {
            write!(f, "·y^{}", self.y_exp)?;
        }
        if self.freq != 0 {
            write!(f, "·e({}x)", self.freq)?;
        }
        if self.decay != 0 {
            write!(f, "·exp(-2π·{}y)", self.decay)?;
        }
        if let Some(g) = self.gamma {
            write!(f, "·Γ({}, 4π·{}y)", g.s, g.g)?;
        }
        Ok(())
    }
}

/// A finite sum of terms in normal form: like keys merged, zero terms
/// dropped, sorted by `(y_exp, freq, decay, gamma, pi_pow)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TermSum {
    terms: Vec<ExactTerm>,
}

impl TermSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ExactTerm>>(terms: I) -> Self {
        let mut map: BTreeMap<TermKey, Coefficient> = BTreeMap::new();
        for t in terms {
            if t.coeff.is_zero() {
                continue;
            }
            let key = t.key();
            match map.get_mut(&key) {
                Some(c) => *c = &*c + &t.coeff,
                None => {
                    map.insert(key, t.coeff);
                }
            }
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((y_exp, freq, decay, gamma, _), coeff)| ExactTerm {
                coeff,
                y_exp,
                freq,
                decay,
                gamma,
            })
            .collect();
        Self { terms }
    }

    pub fn single(t: ExactTerm) -> Self {
        Self::from_terms([t])
    }

    pub fn terms(&self) -> &[ExactTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn neg(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| t.with_coeff(-&t.coeff)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        Self::from_terms(self.terms.iter().map(|t| t.with_coeff(&t.coeff * c)))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        Self::from_terms(self.terms.iter().map(|t| t.with_coeff(t.coeff.scale(r))))
    }

    pub fn times_y_power(&self, a: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| ExactTerm {
            y_exp: t.y_exp + a,
            ..t.clone()
        }))
    }

    /// All gamma factors rewritten over the canonical basis.
    pub fn canonical(&self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|t| t.canonical_terms()))
    }

    /// Gamma factors with integer `s ≥ 1` replaced by their finite form.
    pub fn expand_gammas(&self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|t| t.expand_gamma()))
    }

    /// Exact zero test over the canonical basis.
    pub fn is_zero(&self) -> bool {
        self.canonical().terms.is_empty()
    }

    /// Equality as functions of `τ`, not merely as representations.
    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    pub fn has_gamma(&self) -> bool {
        self.terms.iter().any(|t| t.gamma.is_some())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|t| t.to_json()).collect())
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let arr = v.as_array()?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            terms.push(ExactTerm::from_json(t)?);
        }
        Some(Self::from_terms(terms))
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}
