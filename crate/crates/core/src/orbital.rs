//! Semi-Lie orbital integrals for n = 2 and their derivatives at s = 0.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{sign, LaurentSeries, QPoly, SeriesTally};

/// A valuation that may be `+infinity` (used for `v(d-a)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// `min(self + shift, other)` where infinity absorbs the shift.
    pub fn min_plus(self, shift: i64, other: i64) -> i64 {
        match self {
            Valuation::Finite(v) => (v + shift).min(other),
            Valuation::Infinite => other,
        }
    }
}

impl From<i64> for Valuation {
    fn from(v: i64) -> Self {
        Valuation::Finite(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Valuation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "inf" | "infinity" | "oo" | "∞" => Ok(Valuation::Infinite),
            t => t
                .parse::<i64>()
                .map(Valuation::Finite)
                .map_err(|_| format!("expected an integer or \"inf\", got {s:?}")),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => ser.serialize_i64(*v),
            Valuation::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(de)? {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Valuation::Finite)
                .ok_or_else(|| serde::de::Error::custom("valuation must be an integer")),
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("valuation must be an integer or \"inf\"")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("v(b) + v(c) = {0} must be odd")]
    EvenSum(i64),
    #[error("v(b) + v(c) = {0} must be at least 1")]
    NonPositiveSum(i64),
    #[error("v(d-a) = {0} must be nonnegative")]
    NegativeVda(i64),
    #[error("r = {0} must be nonnegative")]
    NegativeR(i64),
    #[error("v(e) = {0} is negative; pass the vanishing-regime flag to allow it")]
    NegativeVe(i64),
    #[error("the combination 1_{{<=r}} + 1_{{<=r-1}} needs r >= 1 (got r = {0})")]
    ComboNeedsPositiveR(i64),
}

/// Valuation data `(r, v(b), v(c), v(e), v(d-a))` of a regular semisimple orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitalParams {
    pub r: i64,
    pub vb: i64,
    pub vc: i64,
    pub ve: i64,
    pub vda: Valuation,
}

impl OrbitalParams {
    pub fn new(r: i64, vb: i64, vc: i64, ve: i64, vda: impl Into<Valuation>) -> Self {
        Self { r, vb, vc, ve, vda: vda.into() }
    }

    pub fn with_r(self, r: i64) -> Self {
        Self { r, ..self }
    }

    pub fn with_ve(self, ve: i64) -> Self {
        Self { ve, ..self }
    }

    pub fn sum_bc(&self) -> i64 {
        self.vb + self.vc
    }

    /// Checks the structural invariants; `ve < 0` passes only when `allow_vanishing`.
    pub fn validate(&self, allow_vanishing: bool) -> Result<Self, ParamError> {
        let s = self.sum_bc();
        if s.rem_euclid(2) != 1 {
            return Err(ParamError::EvenSum(s));
        }
        if s < 1 {
            return Err(ParamError::NonPositiveSum(s));
        }
        if let Valuation::Finite(v) = self.vda {
            if v < 0 {
                return Err(ParamError::NegativeVda(v));
            }
        }
        if self.r < 0 {
            return Err(ParamError::NegativeR(self.r));
        }
        if self.ve < 0 && !allow_vanishing {
            return Err(ParamError::NegativeVe(self.ve));
        }
        Ok(*self)
    }

    /// `theta = min(v(b)+v(c), 2 v(d-a))`.
    pub fn theta(&self) -> i64 {
        match self.vda {
            Valuation::Finite(v) => self.sum_bc().min(2 * v),
            Valuation::Infinite => self.sum_bc(),
        }
    }

    /// `kappa = v(e) - v(d-a) - r`, or `None` for `-infinity`.
    pub fn kappa(&self) -> Option<i64> {
        self.vda.finite().map(|v| self.ve - v - self.r)
    }

    /// `N = min(v(e), (v(b)+v(c)-1)/2 + r, v(d-a) + r)`.
    pub fn big_n(&self) -> i64 {
        let m = self.ve.min((self.sum_bc() - 1) / 2 + self.r);
        self.vda.min_plus(self.r, m)
    }

    /// `v(b)+v(c) > 2 v(d-a)`, false when `v(d-a)` is infinite.
    fn sum_exceeds_twice_vda(&self) -> bool {
        self.vda.finite().is_some_and(|v| self.sum_bc() > 2 * v)
    }

    fn vanishes(&self) -> bool {
        self.ve < 0 || self.sum_bc() < -2 * self.r
    }
}

impl fmt::Display for OrbitalParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(r={}, vb={}, vc={}, ve={}, vda={})",
            self.r, self.vb, self.vc, self.ve, self.vda
        )
    }
}

fn checked(p: &OrbitalParams) -> Result<(), ParamError> {
    p.validate(true).map(|_| ())
}

/// Closed formula for `Orb(gamma, 1_{<=r}, s)` as a polynomial in `T = q^s`.
pub fn orbital_closed_form(p: &OrbitalParams) -> Result<LaurentSeries, ParamError> {
    checked(p)?;
    if p.vanishes() {
        return Ok(LaurentSeries::zero());
    }
    let (r, vb, vc, ve) = (p.r, p.vb, p.vc, p.ve);
    let n_cap = p.big_n();
    let lo = -(vb + r);
    let hi = 2 * ve + vc + r;
    let mut tally = SeriesTally::new();
    for k in lo..=hi {
        let n = (k - lo).div_euclid(2).min((hi - k).div_euclid(2)).min(n_cap);
        let sg = sign(k) as i128;
        for e in 0..=n {
            tally.add(k, e, sg);
        }
    }
    if let (Some(vda), Some(kappa)) = (p.vda.finite(), p.kappa()) {
        if kappa > 0 && p.sum_exceeds_twice_vda() {
            let lo2 = 2 * vda - vb + r;
            let hi2 = 2 * ve + vc - 2 * vda - r;
            for k in lo2..=hi2 {
                let c = (k - lo2).min(hi2 - k).min(kappa);
                tally.add(k, vda + r, sign(k) as i128 * c as i128);
            }
        }
    }
    Ok(tally.finish())
}

/// The same integral assembled from the lattice-support decomposition
/// (the generic contribution plus the two even-theta boundary families).
pub fn orbital_support_sum(p: &OrbitalParams) -> Result<LaurentSeries, ParamError> {
    checked(p)?;
    if p.ve < 0 {
        return Ok(LaurentSeries::zero());
    }
    let (r, vc, ve) = (p.r, p.vc, p.ve);
    let s = p.sum_bc();
    let theta = p.theta();
    let mut tally = SeriesTally::new();
    let mut push = |n2: i64, m: i64, e: i64| {
        let k = 2 * n2 - m + vc + r;
        tally.add(k, e, sign(k) as i128);
    };
    for n2 in 0..=ve {
        for m in 0..=theta + 2 * r {
            push(n2, m, n2.min(m.div_euclid(2)));
        }
    }
    if theta.rem_euclid(2) == 0 {
        let h = theta / 2;
        for n2 in 0..=ve {
            let e = n2.min(h + r);
            for m in theta + 2 * r + 1..=r.max(n2 - h) + s + r {
                push(n2, m, e);
            }
            for m in theta + 2 * r + 1..=n2 + h + r {
                push(n2, m, e);
            }
        }
    }
    Ok(tally.finish())
}

/// `D(p) = (-1)^{v(c)+r} / log q * dOrb(gamma, 1_{<=r})` in closed form.
pub fn derivative_closed_form(p: &OrbitalParams) -> Result<QPoly, ParamError> {
    checked(p)?;
    if p.vanishes() {
        return Ok(QPoly::zero());
    }
    let s = p.sum_bc();
    let base = (2 * p.ve + s + 1) / 2 + p.r;
    let mut d = QPoly::from_int_terms((0..=p.big_n()).map(|j| (j, base - 2 * j)));
    if let (Some(vda), Some(kappa)) = (p.vda.finite(), p.kappa()) {
        if kappa >= 0 && p.sum_exceeds_twice_vda() {
            let corr = if kappa % 2 == 0 {
                kappa / 2
            } else {
                p.ve - 2 * vda - p.r + (s - kappa) / 2
            };
            d -= &QPoly::monomial(corr, vda + p.r);
        }
    }
    Ok(d)
}

/// `(-1)^{v(c)+r} / log q * dOrb(gamma, 1_{<=r} + 1_{<=r-1})` in closed form.
pub fn derivative_combo(p: &OrbitalParams) -> Result<QPoly, ParamError> {
    checked(p)?;
    if p.r < 1 {
        return Err(ParamError::ComboNeedsPositiveR(p.r));
    }
    if p.vanishes() {
        return Ok(QPoly::zero());
    }
    let s = p.sum_bc();
    let n = p.big_n();
    let kappa = p.kappa();
    let wide = p.sum_exceeds_twice_vda();
    let c = match kappa {
        Some(k) if wide && k > 0 && k % 2 == 1 => (k - 1) / 2,
        Some(k) if wide && k >= 0 && k % 2 == 0 => (k + s - 2 * p.vda.finite().unwrap_or(0) - 1) / 2,
        _ if !wide && p.ve >= (s - 1) / 2 + p.r => p.ve - n,
        _ => 0,
    };
    let c_prime = if wide && kappa.is_some_and(|k| k >= 0) { c + 1 } else { 0 };
    let mut out = QPoly::geometric(n);
    out += &QPoly::monomial(c, n);
    out += &QPoly::monomial(c_prime, n - 1);
    Ok(out)
}

/// Finitely supported combination `sum_r c_r 1_{<=r}` with coefficients in `Q[q^{+-1}]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeVector {
    coeffs: BTreeMap<i64, QPoly>,
}

impl HeckeVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, QPoly)>>(terms: I) -> Self {
        let mut v = Self::new();
        for (r, c) in terms {
            v.add(r, &c);
        }
        v
    }

    pub fn from_int_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        Self::from_terms(terms.into_iter().map(|(r, c)| (r, QPoly::constant(c))))
    }

    /// Adds `c * 1_{<=r}`; indices below zero are the zero function and are dropped.
    pub fn add(&mut self, r: i64, c: &QPoly) {
        if r < 0 || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(r).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&r);
        }
    }

    pub fn add_vector(&mut self, other: &HeckeVector, scale: &QPoly) {
        for (r, c) in &other.coeffs {
            self.add(*r, &(c * scale));
        }
    }

    pub fn coeff(&self, r: i64) -> QPoly {
        self.coeffs.get(&r).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &QPoly)> {
        self.coeffs.iter().map(|(r, c)| (*r, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `(1 / log q) * dOrb(gamma, sum_r c_r 1_{<=r})`; the `r` field of `base` is ignored.
pub fn derivative_of_vector(base: &OrbitalParams, v: &HeckeVector) -> Result<QPoly, ParamError> {
    checked(&base.with_r(0))?;
    let mut acc = QPoly::zero();
    for (r, c) in v.terms() {
        let p = base.with_r(r);
        let d = derivative_closed_form(&p)?;
        acc += &(&d * c).scale_int(sign(p.vc + r));
    }
    Ok(acc)
}

/// The transfer factor `omega = (-1)^{v(c)+1}`.
pub fn transfer_factor(p: &OrbitalParams) -> i64 {
    sign(p.vc + 1)
}
