//! Satake transforms and base change for n = 2 and n = 3, as symmetric Laurent polynomials.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{sign, serde_via_json, QPoly};
use crate::orbital::HeckeVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatakeError {
    #[error("Satake transform of v(det) = r implemented for n = 2 or 3, not n = {0}")]
    UnsupportedArity(usize),
    #[error("base change to U(3) needs a three-variable element, got {0} variables")]
    NeedsThreeVariables(usize),
    #[error("requested basis index {j} exceeds the solved range 0..={bound}")]
    BoundBelowIndex { j: i64, bound: i64 },
    #[error("Laurent polynomial in Y is not palindromic at exponent {0}")]
    NotPalindromic(i64),
    #[error("negative index {0}")]
    NegativeIndex(i64),
}

/// Symmetric Laurent polynomial in `X_1..X_n`, stored as coefficients of monomial orbit sums
/// keyed by the weakly decreasing exponent vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SatakeGl {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, QPoly>,
}

impl SatakeGl {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Adds `c` times the orbit sum of `X^exps`; `exps` may be in any order.
    pub fn add_orbit(&mut self, exps: &[i64], c: &QPoly) {
        assert_eq!(exps.len(), self.nvars, "exponent vector has the wrong length");
        let mut key = exps.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn orbit_coeff(&self, exps: &[i64]) -> QPoly {
        let mut key = exps.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &QPoly)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &QPoly) -> Self {
        let mut out = Self::zero(self.nvars);
        for (k, x) in &self.terms {
            out.add_orbit(k, &(x * c));
        }
        out
    }

    pub fn combine(&self, other: &SatakeGl, scale: &QPoly) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (k, x) in &other.terms {
            out.add_orbit(k, &(x * scale));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(k, c)| serde_json::json!([k, c.to_json()]))
            .collect();
        serde_json::json!({ "nvars": self.nvars, "orbit_terms": terms })
    }
}

impl fmt::Display for SatakeGl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let exps: Vec<String> = k.iter().map(i64::to_string).collect();
            let orbit = format!("m({})", exps.join(","));
            if k.iter().all(|e| *e == 0) {
                write!(f, "{c}")?;
            } else if *c == QPoly::one() {
                write!(f, "{orbit}")?;
            } else if c.is_monomial() {
                write!(f, "{c} {orbit}")?;
            } else {
                write!(f, "({c}) {orbit}")?;
            }
        }
        Ok(())
    }
}

/// W_1-invariant Laurent polynomial in `Y`, stored by the coefficient of `Y^{+-i}` for `i >= 0`
/// (`Y^{+-i} = Y^i + Y^-i` for `i > 0`, and `Y^{+-0} = 1`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SatakeY {
    terms: BTreeMap<i64, QPoly>,
}

impl SatakeY {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::y_pm(0)
    }

    /// `Y^{+-i}`; zero for `i < 0`.
    pub fn y_pm(i: i64) -> Self {
        let mut y = Self::zero();
        y.add_term(i, &QPoly::one());
        y
    }

    /// `sum_{|j| <= r} Y^j`; zero for `r < 0`.
    pub fn sym_sum(r: i64) -> Self {
        Self::from_terms((0..=r).map(|i| (i, QPoly::one())))
    }

    /// `Y^r + Y^{r-2} + ... + Y^{-r}`; zero for `r < 0`.
    pub fn step_sum(r: i64) -> Self {
        Self::from_terms((0..=r).filter(|i| (r - i) % 2 == 0).map(|i| (i, QPoly::one())))
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, QPoly)>>(terms: I) -> Self {
        let mut y = Self::zero();
        for (i, c) in terms {
            y.add_term(i, &c);
        }
        y
    }

    /// Folds a full Laurent polynomial `sum_k c_k Y^k`, which must be palindromic.
    pub fn from_laurent(map: &BTreeMap<i64, QPoly>) -> Result<Self, SatakeError> {
        let mut y = Self::zero();
        for (k, c) in map {
            let mirror = map.get(&-k).cloned().unwrap_or_default();
            if c.is_zero() {
                continue;
            }
            if mirror != *c {
                return Err(SatakeError::NotPalindromic(*k));
            }
            if *k >= 0 {
                y.add_term(*k, c);
            }
        }
        Ok(y)
    }

    /// Expands to the full Laurent polynomial `k -> coefficient of Y^k`.
    pub fn to_laurent(&self) -> BTreeMap<i64, QPoly> {
        let mut out = BTreeMap::new();
        for (i, c) in &self.terms {
            out.insert(*i, c.clone());
            if *i > 0 {
                out.insert(-i, c.clone());
            }
        }
        out
    }

    /// Adds `c * Y^{+-i}`; ignored for `i < 0`.
    pub fn add_term(&mut self, i: i64, c: &QPoly) {
        if i < 0 || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(i).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&i);
        }
    }

    pub fn coeff(&self, i: i64) -> QPoly {
        self.terms.get(&i).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &QPoly)> {
        self.terms.iter().map(|(i, c)| (*i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &QPoly) -> Self {
        Self::from_terms(self.terms.iter().map(|(i, x)| (*i, x * c)))
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&QPoly::constant(c))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(i, c)| serde_json::json!([i, c.to_json()]))
            .collect();
        serde_json::json!({ "y_terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let terms = v
            .get("y_terms")
            .and_then(Value::as_array)
            .ok_or("expected object with a \"y_terms\" array")?;
        let mut y = Self::zero();
        for t in terms {
            let arr = t.as_array().filter(|a| a.len() == 2).ok_or("y_terms entry must be [i, q_poly]")?;
            let i = arr[0].as_i64().filter(|i| *i >= 0).ok_or("Y index must be a nonnegative integer")?;
            y.add_term(i, &QPoly::from_json(&arr[1])?);
        }
        Ok(y)
    }
}

serde_via_json!(SatakeY);

impl Add<&SatakeY> for &SatakeY {
    type Output = SatakeY;
    fn add(self, rhs: &SatakeY) -> SatakeY {
        let mut out = self.clone();
        for (i, c) in &rhs.terms {
            out.add_term(*i, c);
        }
        out
    }
}

impl Sub<&SatakeY> for &SatakeY {
    type Output = SatakeY;
    fn sub(self, rhs: &SatakeY) -> SatakeY {
        self + &(-rhs)
    }
}

impl Neg for &SatakeY {
    type Output = SatakeY;
    fn neg(self) -> SatakeY {
        SatakeY { terms: self.terms.iter().map(|(i, c)| (*i, -c)).collect() }
    }
}

impl Mul<&SatakeY> for &QPoly {
    type Output = SatakeY;
    fn mul(self, rhs: &SatakeY) -> SatakeY {
        rhs.scale(self)
    }
}

impl fmt::Display for SatakeY {
    /// Descending in `i`: `q^2(Y+Y^-1) + q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.terms().all(|(_, x)| num::Signed::is_negative(x));
            let body = if negative { -c } else { c.clone() };
            match (n == 0, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            let y = match *i {
                0 => String::new(),
                1 => "(Y+Y^-1)".to_string(),
                i => format!("(Y^{i}+Y^-{i})"),
            };
            if y.is_empty() {
                if body.is_monomial() {
                    write!(f, "{body}")?;
                } else {
                    write!(f, "({body})")?;
                }
            } else if body == QPoly::one() {
                write!(f, "{y}")?;
            } else if body.is_monomial() {
                write!(f, "{body}{y}")?;
            } else {
                write!(f, "({body}){y}")?;
            }
        }
        Ok(())
    }
}

/// Weakly decreasing `n`-tuples of nonnegative integers summing to `r`.
fn partitions(r: i64, n: usize) -> Vec<Vec<i64>> {
    fn go(rest: i64, max: i64, slots: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if slots == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for part in (0..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(r, r, n, &mut Vec::new(), &mut out);
    out
}

/// Satake transform of the indicator of `v(det) = r` on `Mat_n(O_E)`:
/// `q^{(n-1) r}` times the sum of all monomials of total degree `r`.
pub fn satake_gl_det(n: usize, r: i64) -> Result<SatakeGl, SatakeError> {
    if !(2..=3).contains(&n) {
        return Err(SatakeError::UnsupportedArity(n));
    }
    if r < 0 {
        return Err(SatakeError::NegativeIndex(r));
    }
    let mut out = SatakeGl::zero(n);
    let c = QPoly::monomial(1, (n as i64 - 1) * r);
    for lam in partitions(r, n) {
        out.add_orbit(&lam, &c);
    }
    Ok(out)
}

fn distinct_permutations(key: &[i64]) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    let n = key.len();
    let mut idx: Vec<usize> = (0..n).collect();
    // Heap's algorithm over indices; duplicates collapse in the set.
    fn heap(k: usize, idx: &mut Vec<usize>, key: &[i64], out: &mut BTreeSet<Vec<i64>>) {
        if k <= 1 {
            out.insert(idx.iter().map(|&i| key[i]).collect());
            return;
        }
        for i in 0..k {
            heap(k - 1, idx, key, out);
            if k.is_multiple_of(2) {
                idx.swap(i, k - 1);
            } else {
                idx.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut idx, key, &mut out);
    out
}

/// Base change `X_1^a X_2^b X_3^c -> Y^{a-c}`, extended linearly over orbit sums.
pub fn bc_gl3_to_u3(x: &SatakeGl) -> Result<SatakeY, SatakeError> {
    if x.nvars != 3 {
        return Err(SatakeError::NeedsThreeVariables(x.nvars));
    }
    let mut laurent: BTreeMap<i64, QPoly> = BTreeMap::new();
    for (key, c) in x.terms() {
        for perm in distinct_permutations(key) {
            *laurent.entry(perm[0] - perm[2]).or_default() += c;
        }
    }
    SatakeY::from_laurent(&laurent)
}

/// Satake image of the indicator of `pi^{-r} Mat_3(O_E) ∩ U(V_3)`:
/// `sum_{i<=r} q^{2 floor((r+i)/2) - i + r} Y^{+-i}`.
pub fn satake_u3_indicator(r: i64) -> SatakeY {
    SatakeY::from_terms((0..=r).map(|i| (i, QPoly::monomial(1, 2 * ((r + i).div_euclid(2)) - i + r))))
}

/// Pushforward of `1_{Mat_3(O_E), v(det) = r}` to `S_3`, on the basis `1_{K'_{S,j}}`.
pub fn proj_fiber_gl3(r: i64) -> HeckeVector {
    let mut v = HeckeVector::new();
    for j in 0..=r {
        let m = 2 * (r - j);
        let c = QPoly::from_int_terms((0..=m).map(|i| (i, (1 + i / 2).min(1 + (m - i) / 2))));
        v.add(j, &c);
    }
    v
}

/// `1 + 2q + 2q^2 + ... + 2q^m`.
fn odd_weight(m: i64) -> QPoly {
    QPoly::geometric(m).scale_int(2) - QPoly::one()
}

/// Images `BC_{S_3}(1_{K'_{S,j}})` for `j = 0..=bound`, solved from
/// `BC_{S_3}(proj(1_{Mat_3, v(det) = r})) = BC(Sat(1_{Mat_3, v(det) = r}))`.
#[derive(Clone, Debug)]
pub struct BcS3Table {
    images: Vec<SatakeY>,
}

impl BcS3Table {
    pub fn solve(bound: i64) -> Result<Self, SatakeError> {
        let mut images: Vec<SatakeY> = Vec::new();
        for r in 0..=bound.max(0) {
            let fiber = proj_fiber_gl3(r);
            let mut rhs = bc_gl3_to_u3(&satake_gl_det(3, r)?)?;
            for (j, b) in images.iter().enumerate() {
                rhs = &rhs - &b.scale(&fiber.coeff(j as i64));
            }
            images.push(rhs);
        }
        Ok(Self { images })
    }

    pub fn bound(&self) -> i64 {
        self.images.len() as i64 - 1
    }

    pub fn image(&self, j: i64) -> Result<&SatakeY, SatakeError> {
        if j < 0 {
            return Err(SatakeError::NegativeIndex(j));
        }
        self.images
            .get(j as usize)
            .ok_or(SatakeError::BoundBelowIndex { j, bound: self.bound() })
    }

    pub fn apply(&self, v: &HeckeVector) -> Result<SatakeY, SatakeError> {
        let mut out = SatakeY::zero();
        for (j, c) in v.terms() {
            out = &out + &self.image(j)?.scale(c);
        }
        Ok(out)
    }
}

pub fn bc_s3_on_basis(j: i64, bound: i64) -> Result<SatakeY, SatakeError> {
    if bound < j {
        return Err(SatakeError::BoundBelowIndex { j, bound });
    }
    BcS3Table::solve(bound)?.image(j).cloned()
}

/// Satake image of `1_{K,<=r}` on `U(V_2)`: `q^r sum_{|j|<=r} Y^j`.
pub fn satake_u2_indicator(r: i64) -> SatakeY {
    SatakeY::sym_sum(r).scale(&QPoly::monomial(1, r))
}

/// Image of `1_{K'_{S,<=r}} + 1_{K'_{S,<=r-1}}`: `(-1)^r (q^r sum Y^j - q^{r-1} sum Y^j)`.
pub fn bc_s2_combo_image(r: i64) -> SatakeY {
    (&satake_u2_indicator(r) - &satake_u2_indicator(r - 1)).scale_int(sign(r))
}

/// Images of the individual `1_{K'_{S,<=r}}`, by peeling off the combination.
pub fn bc_s2_on_basis(r: i64) -> Result<SatakeY, SatakeError> {
    if r < 0 {
        return Err(SatakeError::NegativeIndex(r));
    }
    let mut prev = SatakeY::zero();
    for k in 0..=r {
        prev = &bc_s2_combo_image(k) - &prev;
    }
    Ok(prev)
}

/// `P_r = q^r sum_{|j|<=r} Y^j - 2 q^{r-1} sum_{|j|<=r-1} Y^j + q^{r-2} sum_{|j|<=r-2} Y^j`.
pub fn p_polynomial(r: i64) -> SatakeY {
    let s = |k: i64| satake_u2_indicator(k);
    &(&s(r) - &s(r - 1).scale_int(2)) + &s(r - 2)
}

/// A single base-change identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SatakeCheck {
    pub identity: String,
    pub r: i64,
    pub lhs: Value,
    pub rhs: Value,
    pub pass: bool,
}

fn check_y(identity: &str, r: i64, lhs: SatakeY, rhs: SatakeY) -> SatakeCheck {
    SatakeCheck { identity: identity.into(), r, pass: lhs == rhs, lhs: lhs.to_json(), rhs: rhs.to_json() }
}

fn hecke_json(v: &HeckeVector) -> Value {
    Value::Array(v.terms().map(|(j, c)| serde_json::json!([j, c.to_json()])).collect())
}

/// All base-change identities for `r = 0..=rmax`.
pub fn verify_satake(rmax: i64) -> Result<Vec<SatakeCheck>, SatakeError> {
    let table = BcS3Table::solve(rmax)?;
    let q = QPoly::q();
    let q2 = QPoly::monomial(1, 2);
    let q3 = QPoly::monomial(1, 3);
    let bc_sat = |r: i64| -> Result<SatakeY, SatakeError> {
        if r < 0 {
            Ok(SatakeY::zero())
        } else {
            bc_gl3_to_u3(&satake_gl_det(3, r)?)
        }
    };
    let proj = |r: i64| if r < 0 { HeckeVector::new() } else { proj_fiber_gl3(r) };
    let mut out = Vec::new();
    for r in 0..=rmax {
        let aggregate = HeckeVector::from_terms((0..=r).map(|j| (j, odd_weight(r - j))));
        out.push(check_y("bc_s3_indicator", r, table.apply(&aggregate)?, satake_u3_indicator(r)));

        let mut second = HeckeVector::from_int_terms([(r, 1)]);
        for j in 0..r {
            second.add(j, &QPoly::monomial(2, r - j));
        }
        out.push(check_y(
            "bc_s3_double_coset",
            r,
            table.apply(&second)?,
            &satake_u3_indicator(r) - &satake_u3_indicator(r - 1),
        ));

        out.push(check_y(
            "bc_sat_gl_det_step",
            r,
            &bc_sat(r)? - &bc_sat(r - 1)?.scale(&q2),
            SatakeY::step_sum(r).scale(&QPoly::monomial(1, 2 * r)),
        ));

        let preimage = &(&bc_sat(r)? + &bc_sat(r - 1)?.scale(&(&q - &q2))) - &bc_sat(r - 2)?.scale(&q3);
        out.push(check_y("u3_indicator_preimage", r, preimage, satake_u3_indicator(r)));

        let mut proj_step = proj(r);
        proj_step.add_vector(&proj(r - 1), &-&q2);
        let expect = HeckeVector::from_terms((0..=r).map(|j| (j, QPoly::geometric(r - j))));
        out.push(SatakeCheck {
            identity: "proj_fiber_step".into(),
            r,
            pass: proj_step == expect,
            lhs: hecke_json(&proj_step),
            rhs: hecke_json(&expect),
        });

        let s = |k: i64| if k < 0 { Ok(SatakeY::zero()) } else { bc_s2_on_basis(k) };
        out.push(check_y(
            "bc_s2_combo",
            r,
            &s(r)? + &s(r - 1)?,
            (&satake_u2_indicator(r) - &satake_u2_indicator(r - 1)).scale_int(sign(r)),
        ));
        let p_sum = &(&s(r)? + &s(r - 1)?.scale_int(2)) + &s(r - 2)?;
        out.push(check_y("p_polynomial", r, p_polynomial(r), p_sum.scale_int(sign(r))));
        let three_term = SatakeY::from_terms([
            (r, QPoly::monomial(1, r)),
            (r - 1, QPoly::monomial(-2, r - 1)),
            (r - 2, QPoly::monomial(1, r - 2)),
        ]);
        out.push(check_y(
            "p_polynomial_step",
            r,
            &p_polynomial(r) - &p_polynomial(r - 1).scale(&q),
            three_term,
        ));
    }
    Ok(out)
}
