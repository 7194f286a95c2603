//! Truncated arithmetic in `O_E / p^k` for `E = F(sqrt(eps))` unramified over `F = Q_p`,
//! the quaternion order `O_E + O_E Pi`, and exhaustive volume counts.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::rational_to_json;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("p^precision = {p}^{prec} is too large for exhaustive enumeration")]
    TooLarge { p: u64, prec: u32 },
    #[error("precision {prec} cannot decide this predicate (needs at least {needed})")]
    InsufficientPrecision { prec: u32, needed: i64 },
    #[error("{0} is not a unit")]
    NotUnit(String),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("lambda * conj(lambda) = {lhs} differs from Nm(alpha + beta Pi) = {rhs}")]
    NormMismatch { lhs: String, rhs: String },
    #[error("elements come from different rings")]
    ContextMismatch,
}

/// Valuation of a residue: exact below the precision, otherwise only a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TruncValuation {
    Exact(u32),
    AtLeast(u32),
}

impl TruncValuation {
    fn from_raw(v: u32, prec: u32) -> Self {
        if v >= prec {
            Self::AtLeast(prec)
        } else {
            Self::Exact(v)
        }
    }

    /// The valuation a true element of valuation `v` would show at precision `prec`.
    pub fn expected(v: i64, prec: u32) -> Self {
        if v >= prec as i64 {
            Self::AtLeast(prec)
        } else {
            Self::Exact(v as u32)
        }
    }

    pub fn is_at_least(self, k: i64) -> Result<bool, PadicError> {
        match self {
            Self::Exact(v) => Ok(v as i64 >= k),
            Self::AtLeast(p) if k <= p as i64 => Ok(true),
            Self::AtLeast(p) => Err(PadicError::InsufficientPrecision { prec: p, needed: k }),
        }
    }

    pub fn equals(self, n: i64) -> Result<bool, PadicError> {
        match self {
            Self::Exact(v) => Ok(v as i64 == n),
            Self::AtLeast(p) if n < p as i64 => Ok(false),
            Self::AtLeast(p) => Err(PadicError::InsufficientPrecision { prec: p, needed: n + 1 }),
        }
    }
}

impl fmt::Display for TruncValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(v) => write!(f, "{v}"),
            Self::AtLeast(p) => write!(f, ">={p}"),
        }
    }
}

fn is_odd_prime(p: u64) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// The ring `O_E / p^prec`, with `E = F(sqrt(eps))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadCtx {
    pub p: u64,
    pub prec: u32,
    pub eps: u64,
    pub modulus: u64,
}

impl QuadCtx {
    /// Largest `p^prec` accepted; enumeration visits `modulus^2` elements.
    pub const MAX_MODULUS: u64 = 1 << 20;

    pub fn new(p: u64, prec: u32) -> Result<Self, PadicError> {
        if !is_odd_prime(p) {
            return Err(PadicError::NotOddPrime(p));
        }
        if prec == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        let modulus = p
            .checked_pow(prec)
            .filter(|m| *m <= Self::MAX_MODULUS)
            .ok_or(PadicError::TooLarge { p, prec })?;
        let eps = Self::smallest_nonresidue(p);
        Ok(Self { p, prec, eps, modulus })
    }

    pub fn smallest_nonresidue(p: u64) -> u64 {
        (2..p).find(|a| pow_mod(*a, (p - 1) / 2, p) == p - 1).expect("odd prime has a non-residue")
    }

    pub fn q(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.p))
    }

    /// `q^{-e}` for `e` of either sign.
    pub fn q_pow_neg(&self, e: i64) -> BigRational {
        let base = BigInt::from(self.p).pow(e.unsigned_abs() as u32);
        if e >= 0 {
            BigRational::new(BigInt::one(), base)
        } else {
            BigRational::from_integer(base)
        }
    }

    /// Measure of a single residue class, `q^{-2 prec}`.
    pub fn cell_volume(&self) -> BigRational {
        self.q_pow_neg(2 * self.prec as i64)
    }

    fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.modulus as i64) as u64
    }

    pub fn elem(&self, a: i64, b: i64) -> TruncQuadExt {
        TruncQuadExt { ctx: *self, a: self.reduce(a), b: self.reduce(b) }
    }

    pub fn zero(&self) -> TruncQuadExt {
        self.elem(0, 0)
    }

    pub fn one(&self) -> TruncQuadExt {
        self.elem(1, 0)
    }

    pub fn sqrt_eps(&self) -> TruncQuadExt {
        self.elem(0, 1)
    }

    pub fn p_elem(&self) -> TruncQuadExt {
        self.elem(self.p as i64, 0)
    }

    /// `v_p` of a residue, capped at `prec`.
    pub fn vp(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.prec;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn len(&self) -> usize {
        (self.modulus * self.modulus) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> impl Iterator<Item = TruncQuadExt> + '_ {
        let m = self.modulus;
        (0..m).flat_map(move |a| (0..m).map(move |b| TruncQuadExt { ctx: *self, a, b }))
    }

    pub fn units(&self) -> impl Iterator<Item = TruncQuadExt> + '_ {
        self.elements().filter(TruncQuadExt::is_unit)
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> TruncQuadExt {
        let m = self.modulus;
        TruncQuadExt { ctx: *self, a: rng.gen_range(0..m), b: rng.gen_range(0..m) }
    }

    pub fn random_unit<R: Rng>(&self, rng: &mut R) -> TruncQuadExt {
        loop {
            let x = self.random(rng);
            if x.is_unit() {
                return x;
            }
        }
    }
}

/// `a + b sqrt(eps)` with `a, b` residues mod `p^prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncQuadExt {
    ctx: QuadCtx,
    a: u64,
    b: u64,
}

impl TruncQuadExt {
    pub fn ctx(&self) -> &QuadCtx {
        &self.ctx
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn conj(&self) -> Self {
        Self { b: (self.ctx.modulus - self.b) % self.ctx.modulus, ..*self }
    }

    /// `a^2 - eps b^2` as a residue mod `p^prec`.
    pub fn norm_residue(&self) -> u64 {
        let m = self.ctx.modulus;
        let a2 = mul_mod(self.a, self.a, m);
        let b2 = mul_mod(mul_mod(self.b, self.b, m), self.ctx.eps, m);
        (a2 + m - b2) % m
    }

    pub fn norm(&self) -> Self {
        Self { a: self.norm_residue(), b: 0, ..*self }
    }

    pub fn valuation(&self) -> TruncValuation {
        let v = self.ctx.vp(self.a).min(self.ctx.vp(self.b));
        TruncValuation::from_raw(v, self.ctx.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == TruncValuation::Exact(0)
    }

    pub fn inverse(&self) -> Result<Self, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NotUnit(self.to_string()));
        }
        let m = self.ctx.modulus;
        let phi = m / self.ctx.p * (self.ctx.p - 1);
        let n_inv = pow_mod(self.norm_residue(), phi - 1, m);
        let c = self.conj();
        Ok(Self { a: mul_mod(c.a, n_inv, m), b: mul_mod(c.b, n_inv, m), ..*self })
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = self.ctx.reduce(k);
        let m = self.ctx.modulus;
        Self { a: mul_mod(self.a, k, m), b: mul_mod(self.b, k, m), ..*self }
    }
}

impl fmt::Display for TruncQuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({}) mod {}", self.a, self.b, self.ctx.eps, self.ctx.modulus)
    }
}

impl Serialize for TruncQuadExt {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        [self.a, self.b].serialize(ser)
    }
}

impl Add for TruncQuadExt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        debug_assert_eq!(self.ctx, o.ctx);
        let m = self.ctx.modulus;
        Self { a: (self.a + o.a) % m, b: (self.b + o.b) % m, ..self }
    }
}

impl Sub for TruncQuadExt {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for TruncQuadExt {
    type Output = Self;
    fn neg(self) -> Self {
        let m = self.ctx.modulus;
        Self { a: (m - self.a) % m, b: (m - self.b) % m, ..self }
    }
}

impl Mul for TruncQuadExt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        debug_assert_eq!(self.ctx, o.ctx);
        let m = self.ctx.modulus;
        let ac = mul_mod(self.a, o.a, m);
        let bd = mul_mod(mul_mod(self.b, o.b, m), self.ctx.eps, m);
        let ad = mul_mod(self.a, o.b, m);
        let bc = mul_mod(self.b, o.a, m);
        Self { a: (ac + bd) % m, b: (ad + bc) % m, ..self }
    }
}

/// `x + y Pi` with `Pi^2 = p` and `Pi t = conj(t) Pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TruncQuaternion {
    pub x: TruncQuadExt,
    pub y: TruncQuadExt,
}

impl TruncQuaternion {
    pub fn new(x: TruncQuadExt, y: TruncQuadExt) -> Self {
        Self { x, y }
    }

    pub fn from_e(x: TruncQuadExt) -> Self {
        Self { x, y: x.ctx.zero() }
    }

    pub fn pi(ctx: &QuadCtx) -> Self {
        Self { x: ctx.zero(), y: ctx.one() }
    }

    pub fn conj(&self) -> Self {
        Self { x: self.x.conj(), y: -self.y }
    }

    /// `Nm(x) - Nm(y) p`.
    pub fn reduced_norm(&self) -> TruncQuadExt {
        self.x.norm() - self.y.norm() * self.x.ctx.p_elem()
    }

    /// Left multiplication by an element of `E`.
    pub fn left_scale(&self, c: TruncQuadExt) -> Self {
        Self { x: c * self.x, y: c * self.y }
    }

    pub fn random<R: Rng>(ctx: &QuadCtx, rng: &mut R) -> Self {
        Self { x: ctx.random(rng), y: ctx.random(rng) }
    }
}

impl Mul for TruncQuaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = self.x.ctx.p_elem();
        Self {
            x: self.x * o.x + self.y * o.y.conj() * p,
            y: self.x * o.y + self.y * o.x.conj(),
        }
    }
}

impl Add for TruncQuaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { x: self.x + o.x, y: self.y + o.y }
    }
}

impl fmt::Display for TruncQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})Pi", self.x, self.y)
    }
}

/// `<x, y>`: the `E`-component of `x * conj(y)`.
pub fn hermitian(x: &TruncQuaternion, y: &TruncQuaternion) -> TruncQuadExt {
    (*x * y.conj()).x
}

fn ser_rational<S: Serializer>(c: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
    rational_to_json(c).serialize(ser)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VolumeReport {
    pub lemma: String,
    pub params: Value,
    #[serde(serialize_with = "ser_rational")]
    pub enumerated: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub formula: BigRational,
    #[serde(rename = "match")]
    pub matches: bool,
}

impl VolumeReport {
    fn new(lemma: &str, params: Value, enumerated: BigRational, formula: BigRational) -> Self {
        let matches = enumerated == formula;
        Self { lemma: lemma.to_string(), params, enumerated, formula, matches }
    }
}

fn check_same_ctx(xs: &[&TruncQuadExt]) -> Result<QuadCtx, PadicError> {
    let ctx = *xs[0].ctx();
    if xs.iter().any(|x| *x.ctx() != ctx) {
        return Err(PadicError::ContextMismatch);
    }
    Ok(ctx)
}

fn check_disk_args(ctx: &QuadCtx, rho: i64, n: i64) -> Result<(), PadicError> {
    if n < 1 || n < rho {
        return Err(PadicError::OutOfRange(format!("need n >= max(rho, 1), got rho = {rho}, n = {n}")));
    }
    if (ctx.prec as i64) < n + 1 {
        return Err(PadicError::InsufficientPrecision { prec: ctx.prec, needed: n + 1 });
    }
    Ok(())
}

fn require_unit(x: &TruncQuadExt) -> Result<(), PadicError> {
    if x.is_unit() {
        Ok(())
    } else {
        Err(PadicError::NotUnit(x.to_string()))
    }
}

/// `v(1 - x conj(x))` for every element, indexed by `a * modulus + b`, capped at `prec`.
fn norm_defect_table(ctx: &QuadCtx) -> Vec<u8> {
    let m = ctx.modulus;
    ctx.elements()
        .map(|x| ctx.vp((1 + m - x.norm_residue()) % m) as u8)
        .collect()
}

fn residue_vp_table(ctx: &QuadCtx) -> Vec<u8> {
    (0..ctx.modulus).map(|a| ctx.vp(a) as u8).collect()
}

/// `v(x - center)` for every element, capped at `prec`.
fn distance_table(ctx: &QuadCtx, vp: &[u8], center: &TruncQuadExt) -> Vec<u8> {
    let m = ctx.modulus;
    let mut out = Vec::with_capacity(ctx.len());
    for a in 0..m {
        let va = vp[((a + m - center.a) % m) as usize];
        for b in 0..m {
            out.push(va.min(vp[((b + m - center.b) % m) as usize]));
        }
    }
    out
}

/// Closed formula for the one-disk volume.
pub fn one_disk_formula(ctx: &QuadCtx, defect: TruncValuation, rho: i64, n: i64) -> Result<BigRational, PadicError> {
    let one = BigRational::one();
    if rho <= 0 {
        return Ok(ctx.q_pow_neg(n) * (&one - ctx.q_pow_neg(2)));
    }
    if !defect.is_at_least(rho)? {
        return Ok(BigRational::zero());
    }
    Ok(ctx.q_pow_neg(n + rho) * (&one - ctx.q_pow_neg(1)))
}

/// Closed formula for the two-disk volume with `rho1 >= rho2`.
pub fn two_disk_formula(
    ctx: &QuadCtx,
    defect1: TruncValuation,
    gap: TruncValuation,
    rho1: i64,
    rho2: i64,
    n: i64,
) -> Result<BigRational, PadicError> {
    if !defect1.is_at_least(rho1)? || !gap.is_at_least(rho2)? {
        return Ok(BigRational::zero());
    }
    one_disk_formula(ctx, defect1, rho1, n)
}

/// Volume of `{x : v(1 - x conj(x)) = n, v(x - xi) >= rho}` by enumerating `O_E / p^prec`.
pub fn count_one_disk(xi: &TruncQuadExt, rho: i64, n: i64) -> Result<BigRational, PadicError> {
    let ctx = *xi.ctx();
    require_unit(xi)?;
    check_disk_args(&ctx, rho, n)?;
    let mut count: u64 = 0;
    for x in ctx.elements() {
        let defect = (ctx.one() - x * x.conj()).valuation();
        if defect.equals(n)? && (x - *xi).valuation().is_at_least(rho)? {
            count += 1;
        }
    }
    Ok(BigRational::from_integer(count.into()) * ctx.cell_volume())
}

/// Volume of `{x : v(1 - x conj(x)) = n, v(x - xi1) >= rho1, v(x - xi2) >= rho2}`.
pub fn count_two_disk(
    xi1: &TruncQuadExt,
    xi2: &TruncQuadExt,
    rho1: i64,
    rho2: i64,
    n: i64,
) -> Result<BigRational, PadicError> {
    let ctx = check_same_ctx(&[xi1, xi2])?;
    require_unit(xi1)?;
    require_unit(xi2)?;
    if rho1 < rho2 {
        return Err(PadicError::OutOfRange(format!("need rho1 >= rho2, got {rho1} < {rho2}")));
    }
    check_disk_args(&ctx, rho1, n)?;
    let mut count: u64 = 0;
    for x in ctx.elements() {
        let defect = (ctx.one() - x * x.conj()).valuation();
        if defect.equals(n)?
            && (x - *xi1).valuation().is_at_least(rho1)?
            && (x - *xi2).valuation().is_at_least(rho2)?
        {
            count += 1;
        }
    }
    Ok(BigRational::from_integer(count.into()) * ctx.cell_volume())
}

pub fn one_disk_report(xi: &TruncQuadExt, rho: i64, n: i64) -> Result<VolumeReport, PadicError> {
    let ctx = xi.ctx();
    let enumerated = count_one_disk(xi, rho, n)?;
    let defect = (ctx.one() - *xi * xi.conj()).valuation();
    let formula = one_disk_formula(ctx, defect, rho, n)?;
    let params = serde_json::json!({ "p": ctx.p, "precision": ctx.prec, "xi": xi, "rho": rho, "n": n });
    Ok(VolumeReport::new("one_disk", params, enumerated, formula))
}

pub fn two_disk_report(
    xi1: &TruncQuadExt,
    xi2: &TruncQuadExt,
    rho1: i64,
    rho2: i64,
    n: i64,
) -> Result<VolumeReport, PadicError> {
    let ctx = xi1.ctx();
    let enumerated = count_two_disk(xi1, xi2, rho1, rho2, n)?;
    let defect = (ctx.one() - *xi1 * xi1.conj()).valuation();
    let gap = (*xi1 - *xi2).valuation();
    let formula = two_disk_formula(ctx, defect, gap, rho1, rho2, n)?;
    let params = serde_json::json!({
        "p": ctx.p, "precision": ctx.prec, "xi1": xi1, "xi2": xi2, "rho1": rho1, "rho2": rho2, "n": n,
    });
    Ok(VolumeReport::new("two_disk", params, enumerated, formula))
}

/// Outcome of a sweep over unit centers; only mismatches are kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VolumeSweep {
    pub lemma: String,
    pub centers: usize,
    pub checked: usize,
    pub failures: Vec<VolumeReport>,
}

impl VolumeSweep {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Every `(rho, n)` decidable at this precision: `1 <= n <= prec - 1`, `-1 <= rho <= n`.
pub fn disk_parameter_range(ctx: &QuadCtx) -> Vec<(i64, i64)> {
    let top = ctx.prec as i64 - 1;
    (1..=top).flat_map(|n| (-1..=n).map(move |rho| (rho, n))).collect()
}

/// Sums `hist[d]` over `d >= rho`.
fn tail(hist: &[u64], rho: i64) -> u64 {
    hist[rho.max(0) as usize..].iter().sum()
}

/// One-disk lemma for all unit centers and all decidable `(rho, n)`.
pub fn sweep_one_disk(ctx: &QuadCtx) -> VolumeSweep {
    let defects = norm_defect_table(ctx);
    let vp = residue_vp_table(ctx);
    let width = ctx.prec as usize + 1;
    let range = disk_parameter_range(ctx);
    let mut sweep = VolumeSweep { lemma: "one_disk".into(), centers: 0, checked: 0, failures: Vec::new() };
    for xi in ctx.units() {
        sweep.centers += 1;
        let dist = distance_table(ctx, &vp, &xi);
        let mut hist = vec![0u64; width * width];
        for (n, d) in defects.iter().zip(&dist) {
            hist[*n as usize * width + *d as usize] += 1;
        }
        let defect = (ctx.one() - xi * xi.conj()).valuation();
        for &(rho, n) in &range {
            let row = &hist[n as usize * width..(n as usize + 1) * width];
            let enumerated = BigRational::from_integer(tail(row, rho).into()) * ctx.cell_volume();
            let formula = one_disk_formula(ctx, defect, rho, n).expect("range is decidable");
            sweep.checked += 1;
            if enumerated != formula {
                let params = serde_json::json!({ "xi": xi, "rho": rho, "n": n });
                sweep.failures.push(VolumeReport::new("one_disk", params, enumerated, formula));
            }
        }
    }
    sweep
}

/// Second centers paired with `xi1`: `xi1` itself and `xi1 + p^k delta` for
/// `delta in {1, sqrt(eps), 1 + sqrt(eps)}`, keeping units.
pub fn second_centers(xi1: &TruncQuadExt) -> Vec<TruncQuadExt> {
    let ctx = xi1.ctx();
    let mut out = vec![*xi1];
    let deltas = [ctx.one(), ctx.sqrt_eps(), ctx.one() + ctx.sqrt_eps()];
    for k in 0..ctx.prec {
        let pk = ctx.p.pow(k) as i64;
        for d in deltas {
            let xi2 = *xi1 + d.scale(pk);
            if xi2.is_unit() {
                out.push(xi2);
            }
        }
    }
    out
}

/// Two-disk lemma for all unit `xi1`, the structured `xi2` of [`second_centers`],
/// and all decidable `rho2 <= rho1 <= n`.
pub fn sweep_two_disk(ctx: &QuadCtx) -> VolumeSweep {
    let defects = norm_defect_table(ctx);
    let vp = residue_vp_table(ctx);
    let w = ctx.prec as usize + 1;
    let range = disk_parameter_range(ctx);
    let mut sweep = VolumeSweep { lemma: "two_disk".into(), centers: 0, checked: 0, failures: Vec::new() };
    for xi1 in ctx.units() {
        let dist1 = distance_table(ctx, &vp, &xi1);
        let defect = (ctx.one() - xi1 * xi1.conj()).valuation();
        for xi2 in second_centers(&xi1) {
            sweep.centers += 1;
            let dist2 = distance_table(ctx, &vp, &xi2);
            let mut hist = vec![0u64; w * w * w];
            for i in 0..defects.len() {
                hist[(defects[i] as usize * w + dist1[i] as usize) * w + dist2[i] as usize] += 1;
            }
            let gap = (xi1 - xi2).valuation();
            for &(rho1, n) in &range {
                for rho2 in -1..=rho1 {
                    let count: u64 = (rho1.max(0) as usize..w)
                        .map(|d1| tail(&hist[(n as usize * w + d1) * w..(n as usize * w + d1 + 1) * w], rho2))
                        .sum();
                    let enumerated = BigRational::from_integer(count.into()) * ctx.cell_volume();
                    let formula = two_disk_formula(ctx, defect, gap, rho1, rho2, n).expect("range is decidable");
                    sweep.checked += 1;
                    if enumerated != formula {
                        let params = serde_json::json!({ "xi1": xi1, "xi2": xi2, "rho1": rho1, "rho2": rho2, "n": n });
                        sweep.failures.push(VolumeReport::new("two_disk", params, enumerated, formula));
                    }
                }
            }
        }
    }
    sweep
}

/// Admissible data for the unitary map `x -> lambda^{-1} x (alpha + beta Pi)` and a vector `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantInput {
    pub lambda: TruncQuadExt,
    pub alpha: TruncQuadExt,
    pub beta: TruncQuadExt,
    pub u: TruncQuaternion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub input: InvariantInput,
    /// `g` on the basis `1, Pi`, columns `g(1)` and `g(Pi)`: `[[a11, a12], [a21, a22]]`.
    pub matrix: [[TruncQuadExt; 2]; 2],
    pub trace: TruncQuadExt,
    pub det: TruncQuadExt,
    pub u_u: TruncQuadExt,
    pub gu_u: TruncQuadExt,
    pub trace_ok: bool,
    pub det_ok: bool,
    pub u_u_ok: bool,
    pub gu_u_ok: bool,
    /// `<g(u), u>` against the case split `s = 0` / `t = 0`.
    pub gu_u_case_ok: bool,
    /// `v(a12 a21) = 2 v(beta) + 1` within precision.
    pub v_bc_ok: bool,
    /// `v(a22 - a11) = v(alpha_1)` where `alpha = alpha_0 + alpha_1 sqrt(eps)`.
    pub v_da_ok: bool,
}

impl InvariantReport {
    pub fn pass(&self) -> bool {
        self.trace_ok && self.det_ok && self.u_u_ok && self.gu_u_ok && self.gu_u_case_ok && self.v_bc_ok && self.v_da_ok
    }
}

pub fn quaternion_invariants(input: &InvariantInput) -> Result<InvariantReport, PadicError> {
    let InvariantInput { lambda, alpha, beta, u } = *input;
    let ctx = check_same_ctx(&[&lambda, &alpha, &beta, &u.x, &u.y])?;
    if !u.x.is_zero() && !u.y.is_zero() {
        return Err(PadicError::OutOfRange("u must lie in E or E Pi".into()));
    }
    let gq = TruncQuaternion::new(alpha, beta);
    let lhs = lambda * lambda.conj();
    let rhs = gq.reduced_norm();
    if lhs != rhs {
        return Err(PadicError::NormMismatch { lhs: lhs.to_string(), rhs: rhs.to_string() });
    }
    let li = lambda.inverse()?;
    let g = |x: TruncQuaternion| (x * gq).left_scale(li);
    let g1 = g(TruncQuaternion::from_e(ctx.one()));
    let gpi = g(TruncQuaternion::pi(&ctx));
    let matrix = [[g1.x, gpi.x], [g1.y, gpi.y]];
    let trace = matrix[0][0] + matrix[1][1];
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let u_u = hermitian(&u, &u);
    let gu_u = hermitian(&g(u), &u);

    let (s, t) = (u.x, u.y);
    let p = ctx.p_elem();
    let nm_u = u.reduced_norm();
    let case_value = if s.is_zero() { li * alpha.conj() * nm_u } else { li * alpha * nm_u };
    let v_beta = beta.valuation();
    let v_bc_ok = match v_beta {
        TruncValuation::Exact(v) => (matrix[0][1] * matrix[1][0]).valuation() == TruncValuation::expected(2 * v as i64 + 1, ctx.prec),
        TruncValuation::AtLeast(_) => (matrix[0][1] * matrix[1][0]).valuation() == TruncValuation::AtLeast(ctx.prec),
    };
    let alpha1 = ctx.elem(alpha.b as i64, 0);
    Ok(InvariantReport {
        input: *input,
        matrix,
        trace,
        det,
        u_u,
        gu_u,
        trace_ok: trace == li * (alpha + alpha.conj()),
        det_ok: det == li * li * (alpha * alpha.conj() - beta * beta.conj() * p),
        u_u_ok: u_u == s * s.conj() - t * t.conj() * p,
        gu_u_ok: gu_u == li * (s * s.conj() * alpha - t * t.conj() * alpha.conj() * p),
        gu_u_case_ok: gu_u == case_value,
        v_bc_ok,
        v_da_ok: (matrix[1][1] - matrix[0][0]).valuation() == alpha1.valuation(),
    })
}

/// Table from each norm residue of a unit to one preimage.
pub fn norm_preimages(ctx: &QuadCtx) -> Vec<Option<TruncQuadExt>> {
    let mut table = vec![None; ctx.modulus as usize];
    for x in ctx.units() {
        let slot = &mut table[x.norm_residue() as usize];
        if slot.is_none() {
            *slot = Some(x);
        }
    }
    table
}

/// A random admissible input: `alpha` a unit, `beta` nonzero, `lambda` chosen with the right norm,
/// and `u` a nonzero element of `E` or `E Pi`.
pub fn random_admissible<R: Rng>(
    ctx: &QuadCtx,
    preimages: &[Option<TruncQuadExt>],
    rng: &mut R,
) -> InvariantInput {
    let alpha = ctx.random_unit(rng);
    let beta = loop {
        let b = ctx.random(rng);
        if !b.is_zero() {
            break b;
        }
    };
    let target = TruncQuaternion::new(alpha, beta).reduced_norm();
    let lambda = preimages[target.a as usize].expect("norm is surjective on units");
    let w = loop {
        let w = ctx.random(rng);
        if !w.is_zero() {
            break w;
        }
    };
    let u = if rng.gen_bool(0.5) {
        TruncQuaternion::new(w, ctx.zero())
    } else {
        TruncQuaternion::new(ctx.zero(), w)
    };
    InvariantInput { lambda, alpha, beta, u }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSweep {
    pub checked: usize,
    pub failures: Vec<InvariantReport>,
}

impl InvariantSweep {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

pub fn sweep_quaternion_invariants<R: Rng>(ctx: &QuadCtx, count: usize, rng: &mut R) -> Result<InvariantSweep, PadicError> {
    let preimages = norm_preimages(ctx);
    let mut failures = Vec::new();
    for _ in 0..count {
        let input = random_admissible(ctx, &preimages, rng);
        let rep = quaternion_invariants(&input)?;
        if !rep.pass() {
            failures.push(rep);
        }
    }
    Ok(InvariantSweep { checked: count, failures })
}

/// `conj(conj(x)) = x`, `conj(xy) = conj(y) conj(x)` and `x conj(x) = Nrd(x)` on random elements.
pub fn check_anti_involution<R: Rng>(ctx: &QuadCtx, count: usize, rng: &mut R) -> usize {
    let mut failures = 0;
    for _ in 0..count {
        let x = TruncQuaternion::random(ctx, rng);
        let y = TruncQuaternion::random(ctx, rng);
        let ok = x.conj().conj() == x
            && (x * y).conj() == y.conj() * x.conj()
            && x * x.conj() == TruncQuaternion::from_e(x.reduced_norm());
        if !ok {
            failures += 1;
        }
    }
    failures
}
