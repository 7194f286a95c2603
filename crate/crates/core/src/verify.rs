//! Parameter grids and batch verification suites.

use std::fmt::Display;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::sign;
use crate::intersection::{
    int_circ, verify_afl, verify_clean_intersection, verify_int_total, verify_miracle, IdentityReport,
};
use crate::kernel::{build_matrix, certify_full_rank, test_large_r_vanishing, test_phi_sequence};
use crate::orbital::{
    derivative_closed_form, derivative_combo, derivative_of_vector, orbital_closed_form, orbital_support_sum,
    HeckeVector, OrbitalParams, Valuation,
};
use crate::padic::{check_anti_involution, sweep_one_disk, sweep_quaternion_invariants, sweep_two_disk, QuadCtx, VolumeSweep};
use crate::satake::verify_satake;

/// Box of parameters: `r`, odd `v(b)+v(c) = s`, `v(b) >= vb_min`, `v(e)`, `v(d-a)` (plus infinity).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub r_max: i64,
    pub s_max: i64,
    pub vb_min: i64,
    pub ve_max: i64,
    pub vda_max: i64,
    pub infinite_vda: bool,
}

impl Default for Grid {
    fn default() -> Self {
        Self { r_max: 6, s_max: 11, vb_min: -6, ve_max: 10, vda_max: 6, infinite_vda: true }
    }
}

impl Grid {
    /// A small box for quick runs.
    pub fn small() -> Self {
        Self { r_max: 3, s_max: 5, vb_min: -2, ve_max: 4, vda_max: 3, infinite_vda: true }
    }

    fn vdas(&self) -> Vec<Valuation> {
        let mut v: Vec<Valuation> = (0..=self.vda_max).map(Valuation::Finite).collect();
        if self.infinite_vda {
            v.push(Valuation::Infinite);
        }
        v
    }

    /// Tuples with `r = 0`; `v(b)` ranges over `vb_min..=s`.
    pub fn bases(&self) -> Vec<OrbitalParams> {
        let mut out = Vec::new();
        for s in (1..=self.s_max).step_by(2) {
            for vb in self.vb_min..=s {
                for ve in 0..=self.ve_max {
                    for &vda in &self.vdas() {
                        out.push(OrbitalParams::new(0, vb, s - vb, ve, vda));
                    }
                }
            }
        }
        out
    }

    pub fn params(&self) -> Vec<OrbitalParams> {
        let bases = self.bases();
        (0..=self.r_max)
            .flat_map(|r| bases.iter().map(move |b| b.with_r(r)))
            .collect()
    }
}

/// Tally of one suite; only the first few failures are kept verbatim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub failed: usize,
    pub examples: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub const MAX_EXAMPLES: usize = 10;

    pub fn pass(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} checked, {} failed ({:.2} s)",
            self.suite, self.checked, self.failed, self.seconds
        )
    }
}

/// Runs `check` on every item; `Err(detail)` counts as a failure.
pub fn run_suite<T, F>(suite: &str, items: &[T], check: F) -> SuiteReport
where
    T: Sync + Display,
    F: Fn(&T) -> Result<(), String> + Sync,
{
    let start = Instant::now();
    let failures: Vec<String> = items
        .par_iter()
        .filter_map(|it| check(it).err().map(|e| format!("{it}: {e}")))
        .collect();
    SuiteReport {
        suite: suite.to_string(),
        checked: items.len(),
        failed: failures.len(),
        examples: failures.into_iter().take(SuiteReport::MAX_EXAMPLES).collect(),
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn identity(rep: Result<IdentityReport, impl Display>) -> Result<(), String> {
    match rep {
        Ok(r) if r.pass => Ok(()),
        Ok(r) => Err(format!("lhs {} != rhs {}", r.lhs, r.rhs)),
        Err(e) => Err(e.to_string()),
    }
}

fn with_positive_r(params: &[OrbitalParams]) -> Vec<OrbitalParams> {
    params.iter().filter(|p| p.r >= 1).copied().collect()
}

pub fn suite_orbital_oracle(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("orbital_oracle", params, |p| {
        let a = orbital_closed_form(p).map_err(|e| e.to_string())?;
        let b = orbital_support_sum(p).map_err(|e| e.to_string())?;
        if a == b {
            Ok(())
        } else {
            Err(format!("closed {a} != support {b}"))
        }
    })
}

pub fn suite_s_zero_vanishing(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("s_zero_vanishing", params, |p| {
        let v = orbital_closed_form(p).map_err(|e| e.to_string())?.at_one();
        if v.is_zero() {
            Ok(())
        } else {
            Err(format!("Orb at s = 0 is {v}"))
        }
    })
}

pub fn suite_derivative_consistency(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("derivative_consistency", params, |p| {
        let series = orbital_closed_form(p).map_err(|e| e.to_string())?;
        let symbolic = series.log_derivative_at_zero().scale_int(sign(p.vc + p.r));
        let closed = derivative_closed_form(p).map_err(|e| e.to_string())?;
        if symbolic == closed {
            Ok(())
        } else {
            Err(format!("closed {closed} != differentiated {symbolic}"))
        }
    })
}

pub fn suite_combo_consistency(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("combo_consistency", &with_positive_r(params), |p| {
        let combo = derivative_combo(p).map_err(|e| e.to_string())?;
        let v = HeckeVector::from_int_terms([(p.r, 1), (p.r - 1, 1)]);
        let expanded = derivative_of_vector(p, &v).map_err(|e| e.to_string())?.scale_int(sign(p.vc + p.r));
        if combo == expanded {
            Ok(())
        } else {
            Err(format!("combo {combo} != expansion {expanded}"))
        }
    })
}

pub fn suite_sign_pattern(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("sign_pattern", params, |p| {
        let series = orbital_closed_form(p).map_err(|e| e.to_string())?;
        if series.has_alternating_sign_pattern() {
            Ok(())
        } else {
            Err(format!("coefficients do not alternate: {series}"))
        }
    })
}

pub fn suite_miracle(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("miracle", params, |p| identity(verify_miracle(p)))
}

pub fn suite_int_total(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("int_total", params, |p| identity(verify_int_total(p)))
}

pub fn suite_afl(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("afl", &with_positive_r(params), |p| identity(verify_afl(p)))
}

/// The identity with `Int°` in place of the full intersection and sign `(-1)^{v(c)+r}`;
/// reported for information, it is not expected to hold.
pub fn suite_afl_literal(params: &[OrbitalParams]) -> SuiteReport {
    run_suite("afl_literal_int_circ", &with_positive_r(params), |p| {
        let lhs = (int_circ(p).map_err(|e| e.to_string())? - int_circ(&p.with_r(p.r - 1)).map_err(|e| e.to_string())?)
            .scale_int(sign(p.r));
        let rhs = derivative_combo(p).map_err(|e| e.to_string())?.scale_int(sign(p.vc + p.r));
        if lhs == rhs {
            Ok(())
        } else {
            Err(format!("lhs {lhs} != rhs {rhs}"))
        }
    })
}

/// Restricted to `r >= 1` and `v(e) >= 1`, where the closed formula applies.
pub fn suite_clean(params: &[OrbitalParams]) -> SuiteReport {
    let items: Vec<OrbitalParams> = params.iter().filter(|p| p.r >= 1 && p.ve >= 1).copied().collect();
    run_suite("clean_intersection", &items, |p| identity(verify_clean_intersection(p)))
}

/// `(v(b)+v(c), v(d-a), N)` for the kernel certificates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelCase {
    pub sum_bc: i64,
    pub vda: Valuation,
    pub n: i64,
}

impl Display for KernelCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(s={}, vda={}, N={})", self.sum_bc, self.vda, self.n)
    }
}

pub fn kernel_cases(sums: &[i64], vdas: &[i64], n_max: i64) -> Vec<KernelCase> {
    let mut out = Vec::new();
    for &sum_bc in sums {
        for &v in vdas {
            for n in 0..=n_max {
                out.push(KernelCase { sum_bc, vda: Valuation::Finite(v), n });
            }
        }
    }
    out
}

pub fn suite_kernel(cases: &[KernelCase]) -> SuiteReport {
    run_suite("kernel_full_rank", cases, |c| {
        let m = build_matrix(c.sum_bc, c.vda, c.n).map_err(|e| e.to_string())?;
        let cert = certify_full_rank(&m).map_err(|e| e.to_string())?;
        if cert.pass() {
            Ok(())
        } else {
            Err(format!(
                "rank {} full {} spots {} below {} antidiag {} shape {}",
                cert.elimination.rank,
                cert.full_rank,
                cert.spot_checks_nonzero,
                cert.zero_below_antidiagonal,
                cert.antidiagonal_matches,
                cert.det_shape_ok
            ))
        }
    })
}

/// Every base with `r` in `v(e)+2 ..= v(e)+8`.
pub fn suite_large_r(grid: &Grid) -> SuiteReport {
    let items: Vec<OrbitalParams> = grid
        .bases()
        .into_iter()
        .flat_map(|b| (b.ve + 2..=b.ve + 8).map(move |r| b.with_r(r)))
        .collect();
    run_suite("large_r_vanishing", &items, |p| {
        let rep = test_large_r_vanishing(p).map_err(|e| e.to_string())?;
        if rep.pass {
            Ok(())
        } else {
            Err(format!("value {}", rep.value))
        }
    })
}

/// Every base with `r` in `5 ..= v(e) + 12`; only values outside the window are asserted.
pub fn suite_phi(grid: &Grid) -> SuiteReport {
    let items: Vec<OrbitalParams> = grid
        .bases()
        .into_iter()
        .flat_map(|b| (5..=b.ve + 12).map(move |r| b.with_r(r)))
        .collect();
    run_suite("phi_sequence", &items, |p| {
        let rep = test_phi_sequence(p, p.r).map_err(|e| e.to_string())?;
        if rep.pass {
            Ok(())
        } else {
            Err(format!("value {}", rep.value))
        }
    })
}

pub fn suite_satake(rmax: i64) -> SuiteReport {
    let start = Instant::now();
    let mut rep = match verify_satake(rmax) {
        Ok(checks) => {
            let bad: Vec<String> = checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{} r={}: {} != {}", c.identity, c.r, c.lhs, c.rhs))
                .collect();
            SuiteReport {
                suite: "satake".into(),
                checked: checks.len(),
                failed: bad.len(),
                examples: bad.into_iter().take(SuiteReport::MAX_EXAMPLES).collect(),
                seconds: 0.0,
            }
        }
        Err(e) => SuiteReport { suite: "satake".into(), checked: 0, failed: 1, examples: vec![e.to_string()], seconds: 0.0 },
    };
    rep.seconds = start.elapsed().as_secs_f64();
    rep
}

fn from_volume_sweep(s: VolumeSweep, seconds: f64) -> SuiteReport {
    SuiteReport {
        suite: format!("volume_{}", s.lemma),
        checked: s.checked,
        failed: s.failures.len(),
        examples: s
            .failures
            .iter()
            .take(SuiteReport::MAX_EXAMPLES)
            .map(|f| format!("{}: enumerated {} formula {}", f.params, f.enumerated, f.formula))
            .collect(),
        seconds,
    }
}

pub fn suite_volumes(ctx: &QuadCtx) -> Vec<SuiteReport> {
    let start = Instant::now();
    let one = from_volume_sweep(sweep_one_disk(ctx), start.elapsed().as_secs_f64());
    let start = Instant::now();
    let two = from_volume_sweep(sweep_two_disk(ctx), start.elapsed().as_secs_f64());
    vec![one, two]
}

pub fn suite_quaternion(ctx: &QuadCtx, count: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport {
        suite: "quaternion_invariants".into(),
        checked: 0,
        failed: 0,
        examples: Vec::new(),
        seconds: 0.0,
    };
    match sweep_quaternion_invariants(ctx, count, &mut rng) {
        Ok(s) => {
            rep.checked = s.checked;
            rep.failed = s.failures.len();
            rep.examples = s
                .failures
                .iter()
                .take(SuiteReport::MAX_EXAMPLES)
                .map(|f| serde_json::to_string(f).unwrap_or_default())
                .collect();
        }
        Err(e) => {
            rep.failed = 1;
            rep.examples.push(e.to_string());
        }
    }
    let bad = check_anti_involution(ctx, count, &mut rng);
    rep.checked += count;
    rep.failed += bad;
    if bad > 0 {
        rep.examples.push(format!("{bad} anti-involution failures"));
    }
    rep.seconds = start.elapsed().as_secs_f64();
    rep
}

/// Grid-driven suites in a fixed order.
pub fn run_grid_suites(grid: &Grid) -> Vec<SuiteReport> {
    let params = grid.params();
    vec![
        suite_orbital_oracle(&params),
        suite_s_zero_vanishing(&params),
        suite_derivative_consistency(&params),
        suite_combo_consistency(&params),
        suite_sign_pattern(&params),
        suite_miracle(&params),
        suite_int_total(&params),
        suite_afl(&params),
        suite_clean(&params),
        suite_large_r(grid),
        suite_phi(grid),
    ]
}
