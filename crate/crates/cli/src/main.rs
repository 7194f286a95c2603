use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use semilie_core::intersection::{gross_keating, int_circ, int_circ_kr_closed, int_total, GkPair};
use semilie_core::kernel::{build_matrix, certify_full_rank, row_reduce, DerivMatrix};
use semilie_core::orbital::{derivative_closed_form, derivative_combo, orbital_closed_form, orbital_support_sum};
use semilie_core::padic::{one_disk_report, two_disk_report, QuadCtx, VolumeReport};
use semilie_core::satake::{
    bc_gl3_to_u3, bc_s2_combo_image, bc_s2_on_basis, bc_s3_on_basis, satake_gl_det, satake_u3_indicator,
    SatakeY,
};
use semilie_core::verify::{
    kernel_cases, suite_afl, suite_clean, suite_combo_consistency, suite_derivative_consistency, suite_int_total,
    suite_kernel, suite_large_r, suite_miracle, suite_orbital_oracle, suite_phi, suite_quaternion, suite_s_zero_vanishing,
    suite_satake, suite_sign_pattern, suite_volumes, Grid, SuiteReport,
};
use semilie_core::{LaurentSeries, OrbitalParams, QPoly, Valuation};

/// Orbital integrals, intersection numbers and base change for the semi-Lie AFL at n = 2.
#[derive(Parser, Debug)]
#[command(name = "semilie", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Evaluate every polynomial in q at this integer.
    #[arg(long, global = true, allow_negative_numbers = true)]
    at_q: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbital integral of 1_{<=r} as a Laurent polynomial in T = q^s.
    Orbital(OrbitalArgs),
    /// Normalized derivative (-1)^{v(c)+r} dOrb(1_{<=r}) / log q.
    Derivative(OrbitalArgs),
    /// Normalized derivative of 1_{<=r} + 1_{<=r-1}.
    Combo(OrbitalArgs),
    /// Gross-Keating polynomial for invariants (n1, n2).
    Gk(GkArgs),
    /// Intersection numbers Int°, Int and the clean-intersection formula.
    Int(OrbitalArgs),
    /// Base-change images in the Satake variable Y.
    Bc {
        #[command(subcommand)]
        which: BcCommand,
    },
    /// Derivative matrix M, or its row-reduced forms M' and M''.
    KernelMatrix(KernelArgs),
    /// Compare enumerated disk volumes with the closed formulas.
    Volumes(VolumeArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct OrbitalArgs {
    #[arg(short = 'r', default_value_t = 0)]
    r: i64,
    #[arg(long, default_value_t = 0)]
    vb: i64,
    #[arg(long, default_value_t = 1)]
    vc: i64,
    #[arg(long, default_value_t = 0)]
    ve: i64,
    /// v(d-a), an integer or "inf".
    #[arg(long, default_value = "inf")]
    vda: Valuation,
    /// Also evaluate the lattice-support sum and compare.
    #[arg(long)]
    oracle: bool,
}

impl OrbitalArgs {
    fn params(&self) -> OrbitalParams {
        OrbitalParams::new(self.r, self.vb, self.vc, self.ve, self.vda)
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct GkArgs {
    #[arg(long)]
    n1: i64,
    #[arg(long)]
    n2: i64,
}

#[derive(Subcommand, Debug)]
enum BcCommand {
    /// BC_{S_3} of sum_j [1 + 2q + ... + 2q^{r-j}] 1_{K'_{S,j}}, or of 1_{K'_{S,r}} with --basis.
    S3(BcArgs),
    /// BC_{S_2} of 1_{K'_{S,<=r}} + 1_{K'_{S,<=r-1}}, or of 1_{K'_{S,<=r}} with --basis.
    S2(BcArgs),
    /// Satake transform of 1_{Mat_3, v(det) = r} and its base change.
    Gl3(BcArgs),
}

#[derive(Args, Debug)]
struct BcArgs {
    #[arg(short = 'r')]
    r: i64,
    #[arg(long)]
    basis: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Stage {
    #[value(name = "M")]
    M,
    #[value(name = "M'")]
    MPrime,
    #[value(name = "M''")]
    MDoublePrime,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    sum_bc: i64,
    #[arg(long)]
    vda: Valuation,
    #[arg(short = 'N')]
    n: i64,
    #[arg(long, value_enum, default_value_t = Stage::M)]
    stage: Stage,
    /// Also run the full-rank certificate.
    #[arg(long)]
    certify: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct VolumeArgs {
    #[arg(short = 'p', default_value_t = 3)]
    p: u64,
    #[arg(long, default_value_t = 4)]
    precision: u32,
    /// Center a + b sqrt(eps), given as "a,b".
    #[arg(long, value_parser = parse_pair)]
    xi: (i64, i64),
    #[arg(long)]
    rho: i64,
    #[arg(short = 'n')]
    n: i64,
    #[arg(long, value_parser = parse_pair, requires = "rho2")]
    xi2: Option<(i64, i64)>,
    #[arg(long, requires = "xi2")]
    rho2: Option<i64>,
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected \"a,b\", got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Miracle,
    Afl,
    Kernel,
    Volumes,
    Satake,
    Oracle,
    All,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Use the full default grid instead of the small one.
    #[arg(long)]
    default_grid: bool,
    #[arg(long)]
    r_max: Option<i64>,
    /// Largest odd v(b)+v(c).
    #[arg(long)]
    s_max: Option<i64>,
    #[arg(long)]
    vb_min: Option<i64>,
    #[arg(long)]
    ve_max: Option<i64>,
    #[arg(long)]
    vda_max: Option<i64>,
    /// Leave v(d-a) = inf out of the grid.
    #[arg(long)]
    finite_vda_only: bool,
    #[arg(long, default_value_t = 8)]
    rmax: i64,
    #[arg(short = 'p', default_value_t = 3)]
    p: u64,
    /// p-adic precision for the volume and quaternion suites.
    #[arg(short = 'N', default_value_t = 4)]
    precision: u32,
    /// Random quaternion tuples to check.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 20240601)]
    seed: u64,
}

impl VerifyArgs {
    fn grid(&self) -> Result<Grid> {
        let mut g = if self.default_grid { Grid::default() } else { Grid::small() };
        g.r_max = self.r_max.unwrap_or(g.r_max);
        g.s_max = self.s_max.unwrap_or(g.s_max);
        g.vb_min = self.vb_min.unwrap_or(g.vb_min);
        g.ve_max = self.ve_max.unwrap_or(g.ve_max);
        g.vda_max = self.vda_max.unwrap_or(g.vda_max);
        g.infinite_vda &= !self.finite_vda_only;
        if g.r_max < 0 || g.s_max < 1 || g.ve_max < 0 || g.vda_max < 0 || g.vb_min > 1 {
            bail!("empty grid: {g:?}");
        }
        Ok(g)
    }
}

/// Renders values, optionally specialised at an integer `q`.
struct Out {
    format: Format,
    at_q: Option<i64>,
}

impl Out {
    fn poly(&self, p: &QPoly) -> QPoly {
        match self.at_q {
            None => p.clone(),
            Some(q) => QPoly::term(p.eval_int(q).expect("nonzero evaluation point"), 0),
        }
    }

    fn series(&self, s: &LaurentSeries) -> LaurentSeries {
        LaurentSeries::from_terms(s.terms().map(|(k, c)| (k, self.poly(c))))
    }

    fn satake(&self, y: &SatakeY) -> SatakeY {
        SatakeY::from_terms(y.terms().map(|(i, c)| (i, self.poly(c))))
    }

    fn emit(&self, table: &str, value: Value) {
        match self.format {
            Format::Table => println!("{table}"),
            Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
        }
    }
}

fn cmd_orbital(out: &Out, a: &OrbitalArgs) -> Result<bool> {
    let p = a.params();
    let s = out.series(&orbital_closed_form(&p)?);
    let mut table = s.to_string();
    let mut value = json!({ "params": p, "series": s.to_json(), "text": s.to_string() });
    let mut ok = true;
    if a.oracle {
        let oracle = out.series(&orbital_support_sum(&p)?);
        ok = oracle == s;
        table.push_str(&format!("\noracle: {}", if ok { "match" } else { "MISMATCH" }));
        if !ok {
            table.push_str(&format!("\nsupport sum: {oracle}"));
        }
        value["oracle"] = json!({ "series": oracle.to_json(), "match": ok });
    }
    out.emit(&table, value);
    Ok(ok)
}

fn cmd_poly(out: &Out, p: &OrbitalParams, key: &str, v: QPoly) -> Result<bool> {
    let v = out.poly(&v);
    out.emit(&v.to_string(), json!({ "params": p, key: v.to_json(), "text": v.to_string() }));
    Ok(true)
}

fn cmd_int(out: &Out, p: &OrbitalParams) -> Result<bool> {
    p.validate(false)?;
    let circ = out.poly(&int_circ(p)?);
    let total = out.poly(&int_total(p)?);
    let clean = if p.r >= 1 && p.ve >= 1 {
        Some(out.poly(&int_circ_kr_closed(p)?))
    } else {
        None
    };
    let mut table = format!("Int°(1_<=r) = {circ}\nInt(1_<=r)  = {total}");
    let mut value = json!({ "params": p, "int_circ": circ.to_json(), "int_total": total.to_json() });
    if let Some(c) = &clean {
        table.push_str(&format!("\nInt°(1_r)   = {c}"));
        value["clean"] = c.to_json();
    }
    out.emit(&table, value);
    Ok(true)
}

fn cmd_bc(out: &Out, which: &BcCommand) -> Result<bool> {
    let (name, a) = match which {
        BcCommand::S3(a) => ("s3", a),
        BcCommand::S2(a) => ("s2", a),
        BcCommand::Gl3(a) => ("gl3", a),
    };
    if a.r < 0 {
        bail!("r = {} must be nonnegative", a.r);
    }
    let y = match (which, a.basis) {
        (BcCommand::S3(_), false) => satake_u3_indicator(a.r),
        (BcCommand::S3(_), true) => bc_s3_on_basis(a.r, a.r)?,
        (BcCommand::S2(_), false) => bc_s2_combo_image(a.r),
        (BcCommand::S2(_), true) => bc_s2_on_basis(a.r)?,
        (BcCommand::Gl3(_), _) => {
            let sat = satake_gl_det(3, a.r)?;
            let y = out.satake(&bc_gl3_to_u3(&sat)?);
            let value = json!({ "r": a.r, "satake": sat.to_json(), "bc": y.to_json(), "text": y.to_string() });
            out.emit(&format!("Sat = {sat}\nBC  = {y}"), value);
            return Ok(true);
        }
    };
    let y = out.satake(&y);
    out.emit(&y.to_string(), json!({ "bc": name, "r": a.r, "basis": a.basis, "image": y, "text": y.to_string() }));
    Ok(true)
}

fn cmd_kernel(out: &Out, a: &KernelArgs) -> Result<bool> {
    let m = build_matrix(a.sum_bc, a.vda, a.n)?;
    let (m1, m2) = row_reduce(&m);
    let shown = match a.stage {
        Stage::M => &m,
        Stage::MPrime => &m1,
        Stage::MDoublePrime => &m2,
    };
    let shown = DerivMatrix {
        entries: shown.entries.iter().map(|row| row.iter().map(|c| out.poly(c)).collect()).collect(),
        ..shown.clone()
    };
    let mut table = shown.to_string().trim_end().to_string();
    let mut value = json!({ "stage": format!("{:?}", a.stage), "matrix": shown });
    let mut ok = true;
    if a.certify {
        let cert = certify_full_rank(&m)?;
        ok = cert.pass();
        table.push_str(&format!(
            "\nrank {} of {} columns, minor det = {}\ncertificate: {}",
            cert.elimination.rank,
            m.cols(),
            cert.elimination.minor_det,
            if ok { "PASS" } else { "FAIL" }
        ));
        value["certificate"] = json!(cert);
        value["pass"] = json!(ok);
    }
    out.emit(&table, value);
    Ok(ok)
}

fn cmd_volumes(out: &Out, a: &VolumeArgs) -> Result<bool> {
    let ctx = QuadCtx::new(a.p, a.precision)?;
    let xi = ctx.elem(a.xi.0, a.xi.1);
    let rep: VolumeReport = match (a.xi2, a.rho2) {
        (Some((c, d)), Some(rho2)) => two_disk_report(&xi, &ctx.elem(c, d), a.rho, rho2, a.n)?,
        _ => one_disk_report(&xi, a.rho, a.n)?,
    };
    let table = format!(
        "{}: enumerated {} formula {} ({})",
        rep.lemma,
        rep.enumerated,
        rep.formula,
        if rep.matches { "match" } else { "MISMATCH" }
    );
    out.emit(&table, json!(rep));
    Ok(rep.matches)
}

fn cmd_verify(out: &Out, a: &VerifyArgs) -> Result<bool> {
    let grid = a.grid()?;
    let want = |s: Suite| a.suite == s || a.suite == Suite::All;
    let needs_params = [Suite::Oracle, Suite::Miracle, Suite::Afl].into_iter().any(want);
    let params = if needs_params { grid.params() } else { Vec::new() };
    let mut reports: Vec<SuiteReport> = Vec::new();
    if want(Suite::Oracle) {
        reports.push(suite_orbital_oracle(&params));
        reports.push(suite_s_zero_vanishing(&params));
        reports.push(suite_derivative_consistency(&params));
        reports.push(suite_combo_consistency(&params));
        reports.push(suite_sign_pattern(&params));
    }
    if want(Suite::Miracle) {
        reports.push(suite_miracle(&params));
    }
    if want(Suite::Afl) {
        reports.push(suite_afl(&params));
        reports.push(suite_int_total(&params));
        reports.push(suite_clean(&params));
    }
    if want(Suite::Kernel) {
        reports.push(suite_kernel(&kernel_cases(&[1, 3, 5, 17], &[0, 1, 2, 8], 6)));
        reports.push(suite_large_r(&grid));
        reports.push(suite_phi(&grid));
    }
    if want(Suite::Satake) {
        if a.rmax < 0 {
            bail!("rmax = {} must be nonnegative", a.rmax);
        }
        reports.push(suite_satake(a.rmax));
    }
    if want(Suite::Volumes) {
        let ctx = QuadCtx::new(a.p, a.precision).context("volume context")?;
        reports.extend(suite_volumes(&ctx));
        reports.push(suite_quaternion(&ctx, a.samples, a.seed));
    }
    let pass = reports.iter().all(SuiteReport::pass);
    let mut table: Vec<String> = Vec::new();
    for r in &reports {
        table.push(format!("{} {}", if r.pass() { "PASS" } else { "FAIL" }, r.summary()));
        for e in &r.examples {
            table.push(format!("    {e}"));
        }
    }
    table.push(format!("overall: {}", if pass { "PASS" } else { "FAIL" }));
    out.emit(&table.join("\n"), json!({ "grid": grid, "reports": reports, "pass": pass }));
    Ok(pass)
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.at_q == Some(0) {
        bail!("--at-q must be nonzero");
    }
    let out = Out { format: cli.format, at_q: cli.at_q };
    match &cli.command {
        Command::Orbital(a) => cmd_orbital(&out, a),
        Command::Derivative(a) => {
            let p = a.params();
            cmd_poly(&out, &p, "derivative", derivative_closed_form(&p)?)
        }
        Command::Combo(a) => {
            let p = a.params();
            cmd_poly(&out, &p, "combo", derivative_combo(&p)?)
        }
        Command::Gk(a) => {
            let v = out.poly(&gross_keating(GkPair { n1: a.n1, n2: a.n2 })?);
            out.emit(&v.to_string(), json!({ "n1": a.n1, "n2": a.n2, "gk": v.to_json(), "text": v.to_string() }));
            Ok(true)
        }
        Command::Int(a) => cmd_int(&out, &a.params()),
        Command::Bc { which } => cmd_bc(&out, which),
        Command::KernelMatrix(a) => cmd_kernel(&out, a),
        Command::Volumes(a) => cmd_volumes(&out, a),
        Command::Verify(a) => cmd_verify(&out, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
