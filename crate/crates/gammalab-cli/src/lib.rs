//! Run configuration, reports and file formats behind the `gammalab` binary.
//!
//! Every report carries the schema string [`SCHEMA`]. Output bytes depend
//! only on the configuration, so two runs with the same flags and seed are
//! byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gammalab::bessel::BesselTable;
use gammalab::charkit::{galois_orbit, is_regular, regular_orbit_representatives, restriction_is_trivial, AddChar, TOL};
use gammalab::cuspchar::CuspidalRep;
use gammalab::exjs::{
    gamma_closed, gamma_ratio, gamma_torus, homdim_check, shalika_detect, FeOptions, GammaResult,
};
use gammalab::ffield::{build_field, FieldCtx};
use gammalab::levelzero::{gamma_from_l_eps, local_gamma, local_l_eps, modified_fe_check, LevelZeroCtx, RatQS};
use gammalab::matgrp::{random_gl, random_unipotent, Mat};
use gammalab::GammaError;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "gammalab/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("route disagreement: {0}")]
    RouteDisagreement(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Format(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::RouteDisagreement(_) => 3,
            CliError::VerifyFailed(_) => 1,
            CliError::Io { .. } | CliError::Format(_) => 4,
        }
    }
}

impl From<GammaError> for CliError {
    fn from(e: GammaError) -> Self {
        match e {
            GammaError::NonConstantRatio { .. } | GammaError::OracleFailed(_) => CliError::RouteDisagreement(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaSpec {
    Exponent(u64),
    AllRegular,
}

impl std::str::FromStr for ThetaSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all-regular" {
            return Ok(ThetaSpec::AllRegular);
        }
        s.parse().map(ThetaSpec::Exponent).map_err(|_| format!("expected an exponent or `all-regular`, got `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Validated parameters shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub theta: ThetaSpec,
    pub psi_inverse: bool,
    pub c: Complex64,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub exhaustive: bool,
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n < 2 {
            return Err(CliError::Precondition(format!("n = {} must be at least 2", self.n)));
        }
        if self.trials == 0 || !(self.tol > 0.0) {
            return Err(CliError::Precondition("trials and tol must be positive".into()));
        }
        if ((self.c.norm()) - 1.0).abs() > 1e-9 {
            return Err(CliError::Precondition(format!("|c| = {} must be 1", self.c.norm())));
        }
        Ok(())
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }

    fn field(&self) -> CliResult<Arc<FieldCtx>> {
        Ok(build_field(self.p, self.e, self.n)?)
    }

    fn psi(&self, f: &Arc<FieldCtx>) -> AddChar {
        AddChar::new(f, self.psi_inverse)
    }

    fn fe_options(&self) -> FeOptions {
        FeOptions {
            seed: self.seed,
            trials: self.trials,
            exhaustive_limit: if self.exhaustive { u128::MAX } else { FeOptions::default().exhaustive_limit },
            tol: self.tol,
        }
    }

    /// The requested exponents; a single `k` must be regular.
    pub fn exponents(&self) -> CliResult<Vec<u64>> {
        let q = self.q();
        match self.theta {
            ThetaSpec::AllRegular => Ok(regular_orbit_representatives(q, self.n)),
            ThetaSpec::Exponent(k) => {
                let modulus = q.pow(self.n) - 1;
                if !is_regular(k % modulus, q, self.n) {
                    return Err(CliError::Precondition(format!("θ with exponent {k} is not regular for n = {}", self.n)));
                }
                Ok(vec![k % modulus])
            }
        }
    }

    fn reps(&self) -> CliResult<(Arc<FieldCtx>, Vec<CuspidalRep>)> {
        self.validate()?;
        let f = self.field()?;
        let reps = self
            .exponents()?
            .into_iter()
            .map(|k| CuspidalRep::new(&f, self.n, k as i64))
            .collect::<gammalab::Result<_>>()?;
        Ok((f, reps))
    }
}

/// `[re, im]`, the complex encoding used throughout the reports.
pub type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteValues {
    pub ratio: Option<Pair>,
    pub torus: Option<Pair>,
    pub closed_form: Option<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFactors {
    pub c: Pair,
    pub l_factor: RatQS,
    pub epsilon: RatQS,
    pub gamma: RatQS,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub k: u64,
    pub orbit: Vec<u64>,
    pub regular: bool,
    pub shalika: bool,
    pub gamma: Option<Pair>,
    pub abs_gamma: Option<f64>,
    pub routes: RouteValues,
    /// Largest `|γ_a − γ_b|` over the available routes.
    pub max_route_delta: Option<f64>,
    pub fe_residual: Option<f64>,
    pub pairs_checked: usize,
    pub local: LocalFactors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub schema: String,
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub psi_inverse: bool,
    pub seed: u64,
    pub rows: Vec<GammaRow>,
}

fn gamma_row(cfg: &RunConfig, f: &Arc<FieldCtx>, rep: &CuspidalRep) -> CliResult<GammaRow> {
    let q = f.q();
    let n = cfg.n;
    let k = rep.theta().exponent();
    let table = BesselTable::build(rep, &cfg.psi(f));
    let shalika = n % 2 == 0 && restriction_is_trivial(rep.theta(), n / 2);
    let ctx = LevelZeroCtx::new(&table, cfg.c)?;
    let (l, eps) = local_l_eps(&ctx)?;
    let local = LocalFactors { c: pair(cfg.c), l_factor: l, epsilon: eps, gamma: local_gamma(&ctx)? };
    let mut row = GammaRow {
        k,
        orbit: galois_orbit(k, q, n),
        regular: true,
        shalika,
        gamma: None,
        abs_gamma: None,
        routes: RouteValues { ratio: None, torus: None, closed_form: None },
        max_route_delta: None,
        fe_residual: None,
        pairs_checked: 0,
        local,
    };
    if shalika {
        return Ok(row);
    }
    let ratio: GammaResult = gamma_ratio(&table, &cfg.fe_options())?;
    let torus = gamma_torus(&table)?.value;
    let closed = match gamma_closed(rep, table.psi()) {
        Ok(r) => Some(r.value),
        Err(GammaError::UnsupportedN(_) | GammaError::PreconditionViolated(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let values: Vec<Complex64> = [Some(ratio.value), Some(torus), closed].into_iter().flatten().collect();
    let mut delta: f64 = 0.0;
    for a in &values {
        for b in &values {
            delta = delta.max((a - b).norm());
        }
    }
    row.gamma = Some(pair(ratio.value));
    row.abs_gamma = Some(ratio.value.norm());
    row.routes = RouteValues { ratio: Some(pair(ratio.value)), torus: Some(pair(torus)), closed_form: closed.map(pair) };
    row.max_route_delta = Some(delta);
    row.fe_residual = Some(ratio.residual);
    row.pairs_checked = ratio.pairs_checked;
    Ok(row)
}

/// `γ` by every applicable route for each requested `θ`, in parallel over `θ`.
///
/// Returns the report together with the first route disagreement beyond
/// `cfg.tol`, if any; the caller decides how to exit.
pub fn cmd_gamma(cfg: &RunConfig) -> CliResult<(GammaReport, Option<String>)> {
    let (f, reps) = cfg.reps()?;
    let rows: Vec<GammaRow> = reps.par_iter().map(|r| gamma_row(cfg, &f, r)).collect::<CliResult<_>>()?;
    let disagreement = rows.iter().find_map(|r| {
        let d = r.max_route_delta?;
        (d > cfg.tol).then(|| format!("k = {}: routes differ by {d:e}", r.k))
    });
    let report = GammaReport {
        schema: SCHEMA.into(),
        p: cfg.p,
        e: cfg.e,
        n: cfg.n,
        psi_inverse: cfg.psi_inverse,
        seed: cfg.seed,
        rows,
    };
    Ok((report, disagreement))
}

fn opt_pair(v: Option<Pair>) -> [String; 2] {
    match v {
        Some([a, b]) => [fmt_f(a), fmt_f(b)],
        None => [String::new(), String::new()],
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.15e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

pub const GAMMA_CSV_COLUMNS: [&str; 16] = [
    "k",
    "orbit",
    "shalika",
    "gamma_re",
    "gamma_im",
    "abs_gamma",
    "ratio_re",
    "ratio_im",
    "torus_re",
    "torus_im",
    "closed_re",
    "closed_im",
    "max_route_delta",
    "fe_residual",
    "pairs_checked",
    "local_factors",
];

fn csv_err(e: impl std::fmt::Display) -> CliError {
    CliError::Format(e.to_string())
}

/// CSV form: a `# schema ...` comment line, the column header, one row per `θ`.
/// The last column holds the `{c, l_factor, epsilon, gamma}` object as JSON.
pub fn gamma_csv(report: &GammaReport) -> CliResult<String> {
    let mut out = format!(
        "# schema={SCHEMA} kind=gamma p={} e={} n={} psi_inverse={} seed={}\n",
        report.p, report.e, report.n, report.psi_inverse, report.seed
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(GAMMA_CSV_COLUMNS).map_err(csv_err)?;
    for r in &report.rows {
        let orbit: Vec<String> = r.orbit.iter().map(|k| k.to_string()).collect();
        let [gr, gi] = opt_pair(r.gamma);
        let [rr, ri] = opt_pair(r.routes.ratio);
        let [tr, ti] = opt_pair(r.routes.torus);
        let [cr, ci] = opt_pair(r.routes.closed_form);
        let local = serde_json::to_string(&r.local).map_err(csv_err)?;
        w.write_record([
            r.k.to_string(),
            orbit.join(";"),
            r.shalika.to_string(),
            gr,
            gi,
            fmt_opt(r.abs_gamma),
            rr,
            ri,
            tr,
            ti,
            cr,
            ci,
            fmt_opt(r.max_route_delta),
            fmt_opt(r.fe_residual),
            r.pairs_checked.to_string(),
            local,
        ])
        .map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(csv_err)?;
    out.push_str(&String::from_utf8(body).map_err(csv_err)?);
    Ok(out)
}

pub fn gamma_json(report: &GammaReport) -> CliResult<String> {
    serde_json::to_string_pretty(report).map(|s| s + "\n").map_err(csv_err)
}

/// Reads a JSON gamma report back, checking the schema string.
pub fn read_gamma_json(text: &str) -> CliResult<GammaReport> {
    let report: GammaReport = serde_json::from_str(text).map_err(csv_err)?;
    if report.schema != SCHEMA {
        return Err(CliError::Format(format!("unsupported schema `{}`", report.schema)));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselEntry {
    pub composition: Vec<usize>,
    /// Exponents of the scalars relative to the generator of `F_q^×`.
    pub scalars: Vec<u64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselExport {
    pub k: u64,
    pub entries: Vec<BesselEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselReport {
    pub schema: String,
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub psi_inverse: bool,
    pub tables: Vec<BesselExport>,
}

fn scalar_exponent(f: &FieldCtx, x: u32) -> u64 {
    (f.fq_slot(x) - 1) as u64
}

pub fn bessel_report(cfg: &RunConfig) -> CliResult<BesselReport> {
    let (f, reps) = cfg.reps()?;
    let psi = cfg.psi(&f);
    let tables = reps
        .par_iter()
        .map(|rep| {
            let t = BesselTable::build(rep, &psi);
            let entries = t
                .entries()
                .iter()
                .map(|((comp, scalars), v)| BesselEntry {
                    composition: comp.clone(),
                    scalars: scalars.iter().map(|&x| scalar_exponent(&f, x)).collect(),
                    re: v.re,
                    im: v.im,
                })
                .collect();
            BesselExport { k: rep.theta().exponent(), entries }
        })
        .collect();
    Ok(BesselReport { schema: SCHEMA.into(), p: cfg.p, e: cfg.e, n: cfg.n, psi_inverse: cfg.psi_inverse, tables })
}

/// Columns `k,composition,scalars,re,im`; parts are joined with `;`.
pub fn bessel_csv(report: &BesselReport) -> CliResult<String> {
    let mut out = format!(
        "# schema={SCHEMA} kind=bessel p={} e={} n={} psi_inverse={}\n",
        report.p, report.e, report.n, report.psi_inverse
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "composition", "scalars", "re", "im"]).map_err(csv_err)?;
    let join = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
    for t in &report.tables {
        for e in &t.entries {
            let comp: Vec<u64> = e.composition.iter().map(|&c| c as u64).collect();
            w.write_record([t.k.to_string(), join(&comp), join(&e.scalars), fmt_f(e.re), fmt_f(e.im)])
                .map_err(csv_err)?;
        }
    }
    out.push_str(&String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)?);
    Ok(out)
}

pub fn bessel_json(report: &BesselReport) -> CliResult<String> {
    serde_json::to_string_pretty(report).map(|s| s + "\n").map_err(csv_err)
}

/// One named check of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub k: u64,
    pub check: String,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} k={} {} residual={:.3e} {}", c.k, c.check, c.residual, c.detail).expect("string write");
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        writeln!(out, "{} checks, {failed} failed", self.checks.len()).expect("string write");
        out
    }
}

fn outcome(k: u64, check: &str, r: gammalab::Result<(f64, String)>, tol: f64) -> CheckResult {
    match r {
        Ok((residual, detail)) => {
            CheckResult { k, check: check.into(), passed: residual <= tol, residual, detail }
        }
        Err(e) => CheckResult { k, check: check.into(), passed: false, residual: f64::INFINITY, detail: e.to_string() },
    }
}

fn bessel_equivariance(table: &BesselTable, trials: usize, seed: u64) -> gammalab::Result<(f64, String)> {
    let f = table.rep().field().as_ref();
    let n = table.n() as usize;
    let psi = table.psi();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let g = random_gl(f, n, &mut rng);
        let (u, v) = (random_unipotent(f, n, &mut rng), random_unipotent(f, n, &mut rng));
        let lhs = table.eval(&Mat::product(f, &[&u, &g, &v]))?;
        let rhs = psi.eval(u.superdiag_sum(f)) * psi.eval(v.superdiag_sum(f)) * table.eval(&g)?;
        worst = worst.max((lhs - rhs).norm());
    }
    let at_one = table.eval(&Mat::identity(n))?;
    worst = worst.max((at_one - 1.0).norm());
    Ok((worst, format!("{trials} random points, B(1) = {:.6}", at_one.re)))
}

fn verify_rep(cfg: &RunConfig, f: &Arc<FieldCtx>, rep: &CuspidalRep) -> Vec<CheckResult> {
    let k = rep.theta().exponent();
    let n = cfg.n;
    let tol = cfg.tol;
    let mut out = Vec::new();
    out.push(outcome(
        k,
        "character_orthogonality",
        rep.verify_irreducible().map(|r| {
            let res = (r.inner_product - 1.0).abs().max(r.inverse_conj_error).max(r.class_function_error);
            (res, format!("<chi,chi> = {:.12}, degree {}", r.inner_product, r.degree))
        }),
        1e-6,
    ));
    let table = BesselTable::build(rep, &cfg.psi(f));
    out.push(outcome(k, "bessel_properties", bessel_equivariance(&table, cfg.trials.max(100), cfg.seed), tol));
    let shalika = n % 2 == 0 && restriction_is_trivial(rep.theta(), n / 2);
    if shalika {
        out.push(outcome(
            k,
            "shalika_broken_equation",
            shalika_detect(&table, cfg.trials.max(1000), if cfg.exhaustive { u128::MAX } else { 100_000 }, cfg.seed)
                .map(|r| {
                    let res = if r.consistent() { 0.0 } else { 1.0 };
                    (res, format!("criterion {}, {} translates", r.criterion, r.translates_checked))
                }),
            tol,
        ));
        out.push(outcome(
            k,
            "modified_functional_equation",
            modified_fe_check(&table, &cfg.fe_options())
                .map(|r| (r.max_residual, format!("{} pairs, gamma = {}", r.pairs_checked, r.gamma))),
            1e-9,
        ));
    } else {
        out.push(outcome(
            k,
            "functional_equation",
            gamma_ratio(&table, &cfg.fe_options()).map(|r| (r.residual, format!("{} pairs", r.pairs_checked))),
            tol,
        ));
        out.push(outcome(
            k,
            "gamma_unitarity",
            gamma_torus(&table).map(|r| ((r.value.norm() - 1.0).abs(), format!("gamma = {:.12}", r.value))),
            tol,
        ));
    }
    out.push(outcome(
        k,
        "homdim_bound",
        homdim_check(rep).map(|r| ((r.value.re - r.dimension as f64).abs(), format!("dim = {}, |H| = {}", r.dimension, r.subgroup_order))),
        1e-6,
    ));
    out.push(outcome(
        k,
        "ratqs_identities",
        LevelZeroCtx::new(&table, cfg.c).and_then(|ctx| {
            let g = local_gamma(&ctx)?;
            let assembled = gamma_from_l_eps(&ctx)?;
            let (l, _) = local_l_eps(&ctx)?;
            let back = g.mul(&g.inv()?);
            let res = g.distance(&assembled).max(back.distance(&RatQS::one()));
            let constant_ok = g.is_constant() == !ctx.has_shalika_vector() && l.has_pole() == ctx.has_shalika_vector();
            Ok((if constant_ok { res } else { f64::INFINITY }, format!("gamma = {g}")))
        }),
        1e-9,
    ));
    out
}

/// Runs the invariant suites for every requested `θ`.
pub fn cmd_verify(cfg: &RunConfig) -> CliResult<VerifyReport> {
    let (f, reps) = cfg.reps()?;
    let checks: Vec<CheckResult> = reps.par_iter().flat_map(|r| verify_rep(cfg, &f, r)).collect();
    Ok(VerifyReport { schema: SCHEMA.into(), p: cfg.p, e: cfg.e, n: cfg.n, checks })
}

pub fn verify_csv(report: &VerifyReport) -> CliResult<String> {
    let mut out = format!("# schema={SCHEMA} kind=verify p={} e={} n={}\n", report.p, report.e, report.n);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "check", "passed", "residual", "detail"]).map_err(csv_err)?;
    for c in &report.checks {
        w.write_record([c.k.to_string(), c.check.clone(), c.passed.to_string(), fmt_f(c.residual), c.detail.clone()])
            .map_err(csv_err)?;
    }
    out.push_str(&String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)?);
    Ok(out)
}

pub fn verify_json(report: &VerifyReport) -> CliResult<String> {
    serde_json::to_string_pretty(report).map(|s| s + "\n").map_err(csv_err)
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

/// `TOL` re-exported as the default `--tol`.
pub const DEFAULT_TOL: f64 = TOL;
