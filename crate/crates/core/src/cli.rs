//! Batch front end: one subcommand per pipeline, JSON configuration in,
//! JSON report out, optional CSV sample dumps.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (the report
//! is still written), 2 for unreadable or invalid input.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::asymptotics::{
    alg_delta, alh_delta, decay_fit, expansion_check, parse_rational, write_pairs_csv, DecaySamples, ExpansionWindow,
    Lattice3,
};
use crate::error::Error;
use crate::geometry::Grid4;
use crate::gibbons_hawking::{standard_model, verify_sweep, MonopoleConfig, Point3};
use crate::kodaira::{classify, generate_fiber, CurveConfig};
use crate::poly::rat;
use crate::torelli::{
    calibrate_period_constant, cartan_matrix, is_singular_with_tol, period_check, period_integral_numeric, roots,
    textbook_cartan, equal_up_to_permutation, TNParams, PERIOD_NODES,
};
use crate::twistor::{
    chiklr_reduce, chiklr_reduce_values, dihedral_generators, dihedral_invariants, glue_check_ak, real_structure_ak,
    spectral_conservation, transition_determinant_residual, transition_pq, transition_pq_with_root, SpectralData,
    SpectralFamily, TwistorPointAk, TwistorScalar,
};

pub const SCHEMA: &str = "instanton-report/1";

#[derive(Parser, Debug)]
#[command(name = "instanton", version, about = "Checks for explicit gravitational instanton constructions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration (CSV for decay-fit).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Replaces every check threshold.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// CSV file for sampled curves (decay-fit, expansion-check).
    #[arg(long, global = true)]
    pub dump_samples: Option<PathBuf>,
    /// Adds `wall_time_s` to the report, which makes it run-dependent.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Triple, metric, closedness and dη = ⋆dV on a grid.
    GhVerify,
    /// Power-law exponent of sampled magnitudes.
    DecayFit,
    /// ALG exponents for a list of β.
    AlgDelta,
    /// ALH exponent of a lattice.
    AlhDelta,
    /// Large-r expansion of the potential.
    ExpansionCheck,
    /// Singular-fiber classification.
    KodairaClassify,
    /// Twistor-chart identities at random points.
    TwistorCheck,
    /// Roots, periods and the singularity criterion.
    Torelli,
    /// Numerical periods over 2-cycles between centers.
    PeriodIntegral,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GhVerify => "gh-verify",
            Command::DecayFit => "decay-fit",
            Command::AlgDelta => "alg-delta",
            Command::AlhDelta => "alh-delta",
            Command::ExpansionCheck => "expansion-check",
            Command::KodairaClassify => "kodaira-classify",
            Command::TwistorCheck => "twistor-check",
            Command::Torelli => "torelli",
            Command::PeriodIntegral => "period-integral",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub input: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// Input errors, reported with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Compute(#[from] Error),
}

impl CliError {
    fn schema(e: impl std::fmt::Display) -> Self {
        CliError::Schema(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Checks {
    override_tol: Option<f64>,
    list: Vec<Check>,
}

impl Checks {
    /// Records `residual ≤ threshold`; NaN fails.
    fn push(&mut self, name: impl Into<String>, residual: f64, threshold: f64) {
        let threshold = self.override_tol.unwrap_or(threshold);
        self.list.push(Check {
            name: name.into(),
            residual,
            threshold,
            pass: residual <= threshold,
        });
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    raw: Value,
    checks: Checks,
}

impl Ctx<'_> {
    fn parse<T: for<'de> Deserialize<'de>>(&self) -> CliResult<T> {
        serde_json::from_value(self.raw.clone()).map_err(CliError::schema)
    }

    fn dump(&self, rows: &[(f64, f64)]) -> CliResult<()> {
        if let Some(path) = &self.cli.dump_samples {
            let f = fs::File::create(path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
            write_pairs_csv(f, rows)?;
        }
        Ok(())
    }
}

fn read_input(cli: &Cli) -> CliResult<Value> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Schema(format!("{} needs --config", cli.command.name())))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    if cli.command == Command::DecayFit && path.extension().is_some_and(|e| e == "csv") {
        let s = DecaySamples::from_csv(text.as_bytes())?;
        return Ok(json!({ "samples": s.samples() }));
    }
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

/// Runs the selected pipeline on the configured thread pool.
pub fn run(cli: &Cli) -> CliResult<Report> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Schema(format!("--tol must be positive, got {t}")));
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Schema("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(CliError::schema)?;
    let start = Instant::now();
    let raw = read_input(cli)?;
    let mut ctx = Ctx {
        cli,
        raw: raw.clone(),
        checks: Checks {
            override_tol: cli.tol,
            list: Vec::new(),
        },
    };
    let results = pool.install(|| match cli.command {
        Command::GhVerify => gh_verify(&mut ctx),
        Command::DecayFit => decay_fit_cmd(&mut ctx),
        Command::AlgDelta => alg_delta_cmd(&mut ctx),
        Command::AlhDelta => alh_delta_cmd(&mut ctx),
        Command::ExpansionCheck => expansion_cmd(&mut ctx),
        Command::KodairaClassify => kodaira_cmd(&mut ctx),
        Command::TwistorCheck => twistor_cmd(&mut ctx),
        Command::Torelli => torelli_cmd(&mut ctx),
        Command::PeriodIntegral => period_cmd(&mut ctx),
    })?;
    let checks = ctx.checks.list;
    let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
    Ok(Report {
        schema: SCHEMA,
        command: cli.command.name(),
        seed: cli.seed,
        input: raw,
        results,
        checks,
        pass,
        wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
    })
}

/// Writes the report and returns the process exit code.
pub fn emit(cli: &Cli, report: &Report) -> std::io::Result<i32> {
    let mut text = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    text.push('\n');
    match &cli.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(if report.pass { 0 } else { 1 })
}

// gh-verify

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    lo: [f64; 4],
    hi: [f64; 4],
    nodes: [usize; 4],
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lo: [1.5, 1.5, 1.5, 0.0],
            hi: [2.5, 2.5, 2.5, 1.0],
            nodes: [8; 4],
        }
    }
}

impl GridSpec {
    fn grid(&self) -> CliResult<Grid4> {
        if self.nodes.iter().any(|&n| n < 2) || (0..4).any(|a| !(self.hi[a] > self.lo[a])) {
            return Err(CliError::Schema("grid needs hi > lo and at least 2 nodes per axis".into()));
        }
        let spacing = std::array::from_fn(|a| (self.hi[a] - self.lo[a]) / (self.nodes[a] - 1) as f64);
        Ok(Grid4::new(self.lo, spacing, self.nodes)?)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GhVerifyConfig {
    monopoles: MonopoleConfig,
    #[serde(default)]
    grid: GridSpec,
    /// Difference step; the smallest grid spacing when absent.
    h: Option<f64>,
}

pub const GRAM_TOL: f64 = 1e-10;
pub const METRIC_TOL: f64 = 1e-8;
/// Allowed relative deviation of a refinement ratio from 4.
pub const RATIO_TOL: f64 = 0.1;

fn gh_verify(ctx: &mut Ctx) -> CliResult<Value> {
    let c: GhVerifyConfig = ctx.parse()?;
    let grid = c.grid.grid()?;
    let h = c.h.unwrap_or_else(|| grid.spacing.iter().cloned().fold(f64::INFINITY, f64::min));
    if !(h > 0.0 && h.is_finite()) {
        return Err(CliError::Schema(format!("h must be positive, got {h}")));
    }
    let rep = verify_sweep(&c.monopoles, &grid, h)?;
    let cs = &mut ctx.checks;
    cs.push("gram", rep.max.gram, GRAM_TOL);
    cs.push("metric", rep.max.metric, METRIC_TOL);
    cs.push("closedness_order", (rep.closedness_ratio / 4.0 - 1.0).abs(), RATIO_TOL);
    cs.push("curvature_order", (rep.curl_ratio / 4.0 - 1.0).abs(), RATIO_TOL);
    Ok(serde_json::to_value(rep).map_err(CliError::schema)?)
}

// decay-fit

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecayConfig {
    samples: Vec<(f64, f64)>,
    expected_exponent: Option<f64>,
}

pub const EXPONENT_TOL: f64 = 0.05;

fn decay_fit_cmd(ctx: &mut Ctx) -> CliResult<Value> {
    let c: DecayConfig = ctx.parse()?;
    let s = DecaySamples::new(c.samples)?;
    let fit = decay_fit(&s)?;
    ctx.dump(s.samples())?;
    match c.expected_exponent {
        Some(e) => ctx.checks.push("exponent", (fit.exponent - e).abs(), EXPONENT_TOL),
        None => ctx.checks.push("log_rms", fit.log_rms, EXPONENT_TOL),
    }
    Ok(serde_json::to_value(fit).map_err(CliError::schema)?)
}

// alg-delta

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgConfig {
    betas: Vec<String>,
    expected: Option<Vec<String>>,
}

fn alg_delta_cmd(ctx: &mut Ctx) -> CliResult<Value> {
    let c: AlgConfig = ctx.parse()?;
    let betas = c.betas.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
    let deltas = betas.iter().map(|&b| alg_delta(b)).collect::<Result<Vec<_>, _>>()?;
    // δβ must be 2β − n for an integer n < 2β
    let defect = betas
        .iter()
        .zip(&deltas)
        .map(|(&b, &d)| {
            let n = b * 2 - d * b;
            let bad = !n.is_integer() || n >= b * 2 || d <= Rational64::from_integer(0);
            f64::from(u8::from(bad))
        })
        .sum();
    ctx.checks.push("delta_definition", defect, 0.0);
    if let Some(exp) = &c.expected {
        if exp.len() != betas.len() {
            return Err(CliError::Schema("expected must have one entry per beta".into()));
        }
        let exp = exp.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        let wrong = exp.iter().zip(&deltas).filter(|(a, b)| a != b).count();
        ctx.checks.push("expected", wrong as f64, 0.0);
    }
    let rows: Vec<Value> = betas
        .iter()
        .zip(&deltas)
        .map(|(b, d)| json!({ "beta": b.to_string(), "delta": d.to_string() }))
        .collect();
    Ok(json!({ "deltas": rows }))
}

// alh-delta

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlhConfig {
    basis: [[f64; 3]; 3],
    expected: Option<f64>,
}

fn alh_delta_cmd(ctx: &mut Ctx) -> CliResult<Value> {
    let c: AlhConfig = ctx.parse()?;
    let lat = Lattice3::new(c.basis)?;
    let dual = lat.dual();
    let delta = alh_delta(&lat);
    let pairing = lat.basis() * dual.basis().transpose();
    let duality = (pairing - nalgebra::Matrix3::identity()).amax();
    ctx.checks.push("duality", duality, 1e-12);
    if let Some(e) = c.expected {
        ctx.checks.push("expected", (delta - e).abs() / e.abs().max(1.0), 1e-12);
    }
    let v = dual.shortest_vector();
    Ok(json!({ "delta": delta, "shortest_dual_vector": [v[0], v[1], v[2]] }))
}

// expansion-check

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpansionConfig {
    monopoles: MonopoleConfig,
    /// Expansion point; the standard-model center when absent.
    center: Option<Point3>,
    window: Option<Value>,
    expected_lead: Option<f64>,
    expected_exponent: Option<f64>,
}

pub const LEAD_TOL: f64 = 1e-6;

fn expansion_cmd(ctx: &mut Ctx) -> CliResult<Value> {
    let c: ExpansionConfig = ctx.parse()?;
    let mut window_raw = c.window.unwrap_or_else(|| json!({}));
    if window_raw.get("seed").is_none() {
        if let Some(obj) = window_raw.as_object_mut() {
            obj.insert("seed".into(), json!(ctx.cli.seed));
        }
    }
    let window: ExpansionWindow = serde_json::from_value(window_raw).map_err(CliError::schema)?;
    let model = standard_model(&c.monopoles);
    let center = c.center.unwrap_or(model.center);
    let res = expansion_check(&c.monopoles, center, &window)?;
    ctx.dump(&res.samples)?;
    let lead = c.expected_lead.unwrap_or(model.charge);
    let exponent = c
        .expected_exponent
        .unwrap_or(if center == model.center { 3.0 } else { 2.0 });
    ctx.checks.push("lead_coeff", (res.lead_coeff - lead).abs(), LEAD_TOL);
    ctx.checks.push("remainder_exponent", (res.remainder.exponent - exponent).abs(), EXPONENT_TOL);
    Ok(json!({
        "center": res.center,
        "lead_coeff": res.lead_coeff,
        "remainder": res.remainder,
        "expected_lead": lead,
        "expected_exponent": exponent,
    }))
}

// kodaira-classify

#[derive(Deserialize)]
struct KodairaConfig {
    #[serde(flatten)]
    curves: CurveConfig,
    expected: Option<ExpectedFiber>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectedFiber {
    #[serde(rename = "type")]
    kind: String,
    m: Option<usize>,
}

fn kodaira_cmd(ctx: &mut Ctx) -> CliResult<Value> {
    let c: KodairaConfig = ctx.parse()?;
    let cl = classify(&c.curves);
    let cs = &mut ctx.checks;
    cs.push("identities", cl.report.violations.len() as f64, 0.0);
    // the canonical fiber of the recognized type must classify the same way
    let roundtrip = cl
        .fiber
        .dynkin_rank()
        .and_then(|k| generate_fiber(&cl.fiber, k).ok())
        .map(|g| classify(&g).fiber == cl.fiber)
        .unwrap_or(false);
    cs.push("roundtrip", f64::from(u8::from(!roundtrip)), 0.0);
    if let Some(e) = &c.expected {
        let ok = e.kind == cl.fiber.name() && e.m == cl.fiber.m();
        cs.push("expected", f64::from(u8::from(!ok)), 0.0);
    }
    Ok(json!({
        "type": cl.fiber.name(),
        "m": cl.fiber.m(),
        "display": cl.fiber.to_string(),
        "note": cl.note,
        "genera": cl.report.genera,
        "violations": cl.report.violations,
    }))
}

// twistor-check

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwistorConfig {
    spectral: SpectralData,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_zeta_min")]
    zeta_min: f64,
    #[serde(default = "default_zeta_max")]
    zeta_max: f64,
}

fn default_samples() -> usize {
    100
}
fn default_zeta_min() -> f64 {
    0.1
}
fn default_zeta_max() -> f64 {
    10.0
}

pub const GLUE_TOL: f64 = 1e-10;
pub const INVOLUTION_TOL: f64 = 1e-12;
pub const QUADRIC_TOL: f64 = 1e-8;
pub const DIHEDRAL_TOL: f64 = 1e-10;
pub const INVARIANCE_TOL: f64 = 1e-12;
pub const BRANCH_TOL: f64 = 1e-12;
pub const DETERMINANT_TOL: f64 = 1e-10;
pub const CONSERVATION_TOL: f64 = 1e-8;

fn unit_box(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `ζ` with `log|ζ|` uniform in `[ln a, ln b]` and uniform argument.
fn annulus(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Complex64 {
    let r = rng.random_range(a.ln()..=b.ln()).exp();
    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

struct TwistorSample {
    zeta: Complex64,
    z: Complex64,
    rho: Complex64,
    rho1: Complex64,
    p: Complex64,
    q: Complex64,
    u: Complex64,
    v: Complex64,
}

#[derive(Default, Clone, Copy)]
struct TwistorMax {
    glue: f64,
    involution: f64,
    image: f64,
    quadric: f64,
    dihedral: f64,
    invariance: f64,
    branch: f64,
    determinant: f64,
    curve: f64,
    conservation: f64,
}

fn twistor_cmd(ctx: &mut Ctx) -> CliResult<Value> {
    let c: TwistorConfig = ctx.parse()?;
    if !(0.0 < c.zeta_min && c.zeta_min <= c.zeta_max && c.zeta_max.is_finite()) || c.samples == 0 {
        return Err(CliError::Schema("need 0 < zeta_min ≤ zeta_max and samples ≥ 1".into()));
    }
    let sd = &c.spectral;
    let k = sd.k();
    let dk = k.max(3);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cli.seed);
    let inputs: Vec<TwistorSample> = (0..c.samples)
        .map(|_| TwistorSample {
            zeta: annulus(&mut rng, c.zeta_min, c.zeta_max),
            z: unit_box(&mut rng),
            rho: unit_box(&mut rng),
            rho1: unit_box(&mut rng),
            p: unit_box(&mut rng),
            q: unit_box(&mut rng),
            u: unit_box(&mut rng),
            v: unit_box(&mut rng),
        })
        .collect();
    let per: Vec<Result<TwistorMax, Error>> = inputs
        .par_iter()
        .map(|s| {
            let mut m = TwistorMax::default();
            if sd.family() == SpectralFamily::Ak {
                let pt = TwistorPointAk::on_variety(sd, s.zeta, s.z, s.rho);
                m.glue = glue_check_ak(sd, &pt)?.residual_rel;
                let img = real_structure_ak(&pt, k)?;
                m.image = img.variety_residual(sd);
                let back = real_structure_ak(&img, k)?;
                m.involution = rel(back.zeta, pt.zeta)
                    .max(rel(back.z, pt.z))
                    .max(rel(back.rho, pt.rho))
                    .max(rel(back.xi, pt.xi));
            } else {
                m.quadric = chiklr_reduce(sd, s.zeta, s.z, s.rho, s.rho1)?.quadric_residual;
                let cons = spectral_conservation(sd, s.zeta, s.z, s.rho, s.rho1)?;
                m.curve = cons.curve_residual;
                m.conservation = cons.scaling_residual;
            }
            let (x, y, z, res) = dihedral_invariants(s.u, s.v, dk)?;
            m.dihedral = res;
            for g in dihedral_generators(dk) {
                let (u2, v2) = g(s.u, s.v);
                let (x2, y2, z2, _) = dihedral_invariants(u2, v2, dk)?;
                m.invariance = m.invariance.max((x - x2).norm().max((y - y2).norm()).max((z - z2).norm()));
            }
            let root = s.z.sqrt();
            let a = transition_pq_with_root(s.p, s.q, root, s.zeta, k)?;
            let b = transition_pq_with_root(s.p, s.q, -root, s.zeta, k)?;
            let e = transition_pq(s.p, s.q, s.z, s.zeta, k)?;
            let scale = (a.0.norm() + a.1.norm()).max(f64::MIN_POSITIVE);
            m.branch = ((a.0 - b.0).norm() + (a.1 - b.1).norm()).max((a.0 - e.0).norm() + (a.1 - e.1).norm()) / scale;
            m.determinant = transition_determinant_residual(s.z, s.zeta, k)?;
            Ok(m)
        })
        .collect();
    let mut mx = TwistorMax::default();
    for r in per {
        let m = r?;
        mx.glue = mx.glue.max(m.glue);
        mx.involution = mx.involution.max(m.involution);
        mx.image = mx.image.max(m.image);
        mx.quadric = mx.quadric.max(m.quadric);
        mx.dihedral = mx.dihedral.max(m.dihedral);
        mx.invariance = mx.invariance.max(m.invariance);
        mx.branch = mx.branch.max(m.branch);
        mx.determinant = mx.determinant.max(m.determinant);
        mx.curve = mx.curve.max(m.curve);
        mx.conservation = mx.conservation.max(m.conservation);
    }
    let cs = &mut ctx.checks;
    if sd.family() == SpectralFamily::Ak {
        cs.push("glue", mx.glue, GLUE_TOL);
        cs.push("involution", mx.involution, INVOLUTION_TOL);
        cs.push("real_structure_image", mx.image, GLUE_TOL);
    } else {
        cs.push("quadric", mx.quadric, QUADRIC_TOL);
        cs.push("quadric_exact", exact_quadric_golden(), 0.0);
        cs.push("spectral_curve", mx.curve, CONSERVATION_TOL);
        cs.push("spectral_conservation", mx.conservation, CONSERVATION_TOL);
    }
    cs.push("dihedral", mx.dihedral, DIHEDRAL_TOL);
    cs.push("dihedral_invariance", mx.invariance, INVARIANCE_TOL);
    cs.push("transition_branch", mx.branch, BRANCH_TOL);
    cs.push("transition_determinant", mx.determinant, DETERMINANT_TOL);
    Ok(json!({ "samples": c.samples, "dihedral_k": dk }))
}

/// `|lhs − rhs|` of the quadric for fixed rational data, in exact
/// arithmetic.
pub fn exact_quadric_golden() -> f64 {
    let q = |a: i64, b: i64, c: i64, d: i64| Complex::new(rat(a, b), rat(c, d));
    let p_vals = [q(1, 2, -3, 4), q(2, 1, 1, 3), q(-5, 7, 0, 1), q(3, 11, 2, 9)];
    match chiklr_reduce_values(&p_vals, &q(3, 2, 1, 5), &q(1, 1, 2, 3), &q(-1, 4, 1, 1)) {
        Ok(out) => (out.lhs - out.rhs).modulus(),
        Err(_) => f64::INFINITY,
    }
}

// torelli

fn torelli_cmd(ctx: &mut Ctx) -> CliResult<Value> {
    let p: TNParams = ctx.parse()?;
    if p.params.iter().any(|q| !(q.a_re.is_finite() && q.a_im.is_finite() && q.b.is_finite())) {
        return Err(CliError::Schema("non-finite parameter".into()));
    }
    let k = p.k();
    let sys = roots(p.family, k);
    let expected = match p.family {
        SpectralFamily::Ak => k * (k + 1),
        SpectralFamily::Dk => 2 * k * k.saturating_sub(1),
    };
    let tol = ctx.cli.tol.unwrap_or(0.0);
    let rep = is_singular_with_tol(&p, tol);
    let cs = &mut ctx.checks;
    cs.push("root_count", (sys.roots.len() as f64 - expected as f64).abs(), 0.0);
    let bad_norm = sys.roots.iter().filter(|r| r.dot(r) != 2).count();
    cs.push("root_norms", bad_norm as f64, 0.0);
    let cartan = cartan_matrix(p.family, k).ok();
    if let Some(m) = &cartan {
        let same = textbook_cartan(p.family, k).is_ok_and(|t| equal_up_to_permutation(m, &t));
        cs.push("cartan", f64::from(u8::from(!same)), 0.0);
    }
    // the criterion on parameters directly: (a_α, b_α) = ±(a_β, b_β)
    let close = |x: f64, y: f64| (x - y).abs() <= tol;
    let mut direct = false;
    for (i, a) in p.params.iter().enumerate() {
        for b in &p.params[..i] {
            let same = close(a.a_re, b.a_re) && close(a.a_im, b.a_im) && close(a.b, b.b);
            let opp = close(a.a_re, -b.a_re) && close(a.a_im, -b.a_im) && close(a.b, -b.b);
            direct |= same || (p.family == SpectralFamily::Dk && opp);
        }
    }
    cs.push("criterion_agreement", f64::from(u8::from(direct != rep.singular)), 0.0);
    Ok(json!({
        "roots": sys.roots.len(),
        "root_note": sys.note,
        "cartan": cartan,
        "singular": rep.singular,
        "vanishing_roots": rep.roots,
        "periods": rep.periods,
        "zero_parameter_present": rep.zero_parameter_present,
    }))
}

// period-integral

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodConfig {
    monopoles: MonopoleConfig,
    /// Ordered center pairs; all `α < β` when absent.
    pairs: Option<Vec<(usize, usize)>>,
    #[serde(default = "default_nodes")]
    nodes: usize,
}

fn default_nodes() -> usize {
    PERIOD_NODES
}

pub const PERIOD_TOL: f64 = 1e-6;
pub const ORIENTATION_TOL: f64 = 1e-6;
pub const ADDITIVITY_TOL: f64 = 1e-4;

fn period_cmd(ctx: &mut Ctx) -> CliResult<Value> {
    let c: PeriodConfig = ctx.parse()?;
    let n = c.monopoles.centers().len();
    if n < 2 {
        return Err(CliError::Schema("period-integral needs at least two centers".into()));
    }
    let pairs = c
        .pairs
        .unwrap_or_else(|| (0..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect());
    let cst = calibrate_period_constant(c.monopoles.m(), c.nodes)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &(a, b) in &pairs {
        let chk = period_check(&c.monopoles, a, b, cst, c.nodes)?;
        worst = worst.max(chk.residual);
        rows.push(json!({
            "alpha": a,
            "beta": b,
            "integral": [chk.integral.re, chk.integral.im],
            "predicted": [chk.predicted.re, chk.predicted.im],
        }));
    }
    let cs = &mut ctx.checks;
    cs.push("prediction", worst, PERIOD_TOL);
    let fwd = period_integral_numeric(&c.monopoles, 0, 1, c.nodes)?;
    let bwd = period_integral_numeric(&c.monopoles, 1, 0, c.nodes)?;
    cs.push("orientation", (fwd / bwd + 1.0).norm(), ORIENTATION_TOL);
    if n >= 3 {
        let i12 = fwd;
        let i23 = period_integral_numeric(&c.monopoles, 1, 2, c.nodes)?;
        let i13 = period_integral_numeric(&c.monopoles, 0, 2, c.nodes)?;
        cs.push("additivity", (i12 + i23 - i13).norm() / i13.norm().max(cst.norm()), ADDITIVITY_TOL);
    }
    Ok(json!({ "constant": [cst.re, cst.im], "pairs": rows }))
}
