//! Command-line front end.
//!
//! Every command builds a [`RunReport`]; the exit code is 0 when all checks
//! pass, 1 when a check fails or a computation breaks down, and 2 for usage,
//! spec or I/O errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dressing::{
    dressed_blocks, invariance, pipeline, tractor_checks, tractor_derivative, tractor_dress, tractor_weyl, GaugeField,
    TractorField, TractorStage, WeylFactor,
};
use crate::error::{Error, Result};
use crate::expr::parse;
use crate::fields::{random_covector, random_gl_field, random_lorentz_field, random_scalar, taylor_vec};
use crate::forms::{
    canonical_identity_residual, curvature, gauge_transform, normal_connection, normality, poincare_blocks,
    poincare_connection, poincare_dressing, poincare_residual, representation_residual, SectionField,
};
use crate::metric::{Flavor, MetricValue, FIELD_ORDER};
use crate::report::{mat_json, mats_json, tensor3_json, vec_json, Accumulator, RunReport};
use crate::scalar::{Mat, Tensor3};
use crate::spec::{builtin_corpus, load_spec, MetricSpec};
use crate::suites::{geometry_suites, group_suites, stream, GeometryConfig, WEYL_FACTORS};
use crate::taylor::Taylor;

pub const THREADS_ENV: &str = "CARTAN_DRESS_THREADS";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 10;
const ORTHONORMAL_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "cartan-dress",
    version,
    about = "Normal Cartan connections, dressing and residual Weyl symmetry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Christoffel symbols, Ricci, Schouten, Υ and Π at sample points.
    Tensors(Common),
    /// Normal (or Poincaré) connection in graded and matrix form.
    Connection(Common),
    /// Dressed connections and invariance residuals.
    Dress(Common),
    /// Curvature of the normal connection and normality norms.
    Curvature(Common),
    /// Dressed tractor derivative and Weyl transformation tables.
    Tractor(Common),
    /// Full property suite; the built-in corpus when no spec is given.
    Verify(Common),
    /// Group-law and jet-homomorphism suites.
    Groups(GroupArgs),
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write the JSON report here (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
    /// Override the tolerance of every upper-bound check.
    #[arg(long, value_name = "FLOAT")]
    tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Metric spec file (TOML). Optional only for `verify`.
    #[arg(long, value_name = "PATH")]
    spec: Option<PathBuf>,
    /// Geometry to build; both conformal and projective when omitted.
    #[arg(long, value_enum)]
    flavor: Option<FlavorArg>,
    /// Comma-separated coordinates; may be repeated.
    #[arg(long, value_name = "CSV")]
    point: Vec<String>,
    /// Number of quasi-random sample points.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Seed for random sections, gauges and fields.
    #[arg(long, value_name = "U64", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    /// Dimension of the model space.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, value_name = "N", default_value_t = 200)]
    samples: usize,
    #[arg(long, value_name = "U64", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FlavorArg {
    Conformal,
    Projective,
    Poincare,
}

impl FlavorArg {
    fn cartan(self) -> Result<Flavor> {
        match self {
            FlavorArg::Conformal => Ok(Flavor::Conformal),
            FlavorArg::Projective => Ok(Flavor::Projective),
            FlavorArg::Poincare => Err(Error::Usage(
                "--flavor poincare is only available for `connection`".into(),
            )),
        }
    }
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<RunReport>,
    /// Help text or error message.
    pub message: Option<String>,
    pub json: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. }
        | Error::UnknownIdentifier { .. }
        | Error::Arity { .. }
        | Error::Spec(_)
        | Error::Usage(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                code,
                report: None,
                message: Some(e.render().to_string()),
                json: None,
            };
        }
    };
    let out = match &cli.command {
        Command::Groups(g) => g.out.clone(),
        Command::Tensors(c)
        | Command::Connection(c)
        | Command::Dress(c)
        | Command::Curvature(c)
        | Command::Tractor(c)
        | Command::Verify(c) => c.out.clone(),
    };
    let started = Instant::now();
    let result = threads().and_then(|t| match t {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Usage(format!("{THREADS_ENV}: {e}")))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    });
    match result {
        Ok(mut report) => {
            if let Some(tol) = out.tol {
                let checks = std::mem::take(&mut report.checks);
                report.pass = true;
                report.extend(checks.into_iter().map(|c| c.with_tolerance(tol)));
            }
            if out.timing {
                report.wall_time_s = Some(started.elapsed().as_secs_f64());
            }
            Outcome {
                code: if report.pass { 0 } else { 1 },
                report: Some(report),
                message: None,
                json: out.json,
            }
        }
        Err(e) => Outcome {
            code: exit_code(&e),
            report: None,
            message: Some(format!("error: {e}")),
            json: None,
        },
    }
}

/// Runs `argv`, prints the summary and writes JSON; returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let o = run(argv);
    if let Some(m) = &o.message {
        if o.code == 0 {
            print!("{m}");
        } else {
            eprintln!("{}", m.trim_end());
        }
    }
    let Some(report) = &o.report else {
        return o.code;
    };
    match &o.json {
        Some(p) if p.as_os_str() == "-" => print!("{}", report.to_json()),
        Some(p) => {
            if let Err(e) = std::fs::write(p, report.to_json()) {
                eprintln!("error: {}: {e}", p.display());
                return 2;
            }
            print!("{}", report.summary());
        }
        None => print!("{}", report.summary()),
    }
    o.code
}

fn threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::Usage(format!(
                "{THREADS_ENV} must be a positive integer, found {v:?}"
            ))),
        },
    }
}

fn dispatch(cmd: &Command) -> Result<RunReport> {
    match cmd {
        Command::Tensors(c) => tensors(c),
        Command::Connection(c) => connection(c),
        Command::Dress(c) => dress_cmd(c),
        Command::Curvature(c) => curvature_cmd(c),
        Command::Tractor(c) => tractor_cmd(c),
        Command::Verify(c) => verify(c),
        Command::Groups(g) => groups(g),
    }
}

fn echo(name: &str, c: &Common) -> String {
    let mut s = name.to_string();
    if let Some(p) = &c.spec {
        s.push_str(&format!(" --spec {}", p.display()));
    }
    if let Some(f) = c.flavor {
        s.push_str(&format!(
            " --flavor {}",
            f.to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default()
        ));
    }
    for p in &c.point {
        s.push_str(&format!(" --point {p}"));
    }
    if let Some(k) = c.samples {
        s.push_str(&format!(" --samples {k}"));
    }
    s.push_str(&format!(" --seed {}", c.seed));
    s
}

fn require_spec(c: &Common) -> Result<MetricSpec> {
    match &c.spec {
        Some(p) => load_spec(p),
        None => Err(Error::Usage("--spec PATH is required".into())),
    }
}

/// Parses `"0.1,0,-2"` into coordinates.
pub fn parse_point(csv: &str, n: usize) -> Result<Vec<f64>> {
    let xs = csv
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Usage(format!("--point {csv:?}: {:?} is not a finite number", s.trim())))
        })
        .collect::<Result<Vec<f64>>>()?;
    if xs.len() != n {
        return Err(Error::Usage(format!(
            "--point {csv:?} has {} coordinates, expected {n}",
            xs.len()
        )));
    }
    Ok(xs)
}

fn points(spec: &MetricSpec, c: &Common) -> Result<Vec<Vec<f64>>> {
    if c.point.is_empty() {
        Ok(spec.sample_points(c.samples.unwrap_or(DEFAULT_SAMPLES)))
    } else {
        c.point.iter().map(|p| parse_point(p, spec.n)).collect()
    }
}

fn flavors(c: &Common) -> Result<Vec<Flavor>> {
    match c.flavor {
        None => Ok(Flavor::both().to_vec()),
        Some(f) => Ok(vec![f.cartan()?]),
    }
}

fn tvals(t: &Tensor3<Taylor>) -> Value {
    tensor3_json(&t.map(|v| v.value()))
}

fn mvals(m: &Mat<Taylor>) -> Value {
    mat_json(&m.values())
}

fn vvals(v: &[Taylor]) -> Value {
    vec_json(&v.iter().map(|t| t.value()).collect::<Vec<_>>())
}

/// `max |∂_λ g_{μν} − Γ^ρ_{μλ} g_{ρν} − Γ^ρ_{νλ} g_{μρ}|` at the point.
fn compatibility(metric: &MetricValue, gamma: &Tensor3<Taylor>) -> f64 {
    let n = metric.n;
    let mut worst = 0.0f64;
    for l in 0..n {
        let dg = metric.g.deriv(l);
        for m in 0..n {
            for v in 0..n {
                let mut s = dg[(m, v)].value();
                for r in 0..n {
                    s -= gamma[(r, m, l)].value() * metric.g[(r, v)].value();
                    s -= gamma[(r, v, l)].value() * metric.g[(m, r)].value();
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

fn tensors(c: &Common) -> Result<RunReport> {
    let spec = require_spec(c)?;
    let fl = flavors(c)?;
    let mut report = RunReport::new(echo("tensors", c));
    let (mut sym, mut compat) = (Accumulator::default(), Accumulator::default());
    let mut out = Vec::new();
    for x in points(&spec, c)? {
        let metric = spec.eval(&x)?;
        let gamma = metric.christoffel()?;
        let n = metric.n;
        let mut s = 0.0f64;
        for m in 0..n {
            for v in 0..n {
                for l in 0..n {
                    s = s.max(gamma[(m, v, l)].max_abs_diff(&gamma[(m, l, v)]));
                }
            }
        }
        sym.push(s);
        compat.push(compatibility(&metric, &gamma));
        let mut obj = serde_json::Map::new();
        obj.insert("x".into(), vec_json(&x));
        obj.insert("metric".into(), mvals(&metric.g));
        obj.insert("christoffel".into(), tvals(&gamma));
        obj.insert("ricci".into(), mvals(&metric.ricci()?));
        obj.insert("scalar_curvature".into(), json!(metric.scalar_curvature()?.value()));
        for f in &fl {
            let g = metric.geometry(*f)?;
            obj.insert(
                f.name().into(),
                json!({
                    "schouten": mvals(&g.schouten),
                    "upsilon": vvals(&g.upsilon),
                    "pi_connection": tvals(&g.pi_conn),
                    "pi_tensor": mvals(&g.pi_tensor),
                }),
            );
        }
        out.push(Value::Object(obj));
    }
    report.value("points", Value::Array(out));
    report.check(sym.record("christoffel symmetric in lower indices", 1e-12));
    report.check(compat.record("metric compatibility", 1e-10));
    Ok(report)
}

fn graded_json(c: &crate::forms::Connection) -> Value {
    Value::Array(
        c.graded
            .directions()
            .iter()
            .map(|a| json!({"up": vec_json(&a.up), "mid": mat_json(&a.mid), "low": vec_json(&a.low)}))
            .collect(),
    )
}

fn connection(c: &Common) -> Result<RunReport> {
    let spec = require_spec(c)?;
    let mut report = RunReport::new(echo("connection", c));
    let pts = points(&spec, c)?;
    if c.flavor == Some(FlavorArg::Poincare) {
        let (mut acc, mut ident) = (Accumulator::default(), Accumulator::default());
        let mut out = Vec::new();
        for x in &pts {
            let metric = spec.eval(x)?;
            let geom = metric.geometry(Flavor::Conformal)?;
            let sec = spec.section(Flavor::Conformal, &metric, x)?;
            let w = poincare_connection(&metric, &sec, ORTHONORMAL_TOL)?;
            let dressed = gauge_transform(&w, &poincare_dressing(&sec))?;
            let (gam, trans) = poincare_blocks(&dressed);
            acc.push(poincare_residual(&geom, &sec, ORTHONORMAL_TOL)?);
            ident.push(canonical_identity_residual(&sec));
            let n = spec.n;
            let vals = w.values();
            out.push(json!({
                "x": vec_json(x),
                "matrix": mats_json(&vals),
                "graded": vals.iter().map(|m| json!({
                    "translation": vec_json(&(0..n).map(|a| m[(a, n)]).collect::<Vec<_>>()),
                    "rotation": mat_json(&m.block(0, 0, n, n)),
                })).collect::<Vec<_>>(),
                "dressed": {"christoffel": tensor3_json(&gam), "translation": mats_json(&trans)},
            }));
        }
        report.value("points", Value::Array(out));
        report.check(acc.record("poincare: dressed blocks vs christoffel", 1e-10));
        report.check(ident.record("poincare: canonical form identity", 1e-10));
        return Ok(report);
    }
    let fl = flavors(c)?;
    let mut out = Vec::new();
    for f in &fl {
        let (mut repr, mut ident, mut tors, mut trace) = (
            Accumulator::default(),
            Accumulator::default(),
            Accumulator::default(),
            Accumulator::default(),
        );
        let mut rows = Vec::new();
        for x in &pts {
            let metric = spec.eval(x)?;
            let geom = metric.geometry(*f)?;
            let sec = spec.section(*f, &metric, x)?;
            let conn = normal_connection(&crate::forms::PiData::of(&geom), &sec);
            repr.push(representation_residual(&conn, &sec.eta));
            ident.push(canonical_identity_residual(&sec));
            let nn = normality(*f, &conn.matrix, &sec.frame.values())?;
            tors.push(nn.torsion);
            trace.push(nn.k_trace);
            rows.push(
                json!({"x": vec_json(x), "graded": graded_json(&conn), "matrix": mats_json(&conn.matrix.values())}),
            );
        }
        out.push(json!({"flavor": f.name(), "points": rows}));
        let name = f.name();
        report.check(repr.record(format!("{name}: graded vs matrix representation"), 1e-11));
        report.check(ident.record(format!("{name}: canonical form identity"), 1e-10));
        report.check(tors.record(format!("{name}: normality: torsion"), 1e-8));
        report.check(trace.record(format!("{name}: normality: Ricci-type trace"), 1e-8));
    }
    report.value("connections", Value::Array(out));
    Ok(report)
}

fn random_gauges(
    rng: &mut rand_chacha::ChaCha8Rng,
    flavor: Flavor,
    eta: &Mat<f64>,
    x: &[f64],
    count: usize,
) -> Result<Vec<GaugeField>> {
    let n = eta.rows();
    let mut out = Vec::with_capacity(2 * count);
    for _ in 0..count {
        out.push(GaugeField::special(taylor_vec(
            &random_covector(rng, x, 0.4),
            x,
            FIELD_ORDER,
        )?));
        let m = match flavor {
            Flavor::Conformal => random_lorentz_field(rng, eta, x, 0.3),
            Flavor::Projective => random_gl_field(rng, n, x, 0.3),
        };
        out.push(GaugeField::rotation(m.taylor(x, FIELD_ORDER)?));
    }
    Ok(out)
}

fn dress_cmd(c: &Common) -> Result<RunReport> {
    let spec = require_spec(c)?;
    let mut report = RunReport::new(echo("dress", c));
    let pts = points(&spec, c)?;
    let mut out = Vec::new();
    for f in flavors(c)? {
        let name = f.name();
        let (mut stage1, mut content, mut inv) =
            (Accumulator::default(), Accumulator::default(), Accumulator::default());
        let mut rng = stream(c.seed, &format!("dress/{name}"));
        let mut rows = Vec::new();
        for x in &pts {
            let metric = spec.eval(x)?;
            let geom = metric.geometry(f)?;
            let sec = spec.section(f, &metric, x)?;
            let p = pipeline(&geom, &sec)?;
            let (s1, s0) = crate::dressing::content_residuals(&geom, &sec, &p);
            stage1.push(s1);
            content.push(s0);
            let mut residuals = Vec::new();
            for g in random_gauges(&mut rng, f, &sec.eta, x, 2)? {
                let r = invariance(&geom, &sec, &g, x)?;
                inv.push(r.max());
                residuals.push(r.max());
            }
            let (gam, sch, g) = dressed_blocks(f, &p.w0);
            let mut blocks = json!({"christoffel": tensor3_json(&gam), "schouten": mat_json(&sch)});
            if let Some(g) = g {
                blocks["metric"] = mat_json(&g);
            }
            rows.push(json!({
                "x": vec_json(x),
                "omega1": mats_json(&p.w1.values()),
                "omega0": mats_json(&p.w0.values()),
                "blocks": blocks,
                "invariance_residuals": vec_json(&residuals),
            }));
        }
        out.push(json!({"flavor": name, "points": rows}));
        report.check(stage1.record(format!("{name}: stage-one dressed content"), 1e-10));
        report.check(content.record(format!("{name}: dressed content"), 1e-10));
        report.check(inv.record(format!("{name}: gauge invariance"), 1e-9));
    }
    report.value("dressings", Value::Array(out));
    Ok(report)
}

fn curvature_cmd(c: &Common) -> Result<RunReport> {
    let spec = require_spec(c)?;
    let mut report = RunReport::new(echo("curvature", c));
    let pts = points(&spec, c)?;
    let mut out = Vec::new();
    for f in flavors(c)? {
        let name = f.name();
        let (mut tors, mut trace, mut anti) = (Accumulator::default(), Accumulator::default(), Accumulator::default());
        let mut rows = Vec::new();
        for x in &pts {
            let metric = spec.eval(x)?;
            let geom = metric.geometry(f)?;
            let sec = spec.section(f, &metric, x)?;
            let conn = normal_connection(&crate::forms::PiData::of(&geom), &sec);
            let omega = curvature(&conn.matrix)?;
            let nn = normality(f, &conn.matrix, &sec.frame.values())?;
            tors.push(nn.torsion);
            trace.push(nn.k_trace);
            anti.push(omega.antisymmetry_residual());
            rows.push(json!({
                "x": vec_json(x),
                "curvature": omega.values().iter().map(|row| mats_json(row)).collect::<Vec<_>>(),
                "torsion_norm": nn.torsion,
                "ricci_trace_norm": nn.k_trace,
            }));
        }
        out.push(json!({"flavor": name, "points": rows}));
        report.check(tors.record(format!("{name}: normality: torsion"), 1e-8));
        report.check(trace.record(format!("{name}: normality: Ricci-type trace"), 1e-8));
        report.check(anti.record(format!("{name}: curvature antisymmetry"), 1e-12));
    }
    report.value("curvatures", Value::Array(out));
    Ok(report)
}

fn tractor_cmd(c: &Common) -> Result<RunReport> {
    let spec = require_spec(c)?;
    let mut report = RunReport::new(echo("tractor", c));
    let pts = points(&spec, c)?;
    let n = spec.n;
    let mut out = Vec::new();
    for f in flavors(c)? {
        let name = f.name();
        let mut acc = [
            Accumulator::default(),
            Accumulator::default(),
            Accumulator::default(),
            Accumulator::default(),
        ];
        let mut rng = stream(c.seed, &format!("tractor/{name}"));
        let k = match f {
            Flavor::Conformal => n + 2,
            Flavor::Projective => n + 1,
        };
        let mut rows = Vec::new();
        for x in &pts {
            let metric = spec.eval(x)?;
            let geom = metric.geometry(f)?;
            let sec: SectionField = spec.section(f, &metric, x)?;
            let comps = (0..k)
                .map(|_| random_scalar(&mut rng, x, 0.5).eval_taylor(x, FIELD_ORDER))
                .collect::<Result<Vec<_>>>()?;
            let phi = TractorField::new(f, TractorStage::Raw, comps, n)?;
            let p = pipeline(&geom, &sec)?;
            let phi0 = tractor_dress(&phi, &p.u1, &p.u0)?;
            let d0: Vec<Vec<f64>> = tractor_derivative(&p.w0, &phi0)
                .iter()
                .map(|v| v.iter().map(|t| t.value()).collect())
                .collect();
            let mut table = Vec::new();
            for src in WEYL_FACTORS {
                let z = parse(src, n)?.eval_taylor(x, FIELD_ORDER)?;
                let w = WeylFactor::new(z, x)?;
                let t = tractor_checks(&geom, &sec, &phi, &w)?;
                for (a, v) in acc.iter_mut().zip([t.dressing, t.derivative, t.weyl, t.covariance]) {
                    a.push(v);
                }
                table.push(json!({"z": src, "phi0": vec_json(&tractor_weyl(&phi0, &w, &metric).values())}));
            }
            rows.push(json!({
                "x": vec_json(x),
                "phi0": vec_json(&phi0.values()),
                "d0_phi0": d0.iter().map(|v| vec_json(v)).collect::<Vec<_>>(),
                "weyl": table,
            }));
        }
        out.push(json!({"flavor": name, "points": rows}));
        let [dr, de, we, co] = acc;
        report.check(dr.record(format!("{name}: tractor dressing closed form"), 1e-12));
        report.check(de.record(format!("{name}: tractor derivative components"), 1e-11));
        report.check(we.record(format!("{name}: tractor Weyl law vs C^-1"), 1e-12));
        report.check(co.record(format!("{name}: tractor derivative covariance"), 1e-9));
    }
    report.value("tractors", Value::Array(out));
    Ok(report)
}

/// Group suites run by `verify` when no spec is given.
pub const VERIFY_GROUP_DIMS: [usize; 2] = [3, 4];
pub const VERIFY_GROUP_SAMPLES: usize = 200;

fn verify(c: &Common) -> Result<RunReport> {
    if c.flavor.is_some() || !c.point.is_empty() {
        return Err(Error::Usage("verify takes neither --flavor nor --point".into()));
    }
    let mut report = RunReport::new(echo("verify", c));
    let cfg = GeometryConfig {
        points: c.samples.unwrap_or(DEFAULT_SAMPLES),
        seed: c.seed,
        ..GeometryConfig::default()
    };
    let specs = match &c.spec {
        Some(p) => vec![load_spec(p)?],
        None => {
            for n in VERIFY_GROUP_DIMS {
                report.extend(group_suites(n, VERIFY_GROUP_SAMPLES, c.seed));
            }
            builtin_corpus()
        }
    };
    for s in &specs {
        report.extend(geometry_suites(s, &cfg));
    }
    report.value(
        "specs",
        Value::Array(
            specs
                .iter()
                .map(|s| json!({"name": s.name, "dimension": s.n}))
                .collect(),
        ),
    );
    Ok(report)
}

fn groups(g: &GroupArgs) -> Result<RunReport> {
    if !(3..=5).contains(&g.n) {
        return Err(Error::Usage(format!("--n must be 3, 4 or 5, found {}", g.n)));
    }
    let mut report = RunReport::new(format!("groups --n {} --samples {} --seed {}", g.n, g.samples, g.seed));
    report.extend(group_suites(g.n, g.samples, g.seed));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("0, 1.5,-2", 3).unwrap(), vec![0.0, 1.5, -2.0]);
        assert!(parse_point("0,1", 3).is_err());
        assert!(parse_point("0,a,1", 3).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["cartan-dress", "tensors"]).code, 2);
        assert_eq!(run(["cartan-dress", "bogus"]).code, 2);
        assert_eq!(run(["cartan-dress", "groups", "--n", "2"]).code, 2);
        assert_eq!(run(["cartan-dress", "--help"]).code, 0);
    }
}
