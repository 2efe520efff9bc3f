//! Command-line front end: `carnot <command> ...`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (a JSON
//! report is printed either way), 2 for unreadable or malformed input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::carnot_map::{
    carnot_differential, default_t_seq, differential_checks, frame_decompose, inverse_rule_check, map_osculation_residual, pansu_numeric,
    sample_points, CarnotMapJet,
};
use crate::carnot_structure::{default_trunc, heat_lift, HFrame};
use crate::coords::{carnot_chart, eps_carnot, exp_coordinates, is_carnot, is_privileged, ExpMode};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::groupoid::{
    axioms_report, convergence_probe, invert_remainder, mult_remainder, probe_times, remainder_slope, transition, transition_remainder, ChartPoint,
    GroupoidChart, GroupoidElement,
};
use crate::io::{self, fmt_point, parse_point, poly_to_json, strs, to_canonical_json, Structure, StructureFile};
use crate::nilgroup::{validate_algebra, NilpotentGroup};
use crate::report::Report;
use crate::scalar::{fmt_q, Q};
use crate::wpoly::fmt_poly;

#[derive(Parser, Debug)]
#[command(name = "carnot", version, about = "Exact computations on Carnot manifolds")]
pub struct Cli {
    /// Weighted truncation degree for series (default: twice the step).
    #[arg(long, global = true)]
    pub trunc: Option<i64>,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for subsampled grids.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for property sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a structure file or a map file.
    Validate { file: String },
    /// Tangent group law at the basepoint.
    #[command(subcommand)]
    Group(GroupCmd),
    /// ε-Carnot and canonical coordinates.
    #[command(subcommand)]
    Coords(CoordsCmd),
    /// Carnot differentials of maps.
    #[command(subcommand)]
    Diff(DiffCmd),
    /// Numeric Pansu difference quotients against the Carnot differential.
    Pansu {
        map: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        dir: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0.9)]
        min_slope: f64,
    },
    /// Tangent groupoid charts and operations.
    #[command(subcommand)]
    Groupoid(GroupoidCmd),
    /// Lift a structure to `M × R` with an extra weight-two direction.
    Heatlift {
        file: String,
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    /// Product `x·y` in the tangent group at the basepoint.
    Mul { file: String, x: String, y: String },
    /// Inverse `x^{-1}`.
    Inv { file: String, x: String },
    /// Structure constants `L_ij^k`.
    Table { file: String },
}

#[derive(Subcommand, Debug)]
pub enum CoordsCmd {
    /// ε-Carnot map at a point, as JSON.
    Eps {
        file: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Exponential coordinates of the first kind.
    Canonical {
        file: String,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Canonical)]
        mode: Mode,
    },
    /// Privileged and Carnot-coordinate checks of the given coordinates.
    Check {
        file: String,
        #[arg(long)]
        at: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Mode {
    Canonical,
    Conversion,
}

#[derive(Subcommand, Debug)]
pub enum DiffCmd {
    /// Carnot differential matrix.
    Compute {
        map: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Block structure and homomorphism checks of the Carnot differential.
    Check {
        map: String,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Tangent approximation residual; needs Carnot coordinates at both ends.
    Osculate {
        map: String,
        #[arg(long)]
        at: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct ChartArgs {
    /// Reference structure.
    pub file: Option<String>,
    /// Frame of the second chart (default: the reference frame).
    #[arg(long)]
    pub frame: Option<String>,
    /// A bundled chart pair instead of files.
    #[arg(long)]
    pub pair: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum GroupoidCmd {
    /// Transition from the first chart to the second.
    Transition {
        #[command(flatten)]
        charts: ChartArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        t: String,
    },
    /// Chart multiplication in the second chart.
    Mult {
        #[command(flatten)]
        charts: ChartArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        z: String,
        #[arg(long)]
        t: String,
    },
    /// Chart inversion in the second chart.
    Invert {
        #[command(flatten)]
        charts: ChartArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        t: String,
    },
    /// Convergence of the sequence with chart coordinates `(κ(x), D ξ, 4^{-l})`
    /// in the second chart, seen from both charts.
    Probe {
        #[command(flatten)]
        charts: ChartArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        xi: String,
        #[arg(long, default_value_t = 10)]
        len: usize,
    },
    /// Groupoid laws on both strata in both charts.
    Axioms {
        #[command(flatten)]
        charts: ChartArgs,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Output {
    ok: bool,
    text: String,
    body: Value,
}

impl Output {
    fn new(ok: bool, text: impl Into<String>, body: Value) -> Self {
        Self { ok, text: text.into(), body }
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::Parse(_) | Error::Shape(_) | Error::Weights(_) | Error::Singular(_))
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Shape(_) => "shape",
        Error::Weights(_) => "weights",
        Error::Singular(_) => "singular",
        Error::Truncation(_) => "truncation",
        Error::Precondition(_) => "precondition",
        Error::Domain(_) => "domain",
        Error::Internal(_) => "internal",
    }
}

fn report_json(r: &Report) -> Value {
    serde_json::to_value(r).expect("serializable report")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let s = e.render().to_string();
            return if code == 0 { Outcome { code, stdout: s, stderr: String::new() } } else { Outcome { code, stdout: String::new(), stderr: s } };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build().expect("thread pool");
    let res = pool.install(|| dispatch(cli));
    match res {
        Ok(out) => {
            let mut body = json!({ "command": name, "ok": out.ok });
            if let (Value::Object(b), Value::Object(extra)) = (&mut body, out.body) {
                b.extend(extra);
            }
            let stdout = if cli.json || !out.ok { to_canonical_json(&body) } else { out.text };
            Outcome { code: if out.ok { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = if is_input_error(&e) { 2 } else { 1 };
            let body = json!({ "command": name, "ok": false, "error": { "kind": error_kind(&e), "message": e.to_string() } });
            Outcome { code, stdout: to_canonical_json(&body), stderr: format!("error: {e}\n") }
        }
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Validate { .. } => "validate".into(),
        Command::Group(g) => format!("group {}", match g {
            GroupCmd::Mul { .. } => "mul",
            GroupCmd::Inv { .. } => "inv",
            GroupCmd::Table { .. } => "table",
        }),
        Command::Coords(c) => format!("coords {}", match c {
            CoordsCmd::Eps { .. } => "eps",
            CoordsCmd::Canonical { .. } => "canonical",
            CoordsCmd::Check { .. } => "check",
        }),
        Command::Diff(d) => format!("diff {}", match d {
            DiffCmd::Compute { .. } => "compute",
            DiffCmd::Check { .. } => "check",
            DiffCmd::Osculate { .. } => "osculate",
        }),
        Command::Pansu { .. } => "pansu".into(),
        Command::Groupoid(g) => format!("groupoid {}", match g {
            GroupoidCmd::Transition { .. } => "transition",
            GroupoidCmd::Mult { .. } => "mult",
            GroupoidCmd::Invert { .. } => "invert",
            GroupoidCmd::Probe { .. } => "probe",
            GroupoidCmd::Axioms { .. } => "axioms",
        }),
        Command::Heatlift { .. } => "heatlift".into(),
    }
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Validate { file } => validate(cli, file),
        Command::Group(g) => group(cli, g),
        Command::Coords(c) => coords(cli, c),
        Command::Diff(d) => diff(cli, d),
        Command::Pansu { map, at, dir, tol, min_slope } => pansu(cli, map, at, dir, *tol, *min_slope),
        Command::Groupoid(g) => groupoid(cli, g),
        Command::Heatlift { file, name } => heatlift(cli, file, name.as_deref()),
    }
}

fn point(s: &str, n: usize, what: &str) -> Result<Vec<Q>> {
    let p = parse_point(s).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
    if p.len() != n {
        return Err(Error::Parse(format!("{what}: {} coordinates for dimension {n}", p.len())));
    }
    Ok(p)
}

fn scalar(s: &str, what: &str) -> Result<Q> {
    crate::scalar::parse_q(s).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn frame_at(f: &HFrame<Q>, at: &Option<String>) -> Result<HFrame<Q>> {
    match at {
        Some(a) => f.with_basepoint(point(a, f.n(), "--at")?),
        None => Ok(f.clone()),
    }
}

fn load(cli: &Cli, file: &str) -> Result<Structure> {
    io::parse_structure(file, cli.trunc)
}

fn load_map(cli: &Cli, file: &str, at: &Option<String>) -> Result<CarnotMapJet> {
    let m = io::parse_map(file, cli.trunc)?;
    match at {
        Some(a) => m.with_base(point(a, m.source.n(), "--at")?),
        None => Ok(m),
    }
}

fn subsample<T: Clone>(v: Vec<T>, limit: usize, seed: u64) -> Vec<T> {
    if v.len() <= limit {
        return v;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.shuffle(&mut rng);
    let mut keep: Vec<usize> = idx.into_iter().take(limit).collect();
    keep.sort_unstable();
    keep.into_iter().map(|i| v[i].clone()).collect()
}

/// Associativity, unit and inverse on seeded grid triples, in parallel with
/// a deterministic merge.
fn group_law_sweep(g: &NilpotentGroup<Q>, seed: u64) -> Report {
    let pts = sample_points(g.n(), 24);
    let m = pts.len();
    let triples: Vec<(usize, usize, usize)> = (0..m).flat_map(|i| (0..m).flat_map(move |j| (0..m).map(move |k| (i, j, k)))).collect();
    let triples = subsample(triples, 400, seed);
    let e = g.identity();
    let found: Vec<Option<(String, String)>> = triples
        .par_iter()
        .map(|&(i, j, k)| {
            let (x, y, z) = (&pts[i], &pts[j], &pts[k]);
            if g.mul(&g.mul(x, y), z) != g.mul(x, &g.mul(y, z)) {
                return Some(("associativity".into(), format!("(xy)z != x(yz) at x=({}), y=({}), z=({})", fmt_point(x), fmt_point(y), fmt_point(z))));
            }
            if g.mul(x, &e) != *x || g.mul(&e, x) != *x {
                return Some(("unit".into(), format!("identity fails at ({})", fmt_point(x))));
            }
            if g.mul(x, &g.inverse(x)) != e {
                return Some(("inverse".into(), format!("x·x^-1 != 0 at ({})", fmt_point(x))));
            }
            None
        })
        .collect();
    let mut rep = Report::new();
    for (k, m) in found.into_iter().flatten() {
        rep.push(&k, m);
    }
    rep.note("group_law_triples", triples.len());
    rep
}

fn structure_group(s: &Structure) -> Result<NilpotentGroup<Q>> {
    let alg = match &s.algebra {
        Some(a) => a.clone(),
        None => s.frame.tangent_algebra_at(s.frame.basepoint())?,
    };
    Ok(NilpotentGroup::new(alg))
}

fn validate(cli: &Cli, file: &str) -> Result<Output> {
    let src = io::read_source(file)?;
    let v: Value = serde_json::from_str(&src).map_err(|e| Error::Parse(format!("{file}: {e}")))?;
    if v.get("components").is_some() {
        return validate_map(cli, file);
    }
    let s = load(cli, file)?;
    let mut rep = s.report.clone();
    if s.report.is_ok() {
        let alg = s.frame.tangent_algebra_at(s.frame.basepoint())?;
        rep.merge(validate_algebra(alg.weights(), &alg.entries(), &()));
        rep.merge(group_law_sweep(&structure_group(&s)?, cli.seed));
        let (eps, pushed) = carnot_chart(&s.frame)?;
        let r = is_carnot(&pushed, &eps.algebra);
        rep.note("eps_carnot", r.is_ok());
        rep.merge(r);
        rep.note("privileged", is_privileged(&s.frame).is_ok());
    }
    let text = if rep.is_ok() { format!("{}: ok\n", s.name) } else { format!("{}: {}\n", s.name, rep.summary()) };
    Ok(Output::new(rep.is_ok(), text, json!({ "name": s.name, "report": report_json(&rep) })))
}

fn validate_map(cli: &Cli, file: &str) -> Result<Output> {
    let m = load_map(cli, file, &None)?;
    let (_, mut rep) = frame_decompose(&m)?;
    if rep.is_ok() {
        let d = carnot_differential(&m)?;
        rep.merge(differential_checks(&d, &subsample(sample_points(m.source.n(), 60), 60, cli.seed)));
    }
    let text = if rep.is_ok() { "map: ok\n".to_string() } else { format!("map: {}\n", rep.summary()) };
    Ok(Output::new(rep.is_ok(), text, json!({ "report": report_json(&rep) })))
}

fn group(cli: &Cli, g: &GroupCmd) -> Result<Output> {
    match g {
        GroupCmd::Mul { file, x, y } => {
            let grp = structure_group(&load(cli, file)?)?;
            let p = grp.mul(&point(x, grp.n(), "x")?, &point(y, grp.n(), "y")?);
            Ok(Output::new(true, format!("{}\n", fmt_point(&p)), json!({ "result": strs(&p) })))
        }
        GroupCmd::Inv { file, x } => {
            let grp = structure_group(&load(cli, file)?)?;
            let p = grp.inverse(&point(x, grp.n(), "x")?);
            Ok(Output::new(true, format!("{}\n", fmt_point(&p)), json!({ "result": strs(&p) })))
        }
        GroupCmd::Table { file } => {
            let grp = structure_group(&load(cli, file)?)?;
            let rows: Vec<Value> = grp.algebra().to_strings().into_iter().map(|(i, j, k, c)| json!({ "i": i, "j": j, "k": k, "c": c })).collect();
            let text: String = grp.algebra().to_strings().into_iter().map(|(i, j, k, c)| format!("L_{i}{j}^{k} = {c}\n")).collect();
            Ok(Output::new(true, text, json!({ "weights": grp.weights().as_slice(), "constants": rows })))
        }
    }
}

fn coords(cli: &Cli, c: &CoordsCmd) -> Result<Output> {
    match c {
        CoordsCmd::Eps { file, at } => {
            let f = frame_at(&load(cli, file)?.frame, at)?;
            let e = eps_carnot(&f, f.basepoint())?;
            let j = serde_json::to_value(io::eps_to_json(&e)).expect("serializable");
            Ok(Output::new(true, to_canonical_json(&j), json!({ "eps": j })))
        }
        CoordsCmd::Canonical { file, at, mode } => {
            let f = frame_at(&load(cli, file)?.frame, at)?;
            let trunc = cli.trunc.unwrap_or_else(|| default_trunc(f.weights()));
            let m = match mode {
                Mode::Canonical => ExpMode::Canonical,
                Mode::Conversion => ExpMode::Conversion,
            };
            let chg = exp_coordinates(&f, f.basepoint(), m, trunc)?;
            let comps: Vec<Value> = chg.forward.comps().iter().map(|p| serde_json::to_value(poly_to_json(p)).expect("serializable")).collect();
            let text: String = chg.forward.comps().iter().enumerate().map(|(k, p)| format!("u_{} = {}\n", k + 1, fmt_poly(p, "x"))).collect();
            Ok(Output::new(true, text, json!({ "components": comps, "trunc": chg.forward.trunc().min(trunc), "base": strs(&chg.base) })))
        }
        CoordsCmd::Check { file, at } => {
            let f = frame_at(&load(cli, file)?.frame, at)?;
            let mut rep = is_privileged(&f);
            if rep.is_ok() {
                let alg = f.tangent_algebra_at(f.basepoint())?;
                rep.merge(is_carnot(&f, &alg));
            }
            let text = if rep.is_ok() { "Carnot coordinates\n".to_string() } else { format!("{}\n", rep.summary()) };
            Ok(Output::new(rep.is_ok(), text, json!({ "report": report_json(&rep) })))
        }
    }
}

fn matrix_text(m: &crate::linalg::Mat<Q>) -> String {
    m.to_strings().iter().map(|r| format!("{}\n", r.join(" "))).collect()
}

fn diff(cli: &Cli, d: &DiffCmd) -> Result<Output> {
    match d {
        DiffCmd::Compute { map, at } => {
            let m = load_map(cli, map, at)?;
            let dm = carnot_differential(&m)?;
            Ok(Output::new(true, matrix_text(&dm.matrix), json!({ "matrix": dm.matrix.to_strings(), "base": strs(&m.base) })))
        }
        DiffCmd::Check { map, at, samples } => {
            let m = load_map(cli, map, at)?;
            let (_, mut rep) = frame_decompose(&m)?;
            if rep.is_ok() {
                let dm = carnot_differential(&m)?;
                rep.merge(differential_checks(&dm, &subsample(sample_points(m.source.n(), *samples), *samples, cli.seed)));
                if m.source.n() == m.target.n() && dm.matrix.inverse().is_ok() {
                    rep.merge(inverse_rule_check(&m)?);
                }
            }
            let text = if rep.is_ok() { "ok\n".to_string() } else { format!("{}\n", rep.summary()) };
            Ok(Output::new(rep.is_ok(), text, json!({ "report": report_json(&rep) })))
        }
        DiffCmd::Osculate { map, at } => {
            let m = load_map(cli, map, at)?;
            let o = map_osculation_residual(&m)?;
            let residual: Vec<Value> = o.residual.comps().iter().map(|p| serde_json::to_value(poly_to_json(p)).expect("serializable")).collect();
            let order = format!("{:?}", o.order);
            let text = format!("order {order}\n{}", matrix_text(&o.differential));
            Ok(Output::new(
                o.report.is_ok(),
                text,
                json!({ "order": order, "residual": residual, "differential": o.differential.to_strings(), "slope": o.slope, "report": report_json(&o.report) }),
            ))
        }
    }
}

fn pansu(cli: &Cli, map: &str, at: &str, dir: &str, tol: f64, min_slope: f64) -> Result<Output> {
    let m = load_map(cli, map, &None)?;
    let a = point(at, m.source.n(), "--at")?;
    let y = point(dir, m.source.n(), "--dir")?;
    let p = pansu_numeric(&m, &a, &y, &default_t_seq())?;
    let ok = p.passes(tol, min_slope);
    let text = format!(
        "prediction {}\nlimit {:?}\ndeviation {:e}\nslope {}\n",
        fmt_point(&p.prediction),
        p.limit,
        p.limit_deviation,
        p.slope.map_or("exact".into(), |s| format!("{s:.4}"))
    );
    Ok(Output::new(
        ok,
        text,
        json!({
            "ts": p.ts, "values": p.values, "deviations": p.deviations, "prediction": strs(&p.prediction),
            "limit": p.limit, "limit_deviation": p.limit_deviation, "slope": p.slope, "exact": p.is_exact(), "report": report_json(&p.report),
        }),
    ))
}

fn charts(cli: &Cli, a: &ChartArgs) -> Result<(GroupoidChart, GroupoidChart)> {
    if let Some(name) = &a.pair {
        return fixtures::chart_pairs()
            .into_iter()
            .find(|p| p.0 == name.as_str())
            .map(|p| (p.1, p.2))
            .ok_or_else(|| Error::Parse(format!("unknown chart pair {name:?}")));
    }
    let file = a.file.as_ref().ok_or_else(|| Error::Parse("a structure file or --pair is required".into()))?;
    let reference = load(cli, file)?.frame;
    let c1 = GroupoidChart::identity(file, &reference)?;
    let c2 = match &a.frame {
        Some(g) => {
            let frame = load(cli, g)?.frame;
            let ctx = crate::wpoly::PolyCtx::new(reference.weights().grading(), crate::wpoly::EXACT, ());
            GroupoidChart::new(g, reference.clone(), frame, crate::coords::CoordinateChange::identity(&ctx, vec![Q::from_integer(0.into()); reference.n()]))?
        }
        None => c1.clone(),
    };
    Ok((c1, c2))
}

fn cap(cli: &Cli, c: &GroupoidChart) -> i64 {
    cli.trunc.unwrap_or_else(|| default_trunc(c.reference.weights()) + 2)
}

fn chart_point_json(p: &ChartPoint) -> Value {
    json!({ "x": strs(&p.x), "y": strs(&p.y), "t": fmt_q(&p.t) })
}

fn groupoid(cli: &Cli, g: &GroupoidCmd) -> Result<Output> {
    match g {
        GroupoidCmd::Transition { charts: a, x, y, t } => {
            let (c1, c2) = charts(cli, a)?;
            let n = c1.n();
            let p = ChartPoint::new(point(x, n, "--x")?, point(y, n, "--y")?, scalar(t, "--t")?);
            let out = transition(&c1, &c2, &p)?;
            let r = transition_remainder(&c1, &c2, cap(cli, &c1))?;
            let slope = remainder_slope(|s| Ok(transition(&c1, &c2, &ChartPoint::new(p.x.clone(), p.y.clone(), s.clone()))?.y))?;
            let text = format!("({} ; {} ; {})\n", fmt_point(&out.x), fmt_point(&out.y), fmt_q(&out.t));
            Ok(Output::new(true, text, json!({ "result": chart_point_json(&out), "theta_zero": r.theta_is_zero(), "slope": slope })))
        }
        GroupoidCmd::Mult { charts: a, x, y, z, t } => {
            let (_, c) = charts(cli, a)?;
            let n = c.n();
            let (x, y, z, t) = (point(x, n, "--x")?, point(y, n, "--y")?, point(z, n, "--z")?, scalar(t, "--t")?);
            let v = c.chart_mult(&x, &y, &z, &t)?;
            let r = mult_remainder(&c, cap(cli, &c))?;
            Ok(Output::new(true, format!("{}\n", fmt_point(&v)), json!({ "result": strs(&v), "theta_zero": r.theta_is_zero() })))
        }
        GroupoidCmd::Invert { charts: a, x, y, t } => {
            let (_, c) = charts(cli, a)?;
            let n = c.n();
            let p = c.chart_invert(&point(x, n, "--x")?, &point(y, n, "--y")?, &scalar(t, "--t")?)?;
            let r = invert_remainder(&c, cap(cli, &c))?;
            let text = format!("({} ; {} ; {})\n", fmt_point(&p.x), fmt_point(&p.y), fmt_q(&p.t));
            Ok(Output::new(true, text, json!({ "result": chart_point_json(&p), "theta_zero": r.theta_is_zero() })))
        }
        GroupoidCmd::Probe { charts: a, x, xi, len } => {
            let (c1, c2) = charts(cli, a)?;
            let n = c1.n();
            let x = point(x, n, "--x")?;
            let xi = point(xi, n, "--xi")?;
            let u = c2.kappa(&x);
            let v = c2.differential_at(&x)?.mul_vec(&xi);
            let mut seq = Vec::with_capacity(*len);
            for t in probe_times(*len) {
                match c2.chart_inverse(&ChartPoint::new(u.clone(), v.clone(), t))? {
                    GroupoidElement::Pair { x, y, t } => seq.push((x, y, t)),
                    GroupoidElement::Tangent { .. } => return Err(Error::Internal("probe produced a tangent element".into())),
                }
            }
            let r1 = convergence_probe(&c1, &seq)?;
            let r2 = convergence_probe(&c2, &seq)?;
            let agree = r1.converged == r2.converged && r1.xi == r2.xi && r1.x == r2.x;
            let ok = agree && r1.converged;
            let res = |r: &crate::groupoid::ProbeResult| json!({ "converged": r.converged, "x": strs(&r.x), "xi": r.xi.as_ref().map(|v| strs(v)), "diagnostics": r.diagnostics });
            let text = format!(
                "{}: {}\n{}: {}\n",
                c1.name,
                r1.xi.as_ref().map_or(r1.diagnostics.clone(), |v| fmt_point(v)),
                c2.name,
                r2.xi.as_ref().map_or(r2.diagnostics.clone(), |v| fmt_point(v))
            );
            Ok(Output::new(ok, text, json!({ "first": res(&r1), "second": res(&r2), "agree": agree })))
        }
        GroupoidCmd::Axioms { charts: a } => {
            let (c1, c2) = charts(cli, a)?;
            let n = c1.n();
            let pts = subsample(sample_points(n, 8), 4, cli.seed);
            let fib = subsample(sample_points(n, 8), 3, cli.seed.wrapping_add(1));
            let ts = [Q::from_integer(0.into()), Q::new(1.into(), 2.into()), Q::from_integer((-1).into())];
            let reps: Vec<Result<Report>> = [&c1, &c2].par_iter().map(|c| axioms_report(c, &pts, &fib, &ts)).collect();
            let mut rep = Report::new();
            for r in reps {
                rep.merge(r?);
            }
            let text = if rep.is_ok() { "ok\n".to_string() } else { format!("{}\n", rep.summary()) };
            Ok(Output::new(rep.is_ok(), text, json!({ "report": report_json(&rep) })))
        }
    }
}

fn heatlift(cli: &Cli, file: &str, name: Option<&str>) -> Result<Output> {
    let s = load(cli, file)?;
    let lifted = heat_lift(&s.frame)?;
    let name = name.map(str::to_string).unwrap_or_else(|| format!("{}_heat", s.name));
    let doc = StructureFile::from_frame(&name, &lifted, None);
    let v = serde_json::to_value(&doc).expect("serializable");
    Ok(Output::new(true, to_canonical_json(&v), json!({ "structure": v })))
}

#[cfg(test)]
mod tests;
