use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cvmin_core::displacement::min_displacement_on_simplex;
use cvmin_core::explorer::{explore_min_set, quotient_by_power, ExploreLimits};
use cvmin_core::finite_order::{build_xp, build_xpq, sigma, unique_isometry_representative, verify_unique_fixed_point};
use cvmin_core::lipschitz::stretch;
use cvmin_core::rational::{fmt_rational, parse_rational, to_f64};
use cvmin_core::{AutoPair, CVPoint, MarkedGraph, Rational, Workspace};
use num_traits::Signed;

#[derive(Parser, Debug)]
#[command(name = "cvmin", version, about = "Exact computation in Outer space")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stretching factors between two points in both directions.
    Dist { file: PathBuf, x: String, y: String },
    /// Displacement of an automorphism at a point.
    Displace {
        file: PathBuf,
        point: String,
        #[arg(long)]
        auto: String,
    },
    /// Least displacement over a closed simplex.
    Minimize {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        auto: String,
        #[arg(long)]
        simplex: String,
        #[arg(long, default_value = "1e-9")]
        tol: String,
    },
    /// Census of the minimally displaced simplices reachable from a seed.
    Explore {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        auto: String,
        #[arg(long, default_value = "1e-6")]
        tol: String,
        #[arg(long, default_value_t = 500)]
        limit_simplices: usize,
        #[arg(long, default_value_t = 16)]
        limit_steps: usize,
        /// Largest power used to identify orbits; defaults to twice the census size.
        #[arg(long)]
        kmax: Option<usize>,
        /// Simplex whose centre seeds the search; defaults to the rose.
        #[arg(long)]
        seed_simplex: Option<String>,
    },
    /// Uniqueness of the fixed point of a finite-order model.
    VerifyFixedPoint {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: Option<u64>,
    },
}

enum Value {
    Rat(Rational),
    Text(String),
}

impl From<Rational> for Value {
    fn from(q: Rational) -> Value {
        Value::Rat(q)
    }
}

impl From<&Rational> for Value {
    fn from(q: &Rational) -> Value {
        Value::Rat(q.clone())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Value {
        Value::Text(s)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Value {
        Value::Text(s.to_string())
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Value {
        Value::Text(n.to_string())
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Value {
        Value::Text(b.to_string())
    }
}

enum Line {
    Field(&'static str, Value),
    Row(&'static str, Vec<(&'static str, Value)>),
}

#[derive(Default)]
struct Report {
    lines: Vec<Line>,
}

impl Report {
    fn field(&mut self, key: &'static str, v: impl Into<Value>) {
        self.lines.push(Line::Field(key, v.into()));
    }

    fn row(&mut self, kind: &'static str, cols: Vec<(&'static str, Value)>) {
        self.lines.push(Line::Row(kind, cols));
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for line in &self.lines {
            match (line, format) {
                (Line::Field(k, v), Format::Text) => {
                    let _ = writeln!(out, "{k:<16}{}", text_value(v));
                }
                (Line::Field(k, v), Format::Machine) => {
                    let _ = writeln!(out, "{k}={}", machine_value(v));
                }
                (Line::Row(kind, cols), Format::Text) => {
                    let cells: Vec<String> = cols.iter().map(|(k, v)| format!("{k} {}", text_value(v))).collect();
                    let _ = writeln!(out, "  {kind:<8}{}", cells.join("  "));
                }
                (Line::Row(kind, cols), Format::Machine) => {
                    let cells: Vec<String> = cols.iter().map(|(k, v)| format!("{k}={}", machine_value(v))).collect();
                    let _ = writeln!(out, "record={kind} {}", cells.join(" "));
                }
            }
        }
        out
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::Rat(q) if q.is_integer() => fmt_rational(q),
        Value::Rat(q) => format!("{} (~{:.10})", fmt_rational(q), to_f64(q)),
        Value::Text(s) => s.clone(),
    }
}

fn machine_value(v: &Value) -> String {
    match v {
        Value::Rat(q) => fmt_rational(q),
        Value::Text(s) if s.is_empty() || s.contains(char::is_whitespace) || s.contains('"') => format!("{s:?}"),
        Value::Text(s) => s.clone(),
    }
}

fn join_rationals(qs: &[Rational]) -> String {
    qs.iter().map(fmt_rational).collect::<Vec<_>>().join(" ")
}

fn auto_images(phi: &AutoPair) -> String {
    phi.images()
        .iter()
        .enumerate()
        .map(|(i, w)| format!("{} -> {w}", (b'a' + i as u8) as char))
        .collect::<Vec<_>>()
        .join(", ")
}

fn load(path: &Path) -> Result<Workspace> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Workspace::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn load_optional(path: Option<&Path>) -> Result<Workspace> {
    path.map_or_else(|| Ok(Workspace::default()), load)
}

fn point(ws: &Workspace, name: &str) -> Result<CVPoint> {
    ws.point(name).ok_or_else(|| anyhow!("unknown point '{name}'"))
}

fn auto(ws: &Workspace, name: &str) -> Result<AutoPair> {
    ws.auto(name).ok_or_else(|| anyhow!("unknown automorphism '{name}'"))
}

fn simplex(ws: &Workspace, name: &str) -> Result<MarkedGraph> {
    ws.graph(name).ok_or_else(|| anyhow!("unknown simplex '{name}'"))
}

fn tolerance(s: &str) -> Result<Rational> {
    let tol = parse_rational(s).ok_or_else(|| anyhow!("invalid tolerance '{s}'"))?;
    if !tol.is_positive() {
        bail!("tolerance must be positive");
    }
    Ok(tol)
}

fn cmd_dist(file: &Path, x: &str, y: &str) -> Result<Report> {
    let ws = load(file)?;
    let (px, py) = (point(&ws, x)?, point(&ws, y)?);
    let xy = stretch(&px, &py).with_context(|| format!("stretch from {x} to {y}"))?;
    let yx = stretch(&py, &px).with_context(|| format!("stretch from {y} to {x}"))?;
    let mut r = Report::default();
    r.field("stretch_xy", &xy.value);
    r.field("witness_xy", xy.witness.to_string());
    r.field("stretch_yx", &yx.value);
    r.field("witness_yx", yx.witness.to_string());
    r.field("symmetric", &xy.value * &yx.value);
    Ok(r)
}

fn cmd_displace(file: &Path, name: &str, auto_name: &str) -> Result<Report> {
    let ws = load(file)?;
    let (x, phi) = (point(&ws, name)?, auto(&ws, auto_name)?);
    let image = x.act(&phi);
    let s = stretch(&x, &image).with_context(|| format!("displacement of {auto_name} at {name}"))?;
    let mut r = Report::default();
    r.field("displacement", &s.value);
    r.field("witness", s.witness.to_string());
    r.field(
        "witness_image",
        phi.apply(&s.witness.as_word()).conjugacy_class().to_string(),
    );
    Ok(r)
}

fn cmd_minimize(file: Option<&Path>, auto_name: &str, simplex_name: &str, tol: &str) -> Result<Report> {
    let ws = load_optional(file)?;
    let phi = auto(&ws, auto_name)?;
    let m = simplex(&ws, simplex_name)?;
    let tol = tolerance(tol)?;
    let res = min_displacement_on_simplex(&m, &phi, &tol).context("minimization failed")?;
    let mut r = Report::default();
    r.field("lower", &res.lower);
    r.field("upper", &res.upper);
    r.field("argmin", join_rationals(&res.argmin));
    r.field("interior", res.interior);
    r.field("active", res.active.len());
    for c in &res.active {
        r.row("active", vec![("class", c.to_string().into())]);
    }
    Ok(r)
}

fn cmd_explore(
    file: Option<&Path>,
    auto_name: &str,
    tol: &str,
    limits: ExploreLimits,
    kmax: Option<usize>,
    seed: Option<&str>,
) -> Result<Report> {
    let ws = load_optional(file)?;
    let phi = auto(&ws, auto_name)?;
    let tol = tolerance(tol)?;
    let seed_name = seed.map_or_else(|| format!("rose{}", phi.rank()), str::to_string);
    let seed = CVPoint::centre(&simplex(&ws, &seed_name)?);
    let census = explore_min_set(&seed, &phi, &tol, limits).context("exploration failed")?;
    let quotient = quotient_by_power(&census, &phi, kmax.unwrap_or(2 * census.entries.len()));
    let mut r = Report::default();
    for (i, e) in census.entries.iter().enumerate() {
        let path = if e.path.is_empty() {
            "-".to_string()
        } else {
            e.path.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
        };
        r.row(
            "simplex",
            vec![
                ("key", e.key.clone().into()),
                ("orbit", quotient.class_of[i].into()),
                ("lower", (&e.lower).into()),
                ("upper", (&e.upper).into()),
                ("steps", e.path.len().into()),
                ("path", path.into()),
            ],
        );
    }
    r.field("simplices", census.entries.len());
    r.field("orbits", quotient.len());
    r.field("best_upper", &census.best_upper);
    r.field("evaluated", census.evaluated);
    r.field("complete", census.complete);
    Ok(r)
}

fn cmd_verify(p: u64, q: Option<u64>) -> Result<(Report, bool)> {
    let model = match q {
        None => build_xp(p),
        Some(q) => build_xpq(p, q),
    }
    .context("cannot build the model")?;
    let report = verify_unique_fixed_point(&model);
    let iso = unique_isometry_representative(&model).context("isometry search failed")?;
    let mut r = Report::default();
    r.field("model", model.name.clone());
    r.field("order", model.order as usize);
    r.field("automorphism", auto_images(&model.induced));
    r.field("lengths", join_rationals(model.point.lengths()));
    for c in &report.checks {
        r.row(
            "check",
            vec![
                ("step", usize::from(c.step).into()),
                ("simplex", c.simplex.clone().into()),
                ("result", if c.passed { "ok" } else { "FAIL" }.into()),
                ("outcome", c.outcome.clone().into()),
            ],
        );
    }
    r.field("isometries", iso.count);
    match sigma(&model) {
        Ok(s) => r.field("sigma", auto_images(&s)),
        Err(_) => r.field("sigma", "undefined"),
    }
    let passed = report.passed() && iso.count == 1 && iso.matches_model_map;
    r.field("result", if passed { "PASS" } else { "FAIL" });
    Ok((r, passed))
}

fn run(cli: &Cli) -> Result<(Report, bool)> {
    match &cli.command {
        Command::Dist { file, x, y } => cmd_dist(file, x, y).map(|r| (r, true)),
        Command::Displace { file, point, auto } => cmd_displace(file, point, auto).map(|r| (r, true)),
        Command::Minimize {
            file,
            auto,
            simplex,
            tol,
        } => cmd_minimize(file.as_deref(), auto, simplex, tol).map(|r| (r, true)),
        Command::Explore {
            file,
            auto,
            tol,
            limit_simplices,
            limit_steps,
            kmax,
            seed_simplex,
        } => {
            let limits = ExploreLimits {
                max_simplices: *limit_simplices,
                max_steps: *limit_steps,
            };
            cmd_explore(file.as_deref(), auto, tol, limits, *kmax, seed_simplex.as_deref()).map(|r| (r, true))
        }
        Command::VerifyFixedPoint { p, q } => cmd_verify(*p, *q),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, passed)) => {
            print!("{}", report.render(cli.format));
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
