//! The `pm` command line.
//!
//! Every command reads its formula from `--kind` (a generated
//! formulation), `--formula` (text over `--order`), or a `vars ... .`
//! document on stdin. `--json` writes a versioned artifact that records the
//! command's configuration and seed; identical invocations produce
//! identical bytes unless `--wall-clock` asks for timing.
//!
//! Exit codes: 0 success, 1 other failure (including a counterexample from
//! `check-equiv`), 2 usage, 3 resource limit, 4 well-orientedness.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cad::{
    adjacency_2d, build_cad, path_query, plot_2d, qe, truth_evaluate, CadMode, CadOptions, Limits, PlotFormat,
    PlotWindow, QeOptions,
};
use crate::error::{CadError, Result};
use crate::formula::{
    parse_document, parse_formula, parse_poly, sample_equivalent, BoundSearch, Formula, Sampler, Verdict,
};
use crate::heuristics::{report, suggest_order_within, RankedOrder};
use crate::pianomovers::{gen_wang, generate, Corridor, Formulation, Kind, Length, ProblemSpec, WangVariant};
use crate::poly::{Poly, Rat, VarOrder};
use crate::projection::project_all;

pub const SCHEMA: &str = "pmcad/1";

#[derive(Parser, Debug, Serialize)]
#[command(name = "pm", version, about = "CAD and quantifier elimination for the ladder in a corridor")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "PM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for projection and lifting (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub limit_cells: usize,
    /// Time limit in seconds.
    #[arg(long, global = true, default_value_t = 600)]
    pub limit_secs: u64,
    /// Write a JSON artifact to PATH, or to stdout when PATH is omitted or `-`.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-", value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Record elapsed time in artifacts (makes them non-reproducible).
    #[arg(long, global = true)]
    pub wall_clock: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Print a generated formulation as a `vars ... .` document.
    Gen(Source),
    /// Projection factors level by level.
    Project(CadArgs),
    /// Build a CAD of polynomials (or of a formula's atoms, with truth values).
    Cad(CadArgs),
    /// Eliminate quantifiers.
    Qe(QeArgs),
    /// Complexity measures of a formulation under an order.
    Score(ScoreArgs),
    /// Draw a two-variable CAD.
    Plot(PlotArgs),
    /// Connect two points inside a two-variable region.
    Path(PathArgs),
    /// Compare two formulas on seeded sample points.
    CheckEquiv(EquivArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorridorArg {
    Right,
    Obtuse,
    Acute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WangArg {
    Full,
    DropSecondInnerWall,
    DropInnerSigns,
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct Source {
    /// Generated formulation (davenport, wang, wang_simplified, yangzeng,
    /// invalid_t, valid_full, single_endpoint, obtuse_invalid,
    /// acute_invalid, obtuse_wang, acute_wang).
    #[arg(long, visible_alias = "formulation")]
    pub kind: Option<String>,
    /// Ladder length; symbolic when omitted.
    #[arg(long)]
    pub length: Option<String>,
    #[arg(long, value_enum)]
    pub corridor: Option<CorridorArg>,
    /// Tangent of the corridor angle.
    #[arg(long, default_value = "1")]
    pub tan: String,
    #[arg(long, value_enum)]
    pub wang: Option<WangArg>,
    /// Formula text over `--order`.
    #[arg(long)]
    pub formula: Option<String>,
    /// Comma-separated variable order (reorders generated formulations).
    #[arg(long)]
    pub order: Option<String>,
    /// Variables to quantify existentially, if not already bound.
    #[arg(long, value_delimiter = ',')]
    pub quantified: Vec<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CadArgs {
    #[command(flatten)]
    pub source: Source,
    /// Polynomial (repeatable); replaces the formula source.
    #[arg(long = "poly")]
    pub polys: Vec<String>,
    /// Equational constraint for reduced projection.
    #[arg(long)]
    pub ec: Option<String>,
    /// Keep only cells of dimension at least K.
    #[arg(long, value_name = "K")]
    pub layered: Option<usize>,
    /// Keep only the sections of the equational constraint (default: the
    /// first polynomial).
    #[arg(long)]
    pub manifold_ec: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QeArgs {
    #[command(flatten)]
    pub source: Source,
    /// Equational constraint (default: the length equation of Wang-style
    /// formulations).
    #[arg(long)]
    pub ec: Option<String>,
    /// Lift every quantified stack completely.
    #[arg(long)]
    pub no_partial: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub source: Source,
    /// Also rank all variable orders by projection size.
    #[arg(long)]
    pub suggest: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long = "poly")]
    pub polys: Vec<String>,
    #[arg(long, value_enum, default_value = "ppm")]
    pub fmt: FmtArg,
    /// Image file; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', num_args = 1, default_values_t = [-7.0, 2.0], allow_negative_numbers = true)]
    pub x_range: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1, default_values_t = [-2.0, 7.0], allow_negative_numbers = true)]
    pub y_range: Vec<f64>,
    #[arg(long, default_value_t = 0.025)]
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FmtArg {
    Ppm,
    Svg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PathArgs {
    #[command(flatten)]
    pub source: Source,
    /// Start point `x,y` (rationals).
    #[arg(long, allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, allow_hyphen_values = true)]
    pub to: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EquivArgs {
    /// Left formula text, or a `vars ... .` document.
    #[arg(long)]
    pub left: String,
    #[arg(long)]
    pub right: String,
    /// Order for formula texts (documents carry their own).
    #[arg(long)]
    pub order: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Sampling box half-width.
    #[arg(long, default_value = "8")]
    pub radius: String,
}

/// Maps an engine error to the process exit code.
pub fn exit_code(e: &CadError) -> i32 {
    match e {
        CadError::Usage(_) | CadError::Syntax { .. } | CadError::UnknownVariable(_) | CadError::Unassigned(_) => 2,
        CadError::PointNotFree(_) => 2,
        CadError::ResourceLimit(_) => 3,
        CadError::NotWellOriented { .. } => 4,
        CadError::Nullified | CadError::Io(_) => 1,
    }
}

/// Runs `pm` with explicit streams; returns the exit code.
pub fn main_with<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    if let Some(n) = cli.common.threads {
        // the global pool can be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = run(&cli, stdin, out);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "pm: {e}");
            exit_code(&e)
        }
    }
}

fn io(e: std::io::Error) -> CadError {
    CadError::Io(e.to_string())
}

fn rational(s: &str) -> Result<Rat> {
    s.trim().parse::<Rat>().map_err(|_| CadError::Usage(format!("'{s}' is not a rational number")))
}

fn point(s: &str) -> Result<(Rat, Rat)> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [x, y] => Ok((rational(x)?, rational(y)?)),
        _ => Err(CadError::Usage(format!("expected a point 'x,y', got '{s}'"))),
    }
}

fn read_stdin(stdin: &mut dyn Read) -> Result<String> {
    let mut s = String::new();
    stdin.read_to_string(&mut s).map_err(io)?;
    Ok(s)
}

/// A formula together with its order and bound variables.
struct Loaded {
    formula: Formula,
    order: VarOrder,
    quantified: Vec<usize>,
    kind: Option<Kind>,
    /// Equational constraint of a generated formulation.
    ec: Option<Poly>,
}

impl Source {
    fn spec(&self, kind: Kind) -> Result<ProblemSpec> {
        let tan = rational(&self.tan)?;
        let corridor = match (self.corridor, kind) {
            (Some(CorridorArg::Right), _) => Corridor::RightAngle,
            (Some(CorridorArg::Obtuse), _) | (None, Kind::ObtuseInvalid | Kind::ObtuseWang) => Corridor::Obtuse(tan),
            (Some(CorridorArg::Acute), _) | (None, Kind::AcuteInvalid | Kind::AcuteWang) => Corridor::Acute(tan),
            (None, _) => Corridor::RightAngle,
        };
        let length = match &self.length {
            Some(s) => Length::Value(rational(s)?),
            None => Length::Symbolic,
        };
        Ok(ProblemSpec { length, corridor })
    }

    fn formulation(&self, kind: Kind) -> Result<Formulation> {
        let spec = self.spec(kind)?;
        match (kind, self.wang) {
            (Kind::Wang, Some(WangArg::DropSecondInnerWall)) => gen_wang(&spec, WangVariant::DropSecondInnerWall),
            (Kind::Wang, Some(WangArg::DropInnerSigns)) => gen_wang(&spec, WangVariant::DropInnerSigns),
            (_, Some(_)) if kind != Kind::Wang => Err(CadError::Usage("--wang applies to --kind wang only".into())),
            _ => generate(kind, &spec),
        }
    }

    fn load(&self, stdin: &mut dyn Read) -> Result<Loaded> {
        let order = self.order.as_deref().map(VarOrder::parse).transpose()?;
        let mut ec = None;
        let (formula, order, kind) = match (&self.kind, &self.formula) {
            (Some(_), Some(_)) => return Err(CadError::Usage("give either --kind or --formula".into())),
            (Some(k), None) => {
                let kind: Kind = k.parse()?;
                let mut f = self.formulation(kind)?;
                if let Some(o) = &order {
                    f = f.reorder(o)?;
                }
                ec = f.equational_constraint();
                (f.formula, f.order, Some(kind))
            }
            (None, Some(text)) => {
                let o = order.ok_or_else(|| CadError::Usage("--formula needs --order".into()))?;
                (parse_formula(text, &o)?, o, None)
            }
            (None, None) => {
                let (o, f) = parse_document(&read_stdin(stdin)?)?;
                match order {
                    Some(new) => {
                        let g = Formulation { kind: Kind::Davenport, quantified: vec![], formula: f, order: o };
                        let g = g.reorder(&new)?;
                        (g.formula, g.order, None)
                    }
                    None => (f, o, None),
                }
            }
        };
        let mut formula = formula;
        let bound = formula.bound_vars();
        for name in self.quantified.iter().rev() {
            let v = order.index_of(name).ok_or_else(|| CadError::UnknownVariable(name.clone()))?;
            if !bound.contains(&v) {
                formula = Formula::exists(v, formula);
            }
        }
        let mut quantified = formula.bound_vars();
        quantified.sort_unstable();
        quantified.dedup();
        Ok(Loaded { formula, order, quantified, kind, ec })
    }
}

struct Emitter<'a> {
    common: &'a Common,
    config: Value,
    start: Instant,
}

impl Emitter<'_> {
    /// Writes the JSON artifact if requested; returns whether it went to stdout.
    fn artifact(&self, out: &mut dyn Write, result: Value) -> Result<bool> {
        let Some(path) = &self.common.json else { return Ok(false) };
        let mut doc = json!({
            "schema": SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.common.seed,
            "config": self.config,
            "result": result,
        });
        if self.common.wall_clock {
            doc["elapsed_ms"] = json!(self.start.elapsed().as_millis() as u64);
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("artifact serializes");
        text.push('\n');
        if path.as_os_str() == "-" {
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(true)
        } else {
            fs::write(path, text).map_err(io)?;
            Ok(false)
        }
    }
}

fn limits(c: &Common) -> Limits {
    Limits { max_cells: c.limit_cells, time: Some(Duration::from_secs(c.limit_secs)) }
}

/// Order ranking under a wall-clock budget. A single projection cannot be
/// interrupted, so the ranking runs on its own thread, which is abandoned on
/// timeout (the process exits right after).
fn rank_orders(ps: Vec<Poly>, order: VarOrder, time: Option<Duration>) -> Result<Vec<RankedOrder>> {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(suggest_order_within(&ps, &order, None, time));
    });
    match time {
        Some(t) => rx
            .recv_timeout(t)
            .unwrap_or_else(|_| Err(CadError::ResourceLimit(format!("order ranking exceeded {}s", t.as_secs())))),
        None => rx.recv().expect("ranking thread reports"),
    }
}

fn check_limits(c: &Common) -> Result<()> {
    if c.limit_cells == 0 || c.limit_secs == 0 {
        return Err(CadError::Usage("limits must be positive".into()));
    }
    Ok(())
}

fn polys_of(texts: &[String], source: &Source, stdin: &mut dyn Read) -> Result<(Vec<Poly>, VarOrder, Option<Formula>)> {
    if texts.is_empty() {
        let l = source.load(stdin)?;
        if !l.quantified.is_empty() {
            return Err(CadError::Usage("formula is quantified; use qe".into()));
        }
        let ps = crate::heuristics::distinct_polys(l.formula.polys().into_iter().map(|p| p.with_nvars(l.order.len())));
        return Ok((ps, l.order, Some(l.formula)));
    }
    let order =
        VarOrder::parse(source.order.as_deref().ok_or_else(|| CadError::Usage("--poly needs --order".into()))?)?;
    let ps = texts.iter().map(|t| parse_poly(t, &order)).collect::<Result<Vec<_>>>()?;
    Ok((ps, order, None))
}

fn run(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32> {
    check_limits(&cli.common)?;
    let em = Emitter {
        common: &cli.common,
        config: serde_json::to_value(&cli.command).expect("config serializes"),
        start: Instant::now(),
    };
    match &cli.command {
        Command::Gen(src) => {
            let l = src.load(stdin)?;
            let doc = format!("vars {}.\n{}.\n", l.order.names().join(", "), l.formula.to_text(&l.order));
            let to_stdout = em.artifact(
                out,
                json!({
                    "kind": l.kind.map(|k| k.name()),
                    "order": l.order.names(),
                    "quantified": l.quantified.iter().map(|&v| l.order.name(v)).collect::<Vec<_>>(),
                    "formula": l.formula.to_text(&l.order),
                }),
            )?;
            if !to_stdout {
                out.write_all(doc.as_bytes()).map_err(io)?;
            }
        }
        Command::Project(a) => {
            let (ps, order, _) = polys_of(&a.polys, &a.source, stdin)?;
            let ec = a.ec.as_deref().map(|e| parse_poly(e, &order)).transpose()?;
            let seq = project_all(&ps, &order, ec.as_ref())?;
            let counts: Vec<usize> = seq.levels.iter().map(|l| l.factors.len()).collect();
            let to_stdout =
                em.artifact(out, json!({ "order": order.names(), "levels": seq.to_json(), "counts": counts }))?;
            if !to_stdout {
                out.write_all(seq.dump().as_bytes()).map_err(io)?;
            }
        }
        Command::Cad(a) => {
            let (ps, order, formula) = polys_of(&a.polys, &a.source, stdin)?;
            let mut ec = a.ec.as_deref().map(|e| parse_poly(e, &order)).transpose()?;
            if a.manifold_ec && ec.is_none() {
                ec = Some(
                    ps.first().cloned().ok_or_else(|| CadError::Usage("--manifold-ec needs a polynomial".into()))?,
                );
            }
            let mode = match (a.layered, a.manifold_ec) {
                (Some(_), true) => return Err(CadError::Usage("--layered and --manifold-ec are exclusive".into())),
                (Some(k), false) => CadMode::Layered(k),
                (None, true) => CadMode::Manifold,
                (None, false) => CadMode::Full,
            };
            let seq = project_all(&ps, &order, ec.as_ref())?;
            let mut tree = build_cad(&seq, &CadOptions { mode, limits: limits(&cli.common) })?;
            if let Some(f) = &formula {
                truth_evaluate(&mut tree, f)?;
            }
            let profile: Vec<Vec<usize>> = (0..order.len()).map(|d| tree.stack_profile(d)).collect();
            let mut result = serde_json::to_value(tree.to_json()).expect("cad serializes");
            result["cell_count"] = json!(tree.cell_count());
            let to_stdout = em.artifact(out, result)?;
            if !to_stdout {
                writeln!(out, "{} cells over {}", tree.cell_count(), order.names().join(", ")).map_err(io)?;
                for (d, p) in profile.iter().enumerate() {
                    writeln!(out, "  stacks over level {d}: {p:?}").map_err(io)?;
                }
            }
        }
        Command::Qe(a) => {
            let l = a.source.load(stdin)?;
            let opts = QeOptions {
                ec: match &a.ec {
                    Some(e) => Some(parse_poly(e, &l.order)?),
                    None => l.ec.clone(),
                },
                partial: !a.no_partial,
                limits: limits(&cli.common),
            };
            let r = qe(&l.formula, &l.order, &opts)?;
            let text = r.formula.to_text(&l.order);
            let free: Vec<&str> =
                (0..l.order.len()).filter(|v| !l.quantified.contains(v)).map(|v| l.order.name(v)).collect();
            let to_stdout = em.artifact(
                out,
                json!({
                    "order": l.order.names(),
                    "free": free,
                    "formula": text,
                    "cells": r.tree.total_cells(),
                }),
            )?;
            if !to_stdout {
                writeln!(out, "{text}").map_err(io)?;
            }
        }
        Command::Score(a) => {
            let l = a.source.load(stdin)?;
            let rep = report(&l.formula, &l.order, &l.quantified)?;
            let ranking = if a.suggest {
                let ps = crate::heuristics::distinct_polys(
                    l.formula.polys().into_iter().map(|p| p.with_nvars(l.order.len())),
                );
                Some(rank_orders(ps, l.order.clone(), limits(em.common).time)?)
            } else {
                None
            };
            let mut result = serde_json::to_value(&rep).expect("report serializes");
            if let Some(r) = &ranking {
                result["ranking"] = serde_json::to_value(r).expect("ranking serializes");
            }
            let to_stdout = em.artifact(out, result)?;
            if !to_stdout {
                writeln!(
                    out,
                    "order {}: sotd {} (full projection {}), ndrr {}, sowtd {}",
                    rep.order.join(","),
                    rep.sotd_input,
                    rep.sotd_full_projection,
                    rep.ndrr,
                    rep.sowtd
                )
                .map_err(io)?;
                for r in ranking.iter().flatten() {
                    writeln!(out, "  {}: {} / {}", r.order.join(","), r.sotd_full_projection, r.ndrr).map_err(io)?;
                }
            }
        }
        Command::Plot(a) => {
            let (ps, order, formula) = polys_of(&a.polys, &a.source, stdin)?;
            let seq = project_all(&ps, &order, None)?;
            let mut tree = build_cad(&seq, &CadOptions { mode: CadMode::Full, limits: limits(&cli.common) })?;
            if let Some(f) = &formula {
                truth_evaluate(&mut tree, f)?;
            }
            if a.x_range.len() != 2 || a.y_range.len() != 2 {
                return Err(CadError::Usage("ranges are 'lo,hi'".into()));
            }
            let w = PlotWindow { x: (a.x_range[0], a.x_range[1]), y: (a.y_range[0], a.y_range[1]), step: a.step };
            let raster = plot_2d(&tree, &w)?;
            let fmt = match a.fmt {
                FmtArg::Ppm => PlotFormat::Ppm,
                FmtArg::Svg => PlotFormat::Svg,
            };
            let bytes = raster.encode(fmt);
            match &a.out {
                Some(p) => fs::write(p, &bytes).map_err(io)?,
                None if cli.common.json.as_deref().map(|p| p.as_os_str() == "-") == Some(true) => {
                    return Err(CadError::Usage("plot to stdout and --json to stdout conflict; give --out".into()))
                }
                None => out.write_all(&bytes).map_err(io)?,
            }
            em.artifact(
                out,
                json!({ "width": raster.width, "height": raster.height, "colours": raster.distinct_colours() }),
            )?;
        }
        Command::Path(a) => {
            let l = a.source.load(stdin)?;
            if l.order.len() != 2 {
                return Err(CadError::Usage("paths need a two-variable formula".into()));
            }
            let f = if l.quantified.is_empty() {
                l.formula.clone()
            } else {
                qe(&l.formula, &l.order, &QeOptions { limits: limits(&cli.common), ..Default::default() })?.formula
            };
            let ps = crate::heuristics::distinct_polys(f.polys().into_iter().map(|p| p.with_nvars(2)));
            let mut tree = build_cad(
                &project_all(&ps, &l.order, None)?,
                &CadOptions { mode: CadMode::Full, limits: limits(&cli.common) },
            )?;
            truth_evaluate(&mut tree, &f)?;
            let g = adjacency_2d(&tree)?;
            let (s, t) = (point(&a.from)?, point(&a.to)?);
            let w = path_query(&tree, &g, &f, (&s.0, &s.1), (&t.0, &t.1))?;
            let result = match &w {
                Some(w) => json!({
                    "connected": true,
                    "cells": w.cells,
                    "polyline": w.polyline.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect::<Vec<_>>(),
                }),
                None => json!({ "connected": false }),
            };
            let to_stdout = em.artifact(out, result)?;
            if !to_stdout {
                match &w {
                    Some(w) => {
                        let pts: Vec<String> = w.polyline.iter().map(|(x, y)| format!("({x}, {y})")).collect();
                        writeln!(out, "connected through {} cells: {}", w.cells.len(), pts.join(" -> ")).map_err(io)?;
                    }
                    None => writeln!(out, "not connected").map_err(io)?,
                }
            }
        }
        Command::CheckEquiv(a) => {
            let order = a.order.as_deref().map(VarOrder::parse).transpose()?;
            let load = |s: &str| -> Result<(VarOrder, Formula)> {
                if s.trim_start().starts_with("vars") {
                    parse_document(s)
                } else {
                    let o = order.clone().ok_or_else(|| CadError::Usage("formula text needs --order".into()))?;
                    Ok((o.clone(), parse_formula(s, &o)?))
                }
            };
            let (ol, fl) = load(&a.left)?;
            let (or, fr) = load(&a.right)?;
            if ol != or {
                return Err(CadError::Usage("both sides must use the same variable order".into()));
            }
            let r = rational(&a.radius)?;
            let sampler = Sampler::new(cli.common.seed).with_box(-r.clone(), r);
            let verdict = sample_equivalent(&fl, &fr, &sampler, a.samples, &BoundSearch::default())?;
            let (result, code) = match &verdict {
                Verdict::NoCounterexample(n) => (json!({ "equivalent": true, "checked": n }), 0),
                Verdict::Counterexample(p) => {
                    let pt: Vec<Value> =
                        p.iter().map(|c| c.as_ref().map_or(Value::Null, |q| json!(q.to_string()))).collect();
                    (json!({ "equivalent": false, "counterexample": pt }), 1)
                }
            };
            let to_stdout = em.artifact(out, result.clone())?;
            if !to_stdout {
                match verdict {
                    Verdict::NoCounterexample(n) => writeln!(out, "no counterexample in {n} points").map_err(io)?,
                    Verdict::Counterexample(_) => {
                        writeln!(out, "counterexample: {}", result["counterexample"]).map_err(io)?
                    }
                }
            }
            return Ok(code);
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("pm").chain(args.iter().copied());
        let code = main_with(argv, &mut stdin.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
    }

    #[test]
    fn circle_cad_json() {
        let (code, out, _) = pm(&["cad", "--poly", "x^2+y^2-1", "--order", "x,y", "--json"], "");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["cells"].as_array().unwrap().len(), 13);
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["seed"], 0);
    }

    #[test]
    fn gen_pipes_into_qe() {
        let (code, doc, _) = pm(&["gen", "--kind", "yangzeng"], "");
        assert_eq!(code, 0);
        assert!(doc.starts_with("vars L, x."));
        let (code, out, _) = pm(&["qe", "--order", "L,x", "--quantified", "x"], &doc);
        assert_eq!(code, 0, "{out}");
        let o = VarOrder::parse("L").unwrap();
        let got = parse_formula(out.trim(), &o).unwrap();
        let want = parse_formula("L^2 - 8 < 0 \\/ L < 0", &o).unwrap();
        let v = sample_equivalent(&got, &want, &Sampler::new(1), 2000, &BoundSearch::default()).unwrap();
        assert!(v.passed(), "{v:?}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(pm(&["qe", "--kind", "no_such_kind"], "").0, 2);
        assert_eq!(pm(&["frobnicate"], "").0, 2);
        assert_eq!(pm(&["cad", "--poly", "x^2+y^2-1", "--order", "x,y", "--limit-cells", "5"], "").0, 3);
        assert_eq!(pm(&["cad", "--poly", "t^2-x*z-y*w", "--order", "x,y,w,z,t"], "").0, 4);
        assert_eq!(pm(&["cad", "--poly", "x^2+", "--order", "x"], "").0, 2);
        assert_eq!(pm(&["--help"], "").0, 0);
    }

    #[test]
    fn seed_is_recorded() {
        let (code, out, _) = pm(&["score", "--kind", "yangzeng", "--order", "x,L", "--json", "--seed", "7"], "");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["seed"], 7);
        assert_eq!(v["result"]["sowtd"], 22.0);
        assert_eq!(v["result"]["quantified"], json!(["x"]));
    }

    #[test]
    fn check_equiv_reports_counterexamples() {
        let (code, out, _) =
            pm(&["check-equiv", "--left", "x^2 < 4", "--right", "x < 2 /\\ x > -2", "--order", "x"], "");
        assert_eq!(code, 0, "{out}");
        let (code, _, _) =
            pm(&["check-equiv", "--left", "x^2 <= 4", "--right", "x < 2 /\\ x > -2", "--order", "x"], "");
        assert_eq!(code, 1);
    }

    #[test]
    fn path_through_corridor() {
        let f = "[x <= 0 /\\ y >= 0 /\\ [x >= -1 \\/ y <= 1]]";
        let (code, out, err) =
            pm(&["path", "--formula", f, "--order", "x,y", "--from", "-5,1/2", "--to", "-1/2,5"], "");
        assert_eq!(code, 0, "{err}");
        assert!(out.starts_with("connected"), "{out}");
    }

    #[test]
    fn svg_plot() {
        let (code, out, err) = pm(
            &[
                "plot",
                "--poly",
                "x^2+y^2-1",
                "--order",
                "x,y",
                "--fmt",
                "svg",
                "--x-range=-2,2",
                "--y-range=-2,2",
                "--step",
                "0.25",
            ],
            "",
        );
        assert_eq!(code, 0, "{err}");
        assert!(out.starts_with("<svg"));
    }
}
