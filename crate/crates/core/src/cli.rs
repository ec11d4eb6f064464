//! Command-line front end.
//!
//! Exit codes: 0 pass (or a sweep with solutions), 1 fail, 2 precondition
//! violated or bad data, 64 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bundles::{realify, spinc_index, ComplexBundleData, RealBundleData};
use crate::catalog::{builtin, load, load_bundle, to_json, BundleSpec, ManifoldModel, BUILTIN_NAMES};
use crate::cohomology::expr::{parse_affine, parse_class};
use crate::criteria::{evaluate, BundleInput, CriterionKind, Inputs};
use crate::error::Error;
use crate::report::Verdict;
use crate::search::{default_periods, residue_summary, sweep, BoxSlot, Parameter, SearchSpace, SolutionSet, SweepOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "obstruct8", version, about = "Cohomological reduction criteria for 8-dimensional bundles over 8-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the ring axioms and tangent invariants of a model.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a criterion; any range flag turns this into a search.
    Check(CheckArgs),
    /// Evaluate a criterion over every point of the given ranges.
    Search(CheckArgs),
    /// Built-in models.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Index of the spin^c Dirac operator twisted by a complex bundle.
    Index {
        #[command(flatten)]
        model: ModelArgs,
        /// Chern classes c1,c2,c3,c4 as expressions.
        #[arg(long, allow_hyphen_values = true)]
        chern: String,
        #[arg(long, default_value_t = 4)]
        rank: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Show {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ModelArgs {
    /// Built-in model name.
    #[arg(long)]
    manifold: Option<String>,
    /// Manifold description file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_parser = parse_kind)]
    criterion: CriterionKind,
    /// `tangent` for the tangent bundle of the model.
    #[arg(long)]
    bundle: Option<String>,
    #[arg(long, conflicts_with = "bundle")]
    bundle_file: Option<PathBuf>,
    /// Second bundle for `iso` and `stable`.
    #[arg(long)]
    other_bundle: Option<String>,
    #[arg(long, conflicts_with = "other_bundle")]
    other_bundle_file: Option<PathBuf>,

    #[arg(long = "l", allow_hyphen_values = true)]
    l: Option<String>,
    #[arg(long = "u", allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long = "v", allow_hyphen_values = true)]
    v: Option<String>,
    #[arg(long = "w", allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long = "z", allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u_plus: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u_minus: Option<String>,

    #[arg(long, allow_hyphen_values = true)]
    k_range: Option<String>,
    #[arg(long = "l-range", allow_hyphen_values = true)]
    l_range: Option<String>,
    #[arg(long = "u-range", allow_hyphen_values = true)]
    u_range: Option<String>,
    #[arg(long = "v-range", allow_hyphen_values = true)]
    v_range: Option<String>,
    #[arg(long = "w-range", allow_hyphen_values = true)]
    w_range: Option<String>,
    #[arg(long = "z-range", allow_hyphen_values = true)]
    z_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u_plus_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u_minus_range: Option<String>,

    /// Trial periods for the residue summary, comma separated.
    #[arg(long, value_delimiter = ',')]
    summary_periods: Option<Vec<u64>>,
    /// Largest number of points a sweep may visit.
    #[arg(long, default_value_t = crate::search::DEFAULT_CAP)]
    cap: u128,
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CheckArgs {
    fn slot(&self, name: &str) -> (Option<&str>, Option<&str>) {
        let (e, r) = match name {
            "l" => (&self.l, &self.l_range),
            "u" => (&self.u, &self.u_range),
            "v" => (&self.v, &self.v_range),
            "w" => (&self.w, &self.w_range),
            "z" => (&self.z, &self.z_range),
            "u_plus" => (&self.u_plus, &self.u_plus_range),
            "u_minus" => (&self.u_minus, &self.u_minus_range),
            _ => (&None, &None),
        };
        (e.as_deref(), r.as_deref())
    }

    fn any_range(&self) -> bool {
        [
            &self.k_range,
            &self.l_range,
            &self.u_range,
            &self.v_range,
            &self.w_range,
            &self.z_range,
            &self.u_plus_range,
            &self.u_minus_range,
        ]
        .iter()
        .any(|r| r.is_some())
    }
}

fn parse_kind(s: &str) -> Result<CriterionKind, String> {
    CriterionKind::parse(s).map_err(|_| {
        let names: Vec<&str> = CriterionKind::ALL.iter().map(|k| k.name()).collect();
        format!("expected one of: {}", names.join(", "))
    })
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if code == EXIT_PASS {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate { model, out: file } => validate(&model, file.as_deref(), out),
        Command::Check(a) => check(&a, a.any_range(), out),
        Command::Search(a) => check(&a, true, out),
        Command::Catalog { action } => catalog(action, out),
        Command::Index {
            model,
            chern,
            rank,
            out: file,
        } => index(&model, &chern, rank, file.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

fn load_model(a: &ModelArgs) -> Result<ManifoldModel, Failure> {
    match (&a.manifold, &a.file) {
        (Some(n), None) => Ok(builtin(n)?.model),
        (None, Some(p)) => Ok(load(p)?),
        _ => Err(usage("give exactly one of --manifold and --file")),
    }
}

fn emit_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    std::fs::write(path, s).map_err(Error::from)?;
    Ok(())
}

fn write_text(out: &mut dyn Write, s: &str) -> Result<(), Failure> {
    out.write_all(s.as_bytes()).map_err(Error::from)?;
    Ok(())
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::PreconditionViolated => EXIT_DATA,
    }
}

fn validate(a: &ModelArgs, file: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let m = load_model(a)?;
    let rep = m.validation_report()?;
    match file {
        Some(p) => emit_json(p, &rep)?,
        None => write_text(out, &format!("{}\n{}", m.name, rep.render(Some(&m.ring))))?,
    }
    Ok(if rep.verdict.is_pass() { EXIT_PASS } else { EXIT_DATA })
}

enum Loaded {
    Real(RealBundleData),
    Complex(ComplexBundleData),
}

fn load_bundle_arg(m: &ManifoldModel, name: Option<&str>, file: Option<&Path>, want: &str) -> Result<Loaded, Failure> {
    match (name, file) {
        (Some("tangent"), None) => Ok(match want {
            "complex" => Loaded::Complex(m.tangent.chern.clone().ok_or_else(|| {
                Error::MissingInput(format!("{} declares no complex structure on its tangent bundle", m.name))
            })?),
            _ => Loaded::Real(m.tangent.as_real_bundle()),
        }),
        (Some(other), None) => Err(usage(format!("unknown bundle `{other}`; use `tangent` or a bundle file"))),
        (None, Some(p)) => Ok(match load_bundle(p, &m.ring)? {
            BundleSpec::Real(r) => Loaded::Real(r),
            BundleSpec::Complex(c) => Loaded::Complex(c),
        }),
        _ => Err(usage("this criterion needs a bundle")),
    }
}

fn as_real(m: &ManifoldModel, b: Loaded) -> Result<RealBundleData, Failure> {
    match b {
        Loaded::Real(r) => Ok(r),
        Loaded::Complex(c) => Ok(realify(&m.ring, &c)?),
    }
}

fn parse_bounds(s: &str) -> Result<(i64, i64), Failure> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| usage(format!("range `{s}` is not of the form lo..hi")))?;
    let p = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| usage(format!("range `{s}`: `{t}` is not an integer")))
    };
    let (lo, hi) = (p(lo)?, p(hi)?);
    if lo > hi {
        return Err(usage(format!("range `{s}` is empty")));
    }
    Ok((lo, hi))
}

/// Splits an optional `:stride` suffix off a class expression.
fn split_stride(src: &str) -> Result<(&str, i64), Failure> {
    match src.rsplit_once(':') {
        Some((e, s)) => {
            let n: i64 = s
                .trim()
                .parse()
                .map_err(|_| usage(format!("`{src}`: stride `{s}` is not an integer")))?;
            if n < 1 {
                return Err(usage(format!("`{src}`: stride must be positive")));
            }
            Ok((e, n))
        }
        None => Ok((src, 1)),
    }
}

fn check(a: &CheckArgs, as_search: bool, out: &mut dyn Write) -> Outcome {
    let m = load_model(&a.model)?;
    let kind = a.criterion;
    let mut base = Inputs::default();
    match kind.bundle() {
        BundleInput::None => {}
        BundleInput::Real => {
            let b = load_bundle_arg(&m, a.bundle.as_deref(), a.bundle_file.as_deref(), "real")?;
            base.xi = Some(as_real(&m, b)?);
        }
        BundleInput::RealPair => {
            let b = load_bundle_arg(&m, a.bundle.as_deref(), a.bundle_file.as_deref(), "real")?;
            base.xi = Some(as_real(&m, b)?);
            let o = load_bundle_arg(&m, a.other_bundle.as_deref(), a.other_bundle_file.as_deref(), "real")?;
            base.other = Some(as_real(&m, o)?);
        }
        BundleInput::Complex => {
            match load_bundle_arg(&m, a.bundle.as_deref(), a.bundle_file.as_deref(), "complex")? {
                Loaded::Complex(c) => base.complex = Some(c),
                Loaded::Real(_) => return Err(usage(format!("`{kind}` needs a complex bundle"))),
            }
        }
    }

    let mut k_range = match &a.k_range {
        Some(r) => Some(parse_bounds(r)?),
        None => None,
    };
    let mut stride = None;
    let mut k_slots = Vec::new();
    let mut boxes = Vec::new();
    for &(name, degree) in kind.slots() {
        let flag = name.replace('_', "-");
        match a.slot(name) {
            (Some(src), range) => {
                let (src, s) = split_stride(src)?;
                let affine = parse_affine(&m.ring, src, degree)?;
                if affine.depends_on_k() {
                    if let Some(r) = range {
                        let r = parse_bounds(r)?;
                        if k_range.is_some_and(|k| k != r) {
                            return Err(usage("conflicting ranges for k"));
                        }
                        k_range = Some(r);
                    }
                    if stride.is_some_and(|t| t != s) {
                        return Err(usage("conflicting strides for k"));
                    }
                    stride = Some(s);
                    k_slots.push((name.to_string(), affine));
                } else if range.is_some() {
                    return Err(usage(format!("--{flag}-range given but --{flag} does not mention k")));
                } else {
                    base.classes.insert(name.to_string(), affine.base);
                }
            }
            (None, Some(r)) => {
                let rank = m.ring.group(degree).free_rank;
                let parts: Vec<&str> = r.split(',').collect();
                let bounds = if parts.len() == 1 {
                    vec![parse_bounds(parts[0])?; rank]
                } else if parts.len() == rank {
                    parts.iter().map(|p| parse_bounds(p)).collect::<Result<_, _>>()?
                } else {
                    return Err(usage(format!(
                        "--{flag}-range has {} ranges for free rank {rank}",
                        parts.len()
                    )));
                };
                boxes.push(BoxSlot {
                    name: name.to_string(),
                    degree,
                    bounds,
                    include_torsion: true,
                });
            }
            (None, None) => return Err(usage(format!("`{kind}` needs --{flag}"))),
        }
    }
    let parameter = match (k_range, k_slots.is_empty()) {
        (Some((lo, hi)), false) => Some(Parameter {
            lo,
            hi,
            stride: stride.unwrap_or(1),
            slots: k_slots,
        }),
        (None, false) => return Err(usage("a class mentions k but no range for k was given")),
        (Some(_), true) => return Err(usage("--k-range given but no class mentions k")),
        (None, true) => None,
    };

    if !as_search {
        let rep = evaluate(kind, &m, &base)?;
        match &a.out {
            Some(p) => emit_json(p, &rep)?,
            None => write_text(out, &rep.render(Some(&m.ring)))?,
        }
        return Ok(verdict_code(rep.verdict));
    }

    let space = SearchSpace { parameter, boxes };
    let opts = SweepOptions {
        cap: a.cap,
        parallel: !a.serial,
    };
    let mut sol = sweep(kind, &m, &base, &space, opts)?;
    let mut summary_note = None;
    if sol.window.is_some() && sol.stride == 1 {
        let periods = a
            .summary_periods
            .clone()
            .unwrap_or_else(|| default_periods(kind.max_modulus()));
        match residue_summary(sol.clone(), &periods) {
            Ok(s) => sol = s,
            Err(e @ Error::WindowTooSmall { .. }) => summary_note = Some(e.to_string()),
            Err(e) => return Err(e.into()),
        }
        if sol.summary.is_none() && summary_note.is_none() {
            summary_note = Some("no trial period fits the window".into());
        }
    }
    match &a.out {
        Some(p) => emit_json(p, &sol)?,
        None => write_text(out, &render_solutions(&m, &sol, summary_note.as_deref()))?,
    }
    Ok(if !sol.solutions.is_empty() {
        EXIT_PASS
    } else if sol.points > 0 && sol.errors.len() as u128 == sol.points {
        EXIT_DATA
    } else {
        EXIT_FAIL
    })
}

fn render_solutions(m: &ManifoldModel, sol: &SolutionSet, note: Option<&str>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} on {}: {} points, {} solutions, {} errors",
        sol.criterion,
        m.name,
        sol.points,
        sol.solutions.len(),
        sol.errors.len()
    );
    for p in &sol.solutions {
        let ws: Vec<String> = p
            .witnesses
            .iter()
            .map(|(n, c)| format!("{n} = {}", m.ring.display(c)))
            .collect();
        match p.k {
            Some(k) => {
                let _ = writeln!(s, "  k = {k}: {}", ws.join(", "));
            }
            None => {
                let _ = writeln!(s, "  {}", ws.join(", "));
            }
        }
    }
    for e in &sol.errors {
        let k = e.k.map(|k| format!("k = {k}: ")).unwrap_or_default();
        let _ = writeln!(s, "  error at {k}{}", e.error);
    }
    if let Some(sum) = &sol.summary {
        let _ = writeln!(s, "summary: {}", sum.render());
    }
    if let Some(n) = note {
        let _ = writeln!(s, "summary unavailable: {n}");
    }
    s
}

fn catalog(action: CatalogAction, out: &mut dyn Write) -> Outcome {
    match action {
        CatalogAction::List => {
            let mut s = String::new();
            for name in BUILTIN_NAMES {
                let e = builtin(name)?;
                let r = &e.model.ring;
                let ranks: Vec<String> = [2, 4, 6].iter().map(|&d| r.group(d).free_rank.to_string()).collect();
                let mut flags = Vec::new();
                if e.model.flags.partial {
                    flags.push("partial");
                }
                if e.model.flags.unverified_source {
                    flags.push("unverified-source");
                }
                let _ = writeln!(
                    s,
                    "{name:8} b2,b4,b6 = {}  chi = {}{}",
                    ranks.join(","),
                    e.model.tangent.chi,
                    if flags.is_empty() { String::new() } else { format!("  [{}]", flags.join(", ")) }
                );
            }
            write_text(out, &s)?;
        }
        CatalogAction::Show { name, out: file } => {
            let e = builtin(&name)?;
            if let Some(p) = file {
                let mut j = to_json(&e.model)?;
                j.push('\n');
                std::fs::write(p, j).map_err(Error::from)?;
                return Ok(EXIT_PASS);
            }
            let m = &e.model;
            let r = &m.ring;
            let t = &m.tangent;
            let mut s = String::new();
            let _ = writeln!(s, "{}", m.name);
            for d in [2, 4, 6, 8] {
                let g = r.group(d);
                let tors: Vec<String> = g.torsion.iter().map(|o| format!("Z/{o}")).collect();
                let _ = writeln!(
                    s,
                    "  H^{d}: rank {}{}  generators {}",
                    g.free_rank,
                    if tors.is_empty() { String::new() } else { format!(" + {}", tors.join(" + ")) },
                    r.generator_names(d).join(", ")
                );
            }
            let _ = writeln!(s, "  c = {}  w2 = {}", r.display(&t.c), r.display_mod2(&t.w2));
            let _ = writeln!(s, "  p1 = {}  p2 = {}  e = {}", r.display(&t.p1), r.display(&t.p2), r.display(&t.e));
            let _ = writeln!(s, "  chi = {}", t.chi);
            if let Some(sig) = &t.signature {
                let _ = writeln!(s, "  signature = {sig}");
            }
            if let Some(z) = &t.chern {
                let cs: Vec<String> = z.classes().iter().map(|c| r.display(c)).collect();
                let _ = writeln!(s, "  chern = ({})", cs.join(", "));
            }
            for x in &e.expected {
                let _ = writeln!(s, "  expect {} [{}]: {}", x.criterion, x.setting, x.outcome);
            }
            write_text(out, &s)?;
        }
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct IndexOutput {
    manifold: String,
    rank: usize,
    #[serde(with = "crate::serde_int::rational")]
    index: num_rational::BigRational,
    integral: bool,
}

fn index(a: &ModelArgs, chern: &str, rank: usize, file: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let m = load_model(a)?;
    let parts: Vec<&str> = chern.split(',').collect();
    if parts.len() != 4 {
        return Err(usage("--chern takes four comma-separated classes c1,c2,c3,c4"));
    }
    let cs: Vec<_> = parts
        .iter()
        .zip([2, 4, 6, 8])
        .map(|(p, d)| parse_class(&m.ring, p, d))
        .collect::<Result<_, _>>()?;
    let [c1, c2, c3, c4]: [_; 4] = cs.try_into().expect("four classes");
    let z = ComplexBundleData::new(rank, c1, c2, c3, c4)?;
    let ind = spinc_index(&m.ring, &z, &m.tangent)?;
    let integral = ind.is_integer();
    match file {
        Some(p) => emit_json(
            p,
            &IndexOutput {
                manifold: m.name.clone(),
                rank,
                index: ind.clone(),
                integral,
            },
        )?,
        None => write_text(
            out,
            &format!(
                "{}: index = {ind}{}\n",
                m.name,
                if integral { "" } else { "  (not an integer)" }
            ),
        )?,
    }
    Ok(if integral { EXIT_PASS } else { EXIT_FAIL })
}
