/// stdout writes that tolerate a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

mod corpus;
mod input;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use zxverify::diagram::{Diagram, Valuation};
use zxverify::flow::{
    extract_circuit, find_flow, is_circuit_like, CircuitLike, CircuitMode, DeterminismConfig, ExtractError,
    verify_determinism_with,
};
use zxverify::mbqc::{check_wellformed, geometry, Pattern};
use zxverify::phase::{AngleAssignment, DEFAULT_PROBES};
use zxverify::rewrite::{apply, check_rule_soundness, find_matches, simplify, RewriteTrace, RuleId, Strategy};
use zxverify::semantics::{branch_maps, eval_matrix, eval_superop, DEFAULT_SIGNAL_BOUND};

use input::{input_error, load, Input, InputError};

#[derive(Parser, Debug)]
#[command(name = "zxverify", version, about = "ZX-calculus rewriting and MBQC pattern verification")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Up-to-scalar tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Angle probes; each symbol is set to probe + 0.37·k.
    #[arg(long, global = true, value_delimiter = ',', env = "ZXVERIFY_PROBES")]
    probes: Vec<f64>,
    #[arg(long, global = true, default_value_t = DEFAULT_SIGNAL_BOUND)]
    signal_bound: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Echo the canonical form of a pattern or diagram.
    Parse { input: Option<PathBuf> },
    /// Well-formedness of a pattern, or validity of a diagram.
    Check { input: Option<PathBuf> },
    /// Geometry and flow of a pattern; circuit-likeness of a diagram.
    Flow {
        input: Option<PathBuf>,
        /// Use the weak circuit-like conditions for diagrams.
        #[arg(long)]
        weak: bool,
    },
    /// Determinism report for a pattern, or for every pattern in a corpus.
    Verify {
        #[arg(required_unless_present = "corpus")]
        input: Option<PathBuf>,
        /// Corpus directory; the bundled one when no path is given.
        #[arg(long, num_args = 0..=1, default_missing_value = corpus::BUNDLED)]
        corpus: Option<PathBuf>,
    },
    /// Branch maps of a pattern, or the matrix of a diagram.
    Eval {
        input: Option<PathBuf>,
        /// `positive`, `all`, or a valuation such as `2=1,3=0`.
        #[arg(long, default_value = "positive")]
        branch: String,
        /// Kraus-sum superoperator over all branches.
        #[arg(long)]
        superop: bool,
    },
    /// Circuit read off the flow of a proved-deterministic pattern.
    Extract {
        input: Option<PathBuf>,
        /// Rewrite CZ gates as CX conjugated by H.
        #[arg(long)]
        cx: bool,
    },
    /// Apply one rule at a match site, or a strategy to fixpoint.
    Rewrite {
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "strategy", required_unless_present = "strategy")]
        rule: Option<String>,
        /// Index into the rule's matches.
        #[arg(long, default_value_t = 0, requires = "rule")]
        site: usize,
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Random-instance soundness check of the rewrite rules.
    Soundness {
        /// Restrict to one rule, e.g. `bialgebra-dual`.
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

impl Opts {
    fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(input_error(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.probes.iter().any(|p| !p.is_finite()) {
            return Err(input_error("--probes must be finite"));
        }
        Ok(())
    }

    fn probes(&self) -> Vec<f64> {
        if self.probes.is_empty() {
            DEFAULT_PROBES.to_vec()
        } else {
            self.probes.clone()
        }
    }

    fn determinism(&self) -> DeterminismConfig {
        DeterminismConfig {
            probes: self.probes(),
            tol: self.tol,
            signal_bound: self.signal_bound,
        }
    }

    /// Angles at the first probe.
    fn angles(&self, symbols: &BTreeSet<String>) -> AngleAssignment {
        AngleAssignment::from_probe(symbols.iter().map(String::as_str), self.probes()[0])
    }
}

/// Process exit status: 0 success, 1 negative result, 2 input error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Negative,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Negative
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Err(e) => {
            if e.downcast_ref::<InputError>().is_some() {
                eprintln!("error: {e}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Status> {
    let o = &cli.opts;
    o.validate()?;
    match &cli.cmd {
        Cmd::Parse { input } => parse(o, load(input.as_ref())?),
        Cmd::Check { input } => check(o, load(input.as_ref())?),
        Cmd::Flow { input, weak } => flow(o, load(input.as_ref())?, *weak),
        Cmd::Verify { corpus: Some(dir), .. } => corpus::verify_corpus(o, dir),
        Cmd::Verify { input, .. } => verify(o, load(input.as_ref())?.pattern("verify")?),
        Cmd::Eval { input, branch, superop } => eval(o, load(input.as_ref())?, branch, *superop),
        Cmd::Extract { input, cx } => extract(o, load(input.as_ref())?.pattern("extract")?, *cx),
        Cmd::Rewrite { input, rule, site, strategy } => {
            rewrite(o, load(input.as_ref())?, rule.as_deref(), *site, strategy.as_deref())
        }
        Cmd::Soundness { rule, trials } => soundness(o, rule.as_deref(), *trials),
    }
}

fn emit(s: &str) {
    use std::io::Write as _;
    let nl = if s.ends_with('\n') { "" } else { "\n" };
    let _ = write!(std::io::stdout().lock(), "{s}{nl}");
}

fn no_dot(what: &str) -> anyhow::Error {
    input_error(format!("--format dot is not available for `{what}`"))
}

fn parse(o: &Opts, inp: Input) -> Result<Status> {
    let out = match (&inp, o.format) {
        (_, Format::Dot) => inp.diagram()?.to_dot(),
        (Input::Pattern(p), Format::Text) => p.to_text(),
        (Input::Pattern(p), Format::Json) => serde_json::to_string(p)?,
        (Input::Diagram(d), _) => d.to_json(),
    };
    emit(&out);
    Ok(Status::Ok)
}

fn check(o: &Opts, inp: Input) -> Result<Status> {
    let (problems, standard) = match &inp {
        Input::Pattern(p) => (
            check_wellformed(p).iter().map(ToString::to_string).collect::<Vec<_>>(),
            Some(p.is_standard()),
        ),
        Input::Diagram(d) => (d.validate().iter().map(ToString::to_string).collect(), None),
    };
    match o.format {
        Format::Json => emit(&serde_json::to_string(&json!({
            "wellformed": problems.is_empty(),
            "standard": standard,
            "violations": problems,
        }))?),
        Format::Text => {
            if problems.is_empty() {
                let form = match standard {
                    Some(true) => " (standard form)",
                    Some(false) => " (not standard form)",
                    None => "",
                };
                out!("ok{form}");
            }
            for p in &problems {
                out!("{p}");
            }
        }
        Format::Dot => return Err(no_dot("check")),
    }
    Ok(Status::from_bool(problems.is_empty()))
}

fn flow(o: &Opts, inp: Input, weak: bool) -> Result<Status> {
    match inp {
        Input::Pattern(p) => {
            let g = geometry(&p);
            let fl = find_flow(&g);
            match o.format {
                Format::Json => emit(&serde_json::to_string(&json!({ "geometry": g, "flow": fl }))?),
                Format::Text => match &fl {
                    None => out!("no flow"),
                    Some(fl) => {
                        out!("flow");
                        for (u, v) in &fl.f {
                            out!("f {u} {v}");
                        }
                        let order: Vec<String> = fl.measurement_order(&g).iter().map(ToString::to_string).collect();
                        out!("order {}", order.join(" "));
                    }
                },
                Format::Dot => return Err(no_dot("flow")),
            }
            Ok(Status::from_bool(fl.is_some()))
        }
        Input::Diagram(d) => {
            let mode = if weak { CircuitMode::Weak } else { CircuitMode::Strict };
            let r = is_circuit_like(&d, mode).map_err(|e| input_error(e.to_string()))?;
            match o.format {
                Format::Json => emit(&serde_json::to_string(&r)?),
                Format::Text => match &r {
                    CircuitLike::Yes { cover } => {
                        out!("circuit-like");
                        for path in &cover.paths {
                            let p: Vec<String> = path.iter().map(ToString::to_string).collect();
                            out!("path {}", p.join(" "));
                        }
                    }
                    CircuitLike::No { condition, detail, .. } => out!("not circuit-like: {condition}: {detail}"),
                },
                Format::Dot => return Err(no_dot("flow")),
            }
            Ok(Status::from_bool(r.holds()))
        }
    }
}

fn verify(o: &Opts, p: Pattern) -> Result<Status> {
    let r = verify_determinism_with(&p, &o.determinism()).map_err(|e| input_error(e.to_string()))?;
    match o.format {
        Format::Json => emit(&r.to_json()),
        Format::Text => {
            out!("{}", serde_json::to_value(r.verdict)?.as_str().unwrap_or_default());
            out!("method {}", serde_json::to_value(r.method)?.as_str().unwrap_or_default());
            if let Some(t) = &r.trace {
                out!("steps {}", t.len());
            }
            if let Some(w) = &r.witness {
                out!("witness {} vs {} distance {:.6}", w.witness, w.positive, w.distance);
            }
            if let Some(n) = &r.note {
                out!("note {n}");
            }
        }
        Format::Dot => match &r.residual {
            Some(d) => emit(&d.to_dot()),
            None => return Err(no_dot("verify without a residual diagram")),
        },
    }
    Ok(Status::from_bool(r.verdict.is_positive()))
}

fn diagram_symbols(d: &Diagram) -> BTreeSet<String> {
    d.vertices()
        .filter_map(|(_, k)| k.spider_data())
        .flat_map(|s| s.phase.symbols().map(|(n, _)| n.to_string()).collect::<Vec<_>>())
        .collect()
}

fn parse_valuation(s: &str, signals: &[String]) -> Result<Valuation> {
    let mut v = Valuation::all_zero(signals.iter().map(String::as_str));
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, b) = part
            .split_once('=')
            .ok_or_else(|| input_error(format!("--branch: expected `signal=bit`, got `{part}`")))?;
        let k = k.trim();
        if !signals.iter().any(|s| s == k) {
            return Err(input_error(format!("--branch: unknown signal `{k}`")));
        }
        let bit = match b.trim() {
            "0" => false,
            "1" => true,
            other => return Err(input_error(format!("--branch: bit must be 0 or 1, got `{other}`"))),
        };
        v.set(k, bit);
    }
    Ok(v)
}

fn eval(o: &Opts, inp: Input, branch: &str, superop: bool) -> Result<Status> {
    if o.format == Format::Dot {
        return Err(no_dot("eval"));
    }
    let d = inp.diagram()?;
    let symbols = match &inp {
        Input::Pattern(p) => p.symbols(),
        Input::Diagram(d) => diagram_symbols(d),
    };
    let angles = o.angles(&symbols);
    let sem = |e: zxverify::semantics::SemanticsError| input_error(e.to_string());
    if superop || (matches!(inp, Input::Diagram(_)) && !d.signals().is_empty()) {
        let s = eval_superop(&d, &angles).map_err(sem)?;
        let t = s.transfer_matrix().map_err(sem)?;
        match o.format {
            Format::Json => emit(&serde_json::to_string(&json!({ "angles": angles, "superop": s, "transfer": t }))?),
            _ => emit(&t.to_text()),
        }
        return Ok(Status::Ok);
    }
    let maps = match &inp {
        Input::Diagram(_) => vec![(Valuation::new(), eval_matrix(&d, &angles).map_err(sem)?)],
        Input::Pattern(p) => {
            if p.measured().len() > o.signal_bound {
                return Err(input_error(format!(
                    "{} signals exceed the signal bound {}",
                    p.measured().len(),
                    o.signal_bound
                )));
            }
            let all = branch_maps(p, &angles).map_err(|e| input_error(e.to_string()))?;
            match branch {
                "all" => all,
                "positive" => all.into_iter().take(1).collect(),
                spec => {
                    let want = parse_valuation(spec, &p.signals())?;
                    all.into_iter().filter(|(v, _)| *v == want).collect()
                }
            }
        }
    };
    match o.format {
        Format::Json => {
            let b: Vec<_> = maps.iter().map(|(v, m)| json!({ "branch": v, "matrix": m })).collect();
            emit(&serde_json::to_string(&json!({ "angles": angles, "branches": b }))?);
        }
        _ => {
            let single = maps.len() == 1;
            for (v, m) in &maps {
                if !single {
                    out!("branch {v}");
                }
                emit(&m.to_text());
            }
        }
    }
    Ok(Status::Ok)
}

fn extract(o: &Opts, p: Pattern, cx: bool) -> Result<Status> {
    let c = match extract_circuit(&p) {
        Ok(c) => c,
        Err(ExtractError::Pattern(e)) => return Err(input_error(e.to_string())),
        Err(e) => {
            match o.format {
                Format::Json => emit(&serde_json::to_string(&json!({ "error": e.to_string() }))?),
                _ => out!("{e}"),
            }
            return Ok(Status::Negative);
        }
    };
    let c = if cx { c.with_cx() } else { c };
    match o.format {
        Format::Json => emit(&serde_json::to_string(&c)?),
        Format::Text => emit(&c.to_text()),
        Format::Dot => emit(&c.to_diagram().to_dot()),
    }
    Ok(Status::Ok)
}

fn rewrite(o: &Opts, inp: Input, rule: Option<&str>, site: usize, strategy: Option<&str>) -> Result<Status> {
    let d = inp.diagram()?;
    let (out, trace) = match (rule, strategy) {
        (Some(r), _) => {
            let r: RuleId = r.parse().map_err(|e: zxverify::rewrite::RewriteError| input_error(e.to_string()))?;
            let matches = find_matches(&d, r);
            let Some(m) = matches.get(site) else {
                out!("no match for {r} at site {site} ({} matches)", matches.len());
                return Ok(Status::Negative);
            };
            let out = apply(&d, m).map_err(|e| input_error(e.to_string()))?;
            let mut t = RewriteTrace::new();
            t.record(m.clone(), &out);
            (out, t)
        }
        (None, Some(s)) => {
            let s: Strategy = s.parse().map_err(|e: zxverify::rewrite::RewriteError| input_error(e.to_string()))?;
            simplify(&d, s)
        }
        (None, None) => return Err(input_error("one of --rule or --strategy is required")),
    };
    match o.format {
        Format::Json => emit(&serde_json::to_string(&json!({ "trace": trace, "diagram": out }))?),
        Format::Text => {
            for s in &trace.steps {
                let a: Vec<String> = s.site.anchors.iter().map(ToString::to_string).collect();
                out!("{} [{}] {}", s.site.rule, a.join(","), s.hash);
            }
            emit(&out.to_json());
        }
        Format::Dot => emit(&out.to_dot()),
    }
    Ok(Status::Ok)
}

fn soundness(o: &Opts, rule: Option<&str>, trials: usize) -> Result<Status> {
    let rules = match rule {
        Some(r) => vec![r.parse().map_err(|e: zxverify::rewrite::RewriteError| input_error(e.to_string()))?],
        None => RuleId::all(),
    };
    let reports: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = rules
            .iter()
            .map(|r| s.spawn(move || check_rule_soundness(*r, trials, o.tol, o.seed)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("soundness worker panicked")).collect()
    });
    let ok = reports.iter().all(|r| r.passed());
    match o.format {
        Format::Json => emit(&serde_json::to_string(&json!({ "seed": o.seed, "reports": reports }))?),
        Format::Text => {
            out!("seed {}", o.seed);
            for r in &reports {
                let mark = if r.passed() { "ok" } else { "FAIL" };
                out!("{} {} trials {} failures {mark}", r.rule, r.trials, r.failures.len());
            }
        }
        Format::Dot => return Err(no_dot("soundness")),
    }
    Ok(Status::from_bool(ok))
}
