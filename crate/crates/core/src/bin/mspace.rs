#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use mspace::classify::{is_tho, is_tto, sedlock_class};
use mspace::harness::{find, replay, run_suite, ProblemSpec, SuiteConfig, SuiteReport, CHECKS};
use mspace::json::{matrix_rows, pairs, parse_coords, parse_extended, parse_inner, parse_matrix, parse_symbol, to_pair};
use mspace::operators::{clark_perturbation, dee, defects, functional_calculus, sedlock_op, shift, tho_matrix, tto_matrix};
use mspace::products::{self, Order, ProductVerdict};
use mspace::{ClarkData, Error, InnerFunction, ModelSpace, OperatorMatrix, Quadrature, RationalSymbol};

#[derive(Parser)]
#[command(name = "mspace", version, about = "Truncated Toeplitz and Hankel operators on model spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Membership tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Largest number of quadrature nodes.
    #[arg(long, global = true)]
    quad_cap: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Check id or group prefix; repeatable.
    #[arg(long, global = true)]
    theorem: Vec<String>,
}

#[derive(clap::Args, Default)]
struct SpaceArgs {
    /// Inner function: `zN` or `{"zeros":[[re,im],...],"constant":[re,im]}`.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    w: Option<String>,
    /// A problem description (JSON text or @file); explicit flags win.
    #[arg(long)]
    spec: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Tto,
    Tho,
    Shift,
    ShiftAdjoint,
    DefectLeft,
    DefectRight,
    Clark,
    Sedlock,
    Calculus,
    ConjugationC,
    ConjugationU,
    Dee,
    Identity,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the matrix of an operator.
    BuildOp {
        #[arg(long, value_enum)]
        op: Op,
        #[command(flatten)]
        spaces: SpaceArgs,
        /// JSON symbol, `num`/`den` or `{"laurent":{"k":[re,im]}}`.
        #[arg(long)]
        symbol: Option<String>,
        /// `re,im` or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        /// Coordinates of an element of K_u.
        #[arg(long)]
        vector: Option<String>,
    },
    /// Toeplitz, Hankel and Sedlock membership of a matrix from K_u to K_v.
    Classify {
        #[command(flatten)]
        spaces: SpaceArgs,
        /// Rows of `[re,im]` pairs.
        #[arg(long)]
        matrix: String,
    },
    /// Run a product criterion on supplied operators, or replay a problem.
    ProductTest {
        #[command(flatten)]
        spaces: SpaceArgs,
        /// First factor (left in the product).
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        /// Symbols for the symbol-based criteria; repeatable.
        #[arg(long)]
        symbol: Vec<String>,
        #[arg(long, value_enum, default_value = "ab")]
        order: OrderArg,
    },
    /// Clark points and weights for a unimodular alpha.
    Clark {
        #[command(flatten)]
        spaces: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Run the verification suite.
    VerifySuite {
        /// Trials per check instead of the defaults.
        #[arg(long)]
        trials: Option<usize>,
        /// Emit one JSON line per trial instead of the summary.
        #[arg(long)]
        records: bool,
        /// List check ids and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Ab,
    Ba,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Input(_) | Error::InvalidRange(_) => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = Result<(Value, String, bool), Failure>;

fn read_arg(text: &str) -> Result<String, Failure> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

struct Context {
    tol: f64,
    quadrature: Quadrature,
    json: bool,
}

impl Context {
    fn space(&self, u: &InnerFunction) -> Result<Arc<ModelSpace>, Failure> {
        Ok(ModelSpace::with_quadrature(u.clone(), self.quadrature)?)
    }
}

struct Spaces {
    spec: Option<ProblemSpec>,
    u: Option<InnerFunction>,
    v: Option<InnerFunction>,
    w: Option<InnerFunction>,
}

impl Spaces {
    fn parse(args: &SpaceArgs) -> Result<Self, Failure> {
        let spec: Option<ProblemSpec> = match &args.spec {
            Some(t) => {
                let spec: ProblemSpec = serde_json::from_str(&read_arg(t)?).map_err(|e| Failure::Usage(format!("spec: {e}")))?;
                spec.validate()?;
                Some(spec)
            }
            None => None,
        };
        let pick = |flag: &Option<String>, fallback: Option<&InnerFunction>| -> Result<Option<InnerFunction>, Failure> {
            match flag {
                Some(t) => Ok(Some(parse_inner(&read_arg(t)?)?)),
                None => Ok(fallback.cloned()),
            }
        };
        let u = pick(&args.u, spec.as_ref().map(|s| &s.u))?;
        let v = pick(&args.v, spec.as_ref().and_then(|s| s.v.as_ref()))?;
        let w = pick(&args.w, spec.as_ref().and_then(|s| s.w.as_ref()))?;
        Ok(Self { spec, u, v, w })
    }

    fn get(&self, ctx: &Context, which: char) -> Result<Arc<ModelSpace>, Failure> {
        let inner = match which {
            'u' => &self.u,
            'v' => self.v.as_ref().map_or(&self.u, |_| &self.v),
            _ => &self.w,
        };
        let inner = inner.as_ref().ok_or_else(|| Failure::Usage(format!("--{which} is required")))?;
        ctx.space(inner)
    }
}

fn format_complex(z: Complex64) -> String {
    format!("{:+.6e}{:+.6e}i", z.re, z.im)
}

fn matrix_text(m: &OperatorMatrix) -> String {
    m.matrix().to_rows().iter().map(|r| r.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join("  ")).collect::<Vec<_>>().join("\n")
}

fn operator_json(m: &OperatorMatrix) -> Value {
    json!({
        "rows": m.matrix().rows(),
        "cols": m.matrix().cols(),
        "antilinear": m.is_antilinear(),
        "matrix": matrix_rows(m.matrix()),
    })
}

fn build_op(
    ctx: &Context,
    op: Op,
    spaces: &SpaceArgs,
    symbol: Option<&str>,
    alpha: Option<&str>,
    c: Option<&str>,
    vector: Option<&str>,
) -> Outcome {
    let sp = Spaces::parse(spaces)?;
    let spec = sp.spec.as_ref();
    let u = sp.get(ctx, 'u')?;
    let symbol = match symbol {
        Some(t) => Some(parse_symbol(&read_arg(t)?)?),
        None => spec.and_then(|s| s.symbols.first().cloned()),
    };
    let alpha = match alpha {
        Some(t) => Some(parse_extended(t)?),
        None => spec.and_then(|s| s.alpha),
    };
    let c = match c {
        Some(t) => Some(mspace::json::parse_complex(t)?),
        None => spec.and_then(|s| s.c),
    };
    let vector = match vector {
        Some(t) => Some(parse_coords(&read_arg(t)?)?),
        None => spec.and_then(|s| s.vectors.first().cloned()),
    };
    let need_symbol = || symbol.clone().ok_or_else(|| Failure::Usage("--symbol is required".into()));
    let need_alpha = || alpha.ok_or_else(|| Failure::Usage("--alpha is required".into()));
    let finite_alpha =
        || -> Result<Complex64, Failure> { need_alpha()?.as_finite().ok_or_else(|| Failure::Usage("--alpha must be finite".into())) };
    let m = match op {
        Op::Tto => tto_matrix(&u, &sp.get(ctx, 'v')?, &need_symbol()?)?,
        Op::Tho => tho_matrix(&u, &sp.get(ctx, 'v')?, &need_symbol()?)?,
        Op::Shift => shift(&u)?,
        Op::ShiftAdjoint => shift(&u)?.adjoint(),
        Op::DefectLeft => defects(&u)?.0,
        Op::DefectRight => defects(&u)?.1,
        Op::Clark => clark_perturbation(&u, finite_alpha()?)?,
        Op::Sedlock => {
            let coords = vector.ok_or_else(|| Failure::Usage("--vector is required".into()))?;
            sedlock_op(need_alpha()?, &u.element(coords)?, c.unwrap_or_default())?
        }
        Op::Calculus => functional_calculus(&u, need_alpha()?, &need_symbol()?)?,
        Op::ConjugationC => u.conjugation_c()?,
        Op::ConjugationU => u.conjugation_u()?,
        Op::Dee => dee(&u)?,
        Op::Identity => OperatorMatrix::identity(&u),
    };
    Ok((operator_json(&m), matrix_text(&m), true))
}

fn classify(ctx: &Context, spaces: &SpaceArgs, matrix: &str) -> Outcome {
    let sp = Spaces::parse(spaces)?;
    let (u, v) = (sp.get(ctx, 'u')?, sp.get(ctx, 'v')?);
    let m = parse_matrix(&read_arg(matrix)?)?;
    let op = OperatorMatrix::linear(m, u, v)?;
    let tto = is_tto(&op, ctx.tol)?;
    let tho = is_tho(&op, ctx.tol)?;
    let mut value = json!({
        "tto": {
            "member": tto.member,
            "displacement_residual": tto.displacement_residual,
            "rebuild_residual": tto.rebuild_residual,
            "symbol": tto.member.then(|| tto.symbol()),
        },
        "tho": {
            "member": tho.member,
            "displacement_residual": tho.displacement_residual,
            "rebuild_residual": tho.rebuild_residual,
            "symbol": tho.member.then(|| tho.symbol()),
        },
    });
    let mut text = format!(
        "truncated Toeplitz: {} (displacement {:.3e}, rebuild {:.3e})\ntruncated Hankel:   {} (displacement {:.3e}, rebuild {:.3e})",
        tto.member, tto.displacement_residual, tto.rebuild_residual, tho.member, tho.displacement_residual, tho.rebuild_residual
    );
    if op.is_endomorphism() {
        let s = sedlock_class(&op, ctx.tol)?;
        text.push_str(&format!("\nSedlock class: {:?}", s.membership));
        if let Some(a) = s.alpha {
            text.push_str(&format!(" alpha = {a}"));
        }
        value["sedlock"] = serde_json::to_value(&s).map_err(|e| Failure::Verification(e.to_string()))?;
    }
    Ok((value, text, true))
}

fn verdict(v: &ProductVerdict) -> Outcome {
    let value = serde_json::to_value(v).map_err(|e| Failure::Verification(e.to_string()))?;
    let text = format!(
        "criterion: {}\ndirect membership: {}\nagree: {}\ncriterion residual: {:.3e}",
        v.in_class, v.direct, v.agree, v.lhs_residual
    );
    Ok((value, text, v.agree && v.class_check != Some(false)))
}

fn product_test(
    ctx: &Context,
    theorem: &[String],
    spaces: &SpaceArgs,
    a: Option<&str>,
    b: Option<&str>,
    symbols: &[String],
    order: OrderArg,
) -> Outcome {
    let [id] = theorem else {
        return Err(Failure::Usage("product-test needs exactly one --theorem".into()));
    };
    let sp = Spaces::parse(spaces)?;
    if let Some(spec) = &sp.spec {
        if a.is_none() && symbols.is_empty() {
            let out = replay(spec, Some(id))?;
            let text = format!(
                "pass: {}\nresidual: {:.3e}{}",
                out.pass,
                out.residual,
                out.note.as_deref().map(|n| format!("\n{n}")).unwrap_or_default()
            );
            return Ok((serde_json::to_value(&out).unwrap_or(Value::Null), text, out.pass));
        }
    }
    let order = match order {
        OrderArg::Ab => Order::AB,
        OrderArg::Ba => Order::BA,
    };
    let matrix = |text: Option<&str>, name: &str| -> Result<mspace::CMatrix, Failure> {
        Ok(parse_matrix(&read_arg(text.ok_or_else(|| Failure::Usage(format!("--{name} is required")))?)?)?)
    };
    let syms = || -> Result<Vec<RationalSymbol>, Failure> { symbols.iter().map(|t| Ok(parse_symbol(&read_arg(t)?)?)).collect() };
    let sym_pair = || -> Result<(RationalSymbol, RationalSymbol), Failure> {
        match syms()?.as_slice() {
            [p, q] => Ok((p.clone(), q.clone())),
            _ => Err(Failure::Usage("two --symbol values are required".into())),
        }
    };
    let u = sp.get(ctx, 'u')?;
    match id.as_str() {
        "products.toeplitz" => {
            let (v, w) = (sp.get(ctx, 'v')?, sp.get(ctx, 'w')?);
            let a = OperatorMatrix::linear(matrix(a, "a")?, v.clone(), w)?;
            let b = OperatorMatrix::linear(matrix(b, "b")?, u, v)?;
            verdict(&products::atto_product_test(&a, &b, ctx.tol)?)
        }
        "products.hankel-pair" => {
            let b1 = OperatorMatrix::linear(matrix(a, "a")?, u.clone(), u.clone())?;
            let b2 = OperatorMatrix::linear(matrix(b, "b")?, u.clone(), u)?;
            verdict(&products::tho_product_tto_test(&b1, &b2, ctx.tol)?)
        }
        "products.hankel-forms" => {
            let b1 = OperatorMatrix::linear(matrix(a, "a")?, u.clone(), u.clone())?;
            let b2 = OperatorMatrix::linear(matrix(b, "b")?, u.clone(), u)?;
            let forms = products::tho_product_symbol_forms(&b1, &b2, ctx.tol)?;
            let value = serde_json::to_value(&forms).map_err(|e| Failure::Verification(e.to_string()))?;
            let text = format!(
                "alpha: {}\nrebuild residuals: {:.3e}, {:.3e}",
                forms.alpha, forms.rebuild_residuals[0], forms.rebuild_residuals[1]
            );
            Ok((value, text, true))
        }
        "products.mixed" => {
            let a = OperatorMatrix::linear(matrix(a, "a")?, u.clone(), u.clone())?;
            let b = OperatorMatrix::linear(matrix(b, "b")?, u.clone(), u)?;
            verdict(&products::mixed_product_test(&a, &b, order, ctx.tol)?)
        }
        "products.hankel-hankel" => {
            let (phi1, phi2) = sym_pair()?;
            verdict(&products::atho_product_tto_test(&u, &sp.get(ctx, 'v')?, &sp.get(ctx, 'w')?, &phi1, &phi2, ctx.tol)?)
        }
        "products.hankel-chain" | "products.toeplitz-chain" => {
            let (phi1, phi2) = sym_pair()?;
            let (v, w) = (sp.get(ctx, 'v')?, sp.get(ctx, 'w')?);
            let r = if id == "products.hankel-chain" {
                products::hankel_product_chain(&u, &v, &w, &phi1, &phi2, ctx.tol)?
            } else {
                products::toeplitz_product_chain(&u, &v, &w, &phi1, &phi2, ctx.tol)?
            };
            let value = serde_json::to_value(&r).map_err(|e| Failure::Verification(e.to_string()))?;
            Ok((value, format!("memberships: {:?}\nagree: {}", r.memberships, r.agree), r.agree))
        }
        other if find(other).is_some() => Err(Failure::Usage(format!("{other} runs only from --spec"))),
        other => Err(Failure::Usage(format!("unknown check {other:?}"))),
    }
}

fn clark(ctx: &Context, spaces: &SpaceArgs, alpha: &str) -> Outcome {
    let sp = Spaces::parse(spaces)?;
    let u = sp.get(ctx, 'u')?;
    let alpha = parse_extended(alpha)?.as_finite().ok_or_else(|| Failure::Usage("alpha must be finite".into()))?;
    let data = ClarkData::compute(&u, alpha)?;
    let value = json!({
        "alpha": to_pair(alpha),
        "points": pairs(&data.points),
        "weights": data.weights,
        "alignment": data.alignment,
    });
    let text = data
        .points
        .iter()
        .zip(&data.weights)
        .map(|(p, w)| format!("{}  weight {:.12}", format_complex(*p), w))
        .collect::<Vec<_>>()
        .join("\n");
    Ok((value, text, true))
}

fn suite_text(report: &SuiteReport) -> String {
    let mut lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<34} {:>4}/{:<4} errors {:<3} max residual {:.3e}",
                if c.ok() { "PASS" } else { "FAIL" },
                c.id,
                c.passed,
                c.trials,
                c.errors,
                c.max_residual
            )
        })
        .collect();
    lines.push(format!("suite {} (seed {})", if report.passed { "passed" } else { "FAILED" }, report.seed));
    lines.join("\n")
}

fn verify_suite(ctx: &Context, seed: u64, theorem: &[String], trials: Option<usize>, records: bool) -> Result<bool, Failure> {
    let config = SuiteConfig { seed, tol: ctx.tol, quadrature: ctx.quadrature, trials, filter: theorem.to_vec(), records };
    let report = run_suite(&config)?;
    Ok(if records {
        let mut out = std::io::stdout().lock();
        for r in report.checks.iter().flat_map(|c| &c.records) {
            let line = serde_json::to_string(r).map_err(|e| Failure::Verification(e.to_string()))?;
            if writeln!(out, "{line}").is_err() {
                break;
            }
        }
        report.passed
    } else {
        let passed = report.passed;
        emit(ctx, &serde_json::to_value(&report).unwrap_or(Value::Null), &suite_text(&report));
        passed
    })
}

fn emit(ctx: &Context, value: &Value, text: &str) {
    let body = if ctx.json { serde_json::to_string_pretty(value).unwrap_or_default() } else { text.to_string() };
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{body}");
}

fn run(cli: Cli) -> Result<bool, Failure> {
    if !(cli.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let mut quadrature = Quadrature::default();
    if let Some(cap) = cli.quad_cap {
        if cap < 8 {
            return Err(Failure::Usage("--quad-cap must be at least 8".into()));
        }
        quadrature.cap = cap;
        quadrature.start = quadrature.start.min(cap);
    }
    let ctx = Context { tol: cli.tol, quadrature, json: cli.json };
    let outcome = match &cli.command {
        Command::BuildOp { op, spaces, symbol, alpha, c, vector } => {
            build_op(&ctx, *op, spaces, symbol.as_deref(), alpha.as_deref(), c.as_deref(), vector.as_deref())
        }
        Command::Classify { spaces, matrix } => classify(&ctx, spaces, matrix),
        Command::ProductTest { spaces, a, b, symbol, order } => {
            product_test(&ctx, &cli.theorem, spaces, a.as_deref(), b.as_deref(), symbol, *order)
        }
        Command::Clark { spaces, alpha } => clark(&ctx, spaces, alpha),
        Command::VerifySuite { list: true, .. } => {
            let value = json!(CHECKS.iter().map(|c| json!({"id": c.id, "summary": c.summary, "trials": c.trials})).collect::<Vec<_>>());
            let text = CHECKS.iter().map(|c| format!("{:<34} {:>4}  {}", c.id, c.trials, c.summary)).collect::<Vec<_>>().join("\n");
            Ok((value, text, true))
        }
        Command::VerifySuite { trials, records, .. } => return verify_suite(&ctx, cli.seed, &cli.theorem, *trials, *records),
    };
    let (value, text, ok) = outcome?;
    emit(&ctx, &value, &text);
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
