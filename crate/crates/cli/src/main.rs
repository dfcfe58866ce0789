use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use surfred::caps::Caps;
use surfred::compile::{compile_formula_with, CompileMode, CompiledInstance};
use surfred::decoders::{
    brute_force_dqmld_with, brute_force_qmld_with, structured_dqmld, structured_qmld, support_dqmld_with,
    support_qmld_with, DecodeResult,
};
use surfred::formula::parse_any;
use surfred::gadget::{self, verify_exclusions, verify_gadget_with, GadgetKind, GadgetTemplate};
use surfred::instance::{self, ParsedInstance};
use surfred::pipelines::{self, PipelineReport};
use surfred::rational::{format_rational, parse_rational, ApproxFactor};
use surfred::render::{render, render_decoding, RenderFormat};
use surfred::{Error, Formula, Letter};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "surfred", version, about = "Compile Boolean formulas into surface-code decoding instances and decode them exactly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Qmld,
    QmldApprox,
    QmldUniform,
    Dqmld,
    DqmldMajority,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Support,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Qmld,
    Dqmld,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a formula (DIMACS or expression; a path or inline text) into an instance file.
    Compile {
        input: String,
        #[arg(long, value_enum, default_value = "qmld")]
        mode: ModeArg,
        #[arg(long, default_value = "1/4")]
        p: String,
        #[arg(long)]
        r: Option<String>,
        /// Approximation factor: `num/den`, `2^l` or `2^(l^c)`.
        #[arg(long = "M")]
        m: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode an instance file.
    Decode {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        method: Method,
        #[arg(long, value_enum, default_value = "qmld")]
        problem: Problem,
    },
    /// Decide satisfiability through one QMLD call.
    SolveSat { input: String },
    /// Count satisfying assignments by binary search over DQMLD calls.
    CountSat { input: String },
    /// Decide whether most assignments satisfy the formula.
    Majority { input: String },
    /// Exhaustively check gadget templates against their witness tables.
    VerifyGadgets {
        #[arg(long)]
        gadget: Option<String>,
        /// Verify a template file instead of the built-in corpus.
        #[arg(long)]
        template_file: Option<PathBuf>,
    },
    /// Draw an instance file.
    Render {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => emit(text),
    }
}

// a closed pipe downstream (`| head`) is not an error
fn emit(text: &str) -> Outcome {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Io(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn load_formula(input: &str) -> std::result::Result<Formula, Failure> {
    let path = Path::new(input);
    let text = if path.is_file() { read(path)? } else { input.to_string() };
    Ok(parse_any(&text)?)
}

fn load_instance(path: &Path) -> std::result::Result<ParsedInstance, Failure> {
    Ok(instance::parse(&read(path)?)?)
}

fn build_mode(mode: ModeArg, p: &str, r: Option<&str>, m: Option<&str>) -> std::result::Result<CompileMode, Failure> {
    let p = parse_rational(p)?;
    let m = m.map(ApproxFactor::parse).transpose()?;
    let need_m = || m.clone().ok_or_else(|| Failure::Lib(Error::InvalidParameter("--M is required for qmld-approx".into())));
    let mode = match mode {
        ModeArg::Qmld => CompileMode::Qmld { p },
        ModeArg::QmldApprox => CompileMode::QmldApprox { p, m: need_m()? },
        ModeArg::QmldUniform => CompileMode::QmldUniform { p, m: m.clone() },
        ModeArg::Dqmld => {
            let r = r.ok_or_else(|| Failure::Lib(Error::InvalidParameter("--r is required for dqmld".into())))?;
            CompileMode::Dqmld { r: parse_rational(r)? }
        }
        ModeArg::DqmldMajority => CompileMode::DqmldMajority,
    };
    mode.validate()?;
    Ok(mode)
}

fn cmd_compile(input: &str, mode: CompileMode, output: Option<&Path>) -> Outcome {
    let f = load_formula(input)?;
    let caps = Caps::from_env()?;
    let inst = compile_formula_with(&f, mode, &caps)?;
    let text = instance::serialize(&inst);
    let summary = format!(
        "w={} h={} ell={} support={} mode={}\n",
        inst.layout.width(),
        inst.layout.height(),
        inst.ell,
        inst.noise.support().len(),
        inst.mode
    );
    match output {
        Some(p) => {
            fs::write(p, &text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            print!("{summary}");
        }
        None => {
            eprint!("{summary}");
            emit(&text)?;
        }
    }
    Ok(())
}

fn print_result(res: &DecodeResult) {
    println!("error: {}", res.error);
    println!("probability: {}", format_rational(&res.probability));
    if res.zero_probability {
        println!("note: every consistent error has probability zero");
    }
    if let Some(t) = &res.cosets {
        println!("reference: {}", t.reference);
        for l in Letter::ALL {
            let name = match l {
                Letter::I => "I",
                Letter::X => "Xbar",
                Letter::Y => "XbarZbar",
                Letter::Z => "Zbar",
            };
            println!("coset {name}: {}", format_rational(t.probability(l)));
        }
        println!("total: {}", format_rational(&t.total()));
        println!("class: {}{}", t.class, if t.tie { " (tie)" } else { "" });
    }
}

fn structured_source(parsed: &ParsedInstance) -> std::result::Result<&CompiledInstance, Failure> {
    parsed
        .compiled
        .as_ref()
        .ok_or_else(|| Failure::Lib(Error::Precondition("structured decoding needs an instance with a placement sidecar".into())))
}

fn cmd_decode(path: &Path, method: Method, problem: Problem) -> Outcome {
    let parsed = load_instance(path)?;
    let caps = Caps::from_env()?;
    let inst = &parsed.decoding;
    let res = match (method, problem) {
        (Method::Brute, Problem::Qmld) => brute_force_qmld_with(inst, &caps)?,
        (Method::Brute, Problem::Dqmld) => brute_force_dqmld_with(inst, &caps)?,
        (Method::Support, Problem::Qmld) => support_qmld_with(inst, &caps)?,
        (Method::Support, Problem::Dqmld) => support_dqmld_with(inst, &caps)?,
        (Method::Structured, Problem::Qmld) => structured_qmld(structured_source(&parsed)?)?,
        (Method::Structured, Problem::Dqmld) => structured_dqmld(structured_source(&parsed)?)?,
    };
    print_result(&res);
    if let Some(c) = &parsed.compiled {
        println!("output: {}", c.output_value(&res.error)?);
    }
    Ok(())
}

fn finish_report(report: &PipelineReport) -> Outcome {
    print!("{}", report.render());
    match report.agrees() {
        Some(false) => Err(Failure::Mismatch(format!("verdict {} disagrees with the truth table", report.verdict))),
        _ => Ok(()),
    }
}

fn expected_count(kind: GadgetKind) -> usize {
    match kind {
        GadgetKind::And | GadgetKind::CrossXZ => 4,
        _ => 2,
    }
}

fn verify_one(t: &GadgetTemplate, caps: &Caps) -> std::result::Result<bool, Failure> {
    let rep = verify_gadget_with(t, caps.support_qubits, caps.node_budget)?;
    let want = expected_count(t.kind);
    let mut ok = rep.matched && rep.count == want;
    let size = if t.param > 0 { format!(" param={}", t.param) } else { String::new() };
    println!(
        "{}{size}: {} consistent errors (expected {want}), witnesses {}, {} nodes, {:.2?}",
        rep.id,
        rep.count,
        if rep.matched { "match" } else { "MISMATCH" },
        rep.explored,
        rep.elapsed
    );
    if let Some(m) = &rep.mismatch {
        println!("  {m}");
    }
    if t.kind == GadgetKind::And {
        let ex = verify_exclusions(t)?;
        println!(
            "  exclusions: forced-Z completions {}, Y-at-XZ4 completions {}, XZ4 domain {}, unforced {}",
            ex.case1_completions, ex.y_at_xz4_completions, ex.xz4_domain, ex.unforced_count
        );
        ok &= ex.holds();
    }
    Ok(ok)
}

fn cmd_verify(which: Option<&str>, file: Option<&Path>) -> Outcome {
    let caps = Caps::from_env()?;
    let filter = match which {
        Some(id) => Some(
            GadgetKind::parse(id).ok_or_else(|| Failure::Lib(Error::InvalidParameter(format!("unknown gadget `{id}`"))))?,
        ),
        None => None,
    };
    let templates = match file {
        Some(p) => vec![GadgetTemplate::parse(&read(p)?, 0)?],
        None => gadget::corpus()?,
    };
    let mut failed = 0;
    let mut checked = 0;
    for t in templates.iter().filter(|t| filter.is_none_or(|k| t.kind == k)) {
        checked += 1;
        if !verify_one(t, &caps)? {
            failed += 1;
        }
    }
    if checked == 0 {
        return Err(Failure::Lib(Error::InvalidParameter("no template matched".into())));
    }
    println!("{checked} templates checked, {failed} failed");
    if failed > 0 {
        return Err(Failure::Mismatch(format!("{failed} templates failed verification")));
    }
    Ok(())
}

fn cmd_render(path: &Path, format: Format, output: Option<&Path>) -> Outcome {
    let parsed = load_instance(path)?;
    let fmt = match format {
        Format::Ascii => RenderFormat::Ascii,
        Format::Svg => RenderFormat::Svg,
    };
    let text = match &parsed.compiled {
        Some(c) => render(c, fmt),
        None => render_decoding(&parsed.decoding, fmt),
    };
    write_or_print(output, &text)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Compile { input, mode, p, r, m, output } => {
            let mode = build_mode(mode, &p, r.as_deref(), m.as_deref())?;
            cmd_compile(&input, mode, output.as_deref())
        }
        Command::Decode { instance, method, problem } => cmd_decode(&instance, method, problem),
        Command::SolveSat { input } => {
            let f = load_formula(&input)?;
            let caps = Caps::from_env()?;
            let report = pipelines::solve_sat_with(&f, &mut pipelines::structured_qmld_oracle, CompileMode::qmld_default(), &caps)?;
            finish_report(&report)
        }
        Command::CountSat { input } => {
            let f = load_formula(&input)?;
            let report = pipelines::count_sat_with(&f, &mut pipelines::structured_dqmld_oracle, &Caps::from_env()?)?;
            finish_report(&report)
        }
        Command::Majority { input } => {
            let f = load_formula(&input)?;
            let report = pipelines::majority_sat_with(&f, &mut pipelines::structured_dqmld_oracle, &Caps::from_env()?)?;
            finish_report(&report)
        }
        Command::VerifyGadgets { gadget, template_file } => cmd_verify(gadget.as_deref(), template_file.as_deref()),
        Command::Render { instance, format, output } => cmd_render(&instance, format, output.as_deref()),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Cap { .. } => EXIT_CAP,
        Error::Verification(_) | Error::OracleFault(_) => EXIT_MISMATCH,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}
