//! Command-line front end: run signal machines, compile and verify
//! Turing machines and alternating Turing machines, render diagrams.
//!
//! Exit codes: 0 success, 2 usage errors (bad arguments, missing or
//! malformed files), 3 budget-halted runs, 4 verification mismatches.

use agc::atm::{
    compile_atm, decode_atm_result, eval_atm_direct, machine_stats, AlternatingTm, CompileOptions,
    StatsSource, TreeLimits,
};
use agc::export::{export_diagram, ExportFormat};
use agc::frontend::{parse_frontend_text, FrontendKind, FrontendMachine};
use agc::svg::{render_svg, RenderStyle};
use agc::tm::{compile_tm, decode_tm_result, run_tm_direct, TuringMachine};
use agc::{parse_machine_text, run, HaltReason, Rational, RunLimits, SpaceTimeDiagram};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser)]
#[command(name = "agc", version, about = "Exact signal machine simulator and Turing machine compilers")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Svg,
    Json,
    Text,
}

#[derive(Args)]
struct RunOpts {
    /// Halt after this many collision events.
    #[arg(long, default_value_t = 100_000)]
    max_collisions: usize,
    /// Halt at this time (rational, e.g. 7/2).
    #[arg(long)]
    max_time: Option<String>,
}

impl RunOpts {
    fn limits(&self) -> Result<RunLimits, String> {
        let max_time = match &self.max_time {
            None => None,
            Some(text) => Some(
                text.parse::<Rational>()
                    .map_err(|e| format!("--max-time: {e}"))?,
            ),
        };
        Ok(RunLimits {
            max_collisions: self.max_collisions,
            max_time,
            ..RunLimits::default()
        })
    }
}

#[derive(Args)]
struct OutOpts {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 600)]
    height: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Run a signal machine definition and export its diagram.
    SmRun {
        file: PathBuf,
        #[command(flatten)]
        run_opts: RunOpts,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Run a signal machine definition and render the diagram as SVG.
    SmRender {
        file: PathBuf,
        #[command(flatten)]
        run_opts: RunOpts,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Compile a deterministic Turing machine with an input to a signal
    /// machine definition.
    TmCompile {
        file: PathBuf,
        input: String,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Run a deterministic Turing machine directly.
    TmRun {
        file: PathBuf,
        input: String,
        #[arg(long, default_value_t = 100_000)]
        step_limit: usize,
    },
    /// Check compiled runs against the direct interpreter.
    TmVerify {
        file: PathBuf,
        /// Inputs as arguments; or see --inputs-file / --all-up-to.
        inputs: Vec<String>,
        /// File with one input per line.
        #[arg(long)]
        inputs_file: Option<PathBuf>,
        /// Every binary string up to this length.
        #[arg(long)]
        all_up_to: Option<usize>,
        #[command(flatten)]
        run_opts: RunOpts,
    },
    /// Compile an alternating Turing machine with an input.
    AtmCompile {
        file: PathBuf,
        input: String,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Run an input through the compiled alternating machine and print
    /// Yes or No.
    AtmRun {
        file: PathBuf,
        input: String,
        #[command(flatten)]
        run_opts: RunOpts,
    },
    /// Check compiled verdicts against the tree-evaluation oracle.
    AtmVerify {
        file: PathBuf,
        inputs: Vec<String>,
        #[arg(long)]
        inputs_file: Option<PathBuf>,
        #[arg(long)]
        all_up_to: Option<usize>,
        #[command(flatten)]
        run_opts: RunOpts,
    },
    /// Report meta-signal and rule counts for a compiled machine.
    Stats {
        file: PathBuf,
        /// Input used for compilation and the dynamic tree depth.
        #[arg(default_value = "")]
        input: String,
    },
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn out(&mut self, text: &str) {
        let _ = writeln!(self.stdout, "{text}");
    }
    fn err(&mut self, text: &str) {
        let _ = writeln!(self.stderr, "{text}");
    }
}

/// Exit-code mapping over verification outcomes; the seam used by
/// mismatch-injection tests.
pub fn verification_exit_code(
    inputs: &[String],
    results: &[VerifyOutcome],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let mut io = Io { stdout, stderr };
    match verification_exit(inputs, results, &mut io) {
        Ok(code) => code,
        Err(f) => {
            io.err(&f.message);
            f.code
        }
    }
}

/// Parses argv and executes; returns the process exit code.
pub fn run_cli(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut io = Io { stdout, stderr };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version output.
            let text = e.render().to_string();
            if e.use_stderr() {
                io.err(text.trim_end());
                return EXIT_USAGE;
            }
            io.out(text.trim_end());
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            io.err(&message);
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_tm(path: &Path) -> Result<TuringMachine, Failure> {
    let text = read_file(path)?;
    match parse_frontend_text(&text, FrontendKind::Tm) {
        Ok(FrontendMachine::Tm(tm)) => Ok(tm),
        Ok(FrontendMachine::Atm(_)) => Err(usage("expected a deterministic machine")),
        Err(errors) => Err(usage(render_errors(path, &errors))),
    }
}

fn load_atm(path: &Path) -> Result<AlternatingTm, Failure> {
    let text = read_file(path)?;
    match parse_frontend_text(&text, FrontendKind::Atm) {
        Ok(machine) => Ok(machine.as_atm()),
        Err(errors) => Err(usage(render_errors(path, &errors))),
    }
}

fn render_errors(path: &Path, errors: &[agc::ParseError]) -> String {
    errors
        .iter()
        .map(|e| format!("{}:{e}", path.display()))
        .collect::<Vec<_>>()
        .join("\n")
}

fn write_output(out: &OutOpts, content: &str, io: &mut Io<'_>) -> Result<(), Failure> {
    match &out.out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            let _ = write!(io.stdout, "{content}");
            Ok(())
        }
    }
}

fn budget_check(d: &SpaceTimeDiagram, io: &mut Io<'_>) -> i32 {
    if d.halt == HaltReason::Quiescent {
        EXIT_OK
    } else {
        io.err(&format!("run halted early: {:?}", d.halt));
        EXIT_BUDGET
    }
}

fn export(d: &SpaceTimeDiagram, out: &OutOpts, io: &mut Io<'_>) -> Result<(), Failure> {
    let content = match out.format {
        OutputFormat::Json => export_diagram(d, ExportFormat::Json),
        OutputFormat::Text => export_diagram(d, ExportFormat::Text),
        OutputFormat::Svg => render_svg(
            d,
            &RenderStyle {
                width: out.width,
                height: out.height,
                ..RenderStyle::default()
            },
        ),
    };
    write_output(out, &content, io)
}

fn gather_inputs(
    direct: Vec<String>,
    inputs_file: Option<PathBuf>,
    all_up_to: Option<usize>,
) -> Result<Vec<String>, Failure> {
    let mut inputs = direct;
    if let Some(path) = inputs_file {
        let text = read_file(&path)?;
        inputs.extend(text.lines().map(|l| l.trim().to_string()).filter(|l| !l.is_empty()));
    }
    if let Some(n) = all_up_to {
        if n > 16 {
            return Err(usage("--all-up-to is capped at 16"));
        }
        for len in 0..=n {
            for bits in 0..(1u64 << len) {
                inputs.push(
                    (0..len)
                        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
                        .collect(),
                );
            }
        }
    }
    if inputs.is_empty() {
        return Err(usage("no inputs given (arguments, --inputs-file or --all-up-to)"));
    }
    Ok(inputs)
}

/// Runs `work` over the inputs on a few threads; results come back in
/// input order. Runs share nothing mutable.
fn parallel_map<T: Send>(
    inputs: &[String],
    work: impl Fn(&str) -> T + Sync,
) -> Vec<T> {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1);
    let mut results: Vec<Option<T>> = Vec::new();
    results.resize_with(inputs.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                let value = work(&inputs[i]);
                slots.lock().unwrap()[i] = Some(value);
            });
        }
    });
    results.into_iter().map(|v| v.unwrap()).collect()
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<i32, Failure> {
    match command {
        Command::SmRun { file, run_opts, out } | Command::SmRender { file, run_opts, out } => {
            let text = read_file(&file)?;
            let (machine, initial) =
                parse_machine_text(&text).map_err(|errs| usage(render_errors(&file, &errs)))?;
            let limits = run_opts.limits().map_err(usage)?;
            let d = run(&machine, &initial, &limits)
                .map_err(|e| usage(format!("{}: {e}", file.display())))?;
            export(&d, &out, io)?;
            Ok(budget_check(&d, io))
        }
        Command::TmCompile { file, input, out } => {
            let tm = load_tm(&file)?;
            let (sm, cfg) = compile_tm(&tm, &input).map_err(|e| usage(e.to_string()))?;
            write_output(&out, &agc::serialize_machine(&sm, &cfg), io)?;
            Ok(EXIT_OK)
        }
        Command::TmRun { file, input, step_limit } => {
            let tm = load_tm(&file)?;
            let outcome =
                run_tm_direct(&tm, &input, step_limit).map_err(|e| usage(e.to_string()))?;
            io.out(&format!(
                "{:?} in state {} after {} steps; tape: {}",
                outcome.verdict,
                outcome.final_state,
                outcome.steps,
                outcome.final_tape.iter().collect::<String>()
            ));
            Ok(EXIT_OK)
        }
        Command::TmVerify { file, inputs, inputs_file, all_up_to, run_opts } => {
            let tm = load_tm(&file)?;
            let inputs = gather_inputs(inputs, inputs_file, all_up_to)?;
            let limits = run_opts.limits().map_err(usage)?;
            let results = parallel_map(&inputs, |input| verify_tm_input(&tm, input, &limits));
            report_verification(&inputs, &results, io)
        }
        Command::AtmCompile { file, input, out } => {
            let atm = load_atm(&file)?;
            let (sm, cfg) = compile_atm(&atm, &input, &CompileOptions::default())
                .map_err(|e| usage(e.to_string()))?;
            write_output(&out, &agc::serialize_machine(&sm, &cfg), io)?;
            Ok(EXIT_OK)
        }
        Command::AtmRun { file, input, run_opts } => {
            let atm = load_atm(&file)?;
            let limits = run_opts.limits().map_err(usage)?;
            let (sm, cfg) = compile_atm(&atm, &input, &CompileOptions::default())
                .map_err(|e| usage(e.to_string()))?;
            let d = run(&sm, &cfg, &limits).map_err(|e| usage(e.to_string()))?;
            if d.halt != HaltReason::Quiescent {
                io.err(&format!("run halted early: {:?}", d.halt));
                return Ok(EXIT_BUDGET);
            }
            match decode_atm_result(&d, &atm) {
                Ok(true) => io.out("Yes"),
                Ok(false) => io.out("No"),
                Err(e) => return Err(usage(e.to_string())),
            }
            Ok(EXIT_OK)
        }
        Command::AtmVerify { file, inputs, inputs_file, all_up_to, run_opts } => {
            let atm = load_atm(&file)?;
            let inputs = gather_inputs(inputs, inputs_file, all_up_to)?;
            let limits = run_opts.limits().map_err(usage)?;
            let results = parallel_map(&inputs, |input| verify_atm_input(&atm, input, &limits));
            report_verification(&inputs, &results, io)
        }
        Command::Stats { file, input } => {
            let is_atm = file.extension().is_some_and(|e| e == "atm");
            let report = if is_atm {
                let atm = load_atm(&file)?;
                let (sm, _) = compile_atm(&atm, &input, &CompileOptions::default())
                    .map_err(|e| usage(e.to_string()))?;
                let tree = eval_atm_direct(&atm, &input, &TreeLimits::default())
                    .ok()
                    .map(|(_, t)| t);
                machine_stats(
                    &sm,
                    &StatsSource::Atm {
                        atm: &atm,
                        tree: tree.as_ref(),
                    },
                )
            } else {
                let tm = load_tm(&file)?;
                let (sm, _) = compile_tm(&tm, &input).map_err(|e| usage(e.to_string()))?;
                machine_stats(&sm, &StatsSource::Tm(&tm))
            };
            io.out(&format!("meta-signals: {}", report.metasignal_count));
            io.out(&format!("rules: {}", report.rule_count));
            io.out(&format!(
                "predicted 2|Q|+|G|+5: {}{}",
                report.predicted_tm_count,
                if report.metasignal_count == report.predicted_tm_count {
                    " (exact)"
                } else {
                    ""
                }
            ));
            io.out(&format!("static depth: {}", report.static_depth));
            if let Some(d) = report.dynamic_depth {
                io.out(&format!("dynamic depth: {d}"));
            }
            io.out(&format!("branch bound 2^(d-1): {}", report.branch_bound));
            Ok(EXIT_OK)
        }
    }
}

/// One verification result. Exposed so tests can drive the exit-code
/// mapping with injected mismatches.
pub enum VerifyOutcome {
    Match,
    Mismatch(String),
    Error(String),
}

fn verify_tm_input(tm: &TuringMachine, input: &str, limits: &RunLimits) -> VerifyOutcome {
    let oracle = match run_tm_direct(tm, input, 100_000) {
        Ok(o) => o,
        Err(e) => return VerifyOutcome::Error(format!("interpreter: {e}")),
    };
    verify_tm_against(tm, input, limits, &oracle)
}

/// Compares the compiled run against a given interpreter outcome.
pub fn verify_tm_against(
    tm: &TuringMachine,
    input: &str,
    limits: &RunLimits,
    oracle: &agc::tm::TmOutcome,
) -> VerifyOutcome {
    let compiled = compile_tm(tm, input).and_then(|(sm, cfg)| {
        run(&sm, &cfg, limits)
            .map_err(|e| agc::tm::TmError::Invalid(e.to_string()))
            .map(|d| decode_tm_result(&d, tm))
    });
    match compiled {
        Ok(Ok((verdict, state, tape)))
            if verdict == oracle.verdict && state == oracle.final_state && tape == oracle.final_tape =>
        {
            VerifyOutcome::Match
        }
        Ok(Ok((verdict, state, _))) => VerifyOutcome::Mismatch(format!(
            "compiled gave {verdict:?}/{state}, interpreter {:?}/{}",
            oracle.verdict, oracle.final_state
        )),
        Ok(Err(e)) => VerifyOutcome::Error(format!("decode: {e}")),
        Err(e) => VerifyOutcome::Error(e.to_string()),
    }
}

fn verify_atm_input(atm: &AlternatingTm, input: &str, limits: &RunLimits) -> VerifyOutcome {
    let want = match eval_atm_direct(atm, input, &TreeLimits::default()) {
        Ok((v, _)) => v,
        Err(e) => return VerifyOutcome::Error(format!("oracle: {e}")),
    };
    let got = compile_atm(atm, input, &CompileOptions::default())
        .map_err(|e| e.to_string())
        .and_then(|(sm, cfg)| run(&sm, &cfg, limits).map_err(|e| e.to_string()))
        .and_then(|d| decode_atm_result(&d, atm).map_err(|e| e.to_string()));
    match got {
        Ok(v) if v == want => VerifyOutcome::Match,
        Ok(v) => VerifyOutcome::Mismatch(format!("compiled gave {v}, oracle {want}")),
        Err(e) => VerifyOutcome::Error(e),
    }
}

fn report_verification(
    inputs: &[String],
    results: &[VerifyOutcome],
    io: &mut Io<'_>,
) -> Result<i32, Failure> {
    verification_exit(inputs, results, io)
}

/// Zero exactly when every pair matched; mismatches print per input and
/// exit 4; oracle or engine errors are usage failures.
fn verification_exit(
    inputs: &[String],
    results: &[VerifyOutcome],
    io: &mut Io<'_>,
) -> Result<i32, Failure> {
    let mut mismatches = 0;
    for (input, result) in inputs.iter().zip(results) {
        match result {
            VerifyOutcome::Match => {}
            VerifyOutcome::Mismatch(detail) => {
                mismatches += 1;
                io.err(&format!("mismatch on {input:?}: {detail}"));
            }
            VerifyOutcome::Error(detail) => {
                return Err(usage(format!("verification failed on {input:?}: {detail}")));
            }
        }
    }
    if mismatches == 0 {
        io.out(&format!("verified {} inputs, all match", inputs.len()));
        Ok(EXIT_OK)
    } else {
        io.err(&format!("{mismatches} of {} inputs mismatched", inputs.len()));
        Ok(EXIT_MISMATCH)
    }
}
