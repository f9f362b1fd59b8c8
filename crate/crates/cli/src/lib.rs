//! `wsync` command dispatch.
//!
//! Exit codes: 0 success or passed check, 1 failed check, 2 input error,
//! 3 search budget exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use wsync_core::analysis::{self, SearchConfig, DEFAULT_BUDGET};
use wsync_core::format::{self, PaDocument};
use wsync_core::{semantics, word_to_string, CheckReport, Letter, NormTrace, PaError, Value1Instance, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wsync", version, about = "Exact probabilistic automata toolkit")]
#[command(after_help = "Words are letter tokens separated by '.', e.g. a.b.$; the empty string is the empty word.\n\
In files carrying construction roles, '$' and '#' stand for the designated letters.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a .pa file is a well-formed automaton.
    Validate { file: PathBuf },
    /// Print the distribution reached after reading a word.
    Run {
        file: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Print the acceptance probability of a word.
    Accept {
        file: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Print the norm trace of a word as CSV.
    Trace {
        file: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Norm trace of stem.loop^reps.
    Lasso {
        file: PathBuf,
        #[arg(long)]
        stem: String,
        #[arg(long = "loop")]
        cycle: String,
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build the lifted automaton (accepting sink, rejecting sink, fresh $).
    Lift {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Accept a non-Dirac initial distribution.
        #[arg(long)]
        relaxed: bool,
    },
    /// Build the twin automaton from a lifted one.
    Twin {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Check the reset identity on v1.#.v2.
    #[command(name = "check-p1")]
    CheckP1 {
        file: PathBuf,
        #[arg(long)]
        v1: String,
        #[arg(long)]
        v2: String,
    },
    /// Check twin halving on a word over the source alphabet.
    #[command(name = "check-p2")]
    CheckP2 {
        lifted: PathBuf,
        twin: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Exhaustive best acceptance probability up to a length bound.
    Search {
        file: PathBuf,
        #[arg(long = "max-len")]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        parallel: bool,
    },
    /// Find words u_1..u_k with P(u_i) > 1 - 2^-i.
    Schedule {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long = "max-len")]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check checkpoint norms of w_1.#.w_2.#...#.w_k against 1 - 2^-i.
    Certify {
        twin: PathBuf,
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<String>,
    },
    /// Check absorption into {q_n, q^_n} after a $.
    Absorb {
        twin: PathBuf,
        #[arg(long)]
        prefix: String,
        #[arg(long)]
        horizon: usize,
    },
    /// Check that no norm exceeds 1/2 on a $-free word.
    Halfbound {
        twin: PathBuf,
        #[arg(long)]
        word: String,
    },
}

enum Failure {
    Core(PaError),
    Io(String),
}

impl From<PaError> for Failure {
    fn from(e: PaError) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<i32, Failure>;

fn load(path: &Path) -> Result<PaDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    format::parse_document(&text).map_err(|e| match e {
        PaError::Syntax { line, column, message } => {
            Failure::Io(format!("{}:{line}:{column}: {message}", path.display()))
        }
        other => Failure::Core(other),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Splits a `.`-separated word; `$` and `#` fall back to the document's
/// designated letters when no letter carries that literal name.
fn parse_word(doc: &PaDocument, tokens: &str) -> Word {
    wsync_core::word(tokens)
        .into_iter()
        .map(|l| {
            if doc.pa.letter(l.as_str()).is_ok() {
                return l;
            }
            let alias = match l.as_str() {
                "$" => doc.lift.as_ref().map(|r| r.dollar.clone()),
                "#" => doc.twin.as_ref().map(|r| r.hash.clone()),
                _ => None,
            };
            alias.map(Letter).unwrap_or(l)
        })
        .collect()
}

fn show_word(w: &[Letter]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        word_to_string(w)
    }
}

fn report(out: &mut dyn Write, r: &CheckReport) -> Outcome {
    let _ = writeln!(out, "{r}");
    Ok(if r.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn emit_trace(out: &mut dyn Write, doc: &PaDocument, trace: &NormTrace, csv: Option<&Path>) -> Outcome {
    match csv {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            format::write_trace_csv(&doc.pa, trace, file)?;
            let norms: Vec<String> = trace.norms().iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "norms: {}", norms.join(" "));
        }
        None => format::write_trace_csv(&doc.pa, trace, &mut *out)?,
    }
    Ok(EXIT_OK)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Validate { file } => {
            let text = fs::read_to_string(&file).map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
            match format::parse_document(&text) {
                Ok(_) => {
                    let _ = writeln!(out, "ok");
                    Ok(EXIT_OK)
                }
                Err(PaError::Invalid(r)) => {
                    let _ = writeln!(out, "invalid:\n{r}");
                    Ok(EXIT_CHECK_FAILED)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Run { file, word } => {
            let doc = load(&file)?;
            let w = parse_word(&doc, &word);
            let dist = semantics::outcome(&doc.pa, &w)?.pop().expect("nonempty outcome");
            for (s, p) in dist.entries() {
                let _ = writeln!(out, "{} = {p}", doc.pa.state_name(s));
            }
            Ok(EXIT_OK)
        }
        Command::Accept { file, word } => {
            let doc = load(&file)?;
            let w = parse_word(&doc, &word);
            let _ = writeln!(out, "{}", semantics::acceptance_probability(&doc.pa, &w)?);
            Ok(EXIT_OK)
        }
        Command::Trace { file, word, csv } => {
            let doc = load(&file)?;
            let trace = semantics::norm_trace(&doc.pa, &parse_word(&doc, &word))?;
            emit_trace(out, &doc, &trace, csv.as_deref())
        }
        Command::Lasso { file, stem, cycle, reps, csv } => {
            let doc = load(&file)?;
            let trace = semantics::lasso_trace(&doc.pa, &parse_word(&doc, &stem), &parse_word(&doc, &cycle), reps)?;
            emit_trace(out, &doc, &trace, csv.as_deref())
        }
        Command::Lift { file, output, relaxed } => {
            let doc = load(&file)?;
            let b = if relaxed { Value1Instance::relaxed(doc.pa)? } else { Value1Instance::new(doc.pa)? };
            let a = wsync_core::lift(&b)?;
            write_file(&output, &format::serialize_document(&PaDocument::from_lifted(&a)))?;
            let _ = writeln!(out, "lifted automaton with {} states written to {}", a.pa().num_states(), output.display());
            Ok(EXIT_OK)
        }
        Command::Twin { file, output } => {
            let a = load(&file)?.lifted()?;
            let c = wsync_core::twin(&a)?;
            write_file(&output, &format::serialize_document(&PaDocument::from_twin(&c)))?;
            let _ = writeln!(out, "twin automaton with {} states written to {}", c.pa().num_states(), output.display());
            Ok(EXIT_OK)
        }
        Command::CheckP1 { file, v1, v2 } => {
            let doc = load(&file)?;
            let c = doc.twinned()?;
            report(out, &wsync_core::check_p1(&c, &parse_word(&doc, &v1), &parse_word(&doc, &v2))?)
        }
        Command::CheckP2 { lifted, twin, word } => {
            let adoc = load(&lifted)?;
            let cdoc = load(&twin)?;
            let (a, c) = (adoc.lifted()?, cdoc.twinned()?);
            report(out, &wsync_core::check_p2(&a, &c, &parse_word(&cdoc, &word))?)
        }
        Command::Search { file, max_len, budget, parallel } => {
            let b = Value1Instance::relaxed(load(&file)?.pa)?;
            let r = analysis::bounded_value_search(&b, max_len, &SearchConfig { budget, parallel })?;
            let _ = writeln!(out, "best_word = {}", show_word(&r.best_word));
            let _ = writeln!(out, "best_prob = {}", r.best_prob);
            let _ = writeln!(out, "explored = {}", r.explored);
            let _ = writeln!(out, "exhausted = {}", r.exhausted);
            Ok(EXIT_OK)
        }
        Command::Schedule { file, k, max_len, budget } => {
            let b = Value1Instance::relaxed(load(&file)?.pa)?;
            let r = analysis::witness_schedule_search(&b, k, max_len, &SearchConfig { budget, parallel: false })?;
            let _ = write!(out, "{r}");
            match r {
                analysis::ScheduleSearch::Found(_) => Ok(EXIT_OK),
                analysis::ScheduleSearch::NotFound { .. } => {
                    let _ = writeln!(out);
                    Ok(EXIT_CHECK_FAILED)
                }
            }
        }
        Command::Certify { twin, schedule } => {
            let doc = load(&twin)?;
            let c = doc.twinned()?;
            let schedule: Vec<Word> = schedule.iter().map(|w| parse_word(&doc, w)).collect();
            let cert = analysis::certificate_check(&c, &schedule)?;
            let _ = writeln!(out, "{cert}");
            Ok(if cert.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Absorb { twin, prefix, horizon } => {
            let doc = load(&twin)?;
            let c = doc.twinned()?;
            report(out, &analysis::dollar_absorption_check(&c, &parse_word(&doc, &prefix), horizon)?)
        }
        Command::Halfbound { twin, word } => {
            let doc = load(&twin)?;
            let c = doc.twinned()?;
            report(out, &analysis::half_bound_check(&c, &parse_word(&doc, &word))?)
        }
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Core(PaError::BudgetExceeded { required, budget })) => {
            let _ = writeln!(err, "error: {}", PaError::BudgetExceeded { required, budget });
            EXIT_BUDGET
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}
