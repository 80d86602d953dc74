//! `wfnorm`: command-line front end.
//!
//! Exit status is 0 on success, 1 when the library reports an error (its
//! kind is printed on standard error) and 2 on usage errors.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use wfnorm::decompose::{decompose_auto, tripartite, Tripartite, TripartiteDecomposition};
use wfnorm::format::{format_word, parse_automaton, parse_word, print_automaton, print_tropical, AutomatonFile};
use wfnorm::normalize::normalize;
use wfnorm::numerics::{format_scalar, parse_rational, Backend, Rational, DEFAULT_TOLERANCE};
use wfnorm::oracle::{bounded_equiv, exact_equiv, EquivalenceReport};
use wfnorm::sampling::{sample_pa, sample_sre, SampleBatch};
use wfnorm::sre::{parse_sre, print_sre, state_eliminate, thompson};
use wfnorm::tropical::trop_decompose;
use wfnorm::{Error, Scalar, Sre, WeightedAutomaton};

/// Margin used by `decompose` when the mass diverges and no `--epsilon` is
/// given.
const DEFAULT_EPSILON: (i64, i64) = (1, 4);

#[derive(Parser)]
#[command(name = "wfnorm", version, about = "Normal forms for weighted automata")]
struct Cli {
    /// Print machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weight of a word.
    Eval { file: PathBuf, word: String },
    /// Total mass, or "diverges".
    Mass { file: PathBuf },
    /// Spectral radius of the joint matrix and the exact finiteness verdict.
    Rho {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Normalise to a probabilistic automaton and print the mass.
    Normalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Local-stochasticity report.
    Check { file: PathBuf },
    /// Stochastic regular expression of a probabilistic automaton.
    ToSre { file: PathBuf },
    /// Probabilistic automaton of a stochastic regular expression.
    FromSre {
        expr: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Growth rate, mass and expression with f(w) = ζ^|w| Z [[r]](w).
    Decompose {
        file: PathBuf,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cycle mean, cheapest cost and residual with f(w) = |w| γ + c0 + f_N(w).
    TropDecompose {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random words from a probabilistic automaton or an expression file.
    Sample {
        file: PathBuf,
        #[arg(short = 'n', long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Whether two automata assign every word the same weight.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, conflicts_with = "exact")]
        max_len: Option<usize>,
        #[arg(long)]
        exact: bool,
    },
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Domain(e) => e.kind(),
            Failure::Io(_) => "Io",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Domain(e) => e.to_string(),
            Failure::Io(m) => m.clone(),
        }
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

/// A report in both renderings; the active one is printed.
struct Report {
    text: String,
    json: Value,
}

struct Ctx {
    json: bool,
}

/// Print to standard output, ignoring a closed pipe.
fn say(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

impl Ctx {
    fn emit(&self, r: Report) {
        if self.json {
            say(&format!("{}\n", r.json));
        } else {
            say(&format!("{}\n", r.text));
        }
    }

    /// Write `content` to `output`, or to standard output when there is none;
    /// the report then goes to standard error.
    fn emit_with_artifact(&self, r: Report, content: &str, output: Option<&Path>) -> Outcome {
        match output {
            Some(path) => {
                fs::write(path, content).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                self.emit(r);
            }
            None => {
                say(content);
                if self.json {
                    eprintln!("{}", r.json);
                } else {
                    eprintln!("{}", r.text);
                }
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Outcome<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Outcome<AutomatonFile> {
    Ok(parse_automaton(&read(path)?)?)
}

fn scalar_json<S: Scalar>(v: &S) -> Value {
    match S::BACKEND {
        Backend::Rational => Value::String(format_scalar(v)),
        Backend::Float => json!(v.to_f64()),
    }
}

fn not_tropical(command: &str) -> Failure {
    Failure::Domain(Error::Format(format!("{command} needs a nonneg-real automaton")))
}

fn eval_weighted<S: Scalar>(a: &WeightedAutomaton<S>, word: &str) -> Outcome<Report> {
    let w = parse_word(a.alphabet(), word)?;
    let v = a.evaluate(&w)?;
    Ok(Report {
        text: format_scalar(&v),
        json: json!({"word": format_word(a.alphabet(), &w), "weight": scalar_json(&v)}),
    })
}

fn eval(file: &Path, word: &str) -> Outcome<Report> {
    match load(file)? {
        AutomatonFile::Rational(a) => eval_weighted(&a, word),
        AutomatonFile::Float(a) => eval_weighted(&a, word),
        AutomatonFile::Tropical(t) => {
            let w = parse_word(t.alphabet(), word)?;
            let v = t.evaluate(&w)?;
            Ok(Report {
                text: v.to_string(),
                json: json!({"word": format_word(t.alphabet(), &w), "weight": v.to_string()}),
            })
        }
    }
}

fn mass_of<S: Scalar>(a: &WeightedAutomaton<S>) -> Outcome<Report> {
    match a.total_mass() {
        Ok(m) => Ok(Report {
            text: format_scalar(&m),
            json: json!({"mass": scalar_json(&m), "diverges": false}),
        }),
        Err(Error::MassDiverges) => Ok(Report {
            text: "diverges".into(),
            json: json!({"mass": null, "diverges": true}),
        }),
        Err(e) => Err(e.into()),
    }
}

fn mass(file: &Path) -> Outcome<Report> {
    match load(file)? {
        AutomatonFile::Rational(a) => mass_of(&a),
        AutomatonFile::Float(a) => mass_of(&a),
        AutomatonFile::Tropical(_) => Err(not_tropical("mass")),
    }
}

fn rho_of<S: Scalar>(a: &WeightedAutomaton<S>, tol: f64) -> Outcome<Report> {
    let rho = a.spectral_radius(tol)?;
    let finite = a.has_finite_spectral_radius_below_one();
    Ok(Report {
        text: format!("rho {rho}\nfinite-mass {finite}"),
        json: json!({"rho": rho, "tolerance": tol, "finite_mass": finite}),
    })
}

fn rho(file: &Path, tol: f64) -> Outcome<Report> {
    match load(file)? {
        AutomatonFile::Rational(a) => rho_of(&a, tol),
        AutomatonFile::Float(a) => rho_of(&a, tol),
        AutomatonFile::Tropical(_) => Err(not_tropical("rho")),
    }
}

fn normalize_of<S: Scalar>(ctx: &Ctx, a: &WeightedAutomaton<S>, output: Option<&Path>) -> Outcome {
    let n = normalize(a)?;
    let report = Report {
        text: format!("Z {}", format_scalar(&n.mass)),
        json: json!({
            "mass": scalar_json(&n.mass),
            "kept": n.kept,
            "future_mass": n.future_mass.iter().map(scalar_json).collect::<Vec<_>>(),
        }),
    };
    ctx.emit_with_artifact(report, &print_automaton(&n.pa), output)
}

fn check_of<S: Scalar>(a: &WeightedAutomaton<S>) -> (Report, bool, Vec<usize>) {
    let r = a.check_local_stochasticity();
    let mut text = vec![format!(
        "initial sum {} {}",
        format_scalar(&r.initial_sum),
        if r.initial_ok { "ok" } else { "FAIL" }
    )];
    for row in &r.rows {
        text.push(format!(
            "q{} total {} residual {} {}",
            row.state,
            format_scalar(&row.total),
            format_scalar(&row.residual),
            if row.ok { "ok" } else { "FAIL" }
        ));
    }
    let failing = r.failing_states();
    text.push(if r.passed() {
        "locally stochastic".into()
    } else {
        format!(
            "not locally stochastic: {}",
            failing.iter().map(|q| format!("q{q}")).collect::<Vec<_>>().join(", ")
        )
    });
    let json = json!({
        "passed": r.passed(),
        "initial_sum": scalar_json(&r.initial_sum),
        "initial_ok": r.initial_ok,
        "failing": failing.iter().map(|q| format!("q{q}")).collect::<Vec<_>>(),
        "rows": r.rows.iter().map(|row| json!({
            "state": format!("q{}", row.state),
            "total": scalar_json(&row.total),
            "residual": scalar_json(&row.residual),
            "ok": row.ok,
        })).collect::<Vec<_>>(),
    });
    (Report { text: text.join("\n"), json }, r.passed(), failing)
}

fn check(ctx: &Ctx, file: &Path) -> Outcome {
    let (report, passed, failing) = match load(file)? {
        AutomatonFile::Rational(a) => check_of(&a),
        AutomatonFile::Float(a) => check_of(&a),
        AutomatonFile::Tropical(_) => return Err(not_tropical("check")),
    };
    ctx.emit(report);
    if passed {
        Ok(())
    } else {
        let states = failing.iter().map(|q| format!("q{q}")).collect::<Vec<_>>();
        let detail = if states.is_empty() { "initial".into() } else { states.join(", ") };
        Err(Error::NotStochastic(detail).into())
    }
}

fn sre_report<S: Scalar>(r: &Sre<S>) -> Report {
    let text = print_sre(r);
    Report {
        json: json!({"sre": text, "size": r.size()}),
        text,
    }
}

fn to_sre(file: &Path) -> Outcome<Report> {
    match load(file)? {
        AutomatonFile::Rational(a) => Ok(sre_report(&state_eliminate(&a)?)),
        AutomatonFile::Float(a) => Ok(sre_report(&state_eliminate(&a)?)),
        AutomatonFile::Tropical(_) => Err(not_tropical("to-sre")),
    }
}

fn read_sre(text: &str) -> Outcome<Sre<Rational>> {
    let r: Sre<Rational> = parse_sre(text.trim())?;
    r.validate()?;
    Ok(r)
}

fn from_sre(ctx: &Ctx, expr: &str, output: Option<&Path>) -> Outcome {
    let pa = thompson(&read_sre(expr)?)?;
    let report = Report {
        text: format!("states {}", pa.state_count()),
        json: json!({"states": pa.state_count(), "alphabet": pa.alphabet()}),
    };
    ctx.emit_with_artifact(report, &print_automaton(&pa), output)
}

fn decomposition_report<S: Scalar>(d: &TripartiteDecomposition<S>) -> Report {
    let eps = d.epsilon.as_ref().map(format_scalar);
    Report {
        text: format!(
            "zeta {}\nZ {}\nrho {}\nepsilon {}",
            format_scalar(&d.zeta),
            format_scalar(&d.mass),
            d.rho,
            eps.clone().unwrap_or_else(|| "none".into())
        ),
        json: json!({
            "zeta": scalar_json(&d.zeta),
            "mass": scalar_json(&d.mass),
            "rho": d.rho,
            "epsilon": eps,
            "exact": S::is_exact(),
            "sre": print_sre(&d.sre),
        }),
    }
}

fn decompose(ctx: &Ctx, file: &Path, epsilon: Option<&str>, output: Option<&Path>) -> Outcome {
    let eps = epsilon
        .map(|e| {
            parse_rational(e)
                .filter(|r| r.is_positive())
                .ok_or_else(|| Failure::Domain(Error::Format(format!("epsilon must be a positive number, got {e:?}"))))
        })
        .transpose()?;
    let default = Rational::from_ratio(DEFAULT_EPSILON.0, DEFAULT_EPSILON.1);
    let (report, sre) = match load(file)? {
        AutomatonFile::Rational(a) => {
            let d = match (decompose_auto(&a, eps.as_ref()), &eps) {
                (Err(Error::MassDiverges), None) => decompose_auto(&a, Some(&default))?,
                (other, _) => other?,
            };
            match d {
                Tripartite::Exact(d) => (decomposition_report(&d), print_sre(&d.sre)),
                Tripartite::Float(d) => (decomposition_report(&d), print_sre(&d.sre)),
            }
        }
        AutomatonFile::Float(a) => {
            let d = match (tripartite(&a, eps.as_ref()), &eps) {
                (Err(Error::MassDiverges), None) => tripartite(&a, Some(&default))?,
                (other, _) => other?,
            };
            (decomposition_report(&d), print_sre(&d.sre))
        }
        AutomatonFile::Tropical(_) => return Err(not_tropical("decompose")),
    };
    ctx.emit_with_artifact(report, &format!("{sre}\n"), output)
}

fn trop(ctx: &Ctx, file: &Path, output: Option<&Path>) -> Outcome {
    let AutomatonFile::Tropical(t) = load(file)? else {
        return Err(Error::Format("trop-decompose needs a tropical automaton".into()).into());
    };
    let d = trop_decompose(&t)?;
    let all = d.gamma_all_cycles.as_ref().map(format_scalar);
    let mut text = format!("gamma {}\nc0 {}", format_scalar(&d.gamma), format_scalar(&d.c0));
    if d.acyclic {
        text.push_str("\nacyclic true");
    }
    if let Some(g) = &all {
        text.push_str(&format!("\ngamma-all-cycles {g}"));
    }
    let report = Report {
        text,
        json: json!({
            "gamma": format_scalar(&d.gamma),
            "c0": format_scalar(&d.c0),
            "acyclic": d.acyclic,
            "gamma_all_cycles": all,
            "kept": d.kept,
        }),
    };
    ctx.emit_with_artifact(report, &print_tropical(&d.residual), output)
}

fn batch_report(batch: &SampleBatch, alphabet: &[String]) -> Report {
    let lines: Vec<String> = batch
        .counts
        .iter()
        .map(|(w, c)| format!("{c}\t{}", format_word(alphabet, w)))
        .collect();
    Report {
        text: lines.join("\n"),
        json: json!({
            "seed": batch.seed,
            "generator": batch.generator,
            "draws": batch.draws,
            "counts": batch.counts.iter().map(|(w, c)| json!({
                "word": format_word(alphabet, w),
                "count": c,
            })).collect::<Vec<_>>(),
        }),
    }
}

fn sample(file: &Path, count: u64, seed: u64) -> Outcome<Report> {
    let text = read(file)?;
    if !text.trim_start().starts_with('{') {
        let r = read_sre(&text)?;
        return Ok(batch_report(&sample_sre(&r, count, seed)?, &r.symbols()));
    }
    match parse_automaton(&text)? {
        AutomatonFile::Rational(a) => Ok(batch_report(&sample_pa(&a, count, seed)?, a.alphabet())),
        AutomatonFile::Float(a) => Ok(batch_report(&sample_pa(&a, count, seed)?, a.alphabet())),
        AutomatonFile::Tropical(_) => Err(not_tropical("sample")),
    }
}

fn equiv_report<S: Scalar>(r: &EquivalenceReport<S>, method: &str, alphabet: &[String]) -> Report {
    let mut text = if r.equivalent { "equivalent".to_string() } else { "not equivalent".to_string() };
    let witness = r.divergence.as_ref().map(|d| {
        let word = format_word(alphabet, &d.word);
        text.push_str(&format!(
            "\nwitness {word}: {} vs {}",
            format_scalar(&d.left),
            format_scalar(&d.right)
        ));
        json!({"word": word, "left": scalar_json(&d.left), "right": scalar_json(&d.right)})
    });
    Report {
        text,
        json: json!({"equivalent": r.equivalent, "method": method, "witness": witness}),
    }
}

fn equiv_of<S: Scalar>(
    a: &WeightedAutomaton<S>,
    b: &WeightedAutomaton<S>,
    max_len: Option<usize>,
    exact: bool,
) -> Outcome<Report> {
    let mut alphabet = a.alphabet().to_vec();
    alphabet.extend(b.alphabet().iter().filter(|s| !a.alphabet().contains(s)).cloned());
    match max_len {
        Some(l) => Ok(equiv_report(&bounded_equiv(a, b, l)?, &format!("bounded:{l}"), &alphabet)),
        None if exact || S::is_exact() => Ok(equiv_report(&exact_equiv(a, b)?, "exact", &alphabet)),
        None => {
            let l = a.state_count() + b.state_count();
            Ok(equiv_report(&bounded_equiv(a, b, l)?, &format!("bounded:{l}"), &alphabet))
        }
    }
}

fn equiv(left: &Path, right: &Path, max_len: Option<usize>, exact: bool) -> Outcome<Report> {
    match (load(left)?, load(right)?) {
        (AutomatonFile::Rational(a), AutomatonFile::Rational(b)) => equiv_of(&a, &b, max_len, exact),
        (AutomatonFile::Rational(a), AutomatonFile::Float(b)) => equiv_of(&a.to_f64(), &b, max_len, exact),
        (AutomatonFile::Float(a), AutomatonFile::Rational(b)) => equiv_of(&a, &b.to_f64(), max_len, exact),
        (AutomatonFile::Float(a), AutomatonFile::Float(b)) => equiv_of(&a, &b, max_len, exact),
        _ => Err(not_tropical("equiv")),
    }
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx { json: cli.json };
    match cli.command {
        Command::Eval { file, word } => ctx.emit(eval(&file, &word)?),
        Command::Mass { file } => ctx.emit(mass(&file)?),
        Command::Rho { file, tol } => ctx.emit(rho(&file, tol)?),
        Command::Normalize { file, output } => match load(&file)? {
            AutomatonFile::Rational(a) => normalize_of(&ctx, &a, output.as_deref())?,
            AutomatonFile::Float(a) => normalize_of(&ctx, &a, output.as_deref())?,
            AutomatonFile::Tropical(_) => return Err(not_tropical("normalize")),
        },
        Command::Check { file } => check(&ctx, &file)?,
        Command::ToSre { file } => ctx.emit(to_sre(&file)?),
        Command::FromSre { expr, output } => from_sre(&ctx, &expr, output.as_deref())?,
        Command::Decompose { file, epsilon, output } => {
            decompose(&ctx, &file, epsilon.as_deref(), output.as_deref())?
        }
        Command::TropDecompose { file, output } => trop(&ctx, &file, output.as_deref())?,
        Command::Sample { file, count, seed } => ctx.emit(sample(&file, count, seed)?),
        Command::Equiv {
            left,
            right,
            max_len,
            exact,
        } => ctx.emit(equiv(&left, &right, max_len, exact)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if json {
                eprintln!("{}", json!({"error": f.kind(), "message": f.message()}));
            } else {
                eprintln!("error[{}]: {}", f.kind(), f.message());
            }
            ExitCode::from(1)
        }
    }
}
