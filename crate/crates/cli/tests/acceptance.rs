//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or overruns its time budget.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use wfnorm::decompose::{tripartite, TripartiteDecomposition};
use wfnorm::format::{parse_automaton, parse_weighted, AutomatonFile};
use wfnorm::normalize::normalize;
use wfnorm::numerics::has_finite_mass;
use wfnorm::oracle::{bounded_equiv, exact_equiv, words};
use wfnorm::random;
use wfnorm::sampling::{chi_square_pa, heavy_words, sample_pa};
use wfnorm::sre::{parse_sre, partial_mass, state_eliminate, thompson, SreNode};
use wfnorm::tropical::{cycle_mean, min_cost, min_cycle_mean, trop_decompose, TropicalWeight};
use wfnorm::{Matrix, Rational, Scalar, Sre, WeightedAutomaton};

type Check = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Run the CLI; returns (exit code, stdout, stderr).
fn wfnorm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wfnorm"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// The running example, entered edge by edge.
fn running_example_by_hand() -> WeightedAutomaton<Rational> {
    WeightedAutomaton::builder(6, ["a", "b"])
        .initial(0, q(1, 1))
        .final_weight(4, q(1, 1))
        .transition(0, "a", 1, q(2, 5))
        .transition(0, "a", 2, q(3, 5))
        .transition(0, "a", 3, q(2, 1))
        .transition(0, "a", 5, q(1, 1))
        .transition(1, "b", 2, q(2, 5))
        .transition(2, "a", 1, q(2, 5))
        .transition(2, "a", 2, q(3, 5))
        .transition(2, "a", 3, q(2, 1))
        .transition(3, "b", 4, q(3, 1))
        .transition(5, "b", 5, q(1, 3))
        .transition(5, "a", 4, q(2, 1))
        .build()
        .unwrap()
}

/// Its normalised form, entered edge by edge from the hand-entered machine.
fn normal_form_by_hand() -> WeightedAutomaton<Rational> {
    WeightedAutomaton::builder(6, ["a", "b"])
        .initial(0, q(1, 1))
        .final_weight(4, q(1, 1))
        .transition(0, "a", 1, q(4, 28))
        .transition(0, "a", 2, q(15, 28))
        .transition(0, "a", 3, q(6, 28))
        .transition(0, "a", 5, q(3, 28))
        .transition(1, "b", 2, q(1, 1))
        .transition(2, "a", 1, q(4, 25))
        .transition(2, "a", 2, q(3, 5))
        .transition(2, "a", 3, q(6, 25))
        .transition(3, "b", 4, q(1, 1))
        .transition(5, "b", 5, q(1, 3))
        .transition(5, "a", 4, q(2, 3))
        .build()
        .unwrap()
}

const EXPRESSION: &str =
    "19/28:((4/19:ab + 15/19:a)(4/19:ab + 15/19:a)*[19/25])ab + 6/28:ab + 3/28:a(b)*[1/3]a";

fn expression() -> Sre<Rational> {
    let r: Sre<Rational> = parse_sre(EXPRESSION).unwrap();
    r.validate().unwrap();
    r
}

fn symbols(alphabet: &[String], w: &[usize]) -> Vec<String> {
    w.iter().map(|&k| alphabet[k].clone()).collect()
}

fn star_parameters(r: &Sre<Rational>, out: &mut Vec<Rational>) {
    match r.node() {
        SreNode::Empty | SreNode::Dirac(_) => {}
        SreNode::Choice { left, right, .. } | SreNode::Concat(left, right) => {
            star_parameters(left, out);
            star_parameters(right, out);
        }
        SreNode::Star { body, alpha } => {
            out.push(alpha.clone());
            star_parameters(body, out);
        }
    }
}

fn mass_is_28() -> Check {
    let file = data("running_example.json");
    let AutomatonFile::Rational(a) = parse_automaton(&std::fs::read_to_string(&file).unwrap()).unwrap() else {
        return Err("data file is not rational".into());
    };
    ensure(a == running_example_by_hand(), "data file differs from the hand-entered machine")?;
    let (code, out, err) = wfnorm(&["mass", file.to_str().unwrap()]);
    ensure(code == 0, format!("exit {code}: {err}"))?;
    ensure(out.trim() == "28", format!("mass printed as {out:?}"))?;
    ensure(running_example_by_hand().total_mass().unwrap() == q(28, 1), "library mass differs")?;
    Ok("mass 28".into())
}

fn normal_form_matches() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("pa.json");
    let (code, out, err) = wfnorm(&[
        "normalize",
        data("running_example.json").to_str().unwrap(),
        "-o",
        out_path.to_str().unwrap(),
    ]);
    ensure(code == 0, format!("exit {code}: {err}"))?;
    ensure(out.trim() == "Z 28", format!("printed {out:?}"))?;
    let pa: WeightedAutomaton<Rational> = parse_weighted(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    ensure(pa == normal_form_by_hand(), format!("normal form differs: {pa:?}"))?;
    let (code, out, err) = wfnorm(&["--json", "check", out_path.to_str().unwrap()]);
    ensure(code == 0, format!("check exit {code}: {err}"))?;
    let report: Value = serde_json::from_str(&out).unwrap();
    ensure(report["passed"] == Value::Bool(true), "check failed")?;
    let rows = report["rows"].as_array().unwrap();
    ensure(
        rows.len() == 6 && rows.iter().all(|r| r["residual"] == "0"),
        format!("residuals {rows:?}"),
    )?;
    ensure(report["initial_sum"] == "1", "initial sum")?;
    Ok("Z = 28, eleven edges equal the hand-entered machine, every residual 0".into())
}

fn expression_matches() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let pa_path = dir.path().join("pa.json");
    let (code, _, err) = wfnorm(&[
        "normalize",
        data("running_example.json").to_str().unwrap(),
        "-o",
        pa_path.to_str().unwrap(),
    ]);
    ensure(code == 0, err)?;
    let (code, out, err) = wfnorm(&["to-sre", pa_path.to_str().unwrap()]);
    ensure(code == 0, format!("exit {code}: {err}"))?;
    let produced: Sre<Rational> = parse_sre(out.trim()).map_err(|e| e.to_string())?;
    produced.validate().map_err(|e| e.to_string())?;
    let mut stars = Vec::new();
    star_parameters(&produced, &mut stars);
    stars.sort();
    ensure(stars == vec![q(1, 3), q(19, 25)], format!("star parameters {stars:?}"))?;
    let left = thompson(&produced).unwrap();
    let right = thompson(&expression()).unwrap();
    ensure(bounded_equiv(&left, &right, 8).unwrap().equivalent, "bounded comparison failed")?;
    ensure(exact_equiv(&left, &right).unwrap().equivalent, "exact comparison failed")?;
    Ok(format!("{} (stars 19/25, 1/3)", out.trim()))
}

fn kleene_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut largest = 0;
    for i in 0..100 {
        let pa = random::probabilistic_automaton(&mut rng, 1..=6, 1..=3);
        let r = state_eliminate(&pa).map_err(|e| format!("machine {i}: {e}"))?;
        let back = thompson(&r).map_err(|e| format!("machine {i}: {e}"))?;
        largest = largest.max(back.state_count());
        ensure(exact_equiv(&back, &pa).unwrap().equivalent, format!("machine {i} differs"))?;
    }
    Ok(format!("100 machines, largest round trip {largest} states"))
}

fn normalisation_preserves_weights() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut checked, mut machines, mut zero_mass) = (0usize, 0, 0);
    while machines < 100 {
        let a = random::finite_mass_automaton(&mut rng, 1..=6, 1..=3);
        // no accepting path: Z = 0 has no normal form
        if a.total_mass().unwrap() == q(0, 1) {
            zero_mass += 1;
            continue;
        }
        let i = machines;
        machines += 1;
        let n = normalize(&a).map_err(|e| format!("machine {i}: {e}"))?;
        let report = n.pa.check_local_stochasticity();
        ensure(
            report.initial_sum == q(1, 1) && report.rows.iter().all(|r| r.total == q(1, 1)),
            format!("machine {i}: rows do not sum to 1"),
        )?;
        for w in words(a.alphabet().len(), 6) {
            ensure(
                n.mass.clone() * n.pa.evaluate_indices(&w) == a.evaluate_indices(&w),
                format!("machine {i}: word {w:?}"),
            )?;
            checked += 1;
        }
    }
    Ok(format!("100 machines, {checked} words ({zero_mass} zero-mass draws skipped)"))
}

fn spectral_radius_of_running_example() -> Check {
    let (code, out, err) = wfnorm(&["--json", "rho", data("running_example.json").to_str().unwrap()]);
    ensure(code == 0, format!("exit {code}: {err}"))?;
    let report: Value = serde_json::from_str(&out).unwrap();
    let rho = report["rho"].as_f64().unwrap();
    // characteristic polynomial of the {q1, q2} block: x^2 - tr x + det
    let joint = running_example_by_hand().joint_matrix();
    let block = joint.submatrix(&[1, 2], &[1, 2]).to_f64();
    let tr = block.get(0, 0) + block.get(1, 1);
    let det = block.get(0, 0) * block.get(1, 1) - block.get(0, 1) * block.get(1, 0);
    let oracle = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
    ensure((oracle - 0.8).abs() < 1e-15, format!("oracle {oracle}"))?;
    ensure((rho - oracle).abs() <= 1e-8, format!("rho {rho}"))?;
    let certificate = has_finite_mass(&joint);
    ensure(report["finite_mass"] == Value::Bool(true) && certificate, "finiteness verdicts disagree")?;
    Ok(format!("rho {rho}, finite mass certified"))
}

fn relative_close(x: f64, y: f64) -> bool {
    x == y || (x - y).abs() <= 1e-9 * x.abs().max(y.abs())
}

fn tripartite_identity() -> Check {
    let hand = running_example_by_hand();
    let d: TripartiteDecomposition<Rational> = tripartite(&hand, Some(&q(1, 4))).map_err(|e| e.to_string())?;
    ensure(d.zeta == q(1, 1), format!("zeta {}", d.zeta))?;
    for w in words(2, 8) {
        let w = symbols(hand.alphabet(), &w);
        ensure(d.reconstruct(&w).unwrap() == hand.evaluate(&w).unwrap(), format!("word {w:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let a = random::divergent_automaton(&mut rng, 1..=5, 1..=2).to_f64();
        let d = tripartite(&a, Some(&q(1, 4))).map_err(|e| format!("machine {i}: {e}"))?;
        ensure(d.zeta >= 1.0, format!("machine {i}: zeta {}", d.zeta))?;
        for w in words(a.alphabet().len(), 6) {
            let w = symbols(a.alphabet(), &w);
            let (x, y) = (d.reconstruct(&w).unwrap(), a.evaluate(&w).unwrap());
            ensure(relative_close(x, y), format!("machine {i}, word {w:?}: {x} vs {y}"))?;
            if y != 0.0 {
                worst = worst.max((x - y).abs() / y.abs());
            }
        }
    }
    Ok(format!("exact on the running example, worst relative error {worst:.1e} on 20 machines"))
}

/// Minimum mean over simple cycles, each enumerated from its smallest vertex.
fn brute_cycle_mean(m: &Matrix<TropicalWeight>) -> Option<Rational> {
    fn extend(
        m: &Matrix<TropicalWeight>,
        start: usize,
        v: usize,
        cost: Rational,
        len: i64,
        seen: &mut [bool],
        best: &mut Option<Rational>,
    ) {
        for w in 0..m.rows() {
            let Some(c) = m.get(v, w).value() else { continue };
            let total = cost.clone() + c;
            if w == start {
                let mean = total / q(len + 1, 1);
                if best.as_ref().is_none_or(|b| mean < *b) {
                    *best = Some(mean);
                }
            } else if w > start && !seen[w] {
                seen[w] = true;
                extend(m, start, w, total, len + 1, seen, best);
                seen[w] = false;
            }
        }
    }
    let mut best = None;
    for s in 0..m.rows() {
        let mut seen = vec![false; m.rows()];
        seen[s] = true;
        extend(m, s, s, q(0, 1), 0, &mut seen, &mut best);
    }
    best
}

fn tropical_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut decomposed = 0;
    for i in 0..100 {
        let t = random::tropical_automaton(&mut rng, 1..=6, 1..=2);
        let joint = t.joint_matrix();
        ensure(
            min_cycle_mean(&joint) == brute_cycle_mean(&joint),
            format!("machine {i}: Karp differs from enumeration"),
        )?;
        let d = match trop_decompose(&t) {
            Ok(d) => d,
            Err(wfnorm::Error::EmptyLanguage) => continue,
            Err(e) => return Err(format!("machine {i}: {e}")),
        };
        decomposed += 1;
        for w in words(t.alphabet().len(), 6) {
            let expected = t.evaluate_indices(&w);
            let offset = q(w.len() as i64, 1) * &d.gamma + &d.c0;
            ensure(
                d.residual.evaluate_indices(&w).shift(&offset) == expected,
                format!("machine {i}: word {w:?}"),
            )?;
        }
        if !d.acyclic {
            ensure(cycle_mean(&d.residual) == Ok(q(0, 1)), format!("machine {i}: residual cycle mean"))?;
        }
        ensure(min_cost(&d.residual) == Ok(q(0, 1)), format!("machine {i}: residual min cost"))?;
    }
    Ok(format!("100 machines, {decomposed} with nonempty language"))
}

fn expression_mass_reaches_one() -> Check {
    let r = expression();
    let mut previous = q(0, 1);
    let mut reached = None;
    for l in 0..=60 {
        let m = partial_mass(&r, l).unwrap();
        ensure(m >= previous, format!("partial mass decreases at L = {l}"))?;
        if reached.is_none() && m >= q(99, 100) {
            reached = Some(l);
        }
        previous = m;
    }
    match reached {
        Some(l) => Ok(format!("partial mass >= 0.99 at L = {l}, monotone to 60")),
        None => Err(format!("partial mass at 60 is {}", previous.to_f64())),
    }
}

fn sampling_fit() -> Check {
    let pa = normal_form_by_hand();
    let batch = sample_pa(&pa, 100_000, 2024).unwrap();
    let events = heavy_words(&pa, &q(1, 1000)).unwrap();
    let ab = events.iter().find(|(w, _)| w == &[0, 1]).map(|(_, p)| p.clone());
    ensure(ab == Some(q(6, 28)), format!("P(ab) = {ab:?}"))?;
    let fit = chi_square_pa(&pa, &batch).unwrap();
    ensure(fit.passed, format!("{fit:?}"))?;
    ensure(batch == sample_pa(&pa, 100_000, 2024).unwrap(), "same seed, different batch")?;
    let path = data("normal_form.json");
    let run = || wfnorm(&["sample", path.to_str().unwrap(), "-n", "1000", "--seed", "9"]);
    let (first, second) = (run(), run());
    ensure(first.0 == 0 && first == second, "CLI batches differ")?;
    Ok(format!(
        "chi2 {:.1} < {:.1} ({} dof)",
        fit.statistic, fit.critical, fit.degrees_of_freedom
    ))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 10] = [
        ("running example mass", 1, mass_is_28),
        ("running example normal form", 1, normal_form_matches),
        ("running example expression", 5, expression_matches),
        ("Kleene round trip", 60, kleene_round_trip),
        ("normalisation preservation", 60, normalisation_preserves_weights),
        ("spectral radius", 1, spectral_radius_of_running_example),
        ("tripartite identity", 60, tripartite_identity),
        ("tropical identity", 60, tropical_identity),
        ("mass-1 property", 5, expression_mass_reaches_one),
        ("sampling fit", 30, sampling_fit),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (verdict, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over the {budget} s budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {verdict} {name} [{:.2} s / {budget} s]: {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
