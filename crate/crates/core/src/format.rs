//! JSON file format for automata, and the text form of words.
//!
//! ```json
//! {
//!   "semiring": "nonneg-real",
//!   "backend": "rational",
//!   "alphabet": ["a", "b"],
//!   "states": 2,
//!   "initial": {"q0": "1"},
//!   "final": {"q1": "1/2"},
//!   "transitions": [{"from": "q0", "symbol": "a", "to": "q1", "weight": "2/5"}]
//! }
//! ```
//!
//! `states` is a count (states are then named `q0`, `q1`, ...) or a list of
//! names. A state reference is a name or an index. Rational weights are
//! strings (`"p/q"`, integers, decimals), float weights are numbers, and
//! tropical files may use `"inf"`. Missing entries are zero, or `∞` for
//! tropical files.

use std::fmt;

use indexmap::IndexMap;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::numerics::{format_rational, parse_rational, Backend, Matrix, Rational, Scalar};
use crate::tropical::{TropicalAutomaton, TropicalWeight};

pub const SEMIRING_REAL: &str = "nonneg-real";
pub const SEMIRING_TROPICAL: &str = "tropical";

/// Any automaton a file can hold.
#[derive(Clone, Debug, PartialEq)]
pub enum AutomatonFile {
    Rational(WeightedAutomaton<Rational>),
    Float(WeightedAutomaton<f64>),
    Tropical(TropicalAutomaton),
}

impl AutomatonFile {
    pub fn to_json(&self) -> String {
        match self {
            AutomatonFile::Rational(a) => print_automaton(a),
            AutomatonFile::Float(a) => print_automaton(a),
            AutomatonFile::Tropical(t) => print_tropical(t),
        }
    }

    pub fn semiring(&self) -> &'static str {
        match self {
            AutomatonFile::Tropical(_) => SEMIRING_TROPICAL,
            _ => SEMIRING_REAL,
        }
    }
}

#[derive(Serialize)]
struct FileOut {
    semiring: &'static str,
    backend: &'static str,
    alphabet: Vec<String>,
    states: usize,
    initial: IndexMap<String, Value>,
    #[serde(rename = "final")]
    final_weights: IndexMap<String, Value>,
    transitions: Vec<TransitionOut>,
}

#[derive(Serialize)]
struct TransitionOut {
    from: String,
    symbol: String,
    to: String,
    weight: Value,
}

fn state_name(q: usize) -> String {
    format!("q{q}")
}

fn scalar_value<S: Scalar>(v: &S) -> Value {
    match S::BACKEND {
        Backend::Rational => Value::String(format_rational(&v.to_rational().expect("rationals are finite"))),
        Backend::Float => serde_json::Number::from_f64(v.to_f64()).map_or(Value::Null, Value::Number),
    }
}

fn tropical_value(w: &TropicalWeight) -> Value {
    Value::String(w.to_string())
}

fn to_pretty(out: &FileOut) -> String {
    let mut text = serde_json::to_string_pretty(out).expect("serialisable");
    text.push('\n');
    text
}

/// Canonical text of a weighted automaton: zero entries omitted, transitions
/// sorted by source, symbol and target.
pub fn print_automaton<S: Scalar>(a: &WeightedAutomaton<S>) -> String {
    let n = a.state_count();
    let vector = |v: &[S]| -> IndexMap<String, Value> {
        (0..n)
            .filter(|&q| !v[q].is_zero())
            .map(|q| (state_name(q), scalar_value(&v[q])))
            .collect()
    };
    let mut transitions = Vec::new();
    for from in 0..n {
        for (k, m) in a.transitions().iter().enumerate() {
            for to in 0..n {
                if !m.get(from, to).is_zero() {
                    transitions.push(TransitionOut {
                        from: state_name(from),
                        symbol: a.alphabet()[k].clone(),
                        to: state_name(to),
                        weight: scalar_value(m.get(from, to)),
                    });
                }
            }
        }
    }
    to_pretty(&FileOut {
        semiring: SEMIRING_REAL,
        backend: S::BACKEND.name(),
        alphabet: a.alphabet().to_vec(),
        states: n,
        initial: vector(a.initial()),
        final_weights: vector(a.final_weights()),
        transitions,
    })
}

/// Canonical text of a tropical automaton: `∞` entries omitted.
pub fn print_tropical(t: &TropicalAutomaton) -> String {
    let n = t.state_count();
    let vector = |v: &[TropicalWeight]| -> IndexMap<String, Value> {
        (0..n)
            .filter(|&q| v[q].is_finite())
            .map(|q| (state_name(q), tropical_value(&v[q])))
            .collect()
    };
    let mut transitions = Vec::new();
    for from in 0..n {
        for (k, m) in t.transitions().iter().enumerate() {
            for to in 0..n {
                if m.get(from, to).is_finite() {
                    transitions.push(TransitionOut {
                        from: state_name(from),
                        symbol: t.alphabet()[k].clone(),
                        to: state_name(to),
                        weight: tropical_value(m.get(from, to)),
                    });
                }
            }
        }
    }
    to_pretty(&FileOut {
        semiring: SEMIRING_TROPICAL,
        backend: Backend::Rational.name(),
        alphabet: t.alphabet().to_vec(),
        states: n,
        initial: vector(t.initial()),
        final_weights: vector(t.final_weights()),
        transitions,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileIn {
    #[serde(default)]
    semiring: Option<String>,
    #[serde(default)]
    backend: Option<String>,
    alphabet: Vec<String>,
    states: StatesIn,
    #[serde(default)]
    initial: IndexMap<String, WeightIn>,
    #[serde(default, rename = "final")]
    final_weights: IndexMap<String, WeightIn>,
    #[serde(default)]
    transitions: Vec<TransitionIn>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StatesIn {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionIn {
    from: StateRef,
    symbol: String,
    to: StateRef,
    weight: WeightIn,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateRef {
    Index(usize),
    Name(String),
}

/// A weight as written: checked for syntax while the document is read, so
/// that malformed weights are reported with their position.
#[derive(Clone, Debug)]
enum WeightIn {
    Exact(Rational),
    Float(f64),
    Infinite,
}

impl<'de> Deserialize<'de> for WeightIn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = WeightIn;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a weight: a number, a rational string such as \"2/5\", or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<WeightIn, E> {
                Ok(WeightIn::Exact(Rational::from_integer(v.into())))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<WeightIn, E> {
                Ok(WeightIn::Exact(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<WeightIn, E> {
                Ok(WeightIn::Float(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<WeightIn, E> {
                if v.trim() == "inf" {
                    return Ok(WeightIn::Infinite);
                }
                parse_rational(v)
                    .map(WeightIn::Exact)
                    .ok_or_else(|| E::custom(format!("invalid weight {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

impl WeightIn {
    fn rational(&self, place: &str) -> Result<Rational> {
        match self {
            WeightIn::Exact(r) => Ok(r.clone()),
            WeightIn::Float(x) => Err(Error::Format(format!(
                "{place}: rational weights must be strings such as \"1/3\", found {x}"
            ))),
            WeightIn::Infinite => Err(Error::Format(format!("{place}: \"inf\" is only allowed in tropical files"))),
        }
    }

    fn float(&self, place: &str) -> Result<f64> {
        match self {
            WeightIn::Exact(r) => Ok(r.to_f64()),
            WeightIn::Float(x) => Ok(*x),
            WeightIn::Infinite => Err(Error::Format(format!("{place}: \"inf\" is only allowed in tropical files"))),
        }
    }

    fn tropical(&self, place: &str) -> Result<TropicalWeight> {
        match self {
            WeightIn::Infinite => Ok(TropicalWeight::Infinite),
            other => other.rational(place).map(TropicalWeight::Finite),
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

struct Layout {
    names: Vec<String>,
    alphabet: Vec<String>,
}

impl Layout {
    fn state(&self, r: &str) -> Result<usize> {
        if let Some(q) = self.names.iter().position(|n| n == r) {
            return Ok(q);
        }
        match r.parse::<usize>() {
            Ok(q) if q < self.names.len() => Ok(q),
            _ => Err(Error::Format(format!("unknown state {r:?}"))),
        }
    }

    fn state_ref(&self, r: &StateRef) -> Result<usize> {
        match r {
            StateRef::Index(q) if *q < self.names.len() => Ok(*q),
            StateRef::Index(q) => Err(Error::Format(format!("state index {q} out of range"))),
            StateRef::Name(n) => self.state(n),
        }
    }

    fn symbol(&self, s: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|a| a == s)
            .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    }
}

/// Resolved entries: `(state, weight)` for vectors, `(from, symbol, to,
/// weight)` for transitions.
type Entries<W> = (Vec<(usize, W)>, Vec<(usize, W)>, Vec<(usize, usize, usize, W)>);

fn resolve<W>(file: &FileIn, layout: &Layout, weight: impl Fn(&WeightIn, &str) -> Result<W>) -> Result<Entries<W>> {
    let vector = |map: &IndexMap<String, WeightIn>, field: &str| -> Result<Vec<(usize, W)>> {
        let mut seen = vec![false; layout.names.len()];
        map.iter()
            .map(|(k, w)| {
                let q = layout.state(k)?;
                if std::mem::replace(&mut seen[q], true) {
                    return Err(Error::Format(format!("{field}: state {k:?} listed twice")));
                }
                Ok((q, weight(w, &format!("{field}[{k:?}]"))?))
            })
            .collect()
    };
    let initial = vector(&file.initial, "initial")?;
    let final_weights = vector(&file.final_weights, "final")?;
    let mut seen = std::collections::HashSet::new();
    let transitions = file
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (from, to) = (layout.state_ref(&t.from)?, layout.state_ref(&t.to)?);
            let k = layout.symbol(&t.symbol)?;
            if !seen.insert((from, k, to)) {
                return Err(Error::Format(format!("transitions[{i}]: duplicate transition")));
            }
            Ok((from, k, to, weight(&t.weight, &format!("transitions[{i}]"))?))
        })
        .collect::<Result<_>>()?;
    Ok((initial, final_weights, transitions))
}

/// Read an automaton file. Syntax errors and malformed weights carry a line
/// and column; structural errors name the offending field.
pub fn parse_automaton(text: &str) -> Result<AutomatonFile> {
    let file: FileIn = serde_json::from_str(text).map_err(json_error)?;
    let names = match &file.states {
        StatesIn::Count(n) => (0..*n).map(state_name).collect(),
        StatesIn::Names(names) => names.clone(),
    };
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::Format(format!("duplicate state name {n:?}")));
        }
    }
    let layout = Layout {
        names,
        alphabet: file.alphabet.clone(),
    };
    let n = layout.names.len();
    let semiring = file.semiring.as_deref().unwrap_or(SEMIRING_REAL);
    let backend = file.backend.as_deref().unwrap_or("rational");
    match (semiring, backend) {
        (SEMIRING_REAL, "rational") => {
            let (init, fin, trans) = resolve(&file, &layout, WeightIn::rational)?;
            Ok(AutomatonFile::Rational(build_weighted(n, &layout.alphabet, init, fin, trans)?))
        }
        (SEMIRING_REAL, "float") => {
            let (init, fin, trans) = resolve(&file, &layout, WeightIn::float)?;
            if let Some(bad) = init
                .iter()
                .chain(&fin)
                .map(|(_, w)| *w)
                .chain(trans.iter().map(|t| t.3))
                .find(|w| !w.is_finite())
            {
                return Err(Error::Format(format!("non-finite weight {bad}")));
            }
            Ok(AutomatonFile::Float(build_weighted(n, &layout.alphabet, init, fin, trans)?))
        }
        (SEMIRING_TROPICAL, "rational") => {
            let (init, fin, trans) = resolve(&file, &layout, WeightIn::tropical)?;
            let mut initial = vec![TropicalWeight::Infinite; n];
            let mut final_weights = vec![TropicalWeight::Infinite; n];
            let mut matrices = vec![Matrix::filled(n, n, TropicalWeight::Infinite); layout.alphabet.len()];
            for (q, w) in init {
                initial[q] = w;
            }
            for (q, w) in fin {
                final_weights[q] = w;
            }
            for (from, k, to, w) in trans {
                matrices[k].set(from, to, w);
            }
            let t = TropicalAutomaton::new(layout.alphabet.clone(), initial, matrices, final_weights)?;
            Ok(AutomatonFile::Tropical(t))
        }
        (SEMIRING_TROPICAL, other) => Err(Error::Format(format!(
            "tropical files use the rational backend, found {other:?}"
        ))),
        (SEMIRING_REAL, other) => Err(Error::Format(format!("unknown backend {other:?}"))),
        (other, _) => Err(Error::Format(format!("unknown semiring {other:?}"))),
    }
}

fn build_weighted<S: Scalar>(
    n: usize,
    alphabet: &[String],
    initial: Vec<(usize, S)>,
    final_weights: Vec<(usize, S)>,
    transitions: Vec<(usize, usize, usize, S)>,
) -> Result<WeightedAutomaton<S>> {
    let mut b = WeightedAutomaton::builder(n, alphabet.to_vec());
    for (q, w) in initial {
        b = b.initial(q, w);
    }
    for (q, w) in final_weights {
        b = b.final_weight(q, w);
    }
    for (from, k, to, w) in transitions {
        b = b.transition(from, &alphabet[k], to, w);
    }
    b.build()
}

/// Read a weighted automaton and convert it to the backend `S`.
pub fn parse_weighted<S: Scalar>(text: &str) -> Result<WeightedAutomaton<S>> {
    match parse_automaton(text)? {
        AutomatonFile::Rational(a) => Ok(a.map_weights(S::from_rational)),
        AutomatonFile::Float(a) if !S::is_exact() => {
            Ok(a.map_weights(|v| S::from_rational(&v.to_rational().expect("finite by construction"))))
        }
        AutomatonFile::Float(_) => Err(Error::FloatBackendUnsupported),
        AutomatonFile::Tropical(_) => Err(Error::Format("expected a nonneg-real automaton, found a tropical one".into())),
    }
}

/// Text of a word: symbols run together when every symbol of the alphabet
/// is a single character, separated by spaces otherwise; `ε` when empty.
pub fn format_word<T: AsRef<str>>(alphabet: &[String], word: &[T]) -> String {
    if word.is_empty() {
        return "ε".to_string();
    }
    let sep = if alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { " " };
    word.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(sep)
}

/// Inverse of [`format_word`]. An empty string or `ε` is the empty word;
/// text containing whitespace is split on it.
pub fn parse_word(alphabet: &[String], text: &str) -> Result<Vec<String>> {
    let t = text.trim();
    if t.is_empty() || t == "ε" {
        return Ok(Vec::new());
    }
    let word: Vec<String> = if t.contains(char::is_whitespace) || !alphabet.iter().all(|a| a.chars().count() == 1) {
        t.split_whitespace().map(str::to_string).collect()
    } else {
        t.chars().map(String::from).collect()
    };
    match word.iter().find(|s| !alphabet.contains(s)) {
        Some(s) => Err(Error::UnknownSymbol(s.clone())),
        None => Ok(word),
    }
}
