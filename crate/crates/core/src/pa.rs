//! Probabilistic automata and distributions, with validation.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{PaError, Result};
use crate::prob::Prob;

/// Characters that may not appear in letter symbols; they delimit words and
/// word lists on the command line.
pub const RESERVED_LETTER_CHARS: &[char] = &['.', ','];

/// Name of a state. Unique within an automaton.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(pub String);

/// A letter symbol. Unique within an alphabet.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(pub String);

/// A finite word.
pub type Word = Vec<Letter>;

macro_rules! name_impls {
    ($t:ident) => {
        impl $t {
            pub fn new(s: impl Into<String>) -> Self {
                $t(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                $t(s.to_string())
            }
        }
    };
}

name_impls!(StateId);
name_impls!(Letter);

/// Splits a `.`-separated token list into a word. The empty string is the
/// empty word.
pub fn word(tokens: &str) -> Word {
    if tokens.is_empty() {
        return Vec::new();
    }
    tokens.split('.').map(Letter::from).collect()
}

/// Joins a word back into its `.`-separated form.
pub fn word_to_string(w: &[Letter]) -> String {
    w.iter().map(Letter::as_str).collect::<Vec<_>>().join(".")
}

/// A probability distribution over the states of one automaton, stored
/// densely in the automaton's state order. Zero entries are allowed; they are
/// not part of the support.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dist {
    mass: Vec<Prob>,
}

impl Dist {
    /// Checks that the masses sum to exactly one.
    pub fn new(mass: Vec<Prob>) -> Result<Self> {
        let total: BigRational = mass.iter().map(Prob::value).sum();
        if !total.is_one() {
            return Err(PaError::input(format!("distribution sums to {} instead of 1", fmt_rational(&total))));
        }
        Ok(Dist { mass })
    }

    pub(crate) fn from_vec_unchecked(mass: Vec<Prob>) -> Self {
        debug_assert!(mass.iter().map(Prob::value).sum::<BigRational>().is_one());
        Dist { mass }
    }

    pub fn dirac(len: usize, state: usize) -> Self {
        let mut mass = vec![Prob::zero(); len];
        mass[state] = Prob::one();
        Dist { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self, state: usize) -> &Prob {
        &self.mass[state]
    }

    pub fn masses(&self) -> &[Prob] {
        &self.mass
    }

    /// Nonzero entries as `(state, mass)` pairs, in state order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &Prob)> {
        self.mass.iter().enumerate().filter(|(_, p)| !p.is_zero())
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.entries().map(|(s, _)| s).collect()
    }

    /// `max_s d(s)`.
    pub fn norm(&self) -> Prob {
        self.mass.iter().max().cloned().unwrap_or_default()
    }

    /// The state carrying all the mass, if there is one.
    pub fn dirac_state(&self) -> Option<usize> {
        self.mass.iter().position(Prob::is_one)
    }

    pub fn total(&self) -> BigRational {
        self.mass.iter().map(Prob::value).sum()
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One row of the transition function in named form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RawRow {
    pub from: String,
    pub letter: String,
    pub to: Vec<(String, Prob)>,
}

/// An automaton in named, unchecked form. This is what parsers and
/// constructions produce; [`Pa::from_raw`] turns it into a checked [`Pa`].
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RawPa {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: Vec<(String, Prob)>,
    pub transitions: Vec<RawRow>,
    pub accepting: Vec<String>,
}

impl RawPa {
    /// Replaces (or inserts) the row for `(from, letter)`.
    pub fn set_row(&mut self, from: &str, letter: &str, to: Vec<(String, Prob)>) {
        self.transitions.retain(|r| !(r.from == from && r.letter == letter));
        self.transitions.push(RawRow { from: from.to_string(), letter: letter.to_string(), to });
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    NoStates,
    EmptyStateName,
    EmptyLetter,
    ReservedLetterChar(String),
    DuplicateState(String),
    DuplicateLetter(String),
    UnknownState { context: String, state: String },
    UnknownLetter { context: String, letter: String },
    DuplicateRow { state: String, letter: String },
    DuplicateTarget { context: String, state: String },
    RowSum { state: String, letter: String, sum: BigRational },
    Incomplete { state: String, letter: String },
    InitialSum(BigRational),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoStates => write!(f, "automaton has no states"),
            EmptyStateName => write!(f, "empty state name"),
            EmptyLetter => write!(f, "empty letter symbol"),
            ReservedLetterChar(l) => write!(f, "letter {l:?} contains a reserved character ('.' or ',')"),
            DuplicateState(s) => write!(f, "duplicate state {s:?}"),
            DuplicateLetter(l) => write!(f, "duplicate letter {l:?}"),
            UnknownState { context, state } => write!(f, "{context} names unknown state {state:?}"),
            UnknownLetter { context, letter } => write!(f, "{context} names unknown letter {letter:?}"),
            DuplicateRow { state, letter } => write!(f, "row ({state},{letter}) defined more than once"),
            DuplicateTarget { context, state } => write!(f, "{context} lists state {state:?} more than once"),
            RowSum { state, letter, sum } => write!(f, "row ({state},{letter}) sums to {}", fmt_rational(sum)),
            Incomplete { state, letter } => write!(f, "delta incomplete at ({state},{letter})"),
            InitialSum(sum) => write!(f, "initial distribution sums to {}", fmt_rational(sum)),
        }
    }
}

/// Result of [`validate`]: empty means the automaton is well formed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

fn check_entries(
    entries: &[(String, Prob)],
    states: &HashSet<&str>,
    context: &str,
    out: &mut Vec<Violation>,
) -> BigRational {
    let mut seen = HashSet::new();
    for (s, _) in entries {
        if !states.contains(s.as_str()) {
            out.push(Violation::UnknownState { context: context.to_string(), state: s.clone() });
        } else if !seen.insert(s.as_str()) {
            out.push(Violation::DuplicateTarget { context: context.to_string(), state: s.clone() });
        }
    }
    entries.iter().map(|(_, p)| p.value()).sum()
}

/// Checks every well-formedness condition and reports all violations found.
pub fn validate(raw: &RawPa) -> ValidationReport {
    let mut out = Vec::new();
    if raw.states.is_empty() {
        out.push(Violation::NoStates);
    }
    let mut states = HashSet::new();
    for s in &raw.states {
        if s.is_empty() {
            out.push(Violation::EmptyStateName);
        } else if !states.insert(s.as_str()) {
            out.push(Violation::DuplicateState(s.clone()));
        }
    }
    let mut letters = HashSet::new();
    for l in &raw.alphabet {
        if l.is_empty() {
            out.push(Violation::EmptyLetter);
        } else if l.contains(RESERVED_LETTER_CHARS) {
            out.push(Violation::ReservedLetterChar(l.clone()));
        } else if !letters.insert(l.as_str()) {
            out.push(Violation::DuplicateLetter(l.clone()));
        }
    }

    let initial_sum = check_entries(&raw.initial, &states, "initial distribution", &mut out);
    if !initial_sum.is_one() {
        out.push(Violation::InitialSum(initial_sum));
    }
    for a in &raw.accepting {
        if !states.contains(a.as_str()) {
            out.push(Violation::UnknownState { context: "accepting set".into(), state: a.clone() });
        }
    }

    let mut defined = HashSet::new();
    for row in &raw.transitions {
        let context = format!("row ({},{})", row.from, row.letter);
        let mut known = true;
        if !states.contains(row.from.as_str()) {
            out.push(Violation::UnknownState { context: context.clone(), state: row.from.clone() });
            known = false;
        }
        if !letters.contains(row.letter.as_str()) {
            out.push(Violation::UnknownLetter { context: context.clone(), letter: row.letter.clone() });
            known = false;
        }
        if known && !defined.insert((row.from.as_str(), row.letter.as_str())) {
            out.push(Violation::DuplicateRow { state: row.from.clone(), letter: row.letter.clone() });
        }
        let sum = check_entries(&row.to, &states, &context, &mut out);
        if !sum.is_one() {
            out.push(Violation::RowSum { state: row.from.clone(), letter: row.letter.clone(), sum });
        }
    }
    for s in &raw.states {
        for l in &raw.alphabet {
            if !defined.contains(&(s.as_str(), l.as_str())) {
                out.push(Violation::Incomplete { state: s.clone(), letter: l.clone() });
            }
        }
    }
    ValidationReport { violations: out }
}

/// A complete probabilistic automaton `<Q, mu_0, Sigma, delta>` with an
/// optional accepting set. Always well formed: the only way to build one is
/// through [`Pa::from_raw`].
///
/// States and letters are addressed by their index in declaration order.
#[derive(Clone, Debug)]
pub struct Pa {
    states: Vec<StateId>,
    alphabet: Vec<Letter>,
    initial: Dist,
    // state-major: delta[state * |alphabet| + letter]
    delta: Vec<Dist>,
    accepting: BTreeSet<usize>,
    state_index: HashMap<String, usize>,
    letter_index: HashMap<String, usize>,
}

impl PartialEq for Pa {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
            && self.alphabet == other.alphabet
            && self.initial == other.initial
            && self.delta == other.delta
            && self.accepting == other.accepting
    }
}

impl Eq for Pa {}

impl Pa {
    pub fn from_raw(raw: &RawPa) -> Result<Pa> {
        let report = validate(raw);
        if !report.is_ok() {
            return Err(PaError::Invalid(report));
        }
        let state_index: HashMap<String, usize> =
            raw.states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let letter_index: HashMap<String, usize> =
            raw.alphabet.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let n = raw.states.len();
        let m = raw.alphabet.len();
        let densify = |entries: &[(String, Prob)]| {
            let mut mass = vec![Prob::zero(); n];
            for (s, p) in entries {
                mass[state_index[s]] = p.clone();
            }
            Dist::from_vec_unchecked(mass)
        };
        let mut delta = vec![None; n * m];
        for row in &raw.transitions {
            let idx = state_index[&row.from] * m + letter_index[&row.letter];
            delta[idx] = Some(densify(&row.to));
        }
        Ok(Pa {
            states: raw.states.iter().map(|s| StateId(s.clone())).collect(),
            alphabet: raw.alphabet.iter().map(|l| Letter(l.clone())).collect(),
            initial: densify(&raw.initial),
            delta: delta.into_iter().map(|d| d.expect("completeness checked")).collect(),
            accepting: raw.accepting.iter().map(|a| state_index[a]).collect(),
            state_index,
            letter_index,
        })
    }

    /// Named form; zero-mass entries are dropped.
    pub fn to_raw(&self) -> RawPa {
        let named = |d: &Dist| d.entries().map(|(s, p)| (self.states[s].0.clone(), p.clone())).collect();
        let mut transitions = Vec::with_capacity(self.delta.len());
        for s in 0..self.num_states() {
            for l in 0..self.num_letters() {
                transitions.push(RawRow {
                    from: self.states[s].0.clone(),
                    letter: self.alphabet[l].0.clone(),
                    to: named(self.row(s, l)),
                });
            }
        }
        RawPa {
            states: self.states.iter().map(|s| s.0.clone()).collect(),
            alphabet: self.alphabet.iter().map(|l| l.0.clone()).collect(),
            initial: named(&self.initial),
            transitions,
            accepting: self.accepting.iter().map(|&a| self.states[a].0.clone()).collect(),
        }
    }

    /// Re-runs validation on the stored automaton.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_raw())
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn initial(&self) -> &Dist {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.states[state].0
    }

    pub fn letter_name(&self, letter: usize) -> &str {
        &self.alphabet[letter].0
    }

    pub fn state(&self, name: &str) -> Result<usize> {
        self.state_index.get(name).copied().ok_or_else(|| PaError::UnknownState(name.to_string()))
    }

    pub fn letter(&self, symbol: &str) -> Result<usize> {
        self.letter_index
            .get(symbol)
            .copied()
            .ok_or_else(|| PaError::UnknownLetter { symbol: symbol.to_string(), position: None })
    }

    /// `delta(state, letter)`.
    pub fn row(&self, state: usize, letter: usize) -> &Dist {
        &self.delta[state * self.alphabet.len() + letter]
    }

    /// Resolves a word to letter indices, naming the first unknown symbol and
    /// its position.
    pub fn resolve(&self, w: &[Letter]) -> Result<Vec<usize>> {
        w.iter()
            .enumerate()
            .map(|(i, l)| {
                self.letter_index
                    .get(l.as_str())
                    .copied()
                    .ok_or_else(|| PaError::UnknownLetter { symbol: l.0.clone(), position: Some(i) })
            })
            .collect()
    }

    pub fn word_of(&self, letters: &[usize]) -> Word {
        letters.iter().map(|&l| self.alphabet[l].clone()).collect()
    }

    /// Builds a distribution from named masses; unlisted states get zero.
    pub fn dist(&self, entries: &[(&str, Prob)]) -> Result<Dist> {
        let mut mass = vec![Prob::zero(); self.num_states()];
        for (s, p) in entries {
            mass[self.state(s)?] = p.clone();
        }
        Dist::new(mass)
    }

    pub fn state_names<'a>(&'a self, set: impl IntoIterator<Item = &'a usize>) -> Vec<&'a str> {
        set.into_iter().map(|&s| self.state_name(s)).collect()
    }

    /// `Post(q, sigma) = Supp(delta(q, sigma))`.
    pub fn post(&self, state: &str, letter: &str) -> Result<BTreeSet<usize>> {
        Ok(self.post_ix(self.state(state)?, self.letter(letter)?))
    }

    pub fn post_ix(&self, state: usize, letter: usize) -> BTreeSet<usize> {
        self.row(state, letter).support()
    }

    /// Union of `Post(q, sigma)` over `q` in `states` and `sigma` in `letters`.
    pub fn post_set(&self, states: &[&str], letters: &[&str]) -> Result<BTreeSet<usize>> {
        let states = states.iter().map(|s| self.state(s)).collect::<Result<Vec<_>>>()?;
        let letters = letters.iter().map(|l| self.letter(l)).collect::<Result<Vec<_>>>()?;
        Ok(self.post_set_ix(&states, &letters))
    }

    pub fn post_set_ix(&self, states: &[usize], letters: &[usize]) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &q in states {
            for &l in letters {
                out.extend(self.row(q, l).entries().map(|(s, _)| s));
            }
        }
        out
    }

    pub fn all_states(&self) -> Vec<usize> {
        (0..self.num_states()).collect()
    }

    pub fn all_letters(&self) -> Vec<usize> {
        (0..self.num_letters()).collect()
    }

    /// Copy of this automaton with one row replaced.
    pub fn with_row(&self, state: &str, letter: &str, to: &[(&str, Prob)]) -> Result<Pa> {
        let mut raw = self.to_raw();
        raw.set_row(state, letter, to.iter().map(|(s, p)| (s.to_string(), p.clone())).collect());
        Pa::from_raw(&raw)
    }
}
