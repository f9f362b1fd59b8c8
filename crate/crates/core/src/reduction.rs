//! The two gadget constructions that turn a value-1 instance `B` into an
//! automaton `C` whose weakly synchronizing language is nonempty iff `B` has
//! value 1, and exact checkers for the reset and twin-halving identities.
//!
//! * [`lift`] (`B -> A`): adds an accepting sink target `q_f`, a rejecting
//!   sink `q_n` and a fresh letter `$`. On `$`, every accepting state of `B`
//!   moves to `q_f` and every other state of `B` to `q_n`; both new states
//!   move to `q_n` on every letter.
//! * [`twin`] (`A -> C`): every state except `q_f` gets a hatted twin, and
//!   mass flowing between non-`q_f` states is split evenly between a state
//!   and its twin. A fresh letter `#` resets to `{q_0: 1/2, q^_0: 1/2}`.
//!
//! The source construction names the accepting set of `B` as `F_1` in one
//! place without defining it; it is read here as the accepting set of `B`.
//! The rule for mass entering `q_f` is applied for every letter of `A`, and
//! the rule for mass leaving `q_f` ranges over every target `q_1 != q_f`;
//! these are the only readings under which every row of `C` is stochastic.
//!
//! Fresh names use the reserved prefixes `@lift:`, `@twin:` and `@sym:`; when
//! a name is taken, a numeric suffix is appended.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{PaError, Result};
use crate::pa::{Letter, Pa, RawPa, RawRow, Word};
use crate::prob::Prob;
use crate::semantics::outcome_ix;

pub const LIFT_PREFIX: &str = "@lift:";
pub const TWIN_PREFIX: &str = "@twin:";
pub const SYM_PREFIX: &str = "@sym:";

fn fresh(base: &str, taken: &HashSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1u64..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !taken.contains(c))
        .expect("unbounded suffix search")
}

/// A value-1 problem instance: an automaton with a nonempty accepting set
/// and, unless built with [`Value1Instance::relaxed`], a single initial
/// state.
#[derive(Clone, Debug)]
pub struct Value1Instance {
    pa: Pa,
}

impl Value1Instance {
    pub fn new(pa: Pa) -> Result<Self> {
        if pa.initial().dirac_state().is_none() {
            return Err(PaError::input("value-1 instance needs a single initial state (Dirac initial distribution)"));
        }
        Self::relaxed(pa)
    }

    /// Accepts any initial distribution. [`twin`] still requires a Dirac one.
    pub fn relaxed(pa: Pa) -> Result<Self> {
        if pa.accepting().is_empty() {
            return Err(PaError::input("value-1 instance needs a nonempty accepting set"));
        }
        Ok(Value1Instance { pa })
    }

    pub fn pa(&self) -> &Pa {
        &self.pa
    }
}

/// Names of the roles introduced by [`lift`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LiftRoles {
    pub q_f: String,
    pub q_n: String,
    pub dollar: String,
}

/// Output of [`lift`]. State and letter indices of `B` are preserved.
#[derive(Clone, Debug)]
pub struct LiftedPa {
    pa: Pa,
    q_f: usize,
    q_n: usize,
    dollar: usize,
    source_states: BTreeSet<usize>,
    source_accepting: BTreeSet<usize>,
}

impl LiftedPa {
    /// Recovers the lifted structure from an automaton and its role names,
    /// checking every structural property of the construction.
    pub fn from_parts(pa: Pa, roles: &LiftRoles) -> Result<Self> {
        let q_f = pa.state(&roles.q_f)?;
        let q_n = pa.state(&roles.q_n)?;
        let dollar = pa.letter(&roles.dollar)?;
        let bad = |msg: String| Err(PaError::input(format!("not a lifted automaton: {msg}")));
        if q_f == q_n {
            return bad("q_f and q_n coincide".into());
        }
        if pa.accepting() != &BTreeSet::from([q_f]) {
            return bad(format!("accepting set must be exactly {{{}}}", roles.q_f));
        }
        let sinks = BTreeSet::from([q_f, q_n]);
        let source_states: BTreeSet<usize> = pa.all_states().into_iter().filter(|s| !sinks.contains(s)).collect();
        if !pa.initial().support().is_subset(&source_states) {
            return bad("initial mass on q_f or q_n".into());
        }
        let mut source_accepting = BTreeSet::new();
        for &q in &source_states {
            match pa.row(q, dollar).dirac_state() {
                Some(t) if t == q_f => {
                    source_accepting.insert(q);
                }
                Some(t) if t == q_n => {}
                _ => return bad(format!("row ({},{}) is not Dirac on q_f or q_n", pa.state_name(q), roles.dollar)),
            }
            for l in (0..pa.num_letters()).filter(|&l| l != dollar) {
                if !pa.post_ix(q, l).is_subset(&source_states) {
                    return bad(format!("row ({},{}) reaches q_f or q_n", pa.state_name(q), pa.letter_name(l)));
                }
            }
        }
        for &s in &sinks {
            for l in 0..pa.num_letters() {
                if pa.row(s, l).dirac_state() != Some(q_n) {
                    return bad(format!("row ({},{}) is not Dirac on q_n", pa.state_name(s), pa.letter_name(l)));
                }
            }
        }
        Ok(LiftedPa { pa, q_f, q_n, dollar, source_states, source_accepting })
    }

    pub fn pa(&self) -> &Pa {
        &self.pa
    }

    pub fn q_f(&self) -> usize {
        self.q_f
    }

    pub fn q_n(&self) -> usize {
        self.q_n
    }

    pub fn dollar(&self) -> usize {
        self.dollar
    }

    pub fn dollar_letter(&self) -> Letter {
        Letter::from(self.pa.letter_name(self.dollar))
    }

    /// The embedded state set of `B`.
    pub fn source_states(&self) -> &BTreeSet<usize> {
        &self.source_states
    }

    /// The accepting set of `B`, recovered from the `$` rows.
    pub fn source_accepting(&self) -> &BTreeSet<usize> {
        &self.source_accepting
    }

    pub fn roles(&self) -> LiftRoles {
        LiftRoles {
            q_f: self.pa.state_name(self.q_f).to_string(),
            q_n: self.pa.state_name(self.q_n).to_string(),
            dollar: self.pa.letter_name(self.dollar).to_string(),
        }
    }

    /// Turns words over the alphabet of `B` into `A`-words `u.$`.
    pub fn dollar_terminated(&self, words: &[Word]) -> Vec<Word> {
        words
            .iter()
            .map(|u| {
                let mut w = u.clone();
                w.push(self.dollar_letter());
                w
            })
            .collect()
    }
}

/// `B -> A`.
pub fn lift(b: &Value1Instance) -> Result<LiftedPa> {
    let mut raw = b.pa().to_raw();
    let state_names: HashSet<String> = raw.states.iter().cloned().collect();
    let letter_names: HashSet<String> = raw.alphabet.iter().cloned().collect();
    let q_f = fresh(&format!("{LIFT_PREFIX}q_f"), &state_names);
    let mut with_qf = state_names.clone();
    with_qf.insert(q_f.clone());
    let q_n = fresh(&format!("{LIFT_PREFIX}q_n"), &with_qf);
    let dollar = fresh(&format!("{SYM_PREFIX}$"), &letter_names);

    let accepting: HashSet<&str> = raw.accepting.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for q in &raw.states {
        let target = if accepting.contains(q.as_str()) { &q_f } else { &q_n };
        rows.push(RawRow { from: q.clone(), letter: dollar.clone(), to: vec![(target.clone(), Prob::one())] });
    }
    raw.transitions.extend(rows);
    raw.alphabet.push(dollar.clone());
    for sink in [&q_f, &q_n] {
        for l in &raw.alphabet {
            raw.transitions.push(RawRow { from: sink.clone(), letter: l.clone(), to: vec![(q_n.clone(), Prob::one())] });
        }
    }
    raw.states.push(q_f.clone());
    raw.states.push(q_n.clone());
    raw.accepting = vec![q_f.clone()];
    let pa = Pa::from_raw(&raw)?;
    LiftedPa::from_parts(pa, &LiftRoles { q_f, q_n, dollar })
}

/// Names of the roles introduced by [`twin`], on top of the lift roles.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwinRoles {
    pub lift: LiftRoles,
    pub hash: String,
    pub q0: String,
    /// Original state name -> twin name, for every state except `q_f`.
    pub twins: BTreeMap<String, String>,
}

/// Output of [`twin`]. The states of `A` keep their names and indices; the
/// hatted twins follow them.
#[derive(Clone, Debug)]
pub struct TwinPa {
    pa: Pa,
    twin_of: BTreeMap<usize, usize>,
    hash: usize,
    dollar: usize,
    q0: usize,
    q0_hat: usize,
    q_f: usize,
    q_n: usize,
    q_n_hat: usize,
}

impl TwinPa {
    /// Recovers the twin structure from an automaton and its role names,
    /// checking the reset rows, the initial distribution and the twin map.
    pub fn from_parts(pa: Pa, roles: &TwinRoles) -> Result<Self> {
        let bad = |msg: String| Err(PaError::input(format!("not a twin automaton: {msg}")));
        let q_f = pa.state(&roles.lift.q_f)?;
        let q_n = pa.state(&roles.lift.q_n)?;
        let dollar = pa.letter(&roles.lift.dollar)?;
        let hash = pa.letter(&roles.hash)?;
        let q0 = pa.state(&roles.q0)?;
        let mut twin_of = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (orig, hat) in &roles.twins {
            let (o, h) = (pa.state(orig)?, pa.state(hat)?);
            if o == q_f || h == q_f {
                return bad("q_f must not have a twin".into());
            }
            if o == h || !seen.insert(o) || !seen.insert(h) {
                return bad(format!("twin map is not a bijection at {orig:?}"));
            }
            twin_of.insert(o, h);
        }
        if seen.len() + 1 != pa.num_states() {
            return bad("every state except q_f must belong to exactly one twin pair".into());
        }
        let (Some(&q0_hat), Some(&q_n_hat)) = (twin_of.get(&q0), twin_of.get(&q_n)) else {
            return bad("q0 and q_n must be original (unhatted) states".into());
        };
        let reset = pa.dist(&[(&roles.q0, Prob::half()), (pa.state_name(q0_hat), Prob::half())])?;
        if pa.initial() != &reset {
            return bad("initial distribution must be {q0: 1/2, q0^: 1/2}".into());
        }
        for q in 0..pa.num_states() {
            if pa.row(q, hash) != &reset {
                return bad(format!("row ({},{}) is not the reset distribution", pa.state_name(q), roles.hash));
            }
        }
        Ok(TwinPa { pa, twin_of, hash, dollar, q0, q0_hat, q_f, q_n, q_n_hat })
    }

    pub fn pa(&self) -> &Pa {
        &self.pa
    }

    /// Original state -> hatted twin.
    pub fn twin_of(&self) -> &BTreeMap<usize, usize> {
        &self.twin_of
    }

    pub fn hash(&self) -> usize {
        self.hash
    }

    pub fn hash_letter(&self) -> Letter {
        Letter::from(self.pa.letter_name(self.hash))
    }

    pub fn dollar(&self) -> usize {
        self.dollar
    }

    pub fn dollar_letter(&self) -> Letter {
        Letter::from(self.pa.letter_name(self.dollar))
    }

    pub fn q0(&self) -> usize {
        self.q0
    }

    pub fn q0_hat(&self) -> usize {
        self.q0_hat
    }

    pub fn q_f(&self) -> usize {
        self.q_f
    }

    pub fn q_n(&self) -> usize {
        self.q_n
    }

    pub fn q_n_hat(&self) -> usize {
        self.q_n_hat
    }

    pub fn roles(&self) -> TwinRoles {
        let name = |s: usize| self.pa.state_name(s).to_string();
        TwinRoles {
            lift: LiftRoles { q_f: name(self.q_f), q_n: name(self.q_n), dollar: self.dollar_letter().0 },
            hash: self.hash_letter().0,
            q0: name(self.q0),
            twins: self.twin_of.iter().map(|(&o, &h)| (name(o), name(h))).collect(),
        }
    }
}

/// `A -> C`.
pub fn twin(a: &LiftedPa) -> Result<TwinPa> {
    let src = a.pa();
    let q0 = src
        .initial()
        .dirac_state()
        .ok_or_else(|| PaError::input("twin construction needs a Dirac initial distribution"))?;
    let q_f = a.q_f();
    let n = src.num_states();

    let mut taken: HashSet<String> = src.states().iter().map(|s| s.0.clone()).collect();
    let mut hat_name = vec![None; n];
    for q in (0..n).filter(|&q| q != q_f) {
        let name = fresh(&format!("{TWIN_PREFIX}{}", src.state_name(q)), &taken);
        taken.insert(name.clone());
        hat_name[q] = Some(name);
    }
    let letters: HashSet<String> = src.alphabet().iter().map(|l| l.0.clone()).collect();
    let hash = fresh(&format!("{SYM_PREFIX}#"), &letters);

    let q0_name = src.state_name(q0).to_string();
    let q0_hat_name = hat_name[q0].clone().expect("q0 is not q_f");
    let reset = vec![(q0_name.clone(), Prob::half()), (q0_hat_name.clone(), Prob::half())];

    let mut states: Vec<String> = src.states().iter().map(|s| s.0.clone()).collect();
    states.extend(hat_name.iter().flatten().cloned());
    let mut alphabet: Vec<String> = src.alphabet().iter().map(|l| l.0.clone()).collect();
    alphabet.push(hash.clone());

    // (name in C, underlying state of A)
    let members: Vec<(String, usize)> = (0..n)
        .map(|q| (src.state_name(q).to_string(), q))
        .chain((0..n).filter_map(|q| hat_name[q].clone().map(|h| (h, q))))
        .collect();

    let mut transitions = Vec::with_capacity(members.len() * alphabet.len());
    for (name, base) in &members {
        for l in 0..src.num_letters() {
            let mut to = Vec::new();
            for (q2, p) in src.row(*base, l).entries() {
                match &hat_name[q2] {
                    None => to.push((src.state_name(q2).to_string(), p.clone())),
                    Some(h) => {
                        let half = p.halved();
                        to.push((src.state_name(q2).to_string(), half.clone()));
                        to.push((h.clone(), half));
                    }
                }
            }
            transitions.push(RawRow { from: name.clone(), letter: src.letter_name(l).to_string(), to });
        }
        transitions.push(RawRow { from: name.clone(), letter: hash.clone(), to: reset.clone() });
    }

    let raw = RawPa {
        states,
        alphabet,
        initial: reset,
        transitions,
        accepting: vec![src.state_name(q_f).to_string()],
    };
    let pa = Pa::from_raw(&raw)?;
    let roles = TwinRoles {
        lift: a.roles(),
        hash,
        q0: q0_name,
        twins: (0..n).filter_map(|q| hat_name[q].clone().map(|h| (src.state_name(q).to_string(), h))).collect(),
    };
    TwinPa::from_parts(pa, &roles)
}

/// First point where a checked identity fails.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckViolation {
    pub step: usize,
    pub state: String,
    pub detail: String,
}

/// Pass/fail report of an exact identity checker.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckReport {
    pub check: &'static str,
    /// Number of outcome entries examined.
    pub steps_checked: usize,
    pub violation: Option<CheckViolation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "{}: pass ({} steps checked)", self.check, self.steps_checked),
            Some(v) => write!(f, "{}: FAIL at step {}, state {}: {}", self.check, v.step, v.state, v.detail),
        }
    }
}

/// Reset identity: for every `0 <= i <= |v2|` and every state `q`,
/// `C^{v1 # v2}_{|v1|+1+i}(q) = C^{v2}_i(q)`.
pub fn check_p1(c: &TwinPa, v1: &[Letter], v2: &[Letter]) -> Result<CheckReport> {
    let pa = c.pa();
    let v1 = pa.resolve(v1)?;
    let v2 = pa.resolve(v2)?;
    let mut whole = v1.clone();
    whole.push(c.hash());
    whole.extend_from_slice(&v2);
    let lhs = outcome_ix(pa, &whole);
    let rhs = outcome_ix(pa, &v2);
    let offset = v1.len() + 1;
    for (i, r) in rhs.iter().enumerate() {
        let l = &lhs[offset + i];
        if let Some(q) = (0..pa.num_states()).find(|&q| l.mass(q) != r.mass(q)) {
            return Ok(CheckReport {
                check: "P1",
                steps_checked: i + 1,
                violation: Some(CheckViolation {
                    step: i,
                    state: pa.state_name(q).to_string(),
                    detail: format!("mass {} after the reset, {} on the suffix alone", l.mass(q), r.mass(q)),
                }),
            });
        }
    }
    Ok(CheckReport { check: "P1", steps_checked: rhs.len(), violation: None })
}

/// Twin halving: for a word over the alphabet of `B`, at every step `i`,
/// `C_i(q) = C_i(q^) = A_i(q) / 2` for `q != q_f` and `C_i(q_f) = A_i(q_f) = 0`.
pub fn check_p2(a: &LiftedPa, c: &TwinPa, w: &[Letter]) -> Result<CheckReport> {
    let (dollar, hash) = (a.dollar_letter(), c.hash_letter());
    if let Some(pos) = w.iter().position(|l| *l == dollar || *l == hash) {
        return Err(PaError::input(format!(
            "P2 applies to words over the source alphabet only; {:?} at position {pos}",
            w[pos].0
        )));
    }
    let wa = a.pa().resolve(w)?;
    let wc = c.pa().resolve(w)?;
    let ta = outcome_ix(a.pa(), &wa);
    let tc = outcome_ix(c.pa(), &wc);

    let pa = a.pa();
    let mut pairs = Vec::new();
    for q in 0..pa.num_states() {
        let cq = c.pa().state(pa.state_name(q))?;
        let hat = if q == a.q_f() {
            None
        } else {
            Some(*c.twin_of().get(&cq).ok_or_else(|| {
                PaError::input(format!("state {:?} has no twin in the twin automaton", pa.state_name(q)))
            })?)
        };
        pairs.push((q, cq, hat));
    }

    let fail = |step: usize, state: &str, detail: String| {
        Ok(CheckReport {
            check: "P2",
            steps_checked: step + 1,
            violation: Some(CheckViolation { step, state: state.to_string(), detail }),
        })
    };
    for (i, (da, dc)) in ta.iter().zip(&tc).enumerate() {
        for &(q, cq, hat) in &pairs {
            let name = pa.state_name(q);
            match hat {
                Some(h) => {
                    let expected = da.mass(q).halved();
                    if dc.mass(cq) != &expected || dc.mass(h) != &expected {
                        return fail(
                            i,
                            name,
                            format!(
                                "C masses {} and {} on the twin pair, expected half of A's {}",
                                dc.mass(cq),
                                dc.mass(h),
                                da.mass(q)
                            ),
                        );
                    }
                }
                None => {
                    if !dc.mass(cq).is_zero() || !da.mass(q).is_zero() {
                        return fail(i, name, format!("q_f carries mass {} in C, {} in A", dc.mass(cq), da.mass(q)));
                    }
                }
            }
        }
    }
    Ok(CheckReport { check: "P2", steps_checked: ta.len(), violation: None })
}

/// `v_k = w_1 # w_2 # ... # w_k` and the checkpoint positions `|v_1|..|v_k|`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessPrefix {
    pub word: Word,
    pub checkpoints: Vec<usize>,
}

/// Interleaves a schedule of `A`-words with the reset letter. Checkpoint `i`
/// (1-based) is `(i - 1) + sum_{j <= i} |w_j|`.
pub fn build_witness_prefix(c: &TwinPa, schedule: &[Word]) -> Result<WitnessPrefix> {
    if schedule.is_empty() {
        return Err(PaError::input("witness schedule must be nonempty"));
    }
    let hash = c.hash_letter();
    let mut word = Vec::new();
    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut letters = 0;
    for (i, w) in schedule.iter().enumerate() {
        if w.is_empty() {
            return Err(PaError::input(format!("schedule word {} is empty", i + 1)));
        }
        if w.contains(&hash) {
            return Err(PaError::input(format!("schedule word {} contains the reset letter", i + 1)));
        }
        c.pa().resolve(w)?;
        if i > 0 {
            word.push(hash.clone());
        }
        word.extend_from_slice(w);
        letters += w.len();
        checkpoints.push(i + letters);
    }
    Ok(WitnessPrefix { word, checkpoints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{b_half, b_one};
    use crate::pa::{word, Dist};
    use crate::semantics::{acceptance_probability, norm_trace, step_ix};

    fn p(n: i64, d: i64) -> Prob {
        Prob::ratio(n, d)
    }

    fn c_one() -> (LiftedPa, TwinPa) {
        let a = lift(&Value1Instance::new(b_one()).unwrap()).unwrap();
        let c = twin(&a).unwrap();
        (a, c)
    }

    #[test]
    fn lift_shape() {
        let (a, _) = c_one();
        let pa = a.pa();
        assert_eq!(pa.num_states(), 4);
        assert_eq!(pa.state_name(a.q_f()), "@lift:q_f");
        assert_eq!(pa.state_name(a.q_n()), "@lift:q_n");
        assert_eq!(pa.letter_name(a.dollar()), "@sym:$");
        assert_eq!(pa.accepting(), &BTreeSet::from([a.q_f()]));
        assert_eq!(pa.post_set_ix(&[a.q_f(), a.q_n()], &pa.all_letters()), BTreeSet::from([a.q_n()]));
        assert_eq!(acceptance_probability(pa, &word("a.@sym:$")).unwrap(), Prob::one());
        assert_eq!(acceptance_probability(pa, &word("a")).unwrap(), Prob::zero());
        let h = lift(&Value1Instance::new(b_half()).unwrap()).unwrap();
        assert_eq!(acceptance_probability(h.pa(), &word("a.@sym:$")).unwrap(), p(1, 2));
    }

    #[test]
    fn lift_renames_on_collision() {
        let to = |s: &str| vec![(s.to_string(), Prob::one())];
        let raw = RawPa {
            states: vec!["s0".into(), "@lift:q_f".into()],
            alphabet: vec!["@sym:$".into()],
            initial: to("s0"),
            transitions: vec![
                RawRow { from: "s0".into(), letter: "@sym:$".into(), to: to("@lift:q_f") },
                RawRow { from: "@lift:q_f".into(), letter: "@sym:$".into(), to: to("@lift:q_f") },
            ],
            accepting: vec!["@lift:q_f".into()],
        };
        let b = Value1Instance::new(Pa::from_raw(&raw).unwrap()).unwrap();
        let a = lift(&b).unwrap();
        assert_eq!(a.pa().state_name(a.q_f()), "@lift:q_f1");
        assert_eq!(a.pa().letter_name(a.dollar()), "@sym:$1");
        assert_eq!(a.source_accepting().len(), 1);
        assert!(twin(&a).unwrap().pa().validate().is_ok());
    }

    #[test]
    fn value1_instance_requirements() {
        let mut raw = b_half().to_raw();
        raw.initial = vec![("s0".into(), p(1, 2)), ("sR".into(), p(1, 2))];
        let pa = Pa::from_raw(&raw).unwrap();
        assert!(Value1Instance::new(pa.clone()).is_err());
        let relaxed = Value1Instance::relaxed(pa).unwrap();
        let a = lift(&relaxed).unwrap();
        assert!(twin(&a).is_err());
        raw.accepting.clear();
        assert!(Value1Instance::relaxed(Pa::from_raw(&raw).unwrap()).is_err());
    }

    #[test]
    fn twin_rows() {
        let (a, c) = c_one();
        let pa = c.pa();
        assert_eq!(pa.num_states(), 7);
        assert!(pa.validate().is_ok());
        let names: BTreeSet<&str> = pa.states().iter().map(|s| s.as_str()).collect();
        for n in ["s0", "@twin:s0", "sA", "@twin:sA", "@lift:q_n", "@twin:@lift:q_n", "@lift:q_f"] {
            assert!(names.contains(n), "{n}");
        }
        let (s0, la) = (pa.state("s0").unwrap(), pa.letter("a").unwrap());
        assert_eq!(pa.row(s0, la), &pa.dist(&[("sA", p(1, 2)), ("@twin:sA", p(1, 2))]).unwrap());
        let qf_row = pa.dist(&[("@lift:q_n", p(1, 2)), ("@twin:@lift:q_n", p(1, 2))]).unwrap();
        for l in 0..a.pa().num_letters() {
            assert_eq!(pa.row(c.q_f(), l), &qf_row);
        }
        let reset = pa.dist(&[("s0", p(1, 2)), ("@twin:s0", p(1, 2))]).unwrap();
        for q in 0..pa.num_states() {
            assert_eq!(pa.row(q, c.hash()), &reset);
            assert_eq!(step_ix(pa, &Dist::dirac(7, q), c.hash()), reset);
        }
        assert_eq!(pa.initial(), &reset);
        assert!(!c.twin_of().contains_key(&c.q_f()));
        assert!(!c.twin_of().values().any(|&h| h == c.q_f()));
    }

    #[test]
    fn twin_post_sets() {
        let (_, c) = c_one();
        let pa = c.pa();
        let all = pa.all_states();
        assert_eq!(pa.post_set_ix(&all, &[c.hash()]), BTreeSet::from([c.q0(), c.q0_hat()]));
        assert_eq!(pa.post_set_ix(&all, &[c.dollar()]), BTreeSet::from([c.q_f(), c.q_n(), c.q_n_hat()]));
    }

    #[test]
    fn twin_traces() {
        let (_, c) = c_one();
        let t = norm_trace(c.pa(), &word("a.@sym:$")).unwrap();
        assert_eq!(t.norms(), vec![p(1, 2), p(1, 2), Prob::one()]);
        let d = step_ix(c.pa(), c.pa().initial(), c.pa().letter("a").unwrap());
        assert_eq!(d, c.pa().dist(&[("sA", p(1, 2)), ("@twin:sA", p(1, 2))]).unwrap());
    }

    #[test]
    fn roles_round_trip() {
        let (a, c) = c_one();
        let a2 = LiftedPa::from_parts(a.pa().clone(), &a.roles()).unwrap();
        assert_eq!(a2.source_accepting(), a.source_accepting());
        let c2 = TwinPa::from_parts(c.pa().clone(), &c.roles()).unwrap();
        assert_eq!(c2.twin_of(), c.twin_of());
        assert!(LiftedPa::from_parts(c.pa().clone(), &a.roles()).is_err());
    }

    #[test]
    fn p1_cases() {
        let (_, c) = c_one();
        assert!(check_p1(&c, &[], &[]).unwrap().passed());
        assert!(check_p1(&c, &word("a.@sym:$"), &word("a.@sym:$")).unwrap().passed());
        // Negative control: (q_f, #) redirected to q_n.
        let broken_pa = c.pa().with_row("@lift:q_f", "@sym:#", &[("@lift:q_n", Prob::one())]).unwrap();
        let broken = TwinPa { pa: broken_pa, ..c.clone() };
        let r = check_p1(&broken, &word("a.@sym:$"), &word("a")).unwrap();
        assert_eq!(r.violation.as_ref().map(|v| v.step), Some(0));
        assert!(!r.passed());
    }

    #[test]
    fn p2_cases() {
        let (a, c) = c_one();
        assert!(check_p2(&a, &c, &[]).unwrap().passed());
        assert!(check_p2(&a, &c, &word("a")).unwrap().passed());
        assert!(check_p2(&a, &c, &word("a.@sym:$")).is_err());
        assert!(check_p2(&a, &c, &word("@sym:#")).is_err());
        // Negative control: an asymmetric twin row.
        let broken_pa = c.pa().with_row("s0", "a", &[("sA", Prob::one())]).unwrap();
        let broken = TwinPa { pa: broken_pa, ..c.clone() };
        let r = check_p2(&a, &broken, &word("a")).unwrap();
        assert_eq!(r.violation.map(|v| (v.step, v.state)), Some((1, "sA".to_string())));
    }

    #[test]
    fn witness_prefix() {
        let (_, c) = c_one();
        let d = || word("a.@sym:$");
        let w = build_witness_prefix(&c, &[d()]).unwrap();
        assert_eq!(w.checkpoints, vec![2]);
        let w = build_witness_prefix(&c, &[d(), d()]).unwrap();
        assert_eq!(w.word, word("a.@sym:$.@sym:#.a.@sym:$"));
        assert_eq!(w.checkpoints, vec![2, 5]);
        let w = build_witness_prefix(&c, &[d(), word("a.a.@sym:$")]).unwrap();
        assert_eq!(w.checkpoints, vec![2, 6]);
        assert!(build_witness_prefix(&c, &[]).is_err());
        assert!(build_witness_prefix(&c, &[vec![]]).is_err());
    }
}
