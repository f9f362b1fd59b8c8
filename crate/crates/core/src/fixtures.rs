//! Reference automata and seeded random instance generators, shared by the
//! test suites and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::pa::{Letter, Pa, RawPa, RawRow, Word};
use crate::prob::Prob;

fn dirac(s: &str) -> Vec<(String, Prob)> {
    vec![(s.to_string(), Prob::one())]
}

/// `s0 --a--> sA`, `sA` loops on `a`; accepting `{sA}`.
pub fn b_one() -> Pa {
    let raw = RawPa {
        states: vec!["s0".into(), "sA".into()],
        alphabet: vec!["a".into()],
        initial: dirac("s0"),
        transitions: vec![
            RawRow { from: "s0".into(), letter: "a".into(), to: dirac("sA") },
            RawRow { from: "sA".into(), letter: "a".into(), to: dirac("sA") },
        ],
        accepting: vec!["sA".into()],
    };
    Pa::from_raw(&raw).expect("b_one is well formed")
}

/// `s0 --a--> {sA: 1/2, sR: 1/2}`, `sA` and `sR` loop on `a`; accepting
/// `{sA}`. Its value is exactly 1/2.
pub fn b_half() -> Pa {
    let raw = RawPa {
        states: vec!["s0".into(), "sA".into(), "sR".into()],
        alphabet: vec!["a".into()],
        initial: dirac("s0"),
        transitions: vec![
            RawRow {
                from: "s0".into(),
                letter: "a".into(),
                to: vec![("sA".into(), Prob::half()), ("sR".into(), Prob::half())],
            },
            RawRow { from: "sA".into(), letter: "a".into(), to: dirac("sA") },
            RawRow { from: "sR".into(), letter: "a".into(), to: dirac("sR") },
        ],
        accepting: vec!["sA".into()],
    };
    Pa::from_raw(&raw).expect("b_half is well formed")
}

/// Random stochastic row over `n` states with common denominator at most
/// `max_denom`.
fn random_row<R: Rng>(rng: &mut R, names: &[String], max_denom: i64) -> Vec<(String, Prob)> {
    let denom = rng.gen_range(1..=max_denom);
    let mut units = vec![0i64; names.len()];
    for _ in 0..denom {
        units[rng.gen_range(0..names.len())] += 1;
    }
    names
        .iter()
        .zip(units)
        .filter(|(_, u)| *u > 0)
        .map(|(s, u)| (s.clone(), Prob::ratio(u, denom)))
        .collect()
}

/// Random complete automaton with `1..=max_states` states `q0..`,
/// `1..=max_letters` letters `a, b, c, ..`, rows with denominators at most
/// `max_denom`, initial distribution Dirac on `q0` and a nonempty random
/// accepting set.
pub fn random_value1_pa<R: Rng>(rng: &mut R, max_states: usize, max_letters: usize, max_denom: i64) -> Pa {
    let n = rng.gen_range(1..=max_states);
    let m = rng.gen_range(1..=max_letters);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let alphabet: Vec<String> = (0..m).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut transitions = Vec::new();
    for s in &states {
        for l in &alphabet {
            transitions.push(RawRow { from: s.clone(), letter: l.clone(), to: random_row(rng, &states, max_denom) });
        }
    }
    let k = rng.gen_range(1..=n);
    let accepting = states.choose_multiple(rng, k).cloned().collect();
    let raw = RawPa { states: states.clone(), alphabet, initial: dirac(&states[0]), transitions, accepting };
    Pa::from_raw(&raw).expect("generated automaton is well formed")
}

/// Like [`random_value1_pa`] but with a random initial distribution and a
/// possibly empty accepting set.
pub fn random_pa<R: Rng>(rng: &mut R, max_states: usize, max_letters: usize, max_denom: i64) -> Pa {
    let mut raw = random_value1_pa(rng, max_states, max_letters, max_denom).to_raw();
    raw.initial = random_row(rng, &raw.states, max_denom);
    let k = rng.gen_range(0..=raw.states.len());
    raw.accepting = raw.states.choose_multiple(rng, k).cloned().collect();
    Pa::from_raw(&raw).expect("generated automaton is well formed")
}

/// Uniform random word of length `0..=max_len` over the given letters.
pub fn random_word<R: Rng>(rng: &mut R, letters: &[Letter], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    random_word_exact(rng, letters, len)
}

pub fn random_word_exact<R: Rng>(rng: &mut R, letters: &[Letter], len: usize) -> Word {
    if letters.is_empty() {
        return Vec::new();
    }
    (0..len).map(|_| letters.choose(rng).expect("nonempty").clone()).collect()
}
