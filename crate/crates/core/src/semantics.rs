//! Distribution evolution on finite words.
//!
//! Letter `w[i]` maps outcome entry `i` to entry `i + 1`, so the outcome of a
//! word of length `n` has `n + 1` distributions and entry 0 is the initial
//! distribution. Infinite words are only ever probed through finite prefixes;
//! nothing here decides whether the limsup of the norms is 1.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{PaError, Result};
use crate::pa::{Dist, Letter, Pa, Word};
use crate::prob::Prob;

/// `d'(q) = sum_{q'} d(q') * delta(q', letter)(q)` over letter indices.
pub fn step_ix(pa: &Pa, d: &Dist, letter: usize) -> Dist {
    let mut acc = vec![BigRational::zero(); pa.num_states()];
    for (src, m) in d.entries() {
        for (dst, p) in pa.row(src, letter).entries() {
            acc[dst] += m.value() * p.value();
        }
    }
    Dist::from_vec_unchecked(acc.into_iter().map(Prob::from_rational_unchecked).collect())
}

pub fn step(pa: &Pa, d: &Dist, letter: &Letter) -> Result<Dist> {
    if d.len() != pa.num_states() {
        return Err(PaError::input(format!(
            "distribution has {} entries, automaton has {} states",
            d.len(),
            pa.num_states()
        )));
    }
    Ok(step_ix(pa, d, pa.letter(letter.as_str())?))
}

pub fn outcome_ix(pa: &Pa, w: &[usize]) -> Vec<Dist> {
    let mut out = Vec::with_capacity(w.len() + 1);
    out.push(pa.initial().clone());
    for &l in w {
        let next = step_ix(pa, out.last().expect("nonempty"), l);
        out.push(next);
    }
    out
}

/// The sequence `A^w_0 .. A^w_|w|`.
pub fn outcome(pa: &Pa, w: &[Letter]) -> Result<Vec<Dist>> {
    Ok(outcome_ix(pa, &pa.resolve(w)?))
}

/// Mass of `d` on the accepting states.
pub fn accepting_mass(pa: &Pa, d: &Dist) -> Prob {
    let sum: BigRational = pa.accepting().iter().map(|&q| d.mass(q).value()).sum();
    Prob::from_rational_unchecked(sum)
}

pub fn acceptance_probability_ix(pa: &Pa, w: &[usize]) -> Prob {
    let mut d = pa.initial().clone();
    for &l in w {
        d = step_ix(pa, &d, l);
    }
    accepting_mass(pa, &d)
}

/// `P_A(w)`: final mass on accepting states. Zero when nothing is
/// accepting.
pub fn acceptance_probability(pa: &Pa, w: &[Letter]) -> Result<Prob> {
    Ok(acceptance_probability_ix(pa, &pa.resolve(w)?))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceEntry {
    pub step: usize,
    /// Letter consumed to reach this entry; `None` at step 0.
    pub letter: Option<Letter>,
    pub dist: Dist,
    pub norm: Prob,
}

/// Finite prefix of an outcome together with its norms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormTrace {
    pub entries: Vec<TraceEntry>,
}

impl NormTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norms(&self) -> Vec<Prob> {
        self.entries.iter().map(|e| e.norm.clone()).collect()
    }
}

pub fn norm_trace(pa: &Pa, w: &[Letter]) -> Result<NormTrace> {
    let ix = pa.resolve(w)?;
    let entries = outcome_ix(pa, &ix)
        .into_iter()
        .enumerate()
        .map(|(step, dist)| TraceEntry {
            step,
            letter: step.checked_sub(1).map(|i| w[i].clone()),
            norm: dist.norm(),
            dist,
        })
        .collect();
    Ok(NormTrace { entries })
}

/// Trace of the finite unrolling `stem . cycle^reps` of the lasso word
/// `stem . cycle^omega`.
pub fn lasso_trace(pa: &Pa, stem: &[Letter], cycle: &[Letter], reps: usize) -> Result<NormTrace> {
    if cycle.is_empty() {
        return Err(PaError::input("lasso loop word must be nonempty"));
    }
    let mut w: Word = stem.to_vec();
    for _ in 0..reps {
        w.extend_from_slice(cycle);
    }
    norm_trace(pa, &w)
}

/// Largest norm among entries with step `>= start`, with the first step
/// attaining it.
pub fn max_norm_from(trace: &NormTrace, start: usize) -> Result<(Prob, usize)> {
    if start >= trace.len() {
        return Err(PaError::input(format!("start {start} is past the end of a trace of length {}", trace.len())));
    }
    let mut best = (trace.entries[start].norm.clone(), trace.entries[start].step);
    for e in &trace.entries[start + 1..] {
        if e.norm > best.0 {
            best = (e.norm.clone(), e.step);
        }
    }
    Ok(best)
}
