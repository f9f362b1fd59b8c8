//! Desk-scale search and certification on concrete instances.
//!
//! Everything here works up to an explicit length bound. A failed search
//! means "nothing found within the bound", never "the value is below 1":
//! the value-1 problem has no decision procedure.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{PaError, Result};
use crate::pa::{Dist, Letter, Pa, Word};
use crate::prob::Prob;
use crate::reduction::{build_witness_prefix, CheckReport, CheckViolation, TwinPa, Value1Instance};
use crate::semantics::{accepting_mass, acceptance_probability_ix, outcome_ix, step_ix};

pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of word evaluations a search may need.
    pub budget: u64,
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: DEFAULT_BUDGET, parallel: false }
    }
}

/// Number of words of length `0..=max_len` over `letters` letters.
pub fn word_count(letters: usize, max_len: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(level);
        level = level.saturating_mul(letters as u128);
        if level == 0 {
            break;
        }
    }
    total
}

fn check_budget(letters: usize, max_len: usize, budget: u64) -> Result<u128> {
    let required = word_count(letters, max_len);
    if required > budget as u128 {
        return Err(PaError::BudgetExceeded { required, budget });
    }
    Ok(required)
}

/// Shortest first, then lexicographic by alphabet index.
fn shortlex(a: &[usize], b: &[usize]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Clone, Debug)]
struct Candidate {
    prob: Prob,
    word: Vec<usize>,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        match self.prob.cmp(&other.prob) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => shortlex(&self.word, &other.word) == Ordering::Less,
        }
    }

    fn merge(self, other: Candidate) -> Candidate {
        if other.beats(&self) {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SearchResult {
    pub best_word: Word,
    pub best_prob: Prob,
    pub explored: u64,
    /// Every word up to the bound was evaluated.
    pub exhausted: bool,
}

struct Dfs<'a> {
    pa: &'a Pa,
    best: Option<Candidate>,
    explored: u64,
}

impl Dfs<'_> {
    fn run(&mut self, d: &Dist, prefix: &mut Vec<usize>, remaining: usize) {
        self.explored += 1;
        let cand = Candidate { prob: accepting_mass(self.pa, d), word: prefix.clone() };
        self.best = Some(match self.best.take() {
            None => cand,
            Some(b) => b.merge(cand),
        });
        if remaining == 0 {
            return;
        }
        for l in 0..self.pa.num_letters() {
            let next = step_ix(self.pa, d, l);
            prefix.push(l);
            self.run(&next, prefix, remaining - 1);
            prefix.pop();
        }
    }
}

fn search_serial(pa: &Pa, start: &Dist, prefix: Vec<usize>, remaining: usize) -> (Option<Candidate>, u64) {
    let mut dfs = Dfs { pa, best: None, explored: 0 };
    let mut prefix = prefix;
    dfs.run(start, &mut prefix, remaining);
    (dfs.best, dfs.explored)
}

/// All words of exactly `len` letters, lexicographic.
fn words_of_len(letters: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..letters).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out
}

fn search_parallel(pa: &Pa, max_len: usize) -> (Option<Candidate>, u64) {
    let m = pa.num_letters();
    // Split depth: enough subtrees to keep every worker busy.
    let mut depth = 0;
    while depth < max_len && (m as u128).pow(depth as u32) < 64 {
        depth += 1;
    }
    if depth == 0 || m == 0 {
        return search_serial(pa, pa.initial(), Vec::new(), max_len);
    }
    let (shallow, shallow_count) = search_serial(pa, pa.initial(), Vec::new(), depth - 1);
    let roots = words_of_len(m, depth);
    let (deep, deep_count) = roots
        .into_par_iter()
        .map(|root| {
            let mut d = pa.initial().clone();
            for &l in &root {
                d = step_ix(pa, &d, l);
            }
            search_serial(pa, &d, root, max_len - depth)
        })
        .reduce(
            || (None, 0),
            |(a, na), (b, nb)| {
                let best = match (a, b) {
                    (Some(a), Some(b)) => Some(a.merge(b)),
                    (a, b) => a.or(b),
                };
                (best, na + nb)
            },
        );
    let best = match (shallow, deep) {
        (Some(a), Some(b)) => Some(a.merge(b)),
        (a, b) => a.or(b),
    };
    (best, shallow_count + deep_count)
}

/// Exhaustive `max_{|w| <= max_len} P(w)` over an arbitrary automaton.
pub fn bounded_value_search_pa(pa: &Pa, max_len: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    check_budget(pa.num_letters(), max_len, cfg.budget)?;
    let (best, explored) = if cfg.parallel {
        search_parallel(pa, max_len)
    } else {
        search_serial(pa, pa.initial(), Vec::new(), max_len)
    };
    let best = best.expect("the empty word is always explored");
    Ok(SearchResult { best_word: pa.word_of(&best.word), best_prob: best.prob, explored, exhausted: true })
}

/// Lower bound on the value of `b` from all words of length at most
/// `max_len`, the empty word included. Ties go to the shortest word, then the
/// first in alphabet order.
pub fn bounded_value_search(b: &Value1Instance, max_len: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    bounded_value_search_pa(b.pa(), max_len, cfg)
}

/// Odometer step in shortlex order; `false` once past `max_len`.
fn advance_shortlex(w: &mut Vec<usize>, letters: usize, max_len: usize) -> bool {
    if letters == 0 {
        return false;
    }
    for i in (0..w.len()).rev() {
        if w[i] + 1 < letters {
            w[i] += 1;
            return true;
        }
        w[i] = 0;
    }
    if w.len() == max_len {
        return false;
    }
    w.push(0);
    true
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ScheduleSearch {
    /// `u_1..u_k` over the alphabet of `B` with `P(u_i) > 1 - 2^-i`.
    Found(Vec<Word>),
    /// No word of length at most the bound clears threshold `index` (1-based).
    NotFound { index: usize, threshold: Prob, explored: u64 },
}

impl fmt::Display for ScheduleSearch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleSearch::Found(ws) => {
                for (i, w) in ws.iter().enumerate() {
                    writeln!(f, "u_{} = {}", i + 1, display_word(w))?;
                }
                Ok(())
            }
            ScheduleSearch::NotFound { index, threshold, explored } => write!(
                f,
                "not found within bound: no word clears threshold {threshold} for i = {index} ({explored} words examined)"
            ),
        }
    }
}

pub(crate) fn display_word(w: &[Letter]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        crate::pa::word_to_string(w)
    }
}

/// For `i = 1..=k`, the shortlex-first word `u_i` of length at most `max_len`
/// with `P_B(u_i) > 1 - 2^-i`.
///
/// Thresholds only grow, so every word before `u_{i-1}` in shortlex order
/// already failed a weaker threshold; the scan for `u_i` resumes at
/// `u_{i-1}`, which is reused whenever it still clears the bar.
pub fn witness_schedule_search(
    b: &Value1Instance,
    k: usize,
    max_len: usize,
    cfg: &SearchConfig,
) -> Result<ScheduleSearch> {
    if k == 0 {
        return Err(PaError::input("schedule length k must be at least 1"));
    }
    let pa = b.pa();
    check_budget(pa.num_letters(), max_len, cfg.budget)?;
    let mut current = Vec::new();
    let mut current_prob = acceptance_probability_ix(pa, &current);
    let mut explored = 1;
    let mut found = Vec::with_capacity(k);
    for i in 1..=k {
        let threshold = Prob::one_minus_pow2(i as u32);
        while current_prob <= threshold {
            if !advance_shortlex(&mut current, pa.num_letters(), max_len) {
                return Ok(ScheduleSearch::NotFound { index: i, threshold, explored });
            }
            current_prob = acceptance_probability_ix(pa, &current);
            explored += 1;
        }
        found.push(pa.word_of(&current));
    }
    Ok(ScheduleSearch::Found(found))
}

/// Norms of a twin automaton at the checkpoints of a witness prefix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub schedule: Vec<Word>,
    pub word: Word,
    pub checkpoints: Vec<usize>,
    pub norms: Vec<Prob>,
    pub thresholds: Vec<Prob>,
    pub passed: bool,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "v = {}", display_word(&self.word))?;
        for (i, ((pos, norm), thr)) in self.checkpoints.iter().zip(&self.norms).zip(&self.thresholds).enumerate() {
            let mark = if norm > thr { "ok" } else { "FAIL" };
            writeln!(f, "i = {}: |v_i| = {pos}, norm = {norm} > {thr}: {mark}", i + 1)?;
        }
        write!(f, "{}", if self.passed { "certificate: pass" } else { "certificate: FAIL" })
    }
}

/// Simulates `w_1 # .. # w_k` once and checks that the norm at each
/// checkpoint `|v_i|` strictly exceeds `1 - 2^-i`.
pub fn certificate_check(c: &TwinPa, schedule: &[Word]) -> Result<Certificate> {
    let prefix = build_witness_prefix(c, schedule)?;
    let ix = c.pa().resolve(&prefix.word)?;
    let out = outcome_ix(c.pa(), &ix);
    let norms: Vec<Prob> = prefix.checkpoints.iter().map(|&p| out[p].norm()).collect();
    let thresholds: Vec<Prob> = (1..=schedule.len()).map(|i| Prob::one_minus_pow2(i as u32)).collect();
    let passed = norms.iter().zip(&thresholds).all(|(n, t)| n > t);
    Ok(Certificate {
        schedule: schedule.to_vec(),
        word: prefix.word,
        checkpoints: prefix.checkpoints,
        norms,
        thresholds,
        passed,
    })
}

/// After a `$` that is not followed by `#`, all mass is absorbed into
/// `{q_n, q^_n}` in equal halves.
///
/// With `j` the position of the first `$` after the last `#` of `prefix`,
/// step `j + 1` (right after the `$`) must have support inside
/// `{q_f, q_n, q^_n}` with equal mass on `q_n` and `q^_n`; every step
/// `j + 2 ..= j + 1 + horizon` must have exactly `1/2` on each of `q_n` and
/// `q^_n`. The prefix is extended past its end by each non-reset letter
/// repeated, and by a round-robin over those letters.
pub fn dollar_absorption_check(c: &TwinPa, prefix: &[Letter], horizon: usize) -> Result<CheckReport> {
    let pa = c.pa();
    let ix = pa.resolve(prefix)?;
    let after_reset = ix.iter().rposition(|&l| l == c.hash()).map_or(0, |p| p + 1);
    let j = ix[after_reset..]
        .iter()
        .position(|&l| l == c.dollar())
        .map(|p| p + after_reset)
        .ok_or_else(|| PaError::input("prefix must contain $ with no # after it"))?;
    let last = j + 1 + horizon;
    let extra = (last + 1).saturating_sub(ix.len() + 1);

    let letters: Vec<usize> = (0..pa.num_letters()).filter(|&l| l != c.hash()).collect();
    let mut extensions: Vec<Vec<usize>> = letters.iter().map(|&l| vec![l; extra]).collect();
    extensions.push((0..extra).map(|i| letters[i % letters.len()]).collect());

    let (q_f, q_n, q_n_hat) = (c.q_f(), c.q_n(), c.q_n_hat());
    let half = Prob::half();
    let mut checked = 0;
    for ext in &extensions {
        let mut w = ix.clone();
        w.extend_from_slice(ext);
        let out = outcome_ix(pa, &w);
        for (t, d) in out.iter().enumerate().take(last + 1).skip(j + 1) {
            checked += 1;
            let fail = |state: usize, detail: String| CheckViolation {
                step: t,
                state: pa.state_name(state).to_string(),
                detail: format!("{detail} (extension {})", display_word(&pa.word_of(ext))),
            };
            let violation = if t == j + 1 {
                if let Some(s) = d.support().into_iter().find(|s| ![q_f, q_n, q_n_hat].contains(s)) {
                    Some(fail(s, format!("mass {} outside {{q_f, q_n, q^_n}} right after $", d.mass(s))))
                } else if d.mass(q_n) != d.mass(q_n_hat) {
                    Some(fail(q_n, format!("unequal halves {} vs {}", d.mass(q_n), d.mass(q_n_hat))))
                } else {
                    None
                }
            } else if d.mass(q_n) != &half {
                Some(fail(q_n, format!("mass {} instead of 1/2", d.mass(q_n))))
            } else if d.mass(q_n_hat) != &half {
                Some(fail(q_n_hat, format!("mass {} instead of 1/2", d.mass(q_n_hat))))
            } else {
                None
            };
            if violation.is_some() {
                return Ok(CheckReport { check: "dollar-absorption", steps_checked: checked, violation });
            }
        }
    }
    Ok(CheckReport { check: "dollar-absorption", steps_checked: checked, violation: None })
}

/// Without `$`, no outcome entry of a twin automaton has norm above `1/2`.
pub fn half_bound_check(c: &TwinPa, w: &[Letter]) -> Result<CheckReport> {
    let pa = c.pa();
    let ix = pa.resolve(w)?;
    if let Some(pos) = ix.iter().position(|&l| l == c.dollar()) {
        return Err(PaError::input(format!("half-bound check needs a $-free word; $ at position {pos}")));
    }
    let half = Prob::half();
    let out = outcome_ix(pa, &ix);
    for (t, d) in out.iter().enumerate() {
        let norm = d.norm();
        if norm > half {
            let s = d.masses().iter().position(|m| *m == norm).expect("norm is attained");
            return Ok(CheckReport {
                check: "half-bound",
                steps_checked: t + 1,
                violation: Some(CheckViolation {
                    step: t,
                    state: pa.state_name(s).to_string(),
                    detail: format!("norm {norm} exceeds 1/2"),
                }),
            });
        }
    }
    Ok(CheckReport { check: "half-bound", steps_checked: out.len(), violation: None })
}

/// Dense row-stochastic matrix of one letter.
#[derive(Clone, Debug)]
pub struct StochasticMatrix {
    pub entries: Vec<Vec<BigRational>>,
}

impl StochasticMatrix {
    pub fn of_letter(pa: &Pa, letter: usize) -> Self {
        let n = pa.num_states();
        let mut entries = vec![vec![BigRational::zero(); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = pa.row(i, letter).mass(j).value().clone();
            }
        }
        StochasticMatrix { entries }
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, x: &[BigRational]) -> Vec<BigRational> {
        let n = self.entries.len();
        (0..n)
            .map(|j| (0..n).map(|i| &x[i] * &self.entries[i][j]).sum())
            .collect()
    }
}

/// Outcome computed as `mu_0 * M_{w_0} * ... * M_{w_k}` with dense
/// matrices, independently of the stepwise simulation.
pub fn matrix_oracle(pa: &Pa, w: &[Letter]) -> Result<Vec<Dist>> {
    let ix = pa.resolve(w)?;
    let matrices: Vec<StochasticMatrix> = (0..pa.num_letters()).map(|l| StochasticMatrix::of_letter(pa, l)).collect();
    let mut x: Vec<BigRational> = pa.initial().masses().iter().map(|p| p.value().clone()).collect();
    let to_dist = |x: &[BigRational]| Dist::new(x.iter().cloned().map(Prob::new).collect::<Result<Vec<_>>>()?);
    let mut out = vec![to_dist(&x)?];
    for l in ix {
        x = matrices[l].left_mul(&x);
        out.push(to_dist(&x)?);
    }
    Ok(out)
}

/// `profile[t]` is the largest norm at step `t` over all words of length at
/// most `max_len`.
pub fn exhaustive_norm_profile(pa: &Pa, max_len: usize, budget: u64) -> Result<Vec<Prob>> {
    check_budget(pa.num_letters(), max_len, budget)?;
    fn go(pa: &Pa, d: &Dist, depth: usize, max_len: usize, profile: &mut [Prob]) {
        let n = d.norm();
        if n > profile[depth] {
            profile[depth] = n;
        }
        if depth == max_len {
            return;
        }
        for l in 0..pa.num_letters() {
            go(pa, &step_ix(pa, d, l), depth + 1, max_len, profile);
        }
    }
    let mut profile = vec![Prob::zero(); max_len + 1];
    go(pa, pa.initial(), 0, max_len, &mut profile);
    if pa.num_letters() == 0 {
        profile.truncate(1);
    }
    Ok(profile)
}
