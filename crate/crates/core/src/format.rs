//! The `.pa` document format and CSV trace export.
//!
//! A `.pa` file is TOML. Probabilities are always strings, `"n"` or `"p/q"`:
//!
//! ```toml
//! states = ["s0", "sA"]
//! alphabet = ["a"]
//! accepting = ["sA"]
//!
//! [initial]
//! "s0" = "1"
//!
//! [[transition]]
//! from = "s0"
//! letter = "a"
//! to = { "sA" = "1" }
//! ```
//!
//! Optional `[lift]` (`q_f`, `q_n`, `dollar`) and `[twin]` (`hash`, `q0`,
//! and a `[twin.twins]` table from original to hatted state) sections record
//! construction roles so they never have to be recovered from names.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{PaError, Result};
use crate::pa::{Pa, RawPa, RawRow};
use crate::prob::Prob;
use crate::reduction::{LiftRoles, LiftedPa, TwinPa, TwinRoles};
use crate::semantics::NormTrace;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocIn {
    states: Vec<String>,
    alphabet: Vec<String>,
    accepting: Vec<String>,
    initial: BTreeMap<String, Spanned<String>>,
    #[serde(default)]
    transition: Vec<RowIn>,
    lift: Option<LiftIn>,
    twin: Option<TwinIn>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RowIn {
    from: String,
    letter: String,
    to: BTreeMap<String, Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftIn {
    q_f: String,
    q_n: String,
    dollar: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwinIn {
    hash: String,
    q0: String,
    twins: BTreeMap<String, String>,
}

/// A parsed `.pa` file: the automaton plus any construction roles.
#[derive(Clone, Debug)]
pub struct PaDocument {
    pub pa: Pa,
    pub lift: Option<LiftRoles>,
    pub twin: Option<TwinRoles>,
}

impl PaDocument {
    pub fn plain(pa: Pa) -> Self {
        PaDocument { pa, lift: None, twin: None }
    }

    pub fn from_lifted(a: &LiftedPa) -> Self {
        PaDocument { pa: a.pa().clone(), lift: Some(a.roles()), twin: None }
    }

    pub fn from_twin(c: &TwinPa) -> Self {
        let roles = c.roles();
        PaDocument { pa: c.pa().clone(), lift: Some(roles.lift.clone()), twin: Some(roles) }
    }

    /// Requires a `[lift]` section and no `[twin]` section.
    pub fn lifted(&self) -> Result<LiftedPa> {
        if self.twin.is_some() {
            return Err(PaError::input("document is a twin automaton, expected a lifted one"));
        }
        let roles = self.lift.as_ref().ok_or_else(|| PaError::input("document has no [lift] section"))?;
        LiftedPa::from_parts(self.pa.clone(), roles)
    }

    /// Requires a `[twin]` section.
    pub fn twinned(&self) -> Result<TwinPa> {
        let roles = self.twin.as_ref().ok_or_else(|| PaError::input("document has no [twin] section"))?;
        TwinPa::from_parts(self.pa.clone(), roles)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax_at(text: &str, offset: usize, message: String) -> PaError {
    let (line, column) = line_col(text, offset);
    PaError::Syntax { line, column, message }
}

fn probs(text: &str, entries: BTreeMap<String, Spanned<String>>) -> Result<Vec<(String, Prob)>> {
    entries
        .into_iter()
        .map(|(state, p)| {
            let start = p.span().start;
            match p.get_ref().parse::<Prob>() {
                Ok(v) => Ok((state, v)),
                Err(e) => Err(syntax_at(text, start, e.to_string())),
            }
        })
        .collect()
}

pub fn parse_document(text: &str) -> Result<PaDocument> {
    let doc: DocIn = toml::from_str(text).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        syntax_at(text, offset, e.message().to_string())
    })?;
    let mut transitions = Vec::with_capacity(doc.transition.len());
    for row in doc.transition {
        transitions.push(RawRow { from: row.from, letter: row.letter, to: probs(text, row.to)? });
    }
    let raw = RawPa {
        states: doc.states,
        alphabet: doc.alphabet,
        initial: probs(text, doc.initial)?,
        transitions,
        accepting: doc.accepting,
    };
    let pa = Pa::from_raw(&raw)?;
    let lift = doc.lift.map(|l| LiftRoles { q_f: l.q_f, q_n: l.q_n, dollar: l.dollar });
    let twin = match (doc.twin, &lift) {
        (Some(t), Some(l)) => Some(TwinRoles { lift: l.clone(), hash: t.hash, q0: t.q0, twins: t.twins }),
        (Some(_), None) => return Err(PaError::input("[twin] section requires a [lift] section")),
        (None, _) => None,
    };
    let doc = PaDocument { pa, lift, twin };
    // Role sections must describe the automaton they travel with.
    if doc.twin.is_some() {
        doc.twinned()?;
    } else if doc.lift.is_some() {
        doc.lifted()?;
    }
    Ok(doc)
}

/// Parses and validates an automaton, ignoring role sections.
pub fn parse_pa(text: &str) -> Result<Pa> {
    parse_document(text).map(|d| d.pa)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn list<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
    let items: Vec<String> = items.into_iter().map(quote).collect();
    format!("[{}]", items.join(", "))
}

/// Canonical text: states and letters in declared order, transitions in
/// (state, letter) order, mass entries in state order, zero entries omitted.
pub fn serialize_document(doc: &PaDocument) -> String {
    let pa = &doc.pa;
    let mut out = String::new();
    let _ = writeln!(out, "states = {}", list(pa.states().iter().map(|s| s.as_str())));
    let _ = writeln!(out, "alphabet = {}", list(pa.alphabet().iter().map(|l| l.as_str())));
    let _ = writeln!(out, "accepting = {}", list(pa.accepting().iter().map(|&s| pa.state_name(s))));
    out.push_str("\n[initial]\n");
    for (s, p) in pa.initial().entries() {
        let _ = writeln!(out, "{} = \"{p}\"", quote(pa.state_name(s)));
    }
    for s in 0..pa.num_states() {
        for l in 0..pa.num_letters() {
            let to: Vec<String> =
                pa.row(s, l).entries().map(|(t, p)| format!("{} = \"{p}\"", quote(pa.state_name(t)))).collect();
            let _ = write!(
                out,
                "\n[[transition]]\nfrom = {}\nletter = {}\nto = {{ {} }}\n",
                quote(pa.state_name(s)),
                quote(pa.letter_name(l)),
                to.join(", ")
            );
        }
    }
    if let Some(l) = &doc.lift {
        let _ = write!(out, "\n[lift]\nq_f = {}\nq_n = {}\ndollar = {}\n", quote(&l.q_f), quote(&l.q_n), quote(&l.dollar));
    }
    if let Some(t) = &doc.twin {
        let _ = write!(out, "\n[twin]\nhash = {}\nq0 = {}\n\n[twin.twins]\n", quote(&t.hash), quote(&t.q0));
        // declared state order, not name order
        for s in pa.states() {
            if let Some(h) = t.twins.get(s.as_str()) {
                let _ = writeln!(out, "{} = {}", quote(s.as_str()), quote(h));
            }
        }
    }
    out
}

pub fn serialize_pa(pa: &Pa) -> String {
    serialize_document(&PaDocument::plain(pa.clone()))
}

/// Writes `step,letter,norm,<state>...` with exact `p/q` masses. The letter
/// cell of step 0 is empty.
pub fn write_trace_csv<W: io::Write>(pa: &Pa, trace: &NormTrace, out: W) -> Result<()> {
    let io_err = |e: csv::Error| PaError::input(format!("writing trace: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["step".to_string(), "letter".to_string(), "norm".to_string()];
    header.extend(pa.states().iter().map(|s| s.0.clone()));
    w.write_record(&header).map_err(io_err)?;
    for e in &trace.entries {
        let mut rec = vec![
            e.step.to_string(),
            e.letter.as_ref().map(|l| l.0.clone()).unwrap_or_default(),
            e.norm.to_string(),
        ];
        rec.extend(e.dist.masses().iter().map(Prob::to_string));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(|e| PaError::input(format!("writing trace: {e}")))?;
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceRow {
    pub step: usize,
    pub letter: Option<String>,
    pub norm: Prob,
    pub masses: Vec<(String, Prob)>,
}

/// Reads back a trace written by [`write_trace_csv`].
pub fn read_trace_csv<R: io::Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |e: csv::Error| PaError::input(format!("reading trace: {e}"));
    let header = r.headers().map_err(bad)?.clone();
    if header.len() < 3 || &header[0] != "step" || &header[1] != "letter" || &header[2] != "norm" {
        return Err(PaError::input("trace header must start with step,letter,norm"));
    }
    let states: Vec<String> = header.iter().skip(3).map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(bad)?;
        let step = rec[0].parse().map_err(|_| PaError::input(format!("bad step {:?}", &rec[0])))?;
        let letter = (!rec[1].is_empty()).then(|| rec[1].to_string());
        let masses = states
            .iter()
            .zip(rec.iter().skip(3))
            .map(|(s, m)| Ok((s.clone(), m.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(TraceRow { step, letter, norm: rec[2].parse()?, masses });
    }
    Ok(rows)
}
