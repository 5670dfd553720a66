//! Model export: Graphviz DAGs of the effective program and the terminal
//! range frequency table.

use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::primitives::TerminalKind;
use crate::program::{effective_instructions, Function, Operand, Program};

/// Rounds to four significant digits for display.
pub fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{}", if v == 0.0 { 0.0 } else { v });
    }
    let e = v.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        let decimals = (3 - e).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.3e}")
    }
}

fn coeff_list(c: &[f64]) -> String {
    c.iter().map(|v| sig4(*v)).collect::<Vec<_>>().join(", ")
}

#[derive(Default)]
struct Graph {
    nodes: Vec<String>,
    edges: Vec<String>,
    leaves: HashMap<String, usize>,
}

impl Graph {
    fn node(&mut self, attrs: String) -> usize {
        self.nodes.push(attrs);
        self.nodes.len() - 1
    }

    fn leaf(&mut self, key: String, attrs: impl FnOnce() -> String) -> usize {
        if let Some(&id) = self.leaves.get(&key) {
            return id;
        }
        let id = self.node(attrs());
        self.leaves.insert(key, id);
        id
    }

    fn zero(&mut self) -> usize {
        self.leaf("0".into(), || "label=\"0\", shape=plaintext".into())
    }
}

fn escape(s: &str) -> String {
    s.replace('"', "\\\"")
}

/// Graphviz rendering of the effective instructions. Tunable terminals
/// are pink boxes, tunable functions yellow ellipses, raw inputs and the
/// zero initial register value plain leaves. Leaves are shared; every
/// effective instruction is one node and the output is one more.
pub fn to_dot(program: &Program) -> String {
    let mask = effective_instructions(program);
    let mut g = Graph::default();
    let mut current: Vec<Option<usize>> = vec![None; program.register_count];

    for (ins, _) in program.instructions.iter().zip(&mask).filter(|(_, &m)| m) {
        let mut sources = Vec::with_capacity(2);
        for op in ins.used_operands() {
            let id = match op {
                Operand::Register(r) => match current[*r] {
                    Some(id) => id,
                    None => g.zero(),
                },
                Operand::Input(i) => g.leaf(format!("x{i}"), || {
                    format!("label=\"x{i}\", shape=plaintext")
                }),
                Operand::Terminal(t) => {
                    let label = format!(
                        "{}[{}:{}]\\n{{{}}}",
                        t.kind.name(),
                        t.alpha,
                        t.beta,
                        coeff_list(&t.coeffs)
                    );
                    let key = format!("{}[{}:{}]{:?}", t.kind.name(), t.alpha, t.beta, t.coeffs);
                    g.leaf(key, || {
                        format!(
                            "label=\"{}\", shape=box, style=filled, fillcolor=pink",
                            escape(&label)
                        )
                    })
                }
            };
            sources.push(id);
        }
        let attrs = match &ins.func {
            Function::Basic(f) => format!("label=\"{}\"", f.name()),
            Function::Tunable(s) => format!(
                "label=\"{}\\n{{{}}}\", style=filled, fillcolor=yellow",
                s.kind.name(),
                coeff_list(&s.omega)
            ),
        };
        let id = g.node(attrs);
        for (slot, src) in sources.into_iter().enumerate() {
            let label = if ins.func.arity() > 1 {
                format!(" [label=\"{}\"]", slot + 1)
            } else {
                String::new()
            };
            g.edges.push(format!("n{src} -> n{id}{label}"));
        }
        current[ins.dest] = Some(id);
    }

    match &program.head {
        Some(head) => {
            let out = g.node(format!(
                "label=\"MVLR\\n{}\", shape=doublecircle",
                sig4(head.coeffs[0])
            ));
            for (r, w) in head.coeffs[1..].iter().enumerate() {
                if let Some(src) = current[r] {
                    g.edges
                        .push(format!("n{src} -> n{out} [label=\"{}\"]", sig4(*w)));
                }
            }
        }
        None => {
            let src = match current[0] {
                Some(id) => id,
                None => g.zero(),
            };
            let out = g.node("label=\"R0\", shape=doublecircle".into());
            g.edges.push(format!("n{src} -> n{out}"));
        }
    }

    let mut s = String::from("digraph program {\n  rankdir=BT;\n");
    for (i, attrs) in g.nodes.iter().enumerate() {
        let _ = writeln!(s, "  n{i} [{attrs}];");
    }
    for e in &g.edges {
        let _ = writeln!(s, "  {e};");
    }
    s.push_str("}\n");
    s
}

/// Number of `nK [` node statements in a DOT document.
pub fn dot_node_count(dot: &str) -> usize {
    dot.lines()
        .filter(|l| {
            let t = l.trim_start();
            t.starts_with('n') && !t.contains("->") && t.contains(" [")
        })
        .count()
}

pub const FREQUENCY_BINS: usize = 100;

/// How often each terminal kind covers each percentile of the feature
/// axis, counted once per model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub features: usize,
    pub models: usize,
    pub counts: Vec<(TerminalKind, Vec<u64>)>,
}

impl FrequencyTable {
    pub fn new(features: usize) -> Self {
        Self {
            features,
            models: 0,
            counts: TerminalKind::ALL
                .iter()
                .map(|&k| (k, vec![0; FREQUENCY_BINS]))
                .collect(),
        }
    }

    /// Bins spanned by features `alpha..=beta`: feature `i` occupies the
    /// fraction `[i/d, (i+1)/d)` of the axis.
    pub fn bins(&self, alpha: usize, beta: usize) -> std::ops::RangeInclusive<usize> {
        let d = self.features;
        let lo = alpha * FREQUENCY_BINS / d;
        let hi = ((beta + 1) * FREQUENCY_BINS).div_ceil(d) - 1;
        lo..=hi.min(FREQUENCY_BINS - 1)
    }

    /// Adds one model: each bin covered by any effective terminal of a
    /// kind counts once for that kind.
    pub fn add(&mut self, program: &Program) {
        let mask = effective_instructions(program);
        let mut hit = vec![[false; FREQUENCY_BINS]; TerminalKind::ALL.len()];
        for (ins, _) in program.instructions.iter().zip(&mask).filter(|(_, &m)| m) {
            for op in ins.used_operands() {
                if let Operand::Terminal(t) = op {
                    let k = TerminalKind::ALL.iter().position(|&k| k == t.kind).unwrap();
                    for b in self.bins(t.alpha, t.beta) {
                        hit[k][b] = true;
                    }
                }
            }
        }
        for (k, row) in hit.iter().enumerate() {
            for (b, &h) in row.iter().enumerate() {
                self.counts[k].1[b] += h as u64;
            }
        }
        self.models += 1;
    }

    pub fn merge(&mut self, other: &FrequencyTable) {
        assert_eq!(self.features, other.features);
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in mine.1.iter_mut().zip(&theirs.1) {
                *a += b;
            }
        }
        self.models += other.models;
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("kind");
        for b in 0..FREQUENCY_BINS {
            let _ = write!(s, "\t{b}");
        }
        s.push('\n');
        for (k, row) in &self.counts {
            s.push_str(k.name());
            for c in row {
                let _ = write!(s, "\t{c}");
            }
            s.push('\n');
        }
        s
    }
}
