//! CNF formulas, literal sets and the monotone 2-CNF correspondence `phi(G)`.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A signed variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: u32) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    pub fn negated(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl std::fmt::Display for Literal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}v{}", if self.positive { "+" } else { "-" }, self.var)
    }
}

/// A consistent set of literals: at most one sign per variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiteralSet {
    signs: Vec<Option<bool>>,
}

impl LiteralSet {
    pub fn new(num_vars: u32) -> Self {
        LiteralSet {
            signs: vec![None; num_vars as usize],
        }
    }

    /// Full assignment from the set of positively assigned variables.
    pub fn from_positives(num_vars: u32, positives: &[u32]) -> Self {
        let mut s = LiteralSet {
            signs: vec![Some(false); num_vars as usize],
        };
        for &v in positives {
            s.signs[v as usize] = Some(true);
        }
        s
    }

    /// Full assignment from a bit mask: bit `v` set means variable `v` is
    /// positive.
    pub fn from_mask(num_vars: u32, mask: u64) -> Self {
        LiteralSet {
            signs: (0..num_vars).map(|v| Some(mask >> v & 1 == 1)).collect(),
        }
    }

    pub fn set(&mut self, lit: Literal) {
        self.signs[lit.var as usize] = Some(lit.positive);
    }

    pub fn sign(&self, var: u32) -> Option<bool> {
        self.signs.get(var as usize).copied().flatten()
    }

    pub fn num_vars(&self) -> u32 {
        self.signs.len() as u32
    }

    /// True iff every variable up to `num_vars` is assigned.
    pub fn is_full(&self) -> bool {
        self.signs.iter().all(|s| s.is_some())
    }

    pub fn first_unassigned(&self) -> Option<u32> {
        self.signs.iter().position(|s| s.is_none()).map(|i| i as u32)
    }

    pub fn positives(&self) -> Vec<u32> {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Some(true))
            .map(|(i, _)| i as u32)
            .collect()
    }

    pub fn satisfies_literal(&self, lit: Literal) -> bool {
        self.sign(lit.var) == Some(lit.positive)
    }
}

/// CNF formula over variables `0..variable_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: u32,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(variable_count: u32, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (ci, clause) in clauses.iter().enumerate() {
            let mut seen = vec![false; variable_count as usize];
            for lit in clause {
                if lit.var >= variable_count {
                    return Err(Error::VariableOutOfRange {
                        var: lit.var,
                        count: variable_count,
                    });
                }
                if seen[lit.var as usize] {
                    return Err(Error::RepeatedVariable {
                        var: lit.var,
                        clause: ci,
                    });
                }
                seen[lit.var as usize] = true;
            }
        }
        Ok(CnfFormula {
            variable_count,
            clauses,
        })
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// True iff every clause contains a literal satisfied by the full
    /// assignment `a`.
    pub fn satisfies(&self, a: &LiteralSet) -> Result<bool> {
        if a.num_vars() < self.variable_count {
            return Err(Error::PartialAssignment(a.num_vars()));
        }
        if let Some(v) = a.first_unassigned() {
            return Err(Error::PartialAssignment(v));
        }
        Ok(self.satisfies_mask(assignment_mask(a)))
    }

    pub(crate) fn satisfies_mask(&self, mask: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|lit| (mask >> lit.var & 1 == 1) == lit.positive)
        })
    }
}

pub(crate) fn assignment_mask(a: &LiteralSet) -> u64 {
    let mut mask = 0u64;
    for v in 0..a.num_vars() {
        if a.sign(v) == Some(true) {
            mask |= 1 << v;
        }
    }
    mask
}

/// The monotone 2-CNF of a graph: one clause `(u v v)` per edge, variable `i`
/// standing for vertex `i`. Rejects graphs with isolated vertices, which have
/// no edge to mention them.
pub fn phi(g: &Graph) -> Result<CnfFormula> {
    if let Some(v) = g.isolated_vertices().next() {
        return Err(Error::IsolatedVertex(v));
    }
    let clauses = g
        .edges()
        .iter()
        .map(|&(u, v)| vec![Literal::pos(u), Literal::pos(v)])
        .collect();
    CnfFormula::new(g.vertex_count(), clauses)
}

/// Primal graph of a CNF: variables as vertices, an edge between every pair
/// of variables co-occurring in a clause.
pub fn primal_graph(f: &CnfFormula) -> Graph {
    let mut edges = std::collections::BTreeSet::new();
    for clause in f.clauses() {
        for (i, a) in clause.iter().enumerate() {
            for b in &clause[i + 1..] {
                edges.insert((a.var.min(b.var), a.var.max(b.var)));
            }
        }
    }
    Graph::new(f.variable_count(), edges).expect("co-occurrence pairs are valid edges")
}
