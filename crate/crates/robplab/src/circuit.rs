//! Structural validators for de Morgan circuits: decomposable AND-nodes and
//! decision OR-nodes.

use crate::bitset::VarSet;
use crate::error::{Error, Result};

/// Gate of a de Morgan circuit. Inputs refer to earlier gates, which keeps
/// the circuit acyclic by construction; negation is only allowed on variable
/// gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Var(u32),
    /// Negation of the variable gate at the given index.
    Not(u32),
    Const(bool),
    And(Vec<u32>),
    Or(Vec<u32>),
}

#[derive(Clone, Debug)]
pub struct Circuit {
    num_vars: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_vars: u32, gates: Vec<Gate>) -> Result<Self> {
        for (i, gate) in gates.iter().enumerate() {
            let check_ref = |r: u32| {
                if r as usize >= i {
                    Err(Error::InvalidParameter(format!(
                        "gate {i} refers to gate {r}, which is not earlier"
                    )))
                } else {
                    Ok(())
                }
            };
            match gate {
                Gate::Var(v) => {
                    if *v >= num_vars {
                        return Err(Error::VariableOutOfRange {
                            var: *v,
                            count: num_vars,
                        });
                    }
                }
                Gate::Not(r) => {
                    check_ref(*r)?;
                    if !matches!(gates[*r as usize], Gate::Var(_)) {
                        return Err(Error::InvalidParameter(format!(
                            "gate {i}: negation must apply to a variable gate"
                        )));
                    }
                }
                Gate::Const(_) => {}
                Gate::And(inputs) | Gate::Or(inputs) => {
                    for r in inputs {
                        check_ref(*r)?;
                    }
                }
            }
        }
        Ok(Circuit { num_vars, gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Variables whose input gates reach each gate.
    fn vreach(&self) -> Vec<VarSet> {
        let mut reach = vec![VarSet::with_capacity(self.num_vars); self.gates.len()];
        for (i, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Var(v) => reach[i].insert(*v),
                Gate::Not(r) => {
                    let s = reach[*r as usize].clone();
                    reach[i].union_with(&s);
                }
                Gate::Const(_) => {}
                Gate::And(inputs) | Gate::Or(inputs) => {
                    for r in inputs {
                        let s = reach[*r as usize].clone();
                        reach[i].union_with(&s);
                    }
                }
            }
        }
        reach
    }

    /// The literal computed by a gate, if it is a literal gate.
    fn as_literal(&self, idx: u32) -> Option<(u32, bool)> {
        match &self.gates[idx as usize] {
            Gate::Var(v) => Some((*v, true)),
            Gate::Not(r) => match &self.gates[*r as usize] {
                Gate::Var(v) => Some((*v, false)),
                _ => None,
            },
            _ => None,
        }
    }
}

/// True iff every AND-gate's inputs have pairwise disjoint reachable-variable
/// sets.
pub fn check_decomposable(c: &Circuit) -> bool {
    let reach = c.vreach();
    c.gates().iter().all(|gate| match gate {
        Gate::And(inputs) => {
            let mut union = VarSet::with_capacity(c.num_vars);
            let mut total = 0;
            for r in inputs {
                total += reach[*r as usize].len();
                union.union_with(&reach[*r as usize]);
            }
            union.len() == total
        }
        _ => true,
    })
}

/// True iff every OR-gate is a decision node: binary, over two AND-gates
/// that take complementary literals of a shared variable among their inputs.
pub fn check_decision(c: &Circuit) -> bool {
    c.gates().iter().all(|gate| match gate {
        Gate::Or(inputs) => {
            let [a, b] = inputs.as_slice() else {
                return false;
            };
            let (Gate::And(ia), Gate::And(ib)) =
                (&c.gates[*a as usize], &c.gates[*b as usize])
            else {
                return false;
            };
            ia.iter().any(|&ga| {
                c.as_literal(ga).is_some_and(|(v, sign)| {
                    ib.iter().any(|&gb| c.as_literal(gb) == Some((v, !sign)))
                })
            })
        }
        _ => true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_forward_references_and_non_demorgan() {
        assert!(Circuit::new(1, vec![Gate::Not(0)]).is_err());
        let and_then_not = Circuit::new(2, vec![Gate::Var(0), Gate::Var(1), Gate::And(vec![0, 1]), Gate::Not(2)]);
        assert!(and_then_not.is_err());
    }

    #[test]
    fn decomposability() {
        // and(x0, x1) is decomposable.
        let c = Circuit::new(2, vec![Gate::Var(0), Gate::Var(1), Gate::And(vec![0, 1])]).unwrap();
        assert!(check_decomposable(&c));
        // and(x0, x0) is not.
        let c = Circuit::new(1, vec![Gate::Var(0), Gate::And(vec![0, 0])]).unwrap();
        assert!(!check_decomposable(&c));
    }

    #[test]
    fn decision_node_pattern() {
        // or(and(x, g), and(not x, h)) with disjoint remainders.
        let c = Circuit::new(
            3,
            vec![
                Gate::Var(0),             // 0: x
                Gate::Not(0),             // 1: not x
                Gate::Var(1),             // 2
                Gate::Var(2),             // 3
                Gate::And(vec![0, 2]),    // 4: x & v1
                Gate::And(vec![1, 3]),    // 5: !x & v2
                Gate::Or(vec![4, 5]),     // 6
            ],
        )
        .unwrap();
        assert!(check_decision(&c));
        assert!(check_decomposable(&c));

        // or over two ANDs without complementary literals.
        let c = Circuit::new(
            2,
            vec![
                Gate::Var(0),
                Gate::Var(1),
                Gate::And(vec![0]),
                Gate::And(vec![1]),
                Gate::Or(vec![2, 3]),
            ],
        )
        .unwrap();
        assert!(!check_decision(&c));

        // Ternary or is not a decision node.
        let c = Circuit::new(
            1,
            vec![
                Gate::Var(0),
                Gate::And(vec![0]),
                Gate::And(vec![0]),
                Gate::And(vec![0]),
                Gate::Or(vec![1, 2, 3]),
            ],
        )
        .unwrap();
        assert!(!check_decision(&c));
    }
}
