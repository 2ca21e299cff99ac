use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::formula::{Fixpoint, Formula, Name};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KripkeModel {
    pub states: usize,
    pub root: usize,
    /// Per action, sorted edge list.
    pub relations: BTreeMap<String, BTreeSet<(usize, usize)>>,
    /// Per proposition, the states where it holds.
    pub valuation: BTreeMap<String, BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("model references undeclared state {0}")]
    BadState(usize),
    #[error("malformed model: {0}")]
    Format(String),
}

pub type StateSet = Vec<bool>;

/// Values of free fixpoint variables.
pub type Interpretation = HashMap<Name, StateSet>;

impl KripkeModel {
    pub fn new(states: usize, root: usize) -> Self {
        KripkeModel {
            states,
            root,
            ..Default::default()
        }
    }

    pub fn add_edge(&mut self, action: &str, from: usize, to: usize) {
        self.relations.entry(action.to_string()).or_default().insert((from, to));
    }

    pub fn set_true(&mut self, prop: &str, state: usize) {
        self.valuation.entry(prop.to_string()).or_default().insert(state);
    }

    pub fn validate(&self) -> Result<(), SemanticsError> {
        let bad = std::iter::once(self.root)
            .chain(self.relations.values().flat_map(|r| r.iter().flat_map(|&(a, b)| [a, b])))
            .chain(self.valuation.values().flatten().copied())
            .find(|&s| s >= self.states);
        match bad {
            Some(s) => Err(SemanticsError::BadState(s)),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SemanticsError> {
        let m: KripkeModel = serde_json::from_str(text).map_err(|e| SemanticsError::Format(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    fn successors(&self, action: &str) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states];
        if let Some(r) = self.relations.get(action) {
            for &(a, b) in r {
                out[a].push(b);
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph model {\n  rankdir=LR;\n");
        for v in 0..self.states {
            let props: Vec<&str> = self
                .valuation
                .iter()
                .filter(|(_, states)| states.contains(&v))
                .map(|(p, _)| p.as_str())
                .collect();
            let shape = if v == self.root { "doublecircle" } else { "circle" };
            s.push_str(&format!("  s{v} [shape={shape}, label=\"s{v}\\n{}\"];\n", props.join(",")));
        }
        for (a, edges) in &self.relations {
            for (x, y) in edges {
                s.push_str(&format!("  s{x} -> s{y} [label=\"{a}\"];\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}

struct Evaluator<'m> {
    model: &'m KripkeModel,
    succ: HashMap<Name, Vec<Vec<usize>>>,
}

impl<'m> Evaluator<'m> {
    fn succ(&mut self, action: &Name) -> &Vec<Vec<usize>> {
        let model = self.model;
        self.succ.entry(action.clone()).or_insert_with(|| model.successors(action))
    }

    fn eval(&mut self, f: &Formula, env: &mut Interpretation) -> Result<StateSet, SemanticsError> {
        let n = self.model.states;
        Ok(match f {
            Formula::False => vec![false; n],
            Formula::True => vec![true; n],
            Formula::Prop(p) | Formula::NegProp(p) => {
                let positive = matches!(f, Formula::Prop(_));
                let holds = self.model.valuation.get(&**p);
                (0..n).map(|s| holds.is_some_and(|h| h.contains(&s)) == positive).collect()
            }
            Formula::Var(x) => env.get(x).cloned().ok_or_else(|| SemanticsError::UnboundVariable(x.to_string()))?,
            Formula::And(a, b) | Formula::Or(a, b) => {
                let l = self.eval(a, env)?;
                let r = self.eval(b, env)?;
                let and = matches!(f, Formula::And(..));
                l.iter().zip(&r).map(|(&x, &y)| if and { x && y } else { x || y }).collect()
            }
            Formula::Diamond(a, g) | Formula::Box(a, g) => {
                let inner = self.eval(g, env)?;
                let succ = self.succ(a);
                if matches!(f, Formula::Diamond(..)) {
                    succ.iter().map(|ts| ts.iter().any(|&t| inner[t])).collect()
                } else {
                    succ.iter().map(|ts| ts.iter().all(|&t| inner[t])).collect()
                }
            }
            Formula::Fix(op, x, g) => {
                let mut current = vec![*op == Fixpoint::Nu; n];
                let saved = env.remove(x);
                loop {
                    env.insert(x.clone(), current.clone());
                    let next = self.eval(g, env)?;
                    if next == current {
                        break;
                    }
                    current = next;
                }
                env.remove(x);
                if let Some(v) = saved {
                    env.insert(x.clone(), v);
                }
                current
            }
        })
    }
}

/// Denotation of `f` under the interpretation `i`, by Kleene iteration.
pub fn evaluate(f: &Formula, m: &KripkeModel, i: &Interpretation) -> Result<StateSet, SemanticsError> {
    let mut env = i.clone();
    Evaluator {
        model: m,
        succ: HashMap::new(),
    }
    .eval(f, &mut env)
}

pub fn satisfies(m: &KripkeModel, f: &Formula) -> bool {
    match evaluate(f, m, &Interpretation::new()) {
        Ok(set) => set.get(m.root).copied().unwrap_or(false),
        Err(_) => false,
    }
}
