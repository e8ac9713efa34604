//! Finite fragments of value sets with a partial `tau`, checked against the
//! axioms of a tau-chain:
//!
//! 1. linear order with `inf` as maximum;
//! 2. `tau` strictly increasing, `tau(inf) = inf`;
//! 3. `tau(gamma) <= gamma` and `delta < gamma` imply `tau(delta) < delta`
//!    (for `gamma != inf`);
//!
//! plus the dual of 3, `tau(gamma) >= gamma` and `gamma < delta` imply
//! `tau(delta) > delta` (for `delta != inf`), reported separately. Only
//! instances whose `tau` values lie inside the fragment are checked.

use std::fmt;

use super::{Exp, Value};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Order,
    Monotone,
    Contracting,
    Dual,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Order => "axiom-1",
            Axiom::Monotone => "axiom-2",
            Axiom::Contracting => "axiom-3",
            Axiom::Dual => "dual-3",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.detail)
    }
}

/// Points listed in ascending order; `tau[i]` is the index of `tau` of
/// point `i` when it lies in the fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTauChain {
    labels: Vec<String>,
    tau: Vec<Option<usize>>,
    infinity: Option<usize>,
}

const INF: &str = "inf";

impl FiniteTauChain {
    /// `labels` in ascending order, `tau` as pairs of labels.
    pub fn new(labels: Vec<String>, tau: &[(String, String)]) -> Result<Self> {
        let index = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::Shape(format!("unknown chain point {l}")))
        };
        let mut map = vec![None; labels.len()];
        for (a, b) in tau {
            map[index(a)?] = Some(index(b)?);
        }
        let infinity = labels.iter().position(|l| l == INF);
        Ok(FiniteTauChain {
            labels,
            tau: map,
            infinity,
        })
    }

    /// The points of `values` (sorted, `Infinity` last) with
    /// `tau(gamma) = n gamma` wherever the image is among them.
    pub fn window(values: &[Value], n: i64) -> Self {
        let mut vals = values.to_vec();
        vals.sort();
        vals.dedup();
        let labels: Vec<String> = vals.iter().map(ToString::to_string).collect();
        let tau = vals
            .iter()
            .map(|v| {
                let img = match v {
                    Value::Finite(g) => Value::Finite(*g * Exp::from_integer(n)),
                    Value::Infinity => Value::Infinity,
                };
                vals.iter().position(|w| *w == img)
            })
            .collect();
        let infinity = vals.iter().position(|v| *v == Value::Infinity);
        FiniteTauChain {
            labels,
            tau,
            infinity,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tau_of(&self, i: usize) -> Option<usize> {
        self.tau[i]
    }

    fn name(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn check(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.labels.len();
        let mut seen = std::collections::BTreeSet::new();
        for l in &self.labels {
            if !seen.insert(l) {
                out.push(Violation {
                    axiom: Axiom::Order,
                    detail: format!("point {l} listed twice"),
                });
            }
        }
        match self.infinity {
            None => out.push(Violation {
                axiom: Axiom::Order,
                detail: "no inf point".into(),
            }),
            Some(i) if i + 1 != n => out.push(Violation {
                axiom: Axiom::Order,
                detail: format!("inf is below {}", self.name(n - 1)),
            }),
            _ => {}
        }
        if let Some(i) = self.infinity {
            if let Some(j) = self.tau[i] {
                if j != i {
                    out.push(Violation {
                        axiom: Axiom::Monotone,
                        detail: format!("tau(inf) = {}", self.name(j)),
                    });
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if let (Some(ta), Some(tb)) = (self.tau[a], self.tau[b]) {
                    if ta >= tb {
                        out.push(Violation {
                            axiom: Axiom::Monotone,
                            detail: format!(
                                "{} < {} but tau gives {} >= {}",
                                self.name(a),
                                self.name(b),
                                self.name(ta),
                                self.name(tb)
                            ),
                        });
                    }
                }
            }
        }
        let finite = |i: usize| Some(i) != self.infinity;
        for g in (0..n).filter(|&g| finite(g)) {
            let Some(tg) = self.tau[g] else { continue };
            if tg <= g {
                for d in 0..g {
                    if let Some(td) = self.tau[d] {
                        if td >= d {
                            out.push(Violation {
                                axiom: Axiom::Contracting,
                                detail: format!(
                                    "gamma={} delta={}: tau(delta) = {} is not below delta",
                                    self.name(g),
                                    self.name(d),
                                    self.name(td)
                                ),
                            });
                        }
                    }
                }
            }
        }
        for g in 0..n {
            let Some(tg) = self.tau[g] else { continue };
            if tg >= g {
                for d in (g + 1..n).filter(|&d| finite(d)) {
                    if let Some(td) = self.tau[d] {
                        if td <= d {
                            out.push(Violation {
                                axiom: Axiom::Dual,
                                detail: format!(
                                    "gamma={} delta={}: tau(delta) = {} is not above delta",
                                    self.name(g),
                                    self.name(d),
                                    self.name(td)
                                ),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for FiniteTauChain {
    /// Space-separated points, each written `label` or `label>image`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.labels.len())
            .map(|i| match self.tau[i] {
                Some(j) => format!("{}>{}", self.labels[i], self.labels[j]),
                None => self.labels[i].clone(),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}
