use serde::{Deserialize, Serialize};

use super::eval::Query;
use super::formula::Formula;
use crate::error::{Error, Result};
use crate::structure::OrderedStructure;

/// Candidate grid defined by `phi(xs; ys; z)`: rows are the tuples in `a`,
/// columns the tuples in `b`, points the elements of `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDefinition {
    #[serde(with = "formula_text")]
    pub phi: Formula,
    pub xs: Vec<String>,
    pub ys: Vec<String>,
    pub z: String,
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
    pub c: Vec<usize>,
}

mod formula_text {
    use super::Formula;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(f: &Formula, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&f.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Formula, D::Error> {
        let text = String::deserialize(d)?;
        Formula::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl GridDefinition {
    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// The map (i, j) ↦ c with φ(a_i, b_j, c), as a row-major table, if φ restricted
    /// to A × B × C is the graph of a bijection.
    pub fn bijection(&self, s: &OrderedStructure, budget: usize) -> Result<Option<Vec<usize>>> {
        let arity = self.xs.len() + self.ys.len() + 1;
        if self.a.iter().any(|t| t.len() != self.xs.len())
            || self.b.iter().any(|t| t.len() != self.ys.len())
        {
            return Err(Error::InvalidParameter(
                "tuple length does not match its variable block".into(),
            ));
        }
        let names: Vec<&str> = self
            .xs
            .iter()
            .chain(self.ys.iter())
            .map(|s| s.as_str())
            .chain([self.z.as_str()])
            .collect();
        let mut q = Query::new(s, &self.phi, &names, budget)?;
        if self.c.len() != self.m() * self.n() {
            return Ok(None);
        }
        let mut map = vec![usize::MAX; self.m() * self.n()];
        let mut hit = vec![false; self.c.len()];
        let mut args = Vec::with_capacity(arity);
        for (i, ta) in self.a.iter().enumerate() {
            for (j, tb) in self.b.iter().enumerate() {
                for (k, &c) in self.c.iter().enumerate() {
                    args.clear();
                    args.extend_from_slice(ta);
                    args.extend_from_slice(tb);
                    args.push(c);
                    if q.eval(&args)? {
                        if map[i * self.n() + j] != usize::MAX || hit[k] {
                            return Ok(None);
                        }
                        map[i * self.n() + j] = c;
                        hit[k] = true;
                    }
                }
            }
        }
        Ok(map.iter().all(|&c| c != usize::MAX).then_some(map))
    }
}

/// Whether `g.phi` defines an |A|×|B| grid (A, B, C) in `s`.
pub fn verify_defined_grid(s: &OrderedStructure, g: &GridDefinition) -> bool {
    let budget = g.phi.quantifier_depth();
    matches!(g.bijection(s, budget), Ok(Some(_)))
}
