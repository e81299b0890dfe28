//! Regular semigrids: schemes, generation, classification and extraction.
mod extract;
mod general;
mod ramsey;
mod scheme;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{OrderedStructure, Signature};

pub use extract::{
    extract_semigrid_from_grid, graph_scheme_of, homogenize_defined_grid, semigrid_to_graph,
};
pub use general::{
    classify_general, find_embedding, general_points, general_scheme_at, general_scheme_count,
    general_schemes, Embedding, GeneralScheme,
};
pub use ramsey::{homogenize_grid, is_homogeneous_subgrid, PairColoring, Subgrid};
pub use scheme::{
    decode_gs, generate_gs, generate_semigrid, is_r_graph, Cells, Dir, DirSet, GraphScheme,
    InnerFlag, Orient, RType,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "scheme", rename_all = "lowercase")]
pub enum Scheme {
    Graph(GraphScheme),
    General(GeneralScheme),
}

impl Scheme {
    pub fn generate(&self, sig: &Signature, m: usize, n: usize) -> Result<OrderedStructure> {
        match self {
            Scheme::Graph(g) => generate_semigrid(*g, m, n),
            Scheme::General(g) => g.generate(sig, m, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub scheme: Scheme,
    pub m: usize,
    pub n: usize,
}

/// All schemes over `sig`: the 256 graph schemes for the graph signature,
/// the consistent general schemes otherwise.
pub fn enumerate_schemes(sig: &Signature) -> Result<Box<dyn Iterator<Item = Scheme>>> {
    if sig.is_graph() {
        return Ok(Box::new(GraphScheme::all().into_iter().map(Scheme::Graph)));
    }
    Ok(Box::new(general_schemes(sig)?.map(Scheme::General)))
}

/// Recognizes a regular semigrid. Graphs are matched against graph schemes
/// first, trying m in increasing order and `<` before `>`.
pub fn classify_regular_semigrid(s: &OrderedStructure) -> Option<Classification> {
    let total = s.n();
    if s.sig().is_graph() {
        for m in 1..total {
            if !total.is_multiple_of(m + 1) || total / (m + 1) < 2 {
                continue;
            }
            let n = total / (m + 1) - 1;
            for orient in [Orient::First, Orient::Last] {
                if let Some(sc) = scheme::classify_graph_as(s, m, n, orient) {
                    return Some(Classification {
                        scheme: Scheme::Graph(sc),
                        m,
                        n,
                    });
                }
            }
        }
    }
    classify_general(s).map(|(sc, m, n)| Classification {
        scheme: Scheme::General(sc),
        m,
        n,
    })
}

/// Same as [`classify_regular_semigrid`] but failing with [`Error::NotSemigrid`].
pub fn classify(s: &OrderedStructure) -> Result<Classification> {
    classify_regular_semigrid(s).ok_or(Error::NotSemigrid)
}
