use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::OrderRel;

/// Coloring of ordered pairs of points of a rows×cols grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairColoring {
    rows: usize,
    cols: usize,
    colors: Vec<u32>,
}

impl PairColoring {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut((usize, usize), (usize, usize)) -> u32,
    ) -> Self {
        let pts = rows * cols;
        let mut colors = Vec::with_capacity(pts * pts);
        for a in 0..pts {
            for b in 0..pts {
                colors.push(f((a / cols, a % cols), (b / cols, b % cols)));
            }
        }
        PairColoring { rows, cols, colors }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn color(&self, p: (usize, usize), q: (usize, usize)) -> u32 {
        let pts = self.rows * self.cols;
        self.colors[(p.0 * self.cols + p.1) * pts + q.0 * self.cols + q.1]
    }
}

/// Rows and columns of a subgrid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgrid {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Whether the color of every pair of subgrid points depends only on how their rows and columns compare.
pub fn is_homogeneous_subgrid(c: &PairColoring, g: &Subgrid) -> bool {
    let mut seen: [Option<u32>; 9] = [None; 9];
    for &r1 in &g.rows {
        for &c1 in &g.cols {
            for &r2 in &g.rows {
                for &c2 in &g.cols {
                    let k = 3 * OrderRel::of(r1, r2).index() + OrderRel::of(c1, c2).index();
                    let col = c.color((r1, c1), (r2, c2));
                    match seen[k] {
                        Some(x) if x != col => return false,
                        Some(_) => {}
                        None => seen[k] = Some(col),
                    }
                }
            }
        }
    }
    true
}

/// First homogeneous m×n subgrid in lexicographic order of (rows, cols), if any.
pub fn homogenize_grid(c: &PairColoring, m: usize, n: usize) -> Result<Option<Subgrid>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "target grid must be nonempty".into(),
        ));
    }
    if m > c.rows || n > c.cols {
        return Err(Error::InvalidParameter(format!(
            "{m}x{n} does not fit in {}x{}",
            c.rows, c.cols
        )));
    }
    for rows in (0..c.rows).combinations(m) {
        for cols in (0..c.cols).combinations(n) {
            let g = Subgrid {
                rows: rows.clone(),
                cols,
            };
            if is_homogeneous_subgrid(c, &g) {
                return Ok(Some(g));
            }
        }
    }
    Ok(None)
}
