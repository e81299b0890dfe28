use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::OrderedStructure;

/// Largest number of cut vectors enumerated on one side before the grid search turns heuristic.
pub const GRID_ENUM_BUDGET: u64 = 200_000;
/// Largest number of row cut vectors the mixed-minor search will enumerate.
pub const MIXED_ENUM_BUDGET: u64 = 5_000_000;
pub const WITNESS_VERSION: u32 = 1;

/// Rectangular matrix over a small alphabet. Entries are atomic-type codes or plain symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
    pub row_labels: Option<Vec<usize>>,
    pub col_labels: Option<Vec<usize>>,
}

impl TypeMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(TypeMatrix {
            rows,
            cols,
            entries,
            row_labels: None,
            col_labels: None,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let entries = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        TypeMatrix {
            rows,
            cols,
            entries,
            row_labels: None,
            col_labels: None,
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged matrix".into()));
        }
        TypeMatrix::new(rows.len(), cols, rows.concat())
    }

    /// Adjacency-type matrix: entry (a,b) is atp(a,b).
    pub fn from_structure(s: &OrderedStructure) -> Self {
        let n = s.n();
        let entries = s.type_matrix().into_iter().map(|c| c.0).collect();
        TypeMatrix {
            rows: n,
            cols: n,
            entries,
            row_labels: Some((0..n).collect()),
            col_labels: Some((0..n).collect()),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        TypeMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: (0..self.cols)
                .flat_map(|c| (0..self.rows).map(move |r| (r, c)))
                .map(|(r, c)| self.get(r, c))
                .collect(),
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
        }
    }

    pub fn is_zero_one(&self) -> bool {
        self.entries.iter().all(|&e| e <= 1)
    }

    pub fn ones(&self) -> usize {
        self.entries.iter().filter(|&&e| e == 1).count()
    }

    /// Text form: one line per row, entries separated by spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            out.push_str(&self.row(r).iter().map(|e| e.to_string()).join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses rows of whitespace-separated integers, or rows of digits without separators.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = || Error::Parse {
                line: i + 1,
                msg: "expected integers".into(),
            };
            let row: Vec<u64> = if line.contains(char::is_whitespace) {
                line.split_whitespace()
                    .map(|w| w.parse().map_err(|_| perr()))
                    .collect::<Result<_>>()?
            } else {
                line.chars()
                    .map(|c| c.to_digit(10).map(u64::from).ok_or_else(perr))
                    .collect::<Result<_>>()?
            };
            rows.push(row);
        }
        TypeMatrix::from_rows(&rows)
    }
}

/// Number of distinct rows of the zone `rows × cols` (half-open intervals).
pub fn distinct_rows(m: &TypeMatrix, rows: (usize, usize), cols: (usize, usize)) -> usize {
    if cols.0 >= cols.1 {
        return 0;
    }
    (rows.0..rows.1)
        .map(|r| &m.row(r)[cols.0..cols.1])
        .collect::<HashSet<_>>()
        .len()
}

/// Number of distinct columns of the zone `rows × cols` (half-open intervals).
pub fn distinct_cols(m: &TypeMatrix, rows: (usize, usize), cols: (usize, usize)) -> usize {
    if rows.0 >= rows.1 {
        return 0;
    }
    (cols.0..cols.1)
        .map(|c| (rows.0..rows.1).map(|r| m.get(r, c)).collect::<Vec<_>>())
        .collect::<HashSet<_>>()
        .len()
}

fn intervals(n: usize, cuts: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for &c in cuts {
        out.push((start, c));
        start = c;
    }
    out.push((start, n));
    out
}

fn check_cuts(n: usize, cuts: &[usize], t: usize) -> std::result::Result<(), String> {
    if cuts.len() + 1 != t {
        return Err(format!("expected {} cuts, found {}", t - 1, cuts.len()));
    }
    let mut prev = 0;
    for &c in cuts {
        if c <= prev || c >= n {
            return Err(format!("cut {c} out of order or range"));
        }
        prev = c;
    }
    Ok(())
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
        if acc == u64::MAX {
            break;
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMinorWitness {
    pub t: usize,
    pub row_cuts: Vec<usize>,
    pub col_cuts: Vec<usize>,
    /// `per_zone[i][j]` is a 1-entry (row, col) inside zone (i, j).
    pub per_zone: Vec<Vec<(usize, usize)>>,
}

/// Outcome of a grid-minor search, with the regime that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSearch {
    pub witness: Option<GridMinorWitness>,
    /// Whether `None` is authoritative.
    pub exhaustive: bool,
    /// The side whose cut vectors were enumerated.
    pub enumerated: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Rows,
    Cols,
}

/// Searches a t-grid minor of a 0-1 matrix.
///
/// Cut vectors of the smaller side (rows on ties) are enumerated in lexicographic
/// order; the other side is cut greedily, which is exact for a fixed first side.
/// Above [`GRID_ENUM_BUDGET`] cut vectors only balanced cuts are tried.
pub fn find_grid_minor(n_mat: &TypeMatrix, t: usize) -> Result<GridSearch> {
    if t == 0 || t > n_mat.rows() || t > n_mat.cols() {
        return Err(Error::InvalidParameter(format!(
            "t={t} exceeds the {}x{} matrix",
            n_mat.rows(),
            n_mat.cols()
        )));
    }
    if !n_mat.is_zero_one() {
        return Err(Error::InvalidParameter(
            "grid minors need a 0-1 matrix".into(),
        ));
    }
    let (side, mat) = if n_mat.cols() < n_mat.rows() {
        (Side::Cols, n_mat.transpose())
    } else {
        (Side::Rows, n_mat.clone())
    };
    let count = binomial(mat.rows() as u64 - 1, t as u64 - 1);
    let exhaustive = count <= GRID_ENUM_BUDGET;
    let found = if exhaustive {
        (1..mat.rows())
            .combinations(t - 1)
            .find_map(|cuts| greedy_grid_cols(&mat, &cuts, t).map(|cols| (cuts, cols)))
    } else {
        let balanced: Vec<usize> = (1..t).map(|i| i * mat.rows() / t).collect();
        greedy_grid_cols(&mat, &balanced, t).map(|cols| (balanced, cols))
    };
    let witness = found.map(|(a, b)| {
        let (row_cuts, col_cuts) = if side == Side::Rows { (a, b) } else { (b, a) };
        grid_witness(n_mat, t, row_cuts, col_cuts)
    });
    Ok(GridSearch {
        witness,
        exhaustive,
        enumerated: side,
    })
}

fn greedy_grid_cols(m: &TypeMatrix, row_cuts: &[usize], t: usize) -> Option<Vec<usize>> {
    let parts = intervals(m.rows(), row_cuts);
    let full: Vec<bool> = vec![true; t];
    let mut covered = vec![false; t];
    let mut cuts = Vec::with_capacity(t - 1);
    for c in 0..m.cols() {
        for (i, &(a, b)) in parts.iter().enumerate() {
            if !covered[i] && (a..b).any(|r| m.get(r, c) == 1) {
                covered[i] = true;
            }
        }
        if covered == full {
            if cuts.len() + 1 == t {
                return Some(cuts);
            }
            cuts.push(c + 1);
            covered.iter_mut().for_each(|x| *x = false);
            if c + 1 == m.cols() {
                return None;
            }
        }
    }
    None
}

fn grid_witness(
    m: &TypeMatrix,
    t: usize,
    row_cuts: Vec<usize>,
    col_cuts: Vec<usize>,
) -> GridMinorWitness {
    let ri = intervals(m.rows(), &row_cuts);
    let ci = intervals(m.cols(), &col_cuts);
    let per_zone = ri
        .iter()
        .map(|&(a, b)| {
            ci.iter()
                .map(|&(c, d)| {
                    (a..b)
                        .flat_map(|r| (c..d).map(move |col| (r, col)))
                        .find(|&(r, col)| m.get(r, col) == 1)
                        .expect("greedy cut guarantees a one in every zone")
                })
                .collect()
        })
        .collect();
    GridMinorWitness {
        t,
        row_cuts,
        col_cuts,
        per_zone,
    }
}

/// Independent validation of a grid-minor witness.
pub fn check_grid_witness(m: &TypeMatrix, w: &GridMinorWitness) -> std::result::Result<(), String> {
    check_cuts(m.rows(), &w.row_cuts, w.t)?;
    check_cuts(m.cols(), &w.col_cuts, w.t)?;
    let ri = intervals(m.rows(), &w.row_cuts);
    let ci = intervals(m.cols(), &w.col_cuts);
    if w.per_zone.len() != w.t || w.per_zone.iter().any(|r| r.len() != w.t) {
        return Err("zone table has the wrong shape".into());
    }
    for (i, &(a, b)) in ri.iter().enumerate() {
        for (j, &(c, d)) in ci.iter().enumerate() {
            let (r, col) = w.per_zone[i][j];
            if !(a <= r && r < b && c <= col && col < d) {
                return Err(format!("entry ({r},{col}) lies outside zone ({i},{j})"));
            }
            if m.get(r, col) != 1 {
                return Err(format!("entry ({r},{col}) is not 1"));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceKind {
    Rows,
    Cols,
    One,
}

/// Per-zone evidence: row or column indices with pairwise distinct patterns inside the zone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneEvidence {
    pub kind: EvidenceKind,
    pub evidence: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedMinorWitness {
    pub k: usize,
    pub t: usize,
    pub row_cuts: Vec<usize>,
    pub col_cuts: Vec<usize>,
    /// `zones[i][j]` covers the i-th row interval and j-th column interval.
    pub zones: Vec<Vec<ZoneEvidence>>,
}

/// Up to `k` rows (or, failing that, columns) with pairwise distinct patterns in the zone.
fn zone_evidence(
    m: &TypeMatrix,
    rows: (usize, usize),
    cols: (usize, usize),
    k: usize,
) -> Option<ZoneEvidence> {
    let mut seen = HashSet::new();
    let mut picked = Vec::new();
    for r in rows.0..rows.1 {
        if seen.insert(&m.row(r)[cols.0..cols.1]) {
            picked.push(r);
            if picked.len() == k {
                return Some(ZoneEvidence {
                    kind: EvidenceKind::Rows,
                    evidence: picked,
                });
            }
        }
    }
    let mut seen = HashSet::new();
    let mut picked = Vec::new();
    for c in cols.0..cols.1 {
        let col: Vec<u64> = (rows.0..rows.1).map(|r| m.get(r, c)).collect();
        if seen.insert(col) {
            picked.push(c);
            if picked.len() == k {
                return Some(ZoneEvidence {
                    kind: EvidenceKind::Cols,
                    evidence: picked,
                });
            }
        }
    }
    None
}

/// Incremental distinct-row and distinct-column counts of a zone whose column range grows.
struct GrowingZone {
    rows: (usize, usize),
    class: Vec<usize>,
    classes: HashMap<(usize, u64), usize>,
    distinct_rows: usize,
    cols_seen: HashSet<Vec<u64>>,
}

impl GrowingZone {
    fn new(rows: (usize, usize)) -> Self {
        GrowingZone {
            rows,
            class: vec![0; rows.1 - rows.0],
            classes: HashMap::new(),
            distinct_rows: 0,
            cols_seen: HashSet::new(),
        }
    }

    fn push_col(&mut self, m: &TypeMatrix, c: usize) {
        self.classes.clear();
        let mut col = Vec::with_capacity(self.rows.1 - self.rows.0);
        for (i, r) in (self.rows.0..self.rows.1).enumerate() {
            let e = m.get(r, c);
            col.push(e);
            let next = self.classes.len();
            self.class[i] = *self.classes.entry((self.class[i], e)).or_insert(next);
        }
        self.distinct_rows = self.classes.len();
        self.cols_seen.insert(col);
    }

    fn rich(&self, k: usize) -> bool {
        self.distinct_rows >= k || self.cols_seen.len() >= k
    }
}

fn greedy_mixed_cols(m: &TypeMatrix, row_cuts: &[usize], k: usize, t: usize) -> Option<Vec<usize>> {
    let parts = intervals(m.rows(), row_cuts);
    let mut zones: Vec<GrowingZone> = parts.iter().map(|&p| GrowingZone::new(p)).collect();
    let mut cuts = Vec::with_capacity(t - 1);
    for c in 0..m.cols() {
        for z in zones.iter_mut() {
            z.push_col(m, c);
        }
        if zones.iter().all(|z| z.rich(k)) {
            if cuts.len() + 1 == t {
                return Some(cuts);
            }
            if c + 1 == m.cols() {
                return None;
            }
            cuts.push(c + 1);
            zones = parts.iter().map(|&p| GrowingZone::new(p)).collect();
        }
    }
    None
}

/// Searches a (k,t)-mixed minor: convex partitions into t parts each where every zone
/// has at least k distinct rows or at least k distinct columns.
///
/// Row cut vectors are enumerated lexicographically and the columns cut greedily,
/// which is exact because richness only grows with the zone. The first hit is the
/// lexicographically least (row cuts, column cuts) pair.
pub fn find_mixed_minor(m: &TypeMatrix, k: usize, t: usize) -> Result<Option<MixedMinorWitness>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if t == 0 || t > m.rows() || t > m.cols() {
        return Err(Error::InvalidParameter(format!(
            "t={t} exceeds the {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let count = binomial(m.rows() as u64 - 1, t as u64 - 1);
    if count > MIXED_ENUM_BUDGET {
        return Err(Error::BudgetExceeded(MIXED_ENUM_BUDGET));
    }
    let found = (1..m.rows())
        .combinations(t - 1)
        .find_map(|cuts| greedy_mixed_cols(m, &cuts, k, t).map(|cols| (cuts, cols)));
    Ok(found.map(|(row_cuts, col_cuts)| {
        mixed_witness(m, k, t, row_cuts, col_cuts).expect("greedy zones are rich")
    }))
}

/// Builds the evidence table for given cuts, or `None` if some zone is not rich.
pub fn mixed_witness(
    m: &TypeMatrix,
    k: usize,
    t: usize,
    row_cuts: Vec<usize>,
    col_cuts: Vec<usize>,
) -> Option<MixedMinorWitness> {
    let ri = intervals(m.rows(), &row_cuts);
    let ci = intervals(m.cols(), &col_cuts);
    let zones = ri
        .iter()
        .map(|&r| {
            ci.iter()
                .map(|&c| zone_evidence(m, r, c, k))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some(MixedMinorWitness {
        k,
        t,
        row_cuts,
        col_cuts,
        zones,
    })
}

/// Independent validation of a mixed-minor witness.
pub fn check_mixed_witness(
    m: &TypeMatrix,
    w: &MixedMinorWitness,
) -> std::result::Result<(), String> {
    check_cuts(m.rows(), &w.row_cuts, w.t)?;
    check_cuts(m.cols(), &w.col_cuts, w.t)?;
    let ri = intervals(m.rows(), &w.row_cuts);
    let ci = intervals(m.cols(), &w.col_cuts);
    if w.zones.len() != w.t || w.zones.iter().any(|r| r.len() != w.t) {
        return Err("zone table has the wrong shape".into());
    }
    for (i, &(a, b)) in ri.iter().enumerate() {
        for (j, &(c, d)) in ci.iter().enumerate() {
            let z = &w.zones[i][j];
            if z.evidence.len() < w.k {
                return Err(format!("zone ({i},{j}) lists fewer than {} indices", w.k));
            }
            let patterns: Vec<Vec<u64>> = match z.kind {
                EvidenceKind::Rows => z
                    .evidence
                    .iter()
                    .map(|&r| {
                        if a <= r && r < b {
                            Ok((c..d).map(|x| m.get(r, x)).collect())
                        } else {
                            Err(format!("row {r} outside zone ({i},{j})"))
                        }
                    })
                    .collect::<std::result::Result<_, _>>()?,
                EvidenceKind::Cols => z
                    .evidence
                    .iter()
                    .map(|&col| {
                        if c <= col && col < d {
                            Ok((a..b).map(|x| m.get(x, col)).collect())
                        } else {
                            Err(format!("column {col} outside zone ({i},{j})"))
                        }
                    })
                    .collect::<std::result::Result<_, _>>()?,
                EvidenceKind::One => return Err("mixed minors carry row or column evidence".into()),
            };
            let unique: HashSet<&Vec<u64>> = patterns.iter().collect();
            if unique.len() != patterns.len() {
                return Err(format!("zone ({i},{j}) evidence repeats a pattern"));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BadInterval {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
    pub distinct_rows: usize,
}

/// Inclusion-minimal column intervals `I` such that `M[R×I]` has at least `k` distinct rows.
/// Intervals are half-open; the empty interval is never bad.
pub fn minimal_bad_intervals(
    m: &TypeMatrix,
    rows: (usize, usize),
    k: usize,
) -> Result<Vec<BadInterval>> {
    if rows.0 >= rows.1 || rows.1 > m.rows() {
        return Err(Error::InvalidParameter(format!(
            "row interval {rows:?} is empty or out of range"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let bad = |c: usize, d: usize| c < d && distinct_rows(m, rows, (c, d)) >= k;
    let mut out = Vec::new();
    for c in 0..m.cols() {
        for d in c + 1..=m.cols() {
            if bad(c, d) && !bad(c + 1, d) && !bad(c, d - 1) {
                out.push(BadInterval {
                    rows,
                    cols: (c, d),
                    distinct_rows: distinct_rows(m, rows, (c, d)),
                });
            }
        }
    }
    Ok(out)
}

/// First columns of the given bad intervals, sorted and deduplicated.
pub fn bad_columns(intervals: &[BadInterval]) -> Vec<usize> {
    let mut out: Vec<usize> = intervals.iter().map(|b| b.cols.0).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Constant profile for the grid-minor density threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MtProfile {
    /// c_t = 8·2^t.
    Exp8,
    /// c_t = t.
    Linear,
}

impl FromStr for MtProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp8" => Ok(MtProfile::Exp8),
            "linear" => Ok(MtProfile::Linear),
            _ => Err(Error::InvalidParameter(format!(
                "unknown threshold profile {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for MtProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MtProfile::Exp8 => "exp8",
            MtProfile::Linear => "linear",
        })
    }
}

pub fn mt_threshold(t: usize, profile: MtProfile) -> Result<u64> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    Ok(match profile {
        MtProfile::Exp8 => 8u64.saturating_mul(1u64.checked_shl(t as u32).unwrap_or(u64::MAX)),
        MtProfile::Linear => t as u64,
    })
}

/// Versioned JSON document for grid and mixed witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessDoc {
    pub version: u32,
    pub kind: String,
    pub t: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub row_cuts: Vec<usize>,
    pub col_cuts: Vec<usize>,
    pub zones: Vec<ZoneEvidence>,
}

impl From<&MixedMinorWitness> for WitnessDoc {
    fn from(w: &MixedMinorWitness) -> Self {
        WitnessDoc {
            version: WITNESS_VERSION,
            kind: "mixed".into(),
            t: w.t,
            k: Some(w.k),
            row_cuts: w.row_cuts.clone(),
            col_cuts: w.col_cuts.clone(),
            zones: w.zones.iter().flatten().cloned().collect(),
        }
    }
}

impl From<&GridMinorWitness> for WitnessDoc {
    fn from(w: &GridMinorWitness) -> Self {
        WitnessDoc {
            version: WITNESS_VERSION,
            kind: "grid".into(),
            t: w.t,
            k: None,
            row_cuts: w.row_cuts.clone(),
            col_cuts: w.col_cuts.clone(),
            zones: w
                .per_zone
                .iter()
                .flatten()
                .map(|&(r, c)| ZoneEvidence {
                    kind: EvidenceKind::One,
                    evidence: vec![r, c],
                })
                .collect(),
        }
    }
}

impl WitnessDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WitnessDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if doc.version != WITNESS_VERSION {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unsupported witness version {}", doc.version),
            });
        }
        if doc.zones.len() != doc.t * doc.t {
            return Err(Error::Parse {
                line: 0,
                msg: "zone count is not t*t".into(),
            });
        }
        Ok(doc)
    }

    pub fn into_mixed(self) -> Result<MixedMinorWitness> {
        let k = self.k.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "mixed witness without k".into(),
        })?;
        let zones = self
            .zones
            .chunks(self.t.max(1))
            .map(|c| c.to_vec())
            .collect();
        Ok(MixedMinorWitness {
            k,
            t: self.t,
            row_cuts: self.row_cuts,
            col_cuts: self.col_cuts,
            zones,
        })
    }

    pub fn into_grid(self) -> Result<GridMinorWitness> {
        let per_zone = self
            .zones
            .chunks(self.t.max(1))
            .map(|c| {
                c.iter()
                    .map(|z| match z.evidence.as_slice() {
                        [r, col] => Ok((*r, *col)),
                        _ => Err(Error::Parse {
                            line: 0,
                            msg: "grid evidence is a (row, col) pair".into(),
                        }),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridMinorWitness {
            t: self.t,
            row_cuts: self.row_cuts,
            col_cuts: self.col_cuts,
            per_zone,
        })
    }
}
