use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use super::pieces::{ModifiedPuzzle, PuzzlePiece};
use crate::error::{Error, Result};
use crate::geometry::{winding_around_zero, SegmentIndex};

/// Returns of the critical point checked against the small domain.
pub const ORBIT_RETURNS: usize = 100;

/// Targets used by the degree certificate.
pub const DEGREE_TARGETS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableauCell {
    pub piece: usize,
    pub critical: bool,
}

/// Deepest critical row of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "depth")]
pub enum CriticalDepth {
    None,
    Depth(usize),
    /// Critical at every computed depth.
    AtLeast(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct Tableau {
    pub base: Complex64,
    pub orbit: Vec<Complex64>,
    /// Rows are depths `1..=depth`, columns are times `0..orbit.len()`.
    pub depth: usize,
    pub cells: Vec<Vec<TableauCell>>,
    pub d: Vec<CriticalDepth>,
}

impl Tableau {
    pub fn time(&self) -> usize {
        self.orbit.len()
    }

    /// Cell at depth `n >= 1` and time `l`.
    pub fn cell(&self, n: usize, l: usize) -> TableauCell {
        self.cells[n - 1][l]
    }

    pub fn column(&self, l: usize) -> Vec<TableauCell> {
        self.cells.iter().map(|row| row[l]).collect()
    }

    /// Criticality in every column is an initial segment of the depths.
    pub fn is_downward_closed(&self) -> bool {
        (0..self.time()).all(|l| {
            let col = self.column(l);
            col.windows(2).all(|w| w[0].critical || !w[1].critical)
        })
    }

    /// Rows are depths, columns are times; a cell is the piece id, with a
    /// trailing `*` when the piece contains a critical point.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("depth");
        for l in 0..self.time() {
            let _ = write!(s, ",l{l}");
        }
        s.push('\n');
        for (i, row) in self.cells.iter().enumerate() {
            let _ = write!(s, "{}", i + 1);
            for c in row {
                let _ = write!(s, ",{}{}", c.piece, if c.critical { "*" } else { "" });
            }
            s.push('\n');
        }
        s.push('d');
        for d in &self.d {
            match d {
                CriticalDepth::None => s.push_str(",-"),
                CriticalDepth::Depth(n) => {
                    let _ = write!(s, ",{n}");
                }
                CriticalDepth::AtLeast(n) => {
                    let _ = write!(s, ",>={n}");
                }
            }
        }
        s.push('\n');
        s
    }
}

/// The tableau of `z`: pieces `P_n(f^l z)` for `1 <= n <= depth`,
/// `0 <= l < time`, with the critical depth of every column.
pub fn tableau(puzzle: &mut ModifiedPuzzle, z: Complex64, depth: usize, time: usize) -> Result<Tableau> {
    if depth == 0 || time == 0 {
        return Err(Error::InvalidParameter("tableau needs depth >= 1 and time >= 1".into()));
    }
    let m = puzzle.map;
    let mut orbit = Vec::with_capacity(time);
    let mut w = z;
    for l in 0..time {
        orbit.push(w);
        if l + 1 < time {
            w = m
                .eval(w)
                .map_err(|_| Error::Precondition(format!("orbit of {z} escapes at step {}", l + 1)))?;
        }
    }
    let mut cells = vec![Vec::with_capacity(time); depth];
    for &w in &orbit {
        for n in 1..=depth {
            let id = puzzle.piece_at(n, w)?;
            cells[n - 1].push(TableauCell {
                piece: id,
                critical: puzzle.piece(n, id).is_critical(),
            });
        }
    }
    let d = (0..time)
        .map(|l| match (1..=depth).rev().find(|&n| cells[n - 1][l].critical) {
            None => CriticalDepth::None,
            Some(n) if n == depth => CriticalDepth::AtLeast(depth),
            Some(n) => CriticalDepth::Depth(n),
        })
        .collect();
    Ok(Tableau {
        base: z,
        orbit,
        depth,
        cells,
        d,
    })
}

/// Renormalization `f^p : U -> V` read off a periodic critical column, with
/// `U = P_{n0+p}(c)` and `V = P_{n0}(c)`.
#[derive(Debug, Clone, Serialize)]
pub struct RenormTableauCandidate {
    pub period: usize,
    pub n0: usize,
    pub critical_point: Complex64,
    pub domain: Vec<Complex64>,
    pub codomain: Vec<Complex64>,
    /// Smallest distance from `∂U` to `∂V`; negative if `U` leaves `V`.
    pub margin: f64,
    /// Argument-principle count of `f^p(z) = w` in `U`, equal over all targets.
    pub degree: usize,
    /// Preimage counts through the intermediate pieces, one per target.
    pub preimage_counts: Vec<usize>,
    /// Returns of `c` under `f^p` that stay in `U`, out of `ORBIT_RETURNS`.
    pub orbit_returns: usize,
}

fn boundary_margin(small: &PuzzlePiece, big: &PuzzlePiece) -> f64 {
    let ix = SegmentIndex::new(&big.polygon, true);
    let mut margin = f64::INFINITY;
    for &z in &small.polygon {
        let d = ix.distance(z);
        margin = margin.min(if big.contains(z) { d } else { -d });
    }
    margin
}

/// Up to `count` points of `piece` on a grid, kept away from its boundary.
fn interior_targets(piece: &PuzzlePiece, count: usize) -> Vec<Complex64> {
    let Some(bb) = piece.bbox() else { return Vec::new() };
    let clearance = 0.02 * piece.diameter();
    let mut res = 8usize;
    loop {
        let mut pts = Vec::new();
        for i in 0..res {
            for j in 0..res {
                let z = Complex64::new(
                    bb.min.re + (i as f64 + 0.5) / res as f64 * (bb.max.re - bb.min.re),
                    bb.min.im + (j as f64 + 0.5) / res as f64 * (bb.max.im - bb.min.im),
                );
                if piece.contains(z) && piece.boundary_distance(z) > clearance {
                    pts.push(z);
                }
            }
        }
        if pts.len() >= count || res >= 256 {
            let stride = (pts.len() / count.max(1)).max(1);
            return pts.into_iter().step_by(stride).take(count).collect();
        }
        res *= 2;
    }
}

/// Solutions of `f^p(z) = w` in `chain[0]`, pulled back through
/// `chain[p-1], ..., chain[1]`.
fn count_preimages(puzzle: &ModifiedPuzzle, chain: &[&PuzzlePiece], w: Complex64) -> usize {
    let m = &puzzle.map;
    let mut level = vec![w];
    for piece in chain[..chain.len() - 1].iter().rev() {
        let Some(bb) = piece.bbox() else { return 0 };
        level = level
            .iter()
            .flat_map(|&t| m.preimages_between(t, bb.min.im, bb.max.im))
            .filter(|&z| piece.contains(z))
            .collect();
    }
    level.len()
}

fn winding_degree(puzzle: &ModifiedPuzzle, domain: &PuzzlePiece, p: usize, w: Complex64) -> Result<i64> {
    let vals: Vec<Complex64> = domain
        .polygon
        .iter()
        .map(|&z| puzzle.map.iterate(z, p).map(|fz| fz - w))
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Inconsistent("boundary of the small domain escapes".into()))?;
    let turns = winding_around_zero(&vals);
    Ok(turns.round() as i64)
}

/// Looks for a renormalization in the tableau of a critical point: the least
/// `p` whose column repeats column 0, and the least `n0` such that the
/// intermediate pieces `P_{n0+p-l}(f^l c)`, `0 < l < p`, are free of critical
/// points and `P_{n0+p}(c)` is compactly contained in `P_{n0}(c)`.
///
/// `Ok(None)` means the base column is not critical at every depth or never
/// recurs; an `Inconclusive` error means the tableau is too shallow.
pub fn detect_renormalization(puzzle: &ModifiedPuzzle, tab: &Tableau) -> Result<Option<RenormTableauCandidate>> {
    let n_max = tab.depth;
    if tab.d[0] != CriticalDepth::AtLeast(n_max) {
        return Ok(None);
    }
    let col0 = tab.column(0);
    let Some(p) = (1..tab.time()).find(|&l| tab.column(l) == col0) else {
        return Ok(None);
    };
    if n_max < p + 1 {
        return Err(Error::Inconclusive(format!(
            "period {p} needs a tableau of depth at least {}",
            p + 1
        )));
    }
    let c = puzzle.piece(n_max, col0[n_max - 1].piece).critical[0];
    for n0 in 1..=n_max - p {
        let free = (1..p).all(|l| !tab.cell(n0 + p - l, l).critical);
        if !free {
            continue;
        }
        let chain: Vec<&PuzzlePiece> = (0..=p)
            .map(|l| puzzle.piece(n0 + p - l, tab.cell(n0 + p - l, l).piece))
            .collect();
        let (u, v) = (chain[0], chain[p]);
        let margin = boundary_margin(u, v);
        if !(margin > 0.0) {
            continue;
        }
        let targets = interior_targets(v, DEGREE_TARGETS);
        if targets.is_empty() {
            return Err(Error::Resolution(format!("no interior targets in P_{n0}({c})")));
        }
        let mut degree = None;
        for &w in &targets {
            let d = winding_degree(puzzle, u, p, w)?;
            if *degree.get_or_insert(d) != d {
                return Err(Error::Inconsistent(format!(
                    "argument principle gives degrees {} and {d} on P_{}({c})",
                    degree.unwrap(),
                    n0 + p
                )));
            }
        }
        let preimage_counts: Vec<usize> = targets.iter().map(|&w| count_preimages(puzzle, &chain, w)).collect();
        let mut orbit_returns = 0;
        let mut z = c;
        for _ in 0..ORBIT_RETURNS {
            match puzzle.map.iterate(z, p) {
                Ok(w) if u.contains(w) => {
                    orbit_returns += 1;
                    z = w;
                }
                _ => break,
            }
        }
        return Ok(Some(RenormTableauCandidate {
            period: p,
            n0,
            critical_point: c,
            domain: u.polygon.clone(),
            codomain: v.polygon.clone(),
            margin,
            degree: degree.unwrap_or(0).max(0) as usize,
            preimage_counts,
            orbit_returns,
        }));
    }
    Err(Error::Inconclusive(format!(
        "no n0 <= {} with critical-free intermediate pieces and compact containment for period {p}; try depth {}",
        n_max - p,
        n_max + p
    )))
}

/// Finite-depth impression of `z`: the pieces `P_n(z)`, `n <= depth`, and
/// their diameters.
#[derive(Debug, Clone, Serialize)]
pub struct Impression {
    pub point: Complex64,
    pub depth: usize,
    pub piece: usize,
    pub diameters: Vec<f64>,
}

impl Impression {
    pub fn diameter(&self) -> f64 {
        *self.diameters.last().unwrap_or(&f64::INFINITY)
    }
}

pub fn approx_impression(puzzle: &mut ModifiedPuzzle, z: Complex64, depth: usize) -> Result<Impression> {
    let mut diameters = Vec::with_capacity(depth + 1);
    let mut piece = 0;
    for n in 0..=depth {
        piece = puzzle.piece_at(n, z)?;
        diameters.push(puzzle.piece(n, piece).diameter());
    }
    Ok(Impression {
        point: z,
        depth,
        piece,
        diameters,
    })
}
