use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::graph::{Curve, CurveTag, PuzzleGraph};
use super::raster::{BoundaryVertex, Grid, Subdivision, WINDOW};
use crate::basins::{classify_orbit, OrbitKind};
use crate::error::{Error, Result};
use crate::geometry::{dist_point_polygon, self_crossings, winding_number, BBox, SegmentIndex, WindingIndex};
use crate::map::{c64, BranchError, CosineMap, TWO_PI};
use crate::symbolic::Address;

/// Orbit length used by the Julia-set proxy.
const FATE_ITER: usize = 200;

/// Lifted boundaries are thinned to this chord tolerance.
const SIMPLIFY_TOL: f64 = 1e-9;

/// A lifted boundary closes after at most this many turns around its parent.
const MAX_ROUNDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arc {
    pub tag: CurveTag,
    pub source: String,
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PuzzlePiece {
    pub depth: usize,
    pub id: usize,
    /// The piece at depth - 1 that `f` maps this one onto.
    #[serde(rename = "parent_id")]
    pub parent: Option<usize>,
    /// Degree of `f` from this piece onto its parent.
    pub degree: usize,
    pub boundary: Vec<Arc>,
    /// Critical points `u + kπi` inside.
    pub critical: Vec<Complex64>,
    /// The point whose location created the piece.
    pub anchor: Complex64,
    #[serde(skip)]
    pub polygon: Vec<Complex64>,
    #[serde(skip)]
    bbox: Option<BBox>,
    #[serde(skip)]
    index: WindingIndex,
}

impl PuzzlePiece {
    fn new(
        m: &CosineMap,
        depth: usize,
        id: usize,
        parent: Option<usize>,
        degree: usize,
        boundary: Vec<Arc>,
        anchor: Complex64,
    ) -> Self {
        let polygon: Vec<Complex64> = boundary.iter().flat_map(|a| a.points.iter().copied()).collect();
        let bbox = BBox::of(&polygon);
        let mut piece = PuzzlePiece {
            depth,
            id,
            parent,
            degree,
            boundary,
            critical: Vec::new(),
            anchor,
            index: WindingIndex::new(&polygon),
            polygon,
            bbox,
        };
        piece.critical = piece.critical_points_inside(m);
        piece
    }

    fn critical_points_inside(&self, m: &CosineMap) -> Vec<Complex64> {
        let Some(bb) = self.bbox else { return Vec::new() };
        let k0 = ((bb.min.im - m.u.im) / PI).floor() as i64;
        let k1 = ((bb.max.im - m.u.im) / PI).ceil() as i64;
        (k0..=k1)
            .map(|k| m.critical_point(k))
            .filter(|&c| self.contains(c))
            .collect()
    }

    pub fn bbox(&self) -> Option<BBox> {
        self.bbox
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.bbox.is_some_and(|b| b.contains(z)) && self.index.winding(z) != 0
    }

    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        dist_point_polygon(z, &self.polygon)
    }

    pub fn is_critical(&self) -> bool {
        !self.critical.is_empty()
    }

    /// Euclidean diameter of the boundary, from at most 512 of its vertices.
    pub fn diameter(&self) -> f64 {
        let n = self.polygon.len();
        let stride = (n / 512).max(1);
        let pts: Vec<Complex64> = self.polygon.iter().step_by(stride).copied().collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }
}

/// Semi-axes `(|v| cosh M, |v| sinh M)` of the ellipse `f({|Re(z - u)| = M})`,
/// whose foci are `±v`.
pub fn ellipse_semi_axes(v: Complex64, m_prime: f64) -> (f64, f64) {
    (v.norm() * m_prime.cosh(), v.norm() * m_prime.sinh())
}

/// Image of the line `Re(z - u) = M` over one period, `n` samples.
pub fn ellipse_curve(m: &CosineMap, m_prime: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| m.v * c64(m_prime, TWO_PI * k as f64 / n as f64).cosh())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Fate {
    Escapes,
    Attracted(i64, i64),
    Unresolved,
}

fn fate(m: &CosineMap, z: Complex64) -> Fate {
    let c = classify_orbit(m, z, FATE_ITER);
    match c.kind {
        OrbitKind::Escaping => Fate::Escapes,
        OrbitKind::BoundedUnresolved => Fate::Unresolved,
        OrbitKind::Attracted => {
            let cyc = c.cycle.unwrap_or_default();
            let key = cyc
                .iter()
                .min_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
                .map_or((0, 0), |z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64));
            Fate::Attracted(key.0, key.1)
        }
    }
}

/// Julia-set proxy for a sampled region: it meets `J` if two sampled orbits
/// have different fates or one is unresolved.
fn meets_julia(m: &CosineMap, samples: &[Complex64]) -> bool {
    let mut seen = HashSet::new();
    for &z in samples {
        let f = fate(m, z);
        if f == Fate::Unresolved {
            return true;
        }
        seen.insert(f);
        if seen.len() > 1 {
            return true;
        }
    }
    false
}

fn arcs_from_vertices(verts: &[BoundaryVertex], curves: &[Curve]) -> Vec<Arc> {
    let mut arcs: Vec<(u32, Vec<Complex64>)> = Vec::new();
    for v in verts {
        match arcs.last_mut() {
            Some((o, pts)) if *o == v.owner => pts.push(v.z),
            _ => arcs.push((v.owner, vec![v.z])),
        }
    }
    arcs.into_iter()
        .map(|(o, points)| {
            let (tag, source) = if o == WINDOW || o as usize >= curves.len() {
                (CurveTag::WindowEdge, "window".to_string())
            } else {
                (curves[o as usize].tag, curves[o as usize].source.clone())
            };
            Arc {
                tag,
                source,
                points: simplify(&points, SIMPLIFY_TOL),
            }
        })
        .collect()
}

fn selected_pieces(
    m: &CosineMap,
    sub: &Subdivision,
    curves: &[Curve],
    keep: &[Complex64],
) -> Result<Vec<PuzzlePiece>> {
    let indices: Vec<SegmentIndex> = curves.iter().map(|c| SegmentIndex::new(&c.points, c.closed)).collect();
    let forced: HashSet<usize> = keep.iter().filter_map(|&z| sub.component_at(z)).collect();
    let mut out = Vec::new();
    for c in 0..sub.components.len() {
        if !forced.contains(&c) {
            let samples = sub.sample_points(c, 300);
            if !meets_julia(m, &samples) {
                continue;
            }
        }
        let verts = sub.snapped_boundary(c, curves, &indices);
        if verts.len() < 3 {
            continue;
        }
        let poly: Vec<Complex64> = verts.iter().map(|v| v.z).collect();
        let crossings = self_crossings(&poly);
        if crossings > 0 {
            return Err(Error::Resolution(format!(
                "boundary of the piece at {} crosses itself {crossings} times at pixel size {}",
                sub.grid.center(sub.components[c].seed.0, sub.components[c].seed.1),
                sub.grid.px
            )));
        }
        let arcs = arcs_from_vertices(&verts, curves);
        let anchor = sub.grid.center(sub.components[c].seed.0, sub.components[c].seed.1);
        let id = out.len();
        out.push(PuzzlePiece::new(m, 0, id, None, 1, arcs, anchor));
    }
    Ok(out)
}

/// Depth-0 pieces: components of the window minus the graph that meet the
/// Julia set (by the orbit-fate proxy). Pieces cut by the window edge carry
/// `window-edge` arcs.
pub fn pieces_at_depth0(graph: &PuzzleGraph, window: BBox, px: f64) -> Result<Vec<PuzzlePiece>> {
    if !(px > 0.0) {
        return Err(Error::InvalidParameter(format!("pixel size {px}")));
    }
    let grid = Grid::covering(window, px);
    let sub = Subdivision::new(grid, &graph.curves, None);
    selected_pieces(&graph.chart.map, &sub, &graph.curves, &[])
}

fn branch_error(e: BranchError, at: Complex64) -> Error {
    match e {
        BranchError::NearCritical => Error::NearCritical(at),
        BranchError::OnSlit => Error::SlitBoundary(at),
    }
}

/// Lifts the closed boundary `arcs` through `f`, starting near `hint`, going
/// around as many times as needed to close. Returns the lifted arcs and the
/// number of turns (the degree of `f` on the enclosed component).
fn lift_loop(m: &CosineMap, arcs: &[Arc], hint: Complex64) -> Result<(Vec<Arc>, usize)> {
    let last = arcs
        .iter()
        .rev()
        .find_map(|a| a.points.last().copied())
        .ok_or_else(|| Error::InvalidParameter("empty boundary".into()))?;
    let (y_start, _) = m.nearest_preimage(last, hint).map_err(|e| branch_error(e, last))?;
    let mut cur = y_start;
    let mut prev = last;
    let mut out = Vec::new();
    let scale = 1.0 + y_start.norm();
    for round in 1..=MAX_ROUNDS {
        for a in arcs {
            let mut path = Vec::with_capacity(a.points.len() + 1);
            path.push(prev);
            path.extend_from_slice(&a.points);
            let lifted = m.lift_path(&path, cur, true).map_err(|e| branch_error(e, prev))?;
            cur = *lifted.last().unwrap();
            prev = *a.points.last().unwrap_or(&prev);
            out.push(Arc {
                tag: a.tag,
                source: a.source.clone(),
                points: lifted[1..].to_vec(),
            });
        }
        let gap = (cur - y_start).norm();
        if gap < 1e-8 * scale {
            return Ok((out, round));
        }
    }
    Err(Error::Refinement {
        gap: (cur - y_start).norm(),
        at: cur,
    })
}

/// Deck transformations of `f`: `z ↦ u + σ(z - u) + 2πik`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Deck {
    sigma: f64,
    k: i64,
}

impl Deck {
    fn apply(&self, m: &CosineMap, z: Complex64) -> Complex64 {
        m.u + self.sigma * (z - m.u) + c64(0.0, TWO_PI * self.k as f64)
    }

    fn invert(&self, m: &CosineMap, z: Complex64) -> Complex64 {
        m.u + self.sigma * (z - m.u - c64(0.0, TWO_PI * self.k as f64))
    }
}

/// The deck transformation whose image of the closed curve `lifted` winds
/// around `z`.
fn deck_containing(m: &CosineMap, lifted: &[Complex64], bb: BBox, z: Complex64) -> Option<Deck> {
    for sigma in [1.0, -1.0] {
        let base = (m.u + sigma * (z - m.u)).im;
        // Need base - σ 2πk inside the box.
        let lo = (base - bb.max.im) / TWO_PI;
        let hi = (base - bb.min.im) / TWO_PI;
        let (lo, hi) = if sigma > 0.0 { (lo, hi) } else { (-hi, -lo) };
        for k in lo.floor() as i64..=hi.ceil() as i64 {
            let d = Deck { sigma, k };
            let x = d.invert(m, z);
            if bb.contains(x) && winding_number(lifted, x) != 0 {
                return Some(d);
            }
        }
    }
    None
}

/// Decks whose image of the box meets `window`.
fn decks_meeting(m: &CosineMap, bb: BBox, window: BBox) -> Vec<Deck> {
    let mut out = Vec::new();
    for sigma in [1.0, -1.0] {
        let corners = [bb.min, bb.max];
        let img: Vec<Complex64> = corners
            .iter()
            .map(|&c| Deck { sigma, k: 0 }.apply(m, c))
            .collect();
        let (ymin, ymax) = (img[0].im.min(img[1].im), img[0].im.max(img[1].im));
        let (xmin, xmax) = (img[0].re.min(img[1].re), img[0].re.max(img[1].re));
        if xmax < window.min.re || xmin > window.max.re {
            continue;
        }
        let k0 = ((window.min.im - ymax) / TWO_PI).floor() as i64;
        let k1 = ((window.max.im - ymin) / TWO_PI).ceil() as i64;
        for k in k0..=k1 {
            let shift = TWO_PI * k as f64;
            if ymax + shift >= window.min.im && ymin + shift <= window.max.im {
                out.push(Deck { sigma, k });
            }
        }
    }
    out
}

/// Greedy chord simplification keeping every point within `tol` of the
/// result; endpoints are kept.
fn simplify(pts: &[Complex64], tol: f64) -> Vec<Complex64> {
    use crate::geometry::dist_point_segment;
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let mut out = vec![pts[0]];
    let mut anchor = 0;
    while anchor + 1 < pts.len() {
        let mut end = anchor + 1;
        while end + 1 < pts.len() && end + 1 - anchor <= 32 {
            let cand = end + 1;
            let ok = (anchor + 1..cand).all(|i| dist_point_segment(pts[i], pts[anchor], pts[cand]) <= tol);
            if !ok {
                break;
            }
            end = cand;
        }
        out.push(pts[end]);
        anchor = end;
    }
    out
}

fn preimage_source(m: &CosineMap, tag: CurveTag, source: &str, pts: &[Complex64]) -> String {
    if tag == CurveTag::DynamicRay {
        if let Ok(addr) = source.parse::<Address>() {
            let mid = pts[pts.len() / 2];
            if let Ok(e) = m.strip_index(mid) {
                return addr.prepend(e).to_string();
            }
        }
    }
    match source.strip_prefix("f^-").and_then(|r| r.split_once(' ')) {
        Some((k, rest)) if k.parse::<usize>().is_ok() => {
            format!("f^-{} {rest}", k.parse::<usize>().unwrap() + 1)
        }
        _ => format!("f^-1 {source}"),
    }
}

fn transform_arcs(m: &CosineMap, arcs: &[Arc], d: Deck) -> Vec<Arc> {
    arcs.iter()
        .filter(|a| !a.points.is_empty())
        .map(|a| {
            let pts: Vec<Complex64> = a.points.iter().map(|&z| d.apply(m, z)).collect();
            let pts = simplify(&pts, SIMPLIFY_TOL);
            Arc {
                tag: a.tag,
                source: preimage_source(m, a.tag, &a.source, &pts),
                points: pts,
            }
        })
        .collect()
}

/// All components of `f^{-1}(piece)` meeting `window`, as pieces of the next
/// depth (numbered from 0, parent set to `piece.id`).
pub fn refine(m: &CosineMap, piece: &PuzzlePiece, window: BBox) -> Result<Vec<PuzzlePiece>> {
    let hint = c64(0.5 * (window.min.re + window.max.re), 0.5 * (window.min.im + window.max.im));
    let (lifted, degree) = lift_loop(m, &piece.boundary, hint)?;
    let poly: Vec<Complex64> = lifted.iter().flat_map(|a| a.points.iter().copied()).collect();
    let bb = BBox::of(&poly).ok_or_else(|| Error::Inconsistent("empty lift".into()))?;
    let mut out: Vec<PuzzlePiece> = Vec::new();
    for d in decks_meeting(m, bb, window) {
        let arcs = transform_arcs(m, &lifted, d);
        let anchor = d.apply(m, poly[0]);
        let child = PuzzlePiece::new(m, piece.depth + 1, out.len(), Some(piece.id), degree, arcs, anchor);
        // A critical component is invariant under one reflection; keep one copy.
        let dup = out.iter().any(|o| {
            o.bbox.zip(child.bbox).is_some_and(|(a, b)| (a.min - b.min).norm() < 1e-9 && (a.max - b.max).norm() < 1e-9)
        });
        let meets = child.polygon.iter().any(|&z| window.contains(z));
        if !dup && meets {
            out.push(child);
        }
    }
    Ok(out)
}

/// Puzzle pieces cut down to the ellipse `E = f(R)` and refined on demand.
///
/// Depth 0 consists of the components of `E` minus the graph that meet the
/// Julia set; the piece of depth `n + 1` at `z` is the component of
/// `f^{-1}(P_n(f(z)))` containing `z`, which lies in the band
/// `|Re(z - u)| <= M` and hence, for points of `R`, inside `E`.
pub struct ModifiedPuzzle {
    pub map: CosineMap,
    pub graph: PuzzleGraph,
    pub m_prime: f64,
    pub semi_axes: (f64, f64),
    /// Range of `Im(z - u)` of the truncated strip `R`.
    pub strip: (f64, f64),
    /// Smallest sampled distance from `∂R` to `∂E`, measured inward.
    pub containment_margin: f64,
    pub grid: Grid,
    pub curves: Vec<Curve>,
    levels: Vec<Vec<PuzzlePiece>>,
}

pub(crate) fn ellipse_slack(m: &CosineMap, a: f64, z: Complex64) -> f64 {
    0.5 * (2.0 * a - (z - m.v).norm() - (z + m.v).norm())
}

pub(crate) fn rectangle_margin(m: &CosineMap, m_prime: f64, strip: (f64, f64)) -> f64 {
    let (a, _) = ellipse_semi_axes(m.v, m_prime);
    let corners = [
        m.u + c64(-m_prime, strip.0),
        m.u + c64(m_prime, strip.0),
        m.u + c64(m_prime, strip.1),
        m.u + c64(-m_prime, strip.1),
    ];
    let mut margin = f64::INFINITY;
    for i in 0..4 {
        let (p, q) = (corners[i], corners[(i + 1) % 4]);
        for k in 0..100 {
            let z = p + (q - p) * (k as f64 / 100.0);
            margin = margin.min(ellipse_slack(m, a, z));
        }
    }
    margin
}

/// Builds the modified puzzle. `tracked` are the points whose pieces will be
/// needed (critical orbits, basin cycle). The strip `R` is the band
/// `|Re(z - u)| <= M` cut to the imaginary range of the depth-1 pieces of the
/// tracked points; it must sit compactly inside `E`.
pub fn bounded_modification(graph: &PuzzleGraph, m_prime: f64, px: f64, tracked: &[Complex64]) -> Result<ModifiedPuzzle> {
    let m = graph.chart.map;
    if !(m_prime > 0.0) || !(px > 0.0) {
        return Err(Error::InvalidParameter(format!("M = {m_prime}, pixel size {px}")));
    }
    let (a, b) = ellipse_semi_axes(m.v, m_prime);
    for c in graph.curves.iter().filter(|c| c.tag == CurveTag::DynamicRay) {
        if let Some(&far) = c.points.first() {
            if ellipse_slack(&m, a, far) > -2.0 * px {
                return Err(Error::Precondition(format!(
                    "ray {} stops inside the ellipse; trace the graph with extent > {:.3}",
                    c.source, a
                )));
            }
        }
    }
    let n_ellipse = ((TWO_PI * a / (0.5 * px)).ceil() as usize).max(256);
    let mut curves = graph.curves.clone();
    curves.push(Curve {
        tag: CurveTag::EllipseArc,
        source: format!("E(M={m_prime})"),
        points: ellipse_curve(&m, m_prime, n_ellipse),
        closed: true,
    });
    let ellipse_id = (curves.len() - 1) as u32;
    let bb = BBox::of(&curves[ellipse_id as usize].points)
        .expect("ellipse has points")
        .inflate(3.0 * px);
    let grid = Grid::covering(bb, px);
    let inside = |z: Complex64| ellipse_slack(&m, a, z) > 0.0;
    let sub = Subdivision::new(grid, &curves, Some((ellipse_id, &inside)));
    let inside_tracked: Vec<Complex64> = tracked.iter().copied().filter(|&z| inside(z)).collect();
    let depth0 = selected_pieces(&m, &sub, &curves, &inside_tracked)?;
    let mut puzzle = ModifiedPuzzle {
        map: m,
        graph: graph.clone(),
        m_prime,
        semi_axes: (a, b),
        strip: (0.0, 0.0),
        containment_margin: 0.0,
        grid,
        curves,
        levels: vec![depth0],
    };
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &z in &inside_tracked {
        let id = puzzle.piece_at(1, z)?;
        if let Some(bb) = puzzle.levels[1][id].bbox {
            y0 = y0.min(bb.min.im - m.u.im);
            y1 = y1.max(bb.max.im - m.u.im);
        }
    }
    if !y0.is_finite() {
        return Err(Error::Precondition("no tracked point lies in the ellipse".into()));
    }
    puzzle.strip = (y0, y1);
    puzzle.containment_margin = rectangle_margin(&m, m_prime, puzzle.strip);
    if !(puzzle.containment_margin > 0.0) {
        let mut suggested = m_prime;
        while rectangle_margin(&m, suggested, puzzle.strip) <= 0.0 && suggested < m_prime + 20.0 {
            suggested += 0.5;
        }
        return Err(Error::MTooSmall { m: m_prime, suggested });
    }
    Ok(puzzle)
}

impl ModifiedPuzzle {
    pub fn pieces(&self, depth: usize) -> &[PuzzlePiece] {
        self.levels.get(depth).map_or(&[], |v| v.as_slice())
    }

    pub fn piece(&self, depth: usize, id: usize) -> &PuzzlePiece {
        &self.levels[depth][id]
    }

    /// Already computed piece of the given depth containing `z`.
    pub fn locate(&self, depth: usize, z: Complex64) -> Option<usize> {
        self.pieces(depth).iter().position(|p| p.contains(z))
    }

    /// Sampling resolution of the depth-0 subdivision.
    pub fn resolution(&self) -> f64 {
        self.grid.px
    }

    pub fn in_ellipse(&self, z: Complex64) -> bool {
        ellipse_slack(&self.map, self.semi_axes.0, z) > 0.0
    }

    /// The piece of depth `n` containing `z`, computed by lifting if needed.
    pub fn piece_at(&mut self, n: usize, z: Complex64) -> Result<usize> {
        if let Some(id) = self.locate(n, z) {
            let p = &self.levels[n][id];
            if p.boundary_distance(z) < 1e-9 {
                return Err(Error::GraphCollision(z));
            }
            return Ok(id);
        }
        if n == 0 {
            return Err(if self.in_ellipse(z) {
                Error::GraphCollision(z)
            } else {
                Error::Precondition(format!("{z} lies outside the ellipse E"))
            });
        }
        let m = self.map;
        let w = m
            .eval(z)
            .map_err(|_| Error::Precondition(format!("{z} escapes")))?;
        let parent = self.piece_at(n - 1, w)?;
        let parent_piece = &self.levels[n - 1][parent];
        let (lifted, degree) = lift_loop(&m, &parent_piece.boundary, z)?;
        let poly: Vec<Complex64> = lifted.iter().flat_map(|a| a.points.iter().copied()).collect();
        let bb = BBox::of(&poly).ok_or_else(|| Error::Inconsistent("empty lift".into()))?;
        let deck = deck_containing(&m, &poly, bb, z).ok_or(Error::GraphCollision(z))?;
        let arcs = transform_arcs(&m, &lifted, deck);
        if self.levels.len() <= n {
            self.levels.resize_with(n + 1, Vec::new);
        }
        let id = self.levels[n].len();
        let piece = PuzzlePiece::new(&m, n, id, Some(parent), degree, arcs, z);
        if !piece.contains(z) || piece.boundary_distance(z) < 1e-9 {
            return Err(Error::GraphCollision(z));
        }
        self.levels[n].push(piece);
        Ok(id)
    }

    /// How far the boundary of `P_{n+1}(z)` leaves `P_n(z)`: the largest
    /// distance to `∂P_n(z)` over child vertices outside the parent region,
    /// and the number of such vertices beyond `tol`.
    pub fn nesting_excursion(&mut self, n: usize, z: Complex64, tol: f64) -> Result<(f64, usize)> {
        let outer = self.piece_at(n, z)?;
        let inner = self.piece_at(n + 1, z)?;
        let p = &self.levels[n][outer];
        let c = &self.levels[n + 1][inner];
        let index = SegmentIndex::new(&p.polygon, true);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for &v in &c.polygon {
            if p.contains(v) {
                continue;
            }
            let d = index.distance(v);
            worst = worst.max(d);
            if d > tol {
                count += 1;
            }
        }
        Ok((worst, count))
    }

    /// Largest distance from `f(∂P)` to the boundary of the parent of `P`.
    pub fn markov_defect(&self, n: usize, id: usize) -> Option<f64> {
        let piece = self.levels.get(n)?.get(id)?;
        let parent = &self.levels[n - 1][piece.parent?];
        let index = SegmentIndex::new(&parent.polygon, true);
        let mut worst: f64 = 0.0;
        for &v in &piece.polygon {
            let w = self.map.eval(v).ok()?;
            worst = worst.max(index.distance(w));
        }
        Some(worst)
    }

    /// Number of stored depth-`n - 1` pieces containing `f(anchor)` of piece
    /// `(n, id)`; the Markov property asks for exactly one.
    pub fn parent_count(&self, n: usize, id: usize) -> usize {
        let piece = &self.levels[n][id];
        let Ok(w) = self.map.eval(piece.anchor) else { return 0 };
        self.pieces(n - 1).iter().filter(|p| p.contains(w)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basins::BasinChart;
    use crate::puzzle::build_graph;

    #[test]
    fn ellipse_axes_from_line_image() {
        let m = CosineMap::from_normal_form(c64(0.3, 0.2), c64(2.0, 0.0)).unwrap();
        for mp in [1.0, 2.0, 3.0] {
            let (a, b) = ellipse_semi_axes(m.v, mp);
            for y in [0.0, 0.7, 2.0, 4.0] {
                let w = m.eval(m.u + c64(mp, y)).unwrap();
                let s = (w - m.v).norm() + (w + m.v).norm();
                assert!((s - 2.0 * a).abs() < 1e-9);
            }
            assert!((a * a - b * b - m.v.norm_sqr()).abs() < 1e-9);
        }
        let (a, _) = ellipse_semi_axes(m.v, 1.0);
        assert!((2.0 * a - 6.1723).abs() < 1e-4);
    }

    #[test]
    fn simplify_keeps_shape() {
        let pts: Vec<Complex64> = (0..=100).map(|k| c64(k as f64 / 100.0, 0.0)).collect();
        assert_eq!(simplify(&pts, 1e-9).len(), 5);
        let arc: Vec<Complex64> = (0..=100).map(|k| Complex64::from_polar(1.0, k as f64 / 100.0)).collect();
        let s = simplify(&arc, 1e-9);
        assert!(s.len() > 50);
        assert_eq!(s[0], arc[0]);
        assert_eq!(*s.last().unwrap(), arc[100]);
    }

    #[test]
    fn deck_round_trip() {
        let m = CosineMap::from_normal_form(c64(-1.0, -0.45), c64(-1.0, -0.45)).unwrap();
        let z = c64(0.3, 1.7);
        for sigma in [1.0, -1.0] {
            for k in -2..=2 {
                let d = Deck { sigma, k };
                let w = d.apply(&m, z);
                assert!((d.invert(&m, w) - z).norm() < 1e-12);
                assert!((m.eval(w).unwrap() - m.eval(z).unwrap()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn cosh_map_containment() {
        let m = CosineMap::cosh_map();
        let strip = (-PI, PI);
        assert!(rectangle_margin(&m, 3.0, strip) > 0.0);
        assert!(rectangle_margin(&m, 0.5, strip) < 0.0);
    }

    #[test]
    fn bounded_orbit_pieces_nest() {
        // v is attracted to a superattracting fixed point at u; -v falls
        // into an attracting 2-cycle.
        let u = c64(-1.0, -0.45);
        let m = CosineMap::from_normal_form(u, u).unwrap();
        let chart = BasinChart::new(&m, u, 1).unwrap();
        let s: Address = "[];[(1,-1)]".parse().unwrap();
        let (a, _) = ellipse_semi_axes(m.v, 3.0);
        let g = build_graph(&m, &chart, 0.0, &s, 0.5, a + 3.0).unwrap();
        let z = -m.v;
        let mut p = bounded_modification(&g, 3.0, 0.04, &[z, m.eval(z).unwrap()]).unwrap();
        assert!(p.containment_margin > 0.0);
        assert_eq!(p.pieces(0).len(), 1);
        for n in 0..2 {
            let (worst, count) = p.nesting_excursion(n, z, p.resolution()).unwrap();
            assert_eq!(count, 0, "depth {n}: excursion {worst}");
        }
        for n in 1..=2 {
            let id = p.piece_at(n, z).unwrap();
            assert!(p.markov_defect(n, id).unwrap() < 1e-5);
            assert_eq!(p.parent_count(n, id), 1);
        }
        let id = p.piece_at(1, z).unwrap();
        assert!(p.piece(1, id).is_critical());
        assert_eq!(p.piece(1, id).degree, 2);
    }
}
