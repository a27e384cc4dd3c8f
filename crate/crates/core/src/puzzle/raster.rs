//! Planar subdivision by rasterization. Curves are drawn as 8-connected pixel
//! barriers, the free pixels are split into 4-connected components, and the
//! outer boundary of a component is traced along pixel edges and then snapped
//! back onto the curves it runs along, so that piece boundaries are exact
//! except within a pixel or two of junctions.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::graph::Curve;
use crate::geometry::{signed_area, BBox, SegmentIndex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Lower-left corner of pixel `(0, 0)`.
    pub origin: Complex64,
    pub px: f64,
    pub width: usize,
    pub height: usize,
}

impl Grid {
    /// Square pixels of side `px` covering `bbox`.
    pub fn covering(bbox: BBox, px: f64) -> Grid {
        let w = ((bbox.max.re - bbox.min.re) / px).ceil().max(1.0) as usize;
        let h = ((bbox.max.im - bbox.min.im) / px).ceil().max(1.0) as usize;
        Grid {
            origin: bbox.min,
            px,
            width: w,
            height: h,
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        self.origin + Complex64::new((i as f64 + 0.5) * self.px, (j as f64 + 0.5) * self.px)
    }

    pub fn corner(&self, i: usize, j: usize) -> Complex64 {
        self.origin + Complex64::new(i as f64 * self.px, j as f64 * self.px)
    }

    pub fn pixel(&self, z: Complex64) -> Option<(usize, usize)> {
        let fx = ((z.re - self.origin.re) / self.px).floor();
        let fy = ((z.im - self.origin.im) / self.px).floor();
        (fx >= 0.0 && fy >= 0.0 && fx < self.width as f64 && fy < self.height as f64)
            .then_some((fx as usize, fy as usize))
    }

    pub fn bbox(&self) -> BBox {
        BBox {
            min: self.origin,
            max: self.corner(self.width, self.height),
        }
    }
}

const FREE: u32 = u32::MAX;
const NO_LABEL: u32 = u32::MAX;
/// Owner of the (virtual) pixels beyond the grid edge.
pub const WINDOW: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub pixels: usize,
    pub touches_window: bool,
    /// Some pixel of the component.
    pub seed: (usize, usize),
}

/// A vertex of a snapped boundary: its position and the curve (index into
/// the curve list, or [`WINDOW`]) it lies on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryVertex {
    pub z: Complex64,
    pub owner: u32,
}

pub struct Subdivision {
    pub grid: Grid,
    owner: Vec<u32>,
    labels: Vec<u32>,
    pub components: Vec<Component>,
}

impl Subdivision {
    /// Draws `curves` and, if given, marks every pixel whose centre fails
    /// `inside` as a barrier owned by curve `clip.0` (which is not drawn).
    pub fn new(grid: Grid, curves: &[Curve], clip: Option<(u32, &dyn Fn(Complex64) -> bool)>) -> Self {
        let mut owner = vec![FREE; grid.len()];
        if let Some((c, inside)) = clip {
            for j in 0..grid.height {
                for i in 0..grid.width {
                    if !inside(grid.center(i, j)) {
                        owner[j * grid.width + i] = c;
                    }
                }
            }
        }
        let clip_id = clip.map(|(c, _)| c as usize);
        for (ci, c) in curves.iter().enumerate() {
            // The clip curve is represented by the clipped pixels alone;
            // drawing it as well would leave slivers of free pixels.
            if Some(ci) == clip_id {
                continue;
            }
            let n = c.points.len();
            let segs = if c.closed { n } else { n.saturating_sub(1) };
            for s in 0..segs {
                draw_segment(&grid, &mut owner, c.points[s], c.points[(s + 1) % n], ci as u32);
            }
        }
        let mut sub = Subdivision {
            grid,
            owner,
            labels: vec![NO_LABEL; grid.len()],
            components: Vec::new(),
        };
        sub.label();
        sub
    }

    fn label(&mut self) {
        let (w, h) = (self.grid.width, self.grid.height);
        let mut stack = Vec::new();
        for start in 0..w * h {
            if self.owner[start] != FREE || self.labels[start] != NO_LABEL {
                continue;
            }
            let id = self.components.len() as u32;
            let mut comp = Component {
                pixels: 0,
                touches_window: false,
                seed: (start % w, start / w),
            };
            self.labels[start] = id;
            stack.push(start);
            while let Some(p) = stack.pop() {
                comp.pixels += 1;
                let (i, j) = (p % w, p / w);
                if i == 0 || j == 0 || i + 1 == w || j + 1 == h {
                    comp.touches_window = true;
                }
                let mut visit = |q: usize| {
                    if self.owner[q] == FREE && self.labels[q] == NO_LABEL {
                        self.labels[q] = id;
                        stack.push(q);
                    }
                };
                if i > 0 {
                    visit(p - 1);
                }
                if i + 1 < w {
                    visit(p + 1);
                }
                if j > 0 {
                    visit(p - w);
                }
                if j + 1 < h {
                    visit(p + w);
                }
            }
            self.components.push(comp);
        }
    }

    /// Component of the pixel containing `z`; `None` on barriers and outside.
    pub fn component_at(&self, z: Complex64) -> Option<usize> {
        let (i, j) = self.grid.pixel(z)?;
        let l = self.labels[j * self.grid.width + i];
        (l != NO_LABEL).then_some(l as usize)
    }

    /// Whether `z` falls on a barrier pixel.
    pub fn on_barrier(&self, z: Complex64) -> bool {
        self.grid
            .pixel(z)
            .is_some_and(|(i, j)| self.owner[j * self.grid.width + i] != FREE)
    }

    /// Up to `max` pixel centres of component `c`, spread over the component.
    pub fn sample_points(&self, c: usize, max: usize) -> Vec<Complex64> {
        let n = self.components[c].pixels;
        let stride = (n / max.max(1)).max(1);
        let mut out = Vec::new();
        let mut seen = 0;
        for (p, &l) in self.labels.iter().enumerate() {
            if l as usize == c && l != NO_LABEL {
                if seen % stride == 0 {
                    out.push(self.grid.center(p % self.grid.width, p / self.grid.width));
                }
                seen += 1;
            }
        }
        out
    }

    fn label_of(&self, i: i64, j: i64) -> u32 {
        if i < 0 || j < 0 || i >= self.grid.width as i64 || j >= self.grid.height as i64 {
            return NO_LABEL;
        }
        self.labels[j as usize * self.grid.width + i as usize]
    }

    fn owner_of(&self, i: i64, j: i64) -> u32 {
        if i < 0 || j < 0 || i >= self.grid.width as i64 || j >= self.grid.height as i64 {
            return WINDOW;
        }
        self.owner[j as usize * self.grid.width + i as usize]
    }

    /// Outer boundary loop of component `c` along pixel edges, counterclockwise,
    /// as `(edge start corner, owner of the pixel across the edge)`.
    pub fn pixel_boundary(&self, c: usize) -> Vec<((i64, i64), u32)> {
        let id = c as u32;
        // Directed edges keyed by start corner; interior on the left.
        let mut out: HashMap<(i64, i64), Vec<((i64, i64), (i64, i64), u32)>> = HashMap::new();
        let w = self.grid.width;
        for (p, &l) in self.labels.iter().enumerate() {
            if l != id {
                continue;
            }
            let (i, j) = ((p % w) as i64, (p / w) as i64);
            let sides = [
                ((i, j - 1), (i, j), (i + 1, j)),
                ((i + 1, j), (i + 1, j), (i + 1, j + 1)),
                ((i, j + 1), (i + 1, j + 1), (i, j + 1)),
                ((i - 1, j), (i, j + 1), (i, j)),
            ];
            for (nb, a, b) in sides {
                if self.label_of(nb.0, nb.1) != id {
                    let o = self.owner_of(nb.0, nb.1);
                    out.entry(a).or_default().push((a, b, o));
                }
            }
        }
        let mut loops: Vec<Vec<((i64, i64), u32)>> = Vec::new();
        let mut starts: Vec<(i64, i64)> = out.keys().copied().collect();
        starts.sort_unstable();
        for s in starts {
            while let Some(first) = out.get_mut(&s).and_then(|v| v.pop()) {
                let mut lp = vec![(first.0, first.2)];
                let mut prev = first;
                loop {
                    let at = prev.1;
                    let Some(cands) = out.get_mut(&at) else { break };
                    if cands.is_empty() {
                        break;
                    }
                    let din = (prev.1 .0 - prev.0 .0, prev.1 .1 - prev.0 .1);
                    // Prefer the left turn, which keeps diagonal pinches apart.
                    let rank = |e: &((i64, i64), (i64, i64), u32)| {
                        let d = (e.1 .0 - e.0 .0, e.1 .1 - e.0 .1);
                        let cross = din.0 * d.1 - din.1 * d.0;
                        let dot = din.0 * d.0 + din.1 * d.1;
                        if cross > 0 {
                            0
                        } else if dot > 0 {
                            1
                        } else {
                            2
                        }
                    };
                    let k = (0..cands.len()).min_by_key(|&k| rank(&cands[k])).unwrap();
                    let e = cands.swap_remove(k);
                    lp.push((e.0, e.2));
                    prev = e;
                    if e.1 == first.0 {
                        break;
                    }
                }
                loops.push(lp);
            }
        }
        let area = |lp: &Vec<((i64, i64), u32)>| {
            let pts: Vec<Complex64> = lp
                .iter()
                .map(|(c, _)| Complex64::new(c.0 as f64, c.1 as f64))
                .collect();
            signed_area(&pts)
        };
        loops
            .into_iter()
            .max_by(|a, b| area(a).total_cmp(&area(b)))
            .unwrap_or_default()
    }

    /// Outer boundary of component `c`, snapped onto `curves`.
    pub fn snapped_boundary(&self, c: usize, curves: &[Curve], indices: &[SegmentIndex]) -> Vec<BoundaryVertex> {
        let edges = self.pixel_boundary(c);
        snap(&self.grid, &edges, curves, indices)
    }
}

fn draw_segment(grid: &Grid, owner: &mut [u32], a: Complex64, b: Complex64, id: u32) {
    let to_grid = |z: Complex64| ((z.re - grid.origin.re) / grid.px, (z.im - grid.origin.im) / grid.px);
    let (ax, ay) = to_grid(a);
    let (bx, by) = to_grid(b);
    let (w, h) = (grid.width as f64, grid.height as f64);
    if (ax < 0.0 && bx < 0.0) || (ay < 0.0 && by < 0.0) || (ax >= w && bx >= w) || (ay >= h && by >= h) {
        return;
    }
    if !(ax.is_finite() && ay.is_finite() && bx.is_finite() && by.is_finite()) {
        return;
    }
    // Half-pixel steps keep consecutive marks 8-adjacent.
    let n = (2.0 * (bx - ax).abs().max((by - ay).abs())).ceil().max(1.0) as usize;
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let x = (ax + (bx - ax) * s).floor();
        let y = (ay + (by - ay) * s).floor();
        if x >= 0.0 && y >= 0.0 && x < w && y < h {
            owner[y as usize * grid.width + x as usize] = id;
        }
    }
}

/// Arc-length parametrization of a curve.
struct Param<'a> {
    pts: &'a [Complex64],
    closed: bool,
    cum: Vec<f64>,
}

impl<'a> Param<'a> {
    fn new(c: &'a Curve) -> Self {
        let n = c.points.len();
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        let segs = if c.closed { n } else { n.saturating_sub(1) };
        for s in 0..segs {
            let d = (c.points[(s + 1) % n] - c.points[s]).norm();
            cum.push(cum.last().unwrap() + d);
        }
        Param {
            pts: &c.points,
            closed: c.closed,
            cum,
        }
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn position(&self, seg: usize, t: f64) -> f64 {
        let len = self.cum[seg + 1] - self.cum[seg];
        self.cum[seg] + t * len
    }

    /// Reduces an unwrapped position into range for closed curves.
    fn reduce(&self, s: f64) -> f64 {
        if self.closed {
            s.rem_euclid(self.total())
        } else {
            s.clamp(0.0, self.total())
        }
    }

    /// Shortest representative of a position difference on a closed curve.
    fn wrap_delta(&self, d: f64) -> f64 {
        if !self.closed {
            return d;
        }
        let total = self.total();
        let r = d.rem_euclid(total);
        if r > 0.5 * total {
            r - total
        } else {
            r
        }
    }

    fn point(&self, s: f64) -> Complex64 {
        let s = self.reduce(s);
        let seg = self.cum.partition_point(|&c| c <= s).saturating_sub(1).min(self.cum.len() - 2);
        let len = self.cum[seg + 1] - self.cum[seg];
        let t = if len > 0.0 { (s - self.cum[seg]) / len } else { 0.0 };
        let n = self.pts.len();
        self.pts[seg] + (self.pts[(seg + 1) % n] - self.pts[seg]) * t
    }

    /// Points of the curve strictly between unwrapped positions `p` and `q`,
    /// in travel order, followed by the point at `q`.
    fn emit(&self, p: f64, q: f64, out: &mut Vec<Complex64>) {
        let n = self.pts.len();
        let total = self.total();
        let vertex_at = |k: i64| -> (f64, Complex64) {
            // Vertex k of the unwrapped curve.
            let nv = if self.closed { n as i64 } else { self.cum.len() as i64 };
            let wraps = k.div_euclid(nv);
            let r = k.rem_euclid(nv) as usize;
            (self.cum[r] + wraps as f64 * total, self.pts[r % n])
        };
        let locate = |s: f64| -> i64 {
            // Index of the last vertex at or before unwrapped position s.
            if self.closed && total > 0.0 {
                let wraps = (s / total).floor();
                let r = s - wraps * total;
                let k = self.cum.partition_point(|&c| c <= r) as i64 - 1;
                k.min(n as i64 - 1) + wraps as i64 * n as i64
            } else {
                self.cum.partition_point(|&c| c <= s) as i64 - 1
            }
        };
        if q > p {
            let mut k = locate(p) + 1;
            loop {
                let (pos, z) = vertex_at(k);
                if pos >= q || (!self.closed && k as usize >= self.cum.len()) {
                    break;
                }
                out.push(z);
                k += 1;
            }
        } else if q < p {
            let mut k = locate(p);
            if vertex_at(k).0 >= p {
                k -= 1;
            }
            loop {
                if !self.closed && k < 0 {
                    break;
                }
                let (pos, z) = vertex_at(k);
                if pos <= q {
                    break;
                }
                out.push(z);
                k -= 1;
            }
        }
        out.push(self.point(q));
    }
}

/// A stretch of boundary along one curve, as unwrapped arc-length positions.
struct Run {
    owner: u32,
    positions: Vec<f64>,
    /// Raw points, for window runs.
    points: Vec<Complex64>,
    /// Travel direction at the end and at the start of the run.
    dir: f64,
    first_dir: f64,
}

fn snap(grid: &Grid, edges: &[((i64, i64), u32)], curves: &[Curve], indices: &[SegmentIndex]) -> Vec<BoundaryVertex> {
    let n = edges.len();
    if n == 0 {
        return Vec::new();
    }
    let corner = |c: (i64, i64)| grid.origin + Complex64::new(c.0 as f64 * grid.px, c.1 as f64 * grid.px);
    // Start at an owner change so that runs are not split by the seam.
    let start = (0..n).find(|&i| edges[i].1 != edges[(i + n - 1) % n].1).unwrap_or(0);
    let params: Vec<Param> = curves.iter().map(Param::new).collect();
    let hysteresis = 2.0 * grid.px;

    let mut runs: Vec<Run> = Vec::new();
    for k in 0..n {
        let (c0, o) = edges[(start + k) % n];
        let c1 = edges[(start + k + 1) % n].0;
        let mid = 0.5 * (corner(c0) + corner(c1));
        if runs.last().is_none_or(|r| r.owner != o) {
            runs.push(Run {
                owner: o,
                positions: Vec::new(),
                points: Vec::new(),
                dir: 0.0,
                first_dir: 0.0,
            });
        }
        let run = runs.last_mut().unwrap();
        if o == WINDOW || o as usize >= curves.len() {
            run.points.push(corner(c0));
            continue;
        }
        let Some(near) = indices[o as usize].nearest(mid) else {
            run.points.push(mid);
            continue;
        };
        let par = &params[o as usize];
        let mut s = par.position(near.segment, near.t);
        let Some(&cur) = run.positions.last() else {
            run.positions.push(s);
            continue;
        };
        if par.closed {
            let total = par.total();
            let d = (s - cur).rem_euclid(total);
            s = if d > 0.5 * total { cur + d - total } else { cur + d };
        }
        let delta = s - cur;
        if run.dir == 0.0 {
            if delta.abs() > 1e-12 {
                run.dir = delta.signum();
                run.first_dir = run.dir;
                run.positions.push(s);
            }
        } else if delta * run.dir > 0.0 {
            run.positions.push(s);
        } else if delta * run.dir < -hysteresis {
            // Turning around the tip of a curve.
            run.dir = -run.dir;
            run.positions.push(s);
        }
    }
    // A closing run sharing the owner of the first one is the same run.
    if runs.len() > 1 && runs[0].owner == runs[runs.len() - 1].owner {
        let last = runs.pop().unwrap();
        runs[0].positions.splice(0..0, last.positions);
        runs[0].points.splice(0..0, last.points);
        if last.first_dir != 0.0 {
            runs[0].first_dir = last.first_dir;
        }
    }

    // Junctions between consecutive curve runs: insert the crossing point.
    let nr = runs.len();
    if nr > 1 {
        for r in 0..nr {
            let s = (r + 1) % nr;
            let (a, b) = (runs[r].owner, runs[s].owner);
            if a as usize >= curves.len() || b as usize >= curves.len() {
                continue;
            }
            let (Some(&pa), Some(&pb)) = (runs[r].positions.last(), runs[s].positions.first()) else {
                continue;
            };
            let pa_r = params[a as usize].reduce(pa);
            let pb_r = params[b as usize].reduce(pb);
            let Some((ma, mb)) = junction(&params[a as usize], pa_r, &params[b as usize], pb_r, 6.0 * grid.px)
            else {
                continue;
            };
            let ma = pa + params[a as usize].wrap_delta(ma - pa_r);
            let mb = pb + params[b as usize].wrap_delta(mb - pb_r);
            let da = if runs[r].dir != 0.0 { runs[r].dir } else { (ma - pa).signum() };
            while runs[r].positions.len() > 1 && (runs[r].positions.last().unwrap() - ma) * da > 0.0 {
                runs[r].positions.pop();
            }
            if runs[r].positions.len() == 1 && (runs[r].positions[0] - ma) * da > 0.0 {
                runs[r].positions.pop();
            }
            runs[r].positions.push(ma);
            let db = if runs[s].first_dir != 0.0 { runs[s].first_dir } else { 1.0 };
            let drop = runs[s].positions.iter().take_while(|&&x| (x - mb) * db < 0.0).count();
            runs[s].positions.drain(..drop);
            runs[s].positions.insert(0, mb);
        }
    }

    let mut out: Vec<BoundaryVertex> = Vec::new();
    for run in &runs {
        let mut pts = Vec::new();
        if run.owner == WINDOW || run.owner as usize >= curves.len() {
            pts.extend_from_slice(&run.points);
        } else if let Some(&first) = run.positions.first() {
            let par = &params[run.owner as usize];
            pts.push(par.point(first));
            for w in run.positions.windows(2) {
                par.emit(w[0], w[1], &mut pts);
            }
        } else {
            pts.extend_from_slice(&run.points);
        }
        for z in pts {
            if out.last().is_none_or(|v| (v.z - z).norm() > 1e-13) {
                out.push(BoundaryVertex { z, owner: run.owner });
            }
        }
    }
    while out.len() > 1 && (out[0].z - out[out.len() - 1].z).norm() <= 1e-13 {
        out.pop();
    }
    out
}

/// Crossing (or common endpoint) of curves `pa` and `pb` near positions
/// `sa`, `sb`, searched within `reach`; returns positions on both.
fn junction(pa: &Param, sa: f64, pb: &Param, sb: f64, reach: f64) -> Option<(f64, f64)> {
    let near_segments = |p: &Param, s: f64| -> Vec<usize> {
        let nseg = p.cum.len() - 1;
        if nseg == 0 {
            return Vec::new();
        }
        let k0 = p.cum.partition_point(|&c| c <= s).saturating_sub(1).min(nseg - 1);
        let centre = p.point(s);
        let mut out = vec![k0];
        let npts = p.pts.len();
        for dir in [-1i64, 1] {
            let mut k = k0 as i64;
            for _ in 0..nseg {
                k += dir;
                let kk = if p.closed {
                    k.rem_euclid(nseg as i64) as usize
                } else if k < 0 || k >= nseg as i64 {
                    break;
                } else {
                    k as usize
                };
                out.push(kk);
                let d0 = (p.pts[kk] - centre).norm();
                let d1 = (p.pts[(kk + 1) % npts] - centre).norm();
                if d0.min(d1) > reach {
                    break;
                }
            }
        }
        out
    };
    let sa_segs = near_segments(pa, sa);
    let sb_segs = near_segments(pb, sb);
    let na = pa.pts.len();
    let nb = pb.pts.len();
    let mut best: Option<(f64, f64, f64)> = None;
    for &i in &sa_segs {
        let (p, q) = (pa.pts[i], pa.pts[(i + 1) % na]);
        for &j in &sb_segs {
            let (r, s) = (pb.pts[j], pb.pts[(j + 1) % nb]);
            if let Some((t, u)) = segment_intersection(p, q, r, s) {
                let pos_a = pa.position(i, t);
                let pos_b = pb.position(j, u);
                let cost = (pos_a - sa).abs() + (pos_b - sb).abs();
                if best.is_none_or(|b| cost < b.2) {
                    best = Some((pos_a, pos_b, cost));
                }
            }
        }
    }
    best.map(|(a, b, _)| (a, b))
}

/// Parameters of the intersection of segments `[p, q]` and `[r, s]`, touching
/// endpoints included.
fn segment_intersection(p: Complex64, q: Complex64, r: Complex64, s: Complex64) -> Option<(f64, f64)> {
    let tol = 1e-10 * (1.0 + p.norm());
    for (t, a) in [(0.0, p), (1.0, q)] {
        for (u, b) in [(0.0, r), (1.0, s)] {
            if (a - b).norm() <= tol {
                return Some((t, u));
            }
        }
    }
    let d1 = q - p;
    let d2 = s - r;
    let den = d1.re * d2.im - d1.im * d2.re;
    if den.abs() < 1e-300 {
        return None;
    }
    let w = r - p;
    let t = (w.re * d2.im - w.im * d2.re) / den;
    let u = (w.re * d1.im - w.im * d1.re) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((t, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{point_in_polygon, self_crossings};
    use crate::puzzle::CurveTag;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn curve(points: Vec<Complex64>, closed: bool) -> Curve {
        Curve {
            tag: CurveTag::DynamicRay,
            source: String::new(),
            points,
            closed,
        }
    }

    fn circle(r: f64, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64))
            .collect()
    }

    #[test]
    fn cross_splits_disk_into_quadrants() {
        let curves = vec![
            curve(circle(1.0, 400), true),
            curve(vec![c(-2.0, 0.0), c(2.0, 0.0)], false),
            curve(vec![c(0.0, -2.0), c(0.0, 2.0)], false),
        ];
        let grid = Grid::covering(
            BBox {
                min: c(-1.5, -1.5),
                max: c(1.5, 1.5),
            },
            0.01,
        );
        let sub = Subdivision::new(grid, &curves, None);
        let inner: Vec<usize> = (0..sub.components.len())
            .filter(|&k| !sub.components[k].touches_window)
            .collect();
        assert_eq!(inner.len(), 4);
        let indices: Vec<SegmentIndex> = curves.iter().map(|c| SegmentIndex::new(&c.points, c.closed)).collect();
        let k = sub.component_at(c(0.5, 0.5)).unwrap();
        let b = sub.snapped_boundary(k, &curves, &indices);
        let poly: Vec<Complex64> = b.iter().map(|v| v.z).collect();
        assert_eq!(self_crossings(&poly), 0);
        assert!(signed_area(&poly) > 0.0);
        // Exact quarter disk, up to the polygonal circle.
        let area = signed_area(&poly);
        assert!((area - std::f64::consts::FRAC_PI_4).abs() < 1e-3, "{area}");
        // Junctions are exact.
        for corner in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)] {
            assert!(poly.iter().any(|z| (z - corner).norm() < 1e-4), "{corner}");
        }
        assert!(point_in_polygon(&poly, c(0.3, 0.3)));
        assert!(!point_in_polygon(&poly, c(-0.3, 0.3)));
    }

    #[test]
    fn slit_disk_is_one_piece() {
        let curves = vec![
            curve(circle(1.0, 400), true),
            curve(vec![c(0.2, 0.0), c(2.0, 0.0)], false),
        ];
        let grid = Grid::covering(
            BBox {
                min: c(-1.5, -1.5),
                max: c(1.5, 1.5),
            },
            0.01,
        );
        let sub = Subdivision::new(grid, &curves, None);
        let k = sub.component_at(c(-0.5, 0.0)).unwrap();
        assert_eq!(sub.component_at(c(0.5, 0.1)), Some(k));
        assert_eq!(sub.component_at(c(0.5, -0.1)), Some(k));
        let indices: Vec<SegmentIndex> = curves.iter().map(|c| SegmentIndex::new(&c.points, c.closed)).collect();
        let poly: Vec<Complex64> = sub.snapped_boundary(k, &curves, &indices).iter().map(|v| v.z).collect();
        // The slit tip is reached and the area is the full disk.
        assert!(poly.iter().any(|z| (z - c(0.2, 0.0)).norm() < 1e-9));
        assert!((signed_area(&poly) - std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn clip_region_bounds_components() {
        let curves = vec![curve(vec![c(-3.0, 0.0), c(3.0, 0.0)], false), curve(circle(1.0, 400), true)];
        let grid = Grid::covering(
            BBox {
                min: c(-1.5, -1.5),
                max: c(1.5, 1.5),
            },
            0.01,
        );
        let inside = |z: Complex64| z.norm() < 1.0;
        let sub = Subdivision::new(grid, &curves, Some((1, &inside)));
        let free: Vec<&Component> = sub.components.iter().collect();
        assert_eq!(free.len(), 2);
        assert!(free.iter().all(|c| !c.touches_window));
    }
}
