//! Polylines and polygons in the plane: winding numbers, distances,
//! resampling and a coarse spatial hash for nearest-segment queries.

use num_complex::Complex64;

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Complex64,
    pub max: Complex64,
}

impl BBox {
    pub fn of(points: &[Complex64]) -> Option<BBox> {
        let first = *points.first()?;
        let mut b = BBox {
            min: first,
            max: first,
        };
        for p in &points[1..] {
            b.min.re = b.min.re.min(p.re);
            b.min.im = b.min.im.min(p.im);
            b.max.re = b.max.re.max(p.re);
            b.max.im = b.max.im.max(p.im);
        }
        Some(b)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.min.re && z.re <= self.max.re && z.im >= self.min.im && z.im <= self.max.im
    }

    pub fn inflate(&self, r: f64) -> BBox {
        BBox {
            min: self.min - Complex64::new(r, r),
            max: self.max + Complex64::new(r, r),
        }
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }
}

/// Distance from `z` to the segment `[a, b]`.
pub fn dist_point_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Distance from `z` to an open polyline.
pub fn dist_point_polyline(z: Complex64, pts: &[Complex64]) -> f64 {
    match pts.len() {
        0 => f64::INFINITY,
        1 => (z - pts[0]).norm(),
        _ => pts
            .windows(2)
            .map(|w| dist_point_segment(z, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Distance from `z` to the boundary of a closed polygon.
pub fn dist_point_polygon(z: Complex64, poly: &[Complex64]) -> f64 {
    let n = poly.len();
    if n == 0 {
        return f64::INFINITY;
    }
    (0..n)
        .map(|i| dist_point_segment(z, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

#[inline]
fn is_left(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    (b.re - a.re) * (z.im - a.im) - (z.re - a.re) * (b.im - a.im)
}

/// Winding number of the closed polygon around `z` (crossing rule).
pub fn winding_number(poly: &[Complex64], z: Complex64) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if a.im <= z.im {
            if b.im > z.im && is_left(a, b, z) > 0.0 {
                wn += 1;
            }
        } else if b.im <= z.im && is_left(a, b, z) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Winding numbers of many points about one closed polygon: edges are
/// bucketed by the horizontal bands they span.
#[derive(Debug, Clone)]
pub struct WindingIndex {
    poly: Vec<Complex64>,
    y0: f64,
    dy: f64,
    bands: Vec<Vec<u32>>,
}

impl WindingIndex {
    pub fn new(poly: &[Complex64]) -> Self {
        let n = poly.len();
        let (y0, y1) = poly
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.im), hi.max(z.im)));
        let nb = ((n as f64).sqrt() as usize).clamp(1, 4096);
        let dy = if n == 0 || y1 <= y0 { 1.0 } else { (y1 - y0) / nb as f64 };
        let mut bands = vec![Vec::new(); nb];
        for i in 0..n {
            let (a, b) = (poly[i].im, poly[(i + 1) % n].im);
            let lo = (((a.min(b) - y0) / dy).floor().max(0.0) as usize).min(nb - 1);
            let hi = (((a.max(b) - y0) / dy).floor().max(0.0) as usize).min(nb - 1);
            for band in &mut bands[lo..=hi] {
                band.push(i as u32);
            }
        }
        WindingIndex {
            poly: poly.to_vec(),
            y0,
            dy,
            bands,
        }
    }

    pub fn winding(&self, z: Complex64) -> i32 {
        let n = self.poly.len();
        if n == 0 || !(z.im >= self.y0) {
            return 0;
        }
        let b = ((z.im - self.y0) / self.dy).floor() as usize;
        let Some(band) = self.bands.get(b) else { return 0 };
        let mut wn = 0;
        for &i in band {
            let a = self.poly[i as usize];
            let b = self.poly[(i as usize + 1) % n];
            if a.im <= z.im {
                if b.im > z.im && is_left(a, b, z) > 0.0 {
                    wn += 1;
                }
            } else if b.im <= z.im && is_left(a, b, z) < 0.0 {
                wn -= 1;
            }
        }
        wn
    }
}

pub fn point_in_polygon(poly: &[Complex64], z: Complex64) -> bool {
    winding_number(poly, z) != 0
}

/// Winding number of a closed curve of (nonzero) complex values around 0,
/// by summing argument increments.
pub fn winding_around_zero(values: &[Complex64]) -> f64 {
    let n = values.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = values[i];
        let b = values[(i + 1) % n];
        total += (b / a).arg();
    }
    total / (2.0 * std::f64::consts::PI)
}

/// Signed area; positive for counter-clockwise polygons.
pub fn signed_area(poly: &[Complex64]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a.re * b.im - b.re * a.im;
    }
    0.5 * s
}

pub fn polyline_length(pts: &[Complex64]) -> f64 {
    pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Inserts points so that no segment is longer than `max_seg`.
pub fn resample(pts: &[Complex64], max_seg: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(pts.len());
    if let Some(&first) = pts.first() {
        out.push(first);
    }
    for w in pts.windows(2) {
        let d = (w[1] - w[0]).norm();
        let n = (d / max_seg).ceil().max(1.0) as usize;
        for i in 1..=n {
            out.push(w[0] + (w[1] - w[0]) * (i as f64 / n as f64));
        }
    }
    out
}

/// Closed-polygon version of [`resample`]; the closing edge is included and
/// the first point is not repeated.
pub fn resample_closed(poly: &[Complex64], max_seg: f64) -> Vec<Complex64> {
    if poly.len() < 2 {
        return poly.to_vec();
    }
    let mut closed = poly.to_vec();
    closed.push(poly[0]);
    let mut out = resample(&closed, max_seg);
    out.pop();
    out
}

/// Largest distance from a point of `a` to the polyline `b`.
pub fn directed_hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let index = SegmentIndex::new(b, false);
    a.iter().map(|&z| index.distance(z)).fold(0.0, f64::max)
}

pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Smallest distance between two polylines (or polygons when `closed`).
pub fn min_distance(a: &[Complex64], b: &[Complex64], closed: bool) -> f64 {
    let index = SegmentIndex::new(b, closed);
    let mut best = f64::INFINITY;
    let n = a.len();
    let segs = if closed { n } else { n.saturating_sub(1) };
    for z in a {
        best = best.min(index.distance(*z));
    }
    // Vertex-to-segment distances miss crossings; check those explicitly.
    for i in 0..segs {
        let p = a[i];
        let q = a[(i + 1) % n];
        if index.segment_crosses(p, q) {
            return 0.0;
        }
    }
    best
}

/// Proper crossing of `[p, q]` and `[r, s]`. Orientations within rounding of
/// zero count as collinear, so overlapping pieces of one line never cross.
fn segments_cross(p: Complex64, q: Complex64, r: Complex64, s: Complex64) -> bool {
    let scale = 1.0 + p.norm().max(q.norm()).max(r.norm()).max(s.norm());
    let eps1 = 1e-12 * (s - r).norm() * scale;
    let eps2 = 1e-12 * (q - p).norm() * scale;
    let d1 = is_left(r, s, p);
    let d2 = is_left(r, s, q);
    let d3 = is_left(p, q, r);
    let d4 = is_left(p, q, s);
    ((d1 > eps1 && d2 < -eps1) || (d1 < -eps1 && d2 > eps1))
        && ((d3 > eps2 && d4 < -eps2) || (d3 < -eps2 && d4 > eps2))
}

/// Number of proper crossings between non-adjacent edges of a closed polygon.
pub fn self_crossings(poly: &[Complex64]) -> usize {
    let n = poly.len();
    if n < 4 {
        return 0;
    }
    let index = SegmentIndex::new(poly, true);
    let mut count = 0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        for j in index.candidates(p, q) {
            if j <= i || j == (i + 1) % n || (j + 1) % n == i {
                continue;
            }
            let (r, s) = index.segment(j);
            if segments_cross(p, q, r, s) {
                count += 1;
            }
        }
    }
    count
}

/// Uniform-grid bucket index over the segments of a polyline.
pub struct SegmentIndex {
    pts: Vec<Complex64>,
    closed: bool,
    origin: Complex64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl SegmentIndex {
    pub fn new(pts: &[Complex64], closed: bool) -> Self {
        let nseg = if pts.len() < 2 {
            0
        } else if closed {
            pts.len()
        } else {
            pts.len() - 1
        };
        let bbox = BBox::of(pts).unwrap_or(BBox {
            min: Complex64::default(),
            max: Complex64::default(),
        });
        let span = (bbox.max - bbox.min).re.max((bbox.max - bbox.min).im).max(1e-12);
        let side = ((nseg as f64).sqrt().ceil() as usize).clamp(1, 512);
        let cell = span / side as f64 * (1.0 + 1e-9);
        let nx = (((bbox.max.re - bbox.min.re) / cell).floor() as usize + 1).max(1);
        let ny = (((bbox.max.im - bbox.min.im) / cell).floor() as usize + 1).max(1);
        let mut idx = SegmentIndex {
            pts: pts.to_vec(),
            closed,
            origin: bbox.min,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for s in 0..nseg {
            let (a, b) = idx.segment(s);
            let (x0, y0) = idx.cell_of(Complex64::new(a.re.min(b.re), a.im.min(b.im)));
            let (x1, y1) = idx.cell_of(Complex64::new(a.re.max(b.re), a.im.max(b.im)));
            for y in y0..=y1 {
                for x in x0..=x1 {
                    idx.buckets[y * nx + x].push(s);
                }
            }
        }
        idx
    }

    fn segment(&self, s: usize) -> (Complex64, Complex64) {
        let n = self.pts.len();
        (self.pts[s], self.pts[(s + 1) % n])
    }

    fn nseg(&self) -> usize {
        if self.pts.len() < 2 {
            0
        } else if self.closed {
            self.pts.len()
        } else {
            self.pts.len() - 1
        }
    }

    fn cell_of(&self, z: Complex64) -> (usize, usize) {
        let fx = ((z.re - self.origin.re) / self.cell).floor();
        let fy = ((z.im - self.origin.im) / self.cell).floor();
        (
            fx.clamp(0.0, (self.nx - 1) as f64) as usize,
            fy.clamp(0.0, (self.ny - 1) as f64) as usize,
        )
    }

    fn candidates(&self, p: Complex64, q: Complex64) -> Vec<usize> {
        let (x0, y0) = self.cell_of(Complex64::new(p.re.min(q.re), p.im.min(q.im)));
        let (x1, y1) = self.cell_of(Complex64::new(p.re.max(q.re), p.im.max(q.im)));
        let mut out = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                out.extend_from_slice(&self.buckets[y * self.nx + x]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn segment_crosses(&self, p: Complex64, q: Complex64) -> bool {
        self.candidates(p, q).into_iter().any(|s| {
            let (r, t) = self.segment(s);
            segments_cross(p, q, r, t)
        })
    }

    /// Distance from `z` to the nearest segment.
    pub fn distance(&self, z: Complex64) -> f64 {
        match self.nearest(z) {
            Some(n) => n.distance,
            None => self.pts.first().map_or(f64::INFINITY, |p| (z - p).norm()),
        }
    }

    /// Closest point on the polyline to `z`.
    pub fn nearest(&self, z: Complex64) -> Option<Nearest> {
        let nseg = self.nseg();
        if nseg == 0 {
            return None;
        }
        let mut best: Option<Nearest> = None;
        let consider = |s: usize, best: &mut Option<Nearest>| {
            let (a, b) = self.segment(s);
            let ab = b - a;
            let len2 = ab.norm_sqr();
            let t = if len2 == 0.0 {
                0.0
            } else {
                (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0)
            };
            let point = a + ab * t;
            let d = (z - point).norm();
            if best.as_ref().is_none_or(|n| d < n.distance) {
                *best = Some(Nearest {
                    segment: s,
                    t,
                    point,
                    distance: d,
                });
            }
        };
        let bb = BBox {
            min: self.origin,
            max: self.origin + Complex64::new(self.nx as f64, self.ny as f64) * self.cell,
        };
        if !bb.inflate(self.cell).contains(z) {
            for s in 0..nseg {
                consider(s, &mut best);
            }
            return best;
        }
        let (cx, cy) = self.cell_of(z);
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            // Cells in this ring are at least (ring - 1) * cell away.
            if ring >= 1 && best.as_ref().is_some_and(|n| n.distance < (ring as f64 - 1.0) * self.cell) {
                break;
            }
            let x0 = cx as i64 - ring as i64;
            let x1 = cx as i64 + ring as i64;
            let y0 = cy as i64 - ring as i64;
            let y1 = cy as i64 + ring as i64;
            for y in y0..=y1 {
                for x in x0..=x1 {
                    if x != x0 && x != x1 && y != y0 && y != y1 {
                        continue;
                    }
                    if x < 0 || y < 0 || x >= self.nx as i64 || y >= self.ny as i64 {
                        continue;
                    }
                    for &s in &self.buckets[y as usize * self.nx + x as usize] {
                        consider(s, &mut best);
                    }
                }
            }
        }
        best
    }
}

/// Result of [`SegmentIndex::nearest`]: the closest point lies at parameter
/// `t` on segment `segment`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub segment: usize,
    pub t: f64,
    pub point: Complex64,
    pub distance: f64,
}

/// Points where the polyline crosses the vertical line `Re z = x`.
pub fn crossings_at_re(pts: &[Complex64], x: f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.re - x) * (b.re - x) <= 0.0 && a.re != b.re {
            let s = (x - a.re) / (b.re - a.re);
            out.push(a + (b - a) * s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn banded_winding_matches_direct() {
        // A star traversed twice around, so winding numbers reach 2.
        let poly: Vec<Complex64> = (0..2000)
            .map(|i| {
                let t = i as f64 / 1000.0 * std::f64::consts::TAU;
                Complex64::from_polar(1.0 + 0.4 * (7.0 * t).cos(), t)
            })
            .collect();
        let ix = WindingIndex::new(&poly);
        for i in 0..400 {
            let z = c(-1.6 + 0.008 * i as f64, -1.5 + 0.0071 * i as f64);
            assert_eq!(ix.winding(z), winding_number(&poly, z), "{z}");
        }
        assert_eq!(ix.winding(c(0.0, 0.0)), 2);
    }

    fn square() -> Vec<Complex64> {
        vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]
    }

    #[test]
    fn winding_of_square() {
        let sq = square();
        assert_eq!(winding_number(&sq, c(0.5, 0.5)), 1);
        assert_eq!(winding_number(&sq, c(1.5, 0.5)), 0);
        let mut rev = sq.clone();
        rev.reverse();
        assert_eq!(winding_number(&rev, c(0.5, 0.5)), -1);
        assert!((signed_area(&sq) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn argument_winding_of_circle() {
        let circle: Vec<_> = (0..64)
            .map(|i| Complex64::from_polar(1.0, i as f64 * std::f64::consts::TAU / 64.0))
            .collect();
        let sq: Vec<_> = circle.iter().map(|z| z * z).collect();
        assert!((winding_around_zero(&circle) - 1.0).abs() < 1e-12);
        assert!((winding_around_zero(&sq) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn distances() {
        let sq = square();
        assert!((dist_point_polygon(c(0.5, 2.0), &sq) - 1.0).abs() < 1e-15);
        let idx = SegmentIndex::new(&sq, true);
        for z in [c(0.5, 2.0), c(0.2, 0.3), c(-3.0, -4.0), c(0.9, 0.5)] {
            assert!((idx.distance(z) - dist_point_polygon(z, &sq)).abs() < 1e-15);
        }
        let inner: Vec<_> = sq.iter().map(|z| z * 0.5 + c(0.25, 0.25)).collect();
        assert!((min_distance(&inner, &sq, true) - 0.25).abs() < 1e-15);
        let crossing = vec![c(-1.0, 0.5), c(2.0, 0.5)];
        assert_eq!(min_distance(&crossing, &sq, true), 0.0);
    }

    #[test]
    fn hausdorff_of_shifted_polyline() {
        let a = resample(&[c(0.0, 0.0), c(1.0, 0.0)], 0.01);
        let b: Vec<_> = a.iter().map(|z| z + c(0.0, 0.1)).collect();
        assert!((hausdorff(&a, &b) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn detects_self_crossing() {
        let bow = vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)];
        assert_eq!(self_crossings(&bow), 1);
        assert_eq!(self_crossings(&square()), 0);
    }

    #[test]
    fn resampling_bounds_segments() {
        let r = resample_closed(&square(), 0.1);
        let mut closed = r.clone();
        closed.push(r[0]);
        assert!(closed.windows(2).all(|w| (w[1] - w[0]).norm() <= 0.1 + 1e-12));
        assert!((polyline_length(&closed) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn vertical_crossings() {
        let p = vec![c(0.0, 0.0), c(2.0, 2.0), c(4.0, 0.0)];
        let x = crossings_at_re(&p, 1.0);
        assert_eq!(x.len(), 1);
        assert!((x[0] - c(1.0, 1.0)).norm() < 1e-15);
    }
}
