//! Escape-time pictures, polyline overlays, and diameter statistics of the
//! attracted components in a viewport.
//!
//! Pixels are classified by orbit: escaping once `|Re(z - u)|` exceeds the
//! escape threshold and keeps growing (then `|f(z)| >= |v| e^{|Re(z-u)|}/2 - |v|`
//! runs away), attracted once the orbit enters an absorbing disk of an
//! attracting cycle, unresolved otherwise.
//!
//! Spherical diameters use the chordal metric
//! `d(z, w) = 2|z - w| / sqrt((1 + |z|²)(1 + |w|²))`, i.e. Euclidean distance
//! between stereographic images on the unit sphere.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::basins::{classify_critical_orbit, CriticalValue, OrbitKind};
use crate::error::{Error, Result};
use crate::map::CosineMap;

/// Bumped whenever a colour below changes.
pub const PALETTE_VERSION: u32 = 1;

/// Smallest escape threshold accepted by the renderer.
pub const MIN_ESCAPE_RE: f64 = 50.0;

/// Components with fewer interior pixels (all four neighbours in the
/// component) are flagged as resolution limited; slivers of thin basin
/// fingers cut apart by the sampling have none.
pub const MIN_INTERIOR_PIXELS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Viewport {
    pub center: Complex64,
    pub width: f64,
    pub px: (usize, usize),
}

impl Viewport {
    pub fn new(center: Complex64, width: f64, px: (usize, usize)) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || px.0 == 0 || px.1 == 0 || !center.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "viewport needs width > 0 and positive pixel counts (got width {width}, {}x{})",
                px.0, px.1
            )));
        }
        Ok(Viewport { center, width, px })
    }

    pub fn pixel_size(&self) -> f64 {
        self.width / self.px.0 as f64
    }

    pub fn height(&self) -> f64 {
        self.pixel_size() * self.px.1 as f64
    }

    /// Offset of pixel `(i, j)` from the centre; row 0 is the top. Exactly
    /// antisymmetric under `(i, j) -> (w-1-i, h-1-j)`.
    pub fn offset(&self, i: usize, j: usize) -> Complex64 {
        let h = 0.5 * self.pixel_size();
        let x = (2 * i + 1) as f64 - self.px.0 as f64;
        let y = self.px.1 as f64 - (2 * j + 1) as f64;
        Complex64::new(x * h, y * h)
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        self.center + self.offset(i, j)
    }

    /// Continuous pixel coordinates (column, row) of `z`.
    pub fn to_pixel(&self, z: Complex64) -> (f64, f64) {
        let s = self.pixel_size();
        let col = (z.re - self.center.re) / s + 0.5 * self.px.0 as f64;
        let row = (self.center.im - z.im) / s + 0.5 * self.px.1 as f64;
        (col, row)
    }

    pub fn pixel(&self, z: Complex64) -> Option<(usize, usize)> {
        let (c, r) = self.to_pixel(z);
        (c >= 0.0 && r >= 0.0 && c < self.px.0 as f64 && r < self.px.1 as f64).then_some((c as usize, r as usize))
    }

    /// Same window, pixel counts scaled by `k`.
    pub fn scaled(&self, k: usize) -> Viewport {
        Viewport {
            px: (self.px.0 * k, self.px.1 * k),
            ..*self
        }
    }
}

/// 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Self {
        Image {
            width,
            height,
            data: vec![0; width * height * 3],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> [u8; 3] {
        let o = 3 * (j * self.width + i);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    pub fn put(&mut self, i: usize, j: usize, c: [u8; 3]) {
        let o = 3 * (j * self.width + i);
        self.data[o..o + 3].copy_from_slice(&c);
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&self.to_ppm())?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PixelClass {
    Escaping { n: u32 },
    /// `f^n(z)` is the first iterate in an absorbing disk.
    Attracted { cycle: u32, n: u32 },
    Unresolved,
}

/// An attracting cycle with disks `|z - c_i| < radius` that `f^p` maps into
/// themselves, hence lie in the immediate basin.
#[derive(Debug, Clone, Serialize)]
pub struct Attractor {
    pub cycle: Vec<Complex64>,
    pub multiplier: Complex64,
    pub radius: f64,
}

fn maps_disk_inside(m: &CosineMap, cycle: &[Complex64], multiplier: Complex64, r: f64) -> bool {
    let p = cycle.len();
    let q = 0.5 * (1.0 + multiplier.norm());
    cycle.iter().all(|&c| {
        (0..128).all(|k| {
            let z = c + Complex64::from_polar(r, k as f64 * std::f64::consts::TAU / 128.0);
            m.iterate(z, p).map(|w| (w - c).norm() < q * r).unwrap_or(false)
        })
    })
}

/// Attracting cycles of `f`; every one attracts `v` or `-v`.
pub fn attractors(m: &CosineMap, max_iter: usize) -> Vec<Attractor> {
    let mut out: Vec<Attractor> = Vec::new();
    for which in [CriticalValue::Plus, CriticalValue::Minus] {
        let class = classify_critical_orbit(m, which, max_iter);
        let (OrbitKind::Attracted, Some(cycle), Some(multiplier)) = (class.kind, class.cycle, class.multiplier) else {
            continue;
        };
        if out.iter().any(|a| a.cycle.iter().any(|c| (c - cycle[0]).norm() < 1e-6)) {
            continue;
        }
        out.push(Attractor {
            cycle,
            multiplier,
            radius: 0.0,
        });
    }
    let pts: Vec<Complex64> = out.iter().flat_map(|a| a.cycle.iter().copied()).collect();
    let sep = pts
        .iter()
        .enumerate()
        .flat_map(|(i, a)| pts[i + 1..].iter().map(move |b| (a - b).norm()))
        .fold(2.0_f64, f64::min);
    for a in &mut out {
        let mut r = 0.45 * sep;
        while r > 1e-9 && !maps_disk_inside(m, &a.cycle, a.multiplier, r) {
            r *= 0.7;
        }
        a.radius = r.max(1e-9);
    }
    out
}

fn classify_pixel(m: &CosineMap, xi: Complex64, attr: &[Attractor], max_iter: usize, escape_re: f64) -> PixelClass {
    let hit = |z: Complex64| {
        attr.iter()
            .position(|a| a.cycle.iter().any(|c| (z - c).norm() < a.radius))
            .map(|id| id as u32)
    };
    if let Some(cycle) = hit(m.u + xi) {
        return PixelClass::Attracted { cycle, n: 0 };
    }
    // First step from z - u, so that z and 2u - z give identical orbits.
    let mut z = 0.5 * m.v * (xi.exp() + (-xi).exp());
    for n in 1..=max_iter as u32 {
        if let Some(cycle) = hit(z) {
            return PixelClass::Attracted { cycle, n };
        }
        let x = (z - m.u).re.abs();
        let next = match m.eval(z) {
            Ok(w) => w,
            Err(_) => return PixelClass::Escaping { n },
        };
        if x > escape_re && (next - m.u).re.abs() > x {
            return PixelClass::Escaping { n };
        }
        z = next;
    }
    PixelClass::Unresolved
}

#[derive(Debug, Clone)]
pub struct Rendering {
    pub map: CosineMap,
    pub viewport: Viewport,
    pub attractors: Vec<Attractor>,
    /// Row-major, row 0 at the top.
    pub classes: Vec<PixelClass>,
}

impl Rendering {
    pub fn class(&self, i: usize, j: usize) -> PixelClass {
        self.classes[j * self.viewport.px.0 + i]
    }

    pub fn image(&self) -> Image {
        let (w, h) = self.viewport.px;
        let mut img = Image::new(w, h);
        for j in 0..h {
            for i in 0..w {
                img.put(i, j, color(self.class(i, j)));
            }
        }
        img
    }
}

const BASIN_COLORS: [[u8; 3]; 6] = [
    [235, 140, 40],
    [60, 170, 100],
    [90, 120, 230],
    [210, 70, 160],
    [190, 190, 60],
    [70, 190, 200],
];

pub fn color(c: PixelClass) -> [u8; 3] {
    match c {
        PixelClass::Escaping { n } => {
            let g = 255u32.saturating_sub(10 * n.saturating_sub(1)).max(40) as u8;
            [g, g, g.saturating_add(30)]
        }
        PixelClass::Attracted { cycle, n } => {
            let base = BASIN_COLORS[cycle as usize % BASIN_COLORS.len()];
            // n = 0 and n = 1 share a shade: z and 2u - z differ only there.
            let shade = 1.0 - 0.6 * (n.max(1) as f64 / 40.0).min(1.0);
            base.map(|x| (x as f64 * shade).round() as u8)
        }
        PixelClass::Unresolved => [16, 16, 16],
    }
}

/// Classifies every pixel of `vp`.
pub fn classify_viewport(m: &CosineMap, vp: &Viewport, max_iter: usize, escape_re: f64) -> Result<Rendering> {
    if !(escape_re >= MIN_ESCAPE_RE) {
        return Err(Error::InvalidParameter(format!(
            "escape threshold {escape_re} below {MIN_ESCAPE_RE}"
        )));
    }
    let attr = attractors(m, max_iter.max(2000));
    let (w, h) = vp.px;
    let shift = vp.center - m.u;
    let row = |j: usize| -> Vec<PixelClass> {
        (0..w)
            .map(|i| classify_pixel(m, shift + vp.offset(i, j), &attr, max_iter, escape_re))
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<PixelClass>> = {
        use rayon::prelude::*;
        (0..h).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<PixelClass>> = (0..h).map(row).collect();
    Ok(Rendering {
        map: *m,
        viewport: *vp,
        attractors: attr,
        classes: rows.into_iter().flatten().collect(),
    })
}

pub fn render_julia(m: &CosineMap, vp: &Viewport, max_iter: usize, escape_re: f64) -> Result<Image> {
    Ok(classify_viewport(m, vp, max_iter, escape_re)?.image())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Ray,
    Equipotential,
    Ellipse,
    Graph,
    Piece,
    Domain,
    Codomain,
    Slit,
    Point,
}

impl Tag {
    pub fn color(self) -> [u8; 3] {
        match self {
            Tag::Ray => [220, 20, 20],
            Tag::Equipotential => [250, 250, 250],
            Tag::Ellipse => [120, 120, 120],
            Tag::Graph => [255, 220, 0],
            Tag::Piece => [0, 200, 0],
            Tag::Domain => [0, 230, 230],
            Tag::Codomain => [230, 0, 230],
            Tag::Slit => [255, 120, 0],
            Tag::Point => [255, 0, 0],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlayObject {
    pub tag: Tag,
    pub points: Vec<Complex64>,
    pub closed: bool,
}

impl OverlayObject {
    pub fn curve(tag: Tag, points: Vec<Complex64>) -> Self {
        OverlayObject { tag, points, closed: false }
    }

    pub fn polygon(tag: Tag, points: Vec<Complex64>) -> Self {
        OverlayObject { tag, points, closed: true }
    }
}

// Liang-Barsky clip of a segment to the box [lo, hi]².
fn clip(p: (f64, f64), q: (f64, f64), lo: (f64, f64), hi: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for (pp, qq) in [
        (-dx, p.0 - lo.0),
        (dx, hi.0 - p.0),
        (-dy, p.1 - lo.1),
        (dy, hi.1 - p.1),
    ] {
        if pp == 0.0 {
            if qq < 0.0 {
                return None;
            }
            continue;
        }
        let r = qq / pp;
        if pp < 0.0 {
            t0 = t0.max(r);
        } else {
            t1 = t1.min(r);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some(((p.0 + t0 * dx, p.1 + t0 * dy), (p.0 + t1 * dx, p.1 + t1 * dy)))
}

/// Draws the objects over a copy of `img`; anything outside is clipped.
pub fn overlay(img: &Image, vp: &Viewport, objects: &[OverlayObject]) -> Image {
    let mut out = img.clone();
    let (w, h) = (img.width as f64, img.height as f64);
    for obj in objects {
        let c = obj.tag.color();
        let n = obj.points.len();
        if n == 1 {
            if let Some((i, j)) = vp.pixel(obj.points[0]) {
                out.put(i, j, c);
            }
            continue;
        }
        let segs = if obj.closed { n } else { n.saturating_sub(1) };
        for s in 0..segs {
            let (a, b) = (obj.points[s], obj.points[(s + 1) % n]);
            if !a.is_finite() || !b.is_finite() {
                continue;
            }
            let Some((p, q)) = clip(vp.to_pixel(a), vp.to_pixel(b), (0.0, 0.0), (w - 1e-9, h - 1e-9)) else {
                continue;
            };
            let steps = ((q.0 - p.0).abs().max((q.1 - p.1).abs()).ceil() as usize).max(1);
            for k in 0..=steps {
                let t = k as f64 / steps as f64;
                let (x, y) = (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1));
                out.put(x as usize, y as usize, c);
            }
        }
    }
    out
}

pub fn chordal(z: Complex64, w: Complex64) -> f64 {
    2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
}

fn sphere(z: Complex64) -> [f64; 3] {
    let s = 1.0 + z.norm_sqr();
    [2.0 * z.re / s, 2.0 * z.im / s, (z.norm_sqr() - 1.0) / s]
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Chordal diameter of a point set: exact for small sets, otherwise over
/// the extremes in 512 directions.
pub fn spherical_diameter(points: &[Complex64]) -> f64 {
    let mut p: Vec<[f64; 3]> = points.iter().map(|&z| sphere(z)).collect();
    if p.len() > 1500 {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let mut keep = Vec::with_capacity(1024);
        for k in 0..512 {
            let y = 1.0 - (k as f64 + 0.5) / 512.0;
            let r = (1.0 - y * y).sqrt();
            let d = [r * (golden * k as f64).cos(), y, r * (golden * k as f64).sin()];
            let proj = |q: &[f64; 3]| q[0] * d[0] + q[1] * d[1] + q[2] * d[2];
            let (lo, hi) = p.iter().fold((p[0], p[0]), |(lo, hi), q| {
                (if proj(q) < proj(&lo) { *q } else { lo }, if proj(q) > proj(&hi) { *q } else { hi })
            });
            keep.push(lo);
            keep.push(hi);
        }
        p = keep;
    }
    let mut best = 0.0_f64;
    for i in 0..p.len() {
        for q in &p[i + 1..] {
            best = best.max(dist3(&p[i], q));
        }
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentStat {
    pub id: usize,
    pub cycle: u32,
    pub pixels: usize,
    pub diameter: f64,
    /// Least `n` with `f^n(U)` in an immediate basin component, estimated
    /// from a few pixels of `U` (see [`component_report`]).
    pub preperiod: usize,
    pub touches_edge: bool,
    pub resolution_limited: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PreperiodClass {
    pub preperiod: usize,
    pub count: usize,
    pub median_diameter: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiameterReport {
    pub viewport: Viewport,
    pub components: Vec<ComponentStat>,
    /// `(ε, number of components with diameter > ε)`.
    pub counts: Vec<(f64, usize)>,
    pub classes: Vec<PreperiodClass>,
}

impl DiameterReport {
    pub fn count_above(&self, eps: f64) -> usize {
        self.components.iter().filter(|c| c.diameter > eps).count()
    }
}

/// Two reports of one window at different resolutions.
#[derive(Debug, Clone, Serialize)]
pub struct ResolutionCheck {
    pub eps: f64,
    pub coarse_count: usize,
    pub fine_count: usize,
    /// `|fine - coarse| / coarse` for the counts above `eps`.
    pub count_change: f64,
    /// Classes (fine medians) whose median moves by less than the tolerance;
    /// the others are still resolution limited.
    pub stable_classes: Vec<PreperiodClass>,
    pub medians_non_increasing: bool,
}

/// Compares counts above `eps` and the class medians of `coarse` and `fine`.
/// A class is stable when both reports have at least `min_count` measured
/// components in it and the medians differ by less than `rel` relatively.
pub fn compare_resolutions(coarse: &DiameterReport, fine: &DiameterReport, eps: f64, rel: f64, min_count: usize) -> ResolutionCheck {
    let (c, f) = (coarse.count_above(eps), fine.count_above(eps));
    let stable: Vec<PreperiodClass> = fine
        .classes
        .iter()
        .filter(|k| k.count >= min_count)
        .filter(|k| {
            coarse.classes.iter().any(|j| {
                j.preperiod == k.preperiod
                    && j.count >= min_count
                    && (j.median_diameter - k.median_diameter).abs() < rel * j.median_diameter
            })
        })
        .cloned()
        .collect();
    ResolutionCheck {
        eps,
        coarse_count: c,
        fine_count: f,
        count_change: if c == 0 { if f == 0 { 0.0 } else { f64::INFINITY } } else { (f as f64 - c as f64).abs() / c as f64 },
        medians_non_increasing: stable.windows(2).all(|w| w[1].median_diameter <= w[0].median_diameter),
        stable_classes: stable,
    }
}

pub const DEFAULT_EPS: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Pixels per component whose orbits are followed for the preperiod.
const PREPERIOD_PROBES: usize = 8;

/// Splits the attracted pixels of a rendering into 4-connected components
/// and measures them.
///
/// Components holding the pixel of a cycle point are immediate (preperiod
/// 0). For the others, the orbits of the pixels that reach an absorbing disk
/// first are followed until they land on a pixel of an immediate component;
/// if none does inside the viewport, the disk entry time is used.
pub fn component_report(r: &Rendering, eps: &[f64]) -> DiameterReport {
    let (w, h) = r.viewport.px;
    let mut label = vec![usize::MAX; w * h];
    let mut comps = Vec::new();
    let mut stack = Vec::new();
    let mut probe_sets = Vec::new();
    for start in 0..w * h {
        let PixelClass::Attracted { cycle, .. } = r.classes[start] else {
            continue;
        };
        if label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        label[start] = id;
        stack.push(start);
        let (mut pixels, mut interior, mut edge) = (0usize, 0usize, false);
        let mut probes: Vec<(u32, usize)> = Vec::with_capacity(PREPERIOD_PROBES + 1);
        let mut boundary = Vec::new();
        while let Some(p) = stack.pop() {
            let (i, j) = (p % w, p / w);
            pixels += 1;
            if let PixelClass::Attracted { n, .. } = r.classes[p] {
                if probes.len() < PREPERIOD_PROBES || n < probes[PREPERIOD_PROBES - 1].0 {
                    let at = probes.partition_point(|q| q.0 <= n);
                    probes.insert(at, (n, p));
                    probes.truncate(PREPERIOD_PROBES);
                }
            }
            edge |= i == 0 || j == 0 || i + 1 == w || j + 1 == h;
            let mut inner = true;
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni < 0 || nj < 0 || ni >= w as i64 || nj >= h as i64 {
                    inner = false;
                    continue;
                }
                let q = nj as usize * w + ni as usize;
                match r.classes[q] {
                    PixelClass::Attracted { cycle: c, .. } if c == cycle => {
                        if label[q] == usize::MAX {
                            label[q] = id;
                            stack.push(q);
                        }
                    }
                    _ => inner = false,
                }
            }
            if inner {
                interior += 1;
            } else {
                boundary.push(r.viewport.point(i, j));
            }
        }
        comps.push(ComponentStat {
            id,
            cycle,
            pixels,
            diameter: spherical_diameter(&boundary),
            preperiod: 0,
            touches_edge: edge,
            resolution_limited: interior < MIN_INTERIOR_PIXELS,
        });
        probe_sets.push(probes);
    }
    let vp = &r.viewport;
    let mut immediate = vec![false; comps.len()];
    for (id, a) in r.attractors.iter().enumerate() {
        for &c in &a.cycle {
            if let Some((i, j)) = vp.pixel(c) {
                if matches!(r.classes[j * w + i], PixelClass::Attracted { cycle, .. } if cycle as usize == id) {
                    immediate[label[j * w + i]] = true;
                }
            }
        }
    }
    let landed = |z: Complex64| {
        vp.pixel(z)
            .map(|(i, j)| label[j * w + i])
            .is_some_and(|l| l != usize::MAX && immediate[l])
    };
    for (c, probes) in comps.iter_mut().zip(&probe_sets) {
        if immediate[c.id] {
            continue;
        }
        c.preperiod = probes
            .iter()
            .map(|&(n, p)| {
                let mut z = vp.point(p % w, p / w);
                for k in 1..=n as usize {
                    match r.map.eval(z) {
                        Ok(next) => z = next,
                        Err(_) => break,
                    }
                    if landed(z) {
                        return k;
                    }
                }
                n as usize
            })
            .min()
            .unwrap_or(0);
    }
    let counts = eps
        .iter()
        .map(|&e| (e, comps.iter().filter(|c| c.diameter > e).count()))
        .collect();
    let max_pre = comps.iter().map(|c| c.preperiod).max().unwrap_or(0);
    let classes = (0..=max_pre)
        .filter_map(|k| {
            let ds: Vec<f64> = comps
                .iter()
                .filter(|c| c.preperiod == k && !c.resolution_limited)
                .map(|c| c.diameter)
                .collect();
            (!ds.is_empty()).then(|| PreperiodClass {
                preperiod: k,
                count: ds.len(),
                median_diameter: median(ds),
            })
        })
        .collect();
    DiameterReport {
        viewport: r.viewport,
        components: comps,
        counts,
        classes,
    }
}

pub fn component_diameters(m: &CosineMap, vp: &Viewport, max_iter: usize, eps: &[f64]) -> Result<DiameterReport> {
    let r = classify_viewport(m, vp, max_iter, MIN_ESCAPE_RE)?;
    if r.attractors.is_empty() {
        return Err(Error::Precondition("no attracting cycle: nothing to measure".into()));
    }
    Ok(component_report(&r, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::c64;

    fn half_cosh() -> CosineMap {
        CosineMap::from_normal_form(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap()
    }

    #[test]
    fn fixed_point_pixel_is_in_its_basin() {
        let m = half_cosh();
        // x = cosh(x)/2 by bisection.
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if 0.5 * mid.cosh() > mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let vp = Viewport::new(c64(lo, 0.0), 0.1, (11, 11)).unwrap();
        let r = classify_viewport(&m, &vp, 200, 60.0).unwrap();
        assert_eq!(r.attractors.len(), 1);
        assert!(matches!(r.class(5, 5), PixelClass::Attracted { cycle: 0, .. }));
    }

    #[test]
    fn symmetric_viewport_gives_mirrored_image() {
        let m = CosineMap::from_normal_form(c64(0.3, 0.2), c64(0.5, 0.1)).unwrap();
        let vp = Viewport::new(m.u, 6.0, (64, 48)).unwrap();
        let img = render_julia(&m, &vp, 150, 50.0).unwrap();
        for j in 0..48 {
            for i in 0..64 {
                assert_eq!(img.get(i, j), img.get(63 - i, 47 - j));
            }
        }
    }

    #[test]
    fn cosh_real_axis_escapes() {
        let m = CosineMap::cosh_map();
        let vp = Viewport::new(c64(0.0, 0.0), 4.0, (41, 21)).unwrap();
        let r = classify_viewport(&m, &vp, 300, 50.0).unwrap();
        for i in 0..41 {
            assert!(matches!(r.class(i, 10), PixelClass::Escaping { .. }), "pixel {i}");
        }
    }

    #[test]
    fn empty_overlay_is_identity() {
        let m = half_cosh();
        let vp = Viewport::new(c64(0.0, 0.0), 4.0, (20, 20)).unwrap();
        let img = render_julia(&m, &vp, 50, 50.0).unwrap();
        assert_eq!(overlay(&img, &vp, &[]), img);
    }

    #[test]
    fn overlay_clips_far_segments() {
        let vp = Viewport::new(c64(0.0, 0.0), 2.0, (10, 10)).unwrap();
        let img = Image::new(10, 10);
        let far = OverlayObject::curve(Tag::Ray, vec![c64(-100.0, 0.05), c64(100.0, 0.05)]);
        let out = overlay(&img, &vp, &[far]);
        let red = (0..10).filter(|&i| out.get(i, 4) == Tag::Ray.color() || out.get(i, 5) == Tag::Ray.color());
        assert_eq!(red.count(), 10);
        let outside = OverlayObject::curve(Tag::Ray, vec![c64(5.0, 5.0), c64(6.0, 7.0)]);
        assert_eq!(overlay(&img, &vp, &[outside]), img);
    }

    #[test]
    fn chordal_matches_sphere_embedding() {
        let (z, w) = (c64(0.3, -1.2), c64(-2.0, 0.7));
        assert!((chordal(z, w) - dist3(&sphere(z), &sphere(w))).abs() < 1e-14);
        assert!((chordal(c64(0.0, 0.0), c64(1e12, 0.0)) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_diameter_matches_exact() {
        let pts: Vec<Complex64> = (0..2000)
            .map(|k| Complex64::from_polar(0.4 + 0.1 * ((k * 7) % 13) as f64 / 13.0, k as f64 * 0.0031))
            .collect();
        let exact = {
            let p: Vec<[f64; 3]> = pts.iter().map(|&z| sphere(z)).collect();
            let mut b = 0.0_f64;
            for i in 0..p.len() {
                for q in &p[i + 1..] {
                    b = b.max(dist3(&p[i], q));
                }
            }
            b
        };
        let approx = spherical_diameter(&pts);
        assert!(approx <= exact + 1e-15 && approx > exact * 0.999);
    }

    #[test]
    fn single_basin_has_a_dominant_component() {
        let m = half_cosh();
        let vp = Viewport::new(c64(0.0, 0.0), 3.0, (120, 120)).unwrap();
        let rep = component_diameters(&m, &vp, 300, &DEFAULT_EPS).unwrap();
        let mut ds: Vec<f64> = rep.components.iter().map(|c| c.diameter).collect();
        ds.sort_by(|a, b| b.total_cmp(a));
        assert!(ds[0] > 0.5 && ds.get(1).map_or(true, |d| *d < 0.5 * ds[0]));
        let big = rep.components.iter().max_by(|a, b| a.pixels.cmp(&b.pixels)).unwrap();
        assert_eq!(big.preperiod, 0);
    }
}
