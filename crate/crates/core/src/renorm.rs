//! Renormalization when the critical value `-v` escapes: the rays through
//! the critical points `u_{2k+1}` cut the plane into strips `S_k`, and
//! `f : R_M -> E_M` (slit along the forward images of the ray through `-v`)
//! is quadratic-like.

use num_complex::Complex64;
use serde::Serialize;

use crate::basins::{classify_critical_orbit, CriticalValue, OrbitKind};
use crate::error::{Error, Result};
use crate::geometry::{dist_point_polygon, self_crossings, BBox, SegmentIndex, WindingIndex};
use crate::map::{BranchError, CosineMap, StripIndex, TWO_PI};
use crate::puzzle::{ellipse_curve, ellipse_semi_axes, ellipse_slack, rectangle_margin};
use crate::rays::{asymptotic_seed, potential_backward, potential_forward, potential_grid, trace_ray_at, TraceOptions};
use crate::symbolic::Address;

/// Iteration budget for escape and exit times.
pub const EXIT_BUDGET: usize = 10_000;

/// Orbit points are matched to the asymptotic ray formula from this potential on.
const TAIL_POTENTIAL: f64 = 30.0;

/// Largest segment of traced tails near the ellipse.
const TAIL_SEGMENT: f64 = 0.01;

/// Critical orbit returns checked against the small domain.
pub const ORBIT_CHECK: usize = 100;

/// The ray `g_s` through `-v`, located from the escaping orbit.
#[derive(Debug, Clone, Serialize)]
pub struct EscapingValue {
    /// Agrees with the itinerary of `-v` on the entries the tracer uses.
    pub address: Address,
    /// Potential `t*` with `g_s(t*) = -v`.
    pub potential: f64,
    /// Pullbacks needed from the asymptotic regime.
    pub depth: usize,
    pub orbit: Vec<Complex64>,
    /// `|g_s(t*) + v|` for the traced ray.
    pub gap: f64,
}

fn entry_potential(m: &CosineMap, e: StripIndex, z: Complex64) -> f64 {
    if e.j == 0 {
        z.re + m.a.norm().ln()
    } else {
        -z.re + m.b.norm().ln()
    }
}

fn trace_options(m: &CosineMap, depth: usize, window: f64) -> TraceOptions {
    TraceOptions {
        depth,
        max_segment: Some(TAIL_SEGMENT),
        window: window + m.u.norm(),
    }
}

/// Locates `-v` on its ray. The orbit is followed until it sits on the
/// asymptotic line of its strip at potential at least `min_potential`.
pub fn escaping_value(m: &CosineMap, min_potential: f64) -> Result<EscapingValue> {
    let class = classify_critical_orbit(m, CriticalValue::Minus, EXIT_BUDGET);
    if class.kind != OrbitKind::Escaping {
        return Err(Error::Precondition(format!("-v is not escaping ({:?})", class.kind)));
    }
    let floor = min_potential.max(TAIL_POTENTIAL);
    let mut z = -m.v;
    let mut orbit = Vec::new();
    let mut entries = Vec::new();
    for _ in 0..EXIT_BUDGET {
        let e = m.strip_index(z).map_err(|_| Error::SlitBoundary(z))?;
        orbit.push(z);
        entries.push(e);
        let t = entry_potential(m, e, z);
        if t >= floor {
            let line = asymptotic_seed(m, &Address::periodic(vec![e])?, t)?;
            if (line.im - z.im).abs() < 1e-9 * (1.0 + z.im.abs()) {
                let n = orbit.len() - 1;
                let potential = (0..n).fold(t, |t, _| potential_backward(t));
                let address = Address::new(entries[..n].to_vec(), vec![entries[n]])?;
                let ray = trace_ray_at(m, &address, &[potential], &trace_options(m, n, 0.0))?;
                let gap = (ray.last() + m.v).norm();
                if gap > 1e-6 {
                    return Err(Error::Inconsistent(format!(
                        "-v is {gap:.2e} away from the traced ray {address} at t = {potential}"
                    )));
                }
                return Ok(EscapingValue {
                    address,
                    potential,
                    depth: n,
                    orbit,
                    gap,
                });
            }
        }
        z = m.eval(z).map_err(|_| {
            Error::Inconclusive(format!(
                "the orbit of -v leaves the asymptotic regime at {z} before it can be matched to a ray"
            ))
        })?;
    }
    Err(Error::Inconsistent("-v did not reach the asymptotic regime".into()))
}

impl EscapingValue {
    /// `f^j(g_s)` from `f^j(-v)` out to potential `t_far`. Beyond potential
    /// 60 the ray is the asymptotic line to double precision.
    pub fn tail(&self, m: &CosineMap, j: usize, t_far: f64, window: f64) -> Result<Vec<Complex64>> {
        if j > self.depth {
            return Err(Error::InvalidParameter(format!("tail index {j} beyond depth {}", self.depth)));
        }
        let addr = self.address.shift_by(j);
        let t0 = (0..j).fold(self.potential, |t, _| potential_forward(t));
        let t_top = t_far.min(60.0_f64.max(t0 + 1.0));
        let ts = potential_grid(t0, t_top);
        let ray = trace_ray_at(m, &addr, &ts, &trace_options(m, self.depth - j, window))?;
        let mut pts: Vec<Complex64> = ray.points().into_iter().rev().collect();
        pts[0] = self.orbit[j];
        let mut t = t_top;
        while t < t_far {
            t = (t * 1.25).min(t_far);
            pts.push(asymptotic_seed(m, &addr, t)?);
        }
        Ok(pts)
    }
}

/// The two rays `g_{s_k^±}` crashing on `u_{2k+1}`, each from the critical
/// point outward; `plus` leaves to the right.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalRayPair {
    pub k: i64,
    pub critical_point: Complex64,
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
    pub address_plus: Address,
    pub address_minus: Address,
}

impl CriticalRayPair {
    /// Left end to right end through the critical point.
    pub fn curve(&self) -> Vec<Complex64> {
        let mut pts: Vec<Complex64> = self.minus.iter().rev().copied().collect();
        pts.extend_from_slice(&self.plus[1..]);
        pts
    }
}

/// Lifts `tail` (starting at `-v`) through `f` at `u_{2k+1}`.
pub fn critical_ray_pair(m: &CosineMap, esc: &EscapingValue, tail: &[Complex64], k: i64) -> Result<CriticalRayPair> {
    let c = m.critical_point(2 * k + 1);
    if tail.len() < 2 || (tail[0] + m.v).norm() > 1e-12 * (1.0 + m.v.norm()) {
        return Err(Error::InvalidParameter("tail must start at -v".into()));
    }
    let d = tail[1] - tail[0];
    let w_eps = tail[0] + d * (1e-8 / d.norm()).min(0.5);
    let xi = (-2.0 * (w_eps + m.v) / m.v).sqrt();
    let mut path = vec![w_eps];
    path.extend_from_slice(&tail[1..]);
    let mut halves = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let (start, _) = m
            .nearest_preimage(w_eps, c + sign * xi)
            .map_err(|_| Error::NearCritical(w_eps))?;
        let lifted = m.lift_path(&path, start, true).map_err(|e| match e {
            BranchError::NearCritical => Error::RayCrash {
                address: esc.address.to_string(),
                t: esc.potential,
            },
            BranchError::OnSlit => Error::SlitBoundary(start),
        })?;
        let mut half = vec![c];
        half.extend(lifted);
        halves.push(half);
    }
    let right = (halves[0].last().unwrap() - m.u).re > 0.0;
    let (plus, minus) = if right {
        (halves.swap_remove(0), halves.pop().unwrap())
    } else {
        let p = halves.pop().unwrap();
        (p, halves.pop().unwrap())
    };
    let entry = |pts: &[Complex64]| {
        let far = *pts.last().unwrap();
        m.strip_index(far).map_err(|_| Error::SlitBoundary(far))
    };
    Ok(CriticalRayPair {
        k,
        critical_point: c,
        address_plus: esc.address.prepend(entry(&plus)?),
        address_minus: esc.address.prepend(entry(&minus)?),
        plus,
        minus,
    })
}

/// Part of a half-ray from the critical point to its first crossing of
/// `|Re(z - u)| = x`.
fn clip_to_band(m: &CosineMap, half: &[Complex64], x: f64) -> Result<Vec<Complex64>> {
    let rel = |z: Complex64| (z - m.u).re.abs();
    let Some(i) = half.iter().position(|&z| rel(z) >= x) else {
        return Err(Error::Precondition(format!(
            "critical ray stops before |Re(z - u)| = {x}; trace further"
        )));
    };
    if half[i..].iter().any(|&z| rel(z) < x - 1e-9) {
        return Err(Error::Inconsistent(format!("critical ray re-enters the band |Re(z - u)| < {x}")));
    }
    let mut out = half[..i].to_vec();
    let (p, q) = (half[i - 1], half[i]);
    let s = (x - rel(p)) / (rel(q) - rel(p));
    let mut exit = p + (q - p) * s;
    exit.re = m.u.re + x * (q - m.u).re.signum();
    out.push(exit);
    Ok(out)
}

fn segment(p: Complex64, q: Complex64, step: f64) -> Vec<Complex64> {
    let n = ((q - p).norm() / step).ceil().max(1.0) as usize;
    (1..n).map(|i| p + (q - p) * (i as f64 / n as f64)).collect()
}

/// The strip `S_k` between the ray pairs at `u_{2k+1}` and `u_{2k+3}`, cut to
/// `|Re(z - u)| < half_width`.
#[derive(Debug, Clone, Serialize)]
pub struct Strip {
    pub k: i64,
    pub half_width: f64,
    /// The critical point `u_{2k+2}` inside.
    pub critical_point: Complex64,
    pub polygon: Vec<Complex64>,
    #[serde(skip)]
    index: WindingIndex,
    #[serde(skip)]
    bbox: BBox,
}

impl Strip {
    pub fn contains(&self, z: Complex64) -> bool {
        self.bbox.contains(z) && self.index.winding(z) != 0
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    /// Critical points inside, by point location; `u_{2k+1}` and `u_{2k+3}`
    /// lie on the boundary.
    pub fn critical_points(&self, m: &CosineMap) -> Vec<Complex64> {
        m.critical_points_between(self.bbox.min.im, self.bbox.max.im)
            .into_iter()
            .filter(|&c| self.contains(c) && dist_point_polygon(c, &self.polygon) > 1e-9)
            .collect()
    }
}

pub fn build_strip(
    m: &CosineMap,
    lower: &CriticalRayPair,
    upper: &CriticalRayPair,
    half_width: f64,
    side_step: f64,
) -> Result<Strip> {
    if upper.k != lower.k + 1 {
        return Err(Error::InvalidParameter("strip needs ray pairs at consecutive k".into()));
    }
    let band = |pair: &CriticalRayPair| -> Result<Vec<Complex64>> {
        let mut pts: Vec<Complex64> = clip_to_band(m, &pair.minus, half_width)?.into_iter().rev().collect();
        pts.extend(clip_to_band(m, &pair.plus, half_width)?.into_iter().skip(1));
        Ok(pts)
    };
    let lo = band(lower)?;
    let hi = band(upper)?;
    let mut poly = lo.clone();
    poly.extend(segment(*lo.last().unwrap(), *hi.last().unwrap(), side_step));
    poly.extend(hi.iter().rev());
    poly.extend(segment(hi[0], lo[0], side_step));
    let crossings = self_crossings(&poly);
    if crossings > 0 {
        return Err(Error::Resolution(format!(
            "strip S_{} boundary crosses itself {crossings} times",
            lower.k
        )));
    }
    let bbox = BBox::of(&poly).expect("strip boundary is nonempty");
    Ok(Strip {
        k: lower.k,
        half_width,
        critical_point: m.critical_point(2 * lower.k + 2),
        index: WindingIndex::new(&poly),
        bbox,
        polygon: poly,
    })
}

/// Potential out to which tails are traced so that their lifts through the
/// critical points reach `|Re(z - u)| = x`.
fn far_potential(m: &CosineMap, x: f64) -> f64 {
    m.v.norm() * (x + 1.0).exp() + m.a.ln().norm() + m.b.ln().norm() + m.u.norm() + 10.0
}

/// Everything needed to cut strips: `g_s` and its tail.
pub struct EscapeRays {
    pub map: CosineMap,
    pub escaping: EscapingValue,
    pub tail: Vec<Complex64>,
    pub reach: f64,
}

impl EscapeRays {
    /// `reach` bounds the `|Re(z - u)|` of the strips that will be built.
    pub fn new(m: &CosineMap, reach: f64) -> Result<Self> {
        let min_potential = reach + m.u.re.abs() + m.a.norm().ln().abs() + m.b.norm().ln().abs() + 5.0;
        let escaping = escaping_value(m, min_potential)?;
        let (semi_major, _) = ellipse_semi_axes(m.v, reach);
        let tail = escaping.tail(m, 0, far_potential(m, reach), semi_major + 2.0)?;
        Ok(EscapeRays {
            map: *m,
            escaping,
            tail,
            reach,
        })
    }

    pub fn pair(&self, k: i64) -> Result<CriticalRayPair> {
        critical_ray_pair(&self.map, &self.escaping, &self.tail, k)
    }

    pub fn pairs(&self, k: i64) -> Result<(CriticalRayPair, CriticalRayPair)> {
        #[cfg(feature = "parallel")]
        let (lo, hi) = rayon::join(|| self.pair(k), || self.pair(k + 1));
        #[cfg(not(feature = "parallel"))]
        let (lo, hi) = (self.pair(k), self.pair(k + 1));
        Ok((lo?, hi?))
    }

    pub fn strip(&self, k: i64, half_width: f64) -> Result<Strip> {
        if half_width > self.reach {
            return Err(Error::InvalidParameter(format!(
                "strip half width {half_width} exceeds the traced reach {}",
                self.reach
            )));
        }
        let (lo, hi) = self.pairs(k)?;
        build_strip(&self.map, &lo, &hi, half_width, side_step(&self.map, half_width))
    }

    /// The `k` with `z ∈ S_k`.
    pub fn strip_containing(&self, z: Complex64, half_width: f64) -> Result<Strip> {
        let guess = ((z - self.map.u).im / TWO_PI - 1.0).round() as i64;
        for k in [guess, guess - 1, guess + 1, guess - 2, guess + 2] {
            let s = self.strip(k, half_width)?;
            if s.contains(z) {
                return Ok(s);
            }
        }
        Err(Error::Inconclusive(format!("no strip S_k near {z} contains it")))
    }
}

/// Spacing of the vertical sides of `R_M`, small enough that their images on
/// the ellipse advance by at most a hundredth of the semi-minor axis.
fn side_step(m: &CosineMap, half_width: f64) -> f64 {
    let (a, b) = ellipse_semi_axes(m.v, half_width);
    (0.01 * b / a).clamp(1e-5, 0.01)
}

/// `f : U -> V` with `U = R_M` minus the slits `f^j(g_s)`, `j < N`.
#[derive(Debug, Clone, Serialize)]
pub struct RenormCandidate {
    pub k0: i64,
    #[serde(rename = "M")]
    pub half_width: f64,
    pub critical_point: Complex64,
    pub period: usize,
    pub degree: usize,
    pub preimage_counts: Vec<usize>,
    /// `∂R_M`.
    pub domain: Vec<Complex64>,
    /// `∂E_M`.
    pub codomain: Vec<Complex64>,
    /// `g_s ∩ E_M`, the slit of `V`.
    pub codomain_slit: Vec<Complex64>,
    /// `f^j(g_s) ∩ R_M` for `j < N`.
    pub slits: Vec<Vec<Complex64>>,
    pub exit_time: usize,
    /// Lower bound for the distance from `∂R_M` to `∂E_M`.
    pub margin: f64,
    /// Forward images `f^j(g_s)`, `N <= j < N + 3`, found to meet `R_M`.
    pub later_images_meeting: Vec<usize>,
    /// Iterates of the critical point that stay in `U`, out of `ORBIT_CHECK`.
    pub orbit_stays: usize,
    pub address: Address,
    pub pair_addresses: Vec<Address>,
}

/// Part of `curve` from its start up to its first point outside `region`.
fn clip_inside(curve: &[Complex64], inside: impl Fn(Complex64) -> bool) -> Vec<Complex64> {
    let end = curve.iter().position(|&z| !inside(z)).map_or(curve.len(), |i| i + 1);
    curve[..end].to_vec()
}

/// Builds and certifies the renormalization `f : U_M -> V_M` on the strip
/// `S_{k0}` (by default the strip containing `v`).
pub fn renorm_domain(m: &CosineMap, k0: Option<i64>, half_width: f64, targets: usize) -> Result<RenormCandidate> {
    if !(half_width > 0.0) {
        return Err(Error::InvalidParameter(format!("M = {half_width} must be positive")));
    }
    let rays = EscapeRays::new(m, half_width)?;
    let r = match k0 {
        Some(k) => rays.strip(k, half_width)?,
        None => rays.strip_containing(m.v, half_width)?,
    };
    let (a, _) = ellipse_semi_axes(m.v, half_width);
    let margin = r
        .polygon
        .iter()
        .map(|&z| ellipse_slack(m, a, z))
        .fold(f64::INFINITY, f64::min);
    if !(margin > 0.0) {
        let strip = (r.bbox.min.im - m.u.im, r.bbox.max.im - m.u.im);
        let mut suggested = half_width;
        while rectangle_margin(m, suggested, strip) <= 0.0 && suggested < half_width + 40.0 {
            suggested += 0.25;
        }
        return Err(Error::MTooSmall {
            m: half_width,
            suggested,
        });
    }

    let esc = &rays.escaping;
    let mut exit_time = 0;
    let mut z = -m.v;
    while r.contains(z) {
        exit_time += 1;
        if exit_time > EXIT_BUDGET {
            return Err(Error::Inconsistent("-v never leaves R_M".into()));
        }
        z = m
            .eval(z)
            .map_err(|_| Error::Inconsistent("orbit of -v overflowed inside R_M".into()))?;
    }
    if exit_time > esc.depth {
        return Err(Error::Inconsistent(format!(
            "exit time {exit_time} exceeds the located depth {} of -v",
            esc.depth
        )));
    }
    let t_far = far_potential(m, half_width);
    let window = a + 2.0;
    let mut slits = Vec::with_capacity(exit_time);
    for j in 0..exit_time {
        let tail = if j == 0 { rays.tail.clone() } else { esc.tail(m, j, t_far, window)? };
        slits.push(clip_inside(&tail, |z| r.contains(z)));
    }
    let mut later_images_meeting = Vec::new();
    for j in exit_time..(exit_time + 3).min(esc.depth + 1) {
        let tail = esc.tail(m, j, t_far, window)?;
        if tail.iter().any(|&z| r.contains(z)) {
            later_images_meeting.push(j);
        }
    }
    let slit_index: Vec<SegmentIndex> = slits.iter().map(|s| SegmentIndex::new(s, false)).collect();
    let slit_tol = 1e-9 * (1.0 + a);
    let in_u = |z: Complex64| r.contains(z) && slit_index.iter().all(|ix| ix.distance(z) > slit_tol);

    let codomain = ellipse_curve(m, half_width, 4096);
    let codomain_slit = clip_inside(&rays.tail, |w| ellipse_slack(m, a, w) > 0.0);
    let v_targets = ellipse_targets(m, half_width, &codomain_slit, targets);
    if v_targets.len() < targets {
        return Err(Error::Resolution(format!("only {} targets found in V_M", v_targets.len())));
    }

    let mut degree = None;
    for &w in &v_targets {
        let vals: Vec<Complex64> = r.polygon.iter().map(|&z| m.eval(z).map(|fz| fz - w)).collect::<std::result::Result<_, _>>().map_err(|_| Error::Inconsistent("boundary of R_M escapes".into()))?;
        let d = crate::geometry::winding_around_zero(&vals).round() as i64;
        if *degree.get_or_insert(d) != d {
            return Err(Error::Inconsistent(format!(
                "argument principle gives degrees {} and {d} on R_M",
                degree.unwrap()
            )));
        }
    }
    let degree = degree.unwrap_or(0);
    let (y0, y1) = (r.bbox.min.im, r.bbox.max.im);
    let preimage_counts: Vec<usize> = v_targets
        .iter()
        .map(|&w| m.preimages_between(w, y0, y1).into_iter().filter(|&z| in_u(z)).count())
        .collect();
    if degree != 2 || preimage_counts.iter().any(|&c| c != 2) {
        return Err(Error::Inconsistent(format!(
            "f: U_M -> V_M has argument-principle degree {degree}, preimage counts {:?}",
            preimage_counts
        )));
    }

    let c = r.critical_point;
    let mut orbit_stays = 0;
    let mut z = c;
    for _ in 0..ORBIT_CHECK {
        match m.eval(z) {
            Ok(w) if in_u(w) => {
                orbit_stays += 1;
                z = w;
            }
            _ => break,
        }
    }
    let (lo, hi) = rays.pairs(r.k)?;
    Ok(RenormCandidate {
        k0: r.k,
        half_width,
        critical_point: c,
        period: 1,
        degree: degree as usize,
        preimage_counts,
        domain: r.polygon.clone(),
        codomain,
        codomain_slit,
        slits,
        exit_time,
        margin,
        later_images_meeting,
        orbit_stays,
        address: esc.address.clone(),
        pair_addresses: vec![lo.address_minus, lo.address_plus, hi.address_minus, hi.address_plus],
    })
}

/// Grid points of `E_M` away from its boundary and from the slit.
fn ellipse_targets(m: &CosineMap, half_width: f64, slit: &[Complex64], count: usize) -> Vec<Complex64> {
    let (a, b) = ellipse_semi_axes(m.v, half_width);
    let ix = SegmentIndex::new(slit, false);
    let clearance = 0.02 * b;
    let dir = if m.v.norm() > 0.0 { m.v / m.v.norm() } else { Complex64::new(1.0, 0.0) };
    let mut res = 8usize;
    loop {
        let mut pts = Vec::new();
        for i in 0..res {
            for j in 0..res {
                let x = -a + (i as f64 + 0.5) / res as f64 * 2.0 * a;
                let y = -b + (j as f64 + 0.5) / res as f64 * 2.0 * b;
                let w = dir * Complex64::new(x, y);
                if ellipse_slack(m, a, w) > clearance && ix.distance(w) > clearance {
                    pts.push(w);
                }
            }
        }
        if pts.len() >= count || res >= 512 {
            let stride = (pts.len() / count.max(1)).max(1);
            return pts.into_iter().step_by(stride).take(count).collect();
        }
        res *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::c64;
    use std::f64::consts::PI;

    /// `u = 2`, `v = 1.6`: `v` is attracted to a real fixed point near 1.75
    /// while `f(-v) ≈ 29` escapes along the real axis.
    fn real_example() -> CosineMap {
        CosineMap::from_normal_form(c64(2.0, 0.0), c64(1.6, 0.0)).unwrap()
    }

    #[test]
    fn minus_v_sits_on_the_real_ray() {
        let m = real_example();
        let esc = escaping_value(&m, 30.0).unwrap();
        assert!(esc.gap < 1e-8, "{}", esc.gap);
        assert_eq!(esc.address.entry(0).j, 1);
        assert_eq!(esc.address.entry(1), StripIndex::new(0, 0));
    }

    #[test]
    fn real_pairs_are_horizontal_lines() {
        let m = real_example();
        let rays = EscapeRays::new(&m, 4.0).unwrap();
        for k in [-1, 0] {
            let pair = rays.pair(k).unwrap();
            let y = (2 * k + 1) as f64 * PI;
            for z in pair.curve() {
                assert!((z.im - y).abs() < 1e-9, "{z}");
            }
            assert!(pair.plus.last().unwrap().re > 6.0);
            assert!(pair.minus.last().unwrap().re < -2.0);
            assert_eq!(pair.address_plus.entry(0).j, 0);
            assert_eq!(pair.address_minus.entry(0).j, 1);
        }
    }

    #[test]
    fn pair_is_symmetric_and_periodic() {
        let m = CosineMap::from_normal_form(c64(2.0, 0.3), c64(1.6, 0.2)).unwrap();
        let rays = EscapeRays::new(&m, 4.0).unwrap();
        let p0 = rays.pair(0).unwrap();
        let p1 = rays.pair(1).unwrap();
        let c = p0.critical_point;
        let mirrored: Vec<Complex64> = p0.plus.iter().map(|&z| 2.0 * c - z).collect();
        let ix = SegmentIndex::new(&p0.minus, false);
        let clip = |z: &&Complex64| (**z - m.u).re.abs() < 4.0;
        assert!(mirrored.iter().filter(clip).all(|&z| ix.distance(z) < 1e-7));
        let ix = SegmentIndex::new(&p1.plus, false);
        assert!(p0.plus.iter().filter(clip).all(|&z| ix.distance(z + c64(0.0, TWO_PI)) < 1e-8));
    }

    #[test]
    fn strip_holds_one_critical_point() {
        let m = real_example();
        let rays = EscapeRays::new(&m, 4.0).unwrap();
        let s = rays.strip(-1, 4.0).unwrap();
        assert_eq!(s.critical_points(&m).len(), 1);
        assert!((s.critical_points(&m)[0] - m.u).norm() < 1e-12);
        assert!(s.contains(m.v));
    }

    #[test]
    fn small_m_is_refused() {
        let m = real_example();
        match renorm_domain(&m, Some(-1), 1.0, 10) {
            Err(Error::MTooSmall { suggested, .. }) => assert!(suggested > 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn real_example_renormalizes() {
        let m = real_example();
        let cand = renorm_domain(&m, None, 4.0, 50).unwrap();
        assert_eq!(cand.k0, -1);
        assert_eq!(cand.degree, 2);
        assert_eq!(cand.exit_time, 1);
        assert!(cand.margin > 0.0);
        assert_eq!(cand.orbit_stays, ORBIT_CHECK);
        assert!(cand.later_images_meeting.is_empty());
    }
}
