//! Dynamic rays `g_s`, traced by pulling back asymptotic seeds.
//!
//! A point `g_s(t)` is computed by pushing the potential forward,
//! `t -> F(t) = e^t - 1`, until it is large enough that the asymptotic
//! formula is exact to double precision, and then pulling the seed back
//! through the entries of `s`. At low potential a ray may cross the
//! boundary of its half-strip, so the pullback at each level follows the
//! branch chosen for the previous sample (continuation) and falls back to
//! the strip branch only far out in the strip, where rays cannot cross.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{c64, BranchError, CosineMap, StripIndex, TWO_PI};
use crate::symbolic::Address;

/// Smallest potential at which the asymptotic seed may be used.
pub const T_SEED: f64 = 25.0;

/// Seeds are placed at the first forward potential reaching this value.
pub const SEED_POTENTIAL: f64 = 700.0;

/// Default pullback depth; enough to reach potentials down to about 0.01.
pub const DEFAULT_DEPTH: usize = 300;

/// `F(t) = e^t - 1`.
#[inline]
pub fn potential_forward(t: f64) -> f64 {
    t.exp_m1()
}

/// `F^-1(t) = log(1 + t)`.
#[inline]
pub fn potential_backward(t: f64) -> f64 {
    t.ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    pub t: f64,
    pub z: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandingClass {
    Repelling,
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landing {
    pub point: Complex64,
    pub multiplier: Complex64,
    pub class: LandingClass,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub address: Address,
    /// Ordered by strictly decreasing `t`.
    pub samples: Vec<RaySample>,
    pub t_min: f64,
    pub landing: Option<Landing>,
    /// Number of pullbacks used for each sample.
    pub depths: Vec<usize>,
    /// Steps where continuation could not be resolved and the strip branch
    /// was taken without confirmation.
    pub ambiguous_steps: usize,
}

impl Ray {
    pub fn points(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.z).collect()
    }

    pub fn last(&self) -> Complex64 {
        self.samples.last().expect("rays are never empty").z
    }

    /// Linear interpolation of `g_s` at potential `t` inside the traced range.
    pub fn at(&self, t: f64) -> Option<Complex64> {
        let s = &self.samples;
        let i = s.partition_point(|x| x.t > t);
        if i == 0 {
            return (s.first()?.t == t).then(|| s[0].z);
        }
        if i == s.len() {
            return None;
        }
        let (a, b) = (s[i - 1], s[i]);
        let w = (a.t - t) / (a.t - b.t);
        Some(a.z + (b.z - a.z) * w)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    pub depth: usize,
    /// Largest allowed distance between consecutive samples near `u`.
    pub max_segment: Option<f64>,
    /// Radius around `u` inside which `max_segment` applies.
    pub window: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            depth: DEFAULT_DEPTH,
            max_segment: None,
            window: 50.0,
        }
    }
}

fn seed_entry(m: &CosineMap, e: StripIndex, t: f64) -> Complex64 {
    let lift = c64(0.0, TWO_PI * e.k as f64);
    if e.j == 0 {
        c64(t, 0.0) - m.a.ln() + lift
    } else {
        c64(-t, 0.0) + m.b.ln() + lift
    }
}

/// `t - Log a + 2k i pi` for a first entry `(0, k)`, `-t + Log b + 2k i pi`
/// for `(1, k)`. Accurate to `O(e^-t)` when the second entry lies in the right
/// half-plane; when it lies in the left one, `f(g_s(t))` is near `-e^t` and the
/// ray follows this line shifted by `-πi` (first entry right) or `+πi` (left).
/// Tracing seeds far enough out that the shift is pulled back to nothing.
pub fn asymptotic_seed(m: &CosineMap, s: &Address, t: f64) -> Result<Complex64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("potential {t} must be positive")));
    }
    Ok(seed_entry(m, s.entry(0), t))
}

/// [`asymptotic_seed`] restricted to potentials where the error term is below
/// sample tolerance.
pub fn tracing_seed(m: &CosineMap, s: &Address, t: f64) -> Result<Complex64> {
    if !(t >= T_SEED) {
        return Err(Error::Precondition(format!(
            "seed potential {t} is below {T_SEED}; pull back from a larger potential instead"
        )));
    }
    asymptotic_seed(m, s, t)
}

enum PullError {
    Crash,
    Refine,
    Depth(f64),
}

struct Tracer<'a> {
    m: &'a CosineMap,
    entries: Vec<StripIndex>,
    depth: usize,
    r_safe: f64,
    levels: Vec<Complex64>,
}

impl<'a> Tracer<'a> {
    fn new(m: &'a CosineMap, s: &Address, depth: usize) -> Self {
        let entries: Vec<StripIndex> = (0..=depth).map(|n| s.entry(n)).collect();
        let kmax = entries.iter().map(|e| e.k.unsigned_abs()).max().unwrap_or(0) as f64;
        // Rays with bounded entries meet the slit only at bounded height, so
        // their pullbacks can cross strip boundaries only for |Re(z-u)|
        // below roughly log(2B/|v|).
        let bound = m.v.norm()
            + m.u.norm()
            + TWO_PI * (kmax + 2.0)
            + m.a.ln().norm()
            + m.b.ln().norm();
        let r_safe = (3.0 + (2.0 * bound / m.v.norm()).ln()).max(6.0);
        Tracer {
            m,
            entries,
            depth,
            r_safe,
            levels: Vec::new(),
        }
    }

    fn pull(&self, t: f64, force: bool) -> std::result::Result<Vec<Complex64>, PullError> {
        let mut tau = t;
        let mut n = 0;
        while tau < SEED_POTENTIAL && n < self.depth {
            tau = potential_forward(tau);
            n += 1;
        }
        if tau < T_SEED {
            return Err(PullError::Depth(tau));
        }
        let mut z = vec![Complex64::default(); n + 1];
        z[n] = seed_entry(self.m, self.entries[n], tau);
        for lvl in (0..n).rev() {
            let w = z[lvl + 1];
            let e = self.entries[lvl];
            let strip = self.m.inverse_branch(w, e);
            if let Err(BranchError::NearCritical) = strip {
                return Err(PullError::Crash);
            }
            let prev = self.levels.get(lvl).copied();
            z[lvl] = match prev {
                None => match strip {
                    Ok(s) => s,
                    Err(_) => return Err(PullError::Refine),
                },
                Some(p) => {
                    let (cand, _) = self
                        .m
                        .nearest_preimage(w, p)
                        .map_err(|_| PullError::Crash)?;
                    let step = (cand - p).norm();
                    let sep = self.m.separation(cand).min(self.m.separation(p));
                    if step <= 0.3 * sep {
                        cand
                    } else {
                        match strip {
                            Ok(s) if force || (s - self.m.u).re.abs() > self.r_safe => s,
                            _ => return Err(PullError::Refine),
                        }
                    }
                }
            };
        }
        Ok(z)
    }
}

fn crash(s: &Address, t: f64) -> Error {
    Error::RayCrash {
        address: s.to_string(),
        t,
    }
}

/// Traces `g_s` at the given potentials (strictly decreasing). Extra samples
/// are inserted wherever continuation or `max_segment` needs them.
pub fn trace_ray_at(m: &CosineMap, s: &Address, ts: &[f64], opts: &TraceOptions) -> Result<Ray> {
    if ts.is_empty() {
        return Err(Error::InvalidParameter("empty potential grid".into()));
    }
    if ts.windows(2).any(|w| !(w[1] < w[0])) || !(ts[ts.len() - 1] > 0.0) {
        return Err(Error::InvalidParameter(
            "potentials must be positive and strictly decreasing".into(),
        ));
    }
    let mut tr = Tracer::new(m, s, opts.depth);
    let mut samples = Vec::new();
    let mut depths = Vec::new();
    let mut ambiguous = 0;

    // Anchor the continuation at a potential where every level sits deep in
    // its strip.
    let mut t_cur = ts[0].max(T_SEED);
    let first = tr.pull(t_cur, false).map_err(|e| match e {
        PullError::Crash => crash(s, t_cur),
        PullError::Depth(tau) => Error::InsufficientDepth { t: tau, needed: T_SEED },
        PullError::Refine => Error::SlitBoundary(seed_entry(m, s.entry(0), t_cur)),
    })?;
    tr.levels = first;
    if t_cur == ts[0] {
        samples.push(RaySample { t: t_cur, z: tr.levels[0] });
        depths.push(tr.levels.len() - 1);
    }

    for (i, &target) in ts.iter().enumerate() {
        if i == 0 && t_cur == target {
            continue;
        }
        let record_all = t_cur <= ts[0];
        let mut h = (t_cur - target).min(0.5);
        while t_cur > target {
            let t_try = (t_cur - h).max(target);
            let attempt = tr.pull(t_try, false);
            let accepted = match attempt {
                Ok(z) => {
                    let seg = (z[0] - tr.levels[0]).norm();
                    let near = (z[0] - m.u).norm() < opts.window;
                    match opts.max_segment {
                        Some(ms) if near && seg > ms && h > 1e-9 => None,
                        _ => Some(z),
                    }
                }
                Err(PullError::Crash) => return Err(crash(s, t_try)),
                Err(PullError::Depth(tau)) => {
                    return Err(Error::InsufficientDepth { t: tau, needed: T_SEED })
                }
                Err(PullError::Refine) if h < 1e-10 => {
                    ambiguous += 1;
                    match tr.pull(t_try, true) {
                        Ok(z) => Some(z),
                        Err(_) => return Err(crash(s, t_try)),
                    }
                }
                Err(PullError::Refine) => None,
            };
            match accepted {
                Some(z) => {
                    tr.levels = z;
                    t_cur = t_try;
                    if record_all || t_cur == target {
                        samples.push(RaySample { t: t_cur, z: tr.levels[0] });
                        depths.push(tr.levels.len() - 1);
                    }
                    h = (2.0 * h).min(0.5);
                }
                None => h *= 0.5,
            }
        }
    }
    // Anchor steps above ts[0] are not part of the ray.
    let start = samples.partition_point(|x| x.t > ts[0]);
    samples.drain(..start);
    depths.drain(..start);
    let t_min = samples.last().map_or(ts[0], |x| x.t);
    Ok(Ray {
        address: s.clone(),
        samples,
        t_min,
        landing: None,
        depths,
        ambiguous_steps: ambiguous,
    })
}

/// Potentials from `t_hi` down to `t_lo`: steps of at most 0.25, and at most
/// a tenth of `t` once `t` is small.
pub fn potential_grid(t_lo: f64, t_hi: f64) -> Vec<f64> {
    let mut ts = vec![t_hi];
    let mut t = t_hi;
    while t > t_lo {
        t = (t - (0.1 * t).min(0.25)).max(t_lo);
        if t_lo - t >= 0.0 || (t - t_lo).abs() < 1e-12 {
            t = t_lo;
        }
        ts.push(t);
    }
    ts
}

/// Traces `g_s` on `[t_lo, t_hi]`.
pub fn trace_ray(m: &CosineMap, s: &Address, t_lo: f64, t_hi: f64, depth: usize) -> Result<Ray> {
    if !(t_lo < t_hi) || !(t_lo > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t_lo < t_hi, got {t_lo}, {t_hi}"
        )));
    }
    let opts = TraceOptions {
        depth,
        ..TraceOptions::default()
    };
    trace_ray_at(m, s, &potential_grid(t_lo, t_hi), &opts)
}

/// Potentials `t_0 = 1 > F^-p(t_0) > F^-2p(t_0) > ...` down to `t_end`; the
/// ray samples along this sequence are successive preimages under `f^p`.
fn landing_sequence(p: usize, t_end: f64) -> Vec<f64> {
    let mut out = vec![1.0];
    let mut t: f64 = 1.0;
    while t > t_end {
        for _ in 0..p {
            t = potential_backward(t);
        }
        out.push(t);
    }
    out
}

/// Newton's method on `f^p(z) = z`, damped; returns the root if the
/// residual falls below `1e-10`.
pub fn refine_periodic_point(m: &CosineMap, z0: Complex64, p: usize) -> Option<Complex64> {
    let residual = |z: Complex64| -> Option<(Complex64, Complex64)> {
        let (w, d) = m.iterate_with_deriv(z, p).ok()?;
        Some((w - z, d - 1.0))
    };
    let mut z = z0;
    let (mut g, mut dg) = residual(z)?;
    for _ in 0..50 {
        if g.norm() < 1e-13 * (1.0 + z.norm()) {
            break;
        }
        if dg.norm() == 0.0 {
            return None;
        }
        let step = g / dg;
        let mut lam = 1.0;
        loop {
            let cand = z - step * lam;
            match residual(cand) {
                Some((g2, dg2)) if g2.norm() < g.norm() || lam < 1e-3 => {
                    z = cand;
                    g = g2;
                    dg = dg2;
                    break;
                }
                _ => {
                    lam *= 0.5;
                    if lam < 1e-4 {
                        return None;
                    }
                }
            }
        }
    }
    (g.norm() < 1e-10).then_some(z)
}

/// Repelling if `|λ| > 1 + 1e-6`; parabolic if `λ^q = 1` within `1e-6` for
/// some `q <= 64`; `None` otherwise.
pub fn classify_multiplier(lambda: Complex64) -> Option<LandingClass> {
    if lambda.norm() > 1.0 + 1e-6 {
        return Some(LandingClass::Repelling);
    }
    let mut pow = Complex64::new(1.0, 0.0);
    for _ in 1..=64 {
        pow *= lambda;
        if (pow - 1.0).norm() < 1e-6 {
            return Some(LandingClass::Parabolic);
        }
    }
    None
}

/// Traces a periodic ray down to small potential and determines where it
/// lands. A ray whose samples do not settle gets `landing = None`.
pub fn land_ray(m: &CosineMap, s: &Address) -> Result<Ray> {
    land_ray_with(m, s, 0.02, DEFAULT_DEPTH)
}

pub fn land_ray_with(m: &CosineMap, s: &Address, t_end: f64, depth: usize) -> Result<Ray> {
    if !s.is_periodic() {
        return Err(Error::Precondition(format!(
            "landing needs a periodic address, got {s}"
        )));
    }
    let p = s.period_len();
    let seq = landing_sequence(p, t_end);
    let mut ts: Vec<f64> = potential_grid(1.0, T_SEED);
    ts.pop();
    ts.extend_from_slice(&seq);
    let opts = TraceOptions {
        depth,
        ..TraceOptions::default()
    };
    let mut ray = trace_ray_at(m, s, &ts, &opts)?;
    let along: Vec<Complex64> = seq
        .iter()
        .filter_map(|&t| ray.samples.iter().find(|x| x.t == t).map(|x| x.z))
        .collect();
    let n = along.len();
    if n < 3 {
        return Ok(ray);
    }
    let (z0, z1, z2) = (along[n - 3], along[n - 2], along[n - 1]);
    let d1 = z1 - z0;
    let d2 = z2 - z1;
    let denom = d2 - d1;
    let guess = if denom.norm() > 1e-300 && (d2 * d2 / denom).norm() < 10.0 * d2.norm().max(1e-3) {
        z2 - d2 * d2 / denom
    } else {
        z2
    };
    let Some(point) = refine_periodic_point(m, guess, p) else {
        return Ok(ray);
    };
    if (ray.last() - point).norm() > 1e-4 {
        return Ok(ray);
    }
    let (_, lambda) = m
        .iterate_with_deriv(point, p)
        .map_err(|_| Error::Inconsistent("landing point escapes".into()))?;
    match classify_multiplier(lambda) {
        Some(class) => {
            ray.landing = Some(Landing {
                point,
                multiplier: lambda,
                class,
                period: p,
            });
            Ok(ray)
        }
        None if lambda.norm() < 1.0 - 1e-6 => Err(Error::Inconsistent(format!(
            "ray {s} appears to land at an attracting point {point} (multiplier {lambda})"
        ))),
        None => Ok(ray),
    }
}

/// Pulls a traced ray back along `f`, starting from the preimage of its
/// landing end nearest to `start`; the address gains the first entry read off
/// at the high-potential end. The lifted ray is preperiodic, so it carries no
/// landing record; its endpoint is the chosen preimage of the landing point.
pub fn lift_ray(m: &CosineMap, ray: &Ray, start: Complex64) -> Result<Ray> {
    let mut path: Vec<Complex64> = Vec::with_capacity(ray.samples.len() + 1);
    if let Some(l) = ray.landing {
        path.push(l.point);
    }
    path.extend(ray.samples.iter().rev().map(|x| x.z));
    let lifted = m
        .lift_path(&path, start, false)
        .map_err(|_| crash(&ray.address, ray.t_min))?;
    let offset = usize::from(ray.landing.is_some());
    let samples: Vec<RaySample> = ray
        .samples
        .iter()
        .rev()
        .zip(&lifted[offset..])
        .map(|(x, &z)| RaySample {
            t: potential_backward(x.t),
            z,
        })
        .rev()
        .collect();
    let top = samples[0].z;
    let entry = m
        .strip_index(top)
        .map_err(|_| Error::SlitBoundary(top))?;
    Ok(Ray {
        address: ray.address.prepend(entry),
        t_min: samples.last().map_or(0.0, |x| x.t),
        depths: ray.depths.iter().map(|d| d + 1).collect(),
        samples,
        landing: None,
        ambiguous_steps: ray.ambiguous_steps,
    })
}

/// The two rays landing at preimages of the landing point of `g_s` next to
/// `marker`, one from each family `u ± A + 2πin`.
pub fn preimage_rays(m: &CosineMap, s: &Address, marker: Complex64) -> Result<[Ray; 2]> {
    let ray = land_ray(m, s)?;
    let alpha = ray
        .landing
        .ok_or_else(|| Error::Inconclusive(format!("no landing detected for {s}")))?
        .point;
    let pre = m.preimages_between(alpha, marker.im - 2.0 * TWO_PI, marker.im + 2.0 * TWO_PI);
    let pick = |right: bool| {
        pre.iter()
            .filter(|z| ((*z - m.u).re > 0.0) == right)
            .min_by(|a, b| (*a - marker).norm().total_cmp(&(*b - marker).norm()))
            .copied()
    };
    let (Some(r), Some(l)) = (pick(true), pick(false)) else {
        return Err(Error::Inconclusive("preimages of the landing point not found".into()));
    };
    Ok([lift_ray(m, &ray, r)?, lift_ray(m, &ray, l)?])
}

/// Addresses `((0,k'), s)` and `((1,k''), s)` of the rays landing at the
/// preimages of the landing point of `g_s` next to `marker`.
pub fn preimage_ray_addresses(
    m: &CosineMap,
    s: &Address,
    marker: Complex64,
) -> Result<(Address, Address)> {
    let [a, b] = preimage_rays(m, s, marker)?;
    if a.address.entry(0).j == 0 {
        Ok((a.address, b.address))
    } else {
        Ok((b.address, a.address))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(s: &str) -> Address {
        s.parse().unwrap()
    }

    #[test]
    fn seed_examples() {
        let cosh = CosineMap::cosh_map();
        let ln2 = std::f64::consts::LN_2;
        let z = asymptotic_seed(&cosh, &addr("[];[(0,0)]"), 20.0).unwrap();
        assert!((z - c64(20.0 + ln2, 0.0)).norm() < 1e-14);
        let z = asymptotic_seed(&cosh, &addr("[];[(1,0)]"), 20.0).unwrap();
        assert!((z - c64(-20.0 - ln2, 0.0)).norm() < 1e-14);
        let m = CosineMap::from_coefficients(c64(1.0, 0.0), c64(1.0, 0.0)).unwrap();
        let z = asymptotic_seed(&m, &addr("[];[(0,3)]"), 15.0).unwrap();
        assert!((z - c64(15.0, 6.0 * std::f64::consts::PI)).norm() < 1e-14);
    }

    #[test]
    fn tracing_seed_refuses_low_potential() {
        let cosh = CosineMap::cosh_map();
        assert!(matches!(
            tracing_seed(&cosh, &addr("[];[(0,0)]"), 10.0),
            Err(Error::Precondition(_))
        ));
        assert!(tracing_seed(&cosh, &addr("[];[(0,0)]"), 30.0).is_ok());
    }

    #[test]
    fn real_ray_of_cosh() {
        let m = CosineMap::cosh_map();
        let ray = trace_ray(&m, &addr("[];[(0,0)]"), 1.0, 10.0, DEFAULT_DEPTH).unwrap();
        for x in &ray.samples {
            assert!(x.z.im.abs() < 1e-6);
            assert!(x.z.re > 0.0);
        }
        assert!(ray.samples.windows(2).all(|w| w[1].t < w[0].t));
    }

    #[test]
    fn depth_limit_is_reported() {
        let m = CosineMap::cosh_map();
        let r = trace_ray(&m, &addr("[];[(0,0)]"), 0.5, 2.0, 2);
        assert!(matches!(r, Err(Error::InsufficientDepth { .. })));
    }

    #[test]
    fn real_landing_matches_newton() {
        let m = CosineMap::from_normal_form(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap();
        let ray = land_ray(&m, &addr("[];[(0,0)]")).unwrap();
        let l = ray.landing.expect("lands");
        let mut x: f64 = 2.0;
        for _ in 0..50 {
            x -= (0.5 * x.cosh() - x) / (0.5 * x.sinh() - 1.0);
        }
        assert!((l.point - c64(x, 0.0)).norm() < 1e-9);
        assert!((l.multiplier - c64(0.5 * x.sinh(), 0.0)).norm() < 1e-8);
        assert_eq!(l.class, LandingClass::Repelling);
    }

    #[test]
    fn first_entry_shift_translates() {
        let m = CosineMap::from_coefficients(c64(0.3, 0.2), c64(0.5, -0.1)).unwrap();
        let a = trace_ray(&m, &addr("[(0,0)];[(1,1) (0,0)]"), 0.5, 8.0, DEFAULT_DEPTH).unwrap();
        let b = trace_ray(&m, &addr("[(0,1)];[(1,1) (0,0)]"), 0.5, 8.0, DEFAULT_DEPTH).unwrap();
        for x in &a.samples {
            let y = b.at(x.t).unwrap();
            if b.samples.iter().any(|q| q.t == x.t) {
                assert!((y - x.z - c64(0.0, TWO_PI)).norm() < 1e-9, "t={}", x.t);
            }
        }
    }

    #[test]
    fn functional_equation_holds() {
        let m = CosineMap::from_coefficients(c64(0.3, 0.2), c64(0.5, -0.1)).unwrap();
        let s = addr("[];[(0,1) (1,-1)]");
        let ts: Vec<f64> = (0..40).map(|i| 6.0 - 0.15 * i as f64).collect();
        let fts: Vec<f64> = ts.iter().map(|&t| potential_forward(t)).collect();
        let opts = TraceOptions::default();
        let g = trace_ray_at(&m, &s, &ts, &opts).unwrap();
        let h = trace_ray_at(&m, &s.shift(), &fts, &opts).unwrap();
        for (t, ft) in ts.iter().zip(&fts) {
            let z = g.samples.iter().find(|x| x.t == *t).unwrap().z;
            let w = h.samples.iter().find(|x| x.t == *ft).unwrap().z;
            assert!((m.eval(z).unwrap() - w).norm() < 1e-8);
        }
    }

    #[test]
    fn preimage_rays_enter_both_half_planes() {
        let m = CosineMap::from_normal_form(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap();
        let s = addr("[];[(0,0)]");
        let (r, l) = preimage_ray_addresses(&m, &s, c64(0.0, 0.3)).unwrap();
        assert_eq!(r.entry(0).j, 0);
        assert_eq!(l.entry(0).j, 1);
        assert_eq!(r.shift(), s);
        assert_eq!(l.shift(), s);
    }

    #[test]
    fn multiplier_classes() {
        assert_eq!(classify_multiplier(c64(2.0, 0.0)), Some(LandingClass::Repelling));
        assert_eq!(classify_multiplier(c64(-1.0, 0.0)), Some(LandingClass::Parabolic));
        assert_eq!(classify_multiplier(c64(0.5, 0.0)), None);
    }
}
