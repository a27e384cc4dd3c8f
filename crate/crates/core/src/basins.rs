//! Critical orbits, attracting cycles, and the internal rays and
//! equipotentials of an attracting basin.
//!
//! Near the cycle the basin is linearized by a Koenigs chart
//! (`φ∘f^m = λφ`) or, when the cycle is superattracting, a Böttcher chart
//! (`φ∘f^m = φ²`). Curves that leave the chart disk are obtained by pulling
//! back their image curves through `f^m`, one level per return, with the
//! branch chosen by continuation from the previous sample.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self_crossings, winding_number};
use crate::map::{c64, CosineMap};
use crate::rays::refine_periodic_point;

/// Escape is certified once `|Re f^n|` exceeds this and keeps increasing.
pub const ESCAPE_RE_MIN: f64 = 50.0;

/// Cycles with `|λ| >= 1 - NEUTRAL_BAND` are not called attracting.
pub const NEUTRAL_BAND: f64 = 1e-3;

/// Below this multiplier modulus the Böttcher chart is used.
pub const SUPERATTRACTING: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalValue {
    Plus,
    Minus,
}

impl CriticalValue {
    pub fn value(self, m: &CosineMap) -> Complex64 {
        match self {
            CriticalValue::Plus => m.v,
            CriticalValue::Minus => -m.v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitKind {
    Escaping,
    Attracted,
    BoundedUnresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeCertificate {
    pub index: usize,
    pub re: f64,
    /// The orbit overflowed before the growth test completed.
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub kind: OrbitKind,
    pub cycle: Option<Vec<Complex64>>,
    pub multiplier: Option<Complex64>,
    pub escape_certificate: Option<EscapeCertificate>,
    pub orbit: Vec<Complex64>,
}

/// `f^p` orbit of `z` with `(f^p)'`.
pub fn cycle_of(m: &CosineMap, z: Complex64, p: usize) -> Result<(Vec<Complex64>, Complex64)> {
    let mut cyc = Vec::with_capacity(p);
    let mut w = z;
    let mut d = c64(1.0, 0.0);
    for _ in 0..p {
        cyc.push(w);
        let (fw, dw) = m
            .eval_with_deriv(w)
            .map_err(|_| Error::Inconclusive("cycle point escapes".into()))?;
        d *= dw;
        w = fw;
    }
    Ok((cyc, d))
}

/// Newton's method on `f^p(z) = z` from `seed`; returns the cycle (reduced to
/// its exact period) and its multiplier.
pub fn find_cycle(m: &CosineMap, seed: Complex64, p: usize) -> Result<(Vec<Complex64>, Complex64)> {
    if p == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    let z = refine_periodic_point(m, seed, p)
        .ok_or_else(|| Error::Inconclusive(format!("no period-{p} point found near {seed}")))?;
    let exact = (1..=p)
        .filter(|d| p.is_multiple_of(*d))
        .find(|&d| {
            m.iterate(z, d)
                .map(|w| (w - z).norm() < 1e-9 * (1.0 + z.norm()))
                .unwrap_or(false)
        })
        .unwrap_or(p);
    cycle_of(m, z, exact)
}

/// Follows the orbit of `±v` for up to `max_iter` steps.
pub fn classify_critical_orbit(m: &CosineMap, which: CriticalValue, max_iter: usize) -> OrbitClass {
    classify_orbit(m, which.value(m), max_iter)
}

pub fn classify_orbit(m: &CosineMap, z0: Complex64, max_iter: usize) -> OrbitClass {
    let mut orbit = vec![z0];
    let mut z = z0;
    let mut rising = 0;
    for n in 1..=max_iter.max(1) {
        let next = match m.eval(z) {
            Ok(w) => w,
            Err(e) => {
                return OrbitClass {
                    kind: OrbitKind::Escaping,
                    cycle: None,
                    multiplier: None,
                    escape_certificate: Some(EscapeCertificate {
                        index: n,
                        re: e.re.abs(),
                        saturated: true,
                    }),
                    orbit,
                }
            }
        };
        if next.re.abs() > ESCAPE_RE_MIN && next.re.abs() > z.re.abs() {
            rising += 1;
        } else {
            rising = 0;
        }
        orbit.push(next);
        z = next;
        if rising >= 3 {
            return OrbitClass {
                kind: OrbitKind::Escaping,
                cycle: None,
                multiplier: None,
                escape_certificate: Some(EscapeCertificate {
                    index: n,
                    re: next.re.abs(),
                    saturated: false,
                }),
                orbit,
            };
        }
    }
    let unresolved = |orbit: Vec<Complex64>, cycle, multiplier| OrbitClass {
        kind: OrbitKind::BoundedUnresolved,
        cycle,
        multiplier,
        escape_certificate: None,
        orbit,
    };
    let n = orbit.len() - 1;
    let last = orbit[n];
    for p in 1..=64usize.min(n) {
        if (last - orbit[n - p]).norm() > 1e-6 * (1.0 + last.norm()) {
            continue;
        }
        let Ok((cycle, lambda)) = find_cycle(m, last, p) else {
            continue;
        };
        let near = cycle.iter().any(|c| (c - last).norm() < 1e-3);
        if near && lambda.norm() < 1.0 - NEUTRAL_BAND {
            return OrbitClass {
                kind: OrbitKind::Attracted,
                cycle: Some(cycle),
                multiplier: Some(lambda),
                escape_certificate: None,
                orbit,
            };
        }
        return unresolved(orbit, Some(cycle), Some(lambda));
    }
    unresolved(orbit, None, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartMode {
    Koenigs,
    Boettcher,
}

/// Linearizing chart of `f^m` at an attracting cycle point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinChart {
    pub map: CosineMap,
    /// The cycle, starting at the chart centre.
    pub cycle: Vec<Complex64>,
    pub z_a: Complex64,
    pub period: usize,
    pub multiplier: Complex64,
    /// Chart disk radius in the linearizing coordinate.
    pub radius: f64,
    pub mode: ChartMode,
    /// Leading coefficient: `f^m(z_a + h) = z_a + c2 h² + ...`.
    c2: Complex64,
    /// Index `k` of the critical point `u_k` at the centre (Böttcher mode).
    crit_k: i64,
}

/// Deviation from `w_{n+1} = w_n²` below which the Böttcher product stops.
const PRODUCT_TOL: f64 = 1e-17;

impl BasinChart {
    /// Chart at the cycle through `cycle_point` (exact period is detected).
    pub fn new(m: &CosineMap, cycle_point: Complex64, period: usize) -> Result<Self> {
        let (cycle, lambda) = find_cycle(m, cycle_point, period)?;
        if lambda.norm() >= 1.0 - NEUTRAL_BAND {
            return Err(Error::Precondition(format!(
                "cycle multiplier {lambda} is not attracting"
            )));
        }
        let p = cycle.len();
        let (mode, z_a, cycle, c2, crit_k) = if lambda.norm() < SUPERATTRACTING {
            // Centre on the critical point in the cycle.
            let (idx, crit, k) = cycle
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    let k = ((z - m.u).im / PI).round() as i64;
                    (i, m.critical_point(k), k)
                })
                .min_by(|a, b| {
                    (cycle[a.0] - a.1)
                        .norm()
                        .total_cmp(&(cycle[b.0] - b.1).norm())
                })
                .expect("cycle is nonempty");
            if (cycle[idx] - crit).norm() > 1e-6 {
                return Err(Error::Inconclusive(
                    "superattracting cycle without a critical point".into(),
                ));
            }
            let (cyc, _) = cycle_of(m, crit, p)?;
            // f''(c) = f(c) for this family.
            let fc = m.eval(crit).expect("critical value is finite");
            let (_, d) = m
                .iterate_with_deriv(fc, p - 1)
                .map_err(|_| Error::Inconsistent("cycle escapes".into()))?;
            (ChartMode::Boettcher, crit, cyc, d * fc * 0.5, k)
        } else {
            let z = cycle[0];
            (ChartMode::Koenigs, z, cycle, c64(0.0, 0.0), 0)
        };
        let mut chart = BasinChart {
            map: *m,
            cycle,
            z_a,
            period: p,
            multiplier: lambda,
            radius: 0.0,
            mode,
            c2,
            crit_k,
        };
        chart.radius = chart.find_radius()?;
        Ok(chart)
    }

    /// `f^m(z_a + h) - z_a`, accurate for tiny `h`.
    fn return_increment(&self, h: Complex64) -> Complex64 {
        let mut h = h;
        for (i, c) in self.cycle.iter().enumerate() {
            h = match (i, self.mode) {
                (0, ChartMode::Boettcher) => self.map.critical_increment(self.crit_k, h),
                _ => self.map.increment(*c, h),
            };
        }
        h
    }

    pub fn return_map(&self, z: Complex64) -> Result<Complex64> {
        self.map
            .iterate(z, self.period)
            .map_err(|_| Error::Inconclusive(format!("{z} escapes under the return map")))
    }

    /// The linearizing coordinate of `z`, if its orbit converges to `z_a`.
    pub fn phi(&self, z: Complex64) -> Option<Complex64> {
        let mut h = z - self.z_a;
        match self.mode {
            ChartMode::Koenigs => {
                let mut scale = c64(1.0, 0.0);
                for _ in 0..5000 {
                    if h.norm() < 1e-17 {
                        return Some(h / scale);
                    }
                    if !(h.norm() < 1e3) {
                        return None;
                    }
                    h = self.return_increment(h);
                    scale *= self.multiplier;
                    if scale.norm() < 1e-250 {
                        return Some(h / scale);
                    }
                }
                None
            }
            ChartMode::Boettcher => {
                let mut w = self.c2 * h;
                if w.norm() == 0.0 {
                    return Some(w);
                }
                let mut acc = w;
                let mut expo = 0.5;
                for _ in 0..200 {
                    if !(w.norm() < 1e3) {
                        return None;
                    }
                    let w_next = self.c2 * self.return_increment(w / self.c2);
                    if w_next.norm() < 1e-150 {
                        return Some(acc);
                    }
                    let ratio = w_next / w / w;
                    if !ratio.re.is_finite() {
                        return None;
                    }
                    acc *= ratio.powf(expo);
                    if (ratio - 1.0).norm() < PRODUCT_TOL {
                        return Some(acc);
                    }
                    expo *= 0.5;
                    w = w_next;
                }
                None
            }
        }
    }

    /// Initial guess for the inverse chart near the centre.
    fn linear_guess(&self, zeta: Complex64) -> Complex64 {
        match self.mode {
            ChartMode::Koenigs => self.z_a + zeta,
            ChartMode::Boettcher => self.z_a + zeta / self.c2,
        }
    }

    /// Solves `φ(z) = ζ` by Newton's method with a difference quotient.
    pub fn phi_inv(&self, zeta: Complex64, guess: Option<Complex64>) -> Option<Complex64> {
        let mut z = guess.unwrap_or_else(|| self.linear_guess(zeta));
        for _ in 0..60 {
            let f0 = self.phi(z)? - zeta;
            if f0.norm() < 1e-13 * (1.0 + zeta.norm()) {
                return Some(z);
            }
            let h = 1e-7 * (1.0 + (z - self.z_a).norm());
            let d = (self.phi(z + h)? - self.phi(z - h)?) / (2.0 * h);
            if d.norm() == 0.0 {
                return None;
            }
            let mut step = f0 / d;
            let lim = 0.25 * (z - self.z_a).norm().max(1e-3);
            if step.norm() > lim {
                step *= lim / step.norm();
            }
            z -= step;
        }
        let f0 = self.phi(z)? - zeta;
        (f0.norm() < 1e-11).then_some(z)
    }

    /// Image radius under the return map.
    fn image_radius(&self, r: f64) -> f64 {
        match self.mode {
            ChartMode::Koenigs => self.multiplier.norm() * r,
            ChartMode::Boettcher => r * r,
        }
    }

    fn image_angle(&self, theta: f64) -> f64 {
        match self.mode {
            ChartMode::Koenigs => (theta + self.multiplier.arg() / TAU).rem_euclid(1.0),
            ChartMode::Boettcher => (2.0 * theta).rem_euclid(1.0),
        }
    }

    /// Largest radius among `0.5 * 0.8^i` whose circle inverts to a simple
    /// curve around `z_a` with small conjugacy residual.
    fn find_radius(&self) -> Result<f64> {
        let mut r = match self.mode {
            ChartMode::Boettcher => 0.5,
            ChartMode::Koenigs => 0.5 * self.scale_hint(),
        };
        for _ in 0..40 {
            if self.circle_ok(r) {
                return Ok(r);
            }
            r *= 0.8;
        }
        Err(Error::Inconclusive("no valid chart radius found".into()))
    }

    /// Distance from `z_a` to the nearest other cycle or critical point; a
    /// rough size for Koenigs coordinates.
    fn scale_hint(&self) -> f64 {
        let k = ((self.z_a - self.map.u).im / PI).round() as i64;
        let mut d = f64::INFINITY;
        for j in k - 2..=k + 2 {
            let c = self.map.critical_point(j);
            let dist = (c - self.z_a).norm();
            if dist > 1e-9 {
                d = d.min(dist);
            }
        }
        d.min(1.0)
    }

    fn circle_ok(&self, r: f64) -> bool {
        let n = 96;
        let mut pts = Vec::with_capacity(n);
        let mut guess = None;
        for i in 0..=n {
            let zeta = Complex64::from_polar(r, TAU * i as f64 / n as f64);
            let Some(z) = self.phi_inv(zeta, guess) else {
                return false;
            };
            guess = Some(z);
            if i < n {
                pts.push(z);
            } else if (z - pts[0]).norm() > 1e-9 {
                return false;
            }
        }
        if winding_number(&pts, self.z_a) != 1 || self_crossings(&pts) > 0 {
            return false;
        }
        pts.iter().all(|&z| self.residual_at(z).is_some_and(|e| e < 1e-9))
    }

    fn residual_at(&self, z: Complex64) -> Option<f64> {
        let p = self.phi(z)?;
        let fz = self.return_map(z).ok()?;
        let q = self.phi(fz)?;
        Some(match self.mode {
            ChartMode::Koenigs => (q - self.multiplier * p).norm(),
            ChartMode::Boettcher => (q - p * p).norm(),
        })
    }

    /// Largest conjugacy residual on the chart circle.
    pub fn conjugacy_residual(&self) -> f64 {
        (0..64)
            .filter_map(|i| {
                let zeta = Complex64::from_polar(self.radius, TAU * i as f64 / 64.0);
                self.phi_inv(zeta, None).and_then(|z| self.residual_at(z))
            })
            .fold(0.0, f64::max)
    }

    /// Number of returns before radius `rho` enters the chart disk.
    fn levels_for(&self, rho: f64) -> usize {
        let mut r = rho;
        let mut n = 0;
        while r > self.radius * 0.999 && n < 200 {
            r = self.image_radius(r);
            n += 1;
        }
        n
    }

    /// Point with coordinates `(θ, ρ)` and, below it, the return-orbit chains
    /// of all levels, continued from `prev`.
    fn tower(&self, theta: f64, rho: f64, prev: Option<&Tower>) -> std::result::Result<Tower, Step> {
        let n = self.levels_for(rho);
        let mut angles = vec![theta];
        let mut radii = vec![rho];
        for _ in 0..n {
            angles.push(self.image_angle(*angles.last().unwrap()));
            radii.push(self.image_radius(*radii.last().unwrap()));
        }
        let zeta = Complex64::from_polar(radii[n], TAU * angles[n]);
        let prev_top = prev.and_then(|p| p.point(n));
        if let Some(pz) = prev_top {
            let pzeta = self.phi(pz).ok_or(Step::Refine)?;
            if (pzeta - zeta).norm() > 0.05 * self.radius {
                return Err(Step::Refine);
            }
        }
        let top = self.phi_inv(zeta, prev_top).ok_or(Step::Refine)?;
        let mut chains: Vec<Vec<Complex64>> = vec![Vec::new(); n + 1];
        chains[n] = self.forward_chain(top).map_err(|_| Step::Refine)?;
        for lvl in (0..n).rev() {
            let target = chains[lvl + 1][0];
            let mut chain = vec![Complex64::default(); self.period];
            let fresh;
            let prev_chain: &[Complex64] = match prev.and_then(|p| p.chains.get(lvl)) {
                Some(c) if !c.is_empty() => c,
                _ => {
                    // A level without history: the old top, computed in the chart.
                    let old = prev
                        .and_then(|p| p.point(lvl))
                        .ok_or(Step::Refine)?;
                    fresh = self.forward_chain(old).map_err(|_| Step::Refine)?;
                    &fresh
                }
            };
            let mut w = target;
            for j in (0..self.period).rev() {
                let reference = prev_chain[j];
                let (cand, _) = self
                    .map
                    .nearest_preimage(w, reference)
                    .map_err(|_| Step::Obstruction(w))?;
                let step = (cand - reference).norm();
                let sep = self.map.separation(cand).min(self.map.separation(reference));
                if sep < 1e-9 {
                    return Err(Step::Obstruction(cand));
                }
                if step > 0.3 * sep {
                    return Err(Step::Refine);
                }
                chain[j] = cand;
                w = cand;
            }
            chains[lvl] = chain;
        }
        Ok(Tower { chains })
    }

    fn forward_chain(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.period);
        let mut w = z;
        for _ in 0..self.period {
            out.push(w);
            w = self
                .map
                .eval(w)
                .map_err(|_| Error::Inconclusive("basin point escapes".into()))?;
        }
        Ok(out)
    }

    /// Walks `(θ, ρ)` linearly from `from` to `to`, starting from `tower`,
    /// refining steps as needed; returns level-0 points at every accepted
    /// step (the final one is the endpoint).
    fn walk(
        &self,
        tower: &mut Tower,
        from: (f64, f64),
        to: (f64, f64),
        record: &mut Vec<Complex64>,
    ) -> Result<()> {
        let mut s: f64 = 0.0;
        let mut h: f64 = 1.0;
        while s < 1.0 {
            let s1 = (s + h).min(1.0);
            let theta = from.0 + (to.0 - from.0) * s1;
            let rho = from.1 + (to.1 - from.1) * s1;
            match self.tower(theta, rho, Some(tower)) {
                Ok(t) => {
                    *tower = t;
                    s = s1;
                    record.push(tower.chains[0][0]);
                    h = (h * 2.0).min(1.0);
                }
                Err(Step::Obstruction(z)) => return Err(Error::NearCritical(z)),
                Err(Step::Refine) => {
                    h *= 0.5;
                    if h < 1e-12 {
                        return Err(Error::Inconclusive(format!(
                            "curve pullback stalled at angle {theta}, radius {rho}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn start_tower(&self, theta: f64) -> Result<(Tower, f64)> {
        let rho0 = 0.5 * self.radius;
        let zeta = Complex64::from_polar(rho0, TAU * theta);
        let z = self
            .phi_inv(zeta, None)
            .ok_or_else(|| Error::Inconclusive("chart inversion failed".into()))?;
        Ok((
            Tower {
                chains: vec![self.forward_chain(z)?],
            },
            rho0,
        ))
    }

    /// Internal ray of angle `θ` sampled at the given radii (increasing, in
    /// `(0, 1)` for Böttcher charts).
    pub fn internal_ray_at(&self, theta: f64, radii: &[f64]) -> Result<Vec<Complex64>> {
        let (mut tower, mut rho) = self.start_tower(theta)?;
        let mut out = Vec::with_capacity(radii.len());
        let mut scratch = Vec::new();
        for &r in radii {
            if r <= rho {
                let zeta = Complex64::from_polar(r, TAU * theta);
                let z = self
                    .phi_inv(zeta, None)
                    .ok_or_else(|| Error::Inconclusive("chart inversion failed".into()))?;
                out.push(z);
                continue;
            }
            scratch.clear();
            self.walk(&mut tower, (theta, rho), (theta, r), &mut scratch)?;
            rho = r;
            out.push(tower.chains[0][0]);
        }
        Ok(out)
    }

    /// Internal ray of angle `θ` from `z_a` out to radius `rho_max`, as a
    /// polyline with `n` radii log-spaced in `-ln ρ` (Böttcher) or linearly
    /// spaced (Koenigs), densified where the pullback needed extra steps.
    pub fn internal_ray(&self, theta: f64, rho_max: f64, n: usize) -> Result<Vec<Complex64>> {
        let radii = self.ray_radii(rho_max, n);
        let (mut tower, rho0) = self.start_tower(theta)?;
        let mut out = vec![self.z_a];
        let mut rho = 0.0;
        for &r in &radii {
            if r <= rho0 {
                let zeta = Complex64::from_polar(r, TAU * theta);
                out.push(
                    self.phi_inv(zeta, None)
                        .ok_or_else(|| Error::Inconclusive("chart inversion failed".into()))?,
                );
                rho = r;
                continue;
            }
            let from = rho.max(rho0);
            self.walk(&mut tower, (theta, from), (theta, r), &mut out)?;
            rho = r;
        }
        Ok(out)
    }

    fn ray_radii(&self, rho_max: f64, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let lo = 0.05 * self.radius;
        match self.mode {
            ChartMode::Boettcher => {
                let (a, b) = ((-lo.ln()).ln(), (-rho_max.ln()).ln());
                (0..n)
                    .map(|i| (-(a + (b - a) * i as f64 / (n - 1) as f64).exp()).exp())
                    .collect()
            }
            ChartMode::Koenigs => (0..n)
                .map(|i| lo + (rho_max - lo) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    /// Closed equipotential at `level`, starting at angle `theta0`. Every
    /// accepted pullback step contributes a vertex.
    pub fn equipotential_from(&self, level: f64, theta0: f64, min_points: usize) -> Result<Vec<Complex64>> {
        let (mut tower, rho0) = self.start_tower(theta0)?;
        let mut scratch = Vec::new();
        if level > rho0 {
            self.walk(&mut tower, (theta0, rho0), (theta0, level), &mut scratch)?;
        } else {
            let z = self
                .phi_inv(Complex64::from_polar(level, TAU * theta0), None)
                .ok_or_else(|| Error::Inconclusive("chart inversion failed".into()))?;
            tower = Tower {
                chains: vec![self.forward_chain(z)?],
            };
        }
        let mut out = vec![tower.chains[0][0]];
        let k = min_points.max(16);
        for i in 0..k {
            let a = theta0 + i as f64 / k as f64;
            let b = theta0 + (i + 1) as f64 / k as f64;
            self.walk(&mut tower, (a, level), (b, level), &mut out)?;
        }
        let end = out.pop().expect("walk records points");
        if (end - out[0]).norm() > 1e-7 {
            return Err(Error::Inconsistent(format!(
                "equipotential {level} failed to close (gap {:.2e})",
                (end - out[0]).norm()
            )));
        }
        Ok(out)
    }

    pub fn equipotential(&self, level: f64, min_points: usize) -> Result<Vec<Complex64>> {
        self.equipotential_from(level, 0.0, min_points)
    }

    /// Period of `θ` under the angle map of the chart, if any up to 64.
    pub fn angle_period(&self, theta: f64) -> Option<usize> {
        let mut a = theta;
        for p in 1..=64 {
            a = self.image_angle(a);
            let d = (a - theta).rem_euclid(1.0);
            if d.min(1.0 - d) < 1e-12 {
                return Some(p);
            }
        }
        None
    }

    /// Internal ray of a periodic angle out to `rho_max`, completed by its
    /// landing point (a periodic point of `f` found by Newton from the end of
    /// the ray).
    pub fn landed_internal_ray(&self, theta: f64, rho_max: f64, n: usize) -> Result<(Vec<Complex64>, Complex64)> {
        let q = self
            .angle_period(theta)
            .ok_or_else(|| Error::Precondition(format!("angle {theta} is not periodic")))?;
        let mut pts = self.internal_ray(theta, rho_max, n)?;
        let end = *pts.last().unwrap();
        let p = q * self.period;
        let land = refine_periodic_point(&self.map, end, p)
            .ok_or_else(|| Error::Inconclusive("internal ray landing not found".into()))?;
        if (land - end).norm() > 0.05 {
            return Err(Error::Inconclusive(format!(
                "internal ray ends {:.2e} away from the nearest periodic point",
                (land - end).norm()
            )));
        }
        pts.push(land);
        Ok((pts, land))
    }
}

#[derive(Debug, Clone)]
struct Tower {
    /// `chains[n]` is the return orbit of the level-`n` point.
    chains: Vec<Vec<Complex64>>,
}

impl Tower {
    fn point(&self, n: usize) -> Option<Complex64> {
        self.chains.get(n).and_then(|c| c.first().copied())
    }
}

enum Step {
    Refine,
    Obstruction(Complex64),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::winding_number;

    fn half_cosh() -> CosineMap {
        CosineMap::from_normal_form(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap()
    }

    #[test]
    fn classification_examples() {
        let c = classify_critical_orbit(&half_cosh(), CriticalValue::Plus, 500);
        assert_eq!(c.kind, OrbitKind::Attracted);
        let x = c.cycle.unwrap()[0];
        assert!((0.5 * x.cosh() - x).norm() < 1e-10);
        assert!((x.re - 0.589).abs() < 1e-2);
        let c = classify_critical_orbit(&CosineMap::cosh_map(), CriticalValue::Plus, 500);
        assert_eq!(c.kind, OrbitKind::Escaping);
        let cert = c.escape_certificate.unwrap();
        assert!(cert.re > ESCAPE_RE_MIN || cert.saturated);
    }

    fn parabolic_v() -> f64 {
        let mut x: f64 = 1.2;
        for _ in 0..50 {
            let g = x.tanh() - 1.0 / x;
            let dg = 1.0 / x.cosh().powi(2) + 1.0 / (x * x);
            x -= g / dg;
        }
        1.0 / x.sinh()
    }

    #[test]
    fn parabolic_parameter_stays_unresolved() {
        let v = parabolic_v();
        for dv in [0.0, -1e-9, -1e-7] {
            let m = CosineMap::from_normal_form(c64(0.0, 0.0), c64(v + dv, 0.0)).unwrap();
            let c = classify_critical_orbit(&m, CriticalValue::Plus, 5000);
            assert_eq!(c.kind, OrbitKind::BoundedUnresolved, "dv = {dv}");
        }
    }

    #[test]
    fn escaping_is_stable_under_more_iterations() {
        let m = CosineMap::cosh_map();
        let a = classify_critical_orbit(&m, CriticalValue::Plus, 50);
        let b = classify_critical_orbit(&m, CriticalValue::Plus, 5000);
        assert_eq!(a.kind, OrbitKind::Escaping);
        assert_eq!(a.escape_certificate, b.escape_certificate);
    }

    #[test]
    fn cycle_examples() {
        let m = half_cosh();
        let (cyc, lambda) = find_cycle(&m, c64(0.6, 0.0), 1).unwrap();
        assert!((m.eval(cyc[0]).unwrap() - cyc[0]).norm() < 1e-10);
        let h = 1e-5;
        let fd = (m.eval(cyc[0] + h).unwrap() - m.eval(cyc[0] - h).unwrap()) / (2.0 * h);
        assert!((fd - lambda).norm() < 1e-6);
        // Period 2 request on a fixed point reduces to period 1.
        let (cyc2, _) = find_cycle(&m, c64(0.6, 0.0), 2).unwrap();
        assert_eq!(cyc2.len(), 1);
        let (r, lr) = find_cycle(&m, c64(2.1, 0.0), 1).unwrap();
        assert!(r[0].im.abs() < 1e-12 && lr.norm() > 1.0);
    }

    #[test]
    fn koenigs_chart_conjugates() {
        let m = half_cosh();
        let (cyc, _) = find_cycle(&m, c64(0.6, 0.0), 1).unwrap();
        let chart = BasinChart::new(&m, cyc[0], 1).unwrap();
        assert_eq!(chart.mode, ChartMode::Koenigs);
        assert!(chart.conjugacy_residual() < 1e-9);
        let e = chart.equipotential(0.5 * chart.radius, 64).unwrap();
        assert_eq!(winding_number(&e, chart.z_a), 1);
    }

    fn real_superattracting() -> BasinChart {
        let m = CosineMap::from_normal_form(c64(1.0, 0.0), c64(1.0, 0.0)).unwrap();
        BasinChart::new(&m, c64(1.0, 0.0), 1).unwrap()
    }

    #[test]
    fn boettcher_chart_conjugates() {
        let chart = real_superattracting();
        assert_eq!(chart.mode, ChartMode::Boettcher);
        assert!(chart.conjugacy_residual() < 1e-9);
        assert!(chart.radius > 0.05);
    }

    #[test]
    fn zero_ray_is_real() {
        let chart = real_superattracting();
        let ray = chart.internal_ray(0.0, 0.99, 40).unwrap();
        for z in &ray {
            assert!(z.im.abs() < 1e-9, "{z}");
        }
        assert!(ray.last().unwrap().re > 2.0);
    }

    #[test]
    fn return_map_doubles_angles() {
        let chart = real_superattracting();
        let radii: Vec<f64> = (0..20).map(|i| 0.3 + 0.034 * i as f64).collect();
        let sq: Vec<f64> = radii.iter().map(|r| r * r).collect();
        let theta = 0.3;
        let ray = chart.internal_ray_at(theta, &radii).unwrap();
        let image = chart.internal_ray_at(2.0 * theta, &sq).unwrap();
        for (z, w) in ray.iter().zip(&image) {
            assert!((chart.return_map(*z).unwrap() - w).norm() < 1e-8);
        }
    }

    #[test]
    fn equipotential_surrounds_centre() {
        let chart = real_superattracting();
        for level in [0.2, 0.7, 0.95] {
            let e = chart.equipotential(level, 64).unwrap();
            assert_eq!(winding_number(&e, chart.z_a), 1, "level {level}");
            assert_eq!(self_crossings(&e), 0);
        }
    }

    #[test]
    fn zero_ray_lands_at_repelling_fixed_point() {
        let chart = real_superattracting();
        let (_, land) = chart.landed_internal_ray(0.0, 0.999, 40).unwrap();
        let m = chart.map;
        assert!((m.eval(land).unwrap() - land).norm() < 1e-10);
        assert!(m.eval_deriv(land).unwrap().norm() > 1.0);
        assert!(land.im.abs() < 1e-9);
    }
}
