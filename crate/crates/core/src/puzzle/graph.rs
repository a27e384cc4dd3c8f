use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basins::{BasinChart, ChartMode};
use crate::error::{Error, Result};
use crate::geometry::{resample, SegmentIndex};
use crate::map::{CosineMap, StripIndex};
use crate::rays::{land_ray, trace_ray_at, potential_grid, TraceOptions, DEFAULT_DEPTH};
use crate::symbolic::Address;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveTag {
    InternalRay,
    DynamicRay,
    Equipotential,
    EllipseArc,
    /// Edge of the computation window, for pieces that are not bounded.
    WindowEdge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub tag: CurveTag,
    pub source: String,
    pub points: Vec<Complex64>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub theta: f64,
    pub address: Address,
    pub level: f64,
}

/// The forward-invariant graph `Γ0` together with the equipotentials `E0`.
#[derive(Debug, Clone)]
pub struct PuzzleGraph {
    pub spec: GraphSpec,
    pub chart: BasinChart,
    /// Common landing point of the internal and the dynamic ray.
    pub landing: Complex64,
    pub landing_gap: f64,
    /// Number of forward images of the ray pair.
    pub period: usize,
    pub curves: Vec<Curve>,
    /// Dynamic rays are traced out to `|Re(z - u)|` of about this much.
    pub extent: f64,
}

/// Samples per internal ray; dense enough that polyline sag stays far below
/// the invariance tolerance.
const INTERNAL_SAMPLES: usize = 600;

/// Largest segment of traced dynamic rays near the basin.
const RAY_SEGMENT: f64 = 2e-3;

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Traces `g_s` from beyond `extent` down to its landing point, which is
/// appended.
fn traced_ray(m: &CosineMap, s: &Address, landing: Complex64, extent: f64) -> Result<Vec<Complex64>> {
    let lna = m.a.ln().norm().max(m.b.ln().norm());
    let t_hi = extent + lna + 2.0;
    let ray = land_ray(m, s)?;
    let t_lo = ray.t_min;
    let ts = potential_grid(t_lo, t_hi);
    let opts = TraceOptions {
        depth: DEFAULT_DEPTH,
        max_segment: Some(RAY_SEGMENT),
        window: extent,
    };
    let traced = trace_ray_at(m, s, &ts, &opts)?;
    let mut pts = traced.points();
    pts.push(landing);
    Ok(pts)
}

/// Builds `Γ0 ∪ E0` from the internal ray of angle `theta` in the basin of
/// `chart`, the periodic dynamic ray `s`, and the equipotential `level`.
pub fn build_graph(
    m: &CosineMap,
    chart: &BasinChart,
    theta: f64,
    s: &Address,
    level: f64,
    extent: f64,
) -> Result<PuzzleGraph> {
    if chart.mode != ChartMode::Boettcher {
        return Err(Error::Precondition(
            "puzzles are built in superattracting basins".into(),
        ));
    }
    if !s.is_periodic() {
        return Err(Error::Precondition(format!("address {s} is not periodic")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("equipotential level {level} not in (0,1)")));
    }
    let (internal, z_int) = chart.landed_internal_ray(theta, 0.999, INTERNAL_SAMPLES)?;
    let ray = land_ray(m, s)?;
    let z_dyn = ray
        .landing
        .ok_or_else(|| Error::Inconclusive(format!("ray {s} has no detected landing point")))?
        .point;
    let gap = (z_int - z_dyn).norm();
    if gap > 1e-5 {
        return Err(Error::LandingMismatch {
            internal: z_int,
            dynamic: z_dyn,
        });
    }
    let q = chart
        .angle_period(theta)
        .ok_or_else(|| Error::Precondition(format!("angle {theta} is not periodic")))?;
    let period = lcm(q * chart.period, s.period_len());
    let mut curves = Vec::new();
    let mut image = internal;
    let mut landing = z_int;
    let mut addr = s.clone();
    for j in 0..period {
        curves.push(Curve {
            tag: CurveTag::InternalRay,
            source: format!("f^{j} R({theta})"),
            points: image.clone(),
            closed: false,
        });
        curves.push(Curve {
            tag: CurveTag::DynamicRay,
            source: addr.to_string(),
            points: traced_ray(m, &addr, landing, extent)?,
            closed: false,
        });
        image = forward(m, &image)?;
        landing = m
            .eval(landing)
            .map_err(|_| Error::Inconsistent("landing point escapes".into()))?;
        addr = addr.shift();
    }
    let mut equi = chart.equipotential(level, 256)?;
    for j in 0..chart.period {
        curves.push(Curve {
            tag: CurveTag::Equipotential,
            source: format!("f^{j} E({level})"),
            points: equi.clone(),
            closed: true,
        });
        equi = forward(m, &equi)?;
    }
    Ok(PuzzleGraph {
        spec: GraphSpec {
            theta,
            address: s.clone(),
            level,
        },
        chart: chart.clone(),
        landing: z_int,
        landing_gap: gap,
        period,
        curves,
        extent,
    })
}

fn forward(m: &CosineMap, pts: &[Complex64]) -> Result<Vec<Complex64>> {
    pts.iter()
        .map(|&z| {
            m.eval(z)
                .map_err(|_| Error::Inconsistent("graph point escapes".into()))
        })
        .collect()
}

/// Angles of exact period `q` under doubling, in increasing order.
fn periodic_angles(q: u32) -> Vec<f64> {
    let d = (1u64 << q) - 1;
    (0..d)
        .filter(|&n| {
            (1..q).filter(|r| q.is_multiple_of(*r)).all(|r| {
                let dr = (1u64 << r) - 1;
                !(n * dr).is_multiple_of(d) || n == 0 && q == 1
            })
        })
        .filter(|&n| q == 1 || n != 0)
        .map(|n| n as f64 / d as f64)
        .collect()
}

/// Periodic addresses of exact period `p` with entries `k ∈ [-kmax, kmax]`.
fn periodic_addresses(p: usize, kmax: i64) -> Vec<Address> {
    let letters: Vec<StripIndex> = (0..2u8)
        .flat_map(|j| (-kmax..=kmax).map(move |k| StripIndex::new(j, k)))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; p];
    loop {
        let word: Vec<StripIndex> = idx.iter().map(|&i| letters[i]).collect();
        if let Ok(a) = Address::periodic(word) {
            if a.period_len() == p && !out.contains(&a) {
                out.push(a);
            }
        }
        let mut pos = 0;
        loop {
            if pos == p {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < letters.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Searches for a periodic internal ray and a periodic dynamic ray with a
/// common landing point: angles of period 1, 2, 3 under doubling, addresses of
/// matching period with `|k| <= 3`.
pub fn find_graph(m: &CosineMap, chart: &BasinChart, level: f64, extent: f64) -> Result<PuzzleGraph> {
    let mut tried = Vec::new();
    for q in 1..=3u32 {
        for theta in periodic_angles(q) {
            let Ok((_, z_int)) = chart.landed_internal_ray(theta, 0.999, INTERNAL_SAMPLES) else {
                continue;
            };
            let p = q as usize * chart.period;
            for s in periodic_addresses(p, 3) {
                let Ok(ray) = land_ray(m, &s) else { continue };
                let Some(l) = ray.landing else { continue };
                if (l.point - z_int).norm() < 1e-5 {
                    return build_graph(m, chart, theta, &s, level, extent);
                }
            }
            tried.push(theta);
        }
    }
    Err(Error::Inconclusive(format!(
        "no dynamic ray of period <= 3 with |k| <= 3 lands with internal rays {tried:?}"
    )))
}

impl PuzzleGraph {
    /// Largest distance from `f(z)` to the ray part of the graph, over ray
    /// samples `z` whose image stays within `radius` of `u`. Equipotentials
    /// map strictly inside themselves and are not part of the check.
    pub fn invariance_defect(&self, radius: f64) -> f64 {
        let m = &self.chart.map;
        let indices: Vec<SegmentIndex> = self
            .rays()
            .map(|c| SegmentIndex::new(&c.points, c.closed))
            .collect();
        let mut worst: f64 = 0.0;
        for c in self.rays() {
            for &z in &c.points {
                let Ok(w) = m.eval(z) else { continue };
                if (w - m.u).norm() > radius {
                    continue;
                }
                let d = indices
                    .iter()
                    .map(|ix| ix.distance(w))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        worst
    }

    fn rays(&self) -> impl Iterator<Item = &Curve> {
        self.curves.iter().filter(|c| c.tag != CurveTag::Equipotential)
    }

    /// All graph curves, resampled to segments of at most `max_seg`.
    pub fn resampled(&self, max_seg: f64) -> Vec<Curve> {
        self.curves
            .iter()
            .map(|c| {
                let mut pts = c.points.clone();
                if c.closed {
                    pts.push(pts[0]);
                }
                Curve {
                    points: resample(&pts, max_seg),
                    ..c.clone()
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::c64;

    #[test]
    fn angle_enumeration() {
        assert_eq!(periodic_angles(1), vec![0.0]);
        assert_eq!(periodic_angles(2), vec![1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(periodic_angles(3).len(), 6);
    }

    #[test]
    fn address_enumeration() {
        assert_eq!(periodic_addresses(1, 3).len(), 14);
        // 14^2 words minus the 14 constant ones, up to rotation.
        assert_eq!(periodic_addresses(2, 3).len(), (14 * 14 - 14) / 2 * 2);
    }

    #[test]
    fn real_pair_on_symmetric_map() {
        let m = CosineMap::from_normal_form(c64(1.0, 0.0), c64(1.0, 0.0)).unwrap();
        let chart = BasinChart::new(&m, c64(1.0, 0.0), 1).unwrap();
        let s: Address = "[];[(0,0)]".parse().unwrap();
        let g = build_graph(&m, &chart, 0.0, &s, 0.5, 8.0).unwrap();
        assert_eq!(g.period, 1);
        assert!(g.landing_gap < 1e-5);
        for c in g.curves.iter().filter(|c| c.tag != CurveTag::Equipotential) {
            assert!(c.points.iter().all(|z| z.im.abs() < 1e-8));
        }
        assert!(g.invariance_defect(6.0) < 1e-5, "{}", g.invariance_defect(6.0));
    }
}
