//! One-parameter searches for parameters with a prescribed critical
//! behaviour, used to find examples for the two renormalization
//! constructions.

use num_complex::Complex64;
use serde::Serialize;

use crate::basins::{classify_critical_orbit, CriticalValue, OrbitClass, OrbitKind};
use crate::error::{Error, Result};
use crate::map::CosineMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScanTarget {
    /// `v` attracted, `-v` escaping.
    EscapingValue,
    /// `-v` attracted to a cycle of the given period.
    AttractedMinus { period: usize },
}

/// Segment `(u0, v0) -> (u1, v1)` in normal-form coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slice {
    pub u0: Complex64,
    pub v0: Complex64,
    pub u1: Complex64,
    pub v1: Complex64,
    pub samples: usize,
}

impl Slice {
    pub fn at(&self, s: f64) -> (Complex64, Complex64) {
        (self.u0 + (self.u1 - self.u0) * s, self.v0 + (self.v1 - self.v0) * s)
    }

    fn params(&self) -> Vec<f64> {
        let n = self.samples.max(2);
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanHit {
    pub s: f64,
    pub u: Complex64,
    pub v: Complex64,
    /// Cycle attracting the relevant critical value.
    pub cycle: Vec<Complex64>,
    pub multiplier: Complex64,
    /// Iterate at which `-v` was certified escaping, if it escapes.
    pub escape_index: Option<usize>,
}

fn summarize(c: &OrbitClass) -> Option<(Vec<Complex64>, Complex64)> {
    match (c.kind, &c.cycle, c.multiplier) {
        (OrbitKind::Attracted, Some(cyc), Some(l)) => Some((cyc.clone(), l)),
        _ => None,
    }
}

/// Checks one parameter against the target.
pub fn probe(u: Complex64, v: Complex64, target: ScanTarget, max_iter: usize) -> Option<ScanHit> {
    let m = CosineMap::from_normal_form(u, v).ok()?;
    let minus = classify_critical_orbit(&m, CriticalValue::Minus, max_iter);
    let (cycle, multiplier, escape_index) = match target {
        ScanTarget::EscapingValue => {
            if minus.kind != OrbitKind::Escaping {
                return None;
            }
            let plus = classify_critical_orbit(&m, CriticalValue::Plus, max_iter);
            let (cyc, l) = summarize(&plus)?;
            (cyc, l, minus.escape_certificate.map(|e| e.index))
        }
        ScanTarget::AttractedMinus { period } => {
            let (cyc, l) = summarize(&minus)?;
            if cyc.len() != period {
                return None;
            }
            (cyc, l, None)
        }
    };
    Some(ScanHit {
        s: 0.0,
        u,
        v,
        cycle,
        multiplier,
        escape_index,
    })
}

/// All samples of the slice meeting the target, in slice order.
pub fn scan(slice: &Slice, target: ScanTarget, max_iter: usize) -> Vec<ScanHit> {
    let run = |s: f64| {
        let (u, v) = slice.at(s);
        probe(u, v, target, max_iter).map(|h| ScanHit { s, ..h })
    };
    let ss = slice.params();
    #[cfg(feature = "parallel")]
    let hits: Vec<Option<ScanHit>> = {
        use rayon::prelude::*;
        ss.par_iter().map(|&s| run(s)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let hits: Vec<Option<ScanHit>> = ss.iter().map(|&s| run(s)).collect();
    hits.into_iter().flatten().collect()
}

/// The hit with the most strongly attracting cycle; ties go to the earlier sample.
pub fn best_hit(hits: &[ScanHit]) -> Result<&ScanHit> {
    hits.iter()
        .min_by(|a, b| a.multiplier.norm().total_cmp(&b.multiplier.norm()))
        .ok_or_else(|| Error::Precondition("no parameter on the slice meets the target".into()))
}

/// Real escaping slice: `u` fixed, `v` real in `[v0, v1]`.
pub fn real_slice(u: f64, v0: f64, v1: f64, samples: usize) -> Slice {
    Slice {
        u0: Complex64::new(u, 0.0),
        v0: Complex64::new(v0, 0.0),
        u1: Complex64::new(u, 0.0),
        v1: Complex64::new(v1, 0.0),
        samples,
    }
}

/// Diagonal `u = v` from `c0` to `c1`; `v` is then a superattracting fixed point.
pub fn diagonal_slice(c0: Complex64, c1: Complex64, samples: usize) -> Slice {
    Slice {
        u0: c0,
        v0: c0,
        u1: c1,
        v1: c1,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent real oracle: x -> v cosh(x - u) in plain f64.
    fn real_fate(u: f64, v: f64, x0: f64) -> Option<f64> {
        let mut x = x0;
        for _ in 0..5000 {
            x = v * (x - u).cosh();
            if !x.is_finite() || x.abs() > 1e6 {
                return None;
            }
        }
        Some(x)
    }

    #[test]
    fn real_slice_hits_agree_with_real_iteration() {
        let hits = scan(&real_slice(2.0, 1.0, 2.0, 41), ScanTarget::EscapingValue, 2000);
        assert!(!hits.is_empty());
        for h in &hits {
            let (u, v) = (h.u.re, h.v.re);
            assert!(real_fate(u, v, -v).is_none(), "-v should escape at v = {v}");
            let x = real_fate(u, v, v).expect("v bounded");
            assert!(h.cycle.iter().any(|c| (c.re - x).abs() < 1e-6));
        }
    }

    #[test]
    fn diagonal_finds_period_two() {
        let sl = diagonal_slice(Complex64::new(-1.2, -0.45), Complex64::new(-0.8, -0.45), 9);
        let hits = scan(&sl, ScanTarget::AttractedMinus { period: 2 }, 4000);
        assert!(hits.iter().any(|h| (h.u.re + 1.0).abs() < 1e-12));
        let b = best_hit(&hits).unwrap();
        assert!(b.multiplier.norm() < 1.0);
    }

    #[test]
    fn empty_slice_is_a_precondition_error() {
        let hits = scan(&real_slice(2.0, 0.1, 0.2, 3), ScanTarget::AttractedMinus { period: 7 }, 500);
        assert!(best_hit(&hits).is_err());
    }
}
