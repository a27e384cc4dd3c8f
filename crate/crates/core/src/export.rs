//! Flat records for JSON export. Pieces, tableaux and renormalization
//! candidates serialize directly; rays and basins get the flat shapes below.
//! Complex numbers in the direct serializations are `[re, im]` pairs.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::basins::{BasinChart, ChartMode};
use crate::error::Result;
use crate::rays::{LandingClass, Ray};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandingRecord {
    pub re: f64,
    pub im: f64,
    pub multiplier_re: f64,
    pub multiplier_im: f64,
    pub class: LandingClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayRecord {
    pub address: String,
    /// `[t, re, im]`, potential decreasing.
    pub samples: Vec<[f64; 3]>,
    pub landing: Option<LandingRecord>,
}

impl From<&Ray> for RayRecord {
    fn from(r: &Ray) -> Self {
        RayRecord {
            address: r.address.to_string(),
            samples: r.samples.iter().map(|s| [s.t, s.z.re, s.z.im]).collect(),
            landing: r.landing.map(|l| LandingRecord {
                re: l.point.re,
                im: l.point.im,
                multiplier_re: l.multiplier.re,
                multiplier_im: l.multiplier.im,
                class: l.class,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinRecord {
    pub cycle: Vec<Complex64>,
    pub period: usize,
    pub multiplier: Complex64,
    pub chart_mode: ChartMode,
    pub chart_radius: f64,
}

impl From<&BasinChart> for BasinRecord {
    fn from(c: &BasinChart) -> Self {
        BasinRecord {
            cycle: c.cycle.clone(),
            period: c.period,
            multiplier: c.multiplier,
            chart_mode: c.mode,
            chart_radius: c.radius,
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)? + "\n")?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{c64, CosineMap};
    use crate::rays::trace_ray;
    use crate::symbolic::Address;

    #[test]
    fn ray_record_shape() {
        let m = CosineMap::cosh_map();
        let s: Address = "[];[(0,0)]".parse().unwrap();
        let ray = trace_ray(&m, &s, 2.0, 6.0, 40).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&RayRecord::from(&ray)).unwrap()).unwrap();
        assert_eq!(v["address"], s.to_string());
        let first = &v["samples"][0];
        assert_eq!(first.as_array().unwrap().len(), 3);
        assert!(v["landing"].is_null());
    }

    #[test]
    fn basin_record_shape() {
        let m = CosineMap::from_normal_form(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap();
        let chart = BasinChart::new(&m, c64(0.6, 0.0), 1).unwrap();
        let v: serde_json::Value = serde_json::to_value(BasinRecord::from(&chart)).unwrap();
        assert_eq!(v["period"], 1);
        assert_eq!(v["chart_mode"], "koenigs");
        assert!(v["chart_radius"].as_f64().unwrap() > 0.0);
        assert_eq!(v["cycle"][0].as_array().unwrap().len(), 2);
    }
}
