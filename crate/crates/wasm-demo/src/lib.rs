//! Browser demo: Julia set rendering, ray landing and critical orbit
//! classification for `f = v cosh(z - u)`. Build with
//! `wasm-pack build --target web --out-dir www/pkg`.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use cosine_puzzle::basins::{classify_critical_orbit, CriticalValue};
use cosine_puzzle::export::{to_json, RayRecord};
use cosine_puzzle::rays::land_ray;
use cosine_puzzle::render::{classify_viewport, Viewport};
use cosine_puzzle::{Address, CosineMap};

fn map(u_re: f64, u_im: f64, v_re: f64, v_im: f64) -> Result<CosineMap, String> {
    CosineMap::from_normal_form(Complex64::new(u_re, u_im), Complex64::new(v_re, v_im)).map_err(|e| e.to_string())
}

/// RGBA pixels, row 0 at the top.
pub fn julia_rgba(m: &CosineMap, vp: &Viewport, max_iter: usize) -> Result<Vec<u8>, String> {
    let img = classify_viewport(m, vp, max_iter, 60.0).map_err(|e| e.to_string())?.image();
    Ok(img.data.chunks(3).flat_map(|c| [c[0], c[1], c[2], 255]).collect())
}

/// Ray points as `[re, im, re, im, ...]` ending at the landing point.
pub fn landed_ray(m: &CosineMap, address: &str) -> Result<(Vec<f64>, String), String> {
    let s: Address = address.parse().map_err(|e: cosine_puzzle::Error| e.to_string())?;
    let ray = land_ray(m, &s).map_err(|e| e.to_string())?;
    let mut pts = ray.points();
    if let Some(l) = ray.landing {
        pts.push(l.point);
    }
    let summary = to_json(&RayRecord::from(&ray).landing).map_err(|e| e.to_string())?;
    Ok((pts.iter().flat_map(|z| [z.re, z.im]).collect(), summary))
}

pub fn critical_orbits(m: &CosineMap) -> Result<String, String> {
    let summary: Vec<_> = [CriticalValue::Plus, CriticalValue::Minus]
        .into_iter()
        .map(|w| {
            let c = classify_critical_orbit(m, w, 2000);
            serde_json::json!({
                "value": if w == CriticalValue::Plus { "v" } else { "-v" },
                "kind": c.kind,
                "period": c.cycle.as_ref().map(Vec::len),
                "multiplier": c.multiplier.map(|l| l.norm()),
                "escaped_at": c.escape_certificate.map(|e| e.index),
            })
        })
        .collect();
    serde_json::to_string(&summary).map_err(|e| e.to_string())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn render(
    u_re: f64,
    u_im: f64,
    v_re: f64,
    v_im: f64,
    cx: f64,
    cy: f64,
    width: f64,
    px_w: usize,
    px_h: usize,
    max_iter: usize,
) -> Result<Vec<u8>, JsValue> {
    let m = map(u_re, u_im, v_re, v_im)?;
    let vp = Viewport::new(Complex64::new(cx, cy), width, (px_w, px_h)).map_err(|e| e.to_string())?;
    Ok(julia_rgba(&m, &vp, max_iter)?)
}

/// A landed ray with its landing record as JSON.
#[wasm_bindgen]
pub struct RayResult {
    points: Vec<f64>,
    landing: String,
}

#[wasm_bindgen]
impl RayResult {
    pub fn points(&self) -> Vec<f64> {
        self.points.clone()
    }

    pub fn landing_summary(&self) -> String {
        self.landing.clone()
    }
}

#[wasm_bindgen]
pub fn land(u_re: f64, u_im: f64, v_re: f64, v_im: f64, address: &str) -> Result<RayResult, JsValue> {
    let m = map(u_re, u_im, v_re, v_im)?;
    let (points, landing) = landed_ray(&m, address)?;
    Ok(RayResult { points, landing })
}

#[wasm_bindgen]
pub fn classify(u_re: f64, u_im: f64, v_re: f64, v_im: f64) -> Result<String, JsValue> {
    Ok(critical_orbits(&map(u_re, u_im, v_re, v_im)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rgba_has_alpha() {
        let m = map(0.0, 0.0, 0.5, 0.0).unwrap();
        let vp = Viewport::new(Complex64::new(0.0, 0.0), 4.0, (8, 6)).unwrap();
        let px = julia_rgba(&m, &vp, 50).unwrap();
        assert_eq!(px.len(), 8 * 6 * 4);
        assert!(px.chunks(4).all(|c| c[3] == 255));
    }

    #[test]
    fn ray_ends_at_landing_point() {
        let m = map(-1.0, -0.45, -1.0, -0.45).unwrap();
        let (pts, summary) = landed_ray(&m, "[];[(1,-1)]").unwrap();
        let n = pts.len();
        assert!((pts[n - 2] + 2.47733).abs() < 1e-4 && (pts[n - 1] - 0.02322).abs() < 1e-4);
        assert!(summary.contains("repelling"));
        assert!(landed_ray(&m, "nonsense").is_err());
    }

    #[test]
    fn orbit_summary_lists_both_values() {
        let m = map(2.0, 0.0, 1.6, 0.0).unwrap();
        let s: serde_json::Value = serde_json::from_str(&critical_orbits(&m).unwrap()).unwrap();
        assert_eq!(s[0]["kind"], "attracted");
        assert_eq!(s[1]["kind"], "escaping");
    }
}
