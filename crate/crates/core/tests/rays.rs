use std::f64::consts::PI;

use cosine_puzzle::map::c64;
use cosine_puzzle::rays::{land_ray, preimage_ray_addresses, trace_ray_at, TraceOptions};
use cosine_puzzle::symbolic::addr_compare;
use cosine_puzzle::{Address, CosineMap};
use num_complex::Complex64;

fn addr(s: &str) -> Address {
    s.parse().unwrap()
}

fn trace(m: &CosineMap, s: &Address, ts: &[f64]) -> Vec<Complex64> {
    let ray = trace_ray_at(m, s, ts, &TraceOptions::default()).unwrap();
    ts.iter()
        .map(|t| ray.samples.iter().find(|x| x.t == *t).unwrap().z)
        .collect()
}

#[test]
fn left_second_entry_shifts_asymptote_by_half_period() {
    for m in [
        CosineMap::cosh_map(),
        CosineMap::from_coefficients(c64(0.3, 0.2), c64(0.5, -0.1)).unwrap(),
    ] {
        let ts = [14.0, 13.0, 12.0];
        let right = addr("[(0,1)];[(1,0)]");
        let z = trace(&m, &right, &ts);
        let left = addr("[(1,-1)];[(1,2)]");
        let w = trace(&m, &left, &ts);
        for (i, &t) in ts.iter().enumerate() {
            let line = c64(t, 0.0) - m.a.ln() + c64(0.0, PI);
            assert!((z[i] - line).norm() < 1e-4, "right, t = {t}");
            let line = c64(-t, 0.0) + m.b.ln() + c64(0.0, -PI);
            assert!((w[i] - line).norm() < 1e-4, "left, t = {t}");
        }
    }
}

#[test]
fn period_two_rays_land_on_a_two_cycle() {
    let m = CosineMap::from_normal_form(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap();
    let s = addr("[];[(0,0) (0,1)]");
    let a = land_ray(&m, &s).unwrap().landing.expect("lands");
    let b = land_ray(&m, &s.shift()).unwrap().landing.expect("lands");
    assert_eq!(a.period, 2);
    assert!((m.eval(a.point).unwrap() - b.point).norm() < 1e-8);
    assert!((m.eval(b.point).unwrap() - a.point).norm() < 1e-8);
    assert!(a.multiplier.norm() > 1.0);
}

#[test]
fn preimage_rays_are_ordered_by_height() {
    let m = CosineMap::from_normal_form(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap();
    let s = addr("[];[(0,0)]");
    let (up, _) = preimage_ray_addresses(&m, &s, c64(0.0, 2.0 * PI + 0.3)).unwrap();
    let (down, _) = preimage_ray_addresses(&m, &s, c64(0.0, 0.3)).unwrap();
    assert_eq!(addr_compare(&down, &up), std::cmp::Ordering::Less);
}
