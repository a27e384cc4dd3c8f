//! The cosine map `f(z) = a e^z + b e^-z` in normal form
//! `f(z) = (v/2)(e^(z-u) + e^-(z-u))`, with critical points `u + k*pi*i` and
//! critical values `v` (even k) and `-v` (odd k).
//!
//! The slit `Γ` is the segment `[-v, v]` together with the vertical ray from
//! `v` upwards. Its complement has conformal preimages `P_{j,k}`: half-strips
//! in the right (`j = 0`) or left (`j = 1`) half-plane of `u`. Labels are
//! fixed by the asymptotics of dynamic rays: for large `t`,
//! `t - Log a + 2k*pi*i` lies in `P_{0,k}` and `-t + Log b + 2k*pi*i` in
//! `P_{1,k}` (principal logarithms).

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Beyond this value of `|Re(z - u)|` evaluation saturates.
pub const ESCAPE_RE: f64 = 700.0;

/// `|w/v ∓ 1|` below this is treated as hitting a critical value.
pub const NEAR_CRITICAL: f64 = 1e-9;

const SLIT_TOL: f64 = 1e-13;

/// Above this modulus of `w/v` the inverse uses `acosh ζ = log 2ζ`.
const LOG_PATH_MODULUS: f64 = 1e150;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Wraps an angle into `(-π, π]`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(TWO_PI);
    if y > PI {
        y -= TWO_PI;
    }
    y
}

/// Orbit left the representable range: `|Re(z - u)|` exceeded [`ESCAPE_RE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Escaped {
    pub re: f64,
}

/// Index of a half-strip `P_{j,k}`; also one letter of a symbolic address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StripIndex {
    /// 0 for the right half-plane of `u`, 1 for the left.
    pub j: u8,
    pub k: i64,
}

impl StripIndex {
    pub const fn new(j: u8, k: i64) -> Self {
        StripIndex { j, k }
    }

    pub fn right(k: i64) -> Self {
        StripIndex { j: 0, k }
    }

    pub fn left(k: i64) -> Self {
        StripIndex { j: 1, k }
    }
}

/// Failure of a single inverse-branch or strip computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchError {
    /// The target lies on the slit Γ (or `z` on the preimage of Γ).
    OnSlit,
    /// The target is numerically a critical value.
    NearCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineMap {
    pub a: Complex64,
    pub b: Complex64,
    /// Base critical point, `Im u ∈ (-π, π]`.
    pub u: Complex64,
    /// Critical value `f(u)`.
    pub v: Complex64,
    half_v: Complex64,
    /// Unit direction of the vertical slit ray seen in the `w/v` plane.
    slit_dir: Complex64,
    slit_arg: f64,
    right_offset: i64,
    left_offset: i64,
}

/// Normal form of `a e^z + b e^-z`: returns `(u, v)` with `u = ½ Log(b/a)`
/// and `v = 2 a e^u`, so that `f(u) = v` holds exactly.
pub fn normalize(a: Complex64, b: Complex64) -> Result<(Complex64, Complex64)> {
    check_finite_nonzero(a, "a")?;
    check_finite_nonzero(b, "b")?;
    let mut u = 0.5 * (b / a).ln();
    let shift = ((u.im - PI) / TWO_PI).ceil();
    u.im -= shift * TWO_PI;
    let v = 2.0 * a * u.exp();
    Ok((u, v))
}

fn check_finite_nonzero(x: Complex64, name: &str) -> Result<()> {
    if !x.re.is_finite() || !x.im.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be finite")));
    }
    if x.norm() == 0.0 {
        return Err(Error::InvalidParameter(format!("{name} must be nonzero")));
    }
    Ok(())
}

impl CosineMap {
    pub fn from_coefficients(a: Complex64, b: Complex64) -> Result<Self> {
        let (u, v) = normalize(a, b)?;
        Self::build(a, b, u, v)
    }

    /// Builds `f(z) = (v/2)(e^(z-u) + e^-(z-u))`; `u` is reduced modulo `2πi`.
    pub fn from_normal_form(u: Complex64, v: Complex64) -> Result<Self> {
        check_finite_nonzero(v, "v")?;
        if !u.re.is_finite() || !u.im.is_finite() {
            return Err(Error::InvalidParameter("u must be finite".into()));
        }
        let mut u = u;
        let shift = ((u.im - PI) / TWO_PI).ceil();
        u.im -= shift * TWO_PI;
        let a = 0.5 * v * (-u).exp();
        let b = 0.5 * v * u.exp();
        Self::build(a, b, u, v)
    }

    /// `cosh z`, i.e. `a = b = 1/2`.
    pub fn cosh_map() -> Self {
        Self::from_coefficients(c64(0.5, 0.0), c64(0.5, 0.0)).expect("cosh is a valid map")
    }

    fn build(a: Complex64, b: Complex64, u: Complex64, v: Complex64) -> Result<Self> {
        let slit_dir = Complex64::i() * v.conj() / v.norm();
        let slit_arg = slit_dir.arg();
        if slit_arg.abs() > PI - 1e-9 {
            return Err(Error::InvalidParameter(
                "critical value on the negative imaginary axis: the slit ray runs through its own segment"
                    .into(),
            ));
        }
        let mut map = CosineMap {
            a,
            b,
            u,
            v,
            half_v: 0.5 * v,
            slit_dir,
            slit_arg,
            right_offset: 0,
            left_offset: 0,
        };
        // Calibrate strip labels against the asymptotic seeds at t = 30.
        let t = 30.0;
        let xi_r = c64(t, 0.0) - a.ln() - u;
        let base_r = map.acosh_slit(map.half_v * (xi_r.exp() + (-xi_r).exp()));
        map.right_offset = ((xi_r.im - base_r.im) / TWO_PI).round() as i64;
        let xi_l = c64(-t, 0.0) + b.ln() - u;
        let base_l = -map.acosh_slit(map.half_v * (xi_l.exp() + (-xi_l).exp()));
        map.left_offset = ((xi_l.im - base_l.im) / TWO_PI).round() as i64;
        Ok(map)
    }

    /// `u_k = u + kπi`.
    pub fn critical_point(&self, k: i64) -> Complex64 {
        self.u + c64(0.0, k as f64 * PI)
    }

    /// `f(u_k)`: `v` for even `k`, `-v` for odd.
    pub fn critical_value(&self, k: i64) -> Complex64 {
        if k.rem_euclid(2) == 0 {
            self.v
        } else {
            -self.v
        }
    }

    /// Critical points `u + kπi` whose imaginary part lies in `[y0, y1]`.
    pub fn critical_points_between(&self, y0: f64, y1: f64) -> Vec<Complex64> {
        let k0 = ((y0 - self.u.im) / PI).ceil() as i64;
        let k1 = ((y1 - self.u.im) / PI).floor() as i64;
        (k0..=k1).map(|k| self.critical_point(k)).collect()
    }

    #[inline]
    fn exp_pair(&self, z: Complex64) -> std::result::Result<(Complex64, Complex64), Escaped> {
        let xi = z - self.u;
        if !(xi.re.abs() <= ESCAPE_RE) {
            return Err(Escaped { re: xi.re });
        }
        Ok((xi.exp(), (-xi).exp()))
    }

    /// `f(z)`, saturating into [`Escaped`] once `|Re(z - u)| > 700`.
    #[inline]
    pub fn eval(&self, z: Complex64) -> std::result::Result<Complex64, Escaped> {
        let (p, m) = self.exp_pair(z)?;
        Ok(self.half_v * (p + m))
    }

    /// `f'(z) = a e^z - b e^-z`.
    #[inline]
    pub fn eval_deriv(&self, z: Complex64) -> std::result::Result<Complex64, Escaped> {
        let (p, m) = self.exp_pair(z)?;
        Ok(self.half_v * (p - m))
    }

    #[inline]
    pub fn eval_with_deriv(
        &self,
        z: Complex64,
    ) -> std::result::Result<(Complex64, Complex64), Escaped> {
        let (p, m) = self.exp_pair(z)?;
        Ok((self.half_v * (p + m), self.half_v * (p - m)))
    }

    /// `f^n(z)`.
    pub fn iterate(&self, z: Complex64, n: usize) -> std::result::Result<Complex64, Escaped> {
        let mut z = z;
        for _ in 0..n {
            z = self.eval(z)?;
        }
        Ok(z)
    }

    /// `(f^n(z), (f^n)'(z))`.
    pub fn iterate_with_deriv(
        &self,
        z: Complex64,
        n: usize,
    ) -> std::result::Result<(Complex64, Complex64), Escaped> {
        let mut z = z;
        let mut d = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            let (fz, dz) = self.eval_with_deriv(z)?;
            d *= dz;
            z = fz;
        }
        Ok((z, d))
    }

    /// `f(c + h) - f(c)`, accurate when `h` is tiny and `c` is not critical.
    pub fn increment(&self, c: Complex64, h: Complex64) -> Complex64 {
        let xi = c - self.u;
        2.0 * self.v * (0.5 * h).sinh() * (xi + 0.5 * h).sinh()
    }

    /// `f(u_k + h) - f(u_k)`, accurate for tiny `h`.
    pub fn critical_increment(&self, k: i64, h: Complex64) -> Complex64 {
        let s = (0.5 * h).sinh();
        2.0 * self.critical_value(k) * s * s
    }

    /// Whether `w` lies on the slit `Γ` within a relative tolerance.
    pub fn on_slit(&self, w: Complex64) -> bool {
        let zeta = w / self.v;
        let tol = SLIT_TOL * (1.0 + zeta.norm());
        if zeta.im.abs() <= tol && zeta.re.abs() <= 1.0 + tol {
            return true;
        }
        let rel = (zeta - 1.0) * self.slit_dir.conj();
        rel.re >= -tol && rel.im.abs() <= tol
    }

    fn near_critical(&self, w: Complex64) -> bool {
        let zeta = w / self.v;
        (zeta - 1.0).norm() < NEAR_CRITICAL || (zeta + 1.0).norm() < NEAR_CRITICAL
    }

    /// The preimage `ξ = z - u` of `w` in the base right strip: principal
    /// `acosh(w/v)`, moved up by `2πi` on the clockwise side of the slit ray.
    fn acosh_slit(&self, w: Complex64) -> Complex64 {
        let (p, side) = if w.norm() > LOG_PATH_MODULUS * self.v.norm().max(1.0) {
            let ln_zeta = w.ln() - self.v.ln();
            let arg = wrap_angle(ln_zeta.im);
            (c64(ln_zeta.re + LN_2, arg), arg)
        } else {
            let zeta = w / self.v;
            (zeta.acosh(), (zeta - 1.0).arg())
        };
        if side < self.slit_arg {
            p + c64(0.0, TWO_PI)
        } else {
            p
        }
    }

    fn offset(&self, j: u8) -> i64 {
        if j == 0 {
            self.right_offset
        } else {
            self.left_offset
        }
    }

    /// The unique `z ∈ P_{j,k}` with `f(z) = w`.
    pub fn inverse_branch(
        &self,
        w: Complex64,
        s: StripIndex,
    ) -> std::result::Result<Complex64, BranchError> {
        if self.near_critical(w) {
            return Err(BranchError::NearCritical);
        }
        if self.on_slit(w) {
            return Err(BranchError::OnSlit);
        }
        let base = self.acosh_slit(w);
        let xi = if s.j == 0 { base } else { -base };
        let n = s.k + self.offset(s.j);
        Ok(self.u + xi + c64(0.0, TWO_PI * n as f64))
    }

    /// The preimage of `w` closest to `reference`, together with the ratio of
    /// the best to the second-best candidate distance (near 1 means the
    /// choice is ambiguous).
    pub fn nearest_preimage(
        &self,
        w: Complex64,
        reference: Complex64,
    ) -> std::result::Result<(Complex64, f64), BranchError> {
        if self.near_critical(w) {
            return Err(BranchError::NearCritical);
        }
        let base = self.acosh_slit(w);
        let xr = reference - self.u;
        let mut cands = [(f64::INFINITY, Complex64::default()); 2];
        let mut second = f64::INFINITY;
        for (slot, xi) in [base, -base].into_iter().enumerate() {
            let n = ((xr.im - xi.im) / TWO_PI).round();
            let best = xi + c64(0.0, TWO_PI * n);
            let d = (best - xr).norm();
            cands[slot] = (d, best);
            for dn in [-1.0, 1.0] {
                let alt = best + c64(0.0, TWO_PI * dn);
                second = second.min((alt - xr).norm());
            }
        }
        let (best, other) = if cands[0].0 <= cands[1].0 {
            (cands[0], cands[1])
        } else {
            (cands[1], cands[0])
        };
        second = second.min(other.0);
        let ratio = if second > 0.0 { best.0 / second } else { 1.0 };
        Ok((self.u + best.1, ratio))
    }

    /// All preimages of `w` with imaginary part in `[y0, y1]`.
    pub fn preimages_between(&self, w: Complex64, y0: f64, y1: f64) -> Vec<Complex64> {
        let base = self.acosh_slit(w);
        let mut out = Vec::new();
        let mut signs: Vec<Complex64> = vec![base];
        if base.norm() > 0.0 {
            signs.push(-base);
        }
        for xi in signs {
            let z0 = self.u + xi;
            let n0 = ((y0 - z0.im) / TWO_PI).ceil() as i64;
            let n1 = ((y1 - z0.im) / TWO_PI).floor() as i64;
            for n in n0..=n1 {
                out.push(z0 + c64(0.0, TWO_PI * n as f64));
            }
        }
        out
    }

    /// Distance from `z` to the nearest other preimage of `f(z)`.
    pub fn separation(&self, z: Complex64) -> f64 {
        let xi = z - self.u;
        let n = (xi.im / PI).round();
        let to_crit = (xi - c64(0.0, n * PI)).norm();
        (2.0 * to_crit).min(TWO_PI)
    }

    /// Lifts the polyline `pts` through `f` by continuation, starting from the
    /// preimage of `pts[0]` nearest to `start`. Segments are subdivided until
    /// every lifted step is small against the local preimage separation; with
    /// `keep_intermediate` the subdivision points are returned as well.
    pub fn lift_path(
        &self,
        pts: &[Complex64],
        start: Complex64,
        keep_intermediate: bool,
    ) -> std::result::Result<Vec<Complex64>, BranchError> {
        let mut out = Vec::with_capacity(pts.len());
        let Some(&w0) = pts.first() else {
            return Ok(out);
        };
        let (mut z, _) = self.nearest_preimage(w0, start)?;
        out.push(z);
        for seg in pts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let mut s: f64 = 0.0;
            let mut h: f64 = 1.0;
            while s < 1.0 {
                let s1 = (s + h).min(1.0);
                let w = a + (b - a) * s1;
                let (cand, _) = self.nearest_preimage(w, z)?;
                let step = (cand - z).norm();
                let sep = self.separation(cand).min(self.separation(z));
                if step <= 0.3 * sep || step < 1e-14 {
                    z = cand;
                    s = s1;
                    if keep_intermediate && s < 1.0 {
                        out.push(z);
                    }
                    h *= 2.0;
                } else {
                    h *= 0.5;
                    if h < 1e-12 {
                        return Err(BranchError::NearCritical);
                    }
                }
            }
            out.push(z);
        }
        Ok(out)
    }

    /// The half-strip containing `z`, certified by a round trip through the
    /// inverse branch.
    pub fn strip_index(&self, z: Complex64) -> std::result::Result<StripIndex, BranchError> {
        let xi = z - self.u;
        let scale = 1.0 + xi.norm();
        if xi.re.abs() <= 1e-12 * scale {
            return Err(BranchError::OnSlit);
        }
        let j: u8 = if xi.re > 0.0 { 0 } else { 1 };
        let base = if xi.re.abs() <= 600.0 {
            let w = self.half_v * (xi.exp() + (-xi).exp());
            if self.near_critical(w) {
                return Err(BranchError::NearCritical);
            }
            if self.on_slit(w) {
                return Err(BranchError::OnSlit);
            }
            let a = self.acosh_slit(w);
            if j == 0 {
                a
            } else {
                -a
            }
        } else {
            // cosh ξ = e^{±ξ}/2 to double precision here.
            let e = if j == 0 { xi } else { -xi };
            let arg = wrap_angle(e.im);
            let lift = if arg < self.slit_arg { TWO_PI } else { 0.0 };
            let a = c64(e.re, arg + lift);
            if j == 0 {
                a
            } else {
                -a
            }
        };
        let n = ((xi.im - base.im) / TWO_PI).round();
        let back = base + c64(0.0, TWO_PI * n);
        if (back - xi).norm() > 1e-8 * scale {
            return Err(BranchError::OnSlit);
        }
        Ok(StripIndex {
            j,
            k: n as i64 - self.offset(j),
        })
    }
}
