//! Small numerical kernels: gamma function, bracketed root finding,
//! golden-section search, adaptive Gauss-Kronrod quadrature and a
//! Dormand-Prince 5(4) step.

// Tabulated coefficients are kept at their published precision.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_SHIFT: f64 = 671.0 / 128.0;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// `ln Γ(x)` for `x > 0`, Lanczos approximation with `g = 607/128` and 14
/// terms (relative error near 1e-15).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let tmp = x + LANCZOS_SHIFT;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut series = 0.999_999_999_999_997_092;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        series += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * series / x).ln()
}

/// Gamma function; reflection formula for non-positive arguments.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    ln_gamma(x).exp()
}

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when the bracket is narrower than `xtol + rtol * |x|` or `f(x) == 0`.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, rtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite bracket values f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numeric(format!("no sign change on [{a}, {b}]")));
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (xtol + rtol * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::Numeric(format!("f({b}) = {fb}")));
        }
    }
    Err(Error::Numeric("Brent iteration did not converge in 200 steps".into()))
}

/// Doubles `hi` until `f(lo)` and `f(hi)` differ in sign. Returns the new `hi`.
pub fn expand_upward<F>(mut f: F, lo: f64, mut hi: f64, max_doublings: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let flo = f(lo);
    for _ in 0..=max_doublings {
        let fhi = f(hi);
        if fhi == 0.0 || fhi.signum() != flo.signum() {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(Error::Numeric(format!(
        "no sign change above {lo} after {max_doublings} doublings"
    )))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max<F>(mut f: F, a: f64, b: f64, rtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a) > rtol * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive 7-15 Gauss-Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (value, err) = kronrod15(&mut f, a, b);
    let mut parts = vec![(a, b, value, err)];
    let mut subdivisions = 0;
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Numeric("quadrature produced a non-finite value".into()));
        }
        if error <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Numeric(format!(
                "quadrature did not converge after {subdivisions} subdivisions (error {error:.3e}, value {total:.3e})"
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        subdivisions += 1;
    }
}

/// One Dormand-Prince step of the autonomous scalar ODE `y' = f(y)`.
///
/// Returns the fifth-order solution and the difference to the embedded
/// fourth-order one.
pub fn dormand_prince_step<F>(mut f: F, y: f64, h: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let k1 = f(y)?;
    let k2 = f(y + h * (k1 / 5.0))?;
    let k3 = f(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2))?;
    let k4 = f(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3))?;
    let k5 = f(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4))?;
    let k6 = f(y + h
        * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4
            - 5103.0 / 18656.0 * k5))?;
    let y5 = y + h
        * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    let k7 = f(y5)?;
    let err = h
        * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1
            + (500.0 / 1113.0 - 7571.0 / 16695.0) * k3
            + (125.0 / 192.0 - 393.0 / 640.0) * k4
            + (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5
            + (11.0 / 84.0 - 187.0 / 2100.0) * k6
            - 1.0 / 40.0 * k7);
    Ok((y5, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reference_values() {
        // Γ(5/4), Γ(3/4), Γ(1/2) = √π, Γ(5) = 24
        assert!((gamma(1.25) / 0.906_402_477_055_477_1 - 1.0).abs() < 1e-13);
        assert!((gamma(0.75) / 1.225_416_702_465_177_6 - 1.0).abs() < 1e-13);
        assert!((gamma(0.5) / PI.sqrt() - 1.0).abs() < 1e-13);
        assert!((gamma(5.0) / 24.0 - 1.0).abs() < 1e-13);
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(-0.5) / (-2.0 * PI.sqrt()) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_recurrence_on_unit_interval() {
        for i in 1..200 {
            let x = i as f64 / 100.0;
            let lhs = gamma(x + 1.0);
            let rhs = x * gamma(x);
            assert!((lhs / rhs - 1.0).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn brent_finds_sqrt2() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 0.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 0.0, 1e-12).is_err());
    }

    #[test]
    fn bracket_expansion() {
        let hi = expand_upward(|x| x - 100.0, 0.0, 1.0, 64).unwrap();
        assert_eq!(hi, 128.0);
        assert!(expand_upward(|_| 1.0, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn golden_section_locates_parabola_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 4.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_of_smooth_and_oscillatory_integrands() {
        let spec = QuadratureSpec::default();
        let v = integrate(|x| x.exp(), 0.0, 1.0, spec).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        // ∫_0^∞ e^{-x} sin(3x) dx = 3/10
        let v = integrate(|x| (-x).exp() * (3.0 * x).sin(), 0.0, 80.0, spec).unwrap();
        assert!((v - 0.3).abs() < 1e-13);
    }

    #[test]
    fn quadrature_reports_non_convergence() {
        let spec = QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-15,
            max_subdivisions: 3,
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, spec).unwrap_err();
        assert!(err.to_string().contains("3 subdivisions"));
    }

    #[test]
    fn dormand_prince_is_fifth_order() {
        // y' = -y; local error of one step scales as h^6.
        let step = |h: f64| {
            let (y, _) = dormand_prince_step(|y| Ok(-y), 1.0, h).unwrap();
            (y - (-h).exp()).abs()
        };
        let ratio = step(0.1) / step(0.05);
        assert!(ratio > 40.0 && ratio < 90.0, "ratio {ratio}");
    }
}
