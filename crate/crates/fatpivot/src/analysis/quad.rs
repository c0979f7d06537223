//! Adaptive quadrature and the two integral-valued constants: the expected
//! entropy of a symmetric beta split (checked against its closed form) and
//! the Hölder constant of the entropy function.

use crate::analysis::beta_function_int;
use crate::model::Error;

/// Adaptive Simpson quadrature with Richardson acceptance: a panel is
/// accepted when `|S_left + S_right - S| <= 15 tol`, recursing otherwise.
/// `tol` is an absolute tolerance on the whole interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// `E[H_ln(P, 1-P)]` for a Beta(t+1, t+1) variable `P`, by quadrature
/// against the beta density. Independent numerical route for the closed
/// form `H_{2t+2} - H_{t+1}`.
pub fn expected_beta_entropy_quadrature(t: u32) -> f64 {
    let norm = beta_function_int(t + 1, t + 1);
    let te = f64::from(t);
    let integrand = move |x: f64| {
        if x <= 0.0 || x >= 1.0 {
            return 0.0; // x^t * x ln x and its mirror vanish at the endpoints
        }
        let h = -x * libm::log(x) - (1.0 - x) * libm::log(1.0 - x);
        h * libm::pow(x, te) * libm::pow(1.0 - x, te) / norm
    };
    adaptive_simpson(integrand, 0.0, 1.0, 1e-11)
}

/// Hölder constant of the base-e entropy function for exponent `h`:
/// `C_h = (∫_0^1 |ln t + 1|^{1/(1-h)} dt)^{1-h}`.
///
/// The substitution `t = e^{-s}` turns the integrand into
/// `|1 - s|^p e^{-s}` on `[0, ∞)` with `p = 1/(1-h)`, removing the
/// singularity at `t -> 0`. The head `s ∈ [0, 1]` is integrated directly;
/// the tail `s > 1` is rescaled by `s = 1 + p v` and evaluated in log
/// space, since its magnitude (roughly `p!`) overflows doubles long before
/// `h` reaches 1. Accuracy is far better than the documented 1e-4 relative
/// tolerance for all practical `h`.
pub fn hoelder_constant(h: f64) -> Result<f64, Error> {
    if !(h > 0.0 && h < 1.0 && h.is_finite()) {
        return Err(Error::ParameterOutOfRange { name: "h" });
    }
    let p = 1.0 / (1.0 - h);

    // Head: ∫_0^1 (1 - s)^p e^{-s} ds, smooth and at most 1.
    let head = adaptive_simpson(
        |s| {
            if s >= 1.0 {
                0.0
            } else {
                libm::exp(p * libm::log(1.0 - s) - s)
            }
        },
        0.0,
        1.0,
        1e-12,
    );

    // Tail: ∫_1^∞ (s-1)^p e^{-s} ds = e^{scale} ∫_0^∞ e^{p (ln v - v + 1)} dv
    // with scale = (p+1) ln p - p - 1. The scaled integrand peaks at 1 with
    // value 1 and decays super-exponentially on both sides.
    let scale = (p + 1.0) * libm::log(p) - p - 1.0;
    let log_scaled = move |v: f64| {
        if v <= 0.0 {
            f64::NEG_INFINITY
        } else {
            p * (libm::log(v) - v + 1.0)
        }
    };
    let mut hi = 2.0;
    while log_scaled(hi) > -80.0 {
        hi *= 2.0;
    }
    let scaled_tail = adaptive_simpson(
        |v| {
            if v <= 0.0 {
                0.0
            } else {
                libm::exp(log_scaled(v))
            }
        },
        0.0,
        hi,
        1e-12,
    );

    // ln(head + e^scale * tail), stable for huge scales.
    let ln_tail = scale + libm::log(scaled_tail);
    let ln_integral = if head <= 0.0 {
        ln_tail
    } else {
        let ln_head = libm::log(head);
        let hi = ln_head.max(ln_tail);
        hi + libm::log1p(libm::exp(ln_head.min(ln_tail) - hi))
    };
    Ok(libm::exp((1.0 - h) * ln_integral))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::expected_beta_entropy;

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-10);
        let v = adaptive_simpson(|x| libm::exp(-x), 0.0, 10.0, 1e-12);
        assert!((v - (1.0 - libm::exp(-10.0))).abs() < 1e-10);
    }

    #[test]
    fn beta_median_density_integrates_to_one() {
        use crate::analysis::beta_function_int;
        for t in 0..=5u32 {
            let norm = beta_function_int(t + 1, t + 1);
            let te = f64::from(t);
            let mass = adaptive_simpson(
                move |x| {
                    if x <= 0.0 || x >= 1.0 {
                        if t == 0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        libm::pow(x, te) * libm::pow(1.0 - x, te) / norm
                    }
                },
                0.0,
                1.0,
                1e-12,
            );
            assert!((mass - 1.0).abs() < 1e-10, "t={t}: density mass {mass}");
        }
    }

    #[test]
    fn beta_entropy_quadrature_matches_closed_form() {
        for t in 0..=5 {
            let quad = expected_beta_entropy_quadrature(t);
            let exact = expected_beta_entropy(t);
            assert!((quad - exact).abs() < 1e-8, "t={t}: {quad} vs {exact}");
        }
    }

    #[test]
    fn hoelder_reference_value() {
        let c = hoelder_constant(0.99).unwrap();
        assert!((c - 37.61).abs() <= 0.05, "C_0.99 = {c}");
    }

    #[test]
    fn hoelder_half_is_exactly_one() {
        // ∫_0^1 (ln t + 1)^2 dt = 2 - 2 + 1 = 1, so C_{1/2} = 1.
        let c = hoelder_constant(0.5).unwrap();
        assert!((c - 1.0).abs() < 1e-6, "C_0.5 = {c}");
    }

    #[test]
    fn hoelder_monotone_near_one() {
        let lo = hoelder_constant(0.9).unwrap();
        let hi = hoelder_constant(0.99).unwrap();
        assert!(lo < hi);
        assert!((lo - 4.097_763_198_887_649).abs() < 1e-3);
    }

    #[test]
    fn hoelder_rejects_bad_exponent() {
        assert!(hoelder_constant(0.0).is_err());
        assert!(hoelder_constant(1.0).is_err());
        assert!(hoelder_constant(-0.5).is_err());
    }
}
