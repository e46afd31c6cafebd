//! Small numerical kernels: the adaptive quadrature used as the independent
//! oracle for every closed-form mass in this crate, a uniform-grid rule for
//! smooth periodic integrands, and log-domain volume factors.

use statrs::function::gamma::ln_gamma;

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// This is the crate's reference integrator: closed-form masses elsewhere are
/// cross-checked against it, so it deliberately shares no code with them.
/// `tol` is an absolute error target; subdivision follows the classical
/// Richardson estimate |S_left + S_right - S| / 15.
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
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }

    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Trapezoidal rule on a uniform grid over `[a, b]` with `points` nodes
/// (`points >= 2`). For smooth integrands that are periodic over `[a, b]`
/// this converges spectrally, which is why the Sobolev norms use it.
pub fn uniform_trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    assert!(points >= 2, "trapezoid rule needs at least two nodes");
    let h = (b - a) / (points - 1) as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for k in 1..points - 1 {
        sum += f(a + h * k as f64);
    }
    sum * h
}

/// Natural log of the volume of the odd sphere S^{2d-1}, i.e. log(2 pi^d / (d-1)!).
pub fn ln_odd_sphere_volume(d: u32) -> f64 {
    assert!(d >= 1);
    std::f64::consts::LN_2 + d as f64 * std::f64::consts::PI.ln() - ln_gamma(d as f64)
}

/// Natural log of n! via the log-gamma function.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}
