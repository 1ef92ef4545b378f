//! Seminorm of an even function through the quadrant kernel
//! `4(x²+y²)/(x²−y²)²`.
//!
//! For support `[−R, R]` the exterior part `y > R` is integrated in closed
//! form, leaving
//!
//! `[u]^p = 8∫_0^R∫_0^x |u(x)−u(y)|^p K(x,y) dy dx + 8∫_0^R |u(y)|^p R/(R²−y²) dy`.

use std::cell::RefCell;

use crate::constants::Params;
use crate::error::{Error, Result};
use crate::function_models::FunctionModel;
use crate::quadrature::{integrate, Estimate, QuadratureSpec, Tolerance};

use super::piecewise::Power;

fn check_even<F: FunctionModel + ?Sized>(u: &F, r: f64) -> Result<Vec<f64>> {
    let mut kinks: Vec<f64> = u
        .breakpoints()
        .into_iter()
        .map(f64::abs)
        .filter(|&x| x > 0.0 && x < r)
        .collect();
    kinks.push(0.0);
    kinks.push(r);
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();
    let mut probes = kinks.clone();
    probes.extend(kinks.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let scale = probes.iter().map(|&x| u.eval(x).abs()).fold(0.0, f64::max);
    for &x in &probes {
        if (u.eval(x) - u.eval(-x)).abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::input(format!(
                "function is not even (u({x}) ≠ u({}))",
                -x
            )));
        }
    }
    Ok(kinks)
}

/// `[u]^p` for even `u` with bounded support.
pub fn gagliardo_p_radial<F: FunctionModel + ?Sized>(
    u: &F,
    params: Params,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let (a, r) = u.support();
    if !(r > 0.0 && r.is_finite()) || (a + r).abs() > 1e-12 * r {
        return Err(Error::input(format!(
            "radial evaluation needs a bounded support symmetric about 0, got [{a}, {r}]"
        )));
    }
    let kinks = check_even(u, r)?;
    let p = params.p();
    let pw = Power::new(p);
    let inner_tol = Tolerance::from(&spec.tightened(1e-2));
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let worst_inner = RefCell::new(0.0f64);

    let outer = |x: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        // Integrand at y = x − d.
        let f = |d: f64| {
            let du = u.backward_difference(x, d);
            if du == 0.0 {
                0.0
            } else {
                let y = x - d;
                let sum = x + y;
                pw.apply(du) * (x * x + y * y) / (d * d * sum * sum)
            }
        };
        // y = x − t^k, with k(p−1) = 1 for p < 2, so that |u(x)−u(y)|^p K
        // stays bounded on the diagonal and kinks close to x spread out.
        let k = if p < 2.0 { 1.0 / (p - 1.0) } else { 1.0 };
        let mut breaks: Vec<f64> = kinks
            .iter()
            .filter(|&&z| z < x)
            .map(|&z| (x - z).powf(1.0 / k))
            .collect();
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
        let inner = integrate(
            |t: f64| k * t.powf(k - 1.0) * f(t.powf(k).min(x)),
            &breaks,
            inner_tol,
            &format!("radial inner integral at x = {x}"),
        );
        match inner {
            Ok(est) => {
                let mut w = worst_inner.borrow_mut();
                *w = w.max(est.abs_err);
                est.value
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let body = integrate(
        outer,
        &kinks,
        Tolerance::from(spec),
        "radial outer integral",
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let body = body?;
    let exterior = integrate(
        |y: f64| pw.apply(u.eval(y)) * r / ((r - y) * (r + y)),
        &kinks,
        Tolerance::from(spec),
        "radial exterior integral",
    )?;
    let inner_err = worst_inner.into_inner() * r;
    Ok((Estimate::new(body.value, body.abs_err + inner_err) + exterior).scale(8.0))
}
