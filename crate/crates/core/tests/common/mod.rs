//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use netshare::quadrature::{integrate, QuadOptions};
use netshare::specfun::hyp2f1_series;

/// `2F1(-d, 1; 1 - d; w) = 1 + d/(1-d) int_0^1 (-w) / (1 - w v^(1/(1-d))) dv`.
pub fn euler_oracle(alpha: f64, w: f64) -> f64 {
    let d = 2.0 / alpha;
    let p = 1.0 / (1.0 - d);
    let knee = (-w).powf(-1.0 / p);
    let mut points = vec![0.0];
    for e in -6..=3 {
        let v = knee * 10f64.powi(e);
        if v < 1.0 {
            points.push(v);
        }
    }
    points.push(1.0);
    let opts = QuadOptions {
        rel_tol: 2e-13,
        abs_tol: 0.0,
        max_subdivisions: 4000,
    };
    let q = integrate(|v: f64| Ok(-w / (1.0 - w * v.powf(p))), &points, &opts).unwrap();
    1.0 + d / (1.0 - d) * q.value
}

/// Pfaff image `(1 - w)^-1 2F1(1, 1; 1 - d; w / (w - 1))` summed term by term.
pub fn pfaff_series(alpha: f64, w: f64) -> f64 {
    let d = 2.0 / alpha;
    let u = w / (w - 1.0);
    let terms = (60.0 / (1.0 - u)).ceil() as usize + 200;
    hyp2f1_series(1.0, 1.0, 1.0 - d, u, terms).unwrap() / (1.0 - w)
}
