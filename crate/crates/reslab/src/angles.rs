use std::f64::consts::{PI, TAU};

/// Reduce to the half-open interval `(-pi, pi]`.
pub fn wrap(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Continuous unwrapping of a sequence of wrapped angles.
pub fn unwrap(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &x in xs {
        if let Some(p) = prev {
            let mut d = x - p;
            while d > PI {
                d -= TAU;
                offset -= TAU;
            }
            while d < -PI {
                d += TAU;
                offset += TAU;
            }
        }
        prev = Some(x);
        out.push(x + offset);
    }
    out
}
