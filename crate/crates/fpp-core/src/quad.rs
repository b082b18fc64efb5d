//! Double-exponential (tanh-sinh / exp-sinh) quadrature.
//!
//! Used for the stable-density integral and the Mittag-Leffler mixture
//! integrals, whose integrands have endpoint singularities or semi-infinite
//! support. Nodes cluster double-exponentially at the endpoints, so the
//! integrand receives its distance to each endpoint; computing that distance
//! from the node value itself would lose all precision.

use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

const T_MAX: f64 = 6.9;
const MAX_NODES_PER_SIDE: usize = 40_000;

/// Integrate `f` over the finite interval `(a, b)`.
///
/// `f(x, dist_a, dist_b)` receives the node and its exact distances to both
/// endpoints. `max_level` refinements double the node density each time.
pub(crate) fn tanh_sinh<F>(mut f: F, a: f64, b: f64, rel_tol: f64, max_level: u32) -> Quadrature
where
    F: FnMut(f64, f64, f64) -> f64,
{
    debug_assert!(b > a);
    let half = 0.5 * (b - a);
    let len = b - a;

    // g(t) = w(t) f(x(t)); nodes from the signed parameter t.
    let mut g = |t: f64| -> f64 {
        let y = FRAC_PI_2 * t.sinh();
        // distance from the endpoint that x is approaching
        let d_near = len / ((2.0 * y.abs()).exp() + 1.0);
        if d_near == 0.0 {
            return 0.0;
        }
        let cosh_y = y.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cosh_y * cosh_y);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let (x, da, db) = if t >= 0.0 {
            (b - d_near, len - d_near, d_near)
        } else {
            (a + d_near, d_near, len - d_near)
        };
        w * f(x, da, db)
    };

    let mut h = 1.0;
    // level 0: all integer nodes
    let mut raw = g(0.0);
    for sign in [1.0, -1.0] {
        let mut dead = 0;
        let mut prev = f64::INFINITY;
        let mut j = 1;
        while (j as f64) * h <= T_MAX && j < MAX_NODES_PER_SIDE {
            let v = g(sign * (j as f64) * h);
            raw += v;
            // only a declining run counts as tail: a small value on the way
            // up to a far-off peak must not stop the walk
            if v.abs() <= 1e-18 * raw.abs() + 1e-305 && v.abs() <= prev {
                dead += 1;
                if dead >= 3 && j >= 4 {
                    break;
                }
            } else {
                dead = 0;
            }
            prev = v.abs();
            j += 1;
        }
    }
    let mut value = h * raw;
    let mut abs_error = f64::INFINITY;
    let mut prev_ok = false;

    for level in 1..=max_level {
        h *= 0.5;
        let mut new_raw = 0.0;
        for sign in [1.0, -1.0] {
            let mut dead = 0;
            let mut prev = f64::INFINITY;
            let mut j = 1; // odd multiples of h only
            while (j as f64) * h <= T_MAX && j < 2 * MAX_NODES_PER_SIDE {
                let v = g(sign * (j as f64) * h);
                new_raw += v;
                if (h * v).abs() <= 1e-18 * value.abs() + 1e-305 && v.abs() <= prev {
                    dead += 1;
                    if dead >= 3 && j >= 8 {
                        break;
                    }
                } else {
                    dead = 0;
                }
                prev = v.abs();
                j += 2;
            }
        }
        raw += new_raw;
        let new_value = h * raw;
        abs_error = (new_value - value).abs();
        value = new_value;
        // a single small delta can be coincidental; insist on two in a row,
        // or one that clears the tolerance with a wide margin
        let ok = abs_error <= rel_tol * value.abs() + 1e-300;
        let emphatic = abs_error <= 0.05 * rel_tol * value.abs() + 1e-300;
        if level >= 3 && (emphatic || (ok && prev_ok)) {
            return Quadrature {
                value,
                abs_error,
                converged: true,
            };
        }
        prev_ok = ok;
    }
    // out of levels: judge the final delta on its own
    Quadrature {
        value,
        abs_error,
        converged: abs_error <= rel_tol * value.abs() + 1e-300,
    }
}

/// Integrate `f` over `(0, +inf)` with nodes centered around `scale`.
pub(crate) fn exp_sinh<F>(mut f: F, scale: f64, rel_tol: f64, max_level: u32) -> Quadrature
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(scale > 0.0 && scale.is_finite());
    let mut g = |t: f64| -> f64 {
        let y = FRAC_PI_2 * t.sinh();
        if y > 700.0 {
            return 0.0;
        }
        let x = scale * y.exp();
        if x == 0.0 {
            return 0.0;
        }
        let w = x * FRAC_PI_2 * t.cosh();
        if !w.is_finite() {
            return 0.0;
        }
        w * f(x)
    };

    let mut h = 1.0;
    let mut raw = g(0.0);
    for sign in [1.0, -1.0] {
        let mut dead = 0;
        let mut prev = f64::INFINITY;
        let mut j = 1;
        while (j as f64) * h <= T_MAX && j < MAX_NODES_PER_SIDE {
            let v = g(sign * (j as f64) * h);
            raw += v;
            // only a declining run counts as tail: a small value on the way
            // up to a far-off peak must not stop the walk
            if v.abs() <= 1e-18 * raw.abs() + 1e-305 && v.abs() <= prev {
                dead += 1;
                if dead >= 3 && j >= 4 {
                    break;
                }
            } else {
                dead = 0;
            }
            prev = v.abs();
            j += 1;
        }
    }
    let mut value = h * raw;
    let mut abs_error = f64::INFINITY;
    let mut prev_ok = false;

    for level in 1..=max_level {
        h *= 0.5;
        let mut new_raw = 0.0;
        for sign in [1.0, -1.0] {
            let mut dead = 0;
            let mut prev = f64::INFINITY;
            let mut j = 1;
            while (j as f64) * h <= T_MAX && j < 2 * MAX_NODES_PER_SIDE {
                let v = g(sign * (j as f64) * h);
                new_raw += v;
                if (h * v).abs() <= 1e-18 * value.abs() + 1e-305 && v.abs() <= prev {
                    dead += 1;
                    if dead >= 3 && j >= 8 {
                        break;
                    }
                } else {
                    dead = 0;
                }
                prev = v.abs();
                j += 2;
            }
        }
        raw += new_raw;
        let new_value = h * raw;
        abs_error = (new_value - value).abs();
        value = new_value;
        // a single small delta can be coincidental; insist on two in a row,
        // or one that clears the tolerance with a wide margin
        let ok = abs_error <= rel_tol * value.abs() + 1e-300;
        let emphatic = abs_error <= 0.05 * rel_tol * value.abs() + 1e-300;
        if level >= 3 && (emphatic || (ok && prev_ok)) {
            return Quadrature {
                value,
                abs_error,
                converged: true,
            };
        }
        prev_ok = ok;
    }
    // out of levels: judge the final delta on its own
    Quadrature {
        value,
        abs_error,
        converged: abs_error <= rel_tol * value.abs() + 1e-300,
    }
}
