//! Ellipsoid method for maximizing a concave, possibly nondifferentiable
//! function.
//!
//! The oracle returns the value and a supergradient `s` at a point, i.e.
//! `g(y) <= g(x) + s.(y - x)` for all `y`. Minimizing a convex `h` is the
//! same as maximizing `-h` with `s = -subgradient(h)`.
//!
//! Each objective step uses a deep cut at the best value seen so far, which
//! keeps every maximizer inside the ellipsoid. The quantity
//! `g(x) + sqrt(s' P s)` bounds the maximum from above, so the gap between the
//! best value and the smallest such bound is a rigorous stopping test.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// What the oracle reports at a query point.
#[derive(Clone, Debug, PartialEq)]
pub enum Eval<T> {
    /// Point is feasible; `value = g(x)` and `supergrad` as above.
    Point { value: T, supergrad: Vec<T> },
    /// Point is infeasible; every feasible `y` satisfies
    /// `normal.(y - x) >= depth` with `depth >= 0`.
    Infeasible { normal: Vec<T>, depth: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidSettings<T> {
    pub max_iter: usize,
    /// Stop once the log-volume ratio falls below `ln(min_volume_ratio)`.
    /// Zero disables the volume test.
    pub min_volume_ratio: T,
    /// Stop when `upper_bound - best <= abs_tol + rel_tol * |best|`.
    pub abs_tol: T,
    pub rel_tol: T,
    /// Add feasibility cuts that keep every coordinate nonnegative.
    pub nonneg: bool,
    pub record_trace: bool,
}

impl<T: Scalar> EllipsoidSettings<T> {
    /// Defaults for dimension `n`: `500 n^2` iterations and volume ratio 1e-12.
    pub fn for_dim(n: usize) -> Self {
        Self {
            max_iter: 500 * n.max(1) * n.max(1),
            min_volume_ratio: T::lit(1e-12).max(T::min_positive_value()),
            abs_tol: T::zero(),
            rel_tol: T::lit(1e-10).max(T::epsilon() * T::lit(8.0)),
            nonneg: false,
            record_trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// The certified gap met the tolerance.
    Gap,
    /// The ellipsoid volume shrank below the configured ratio.
    Volume,
    /// The deep cut left no point better than the incumbent.
    EmptyCut,
    MaxIter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry<T> {
    pub iteration: usize,
    pub value: Option<T>,
    pub best: Option<T>,
    pub upper_bound: T,
    pub log_volume_ratio: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidResult<T> {
    pub x: Vec<T>,
    pub value: T,
    /// Smallest certified upper bound on the maximum.
    pub upper_bound: T,
    pub iterations: usize,
    pub stop: StopReason,
    pub trace: Vec<TraceEntry<T>>,
}

/// Maximizes a concave function starting from the ball of radius
/// `init_radius` around `init_center`.
pub fn ellipsoid_maximize<T: Scalar>(
    mut oracle: impl FnMut(&[T]) -> Result<Eval<T>>,
    init_center: &[T],
    init_radius: T,
    settings: &EllipsoidSettings<T>,
) -> Result<EllipsoidResult<T>> {
    let n = init_center.len();
    if n == 0 {
        return Err(Error::Shape("ellipsoid dimension must be positive".into()));
    }
    if !(init_radius > T::zero()) {
        return Err(Error::Domain("ellipsoid radius must be positive".into()));
    }
    let nt = T::from_usize(n).unwrap();
    let mut x = init_center.to_vec();
    let mut p = vec![T::zero(); n * n];
    for i in 0..n {
        p[i * n + i] = init_radius * init_radius;
    }
    let mut pe = vec![T::zero(); n];
    let mut best_x: Option<Vec<T>> = None;
    let mut best = T::neg_infinity();
    let mut upper = T::infinity();
    let mut log_vol = T::zero();
    let log_min_vol = if settings.min_volume_ratio > T::zero() {
        settings.min_volume_ratio.ln()
    } else {
        T::neg_infinity()
    };
    let mut trace = Vec::new();
    let mut stop = StopReason::MaxIter;
    let mut iterations = 0;

    while iterations < settings.max_iter {
        iterations += 1;
        // Pick the cut: nonnegativity first, then the oracle.
        let mut cut: Option<(Vec<T>, T)> = None;
        let mut value = None;
        if settings.nonneg {
            let (imin, &xmin) = x
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap();
            if xmin < T::zero() {
                let mut e = vec![T::zero(); n];
                e[imin] = T::one();
                cut = Some((e, -xmin));
            }
        }
        if cut.is_none() {
            match oracle(&x)? {
                Eval::Point { value: v, supergrad } => {
                    if supergrad.len() != n {
                        return Err(Error::Shape("supergradient length".into()));
                    }
                    if !v.is_finite() {
                        return Err(Error::Numeric(format!("oracle value {v}")));
                    }
                    value = Some(v);
                    if v > best {
                        best = v;
                        best_x = Some(x.clone());
                    }
                    let sps = quad_form(&p, &supergrad, &mut pe);
                    if !(sps >= T::zero()) || !sps.is_finite() {
                        return Err(degenerate(iterations, best));
                    }
                    let bound = v + sps.sqrt();
                    if bound < upper {
                        upper = bound;
                    }
                    if sps == T::zero() {
                        // Zero supergradient: x is a maximizer.
                        upper = best;
                        stop = StopReason::Gap;
                        break;
                    }
                    cut = Some((supergrad, best - v));
                }
                Eval::Infeasible { normal, depth } => {
                    if normal.len() != n {
                        return Err(Error::Shape("cut normal length".into()));
                    }
                    cut = Some((normal, depth.pos()));
                }
            }
        }
        let gap_ok = upper - best <= settings.abs_tol + settings.rel_tol * best.abs();
        if settings.record_trace {
            trace.push(TraceEntry {
                iteration: iterations,
                value,
                best: best_x.as_ref().map(|_| best),
                upper_bound: upper,
                log_volume_ratio: log_vol,
            });
        }
        if best_x.is_some() && gap_ok {
            stop = StopReason::Gap;
            break;
        }

        // Keep {y : c.(y - x) >= h}.
        let (c, h) = cut.unwrap();
        let cpc = quad_form(&p, &c, &mut pe);
        if !(cpc > T::zero()) || !cpc.is_finite() {
            return Err(degenerate(iterations, best));
        }
        let s = cpc.sqrt();
        let alpha = h / s;
        if alpha >= T::one() {
            if best_x.is_some() {
                upper = upper.min(best);
                stop = StopReason::EmptyCut;
                break;
            }
            return Err(Error::Numeric(
                "feasible region excluded from the ellipsoid".into(),
            ));
        }
        let one = T::one();
        if n == 1 {
            let tau = (one + alpha) / T::lit(2.0);
            x[0] += tau * pe[0] / s;
            let shrink = (one - alpha) * (one - alpha) / T::lit(4.0);
            p[0] *= shrink;
            log_vol += shrink.ln() / T::lit(2.0);
        } else {
            let tau = (one + nt * alpha) / (nt + one);
            let delta = nt * nt * (one - alpha * alpha) / (nt * nt - one);
            let sigma = T::lit(2.0) * (one + nt * alpha) / ((nt + one) * (one + alpha));
            for i in 0..n {
                x[i] += tau * pe[i] / s;
            }
            let scale = sigma / cpc;
            for i in 0..n {
                for j in i..n {
                    let v = delta * (p[i * n + j] - scale * pe[i] * pe[j]);
                    p[i * n + j] = v;
                    p[j * n + i] = v;
                }
                if !(p[i * n + i] > T::zero()) {
                    return Err(degenerate(iterations, best));
                }
            }
            log_vol += (nt * delta.ln() + (one - sigma).ln()) / T::lit(2.0);
        }
        if log_vol < log_min_vol && best_x.is_some() {
            stop = StopReason::Volume;
            break;
        }
    }

    let x = best_x.ok_or_else(|| {
        Error::Numeric("ellipsoid never reached a feasible point".into())
    })?;
    Ok(EllipsoidResult {
        x,
        value: best,
        upper_bound: upper.max(best),
        iterations,
        stop,
        trace,
    })
}

fn degenerate<T: Scalar>(iterations: usize, best: T) -> Error {
    Error::Degenerate {
        iterations,
        best_value: best.as_f64(),
    }
}

/// Returns `c' P c` and stores `P c` in `out`.
fn quad_form<T: Scalar>(p: &[T], c: &[T], out: &mut [T]) -> T {
    let n = c.len();
    let mut acc = T::zero();
    for i in 0..n {
        let row = &p[i * n..(i + 1) * n];
        let v: T = row.iter().zip(c).map(|(&a, &b)| a * b).sum();
        out[i] = v;
        acc += v * c[i];
    }
    acc
}
