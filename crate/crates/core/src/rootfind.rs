//! Scalar root finding: Newton steps guarded by a sign-change bracket.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootFindError {
    #[error("no sign change on [{lo}, {hi}] (f(lo)={f_lo:e}, f(hi)={f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("non-finite function value at x={x}")]
    NonFinite { x: f64 },

    #[error("iteration limit {iterations} reached at x={last_x} (|f|={residual:e})")]
    IterationLimit {
        iterations: usize,
        last_x: f64,
        residual: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Number of iterations where the Newton step was rejected in favour of bisection.
    pub bisections: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Stop when the bracket or the Newton step is narrower than this.
    pub x_tol: f64,
    /// Stop when |f(x)| is at most this.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            x_tol: 1e-10,
            f_tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` in `[lo, hi]` starting from `x0`.
///
/// The bracket is shrunk after every evaluation; a Newton step that leaves the
/// bracket, or fails to halve |f|, is replaced by the bracket midpoint, so the
/// iteration terminates even when `df` is poor.
pub fn safeguarded_newton<F, D>(
    f: F,
    df: D,
    lo: f64,
    hi: f64,
    x0: f64,
    opts: NewtonOptions,
) -> Result<Root, RootFindError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if !f_lo.is_finite() {
        return Err(RootFindError::NonFinite { x: lo });
    }
    if !f_hi.is_finite() {
        return Err(RootFindError::NonFinite { x: hi });
    }
    if f_lo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, iterations: 0, bisections: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, iterations: 0, bisections: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootFindError::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    let mut fx = f(x);
    let mut bisections = 0;
    for it in 1..=opts.max_iter {
        if !fx.is_finite() {
            return Err(RootFindError::NonFinite { x });
        }
        if fx.abs() <= opts.f_tol {
            return Ok(Root { x, residual: fx.abs(), iterations: it - 1, bisections });
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }

        let slope = df(x);
        let newton = x - fx / slope;
        let accept = slope.is_finite() && slope != 0.0 && newton > lo && newton < hi;
        let (next, step) = if accept {
            (newton, (newton - x).abs())
        } else {
            bisections += 1;
            let mid = 0.5 * (lo + hi);
            (mid, hi - lo)
        };
        let f_next = f(next);
        // Newton that does not at least halve the residual is treated as stalled.
        let (next, f_next) = if accept && f_next.abs() > 0.5 * fx.abs() {
            bisections += 1;
            let mid = 0.5 * (lo + hi);
            (mid, f(mid))
        } else {
            (next, f_next)
        };
        x = next;
        fx = f_next;

        if step <= opts.x_tol || hi - lo <= opts.x_tol {
            // Return whichever known point has the smallest residual.
            let best = [(x, fx), (lo, f_lo), (hi, f_hi)]
                .into_iter()
                .filter(|(_, v)| v.is_finite())
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .unwrap_or((x, fx));
            return Ok(Root { x: best.0, residual: best.1.abs(), iterations: it, bisections });
        }
    }
    Err(RootFindError::IterationLimit {
        iterations: opts.max_iter,
        last_x: x,
        residual: fx.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = safeguarded_newton(|x| x * x - 2.0, |x| 2.0 * x, 0.0, 2.0, 1.0, NewtonOptions::default())
            .unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bad_derivative_still_converges() {
        // Derivative deliberately wrong: the bracket carries the iteration.
        let r = safeguarded_newton(|x| x.powi(3) - 0.5, |_| 1e-30, 0.0, 1.0, 0.9, NewtonOptions::default())
            .unwrap();
        assert!((r.x - 0.5f64.cbrt()).abs() < 1e-9);
        assert!(r.bisections > 0);
    }

    #[test]
    fn no_sign_change() {
        let err = safeguarded_newton(|x| x * x + 1.0, |x| 2.0 * x, -1.0, 1.0, 0.0, NewtonOptions::default())
            .unwrap_err();
        assert!(matches!(err, RootFindError::NoSignChange { .. }));
    }

    #[test]
    fn root_at_endpoint() {
        let r = safeguarded_newton(|x| x, |_| 1.0, 0.0, 3.0, 1.0, NewtonOptions::default()).unwrap();
        assert_eq!(r.x, 0.0);
    }

    #[test]
    fn iteration_limit_reported() {
        let opts = NewtonOptions { x_tol: 0.0, f_tol: 0.0, max_iter: 3 };
        let err = safeguarded_newton(|x| x - 0.3, |_| 1e-30, 0.0, 1.0, 0.9, opts).unwrap_err();
        assert!(matches!(err, RootFindError::IterationLimit { iterations: 3, .. }));
    }
}
