use num_complex::Complex64;

use super::{BiPoly, PolyError, Var};

pub const DEFAULT_NEWTON_TOL: f64 = 1e-13;
pub const DEFAULT_NEWTON_MAX_ITER: usize = 50;
/// Below this `|det J|` a Newton step is refused.
pub const SINGULAR_GUARD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    /// Best iterate found (smallest residual).
    pub point: [Complex64; 2],
    /// `max(|f1|, |f2|)` at `point`.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Residual at each visited iterate, starting with `x0`.
    pub history: Vec<f64>,
}

/// Two-dimensional Newton iteration for `f1 = f2 = 0` over ℂ².
///
/// Stops as soon as the residual drops to `tol`. If the iteration budget runs
/// out first, the best iterate is returned with `converged == false`.
pub fn newton_polish2(
    f1: &BiPoly,
    f2: &BiPoly,
    x0: [Complex64; 2],
    tol: f64,
    max_iter: usize,
) -> Result<NewtonOutcome, PolyError> {
    let d11 = f1.partial(Var::Z1);
    let d12 = f1.partial(Var::Z2);
    let d21 = f2.partial(Var::Z1);
    let d22 = f2.partial(Var::Z2);

    let mut x = x0;
    let mut history = Vec::new();
    let mut best = (x0, f64::INFINITY);
    let mut iterations = 0;

    loop {
        let v = [f1.eval(x), f2.eval(x)];
        let r = v[0].norm().max(v[1].norm());
        history.push(r);
        if r < best.1 {
            best = (x, r);
        }
        if r <= tol {
            return Ok(NewtonOutcome {
                point: x,
                residual: r,
                converged: true,
                iterations,
                history,
            });
        }
        if iterations == max_iter || !r.is_finite() {
            break;
        }
        let (a, b, c, d) = (d11.eval(x), d12.eval(x), d21.eval(x), d22.eval(x));
        let det = a * d - b * c;
        if det.norm() < SINGULAR_GUARD {
            return Err(PolyError::SingularJacobian {
                det: det.norm(),
                residual: r,
            });
        }
        x[0] -= (d * v[0] - b * v[1]) / det;
        x[1] -= (a * v[1] - c * v[0]) / det;
        iterations += 1;
    }

    Ok(NewtonOutcome {
        point: best.0,
        residual: best.1,
        converged: false,
        iterations,
        history,
    })
}
