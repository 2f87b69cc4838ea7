//! Safeguarded Newton iteration for monotone scalar equations.
//!
//! Every thermodynamic inversion in this crate solves `f(x) = target` where
//! `f` is strictly increasing on a known bracket. Newton steps are taken
//! whenever they land strictly inside the current bracket; otherwise the
//! iteration falls back to bisection, so convergence never depends on the
//! quality of the initial guess.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("bracket [{lo}, {hi}] does not enclose a root (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    MaxIterations { iterations: usize, last: f64 },
    #[error("non-finite residual at x = {x}")]
    NotFinite { x: f64 },
}

pub const MAX_ITERATIONS: usize = 200;

/// Solves `g(x) = 0` for a strictly increasing `g` on `[lo, hi]`.
///
/// `g` returns the residual and its derivative. The endpoints are not
/// evaluated; callers that cannot guarantee a sign change should use
/// [`solve_increasing_checked`].
pub fn solve_increasing<G>(
    mut g: G,
    mut lo: f64,
    mut hi: f64,
    guess: f64,
    rtol: f64,
) -> Result<f64, RootError>
where
    G: FnMut(f64) -> (f64, f64),
{
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..MAX_ITERATIONS {
        let (r, dr) = g(x);
        if !r.is_finite() {
            return Err(RootError::NotFinite { x });
        }
        if r == 0.0 {
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - r / dr;
        let next = if dr > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= rtol * next.abs() || hi - lo <= rtol * hi.abs() {
            return Ok(next);
        }
        x = next;
    }
    Err(RootError::MaxIterations {
        iterations: MAX_ITERATIONS,
        last: x,
    })
}

/// Like [`solve_increasing`], but first confirms `g(lo) < 0 < g(hi)`.
pub fn solve_increasing_checked<G>(
    mut g: G,
    lo: f64,
    hi: f64,
    guess: f64,
    rtol: f64,
) -> Result<f64, RootError>
where
    G: FnMut(f64) -> (f64, f64),
{
    let (f_lo, _) = g(lo);
    let (f_hi, _) = g(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(RootError::NoBracket { lo, hi, f_lo, f_hi });
    }
    solve_increasing(g, lo, hi, guess, rtol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let r = solve_increasing_checked(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bad_guess_falls_back_to_bisection() {
        // Newton from x = 1e-9 on a cubic overshoots far outside the bracket.
        let r = solve_increasing(|x| (x.powi(3) - 8.0, 3.0 * x * x), 0.0, 100.0, 1e-9, 1e-14)
            .unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn missing_sign_change_is_reported() {
        let err = solve_increasing_checked(|x| (x + 10.0, 1.0), 0.0, 1.0, 0.5, 1e-12).unwrap_err();
        assert!(matches!(err, RootError::NoBracket { .. }));
    }

    #[test]
    fn flat_derivative_does_not_stall() {
        // Zero derivative at the guess forces bisection.
        let r = solve_increasing(|x| ((x - 1.0).powi(3), 3.0 * (x - 1.0).powi(2)), 0.0, 3.0, 1.0 + 1e-300, 1e-12)
            .unwrap();
        assert!((r - 1.0).abs() < 1e-4);
    }
}
