//! Truncation control for the infinite binomial series in the closed forms.

use serde::{Deserialize, Serialize};

/// Stops a series once `|term| < rel_tol * |partial sum|` or after `max_terms`
/// terms, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_terms: 50,
            rel_tol: 1e-9,
        }
    }
}

impl SeriesControl {
    pub fn with_max_terms(max_terms: usize) -> Self {
        SeriesControl {
            max_terms,
            ..Default::default()
        }
    }
}

/// A truncated series value with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
    pub converged: bool,
}

/// Sums `term(k)` for `k = start, start+1, ...` under `ctrl`.
///
/// A term that is exactly zero ends the sum: every series in this crate has
/// terms that vanish identically from that point on (integer binomial upper
/// index, or an exponential that has underflowed).
pub fn sum_series<F>(start: usize, ctrl: &SeriesControl, mut term: F) -> SeriesSum
where
    F: FnMut(usize) -> f64,
{
    let mut sum = 0.0;
    let mut terms = 0;
    for k in start..start + ctrl.max_terms {
        let t = term(k);
        terms += 1;
        if t == 0.0 {
            return SeriesSum {
                value: sum,
                terms,
                converged: true,
            };
        }
        sum += t;
        if t.abs() < ctrl.rel_tol * sum.abs() {
            return SeriesSum {
                value: sum,
                terms,
                converged: true,
            };
        }
    }
    SeriesSum {
        value: sum,
        terms,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_converges() {
        let s = sum_series(0, &SeriesControl::default(), |k| 0.5f64.powi(k as i32));
        assert!(s.converged);
        assert!((s.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn cap_is_reported() {
        let ctrl = SeriesControl::with_max_terms(5);
        let s = sum_series(1, &ctrl, |k| 1.0 / (k * k) as f64);
        assert_eq!(s.terms, 5);
        assert!(!s.converged);
    }

    #[test]
    fn zero_term_stops() {
        let s = sum_series(
            0,
            &SeriesControl::default(),
            |k| if k < 3 { 1.0 } else { 0.0 },
        );
        assert_eq!(s.value, 3.0);
        assert_eq!(s.terms, 4);
    }
}
