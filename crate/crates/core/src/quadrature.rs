//! Globally adaptive Gauss–Kronrod (7/15) integration on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
    #[error("no convergence after {intervals} intervals (estimate {estimate}, error {error:e})")]
    NoConvergence {
        intervals: usize,
        estimate: f64,
        error: f64,
    },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

// Kronrod nodes (positive half, descending) and weights, plus the embedded
// 7-point Gauss weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };
    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (k, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let s = eval(center - dx)? + eval(center + dx)?;
        kronrod += wk * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

impl Quadrature {
    /// Integrates `f` over `[a, b]` until the summed error estimate drops below
    /// `abs_tol`, always bisecting the segment with the largest error.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral, QuadratureError> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(QuadratureError::InvalidInterval(a, b));
        }
        if a == b {
            return Ok(Integral {
                value: 0.0,
                error: 0.0,
                intervals: 0,
            });
        }
        let mut heap = BinaryHeap::new();
        let first = gk15(&f, a, b)?;
        let mut value = first.value;
        let mut error = first.error;
        heap.push(first);
        while error > self.abs_tol {
            if heap.len() >= self.max_intervals {
                return Err(QuadratureError::NoConvergence {
                    intervals: heap.len(),
                    estimate: value,
                    error,
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // segment cannot be split further in f64
                return Err(QuadratureError::NoConvergence {
                    intervals: heap.len() + 1,
                    estimate: value,
                    error,
                });
            }
            let left = gk15(&f, worst.a, mid)?;
            let right = gk15(&f, mid, worst.b)?;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            // refresh the running sums now and then to stop drift
            if heap.len() % 64 == 0 {
                value = heap.iter().map(|s| s.value).sum();
                error = heap.iter().map(|s| s.error).sum();
            }
        }
        let value = heap.iter().map(|s| s.value).sum();
        let error = heap.iter().map(|s| s.error).sum();
        Ok(Integral {
            value,
            error,
            intervals: heap.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = Quadrature::default();
        let r = q.integrate(|x| 3.0 * x * x, 0.0, 2.0).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn oscillatory() {
        let r = Quadrature::default()
            .integrate(|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI)
            .unwrap();
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^-0.5 dx = 2
        let r = Quadrature::default().integrate(|x| x.powf(-0.5), 1e-30, 1.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn errors() {
        let q = Quadrature::default();
        assert!(matches!(
            q.integrate(|x| x, 1.0, 0.0),
            Err(QuadratureError::InvalidInterval(..))
        ));
        assert!(matches!(
            q.integrate(|_| f64::NAN, 0.0, 1.0),
            Err(QuadratureError::NonFinite(_))
        ));
        let tight = Quadrature {
            abs_tol: 0.0,
            max_intervals: 8,
        };
        assert!(matches!(
            tight.integrate(|x| x.powf(-0.9), 1e-300, 1.0),
            Err(QuadratureError::NoConvergence { .. })
        ));
        assert_eq!(q.integrate(|x| x, 1.0, 1.0).unwrap().value, 0.0);
    }
}
