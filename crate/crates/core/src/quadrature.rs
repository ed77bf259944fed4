//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The integrator keeps a list of panels and always bisects the panel with
//! the largest error estimate, in the style of QUADPACK's `qag`. Semi-infinite
//! ranges are mapped to `[0, 1)` with `x = a + t / (1 - t)`.

use crate::error::{Error, Result};

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of one quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One Kronrod panel: returns the 15-point value and `|K15 - G7|`.
pub fn gk15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate { value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { rel_tol: 1e-10, abs_tol: 1e-300, max_panels: 2000 }
    }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl Quadrature {
    pub fn new(rel_tol: f64) -> Self {
        Quadrature { rel_tol, ..Default::default() }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_points(f, &[a, b])
    }

    /// Integrates over `points[0]..points[last]` with the interior points as
    /// initial panel boundaries.
    pub fn integrate_points<F: FnMut(f64) -> f64>(&self, mut f: F, points: &[f64]) -> Result<Estimate> {
        assert!(points.len() >= 2, "need at least two break points");
        let (lo, hi) = (points[0], points[points.len() - 1]);
        if lo == hi {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let mut panels: Vec<Panel> = points
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| Panel { a: w[0], b: w[1], est: gk15(&mut f, w[0], w[1]) })
            .collect();

        loop {
            let value: f64 = panels.iter().map(|p| p.est.value).sum();
            let error: f64 = panels.iter().map(|p| p.est.error).sum();
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target {
                return Ok(Estimate { value, error });
            }
            if panels.len() >= self.max_panels {
                return Err(Error::QuadratureNonConvergence { a: lo, b: hi, achieved: error });
            }
            let worst = panels
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.est.error.total_cmp(&y.1.est.error))
                .map(|(i, _)| i)
                .unwrap();
            let Panel { a, b, .. } = panels.swap_remove(worst);
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                // Panel cannot be split further in floating point.
                return Err(Error::QuadratureNonConvergence { a: lo, b: hi, achieved: error });
            }
            panels.push(Panel { a, b: mid, est: gk15(&mut f, a, mid) });
            panels.push(Panel { a: mid, b, est: gk15(&mut f, mid, b) });
        }
    }

    /// Integrates `f` over `[a, +inf)`.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64) -> Result<Estimate> {
        let g = |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let om = 1.0 - t;
            let x = a + t / om;
            let y = f(x);
            if y == 0.0 {
                0.0
            } else {
                y / (om * om)
            }
        };
        self.integrate_points(g, &[0.0, 0.5, 0.9, 0.99, 1.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact_on_one_panel() {
        // K15 integrates degree-22 polynomials exactly.
        let est = gk15(|x| x.powi(10), 0.0, 1.0);
        assert!((est.value - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let q = Quadrature::new(1e-12);
        let est = q.integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((est.value - exact).abs() / exact < 1e-11, "{} vs {}", est.value, exact);
    }

    #[test]
    fn semi_infinite_exponential() {
        let q = Quadrature::new(1e-12);
        let est = q.integrate_to_infinity(|x| (-x).exp(), 2.0).unwrap();
        assert!((est.value - (-2.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn semi_infinite_power_tail() {
        let q = Quadrature::new(1e-12);
        let est = q.integrate_to_infinity(|x| 1.0 / (x * x), 3.0).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_integral_reports_nonconvergence() {
        let q = Quadrature { max_panels: 200, ..Quadrature::new(1e-12) };
        let err = q.integrate_to_infinity(|x| 1.0 / x, 1.0).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }
}
