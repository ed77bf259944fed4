//! Dormand-Prince 5(4) with Hairer's continuous extension.
//!
//! The stepper is driven one accepted step at a time so callers can inspect
//! every step (sign changes, stopping rules) and keep the dense-output
//! coefficients they need.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and budget for an adaptive run.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rel_tol: 1e-10, abs_tol: 1e-14, h_max: f64::INFINITY, h_min: 0.0, max_steps: 1_000_000 }
    }
}

/// Continuous extension of one accepted step on `[t0, t0 + h]`.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.rcont[0]
    }

    pub fn end(&self) -> [f64; N] {
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = self.rcont[0][i] + self.rcont[1][i];
        }
        y
    }

    /// Fourth-order interpolant at `t ∈ [t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
        }
        y
    }

    pub fn eval_component(&self, t: f64, i: usize) -> f64 {
        let s = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let r = &self.rcont;
        r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])))
    }
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// Adaptive DOPRI5 stepper for `y' = f(t, y)`.
pub struct Dopri5<const N: usize, F> {
    f: F,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    pub control: StepControl,
    pub accepted: usize,
    pub rejected: usize,
    last_rejected: bool,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], control: StepControl) -> Self {
        let k1 = f(t0, &y0);
        let mut s = Dopri5 { f, t: t0, y: y0, k1, h: 0.0, control, accepted: 0, rejected: 0, last_rejected: false };
        s.h = s.initial_step();
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn set_step_size(&mut self, h: f64) {
        self.h = h;
    }

    fn scale(&self, a: &[f64; N], b: &[f64; N], i: usize) -> f64 {
        self.control.abs_tol + self.control.rel_tol * a[i].abs().max(b[i].abs())
    }

    // Hairer's starting step heuristic.
    fn initial_step(&mut self) -> f64 {
        let y0 = self.y;
        let f0 = self.k1;
        let (mut dnf, mut dny) = (0.0, 0.0);
        for i in 0..N {
            let sk = self.scale(&y0, &y0, i);
            dnf += (f0[i] / sk).powi(2);
            dny += (y0[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * (dny / dnf).sqrt() };
        h = h.min(self.control.h_max);
        let y1 = axpy(&y0, &[(h, &f0)]);
        let f1 = (self.f)(self.t + h, &y1);
        let mut der2 = 0.0;
        for i in 0..N {
            der2 += ((f1[i] - f0[i]) / self.scale(&y0, &y0, i)).powi(2);
        }
        let der2 = der2.sqrt() / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
        (100.0 * h).min(h1).min(self.control.h_max)
    }

    /// Attempts one step of size `h`; returns the error norm and the step.
    fn attempt(&mut self, h: f64) -> (f64, DenseStep<N>, [f64; N]) {
        let (t, y, k1) = (self.t, self.y, self.k1);
        let f = &mut self.f;
        let k2 = f(t + C2 * h, &axpy(&y, &[(h * A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(&y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]));
        let y6 = axpy(&y, &[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)]);
        let k6 = f(t + h, &y6);
        let y1 = axpy(&y, &[(h * A71, &k1), (h * A73, &k3), (h * A74, &k4), (h * A75, &k5), (h * A76, &k6)]);
        let k7 = f(t + h, &y1);

        let mut err = 0.0;
        let mut rcont = [[0.0; N]; 5];
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = self.control.abs_tol + self.control.rel_tol * y[i].abs().max(y1[i].abs());
            err += (e / sk).powi(2);

            let dy = y1[i] - y[i];
            let bspl = h * k1[i] - dy;
            rcont[0][i] = y[i];
            rcont[1][i] = dy;
            rcont[2][i] = bspl;
            rcont[3][i] = dy - h * k7[i] - bspl;
            rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let err = (err / N as f64).sqrt();
        (err, DenseStep { t0: t, h, rcont }, k7)
    }

    /// Takes one accepted adaptive step, never stepping past `t_max`.
    pub fn step(&mut self, t_max: f64) -> Result<DenseStep<N>> {
        loop {
            if self.accepted + self.rejected >= self.control.max_steps {
                return Err(Error::MaxStepsExceeded { max_steps: self.control.max_steps, r: self.t });
            }
            let mut h = self.h.min(self.control.h_max);
            let remaining = t_max - self.t;
            let clipped = h >= remaining;
            if clipped {
                h = remaining;
            }
            if !(h > self.control.h_min) || self.t + h == self.t {
                return Err(Error::StepSizeUnderflow { r: self.t, h });
            }
            let (err, dense, k7) = self.attempt(h);
            if err.is_finite() && err <= 1.0 {
                let mut fac = if err == 0.0 { 10.0 } else { 0.9 * err.powf(-0.2) };
                fac = fac.clamp(0.2, 10.0);
                if self.last_rejected {
                    fac = fac.min(1.0);
                }
                self.t = if clipped { t_max } else { self.t + h };
                self.y = dense.end();
                self.k1 = k7;
                // Keep the controller's proposal when the step was clipped to t_max.
                if !clipped || h * fac > self.h {
                    self.h = h * fac;
                }
                self.accepted += 1;
                self.last_rejected = false;
                return Ok(dense);
            }
            self.rejected += 1;
            self.last_rejected = true;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
            self.h = h * fac;
        }
    }

    /// Takes exactly one step of size `h` with no error control.
    pub fn step_fixed(&mut self, h: f64) -> DenseStep<N> {
        let (_, dense, k7) = self.attempt(h);
        self.t += h;
        self.y = dense.end();
        self.k1 = k7;
        self.accepted += 1;
        dense
    }

    /// Restarts from a new state (e.g. after a discontinuous correction).
    pub fn reset(&mut self, t: f64, y: [f64; N]) {
        self.t = t;
        self.y = y;
        self.k1 = (self.f)(t, &y);
        self.last_rejected = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_t: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_oscillator_adaptive() {
        let ctl = StepControl { rel_tol: 1e-11, abs_tol: 1e-13, ..Default::default() };
        let mut s = Dopri5::new(oscillator, 0.0, [0.0, 1.0], ctl);
        let t_end = 20.0;
        while s.t() < t_end {
            s.step(t_end).unwrap();
        }
        assert_eq!(s.t(), t_end);
        assert!((s.y()[0] - t_end.sin()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_is_accurate_inside_steps() {
        let ctl = StepControl { rel_tol: 1e-10, abs_tol: 1e-12, ..Default::default() };
        let mut s = Dopri5::new(oscillator, 0.0, [0.0, 1.0], ctl);
        let mut worst: f64 = 0.0;
        while s.t() < 10.0 {
            let d = s.step(10.0).unwrap();
            assert_eq!(d.eval(d.t0), d.start());
            for k in 1..10 {
                let t = d.t0 + d.h * k as f64 / 10.0;
                worst = worst.max((d.eval(t)[0] - t.sin()).abs());
                assert_eq!(d.eval_component(t, 1), d.eval(t)[1]);
            }
        }
        assert!(worst < 1e-8, "dense error {worst}");
    }

    #[test]
    fn fixed_step_is_fifth_order() {
        let run = |n: usize| {
            let ctl = StepControl::default();
            let mut s = Dopri5::new(|_t, y: &[f64; 1]| [y[0]], 0.0, [1.0], ctl);
            let h = 1.0 / n as f64;
            for _ in 0..n {
                s.step_fixed(h);
            }
            (s.y()[0] - 1f64.exp()).abs()
        };
        let (e1, e2) = (run(10), run(20));
        let order = (e1 / e2).log2();
        assert!(order > 4.7, "observed order {order}");
    }

    #[test]
    fn step_budget_is_enforced() {
        let ctl = StepControl { max_steps: 5, ..Default::default() };
        let mut s = Dopri5::new(oscillator, 0.0, [0.0, 1.0], ctl);
        let mut result = Ok(());
        for _ in 0..10 {
            if let Err(e) = s.step(1e6) {
                result = Err(e);
                break;
            }
        }
        assert!(matches!(result, Err(Error::MaxStepsExceeded { .. })));
    }
}
