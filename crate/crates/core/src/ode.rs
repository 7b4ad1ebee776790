//! Dormand–Prince 5(4) for complex linear systems, with step rejection,
//! PI step-size control and fourth-order dense output.

use std::ops::ControlFlow;

use num_complex::Complex64;

use crate::error::Error;

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

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_BETA: f64 = 0.04;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step; the controller adapts from here.
    pub h0: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Why an integration stopped before the last sample.
#[derive(Debug)]
pub enum Halt<B> {
    Observer(B),
    Failed(Error),
}

/// `out = y + h Σ c_j k_j`, unrolled over the stage count.
fn combine<const M: usize>(out: &mut [Complex64], y: &[Complex64], h: f64, coef: [f64; M], ks: [&[Complex64]; M]) {
    let n = out.len();
    let y = &y[..n];
    let ks: [&[Complex64]; M] = std::array::from_fn(|j| &ks[j][..n]);
    let hc: [f64; M] = std::array::from_fn(|j| coef[j] * h);
    for i in 0..n {
        let mut acc = y[i];
        for j in 0..M {
            acc += ks[j][i] * hc[j];
        }
        out[i] = acc;
    }
}

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `t0`, returning `y` at each of `samples`
    /// (which must be `>= t0` and increasing). `observe` is called after
    /// every accepted step and may stop the run.
    pub fn integrate<F, O, B>(
        &self,
        mut f: F,
        t0: f64,
        y0: &[Complex64],
        samples: &[f64],
        mut observe: O,
    ) -> std::result::Result<(Vec<Vec<Complex64>>, StepStats), Halt<B>>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
        O: FnMut(f64, &[Complex64]) -> ControlFlow<B>,
    {
        let n = y0.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut stats = StepStats::default();
        let mut out = Vec::with_capacity(samples.len());
        let mut next = 0;
        while next < samples.len() && samples[next] <= t0 {
            out.push(y0.to_vec());
            next += 1;
        }
        if next == samples.len() {
            return Ok((out, stats));
        }
        let t_end = *samples.last().unwrap();

        let mut y = y0.to_vec();
        let mut y1 = vec![zero; n];
        let mut ytmp = vec![zero; n];
        let mut k: [Vec<Complex64>; 7] = std::array::from_fn(|_| vec![zero; n]);
        let mut cont: [Vec<Complex64>; 5] = std::array::from_fn(|_| vec![zero; n]);

        f(t0, &y, &mut k[0]);
        stats.evaluations += 1;
        if let ControlFlow::Break(b) = observe(t0, &y) {
            return Err(Halt::Observer(b));
        }

        let mut t = t0;
        let mut h = self.h0.min(t_end - t0);
        let mut facold: f64 = 1e-4;
        let mut last_rejected = false;
        let expo = 0.2 - PI_BETA * 0.75;
        let denom = (2 * n) as f64;

        while next < samples.len() {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Halt::Failed(Error::StepSizeUnderflow { t }));
            }
            if t + h > t_end {
                h = t_end - t;
            }
            if h <= f64::EPSILON * t.abs().max(1.0) {
                return Err(Halt::Failed(Error::StepSizeUnderflow { t }));
            }

            {
                let (k1, rest) = k.split_at_mut(1);
                combine(&mut ytmp, &y, h, [A21], [&k1[0]]);
                f(t + C2 * h, &ytmp, &mut rest[0]);
            }
            {
                let (a, b) = k.split_at_mut(2);
                combine(&mut ytmp, &y, h, [A31, A32], [&a[0], &a[1]]);
                f(t + C3 * h, &ytmp, &mut b[0]);
            }
            {
                let (a, b) = k.split_at_mut(3);
                combine(&mut ytmp, &y, h, [A41, A42, A43], [&a[0], &a[1], &a[2]]);
                f(t + C4 * h, &ytmp, &mut b[0]);
            }
            {
                let (a, b) = k.split_at_mut(4);
                combine(&mut ytmp, &y, h, [A51, A52, A53, A54], [&a[0], &a[1], &a[2], &a[3]]);
                f(t + C5 * h, &ytmp, &mut b[0]);
            }
            {
                let (a, b) = k.split_at_mut(5);
                combine(
                    &mut ytmp,
                    &y,
                    h,
                    [A61, A62, A63, A64, A65],
                    [&a[0], &a[1], &a[2], &a[3], &a[4]],
                );
                f(t + h, &ytmp, &mut b[0]);
            }
            {
                let (a, b) = k.split_at_mut(6);
                combine(
                    &mut y1,
                    &y,
                    h,
                    [A71, A73, A74, A75, A76],
                    [&a[0], &a[2], &a[3], &a[4], &a[5]],
                );
                f(t + h, &y1, &mut b[0]);
            }
            stats.evaluations += 6;

            let mut err2 = 0.0;
            for i in 0..n {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * h;
                let sc_re = self.atol + self.rtol * y[i].re.abs().max(y1[i].re.abs());
                let sc_im = self.atol + self.rtol * y[i].im.abs().max(y1[i].im.abs());
                err2 += (e.re / sc_re).powi(2) + (e.im / sc_im).powi(2);
            }
            let err = (err2 / denom).sqrt();

            let fac11 = err.powf(expo);
            if err <= 1.0 {
                let t_new = t + h;
                if next < samples.len() && samples[next] <= t_new {
                    for i in 0..n {
                        let ydiff = y1[i] - y[i];
                        let bspl = k[0][i] * h - ydiff;
                        cont[0][i] = y[i];
                        cont[1][i] = ydiff;
                        cont[2][i] = bspl;
                        cont[3][i] = ydiff - k[6][i] * h - bspl;
                        cont[4][i] =
                            (k[0][i] * D1 + k[2][i] * D3 + k[3][i] * D4 + k[4][i] * D5 + k[5][i] * D6 + k[6][i] * D7)
                                * h;
                    }
                }
                while next < samples.len() && samples[next] <= t_new {
                    let theta = (samples[next] - t) / h;
                    let theta1 = 1.0 - theta;
                    let ys = (0..n)
                        .map(|i| {
                            cont[0][i]
                                + (cont[1][i] + (cont[2][i] + (cont[3][i] + cont[4][i] * theta1) * theta) * theta1)
                                    * theta
                        })
                        .collect();
                    out.push(ys);
                    next += 1;
                }
                stats.accepted += 1;
                t = t_new;
                std::mem::swap(&mut y, &mut y1);
                k.swap(0, 6);
                if let ControlFlow::Break(b) = observe(t, &y) {
                    return Err(Halt::Observer(b));
                }

                let mut fac = fac11 / facold.powf(PI_BETA);
                fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                facold = err.max(1e-4);
                last_rejected = false;
                h = h_new;
            } else {
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
                stats.rejected += 1;
                last_rejected = true;
            }
        }
        Ok((out, stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solver(tol: f64) -> Dopri5 {
        Dopri5 {
            rtol: tol,
            atol: tol * 1e-2,
            max_steps: 1_000_000,
            h0: 1e-3,
        }
    }

    #[test]
    fn rotating_scalar_matches_exponential() {
        // y' = -i w y
        let w = 2.3;
        let samples: Vec<f64> = (0..=50).map(|k| 0.2 * k as f64).collect();
        let (ys, stats) = solver(1e-11)
            .integrate(
                |_, y, dy| dy[0] = Complex64::new(0.0, -w) * y[0],
                0.0,
                &[Complex64::new(1.0, 0.0)],
                &samples,
                |_, _| ControlFlow::<()>::Continue(()),
            )
            .unwrap();
        assert!(stats.accepted > 0);
        for (t, y) in samples.iter().zip(&ys) {
            let exact = Complex64::from_polar(1.0, -w * t);
            assert!((y[0] - exact).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn time_dependent_rate() {
        // y' = -i t y
        let samples = [0.5, 1.0, 2.0, 3.0];
        let (ys, _) = solver(1e-11)
            .integrate(
                |t, y, dy| dy[0] = Complex64::new(0.0, -t) * y[0],
                0.0,
                &[Complex64::new(1.0, 0.0)],
                &samples,
                |_, _| ControlFlow::<()>::Continue(()),
            )
            .unwrap();
        for (t, y) in samples.iter().zip(&ys) {
            assert!((y[0] - Complex64::from_polar(1.0, -t * t / 2.0)).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn dense_output_between_steps() {
        // sample grid much finer than the step size
        let samples: Vec<f64> = (0..=1000).map(|k| 0.001 * k as f64).collect();
        let (ys, stats) = solver(1e-10)
            .integrate(
                |_, y, dy| dy[0] = Complex64::new(0.0, -1.0) * y[0],
                0.0,
                &[Complex64::new(1.0, 0.0)],
                &samples,
                |_, _| ControlFlow::<()>::Continue(()),
            )
            .unwrap();
        assert!(stats.accepted < samples.len());
        for (t, y) in samples.iter().zip(&ys) {
            assert!((y[0] - Complex64::from_polar(1.0, -t)).norm() < 1e-9);
        }
    }

    #[test]
    fn observer_can_stop() {
        let r = solver(1e-8).integrate(
            |_, y, dy| dy[0] = Complex64::new(0.0, -1.0) * y[0],
            0.0,
            &[Complex64::new(1.0, 0.0)],
            &[10.0],
            |t, _| {
                if t > 1.0 {
                    ControlFlow::Break(t)
                } else {
                    ControlFlow::Continue(())
                }
            },
        );
        match r {
            Err(Halt::Observer(t)) => assert!(t > 1.0 && t < 10.0),
            _ => panic!("expected observer halt"),
        }
    }

    #[test]
    fn step_budget_exhaustion() {
        let s = Dopri5 {
            max_steps: 3,
            ..solver(1e-12)
        };
        let r = s.integrate(
            |_, y, dy| dy[0] = Complex64::new(0.0, -1.0) * y[0],
            0.0,
            &[Complex64::new(1.0, 0.0)],
            &[100.0],
            |_, _| ControlFlow::<()>::Continue(()),
        );
        assert!(matches!(r, Err(Halt::Failed(Error::StepSizeUnderflow { .. }))));
    }

    #[test]
    fn samples_at_start_are_initial_state() {
        let y0 = [Complex64::new(0.6, 0.8)];
        let (ys, stats) = solver(1e-8)
            .integrate(
                |_, y, dy| dy[0] = y[0],
                0.0,
                &y0,
                &[0.0],
                |_, _| ControlFlow::<()>::Continue(()),
            )
            .unwrap();
        assert_eq!(ys, vec![y0.to_vec()]);
        assert_eq!(stats.accepted, 0);
    }
}
