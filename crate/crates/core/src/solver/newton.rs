use super::assembly::{assemble, BoundaryControl, Layout, TimeTerm};
use super::banded::BandMatrix;
use crate::error::{Error, Result};
use crate::network::Discretization;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    pub residual: f64,
}

fn max_norm(r: &[f64]) -> f64 {
    r.iter()
        .fold(0.0f64, |a, v| if v.is_nan() { f64::NAN } else { a.max(v.abs()) })
}

/// Damped Newton on the compartment equations. Steps that would make a
/// concentration negative or the residual non-finite are halved; they are
/// never clipped.
pub fn solve(
    disc: &Discretization,
    x: &mut [f64],
    control: BoundaryControl,
    time: TimeTerm<'_>,
    opts: NewtonOptions,
    tau: f64,
) -> Result<NewtonReport> {
    let lay = Layout::new(disc);
    let nx = lay.unknowns();
    let bw = lay.bandwidth();
    let mut res = vec![0.0; nx];
    let mut trial_res = vec![0.0; nx];
    let mut trial = vec![0.0; nx];
    let mut jac = BandMatrix::new(nx, bw, bw);
    let fail = |residual: f64, iterations: usize| Error::Convergence {
        tau,
        residual,
        iterations,
    };

    assemble(disc, x, control, time, &mut res, Some(&mut jac));
    let mut norm = max_norm(&res);
    if !norm.is_finite() {
        return Err(fail(norm, 0));
    }
    for iter in 0..opts.max_iters {
        if norm < opts.tol {
            return Ok(NewtonReport {
                iterations: iter,
                residual: norm,
            });
        }
        let lu = jac.clone().factor().map_err(|_| fail(norm, iter))?;
        let mut dx: Vec<f64> = res.iter().map(|r| -r).collect();
        lu.solve(&mut dx);

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            for ((t, xi), d) in trial.iter_mut().zip(x.iter()).zip(&dx) {
                *t = xi + lambda * d;
            }
            let positive = (0..nx).filter(|&j| lay.is_concentration(j)).all(|j| trial[j] >= 0.0);
            if positive {
                assemble(disc, &trial, control, time, &mut trial_res, None);
                let t_norm = max_norm(&trial_res);
                if t_norm.is_finite() && (t_norm < norm || lambda < 0.1) {
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(fail(norm, iter + 1));
        }
        x.copy_from_slice(&trial);
        assemble(disc, x, control, time, &mut res, Some(&mut jac));
        norm = max_norm(&res);
    }
    if norm < opts.tol {
        Ok(NewtonReport {
            iterations: opts.max_iters,
            residual: norm,
        })
    } else {
        Err(fail(norm, opts.max_iters))
    }
}
