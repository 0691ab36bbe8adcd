//! Generic fixed-point driver shared by every solver.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::params::{StopRule, Stopping, TraceMode};
use crate::trace::{RunTrace, StepRecord};
use crate::vector::Vector;

pub(crate) trait Iterate: Clone {
    fn all_finite(&self) -> bool;
    fn step_distance(&self, next: &Self) -> f64;
}

impl Iterate for Vector {
    fn all_finite(&self) -> bool {
        self.is_finite()
    }

    fn step_distance(&self, next: &Self) -> f64 {
        self.distance_unchecked(next)
    }
}

pub(crate) struct Outcome<G> {
    pub governing: G,
    pub shadow: Vector,
    pub trace: RunTrace<G>,
}

/// Runs `x_{n+1} = step(n, x_n)` from `x0`.
///
/// Each pass evaluates the shadow of `x_n`, computes `x_{n+1}` and records
/// both. Under `TrueError` the run stops at the first `n` whose shadow is
/// within `tol` of the reference (`iterations_used = n`); under
/// `FixedPointResidual` it stops once `||x_{n+1} - x_n|| < tol`
/// (`iterations_used = n + 1`, returned state `x_{n+1}`). Running out of
/// iterations is not an error: the outcome carries `converged = false`.
pub(crate) fn run<G: Iterate>(
    x0: G,
    stopping: &Stopping,
    mut step: impl FnMut(usize, &G) -> Result<G>,
    shadow_of: impl Fn(&G) -> Result<Vector>,
) -> Result<Outcome<G>> {
    stopping.validate()?;
    if !x0.all_finite() {
        return Err(Error::NumericalBreakdown { iteration: 0 });
    }
    let reference = stopping.reference();
    let mut iterates: Vec<StepRecord<G>> = Vec::new();
    let mut x = x0;
    for n in 0..stopping.max_iter {
        let shadow = shadow_of(&x)?;
        if !shadow.is_finite() {
            return Err(Error::NumericalBreakdown { iteration: n });
        }
        let error = match reference {
            Some(r) => Some(shadow.distance(r)?),
            None => None,
        };
        let next = step(n, &x)?;
        if !next.all_finite() {
            return Err(Error::NumericalBreakdown { iteration: n });
        }
        let step_norm = x.step_distance(&next);

        let stop_here = match stopping.rule {
            StopRule::TrueError(_) => error.is_some_and(|e| e < stopping.tol),
            StopRule::FixedPointResidual => step_norm < stopping.tol,
        };
        if stopping.trace == TraceMode::LastOnly {
            iterates.clear();
        }
        iterates.push(StepRecord {
            n,
            governing: x.clone(),
            shadow: shadow.clone(),
            step_norm,
            error,
        });

        if stop_here {
            let (governing, shadow, iterations_used) = match stopping.rule {
                StopRule::TrueError(_) => (x, shadow, n),
                StopRule::FixedPointResidual => {
                    let s = shadow_of(&next)?;
                    (next, s, n + 1)
                }
            };
            return Ok(Outcome {
                governing,
                shadow,
                trace: RunTrace {
                    iterates,
                    converged: true,
                    iterations_used,
                },
            });
        }
        x = next;
    }
    let shadow = shadow_of(&x)?;
    Ok(Outcome {
        governing: x,
        shadow,
        trace: RunTrace {
            iterates,
            converged: false,
            iterations_used: stopping.max_iter,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c).unwrap()
    }

    #[test]
    fn halving_map_converges_under_residual_rule() {
        let stopping = Stopping::default().with_tol(1e-3);
        let out = run(v(&[1.0]), &stopping, |_, x| Ok(x.scale(0.5)), |x| Ok(x.clone())).unwrap();
        assert!(out.trace.converged);
        // steps are 0.5, 0.25, ... ; 2^-10 < 1e-3 at n = 9
        assert_eq!(out.trace.iterations_used, 10);
        assert_eq!(out.trace.iterates.len(), 10);
        assert!(out.trace.final_step_norm().unwrap() < 1e-3);
        assert_eq!(out.governing, v(&[1.0 / 1024.0]));
    }

    #[test]
    fn true_error_counts_iterations_until_shadow_is_close() {
        let stopping = Stopping::default()
            .with_tol(0.3)
            .with_rule(StopRule::TrueError(v(&[0.0])));
        let out = run(v(&[1.0]), &stopping, |_, x| Ok(x.scale(0.5)), |x| Ok(x.clone())).unwrap();
        // errors 1, 0.5, 0.25
        assert_eq!(out.trace.iterations_used, 2);
        assert_eq!(out.shadow, v(&[0.25]));
        assert!(out.trace.final_error().unwrap() < 0.3);
    }

    #[test]
    fn censored_runs_are_flagged_not_raised() {
        let stopping = Stopping::default().with_tol(1e-12).with_max_iter(5);
        let out = run(v(&[1.0]), &stopping, |_, x| Ok(x.scale(0.9)), |x| Ok(x.clone())).unwrap();
        assert!(!out.trace.converged);
        assert_eq!(out.trace.iterations_used, 5);
    }

    #[test]
    fn non_finite_iterate_aborts() {
        let stopping = Stopping::default();
        let res = run(
            v(&[1.0]),
            &stopping,
            |n, x| {
                Ok(if n == 2 {
                    Vector::from_raw(vec![f64::NAN])
                } else {
                    x.scale(2.0)
                })
            },
            |x| Ok(x.clone()),
        );
        assert!(matches!(res, Err(Error::NumericalBreakdown { iteration: 2 })));
    }

    #[test]
    fn last_only_keeps_one_record() {
        let stopping = Stopping::default().with_tol(1e-3).with_trace(TraceMode::LastOnly);
        let out = run(v(&[1.0]), &stopping, |_, x| Ok(x.scale(0.5)), |x| Ok(x.clone())).unwrap();
        assert_eq!(out.trace.iterates.len(), 1);
        assert_eq!(out.trace.iterates[0].n, 9);
    }
}
