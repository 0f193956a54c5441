//! Families of solves over varied initial reserves (`Q_k`) or varied
//! terminal reserves (`R_T(k)`) of the time-reversed problem.
//!
//! The stock for index `k` is `lo + (k / D)(hi - lo)` where the denominator
//! `D` is `t0 + h` in horizon indexing and a declared `K` in normalized
//! indexing.

use rayon::prelude::*;

use crate::dynamics::{integrate_reversed_with, GrowthRate, ReversalConvention};
use crate::error::{Result, WadeError};
use crate::model::{ModelParams, Series, TimeGrid};
use crate::pontryagin::{solve_pmp_with_rate, PriceContext, Trajectory};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Initial,
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Indexing {
    /// Weight `k / (t0 + h)`, admissible `k ∈ [0, t0 + h]`.
    #[default]
    Horizon,
    /// Weight `k / k_max`, admissible `k ∈ [0, k_max]`.
    Normalized { k_max: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T> {
    pub t0: T,
    pub h: T,
    /// Reserve value at the start of the window (`Q_0` or `Y_0`).
    pub lo: T,
    /// Reserve value at the end of the window (`Q*` or `Y*`).
    pub hi: T,
    pub k_values: Vec<i64>,
    pub mode: SweepMode,
    pub indexing: Indexing,
}

impl<T: Scalar> SweepSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite()
            && self.h.is_finite()
            && self.lo.is_finite()
            && self.hi.is_finite())
        {
            return Err(WadeError::NonFinite("sweep spec"));
        }
        if self.h <= T::zero() {
            return Err(WadeError::InvalidParameter {
                name: "h",
                reason: format!("horizon {} is not positive", self.h),
            });
        }
        if self.k_values.is_empty() {
            return Err(WadeError::InvalidParameter {
                name: "k_values",
                reason: "no sweep indices".into(),
            });
        }
        match self.indexing {
            Indexing::Horizon if self.t0 + self.h <= T::zero() => {
                Err(WadeError::InvalidParameter {
                    name: "t0",
                    reason: format!("t0 + h = {} is not positive", self.t0 + self.h),
                })
            }
            Indexing::Normalized { k_max: 0 } => Err(WadeError::InvalidParameter {
                name: "k_max",
                reason: "must be at least 1".into(),
            }),
            _ => Ok(()),
        }
    }

    fn denominator(&self) -> T {
        match self.indexing {
            Indexing::Horizon => self.t0 + self.h,
            Indexing::Normalized { k_max } => T::from_u64(k_max).expect("k_max representable"),
        }
    }
}

/// One solve of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry<T> {
    pub k: i64,
    /// `Q_k` (initial mode) or `R_T(k)` (terminal mode).
    pub start_value: T,
    /// Initial mode: the forward trajectory. Terminal mode: every path
    /// expressed in reversed time `s`, so node `j` holds values at `T - s_j`
    /// and `reserves` is `Y(s)`.
    pub trajectory: Trajectory<T>,
    /// `∫ S^m` over the horizon, trapezoid rule.
    pub objective: T,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult<T> {
    pub entries: Vec<SweepEntry<T>>,
}

/// Stock for sweep index `k`.
pub fn qk<T: Scalar>(k: i64, spec: &SweepSpec<T>) -> Result<T> {
    let d = spec.denominator();
    let kk = T::from_i64(k).expect("k representable");
    if kk < T::zero() || kk > d {
        return Err(WadeError::IndexOutOfRange {
            k,
            lo: 0.0,
            hi: d.as_f64(),
        });
    }
    if kk == d {
        return Ok(spec.hi);
    }
    Ok(spec.lo + kk / d * (spec.hi - spec.lo))
}

fn ensure_mode<T>(spec: &SweepSpec<T>, mode: SweepMode) -> Result<()> {
    if spec.mode != mode {
        return Err(WadeError::InvalidParameter {
            name: "mode",
            reason: format!("sweep spec is {:?}, expected {:?}", spec.mode, mode),
        });
    }
    Ok(())
}

fn sorted_unique_k<T>(spec: &SweepSpec<T>) -> Vec<i64> {
    let mut ks = spec.k_values.clone();
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn annotate<T>(k: i64, r: Result<T>) -> Result<T> {
    r.map_err(|source| WadeError::Sweep {
        k,
        source: Box::new(source),
    })
}

pub fn run_initial_sweep<T: Scalar>(
    spec: &SweepSpec<T>,
    params: &ModelParams<T>,
    ctx: &PriceContext<T>,
    grid: &TimeGrid<T>,
) -> Result<SweepResult<T>> {
    run_initial_sweep_with_rate(spec, params, &GrowthRate::from(params), ctx, grid)
}

/// Solves once per `k` with `Q = qk(k)`. Entries are ordered by `k`.
pub fn run_initial_sweep_with_rate<T: Scalar>(
    spec: &SweepSpec<T>,
    params: &ModelParams<T>,
    rate: &GrowthRate<T>,
    ctx: &PriceContext<T>,
    grid: &TimeGrid<T>,
) -> Result<SweepResult<T>> {
    ensure_mode(spec, SweepMode::Initial)?;
    spec.validate()?;
    let entries = sorted_unique_k(spec)
        .into_par_iter()
        .map(|k| {
            annotate(
                k,
                (|| {
                    let q = qk(k, spec)?;
                    let trajectory = solve_pmp_with_rate(params, rate, ctx, q, grid)?;
                    let objective = trajectory.objective(params.m);
                    Ok(SweepEntry {
                        k,
                        start_value: q,
                        trajectory,
                        objective,
                    })
                })(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { entries })
}

pub fn run_terminal_sweep<T: Scalar>(
    spec: &SweepSpec<T>,
    params: &ModelParams<T>,
    ctx: &PriceContext<T>,
    grid: &TimeGrid<T>,
) -> Result<SweepResult<T>> {
    run_terminal_sweep_with(
        spec,
        params,
        &GrowthRate::from(params),
        ctx,
        grid,
        ReversalConvention::default(),
    )
}

/// For each `k`, integrates the reversed reserves problem from
/// `Y(0) = qk(k)` under the reflected optimal demand and reports
/// `∫_0^T S(T - s)^m ds`.
pub fn run_terminal_sweep_with<T: Scalar>(
    spec: &SweepSpec<T>,
    params: &ModelParams<T>,
    rate: &GrowthRate<T>,
    ctx: &PriceContext<T>,
    grid: &TimeGrid<T>,
    convention: ReversalConvention,
) -> Result<SweepResult<T>> {
    ensure_mode(spec, SweepMode::Terminal)?;
    spec.validate()?;
    // the control law does not depend on R, so one forward solve gives the
    // demand every entry is driven by
    let forward = solve_pmp_with_rate(params, rate, ctx, T::zero(), grid)?;
    let v = forward.a_star.zip_with(&ctx.w, |a, w| a + w)?;
    let reflected = Reflected {
        price: forward.price.reflected(),
        lambda: forward.lambda.reflected(),
        a_star: forward.a_star.reflected(),
        super_profit: forward.super_profit.reflected(),
    };
    let s_grid = grid.elapsed();
    let objective = reflected
        .super_profit
        .map(|s| s.powi(params.m as i32))?
        .trapezoid();
    let w_rev = ctx.w.reflected();
    let rate_rev: Vec<T> = (0..grid.len())
        .rev()
        .map(|i| rate.at(grid.node(i)))
        .collect();

    let entries = sorted_unique_k(spec)
        .into_par_iter()
        .map(|k| {
            annotate(
                k,
                (|| {
                    let r_t = qk(k, spec)?;
                    let y = integrate_reversed_with(rate, &v, r_t, grid, convention)?.reserves;
                    let hamiltonian = (0..s_grid.len())
                        .map(|j| {
                            let s = reflected.super_profit.values()[j];
                            let a = reflected.a_star.values()[j];
                            s.powi(params.m as i32)
                                + reflected.lambda.values()[j]
                                    * (-(a + w_rev.values()[j]) + rate_rev[j] * y.values()[j])
                        })
                        .collect();
                    Ok(SweepEntry {
                        k,
                        start_value: r_t,
                        trajectory: Trajectory {
                            grid: s_grid,
                            price: reflected.price.clone(),
                            reserves: y,
                            lambda: reflected.lambda.clone(),
                            a_star: reflected.a_star.clone(),
                            super_profit: reflected.super_profit.clone(),
                            hamiltonian: Series::new(s_grid, hamiltonian)?,
                        },
                        objective,
                    })
                })(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { entries })
}

struct Reflected<T> {
    price: Series<T>,
    lambda: Series<T>,
    a_star: Series<T>,
    super_profit: Series<T>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate_reserves;
    use crate::model::make_grid;
    use crate::pontryagin::solve_pmp;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(mode: SweepMode, lo: f64, hi: f64, ks: Vec<i64>) -> SweepSpec<f64> {
        SweepSpec {
            t0: 2.0,
            h: 2.0,
            lo,
            hi,
            k_values: ks,
            mode,
            indexing: Indexing::Horizon,
        }
    }

    fn setup(alpha: f64) -> (ModelParams<f64>, PriceContext<f64>, TimeGrid<f64>) {
        let g = make_grid(0.0, 10.0, 20).unwrap();
        let ctx = PriceContext::from_prices(Series::constant(g, 30.0).unwrap()).unwrap();
        (ModelParams::new(alpha, 2, 2.0, 29.0).unwrap(), ctx, g)
    }

    #[test]
    fn qk_examples() {
        let s = spec(SweepMode::Initial, 10.0, 20.0, vec![0]);
        assert_eq!(qk(0, &s).unwrap(), 10.0);
        assert_eq!(qk(4, &s).unwrap(), 20.0);
        assert_eq!(qk(2, &s).unwrap(), 15.0);
        assert!(matches!(
            qk(5, &s),
            Err(WadeError::IndexOutOfRange { k: 5, .. })
        ));
        assert!(qk(-1, &s).is_err());
    }

    #[test]
    fn qk_normalized() {
        let s = SweepSpec {
            indexing: Indexing::Normalized { k_max: 10 },
            ..spec(SweepMode::Initial, 100.0, 200.0, vec![0])
        };
        assert_eq!(qk(0, &s).unwrap(), 100.0);
        assert_eq!(qk(10, &s).unwrap(), 200.0);
        assert_eq!(qk(3, &s).unwrap(), 130.0);
        assert!(qk(11, &s).is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = spec(SweepMode::Initial, 1.0, 2.0, vec![]);
        assert!(s.validate().is_err());
        s.k_values = vec![0];
        s.h = 0.0;
        assert!(s.validate().is_err());
        let s = SweepSpec {
            indexing: Indexing::Normalized { k_max: 0 },
            ..spec(SweepMode::Initial, 1.0, 2.0, vec![0])
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn wrong_mode_rejected() {
        let (p, ctx, g) = setup(0.0);
        let s = spec(SweepMode::Terminal, 1.0, 2.0, vec![0]);
        assert!(run_initial_sweep(&s, &p, &ctx, &g).is_err());
        let s = spec(SweepMode::Initial, 1.0, 2.0, vec![0]);
        assert!(run_terminal_sweep(&s, &p, &ctx, &g).is_err());
    }

    #[test]
    fn single_entry_reduces_to_solve() {
        let (p, ctx, g) = setup(0.2);
        let s = spec(SweepMode::Initial, 50.0, 80.0, vec![0]);
        let res = run_initial_sweep(&s, &p, &ctx, &g).unwrap();
        assert_eq!(res.entries.len(), 1);
        assert_eq!(
            res.entries[0].trajectory,
            solve_pmp(&p, &ctx, 50.0, &g).unwrap()
        );
    }

    #[test]
    fn degenerate_span_gives_identical_trajectories() {
        let (p, ctx, g) = setup(0.2);
        let s = spec(SweepMode::Initial, 50.0, 50.0, vec![1, 3]);
        let res = run_initial_sweep(&s, &p, &ctx, &g).unwrap();
        assert_eq!(res.entries[0].trajectory, res.entries[1].trajectory);
        let s = spec(SweepMode::Terminal, 50.0, 50.0, vec![1, 3]);
        let res = run_terminal_sweep(&s, &p, &ctx, &g).unwrap();
        assert_eq!(res.entries[0].trajectory, res.entries[1].trajectory);
        assert_eq!(res.entries[0].objective, res.entries[1].objective);
    }

    #[test]
    fn initial_sweep_offsets_reserves_only() {
        let (p, ctx, g) = setup(0.0);
        let s = spec(SweepMode::Initial, 100.0, 140.0, vec![3, 1]);
        let res = run_initial_sweep(&s, &p, &ctx, &g).unwrap();
        assert_eq!(res.entries[0].k, 1);
        assert_eq!(res.entries[1].k, 3);
        let (e1, e2) = (&res.entries[0], &res.entries[1]);
        assert_eq!(e1.trajectory.a_star, e2.trajectory.a_star);
        assert_eq!(e1.trajectory.super_profit, e2.trajectory.super_profit);
        assert_eq!(e1.trajectory.lambda, e2.trajectory.lambda);
        let offset = qk(3, &s).unwrap() - qk(1, &s).unwrap();
        // two independent solves of dR/dt = -1 with different Q
        let v = Series::constant(g, 1.0).unwrap();
        let r1 = integrate_reserves(&p, &v, e1.start_value, &g)
            .unwrap()
            .reserves;
        let r2 = integrate_reserves(&p, &v, e2.start_value, &g)
            .unwrap()
            .reserves;
        for i in 0..g.len() {
            let d = e2.trajectory.reserves.values()[i] - e1.trajectory.reserves.values()[i];
            assert_relative_eq!(d, offset, max_relative = 1e-12);
            assert_relative_eq!(
                e1.trajectory.reserves.values()[i],
                r1.values()[i],
                max_relative = 1e-14
            );
            assert_relative_eq!(
                e2.trajectory.reserves.values()[i],
                r2.values()[i],
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn terminal_round_trip_and_objective() {
        let g = make_grid(0.0, 10.0, 100).unwrap();
        let prices = Series::from_fn(g, |t| 40.0 + 8.0 * t).unwrap();
        let ctx = PriceContext::from_prices(prices).unwrap();
        let p = ModelParams::new(0.2, 2, 0.2, 29.0).unwrap();
        let fwd = solve_pmp(&p, &ctx, 5.0, &g).unwrap();
        let r_t = fwd.reserves.last();
        let s = SweepSpec {
            t0: 0.0,
            h: 1.0,
            lo: r_t,
            hi: r_t,
            k_values: vec![0],
            mode: SweepMode::Terminal,
            indexing: Indexing::Horizon,
        };
        let res = run_terminal_sweep(&s, &p, &ctx, &g).unwrap();
        let entry = &res.entries[0];
        let n = g.n_steps();
        for j in 0..=n {
            assert_relative_eq!(
                entry.trajectory.reserves.values()[j],
                fwd.reserves.values()[n - j],
                max_relative = 1e-6
            );
            assert_eq!(
                entry.trajectory.a_star.values()[j],
                fwd.a_star.values()[n - j]
            );
        }
        assert_relative_eq!(entry.objective, fwd.objective(2), max_relative = 1e-9);
    }

    #[test]
    fn sweep_errors_carry_k() {
        let g = make_grid(0.0, 2.0, 2).unwrap();
        let ctx =
            PriceContext::from_prices(Series::new(g, vec![31.0, 29.1, 31.0]).unwrap()).unwrap();
        let p = ModelParams::new(0.0, 2, 1.0, 29.0).unwrap();
        let s = spec(SweepMode::Initial, 1.0, 2.0, vec![2]);
        let err = run_initial_sweep(&s, &p, &ctx, &g).unwrap_err();
        assert!(matches!(err, WadeError::Sweep { k: 2, .. }));
    }

    proptest! {
        #[test]
        fn qk_affine_and_monotone(lo in -1e3..1e3_f64, span in 0.0..1e3_f64,
                                  t0 in 0.0..50.0_f64, h in 1.0..50.0_f64) {
            let s = SweepSpec { t0, h, lo, hi: lo + span, k_values: vec![0],
                mode: SweepMode::Initial, indexing: Indexing::Horizon };
            prop_assert_eq!(qk(0, &s).unwrap(), lo);
            let kmax = (t0 + h).floor() as i64;
            let mut prev = lo;
            for k in 1..=kmax {
                let v = qk(k, &s).unwrap();
                prop_assert!(v >= prev);
                let expected = lo + (k as f64) * (span / (t0 + h));
                prop_assert!((v - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
                prev = v;
            }
        }
    }
}
