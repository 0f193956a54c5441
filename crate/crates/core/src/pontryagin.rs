//! Necessary optimality conditions for minimizing `∫ S(t)^m dt` subject to
//! the reserves equation, with `S = (p - p0) a`.
//!
//! Hamiltonian: `H = S^m + lambda (-(a + w) + alpha R)`.
//! Costate: `-dlambda/dt = alpha lambda`, so `lambda = c0 exp(-alpha t)`.
//! Stationarity `dH/da = 0` gives `m S^(m-1) (p - p0) = lambda`, hence
//! `S* = (lambda / (m (p - p0)))^(1/(m-1))` and `a* = S* / (p - p0)`.
//!
//! Time arguments of the standalone operations are elapsed time from the
//! start of the horizon; [`solve_pmp`] converts grid nodes accordingly.

use crate::dynamics::{
    integrate_costate, integrate_costate_with_rate, integrate_reserves_with_rate, GrowthRate,
};
use crate::error::{Result, WadeError};
use crate::model::{ModelParams, ReferencePrice, Series, TimeGrid};
use crate::scalar::{real_root, Scalar};

/// Default half-width of the exclusion zone around the reference price, USD/barrel.
pub const DEFAULT_EPSILON_BAND: f64 = 0.5;

/// What to do with a price inside the epsilon band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingularPolicy {
    #[default]
    Error,
    /// Clamp the price to `p0 ± epsilon_band`, keeping the side it came from.
    Clip,
}

/// Exclusion zone around the reference price where the closed forms blow up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceGuard<T> {
    pub epsilon_band: T,
    pub policy: SingularPolicy,
}

impl<T: Scalar> PriceGuard<T> {
    pub fn new(epsilon_band: T, policy: SingularPolicy) -> Result<Self> {
        if !epsilon_band.is_finite() || epsilon_band <= T::zero() {
            return Err(WadeError::InvalidParameter {
                name: "epsilon_band",
                reason: format!("{epsilon_band} is not positive"),
            });
        }
        Ok(Self {
            epsilon_band,
            policy,
        })
    }

    /// Price actually used by the closed forms: `p` itself outside the band,
    /// the clipped value inside it under [`SingularPolicy::Clip`].
    pub fn admit(&self, p: T, p0: T, t: T, index: Option<usize>) -> Result<T> {
        if !p.is_finite() || !p0.is_finite() {
            return Err(WadeError::NonFinite("price"));
        }
        let gap = p - p0;
        if gap.abs() >= self.epsilon_band {
            return Ok(p);
        }
        match self.policy {
            SingularPolicy::Clip if gap >= T::zero() => Ok(p0 + self.epsilon_band),
            SingularPolicy::Clip => Ok(p0 - self.epsilon_band),
            SingularPolicy::Error => Err(WadeError::SingularPrice {
                index,
                t: t.as_f64(),
                price: p.as_f64(),
                pivot: p0.as_f64(),
                band: self.epsilon_band.as_f64(),
            }),
        }
    }
}

impl<T: Scalar> Default for PriceGuard<T> {
    fn default() -> Self {
        Self {
            epsilon_band: T::lit(DEFAULT_EPSILON_BAND),
            policy: SingularPolicy::Error,
        }
    }
}

/// Price and rest-of-world demand paths a solve runs against.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceContext<T> {
    pub p: Series<T>,
    pub w: Series<T>,
    pub guard: PriceGuard<T>,
    /// Reference price; `None` uses `params.p0_base`.
    pub reference: Option<ReferencePrice<T>>,
}

impl<T: Scalar> PriceContext<T> {
    pub fn new(p: Series<T>, w: Series<T>, guard: PriceGuard<T>) -> Result<Self> {
        w.ensure_grid(p.grid(), "rest-of-world demand")?;
        Ok(Self {
            p,
            w,
            guard,
            reference: None,
        })
    }

    /// Context with `w ≡ 0` and the default guard.
    pub fn from_prices(p: Series<T>) -> Result<Self> {
        let w = Series::constant(*p.grid(), T::zero())?;
        Self::new(p, w, PriceGuard::default())
    }

    pub fn with_reference(mut self, reference: ReferencePrice<T>) -> Result<Self> {
        reference.ensure_grid(self.p.grid())?;
        self.reference = Some(reference);
        Ok(self)
    }

    pub fn with_guard(mut self, guard: PriceGuard<T>) -> Self {
        self.guard = guard;
        self
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        self.p.grid()
    }

    pub fn reference_at(&self, i: usize, params: &ModelParams<T>) -> T {
        self.reference
            .as_ref()
            .map_or(params.p0_base, |r| r.at_node(i))
    }

    fn check_grid(&self, grid: &TimeGrid<T>) -> Result<()> {
        self.p.ensure_grid(grid, "price")?;
        self.w.ensure_grid(grid, "rest-of-world demand")?;
        if let Some(r) = &self.reference {
            r.ensure_grid(grid)?;
        }
        Ok(())
    }
}

/// Joint paths produced by a solve. `price` holds the prices the closed forms
/// were evaluated at (after any clipping).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub grid: TimeGrid<T>,
    pub price: Series<T>,
    pub reserves: Series<T>,
    pub lambda: Series<T>,
    pub a_star: Series<T>,
    pub super_profit: Series<T>,
    pub hamiltonian: Series<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `∫ S(t)^m dt` by the trapezoid rule on the trajectory grid.
    pub fn objective(&self, m: u32) -> T {
        let pow = self
            .super_profit
            .map(|s| s.powi(m as i32))
            .expect("finite S^m");
        pow.trapezoid()
    }
}

fn check_finite<T: Scalar>(values: &[T], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(WadeError::NonFinite(what))
    }
}

/// `H = ((p - p0) a)^m + lambda (-(a + w) + alpha R)` at the base reference price.
pub fn hamiltonian<T: Scalar>(
    r: T,
    a: T,
    lambda: T,
    p: T,
    w: T,
    params: &ModelParams<T>,
) -> Result<T> {
    check_finite(&[r, a, lambda, p, w], "hamiltonian inputs")?;
    Ok(hamiltonian_at(
        r,
        a,
        lambda,
        p,
        w,
        params.alpha,
        params.p0_base,
        params.m,
    ))
}

#[allow(clippy::too_many_arguments)]
fn hamiltonian_at<T: Scalar>(r: T, a: T, lambda: T, p: T, w: T, alpha: T, p0: T, m: u32) -> T {
    ((p - p0) * a).powi(m as i32) + lambda * (-(a + w) + alpha * r)
}

/// Exact `∂H/∂a = m S^(m-1) (p - p0) - lambda` with `S = (p - p0) a`.
pub fn hamiltonian_control_derivative<T: Scalar>(
    a: T,
    lambda: T,
    p: T,
    params: &ModelParams<T>,
) -> T {
    control_derivative_at(a, lambda, p, params.p0_base, params.m)
}

fn control_derivative_at<T: Scalar>(a: T, lambda: T, p: T, p0: T, m: u32) -> T {
    let gap = p - p0;
    let m_s = T::from_u32(m).expect("m representable");
    m_s * (gap * a).powi(m as i32 - 1) * gap - lambda
}

/// Centered finite-difference estimate of `∂H/∂a`, for cross-checking
/// [`hamiltonian_control_derivative`].
pub fn hamiltonian_control_derivative_fd<T: Scalar>(
    r: T,
    a: T,
    lambda: T,
    p: T,
    w: T,
    params: &ModelParams<T>,
) -> Result<T> {
    check_finite(&[r, a, lambda, p, w], "hamiltonian inputs")?;
    let step = T::epsilon().cbrt() * a.abs().max(T::one());
    let up = hamiltonian(r, a + step, lambda, p, w, params)?;
    let down = hamiltonian(r, a - step, lambda, p, w, params)?;
    Ok((up - down) / (step + step))
}

/// `S* = (lambda / (m (p - p0)))^(1/(m-1))` at the base reference price.
pub fn optimal_superprofit<T: Scalar>(
    lambda: T,
    p: T,
    params: &ModelParams<T>,
    guard: &PriceGuard<T>,
) -> Result<T> {
    let p = guard.admit(p, params.p0_base, T::nan(), None)?;
    superprofit_from_costate(lambda, p, params.p0_base, params.m)
}

fn superprofit_from_costate<T: Scalar>(lambda: T, p: T, p0: T, m: u32) -> Result<T> {
    if !lambda.is_finite() {
        return Err(WadeError::NonFinite("costate"));
    }
    let m_s = T::from_u32(m).expect("m representable");
    let radicand = lambda / (m_s * (p - p0));
    real_root(radicand, m - 1).ok_or(WadeError::NonRealRoot {
        radicand: radicand.as_f64(),
        degree: m - 1,
    })
}

/// Optimal non-producer demand `a*(t) = S*(t) / (p - p0)` with
/// `lambda = c0 exp(-alpha t)`. For `m = 2` this is
/// `c0 exp(-alpha t) / (2 (p - p0)^2)`.
pub fn optimal_demand<T: Scalar>(
    t: T,
    p: T,
    params: &ModelParams<T>,
    guard: &PriceGuard<T>,
) -> Result<T> {
    if !t.is_finite() {
        return Err(WadeError::NonFinite("time"));
    }
    let p = guard.admit(p, params.p0_base, t, None)?;
    let lambda = params.c0 * (-params.alpha * t).exp();
    demand_from_costate(lambda, p, params.p0_base, params.m)
}

fn demand_from_costate<T: Scalar>(lambda: T, p: T, p0: T, m: u32) -> Result<T> {
    Ok(superprofit_from_costate(lambda, p, p0, m)? / (p - p0))
}

/// Largest violation of `m S^(m-1) (p - p0) = lambda` over the trajectory,
/// using the exact derivative of the Hamiltonian.
pub fn stationarity_residual<T: Scalar>(
    traj: &Trajectory<T>,
    ctx: &PriceContext<T>,
    params: &ModelParams<T>,
) -> T {
    let n = traj.len().min(ctx.p.len());
    (0..n)
        .map(|i| {
            let p0 = ctx.reference_at(i, params);
            let t = traj.grid.node(i);
            let p = ctx
                .guard
                .admit(ctx.p.values()[i], p0, t, Some(i))
                .unwrap_or(ctx.p.values()[i]);
            control_derivative_at(
                traj.a_star.values()[i],
                traj.lambda.values()[i],
                p,
                p0,
                params.m,
            )
            .abs()
        })
        .fold(T::zero(), T::max)
}

/// Inverts the `m = 2` demand formula at elapsed time `t0` so that
/// `optimal_demand(t0, p_at_t0) = a_obs`: `c0 = 2 a_obs (p - p0)^2 exp(alpha t0)`.
pub fn calibrate_c0<T: Scalar>(
    a_obs: T,
    p_at_t0: T,
    t0: T,
    params: &ModelParams<T>,
    guard: &PriceGuard<T>,
) -> Result<T> {
    if params.m != 2 {
        return Err(WadeError::InvalidParameter {
            name: "m",
            reason: format!("calibration requires m = 2, got {}", params.m),
        });
    }
    check_finite(&[a_obs, t0], "calibration inputs")?;
    if a_obs <= T::zero() {
        return Err(WadeError::InvalidParameter {
            name: "a_obs",
            reason: format!("observed demand {a_obs} is not positive"),
        });
    }
    let p = guard.admit(p_at_t0, params.p0_base, t0, None)?;
    let gap = p - params.p0_base;
    Ok(T::lit(2.0) * a_obs * gap * gap * (params.alpha * t0).exp())
}

/// Full solve with constant `alpha`.
pub fn solve_pmp<T: Scalar>(
    params: &ModelParams<T>,
    ctx: &PriceContext<T>,
    q: T,
    grid: &TimeGrid<T>,
) -> Result<Trajectory<T>> {
    solve_pmp_with_rate(params, &GrowthRate::from(params), ctx, q, grid)
}

/// Full solve: costate, pointwise optimal demand and super profit, total
/// demand, reserves and the Hamiltonian at every node. A non-constant rate
/// switches the costate to numeric integration.
pub fn solve_pmp_with_rate<T: Scalar>(
    params: &ModelParams<T>,
    rate: &GrowthRate<T>,
    ctx: &PriceContext<T>,
    q: T,
    grid: &TimeGrid<T>,
) -> Result<Trajectory<T>> {
    params.validate()?;
    ctx.check_grid(grid)?;
    if !q.is_finite() {
        return Err(WadeError::NonFinite("initial stock"));
    }

    let lambda = match rate {
        GrowthRate::Constant(alpha) => integrate_costate(
            &ModelParams {
                alpha: *alpha,
                ..*params
            },
            grid,
        )?,
        GrowthRate::Varying(_) => integrate_costate_with_rate(params.c0, rate, grid)?,
    };

    let n = grid.len();
    let mut price = Vec::with_capacity(n);
    let mut a_star = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let p0 = ctx.reference_at(i, params);
        let p = ctx
            .guard
            .admit(ctx.p.values()[i], p0, grid.node(i), Some(i))?;
        let a = demand_from_costate(lambda.values()[i], p, p0, params.m)?;
        price.push(p);
        a_star.push(a);
        s.push((p - p0) * a);
    }
    let price = Series::new(*grid, price)?;
    let a_star = Series::new(*grid, a_star)?;
    let super_profit = Series::new(*grid, s)?;

    let v = a_star.zip_with(&ctx.w, |a, w| a + w)?;
    let reserves = integrate_reserves_with_rate(rate, &v, q, grid)?.reserves;

    let hamiltonian = (0..n)
        .map(|i| {
            hamiltonian_at(
                reserves.values()[i],
                a_star.values()[i],
                lambda.values()[i],
                price.values()[i],
                ctx.w.values()[i],
                rate.at(grid.node(i)),
                ctx.reference_at(i, params),
                params.m,
            )
        })
        .collect();
    let hamiltonian = Series::new(*grid, hamiltonian)?;

    Ok(Trajectory {
        grid: *grid,
        price,
        reserves,
        lambda,
        a_star,
        super_profit,
        hamiltonian,
    })
}
