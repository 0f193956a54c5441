//! Fixed-step classical Runge-Kutta integration of the reserves equation
//! `dR/dt = -v(t) + alpha R(t)`, its time-reversed form and the costate
//! equation `dlambda/dt = -alpha lambda`.
//!
//! Forcing series are sampled on grid nodes; values between nodes come from
//! linear interpolation.

use crate::error::{Result, WadeError};
use crate::model::{ModelParams, Series, TimeGrid};
use crate::scalar::Scalar;

/// Reserve growth rate: the constant `alpha` or a path `alpha(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthRate<T> {
    Constant(T),
    Varying(Series<T>),
}

impl<T: Scalar> GrowthRate<T> {
    pub fn at(&self, t: T) -> T {
        match self {
            GrowthRate::Constant(a) => *a,
            GrowthRate::Varying(s) => s.at(t),
        }
    }

    fn check(&self, grid: &TimeGrid<T>) -> Result<()> {
        match self {
            GrowthRate::Constant(a) if a.is_finite() => Ok(()),
            GrowthRate::Constant(_) => Err(WadeError::NonFinite("alpha")),
            GrowthRate::Varying(s) => s.ensure_grid(grid, "alpha path"),
        }
    }

    /// Same rate seen in elapsed reversed time `s = T - t`.
    fn reflected(&self) -> Self {
        match self {
            GrowthRate::Constant(a) => GrowthRate::Constant(*a),
            GrowthRate::Varying(s) => GrowthRate::Varying(s.reflected()),
        }
    }
}

impl<T: Scalar> From<&ModelParams<T>> for GrowthRate<T> {
    fn from(params: &ModelParams<T>) -> Self {
        GrowthRate::Constant(params.alpha)
    }
}

/// Integrates the scalar ODE `y' = f(t, y)` over `grid` with the classical
/// fourth-order Runge-Kutta scheme, returning one value per node.
pub fn rk4<T, F>(grid: &TimeGrid<T>, y0: T, f: F) -> Vec<T>
where
    T: Scalar,
    F: Fn(T, T) -> T,
{
    let h = grid.step();
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0;
    out.push(y);
    for i in 0..grid.n_steps() {
        let t = grid.node(i);
        let k1 = f(t, y);
        let k2 = f(t + half, y + half * k1);
        let k3 = f(t + half, y + half * k2);
        let k4 = f(t + h, y + h * k3);
        y = y + sixth * (k1 + two * k2 + two * k3 + k4);
        out.push(y);
    }
    out
}

/// Reserves path with `R(t_start) = Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservesState<T> {
    pub initial_stock: T,
    pub reserves: Series<T>,
}

/// Reserves path in reversed time `s`, with `Y(0) = R_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversedState<T> {
    pub terminal_stock: T,
    pub reserves: Series<T>,
}

/// How the reversed problem maps forward time onto `s = T - t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReversalConvention {
    /// `dY/ds = v(T - s) - alpha Y`, the exact reversal of the forward flow:
    /// `Y(s) = R(T - s)` whenever `Y(0) = R(T)`.
    #[default]
    TimeReversed,
    /// `dY/ds = -v(T - s) + alpha Y`: the forward right-hand side evaluated on
    /// the reflected forcing. Does not reproduce `R(T - s)`.
    Literal,
}

pub fn integrate_reserves<T: Scalar>(
    params: &ModelParams<T>,
    v: &Series<T>,
    q: T,
    grid: &TimeGrid<T>,
) -> Result<ReservesState<T>> {
    integrate_reserves_with_rate(&GrowthRate::from(params), v, q, grid)
}

pub fn integrate_reserves_with_rate<T: Scalar>(
    rate: &GrowthRate<T>,
    v: &Series<T>,
    q: T,
    grid: &TimeGrid<T>,
) -> Result<ReservesState<T>> {
    v.ensure_grid(grid, "demand")?;
    rate.check(grid)?;
    if !q.is_finite() {
        return Err(WadeError::NonFinite("initial stock"));
    }
    let values = rk4(grid, q, |t, r| -v.at(t) + rate.at(t) * r);
    Ok(ReservesState {
        initial_stock: q,
        reserves: Series::new(*grid, values)?,
    })
}

/// Costate `lambda(t) = c0 exp(-alpha (t - t_start))` in closed form.
pub fn integrate_costate<T: Scalar>(
    params: &ModelParams<T>,
    grid: &TimeGrid<T>,
) -> Result<Series<T>> {
    let t0 = grid.t_start();
    Series::from_fn(*grid, |t| params.c0 * (-params.alpha * (t - t0)).exp())
}

/// Costate obtained by integrating `dlambda/dt = -alpha lambda` numerically.
pub fn integrate_costate_numeric<T: Scalar>(
    params: &ModelParams<T>,
    grid: &TimeGrid<T>,
) -> Result<Series<T>> {
    integrate_costate_with_rate(params.c0, &GrowthRate::from(params), grid)
}

pub fn integrate_costate_with_rate<T: Scalar>(
    c0: T,
    rate: &GrowthRate<T>,
    grid: &TimeGrid<T>,
) -> Result<Series<T>> {
    rate.check(grid)?;
    Series::new(*grid, rk4(grid, c0, |t, l| -rate.at(t) * l))
}

pub fn integrate_reversed<T: Scalar>(
    params: &ModelParams<T>,
    v: &Series<T>,
    r_t: T,
    grid: &TimeGrid<T>,
) -> Result<ReversedState<T>> {
    integrate_reversed_with(
        &GrowthRate::from(params),
        v,
        r_t,
        grid,
        ReversalConvention::default(),
    )
}

/// Integrates the reversed problem on `s ∈ [0, t_end - t_start]` starting
/// from `Y(0) = r_t`. `v` is sampled on the forward grid; `v(T - s)` comes
/// from index reflection plus interpolation.
pub fn integrate_reversed_with<T: Scalar>(
    rate: &GrowthRate<T>,
    v: &Series<T>,
    r_t: T,
    grid: &TimeGrid<T>,
    convention: ReversalConvention,
) -> Result<ReversedState<T>> {
    v.ensure_grid(grid, "demand")?;
    rate.check(grid)?;
    if !r_t.is_finite() {
        return Err(WadeError::NonFinite("terminal stock"));
    }
    let v_rev = v.reflected();
    let rate_rev = rate.reflected();
    let s_grid = grid.elapsed();
    let values = match convention {
        ReversalConvention::TimeReversed => {
            rk4(&s_grid, r_t, |s, y| v_rev.at(s) - rate_rev.at(s) * y)
        }
        ReversalConvention::Literal => rk4(&s_grid, r_t, |s, y| -v_rev.at(s) + rate_rev.at(s) * y),
    };
    Ok(ReversedState {
        terminal_stock: r_t,
        reserves: Series::new(s_grid, values)?,
    })
}
