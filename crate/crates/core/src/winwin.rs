//! Dynamic win-win reference price: `dP0/dt = f(i(t)) - mu P0(t)`, with the
//! identity `P0 = i + pr` reported as a residual.

use std::fmt;
use std::sync::Arc;

use crate::dynamics::rk4;
use crate::error::{Result, WadeError};
use crate::model::{Series, TimeGrid};
use crate::scalar::Scalar;

/// Response `f(i)` of the reference price to investment per barrel.
#[derive(Clone)]
pub enum InvestmentResponse<T> {
    /// `f(i) = kappa i`
    Linear {
        kappa: T,
    },
    /// `f(i) = ceiling i / (1 + i)`
    Saturating {
        ceiling: T,
    },
    /// `f(i) = value`
    Constant {
        value: T,
    },
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Scalar> InvestmentResponse<T> {
    pub fn eval(&self, i: T) -> T {
        match self {
            InvestmentResponse::Linear { kappa } => *kappa * i,
            InvestmentResponse::Saturating { ceiling } => *ceiling * i / (T::one() + i),
            InvestmentResponse::Constant { value } => *value,
            InvestmentResponse::Custom(f) => f(i),
        }
    }

    pub fn custom(f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        InvestmentResponse::Custom(Arc::new(f))
    }

    pub fn name(&self) -> &'static str {
        match self {
            InvestmentResponse::Linear { .. } => "linear",
            InvestmentResponse::Saturating { .. } => "saturating",
            InvestmentResponse::Constant { .. } => "constant",
            InvestmentResponse::Custom(_) => "custom",
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for InvestmentResponse<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvestmentResponse::Linear { kappa } => {
                f.debug_struct("Linear").field("kappa", kappa).finish()
            }
            InvestmentResponse::Saturating { ceiling } => f
                .debug_struct("Saturating")
                .field("ceiling", ceiling)
                .finish(),
            InvestmentResponse::Constant { value } => {
                f.debug_struct("Constant").field("value", value).finish()
            }
            InvestmentResponse::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WinWinParams<T> {
    /// Depreciation rate, 1/year, in `[0, 1)`.
    pub mu: T,
    /// Reasonable profit, USD/barrel.
    pub pr: T,
    /// Investment per barrel, USD/barrel.
    pub investment: Series<T>,
    pub response: InvestmentResponse<T>,
}

impl<T: Scalar> WinWinParams<T> {
    pub fn new(
        mu: T,
        pr: T,
        investment: Series<T>,
        response: InvestmentResponse<T>,
    ) -> Result<Self> {
        if !mu.is_finite() || mu < T::zero() || mu >= T::one() {
            return Err(WadeError::InvalidParameter {
                name: "mu",
                reason: format!("{mu} not in [0, 1)"),
            });
        }
        if !pr.is_finite() || pr < T::zero() {
            return Err(WadeError::InvalidParameter {
                name: "pr",
                reason: format!("{pr} is negative"),
            });
        }
        Ok(Self {
            mu,
            pr,
            investment,
            response,
        })
    }
}

/// Evolves `P0(t)` from `p0_init` with the classical fourth-order scheme.
pub fn evolve_winwin_price<T: Scalar>(
    ww: &WinWinParams<T>,
    p0_init: T,
    grid: &TimeGrid<T>,
) -> Result<Series<T>> {
    ww.investment.ensure_grid(grid, "investment")?;
    if !p0_init.is_finite() {
        return Err(WadeError::NonFinite("initial reference price"));
    }
    let values = rk4(grid, p0_init, |t, p| {
        ww.response.eval(ww.investment.at(t)) - ww.mu * p
    });
    Series::new(*grid, values)
}

/// Residual `P0(t) - i(t) - pr` of the identity the reference price should satisfy.
pub fn winwin_consistency<T: Scalar>(p0: &Series<T>, ww: &WinWinParams<T>) -> Result<Series<T>> {
    p0.zip_with(&ww.investment, |p, i| p - i - ww.pr)
}
