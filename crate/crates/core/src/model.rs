//! Domain types shared by every module and the super-profit identity
//! `S = (p - p0) q`.

use crate::error::{Result, WadeError};
use crate::scalar::Scalar;

/// Default win-win reference price, USD/barrel.
pub const DEFAULT_REFERENCE_PRICE: f64 = 29.0;
/// Default costate scale constant.
pub const DEFAULT_C0: f64 = 0.2;
/// Default reserve growth rate, 1/year.
pub const DEFAULT_ALPHA: f64 = 0.2;
/// Default objective exponent.
pub const DEFAULT_M: u32 = 2;

/// Constants of the control problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    /// Reserve growth rate, 1/year, in `[0, 1)`.
    pub alpha: T,
    /// Objective exponent, `m >= 2`.
    pub m: u32,
    /// Costate scale constant.
    pub c0: T,
    /// Win-win reference price, USD/barrel.
    pub p0_base: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(alpha: T, m: u32, c0: T, p0_base: T) -> Result<Self> {
        let params = Self {
            alpha,
            m,
            c0,
            p0_base,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < T::zero() || self.alpha >= T::one() {
            return Err(WadeError::InvalidParameter {
                name: "alpha",
                reason: format!("{} not in [0, 1)", self.alpha),
            });
        }
        if self.m < 2 {
            return Err(WadeError::InvalidParameter {
                name: "m",
                reason: format!("{} < 2", self.m),
            });
        }
        if !self.c0.is_finite() {
            return Err(WadeError::NonFinite("c0"));
        }
        if !self.p0_base.is_finite() || self.p0_base <= T::zero() {
            return Err(WadeError::InvalidParameter {
                name: "p0_base",
                reason: format!("{} is not a positive price", self.p0_base),
            });
        }
        Ok(())
    }

    pub fn with_alpha(self, alpha: T) -> Result<Self> {
        Self::new(alpha, self.m, self.c0, self.p0_base)
    }

    pub fn with_c0(self, c0: T) -> Result<Self> {
        Self::new(self.alpha, self.m, c0, self.p0_base)
    }

    pub fn with_m(self, m: u32) -> Result<Self> {
        Self::new(self.alpha, m, self.c0, self.p0_base)
    }

    pub fn m_scalar(&self) -> T {
        T::from_u32(self.m).expect("m representable")
    }
}

impl<T: Scalar> Default for ModelParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(DEFAULT_ALPHA),
            m: DEFAULT_M,
            c0: T::lit(DEFAULT_C0),
            p0_base: T::lit(DEFAULT_REFERENCE_PRICE),
        }
    }
}

/// Uniform time discretization with `n_steps + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    t_start: T,
    t_end: T,
    n_steps: usize,
}

impl<T: Scalar> TimeGrid<T> {
    pub fn new(t_start: T, t_end: T, n_steps: usize) -> Result<Self> {
        make_grid(t_start, t_end, n_steps)
    }

    pub fn t_start(&self) -> T {
        self.t_start
    }

    pub fn t_end(&self) -> T {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> T {
        (self.t_end - self.t_start) / T::from_count(self.n_steps)
    }

    pub fn span(&self) -> T {
        self.t_end - self.t_start
    }

    /// Time of node `i`. The last node is `t_end` exactly.
    pub fn node(&self, i: usize) -> T {
        if i >= self.n_steps {
            self.t_end
        } else {
            self.t_start + T::from_count(i) * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// Grid of the same resolution over elapsed time `s ∈ [0, t_end - t_start]`.
    pub fn elapsed(&self) -> Self {
        Self {
            t_start: T::zero(),
            t_end: self.span(),
            n_steps: self.n_steps,
        }
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.t_start && t <= self.t_end
    }
}

/// Builds a uniform grid on `[t_start, t_end]` with `n_steps` steps.
pub fn make_grid<T: Scalar>(t_start: T, t_end: T, n_steps: usize) -> Result<TimeGrid<T>> {
    if !t_start.is_finite() || !t_end.is_finite() {
        return Err(WadeError::NonFinite("grid bounds"));
    }
    if t_end <= t_start {
        return Err(WadeError::InvalidGrid(format!(
            "degenerate interval [{t_start}, {t_end}]"
        )));
    }
    if n_steps == 0 {
        return Err(WadeError::InvalidGrid("zero steps".into()));
    }
    let grid = TimeGrid {
        t_start,
        t_end,
        n_steps,
    };
    if grid.step() <= T::zero() {
        return Err(WadeError::InvalidGrid("step underflows to zero".into()));
    }
    Ok(grid)
}

/// Finite values sampled on every node of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    grid: TimeGrid<T>,
    values: Vec<T>,
}

impl<T: Scalar> Series<T> {
    pub fn new(grid: TimeGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(WadeError::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(WadeError::NonFinite("series values"));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TimeGrid<T>, value: T) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    /// Samples `f` at each node time.
    pub fn from_fn(grid: TimeGrid<T>, f: impl FnMut(T) -> T) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> T {
        self.values[0]
    }

    pub fn last(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Iterator over `(t, value)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.grid.nodes().zip(self.values.iter().copied())
    }

    /// Linear interpolation between nodes; clamps outside the grid.
    pub fn at(&self, t: T) -> T {
        let n = self.grid.n_steps;
        let x = (t - self.grid.t_start) / self.grid.step();
        if x.is_nan() || x <= T::zero() {
            return self.values[0];
        }
        let i = x.floor().to_usize().unwrap_or(n);
        if i >= n {
            return self.values[n];
        }
        let frac = x - T::from_count(i);
        if frac == T::zero() {
            return self.values[i];
        }
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    pub fn ensure_grid(&self, grid: &TimeGrid<T>, what: &str) -> Result<()> {
        if &self.grid != grid {
            return Err(WadeError::GridMismatch(format!(
                "{what} sampled on [{}, {}]x{}, expected [{}, {}]x{}",
                self.grid.t_start,
                self.grid.t_end,
                self.grid.n_steps,
                grid.t_start,
                grid.t_end,
                grid.n_steps
            )));
        }
        Ok(())
    }

    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two series on the same grid.
    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(T, T) -> T) -> Result<Self> {
        other.ensure_grid(&self.grid, "right operand")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values)
    }

    /// Trapezoid-rule integral over the whole grid.
    pub fn trapezoid(&self) -> T {
        let n = self.values.len();
        let inner = self.values[1..n - 1]
            .iter()
            .fold(T::zero(), |acc, &v| acc + v);
        let ends = (self.values[0] + self.values[n - 1]) / T::lit(2.0);
        (inner + ends) * self.grid.step()
    }

    /// Values in reverse node order, placed on the elapsed-time grid:
    /// entry `j` is the value at forward node `n - j`.
    pub fn reflected(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid.elapsed(),
            values,
        }
    }
}

/// Reference price against which super profit is measured: the constant
/// win-win price or a time-varying path.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferencePrice<T> {
    Constant(T),
    Path(Series<T>),
}

impl<T: Scalar> ReferencePrice<T> {
    pub fn at_node(&self, i: usize) -> T {
        match self {
            ReferencePrice::Constant(p0) => *p0,
            ReferencePrice::Path(s) => s.values()[i],
        }
    }

    pub fn at(&self, t: T) -> T {
        match self {
            ReferencePrice::Constant(p0) => *p0,
            ReferencePrice::Path(s) => s.at(t),
        }
    }

    pub fn ensure_grid(&self, grid: &TimeGrid<T>) -> Result<()> {
        match self {
            ReferencePrice::Constant(_) => Ok(()),
            ReferencePrice::Path(s) => s.ensure_grid(grid, "reference price"),
        }
    }
}

/// World demand split into the non-producer part `a` and the rest `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandSplit<T> {
    a: Series<T>,
    w: Series<T>,
}

impl<T: Scalar> DemandSplit<T> {
    pub fn new(a: Series<T>, w: Series<T>) -> Result<Self> {
        w.ensure_grid(a.grid(), "rest-of-world demand")?;
        Ok(Self { a, w })
    }

    pub fn a(&self) -> &Series<T> {
        &self.a
    }

    pub fn w(&self) -> &Series<T> {
        &self.w
    }
}

/// Super profit `(p - p0) q`. Negative when the price is below the reference.
pub fn super_profit<T: Scalar>(p: T, q: T, p0: T) -> Result<T> {
    if !p.is_finite() || !q.is_finite() || !p0.is_finite() {
        return Err(WadeError::NonFinite("super profit inputs"));
    }
    if q < T::zero() {
        return Err(WadeError::InvalidParameter {
            name: "q",
            reason: format!("negative quantity {q}"),
        });
    }
    Ok((p - p0) * q)
}

/// Pointwise super profit of a price path against a reference price.
pub fn super_profit_series<T: Scalar>(
    p: &Series<T>,
    q: &Series<T>,
    reference: &ReferencePrice<T>,
) -> Result<Series<T>> {
    q.ensure_grid(p.grid(), "quantity")?;
    reference.ensure_grid(p.grid())?;
    let values = p
        .values()
        .iter()
        .zip(q.values())
        .enumerate()
        .map(|(i, (&pi, &qi))| super_profit(pi, qi, reference.at_node(i)))
        .collect::<Result<Vec<_>>>()?;
    Series::new(*p.grid(), values)
}

/// World demand `v = a + w`.
pub fn total_demand<T: Scalar>(split: &DemandSplit<T>) -> Result<Series<T>> {
    split.a.zip_with(&split.w, |a, w| a + w)
}
