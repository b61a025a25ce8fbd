//! Finite-difference time stepping of `u_t = u_xx + mu(x) u (1 - u)` on
//! `[0, X_max]` with Neumann ends, and pointwise checks of explicit sub- and
//! supersolutions.

mod verify;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::fronttrack::{front_position, FrontTrace};
use crate::media::Medium;
use crate::numerics::tridiag::Tridiagonal;

pub use verify::{
    verify_subsolution, verify_supersolution_exp, verify_supersolution_ubar, ExpSupersolutionReport,
    SubsolutionReport, UbarReport,
};

const MIN_CELLS: usize = 256;
/// Largest allowed `dt * max mu`.
pub const MAX_REACTION_STEP: f64 = 0.2;
/// Range violations up to this size are rounding and get clamped.
const RANGE_TOLERANCE: f64 = 1e-12;
/// Values below this are flushed to zero after each step.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Uniform nodes `x_i = i h`, `i = 0..=n_cells`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_max: f64,
    n_cells: usize,
}

impl Grid {
    pub fn new(x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(param(format!("X_max must be positive, got {x_max}")));
        }
        if n_cells < MIN_CELLS {
            return Err(param(format!("need at least {MIN_CELLS} cells, got {n_cells}")));
        }
        Ok(Self { x_max, n_cells })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn h(&self) -> f64 {
        self.x_max / self.n_cells as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_max
        } else {
            i as f64 * self.h()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nodes()).map(|i| self.x(i))
    }
}

/// Nodal values of `u` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    t: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>, t: f64) -> Result<Self> {
        if values.len() != grid.nodes() {
            return Err(param(format!(
                "field has {} values for {} nodes",
                values.len(),
                grid.nodes()
            )));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(param("field values must lie in [0, 1]"));
        }
        Ok(Self { grid, values, t })
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.nodes()], 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoidal integral of `u`.
    pub fn mass(&self) -> f64 {
        let v = &self.values;
        let inner: f64 = v[1..v.len() - 1].iter().sum();
        self.grid.h() * (inner + 0.5 * (v[0] + v[v.len() - 1]))
    }

    /// CSV snapshot: a `t,<time>` header line, then `x,u` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,{}", self.t)?;
        writeln!(out, "x,u")?;
        for (x, u) in self.grid.points().zip(&self.values) {
            writeln!(out, "{x},{u}")?;
        }
        Ok(())
    }
}

/// Initial condition `u0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialDatum {
    /// `1` on `[0, width]`, decreasing linearly to `0` over the next cell.
    Step { width: f64 },
}

impl Default for InitialDatum {
    fn default() -> Self {
        InitialDatum::Step { width: 2.0 }
    }
}

impl InitialDatum {
    /// Right end of the support on `grid`.
    pub fn support(&self, grid: &Grid) -> f64 {
        match self {
            InitialDatum::Step { width } => width + grid.h(),
        }
    }

    pub fn field(&self, grid: Grid) -> Result<Field> {
        match *self {
            InitialDatum::Step { width } => {
                if !(width > 0.0) {
                    return Err(param(format!("step width must be positive, got {width}")));
                }
                let h = grid.h();
                let values = grid
                    .points()
                    .map(|x| ((width + h - x) / h).clamp(0.0, 1.0))
                    .collect();
                Field::new(grid, values, 0.0)
            }
        }
    }
}

fn default_observe_every() -> f64 {
    0.5
}

fn default_front_level() -> f64 {
    0.5
}

/// Discretization and run-control parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(rename = "X_max")]
    pub x_max: f64,
    pub n_cells: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Stop once the front is this close to `X_max`; defaults to `20 / sqrt(min mu)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_margin: Option<f64>,
    #[serde(default = "default_observe_every")]
    pub observe_every: f64,
    #[serde(default = "default_front_level")]
    pub front_level: f64,
    #[serde(default)]
    pub initial: InitialDatum,
}

impl SolverConfig {
    pub fn new(x_max: f64, n_cells: usize, dt: f64, t_end: f64) -> Self {
        Self {
            x_max,
            n_cells,
            dt,
            t_end,
            stop_margin: None,
            observe_every: default_observe_every(),
            front_level: default_front_level(),
            initial: InitialDatum::default(),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.x_max, self.n_cells)
    }

    pub fn min_stop_margin(medium: &Medium) -> f64 {
        20.0 / medium.min_rate().sqrt()
    }

    pub fn resolved_stop_margin(&self, medium: &Medium) -> f64 {
        self.stop_margin
            .unwrap_or_else(|| Self::min_stop_margin(medium))
    }

    pub fn validate(&self, medium: &Medium) -> Result<()> {
        let grid = self.grid()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(param(format!("dt must be positive, got {}", self.dt)));
        }
        if self.dt * medium.max_rate() > MAX_REACTION_STEP + 1e-12 {
            return Err(param(format!(
                "dt * max mu = {} exceeds {MAX_REACTION_STEP}",
                self.dt * medium.max_rate()
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(param(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        let margin = self.resolved_stop_margin(medium);
        let needed = Self::min_stop_margin(medium);
        if margin < needed - 1e-12 {
            return Err(param(format!("stop_margin {margin} below 20/sqrt(min mu) = {needed}")));
        }
        if !(self.observe_every > 0.0) {
            return Err(param("observe_every must be positive"));
        }
        if !(self.front_level > 0.0 && self.front_level < 1.0) {
            return Err(param(format!("front level must lie in (0, 1), got {}", self.front_level)));
        }
        if (medium.x_max() - self.x_max).abs() > 1e-12 * self.x_max {
            return Err(param("medium and solver disagree on X_max"));
        }
        if self.initial.support(&grid) > self.x_max / 10.0 {
            return Err(param("initial datum must be supported in [0, X_max / 10]"));
        }
        Ok(())
    }
}

/// Receives a snapshot at every observation time.
pub trait Observer {
    fn observe(&mut self, field: &Field);
}

impl<F: FnMut(&Field)> Observer for F {
    fn observe(&mut self, field: &Field) {
        self(field)
    }
}

/// Time stepper: explicit reaction followed by a theta-scheme diffusion
/// step, `theta = max(1/2, 1 - h^2 / (2 dt))`, so Crank-Nicolson whenever
/// `dt <= h^2` and a monotone scheme always.
#[derive(Debug, Clone)]
pub struct Solver {
    grid: Grid,
    dt: f64,
    theta: f64,
    rates: Vec<f64>,
    implicit: Tridiagonal,
}

impl Solver {
    pub fn new(medium: &Medium, grid: Grid, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(param(format!("dt must be positive, got {dt}")));
        }
        if dt * medium.max_rate() > 1.0 {
            return Err(param("dt * max mu must not exceed 1"));
        }
        let rates = grid
            .points()
            .map(|x| medium.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        let h = grid.h();
        let r = dt / (h * h);
        let theta = (1.0 - 0.5 / r).max(0.5);
        let n = grid.nodes();
        let a = theta * r;
        let mut lower = vec![-a; n - 1];
        let mut upper = vec![-a; n - 1];
        let diag = vec![1.0 + 2.0 * a; n];
        upper[0] = -2.0 * a;
        lower[n - 2] = -2.0 * a;
        let implicit = Tridiagonal::factor(&lower, &diag, &upper)
            .expect("diagonally dominant diffusion matrix");
        Ok(Self {
            grid,
            dt,
            theta,
            rates,
            implicit,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Advance `field` by one time step.
    pub fn step(&self, field: &mut Field) -> Result<()> {
        let u = &mut field.values;
        let n = u.len();
        for (v, m) in u.iter_mut().zip(&self.rates) {
            *v += self.dt * m * *v * (1.0 - *v);
        }
        let h = self.grid.h();
        let b = (1.0 - self.theta) * self.dt / (h * h);
        let mut rhs = Vec::with_capacity(n);
        rhs.push(u[0] + 2.0 * b * (u[1] - u[0]));
        for i in 1..n - 1 {
            rhs.push(u[i] + b * (u[i - 1] - 2.0 * u[i] + u[i + 1]));
        }
        rhs.push(u[n - 1] + 2.0 * b * (u[n - 2] - u[n - 1]));
        self.implicit.solve_in_place(&mut rhs);
        for (i, v) in rhs.iter_mut().enumerate() {
            if *v < -RANGE_TOLERANCE || *v > 1.0 + RANGE_TOLERANCE || !v.is_finite() {
                return Err(Error::Scheme(format!(
                    "u = {v} at x = {} leaves [0, 1]",
                    self.grid.x(i)
                )));
            }
            *v = if *v < UNDERFLOW_FLOOR { 0.0 } else { v.min(1.0) };
        }
        *u = rhs;
        field.t += self.dt;
        Ok(())
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub field: Field,
    pub trace: FrontTrace,
    /// The front reached `X_max - stop_margin` before `t_end`.
    pub early_stop: bool,
    pub steps: usize,
}

/// Integrate from the initial datum to `t_end`, tracking the front at every
/// observation time and stopping early when it gets within `stop_margin` of
/// `X_max`.
pub fn run(
    medium: &Medium,
    cfg: &SolverConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<RunOutcome> {
    cfg.validate(medium)?;
    let grid = cfg.grid()?;
    let solver = Solver::new(medium, grid, cfg.dt)?;
    let mut field = cfg.initial.field(grid)?;
    let mut trace = FrontTrace::new(cfg.front_level)?;
    let margin = cfg.resolved_stop_margin(medium);
    let total_steps = (cfg.t_end / cfg.dt).round() as usize;
    let every = ((cfg.observe_every / cfg.dt).round() as usize).max(1);

    let record = |field: &Field, trace: &mut FrontTrace, observers: &mut [&mut dyn Observer]| {
        for o in observers.iter_mut() {
            o.observe(field);
        }
        match front_position(field, cfg.front_level) {
            Ok(x) => {
                trace.push(field.t(), x)?;
                Ok(x >= cfg.x_max - margin)
            }
            Err(Error::NoFront { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };

    let mut early_stop = record(&field, &mut trace, observers)?;
    let mut steps = 0;
    while !early_stop && steps < total_steps {
        solver.step(&mut field)?;
        steps += 1;
        field.t = steps as f64 * cfg.dt;
        if steps % every == 0 || steps == total_steps {
            early_stop = record(&field, &mut trace, observers)?;
        }
    }
    Ok(RunOutcome {
        field,
        trace,
        early_stop,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{PeriodicProfile, PhaseMap};

    fn homogeneous(m: f64, x_max: f64) -> Medium {
        Medium::composed(
            PeriodicProfile::constant(m).unwrap(),
            PhaseMap::affine(1.0).unwrap(),
            None,
            x_max,
        )
        .unwrap()
    }

    #[test]
    fn equilibria_are_preserved() {
        let medium = homogeneous(1.0, 50.0);
        let grid = Grid::new(50.0, 500).unwrap();
        let solver = Solver::new(&medium, grid, 0.02).unwrap();
        for level in [0.0, 1.0] {
            let mut f = Field::constant(grid, level).unwrap();
            for _ in 0..50 {
                solver.step(&mut f).unwrap();
            }
            assert!(f.values().iter().all(|&v| (v - level).abs() <= 1e-14));
        }
    }

    #[test]
    fn mass_grows_while_below_one() {
        let medium = homogeneous(1.0, 50.0);
        let grid = Grid::new(50.0, 500).unwrap();
        let solver = Solver::new(&medium, grid, 0.02).unwrap();
        let mut f = InitialDatum::Step { width: 2.0 }.field(grid).unwrap();
        let values: Vec<f64> = f.values().iter().map(|v| 0.5 * v).collect();
        f = Field::new(grid, values, 0.0).unwrap();
        let mut mass = f.mass();
        for _ in 0..200 {
            solver.step(&mut f).unwrap();
            assert!(f.mass() > mass);
            mass = f.mass();
            if f.max() >= 1.0 {
                break;
            }
        }
    }

    #[test]
    fn theta_is_crank_nicolson_for_small_steps() {
        let medium = homogeneous(1.0, 50.0);
        let fine = Solver::new(&medium, Grid::new(50.0, 500).unwrap(), 0.005).unwrap();
        assert_eq!(fine.theta(), 0.5);
        let coarse = Solver::new(&medium, Grid::new(50.0, 500).unwrap(), 0.02).unwrap();
        assert!((coarse.theta() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn config_invariants() {
        let medium = homogeneous(1.0, 500.0);
        let mut cfg = SolverConfig::new(500.0, 5000, 0.02, 10.0);
        cfg.validate(&medium).unwrap();
        cfg.dt = 0.3;
        assert!(cfg.validate(&medium).is_err());
        cfg.dt = 0.02;
        cfg.stop_margin = Some(5.0);
        assert!(cfg.validate(&medium).is_err());
        cfg.stop_margin = None;
        cfg.initial = InitialDatum::Step { width: 60.0 };
        assert!(cfg.validate(&medium).is_err());
        assert!(Grid::new(10.0, 100).is_err());
    }

    #[test]
    fn config_json_uses_capital_x_max() {
        let cfg: SolverConfig =
            serde_json::from_str(r#"{"X_max": 500, "n_cells": 5000, "dt": 0.02, "t_end": 200}"#).unwrap();
        assert_eq!(cfg, SolverConfig::new(500.0, 5000, 0.02, 200.0));
        assert!(serde_json::from_str::<SolverConfig>(r#"{"X_max": 5, "n_cells": 500, "dt": 0.02, "t_end": 2, "tol": 1}"#).is_err());
    }

    #[test]
    fn early_stop_near_boundary() {
        let medium = homogeneous(1.0, 100.0);
        let cfg = SolverConfig::new(100.0, 1000, 0.02, 200.0);
        let out = run(&medium, &cfg, &mut []).unwrap();
        assert!(out.early_stop);
        assert!(out.field.t() < 60.0);
        let last = *out.trace.positions().last().unwrap();
        assert!((80.0..85.0).contains(&last));
    }

    #[test]
    fn observers_see_every_sample() {
        let medium = homogeneous(1.0, 100.0);
        let mut cfg = SolverConfig::new(100.0, 1000, 0.02, 5.0);
        cfg.observe_every = 1.0;
        let mut times = Vec::new();
        let mut obs = |f: &Field| times.push(f.t());
        let out = run(&medium, &cfg, &mut [&mut obs]).unwrap();
        assert_eq!(times.len(), 6);
        assert_eq!(out.trace.len(), 6);
        assert!((times[5] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn snapshot_csv() {
        let grid = Grid::new(10.0, 256).unwrap();
        let f = Field::constant(grid, 0.25).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,0"));
        assert_eq!(lines.next(), Some("x,u"));
        assert_eq!(lines.count(), 257);
    }
}
