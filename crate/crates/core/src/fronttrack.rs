//! Level-set front positions, windowed front speeds and finite-horizon
//! estimates of the minimal and maximal spreading speeds.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::numerics::ls_slope;
use crate::solver::Field;

/// Front positions `x_level(t_k)` at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontTrace {
    level: f64,
    times: Vec<f64>,
    positions: Vec<f64>,
}

impl FrontTrace {
    pub fn new(level: f64) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(param(format!("level must lie in (0, 1), got {level}")));
        }
        Ok(Self {
            level,
            times: Vec::new(),
            positions: Vec::new(),
        })
    }

    pub fn from_samples(level: f64, times: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        let mut trace = Self::new(level)?;
        if times.len() != positions.len() {
            return Err(param("times and positions differ in length"));
        }
        for (t, x) in times.into_iter().zip(positions) {
            trace.push(t, x)?;
        }
        Ok(trace)
    }

    pub fn push(&mut self, t: f64, x: f64) -> Result<()> {
        if self.times.last().is_some_and(|&last| t <= last) {
            return Err(param(format!("trace times must increase, got {t} after {:?}", self.times.last())));
        }
        self.times.push(t);
        self.positions.push(x);
        Ok(())
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn span(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// Largest `x` with `u(x) >= level`, interpolated linearly towards the next node.
pub fn front_position(field: &Field, level: f64) -> Result<f64> {
    front_position_in(field.values(), field.grid().h(), level)
}

/// [`front_position`] on raw nodal values `u_i` at `x_i = i h`.
pub fn front_position_in(values: &[f64], h: f64, level: f64) -> Result<f64> {
    let Some(i) = values.iter().rposition(|&u| u >= level) else {
        return Err(Error::NoFront { level });
    };
    if i + 1 == values.len() {
        return Ok(i as f64 * h);
    }
    let (a, b) = (values[i], values[i + 1]);
    Ok(h * (i as f64 + (a - level) / (a - b)))
}

/// Least-squares slope of the trace over `[t_end - W, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowedSpeed {
    pub t_end: f64,
    pub speed: f64,
}

/// Slopes over windows `[t - W, t]` with `t` stepped by `W / 4` from
/// `t_0 + W` to the last sample.
pub fn windowed_speeds(trace: &FrontTrace, window: f64) -> Result<Vec<WindowedSpeed>> {
    if !(window > 0.0) {
        return Err(param(format!("window must be positive, got {window}")));
    }
    if trace.len() < 2 || trace.span() < 2.0 * window - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "trace spans {} time units, need at least {}",
            trace.span(),
            2.0 * window
        )));
    }
    let times = trace.times();
    let xs = trace.positions();
    let (first, last) = (times[0], times[times.len() - 1]);
    let slack = 1e-9 * window.max(1.0);
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let end = first + window + 0.25 * window * k as f64;
        if end > last + slack {
            break;
        }
        let lo = times.partition_point(|&t| t < end - window - slack);
        let hi = times.partition_point(|&t| t <= end + slack);
        if hi - lo >= 2 {
            out.push(WindowedSpeed {
                t_end: end,
                speed: ls_slope(&times[lo..hi], &xs[lo..hi]),
            });
        }
        k += 1;
    }
    if out.is_empty() {
        return Err(Error::InsufficientData("no window holds two samples".into()));
    }
    Ok(out)
}

/// Tracker settings; defaults are level 0.5, window 10, transient 0.3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackerConfig {
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_transient")]
    pub transient: f64,
}

fn default_level() -> f64 {
    0.5
}

fn default_window() -> f64 {
    10.0
}

fn default_transient() -> f64 {
    0.3
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            level: default_level(),
            window: default_window(),
            transient: default_transient(),
        }
    }
}

/// Finite-horizon proxies for the minimal and maximal spreading speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedEstimates {
    pub w_low_est: f64,
    pub w_up_est: f64,
    pub windows_used: usize,
}

impl SpeedEstimates {
    pub fn gap(&self) -> f64 {
        self.w_up_est - self.w_low_est
    }
}

/// Min and max windowed speed after dropping the first `transient_fraction`
/// of the windows.
pub fn estimate_spreading_speeds(
    trace: &FrontTrace,
    window: f64,
    transient_fraction: f64,
) -> Result<SpeedEstimates> {
    if !(0.0..=0.9).contains(&transient_fraction) {
        return Err(param(format!(
            "transient fraction must lie in [0, 0.9], got {transient_fraction}"
        )));
    }
    let speeds = windowed_speeds(trace, window)?;
    estimates_from_speeds(&speeds, transient_fraction)
}

pub fn estimates_from_speeds(speeds: &[WindowedSpeed], transient_fraction: f64) -> Result<SpeedEstimates> {
    let skip = (transient_fraction * speeds.len() as f64).floor() as usize;
    let kept = &speeds[skip.min(speeds.len())..];
    if kept.is_empty() {
        return Err(Error::InsufficientData("every window was discarded as transient".into()));
    }
    let (lo, hi) = kept
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| (l.min(s.speed), h.max(s.speed)));
    Ok(SpeedEstimates {
        w_low_est: lo,
        w_up_est: hi,
        windows_used: kept.len(),
    })
}

/// CSV with columns `t,x_front,speed_windowed`; the speed is that of the
/// window ending at `t`, blank when no window ends there.
pub fn write_trace_csv<W: Write>(
    mut out: W,
    trace: &FrontTrace,
    speeds: &[WindowedSpeed],
) -> io::Result<()> {
    writeln!(out, "t,x_front,speed_windowed")?;
    let mut next = speeds.iter().peekable();
    for (&t, &x) in trace.times().iter().zip(trace.positions()) {
        while next.peek().is_some_and(|s| s.t_end < t - 1e-9) {
            next.next();
        }
        match next.peek() {
            Some(s) if (s.t_end - t).abs() <= 1e-9 => writeln!(out, "{t},{x},{}", s.speed)?,
            _ => writeln!(out, "{t},{x},")?,
        }
    }
    Ok(())
}
