//! Grid sweeps over the parameter space and their CSV/JSON output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{boundary_values, welfare_of, zone_from_values, SelectionRule, ZoneReport};
use crate::error::{Error, Result};
use crate::evodyn::{stationary_distribution_with, FixationSolver, StationaryResult};
use crate::params::{PointConfig, Strategy};
use crate::payoff::averaged_payoff_matrix;
use crate::registry::{SolverOptions, SolverRegistry};

pub const CSV_HEADER: &str =
    "p_r,s,p_fo,W,zone,collective_gap,as_rd_margin,cs_rd_margin,freq_AS,freq_AU,freq_CS,welfare";

pub const MAX_AXES: usize = 2;

/// Names accepted for swept parameters.
pub const SWEEPABLE: [&str; 8] = ["c", "b", "s", "B", "W", "p_r", "p_fo", "beta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl AxisSpec {
    pub fn linear(name: &str, min: f64, max: f64, steps: usize) -> Self {
        AxisSpec {
            name: name.to_string(),
            min,
            max,
            steps,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(name: &str, min: f64, max: f64, steps: usize) -> Self {
        AxisSpec {
            spacing: Spacing::Log,
            ..AxisSpec::linear(name, min, max, steps)
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                if i + 1 == self.steps {
                    return self.max;
                }
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => {
                        let (lo, hi) = (self.min.log10(), self.max.log10());
                        10f64.powf(lo + t * (hi - lo))
                    }
                }
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Spec(format!("axis '{}': {what}", self.name)));
        if !SWEEPABLE.contains(&self.name.as_str()) {
            return bad(&format!(
                "unknown parameter (sweepable: {})",
                SWEEPABLE.join(", ")
            ));
        }
        if self.steps < 2 {
            return bad("steps must be at least 2");
        }
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return bad("min must be below max");
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return bad("log spacing needs min > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_solver() -> String {
    "analytic".to_string()
}

/// A grid of up to two swept parameters around a fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub axes: Vec<AxisSpec>,
    pub fixed: PointConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub rule: SelectionRule,
    #[serde(default = "default_solver")]
    pub solver: String,
}

impl SweepSpec {
    pub fn new(fixed: PointConfig, axes: Vec<AxisSpec>) -> Self {
        SweepSpec {
            axes,
            fixed,
            output: None,
            format: OutputFormat::Csv,
            rule: SelectionRule::Both,
            solver: default_solver(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.check()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SweepSpec::from_json(&text)
    }

    pub fn check(&self) -> Result<()> {
        if self.axes.len() > MAX_AXES {
            return Err(Error::Spec(format!(
                "axes: at most {MAX_AXES} swept parameters, got {}",
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            axis.check()?;
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::Spec(format!(
                "axes: '{}' swept twice",
                self.axes[0].name
            )));
        }
        Ok(())
    }

    /// Grid points in row-major order over the axes as declared.
    pub fn points(&self) -> Vec<PointConfig> {
        let mut points = vec![self.fixed];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|p| values.iter().map(move |&v| set(p, &axis.name, v)))
                .collect();
        }
        points
    }
}

fn set(mut p: PointConfig, name: &str, value: f64) -> PointConfig {
    match name {
        "c" => p.c = value,
        "b" => p.b = value,
        "s" => p.s = value,
        "B" => p.big_b = value,
        "W" => p.w = value,
        "p_r" => p.p_r = value,
        "p_fo" => p.p_fo = value,
        "beta" => p.beta = value,
        other => unreachable!("unchecked axis {other}"),
    }
    p
}

/// Everything computed at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: PointConfig,
    pub zone: ZoneReport,
    pub stationary: StationaryResult,
    pub welfare: f64,
}

impl SweepRow {
    fn freq(&self, s: Strategy) -> f64 {
        self.stationary.frequency(s).unwrap_or(f64::NAN)
    }

    pub fn csv_line(&self) -> String {
        let n = |x: f64| format!("{x:.16e}");
        [
            n(self.point.p_r),
            n(self.point.s),
            n(self.point.p_fo),
            n(self.point.w),
            self.zone.zone.label().to_string(),
            n(self.zone.collective_gap),
            n(self.zone.as_rd_margin),
            n(self.zone.cs_rd_margin),
            n(self.freq(Strategy::AS)),
            n(self.freq(Strategy::AU)),
            n(self.freq(Strategy::CS)),
            n(self.welfare),
        ]
        .join(",")
    }
}

/// Zone, stationary distribution and welfare at one point.
pub fn evaluate_point(
    point: &PointConfig,
    solver: &dyn FixationSolver,
    rule: SelectionRule,
) -> Result<SweepRow> {
    let (race, dynamics) = point.split()?;
    let pi = averaged_payoff_matrix(&race);
    let (gap, as_margin, cs_margin) = boundary_values(&pi);
    let stationary = stationary_distribution_with(solver, &pi, &dynamics)?;
    Ok(SweepRow {
        point: *point,
        zone: zone_from_values(gap, as_margin, cs_margin, rule),
        welfare: welfare_of(&pi, &stationary),
        stationary,
    })
}

/// Evaluates every grid point. Points run in parallel; rows come back in
/// grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.check()?;
    let solver = SolverRegistry::builtin().create(&spec.solver, &SolverOptions::default())?;
    let solver = solver.as_ref();
    spec.points()
        .par_iter()
        .map(|p| {
            evaluate_point(p, solver, spec.rule).map_err(|e| match e {
                Error::InvalidParams(msg) => Error::InvalidParams(format!(
                    "{msg} at grid point p_r={} s={} p_fo={} W={}",
                    p.p_r, p.s, p.p_fo, p.w
                )),
                other => other,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    out.flush()
}

#[derive(Serialize)]
struct JsonRow<'a> {
    p_r: f64,
    s: f64,
    p_fo: f64,
    #[serde(rename = "W")]
    w: f64,
    zone: &'a str,
    collective_gap: f64,
    as_rd_margin: f64,
    cs_rd_margin: f64,
    #[serde(rename = "freq_AS")]
    freq_as: f64,
    #[serde(rename = "freq_AU")]
    freq_au: f64,
    #[serde(rename = "freq_CS")]
    freq_cs: f64,
    welfare: f64,
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    let json: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            p_r: r.point.p_r,
            s: r.point.s,
            p_fo: r.point.p_fo,
            w: r.point.w,
            zone: r.zone.zone.label(),
            collective_gap: r.zone.collective_gap,
            as_rd_margin: r.zone.as_rd_margin,
            cs_rd_margin: r.zone.cs_rd_margin,
            freq_as: r.freq(Strategy::AS),
            freq_au: r.freq(Strategy::AU),
            freq_cs: r.freq(Strategy::CS),
            welfare: r.welfare,
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &json)?;
    writeln!(out).map_err(|e| Error::io("<json output>", e))?;
    Ok(())
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Runs the sweep and writes its output file, returning the rows.
pub fn execute(spec: &SweepSpec, output: &Path) -> Result<Vec<SweepRow>> {
    let rows = run_sweep(spec)?;
    let mut buf = Vec::new();
    match spec.format {
        OutputFormat::Csv => write_csv(&rows, &mut buf).map_err(|e| Error::io(output, e))?,
        OutputFormat::Json => write_json(&rows, &mut buf)?,
    }
    write_file(output, &buf)?;
    Ok(rows)
}
