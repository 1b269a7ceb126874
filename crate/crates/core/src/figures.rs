//! Named experiments that regenerate the data behind each figure panel.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{
    classify_regime, classify_zone, early_collective_threshold, early_risk_dominance_threshold,
    risk_threshold, welfare_of, Boundary, Regime, ZoneReport, DEFAULT_REGIME_CUTOFF,
};
use crate::error::{Error, Result};
use crate::evodyn::stationary_distribution;
use crate::params::{PointConfig, Strategy};
use crate::payoff::{averaged_payoff_matrix, PayoffMatrix};
use crate::sweep::{self, write_file, AxisSpec, SweepSpec};

/// Resolution of every grid axis.
pub const GRID_STEPS: usize = 101;

/// Smallest speed on speed axes; `s = 1` itself is not a valid race.
pub const MIN_SPEED: f64 = 1.01;

pub trait Figure: Send + Sync {
    fn id(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// The grid behind the panel, for figures that are sweeps.
    fn sweep_spec(&self) -> Option<SweepSpec> {
        None
    }

    /// Writes the panel's data files into `out_dir` and returns their paths.
    fn generate(&self, out_dir: &Path) -> Result<Vec<PathBuf>>;
}

fn base(w: f64, p_r: f64, p_fo: f64) -> PointConfig {
    PointConfig {
        c: 1.0,
        b: 4.0,
        s: 1.5,
        big_b: 1e4,
        w,
        p_r,
        p_fo,
        z: 100,
        beta: 0.1,
    }
}

fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Where each boundary crosses along `p_r`, traced over another axis.
#[derive(Debug, Clone, Copy)]
struct Curves {
    boundaries: &'static [(Boundary, &'static str)],
    /// Adds the large-prize closed forms; only meaningful along `s`.
    early_limits: bool,
}

const ALL_CURVES: &[(Boundary, &str)] = &[
    (Boundary::Collective, "collective"),
    (Boundary::AsRiskDominance, "as_rd"),
    (Boundary::CsRiskDominance, "cs_rd"),
];

const COLLECTIVE_ONLY: &[(Boundary, &str)] = &[(Boundary::Collective, "collective")];

fn boundary_csv(spec: &SweepSpec, curves: Curves) -> Result<String> {
    let axis = spec
        .axes
        .iter()
        .find(|a| a.name != "p_r")
        .ok_or_else(|| Error::Spec("boundary trace needs a non-p_r axis".into()))?;
    let mut out = String::new();
    out.push_str(&axis.name);
    for (_, name) in curves.boundaries {
        out.push(',');
        out.push_str(name);
    }
    if curves.early_limits {
        out.push_str(",early_collective,early_rd");
    }
    out.push('\n');
    let one = SweepSpec::new(spec.fixed, vec![axis.clone()]);
    for point in one.points() {
        let race = point.race().validate()?;
        let x = match axis.name.as_str() {
            "s" => point.s,
            "W" => point.w,
            "p_fo" => point.p_fo,
            other => return Err(Error::Spec(format!("no boundary trace along {other}"))),
        };
        let mut cells = vec![format_value(x)];
        for (boundary, _) in curves.boundaries {
            cells.push(format_value(
                risk_threshold(&race, *boundary).unwrap_or(f64::NAN),
            ));
        }
        if curves.early_limits {
            cells.push(format_value(early_collective_threshold(point.s)));
            cells.push(format_value(early_risk_dominance_threshold(point.s)));
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    Ok(out)
}

/// A sweep written in the common grid format, optionally with boundary
/// curves alongside.
struct GridFigure {
    id: &'static str,
    description: &'static str,
    spec: fn() -> SweepSpec,
    curves: Option<(&'static str, Curves)>,
}

impl Figure for GridFigure {
    fn id(&self) -> &'static str {
        self.id
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn sweep_spec(&self) -> Option<SweepSpec> {
        Some((self.spec)())
    }

    fn generate(&self, out_dir: &Path) -> Result<Vec<PathBuf>> {
        let spec = (self.spec)();
        let grid = out_dir.join(format!("{}.csv", self.id));
        sweep::execute(&spec, &grid)?;
        let mut files = vec![grid];
        if let Some((suffix, curves)) = self.curves {
            let path = out_dir.join(format!("{}_{suffix}.csv", self.id));
            write_file(&path, boundary_csv(&spec, curves)?.as_bytes())?;
            files.push(path);
        }
        Ok(files)
    }
}

/// Transition and stationary data at a single parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelData {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    pub params: PointConfig,
    pub regime: Regime,
    pub zone: ZoneReport,
    pub payoffs: PayoffMatrix,
    pub strategies: Vec<Strategy>,
    pub fixation: Vec<Vec<f64>>,
    pub transition: Vec<Vec<f64>>,
    pub distribution: Vec<f64>,
    pub welfare: f64,
}

/// Everything known about one parameter point; `figure` tags panel output.
pub fn panel_data(figure: Option<&str>, point: &PointConfig) -> Result<PanelData> {
    let (race, dynamics) = point.split()?;
    let pi = averaged_payoff_matrix(&race);
    let stationary = stationary_distribution(&pi, &dynamics)?;
    Ok(PanelData {
        figure: figure.map(str::to_string),
        params: *point,
        regime: classify_regime(&race, DEFAULT_REGIME_CUTOFF)?,
        zone: classify_zone(&race),
        welfare: welfare_of(&pi, &stationary),
        transition: stationary.transition(),
        strategies: stationary.strategies,
        fixation: stationary.fixation,
        distribution: stationary.distribution,
        payoffs: pi,
    })
}

struct PanelFigure {
    id: &'static str,
    description: &'static str,
    point: PointConfig,
}

impl Figure for PanelFigure {
    fn id(&self) -> &'static str {
        self.id
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn generate(&self, out_dir: &Path) -> Result<Vec<PathBuf>> {
        let data = panel_data(Some(self.id), &self.point)?;
        let mut text = serde_json::to_string_pretty(&data)?;
        text.push('\n');
        let path = out_dir.join(format!("{}.json", self.id));
        write_file(&path, text.as_bytes())?;
        Ok(vec![path])
    }
}

fn fig1a() -> SweepSpec {
    SweepSpec::new(
        base(100.0, 0.6, 0.1),
        vec![AxisSpec::log("W", 1e1, 1e4, GRID_STEPS)],
    )
}

fn fig1b() -> SweepSpec {
    SweepSpec::new(
        base(100.0, 0.6, 0.1),
        vec![AxisSpec::log("W", 1e4, 1e7, GRID_STEPS)],
    )
}

fn fig1c() -> SweepSpec {
    SweepSpec::new(
        base(100.0, 0.6, 0.1),
        vec![
            AxisSpec::log("W", 1e1, 1e7, GRID_STEPS),
            AxisSpec::linear("p_r", 0.0, 1.0, GRID_STEPS),
        ],
    )
}

fn fig2a() -> SweepSpec {
    SweepSpec::new(
        base(100.0, 0.6, 0.5),
        vec![
            AxisSpec::linear("s", MIN_SPEED, 5.0, GRID_STEPS),
            AxisSpec::linear("p_r", 0.0, 1.0, GRID_STEPS),
        ],
    )
}

fn fig3a() -> SweepSpec {
    SweepSpec::new(
        base(1e6, 0.4, 0.5),
        vec![
            AxisSpec::linear("p_fo", 0.0, 1.0, GRID_STEPS),
            AxisSpec::linear("p_r", 0.0, 1.0, GRID_STEPS),
        ],
    )
}

/// Figures available by id.
pub struct FigureRegistry {
    figures: Vec<Box<dyn Figure>>,
}

impl FigureRegistry {
    pub fn empty() -> Self {
        FigureRegistry {
            figures: Vec::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = FigureRegistry::empty();
        r.register(Box::new(GridFigure {
            id: "fig1a",
            description: "stationary frequencies over W in the early regime (p_r = 0.6)",
            spec: fig1a,
            curves: None,
        }));
        r.register(Box::new(GridFigure {
            id: "fig1b",
            description: "stationary frequencies over W in the late regime (p_r = 0.6)",
            spec: fig1b,
            curves: None,
        }));
        r.register(Box::new(GridFigure {
            id: "fig1c",
            description: "W by p_r grid with the collective-preference threshold",
            spec: fig1c,
            curves: Some((
                "threshold",
                Curves {
                    boundaries: COLLECTIVE_ONLY,
                    early_limits: false,
                },
            )),
        }));
        r.register(Box::new(GridFigure {
            id: "fig2a",
            description: "s by p_r grid at W = 100 with both boundary curves",
            spec: fig2a,
            curves: Some((
                "boundaries",
                Curves {
                    boundaries: ALL_CURVES,
                    early_limits: true,
                },
            )),
        }));
        r.register(Box::new(PanelFigure {
            id: "fig2b",
            description: "transitions and stationary distribution at W = 100, p_r = 0.9",
            point: base(100.0, 0.9, 0.5),
        }));
        r.register(Box::new(PanelFigure {
            id: "fig2c",
            description: "transitions and stationary distribution at W = 100, p_r = 0.6",
            point: base(100.0, 0.6, 0.5),
        }));
        r.register(Box::new(GridFigure {
            id: "fig3a",
            description: "p_fo by p_r grid at W = 1e6 with three boundary curves",
            spec: fig3a,
            curves: Some((
                "boundaries",
                Curves {
                    boundaries: ALL_CURVES,
                    early_limits: false,
                },
            )),
        }));
        r.register(Box::new(PanelFigure {
            id: "fig3b",
            description:
                "transitions and stationary distribution at W = 1e6, p_r = 0.4, p_fo = 0.9",
            point: base(1e6, 0.4, 0.9),
        }));
        r.register(Box::new(PanelFigure {
            id: "fig3c",
            description:
                "transitions and stationary distribution at W = 1e6, p_r = 0.4, p_fo = 0.1",
            point: base(1e6, 0.4, 0.1),
        }));
        r
    }

    /// Adds a figure; a later registration under the same id replaces the
    /// earlier one.
    pub fn register(&mut self, figure: Box<dyn Figure>) {
        self.figures.retain(|f| f.id() != figure.id());
        self.figures.push(figure);
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.figures.iter().map(|f| f.id()).collect()
    }

    pub fn get(&self, id: &str) -> Result<&dyn Figure> {
        self.figures
            .iter()
            .find(|f| f.id() == id)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "figure",
                name: id.to_string(),
                known: self.ids().join(", "),
            })
    }
}

impl Default for FigureRegistry {
    fn default() -> Self {
        FigureRegistry::builtin()
    }
}

/// Regenerates one built-in figure's data into `out_dir`.
pub fn run_figure(id: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    FigureRegistry::builtin().get(id)?.generate(out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_ids() {
        assert_eq!(
            FigureRegistry::builtin().ids(),
            vec!["fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c"]
        );
    }

    #[test]
    fn unknown_figure() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_figure("fig4", dir.path()).unwrap_err();
        assert!(err.to_string().contains("fig1a"), "{err}");
    }

    #[test]
    fn specs_are_valid() {
        let r = FigureRegistry::builtin();
        for id in r.ids() {
            if let Some(spec) = r.get(id).unwrap().sweep_spec() {
                spec.check().unwrap();
                for p in spec.points() {
                    p.split().unwrap();
                }
            }
        }
    }

    #[test]
    fn fig2a_boundaries_cross_at_known_points() {
        let text = boundary_csv(
            &fig2a(),
            Curves {
                boundaries: ALL_CURVES,
                early_limits: true,
            },
        )
        .unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("s,collective,as_rd,cs_rd,early_collective,early_rd")
        );
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), GRID_STEPS);
        // s = 1.5 is not on the grid; the nearest row is within one step
        let row = rows
            .iter()
            .min_by(|a, b| (a[0] - 1.5).abs().total_cmp(&(b[0] - 1.5).abs()))
            .unwrap();
        assert!((row[1] - 1.0 / 3.0).abs() < 0.02, "{row:?}");
        assert!((row[3] - 7.0 / 9.0).abs() < 0.02, "{row:?}");
    }

    #[test]
    fn panels_write_json() {
        let dir = tempfile::tempdir().unwrap();
        let files = run_figure("fig2c", dir.path()).unwrap();
        assert_eq!(files, vec![dir.path().join("fig2c.json")]);
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
        for key in [
            "params",
            "payoffs",
            "transition",
            "fixation",
            "distribution",
            "zone",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["zone"]["zone"], "Dilemma");
        assert_eq!(v["strategies"], serde_json::json!(["AS", "AU", "CS"]));
    }
}
