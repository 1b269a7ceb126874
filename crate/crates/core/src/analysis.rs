//! Regimes, zones, threshold curves and social welfare.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evodyn::{risk_dominance_margin, stationary_distribution, StationaryResult};
use crate::params::{DynamicsParams, RaceParams, Strategy};
use crate::payoff::{averaged_payoff_matrix, PayoffMatrix};

/// Default factor separating "much larger" from "comparable".
pub const DEFAULT_REGIME_CUTOFF: f64 = 10.0;

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeKind {
    EarlyAis,
    Intermediate,
    LateAis,
}

/// Time-scale regime of the race, with the ratio `B / (W b)` behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: RegimeKind,
    pub ratio: f64,
    pub cutoff: f64,
}

/// Early when the prize per round exceeds the round benefit by at least
/// `cutoff`, late when it falls short by the same factor.
pub fn classify_regime(params: &RaceParams, cutoff: f64) -> Result<Regime> {
    if !(cutoff > 1.0) {
        return Err(Error::InvalidArgument("regime cutoff must exceed 1".into()));
    }
    let ratio = params.prize / (params.rounds * params.benefit);
    let kind = if ratio >= cutoff {
        RegimeKind::EarlyAis
    } else if ratio <= 1.0 / cutoff {
        RegimeKind::LateAis
    } else {
        RegimeKind::Intermediate
    };
    Ok(Regime {
        kind,
        ratio,
        cutoff,
    })
}

/// Disaster risk above which safety is collectively preferred, in the
/// limit where the prize per round dwarfs the round benefit.
pub fn early_collective_threshold(speed: f64) -> f64 {
    1.0 - 1.0 / speed
}

/// Disaster risk above which AS and CS risk-dominate AU in the same limit.
pub fn early_risk_dominance_threshold(speed: f64) -> f64 {
    1.0 - 1.0 / (3.0 * speed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Zone {
    /// Safety preferred collectively and selected socially.
    Compliance,
    /// Safety preferred collectively, not selected.
    Dilemma,
    /// Unsafe development preferred collectively.
    Innovation,
}

impl Zone {
    /// Roman-numeral label used in tables.
    pub fn label(self) -> &'static str {
        match self {
            Zone::Compliance => "I",
            Zone::Dilemma => "II",
            Zone::Innovation => "III",
        }
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// How the AS and CS risk-dominance conditions combine into "safety is
/// selected by the social dynamics".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionRule {
    /// Both AS and CS must risk-dominate AU.
    #[default]
    Both,
    /// Either suffices.
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneReport {
    pub zone: Zone,
    pub collective_gap: f64,
    pub as_rd_margin: f64,
    pub cs_rd_margin: f64,
    /// Set when a deciding quantity was exactly zero.
    pub tie: bool,
}

/// The three boundary quantities of a payoff matrix.
pub fn boundary_values(pi: &PayoffMatrix) -> (f64, f64, f64) {
    use Strategy::*;
    (
        pi.get(AS, AS) - pi.get(AU, AU),
        risk_dominance_margin(AS, AU, pi),
        risk_dominance_margin(CS, AU, pi),
    )
}

pub fn zone_from_values(
    collective_gap: f64,
    as_rd_margin: f64,
    cs_rd_margin: f64,
    rule: SelectionRule,
) -> ZoneReport {
    // Zero counts as the safer side of every boundary.
    let selected = match rule {
        SelectionRule::Both => as_rd_margin >= 0.0 && cs_rd_margin >= 0.0,
        SelectionRule::Either => as_rd_margin >= 0.0 || cs_rd_margin >= 0.0,
    };
    let zone = if collective_gap < 0.0 {
        Zone::Innovation
    } else if selected {
        Zone::Compliance
    } else {
        Zone::Dilemma
    };
    let tie = collective_gap == 0.0 || as_rd_margin == 0.0 || cs_rd_margin == 0.0;
    ZoneReport {
        zone,
        collective_gap,
        as_rd_margin,
        cs_rd_margin,
        tie,
    }
}

pub fn classify_zone_with(params: &RaceParams, rule: SelectionRule) -> ZoneReport {
    let (gap, as_margin, cs_margin) = boundary_values(&averaged_payoff_matrix(params));
    zone_from_values(gap, as_margin, cs_margin, rule)
}

/// Zone of a parameter point, requiring both AS and CS to be selected.
pub fn classify_zone(params: &RaceParams) -> ZoneReport {
    classify_zone_with(params, SelectionRule::Both)
}

/// Parameter varied when tracing a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "c")]
    Cost,
    #[serde(rename = "b")]
    Benefit,
    #[serde(rename = "s")]
    Speed,
    #[serde(rename = "B")]
    Prize,
    #[serde(rename = "W")]
    Rounds,
    #[serde(rename = "p_r")]
    DisasterRisk,
    #[serde(rename = "p_fo")]
    Detection,
}

impl Axis {
    pub const ALL: [Axis; 7] = [
        Axis::Cost,
        Axis::Benefit,
        Axis::Speed,
        Axis::Prize,
        Axis::Rounds,
        Axis::DisasterRisk,
        Axis::Detection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Cost => "c",
            Axis::Benefit => "b",
            Axis::Speed => "s",
            Axis::Prize => "B",
            Axis::Rounds => "W",
            Axis::DisasterRisk => "p_r",
            Axis::Detection => "p_fo",
        }
    }

    pub fn from_name(name: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn get(self, p: &RaceParams) -> f64 {
        match self {
            Axis::Cost => p.cost,
            Axis::Benefit => p.benefit,
            Axis::Speed => p.speed,
            Axis::Prize => p.prize,
            Axis::Rounds => p.rounds,
            Axis::DisasterRisk => p.disaster_risk,
            Axis::Detection => p.detection,
        }
    }

    pub fn with(self, p: &RaceParams, value: f64) -> RaceParams {
        let mut out = *p;
        match self {
            Axis::Cost => out.cost = value,
            Axis::Benefit => out.benefit = value,
            Axis::Speed => out.speed = value,
            Axis::Prize => out.prize = value,
            Axis::Rounds => out.rounds = value,
            Axis::DisasterRisk => out.disaster_risk = value,
            Axis::Detection => out.detection = value,
        }
        out
    }

    /// Scan interval used when none is given: the full valid range for
    /// probabilities, a generous finite range otherwise.
    pub fn default_range(self, p: &RaceParams) -> (f64, f64) {
        match self {
            Axis::DisasterRisk | Axis::Detection => (0.0, 1.0),
            Axis::Speed => (1.0 + 1e-9, (p.rounds).min(100.0)),
            Axis::Rounds => (p.speed, 1e8),
            Axis::Cost => (0.0, 1e3),
            Axis::Benefit | Axis::Prize => (1e-9, 1e8),
        }
    }
}

/// Which zone boundary a threshold traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    /// `Π(AS,AS) = Π(AU,AU)`.
    Collective,
    /// AS ties AU in risk dominance.
    AsRiskDominance,
    /// CS ties AU in risk dominance.
    CsRiskDominance,
}

impl Boundary {
    pub const ALL: [Boundary; 3] = [
        Boundary::Collective,
        Boundary::AsRiskDominance,
        Boundary::CsRiskDominance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Boundary::Collective => "collective",
            Boundary::AsRiskDominance => "as_risk_dominance",
            Boundary::CsRiskDominance => "cs_risk_dominance",
        }
    }

    /// Signed boundary quantity; positive on the safe side.
    pub fn value(self, params: &RaceParams) -> f64 {
        let (gap, as_margin, cs_margin) = boundary_values(&averaged_payoff_matrix(params));
        match self {
            Boundary::Collective => gap,
            Boundary::AsRiskDominance => as_margin,
            Boundary::CsRiskDominance => cs_margin,
        }
    }
}

/// Locates where `target` changes sign as `vary` moves over its default
/// range, by bisection to [`BISECTION_TOLERANCE`].
pub fn threshold_curve(params: &RaceParams, vary: Axis, target: Boundary) -> Result<f64> {
    let (lo, hi) = vary.default_range(params);
    threshold_in(params, vary, target, lo, hi)
}

pub fn threshold_in(
    params: &RaceParams,
    vary: Axis,
    target: Boundary,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "empty scan interval [{lo}, {hi}]"
        )));
    }
    let f = |x: f64| target.value(&vary.with(params, x));
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    let no_change = || Error::NoSignChange {
        quantity: format!("{} boundary in {}", target.name(), vary.name()),
        lo,
        hi,
    };
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(no_change());
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(no_change());
    }
    let negative_at_lo = fa < 0.0;
    while b - a > BISECTION_TOLERANCE {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == negative_at_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Disaster-risk value at which `target` vanishes, from the exact affine
/// dependence of every boundary quantity on `p_r`.
///
/// The result may lie outside `[0, 1]`: below 0 means the safe side holds
/// for every risk level, above 1 that it never does. `None` when the
/// quantity does not depend on the risk at all.
pub fn risk_threshold(params: &RaceParams, target: Boundary) -> Option<f64> {
    let at0 = target.value(&Axis::DisasterRisk.with(params, 0.0));
    let at1 = target.value(&Axis::DisasterRisk.with(params, 1.0));
    let slope = at1 - at0;
    if slope == 0.0 {
        None
    } else {
        Some(-at0 / slope)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfarePoint {
    pub welfare: f64,
    pub stationary: StationaryResult,
}

/// Stationary-weighted payoff of homogeneous populations.
pub fn welfare_of(pi: &PayoffMatrix, stationary: &StationaryResult) -> f64 {
    stationary
        .distribution
        .iter()
        .enumerate()
        .map(|(i, &w)| w * pi.at(i, i))
        .sum()
}

pub fn social_welfare(params: &RaceParams, dynamics: &DynamicsParams) -> Result<WelfarePoint> {
    let pi = averaged_payoff_matrix(params);
    let stationary = stationary_distribution(&pi, dynamics)?;
    Ok(WelfarePoint {
        welfare: welfare_of(&pi, &stationary),
        stationary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig2(p_r: f64) -> RaceParams {
        RaceParams {
            cost: 1.0,
            benefit: 4.0,
            speed: 1.5,
            prize: 1e4,
            rounds: 100.0,
            disaster_risk: p_r,
            detection: 0.5,
        }
    }

    #[test]
    fn regimes() {
        let early = classify_regime(&fig2(0.5), 10.0).unwrap();
        assert_eq!(early.kind, RegimeKind::EarlyAis);
        assert!((early.ratio - 25.0).abs() < 1e-12);
        let late = classify_regime(
            &RaceParams {
                rounds: 1e6,
                ..fig2(0.5)
            },
            10.0,
        )
        .unwrap();
        assert_eq!(late.kind, RegimeKind::LateAis);
        assert!((late.ratio - 0.0025).abs() < 1e-15);
        let even = RaceParams {
            prize: 400.0,
            ..fig2(0.5)
        };
        for cutoff in [1.0001, 2.0, 10.0, 1e6] {
            assert_eq!(
                classify_regime(&even, cutoff).unwrap().kind,
                RegimeKind::Intermediate
            );
        }
        assert!(classify_regime(&even, 1.0).is_err());
    }

    #[test]
    fn early_thresholds() {
        assert!((early_collective_threshold(1.5) - 1.0 / 3.0).abs() < 1e-15);
        assert!(early_collective_threshold(1.0 + 1e-12) < 1e-11);
        assert_eq!(early_collective_threshold(2.0), 0.5);
        assert!((early_risk_dominance_threshold(1.5) - 7.0 / 9.0).abs() < 1e-15);
        assert!((early_risk_dominance_threshold(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((early_risk_dominance_threshold(2.0) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zones_of_fig2_points() {
        assert_eq!(classify_zone(&fig2(0.9)).zone, Zone::Compliance);
        assert_eq!(classify_zone(&fig2(0.6)).zone, Zone::Dilemma);
        let innovation = classify_zone(&fig2(0.2));
        assert_eq!(innovation.zone, Zone::Innovation);
        assert!(innovation.collective_gap < 0.0);
    }

    #[test]
    fn ties_resolve_to_safer_zone() {
        let r = zone_from_values(0.0, -1.0, -1.0, SelectionRule::Both);
        assert_eq!(r.zone, Zone::Dilemma);
        assert!(r.tie);
        let r = zone_from_values(1.0, 0.0, 2.0, SelectionRule::Both);
        assert_eq!(r.zone, Zone::Compliance);
        let r = zone_from_values(1.0, 1.0, 2.0, SelectionRule::Both);
        assert!(!r.tie);
    }

    #[test]
    fn either_rule_is_looser() {
        let r = zone_from_values(1.0, 1.0, -1.0, SelectionRule::Both);
        assert_eq!(r.zone, Zone::Dilemma);
        let r = zone_from_values(1.0, 1.0, -1.0, SelectionRule::Either);
        assert_eq!(r.zone, Zone::Compliance);
    }

    #[test]
    fn bisected_thresholds_early_regime() {
        let p = fig2(0.5);
        let c = threshold_curve(&p, Axis::DisasterRisk, Boundary::Collective).unwrap();
        assert!((c - 1.0 / 3.0).abs() < 0.01, "{c}");
        let a = threshold_curve(&p, Axis::DisasterRisk, Boundary::AsRiskDominance).unwrap();
        assert!((a - 7.0 / 9.0).abs() < 0.01, "{a}");
    }

    #[test]
    fn bisection_agrees_with_affine_root() {
        let p = fig2(0.5);
        for target in Boundary::ALL {
            let bis = threshold_curve(&p, Axis::DisasterRisk, target).unwrap();
            let exact = risk_threshold(&p, target).unwrap();
            assert!((bis - exact).abs() < 1e-6, "{target:?}: {bis} vs {exact}");
        }
    }

    #[test]
    fn no_sign_change_in_detection_at_zero_risk() {
        let p = fig2(0.0);
        let err = threshold_curve(&p, Axis::Detection, Boundary::Collective).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }), "{err}");
    }

    #[test]
    fn late_regime_risk_thresholds_cross() {
        let base = RaceParams {
            rounds: 1e6,
            ..fig2(0.4)
        };
        let small = RaceParams {
            detection: 0.05,
            ..base
        };
        let large = RaceParams {
            detection: 0.9,
            ..base
        };
        let th = |p: &RaceParams, b| risk_threshold(p, b).unwrap();
        assert!(th(&small, Boundary::CsRiskDominance) < th(&small, Boundary::AsRiskDominance));
        assert!(th(&large, Boundary::CsRiskDominance) > th(&large, Boundary::AsRiskDominance));
    }

    #[test]
    fn welfare_at_certain_disaster() {
        let p = fig2(1.0);
        let d = DynamicsParams::default();
        let w = social_welfare(&p, &d).unwrap();
        let dist = &w.stationary.distribution;
        assert!((w.welfare - (dist[0] + dist[2]) * 51.0).abs() < 1e-9);
    }

    #[test]
    fn welfare_under_neutral_drift() {
        let p = fig2(0.6);
        let pi = averaged_payoff_matrix(&p);
        let w = social_welfare(&p, &DynamicsParams::new(100, 0.0)).unwrap();
        let mean = (pi.at(0, 0) + pi.at(1, 1) + pi.at(2, 2)) / 3.0;
        assert!((w.welfare - mean).abs() < 1e-10);
    }

    #[test]
    fn low_risk_beats_high_risk_welfare() {
        let base = RaceParams {
            detection: 0.1,
            ..fig2(0.0)
        };
        let d = DynamicsParams::default();
        let low = social_welfare(
            &RaceParams {
                disaster_risk: 0.2,
                ..base
            },
            &d,
        )
        .unwrap();
        let high = social_welfare(
            &RaceParams {
                disaster_risk: 0.9,
                ..base
            },
            &d,
        )
        .unwrap();
        assert!(
            low.welfare > high.welfare,
            "{} vs {}",
            low.welfare,
            high.welfare
        );
    }

    #[test]
    fn axis_names_round_trip() {
        for a in Axis::ALL {
            assert_eq!(Axis::from_name(a.name()), Some(a));
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                format!("\"{}\"", a.name())
            );
        }
        assert_eq!(Axis::from_name("Z"), None);
    }

    prop_compose! {
        fn early_point()(s in 1.01..5.0f64, pr in 0.0..=1.0f64, pfo in 0.0..=1.0f64) -> RaceParams {
            RaceParams { speed: s, detection: pfo, ..fig2(pr) }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exactly_one_zone(gap in -1.0..1.0f64, a in -1.0..1.0f64, c in -1.0..1.0f64) {
            let r = zone_from_values(gap, a, c, SelectionRule::Both);
            let compliance = gap >= 0.0 && a >= 0.0 && c >= 0.0;
            let dilemma = gap >= 0.0 && (a < 0.0 || c < 0.0);
            let innovation = gap < 0.0;
            prop_assert_eq!(compliance as u8 + dilemma as u8 + innovation as u8, 1);
            prop_assert_eq!(r.zone == Zone::Compliance, compliance);
            prop_assert_eq!(r.zone == Zone::Dilemma, dilemma);
        }

        #[test]
        fn welfare_within_homogeneous_payoffs(p in early_point()) {
            let pi = averaged_payoff_matrix(&p);
            let w = social_welfare(&p, &DynamicsParams::default()).unwrap();
            let diag = [pi.at(0, 0), pi.at(1, 1), pi.at(2, 2)];
            let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(w.welfare >= lo - 1e-9 && w.welfare <= hi + 1e-9);
        }
    }

    #[test]
    fn thresholds_converge_to_early_limit() {
        // B / (W b) = 1e4.
        for s in [1.2, 1.5, 2.0, 3.0] {
            let p = RaceParams {
                speed: s,
                prize: 4e6,
                ..fig2(0.5)
            };
            let c = threshold_curve(&p, Axis::DisasterRisk, Boundary::Collective).unwrap();
            assert!(
                (c - early_collective_threshold(s)).abs() <= 1e-3,
                "s={s}: {c}"
            );
            for b in [Boundary::AsRiskDominance, Boundary::CsRiskDominance] {
                let t = threshold_curve(&p, Axis::DisasterRisk, b).unwrap();
                assert!(
                    (t - early_risk_dominance_threshold(s)).abs() <= 1e-3,
                    "s={s} {b:?}: {t}"
                );
            }
        }
    }
}
