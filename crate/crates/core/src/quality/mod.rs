//! Rate-distortion evaluation: weighted YUV-PSNR, Bjøntegaard delta rate and
//! the RASL quality-transition model used at switches.

mod pchip;
mod transition;

pub use pchip::Pchip;
pub use transition::{transition_profile, Direction, TransitionParams, TransitionProfile};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gop::Poc;

/// Joint PSNR with 6:1:1 luma/chroma weighting.
pub fn yuv_psnr(psnr_y: f64, psnr_u: f64, psnr_v: f64) -> f64 {
    (6.0 * psnr_y + psnr_u + psnr_v) / 8.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdPoint {
    pub rate_kbps: f64,
    pub psnr_y: f64,
    pub psnr_u: f64,
    pub psnr_v: f64,
}

impl RdPoint {
    pub fn new(rate_kbps: f64, psnr_y: f64, psnr_u: f64, psnr_v: f64) -> Self {
        RdPoint {
            rate_kbps,
            psnr_y,
            psnr_u,
            psnr_v,
        }
    }

    pub fn yuv(&self) -> f64 {
        yuv_psnr(self.psnr_y, self.psnr_u, self.psnr_v)
    }

    pub fn quality(&self, c: Component) -> f64 {
        match c {
            Component::Y => self.psnr_y,
            Component::U => self.psnr_u,
            Component::V => self.psnr_v,
            Component::Yuv => self.yuv(),
        }
    }
}

/// At least four RD points with strictly increasing rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RdPoint>", into = "Vec<RdPoint>")]
pub struct RdCurve {
    points: Vec<RdPoint>,
}

pub const MIN_RD_POINTS: usize = 4;

impl RdCurve {
    /// Sorts by rate and validates.
    pub fn new(mut points: Vec<RdPoint>) -> Result<Self> {
        if points.len() < MIN_RD_POINTS {
            return Err(Error::invalid(format!(
                "rd curve needs at least {MIN_RD_POINTS} points, got {}",
                points.len()
            )));
        }
        for p in &points {
            if !(p.rate_kbps > 0.0 && p.rate_kbps.is_finite()) {
                return Err(Error::invalid(format!(
                    "rate {} must be positive",
                    p.rate_kbps
                )));
            }
            if ![p.psnr_y, p.psnr_u, p.psnr_v].iter().all(|v| v.is_finite()) {
                return Err(Error::invalid("psnr values must be finite"));
            }
        }
        points.sort_by(|a, b| a.rate_kbps.total_cmp(&b.rate_kbps));
        if points.windows(2).any(|w| w[1].rate_kbps <= w[0].rate_kbps) {
            return Err(Error::invalid("rd curve rates must be distinct"));
        }
        if points.windows(2).any(|w| w[1].yuv() < w[0].yuv()) {
            return Err(Error::invalid(
                "rd curve weighted quality must not decrease with rate",
            ));
        }
        Ok(RdCurve { points })
    }

    pub fn points(&self) -> &[RdPoint] {
        &self.points
    }

    /// `(quality, log10 rate)` knots for one component.
    fn knots(&self, c: Component) -> Result<(Vec<f64>, Vec<f64>)> {
        let q: Vec<f64> = self.points.iter().map(|p| p.quality(c)).collect();
        if q.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "{c} quality must strictly increase with rate for BD-rate"
            )));
        }
        let r = self.points.iter().map(|p| p.rate_kbps.log10()).collect();
        Ok((q, r))
    }
}

impl TryFrom<Vec<RdPoint>> for RdCurve {
    type Error = Error;
    fn try_from(points: Vec<RdPoint>) -> Result<Self> {
        RdCurve::new(points)
    }
}

impl From<RdCurve> for Vec<RdPoint> {
    fn from(c: RdCurve) -> Self {
        c.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    Y,
    U,
    V,
    #[serde(rename = "YUV")]
    Yuv,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::Y, Component::U, Component::V, Component::Yuv];
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Y => "Y",
            Component::U => "U",
            Component::V => "V",
            Component::Yuv => "YUV",
        })
    }
}

/// Bjøntegaard delta rate of `test` against `anchor` on the 6:1:1 weighted
/// PSNR, in percent. Negative means `test` needs less rate.
pub fn bd_rate(anchor: &RdCurve, test: &RdCurve) -> Result<f64> {
    bd_rate_component(anchor, test, Component::Yuv)
}

pub fn bd_rate_component(anchor: &RdCurve, test: &RdCurve, c: Component) -> Result<f64> {
    let (qa, ra) = anchor.knots(c)?;
    let (qt, rt) = test.knots(c)?;
    let (a_lo, a_hi) = (qa[0], qa[qa.len() - 1]);
    let (t_lo, t_hi) = (qt[0], qt[qt.len() - 1]);
    let lo = a_lo.max(t_lo);
    let hi = a_hi.min(t_hi);
    if hi <= lo {
        return Err(Error::NoOverlap {
            anchor_lo: a_lo,
            anchor_hi: a_hi,
            test_lo: t_lo,
            test_hi: t_hi,
        });
    }
    let pa = Pchip::new(&qa, &ra)?;
    let pt = Pchip::new(&qt, &rt)?;
    let mean_diff = (pt.integrate(lo, hi) - pa.integrate(lo, hi)) / (hi - lo);
    Ok(100.0 * (10f64.powf(mean_diff) - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdRateRow {
    pub component: Component,
    pub bd_rate_percent: f64,
}

/// Per-component and weighted BD-rate of one anchor/test pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdRateTable {
    pub label: String,
    pub rows: Vec<BdRateRow>,
}

impl BdRateTable {
    pub fn compute(label: impl Into<String>, anchor: &RdCurve, test: &RdCurve) -> Result<Self> {
        let rows = Component::ALL
            .into_iter()
            .map(|c| {
                bd_rate_component(anchor, test, c).map(|bd_rate_percent| BdRateRow {
                    component: c,
                    bd_rate_percent,
                })
            })
            .collect::<Result<_>>()?;
        Ok(BdRateTable {
            label: label.into(),
            rows,
        })
    }

    pub fn get(&self, c: Component) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.component == c)
            .map(|r| r.bd_rate_percent)
    }

    /// Aligned text table, one column per component.
    pub fn to_text(&self) -> String {
        let mut header = format!("{:<24}", "comparison");
        let mut line = format!("{:<24}", self.label);
        for r in &self.rows {
            header.push_str(&format!("{:>10}", r.component.to_string()));
            line.push_str(&format!("{:>9.2}%", r.bd_rate_percent));
        }
        format!("{header}\n{line}\n")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualitySummary {
    pub mean_db: f64,
    pub min_db: f64,
    /// Mean over each window's decoded pictures; `None` when none decoded.
    pub window_means_db: Vec<Option<f64>>,
}

/// Statistics of a per-picture quality series given as `(poc, dB)` pairs of
/// decoded pictures. `windows` lists the POCs of each switch's affected set.
pub fn session_quality(timeline: &[(Poc, f64)], windows: &[Vec<Poc>]) -> Result<QualitySummary> {
    if timeline.is_empty() {
        return Err(Error::invalid("quality timeline is empty"));
    }
    let n = timeline.len() as f64;
    let mean_db = timeline.iter().map(|&(_, q)| q).sum::<f64>() / n;
    let min_db = timeline
        .iter()
        .map(|&(_, q)| q)
        .fold(f64::INFINITY, f64::min);
    let window_means_db = windows
        .iter()
        .map(|w| {
            let vals: Vec<f64> = timeline
                .iter()
                .filter(|(p, _)| w.contains(p))
                .map(|&(_, q)| q)
                .collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect();
    Ok(QualitySummary {
        mean_db,
        min_db,
        window_means_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(rates: [f64; 4], y: [f64; 4]) -> RdCurve {
        RdCurve::new(
            rates
                .iter()
                .zip(y)
                .map(|(&r, y)| RdPoint::new(r, y, y + 2.0, y + 3.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn yuv_examples() {
        assert_eq!(yuv_psnr(40.0, 40.0, 40.0), 40.0);
        assert_eq!(yuv_psnr(48.0, 40.0, 40.0), 46.0);
        assert_eq!(yuv_psnr(37.0, 41.0, 43.0), 38.25);
    }

    #[test]
    fn identity_is_zero() {
        let a = curve([1000.0, 2000.0, 4000.0, 8000.0], [34.0, 36.5, 38.8, 40.9]);
        assert_eq!(bd_rate(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn constant_shift() {
        let a = curve([1000.0, 2000.0, 4000.0, 8000.0], [34.0, 36.5, 38.8, 40.9]);
        let b = curve([1100.0, 2200.0, 4400.0, 8800.0], [34.0, 36.5, 38.8, 40.9]);
        for c in Component::ALL {
            let bd = bd_rate_component(&a, &b, c).unwrap();
            assert!((bd - 10.0).abs() < 1e-6, "{c}: {bd}");
        }
    }

    #[test]
    fn no_overlap() {
        let a = curve([1000.0, 2000.0, 4000.0, 8000.0], [30.0, 31.0, 32.0, 33.0]);
        let b = curve([1000.0, 2000.0, 4000.0, 8000.0], [40.0, 41.0, 42.0, 43.0]);
        assert!(matches!(bd_rate(&a, &b), Err(Error::NoOverlap { .. })));
    }

    #[test]
    fn curve_validation() {
        let p = |r, q| RdPoint::new(r, q, q, q);
        assert!(RdCurve::new(vec![p(1.0, 30.0), p(2.0, 31.0), p(3.0, 32.0)]).is_err());
        assert!(
            RdCurve::new(vec![p(1.0, 30.0), p(1.0, 31.0), p(3.0, 32.0), p(4.0, 33.0)]).is_err()
        );
        assert!(
            RdCurve::new(vec![p(1.0, 30.0), p(2.0, 29.0), p(3.0, 32.0), p(4.0, 33.0)]).is_err()
        );
        assert!(RdCurve::new(vec![
            p(-1.0, 30.0),
            p(2.0, 31.0),
            p(3.0, 32.0),
            p(4.0, 33.0)
        ])
        .is_err());
        // Unsorted input is accepted and sorted.
        let c = RdCurve::new(vec![p(4.0, 33.0), p(1.0, 30.0), p(3.0, 32.0), p(2.0, 31.0)]).unwrap();
        assert_eq!(c.points()[0].rate_kbps, 1.0);
    }

    #[test]
    fn flat_component_is_degenerate() {
        let p = |r, q| RdPoint::new(r, q, 40.0, 40.0);
        let a = RdCurve::new(vec![p(1.0, 30.0), p(2.0, 31.0), p(3.0, 32.0), p(4.0, 33.0)]).unwrap();
        assert!(bd_rate_component(&a, &a, Component::U).is_err());
        assert!(bd_rate_component(&a, &a, Component::Y).is_ok());
    }

    #[test]
    fn summary_statistics() {
        let flat: Vec<(Poc, f64)> = (0..10).map(|p| (p, 40.0)).collect();
        let s = session_quality(&flat, &[]).unwrap();
        assert_eq!((s.mean_db, s.min_db), (40.0, 40.0));

        let two: Vec<(Poc, f64)> = (0..12)
            .map(|p| (p, if p < 4 { 36.0 } else { 42.0 }))
            .collect();
        let s = session_quality(&two, &[vec![0, 1], vec![100]]).unwrap();
        assert!((s.mean_db - (4.0 * 36.0 + 8.0 * 42.0) / 12.0).abs() < 1e-12);
        assert_eq!(s.min_db, 36.0);
        assert_eq!(s.window_means_db, vec![Some(36.0), None]);

        assert!(session_quality(&[], &[]).is_err());
    }
}
