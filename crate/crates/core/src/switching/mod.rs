//! Switching between representations: resampling legality, outcome
//! classification at segment boundaries, and ABR-driven sessions.

mod abr;
mod evaluate;
mod ladder;
mod rpr;
mod session;

pub use abr::{run_abr, AbrConfig, AbrDecision, BandwidthTrace, BufferState, TraceSample};
pub use evaluate::{evaluate_switch, SwitchEvent, SwitchOutcome};
pub use ladder::{CodecCapabilities, Ladder, Representation, RepresentationParams, ScalingWindow};
pub use rpr::{rpr_legal, rpr_scaling_factors, MAX_UPSCALE, MIN_DOWNSCALE};
pub use session::{
    simulate_abr_session, simulate_session, PictureStatus, SessionReport, SessionSummary,
    SwitchRecord, TimelineEntry,
};

use crate::error::Result;
use crate::gop::{build_sequence, GopConfig, PictureKind};

/// Share of RASL pictures in a sequence of `irap_periods` open-GOP periods.
pub fn rasl_fraction(gop_size: u32, irap_period: u32, irap_periods: u32) -> Result<f64> {
    let config = GopConfig::aligned(gop_size, irap_period, crate::gop::IrapMode::OpenGop)?;
    let seq = build_sequence(config, 1 + irap_period * irap_periods)?;
    let rasl = seq.count_kind(PictureKind::Rasl) as f64;
    Ok(rasl / f64::from(irap_period * irap_periods))
}

/// How much more of the stream is exposed to switching drift at
/// `short_irap` than at `long_irap`, for a fixed GOP size.
pub fn drift_exposure_ratio(gop_size: u32, short_irap: u32, long_irap: u32) -> Result<f64> {
    // Compare over a common length so both counts cover whole periods.
    let span = short_irap.max(long_irap);
    let a = rasl_fraction(gop_size, short_irap, span / short_irap)?;
    let b = rasl_fraction(gop_size, long_irap, span / long_irap)?;
    Ok(a / b)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::constraints::{LevelTable, SpsModel, SwitchingMode};
    use crate::gop::IrapMode;
    use crate::quality::{RdCurve, RdPoint};

    pub fn curve(rates: [f64; 4], y: [f64; 4]) -> RdCurve {
        RdCurve::new(
            rates
                .iter()
                .zip(y)
                .map(|(&r, y)| RdPoint::new(r, y, y + 2.0, y + 3.0))
                .collect(),
        )
        .unwrap()
    }

    pub fn rep_with(
        id: &str,
        w: u32,
        h: u32,
        mode: IrapMode,
        segment: u32,
        length: u32,
        scale: f64,
    ) -> Representation {
        let (rates, y) = match h {
            2160 => (
                [7500.0, 15000.0, 25000.0, 40000.0],
                [38.0, 42.0, 43.5, 44.5],
            ),
            1080 => ([3000.0, 6000.0, 10000.0, 16000.0], [36.0, 38.5, 40.0, 41.0]),
            _ => ([1500.0, 3000.0, 5000.0, 8000.0], [33.0, 35.5, 37.0, 38.2]),
        };
        let rates = rates.map(|r| r * scale);
        Representation::encode(
            RepresentationParams {
                id: id.into(),
                width: w,
                height: h,
                scaling_window: None,
                gop: GopConfig::new(32, 64, mode, segment).unwrap(),
                length,
                rd_curve: curve(rates, y),
                operating_point: 1,
                sps: SpsModel::switchable(3840, 2160, &LevelTable::default()),
            },
            SwitchingMode::FullRpr,
        )
        .unwrap()
    }

    pub fn rep(id: &str, w: u32, h: u32, mode: IrapMode) -> Representation {
        rep_with(id, w, h, mode, 64, 641, 1.0)
    }

    pub fn ladder_of(reps: Vec<Representation>) -> Ladder {
        Ladder::new(
            reps,
            SpsModel::switchable(3840, 2160, &LevelTable::default()),
            60.0,
            SwitchingMode::FullRpr,
        )
        .unwrap()
    }

    /// 2160p/1080p/720p, all in `mode`.
    pub fn three(mode: IrapMode) -> Ladder {
        ladder_of(vec![
            rep("2160p", 3840, 2160, mode),
            rep("1080p", 1920, 1080, mode),
            rep("720p", 1280, 720, mode),
        ])
    }
}
