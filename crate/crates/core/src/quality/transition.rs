//! RASL quality across a switch.
//!
//! The series covers the RASL pictures of the target CRA in presentation
//! order. Up-switches ramp linearly from the low toward the high level.
//! Down-switches open with a sharp drop on the first RASL picture and then
//! decline linearly toward the low level. Both shapes are pinned to the
//! configured mean offsets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

/// Mean offsets of RASL quality relative to the steady levels either side
/// of a switch, averaged over GOP 32 / IRAP 64 up- and down-switches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransitionParams {
    pub up_mean_below_high_db: f64,
    pub up_mean_above_low_db: f64,
    pub down_mean_below_high_db: f64,
    pub down_mean_above_low_db: f64,
    pub down_first_rasl_drop_db: f64,
}

impl Default for TransitionParams {
    fn default() -> Self {
        TransitionParams {
            up_mean_below_high_db: 1.77,
            up_mean_above_low_db: 2.82,
            down_mean_below_high_db: 3.72,
            down_mean_above_low_db: 0.87,
            down_first_rasl_drop_db: 2.92,
        }
    }
}

impl TransitionParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.up_mean_below_high_db,
            self.up_mean_above_low_db,
            self.down_mean_below_high_db,
            self.down_mean_above_low_db,
            self.down_first_rasl_drop_db,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(
                "transition offsets must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionProfile {
    pub values: Vec<f64>,
    /// Set when the configured offsets could not be met inside
    /// `[low_db, high_db]` and the series was clamped.
    pub clamped: bool,
}

impl TransitionProfile {
    pub fn mean(&self) -> Option<f64> {
        (!self.values.is_empty())
            .then(|| self.values.iter().sum::<f64>() / self.values.len() as f64)
    }
}

pub fn transition_profile(
    direction: Direction,
    high_db: f64,
    low_db: f64,
    n_rasl: usize,
    params: &TransitionParams,
) -> Result<TransitionProfile> {
    params.validate()?;
    if !(high_db.is_finite() && low_db.is_finite()) {
        return Err(Error::invalid("quality levels must be finite"));
    }
    if high_db < low_db {
        return Err(Error::invalid(format!(
            "high level {high_db} dB is below low level {low_db} dB"
        )));
    }
    if n_rasl == 0 {
        return Ok(TransitionProfile {
            values: Vec::new(),
            clamped: false,
        });
    }
    Ok(match direction {
        Direction::Up => up_ramp(high_db, low_db, n_rasl, params.up_mean_below_high_db),
        Direction::Down => down_decline(
            high_db,
            low_db,
            n_rasl,
            params.down_first_rasl_drop_db,
            params.down_mean_below_high_db,
        ),
    })
}

fn clamp(v: f64, lo: f64, hi: f64, clamped: &mut bool) -> f64 {
    if v < lo {
        *clamped = true;
        lo
    } else if v > hi {
        *clamped = true;
        hi
    } else {
        v
    }
}

/// `q_i = start + (i + 1) / (n + 1) * (end - start)`, whose mean is the
/// midpoint of `start` and `end`. The ramp ends at the high level when that
/// keeps `start` above the low level, otherwise it starts at the low level.
fn up_ramp(high: f64, low: f64, n: usize, below_high: f64) -> TransitionProfile {
    let mut clamped = false;
    let target = clamp(high - below_high, low, high, &mut clamped);
    let (start, end) = if 2.0 * target - high >= low {
        (2.0 * target - high, high)
    } else {
        (low, 2.0 * target - low)
    };
    let values = (0..n)
        .map(|i| start + (i + 1) as f64 / (n + 1) as f64 * (end - start))
        .collect();
    TransitionProfile { values, clamped }
}

/// First picture at `high - drop`, then a straight line whose far end is
/// placed so the series mean is `high - below_high`.
fn down_decline(high: f64, low: f64, n: usize, drop: f64, below_high: f64) -> TransitionProfile {
    let mut clamped = false;
    let first = clamp(high - drop, low, high, &mut clamped);
    let target = clamp(high - below_high, low, high, &mut clamped);
    if n == 1 {
        if (first - target).abs() > 1e-12 {
            clamped = true;
        }
        return TransitionProfile {
            values: vec![first],
            clamped,
        };
    }
    let last = clamp(2.0 * target - first, low, high, &mut clamped);
    let values = (0..n)
        .map(|i| first + i as f64 / (n - 1) as f64 * (last - first))
        .collect();
    TransitionProfile { values, clamped }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn up_mean() {
        let p = transition_profile(Direction::Up, 40.0, 35.0, 31, &TransitionParams::default())
            .unwrap();
        assert_eq!(p.values.len(), 31);
        assert!((p.mean().unwrap() - 38.23).abs() < 1e-9);
        assert!(!p.clamped);
        assert!(p.values.windows(2).all(|w| w[1] >= w[0]));
        assert!(p.values.iter().all(|&v| (35.0..=40.0).contains(&v)));
    }

    #[test]
    fn down_first_and_mean() {
        let p = transition_profile(
            Direction::Down,
            40.0,
            35.0,
            31,
            &TransitionParams::default(),
        )
        .unwrap();
        assert!((p.values[0] - 37.08).abs() < 1e-9);
        assert!((p.mean().unwrap() - 36.28).abs() < 1e-9);
        assert!(!p.clamped);
        assert!(p.values.iter().all(|&v| (35.0..=40.0).contains(&v)));
    }

    #[test]
    fn empty() {
        for d in [Direction::Up, Direction::Down] {
            let p = transition_profile(d, 40.0, 35.0, 0, &TransitionParams::default()).unwrap();
            assert!(p.values.is_empty());
        }
    }

    #[test]
    fn infeasible_gap_clamps() {
        let p = transition_profile(
            Direction::Down,
            40.0,
            39.0,
            31,
            &TransitionParams::default(),
        )
        .unwrap();
        assert!(p.clamped);
        assert!(p.values.iter().all(|&v| (39.0..=40.0).contains(&v)));
        let p = transition_profile(Direction::Up, 40.0, 39.0, 31, &TransitionParams::default())
            .unwrap();
        assert!(p.clamped);
    }

    #[test]
    fn up_ramp_anchored_low_when_offset_is_large() {
        let params = TransitionParams {
            up_mean_below_high_db: 4.0,
            ..Default::default()
        };
        let p = transition_profile(Direction::Up, 40.0, 35.0, 15, &params).unwrap();
        assert!(!p.clamped);
        assert!((p.mean().unwrap() - 36.0).abs() < 1e-9);
        assert!(p.values[0] > 35.0);
    }

    #[test]
    fn bad_levels() {
        assert!(
            transition_profile(Direction::Up, 30.0, 35.0, 3, &TransitionParams::default()).is_err()
        );
        let neg = TransitionParams {
            down_first_rasl_drop_db: -1.0,
            ..Default::default()
        };
        assert!(transition_profile(Direction::Up, 40.0, 35.0, 3, &neg).is_err());
    }
}
