use super::Representation;
use crate::error::{Error, Result};

/// Largest allowed upscaling of a reference picture.
pub const MAX_UPSCALE: f64 = 8.0;
/// Smallest allowed ratio, i.e. at most twofold downscaling.
pub const MIN_DOWNSCALE: f64 = 0.5;

/// Horizontal and vertical ratio between the current picture's scaling
/// window (`to`) and that of its reference (`from`).
pub fn rpr_scaling_factors(from: &Representation, to: &Representation) -> Result<(f64, f64)> {
    let (f, t) = (from.scaling_window, to.scaling_window);
    if f.width == 0 || f.height == 0 || t.width == 0 || t.height == 0 {
        return Err(Error::invalid(
            "scaling windows must have non-zero dimensions",
        ));
    }
    Ok((
        f64::from(t.width) / f64::from(f.width),
        f64::from(t.height) / f64::from(f.height),
    ))
}

/// Each dimension independently within `[1/2, 8]`, bounds included.
pub fn rpr_legal(h_factor: f64, v_factor: f64) -> Result<bool> {
    if !(h_factor > 0.0 && v_factor > 0.0 && h_factor.is_finite() && v_factor.is_finite()) {
        return Err(Error::invalid(format!(
            "scaling factors ({h_factor}, {v_factor}) must be positive"
        )));
    }
    let ok = |f: f64| (MIN_DOWNSCALE..=MAX_UPSCALE).contains(&f);
    Ok(ok(h_factor) && ok(v_factor))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(rpr_legal(2.0, 2.0).unwrap());
        assert!(!rpr_legal(1.0 / 3.0, 1.0 / 3.0).unwrap());
        assert!(rpr_legal(8.0, 8.0).unwrap());
        assert!(!rpr_legal(9.0, 9.0).unwrap());
        assert!(rpr_legal(0.5, 0.5).unwrap());
        assert!(!rpr_legal(0.5, 0.49).unwrap());
        assert!(rpr_legal(1.0, 1.0).unwrap());
        assert!(rpr_legal(0.0, 1.0).is_err());
        assert!(rpr_legal(-2.0, 1.0).is_err());
        assert!(rpr_legal(f64::NAN, 1.0).is_err());
    }
}
