//! Follow line sizing from pricing strength.

/// Line a follower offers: the default follow line scaled by the ratio of
/// its own price to the lead price, capped at 1. `None` without a usable
/// lead price.
pub fn follow_line(default_line: f64, own_price: f64, lead_price: f64) -> Option<f64> {
    if !(lead_price > 0.0) || !(own_price > 0.0) {
        return None;
    }
    let strength = own_price / lead_price;
    Some((default_line * strength).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strength_scales_line() {
        assert_eq!(follow_line(0.1, 300_000.0, 300_000.0), Some(0.1));
        assert!((follow_line(0.1, 360_000.0, 300_000.0).unwrap() - 0.12).abs() < 1e-12);
        assert!((follow_line(0.1, 150_000.0, 300_000.0).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn clamps_and_rejects() {
        assert_eq!(follow_line(0.5, 900_000.0, 300_000.0), Some(1.0));
        assert_eq!(follow_line(0.1, 300_000.0, 0.0), None);
        assert_eq!(follow_line(0.1, 0.0, 300_000.0), None);
    }
}
