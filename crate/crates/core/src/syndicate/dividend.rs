//! Year-end dividend: a fixed fraction of the year's profit, nothing in a
//! loss year.

pub fn dividend(profit: f64, profit_fraction: f64) -> f64 {
    if profit > 0.0 {
        profit_fraction * profit
    } else {
        0.0
    }
}
