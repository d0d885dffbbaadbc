//! The single C^∞ transition primitive shared by the dyadic cutoff and the
//! large-data profiles.

fn bump_tail(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// C^∞ smoothstep: 0 for `x ≤ 0`, 1 for `x ≥ 1`, strictly increasing in
/// between, with `step(x) + step(1 − x) = 1`.
pub fn step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = bump_tail(x);
    let b = bump_tail(1.0 - x);
    a / (a + b)
}

/// Smooth ramp rising from 0 at `lo` to 1 at `hi`.
pub fn ramp_up(x: f64, lo: f64, hi: f64) -> f64 {
    step((x - lo) / (hi - lo))
}

/// Smooth ramp falling from 1 at `lo` to 0 at `hi`.
pub fn ramp_down(x: f64, lo: f64, hi: f64) -> f64 {
    1.0 - ramp_up(x, lo, hi)
}

/// Smooth plateau: 0 outside `(a, d)`, 1 on `[b, c]`, C^∞ transitions.
pub fn plateau(x: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    if x <= a || x >= d {
        0.0
    } else if x < b {
        ramp_up(x, a, b)
    } else if x <= c {
        1.0
    } else {
        ramp_down(x, c, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_symmetry() {
        assert_eq!(step(-1.0), 0.0);
        assert_eq!(step(0.0), 0.0);
        assert_eq!(step(1.0), 1.0);
        assert!((step(0.5) - 0.5).abs() < 1e-15);
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((step(x) + step(1.0 - x) - 1.0).abs() < 1e-15);
            assert!(step(x) >= step(x - 0.01));
        }
    }

    #[test]
    fn plateau_shape() {
        assert_eq!(plateau(0.5, 1.0, 2.0, 3.0, 4.0), 0.0);
        assert_eq!(plateau(2.5, 1.0, 2.0, 3.0, 4.0), 1.0);
        assert_eq!(plateau(4.0, 1.0, 2.0, 3.0, 4.0), 0.0);
        let v = plateau(1.5, 1.0, 2.0, 3.0, 4.0);
        assert!(v > 0.0 && v < 1.0);
    }
}
