//! Bessel functions of the first kind and the zeros of `J₁`.

use std::f64::consts::PI;

pub fn j0(x: f64) -> f64 {
    puruspe::Jn(0, x)
}

pub fn j1(x: f64) -> f64 {
    puruspe::Jn(1, x)
}

/// `s`-th positive zero of `J₁` (`s ≥ 1`): McMahon's expansion polished
/// by Newton steps with `J₁' = J₀ − J₁/x`.
pub fn j1_zero(s: usize) -> f64 {
    assert!(s >= 1, "zeros are numbered from 1");
    let beta = (s as f64 + 0.25) * PI;
    let b8 = 8.0 * beta;
    // μ = 4ν² = 4
    let mut x = beta - 3.0 / b8 + 12.0 / b8.powi(3);
    for _ in 0..8 {
        let f = j1(x);
        let df = j0(x) - f / x;
        let step = f / df;
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((j1(3.7) - 0.05383398774546181).abs() < 1e-14);
        assert!((j1(25.3) + 0.09002954350877665).abs() < 1e-14);
        assert!((j1(0.001) - 0.0004999999375000026).abs() < 1e-17);
    }

    #[test]
    fn zeros() {
        assert!((j1_zero(1) - 3.8317059702075125).abs() < 1e-12);
        assert!((j1_zero(2) - 7.015586669815619).abs() < 1e-12);
        for s in [5, 50, 500] {
            assert!(j1(j1_zero(s)).abs() < 1e-13);
            assert!(j1_zero(s + 1) > j1_zero(s));
        }
    }
}
