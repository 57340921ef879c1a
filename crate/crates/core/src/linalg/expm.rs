//! Matrix exponential by scaling and squaring with a truncated Taylor series.
//!
//! All matrices here are at most 6×6, so the series is cheap and we can afford
//! to run it to machine precision after scaling the norm below 1/2.

use nalgebra::DMatrix;

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(x.is_square(), "expm needs a square matrix");
    let n = x.nrows();
    let norm = one_norm(x);
    if !norm.is_finite() {
        return DMatrix::from_element(n, n, f64::NAN);
    }
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = x / 2f64.powi(squarings as i32);

    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        result += &term;
        if one_norm(&term) < f64::EPSILON * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_gives_identity() {
        assert_eq!(expm(&DMatrix::zeros(4, 4)), DMatrix::identity(4, 4));
    }

    #[test]
    fn quarter_turn() {
        let mut x = DMatrix::zeros(3, 3);
        x[(0, 1)] = -std::f64::consts::FRAC_PI_2;
        x[(1, 0)] = std::f64::consts::FRAC_PI_2;
        let r = expm(&x);
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(r, expected, epsilon = 1e-15);
    }

    #[test]
    fn boost_block() {
        let t = 1.7;
        let mut x = DMatrix::zeros(6, 6);
        x[(0, 5)] = t;
        x[(5, 0)] = t;
        let b = expm(&x);
        assert_abs_diff_eq!(b[(0, 0)], t.cosh(), epsilon = 1e-13);
        assert_abs_diff_eq!(b[(5, 5)], t.cosh(), epsilon = 1e-13);
        assert_abs_diff_eq!(b[(0, 5)], t.sinh(), epsilon = 1e-13);
        assert_abs_diff_eq!(b[(2, 2)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn nilpotent_is_a_finite_sum() {
        let mut x = DMatrix::zeros(3, 3);
        x[(0, 1)] = 3.0;
        x[(1, 2)] = 2.0;
        let e = expm(&x);
        // I + X + X²/2
        assert_abs_diff_eq!(e[(0, 2)], 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e[(0, 1)], 3.0, epsilon = 1e-13);
    }
}
