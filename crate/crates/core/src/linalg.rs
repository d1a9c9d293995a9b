use num_complex::Complex64;

/// Determinant of a dense row-major `n×n` complex matrix by LU with partial
/// pivoting. The input is consumed as scratch space.
pub(crate) fn det(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm_sqr().total_cmp(&a[j * n + col].norm_sqr()))
            .unwrap_or(col);
        let p = a[pivot * n + col];
        if p.norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        det *= p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for k in col + 1..n {
                let upper = a[col * n + k];
                a[row * n + k] -= factor * upper;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(det(vec![c(2.0, 0.0)], 1), c(2.0, 0.0));
        let d = det(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)], 2);
        assert!((d - c(1.0, 0.0)).norm() < 1e-15);
        let d = det(vec![c(1.0, 1.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, -1.0)], 2);
        // (1+i)(4-i) - 6 = 5 + 3i - 6
        assert!((d - c(-1.0, 3.0)).norm() < 1e-14);
    }
}
