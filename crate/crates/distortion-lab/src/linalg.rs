//! Dense helpers for the small `n × n` matrices produced by Jacobian
//! evaluation. Matrices are row-major `Vec<f64>` slices of length `n²`.

/// Determinant by LU decomposition with partial pivoting.
///
/// Exact (up to rounding of the products) for triangular and diagonal
/// matrices since no elimination steps fire on their zero pattern.
pub fn determinant(matrix: &[f64], n: usize) -> f64 {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for row in (col + 1)..n {
            let factor = a[row * n + col] / d;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    det
}

/// Largest singular value (spectral norm).
///
/// Diagonal matrices are dispatched to the closed form `max |dᵢᵢ|`;
/// everything else runs power iteration on `AᵀA` with a deterministic
/// start vector, convergence threshold `1e-12` relative, and at most
/// 500 iterations.
pub fn spectral_norm(matrix: &[f64], n: usize) -> f64 {
    assert_eq!(matrix.len(), n * n);
    if is_diagonal(matrix, n) {
        let mut best: f64 = 0.0;
        for i in 0..n {
            best = best.max(matrix[i * n + i].abs());
        }
        return best;
    }

    // Power iteration on the Gram matrix; the start vector mixes all
    // coordinates so it cannot be orthogonal to the leading eigenvector
    // in exact arithmetic (and perturbation would rescue it anyway).
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.5).collect();
    normalize(&mut v);
    let mut sigma_sq_prev = 0.0;
    for _ in 0..500 {
        let av = mat_vec(matrix, n, &v);
        let mut atav = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                atav[j] += matrix[i * n + j] * av[i];
            }
        }
        let sigma_sq = dot(&v, &atav);
        let norm = normalize(&mut atav);
        if norm == 0.0 {
            return 0.0;
        }
        v = atav;
        if (sigma_sq - sigma_sq_prev).abs() <= 1e-12 * sigma_sq.abs().max(1.0) {
            return sigma_sq.max(0.0).sqrt();
        }
        sigma_sq_prev = sigma_sq;
    }
    sigma_sq_prev.max(0.0).sqrt()
}

fn is_diagonal(matrix: &[f64], n: usize) -> bool {
    for i in 0..n {
        for j in 0..n {
            if i != j && matrix[i * n + j] != 0.0 {
                return false;
            }
        }
    }
    true
}

pub fn mat_vec(matrix: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += matrix[i * n + j] * v[j];
        }
        out[i] = s;
    }
    out
}

pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Frobenius norm, the gradient modulus `|∇f|` of a Jacobian matrix.
pub fn frobenius_norm(matrix: &[f64]) -> f64 {
    matrix.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_diagonal_is_product() {
        let m = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 3.0];
        assert_eq!(determinant(&m, 3), 3.0);
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = vec![0.0, 1.0, 1.0, 0.0];
        assert_eq!(determinant(&m, 2), -1.0);
    }

    #[test]
    fn spectral_norm_diagonal_closed_form() {
        let m = vec![1.0, 0.0, 0.0, 0.0, -4.0, 0.0, 0.0, 0.0, 0.25];
        assert_eq!(spectral_norm(&m, 3), 4.0);
    }

    #[test]
    fn spectral_norm_rotation_is_one() {
        let c = 0.6_f64;
        let s = 0.8_f64;
        let m = vec![c, -s, s, c];
        assert!((spectral_norm(&m, 2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_norm_general_matches_singular_value() {
        // [[3, 1], [0, 2]] has σ_max = sqrt((14 + sqrt(14² − 4·36)) / 2)
        let m = vec![3.0, 1.0, 0.0, 2.0];
        let expected = ((14.0 + (14.0_f64 * 14.0 - 144.0).sqrt()) / 2.0).sqrt();
        assert!((spectral_norm(&m, 2) - expected).abs() < 1e-10);
    }
}
