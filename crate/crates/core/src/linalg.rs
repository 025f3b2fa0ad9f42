//! Small dense helpers on `&[f64]` vectors. Dimensions here never exceed 8,
//! so everything is plain loops over `Vec<f64>`.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Determinant by Gaussian elimination with partial pivoting. `m` is row-major `k x k`.
pub fn det(mut m: Vec<f64>, k: usize) -> f64 {
    debug_assert_eq!(m.len(), k * k);
    let mut d = 1.0;
    for col in 0..k {
        let mut piv = col;
        let mut best = m[col * k + col].abs();
        for row in col + 1..k {
            let v = m[row * k + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..k {
                m.swap(col * k + j, piv * k + j);
            }
            d = -d;
        }
        let p = m[col * k + col];
        d *= p;
        for row in col + 1..k {
            let f = m[row * k + col] / p;
            if f != 0.0 {
                for j in col..k {
                    m[row * k + j] -= f * m[col * k + j];
                }
            }
        }
    }
    d
}

/// Determinant of the Gram matrix of `edges` (each of the same length).
pub fn gram_det(edges: &[Vec<f64>]) -> f64 {
    let k = edges.len();
    let mut g = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let v = dot(&edges[i], &edges[j]);
            g[i * k + j] = v;
            g[j * k + i] = v;
        }
    }
    det(g, k)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// k-dimensional volume of the simplex spanned by `k + 1` points in R^n (k <= n),
/// via the Gram determinant of its edge vectors.
pub fn simplex_volume(points: &[Vec<f64>]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let edges: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    let k = edges.len();
    gram_det(&edges).max(0.0).sqrt() / factorial(k)
}

/// Signed n-volume of a full-dimensional simplex (n + 1 points in R^n).
pub fn signed_simplex_volume(points: &[Vec<f64>]) -> f64 {
    let n = points.len() - 1;
    let mut m = Vec::with_capacity(n * n);
    for p in &points[1..] {
        for (a, b) in p.iter().zip(&points[0]) {
            m.push(a - b);
        }
    }
    det(m, n) / factorial(n)
}

/// Orthonormal basis of span(`vectors`) by twice-iterated modified Gram-Schmidt.
/// Vectors whose residual norm falls below `tol` are dropped.
pub fn orthonormal_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let l = norm(&w);
        if l > tol {
            w.iter_mut().for_each(|x| *x /= l);
            basis.push(w);
        }
    }
    basis
}

/// Remove from `v` its components along the orthonormal `basis`.
pub fn reject(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_permutation_and_scale() {
        assert_eq!(det(vec![0.0, 1.0, 1.0, 0.0], 2), -1.0);
        assert!((det(vec![2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 4.0], 3) - 24.0).abs() < 1e-12);
        assert_eq!(det(vec![1.0, 2.0, 2.0, 4.0], 2), 0.0);
    }

    #[test]
    fn triangle_area_in_3d() {
        let pts = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!((simplex_volume(&pts) - 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn signed_volume_orientation() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((signed_simplex_volume(&pts) - 0.5).abs() < 1e-15);
        let flipped = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!((signed_simplex_volume(&flipped) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn gram_schmidt_drops_dependent() {
        let b = orthonormal_basis(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]], 1e-12);
        assert_eq!(b.len(), 2);
        assert!(dot(&b[0], &b[1]).abs() < 1e-15);
    }
}
