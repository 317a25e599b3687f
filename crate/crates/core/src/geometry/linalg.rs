//! Small dense vector helpers for parameter spaces of dimension <= 5.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Unit vector along `a`, or `None` when `a` is (numerically) zero.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n <= 1e-300 || !n.is_finite() {
        None
    } else {
        Some(scaled(a, 1.0 / n))
    }
}

/// Modified Gram-Schmidt: orthonormal basis of span(vectors), dropping
/// directions whose residual falls below `tol` relative to the input norm.
pub fn orthonormalize(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let scale = norm(v);
        if scale == 0.0 {
            continue;
        }
        let mut r = v.clone();
        // Two passes keep the result orthogonal to machine precision.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&r, q);
                axpy(&mut r, -c, q);
            }
        }
        let rn = norm(&r);
        if rn > tol * scale {
            basis.push(scaled(&r, 1.0 / rn));
        }
    }
    basis
}

/// Unit vector orthogonal to every row, when the rows span exactly a
/// hyperplane of `R^dim`. Returns `None` if the rows are rank deficient.
pub fn null_vector(rows: &[&[f64]], dim: usize) -> Option<Vec<f64>> {
    let owned: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let q = orthonormalize(&owned, 1e-10);
    if q.len() + 1 != dim {
        return None;
    }
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        for _ in 0..2 {
            for qi in &q {
                let c = dot(&e, qi);
                axpy(&mut e, -c, qi);
            }
        }
        let n = norm(&e);
        if n > best_norm {
            best_norm = n;
            best = Some(e);
        }
    }
    best.and_then(|v| normalized(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_drops_dependent() {
        let b = orthonormalize(&[vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]], 1e-10);
        assert_eq!(b.len(), 2);
        assert!(dot(&b[0], &b[1]).abs() < 1e-15);
    }

    #[test]
    fn null_vector_of_two_planes() {
        let a = [1.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0];
        let n = null_vector(&[&a, &b], 3).unwrap();
        assert!((n[2].abs() - 1.0).abs() < 1e-15);
        assert!(null_vector(&[&a, &a], 3).is_none());
    }
}
