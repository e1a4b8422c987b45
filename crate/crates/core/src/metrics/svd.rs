//! 3×3 singular value decomposition by one-sided Jacobi rotations.

use crate::geom::{cross, dot, norm, scale, Mat3, Point3};

const TOLERANCE: f64 = 1e-14;
const MAX_SWEEPS: usize = 60;

/// `m = u · diag(sigma) · vᵀ` with `sigma` nonnegative and descending.
/// `u` and `v` are orthogonal; matrices are row-major, so column `k` of `u`
/// is `[u[0][k], u[1][k], u[2][k]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Svd3 {
    pub u: Mat3,
    pub sigma: [f64; 3],
    pub v: Mat3,
    pub sweeps: usize,
}

fn column(m: &Mat3, k: usize) -> Point3 {
    [m[0][k], m[1][k], m[2][k]]
}

fn set_column(m: &mut Mat3, k: usize, c: Point3) {
    for (row, &v) in m.iter_mut().zip(c.iter()) {
        row[k] = v;
    }
}

pub fn svd3(m: &Mat3) -> Svd3 {
    let mut w = *m;
    let mut v = crate::geom::IDENTITY;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let (cp, cq) = (column(&w, p), column(&w, q));
            let alpha = dot(cp, cp);
            let beta = dot(cq, cq);
            let gamma = dot(cp, cq);
            if gamma.abs() <= TOLERANCE * (alpha * beta).sqrt() || gamma == 0.0 {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            for mat in [&mut w, &mut v] {
                for row in mat.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = c * xp - s * xq;
                    row[q] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order = [0usize, 1, 2];
    let norms = [
        norm(column(&w, 0)),
        norm(column(&w, 1)),
        norm(column(&w, 2)),
    ];
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let mut u = [[0.0; 3]; 3];
    let mut v_sorted = [[0.0; 3]; 3];
    let mut sigma = [0.0; 3];
    let largest = norms[order[0]];
    let mut filled = 0;
    for (k, &src) in order.iter().enumerate() {
        sigma[k] = norms[src];
        set_column(&mut v_sorted, k, column(&v, src));
        if sigma[k] > largest * 1e-15 && sigma[k] > 0.0 {
            set_column(&mut u, k, scale(column(&w, src), 1.0 / sigma[k]));
            filled = k + 1;
        }
    }
    complete_basis(&mut u, filled);
    Svd3 {
        u,
        sigma,
        v: v_sorted,
        sweeps,
    }
}

/// Fills columns `filled..3` of `u` with an orthonormal completion.
fn complete_basis(u: &mut Mat3, filled: usize) {
    match filled {
        3 => {}
        2 => {
            let c = cross(column(u, 0), column(u, 1));
            set_column(u, 2, scale(c, 1.0 / norm(c)));
        }
        1 => {
            let a = column(u, 0);
            // Pick the axis least aligned with `a`.
            let axis = (0..3)
                .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
                .unwrap_or(0);
            let mut e = [0.0; 3];
            e[axis] = 1.0;
            let b = cross(a, e);
            let b = scale(b, 1.0 / norm(b));
            set_column(u, 1, b);
            set_column(u, 2, cross(a, b));
        }
        _ => *u = crate::geom::IDENTITY,
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::geom::{mat_mul, orthogonality_error, transpose};

    fn reconstruct(s: &Svd3) -> Mat3 {
        let mut d = [[0.0; 3]; 3];
        for k in 0..3 {
            d[k][k] = s.sigma[k];
        }
        mat_mul(&mat_mul(&s.u, &d), &transpose(&s.v))
    }

    fn frob(a: &Mat3, b: &Mat3) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += (a[i][j] - b[i][j]).powi(2);
            }
        }
        acc.sqrt()
    }

    fn check(m: Mat3) {
        let s = svd3(&m);
        assert!(frob(&reconstruct(&s), &m) < 1e-10, "{m:?} -> {s:?}");
        assert!(orthogonality_error(&s.u) < 1e-10);
        assert!(orthogonality_error(&s.v) < 1e-10);
        assert!(s.sigma[0] >= s.sigma[1] && s.sigma[1] >= s.sigma[2] && s.sigma[2] >= 0.0);
    }

    #[test]
    fn generic_matrices() {
        check([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 10.0]]);
        check([[0.3, -1.2, 0.0], [2.2, 0.1, -0.4], [-0.7, 0.9, 1.5]]);
    }

    #[test]
    fn rank_deficient_matrices() {
        check([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [3.0, 6.0, 9.0]]);
        check([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]);
        check([[0.0; 3]; 3]);
        check([[0.0, 0.0, 0.0], [0.0, 0.0, 5.0], [0.0, 0.0, 0.0]]);
    }

    #[test]
    fn diagonal_is_sorted() {
        let s = svd3(&[[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 2.0]]);
        assert_eq!(s.sigma, [3.0, 2.0, 1.0]);
    }
}
