//! Orthogonal Procrustes alignment of corresponding point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{centroid, det, dist, mat_mul, mat_vec, scale, sub, transpose, Mat3, Point3};
use crate::metrics::svd::svd3;

/// Optimal rigid alignment of `b` onto `a`.
///
/// `rotation` acts on column vectors: after centering both sets,
/// `scale * rotation · b̃ⱼ ≈ ãⱼ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcrustesResult {
    pub rotation: Mat3,
    /// Mean Euclidean distance between `ãⱼ` and the aligned `b̃ⱼ`.
    pub residual: f64,
    pub reflection_used: bool,
    /// 1 unless scale fitting was requested.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaMode {
    /// One rotation per frame.
    #[default]
    PerFrame,
    /// One rotation for all stacked frames.
    Global,
}

impl PaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PaMode::PerFrame => "per-frame",
            PaMode::Global => "global",
        }
    }
}

impl std::str::FromStr for PaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-frame" => Ok(PaMode::PerFrame),
            "global" => Ok(PaMode::Global),
            other => Err(Error::invalid(format!(
                "alignment mode must be per-frame or global, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PaOptions {
    pub mode: PaMode,
    pub allow_reflection: bool,
    /// Also fit a uniform scale factor.
    pub with_scale: bool,
}

fn spread_is_degenerate(points: &[Point3], center: Point3) -> bool {
    let magnitude = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    points.iter().all(|&p| dist(p, center) <= 1e-12 * magnitude)
}

/// Rotation (proper unless `allow_reflection`) best mapping centered `b` onto centered `a`.
pub fn procrustes_rotation(
    a: &[Point3],
    b: &[Point3],
    allow_reflection: bool,
) -> Result<ProcrustesResult> {
    procrustes(
        a,
        b,
        &PaOptions {
            allow_reflection,
            ..Default::default()
        },
    )
}

pub fn procrustes(a: &[Point3], b: &[Point3], opts: &PaOptions) -> Result<ProcrustesResult> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "point sets have {} and {} points",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 3 {
        return Err(Error::invalid(format!(
            "alignment needs at least 3 points, got {}",
            a.len()
        )));
    }
    let (ca, cb) = (centroid(a), centroid(b));
    if spread_is_degenerate(a, ca) || spread_is_degenerate(b, cb) {
        return Err(Error::degenerate(
            "alignment undefined: all points coincide after centering",
        ));
    }
    let at: Vec<Point3> = a.iter().map(|&p| sub(p, ca)).collect();
    let bt: Vec<Point3> = b.iter().map(|&p| sub(p, cb)).collect();
    let (rotation, scale_factor, reflection_used) = solve(&at, &bt, opts);
    let residual = at
        .iter()
        .zip(&bt)
        .map(|(&x, &y)| dist(x, scale(mat_vec(&rotation, y), scale_factor)))
        .sum::<f64>()
        / a.len() as f64;
    Ok(ProcrustesResult {
        rotation,
        residual,
        reflection_used,
        scale: scale_factor,
    })
}

/// Core solve on already-centered sets.
pub(crate) fn solve(at: &[Point3], bt: &[Point3], opts: &PaOptions) -> (Mat3, f64, bool) {
    // Cross-covariance H = B̃ᵀ Ã.
    let mut h = [[0.0; 3]; 3];
    for (x, y) in at.iter().zip(bt) {
        for r in 0..3 {
            for c in 0..3 {
                h[r][c] += y[r] * x[c];
            }
        }
    }
    let svd = svd3(&h);
    let ut = transpose(&svd.u);
    let mut v = svd.v;
    let mut rotation = mat_mul(&v, &ut);
    let mut signs = [1.0, 1.0, 1.0];
    if det(&rotation) < 0.0 && !opts.allow_reflection {
        for row in v.iter_mut() {
            row[2] = -row[2];
        }
        signs[2] = -1.0;
        rotation = mat_mul(&v, &ut);
    }
    let reflection_used = det(&rotation) < 0.0;
    let scale_factor = if opts.with_scale {
        let energy: f64 = bt.iter().map(|p| crate::geom::dot(*p, *p)).sum();
        let trace: f64 = (0..3).map(|k| svd.sigma[k] * signs[k]).sum();
        if energy > 0.0 {
            trace / energy
        } else {
            1.0
        }
    } else {
        1.0
    };
    (rotation, scale_factor, reflection_used)
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::geom::{axis_angle, orthogonality_error, IDENTITY};

    fn chiral() -> Vec<Point3> {
        vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 2.0, 0.0],
            [0.0, 0.0, 3.0],
        ]
    }

    #[test]
    fn identity_alignment() {
        let a = chiral();
        let r = procrustes_rotation(&a, &a, false).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.rotation[i][j] - IDENTITY[i][j]).abs() < 1e-12);
            }
        }
        assert!(r.residual < 1e-12);
        assert!(!r.reflection_used);
    }

    #[test]
    fn recovers_quarter_turn() {
        let a = chiral();
        let q = axis_angle([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2);
        let b: Vec<Point3> = a.iter().map(|&p| mat_vec(&q, p)).collect();
        let r = procrustes_rotation(&a, &b, false).unwrap();
        let ca = centroid(&a);
        let cb = centroid(&b);
        for (&x, &y) in a.iter().zip(&b) {
            let mapped = mat_vec(&r.rotation, sub(y, cb));
            assert!(dist(mapped, sub(x, ca)) < 1e-10);
        }
        assert!(r.residual < 1e-10);
    }

    fn rms_after(a: &[Point3], b: &[Point3], r: &Mat3) -> f64 {
        let (ca, cb) = (centroid(a), centroid(b));
        let ss: f64 = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| dist(sub(x, ca), mat_vec(r, sub(y, cb))).powi(2))
            .sum();
        (ss / a.len() as f64).sqrt()
    }

    /// Brute-force RMS residual over rotations about a grid of axes and angles.
    fn brute_force_residual(a: &[Point3], b: &[Point3]) -> f64 {
        let mut best = f64::INFINITY;
        let steps = 24;
        for i in 0..steps {
            for j in 0..steps {
                let theta = std::f64::consts::PI * (i as f64 + 0.5) / steps as f64;
                let phi = 2.0 * std::f64::consts::PI * j as f64 / steps as f64;
                let axis = [
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                ];
                for k in 0..72 {
                    let r = axis_angle(axis, 2.0 * std::f64::consts::PI * k as f64 / 72.0);
                    best = best.min(rms_after(a, b, &r));
                }
            }
        }
        best
    }

    #[test]
    fn mirrored_set_stays_proper() {
        let a = chiral();
        let b: Vec<Point3> = a.iter().map(|p| [-p[0], p[1], p[2]]).collect();
        let r = procrustes_rotation(&a, &b, false).unwrap();
        assert!((det(&r.rotation) - 1.0).abs() < 1e-10);
        assert!(orthogonality_error(&r.rotation) < 1e-10);
        assert!(r.residual > 0.1);
        assert!(!r.reflection_used);
        // no proper rotation on the search grid does meaningfully better
        let brute = brute_force_residual(&a, &b);
        assert!(brute > 0.1);
        let rms = rms_after(&a, &b, &r.rotation);
        assert!(rms <= brute + 1e-12, "{rms} vs {brute}");

        let r = procrustes_rotation(&a, &b, true).unwrap();
        assert!(r.reflection_used);
        assert!((det(&r.rotation) + 1.0).abs() < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn degenerate_and_short_inputs() {
        let same = vec![[0.1, 0.2, 0.3]; 5];
        let err = procrustes_rotation(&same, &chiral_padded(), false).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Degenerate);
        let two = vec![[0.0; 3], [1.0, 0.0, 0.0]];
        assert!(procrustes_rotation(&two, &two, false).is_err());
        assert!(procrustes_rotation(&chiral(), &chiral()[..3], false).is_err());
    }

    fn chiral_padded() -> Vec<Point3> {
        let mut c = chiral();
        c.push([1.0, 1.0, 1.0]);
        c
    }

    #[test]
    fn scale_fit_recovers_uniform_scale() {
        let a = chiral();
        let q = axis_angle([1.0, 1.0, 0.0], 0.4);
        let b: Vec<Point3> = a.iter().map(|&p| scale(mat_vec(&q, p), 0.5)).collect();
        let opts = PaOptions {
            with_scale: true,
            ..Default::default()
        };
        let r = procrustes(&a, &b, &opts).unwrap();
        assert!((r.scale - 2.0).abs() < 1e-10);
        assert!(r.residual < 1e-10);
    }
}
