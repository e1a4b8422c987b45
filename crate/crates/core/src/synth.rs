//! Synthetic 22-joint motion with known properties, plus exhaustive oracles
//! used to cross-check the metric kernels.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geom::{add, det, dist, mat_vec, orthogonality_error, Mat3, Point3};
use crate::motion::{MotionSequence, Source};
use crate::skeleton::SkeletonSpec;

/// Standing pose, y up, subject facing +z, right side at negative x.
pub const STANDING_POSE: [Point3; 22] = [
    [0.0, 1.0, 0.0],
    [-0.1, 0.95, 0.0],
    [0.1, 0.95, 0.0],
    [0.0, 1.15, 0.0],
    [-0.1, 0.5, 0.02],
    [0.1, 0.5, 0.02],
    [0.0, 1.4, 0.0],
    [-0.1, 0.08, 0.0],
    [0.1, 0.08, 0.0],
    [0.0, 1.5, 0.0],
    [-0.1, 0.0, -0.05],
    [0.1, 0.0, -0.05],
    [0.0, 1.55, 0.0],
    [-0.2, 1.45, 0.0],
    [0.2, 1.45, 0.0],
    [0.0, 1.75, 0.02],
    [-0.25, 1.15, -0.02],
    [0.25, 1.15, -0.02],
    [-0.27, 0.9, 0.03],
    [0.27, 0.9, 0.03],
    [-0.28, 0.82, 0.05],
    [0.28, 0.82, 0.05],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Constant,
    LinearRamp,
    /// Sinusoidal limb swing, one cycle per second, left and right half a
    /// cycle apart, arms opposite to legs.
    WalkCycle,
    /// Standing pose plus seeded Gaussian jitter on every coordinate.
    Noise,
}

impl SynthKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SynthKind::Constant => "constant",
            SynthKind::LinearRamp => "linear_ramp",
            SynthKind::WalkCycle => "walk_cycle",
            SynthKind::Noise => "noise",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "constant" => Ok(SynthKind::Constant),
            "linear_ramp" => Ok(SynthKind::LinearRamp),
            "walk_cycle" => Ok(SynthKind::WalkCycle),
            "noise" => Ok(SynthKind::Noise),
            _ => Err(Error::invalid(format!(
                "unknown synth kind {s:?}; expected constant, linear_ramp, walk_cycle or noise"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub frames: usize,
    pub fps: f64,
    pub amplitude: f64,
    pub seed: u64,
    pub source: Source,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            kind: SynthKind::WalkCycle,
            frames: 60,
            fps: 30.0,
            amplitude: 0.3,
            seed: 0,
            source: Source::Simulated,
        }
    }
}

/// (joint, weight, phase offset in half cycles) for the swinging limbs.
const SWING: [(usize, f64, f64); 12] = [
    (5, 0.5, 0.0),
    (8, 1.0, 0.0),
    (11, 1.0, 0.0),
    (6, 0.5, 1.0),
    (9, 1.0, 1.0),
    (12, 1.0, 1.0),
    (17, 0.5, 1.0),
    (19, 0.8, 1.0),
    (21, 1.0, 1.0),
    (18, 0.5, 0.0),
    (20, 0.8, 0.0),
    (22, 1.0, 0.0),
];

pub fn generate(spec: &SynthSpec) -> Result<MotionSequence> {
    if spec.frames == 0 {
        return Err(Error::invalid(
            "synthetic sequence needs at least one frame",
        ));
    }
    if !spec.amplitude.is_finite() {
        return Err(Error::invalid("amplitude must be finite"));
    }
    let t_count = spec.frames;
    let mut data = Vec::with_capacity(t_count * 22);
    match spec.kind {
        SynthKind::Constant => {
            for _ in 0..t_count {
                data.extend_from_slice(&STANDING_POSE);
            }
        }
        SynthKind::LinearRamp => {
            let denom = (t_count.max(2) - 1) as f64;
            for t in 0..t_count {
                let s = spec.amplitude * t as f64 / denom;
                let shift = [s, 0.5 * s, -0.25 * s];
                data.extend(STANDING_POSE.iter().map(|&p| add(p, shift)));
            }
        }
        SynthKind::WalkCycle => {
            let period = spec.fps;
            for t in 0..t_count {
                let phase = 2.0 * std::f64::consts::PI * t as f64 / period;
                let mut frame = STANDING_POSE;
                for &(joint, weight, half_cycles) in &SWING {
                    let s = (phase + std::f64::consts::PI * half_cycles).sin();
                    let p = &mut frame[joint - 1];
                    p[2] += spec.amplitude * weight * s;
                    if joint <= 12 {
                        p[1] += 0.3 * spec.amplitude * weight * s.max(0.0);
                    }
                }
                data.extend_from_slice(&frame);
            }
        }
        SynthKind::Noise => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let normal = Normal::new(0.0, spec.amplitude.abs())
                .map_err(|e| Error::invalid(e.to_string()))?;
            for _ in 0..t_count {
                for p in STANDING_POSE {
                    let jitter = [
                        normal.sample(&mut rng),
                        normal.sample(&mut rng),
                        normal.sample(&mut rng),
                    ];
                    data.push(add(p, jitter));
                }
            }
        }
    }
    Ok(
        MotionSequence::new(SkeletonSpec::humanml3d_22(), data, spec.fps, spec.source)?
            .with_meta("synth.kind", spec.kind.as_str())
            .with_meta("synth.amplitude", spec.amplitude.to_string())
            .with_meta("synth.seed", spec.seed.to_string()),
    )
}

/// `rotation · p + translation` for every point. The rotation must be proper.
pub fn apply_rigid(
    seq: &MotionSequence,
    rotation: &Mat3,
    translation: Point3,
) -> Result<MotionSequence> {
    if orthogonality_error(rotation) > 1e-9 || (det(rotation) - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            "rotation must be orthogonal with determinant +1",
        ));
    }
    if translation.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("translation must be finite"));
    }
    Ok(seq.derive(
        seq.data()
            .iter()
            .map(|&p| add(mat_vec(rotation, p), translation))
            .collect(),
    ))
}

/// Output frame `k` copies input frame `map[k]` (0-based offsets).
/// The map must be non-decreasing and within range.
pub fn apply_time_warp(seq: &MotionSequence, map: &[usize]) -> Result<MotionSequence> {
    if map.is_empty() {
        return Err(Error::invalid("time warp map is empty"));
    }
    for (k, &src) in map.iter().enumerate() {
        if src >= seq.frames() {
            return Err(Error::invalid(format!(
                "warp entry {} points at frame {} of {}",
                k + 1,
                src + 1,
                seq.frames()
            )));
        }
        if k > 0 && src < map[k - 1] {
            return Err(Error::invalid(format!(
                "warp map decreases at entry {}",
                k + 1
            )));
        }
    }
    Ok(seq.derive(
        map.iter()
            .flat_map(|&t| seq.frame(t).iter().copied())
            .collect(),
    ))
}

pub const BRUTE_FORCE_MAX_LEN: usize = 10;

/// Minimum cost over every boundary-anchored monotone warping path, found by
/// enumerating them all. Same steps and local cost as the DTW kernel.
pub fn brute_force_dtw(path_a: &[Point3], path_b: &[Point3]) -> Result<f64> {
    if path_a.is_empty() || path_b.is_empty() {
        return Err(Error::invalid("DTW needs non-empty paths"));
    }
    if path_a.len() > BRUTE_FORCE_MAX_LEN || path_b.len() > BRUTE_FORCE_MAX_LEN {
        return Err(Error::invalid(format!(
            "exhaustive DTW is limited to {BRUTE_FORCE_MAX_LEN} samples per path"
        )));
    }
    fn walk(a: &[Point3], b: &[Point3], i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + dist(a[i], b[j]);
        if i + 1 == a.len() && j + 1 == b.len() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, acc, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(path_a, path_b, 0, 0, 0.0, &mut best);
    Ok(best)
}
