//! Landmark-to-joint retargeting.
//!
//! Every target joint is defined by one rule over landmarks or other,
//! already derived joints. Rules are affine with weights summing to one, so
//! retargeting commutes with translation.
//!
//! Rule files reuse the skeleton table grammar with a fourth column:
//!
//! ```text
//! skeleton humanml3d-22
//! 1  | Root/Pelvis  |             | mean LEFT_HIP RIGHT_HIP
//! 4  | Spine/Lumbar |             | lerp J1 J7 0.333333
//! 16 | Head Top     | head scale_a | direct NOSE
//! ```
//!
//! A point is a landmark name, `L<n>` for landmark `n`, or `J<n>` for
//! target joint `n` (all 1-based).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{lerp, Point3};
use crate::landmarks::{LandmarkSequence, LANDMARK_COUNT};
use crate::motion::{MotionSequence, Source};
use crate::skeleton::{parse_joint_table, SkeletonSpec, MEDIAPIPE_NAMES};

pub const DEFAULT_LAMBDA_LUMBAR: f64 = 1.0 / 3.0;
pub const DEFAULT_LAMBDA_NECK: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRef {
    Landmark(usize),
    Joint(usize),
}

impl PointRef {
    fn landmark(name: &str) -> Self {
        let i = MEDIAPIPE_NAMES
            .iter()
            .position(|n| *n == name)
            .expect("known landmark name");
        PointRef::Landmark(i + 1)
    }

    fn parse(token: &str) -> Option<Self> {
        if let Some(i) = MEDIAPIPE_NAMES.iter().position(|n| *n == token) {
            return Some(PointRef::Landmark(i + 1));
        }
        let (kind, digits) = token.split_at(1.min(token.len()));
        let n: usize = digits.parse().ok()?;
        match kind {
            "L" if (1..=LANDMARK_COUNT).contains(&n) => Some(PointRef::Landmark(n)),
            "J" if n >= 1 => Some(PointRef::Joint(n)),
            _ => None,
        }
    }
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PointRef::Landmark(i) => f.write_str(MEDIAPIPE_NAMES[i - 1]),
            PointRef::Joint(j) => write!(f, "J{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    Direct(PointRef),
    Mean(PointRef, PointRef),
    /// `a + λ·(b − a)` with `λ ∈ [0, 1]`.
    Lerp(PointRef, PointRef, f64),
}

impl RuleKind {
    fn inputs(&self) -> Vec<PointRef> {
        match *self {
            RuleKind::Direct(p) => vec![p],
            RuleKind::Mean(a, b) | RuleKind::Lerp(a, b, _) => vec![a, b],
        }
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let point = |t: &str| PointRef::parse(t).ok_or_else(|| format!("unknown point {t:?}"));
        match tokens.as_slice() {
            ["direct", p] => Ok(RuleKind::Direct(point(p)?)),
            ["mean", a, b] => Ok(RuleKind::Mean(point(a)?, point(b)?)),
            ["lerp", a, b, l] => {
                let l: f64 = l.parse().map_err(|_| format!("bad fraction {l:?}"))?;
                Ok(RuleKind::Lerp(point(a)?, point(b)?, l))
            }
            _ => Err(format!(
                "expected `direct P`, `mean P Q` or `lerp P Q λ`, found {text:?}"
            )),
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleKind::Direct(p) => write!(f, "direct {p}"),
            RuleKind::Mean(a, b) => write!(f, "mean {a} {b}"),
            RuleKind::Lerp(a, b, l) => write!(f, "lerp {a} {b} {l}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetargetRule {
    pub target: usize,
    pub kind: RuleKind,
}

/// A complete, validated rule set for one target skeleton.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    skeleton: Arc<SkeletonSpec>,
    /// Indexed by target joint − 1.
    rules: Vec<RuleKind>,
    /// Evaluation order (0-based joints) so that joint inputs come first.
    order: Vec<usize>,
}

impl RuleSet {
    /// The builtin landmark-to-22-joint mapping with the given placement
    /// fractions for the lumbar and neck joints.
    pub fn humanml3d(lambda_lumbar: f64, lambda_neck: f64) -> Result<Self> {
        use PointRef::Joint;
        use RuleKind::*;
        let lm = PointRef::landmark;
        let rules = vec![
            Mean(lm("LEFT_HIP"), lm("RIGHT_HIP")),
            Direct(lm("RIGHT_HIP")),
            Direct(lm("LEFT_HIP")),
            Lerp(Joint(1), Joint(7), lambda_lumbar),
            Direct(lm("RIGHT_KNEE")),
            Direct(lm("LEFT_KNEE")),
            Mean(lm("LEFT_SHOULDER"), lm("RIGHT_SHOULDER")),
            Direct(lm("RIGHT_ANKLE")),
            Direct(lm("LEFT_ANKLE")),
            Mean(Joint(7), lm("NOSE")),
            Direct(lm("RIGHT_HEEL")),
            Direct(lm("LEFT_HEEL")),
            Lerp(Joint(7), lm("NOSE"), lambda_neck),
            Direct(lm("RIGHT_SHOULDER")),
            Direct(lm("LEFT_SHOULDER")),
            Direct(lm("NOSE")),
            Direct(lm("RIGHT_ELBOW")),
            Direct(lm("LEFT_ELBOW")),
            Direct(lm("RIGHT_WRIST")),
            Direct(lm("LEFT_WRIST")),
            Direct(lm("RIGHT_INDEX")),
            Direct(lm("LEFT_INDEX")),
        ];
        let rules = rules
            .into_iter()
            .enumerate()
            .map(|(i, kind)| RetargetRule {
                target: i + 1,
                kind,
            })
            .collect();
        Self::new(SkeletonSpec::humanml3d_22(), rules)
    }

    pub fn new(skeleton: Arc<SkeletonSpec>, rules: Vec<RetargetRule>) -> Result<Self> {
        let count = skeleton.joint_count();
        let mut slots: Vec<Option<RuleKind>> = vec![None; count];
        for rule in rules {
            let j0 = skeleton.zero_based(rule.target)?;
            if slots[j0].replace(rule.kind).is_some() {
                return Err(Error::invalid(format!(
                    "joint {} has more than one rule",
                    rule.target
                )));
            }
        }
        let missing: Vec<String> = slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(i, _)| (i + 1).to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::invalid(format!(
                "incomplete rule set: no rule for joint(s) {}",
                missing.join(", ")
            )));
        }
        let rules: Vec<RuleKind> = slots.into_iter().flatten().collect();
        for (i, rule) in rules.iter().enumerate() {
            if let RuleKind::Lerp(_, _, l) = rule {
                if !(0.0..=1.0).contains(l) {
                    return Err(Error::invalid(format!(
                        "joint {}: lerp fraction {l} outside [0, 1]",
                        i + 1
                    )));
                }
            }
            for input in rule.inputs() {
                if let PointRef::Joint(j) = input {
                    if j == 0 || j > count {
                        return Err(Error::JointIndex { index: j, count });
                    }
                }
            }
        }
        let order = evaluation_order(&rules)?;
        Ok(Self {
            skeleton,
            rules,
            order,
        })
    }

    /// Parses a rule file; the skeleton comes from the same table.
    pub fn parse(text: &str) -> Result<Self> {
        let table = parse_joint_table(text)?;
        let mut rules = Vec::new();
        for row in &table.rows {
            let extra = row.extra.as_deref().ok_or_else(|| {
                Error::parse(row.line, format!("joint {} has no rule column", row.index))
            })?;
            let kind = RuleKind::parse(extra).map_err(|m| Error::parse(row.line, m))?;
            rules.push(RetargetRule {
                target: row.index,
                kind,
            });
        }
        let skeleton = table.into_skeleton()?;
        let builtin = SkeletonSpec::humanml3d_22();
        let skeleton = if *builtin == skeleton {
            builtin
        } else {
            Arc::new(skeleton)
        };
        Self::new(skeleton, rules)
    }

    /// Writes the rule-file form accepted by [`RuleSet::parse`].
    pub fn to_table(&self) -> String {
        let mut out = format!("skeleton {}\n", self.skeleton.id());
        for (i, rule) in self.rules.iter().enumerate() {
            let index = i + 1;
            let name = self.skeleton.name(index).unwrap_or_default();
            let tags = self.skeleton.role_tags(index).join(" ");
            out.push_str(&format!("{index} | {name} | {tags} | {rule}\n"));
        }
        out
    }

    pub fn skeleton(&self) -> &Arc<SkeletonSpec> {
        &self.skeleton
    }

    /// Rule of the 1-based target joint.
    pub fn rule(&self, joint: usize) -> Result<RuleKind> {
        Ok(self.rules[self.skeleton.zero_based(joint)?])
    }

    fn eval_frame(&self, landmarks: &[Point3], out: &mut [Point3]) {
        for &j0 in &self.order {
            let get = |p: PointRef| match p {
                PointRef::Landmark(i) => landmarks[i - 1],
                PointRef::Joint(j) => out[j - 1],
            };
            out[j0] = match self.rules[j0] {
                RuleKind::Direct(p) => get(p),
                RuleKind::Mean(a, b) => lerp(get(a), get(b), 0.5),
                RuleKind::Lerp(a, b, l) => lerp(get(a), get(b), l),
            };
        }
    }
}

fn evaluation_order(rules: &[RuleKind]) -> Result<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    fn visit(j0: usize, rules: &[RuleKind], mark: &mut [u8], order: &mut Vec<usize>) -> Result<()> {
        match mark[j0] {
            2 => return Ok(()),
            1 => {
                return Err(Error::invalid(format!(
                    "rule for joint {} depends on itself",
                    j0 + 1
                )))
            }
            _ => {}
        }
        mark[j0] = 1;
        for input in rules[j0].inputs() {
            if let PointRef::Joint(j) = input {
                visit(j - 1, rules, mark, order)?;
            }
        }
        mark[j0] = 2;
        order.push(j0);
        Ok(())
    }
    let mut mark = vec![0u8; rules.len()];
    let mut order = Vec::with_capacity(rules.len());
    for j0 in 0..rules.len() {
        visit(j0, rules, &mut mark, &mut order)?;
    }
    Ok(order)
}

/// Maps every frame of a landmark sequence onto the rule set's skeleton.
/// Frame count and fps are kept; visibility is dropped.
pub fn retarget(src: &LandmarkSequence, rules: &RuleSet) -> Result<MotionSequence> {
    let joints = rules.skeleton.joint_count();
    let mut data = vec![[0.0; 3]; src.len() * joints];
    let mut positions = [[0.0; 3]; LANDMARK_COUNT];
    for (frame, out) in src.frames().iter().zip(data.chunks_exact_mut(joints)) {
        for (p, l) in positions.iter_mut().zip(frame.iter()) {
            *p = l.position;
        }
        rules.eval_frame(&positions, out);
    }
    let mut seq = MotionSequence::new(rules.skeleton.clone(), data, src.fps(), Source::Real)?;
    for (i, rule) in rules.rules.iter().enumerate() {
        if let RuleKind::Lerp(a, b, l) = rule {
            seq = seq.with_meta(
                format!("retarget.joint{}", i + 1),
                format!("lerp {a} {b} {l}"),
            );
        }
    }
    Ok(seq)
}

/// Retargets with the builtin 22-joint rules.
pub fn retarget_33_to_22(
    src: &LandmarkSequence,
    lambda_lumbar: f64,
    lambda_neck: f64,
) -> Result<MotionSequence> {
    retarget(src, &RuleSet::humanml3d(lambda_lumbar, lambda_neck)?)
}
