//! Joint catalogs.
//!
//! Joint indices are 1-based at every public boundary, so that index 16 is
//! the head in the 22-joint catalog. Internally sequences store joints in
//! catalog order starting at 0.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

pub const HUMANML3D_22: &str = "humanml3d-22";
pub const MEDIAPIPE_33: &str = "mediapipe-33";

const HUMANML3D_NAMES: [&str; 22] = [
    "Root/Pelvis",
    "Right Hip",
    "Left Hip",
    "Spine/Lumbar",
    "Right Knee",
    "Left Knee",
    "Spine/Thorax",
    "Right Ankle",
    "Left Ankle",
    "Spine/Upper",
    "Right Foot",
    "Left Foot",
    "Neck Base",
    "Right Shoulder",
    "Left Shoulder",
    "Head Top",
    "Right Elbow",
    "Left Elbow",
    "Right Wrist",
    "Left Wrist",
    "Right Hand",
    "Left Hand",
];

/// Pose-estimator landmark names in their native order.
pub const MEDIAPIPE_NAMES: [&str; 33] = [
    "NOSE",
    "LEFT_EYE_INNER",
    "LEFT_EYE",
    "LEFT_EYE_OUTER",
    "RIGHT_EYE_INNER",
    "RIGHT_EYE",
    "RIGHT_EYE_OUTER",
    "LEFT_EAR",
    "RIGHT_EAR",
    "MOUTH_LEFT",
    "MOUTH_RIGHT",
    "LEFT_SHOULDER",
    "RIGHT_SHOULDER",
    "LEFT_ELBOW",
    "RIGHT_ELBOW",
    "LEFT_WRIST",
    "RIGHT_WRIST",
    "LEFT_PINKY",
    "RIGHT_PINKY",
    "LEFT_INDEX",
    "RIGHT_INDEX",
    "LEFT_THUMB",
    "RIGHT_THUMB",
    "LEFT_HIP",
    "RIGHT_HIP",
    "LEFT_KNEE",
    "RIGHT_KNEE",
    "LEFT_ANKLE",
    "RIGHT_ANKLE",
    "LEFT_HEEL",
    "RIGHT_HEEL",
    "LEFT_FOOT_INDEX",
    "RIGHT_FOOT_INDEX",
];

/// Ordered joint catalog with the role indices the normalizer needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonSpec {
    id: String,
    names: Vec<String>,
    head_index: usize,
    scale_pair: (usize, usize),
    left_right_pairs: Vec<(usize, usize)>,
}

impl SkeletonSpec {
    pub fn new(
        id: impl Into<String>,
        names: Vec<String>,
        head_index: usize,
        scale_pair: (usize, usize),
        left_right_pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!("invalid skeleton id {id:?}")));
        }
        if names.is_empty() {
            return Err(Error::invalid("skeleton has no joints"));
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::invalid(format!("joint {} has an empty name", i + 1)));
            }
            if let Some(prev) = seen.insert(name.as_str(), i + 1) {
                return Err(Error::invalid(format!(
                    "joint name {name:?} used by joints {prev} and {}",
                    i + 1
                )));
            }
        }
        let count = names.len();
        let check = |index: usize| {
            if (1..=count).contains(&index) {
                Ok(())
            } else {
                Err(Error::JointIndex { index, count })
            }
        };
        check(head_index)?;
        check(scale_pair.0)?;
        check(scale_pair.1)?;
        if scale_pair.0 == scale_pair.1 {
            return Err(Error::invalid("scale pair must name two distinct joints"));
        }
        for &(l, r) in &left_right_pairs {
            check(l)?;
            check(r)?;
            if l == r {
                return Err(Error::invalid(format!("joint {l} paired with itself")));
            }
        }
        Ok(Self {
            id,
            names,
            head_index,
            scale_pair,
            left_right_pairs,
        })
    }

    /// The 22-joint HumanML3D-style skeleton (head 16, scale pair 16/11).
    pub fn humanml3d_22() -> Arc<SkeletonSpec> {
        static CELL: OnceLock<Arc<SkeletonSpec>> = OnceLock::new();
        CELL.get_or_init(|| {
            let names = HUMANML3D_NAMES.iter().map(|s| s.to_string()).collect();
            let pairs = vec![
                (2, 3),
                (5, 6),
                (8, 9),
                (11, 12),
                (14, 15),
                (17, 18),
                (19, 20),
                (21, 22),
            ];
            Arc::new(
                SkeletonSpec::new(HUMANML3D_22, names, 16, (16, 11), pairs)
                    .expect("builtin skeleton is valid"),
            )
        })
        .clone()
    }

    /// The 33-landmark pose-estimator catalog (head NOSE, scale pair NOSE/RIGHT_HEEL).
    pub fn mediapipe_33() -> Arc<SkeletonSpec> {
        static CELL: OnceLock<Arc<SkeletonSpec>> = OnceLock::new();
        CELL.get_or_init(|| {
            let names = MEDIAPIPE_NAMES.iter().map(|s| s.to_string()).collect();
            let mut pairs = vec![(2, 5), (3, 6), (4, 7), (8, 9), (10, 11)];
            pairs.extend((12..=32).step_by(2).map(|l| (l, l + 1)));
            Arc::new(
                SkeletonSpec::new(MEDIAPIPE_33, names, 1, (1, 31), pairs)
                    .expect("builtin skeleton is valid"),
            )
        })
        .clone()
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn joint_count(&self) -> usize {
        self.names.len()
    }

    /// Name of the 1-based joint `index`.
    pub fn name(&self, index: usize) -> Result<&str> {
        self.zero_based(index).map(|i| self.names[i].as_str())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    /// 1-based index of the joint called `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name).map(|i| i + 1)
    }

    pub fn head_index(&self) -> usize {
        self.head_index
    }

    pub fn scale_pair(&self) -> (usize, usize) {
        self.scale_pair
    }

    pub fn left_right_pairs(&self) -> &[(usize, usize)] {
        &self.left_right_pairs
    }

    /// Converts a 1-based joint index into a storage offset.
    pub fn zero_based(&self, index: usize) -> Result<usize> {
        if (1..=self.names.len()).contains(&index) {
            Ok(index - 1)
        } else {
            Err(Error::JointIndex {
                index,
                count: self.names.len(),
            })
        }
    }

    /// Index of the mirror partner of a 1-based joint, or the joint itself.
    pub fn mirror_of(&self, index: usize) -> usize {
        for &(l, r) in &self.left_right_pairs {
            if l == index {
                return r;
            }
            if r == index {
                return l;
            }
        }
        index
    }

    /// Parses the plain-text skeleton table.
    ///
    /// ```text
    /// skeleton humanml3d-22
    /// 1  | Root/Pelvis
    /// 11 | Right Foot | scale_b mirror=12
    /// 16 | Head Top   | head scale_a
    /// ```
    pub fn parse_table(text: &str) -> Result<SkeletonSpec> {
        let table = parse_joint_table(text)?;
        table.into_skeleton()
    }

    /// Writes the table form accepted by [`SkeletonSpec::parse_table`].
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "skeleton {}", self.id);
        for (i, name) in self.names.iter().enumerate() {
            let index = i + 1;
            let _ = write!(out, "{index} | {name}");
            let tags = self.role_tags(index);
            if !tags.is_empty() {
                let _ = write!(out, " | {}", tags.join(" "));
            }
            out.push('\n');
        }
        out
    }

    pub(crate) fn role_tags(&self, index: usize) -> Vec<String> {
        let mut tags = Vec::new();
        if index == self.head_index {
            tags.push("head".to_string());
        }
        if index == self.scale_pair.0 {
            tags.push("scale_a".to_string());
        }
        if index == self.scale_pair.1 {
            tags.push("scale_b".to_string());
        }
        for &(l, r) in &self.left_right_pairs {
            if l == index {
                tags.push(format!("mirror={r}"));
            }
        }
        tags
    }
}

/// Returns the 22-joint and 33-landmark builtin catalogs.
pub fn builtin_skeletons() -> (Arc<SkeletonSpec>, Arc<SkeletonSpec>) {
    (SkeletonSpec::humanml3d_22(), SkeletonSpec::mediapipe_33())
}

/// One non-comment row of a joint table.
#[derive(Debug, Clone)]
pub(crate) struct TableRow {
    pub line: usize,
    pub index: usize,
    pub name: String,
    pub tags: Vec<String>,
    pub extra: Option<String>,
}

#[derive(Debug, Clone)]
pub(crate) struct JointTable {
    pub id: Option<String>,
    pub rows: Vec<TableRow>,
}

/// Splits a joint table into rows. Fields are separated by `|`; `#` starts a comment.
pub(crate) fn parse_joint_table(text: &str) -> Result<JointTable> {
    let mut id = None;
    let mut rows: Vec<TableRow> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("skeleton") {
            if rest.starts_with(char::is_whitespace) {
                let value = rest.trim();
                if value.is_empty() {
                    return Err(Error::parse(line, "missing skeleton id"));
                }
                id = Some(value.to_string());
                continue;
            }
        }
        let fields: Vec<&str> = body.split('|').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 4 {
            return Err(Error::parse(
                line,
                "expected `index | name [| tags [| rule]]`",
            ));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad joint index {:?}", fields[0])))?;
        let expected = rows.len() + 1;
        if index != expected {
            return Err(Error::parse(
                line,
                format!("joint indices must be contiguous; expected {expected}, found {index}"),
            ));
        }
        let tags = fields
            .get(2)
            .map(|t| t.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default();
        rows.push(TableRow {
            line,
            index,
            name: fields[1].to_string(),
            tags,
            extra: fields
                .get(3)
                .map(|s| s.to_string())
                .filter(|s| !s.is_empty()),
        });
    }
    Ok(JointTable { id, rows })
}

impl JointTable {
    pub fn into_skeleton(self) -> Result<SkeletonSpec> {
        let id = self
            .id
            .ok_or_else(|| Error::parse(1, "missing `skeleton <id>` line"))?;
        let mut head = None;
        let mut scale_a = None;
        let mut scale_b = None;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for row in &self.rows {
            for tag in &row.tags {
                let slot = match tag.as_str() {
                    "head" => &mut head,
                    "scale_a" => &mut scale_a,
                    "scale_b" => &mut scale_b,
                    other => {
                        let partner = other
                            .strip_prefix("mirror=")
                            .and_then(|v| v.parse::<usize>().ok())
                            .ok_or_else(|| {
                                Error::parse(row.line, format!("unknown tag {other:?}"))
                            })?;
                        let pair = (row.index.min(partner), row.index.max(partner));
                        if !pairs.contains(&pair) {
                            pairs.push(pair);
                        }
                        continue;
                    }
                };
                if slot.replace(row.index).is_some() {
                    return Err(Error::parse(row.line, format!("duplicate `{tag}` tag")));
                }
            }
        }
        let head = head.ok_or_else(|| Error::invalid("no joint tagged `head`"))?;
        let scale_a = scale_a.ok_or_else(|| Error::invalid("no joint tagged `scale_a`"))?;
        let scale_b = scale_b.ok_or_else(|| Error::invalid("no joint tagged `scale_b`"))?;
        let names = self.rows.into_iter().map(|r| r.name).collect();
        SkeletonSpec::new(id, names, head, (scale_a, scale_b), pairs)
    }
}

/// Resolves skeleton ids found in motion files.
#[derive(Debug, Clone)]
pub struct SkeletonRegistry {
    by_id: HashMap<String, Arc<SkeletonSpec>>,
}

impl Default for SkeletonRegistry {
    fn default() -> Self {
        let mut reg = Self {
            by_id: HashMap::new(),
        };
        reg.register(SkeletonSpec::humanml3d_22());
        reg.register(SkeletonSpec::mediapipe_33());
        reg
    }
}

impl SkeletonRegistry {
    /// Adds or replaces a catalog.
    pub fn register(&mut self, skeleton: Arc<SkeletonSpec>) {
        self.by_id.insert(skeleton.id().to_string(), skeleton);
    }

    pub fn get(&self, id: &str) -> Option<Arc<SkeletonSpec>> {
        self.by_id.get(id).cloned()
    }
}
