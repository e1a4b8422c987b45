use crate::error::{Error, Result};
use crate::geom::{dist, Point3};

/// Unnormalized DTW cost between two 3-D trajectories.
///
/// Local cost is the Euclidean distance between samples. Steps are
/// insertion, deletion and match, each adding the destination cell's cost;
/// the path is anchored at both ends and there is no window.
pub fn dtw_joint(path_a: &[Point3], path_b: &[Point3]) -> Result<f64> {
    if path_a.is_empty() || path_b.is_empty() {
        return Err(Error::invalid("DTW needs non-empty paths"));
    }
    let m = path_b.len();
    let mut prev = vec![0.0f64; m];
    let mut curr = vec![0.0; m];
    for (i, &a) in path_a.iter().enumerate() {
        for j in 0..m {
            let cost = dist(a, path_b[j]);
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => curr[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(curr[j - 1]).min(prev[j - 1]),
            };
            curr[j] = best + cost;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[m - 1])
}
