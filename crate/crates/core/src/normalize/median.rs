use crate::error::{Error, Result};

fn median_of(buf: &mut [f64]) -> f64 {
    buf.sort_by(f64::total_cmp);
    let n = buf.len();
    if n % 2 == 1 {
        buf[n / 2]
    } else {
        0.5 * (buf[n / 2 - 1] + buf[n / 2])
    }
}

/// Sliding median with edge samples replicated `kernel / 2` times on each side.
///
/// A kernel longer than the channel replaces every sample with the median of
/// the whole channel.
pub fn median_filter_channel(x: &[f64], kernel: usize) -> Result<Vec<f64>> {
    if kernel == 0 || kernel % 2 == 0 {
        return Err(Error::invalid(format!(
            "median kernel must be a positive odd number, got {kernel}"
        )));
    }
    let n = x.len();
    if n == 0 || kernel == 1 {
        return Ok(x.to_vec());
    }
    if kernel > n {
        let m = median_of(&mut x.to_vec());
        return Ok(vec![m; n]);
    }
    let half = kernel / 2;
    let mut window = vec![0.0; kernel];
    Ok((0..n)
        .map(|i| {
            for (k, slot) in window.iter_mut().enumerate() {
                let idx = (i + k).saturating_sub(half).min(n - 1);
                *slot = x[idx];
            }
            median_of(&mut window)
        })
        .collect())
}
