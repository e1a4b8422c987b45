//! Digital Butterworth low-pass design and forward-backward filtering.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Transfer function coefficients, `a[0] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Butterworth {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
}

impl Butterworth {
    /// Low-pass of the given order with cutoff as a fraction of Nyquist.
    ///
    /// Analog prototype poles are scaled to the pre-warped cutoff and mapped
    /// through the bilinear transform; all zeros land at z = −1.
    pub fn lowpass(order: usize, cutoff: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("filter order must be at least 1"));
        }
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::invalid(format!(
                "cutoff must lie strictly between 0 and 1, got {cutoff}"
            )));
        }
        let n = order as i64;
        let fs2 = 4.0;
        let warped = fs2 * (std::f64::consts::PI * cutoff / 2.0).tan();
        let poles: Vec<Complex64> = (0..n)
            .map(|k| {
                let m = (-n + 1 + 2 * k) as f64;
                -Complex64::from_polar(1.0, std::f64::consts::PI * m / (2.0 * n as f64)) * warped
            })
            .collect();
        let gain = warped.powi(order as i32);
        let z_poles: Vec<Complex64> = poles.iter().map(|&p| (fs2 + p) / (fs2 - p)).collect();
        let denom = poles
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &p| acc * (fs2 - p));
        let k = gain / denom.re;
        let b = poly(&vec![Complex64::new(-1.0, 0.0); order])
            .into_iter()
            .map(|c| c * k)
            .collect();
        let a = poly(&z_poles);
        Ok(Self { b, a })
    }

    /// Gain at zero frequency.
    pub fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }

    /// Default edge padding: three times the filter length.
    pub fn pad_len(&self) -> usize {
        3 * self.a.len().max(self.b.len())
    }

    /// Initial state for which a unit step input is already at steady state.
    pub fn steady_state(&self) -> Vec<f64> {
        let n = self.a.len().max(self.b.len());
        let b = padded(&self.b, n);
        let a = padded(&self.a, n);
        let y = self.dc_gain();
        // z[i] = Σ_{k>i} (b[k] − a[k]·y)
        let mut z = vec![0.0; n - 1];
        let mut acc = 0.0;
        for i in (0..n - 1).rev() {
            acc += b[i + 1] - a[i + 1] * y;
            z[i] = acc;
        }
        z
    }

    /// Direct form II transposed, starting from state `zi`.
    pub fn lfilter(&self, x: &[f64], zi: &[f64]) -> Vec<f64> {
        let n = self.a.len().max(self.b.len());
        let b = padded(&self.b, n);
        let a = padded(&self.a, n);
        let mut z = zi.to_vec();
        z.resize(n - 1, 0.0);
        let mut y = Vec::with_capacity(x.len());
        for &xn in x {
            let yn = b[0] * xn + z.first().copied().unwrap_or(0.0);
            for i in 0..n - 1 {
                let next = if i + 2 < n { z[i + 1] } else { 0.0 };
                z[i] = b[i + 1] * xn - a[i + 1] * yn + next;
            }
            y.push(yn);
        }
        y
    }

    /// Zero-phase filtering: odd extension, forward pass, backward pass, trim.
    ///
    /// The pad length is `pad_len()` or `len − 1`, whichever is smaller.
    pub fn filtfilt(&self, x: &[f64]) -> Result<Vec<f64>> {
        let len = x.len();
        if len < 2 {
            return Err(Error::invalid(format!(
                "sequence too short to filter: {len} frame(s), need at least 2"
            )));
        }
        let pad = self.pad_len().min(len - 1);
        let (first, last) = (x[0], x[len - 1]);
        let mut ext = Vec::with_capacity(len + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * first - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * last - x[len - 1 - i]));

        let zi = self.steady_state();
        let scaled = |v: f64| zi.iter().map(|z| z * v).collect::<Vec<_>>();
        let mut y = self.lfilter(&ext, &scaled(ext[0]));
        y.reverse();
        let mut y = self.lfilter(&y, &scaled(y[0]));
        y.reverse();
        Ok(y[pad..pad + len].to_vec())
    }
}

fn padded(c: &[f64], n: usize) -> Vec<f64> {
    let mut v = c.to_vec();
    v.resize(n, 0.0);
    v
}

/// Real coefficients of the monic polynomial with the given roots,
/// highest power first.
fn poly(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= ci * r;
        }
        c = next;
    }
    c.into_iter().map(|v| v.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn design_matches_reference_coefficients() {
        let f = Butterworth::lowpass(4, 0.05).unwrap();
        let b = [
            3.123897691708262e-05,
            0.00012495590766833047,
            0.0001874338615024957,
            0.00012495590766833047,
            3.123897691708262e-05,
        ];
        let a = [
            1.0,
            -3.5897338871121756,
            4.851275882519417,
            -2.9240526561624587,
            0.663010484385891,
        ];
        for (x, y) in f.b.iter().zip(b) {
            assert!((x - y).abs() < 1e-15, "{x} vs {y}");
        }
        for (x, y) in f.a.iter().zip(a) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
        assert!((f.dc_gain() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn first_order_is_one_pole() {
        let f = Butterworth::lowpass(1, 0.5).unwrap();
        // tan(π/4) = 1 → b = [0.5, 0.5], a = [1, 0]
        assert!((f.b[0] - 0.5).abs() < 1e-12 && (f.b[1] - 0.5).abs() < 1e-12);
        assert!(f.a[1].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_design() {
        assert!(Butterworth::lowpass(0, 0.1).is_err());
        assert!(Butterworth::lowpass(4, 0.0).is_err());
        assert!(Butterworth::lowpass(4, 1.0).is_err());
    }

    #[test]
    fn steady_state_holds_a_step() {
        let f = Butterworth::lowpass(4, 0.05).unwrap();
        let y = f.lfilter(&[1.0; 50], &f.steady_state());
        assert!(y.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn constant_and_short_inputs() {
        let f = Butterworth::lowpass(4, 0.05).unwrap();
        for len in [2, 3, 15, 16, 200] {
            let y = f.filtfilt(&vec![2.5; len]).unwrap();
            assert_eq!(y.len(), len);
            assert!(y.iter().all(|v| (v - 2.5).abs() < 1e-6));
        }
        assert!(f.filtfilt(&[1.0]).is_err());
        assert!(f.filtfilt(&[]).is_err());
        assert_eq!(f.filtfilt(&[0.0; 20]).unwrap(), vec![0.0; 20]);
    }

    fn smooth(len: usize) -> Vec<f64> {
        (0..len)
            .map(|n| {
                let t = n as f64;
                (t * 0.021).sin() + 0.4 * (t * 0.047 + 1.0).cos() + 0.05 * (t * 1.9).sin()
            })
            .collect()
    }

    #[test]
    fn reversal_commutes_away_from_edges() {
        // exact only in the interior: the edge states differ between directions
        let f = Butterworth::lowpass(4, 0.05).unwrap();
        let x = smooth(400);
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let a = f.filtfilt(&x).unwrap();
        let mut b = f.filtfilt(&rev).unwrap();
        b.reverse();
        // the mismatch decays about 20x every 50 frames from each edge
        for k in 150..250 {
            assert!((a[k] - b[k]).abs() < 1e-5, "{k}: {} vs {}", a[k], b[k]);
        }
        assert!((a[5] - b[5]).abs() > 1e-5);
    }

    #[test]
    fn pulse_keeps_its_position() {
        let f = Butterworth::lowpass(4, 0.05).unwrap();
        let x: Vec<f64> = (0..600)
            .map(|n| (-((n as f64 - 300.0) / 25.0).powi(2)).exp())
            .collect();
        let y = f.filtfilt(&x).unwrap();
        let xcorr = |lag: isize| -> f64 {
            (50..550)
                .map(|k| x[k] * y[(k as isize + lag) as usize])
                .sum()
        };
        let best = (-20..=20)
            .max_by(|&p, &q| xcorr(p).partial_cmp(&xcorr(q)).unwrap())
            .unwrap();
        assert_eq!(best, 0);
        let peak = (0..600)
            .max_by(|&p, &q| y[p].partial_cmp(&y[q]).unwrap())
            .unwrap();
        assert_eq!(peak, 300);
    }
}
