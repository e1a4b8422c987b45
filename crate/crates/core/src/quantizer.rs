//! Codebook lookup and the vector-quantized autoencoder loss.
//!
//! Only forward values are computed. The stop-gradient operator is the
//! identity on values, so the codebook and commitment terms of the loss
//! coincide up to the `β` weight.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    entries: Vec<Vec<f64>>,
}

impl Codebook {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let dim = entries.first().map(Vec::len).unwrap_or(0);
        if entries.is_empty() || dim == 0 {
            return Err(Error::invalid(
                "codebook needs at least one non-empty entry",
            ));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.len() != dim {
                return Err(Error::Shape(format!(
                    "codebook entry {} has {} components, expected {dim}",
                    i + 1,
                    e.len()
                )));
            }
            if e.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!(
                    "codebook entry {} is not finite",
                    i + 1
                )));
            }
        }
        Ok(Self { dim, entries })
    }

    /// One entry per row, comma separated. Blank lines and `#` comments are skipped.
    pub fn parse_csv(bytes: &[u8]) -> Result<Self> {
        let text =
            std::str::from_utf8(bytes).map_err(|e| Error::parse(1, format!("not UTF-8: {e}")))?;
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                body.split(',').map(|f| f.trim().parse::<f64>()).collect();
            entries.push(row.map_err(|e| Error::parse(n + 1, format!("bad number: {e}")))?);
        }
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn check_dims(what: &str, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "{what}: lengths {} and {} differ",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Nearest entry by Euclidean distance, ties going to the lowest index.
/// Returns the 1-based index and the entry.
pub fn nearest_code<'a>(z_e: &[f64], cb: &'a Codebook) -> Result<(usize, &'a [f64])> {
    if z_e.len() != cb.dim {
        return Err(Error::Shape(format!(
            "vector has {} components, codebook has {}",
            z_e.len(),
            cb.dim
        )));
    }
    let mut best = (0, f64::INFINITY);
    for (i, e) in cb.entries.iter().enumerate() {
        let d = squared_distance(z_e, e);
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok((best.0 + 1, &cb.entries[best.0]))
}

/// `‖m_raw − m_recon‖² + (1 + β)·‖z_e − e‖²`.
pub fn vq_loss(m_raw: &[f64], m_recon: &[f64], z_e: &[f64], e: &[f64], beta: f64) -> Result<f64> {
    check_dims("reconstruction", m_raw, m_recon)?;
    check_dims("latent", z_e, e)?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::invalid(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    let recon = squared_distance(m_raw, m_recon);
    let latent = squared_distance(z_e, e);
    Ok(recon + latent + beta * latent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cb() -> Codebook {
        Codebook::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn nearest_examples() {
        assert_eq!(nearest_code(&[0.2, 0.1], &cb()).unwrap().0, 1);
        let book = cb();
        let (i, e) = nearest_code(&[1.0, 1.0], &book).unwrap();
        assert_eq!((i, e), (2, &[1.0, 1.0][..]));
        assert_eq!(nearest_code(&[0.5, 0.5], &cb()).unwrap().0, 1);
        assert!(nearest_code(&[0.5], &cb()).is_err());
    }

    #[test]
    fn loss_examples() {
        assert_eq!(
            vq_loss(&[1.0, 2.0], &[1.0, 2.0], &[0.3], &[0.3], 0.25).unwrap(),
            0.0
        );
        assert_eq!(
            vq_loss(&[2.0, 0.0], &[0.0, 0.0], &[0.3], &[0.3], 0.25).unwrap(),
            4.0
        );
        assert_eq!(
            vq_loss(&[1.0], &[1.0], &[1.0, 0.0], &[0.0, 0.0], 0.25).unwrap(),
            1.25
        );
        assert!(vq_loss(&[1.0], &[1.0, 2.0], &[0.0], &[0.0], 0.0).is_err());
        assert!(vq_loss(&[1.0], &[1.0], &[0.0], &[0.0], -1.0).is_err());
    }

    #[test]
    fn csv_codebook() {
        let cb = Codebook::parse_csv(b"# two entries\n0,0\n1, 1\n").unwrap();
        assert_eq!(cb, self::cb());
        assert!(Codebook::parse_csv(b"0,0\n1\n").is_err());
        assert_eq!(
            Codebook::parse_csv(b"0,x\n").unwrap_err().kind(),
            crate::ErrorKind::Parse
        );
        assert!(Codebook::parse_csv(b"").is_err());
    }

    proptest! {
        #[test]
        fn nearest_beats_every_entry_in_shuffled_scan(
            entries in prop::collection::vec(prop::collection::vec(-3i32..3, 3), 1..20),
            z in prop::collection::vec(-3.0f64..3.0, 3),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let entries: Vec<Vec<f64>> = entries
                .into_iter()
                .map(|e| e.into_iter().map(f64::from).collect())
                .collect();
            let cb = Codebook::new(entries.clone()).unwrap();
            let (i, e) = nearest_code(&z, &cb).unwrap();
            let best = squared_distance(&z, e);
            let mut order: Vec<usize> = (0..entries.len()).collect();
            order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            for k in order {
                let d = squared_distance(&z, &entries[k]);
                prop_assert!(best <= d);
                if d == best {
                    prop_assert!(i <= k + 1);
                }
            }
        }

        #[test]
        fn loss_is_nonnegative_and_zero_only_at_rest(
            raw in prop::collection::vec(-5.0f64..5.0, 4),
            recon in prop::collection::vec(-5.0f64..5.0, 4),
            z in prop::collection::vec(-5.0f64..5.0, 2),
            e in prop::collection::vec(-5.0f64..5.0, 2),
            beta in 0.0f64..2.0,
        ) {
            let l = vq_loss(&raw, &recon, &z, &e, beta).unwrap();
            prop_assert!(l >= 0.0);
            prop_assert_eq!(l == 0.0, raw == recon && z == e);
            prop_assert_eq!(vq_loss(&raw, &raw, &z, &z, beta).unwrap(), 0.0);
        }
    }
}
