//! Counter-style seeded streams.
//!
//! Every random quantity is drawn from a ChaCha stream keyed by
//! `(seed, domain, attempt)` with stream id `index`, so row `r` of attempt `a`
//! never depends on how many draws other rows consumed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub(crate) const DOMAIN_SPHERE_ROWS: u64 = 0x5350_4845_5245_0001;
pub(crate) const DOMAIN_REALIZABLE: u64 = 0x5245_414c_495a_0002;
pub(crate) const DOMAIN_NEEDLE_POS: u64 = 0x4e45_4544_4c45_0003;
pub(crate) const DOMAIN_BASELINE: u64 = 0x4241_5345_4c4e_0004;

/// Deterministic stream for `(seed, domain, index, attempt)`.
pub fn stream(seed: u64, domain: u64, index: u64, attempt: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    key[16..24].copy_from_slice(&attempt.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Uniform draw from the unit sphere in `dim` dimensions (normalized Gaussian).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform draw from the closed unit ball in `dim` dimensions.
pub fn unit_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    if dim == 0 {
        return Vec::new();
    }
    let dir = unit_vector(rng, dim);
    let u: f64 = rng.random();
    let radius = u.powf(1.0 / dim as f64);
    dir.into_iter().map(|x| x * radius).collect()
}

/// Needle position for a seeded instance, uniform over `0..n_actions`.
pub fn needle_position(seed: u64, n_actions: usize) -> usize {
    stream(seed, DOMAIN_NEEDLE_POS, 0, 0).random_range(0..n_actions)
}
