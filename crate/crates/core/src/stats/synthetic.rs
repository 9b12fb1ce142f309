//! Synthetic learning curves with a known offset between two arms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::stats::CurveSet;

/// Shared latent curve: a saturating rise from 0 to 10.
pub fn latent_curve(t: usize) -> f64 {
    10.0 * (1.0 - (-(t as f64) / 15.0).exp())
}

/// Two arms observed at steps `1..=len`: `proposed = latent + noise` and
/// `baseline = latent - offset + noise`, with independent N(0, noise_sd)
/// noise per run and step.
pub fn synthetic_curves(
    len: usize,
    runs: usize,
    offset: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<(CurveSet, CurveSet)> {
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::contract(format!(
            "noise scale {noise_sd} must be finite and >= 0"
        )));
    }
    let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::contract(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps: Vec<u64> = (1..=len as u64).collect();
    let mut arm = |shift: f64| -> Vec<Vec<f64>> {
        (0..runs)
            .map(|_| {
                (0..len)
                    .map(|t| latent_curve(t) + shift + noise.sample(&mut rng))
                    .collect()
            })
            .collect()
    };
    let p = arm(0.0);
    let b = arm(-offset);
    Ok((
        CurveSet::from_runs("proposed", steps.clone(), &p)?,
        CurveSet::from_runs("baseline", steps, &b)?,
    ))
}
