//! Sampling-based segment convexity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::Region;
use crate::error::{Error, Result};
use crate::point::CPoint;

/// Rejection-sampling attempts per point before giving up.
pub const SAMPLE_TRIES: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConvexityVerdict {
    NoViolation { trials: usize },
    Witness { p1: CPoint, p2: CPoint, t: f64, trial: usize },
}

impl ConvexityVerdict {
    pub fn is_convex(&self) -> bool {
        matches!(self, ConvexityVerdict::NoViolation { .. })
    }
}

/// `true` iff `(1-t) p1 + t p2` lies in the region. Endpoints are assumed in-region.
pub fn check_segment(region: &Region, p1: &CPoint, p2: &CPoint, t: f64) -> Result<bool> {
    region.contains(&p1.lerp(p2, t))
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn draw(region: &Region, rng: &mut ChaCha8Rng) -> Result<CPoint> {
    region.sample(rng, SAMPLE_TRIES)?.ok_or_else(|| {
        Error::Sampling(format!("no in-region point found in {SAMPLE_TRIES} tries"))
    })
}

/// Samples `trials` pairs of in-region points and tests a random interior parameter plus
/// the midpoint of each segment. The witness with the smallest trial index is returned, so
/// the verdict does not depend on thread scheduling.
pub fn segment_convexity(region: &Region, trials: usize, seed: u64) -> Result<ConvexityVerdict> {
    if trials == 0 {
        return Err(Error::Invalid("segment_convexity needs at least one trial".into()));
    }
    // Fail fast (and deterministically) on an empty region.
    draw(region, &mut trial_rng(seed, 0))?;

    let outcomes: Vec<Option<(CPoint, CPoint, f64)>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Option<(CPoint, CPoint, f64)>> {
            let mut rng = trial_rng(seed, trial);
            let p1 = draw(region, &mut rng)?;
            let p2 = draw(region, &mut rng)?;
            let t: f64 = rng.gen_range(f64::EPSILON..1.0);
            for s in [t, 0.5] {
                if !check_segment(region, &p1, &p2, s)? {
                    return Ok(Some((p1, p2, s)));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;

    Ok(outcomes
        .into_iter()
        .enumerate()
        .find_map(|(trial, o)| o.map(|(p1, p2, t)| ConvexityVerdict::Witness { p1, p2, t, trial }))
        .unwrap_or(ConvexityVerdict::NoViolation { trials }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::exhaustion::tube;
    use num_complex::Complex64;

    #[test]
    fn ball_is_convex() {
        let b = Region::ball(&CPoint::from_real(&[1.0, 0.0, 0.0, -2.0]).unwrap(), 0.7);
        assert!(segment_convexity(&b, 500, 1).unwrap().is_convex());
    }

    #[test]
    fn tube_is_not_convex() {
        let g = tube(2, 1.0);
        let v = segment_convexity(&g, 200, 1).unwrap();
        match v {
            ConvexityVerdict::Witness { p1, p2, t, .. } => {
                assert!(g.contains(&p1).unwrap() && g.contains(&p2).unwrap());
                assert!(!g.contains(&p1.lerp(&p2, t)).unwrap());
            }
            _ => panic!("expected a witness"),
        }
        let p1 = CPoint::new(vec![Complex64::new(0.9f64.exp(), 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let p2 = CPoint::new(vec![Complex64::new(-(0.9f64.exp()), 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert!(!check_segment(&g, &p1, &p2, 0.5).unwrap());
    }

    #[test]
    fn deterministic_given_seed() {
        let g = tube(2, 1.0);
        assert_eq!(segment_convexity(&g, 300, 9).unwrap(), segment_convexity(&g, 300, 9).unwrap());
    }

    #[test]
    fn empty_region_is_a_sampling_error() {
        let b = Region::ball(&CPoint::from_real(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(segment_convexity(&b, 5, 0), Err(Error::Sampling(_))));
    }
}
