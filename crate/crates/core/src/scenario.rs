//! Seeded random instances at a target expected utilization.
//!
//! Track `i` draws from ChaCha8 stream `2^32 + i`, survey `j`'s goal from
//! stream `2^33 + j`, and the survey partition from stream `0`, all under the
//! same seed. Adding tracks therefore never changes earlier tracks.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interval::SingleInterval;
use crate::model::{
    Emitter, Instance, InstanceMeta, Survey, SurveyId, SystemSpec, Track, TrackId,
};

/// Widest band a survey configuration covers: two bands of 100 MHz.
const SURVEY_CONFIG_WIDTH: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub utilization: f64,
    pub track_proportion: f64,
    pub track_count: usize,
    pub survey_count: usize,
    /// Inclusive range of emitters per track.
    pub emitters_per_track: (u32, u32),
    /// Inclusive range of emitter band widths in MHz.
    pub emitter_width: (f64, f64),
    pub domain: SingleInterval,
    /// Probability that an emitter's bandwidth cap is the maximum.
    pub bandwidth_cap_prob: f64,
    pub max_bandwidth: f64,
    pub seed: u64,
}

impl ScenarioParams {
    /// Standard sizes at the given utilization, track proportion and seed.
    pub fn new(utilization: f64, track_proportion: f64, seed: u64) -> Self {
        Self {
            utilization,
            track_proportion,
            track_count: 50,
            survey_count: 10,
            emitters_per_track: (1, 3),
            emitter_width: (1.0, 50.0),
            domain: SingleInterval::new(10_000.0, 16_000.0).expect("valid domain"),
            bandwidth_cap_prob: 0.75,
            max_bandwidth: 100.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (e_lo, e_hi) = self.emitters_per_track;
        let (w_lo, w_hi) = self.emitter_width;
        let ok = self.utilization.is_finite()
            && self.utilization > 0.0
            && (0.0..=1.0).contains(&self.track_proportion)
            && self.survey_count > 0
            && 1 <= e_lo
            && e_lo <= e_hi
            && 0.0 < w_lo
            && w_lo <= w_hi
            && w_hi <= self.domain.width()
            && w_hi <= self.max_bandwidth
            && (0.0..=1.0).contains(&self.bandwidth_cap_prob);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("invalid scenario parameters"))
        }
    }
}

/// Expected utilization `(U^tr, U^sv, U)`: track goals over the two
/// receivers of a node, and survey goals weighted by how many 200 MHz
/// configurations cover them, over all eight receivers.
pub fn expected_utilization(tracks: &[Track], surveys: &[Survey]) -> (f64, f64, f64) {
    let u_tr = 0.5 * tracks.iter().map(|t| t.goal_rate).sum::<f64>();
    let u_sv = surveys
        .iter()
        .map(|s| s.goal_rate * survey_weight(&s.band))
        .sum::<f64>();
    (u_tr, u_sv, u_tr + u_sv)
}

fn survey_weight(band: &SingleInterval) -> f64 {
    libm::ceil(band.width() / SURVEY_CONFIG_WIDTH) / 8.0
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform on `(0, 1]`.
fn unit_open_closed(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Scales `raw` so that `Σ w_i g_i = target` with every `g_i ≤ 1`. Rates
/// that would exceed 1 are pinned there and the rest rescaled until nothing
/// else overflows.
pub fn rescale_with_cap(raw: &[f64], weights: &[f64], target: f64) -> Result<Vec<f64>> {
    let capacity: f64 = weights.iter().sum();
    if target > capacity * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter("utilization exceeds what goal rates of 1 give"));
    }
    let mut pinned = vec![false; raw.len()];
    loop {
        let fixed: f64 = weights.iter().zip(&pinned).filter(|(_, &p)| p).map(|(w, _)| w).sum();
        let free: f64 = raw
            .iter()
            .zip(weights)
            .zip(&pinned)
            .filter(|(_, &p)| !p)
            .map(|((a, w), _)| a * w)
            .sum();
        let scale = if free > 0.0 { ((target - fixed) / free).max(0.0) } else { 0.0 };
        let mut changed = false;
        for (p, &a) in pinned.iter_mut().zip(raw) {
            if !*p && a * scale > 1.0 {
                *p = true;
                changed = true;
            }
        }
        if !changed {
            return Ok(raw
                .iter()
                .zip(&pinned)
                .map(|(&a, &p)| if p { 1.0 } else { a * scale })
                .collect());
        }
    }
}

/// Draws one instance for the standard system.
pub fn generate_instance(params: &ScenarioParams) -> Result<Instance> {
    params.validate()?;
    let domain = params.domain;
    let (w_lo, w_hi) = params.emitter_width;

    let mut raw_track_goals = Vec::with_capacity(params.track_count);
    let mut emitter_sets = Vec::with_capacity(params.track_count);
    for i in 0..params.track_count {
        let mut rng = stream(params.seed, (1 << 32) + i as u64);
        raw_track_goals.push(unit_open_closed(&mut rng));
        let count = rng.random_range(params.emitters_per_track.0..=params.emitters_per_track.1);
        let mut emitters = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let width = rng.random_range(w_lo..=w_hi);
            let lo = rng.random_range(domain.lo()..=domain.hi() - width);
            let cap = if rng.random_bool(params.bandwidth_cap_prob) {
                params.max_bandwidth
            } else {
                rng.random_range(width..=params.max_bandwidth)
            };
            emitters.push(Emitter::new(SingleInterval::new(lo, lo + width)?, cap)?);
        }
        emitter_sets.push(emitters);
    }

    let mut rng = stream(params.seed, 0);
    let mut cuts: Vec<f64> = (1..params.survey_count)
        .map(|_| rng.random_range(domain.lo()..domain.hi()))
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut bounds = vec![domain.lo()];
    bounds.extend(cuts);
    bounds.push(domain.hi());
    let bands: Vec<SingleInterval> = bounds
        .windows(2)
        .map(|w| SingleInterval::new(w[0], w[1]))
        .collect::<Result<_>>()?;
    let raw_survey_goals: Vec<f64> = (0..params.survey_count)
        .map(|j| unit_open_closed(&mut stream(params.seed, (2 << 32) + j as u64)))
        .collect();

    let u = params.utilization;
    let p = params.track_proportion;
    let track_goals = rescale_with_cap(&raw_track_goals, &vec![0.5; params.track_count], p * u)?;
    let survey_weights: Vec<f64> = bands.iter().map(survey_weight).collect();
    let survey_goals = rescale_with_cap(&raw_survey_goals, &survey_weights, (1.0 - p) * u)?;

    let tracks = emitter_sets
        .into_iter()
        .zip(track_goals)
        .enumerate()
        .map(|(i, (emitters, g))| Track::new(TrackId(i as u32), emitters, g))
        .collect::<Result<_>>()?;
    let surveys = bands
        .into_iter()
        .zip(survey_goals)
        .enumerate()
        .map(|(j, (band, g))| Survey::new(SurveyId(j as u32), band, g))
        .collect::<Result<_>>()?;
    let spec = SystemSpec {
        frequency_domain: domain,
        ..SystemSpec::standard()
    };
    Ok(Instance {
        spec,
        tracks,
        surveys,
        meta: InstanceMeta {
            seed: params.seed,
            utilization: u,
            track_proportion: p,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn si(lo: f64, hi: f64) -> SingleInterval {
        SingleInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn utilization_examples() {
        assert_eq!(expected_utilization(&[], &[]), (0.0, 0.0, 0.0));
        let s = Survey::new(SurveyId(0), si(1000.0, 1350.0), 0.5).unwrap();
        let (_, u_sv, _) = expected_utilization(&[], &[s]);
        assert!((u_sv - 0.125).abs() < 1e-15);
    }

    #[test]
    fn rescale_pins_overflowing_rates() {
        let g = rescale_with_cap(&[1.0, 0.1, 0.1], &[1.0, 1.0, 1.0], 1.6).unwrap();
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 0.3).abs() < 1e-12 && (g[2] - 0.3).abs() < 1e-12);
        assert!(rescale_with_cap(&[0.5, 0.5], &[1.0, 1.0], 2.5).is_err());
    }

    #[test]
    fn same_seed_same_instance() {
        let p = ScenarioParams::new(2.0, 0.5, 42);
        assert_eq!(generate_instance(&p).unwrap(), generate_instance(&p).unwrap());
        let q = ScenarioParams::new(2.0, 0.5, 43);
        assert_ne!(generate_instance(&p).unwrap(), generate_instance(&q).unwrap());
    }

    #[test]
    fn extra_tracks_leave_earlier_ones_unchanged() {
        let mut p = ScenarioParams::new(1.0, 0.5, 9);
        let a = generate_instance(&p).unwrap();
        p.track_count = 60;
        let b = generate_instance(&p).unwrap();
        for (x, y) in a.tracks.iter().zip(&b.tracks) {
            assert_eq!(x.emitters, y.emitters);
        }
    }
}
