#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use gvl::locus::{basis_vectors, degeneracy_metric};
use gvl::waveform::{evaluate, ScenarioSegment};
use rand::Rng;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

pub fn unbalanced_segment() -> ScenarioSegment {
    ScenarioSegment::new(
        0.0,
        [0.7, 1.0, 0.4],
        [-7.0 * PI / 18.0, -PI / 18.0, -PI / 2.0],
    )
    .unwrap()
}

pub fn random_segment<R: Rng>(rng: &mut R) -> ScenarioSegment {
    let amps = [0; 3].map(|_| rng.random_range(0.1..1.5));
    let phases = [0; 3].map(|_| rng.random_range(-PI..PI));
    ScenarioSegment::new(0.0, amps, phases).unwrap()
}

/// Random segment whose locus is comfortably far from a line.
pub fn random_nondegenerate_segment<R: Rng>(rng: &mut R) -> ScenarioSegment {
    loop {
        let seg = random_segment(rng);
        let (e1, e2) = basis_vectors(&seg, 0.0);
        if degeneracy_metric(e1, e2) > 1e-2 {
            return seg;
        }
    }
}

pub fn norm_squared(seg: &ScenarioSegment, theta: f64) -> f64 {
    evaluate(seg, theta).iter().map(|x| x * x).sum()
}

/// Brute-force maximizer of `‖v(θ)‖²`.
///
/// `‖v‖²` has period π, so `[0, π)` is scanned on a uniform grid of
/// `points` angles using precomputed `(cos θ, sin θ)` pairs, then the best
/// cell is refined by golden-section search on direct evaluations.
pub struct ArgmaxOracle {
    grid: Vec<(f64, f64)>,
    step: f64,
}

impl ArgmaxOracle {
    pub fn new(points: usize) -> Self {
        let step = PI / points as f64;
        let grid = (0..points)
            .map(|i| {
                let t = i as f64 * step;
                (t.cos(), t.sin())
            })
            .collect();
        Self { grid, step }
    }

    /// Returns `(argmax, min over grid, max over grid)`.
    pub fn argmax(&self, seg: &ScenarioSegment) -> (f64, f64, f64) {
        let amps = seg.amplitudes();
        let phases = seg.total_phases();
        let coeffs: Vec<(f64, f64)> = (0..3)
            .map(|k| (amps[k] * phases[k].cos(), amps[k] * phases[k].sin()))
            .collect();
        let (mut best_i, mut best, mut worst) = (0, f64::MIN, f64::MAX);
        for (i, &(c, s)) in self.grid.iter().enumerate() {
            let mut sum = 0.0;
            for &(a, b) in &coeffs {
                let v = a * c - b * s;
                sum += v * v;
            }
            if sum > best {
                best = sum;
                best_i = i;
            }
            worst = worst.min(sum);
        }
        let center = best_i as f64 * self.step;
        let (mut lo, mut hi) = (center - self.step, center + self.step);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let m1 = hi - ratio * (hi - lo);
            let m2 = lo + ratio * (hi - lo);
            if norm_squared(seg, m1) < norm_squared(seg, m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        (0.5 * (lo + hi), worst, best)
    }
}

/// Distance between two angles modulo π.
pub fn distance_mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

pub fn peak_to_peak(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (min, max) = xs
        .into_iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)));
    max - min
}
