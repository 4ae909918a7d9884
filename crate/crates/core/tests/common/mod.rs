//! Seeded corpus of path-space functions with exact gradients and the
//! contexts they are tested against.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syzq_core::syz::{DecayCertificate, PathSpaceFunction, WittenContext};

pub const CORPUS_SEED: u64 = 20_240_611;

/// `amp · e^{−γ|m−m₀|²} · e^{−β|ξ−c|²} · e^{i⟨k,ξ⟩}`.
#[derive(Debug, Clone)]
pub struct Bump {
    pub amp: f64,
    pub gamma: f64,
    pub beta: f64,
    pub center: Vec<f64>,
    pub wave: Vec<f64>,
    pub mode: Vec<i64>,
}

impl Bump {
    pub fn value(&self, xi: &[f64], m: &[i64]) -> Complex64 {
        let dm: f64 = m.iter().zip(&self.mode).map(|(a, b)| ((a - b) * (a - b)) as f64).sum();
        let dx: f64 = xi.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        let phase: f64 = xi.iter().zip(&self.wave).map(|(a, b)| a * b).sum();
        Complex64::from_polar(self.amp * (-self.gamma * dm - self.beta * dx).exp(), phase)
    }

    pub fn function(&self) -> PathSpaceFunction {
        let norm2: f64 = self.mode.iter().map(|&a| (a * a) as f64).sum();
        // |m|² ≤ 2|m−m₀|² + 2|m₀|² gives the envelope at rate γ/2.
        let cert = DecayCertificate::new(self.amp * (self.gamma * norm2).exp(), self.gamma / 2.0);
        let (v, g) = (self.clone(), self.clone());
        PathSpaceFunction::new(self.center.len(), cert, move |xi, m| v.value(xi, m)).with_gradient(move |xi, m| {
            let f = g.value(xi, m);
            xi.iter()
                .zip(&g.center)
                .zip(&g.wave)
                .map(|((x, c), k)| f * Complex64::new(-2.0 * g.beta * (x - c), *k))
                .collect()
        })
    }
}

pub struct CorpusEntry {
    pub name: String,
    pub bump: Bump,
    pub context: WittenContext,
}

fn bump(rng: &mut ChaCha8Rng, dim: usize) -> Bump {
    Bump {
        amp: rng.random_range(0.5..2.0),
        gamma: rng.random_range(0.6..1.2),
        beta: rng.random_range(0.5..2.0),
        center: (0..dim).map(|_| rng.random_range(0.2..0.8)).collect(),
        wave: (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect(),
        mode: (0..dim).map(|_| rng.random_range(-2..=2)).collect(),
    }
}

/// Three one-dimensional and two two-dimensional entries.
pub fn corpus() -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::new();
    for i in 0..3 {
        let slope = 0.5 + i as f64 * 0.25;
        out.push(CorpusEntry {
            name: format!("line-{i}"),
            bump: bump(&mut rng, 1),
            context: WittenContext::new(1, 1.0, move |x| vec![slope * x[0] + 0.1]),
        });
    }
    let period = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.8]);
    for i in 0..2 {
        let hbar = 0.7 + 0.3 * i as f64;
        out.push(CorpusEntry {
            name: format!("plane-{i}"),
            bump: bump(&mut rng, 2),
            context: WittenContext::with_period(period.clone(), hbar, |x| {
                vec![0.5 * x[0] + 0.1, 0.2 * x[0] + 0.4 * x[1] - 0.2]
            })
            .unwrap(),
        });
    }
    out
}
