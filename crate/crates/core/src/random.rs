//! Seeded random generation of test elements.
//!
//! Every random draw in the crate comes from [`Rng`], a ChaCha8 stream
//! generator keyed by a 64-bit seed. Independent sub-streams are obtained with
//! [`Rng::stream`], which selects one of ChaCha's 2⁶⁴ streams, so work split
//! across commands or checks never shares state and results depend only on
//! `(seed, stream id)`.

use num_complex::Complex64;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{BundleRef, Section};
use crate::fiber::{FiberElement, FiberKind};
use crate::measure::{EFunction, PartitionOfUnity, SpaceRef};

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::stream_of(seed, 0)
    }

    fn stream_of(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    /// Independent generator for sub-task `id` under the same seed.
    pub fn stream(&self, id: u64) -> Self {
        Self::stream_of(self.seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.gen_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.inner.gen_bool(0.5)
    }

    /// Real and imaginary parts uniform in `[-1, 1)`.
    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }

    pub fn fiber_element(&mut self, kind: FiberKind) -> FiberElement {
        let data = (0..kind.storage_len()).map(|_| self.complex()).collect();
        FiberElement::new(kind, data).expect("storage length matches kind")
    }

    pub fn efunction(&mut self, space: &SpaceRef) -> EFunction {
        EFunction::from_fn(space, |_| self.complex())
    }

    /// Real-valued function with values in `[lo, hi)`.
    pub fn real_efunction(&mut self, space: &SpaceRef, lo: f64, hi: f64) -> EFunction {
        EFunction::from_real_fn(space, |_| self.uniform(lo, hi))
    }

    pub fn section(&mut self, bundle: &BundleRef) -> Section {
        let values = bundle
            .fibers()
            .iter()
            .map(|&k| self.fiber_element(k))
            .collect();
        Section::new(bundle, values).expect("values follow the bundle descriptors")
    }

    /// Random section rescaled atomwise so that `‖x‖(ω) = radius(ω)`.
    pub fn section_with_norm(&mut self, bundle: &BundleRef, radius: &[f64]) -> Section {
        let values = bundle
            .fibers()
            .iter()
            .zip(radius)
            .map(|(&k, &r)| loop {
                let v = self.fiber_element(k);
                let n = v.norm();
                if n > 1e-3 {
                    break v.scale(Complex64::new(r / n, 0.0));
                }
            })
            .collect();
        Section::new(bundle, values).expect("values follow the bundle descriptors")
    }

    /// Partition into at most `max_parts` parts by random labels.
    pub fn partition(&mut self, space: &SpaceRef, max_parts: usize) -> PartitionOfUnity {
        let count = 1 + self.index(max_parts.max(1));
        let labels: Vec<usize> = (0..space.len()).map(|_| self.index(count)).collect();
        PartitionOfUnity::from_labels(space, &labels, count).expect("labels in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let base = Rng::new(7);
        let mut a = base.stream(3);
        let mut b = base.stream(3);
        let mut c = base.stream(4);
        let xa: Vec<f64> = (0..5).map(|_| a.uniform(0.0, 1.0)).collect();
        let xb: Vec<f64> = (0..5).map(|_| b.uniform(0.0, 1.0)).collect();
        let xc: Vec<f64> = (0..5).map(|_| c.uniform(0.0, 1.0)).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }
}
