//! Seeded random streams and the binomial/multinomial draws the kernels use.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// What a stream is used for; keeps streams of different pipeline stages
/// disjoint under one user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    TestingProbs = 1,
    Loss = 2,
    Policy = 3,
    Perturbation = 4,
    BandInner = 5,
    EndOfTraining = 6,
    Synthetic = 7,
    Test = 8,
}

/// A reproducible random stream: identical `(seed, id)` gives bit-identical
/// draws. Streams with different ids are independent ChaCha8 streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id);
        RngStream { seed, id, rng }
    }

    /// Stream id packed as `purpose:8 | major:24 | minor:32`.
    pub fn for_purpose(seed: u64, purpose: Purpose, major: u32, minor: u32) -> Self {
        debug_assert!(major < (1 << 24));
        let id = ((purpose as u64) << 56) | (((major as u64) & 0xFF_FFFF) << 32) | minor as u64;
        RngStream::new(seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn id(&self) -> u64 {
        self.id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Exact binomial draw. Degenerate arguments short-circuit without consuming
/// randomness.
pub fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    debug_assert!((0.0..=1.0).contains(&p), "binomial p out of range: {p}");
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p checked above").sample(rng)
}

/// Two-outcome multinomial `(X1, X2) ~ Mult(n; p1, p2)` (the remainder stays
/// put), drawn as `X1 ~ Bin(n, p1)` then `X2 ~ Bin(n - X1, p2 / (1 - p1))`.
pub fn multinomial2<R: Rng + ?Sized>(rng: &mut R, n: u64, p1: f64, p2: f64) -> (u64, u64) {
    debug_assert!(p1 + p2 <= 1.0 + 1e-12);
    let x1 = binomial(rng, n, p1);
    let rest = n - x1;
    let x2 = if p1 >= 1.0 {
        0
    } else {
        binomial(rng, rest, (p2 / (1.0 - p1)).clamp(0.0, 1.0))
    };
    (x1, x2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_id_repeat() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut c = RngStream::new(7, 4);
        assert_ne!(xs[0], c.next_u64());
    }

    #[test]
    fn purposes_do_not_collide() {
        let a = RngStream::for_purpose(1, Purpose::Loss, 0, 5);
        let b = RngStream::for_purpose(1, Purpose::Policy, 0, 5);
        let c = RngStream::for_purpose(1, Purpose::Loss, 1, 5);
        assert_ne!(a.id(), b.id());
        assert_ne!(a.id(), c.id());
    }

    #[test]
    fn degenerate_binomials() {
        let mut rng = RngStream::new(0, 0);
        assert_eq!(binomial(&mut rng, 0, 0.3), 0);
        assert_eq!(binomial(&mut rng, 50, 0.0), 0);
        assert_eq!(binomial(&mut rng, 50, 1.0), 50);
        assert_eq!(multinomial2(&mut rng, 40, 1.0, 0.0), (40, 0));
        assert_eq!(multinomial2(&mut rng, 40, 0.0, 1.0), (0, 40));
        assert_eq!(multinomial2(&mut rng, 40, 0.0, 0.0), (0, 0));
    }

    #[test]
    fn multinomial_never_exceeds_n() {
        let mut rng = RngStream::new(11, 0);
        for n in [0u64, 1, 7, 1000, 1_000_000] {
            for _ in 0..50 {
                let (a, b) = multinomial2(&mut rng, n, 0.3, 0.7);
                assert!(a + b <= n);
            }
        }
    }
}
