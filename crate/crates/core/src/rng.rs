//! Deterministic, counter-based random streams.
//!
//! Every consumer derives its own stream from a master seed and a purpose
//! tag, so adding a new consumer never shifts the draws seen by existing
//! ones. The generator is SplitMix64: the state advances by a fixed odd
//! increment and each output is a bijective 64-bit mix of the state, which
//! makes the i-th draw a pure function of `(seed, tag, i)`.

const INCREMENT: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over the tag bytes, used to fold a purpose tag into a seed.
fn tag_hash(tag: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Combines a master seed and a purpose tag into a stream seed.
pub fn stream_seed(master: u64, tag: &str) -> u64 {
    mix64(master ^ tag_hash(tag))
}

/// A single named random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
}

impl Stream {
    /// Stream for `tag` under `master`. Distinct tags give independent streams.
    pub fn new(master: u64, tag: &str) -> Self {
        Stream {
            state: stream_seed(master, tag),
        }
    }

    /// Stream from a raw 64-bit seed, e.g. one produced by [`stream_seed`].
    pub fn from_seed(seed: u64) -> Self {
        Stream { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(INCREMENT);
        mix64(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`, unbiased via rejection.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) is undefined");
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal draw (Box-Muller, cosine branch only).
    pub fn normal(&mut self) -> f64 {
        loop {
            let u1 = self.next_f64();
            if u1 > 0.0 {
                let u2 = self.next_f64();
                let r = (-2.0 * u1.ln()).sqrt();
                return r * (std::f64::consts::TAU * u2).cos();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = Stream::new(7, "test");
        let mut b = Stream::new(7, "test");
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn tags_separate_streams() {
        let mut a = Stream::new(7, "alpha");
        let mut b = Stream::new(7, "beta");
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_stays_in_range() {
        let mut s = Stream::new(0, "range");
        for _ in 0..10_000 {
            let v = s.uniform(0.5, 1.5);
            assert!((0.5..1.5).contains(&v));
        }
    }

    #[test]
    fn below_stays_in_range() {
        let mut s = Stream::new(0, "below");
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[s.below(7)] = true;
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn normal_moments_are_sane() {
        let mut s = Stream::new(42, "normal");
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| s.normal()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }
}
