//! Deterministic pseudo-random sources.
//!
//! Two generators drive every random choice in the cipher:
//!
//! * [`Xs1024State`], a Xorshift1024* generator, picks swap indices and the
//!   substitution table for the pixel layer.
//! * [`TlcgState`], three independent linear congruential streams summed and
//!   reduced to a range, picks the lattice basis and seeds the factorization.
//!
//! Neither is suitable where cryptographic-strength randomness is required.
//! Both are plain values: clone one to replay a stream.

use std::num::ParseIntError;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrngError {
    #[error("seed expansion produced an all-zero xorshift state")]
    AllZeroState,
    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: i64, hi: i64 },
    #[error("invalid LCG parameters: {0}")]
    InvalidLcgParams(&'static str),
    #[error("bias probabilities must lie in [0, 1], got mu={mu}, nu={nu}")]
    InvalidBias { mu: f64, nu: f64 },
    #[error("invalid seed {text:?}: {source}")]
    InvalidSeed {
        text: String,
        #[source]
        source: ParseIntError,
    },
}

/// Multiplier applied to the state word on output.
pub const XS1024_MULTIPLIER: u64 = 0x1066_89D4_5497_FDB5;

/// Multiplier of the 64-bit LCG used to expand a single seed into 16 words.
pub const SEED_EXPANSION_MULTIPLIER: u64 = 6_364_136_223_846_793_005;
/// Increment of the seed-expansion LCG.
pub const SEED_EXPANSION_INCREMENT: u64 = 1_442_695_040_888_963_407;

/// Parses a 64-bit seed written in decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(text: &str) -> Result<u64, PrngError> {
    let trimmed = text.trim();
    let parsed = match trimmed
        .strip_prefix("0x")
        .or_else(|| trimmed.strip_prefix("0X"))
    {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => trimmed.parse::<u64>(),
    };
    parsed.map_err(|source| PrngError::InvalidSeed {
        text: text.to_owned(),
        source,
    })
}

/// State of a Xorshift1024* generator: sixteen 64-bit words and a rotating
/// index. The all-zero state is rejected because it is absorbing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xs1024State {
    s: [u64; 16],
    p: usize,
}

impl Xs1024State {
    /// Expands `seed` into 16 words by iterating
    /// `x <- a*x + c (mod 2^64)` with the fixed expansion constants.
    pub fn from_seed(seed: u64) -> Result<Self, PrngError> {
        let mut s = [0u64; 16];
        let mut x = seed;
        for word in s.iter_mut() {
            x = x
                .wrapping_mul(SEED_EXPANSION_MULTIPLIER)
                .wrapping_add(SEED_EXPANSION_INCREMENT);
            *word = x;
        }
        Self::from_words(s, 0)
    }

    pub fn from_words(s: [u64; 16], p: usize) -> Result<Self, PrngError> {
        if s.iter().all(|&w| w == 0) {
            return Err(PrngError::AllZeroState);
        }
        Ok(Self { s, p: p & 15 })
    }

    pub fn words(&self) -> &[u64; 16] {
        &self.s
    }

    pub fn index(&self) -> usize {
        self.p
    }

    pub fn next_u64(&mut self) -> u64 {
        let s0 = self.s[self.p];
        self.p = (self.p + 1) & 15;
        let mut s1 = self.s[self.p];
        s1 ^= s1 << 31;
        self.s[self.p] = s1 ^ s0 ^ (s1 >> 11) ^ (s0 >> 30);
        self.s[self.p].wrapping_mul(XS1024_MULTIPLIER)
    }

    /// Draws a value in the closed range `[lo, hi]` as
    /// `lo + next_u64() mod (hi - lo + 1)`. Plain modulo: the bias is at most
    /// `span / 2^64` and is accepted for reproducibility.
    pub fn next_in_range(&mut self, lo: i64, hi: i64) -> Result<i64, PrngError> {
        if lo > hi {
            return Err(PrngError::InvalidRange { lo, hi });
        }
        let span = (hi as i128 - lo as i128 + 1) as u128;
        let raw = self.next_u64() as u128;
        Ok((lo as i128 + (raw % span) as i128) as i64)
    }

    /// Convenience wrapper for index draws in `[0, upper]`.
    pub fn next_index(&mut self, upper: usize) -> usize {
        let span = upper as u128 + 1;
        (self.next_u64() as u128 % span) as usize
    }

    /// Uniform double in `[0, 1)` from the top 53 bits of one output.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Parameters of one linear congruential stream `x <- (a*x + c) mod m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LcgParams {
    pub modulus: u64,
    pub multiplier: u64,
    pub increment: u64,
}

impl LcgParams {
    pub fn new(modulus: u64, multiplier: u64, increment: u64) -> Result<Self, PrngError> {
        if modulus == 0 {
            return Err(PrngError::InvalidLcgParams("modulus must be > 0"));
        }
        if multiplier == 0 || multiplier >= modulus {
            return Err(PrngError::InvalidLcgParams("multiplier must lie in (0, m)"));
        }
        if increment >= modulus {
            return Err(PrngError::InvalidLcgParams("increment must lie in [0, m)"));
        }
        Ok(Self {
            modulus,
            multiplier,
            increment,
        })
    }
}

/// One step of the recurrence, computed with 128-bit intermediates.
pub fn lcg_next(params: &LcgParams, x: u64) -> u64 {
    let next =
        (params.multiplier as u128 * x as u128 + params.increment as u128) % params.modulus as u128;
    next as u64
}

/// A single LCG stream: parameters plus its current seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lcg {
    params: LcgParams,
    seed: u64,
}

impl Lcg {
    pub fn new(params: LcgParams, seed: u64) -> Result<Self, PrngError> {
        if seed >= params.modulus {
            return Err(PrngError::InvalidLcgParams("seed must lie in [0, m)"));
        }
        Ok(Self { params, seed })
    }

    pub fn params(&self) -> &LcgParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_value(&mut self) -> u64 {
        self.seed = lcg_next(&self.params, self.seed);
        self.seed
    }
}

/// 2^31 - 1, shared modulus of the default streams.
pub const TLCG_DEFAULT_MODULUS: u64 = 2_147_483_647;

/// Default per-stream parameters. The multipliers are primitive roots of
/// 2^31 - 1, so every stream has period m - 1 off its fixed point.
pub const TLCG_DEFAULT_PARAMS: [LcgParams; 3] = [
    LcgParams {
        modulus: TLCG_DEFAULT_MODULUS,
        multiplier: 16_807,
        increment: 12_345,
    },
    LcgParams {
        modulus: TLCG_DEFAULT_MODULUS,
        multiplier: 48_271,
        increment: 54_321,
    },
    LcgParams {
        modulus: TLCG_DEFAULT_MODULUS,
        multiplier: 69_621,
        increment: 99_991,
    },
];

/// Offsets that split one master seed into three stream seeds.
pub const TLCG_SEED_OFFSETS: [u64; 3] = [
    0x9E37_79B9_7F4A_7C15,
    0xBF58_476D_1CE4_E5B9,
    0x94D0_49BB_1331_11EB,
];

/// Three independent LCG streams whose outputs are summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TlcgState {
    streams: [Lcg; 3],
}

impl TlcgState {
    pub fn new(streams: [Lcg; 3]) -> Self {
        Self { streams }
    }

    /// Seeds each stream with `(master + offset_k) mod m_k`.
    pub fn from_master_seed(params: [LcgParams; 3], master: u64) -> Self {
        let streams = [0, 1, 2].map(|k| {
            let p = params[k];
            let seed = master.wrapping_add(TLCG_SEED_OFFSETS[k]) % p.modulus;
            Lcg { params: p, seed }
        });
        Self { streams }
    }

    pub fn with_default_params(master: u64) -> Self {
        Self::from_master_seed(TLCG_DEFAULT_PARAMS, master)
    }

    pub fn streams(&self) -> &[Lcg; 3] {
        &self.streams
    }

    /// Advances all three streams once and returns
    /// `((x1 + x2 + x3) mod (max - min)) + min`.
    ///
    /// The range is half-open: the result lies in `[min, max)`, never `max`.
    pub fn next_in(&mut self, min: i64, max: i64) -> Result<i64, PrngError> {
        if max <= min {
            return Err(PrngError::InvalidRange { lo: min, hi: max });
        }
        let range = (max as i128 - min as i128) as u128;
        let sum: u128 = self
            .streams
            .iter_mut()
            .map(|lcg| lcg.next_value() as u128)
            .sum();
        Ok((min as i128 + (sum % range) as i128) as i64)
    }
}

/// Means of two independent random bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitBiasSpec {
    mu: f64,
    nu: f64,
}

impl BitBiasSpec {
    pub fn new(mu: f64, nu: f64) -> Result<Self, PrngError> {
        let valid = |v: f64| (0.0..=1.0).contains(&v);
        if !valid(mu) || !valid(nu) {
            return Err(PrngError::InvalidBias { mu, nu });
        }
        Ok(Self { mu, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Expected value of `X xor Y` for independent bits: `mu + nu - 2 mu nu`.
pub fn xor_bias_expected(spec: BitBiasSpec) -> f64 {
    spec.mu + spec.nu - 2.0 * spec.mu * spec.nu
}

/// Monte Carlo estimate of `E[X xor Y]`, thresholding two generator draws
/// per sample against `mu` and `nu`.
pub fn xor_bias_empirical(spec: BitBiasSpec, samples: u64, rng: &mut Xs1024State) -> f64 {
    assert!(samples >= 1, "xor_bias_empirical needs at least one sample");
    let mut ones = 0u64;
    for _ in 0..samples {
        let x = rng.next_unit() < spec.mu;
        let y = rng.next_unit() < spec.nu;
        ones += u64::from(x ^ y);
    }
    ones as f64 / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: u128 = SEED_EXPANSION_MULTIPLIER as u128;
    const C: u128 = SEED_EXPANSION_INCREMENT as u128;
    const TWO_64: u128 = 1 << 64;

    #[test]
    fn seed_zero_expands_through_the_lcg() {
        let st = Xs1024State::from_seed(0).unwrap();
        assert_eq!(st.words()[0], 1_442_695_040_888_963_407);
        let s1 = (A * st.words()[0] as u128 + C) % TWO_64;
        assert_eq!(st.words()[1] as u128, s1);
        assert_eq!(st.words()[1], 1_876_011_003_808_476_466);
        assert_eq!(st.index(), 0);
    }

    #[test]
    fn all_zero_state_rejected() {
        assert_eq!(
            Xs1024State::from_words([0; 16], 0),
            Err(PrngError::AllZeroState)
        );
    }

    #[test]
    fn hand_stepped_first_output() {
        let mut words = [0u64; 16];
        for (k, w) in words.iter_mut().enumerate() {
            *w = k as u64 + 1;
        }
        let mut st = Xs1024State::from_words(words, 0).unwrap();
        let out = st.next_u64();
        assert_eq!(st.words()[1], 4_297_064_451);
        assert_eq!(st.index(), 1);
        let expected = (4_297_064_451u128 * XS1024_MULTIPLIER as u128) % TWO_64;
        assert_eq!(out as u128, expected);
        assert_eq!(out, 13_859_315_694_294_268_191);
    }

    #[test]
    fn in_range_draws() {
        let mut words = [0u64; 16];
        for (k, w) in words.iter_mut().enumerate() {
            *w = k as u64 + 1;
        }
        let base = Xs1024State::from_words(words, 0).unwrap();

        let mut st = base.clone();
        assert_eq!(st.next_in_range(0, 9).unwrap(), 1);

        let mut st = base.clone();
        assert_eq!(st.next_in_range(5, 5).unwrap(), 5);
        assert_eq!(st.index(), 1, "singleton range still consumes one draw");

        let mut st = base.clone();
        assert_eq!(st.next_in_range(0, 0).unwrap(), 0);

        let mut st = base;
        assert_eq!(
            st.next_in_range(3, 2),
            Err(PrngError::InvalidRange { lo: 3, hi: 2 })
        );
    }

    #[test]
    fn index_advances_mod_16() {
        let mut st = Xs1024State::from_seed(99).unwrap();
        for k in 1..=40 {
            st.next_u64();
            assert_eq!(st.index(), k % 16);
        }
    }

    #[test]
    fn lcg_examples() {
        let p = LcgParams::new(16, 5, 3).unwrap();
        assert_eq!(lcg_next(&p, 7), 6);
        let id = LcgParams::new(1000, 1, 0).unwrap();
        assert_eq!(lcg_next(&id, 123), 123);
        // a = 0 is outside the constructor's contract but the step is still
        // well defined.
        let constant = LcgParams {
            modulus: 10,
            multiplier: 0,
            increment: 9,
        };
        for x in 0..10 {
            assert_eq!(lcg_next(&constant, x), 9);
        }
    }

    #[test]
    fn lcg_param_validation() {
        assert!(LcgParams::new(0, 1, 0).is_err());
        assert!(LcgParams::new(10, 0, 0).is_err());
        assert!(LcgParams::new(10, 10, 0).is_err());
        assert!(LcgParams::new(10, 3, 10).is_err());
        let p = LcgParams::new(10, 3, 1).unwrap();
        assert!(Lcg::new(p, 10).is_err());
    }

    #[test]
    fn lcg_uses_wide_intermediates() {
        let p = LcgParams::new(u64::MAX, u64::MAX - 1, u64::MAX - 2).unwrap();
        let x = u64::MAX - 3;
        let expected =
            ((u64::MAX - 1) as u128 * x as u128 + (u64::MAX - 2) as u128) % u64::MAX as u128;
        assert_eq!(lcg_next(&p, x) as u128, expected);
    }

    fn frozen_streams(values: [u64; 3]) -> TlcgState {
        // a = 1, c = 0 keeps every stream at its seed.
        TlcgState::new(values.map(|v| Lcg::new(LcgParams::new(1000, 1, 0).unwrap(), v).unwrap()))
    }

    #[test]
    fn tlcg_sums_and_reduces() {
        let mut st = frozen_streams([4, 5, 6]);
        assert_eq!(st.next_in(0, 10).unwrap(), 5);
        let mut st = frozen_streams([4, 5, 6]);
        assert_eq!(st.next_in(0, 1).unwrap(), 0);
        let mut st = frozen_streams([4, 5, 6]);
        assert_eq!(st.next_in(7, 8).unwrap(), 7);
        assert!(st.next_in(3, 3).is_err());
        assert!(st.next_in(4, 3).is_err());
    }

    #[test]
    fn tlcg_advances_every_stream_once() {
        let mut st = TlcgState::with_default_params(5);
        let before = *st.streams();
        st.next_in(0, 100).unwrap();
        for (old, new) in before.iter().zip(st.streams()) {
            assert_eq!(new.seed(), lcg_next(old.params(), old.seed()));
        }
    }

    #[test]
    fn tlcg_output_is_half_open() {
        let mut st = TlcgState::with_default_params(11);
        for _ in 0..10_000 {
            let v = st.next_in(-3, 4).unwrap();
            assert!((-3..4).contains(&v));
        }
    }

    #[test]
    fn xor_bias_values() {
        let e = |mu, nu| xor_bias_expected(BitBiasSpec::new(mu, nu).unwrap());
        assert_eq!(e(0.5, 0.5), 0.5);
        assert_eq!(e(0.0, 0.0), 0.0);
        assert!((e(0.3, 0.8) - 0.62).abs() < 1e-15);
        assert!(BitBiasSpec::new(1.1, 0.0).is_err());
        assert!(BitBiasSpec::new(0.0, -0.1).is_err());
    }

    #[test]
    fn xor_bias_distance_from_half_peaks_at_extremes() {
        let mus: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        let dist = |mu: f64| (xor_bias_expected(BitBiasSpec::new(mu, mu).unwrap()) - 0.5).abs();
        let best = mus
            .iter()
            .copied()
            .max_by(|a, b| dist(*a).partial_cmp(&dist(*b)).unwrap())
            .unwrap();
        let farthest = mus.iter().map(|m| (m - 0.5).abs()).fold(0.0f64, f64::max);
        assert!(((best - 0.5).abs() - farthest).abs() < 1e-12);
    }

    #[test]
    fn xor_bias_degenerate_bits() {
        let mut rng = Xs1024State::from_seed(1).unwrap();
        let spec = BitBiasSpec::new(1.0, 1.0).unwrap();
        assert_eq!(xor_bias_empirical(spec, 1000, &mut rng), 0.0);
        let spec = BitBiasSpec::new(1.0, 0.0).unwrap();
        assert_eq!(xor_bias_empirical(spec, 1000, &mut rng), 1.0);
    }

    #[test]
    fn seed_parsing() {
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert_eq!(parse_seed("0x2A").unwrap(), 42);
        assert_eq!(parse_seed("0XfF").unwrap(), 255);
        assert_eq!(parse_seed("18446744073709551615").unwrap(), u64::MAX);
        assert!(parse_seed("-1").is_err());
        assert!(parse_seed("0x").is_err());
        assert!(parse_seed("ten").is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn deterministic_streams(seed in any::<u64>()) {
                let mut a = Xs1024State::from_seed(seed).unwrap();
                let mut b = Xs1024State::from_seed(seed).unwrap();
                for _ in 0..64 {
                    prop_assert_eq!(a.next_u64(), b.next_u64());
                }
                let mut t1 = TlcgState::with_default_params(seed);
                let mut t2 = TlcgState::with_default_params(seed);
                for _ in 0..64 {
                    prop_assert_eq!(t1.next_in(-50, 50).unwrap(), t2.next_in(-50, 50).unwrap());
                }
            }

            #[test]
            fn xor_bias_symmetry(mu in 0.0f64..=1.0, nu in 0.0f64..=1.0) {
                let a = xor_bias_expected(BitBiasSpec::new(mu, nu).unwrap());
                let b = xor_bias_expected(BitBiasSpec::new(nu, mu).unwrap());
                prop_assert_eq!(a, b);
                let same = xor_bias_expected(BitBiasSpec::new(mu, mu).unwrap());
                prop_assert!((same - 2.0 * mu * (1.0 - mu)).abs() < 1e-12);
                let centered = 0.5 - 2.0 * (mu - 0.5) * (nu - 0.5);
                prop_assert!((a - centered).abs() < 1e-12);
            }

            #[test]
            fn range_draws_stay_in_bounds(seed in any::<u64>(), lo in -1000i64..1000, span in 0i64..1000) {
                let mut st = Xs1024State::from_seed(seed).unwrap();
                for _ in 0..16 {
                    let v = st.next_in_range(lo, lo + span).unwrap();
                    prop_assert!(v >= lo && v <= lo + span);
                }
            }
        }
    }
}
