//! Seedable multiply-with-carry generator and the variates built on it.
//!
//! The generator is the lag-1 MWC with 64-bit words and multiplier
//! `0xffebb71d94fcdaf9` (Vigna's MWC128). Its state is a 64-bit word `x`
//! plus a carry `c`, the recurrence is `t = A * x + c; x = t mod 2^64;
//! c = t >> 64`, and the period is `(A * 2^64 - 1) / 2`, about `2^127`.
//!
//! Seeds are expanded into `(x, c)` with SplitMix64. Independent streams
//! for workers and tasks are derived with [`RngState::derive`].

use crate::error::{Result, SernError};

/// Stream domains passed to [`RngState::derive`].
pub mod streams {
    pub const NODE_ALLOCATION: u64 = 1;
    pub const NODE_FILL: u64 = 2;
    pub const EDGE_TASK: u64 = 3;
    pub const EDGE_SEQUENTIAL: u64 = 4;
    pub const CAPACITY_PILOT: u64 = 5;
}

const MWC_A: u64 = 0xffeb_b71d_94fc_daf9;
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const UNIT_53: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic per-worker random source.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    x: u64,
    carry: u64,
    draws: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let x = splitmix64(&mut sm);
        // The carry must lie in (0, A - 1).
        let carry = splitmix64(&mut sm) % (MWC_A - 2) + 1;
        RngState {
            seed,
            x,
            carry,
            draws: 0,
        }
    }

    /// Stream `index` of `domain` under `master`.
    ///
    /// The mixing is `seed = splitmix(splitmix(master ^ domain * G) ^ index * G)`
    /// with `G` the 64-bit golden ratio constant; it is part of the
    /// reproducibility contract.
    pub fn derive(master: u64, domain: u64, index: u64) -> Self {
        let mut s = master ^ domain.wrapping_mul(GOLDEN);
        let mut s = splitmix64(&mut s) ^ index.wrapping_mul(GOLDEN);
        RngState::new(splitmix64(&mut s))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 64-bit words drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        let out = self.x;
        let t = (MWC_A as u128) * (self.x as u128) + self.carry as u128;
        self.x = t as u64;
        self.carry = (t >> 64) as u64;
        self.draws += 1;
        out
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline(always)]
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * UNIT_53
    }

    /// Uniform on `(0, 1]`. Used for acceptance tests (`r <= p` accepts with
    /// probability exactly `p`) and for logarithms.
    #[inline(always)]
    pub fn next_open_closed(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * UNIT_53
    }

    /// Number of failures before the first success of Bernoulli(`p`) trials.
    pub fn geometric_skip(&mut self, p: f64) -> Result<u64> {
        Ok(GeometricSkip::new(p)?.sample(self))
    }

    /// Exact Binomial(`n`, `p`) variate.
    pub fn binomial(&mut self, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        if p > 0.5 {
            return n - self.binomial(n, 1.0 - p);
        }
        if (n as f64) * p < 16.0 {
            self.binomial_inversion(n, p)
        } else {
            self.binomial_waiting_time(n, p)
        }
    }

    // Sequential search from zero; cost proportional to the mean.
    fn binomial_inversion(&mut self, n: u64, p: f64) -> u64 {
        let ratio = p / (1.0 - p);
        let f0 = ((n as f64) * (-p).ln_1p()).exp();
        'retry: loop {
            let mut u = self.next_uniform();
            let mut f = f0;
            let mut k = 0u64;
            loop {
                if u < f {
                    return k;
                }
                u -= f;
                k += 1;
                if k > n {
                    // rounding residue; redraw
                    continue 'retry;
                }
                f *= ratio * (n - k + 1) as f64 / k as f64;
            }
        }
    }

    // Count successes among n trials by jumping between them.
    fn binomial_waiting_time(&mut self, n: u64, p: f64) -> u64 {
        let skip = GeometricSkip::new(p).expect("0 < p <= 0.5");
        let mut count = 0;
        let mut pos = skip.sample(self);
        while pos < n {
            count += 1;
            pos = match pos.checked_add(1 + skip.sample(self)) {
                Some(next) => next,
                None => break,
            };
        }
        count
    }

    /// Multinomial(`n`, `probs`) via conditional binomials in index order.
    pub fn multinomial(&mut self, n: u64, probs: &[f64]) -> Result<Vec<u64>> {
        let mut total = 0.0;
        for &p in probs {
            if !p.is_finite() || p < 0.0 {
                return Err(SernError::param(format!(
                    "multinomial probability {p} is not a non-negative real"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(SernError::param(format!(
                "multinomial probabilities sum to {total}, expected 1"
            )));
        }
        let mut counts = vec![0u64; probs.len()];
        let Some(last) = probs.iter().rposition(|&p| p > 0.0) else {
            return Ok(counts);
        };
        let mut remaining = n;
        let mut mass = 1.0;
        for (k, &p) in probs.iter().enumerate().take(last) {
            if remaining == 0 {
                break;
            }
            if p > 0.0 {
                let c = self.binomial(remaining, (p / mass).min(1.0));
                counts[k] = c;
                remaining -= c;
            }
            mass -= p;
        }
        counts[last] = remaining;
        Ok(counts)
    }
}

/// Inverse-transform geometric sampler with `ln(1 - p)` precomputed.
#[derive(Clone, Copy, Debug)]
pub struct GeometricSkip {
    log_fail: f64,
    certain: bool,
}

impl GeometricSkip {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(SernError::param(format!(
                "geometric success probability {p} outside (0, 1]"
            )));
        }
        Ok(GeometricSkip {
            log_fail: (-p).ln_1p(),
            certain: p == 1.0,
        })
    }

    #[inline(always)]
    pub fn sample(&self, rng: &mut RngState) -> u64 {
        if self.certain {
            return 0;
        }
        // float -> int casts saturate, so vanishing p yields u64::MAX
        (rng.next_open_closed().ln() / self.log_fail) as u64
    }
}
