//! Flat pair-index decoders.

#[inline(always)]
fn isqrt(v: u128) -> u128 {
    let mut s = (v as f64).sqrt() as u128;
    while s * s > v {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= v {
        s += 1;
    }
    s
}

/// Index `k` in `[0, c(c-1)/2)` to local ids `(i, j)`, `i < j`.
///
/// `j = 1 + (floor(sqrt(8k + 1)) - 1) / 2` and `i = k - j(j - 1)/2`, so pairs
/// are ordered by `j` and then by `i`.
#[inline(always)]
pub fn decode_pair_same(k: u64) -> (u64, u64) {
    let root = isqrt(8 * k as u128 + 1) as u64;
    let j = 1 + (root - 1) / 2;
    let i = k - j * (j - 1) / 2;
    (i, j)
}

/// Index `k` in `[0, c_first * c_second)` to `(i, j)` with `i` local to the
/// first bucket and `j` local to the second.
#[inline(always)]
pub fn decode_pair_cross(k: u64, c_first: u64) -> (u64, u64) {
    (k % c_first, k / c_first)
}

/// Task index `t` in `[0, m(m+1)/2)` to `(a, b)`, `a <= b < m`, in row-major order.
pub fn decode_upper_triangle(t: u64, m: u64) -> (u64, u64) {
    let total = m * (m + 1) / 2;
    let (i, j) = decode_pair_same(total - 1 - t);
    (m - j, m - 1 - i)
}
