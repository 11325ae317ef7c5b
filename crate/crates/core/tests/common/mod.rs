//! Statistical tests and independent oracles shared by the integration tests.
#![allow(dead_code)]

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete, DiscreteCDF};

#[derive(Clone, Copy, Debug)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: usize,
    pub p: f64,
}

impl std::fmt::Display for TestResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stat={:.3} dof={} p={:.4}", self.statistic, self.dof, self.p)
    }
}

fn chi2_sf(x: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).unwrap().sf(x)
}

/// Merges adjacent bins until each expected count reaches `min_expected`.
pub fn pool(observed: &[f64], expected: &[f64], min_expected: f64) -> (Vec<f64>, Vec<f64>) {
    let mut o = Vec::new();
    let mut e = Vec::new();
    let (mut ao, mut ae) = (0.0, 0.0);
    for (&x, &y) in observed.iter().zip(expected) {
        ao += x;
        ae += y;
        if ae >= min_expected {
            o.push(ao);
            e.push(ae);
            ao = 0.0;
            ae = 0.0;
        }
    }
    if ae > 0.0 || ao > 0.0 {
        match (o.last_mut(), e.last_mut()) {
            (Some(lo), Some(le)) => {
                *lo += ao;
                *le += ae;
            }
            _ => {
                o.push(ao);
                e.push(ae);
            }
        }
    }
    (o, e)
}

/// Pearson goodness of fit; `expected` must sum to the observed total.
pub fn chi_square_gof(observed: &[u64], expected: &[f64], fitted: usize) -> TestResult {
    let obs: Vec<f64> = observed.iter().map(|&x| x as f64).collect();
    let (o, e) = pool(&obs, expected, 5.0);
    let statistic = o.iter().zip(&e).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = o.len().saturating_sub(1 + fitted);
    TestResult {
        statistic,
        dof,
        p: chi2_sf(statistic, dof),
    }
}

/// Two-sample chi-square for binned counts with possibly unequal totals.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> TestResult {
    let (na, nb): (u64, u64) = (a.iter().sum(), b.iter().sum());
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        ca += x as f64;
        cb += y as f64;
        if ca + cb >= 10.0 {
            bins.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => bins.push((ca, cb)),
        }
    }
    let k1 = (nb as f64 / na as f64).sqrt();
    let k2 = (na as f64 / nb as f64).sqrt();
    let statistic = bins
        .iter()
        .map(|&(x, y)| (k1 * x - k2 * y).powi(2) / (x + y))
        .sum();
    let dof = bins.len().saturating_sub(1);
    TestResult {
        statistic,
        dof,
        p: chi2_sf(statistic, dof),
    }
}

/// Histograms of two integer samples over shared cut points at pooled quantiles.
pub fn quantile_bins(a: &[u64], b: &[u64], bins: usize) -> (Vec<u64>, Vec<u64>) {
    let mut pooled: Vec<u64> = a.iter().chain(b).copied().collect();
    pooled.sort_unstable();
    let mut cuts: Vec<u64> = (1..bins).map(|k| pooled[k * pooled.len() / bins]).collect();
    cuts.dedup();
    let place = |v: u64| cuts.partition_point(|&c| c <= v);
    let mut ha = vec![0u64; cuts.len() + 1];
    let mut hb = vec![0u64; cuts.len() + 1];
    for &v in a {
        ha[place(v)] += 1;
    }
    for &v in b {
        hb[place(v)] += 1;
    }
    (ha, hb)
}

/// Kolmogorov survival function `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> TestResult {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    TestResult {
        statistic: d,
        dof: s.len(),
        p: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d),
    }
}

/// Chi-square fit of integer samples to `Binomial(n, p)`, tails folded into
/// the end bins.
pub fn binomial_gof(samples: &[u64], n: u64, p: f64) -> TestResult {
    let dist = Binomial::new(p, n).unwrap();
    let lo = *samples.iter().min().unwrap();
    let hi = *samples.iter().max().unwrap();
    let total = samples.len() as f64;
    let mut observed = vec![0u64; (hi - lo + 1) as usize];
    for &s in samples {
        observed[(s - lo) as usize] += 1;
    }
    let mut expected: Vec<f64> = (lo..=hi).map(|k| total * dist.pmf(k)).collect();
    if lo > 0 {
        expected[0] += total * dist.cdf(lo - 1);
    }
    *expected.last_mut().unwrap() += total * dist.sf(hi);
    chi_square_gof(&observed, &expected, 0)
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Paired comparison of per-run bin counts: `rows[r][b]` is the difference
/// between two samplers run on the same input. Under equality each column has
/// mean zero and columns are uncorrelated, so the squared column t statistics
/// sum to roughly chi-square with one degree per informative column.
pub fn paired_bin_test(rows: &[Vec<f64>]) -> TestResult {
    let bins = rows.first().map_or(0, Vec::len);
    let mut statistic = 0.0;
    let mut dof = 0;
    for b in 0..bins {
        let column: Vec<f64> = rows.iter().map(|r| r[b]).collect();
        let (mean, se) = mean_se(&column);
        if se > 0.0 {
            statistic += (mean / se).powi(2);
            dof += 1;
        }
    }
    TestResult {
        statistic,
        dof,
        p: chi2_sf(statistic, dof),
    }
}

/// SplitMix64, independent of the generator under test.
pub struct Oracle(u64);

impl Oracle {
    pub fn new(seed: u64) -> Self {
        Oracle(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.uniform() * n as f64) as usize
    }
}

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // x = [a, b], y = [f(a), f(mid), f(b)]
    fn step(f: &dyn Fn(f64) -> f64, x: [f64; 2], y: [f64; 3], whole: f64, tol: f64, depth: u32) -> f64 {
        let ([a, b], [fa, fm, fb]) = (x, y);
        let m = 0.5 * (a + b);
        let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, [a, m], [fa, flm, fm], left, tol / 2.0, depth - 1)
            + step(f, [m, b], [fm, frm, fb], right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    step(f, [a, b], [fa, fm, fb], (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
}

/// Area of the disk of radius `r` at the origin inside `[x0, x1] x [y0, y1]`.
pub fn disk_cell_area(r: f64, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    let a = x0.max(-r);
    let b = x1.min(r);
    if a >= b {
        return 0.0;
    }
    let f = |x: f64| {
        let h = (r * r - x * x).max(0.0).sqrt();
        (y1.min(h) - y0.max(-h)).max(0.0)
    };
    // split where the chord crosses the cell's horizontal edges
    let mut cuts = vec![a, b];
    for y in [y0, y1] {
        if y.abs() < r {
            let x = (r * r - y * y).sqrt();
            for c in [-x, x] {
                if c > a && c < b {
                    cuts.push(c);
                }
            }
        }
    }
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.windows(2).map(|w| integrate(&f, w[0], w[1], 1e-13)).sum()
}
