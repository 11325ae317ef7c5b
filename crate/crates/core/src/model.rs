//! Distance metrics, link-probability (distance deterrence) functions and
//! the per-offset upper-bound table used by the bucket algorithm.

use std::fmt;
use std::sync::Arc;

use log::warn;

use crate::error::{Result, SernError};
use crate::geometry::{BucketGrid, Rect, Region};

pub type DistanceFn = dyn Fn([f64; 2], [f64; 2]) -> f64 + Send + Sync;
pub type ProbabilityFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum Metric {
    Euclidean,
    Manhattan,
    /// Number of coordinates that differ.
    Discrete,
    Max,
    /// Caller-supplied distance. The bucket bound treats every cell pair as
    /// potentially touching.
    Custom(Arc<DistanceFn>),
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Metric {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "l2" | "euclidean" => Ok(Metric::Euclidean),
            "l1" | "manhattan" => Ok(Metric::Manhattan),
            "l0" | "discrete" => Ok(Metric::Discrete),
            "linf" | "max" => Ok(Metric::Max),
            other => Err(SernError::param(format!("unknown metric '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Euclidean => "l2",
            Metric::Manhattan => "l1",
            Metric::Discrete => "l0",
            Metric::Max => "linf",
            Metric::Custom(_) => "custom",
        }
    }

    #[inline(always)]
    pub fn distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let dx = (a[0] - b[0]).abs();
        let dy = (a[1] - b[1]).abs();
        match self {
            Metric::Euclidean => dx.hypot(dy),
            Metric::Manhattan => dx + dy,
            Metric::Discrete => (dx != 0.0) as u8 as f64 + (dy != 0.0) as u8 as f64,
            Metric::Max => dx.max(dy),
            Metric::Custom(f) => f(a, b),
        }
    }

    /// Distance between the closest points of two cells separated by
    /// per-axis gaps `gx`, `gy`.
    pub fn gap_distance(&self, gx: f64, gy: f64) -> f64 {
        match self {
            Metric::Euclidean => gx.hypot(gy),
            Metric::Manhattan => gx + gy,
            Metric::Discrete => (gx > 0.0) as u8 as f64 + (gy > 0.0) as u8 as f64,
            Metric::Max => gx.max(gy),
            Metric::Custom(_) => 0.0,
        }
    }

    /// Distance spanned by per-axis extents `sx`, `sy`.
    pub fn span_distance(&self, sx: f64, sy: f64) -> f64 {
        match self {
            Metric::Euclidean => sx.hypot(sy),
            Metric::Manhattan => sx + sy,
            Metric::Discrete => 2.0,
            Metric::Max => sx.max(sy),
            Metric::Custom(_) => f64::INFINITY,
        }
    }

    /// Longest possible link `L` inside `bounds`.
    pub fn diameter(&self, bounds: &Rect) -> f64 {
        match self {
            Metric::Custom(f) => {
                let c = bounds.corners();
                f(c[0], c[2]).max(f(c[1], c[3]))
            }
            _ => self.span_distance(bounds.width(), bounds.height()),
        }
    }
}

/// Link-probability parameters shared by the named models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub q: f64,
    pub s: f64,
    pub r: Option<f64>,
    pub theta1: f64,
    pub theta2: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            q: 1.0,
            s: 0.0,
            r: None,
            theta1: 1.0,
            theta2: 1.0,
        }
    }
}

#[derive(Clone)]
pub enum Deterrence {
    /// `q exp(-s d)`
    Waxman { q: f64, s: f64 },
    /// `min(q exp(-s d), 1)`
    ClippedWaxman { q: f64, s: f64 },
    /// `q exp(-s d) H(r - d)`
    WaxmanThreshold { q: f64, s: f64, r: f64 },
    /// `q H(r - d)`
    Threshold { q: f64, r: f64 },
    /// `q`
    Ger { q: f64 },
    /// `q (1 + theta1 d)^(-theta2)`
    PowerLaw { q: f64, theta1: f64, theta2: f64 },
    /// `q / (1 + theta1 d^2)`
    Cauchy { q: f64, theta1: f64 },
    /// `q exp(-d) / (L - d)`, clamped to `[0, 1]` and zero for `d >= L`
    Exponential { q: f64 },
    /// `q exp(-s d) / (1 + q exp(-s d))`
    MaxEntropy { q: f64, s: f64 },
    Custom(Arc<ProbabilityFn>),
}

impl fmt::Debug for Deterrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deterrence::Waxman { q, s } => write!(f, "waxman(q={q}, s={s})"),
            Deterrence::ClippedWaxman { q, s } => write!(f, "clipped-waxman(q={q}, s={s})"),
            Deterrence::WaxmanThreshold { q, s, r } => {
                write!(f, "waxman-threshold(q={q}, s={s}, r={r})")
            }
            Deterrence::Threshold { q, r } => write!(f, "threshold(q={q}, r={r})"),
            Deterrence::Ger { q } => write!(f, "ger(q={q})"),
            Deterrence::PowerLaw { q, theta1, theta2 } => {
                write!(f, "power-law(q={q}, theta1={theta1}, theta2={theta2})")
            }
            Deterrence::Cauchy { q, theta1 } => write!(f, "cauchy(q={q}, theta1={theta1})"),
            Deterrence::Exponential { q } => write!(f, "exponential(q={q})"),
            Deterrence::MaxEntropy { q, s } => write!(f, "max-entropy(q={q}, s={s})"),
            Deterrence::Custom(_) => f.write_str("custom"),
        }
    }
}

pub const MODEL_NAMES: [&str; 9] = [
    "waxman",
    "clipped-waxman",
    "waxman-threshold",
    "threshold",
    "ger",
    "power-law",
    "cauchy",
    "exponential",
    "max-entropy",
];

impl Deterrence {
    /// Builds a named model; `-` and `_` are interchangeable in names.
    pub fn from_name(name: &str, p: &ModelParams) -> Result<Self> {
        let need_r = || {
            p.r.ok_or_else(|| SernError::param(format!("model '{name}' requires r")))
        };
        let d = match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "waxman" => Deterrence::Waxman { q: p.q, s: p.s },
            "clipped-waxman" => Deterrence::ClippedWaxman { q: p.q, s: p.s },
            "waxman-threshold" => Deterrence::WaxmanThreshold {
                q: p.q,
                s: p.s,
                r: need_r()?,
            },
            "threshold" => Deterrence::Threshold { q: p.q, r: need_r()? },
            "ger" => Deterrence::Ger { q: p.q },
            "power-law" => Deterrence::PowerLaw {
                q: p.q,
                theta1: p.theta1,
                theta2: p.theta2,
            },
            "cauchy" => Deterrence::Cauchy {
                q: p.q,
                theta1: p.theta1,
            },
            "exponential" => Deterrence::Exponential { q: p.q },
            "max-entropy" => Deterrence::MaxEntropy { q: p.q, s: p.s },
            other => {
                return Err(SernError::param(format!(
                    "unknown model '{other}', expected one of {}",
                    MODEL_NAMES.join(", ")
                )))
            }
        };
        d.validate()?;
        Ok(d)
    }

    /// The `q` prefactor, where the model has one.
    pub fn q(&self) -> Option<f64> {
        match *self {
            Deterrence::Waxman { q, .. }
            | Deterrence::ClippedWaxman { q, .. }
            | Deterrence::WaxmanThreshold { q, .. }
            | Deterrence::Threshold { q, .. }
            | Deterrence::Ger { q }
            | Deterrence::PowerLaw { q, .. }
            | Deterrence::Cauchy { q, .. }
            | Deterrence::Exponential { q }
            | Deterrence::MaxEntropy { q, .. } => Some(q),
            Deterrence::Custom(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn unit(name: &str, v: f64) -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(SernError::param(format!("{name} = {v} outside [0, 1]")))
            }
        }
        fn nonneg(name: &str, v: f64) -> Result<()> {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SernError::param(format!("{name} = {v} must be finite and >= 0")))
            }
        }
        match *self {
            Deterrence::Waxman { q, s } => {
                unit("q", q)?;
                nonneg("s", s)
            }
            Deterrence::ClippedWaxman { q, s } | Deterrence::MaxEntropy { q, s } => {
                nonneg("q", q)?;
                nonneg("s", s)
            }
            Deterrence::WaxmanThreshold { q, s, r } => {
                unit("q", q)?;
                nonneg("s", s)?;
                nonneg("r", r)
            }
            Deterrence::Threshold { q, r } => {
                unit("q", q)?;
                nonneg("r", r)
            }
            Deterrence::Ger { q } => unit("q", q),
            Deterrence::PowerLaw { q, theta1, theta2 } => {
                unit("q", q)?;
                nonneg("theta1", theta1)?;
                nonneg("theta2", theta2)
            }
            Deterrence::Cauchy { q, theta1 } => {
                unit("q", q)?;
                nonneg("theta1", theta1)
            }
            Deterrence::Exponential { q } => nonneg("q", q),
            Deterrence::Custom(_) => Ok(()),
        }
    }

    /// `p(d)` for a region whose longest link is `longest`.
    #[inline(always)]
    pub fn probability(&self, d: f64, longest: f64) -> f64 {
        match *self {
            Deterrence::Waxman { q, s } => q * (-s * d).exp(),
            Deterrence::ClippedWaxman { q, s } => (q * (-s * d).exp()).min(1.0),
            Deterrence::WaxmanThreshold { q, s, r } => {
                if d <= r {
                    q * (-s * d).exp()
                } else {
                    0.0
                }
            }
            Deterrence::Threshold { q, r } => {
                if d <= r {
                    q
                } else {
                    0.0
                }
            }
            Deterrence::Ger { q } => q,
            Deterrence::PowerLaw { q, theta1, theta2 } => q * (1.0 + theta1 * d).powf(-theta2),
            Deterrence::Cauchy { q, theta1 } => q / (1.0 + theta1 * d * d),
            Deterrence::Exponential { q } => {
                if d < longest {
                    (q * (-d).exp() / (longest - d)).min(1.0)
                } else {
                    0.0
                }
            }
            Deterrence::MaxEntropy { q, s } => {
                let w = q * (-s * d).exp();
                w / (1.0 + w)
            }
            Deterrence::Custom(ref f) => {
                let p = f(d);
                if p >= 0.0 {
                    p.min(1.0)
                } else {
                    0.0
                }
            }
        }
    }
}

/// How a model's upper bound over a distance interval is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Non-increasing: the bound over `[a, b]` is `p(a)`.
    NonIncreasing,
    /// Falls then rises (the exponential form): the bound is `max(p(a), p(b-))`.
    Valley,
    /// Failed the monotonicity check; only the trivial bound 1 is available.
    Unbounded,
}

const MONOTONE_GRID: usize = 1000;

/// A metric and link-probability function resolved against a region.
#[derive(Clone, Debug)]
pub struct Model {
    metric: Metric,
    deterrence: Deterrence,
    longest: f64,
    bound: BoundKind,
}

impl Model {
    pub fn new(metric: Metric, deterrence: Deterrence, region: &Region) -> Result<Self> {
        let longest = metric.diameter(&region.bounds());
        Model::with_longest(metric, deterrence, longest)
    }

    pub fn with_longest(metric: Metric, deterrence: Deterrence, longest: f64) -> Result<Self> {
        deterrence.validate()?;
        if !(longest > 0.0 && longest.is_finite()) {
            return Err(SernError::param(format!("longest link {longest} must be positive")));
        }
        let mut model = Model {
            metric,
            deterrence,
            longest,
            bound: BoundKind::NonIncreasing,
        };
        model.bound = match model.deterrence {
            Deterrence::Exponential { q } => {
                let step = longest / MONOTONE_GRID as f64;
                let exceeds = (0..MONOTONE_GRID)
                    .any(|k| q * (-(k as f64 * step)).exp() / (longest - k as f64 * step) > 1.0);
                if exceeds {
                    warn!("exponential link probability exceeds 1 on [0, L); clamped to 1");
                }
                BoundKind::Valley
            }
            _ if model.is_non_increasing_on_grid() => BoundKind::NonIncreasing,
            _ => {
                warn!("link probability is not non-increasing on [0, L]");
                BoundKind::Unbounded
            }
        };
        Ok(model)
    }

    /// Checks `p` on a uniform 1000-point grid over `[0, L]`.
    pub fn is_non_increasing_on_grid(&self) -> bool {
        let step = self.longest / (MONOTONE_GRID - 1) as f64;
        let mut prev = self.probability(0.0);
        for k in 1..MONOTONE_GRID {
            let p = self.probability(k as f64 * step);
            if p > prev + 1e-12 {
                return false;
            }
            prev = p;
        }
        true
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn deterrence(&self) -> &Deterrence {
        &self.deterrence
    }

    /// Longest possible link `L`.
    pub fn longest(&self) -> f64 {
        self.longest
    }

    pub fn bound_kind(&self) -> BoundKind {
        self.bound
    }

    #[inline(always)]
    pub fn distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        self.metric.distance(a, b)
    }

    #[inline(always)]
    pub fn probability(&self, d: f64) -> f64 {
        self.deterrence.probability(d, self.longest)
    }

    /// Upper bound of `p` over realizable distances in `[dmin, dmax]`.
    pub fn upper_bound(&self, dmin: f64, dmax: f64) -> f64 {
        match self.bound {
            BoundKind::NonIncreasing => self.probability(dmin),
            BoundKind::Valley => {
                let far = if dmax >= self.longest {
                    // p(d) climbs to its clamp as d -> L
                    self.probability(self.longest * (1.0 - f64::EPSILON))
                } else {
                    self.probability(dmax)
                };
                self.probability(dmin).max(far)
            }
            BoundKind::Unbounded => 1.0,
        }
    }

    /// `sup p` over `[0, L]`.
    pub fn max_probability(&self) -> f64 {
        self.upper_bound(0.0, self.longest)
    }
}

/// Upper bounds `Q[a][b]` on the link probability between buckets that are
/// `a` columns and `b` rows apart.
#[derive(Clone, Debug)]
pub struct QTable {
    cols: usize,
    rows: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn build(model: &Model, grid: &BucketGrid) -> Self {
        let (cols, rows) = (grid.cols(), grid.rows());
        // absorbs rounding between cell bounds and stored coordinates
        let o = grid.origin();
        let slack = 1e-12 * (o[0].abs() + o[1].abs() + grid.side() * (cols + rows) as f64);
        let mut values = Vec::with_capacity(cols * rows);
        for b in 0..rows {
            for a in 0..cols {
                let dmin = (grid.min_bucket_distance(a, b, model.metric()) - slack).max(0.0);
                let dmax = grid.max_bucket_distance(a, b, model.metric()) + slack;
                values.push(model.upper_bound(dmin, dmax).clamp(0.0, 1.0));
            }
        }
        QTable { cols, rows, values }
    }

    /// `Q` for column offset `a` and row offset `b`.
    #[inline(always)]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[b * self.cols + a]
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn heap_bytes(&self) -> usize {
        self.values.capacity() * 8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_model(d: Deterrence) -> Model {
        Model::new(Metric::Euclidean, d, &Region::unit_square()).unwrap()
    }

    #[test]
    fn metric_examples() {
        let (a, b) = ([0.0, 0.0], [3.0, 4.0]);
        assert_eq!(Metric::Euclidean.distance(a, b), 5.0);
        assert_eq!(Metric::Manhattan.distance(a, b), 7.0);
        assert_eq!(Metric::Max.distance(a, b), 4.0);
        assert_eq!(Metric::Discrete.distance(a, b), 2.0);
        assert_eq!(Metric::Discrete.distance([1.0, 2.0], [1.0, 5.0]), 1.0);
        assert_eq!(Metric::Discrete.distance([1.0, 2.0], [1.0, 2.0]), 0.0);
    }

    #[test]
    fn metric_parse() {
        assert_eq!(Metric::parse("L2").unwrap().name(), "l2");
        assert_eq!(Metric::parse("linf").unwrap().name(), "linf");
        assert!(Metric::parse("l3").is_err());
    }

    #[test]
    fn probability_examples() {
        let w = unit_model(Deterrence::Waxman { q: 0.7, s: 3.0 });
        assert_eq!(w.probability(0.0), 0.7);
        let g = unit_model(Deterrence::Ger { q: 0.3 });
        assert_eq!(g.probability(0.0), 0.3);
        assert_eq!(g.probability(1.3), 0.3);
        let w = unit_model(Deterrence::Waxman { q: 1.0, s: 1.0 });
        assert!((w.probability(1.0) - 0.367879).abs() < 1e-6);
        let t = unit_model(Deterrence::Threshold { q: 1.0, r: 0.5 });
        assert_eq!(t.probability(0.6), 0.0);
        assert_eq!(t.probability(0.5), 1.0, "H(0) = 1");
        let c = unit_model(Deterrence::ClippedWaxman { q: 3.0, s: 2.0 });
        assert_eq!(c.probability(0.1), 1.0);
        assert!((c.probability(1.0) - 3.0 * (-2.0f64).exp()).abs() < 1e-15);
        let m = unit_model(Deterrence::MaxEntropy { q: 1.0, s: 0.0 });
        assert_eq!(m.probability(0.4), 0.5);
        let p = unit_model(Deterrence::PowerLaw {
            q: 0.5,
            theta1: 1.0,
            theta2: 2.0,
        });
        assert!((p.probability(1.0) - 0.125).abs() < 1e-15);
        let cy = unit_model(Deterrence::Cauchy { q: 0.5, theta1: 4.0 });
        assert!((cy.probability(0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exponential_uses_longest_link() {
        let m = unit_model(Deterrence::Exponential { q: 0.1 });
        let l = 2f64.sqrt();
        assert!((m.longest() - l).abs() < 1e-15);
        assert!((m.probability(0.2) - 0.1 * (-0.2f64).exp() / (l - 0.2)).abs() < 1e-15);
        assert_eq!(m.probability(l), 0.0);
        assert_eq!(m.probability(l - 1e-9), 1.0);
        assert_eq!(m.bound_kind(), BoundKind::Valley);
        // the bound near L must cover the clamp
        assert_eq!(m.upper_bound(1.0, 1.5), 1.0);
        assert!(m.upper_bound(0.0, 0.2) >= m.probability(0.0));
    }

    #[test]
    fn parameter_ranges() {
        assert!(Deterrence::Waxman { q: 1.5, s: 1.0 }.validate().is_err());
        assert!(Deterrence::Waxman { q: 0.5, s: -1.0 }.validate().is_err());
        assert!(Deterrence::ClippedWaxman { q: 5.0, s: 1.0 }.validate().is_ok());
        assert!(Deterrence::Threshold { q: 0.5, r: -0.1 }.validate().is_err());
        assert!(Deterrence::Ger { q: f64::NAN }.validate().is_err());
        let p = ModelParams::default();
        assert!(Deterrence::from_name("threshold", &p).is_err(), "r required");
        assert!(Deterrence::from_name("nope", &p).is_err());
        for name in MODEL_NAMES {
            let p = ModelParams {
                r: Some(0.3),
                q: 0.5,
                s: 2.0,
                ..ModelParams::default()
            };
            assert!(Deterrence::from_name(name, &p).is_ok(), "{name}");
        }
        assert!(Deterrence::from_name("max_entropy", &p).is_ok());
    }

    #[test]
    fn builtins_are_non_increasing() {
        let p = ModelParams {
            q: 0.8,
            s: 3.0,
            r: Some(0.4),
            theta1: 2.0,
            theta2: 1.5,
        };
        for name in MODEL_NAMES {
            let d = Deterrence::from_name(name, &p).unwrap();
            let m = unit_model(d);
            if name == "exponential" {
                continue;
            }
            assert!(m.is_non_increasing_on_grid(), "{name}");
            assert_eq!(m.bound_kind(), BoundKind::NonIncreasing);
        }
        // with L < 1 the exponential form increases on all of [0, L)
        let small = Region::rectangle(0.5, 0.5).unwrap();
        let m = Model::new(Metric::Euclidean, Deterrence::Exponential { q: 0.1 }, &small).unwrap();
        assert!(!m.is_non_increasing_on_grid());
        assert!(m.probability(0.3) > m.probability(0.1));
    }

    #[test]
    fn waxman_s0_is_ger() {
        let w = unit_model(Deterrence::Waxman { q: 0.37, s: 0.0 });
        let g = unit_model(Deterrence::Ger { q: 0.37 });
        for k in 0..100 {
            let d = k as f64 * 0.0142;
            assert_eq!(w.probability(d), g.probability(d));
        }
    }

    #[test]
    fn custom_non_monotone_is_flagged() {
        let f: Arc<ProbabilityFn> = Arc::new(|d: f64| if d < 0.5 { 0.1 } else { 0.9 });
        let m = unit_model(Deterrence::Custom(f));
        assert_eq!(m.bound_kind(), BoundKind::Unbounded);
        assert_eq!(m.max_probability(), 1.0);
        let f: Arc<ProbabilityFn> = Arc::new(|d: f64| 0.5 / (1.0 + d));
        assert_eq!(unit_model(Deterrence::Custom(f)).bound_kind(), BoundKind::NonIncreasing);
    }

    #[test]
    fn q_table_examples() {
        let grid = BucketGrid::new(&Region::unit_square(), 10).unwrap();
        let ger = unit_model(Deterrence::Ger { q: 0.2 });
        let q = QTable::build(&ger, &grid);
        assert!((0..10).all(|a| (0..10).all(|b| q.get(a, b) == 0.2)));
        let w = unit_model(Deterrence::Waxman { q: 1.0, s: 0.0 });
        let q = QTable::build(&w, &grid);
        assert!((0..10).all(|a| (0..10).all(|b| q.get(a, b) == 1.0)));

        // cell side 0.1; r = 0.05 is below the first non-zero gap
        let t = unit_model(Deterrence::Threshold { q: 0.9, r: 0.05 });
        let q = QTable::build(&t, &grid);
        for a in 0..10 {
            for b in 0..10 {
                let d = grid.min_bucket_distance(a, b, &Metric::Euclidean);
                let want = if d > 0.05 { 0.0 } else { 0.9 };
                assert_eq!(q.get(a, b), want, "({a},{b})");
            }
        }
        assert_eq!(q.get(0, 0), t.probability(0.0));
    }

    #[test]
    fn q_table_non_increasing_along_axes() {
        let grid = BucketGrid::new(&Region::rectangle(2.0, 1.0).unwrap(), 12).unwrap();
        for metric in [Metric::Euclidean, Metric::Manhattan, Metric::Max] {
            let m = Model::new(
                metric,
                Deterrence::Waxman { q: 0.9, s: 4.0 },
                &Region::rectangle(2.0, 1.0).unwrap(),
            )
            .unwrap();
            let q = QTable::build(&m, &grid);
            for b in 0..q.rows() {
                for a in 1..q.cols() {
                    assert!(q.get(a, b) <= q.get(a - 1, b));
                }
            }
            for a in 0..q.cols() {
                for b in 1..q.rows() {
                    assert!(q.get(a, b) <= q.get(a, b - 1));
                }
            }
        }
    }
}
