//! Kuratowski embedding into a sup-norm coordinate space and the segment
//! complex `D_t(X)`: the embedded points plus straight segments between
//! images of points at distance at most `t`, with the induced sup metric.

use serde::Serialize;

use crate::correspondence::{distortion, gh_exact, Budget, Correspondence};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::ultra::UnionFind;

/// A vector indexed by the points of the base space.
#[derive(Debug, Clone, PartialEq)]
pub struct SupNormPoint {
    pub coords: Vec<f64>,
}

impl SupNormPoint {
    pub fn distance(&self, other: &SupNormPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `(1 - s) self + s other`.
    pub fn lerp(&self, other: &SupNormPoint, s: f64) -> SupNormPoint {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + s * (b - a))
            .collect();
        SupNormPoint { coords }
    }
}

/// `x -> (y -> d(x, y) - d(x0, y))`.
pub fn kuratowski_embed(x: &FiniteMetricSpace, basepoint: usize) -> Result<Vec<SupNormPoint>> {
    if basepoint >= x.len() {
        return Err(Error::IndexOutOfRange { index: basepoint, len: x.len() });
    }
    let base = x.row(basepoint);
    Ok((0..x.len())
        .map(|i| SupNormPoint { coords: x.row(i).iter().zip(base).map(|(a, b)| a - b).collect() })
        .collect())
}

/// Largest `| |Φ(a)Φ(b)|_sup - d(a, b) |` over all pairs.
pub fn isometry_residual(x: &FiniteMetricSpace, embedded: &[SupNormPoint]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            worst = worst.max((embedded[i].distance(&embedded[j]) - x.d(i, j)).abs());
        }
    }
    worst
}

/// Anchors plus the qualifying segments at scale `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentComplex {
    pub anchors: Vec<SupNormPoint>,
    /// Anchor pairs `(i, j)`, `i < j`, with `d(i, j) <= t`.
    pub segments: Vec<(usize, usize)>,
    pub t: f64,
    pub basepoint: usize,
}

impl SegmentComplex {
    pub fn new(x: &FiniteMetricSpace, t: f64, basepoint: usize) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::BadParams(format!("scale {t} must be nonnegative")));
        }
        let anchors = kuratowski_embed(x, basepoint)?;
        let tol = x.tol();
        let mut segments = Vec::new();
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                if tol.le(x.d(i, j), t) {
                    segments.push((i, j));
                }
            }
        }
        Ok(SegmentComplex { anchors, segments, t, basepoint })
    }

    /// Connectivity of the segment graph on the anchors.
    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.anchors.len());
        for &(i, j) in &self.segments {
            uf.union(i, j);
        }
        uf.sets() == 1
    }
}

/// Where a sample of `D_t(X)` came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SampleOrigin {
    Anchor(usize),
    /// Interior point at parameter `s` in `(0, 1)` measured from the
    /// lower-index endpoint.
    Segment { segment: usize, s: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledComplex {
    pub complex: SegmentComplex,
    pub points: Vec<SupNormPoint>,
    pub origin: Vec<SampleOrigin>,
}

impl SampledComplex {
    /// For every sample, the anchor of the nearest segment endpoint
    /// (anchors map to themselves, ties go to the lower index).
    pub fn nearest_endpoints(&self) -> Vec<usize> {
        self.origin
            .iter()
            .map(|o| match *o {
                SampleOrigin::Anchor(i) => i,
                SampleOrigin::Segment { segment, s } => {
                    let (i, j) = self.complex.segments[segment];
                    if s <= 0.5 {
                        i
                    } else {
                        j
                    }
                }
            })
            .collect()
    }

    /// Sampled complex as a finite metric space with the sup metric.
    pub fn metric_space(&self, eps: f64) -> Result<FiniteMetricSpace> {
        let n = self.points.len();
        FiniteMetricSpace::from_fn(n, eps, |i, j| self.points[i].distance(&self.points[j]))
    }
}

/// Samples `D_t(X)` with step at most `delta` along every segment.
pub fn build_dt(x: &FiniteMetricSpace, t: f64, delta: f64, basepoint: usize) -> Result<SampledComplex> {
    if !(delta > 0.0) {
        return Err(Error::BadParams(format!("step {delta} must be positive")));
    }
    let complex = SegmentComplex::new(x, t, basepoint)?;
    let mut points = complex.anchors.clone();
    let mut origin: Vec<SampleOrigin> = (0..x.len()).map(SampleOrigin::Anchor).collect();
    for (k, &(i, j)) in complex.segments.iter().enumerate() {
        let steps = (x.d(i, j) / delta).ceil().max(1.0) as usize;
        for m in 1..steps {
            let s = m as f64 / steps as f64;
            points.push(complex.anchors[i].lerp(&complex.anchors[j], s));
            origin.push(SampleOrigin::Segment { segment: k, s });
        }
    }
    Ok(SampledComplex { complex, points, origin })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DtCheck {
    pub t: f64,
    pub delta: f64,
    pub basepoint: usize,
    pub samples: usize,
    pub segments: usize,
    pub connected: bool,
    /// Distortion of the nearest-endpoint correspondence.
    pub distortion_bound: f64,
    pub isometry_residual: f64,
    /// Exact `d_GH` between `X` and a coarse sample, when within budget.
    pub gh_cross_check: Option<f64>,
}

/// Distortion of `sample -> nearest endpoint` between `X` and the samples.
pub fn nearest_endpoint_distortion(x: &FiniteMetricSpace, sampled: &SampledComplex) -> f64 {
    let map = sampled.nearest_endpoints();
    let mut worst: f64 = 0.0;
    for (p, &fp) in map.iter().enumerate() {
        for (q, &fq) in map.iter().enumerate().skip(p + 1) {
            let d = sampled.points[p].distance(&sampled.points[q]);
            worst = worst.max((d - x.d(fp, fq)).abs());
        }
    }
    worst
}

pub fn dt_check(x: &FiniteMetricSpace, t: f64, delta: f64, basepoint: usize, budget: Budget) -> Result<DtCheck> {
    let sampled = build_dt(x, t, delta, basepoint)?;
    let cross = if x.len() * x.len() <= budget.max_cells {
        Some(dt_gh_cross_check(x, t, basepoint, budget)?)
    } else {
        None
    };
    Ok(DtCheck {
        t,
        delta,
        basepoint,
        samples: sampled.points.len(),
        segments: sampled.complex.segments.len(),
        connected: sampled.complex.is_connected(),
        distortion_bound: nearest_endpoint_distortion(x, &sampled),
        isometry_residual: isometry_residual(x, &sampled.complex.anchors),
        gh_cross_check: cross,
    })
}

/// `d_GH(X, S)` where `S` holds the anchors plus as many segment midpoints
/// as the budget allows. Since `S` contains every anchor, the
/// nearest-endpoint correspondence restricts to it and the value is at most
/// `t / 2`.
pub fn dt_gh_cross_check(x: &FiniteMetricSpace, t: f64, basepoint: usize, budget: Budget) -> Result<f64> {
    let n = x.len();
    budget.check(n, n)?;
    let complex = SegmentComplex::new(x, t, basepoint)?;
    let room = budget.max_cells / n - n;
    let mut points = complex.anchors.clone();
    for &(i, j) in &complex.segments {
        if points.len() == n + room {
            break;
        }
        let mid = complex.anchors[i].lerp(&complex.anchors[j], 0.5);
        if points.iter().all(|p| p.distance(&mid) > x.eps()) {
            points.push(mid);
        }
    }
    let sample = FiniteMetricSpace::from_fn(points.len(), x.eps(), |i, j| points[i].distance(&points[j]))?;
    Ok(gh_exact(x, &sample, budget)?.value)
}

/// The nearest-endpoint correspondence as an explicit relation, for
/// callers that want to feed it to [`distortion`].
pub fn nearest_endpoint_correspondence(x: &FiniteMetricSpace, sampled: &SampledComplex) -> Result<(Correspondence, f64)> {
    let map = sampled.nearest_endpoints();
    let r = Correspondence::new(x.len(), map.len(), map.iter().enumerate().map(|(p, &a)| (a, p)))?;
    let sample = sampled.metric_space(x.eps())?;
    let dis = distortion(&r, x, &sample)?;
    Ok((r, dis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::DEFAULT_EPS;

    fn pair(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::on_line(&[0.0, d], DEFAULT_EPS).unwrap()
    }

    #[test]
    fn embedding_examples() {
        let p = kuratowski_embed(&FiniteMetricSpace::one_point(), 0).unwrap();
        assert_eq!(p, vec![SupNormPoint { coords: vec![0.0] }]);

        let e = kuratowski_embed(&pair(3.0), 0).unwrap();
        assert_eq!(e[0].coords, vec![0.0, 0.0]);
        assert_eq!(e[1].coords, vec![3.0, -3.0]);
        assert_eq!(e[0].distance(&e[1]), 3.0);

        let tri = FiniteMetricSpace::from_fn(3, DEFAULT_EPS, |i, j| match (i, j) {
            (0, 1) => 1.0,
            (1, 2) => 2.0,
            _ => 3.0,
        })
        .unwrap();
        for b in 0..3 {
            let e = kuratowski_embed(&tri, b).unwrap();
            assert_eq!(isometry_residual(&tri, &e), 0.0);
        }
        assert!(kuratowski_embed(&tri, 3).is_err());
    }

    #[test]
    fn complex_examples() {
        let x = pair(3.0);
        assert!(build_dt(&x, 2.0, 0.5, 0).unwrap().complex.segments.is_empty());
        let s = build_dt(&x, 3.0, 0.5, 0).unwrap();
        assert_eq!(s.points.len(), 7);
        assert_eq!(s.complex.segments, vec![(0, 1)]);

        let net = FiniteMetricSpace::on_line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], DEFAULT_EPS).unwrap();
        let s = build_dt(&net, 1.0, 0.1, 0).unwrap();
        assert_eq!(s.complex.segments.len(), 5);
        assert!(build_dt(&net, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn dt_check_examples() {
        let b = Budget::default();
        let x = pair(3.0);
        let c = dt_check(&x, 0.0, 0.1, 0, b).unwrap();
        assert!(!c.connected);
        assert_eq!(c.distortion_bound, 0.0);
        let c = dt_check(&FiniteMetricSpace::one_point(), 0.0, 0.1, 0, b).unwrap();
        assert!(c.connected);

        let c = dt_check(&x, 3.0, 0.3, 0, b).unwrap();
        assert!(c.connected);
        assert!(c.distortion_bound <= 3.0 + DEFAULT_EPS);
        assert!(c.gh_cross_check.unwrap() <= 1.5 + 0.3);

        let clusters = FiniteMetricSpace::on_line(&[0.0, 0.5, 10.0, 10.5], DEFAULT_EPS).unwrap();
        let c = dt_check(&clusters, 5.0, 0.5, 0, b).unwrap();
        assert!(!c.connected);
        assert!(c.distortion_bound <= 5.0 + DEFAULT_EPS);
    }

    #[test]
    fn explicit_correspondence_agrees() {
        let x = FiniteMetricSpace::on_line(&[0.0, 1.0, 2.5], DEFAULT_EPS).unwrap();
        let s = build_dt(&x, 2.5, 0.25, 1).unwrap();
        let (_, dis) = nearest_endpoint_correspondence(&x, &s).unwrap();
        assert_eq!(dis, nearest_endpoint_distortion(&x, &s));
    }
}
