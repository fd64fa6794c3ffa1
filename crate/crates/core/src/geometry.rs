//! Distances on the open probability simplex.
//!
//! Points of the simplex are [`SimplexPoint`]s (strictly positive, summing to
//! one). The Funk and Hilbert distances are ratio-based, so they also accept
//! unnormalized [`PositiveVector`]s; the Hilbert distance is invariant under
//! rescaling either argument.
//!
//! The log-ratio map `p -> log(p / G(p))` (with `G` the geometric mean) sends
//! the simplex onto the zero-sum subspace. There the Hilbert distance becomes
//! the variation norm `max - min` and the Aitchison distance becomes the
//! Euclidean norm.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::{Error, Result};

/// Smallest admissible coordinate of a [`SimplexPoint`].
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Tolerance on `sum(coords) == 1` for simplex points.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Tolerance on `sum(v) == 0` for log-ratio points, relative to `max(1, sum |v_i|)`.
pub const ZERO_SUM_TOL: f64 = 1e-9;

/// Direction components smaller than this are treated as parallel to a facet.
const PARALLEL_TOL: f64 = 1e-14;

/// A strictly positive vector, a representative of a ray of the positive orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector(Vec<f64>);

impl PositiveVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite);
            }
            if value <= 0.0 {
                return Err(Error::NonPositive { index, value });
            }
        }
        Ok(PositiveVector(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplies every coordinate by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        PositiveVector::new(self.0.iter().map(|x| x * lambda).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<PositiveVector> for PositiveVector {
    fn as_ref(&self) -> &PositiveVector {
        self
    }
}

/// A point of the open simplex: coordinates at least [`POSITIVITY_FLOOR`]
/// that sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(PositiveVector);

impl SimplexPoint {
    /// Validates `coords`. Coordinates below the floor are rejected, not clamped.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite);
            }
            if value < POSITIVITY_FLOOR {
                return Err(Error::NonPositive { index, value });
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(SimplexPoint(PositiveVector(coords)))
    }

    /// Normalizes a positive vector onto the simplex.
    pub fn from_positive(v: &PositiveVector) -> Result<Self> {
        let sum: f64 = v.coords().iter().sum();
        SimplexPoint::new(v.coords().iter().map(|x| x / sum).collect())
    }

    /// The barycenter `(1/n, ..., 1/n)`.
    pub fn uniform(len: usize) -> Result<Self> {
        SimplexPoint::new(vec![1.0 / len as f64; len])
    }

    /// Draws a point uniformly from the simplex with `len` coordinates
    /// (flat Dirichlet), redrawing in the rare event a coordinate lands below
    /// the positivity floor.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        assert!(len >= 1, "simplex point needs at least one coordinate");
        loop {
            let e: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
            let sum: f64 = e.iter().sum();
            if let Ok(p) = SimplexPoint::new(e.iter().map(|x| x / sum).collect()) {
                return p;
            }
        }
    }

    pub fn coords(&self) -> &[f64] {
        self.0.coords()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_positive(&self) -> &PositiveVector {
        &self.0
    }
}

impl AsRef<PositiveVector> for SimplexPoint {
    fn as_ref(&self) -> &PositiveVector {
        &self.0
    }
}

impl From<SimplexPoint> for PositiveVector {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

/// A zero-sum vector: the log-ratio representation of a simplex point.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRepPoint(Vec<f64>);

impl LogRepPoint {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sum: f64 = v.iter().sum();
        let scale: f64 = v.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        if sum.abs() > ZERO_SUM_TOL * scale {
            return Err(Error::NotZeroSum { sum });
        }
        Ok(LogRepPoint(v))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coordinate-wise difference `self - other`.
    pub fn sub(&self, other: &LogRepPoint) -> Result<Vec<f64>> {
        check_same_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// A partition of the coordinate indices `0..len` into nonempty disjoint
/// blocks. Coarse-graining sums the coordinates of each block, in block order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    blocks: Vec<Vec<usize>>,
    len: usize,
}

impl PartitionSpec {
    pub fn new(blocks: Vec<Vec<usize>>, len: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        if blocks.len() > len {
            return Err(Error::InvalidPartition(format!(
                "{} blocks for {} indices",
                blocks.len(),
                len
            )));
        }
        let mut seen = vec![false; len];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &i in block {
                if i >= len {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} out of range 0..{len}"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} appears twice"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "index {missing} is not covered"
            )));
        }
        Ok(PartitionSpec { blocks, len })
    }

    /// Every index in its own block.
    pub fn identity(len: usize) -> Self {
        PartitionSpec {
            blocks: (0..len).map(|i| vec![i]).collect(),
            len,
        }
    }

    /// A random partition of `0..len`: a random number of blocks, each index
    /// assigned to a uniformly chosen block, empty blocks dropped.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        assert!(len >= 1);
        let m = rng.random_range(1..=len);
        let mut blocks = vec![Vec::new(); m];
        for i in 0..len {
            blocks[rng.random_range(0..m)].push(i);
        }
        blocks.retain(|b| !b.is_empty());
        PartitionSpec { blocks, len }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of indices partitioned.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// The `m x len` column-stochastic 0/1 matrix realizing the coarse-graining,
    /// row-major.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.len]; self.blocks.len()];
        for (row, block) in self.blocks.iter().enumerate() {
            for &i in block {
                a[row][i] = 1.0;
            }
        }
        a
    }
}

fn check_same_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

fn check_pair(p: &[f64], q: &[f64], min: usize) -> Result<()> {
    check_same_len(p.len(), q.len())?;
    if p.len() < min {
        return Err(Error::TooShort { len: p.len(), min });
    }
    Ok(())
}

/// `(max_i p_i/q_i, min_i p_i/q_i)` in one pass.
fn ratio_extremes(p: &[f64], q: &[f64]) -> (f64, f64) {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (a, b) in p.iter().zip(q) {
        let r = a / b;
        hi = hi.max(r);
        lo = lo.min(r);
    }
    (hi, lo)
}

/// Funk distance `log max_i p_i / q_i`. Asymmetric; zero when `p == q`.
pub fn funk_distance(p: &impl AsRef<PositiveVector>, q: &impl AsRef<PositiveVector>) -> Result<f64> {
    let (p, q) = (p.as_ref().coords(), q.as_ref().coords());
    check_pair(p, q, 2)?;
    if p == q {
        return Ok(0.0);
    }
    Ok(ratio_extremes(p, q).0.ln())
}

/// Hilbert distance `log (max_i p_i/q_i) / (min_i p_i/q_i)`, the sum of the
/// two Funk distances. Invariant under `p -> a p`, `q -> b q` for `a, b > 0`.
pub fn hilbert_distance(
    p: &impl AsRef<PositiveVector>,
    q: &impl AsRef<PositiveVector>,
) -> Result<f64> {
    let (p, q) = (p.as_ref().coords(), q.as_ref().coords());
    check_pair(p, q, 2)?;
    Ok(hilbert_unchecked(p, q))
}

pub(crate) fn hilbert_unchecked(p: &[f64], q: &[f64]) -> f64 {
    if p == q {
        return 0.0;
    }
    // Fixed argument order so that swapping p and q gives bit-identical results.
    let (p, q) = if p.partial_cmp(q) == Some(std::cmp::Ordering::Greater) {
        (q, p)
    } else {
        (p, q)
    };
    let (hi, lo) = ratio_extremes(p, q);
    (hi / lo).ln()
}

pub(crate) fn funk_unchecked(p: &[f64], q: &[f64]) -> f64 {
    if p == q {
        return 0.0;
    }
    ratio_extremes(p, q).0.ln()
}

/// Hilbert distance through the cross-ratio of the chord of the simplex
/// containing `p` and `q`.
///
/// The line `x(t) = p + t (q - p)` leaves the simplex where some coordinate
/// vanishes, at `t_i = -p_i / (q_i - p_i)`. The nearest such parameters below
/// 0 and above 1 locate the boundary points `p_bar` and `q_bar`, and the
/// result is `log CR(p_bar, p; q, q_bar)` evaluated on the parameter line.
/// This never looks at coordinate ratios, so it serves as an independent check
/// of [`hilbert_distance`].
pub fn cross_ratio_oracle(p: &SimplexPoint, q: &SimplexPoint) -> Result<f64> {
    let (p, q) = (p.coords(), q.coords());
    check_same_len(p.len(), q.len())?;
    if p == q {
        return Ok(0.0);
    }
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for (pi, qi) in p.iter().zip(q) {
        let dir = qi - pi;
        if dir.abs() <= PARALLEL_TOL {
            continue;
        }
        let t = -pi / dir;
        if t < 0.0 {
            t_lo = t_lo.max(t);
        } else {
            t_hi = t_hi.min(t);
        }
    }
    // p at t = 0, q at t = 1, p_bar at t_lo < 0, q_bar at t_hi > 1.
    let p_to_qbar = t_hi;
    let q_to_pbar = 1.0 - t_lo;
    let p_to_pbar = -t_lo;
    let q_to_qbar = t_hi - 1.0;
    Ok(((p_to_qbar * q_to_pbar) / (p_to_pbar * q_to_qbar)).ln())
}

/// `max_i x_i - min_i x_i`: a seminorm on `R^n`, a norm on zero-sum vectors.
pub fn variation_norm(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    Ok(variation_unchecked(x))
}

pub(crate) fn variation_unchecked(x: &[f64]) -> f64 {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    hi - lo
}

pub(crate) fn clr(p: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = p.iter().map(|x| x.ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    logs.into_iter().map(|l| l - mean).collect()
}

/// Centered log-ratio map `v_i = log p_i - mean_j log p_j`.
pub fn to_log_coordinates(p: &SimplexPoint) -> LogRepPoint {
    LogRepPoint(clr(p.coords()))
}

/// Inverse of [`to_log_coordinates`]: `p_i = exp(v_i) / sum_j exp(v_j)`.
///
/// Fails if the resulting point has a coordinate below the positivity floor.
pub fn from_log_coordinates(v: &LogRepPoint) -> Result<SimplexPoint> {
    softmax_point(v.coords())
}

/// Softmax of an arbitrary finite vector onto the simplex. Adding a constant
/// to every entry leaves the result unchanged.
pub fn softmax_point(v: &[f64]) -> Result<SimplexPoint> {
    if v.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    SimplexPoint::new(softmax(v))
}

pub(crate) fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    let sum: f64 = e.iter().sum();
    e.into_iter().map(|x| x / sum).collect()
}

/// Stabilized `log sum_i exp(v_i)`.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Aitchison distance: Euclidean distance between centered log-ratio vectors.
pub fn aitchison_distance(p: &SimplexPoint, q: &SimplexPoint) -> Result<f64> {
    check_same_len(p.len(), q.len())?;
    Ok(aitchison_unchecked(p.coords(), q.coords()))
}

pub(crate) fn aitchison_unchecked(p: &[f64], q: &[f64]) -> f64 {
    clr(p)
        .iter()
        .zip(clr(q))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Smooth upper bound on the Funk distance, `log sum_i p_i / q_i`.
/// Lies in `[funk(p, q), funk(p, q) + log d]`.
pub fn lse_funk_upper(p: &impl AsRef<PositiveVector>, q: &impl AsRef<PositiveVector>) -> Result<f64> {
    let (p, q) = (p.as_ref().coords(), q.as_ref().coords());
    check_pair(p, q, 1)?;
    Ok(p.iter().zip(q).map(|(a, b)| a / b).sum::<f64>().ln())
}

/// Symmetrized smooth surrogate of the Hilbert distance,
/// `log (sum_i p_i/q_i)(sum_i q_i/p_i)`. Equals `2 log d` at `p == q` and lies
/// in `[hilbert(p, q), hilbert(p, q) + 2 log d]`.
pub fn lse_hilbert_surrogate(
    p: &impl AsRef<PositiveVector>,
    q: &impl AsRef<PositiveVector>,
) -> Result<f64> {
    Ok(lse_funk_upper(p, q)? + lse_funk_upper(q, p)?)
}

/// Sums the coordinates of `p` over each block of `part`.
pub fn coarse_grain(p: &SimplexPoint, part: &PartitionSpec) -> Result<SimplexPoint> {
    if part.len() != p.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} indices, point has {}",
            part.len(),
            p.len()
        )));
    }
    let c = p.coords();
    SimplexPoint::new(
        part.blocks()
            .iter()
            .map(|block| block.iter().map(|&i| c[i]).sum())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use std::f64::consts::{E, LN_2};

    fn sp(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    fn pv(v: &[f64]) -> PositiveVector {
        PositiveVector::new(v.to_vec()).unwrap()
    }

    /// Funk distance from its ray definition: follow the ray from `p` through
    /// `q` to the boundary point `q_bar` and return `log |p - q_bar| / |q - q_bar|`.
    fn funk_ray_oracle(p: &[f64], q: &[f64]) -> f64 {
        let t_hit = p
            .iter()
            .zip(q)
            .filter(|(a, b)| *b - *a < -PARALLEL_TOL)
            .map(|(a, b)| -a / (b - a))
            .fold(f64::INFINITY, f64::min);
        let q_bar: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + t_hit * (b - a)).collect();
        let norm = |x: &[f64], y: &[f64]| {
            x.iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        };
        (norm(p, &q_bar) / norm(q, &q_bar)).ln()
    }

    #[test]
    fn simplex_point_rejects_bad_input() {
        assert!(matches!(
            SimplexPoint::new(vec![1.0 - 1e-13, 1e-13]),
            Err(Error::NonPositive { index: 1, .. })
        ));
        assert!(matches!(
            SimplexPoint::new(vec![0.5, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            SimplexPoint::new(vec![f64::NAN, 1.0]),
            Err(Error::NonFinite)
        ));
        assert!(SimplexPoint::new(vec![]).is_err());
        assert!(PositiveVector::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn funk_examples() {
        let u = sp(&[1.0 / 3.0; 3]);
        assert_eq!(funk_distance(&u, &u).unwrap(), 0.0);

        let p = sp(&[0.5, 0.25, 0.25]);
        let q = sp(&[0.25, 0.5, 0.25]);
        let oracle = funk_ray_oracle(p.coords(), q.coords());
        assert!((oracle - LN_2).abs() < 1e-12);
        assert!((funk_distance(&p, &q).unwrap() - oracle).abs() < 1e-12);

        let a = pv(&[2.0, 1.0]);
        let b = pv(&[1.0, 1.0]);
        assert!((funk_distance(&a, &b).unwrap() - LN_2).abs() < 1e-15);
        let a7 = a.scaled(7.0).unwrap();
        let b7 = b.scaled(7.0).unwrap();
        assert!((funk_distance(&a7, &b7).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn funk_matches_ray_oracle_on_random_pairs() {
        let mut rng = rng_from_seed(11);
        for len in 2..8 {
            for _ in 0..200 {
                let p = SimplexPoint::random(&mut rng, len);
                let q = SimplexPoint::random(&mut rng, len);
                let f = funk_distance(&p, &q).unwrap();
                assert!((f - funk_ray_oracle(p.coords(), q.coords())).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn funk_errors() {
        assert!(matches!(
            funk_distance(&pv(&[1.0, 2.0]), &pv(&[1.0, 2.0, 3.0])),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        ));
        assert!(matches!(
            funk_distance(&pv(&[1.0]), &pv(&[2.0])),
            Err(Error::TooShort { .. })
        ));
        assert!(hilbert_distance(&pv(&[1.0, 2.0]), &pv(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn funk_is_asymmetric() {
        let p = sp(&[0.7, 0.2, 0.1]);
        let q = sp(&[0.2, 0.3, 0.5]);
        let pq = funk_distance(&p, &q).unwrap();
        let qp = funk_distance(&q, &p).unwrap();
        assert!((pq - qp).abs() > 0.1);
        assert!((pq + qp - hilbert_distance(&p, &q).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hilbert_examples() {
        let p = sp(&[0.5, 0.25, 0.25]);
        let q = sp(&[0.25, 0.5, 0.25]);
        assert_eq!(hilbert_distance(&p, &p).unwrap(), 0.0);
        let h = hilbert_distance(&p, &q).unwrap();
        assert!((h - 4f64.ln()).abs() < 1e-12);
        assert!((h - cross_ratio_oracle(&p, &q).unwrap()).abs() < 1e-12);
        let h35 = hilbert_distance(
            &p.as_positive().scaled(3.0).unwrap(),
            &q.as_positive().scaled(5.0).unwrap(),
        )
        .unwrap();
        assert!((h35 - h).abs() < 1e-12);
    }

    #[test]
    fn cross_ratio_examples() {
        let p = sp(&[0.2, 0.8]);
        let q = sp(&[0.6, 0.4]);
        assert!((cross_ratio_oracle(&p, &q).unwrap() - 6f64.ln()).abs() < 1e-12);
        assert_eq!(cross_ratio_oracle(&p, &p).unwrap(), 0.0);
        let p = sp(&[0.5, 0.25, 0.25]);
        let q = sp(&[0.25, 0.5, 0.25]);
        assert!((cross_ratio_oracle(&p, &q).unwrap() - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn variation_norm_examples() {
        assert_eq!(variation_norm(&[1.0, -1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(variation_norm(&[3.5; 4]).unwrap(), 0.0);
        assert!(variation_norm(&[]).is_err());

        let p = sp(&[0.5, 0.25, 0.25]);
        let q = sp(&[0.25, 0.5, 0.25]);
        let diff = to_log_coordinates(&p).sub(&to_log_coordinates(&q)).unwrap();
        assert!((variation_norm(&diff).unwrap() - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_coordinate_examples() {
        let v = to_log_coordinates(&SimplexPoint::uniform(4).unwrap());
        assert!(v.coords().iter().all(|x| x.abs() < 1e-15));

        let s = E + 2.0;
        let v = to_log_coordinates(&sp(&[E / s, 1.0 / s, 1.0 / s]));
        let expected = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (a, b) in v.coords().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }

        let zero = LogRepPoint::new(vec![0.0; 3]).unwrap();
        let u = from_log_coordinates(&zero).unwrap();
        for x in u.coords() {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }

        let a = softmax_point(&[0.3, -1.2, 2.0]).unwrap();
        let b = softmax_point(&[100.3, 98.8, 102.0]).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            assert!((x - y).abs() < 1e-14);
        }

        let p = softmax_point(&[LN_2, 0.0]).unwrap();
        assert!((p.coords()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.coords()[1] - 1.0 / 3.0).abs() < 1e-15);

        assert!(softmax_point(&[f64::INFINITY, 0.0]).is_err());
        assert!(LogRepPoint::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn aitchison_examples() {
        let p = sp(&[0.5, 0.25, 0.25]);
        let q = sp(&[0.25, 0.5, 0.25]);
        assert_eq!(aitchison_distance(&p, &p).unwrap(), 0.0);
        // Term by term: clr(p) - clr(q) = (ln 2, -ln 2, 0).
        let expected = 0.980_258_143_468_547_1;
        assert!((aitchison_distance(&p, &q).unwrap() - expected).abs() < 1e-15);
        assert!(aitchison_distance(&p, &sp(&[0.5, 0.5])).is_err());

        let mut rng = rng_from_seed(5);
        for _ in 0..100 {
            let p = SimplexPoint::random(&mut rng, 4);
            let q = SimplexPoint::random(&mut rng, 4);
            assert_eq!(
                aitchison_distance(&p, &q).unwrap(),
                aitchison_distance(&q, &p).unwrap()
            );
        }
    }

    #[test]
    fn lse_examples() {
        for d in 2..8 {
            let u = SimplexPoint::uniform(d).unwrap();
            assert!((lse_funk_upper(&u, &u).unwrap() - (d as f64).ln()).abs() < 1e-14);
        }
        let u = SimplexPoint::uniform(5).unwrap();
        assert!((lse_hilbert_surrogate(&u, &u).unwrap() - 2.0 * 5f64.ln()).abs() < 1e-14);
        let p = sp(&[0.7, 0.2, 0.1]);
        let q = sp(&[0.2, 0.3, 0.5]);
        assert_eq!(
            lse_hilbert_surrogate(&p, &q).unwrap(),
            lse_hilbert_surrogate(&q, &p).unwrap()
        );
        assert!(lse_funk_upper(&p, &sp(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn coarse_grain_examples() {
        let p = sp(&[0.5, 0.25, 0.25]);
        assert_eq!(coarse_grain(&p, &PartitionSpec::identity(3)).unwrap(), p);
        let merged = coarse_grain(&p, &PartitionSpec::new(vec![vec![0, 1], vec![2]], 3).unwrap())
            .unwrap();
        assert_eq!(merged.coords(), &[0.75, 0.25]);
        // Block order is preserved.
        let swapped = coarse_grain(&p, &PartitionSpec::new(vec![vec![2], vec![1, 0]], 3).unwrap())
            .unwrap();
        assert_eq!(swapped.coords(), &[0.25, 0.75]);
        assert!(coarse_grain(&p, &PartitionSpec::identity(4)).is_err());
    }

    #[test]
    fn partition_validation() {
        assert!(PartitionSpec::new(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(PartitionSpec::new(vec![vec![0]], 2).is_err());
        assert!(PartitionSpec::new(vec![vec![0, 1], vec![]], 2).is_err());
        assert!(PartitionSpec::new(vec![vec![0, 2]], 2).is_err());
        assert!(PartitionSpec::new(vec![], 2).is_err());
        let part = PartitionSpec::new(vec![vec![1], vec![0, 2]], 3).unwrap();
        assert_eq!(
            part.to_matrix(),
            vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]]
        );
    }

    #[test]
    fn coarse_grain_equals_column_stochastic_product() {
        let mut rng = rng_from_seed(9);
        for _ in 0..100 {
            let p = SimplexPoint::random(&mut rng, 6);
            let part = PartitionSpec::random(&mut rng, 6);
            let a = part.to_matrix();
            for col in 0..6 {
                assert_eq!(a.iter().map(|row| row[col]).sum::<f64>(), 1.0);
            }
            let ap: Vec<f64> = a
                .iter()
                .map(|row| row.iter().zip(p.coords()).map(|(x, y)| x * y).sum())
                .collect();
            let c = coarse_grain(&p, &part).unwrap();
            for (x, y) in c.coords().iter().zip(ap) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    fn simplex_pair() -> impl Strategy<Value = (SimplexPoint, SimplexPoint)> {
        (2usize..10).prop_flat_map(|len| {
            let coords = proptest::collection::vec(0.01f64..1.0, len);
            (coords.clone(), coords).prop_map(|(a, b)| {
                let na: f64 = a.iter().sum();
                let nb: f64 = b.iter().sum();
                (
                    SimplexPoint::new(a.iter().map(|x| x / na).collect()).unwrap(),
                    SimplexPoint::new(b.iter().map(|x| x / nb).collect()).unwrap(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn hilbert_is_variation_norm_of_log_difference((p, q) in simplex_pair()) {
            let diff = to_log_coordinates(&p).sub(&to_log_coordinates(&q)).unwrap();
            let h = hilbert_distance(&p, &q).unwrap();
            prop_assert!((h - variation_norm(&diff).unwrap()).abs() <= 1e-10);
            prop_assert!((h - cross_ratio_oracle(&p, &q).unwrap()).abs() <= 1e-9);
        }

        #[test]
        fn aitchison_is_l2_of_log_difference((p, q) in simplex_pair()) {
            let diff = to_log_coordinates(&p).sub(&to_log_coordinates(&q)).unwrap();
            let l2 = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((aitchison_distance(&p, &q).unwrap() - l2).abs() <= 1e-10);
        }

        #[test]
        fn log_map_round_trip((p, _q) in simplex_pair()) {
            let back = from_log_coordinates(&to_log_coordinates(&p)).unwrap();
            for (a, b) in p.coords().iter().zip(back.coords()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn projective_invariance((p, q) in simplex_pair(), li in 0usize..3, lj in 0usize..3) {
            let scales = [1e-3, 1.0, 1e3];
            let h = hilbert_distance(&p, &q).unwrap();
            let hs = hilbert_distance(
                &p.as_positive().scaled(scales[li]).unwrap(),
                &q.as_positive().scaled(scales[lj]).unwrap(),
            ).unwrap();
            prop_assert!((h - hs).abs() <= 1e-12);
        }

        #[test]
        fn funk_triangle_and_hilbert_symmetry(
            (p, q) in simplex_pair(),
            seed in any::<u64>(),
        ) {
            let r = SimplexPoint::random(&mut rng_from_seed(seed), p.len());
            let f = |a: &SimplexPoint, b: &SimplexPoint| funk_distance(a, b).unwrap();
            let h = |a: &SimplexPoint, b: &SimplexPoint| hilbert_distance(a, b).unwrap();
            prop_assert!(f(&p, &r) <= f(&p, &q) + f(&q, &r) + 1e-12);
            prop_assert!(h(&p, &r) <= h(&p, &q) + h(&q, &r) + 1e-12);
            prop_assert_eq!(h(&p, &q), h(&q, &p));
            prop_assert!(f(&p, &q) >= 0.0);
        }
    }
}
