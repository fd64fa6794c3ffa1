//! Raster pictures of the 2-simplex: distance fields with iso-distance
//! contours, and Voronoi diagrams under simplex distances.
//!
//! The simplex is drawn as the unit-side equilateral triangle with vertices
//! `e0 = (0, 0)`, `e1 = (1, 0)`, `e2 = (1/2, sqrt(3)/2)`, centered vertically
//! in a square `resolution x resolution` image with square pixels. Row 0 is the
//! top of the image. A pixel is inside when the barycentric coordinates of its
//! center form a valid [`SimplexPoint`].

use crate::geometry::{self, SimplexPoint};
use crate::{Error, Result};

pub const MIN_RESOLUTION: usize = 16;

const HEIGHT: f64 = 0.866_025_403_784_438_6; // sqrt(3) / 2
const Y_OFFSET: f64 = (1.0 - HEIGHT) / 2.0;

/// Distances a scalar field can show, measured between a pixel `p` and the
/// center `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldDistance {
    Hilbert,
    /// `funk(p, c)`
    FunkForward,
    /// `funk(c, p)`
    FunkReverse,
    Aitchison,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoronoiDistance {
    Hilbert,
    Aitchison,
    /// Variation norm between centered log-ratio vectors.
    VariationNormOnLogRep,
}

/// Pixel grid over the triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleGrid {
    pub resolution: usize,
}

impl TriangleGrid {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "resolution {resolution} below {MIN_RESOLUTION}"
            )));
        }
        Ok(TriangleGrid { resolution })
    }

    /// Planar center of pixel `(col, row)`.
    pub fn pixel_center(&self, col: usize, row: usize) -> (f64, f64) {
        let r = self.resolution as f64;
        ((col as f64 + 0.5) / r, 1.0 - (row as f64 + 0.5) / r - Y_OFFSET)
    }

    /// The simplex point at pixel `(col, row)`, or `None` outside the triangle.
    pub fn pixel_point(&self, col: usize, row: usize) -> Option<SimplexPoint> {
        let (x, y) = self.pixel_center(col, row);
        planar_to_simplex(x, y)
    }

    /// The pixel containing `p`.
    pub fn pixel_of(&self, p: &SimplexPoint) -> (usize, usize) {
        let (x, y) = simplex_to_planar(p);
        let r = self.resolution as f64;
        let col = (x * r).floor().clamp(0.0, r - 1.0) as usize;
        let row = ((1.0 - y - Y_OFFSET) * r).floor().clamp(0.0, r - 1.0) as usize;
        (col, row)
    }

    fn points(&self) -> Vec<Option<SimplexPoint>> {
        let n = self.resolution;
        (0..n * n).map(|k| self.pixel_point(k % n, k / n)).collect()
    }
}

/// Barycentric `(x0, x1, x2)` to the plane.
pub fn simplex_to_planar(p: &SimplexPoint) -> (f64, f64) {
    let c = p.coords();
    (c[1] + 0.5 * c[2], HEIGHT * c[2])
}

pub fn planar_to_simplex(x: f64, y: f64) -> Option<SimplexPoint> {
    let l2 = y / HEIGHT;
    let l1 = x - 0.5 * l2;
    let l0 = 1.0 - l1 - l2;
    SimplexPoint::new(vec![l0, l1, l2]).ok()
}

fn check_in_triangle(p: &SimplexPoint, what: &str) -> Result<()> {
    if p.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "{what} must have 3 coordinates, got {}",
            p.len()
        )));
    }
    Ok(())
}

/// Per-pixel scalar values; `None` outside the triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: TriangleGrid,
    pub values: Vec<Option<f64>>,
}

impl ScalarField {
    pub fn get(&self, col: usize, row: usize) -> Option<f64> {
        self.values[row * self.grid.resolution + col]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// `count` evenly spaced levels `k * step`, `step = max / (count + 1)`.
    pub fn contour_levels(&self, count: usize) -> Vec<f64> {
        let step = self.max_value() / (count + 1) as f64;
        (1..=count).map(|k| k as f64 * step).collect()
    }

    /// Binary PGM. Gray encodes distance (darker is farther), pixels where a
    /// contour level is crossed toward a neighbor are black, outside is white.
    pub fn to_pgm(&self, levels: &[f64]) -> Vec<u8> {
        let n = self.grid.resolution;
        let max = self.max_value().max(f64::MIN_POSITIVE);
        let band = |v: f64| levels.iter().filter(|&&l| v >= l).count();
        let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
        for row in 0..n {
            for col in 0..n {
                let byte = match self.get(col, row) {
                    None => 255,
                    Some(v) => {
                        let b = band(v);
                        let crosses = [(col + 1, row), (col, row + 1)]
                            .into_iter()
                            .filter(|&(c, r)| c < n && r < n)
                            .filter_map(|(c, r)| self.get(c, r))
                            .any(|w| band(w) != b);
                        if crosses {
                            0
                        } else {
                            (40.0 + 215.0 * (1.0 - v / max)).round() as u8
                        }
                    }
                };
                out.push(byte);
            }
        }
        out
    }

    /// Vertices of the sublevel set `{value <= level}` as a polygon: the convex
    /// hull of the pixel centers inside it, simplified with Douglas-Peucker at
    /// `tolerance` (planar units, a couple of pixels works well). Corners cut
    /// by the pixel grid and nearly straight vertices are merged away.
    pub fn level_polygon(&self, level: f64, tolerance: f64) -> Vec<(f64, f64)> {
        let n = self.grid.resolution;
        let mut pts = Vec::new();
        for row in 0..n {
            for col in 0..n {
                if self.get(col, row).is_some_and(|v| v <= level) {
                    pts.push(self.grid.pixel_center(col, row));
                }
            }
        }
        simplify_closed(&convex_hull(pts), tolerance)
    }
}

pub fn render_distance_field(
    distance: FieldDistance,
    center: &SimplexPoint,
    resolution: usize,
) -> Result<ScalarField> {
    check_in_triangle(center, "center")?;
    let grid = TriangleGrid::new(resolution)?;
    let c = center.coords();
    let values = grid
        .points()
        .into_iter()
        .map(|p| {
            p.map(|p| {
                let p = p.coords();
                match distance {
                    FieldDistance::Hilbert => geometry::hilbert_unchecked(p, c),
                    FieldDistance::FunkForward => geometry::funk_unchecked(p, c),
                    FieldDistance::FunkReverse => geometry::funk_unchecked(c, p),
                    FieldDistance::Aitchison => geometry::aitchison_unchecked(p, c),
                }
            })
        })
        .collect();
    Ok(ScalarField { grid, values })
}

/// A fixed 16-color palette; site `i` is drawn in color `i % 16`.
pub const PALETTE: [[u8; 3]; 16] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
    [255, 250, 200],
    [128, 0, 0],
    [0, 0, 128],
];

/// Per-pixel nearest-site labels; `None` outside the triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelField {
    pub grid: TriangleGrid,
    pub labels: Vec<Option<usize>>,
}

impl LabelField {
    pub fn get(&self, col: usize, row: usize) -> Option<usize> {
        self.labels[row * self.grid.resolution + col]
    }

    /// Binary PPM; outside pixels are white.
    pub fn to_ppm(&self) -> Vec<u8> {
        let n = self.grid.resolution;
        let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
        for label in &self.labels {
            out.extend_from_slice(&match label {
                None => [255, 255, 255],
                Some(i) => PALETTE[i % PALETTE.len()],
            });
        }
        out
    }
}

/// Labels each pixel with its nearest site; ties go to the lowest index.
pub fn render_voronoi(
    sites: &[SimplexPoint],
    distance: VoronoiDistance,
    resolution: usize,
) -> Result<LabelField> {
    if sites.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 sites".into()));
    }
    for (i, s) in sites.iter().enumerate() {
        check_in_triangle(s, "site")?;
        if sites[..i].iter().any(|t| t == s) {
            return Err(Error::InvalidParameter(format!("site {i} is a duplicate")));
        }
    }
    let grid = TriangleGrid::new(resolution)?;
    let site_logs: Vec<Vec<f64>> = sites.iter().map(|s| geometry::clr(s.coords())).collect();
    let labels = grid
        .points()
        .into_iter()
        .map(|p| {
            p.map(|p| {
                let p = p.coords();
                let p_log = geometry::clr(p);
                let dist = |i: usize| match distance {
                    VoronoiDistance::Hilbert => geometry::hilbert_unchecked(p, sites[i].coords()),
                    VoronoiDistance::Aitchison => {
                        geometry::aitchison_unchecked(p, sites[i].coords())
                    }
                    VoronoiDistance::VariationNormOnLogRep => {
                        let diff: Vec<f64> =
                            p_log.iter().zip(&site_logs[i]).map(|(a, b)| a - b).collect();
                        geometry::variation_unchecked(&diff)
                    }
                };
                let mut best = 0;
                let mut best_d = dist(0);
                for i in 1..sites.len() {
                    let d = dist(i);
                    if d < best_d {
                        best = i;
                        best_d = d;
                    }
                }
                best
            })
        })
        .collect();
    Ok(LabelField { grid, labels })
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; counter-clockwise, no repeated endpoint.
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return ((p.0 - a.0).powi(2) + (p.1 - a.1).powi(2)).sqrt();
    }
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Douglas-Peucker on an open chain; pushes the kept interior vertices in order.
fn douglas_peucker(chain: &[(f64, f64)], tol: f64, keep: &mut Vec<(f64, f64)>) {
    if chain.len() < 3 {
        return;
    }
    let (a, b) = (chain[0], chain[chain.len() - 1]);
    let (idx, dmax) = chain[1..chain.len() - 1]
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 1, segment_distance(p, a, b)))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if dmax > tol {
        douglas_peucker(&chain[..=idx], tol, keep);
        keep.push(chain[idx]);
        douglas_peucker(&chain[idx..], tol, keep);
    }
}

/// Simplifies a closed polygon, splitting it at the vertex farthest from the first.
fn simplify_closed(poly: &[(f64, f64)], tol: f64) -> Vec<(f64, f64)> {
    if poly.len() < 4 {
        return poly.to_vec();
    }
    let far = (1..poly.len())
        .max_by(|&i, &j| {
            let di = segment_distance(poly[i], poly[0], poly[0]);
            let dj = segment_distance(poly[j], poly[0], poly[0]);
            di.partial_cmp(&dj).unwrap()
        })
        .unwrap();
    let first: Vec<(f64, f64)> = poly[..=far].to_vec();
    let mut second: Vec<(f64, f64)> = poly[far..].to_vec();
    second.push(poly[0]);
    let mut out = vec![poly[0]];
    douglas_peucker(&first, tol, &mut out);
    out.push(poly[far]);
    douglas_peucker(&second, tol, &mut out);
    drop_shallow_turns(&mut out, tol);
    let perimeter: f64 = (0..out.len())
        .map(|i| {
            let (a, b) = (out[i], out[(i + 1) % out.len()]);
            ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
        })
        .sum();
    merge_short_edges(&mut out, (3.0 * tol).max(0.05 * perimeter));
    drop_shallow_turns(&mut out, tol);
    out
}

/// Replaces the endpoints of edges shorter than `min_len` by their midpoint;
/// the pixel grid cuts sharp corners into short edges.
fn merge_short_edges(poly: &mut Vec<(f64, f64)>, min_len: f64) {
    while poly.len() > 3 {
        let k = poly.len();
        let (len, i) = (0..k)
            .map(|i| {
                let (a, b) = (poly[i], poly[(i + 1) % k]);
                (((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt(), i)
            })
            .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
            .unwrap();
        if len >= min_len {
            break;
        }
        let j = (i + 1) % k;
        poly[i] = ((poly[i].0 + poly[j].0) / 2.0, (poly[i].1 + poly[j].1) / 2.0);
        poly.remove(j);
    }
}

/// Smallest exterior angle (radians) a polygon vertex must turn through to be kept.
const MIN_TURN: f64 = 15.0 * std::f64::consts::PI / 180.0;

/// Removes vertices that lie within `tol` of the segment joining their
/// neighbors or barely change direction, shallowest first.
fn drop_shallow_turns(poly: &mut Vec<(f64, f64)>, tol: f64) {
    while poly.len() > 3 {
        let k = poly.len();
        let turn = |i: usize| {
            let (a, b, c) = (poly[(i + k - 1) % k], poly[i], poly[(i + 1) % k]);
            let t1 = (b.1 - a.1).atan2(b.0 - a.0);
            let t2 = (c.1 - b.1).atan2(c.0 - b.0);
            let mut d = (t2 - t1).abs();
            if d > std::f64::consts::PI {
                d = 2.0 * std::f64::consts::PI - d;
            }
            let near = segment_distance(b, a, c) <= tol;
            (if near { 0.0 } else { d }, i)
        };
        let (angle, i) = (0..k)
            .map(turn)
            .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
            .unwrap();
        if angle >= MIN_TURN {
            break;
        }
        poly.remove(i);
    }
}
