//! The ground metric: point storage, distance evaluation and normalization.
//!
//! A [`PointSet`] is either coordinate-backed (with an L1, L2 or L∞ norm) or
//! backed by an explicit distance matrix. On construction every distance is
//! rescaled so that the minimum interpoint distance is 1; the factor is kept
//! in [`PointSet::scale`] so objectives can be reported in original units.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Index of a point of the ground metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointId(pub u32);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(u32::try_from(i).expect("point index exceeds u32"))
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point carrying an integer multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightedPoint {
    pub point: PointId,
    pub weight: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub(crate) fn to_code(self) -> u8 {
        match self {
            Norm::L1 => 1,
            Norm::L2 => 2,
            Norm::Linf => 0,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Norm> {
        match code {
            1 => Some(Norm::L1),
            2 => Some(Norm::L2),
            0 => Some(Norm::Linf),
            _ => None,
        }
    }

    #[inline]
    fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::Linf => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "L1",
            Norm::L2 => "L2",
            Norm::Linf => "Linf",
        })
    }
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" | "l_inf" | "inf" => Ok(Norm::Linf),
            other => Err(format!("unknown norm {other:?}")),
        }
    }
}

/// Input layout accepted by [`load_points`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// One point per line, whitespace-separated coordinates, optional
    /// `#dim D norm L2` header.
    Coords,
    /// A line holding `m`, then `m` rows of `m` distances.
    Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Backing {
    Coords {
        dim: usize,
        norm: Norm,
        coords: Vec<f64>,
    },
    Matrix {
        dists: Vec<f64>,
    },
}

/// The ground metric `M`, normalized so that the closest pair is at distance 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    m: usize,
    backing: Backing,
    scale: f64,
}

/// Global statistics of a normalized metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricStats {
    /// Normalized diameter.
    pub diameter: f64,
    /// Ratio of the largest to the smallest interpoint distance.
    pub aspect_ratio: f64,
    /// Smallest level whose radius `2^i_top` strictly exceeds the diameter.
    pub i_top: i32,
    /// Minimum interpoint distance before normalization.
    pub min_dist: f64,
}

impl PointSet {
    /// Builds a coordinate-backed point set from a row-major `m × dim` buffer.
    pub fn from_coords(dim: usize, coords: Vec<f64>, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parse {
                line: 0,
                message: "dimension must be positive".into(),
            });
        }
        if coords.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Parse {
                line: 0,
                message: format!("{} values do not form rows of {dim}", coords.len()),
            });
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::Parse {
                line: pos / dim + 1,
                message: "non-finite coordinate".into(),
            });
        }
        let m = coords.len() / dim;
        let raw = PointSet {
            m,
            backing: Backing::Coords { dim, norm, coords },
            scale: 1.0,
        };
        raw.normalized()
    }

    /// Builds a matrix-backed point set from a row-major `m × m` buffer.
    ///
    /// The matrix must be symmetric (up to a relative 1e-9), have a zero
    /// diagonal, positive off-diagonal entries and satisfy the triangle
    /// inequality. The triangle check is exhaustive for `m <= 200` and uses
    /// 10^5 sampled triples otherwise.
    pub fn from_matrix(m: usize, mut dists: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyPointSet);
        }
        if dists.len() != m * m {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected {} entries, found {}", m * m, dists.len()),
            });
        }
        for a in 0..m {
            if dists[a * m + a] != 0.0 {
                return Err(Error::NonZeroDiagonal(a));
            }
            for b in (a + 1)..m {
                let ab = dists[a * m + b];
                let ba = dists[b * m + a];
                if !ab.is_finite() || !ba.is_finite() {
                    return Err(Error::Parse {
                        line: a + 2,
                        message: "non-finite distance".into(),
                    });
                }
                if ab < 0.0 || ba < 0.0 {
                    return Err(Error::NegativeDistance(a, b));
                }
                if (ab - ba).abs() > 1e-9 * ab.max(ba) {
                    return Err(Error::NonSymmetric(a, b));
                }
                if ab == 0.0 {
                    return Err(Error::DuplicatePoint(a, b));
                }
                dists[b * m + a] = ab;
            }
        }
        check_triangle(m, &dists)?;
        let raw = PointSet {
            m,
            backing: Backing::Matrix { dists },
            scale: 1.0,
        };
        raw.normalized()
    }

    /// Reassembles a point set that was normalized earlier (index loading).
    pub(crate) fn from_parts(m: usize, backing: Backing, scale: f64) -> Self {
        PointSet { m, backing, scale }
    }

    pub(crate) fn backing(&self) -> &Backing {
        &self.backing
    }

    fn normalized(self) -> Result<Self> {
        if self.m == 1 {
            return Ok(self);
        }
        let (a, b, raw_min) = self.closest_pair();
        if raw_min == 0.0 {
            return Err(Error::DuplicatePoint(a.min(b), a.max(b)));
        }
        let mut scale = 1.0 / raw_min;
        let mut out = self.rescaled(scale);
        // Rounding can leave the closest pair a hair below 1; nudge upward.
        for _ in 0..64 {
            let (_, _, mn) = out.closest_pair();
            if mn >= 1.0 {
                out.scale = scale;
                return Ok(out);
            }
            scale = if mn > 1.0 - 1e-12 {
                scale.next_up()
            } else {
                scale / mn
            };
            out = self.rescaled(scale);
        }
        out.scale = scale;
        Ok(out)
    }

    fn rescaled(&self, scale: f64) -> PointSet {
        let backing = match &self.backing {
            Backing::Coords { dim, norm, coords } => Backing::Coords {
                dim: *dim,
                norm: *norm,
                coords: coords.iter().map(|x| x * scale).collect(),
            },
            Backing::Matrix { dists } => Backing::Matrix {
                dists: dists.iter().map(|x| x * scale).collect(),
            },
        };
        PointSet {
            m: self.m,
            backing,
            scale,
        }
    }

    /// Number of points `m`.
    #[inline]
    pub fn len(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Multiplier applied to raw distances at load time.
    #[inline]
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Converts a normalized distance (or objective) back to input units.
    #[inline]
    pub fn to_original(&self, normalized: f64) -> f64 {
        normalized / self.scale
    }

    pub fn ids(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.m).map(PointId::from)
    }

    pub fn contains(&self, p: PointId) -> bool {
        p.index() < self.m
    }

    pub fn check(&self, p: PointId) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::InvalidPoint {
                id: p.index(),
                m: self.m,
            })
        }
    }

    /// Normalized coordinates of a point, if coordinate-backed.
    pub fn coords(&self, p: PointId) -> Option<&[f64]> {
        match &self.backing {
            Backing::Coords { dim, coords, .. } => {
                Some(&coords[p.index() * dim..(p.index() + 1) * dim])
            }
            Backing::Matrix { .. } => None,
        }
    }

    /// Normalized distance. Panics on out-of-range ids; see [`Self::try_distance`].
    #[inline]
    pub fn distance(&self, a: PointId, b: PointId) -> f64 {
        self.dist_idx(a.index(), b.index())
    }

    pub fn try_distance(&self, a: PointId, b: PointId) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.distance(a, b))
    }

    #[inline]
    pub(crate) fn dist_idx(&self, a: usize, b: usize) -> f64 {
        match &self.backing {
            Backing::Coords { dim, norm, coords } => {
                let d = *dim;
                norm.eval(&coords[a * d..(a + 1) * d], &coords[b * d..(b + 1) * d])
            }
            Backing::Matrix { dists } => dists[a * self.m + b],
        }
    }

    /// Exact closest pair. Coordinates use a sweep along the first axis, which
    /// is exact for all supported norms since each dominates one-axis gaps.
    fn closest_pair(&self) -> (usize, usize, f64) {
        let m = self.m;
        let mut best = (0, 0, f64::INFINITY);
        match &self.backing {
            Backing::Coords { dim, coords, .. } => {
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&a, &b| coords[a * dim].total_cmp(&coords[b * dim]).then(a.cmp(&b)));
                for (k, &a) in order.iter().enumerate() {
                    for &b in &order[k + 1..] {
                        if coords[b * dim] - coords[a * dim] > best.2 {
                            break;
                        }
                        let d = self.dist_idx(a, b);
                        if d < best.2 {
                            best = (a, b, d);
                        }
                    }
                }
            }
            Backing::Matrix { dists } => {
                for a in 0..m {
                    for b in (a + 1)..m {
                        if dists[a * m + b] < best.2 {
                            best = (a, b, dists[a * m + b]);
                        }
                    }
                }
            }
        }
        best
    }

    /// Exact diameter and derived statistics.
    ///
    /// Matrix backings scan every pair. Coordinate backings prune the pair
    /// scan with radii around the centroid (`d(a,b) <= r_a + r_b`), which
    /// returns the same maximum as the full scan.
    pub fn compute_stats(&self) -> Result<MetricStats> {
        if self.m < 2 {
            return Err(Error::DegenerateStats);
        }
        let diameter = self.diameter();
        let (_, _, min_norm) = self.closest_pair();
        Ok(MetricStats {
            diameter,
            aspect_ratio: diameter / min_norm,
            i_top: top_level_for(diameter),
            min_dist: min_norm / self.scale,
        })
    }

    fn diameter(&self) -> f64 {
        let m = self.m;
        match &self.backing {
            Backing::Matrix { dists } => dists.iter().copied().fold(0.0, f64::max),
            Backing::Coords { dim, norm, coords } => {
                let d = *dim;
                let mut centroid = vec![0.0; d];
                for row in coords.chunks_exact(d) {
                    for (c, x) in centroid.iter_mut().zip(row) {
                        *c += x;
                    }
                }
                centroid.iter_mut().for_each(|c| *c /= m as f64);
                let radius: Vec<f64> = coords
                    .chunks_exact(d)
                    .map(|row| norm.eval(row, &centroid))
                    .collect();
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&a, &b| radius[b].total_cmp(&radius[a]).then(a.cmp(&b)));
                let slack = 1.0 + 1e-9;
                let mut best = 0.0f64;
                for (k, &a) in order.iter().enumerate() {
                    if k + 1 < m && (radius[a] + radius[order[k + 1]]) * slack < best {
                        break;
                    }
                    for &b in &order[k + 1..] {
                        if (radius[a] + radius[b]) * slack < best {
                            break;
                        }
                        best = best.max(self.dist_idx(a, b));
                    }
                }
                best
            }
        }
    }
}

/// Smallest `i >= 0` with `2^i > diameter`.
pub fn top_level_for(diameter: f64) -> i32 {
    let mut level = 0;
    let mut radius = 1.0f64;
    while radius <= diameter {
        radius *= 2.0;
        level += 1;
    }
    level
}

fn check_triangle(m: usize, dists: &[f64]) -> Result<()> {
    let violates = |a: usize, b: usize, c: usize| {
        let ab = dists[a * m + b];
        let detour = dists[a * m + c] + dists[c * m + b];
        ab > detour + 1e-9 * ab.max(detour)
    };
    if m <= 200 {
        for a in 0..m {
            for b in (a + 1)..m {
                for c in 0..m {
                    if c != a && c != b && violates(a, b, c) {
                        return Err(Error::TriangleViolation(a, b, c));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7472_6961_6e67_6c65);
        for _ in 0..100_000 {
            let (a, b, c) = (
                rng.gen_range(0..m),
                rng.gen_range(0..m),
                rng.gen_range(0..m),
            );
            if a != b && b != c && a != c && violates(a, b, c) {
                return Err(Error::TriangleViolation(a, b, c));
            }
        }
    }
    Ok(())
}

/// Parses a point set from text in the given layout and normalizes it.
pub fn load_points<R: BufRead>(reader: R, format: InputFormat) -> Result<PointSet> {
    match format {
        InputFormat::Coords => parse_coords(reader),
        InputFormat::Matrix => parse_matrix(reader),
    }
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid number {tok:?}"),
            })
        })
        .collect()
}

fn parse_header(line: &str, lineno: usize) -> Result<(Option<usize>, Norm)> {
    let bad = |message: String| Error::Parse {
        line: lineno,
        message,
    };
    let mut toks = line.trim_start_matches('#').split_whitespace();
    let mut dim = None;
    let mut norm = Norm::L2;
    while let Some(key) = toks.next() {
        let value = toks
            .next()
            .ok_or_else(|| bad(format!("header key {key:?} has no value")))?;
        match key {
            "dim" => {
                dim = Some(
                    value
                        .parse()
                        .map_err(|_| bad(format!("invalid dimension {value:?}")))?,
                )
            }
            "norm" => norm = value.parse().map_err(bad)?,
            other => return Err(bad(format!("unknown header key {other:?}"))),
        }
    }
    Ok((dim, norm))
}

fn parse_coords<R: BufRead>(reader: R) -> Result<PointSet> {
    let mut dim: Option<usize> = None;
    let mut norm = Norm::L2;
    let mut coords = Vec::new();
    let mut seen_data = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if !seen_data && idx == 0 && rest.trim_start().starts_with("dim") {
                let (d, n) = parse_header(trimmed, lineno)?;
                dim = d;
                norm = n;
            }
            continue;
        }
        let row = parse_row(trimmed, lineno)?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected {d} coordinates, found {}", row.len()),
                })
            }
            Some(_) => {}
        }
        seen_data = true;
        coords.extend(row);
    }
    let dim = dim.ok_or(Error::EmptyPointSet)?;
    if coords.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    PointSet::from_coords(dim, coords, norm)
}

fn parse_matrix<R: BufRead>(reader: R) -> Result<PointSet> {
    let mut lines = reader
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let (idx, first) = lines.next().ok_or(Error::EmptyPointSet)?;
    let first = first?;
    let m: usize = first.trim().parse().map_err(|_| Error::Parse {
        line: idx + 1,
        message: format!("expected point count, found {:?}", first.trim()),
    })?;
    let mut dists = Vec::with_capacity(m * m);
    let mut rows = 0;
    for (idx, line) in lines {
        let line = line?;
        let row = parse_row(line.trim(), idx + 1)?;
        if row.len() != m {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected {m} distances, found {}", row.len()),
            });
        }
        rows += 1;
        if rows > m {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("more than {m} rows"),
            });
        }
        dists.extend(row);
    }
    if rows != m {
        return Err(Error::Parse {
            line: 0,
            message: format!("expected {m} rows, found {rows}"),
        });
    }
    PointSet::from_matrix(m, dists)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::from_coords(1, xs.to_vec(), Norm::L2).unwrap()
    }

    #[test]
    fn already_normalized_line_keeps_unit_scale() {
        let ps = line(&[0.0, 1.0, 2.0, 4.0]);
        assert_eq!(ps.len(), 4);
        assert_eq!(ps.scale(), 1.0);
        assert_eq!(ps.distance(PointId(0), PointId(3)), 4.0);
        assert_eq!(ps.distance(PointId(2), PointId(2)), 0.0);
    }

    #[test]
    fn half_spaced_line_is_rescaled() {
        let ps = line(&[0.0, 0.5, 1.0, 2.0]);
        assert_eq!(ps.scale(), 2.0);
        let xs: Vec<f64> = ps.ids().map(|p| ps.coords(p).unwrap()[0]).collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 4.0]);
        assert_eq!(ps.to_original(4.0), 2.0);
    }

    #[test]
    fn smallest_matrix_metric() {
        let ps = PointSet::from_matrix(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.distance(PointId(0), PointId(1)), 1.0);
    }

    #[test]
    fn matrix_lookup_divides_out_the_minimum() {
        let ps =
            PointSet::from_matrix(3, vec![0.0, 2.0, 3.0, 2.0, 0.0, 4.0, 3.0, 4.0, 0.0]).unwrap();
        assert_eq!(ps.scale(), 0.5);
        assert_eq!(ps.distance(PointId(0), PointId(2)), 1.5);
        assert_eq!(ps.distance(PointId(1), PointId(2)), 2.0);
    }

    #[test]
    fn stats_on_small_lines() {
        let s = line(&[0.0, 1.0, 2.0, 4.0]).compute_stats().unwrap();
        assert_eq!((s.diameter, s.aspect_ratio, s.i_top), (4.0, 4.0, 3));
        let s = line(&[0.0, 1.0]).compute_stats().unwrap();
        assert_eq!((s.diameter, s.aspect_ratio, s.i_top), (1.0, 1.0, 1));
        let xs: Vec<f64> = (0..8).map(f64::from).collect();
        let s = line(&xs).compute_stats().unwrap();
        assert_eq!((s.diameter, s.aspect_ratio, s.i_top), (7.0, 7.0, 3));
        assert!(matches!(
            line(&[3.0]).compute_stats(),
            Err(Error::DegenerateStats)
        ));
    }

    #[test]
    fn min_dist_is_reported_before_normalization() {
        let s = line(&[0.0, 0.5, 1.0, 2.0]).compute_stats().unwrap();
        assert_eq!(s.min_dist, 0.5);
        assert_eq!(s.diameter, 4.0);
    }

    #[test]
    fn out_of_range_id_is_an_error() {
        let ps = line(&[0.0, 1.0]);
        assert!(matches!(
            ps.try_distance(PointId(0), PointId(2)),
            Err(Error::InvalidPoint { id: 2, m: 2 })
        ));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            PointSet::from_matrix(2, vec![0.0, 1.0, 2.0, 0.0]),
            Err(Error::NonSymmetric(0, 1))
        ));
        assert!(matches!(
            PointSet::from_matrix(2, vec![0.0, -1.0, -1.0, 0.0]),
            Err(Error::NegativeDistance(0, 1))
        ));
        let bad = vec![0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0];
        assert!(matches!(
            PointSet::from_matrix(3, bad),
            Err(Error::TriangleViolation(0, 2, 1))
        ));
        assert!(matches!(
            PointSet::from_matrix(2, vec![0.0, 0.0, 0.0, 0.0]),
            Err(Error::DuplicatePoint(0, 1))
        ));
    }

    #[test]
    fn parses_coords_with_header() {
        let text = "#dim 2 norm L1\n0 0\n1 2\n\n3 1\n";
        let ps = load_points(text.as_bytes(), InputFormat::Coords).unwrap();
        assert_eq!(ps.len(), 3);
        // L1 distances 3, 4, 3 -> minimum 3
        assert!((ps.distance(PointId(0), PointId(2)) - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let err = load_points("0 0\n1\n".as_bytes(), InputFormat::Coords).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = load_points("0 0\n1 x\n".as_bytes(), InputFormat::Coords).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = load_points("2\n0 1\n1\n".as_bytes(), InputFormat::Matrix).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn parses_matrix() {
        let ps = load_points("3\n0 1 2\n1 0 1\n2 1 0\n".as_bytes(), InputFormat::Matrix).unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(ps.distance(PointId(0), PointId(2)), 2.0);
    }

    #[test]
    fn duplicate_coordinates_are_rejected() {
        assert!(matches!(
            PointSet::from_coords(1, vec![0.0, 3.0, 0.0], Norm::L2),
            Err(Error::DuplicatePoint(0, 2))
        ));
    }

    #[test]
    fn top_level_is_strictly_above_diameter() {
        assert_eq!(top_level_for(1.0), 1);
        assert_eq!(top_level_for(3.999), 2);
        assert_eq!(top_level_for(4.0), 3);
    }
}
