//! Planar points, the unit-disk edge predicate, and grid location/bucketing.
//!
//! Two grids are used by the solvers: the coarse grid with side 1/2, whose
//! cells have diameter below 1 so any two points of a cell are adjacent, and
//! the fine grid with side eps/8 used to pick representatives. Cells are
//! half-open: cell `(col, row)` of side `g` is `[col*g, (col+1)*g) x [row*g, (row+1)*g)`.

use std::collections::HashMap;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("floor input must be finite and non-negative, got {0}")]
    FloorDomain(f64),
    #[error("floor input {0} exceeds the representable cell range")]
    FloorOverflow(f64),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("source index {index} out of range for {len} points")]
    SourceOutOfRange { index: usize, len: usize },
    #[error("point {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("grid side must be positive and finite")]
    BadSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist2(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Euclidean distance. Every edge weight in the crate comes from here.
    #[inline]
    pub fn dist(self, other: Self) -> T {
        self.dist2(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// The unit-disk edge predicate, shared verbatim by solvers and oracle:
/// squared distance at most 1, no tolerance band.
#[inline]
pub fn within_unit<T: Scalar>(a: Point<T>, b: Point<T>) -> bool {
    a.dist2(b) <= T::one()
}

/// Input points with a designated source. Duplicates are distinct vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    points: Vec<Point<T>>,
    source: usize,
}

impl<T: Scalar> PointSet<T> {
    pub fn new(points: Vec<Point<T>>, source: usize) -> Result<Self, GeomError> {
        if points.is_empty() {
            return Err(GeomError::EmptyPointSet);
        }
        if source >= points.len() {
            return Err(GeomError::SourceOutOfRange { index: source, len: points.len() });
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(GeomError::NonFiniteCoordinate { index });
        }
        Ok(PointSet { points, source })
    }

    pub fn from_xy(xy: &[(T, T)], source: usize) -> Result<Self, GeomError> {
        Self::new(xy.iter().map(|&(x, y)| Point::new(x, y)).collect(), source)
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn source_point(&self) -> Point<T> {
        self.points[self.source]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_source(&self, source: usize) -> Result<Self, GeomError> {
        Self::new(self.points.clone(), source)
    }
}

/// Greatest integer `<= r` using only comparisons, addition, subtraction and
/// doubling/halving: find the smallest power of two above `r`, then peel off
/// halving powers of two. Every subtraction `r - u` has `u <= r < 2u` and is
/// therefore exact, so the result agrees with the native floor bit for bit.
pub fn simulated_floor<T: Scalar>(r: T) -> Result<i64, GeomError> {
    if !r.is_finite() || r < T::zero() {
        return Err(GeomError::FloorDomain(r.to_f64().unwrap_or(f64::NAN)));
    }
    let two = T::two();
    let mut unit = T::one();
    let mut k = 0u32;
    while r >= unit {
        unit = unit * two;
        k += 1;
        if k > 62 {
            return Err(GeomError::FloorOverflow(r.to_f64().unwrap_or(f64::NAN)));
        }
    }
    let mut rest = r;
    let mut acc = 0i64;
    while k > 0 {
        unit = unit / two;
        k -= 1;
        if rest >= unit {
            rest = rest - unit;
            acc += 1i64 << k;
        }
    }
    Ok(acc)
}

fn native_floor<T: Scalar>(r: T) -> Result<i64, GeomError> {
    if !r.is_finite() || r < T::zero() {
        return Err(GeomError::FloorDomain(r.to_f64().unwrap_or(f64::NAN)));
    }
    r.floor()
        .to_i64()
        .filter(|v| *v < (1i64 << 62))
        .ok_or(GeomError::FloorOverflow(r.to_f64().unwrap_or(f64::NAN)))
}

/// Which floor implementation grid location uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FloorMode {
    #[default]
    Native,
    Simulated,
}

impl FloorMode {
    pub fn floor<T: Scalar>(self, r: T) -> Result<i64, GeomError> {
        match self {
            FloorMode::Native => native_floor(r),
            FloorMode::Simulated => simulated_floor(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridIndex {
    pub col: i64,
    pub row: i64,
}

impl GridIndex {
    pub fn new(col: i64, row: i64) -> Self {
        GridIndex { col, row }
    }

    /// The 25 cells of the 5x5 patch centered here, row-major.
    pub fn patch(self) -> impl Iterator<Item = GridIndex> {
        (-2..=2).flat_map(move |dr| (-2..=2).map(move |dc| GridIndex::new(self.col + dc, self.row + dr)))
    }

    /// Whether `other` lies in the 5x5 patch centered here.
    pub fn in_patch(self, other: GridIndex) -> bool {
        (self.col - other.col).abs() <= 2 && (self.row - other.row).abs() <= 2
    }
}

/// A uniform grid anchored at the origin, for non-negative coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    side: T,
    floor: FloorMode,
}

impl<T: Scalar> Grid<T> {
    pub fn new(side: T, floor: FloorMode) -> Result<Self, GeomError> {
        if !(side.is_finite() && side > T::zero()) {
            return Err(GeomError::BadSide);
        }
        Ok(Grid { side, floor })
    }

    /// The coarse grid: side 1/2.
    pub fn coarse(floor: FloorMode) -> Self {
        Grid { side: T::half(), floor }
    }

    pub fn side(&self) -> T {
        self.side
    }

    pub fn floor_mode(&self) -> FloorMode {
        self.floor
    }

    pub fn locate(&self, p: Point<T>) -> Result<GridIndex, GeomError> {
        Ok(GridIndex::new(self.floor.floor(p.x / self.side)?, self.floor.floor(p.y / self.side)?))
    }
}

/// Locates `p` in the grid of the given side with the floor-free procedure.
pub fn locate_cell<T: Scalar>(p: Point<T>, side: T) -> Result<GridIndex, GeomError> {
    Grid::new(side, FloorMode::Simulated)?.locate(p)
}

/// A point set translated so the source sits at `(n, n)`. Points outside the
/// square `[0, 2n]^2` are farther than `n - 1` from the source, longer than any
/// simple path, hence unreachable; they are flagged and never gridded.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized<T> {
    pub points: PointSet<T>,
    pub outside: Vec<bool>,
}

impl<T: Scalar> Normalized<T> {
    pub fn is_outside(&self, i: usize) -> bool {
        self.outside[i]
    }
}

pub fn normalize_points<T: Scalar>(ps: &PointSet<T>) -> Normalized<T> {
    let n = T::from_usize(ps.len()).expect("point count representable");
    let s = ps.source_point();
    let (dx, dy) = (n - s.x, n - s.y);
    let hi = n + n;
    let zero = T::zero();
    let mut outside = Vec::with_capacity(ps.len());
    let points: Vec<Point<T>> = ps
        .points()
        .iter()
        .map(|p| {
            let q = Point::new(p.x + dx, p.y + dy);
            outside.push(!(q.x >= zero && q.x <= hi && q.y >= zero && q.y <= hi));
            q
        })
        .collect();
    // The source lands exactly on (n, n) only when the translation is exact;
    // pin it so it is never flagged.
    let mut points = points;
    points[ps.source()] = Point::new(n, n);
    outside[ps.source()] = false;
    Normalized {
        points: PointSet { points, source: ps.source() },
        outside,
    }
}

/// Per-cell lists of point indices for one grid.
#[derive(Debug, Clone)]
pub struct CellBuckets<T> {
    grid: Grid<T>,
    cells: HashMap<GridIndex, Vec<usize>>,
    cell_of: Vec<Option<GridIndex>>,
}

/// Buckets every non-flagged point of a normalized set.
pub fn build_buckets<T: Scalar>(norm: &Normalized<T>, grid: Grid<T>) -> Result<CellBuckets<T>, GeomError> {
    let pts = norm.points.points();
    let mut cells: HashMap<GridIndex, Vec<usize>> = HashMap::new();
    let mut cell_of = vec![None; pts.len()];
    for (i, p) in pts.iter().enumerate() {
        if norm.outside[i] {
            continue;
        }
        let c = grid.locate(*p)?;
        cells.entry(c).or_default().push(i);
        cell_of[i] = Some(c);
    }
    Ok(CellBuckets { grid, cells, cell_of })
}

impl<T: Scalar> CellBuckets<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn side(&self) -> T {
        self.grid.side
    }

    /// Points of one cell; empty for untouched cells.
    pub fn cell(&self, c: GridIndex) -> &[usize] {
        self.cells.get(&c).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn cell_of(&self, i: usize) -> Option<GridIndex> {
        self.cell_of[i]
    }

    pub fn occupied(&self) -> impl Iterator<Item = (&GridIndex, &Vec<usize>)> {
        self.cells.iter()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// All points of the 5x5 patch centered at `c`. With side 1/2 this
    /// contains every neighbor of every point of `c`.
    pub fn patch_points(&self, c: GridIndex) -> Vec<usize> {
        let mut out = Vec::new();
        for cell in c.patch() {
            out.extend_from_slice(self.cell(cell));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn simulated_floor_examples() {
        assert_eq!(simulated_floor(0.0f64), Ok(0));
        assert_eq!(simulated_floor(3.7f64), Ok(3));
        assert_eq!(simulated_floor(1024.0f64), Ok(1024));
        assert_eq!(simulated_floor(1023.999_999f64), Ok(1023));
        assert_eq!(simulated_floor(0.999f32), Ok(0));
    }

    #[test]
    fn simulated_floor_rejects_bad_input() {
        assert!(matches!(simulated_floor(-0.5f64), Err(GeomError::FloorDomain(_))));
        assert!(simulated_floor(f64::NAN).is_err());
        assert!(simulated_floor(f64::INFINITY).is_err());
        assert!(matches!(simulated_floor(1e30f64), Err(GeomError::FloorOverflow(_))));
    }

    #[test]
    fn point_set_validation() {
        assert_eq!(PointSet::<f64>::new(vec![], 0), Err(GeomError::EmptyPointSet));
        assert!(matches!(PointSet::from_xy(&[(0.0, 0.0)], 1), Err(GeomError::SourceOutOfRange { .. })));
        assert!(matches!(
            PointSet::from_xy(&[(0.0, 0.0), (f64::NAN, 1.0)], 0),
            Err(GeomError::NonFiniteCoordinate { index: 1 })
        ));
    }

    #[test]
    fn normalize_examples() {
        let ps = PointSet::from_xy(&[(5.0, -3.0)], 0).unwrap();
        let norm = normalize_points(&ps);
        assert_eq!(norm.points.points()[0], p(1.0, 1.0));
        assert_eq!(norm.outside, vec![false]);

        let ps = PointSet::from_xy(&[(0.0, 0.0), (100.0, 0.0)], 0).unwrap();
        assert_eq!(normalize_points(&ps).outside, vec![false, true]);

        let ps = PointSet::from_xy(&[(0.0, 0.0), (0.5, 0.0)], 0).unwrap();
        let norm = normalize_points(&ps);
        assert_eq!(norm.outside, vec![false, false]);
        assert_eq!(norm.points.points()[0], p(2.0, 2.0));
        assert_eq!(norm.points.points()[1], p(2.5, 2.0));
    }

    #[test]
    fn locate_cell_examples() {
        assert_eq!(locate_cell(p(0.7, 0.3), 0.5), Ok(GridIndex::new(1, 0)));
        assert_eq!(locate_cell(p(0.5, 0.5), 0.5), Ok(GridIndex::new(1, 1)));
        assert_eq!(locate_cell(p(1.99, 0.01), 0.5), Ok(GridIndex::new(3, 0)));
        assert!(locate_cell(p(0.1, 0.1), 0.0).is_err());
    }

    fn norm_of(xy: &[(f64, f64)]) -> Normalized<f64> {
        // Identity normalization for hand-placed points already in the quadrant.
        let ps = PointSet::from_xy(xy, 0).unwrap();
        Normalized { outside: vec![false; ps.len()], points: ps }
    }

    #[test]
    fn bucket_examples() {
        let grid = Grid::coarse(FloorMode::Simulated);
        let b = build_buckets(&norm_of(&[(0.2, 0.2); 3]), grid).unwrap();
        assert_eq!(b.num_cells(), 1);
        assert_eq!(b.cell(GridIndex::new(0, 0)), &[0, 1, 2]);

        let b = build_buckets(&norm_of(&[(0.1, 0.1), (0.6, 0.1)]), grid).unwrap();
        assert_eq!(b.num_cells(), 2);
        assert_eq!(b.cell(GridIndex::new(0, 0)), &[0]);
        assert_eq!(b.cell(GridIndex::new(1, 0)), &[1]);
        assert!(b.cell(GridIndex::new(7, 7)).is_empty());
    }

    #[test]
    fn patch_examples() {
        let grid = Grid::coarse(FloorMode::Native);
        let b = build_buckets(&norm_of(&[(0.1, 0.1), (0.2, 0.3), (0.4, 0.4)]), grid).unwrap();
        assert_eq!(b.patch_points(GridIndex::new(0, 0)), vec![0, 1, 2]);

        let b = build_buckets(&norm_of(&[(0.1, 0.1), (1.9, 0.1)]), grid).unwrap();
        assert_eq!(b.patch_points(GridIndex::new(0, 0)), vec![0]);

        let b = build_buckets(&norm_of(&[(0.1, 0.1), (1.2, 0.1)]), grid).unwrap();
        assert_eq!(b.patch_points(GridIndex::new(0, 0)), vec![0, 1]);
    }

    #[test]
    fn unit_predicate_is_boundary_inclusive() {
        assert!(within_unit(p(0.0, 0.0), p(1.0, 0.0)));
        assert!(!within_unit(p(0.0, 0.0), p(1.000_000_1, 0.0)));
    }
}
