use super::{Rect, Region};
use crate::error::{Result, SernError};
use crate::model::Metric;

/// Square-cell tiling of a region's bounding rectangle.
///
/// Cells are indexed `(col, row)` with `col < cols` along x and `row < rows`
/// along y; the linear bucket index is row-major, `row * cols + col`.
#[derive(Clone, Debug)]
pub struct BucketGrid {
    origin: [f64; 2],
    side: f64,
    cols: usize,
    rows: usize,
    areas: Vec<f64>,
    probs: Vec<f64>,
    interior: Vec<bool>,
    region_area: f64,
}

impl BucketGrid {
    /// Covers `region` with `cols x rows` square cells, `max(cols, rows) == m`.
    pub fn new(region: &Region, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(SernError::param("grid size must be at least 1"));
        }
        let region_area = region.area();
        if region_area.is_nan() || region_area <= 0.0 {
            return Err(SernError::param("region has zero area"));
        }
        let b = region.bounds();
        let (w, h) = (b.width(), b.height());
        let side = w.max(h) / m as f64;
        let fit = |extent: f64| -> usize {
            let k = (extent / side - 1e-9 * m as f64).ceil() as usize;
            k.clamp(1, m)
        };
        let (cols, rows) = (fit(w), fit(h));
        let mut grid = BucketGrid {
            origin: [b.x0, b.y0],
            side,
            cols,
            rows,
            areas: Vec::with_capacity(cols * rows),
            probs: Vec::with_capacity(cols * rows),
            interior: Vec::with_capacity(cols * rows),
            region_area,
        };
        for idx in 0..cols * rows {
            let cell = grid.cell_rect(idx);
            let inside = region.covers(&cell);
            let area = if inside {
                cell.area()
            } else {
                region.intersection_area(&cell)
            };
            grid.interior.push(inside);
            grid.areas.push(area);
        }
        let total: f64 = grid.areas.iter().sum();
        grid.probs = grid.areas.iter().map(|a| a / total).collect();
        Ok(grid)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn region_area(&self) -> f64 {
        self.region_area
    }

    pub fn linear(&self, col: usize, row: usize) -> usize {
        row * self.cols + col
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.cols, idx / self.cols)
    }

    pub fn cell_rect(&self, idx: usize) -> Rect {
        let (col, row) = self.coords(idx);
        let x0 = self.origin[0] + col as f64 * self.side;
        let y0 = self.origin[1] + row as f64 * self.side;
        Rect::new(
            x0,
            y0,
            self.origin[0] + (col + 1) as f64 * self.side,
            self.origin[1] + (row + 1) as f64 * self.side,
        )
    }

    /// Area of the cell intersected with the region, `A_{I,J}`.
    pub fn cell_area(&self, idx: usize) -> f64 {
        self.areas[idx]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    /// Placement probabilities `A_{I,J} / A` in linear order.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// True when the whole cell lies in the region, so candidates need no test.
    pub fn is_interior(&self, idx: usize) -> bool {
        self.interior[idx]
    }

    /// Cell owning `p`. Points on a shared grid line go to the lower index.
    pub fn cell_of(&self, p: [f64; 2]) -> usize {
        let locate = |v: f64, o: f64, n: usize| -> usize {
            let k = ((v - o) / self.side).ceil() as i64 - 1;
            k.clamp(0, n as i64 - 1) as usize
        };
        self.linear(
            locate(p[0], self.origin[0], self.cols),
            locate(p[1], self.origin[1], self.rows),
        )
    }

    /// Smallest distance between a point of a cell and a point of the cell
    /// offset by `(dcol, drow)`.
    pub fn min_bucket_distance(&self, dcol: usize, drow: usize, metric: &Metric) -> f64 {
        let gx = dcol.saturating_sub(1) as f64 * self.side;
        let gy = drow.saturating_sub(1) as f64 * self.side;
        metric.gap_distance(gx, gy)
    }

    /// Largest distance between points of two cells at offset `(dcol, drow)`.
    pub fn max_bucket_distance(&self, dcol: usize, drow: usize, metric: &Metric) -> f64 {
        let gx = (dcol + 1) as f64 * self.side;
        let gy = (drow + 1) as f64 * self.side;
        metric.span_distance(gx, gy)
    }

    /// Bytes held by the per-cell tables.
    pub fn heap_bytes(&self) -> usize {
        self.areas.capacity() * 8 + self.probs.capacity() * 8 + self.interior.capacity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;

    #[test]
    fn unit_square_single_cell() {
        let g = BucketGrid::new(&Region::unit_square(), 1).unwrap();
        assert_eq!((g.cols(), g.rows()), (1, 1));
        assert_eq!(g.cell_area(0), 1.0);
        assert_eq!(g.probabilities(), &[1.0]);
        assert!(g.is_interior(0));
    }

    #[test]
    fn unit_square_ten() {
        let g = BucketGrid::new(&Region::unit_square(), 10).unwrap();
        assert_eq!(g.len(), 100);
        for k in 0..100 {
            assert!((g.cell_area(k) - 0.01).abs() < 1e-15);
            assert!((g.probabilities()[k] - 0.01).abs() < 1e-15);
            assert!(g.is_interior(k));
        }
    }

    #[test]
    fn two_by_one_rectangle() {
        let g = BucketGrid::new(&Region::rectangle(2.0, 1.0).unwrap(), 10).unwrap();
        assert_eq!((g.cols(), g.rows()), (10, 5));
        assert!((g.side() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_grid_rejected() {
        assert!(BucketGrid::new(&Region::unit_square(), 0).is_err());
    }

    #[test]
    fn cell_ownership_ties_go_low() {
        let g = BucketGrid::new(&Region::unit_square(), 4).unwrap();
        assert_eq!(g.cell_of([0.0, 0.0]), 0);
        assert_eq!(g.cell_of([0.25, 0.1]), 0);
        assert_eq!(g.cell_of([0.2500001, 0.1]), 1);
        assert_eq!(g.cell_of([1.0, 1.0]), 15);
        assert_eq!(g.cell_of([0.3, 0.5]), g.linear(1, 1));
    }

    #[test]
    fn outside_cells_have_zero_area() {
        let disk = Region::ellipse(1.0, 1.0).unwrap();
        let g = BucketGrid::new(&disk, 8).unwrap();
        // corner cell [-1,-0.75]^2 lies outside the unit disk
        assert_eq!(g.cell_area(0), 0.0);
        assert_eq!(g.probabilities()[0], 0.0);
        let tri = Region::Polygon(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap());
        let g = BucketGrid::new(&tri, 4).unwrap();
        assert_eq!(g.cell_area(g.linear(3, 3)), 0.0);
        assert!(g.is_interior(0));
    }

    #[test]
    fn bucket_distance_examples() {
        let g = BucketGrid::new(&Region::unit_square(), 10).unwrap();
        for m in [Metric::Euclidean, Metric::Manhattan, Metric::Max, Metric::Discrete] {
            assert_eq!(g.min_bucket_distance(0, 0, &m), 0.0);
            assert_eq!(g.min_bucket_distance(1, 0, &m), 0.0);
        }
        let d = g.min_bucket_distance(3, 4, &Metric::Euclidean);
        assert!((d - (0.2f64.powi(2) + 0.3f64.powi(2)).sqrt()).abs() < 1e-12);
        assert!((d - 0.36056).abs() < 1e-5);
        assert!((g.min_bucket_distance(3, 4, &Metric::Manhattan) - 0.5).abs() < 1e-12);
        assert!((g.min_bucket_distance(3, 4, &Metric::Max) - 0.3).abs() < 1e-12);
        assert_eq!(g.min_bucket_distance(3, 4, &Metric::Discrete), 2.0);
        assert_eq!(g.min_bucket_distance(3, 1, &Metric::Discrete), 1.0);
    }
}
