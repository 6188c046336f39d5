//! Bit-grid indicator. Cells are stored row-major with axis 0 slowest,
//! packed LSB-first into bytes — the exact payload layout of the NBG file
//! format, so saving and loading is a straight copy.

use super::Indicator;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vecn::MAX_DIM;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridIndicator {
    shape: Vec<usize>,
    /// `ceil(n_cells / 8)` bytes; bit `i` (LSB-first) is cell `i`.
    bits: Vec<u8>,
    n_cells: usize,
}

impl GridIndicator {
    /// All-empty grid. `shape` gives per-axis cell counts, axis 0 slowest.
    pub fn zeros(shape: &[usize]) -> Result<Self> {
        if shape.is_empty() || shape.len() > MAX_DIM {
            return Err(Error::Invalid(format!(
                "grid dimension must be 1..={MAX_DIM}, got {}",
                shape.len()
            )));
        }
        if shape.iter().any(|&s| s == 0) {
            return Err(Error::Invalid("grid axes must be nonzero".into()));
        }
        let n_cells = shape.iter().try_fold(1usize, |acc, &s| {
            acc.checked_mul(s)
                .filter(|&n| n <= 1 << 30)
                .ok_or_else(|| Error::Invalid("grid too large".into()))
        })?;
        Ok(Self {
            shape: shape.to_vec(),
            bits: vec![0; n_cells.div_ceil(8)],
            n_cells,
        })
    }

    /// Builds a grid by evaluating `f` at every cell center.
    pub fn from_fn<R: Real>(shape: &[usize], mut f: impl FnMut(&[R]) -> bool) -> Result<Self> {
        let mut g = Self::zeros(shape)?;
        let dim = shape.len();
        let mut center = [R::zero(); MAX_DIM];
        let mut idx = [0usize; MAX_DIM];
        for cell in 0..g.n_cells {
            g.unravel(cell, &mut idx);
            for a in 0..dim {
                center[a] = (R::from_f(idx[a] as f64) + R::from_f(0.5)) / R::from_f(shape[a] as f64);
            }
            if f(&center[..dim]) {
                g.set_cell(cell, true);
            }
        }
        Ok(g)
    }

    /// Rasterizes another indicator at this resolution via cell centers.
    pub fn rasterize<R: Real>(ind: &dyn Indicator<R>, shape: &[usize]) -> Result<Self> {
        if ind.dim() != shape.len() {
            return Err(Error::DimMismatch {
                expected: ind.dim(),
                got: shape.len(),
            });
        }
        Self::from_fn(shape, |x: &[R]| ind.eval(x))
    }

    /// Reconstructs a grid from the packed NBG payload layout.
    pub(crate) fn from_packed(shape: &[usize], bits: Vec<u8>) -> Result<Self> {
        let mut g = Self::zeros(shape)?;
        if bits.len() != g.bits.len() {
            return Err(Error::LengthMismatch {
                expected: g.bits.len(),
                got: bits.len(),
            });
        }
        // Padding bits past the last cell must be zero so that the
        // save-load round trip is byte-exact.
        if g.n_cells % 8 != 0 {
            let last = bits[bits.len() - 1];
            let used = g.n_cells % 8;
            if last >> used != 0 {
                return Err(Error::Invalid("nonzero padding bits in grid payload".into()));
            }
        }
        g.bits = bits;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub(crate) fn packed_bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of occupied cells.
    pub fn occupied_count(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Occupied fraction of the domain.
    pub fn occupancy(&self) -> f64 {
        self.occupied_count() as f64 / self.n_cells as f64
    }

    #[inline]
    pub fn get_cell(&self, flat: usize) -> bool {
        (self.bits[flat / 8] >> (flat % 8)) & 1 == 1
    }

    pub fn set_cell(&mut self, flat: usize, value: bool) {
        assert!(flat < self.n_cells, "cell index out of range");
        let mask = 1u8 << (flat % 8);
        if value {
            self.bits[flat / 8] |= mask;
        } else {
            self.bits[flat / 8] &= !mask;
        }
    }

    /// Flat index of a multi-index (row-major, axis 0 slowest).
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dim(), "index dimension mismatch");
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.shape[a]);
            flat = flat * self.shape[a] + i;
        }
        flat
    }

    pub fn set(&mut self, idx: &[usize], value: bool) {
        let flat = self.flat_index(idx);
        self.set_cell(flat, value);
    }

    pub fn get(&self, idx: &[usize]) -> bool {
        self.get_cell(self.flat_index(idx))
    }

    fn unravel(&self, mut flat: usize, out: &mut [usize; MAX_DIM]) {
        for a in (0..self.dim()).rev() {
            out[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
    }

    /// Iterates multi-indices of occupied cells.
    pub fn occupied_cells(&self) -> impl Iterator<Item = [usize; MAX_DIM]> + '_ {
        (0..self.n_cells).filter_map(move |flat| {
            if self.get_cell(flat) {
                let mut idx = [0usize; MAX_DIM];
                self.unravel(flat, &mut idx);
                Some(idx)
            } else {
                None
            }
        })
    }

    /// Extent of cell `idx` in domain coordinates.
    pub fn cell_bounds<R: Real>(&self, idx: &[usize; MAX_DIM]) -> ([R; MAX_DIM], [R; MAX_DIM]) {
        let mut lo = [R::zero(); MAX_DIM];
        let mut hi = [R::zero(); MAX_DIM];
        for a in 0..self.dim() {
            let s = R::from_f(self.shape[a] as f64);
            lo[a] = R::from_f(idx[a] as f64) / s;
            hi[a] = R::from_f((idx[a] + 1) as f64) / s;
        }
        (lo, hi)
    }

    /// Center of cell `idx` in domain coordinates.
    pub fn cell_center<R: Real>(&self, idx: &[usize; MAX_DIM]) -> [R; MAX_DIM] {
        let mut c = [R::zero(); MAX_DIM];
        for a in 0..self.dim() {
            c[a] = (R::from_f(idx[a] as f64) + R::from_f(0.5)) / R::from_f(self.shape[a] as f64);
        }
        c
    }

    /// Cell-wise OR of two same-shape grids.
    pub fn union(&self, other: &GridIndicator) -> Result<GridIndicator> {
        if self.shape != other.shape {
            return Err(Error::Invalid("union requires identical shapes".into()));
        }
        let mut out = self.clone();
        for (b, o) in out.bits.iter_mut().zip(&other.bits) {
            *b |= o;
        }
        Ok(out)
    }
}

impl<R: Real> Indicator<R> for GridIndicator {
    fn dim(&self) -> usize {
        self.shape.len()
    }

    fn eval(&self, x: &[R]) -> bool {
        assert_eq!(x.len(), self.shape.len(), "point dimension mismatch");
        let mut flat = 0usize;
        for (a, &xi) in x.iter().enumerate() {
            let v = xi.to_f();
            if !(0.0..=1.0).contains(&v) {
                return false;
            }
            let s = self.shape[a];
            // Closed cells: a point on a face belongs to the cell whose lower
            // boundary it is; x == 1.0 belongs to the last cell.
            let i = ((v * s as f64).floor() as usize).min(s - 1);
            flat = flat * s + i;
        }
        self.get_cell(flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, unit};

    #[test]
    fn single_cell_lookup_matches_floor_arithmetic() {
        let mut g = GridIndicator::zeros(&[4, 4]).unwrap();
        g.set(&[1, 1], true);
        // floor(0.3 * 4) = 1 on both axes
        assert!(Indicator::<f64>::eval(&g, &[0.3, 0.3]));
        assert!(!Indicator::<f64>::eval(&g, &[0.3, 0.6]));
        assert!(!Indicator::<f64>::eval(&g, &[0.1, 0.3]));
    }

    #[test]
    fn out_of_domain_is_free_space() {
        let mut g = GridIndicator::zeros(&[2, 2]).unwrap();
        for c in 0..4 {
            g.set_cell(c, true);
        }
        assert!(Indicator::<f64>::eval(&g, &[0.5, 0.5]));
        assert!(!Indicator::<f64>::eval(&g, &[1.2, 0.5]));
        assert!(!Indicator::<f64>::eval(&g, &[-0.1, 0.5]));
        // x == 1.0 is still inside the (closed) domain.
        assert!(Indicator::<f64>::eval(&g, &[1.0, 1.0]));
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn eval_panics_on_dimension_mismatch() {
        let g = GridIndicator::zeros(&[4, 4]).unwrap();
        Indicator::<f64>::eval(&g, &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn boundary_points_take_the_floor_cell() {
        let mut g = GridIndicator::zeros(&[4, 4]).unwrap();
        g.set(&[2, 2], true);
        // 0.5 is the lower face of cell 2.
        assert!(Indicator::<f64>::eval(&g, &[0.5, 0.5]));
        assert!(!Indicator::<f64>::eval(&g, &[0.4999, 0.5]));
    }

    #[test]
    fn eval_is_pure() {
        let mut g = GridIndicator::zeros(&[8, 8]).unwrap();
        g.set(&[3, 5], true);
        let p = [0.44f64, 0.69];
        let first = Indicator::<f64>::eval(&g, &p);
        for _ in 0..100 {
            assert_eq!(Indicator::<f64>::eval(&g, &p), first);
        }
    }

    #[test]
    fn monte_carlo_occupancy_matches_cell_fraction() {
        let mut g = GridIndicator::zeros(&[8, 8]).unwrap();
        let mut rng = stream(11, 0);
        for c in 0..64 {
            if rng.gen_bool(0.3) {
                g.set_cell(c, true);
            }
        }
        let p = g.occupancy();
        let n = 100_000;
        let mut rng = stream(11, 1);
        let mut hits = 0u64;
        for _ in 0..n {
            let x = [unit::<f64>(&mut rng), unit::<f64>(&mut rng)];
            if Indicator::<f64>::eval(&g, &x) {
                hits += 1;
            }
        }
        let est = hits as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (est - p).abs() <= 3.0 * sigma,
            "MC occupancy {est} vs exact {p} (3 sigma = {})",
            3.0 * sigma
        );
    }

    use rand::Rng;

    #[test]
    fn union_is_cellwise_or() {
        let mut a = GridIndicator::zeros(&[4, 4]).unwrap();
        let mut b = GridIndicator::zeros(&[4, 4]).unwrap();
        a.set(&[0, 0], true);
        b.set(&[3, 3], true);
        let u = a.union(&b).unwrap();
        assert!(u.get(&[0, 0]) && u.get(&[3, 3]));
        assert_eq!(u.occupied_count(), 2);
    }
}
