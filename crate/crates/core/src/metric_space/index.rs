//! Uniform bucket grids over point coordinates.
//!
//! Range queries return candidate ids from every cell overlapping the query box;
//! callers filter candidates by the exact metric.

/// Largest number of cells a grid may allocate before its cell size is coarsened.
const MAX_CELLS: usize = 1 << 22;

#[derive(Clone, Debug)]
pub struct BucketGrid {
    dim: usize,
    origin: [f64; 3],
    cell: f64,
    shape: [usize; 3],
    buckets: Vec<Vec<u32>>,
}

impl BucketGrid {
    /// An empty grid covering the box `[lo, hi]` (first `dim` components) with the
    /// requested cell size. Dimensions above 3 collapse to a single bucket.
    pub fn new(dim: usize, lo: [f64; 3], hi: [f64; 3], cell: f64) -> Self {
        if dim == 0 || dim > 3 {
            return Self {
                dim,
                origin: [0.0; 3],
                cell: f64::INFINITY,
                shape: [1, 1, 1],
                buckets: vec![Vec::new()],
            };
        }
        let mut cell = cell.max(1e-12);
        let shape = loop {
            let mut shape = [1usize; 3];
            let mut total = 1usize;
            for d in 0..dim {
                let extent = (hi[d] - lo[d]).max(0.0);
                shape[d] = (extent / cell).floor() as usize + 1;
                total = total.saturating_mul(shape[d]);
            }
            if total <= MAX_CELLS {
                break shape;
            }
            cell *= 2.0;
        };
        let total = shape.iter().product();
        Self {
            dim,
            origin: lo,
            cell,
            shape,
            buckets: vec![Vec::new(); total],
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn axis_cell(&self, d: usize, x: f64) -> isize {
        ((x - self.origin[d]) / self.cell).floor() as isize
    }

    fn flat(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.shape[1] + idx[1]) * self.shape[2] + idx[2]
    }

    pub fn insert(&mut self, id: u32, x: &[f64]) {
        let slot = if self.cell.is_infinite() {
            0
        } else {
            let mut idx = [0usize; 3];
            for d in 0..self.dim {
                let c = self.axis_cell(d, x[d]).clamp(0, self.shape[d] as isize - 1);
                idx[d] = c as usize;
            }
            self.flat(idx)
        };
        self.buckets[slot].push(id);
    }

    /// Calls `f` with every id stored in a cell that meets the box of half-width `radius`
    /// around `x`.
    pub fn for_each_candidate(&self, x: &[f64], radius: f64, mut f: impl FnMut(u32)) {
        if self.cell.is_infinite() {
            self.buckets[0].iter().copied().for_each(f);
            return;
        }
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for d in 0..self.dim {
            let max = self.shape[d] as isize - 1;
            let a = self.axis_cell(d, x[d] - radius).clamp(0, max);
            let b = self.axis_cell(d, x[d] + radius).clamp(0, max);
            lo[d] = a as usize;
            hi[d] = b as usize;
        }
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    for &id in &self.buckets[self.flat([i, j, k])] {
                        f(id);
                    }
                }
            }
        }
    }
}
