use alloc::vec::Vec;

/// A set of points in ℝᵈ stored row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "points need at least one coordinate");
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, len: usize) -> Self {
        assert!(dim >= 1, "points need at least one coordinate");
        Self {
            dim,
            coords: Vec::with_capacity(dim * len),
        }
    }

    /// Wraps a row-major coordinate buffer. Panics if its length is not a multiple of `dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Self {
        assert!(dim >= 1 && coords.len() % dim == 0, "ragged point buffer");
        Self { dim, coords }
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: impl IntoIterator<Item = R>) -> Self {
        let mut cloud = Self::new(dim);
        for r in rows {
            cloud.push(r.as_ref());
        }
        cloud
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point has wrong dimension");
        self.coords.extend_from_slice(p);
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn iter_mut(&mut self) -> impl ExactSizeIterator<Item = &mut [f64]> + '_ {
        self.coords.chunks_exact_mut(self.dim)
    }

    /// All values of coordinate `axis`.
    pub fn column(&self, axis: usize) -> impl ExactSizeIterator<Item = f64> + '_ {
        assert!(axis < self.dim);
        self.coords.chunks_exact(self.dim).map(move |p| p[axis])
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn extend(&mut self, other: &PointCloud) {
        assert_eq!(self.dim, other.dim);
        self.coords.extend_from_slice(&other.coords);
    }

    pub fn all_finite(&self) -> bool {
        self.coords.iter().all(|v| v.is_finite())
    }
}
