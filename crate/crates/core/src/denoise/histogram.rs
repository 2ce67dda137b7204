use alloc::vec::Vec;

/// Fixed-width histogram on `[lo, hi)` with under/overflow counters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(hi > lo && bins > 0, "empty histogram range");
        Self {
            lo,
            hi,
            counts: alloc::vec![0; bins],
            underflow: 0,
            overflow: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        if i == self.counts.len() {
            self.hi
        } else {
            self.lo + self.width() * i as f64
        }
    }

    pub fn add(&mut self, x: f64) {
        if x < self.lo {
            self.underflow += 1;
        } else if x >= self.hi {
            self.overflow += 1;
        } else {
            let last = self.counts.len() - 1;
            let i = ((x - self.lo) / self.width()) as usize;
            self.counts[i.min(last)] += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    /// Counts divided by `total · width`.
    pub fn density(&self) -> Vec<f64> {
        let norm = self.total() as f64 * self.width();
        self.counts.iter().map(|c| *c as f64 / norm).collect()
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert!(self.lo == other.lo && self.hi == other.hi && self.bins() == other.bins());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning() {
        let mut h = Histogram::new(-1.0, 1.0, 4);
        for x in [-2.0, -1.0, -0.5, 0.0, 0.49, 0.99, 1.0] {
            h.add(x);
        }
        assert_eq!(h.counts, [1, 1, 2, 1]);
        assert_eq!((h.underflow, h.overflow), (1, 1));
        assert_eq!(h.total(), 7);
        assert_eq!(h.edge(4), 1.0);
    }
}
