use crate::geometry::euclidean;

/// Counts Euclidean distance evaluations.
///
/// Every distance the granulators compute goes through [`DistanceCounter::measure`],
/// so the tally equals the number of distance computations actually performed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DistanceCounter {
    evaluations: u64,
}

impl DistanceCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn measure(&mut self, a: &[f64], b: &[f64]) -> f64 {
        self.evaluations += 1;
        euclidean(a, b)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}
