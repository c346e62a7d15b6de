//! Neumaier-compensated accumulators.

use nalgebra::DVector;

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CompensatedVecSum {
    parts: Vec<CompensatedSum>,
}

impl CompensatedVecSum {
    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            parts: vec![CompensatedSum::default(); n],
        }
    }

    pub(crate) fn add_scaled(&mut self, weight: f64, x: &DVector<f64>) {
        for (p, xi) in self.parts.iter_mut().zip(x.iter()) {
            p.add(weight * xi);
        }
    }

    pub(crate) fn value(&self) -> DVector<f64> {
        DVector::from_iterator(self.parts.len(), self.parts.iter().map(|p| p.value()))
    }
}
