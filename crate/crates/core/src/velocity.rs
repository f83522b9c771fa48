//! Uniform mid-point discretization of the velocity interval `[−V_c, V_c]`.

use crate::error::{BgkError, Result};

/// Weight function for a velocity moment `Δv Σ_j w(v_j) f_j`.
#[derive(Clone, Copy)]
pub enum Weight<'a> {
    One,
    V,
    HalfV2,
    Custom(&'a dyn Fn(f64) -> f64),
}

impl Weight<'_> {
    #[inline]
    fn eval(&self, v: f64) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::V => v,
            Weight::HalfV2 => 0.5 * v * v,
            Weight::Custom(f) => f(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    v_cut: f64,
    points: Vec<f64>,
    dv: f64,
}

impl VelocityGrid {
    /// `v_j = −V_c + (j − 1/2) Δv`, `Δv = 2 V_c / n_v`.
    pub fn new(v_cut: f64, n_v: usize) -> Result<Self> {
        if !(v_cut.is_finite() && v_cut > 0.0) {
            return Err(BgkError::invalid(format!("velocity cutoff must be positive, got {v_cut}")));
        }
        if n_v < 2 || !n_v.is_multiple_of(2) {
            return Err(BgkError::invalid(format!(
                "velocity point count must be even and at least 2, got {n_v}"
            )));
        }
        let dv = 2.0 * v_cut / n_v as f64;
        let points = (0..n_v).map(|j| -v_cut + (j as f64 + 0.5) * dv).collect();
        Ok(VelocityGrid { v_cut, points, dv })
    }

    pub fn v_cut(&self) -> f64 {
        self.v_cut
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Quadrature weight of every point.
    pub fn dv(&self) -> f64 {
        self.dv
    }

    pub fn moment(&self, values: &[f64], weight: Weight<'_>) -> Result<f64> {
        self.check_len(values)?;
        Ok(self.moment_unchecked(values, weight))
    }

    #[inline]
    pub(crate) fn moment_unchecked(&self, values: &[f64], weight: Weight<'_>) -> f64 {
        let s: f64 = self
            .points
            .iter()
            .zip(values)
            .map(|(&v, &f)| weight.eval(v) * f)
            .sum();
        self.dv * s
    }

    /// `⟨m f⟩` with `m = (1, v, v²/2)`.
    pub fn moment_vector(&self, values: &[f64]) -> Result<[f64; 3]> {
        self.check_len(values)?;
        Ok(self.moment_vector_unchecked(values))
    }

    #[inline]
    pub(crate) fn moment_vector_unchecked(&self, values: &[f64]) -> [f64; 3] {
        let mut acc = [0.0; 3];
        for (&v, &f) in self.points.iter().zip(values) {
            acc[0] += f;
            acc[1] += v * f;
            acc[2] += 0.5 * v * v * f;
        }
        acc.map(|a| a * self.dv)
    }

    /// `⟨v m f⟩`, the flux moments entering the macroscopic equations.
    #[inline]
    pub(crate) fn flux_moment_vector(&self, values: &[f64]) -> [f64; 3] {
        let mut acc = [0.0; 3];
        for (&v, &f) in self.points.iter().zip(values) {
            let vf = v * f;
            acc[0] += vf;
            acc[1] += v * vf;
            acc[2] += 0.5 * v * v * vf;
        }
        acc.map(|a| a * self.dv)
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.points.len() {
            return Err(BgkError::invalid(format!(
                "expected {} velocity samples, got {}",
                self.points.len(),
                values.len()
            )));
        }
        Ok(())
    }
}
