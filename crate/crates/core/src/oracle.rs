//! Brute-force phase-space grid for one motional axis, used to check the Gaussian
//! closed forms: Wigner marginals, the symplectic Fourier transform, and the
//! ground-state probability as an integral over the Wigner function.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::pulses::WeightedDisplacementSum;
use crate::states::{general_expectation, GaussianState};
use crate::symplectic::{PhaseVector, HBAR};

pub const GRID_POINTS: usize = 512;
pub const GRID_EXTENT: f64 = 8.0;

/// Gaussian on `(x, p)` of a single axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian1d {
    pub mean: Vector2<f64>,
    pub covariance: Matrix2<f64>,
}

impl Gaussian1d {
    /// Restriction of a 6-D state to axis `axis` (0, 1 or 2).
    pub fn from_state(state: &GaussianState, axis: usize) -> Result<Self> {
        if axis > 2 {
            return Err(invalid("axis must be 0, 1 or 2"));
        }
        let (i, j) = (axis, axis + 3);
        let c = state.covariance();
        let m = state.mean();
        Ok(Self {
            mean: Vector2::new(m[i], m[j]),
            covariance: Matrix2::new(c[(i, i)], c[(i, j)], c[(j, i)], c[(j, j)]),
        })
    }

    pub fn density(&self, x: f64, p: f64) -> f64 {
        let d = Vector2::new(x, p) - self.mean;
        let det = self.covariance.determinant();
        let inv = Matrix2::new(self.covariance[(1, 1)], -self.covariance[(0, 1)], -self.covariance[(1, 0)], self.covariance[(0, 0)]) / det;
        let q = (d.transpose() * inv * d)[(0, 0)];
        (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
    }

    /// Closed-form `η(χ)` for this axis.
    pub fn characteristic(&self, chi_x: f64, chi_p: f64) -> Complex64 {
        // 𝒥χ = (χ_p, −χ_x)
        let jc = Vector2::new(chi_p, -chi_x) / HBAR;
        let q = (jc.transpose() * self.covariance * jc)[(0, 0)];
        Complex64::from_polar((-0.5 * q).exp(), self.mean.dot(&jc))
    }

    fn sigma(&self) -> (f64, f64) {
        (self.covariance[(0, 0)].sqrt(), self.covariance[(1, 1)].sqrt())
    }
}

/// Uniform trapezoid grid over `±extent·σ` around the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub wx: Vec<f64>,
    pub wp: Vec<f64>,
}

fn axis(center: f64, half: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * half / (n - 1) as f64;
    let nodes = (0..n).map(|i| center - half + h * i as f64).collect();
    let weights = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
    (nodes, weights)
}

impl PhaseGrid {
    pub fn around(state: &Gaussian1d, points: usize, extent: f64) -> Result<Self> {
        if points < 3 {
            return Err(invalid("grid needs at least three points per axis"));
        }
        let (sx, sp) = state.sigma();
        let (x, wx) = axis(state.mean[0], extent * sx, points);
        let (p, wp) = axis(state.mean[1], extent * sp, points);
        Ok(Self { x, p, wx, wp })
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> Complex64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (&x, &wx) in self.x.iter().zip(&self.wx) {
            let mut row = Complex64::new(0.0, 0.0);
            for (&p, &wp) in self.p.iter().zip(&self.wp) {
                row += f(x, p) * wp;
            }
            total += row * wx;
        }
        total
    }
}

/// `∫∫ W(x, p) dx dp` on the grid.
pub fn grid_norm(state: &Gaussian1d, grid: &PhaseGrid) -> f64 {
    grid.integrate(|x, p| Complex64::new(state.density(x, p), 0.0)).re
}

/// `∫ W(x, p) dp` at fixed `x`; compare with the normal density of the position.
pub fn position_marginal(state: &Gaussian1d, grid: &PhaseGrid, x: f64) -> f64 {
    grid.p.iter().zip(&grid.wp).map(|(&p, &w)| w * state.density(x, p)).sum()
}

/// `η(χ) = ∫ W(ξ) e^{−(i/ħ)χᵀ𝒥ξ} dξ` with `χᵀ𝒥ξ = χ_x p − χ_p x`.
pub fn grid_characteristic(state: &Gaussian1d, grid: &PhaseGrid, chi_x: f64, chi_p: f64) -> Complex64 {
    grid.integrate(|x, p| Complex64::from_polar(state.density(x, p), -(chi_x * p - chi_p * x) / HBAR))
}

/// Inverse transform `W(ξ) = (2πħ)⁻² ∫ η(χ) e^{(i/ħ)χᵀ𝒥ξ} dχ`, with `η` sampled on its own grid.
pub fn grid_wigner_from_characteristic(
    eta: impl Fn(f64, f64) -> Complex64,
    chi_grid: &PhaseGrid,
    x: f64,
    p: f64,
) -> f64 {
    let s = chi_grid.integrate(|cx, cp| eta(cx, cp) * Complex64::cis((cx * p - cp * x) / HBAR));
    s.re / (2.0 * std::f64::consts::PI * HBAR).powi(2)
}

/// Ground-state probability `⟨Ô†Ô⟩` with every characteristic-function value
/// obtained by integrating the Wigner function over the grid. Displacements must
/// lie along `axis`.
pub fn grid_probability(entry: &WeightedDisplacementSum, state: &Gaussian1d, grid: &PhaseGrid, axis: usize) -> Result<f64> {
    for t in &entry.terms {
        let off = (0..3).filter(|&i| i != axis).any(|i| t.chi[i] != 0.0 || t.chi[i + 3] != 0.0);
        if off {
            return Err(invalid("grid oracle needs displacements along a single axis"));
        }
    }
    general_expectation(entry, |chi: &PhaseVector| grid_characteristic(state, grid, chi[axis], chi[axis + 3]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::characteristic_function;
    use crate::symplectic::phase_vector;
    use crate::Vec3;

    fn state1d() -> Gaussian1d {
        let sx = 1e-4;
        let sp = 1.443e-25 * 3e-3;
        Gaussian1d {
            mean: Vector2::new(2e-5, 1e-28),
            covariance: Matrix2::new(sx * sx, 0.2 * sx * sp, 0.2 * sx * sp, sp * sp),
        }
    }

    #[test]
    fn normalization_and_marginal() {
        let s = state1d();
        let grid = PhaseGrid::around(&s, GRID_POINTS, GRID_EXTENT).unwrap();
        assert!((grid_norm(&s, &grid) - 1.0).abs() < 1e-8);
        let sx = s.covariance[(0, 0)].sqrt();
        let x = s.mean[0] + 0.7 * sx;
        let exact = (-0.5f64 * 0.49).exp() / (sx * (2.0 * std::f64::consts::PI).sqrt());
        assert!((position_marginal(&s, &grid, x) - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn characteristic_matches_closed_form() {
        let s = state1d();
        let grid = PhaseGrid::around(&s, GRID_POINTS, GRID_EXTENT).unwrap();
        let mut cov = crate::Mat6::identity();
        cov[(2, 2)] = s.covariance[(0, 0)];
        cov[(2, 5)] = s.covariance[(0, 1)];
        cov[(5, 2)] = s.covariance[(1, 0)];
        cov[(5, 5)] = s.covariance[(1, 1)];
        let full = GaussianState::new(phase_vector(Vec3::new(0.0, 0.0, s.mean[0]), Vec3::new(0.0, 0.0, s.mean[1])), cov).unwrap();
        for (cx, cp) in [(0.0, 0.0), (1e-7, 0.0), (0.0, 1e-30), (-2e-7, 3e-30)] {
            let grid_eta = grid_characteristic(&s, &grid, cx, cp);
            let exact = characteristic_function(&full, &phase_vector(Vec3::new(0.0, 0.0, cx), Vec3::new(0.0, 0.0, cp)));
            assert!((grid_eta - exact).norm() < 1e-6, "{cx} {cp}");
            assert!((s.characteristic(cx, cp) - exact).norm() < 1e-14);
        }
    }

    #[test]
    fn round_trip_through_characteristic() {
        let s = state1d();
        let (sx, sp) = s.sigma();
        // η has widths ħ/σ_p in χ_x and ħ/σ_x in χ_p.
        let centered = Gaussian1d { mean: Vector2::zeros(), covariance: Matrix2::new((HBAR / sp).powi(2), 0.0, 0.0, (HBAR / sx).powi(2)) };
        let chi_grid = PhaseGrid::around(&centered, 257, 9.0).unwrap();
        let eta = |cx: f64, cp: f64| s.characteristic(cx, cp);
        for (dx, dp) in [(0.0, 0.0), (0.5, -0.3), (-1.0, 1.2)] {
            let (x, p) = (s.mean[0] + dx * sx, s.mean[1] + dp * sp);
            let w = grid_wigner_from_characteristic(eta, &chi_grid, x, p);
            let exact = s.density(x, p);
            assert!((w - exact).abs() < 1e-4 * s.density(s.mean[0], s.mean[1]), "{dx} {dp}");
        }
    }
}
