//! Symplectic form, symplecticity checks and inversion for 6-dimensional phase space.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::error::{invalid, Result};

pub type Mat3 = Matrix3<f64>;
pub type Mat6 = Matrix6<f64>;
pub type Vec3 = Vector3<f64>;

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Default tolerance for symplecticity checks.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Phase-space vector `(x, p)` with position in m and momentum in kg m/s.
pub type PhaseVector = Vector6<f64>;

/// Builds a phase-space vector from its position and momentum parts.
pub fn phase_vector(x: Vec3, p: Vec3) -> PhaseVector {
    PhaseVector::new(x[0], x[1], x[2], p[0], p[1], p[2])
}

pub fn position(v: &PhaseVector) -> Vec3 {
    v.fixed_rows::<3>(0).into_owned()
}

pub fn momentum(v: &PhaseVector) -> Vec3 {
    v.fixed_rows::<3>(3).into_owned()
}

/// The symplectic form `J = [[0, I], [-I, 0]]`.
pub fn symplectic_form() -> Mat6 {
    from_blocks(&Mat3::zeros(), &Mat3::identity(), &-Mat3::identity(), &Mat3::zeros())
}

/// Assembles a 6x6 matrix from its four 3x3 blocks.
pub fn from_blocks(a: &Mat3, b: &Mat3, c: &Mat3, d: &Mat3) -> Mat6 {
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(c);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(d);
    m
}

/// Splits a 6x6 matrix into `(xx, xp, px, pp)` blocks.
pub fn blocks(m: &Mat6) -> (Mat3, Mat3, Mat3, Mat3) {
    (
        m.fixed_view::<3, 3>(0, 0).into_owned(),
        m.fixed_view::<3, 3>(0, 3).into_owned(),
        m.fixed_view::<3, 3>(3, 0).into_owned(),
        m.fixed_view::<3, 3>(3, 3).into_owned(),
    )
}

/// Max-norm of `MᵀJM − J`. Returns infinity for non-finite input.
pub fn symplectic_defect(m: &Mat6) -> f64 {
    if m.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let j = symplectic_form();
    (m.transpose() * j * m - j).amax()
}

/// True iff `‖MᵀJM − J‖_max ≤ tol`.
pub fn is_symplectic(m: &Mat6, tol: f64) -> bool {
    symplectic_defect(m) <= tol
}

/// Conjugates `m` with `diag(a I, I/a)`, itself symplectic, so that the
/// position-momentum and momentum-position blocks have comparable size.
///
/// With SI units and atomic masses these blocks differ by some fifty orders
/// of magnitude, which makes the raw max-norm meaningless.
pub fn balance(m: &Mat6) -> (Mat6, f64) {
    let (_, b, c, _) = blocks(m);
    let nb = b.amax();
    let nc = c.amax();
    let a2 = if nb > 0.0 && nc > 0.0 && nb.is_finite() && nc.is_finite() {
        (nc / nb).sqrt()
    } else {
        1.0
    };
    (conjugate_scale(m, a2), a2)
}

/// Returns `Q m Q⁻¹` with `Q = diag(√a2 I, I/√a2)`.
pub fn conjugate_scale(m: &Mat6, a2: f64) -> Mat6 {
    let (a, b, c, d) = blocks(m);
    from_blocks(&a, &(b * a2), &(c / a2), &d)
}

/// Symplectic defect after unit balancing. Invariant under the choice of units.
pub fn balanced_symplectic_defect(m: &Mat6) -> f64 {
    symplectic_defect(&balance(m).0)
}

/// Inverse of a symplectic matrix, `J Sᵀ Jᵀ`.
///
/// Rejects input whose balanced defect exceeds `tol`.
pub fn symplectic_inverse(s: &Mat6, tol: f64) -> Result<Mat6> {
    let defect = balanced_symplectic_defect(s);
    if !(defect <= tol) {
        return Err(invalid(format!(
            "matrix is not symplectic (defect {defect:.3e} > {tol:.1e})"
        )));
    }
    Ok(symplectic_inverse_unchecked(s))
}

pub fn symplectic_inverse_unchecked(s: &Mat6) -> Mat6 {
    let j = symplectic_form();
    j * s.transpose() * j.transpose()
}

/// Bilinear form `aᵀ M b`.
pub fn symplectic_sandwich(a: &PhaseVector, m: &Mat6, b: &PhaseVector) -> f64 {
    a.dot(&(m * b))
}

/// `aᵀ J b = a_x·b_p − a_p·b_x`, evaluated without forming `J`.
pub fn omega(a: &PhaseVector, b: &PhaseVector) -> f64 {
    let ax = position(a);
    let ap = momentum(a);
    let bx = position(b);
    let bp = momentum(b);
    ax.dot(&bp) - ap.dot(&bx)
}

/// `J v`.
pub fn apply_j(v: &PhaseVector) -> PhaseVector {
    phase_vector(momentum(v), -position(v))
}
