//! Fock-Darwin ground-state primitives and their Löwdin-orthogonalized combinations.

use nalgebra::{DMatrix, Matrix4};

use crate::device::{dot_centers, fock_darwin_radius, Device, Position};
use crate::error::{invalid, Error, Result};

/// Smallest overlap eigenvalue accepted by the Löwdin transform.
pub const MIN_OVERLAP_EIGENVALUE: f64 = 1e-10;

/// Normalized 2D Gaussian `exp(-|r - c|^2 / 2 a_B^2) / (a_B sqrt(pi))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveOrbital {
    pub center: Position,
    pub radius: f64,
}

impl PrimitiveOrbital {
    pub fn value(&self, r: &Position) -> f64 {
        let d2 = (r - self.center).norm_squared();
        (-0.5 * d2 / (self.radius * self.radius)).exp()
            / (self.radius * std::f64::consts::PI.sqrt())
    }
}

/// Overlaps `<phi_i|phi_j>` of the four primitives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapMatrix(pub Matrix4<f64>);

/// `psi_k = sum_l C_kl phi_l` with `C = O^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalBasis {
    pub coeffs: Matrix4<f64>,
    pub primitives: [PrimitiveOrbital; 4],
}

pub fn build_primitives(device: &Device) -> [PrimitiveOrbital; 4] {
    let radius = device.fock_darwin_radius();
    debug_assert_eq!(
        radius,
        fock_darwin_radius(&device.material, device.geometry.hbar_omega0)
    );
    dot_centers(&device.geometry).map(|center| PrimitiveOrbital { center, radius })
}

pub(crate) fn common_radius(primitives: &[PrimitiveOrbital; 4]) -> Result<f64> {
    let a = primitives[0].radius;
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid("radius", format!("must be positive, got {a}")));
    }
    for p in &primitives[1..] {
        if ((p.radius - a) / a).abs() > 1e-14 {
            return Err(invalid(
                "radius",
                format!("all primitives must share one radius ({a} vs {})", p.radius),
            ));
        }
    }
    Ok(a)
}

/// Overlap of two equal-width primitives whose centres are `d` apart.
pub fn gaussian_overlap(d: f64, radius: f64) -> f64 {
    (-d * d / (4.0 * radius * radius)).exp()
}

/// Closed-form overlap matrix `O_ij = exp(-d_ij^2 / 4 a_B^2)`.
pub fn overlap_matrix(primitives: &[PrimitiveOrbital; 4]) -> Result<OverlapMatrix> {
    let radius = common_radius(primitives)?;
    let o = Matrix4::from_fn(|i, j| {
        gaussian_overlap((primitives[i].center - primitives[j].center).norm(), radius)
    });
    if o.cholesky().is_none() {
        let min_eigenvalue = o.symmetric_eigenvalues().min();
        return Err(Error::DegenerateBasis { min_eigenvalue });
    }
    Ok(OverlapMatrix(o))
}

/// Symmetric inverse square root of a symmetric positive-definite matrix,
/// via its spectral decomposition.
pub fn lowdin_inverse_sqrt(o: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = o.clone().symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue.is_nan() || min_eigenvalue <= MIN_OVERLAP_EIGENVALUE {
        return Err(Error::DegenerateBasis { min_eigenvalue });
    }
    let scaled = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.sqrt().recip()));
    let c = &eig.eigenvectors * scaled * eig.eigenvectors.transpose();
    Ok((&c + c.transpose()) * 0.5)
}

impl OrthogonalBasis {
    pub fn new(primitives: [PrimitiveOrbital; 4]) -> Result<Self> {
        let o = overlap_matrix(&primitives)?;
        let c = lowdin_inverse_sqrt(&DMatrix::from_column_slice(4, 4, o.0.as_slice()))?;
        Ok(Self {
            coeffs: Matrix4::from_column_slice(c.as_slice()),
            primitives,
        })
    }

    pub fn for_device(device: &Device) -> Result<Self> {
        Self::new(build_primitives(device))
    }

    pub fn radius(&self) -> f64 {
        self.primitives[0].radius
    }

    /// `psi_k(r)` for `k` in `0..4`.
    pub fn eval_orthogonal(&self, k: usize, r: &Position) -> f64 {
        (0..4)
            .map(|l| self.coeffs[(k, l)] * self.primitives[l].value(r))
            .sum()
    }
}
