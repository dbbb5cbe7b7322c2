//! Geometry of the immersion at one point, computed from a second jet.
//!
//! Everything here is frame-free except [`PointGeometry::frame`], which is
//! only available away from complex points.

use crate::ambient::{adapted_frame_with, apply_j, AdaptedFrame, AmbientVector, DEFAULT_FRAME_EPS};
use crate::el::cos_alpha_gradient_closed_form;
use crate::error::{GeomError, Result};
use crate::jet::SecondJet;

#[derive(Debug, Clone, Copy)]
pub struct PointGeometry {
    pub jet: SecondJet,
    /// `(g^11, g^12, g^22)`
    pub ginv: (f64, f64, f64),
    /// Symmetric `g^{-1/2}`; column `k` holds the coordinate components of `e_k`.
    pub ortho: [[f64; 2]; 2],
    /// Orthonormal tangent basis `e_k = Σ_i ortho[i][k] ∂_iF`, positively oriented.
    pub e1: AmbientVector,
    pub e2: AmbientVector,
    /// `(∂x cos α, ∂y cos α)` from the closed form.
    pub dcos: (f64, f64),
    /// Mean curvature vector `g^ij (∂_ij F)⊥`.
    pub mean_curvature: AmbientVector,
    /// Intrinsic gradient of `cos α` as an ambient tangent vector.
    pub grad_cos: AmbientVector,
    /// `None` at complex points (`sin α` below the frame threshold).
    pub frame: Option<AdaptedFrame>,
}

/// Inverse square root of the SPD matrix `[[p, q], [q, r]]`.
pub fn inverse_sqrt_2x2(p: f64, q: f64, r: f64) -> [[f64; 2]; 2] {
    let s = (p * r - q * q).sqrt();
    let t = (p + r + 2.0 * s).sqrt();
    let k = 1.0 / (s * t);
    [[(r + s) * k, -q * k], [-q * k, (p + s) * k]]
}

impl PointGeometry {
    pub fn new(jet: &SecondJet) -> Self {
        Self::with_frame_eps(jet, DEFAULT_FRAME_EPS)
    }

    pub fn with_frame_eps(jet: &SecondJet, eps_frame: f64) -> Self {
        let j1 = &jet.first;
        let tx = j1.tangent_x();
        let ty = j1.tangent_y();
        let ginv = j1.metric().inverse();
        let ortho = inverse_sqrt_2x2(j1.g11, j1.g12, j1.g22);
        let e1 = ortho[0][0] * tx + ortho[1][0] * ty;
        let e2 = ortho[0][1] * tx + ortho[1][1] * ty;

        let [fxx, fxy, fyy] = jet.second_partials();
        let trace = ginv.0 * fxx + (2.0 * ginv.1) * fxy + ginv.2 * fyy;
        let mean_curvature = trace - trace.dot(&e1) * e1 - trace.dot(&e2) * e2;

        let dcos = cos_alpha_gradient_closed_form(jet);
        let grad_cos = (ginv.0 * dcos.0 + ginv.1 * dcos.1) * tx
            + (ginv.1 * dcos.0 + ginv.2 * dcos.1) * ty;

        let frame = adapted_frame_with(&e1, &e2, eps_frame).ok();
        PointGeometry {
            jet: *jet,
            ginv,
            ortho,
            e1,
            e2,
            dcos,
            mean_curvature,
            grad_cos,
            frame,
        }
    }

    pub fn cos_alpha(&self) -> f64 {
        self.jet.first.cos_alpha
    }

    pub fn sin2_alpha(&self) -> f64 {
        self.jet.first.sin2_alpha
    }

    pub fn tangent_part(&self, w: &AmbientVector) -> AmbientVector {
        w.dot(&self.e1) * self.e1 + w.dot(&self.e2) * self.e2
    }

    pub fn normal_part(&self, w: &AmbientVector) -> AmbientVector {
        *w - self.tangent_part(w)
    }

    /// `(J (J ∇cos α)^T)^⊥`
    pub fn j_gradient_term(&self) -> AmbientVector {
        let t = self.tangent_part(&apply_j(&self.grad_cos));
        self.normal_part(&apply_j(&t))
    }

    /// `cos²α H − (1/cos α)(J(J∇cos α)^T)^⊥`, which in an adapted frame reads
    /// `cos²α H − sin²α V`. Smooth through complex points.
    pub fn el_vector(&self) -> Result<AmbientVector> {
        let c = self.jet.first.c;
        if c <= 0.0 {
            return Err(GeomError::NotSymplectic { node: None, c });
        }
        let cos = self.cos_alpha();
        Ok(cos * cos * self.mean_curvature - (1.0 / cos) * self.j_gradient_term())
    }

    /// Vertical components `(<X, N3>, <X, N4>)` of an ambient vector with the
    /// graph normals `N3 = (−fx, −fy, 1, 0)`, `N4 = (−gx, −gy, 0, 1)`. For a
    /// normal vector these are the rates `(∂t f, ∂t g)` of the graph moving
    /// with velocity `X` after tangential reparametrization.
    pub fn vertical(&self, x: &AmbientVector) -> (f64, f64) {
        let (n3, n4) = self.jet.first.graph_normals();
        (x.dot(&n3), x.dot(&n4))
    }

    /// `|∇α|² = |∇cos α|² / sin²α`; zero where the jet is exactly complex.
    pub fn grad_alpha_sq(&self) -> f64 {
        let j1 = &self.jet.first;
        let ab = j1.a * j1.a + j1.b * j1.b;
        if ab == 0.0 {
            return 0.0;
        }
        self.grad_cos.norm_sq() / j1.sin2_alpha
    }

    /// Second fundamental form in the orthonormal tangent basis, projected
    /// onto the given normal vector: `<A(e_k, e_l), n>` as `(11, 12, 22)`.
    pub fn sff_along(&self, n: &AmbientVector) -> [f64; 3] {
        let [pxx, pxy, pyy] = self.jet.second_partials().map(|p| p.dot(n));
        let m = &self.ortho;
        let entry = |k: usize, l: usize| {
            m[0][k] * m[0][l] * pxx
                + (m[0][k] * m[1][l] + m[1][k] * m[0][l]) * pxy
                + m[1][k] * m[1][l] * pyy
        };
        [entry(0, 0), entry(0, 1), entry(1, 1)]
    }

    /// Directional derivative along `e_k` from coordinate derivatives `(∂x, ∂y)`.
    pub fn along_frame<T>(&self, k: usize, dx: T, dy: T) -> T
    where
        T: std::ops::Add<Output = T>,
        f64: std::ops::Mul<T, Output = T>,
    {
        self.ortho[0][k] * dx + self.ortho[1][k] * dy
    }
}
