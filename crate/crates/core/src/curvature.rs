//! Second fundamental form in the adapted frame, the vector `V`, Gauss and
//! normal curvature, the complex second fundamental form and the residuals
//! of the `Δ cos α` identities.

use num_complex::Complex64;

use crate::ambient::{apply_j, AdaptedFrame, AmbientVector, DEFAULT_FRAME_EPS};
use crate::error::{GeomError, Result};
use crate::jet::FirstJet;
use crate::pointwise::PointGeometry;
use crate::surface::{GraphSurface, Node};

/// Stencil reach of [`laplacian_cos_alpha_residual`]: finite differences of
/// the mean curvature field, which itself needs second jets.
pub const PROP_RESIDUAL_REACH: usize = 3;
/// Reach of the Laplace–Beltrami operator on `cos α` and of the Brioschi formula.
pub const METRIC_STENCIL_REACH: usize = 2;

/// Symmetric 2×2 matrix stored as `(m11, m12, m22)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2 {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl Sym2 {
    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn from_array([m11, m12, m22]: [f64; 3]) -> Self {
        Sym2 { m11, m12, m22 }
    }

    /// Entry `(k, l)` with zero-based indices.
    pub fn at(&self, k: usize, l: usize) -> f64 {
        match (k, l) {
            (0, 0) => self.m11,
            (1, 1) => self.m22,
            _ => self.m12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFundamentalForm {
    pub h3: Sym2,
    pub h4: Sym2,
    pub mean3: f64,
    pub mean4: f64,
    pub frame: AdaptedFrame,
}

impl SecondFundamentalForm {
    pub fn from_components(h3: Sym2, h4: Sym2, frame: AdaptedFrame) -> Self {
        SecondFundamentalForm {
            h3,
            h4,
            mean3: h3.trace(),
            mean4: h4.trace(),
            frame,
        }
    }

    pub fn mean_curvature(&self) -> AmbientVector {
        self.mean3 * self.frame.v3 + self.mean4 * self.frame.v4
    }

    /// `Σ_k (h³_1k − h⁴_2k)² + (h⁴_1k + h³_2k)²`
    pub fn frame_square_sum(&self) -> f64 {
        (0..2)
            .map(|k| {
                let p = self.h3.at(0, k) - self.h4.at(1, k);
                let q = self.h4.at(0, k) + self.h3.at(1, k);
                p * p + q * q
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VVector {
    pub v3: f64,
    pub v4: f64,
}

impl VVector {
    /// `(∂₂α, ∂₁α)`, the frame derivatives of the angle encoded by `V`.
    pub fn angle_gradient(&self) -> (f64, f64) {
        (self.v3, self.v4)
    }

    pub fn ambient(&self, frame: &AdaptedFrame) -> AmbientVector {
        self.v3 * frame.v3 + self.v4 * frame.v4
    }

    pub fn norm_sq(&self) -> f64 {
        self.v3 * self.v3 + self.v4 * self.v4
    }
}

fn require_frame(pg: &PointGeometry) -> Result<AdaptedFrame> {
    pg.frame.ok_or(GeomError::ComplexPoint {
        sin_alpha: pg.sin2_alpha().sqrt(),
    })
}

/// Second fundamental form from the pointwise geometry of a jet.
pub fn sff_from_geometry(pg: &PointGeometry) -> Result<SecondFundamentalForm> {
    let frame = require_frame(pg)?;
    let h3 = Sym2::from_array(pg.sff_along(&frame.v3));
    let h4 = Sym2::from_array(pg.sff_along(&frame.v4));
    Ok(SecondFundamentalForm::from_components(h3, h4, frame))
}

pub fn second_fundamental_form(s: &GraphSurface, node: Node) -> Result<SecondFundamentalForm> {
    let j2 = s.second_jet(node)?;
    sff_from_geometry(&PointGeometry::new(&j2))
}

pub fn v_vector(sff: &SecondFundamentalForm) -> VVector {
    VVector {
        v3: -(sff.h3.m22 + sff.h4.m12),
        v4: -(sff.h4.m11 + sff.h3.m12),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussCurvatures {
    /// Brioschi formula on the induced metric.
    pub intrinsic: f64,
    /// `Σ_α h^α_11 h^α_22 − (h^α_12)²`
    pub extrinsic: f64,
    /// `Σ_k h³_1k h⁴_2k − h⁴_1k h³_2k`
    pub normal: f64,
}

/// First jets on the 3×3 block around a node, indexed `[di + 1][dj + 1]`.
fn first_jet_block(s: &GraphSurface, node: Node) -> Result<[[FirstJet; 3]; 3]> {
    s.check_reach(node, METRIC_STENCIL_REACH)?;
    let mut out = [[FirstJet::zero(); 3]; 3];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, jet) in row.iter_mut().enumerate() {
            let n = s.node_of(s.offset_index(node, a as isize - 1, b as isize - 1));
            *jet = s.first_jet(n)?;
        }
    }
    Ok(out)
}

/// Brioschi formula with centered differences of `E = g11`, `F = g12`, `G = g22`.
pub fn intrinsic_gauss_curvature(s: &GraphSurface, node: Node) -> Result<f64> {
    let blk = first_jet_block(s, node)?;
    let (hx, hy) = (s.hx(), s.hy());
    let e = |a: usize, b: usize| blk[a][b].g11;
    let f = |a: usize, b: usize| blk[a][b].g12;
    let g = |a: usize, b: usize| blk[a][b].g22;
    let du = |q: &dyn Fn(usize, usize) -> f64| (q(2, 1) - q(0, 1)) / (2.0 * hx);
    let dv = |q: &dyn Fn(usize, usize) -> f64| (q(1, 2) - q(1, 0)) / (2.0 * hy);
    let duu = |q: &dyn Fn(usize, usize) -> f64| (q(2, 1) - 2.0 * q(1, 1) + q(0, 1)) / (hx * hx);
    let dvv = |q: &dyn Fn(usize, usize) -> f64| (q(1, 2) - 2.0 * q(1, 1) + q(1, 0)) / (hy * hy);
    let duv = |q: &dyn Fn(usize, usize) -> f64| {
        (q(2, 2) - q(2, 0) - q(0, 2) + q(0, 0)) / (4.0 * hx * hy)
    };

    let (e0, f0, g0) = (e(1, 1), f(1, 1), g(1, 1));
    let (eu, ev) = (du(&e), dv(&e));
    let (fu, fv) = (du(&f), dv(&f));
    let (gu, gv) = (du(&g), dv(&g));
    let top = -0.5 * dvv(&e) + duv(&f) - 0.5 * duu(&g);

    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m1 = [
        [top, 0.5 * eu, fu - 0.5 * ev],
        [fv - 0.5 * gu, e0, f0],
        [0.5 * gv, f0, g0],
    ];
    let m2 = [
        [0.0, 0.5 * ev, 0.5 * gu],
        [0.5 * ev, e0, f0],
        [0.5 * gu, f0, g0],
    ];
    let w = e0 * g0 - f0 * f0;
    Ok((det3(m1) - det3(m2)) / (w * w))
}

/// `<A(e1,e1), A(e2,e2)> − |A(e1,e2)|²`, independent of the normal frame.
pub fn extrinsic_gauss_curvature(pg: &PointGeometry) -> f64 {
    let [pxx, pxy, pyy] = pg.jet.second_partials();
    let m = &pg.ortho;
    let a = |k: usize, l: usize| {
        let v = (m[0][k] * m[0][l]) * pxx + (m[0][k] * m[1][l] + m[1][k] * m[0][l]) * pxy
            + (m[1][k] * m[1][l]) * pyy;
        pg.normal_part(&v)
    };
    let (a11, a12, a22) = (a(0, 0), a(0, 1), a(1, 1));
    a11.dot(&a22) - a12.norm_sq()
}

pub fn normal_curvature(sff: &SecondFundamentalForm) -> f64 {
    (0..2)
        .map(|k| sff.h3.at(0, k) * sff.h4.at(1, k) - sff.h4.at(0, k) * sff.h3.at(1, k))
        .sum()
}

pub fn gauss_curvatures(s: &GraphSurface, node: Node) -> Result<GaussCurvatures> {
    let j2 = s.second_jet(node)?;
    let pg = PointGeometry::new(&j2);
    let sff = sff_from_geometry(&pg)?;
    let h = |m: &Sym2| m.m11 * m.m22 - m.m12 * m.m12;
    Ok(GaussCurvatures {
        intrinsic: intrinsic_gauss_curvature(s, node)?,
        extrinsic: h(&sff.h3) + h(&sff.h4),
        normal: normal_curvature(&sff),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSff {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl ComplexSff {
    /// `P [[a, b], [b, c]] Pᵀ` with `P = [[1, 1], [i, −i]]`, split into the
    /// real and imaginary symmetric parts `(h3, h4)`.
    pub fn to_real(&self) -> (Sym2, Sym2) {
        let i = Complex64::i();
        let z11 = self.a + 2.0 * self.b + self.c;
        let z12 = i * (self.a - self.c);
        let z22 = -self.a + 2.0 * self.b - self.c;
        (
            Sym2 { m11: z11.re, m12: z12.re, m22: z22.re },
            Sym2 { m11: z11.im, m12: z12.im, m22: z22.im },
        )
    }
}

/// Solve the real/complex relation for `(a, b, c)`.
pub fn complex_sff(sff: &SecondFundamentalForm) -> ComplexSff {
    complex_sff_from_parts(&sff.h3, &sff.h4)
}

pub fn complex_sff_from_parts(h3: &Sym2, h4: &Sym2) -> ComplexSff {
    let i = Complex64::i();
    let z11 = Complex64::new(h3.m11, h4.m11);
    let z12 = Complex64::new(h3.m12, h4.m12);
    let z22 = Complex64::new(h3.m22, h4.m22);
    let half_diff = 0.5 * (z11 - z22);
    ComplexSff {
        a: 0.5 * (half_diff - i * z12),
        b: 0.25 * (z11 + z22),
        c: 0.5 * (half_diff + i * z12),
    }
}

/// Laplace–Beltrami `(1/√det g) ∂_i(√det g g^ij ∂_j u)` in divergence form,
/// coefficients averaged to half nodes. `u` is given on the 3×3 block.
fn laplace_beltrami_block(blk: &[[FirstJet; 3]; 3], u: &[[f64; 3]; 3], hx: f64, hy: f64) -> f64 {
    // W = √det g · g^{-1}
    let w = |a: usize, b: usize| {
        let j = &blk[a][b];
        let r = 1.0 / j.detg.sqrt();
        (j.g22 * r, -j.g12 * r, j.g11 * r)
    };
    let dy_at = |a: usize| (u[a][2] - u[a][0]) / (2.0 * hy);
    let dx_at = |b: usize| (u[2][b] - u[0][b]) / (2.0 * hx);

    let flux_x = |a0: usize, a1: usize| {
        let (w0, w1) = (w(a0, 1), w(a1, 1));
        let ux = (u[a1][1] - u[a0][1]) / hx;
        let uy = 0.5 * (dy_at(a0) + dy_at(a1));
        0.5 * (w0.0 + w1.0) * ux + 0.5 * (w0.1 + w1.1) * uy
    };
    let flux_y = |b0: usize, b1: usize| {
        let (w0, w1) = (w(1, b0), w(1, b1));
        let uy = (u[1][b1] - u[1][b0]) / hy;
        let ux = 0.5 * (dx_at(b0) + dx_at(b1));
        0.5 * (w0.1 + w1.1) * ux + 0.5 * (w0.2 + w1.2) * uy
    };
    let div = (flux_x(1, 2) - flux_x(0, 1)) / hx + (flux_y(1, 2) - flux_y(0, 1)) / hy;
    div / blk[1][1].detg.sqrt()
}

/// Laplace–Beltrami of a grid field at a node.
pub fn laplace_beltrami(s: &GraphSurface, field: &[f64], node: Node) -> Result<f64> {
    let blk = first_jet_block(s, node)?;
    let mut u = [[0.0; 3]; 3];
    for (a, row) in u.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = field[s.offset_index(node, a as isize - 1, b as isize - 1)];
        }
    }
    Ok(laplace_beltrami_block(&blk, &u, s.hx(), s.hy()))
}

/// Laplace–Beltrami of the `cos α` field at a node.
pub fn laplacian_cos_alpha(s: &GraphSurface, node: Node) -> Result<f64> {
    let blk = first_jet_block(s, node)?;
    let u = blk.map(|row| row.map(|j| j.cos_alpha));
    Ok(laplace_beltrami_block(&blk, &u, s.hx(), s.hy()))
}

/// `sin α (H⁴,₁ + H³,₂)` with covariant normal derivatives of `H`, written
/// without the normal frame: `<∂_{e1}H, −Je2 − cos e1> + <∂_{e2}H, Je1 − cos e2>`.
fn sin_weighted_mean_curvature_divergence(s: &GraphSurface, node: Node, pg: &PointGeometry) -> Result<f64> {
    let mean_at = |di: isize, dj: isize| -> Result<AmbientVector> {
        let n = s.node_of(s.offset_index(node, di, dj));
        Ok(PointGeometry::new(&s.second_jet(n)?).mean_curvature)
    };
    let dx = (1.0 / (2.0 * s.hx())) * (mean_at(1, 0)? - mean_at(-1, 0)?);
    let dy = (1.0 / (2.0 * s.hy())) * (mean_at(0, 1)? - mean_at(0, -1)?);
    let d1 = pg.along_frame(0, dx, dy);
    let d2 = pg.along_frame(1, dx, dy);
    let cos = pg.cos_alpha();
    let w4 = -apply_j(&pg.e2) - cos * pg.e1;
    let w3 = apply_j(&pg.e1) - cos * pg.e2;
    Ok(d1.dot(&w4) + d2.dot(&w3))
}

/// `Δ cos α − [−cos α Σ_k(|h³_1k − h⁴_2k|² + |h⁴_1k + h³_2k|²) + sin α (H⁴,₁ + H³,₂)]`
pub fn laplacian_cos_alpha_residual(s: &GraphSurface, node: Node) -> Result<f64> {
    s.check_reach(node, PROP_RESIDUAL_REACH)?;
    let pg = PointGeometry::new(&s.second_jet(node)?);
    let sff = sff_from_geometry(&pg)?;
    let lap = laplacian_cos_alpha(s, node)?;
    let rhs = -pg.cos_alpha() * sff.frame_square_sum()
        + sin_weighted_mean_curvature_divergence(s, node, &pg)?;
    Ok(lap - rhs)
}

/// `Δ cos α − ((3 sin²α − 2)/cos α) |∇α|²`. Vanishes to discretization error
/// on critical surfaces and not elsewhere.
pub fn critical_angle_residual(s: &GraphSurface, node: Node) -> Result<f64> {
    let pg = PointGeometry::with_frame_eps(&s.second_jet(node)?, DEFAULT_FRAME_EPS);
    require_frame(&pg)?;
    let c = pg.jet.first.c;
    if c <= 0.0 {
        return Err(GeomError::NotSymplectic { node: Some((node.i, node.j)), c });
    }
    let lap = laplacian_cos_alpha(s, node)?;
    let cos = pg.cos_alpha();
    Ok(lap - (3.0 * pg.sin2_alpha() - 2.0) / cos * pg.grad_alpha_sq())
}
