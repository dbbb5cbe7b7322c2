//! Pointwise first and second jets of a graph `(x, y, f, g)` and the
//! quantities derived from them.

use crate::ambient::AmbientVector;

/// Induced metric `g_ij = <∂_iF, ∂_jF>` in graph coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub detg: f64,
}

impl Metric {
    /// `(g^11, g^12, g^22)`
    pub fn inverse(&self) -> (f64, f64, f64) {
        (self.g22 / self.detg, -self.g12 / self.detg, self.g11 / self.detg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstJet {
    pub fx: f64,
    pub fy: f64,
    pub gx: f64,
    pub gy: f64,
    /// `gx + fy`
    pub a: f64,
    /// `fx − gy`
    pub b: f64,
    /// `1 + fx·gy − gx·fy = ω(∂xF, ∂yF)`
    pub c: f64,
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub detg: f64,
    pub cos_alpha: f64,
    pub sin2_alpha: f64,
}

impl FirstJet {
    pub fn new(fx: f64, fy: f64, gx: f64, gy: f64) -> Self {
        let a = gx + fy;
        let b = fx - gy;
        let c = 1.0 + fx * gy - gx * fy;
        let g11 = 1.0 + fx * fx + gx * gx;
        let g12 = fx * fy + gx * gy;
        let g22 = 1.0 + fy * fy + gy * gy;
        // a² + b² + c² = g11·g22 − g12² identically; this form is positive
        // without cancellation
        let detg = a * a + b * b + c * c;
        FirstJet {
            fx,
            fy,
            gx,
            gy,
            a,
            b,
            c,
            g11,
            g12,
            g22,
            detg,
            cos_alpha: c / detg.sqrt(),
            sin2_alpha: (a * a + b * b) / detg,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    /// `∂F/∂x = (1, 0, fx, gx)`
    pub fn tangent_x(&self) -> AmbientVector {
        AmbientVector::new(1.0, 0.0, self.fx, self.gx)
    }

    /// `∂F/∂y = (0, 1, fy, gy)`
    pub fn tangent_y(&self) -> AmbientVector {
        AmbientVector::new(0.0, 1.0, self.fy, self.gy)
    }

    /// Graph-mode normals `(−fx, −fy, 1, 0)` and `(−gx, −gy, 0, 1)`.
    /// Normal but neither unit nor mutually orthogonal in general.
    pub fn graph_normals(&self) -> (AmbientVector, AmbientVector) {
        (
            AmbientVector::new(-self.fx, -self.fy, 1.0, 0.0),
            AmbientVector::new(-self.gx, -self.gy, 0.0, 1.0),
        )
    }

    pub fn metric(&self) -> Metric {
        induced_metric(self)
    }

    /// `sec α · √det g = det g / c`, the integrand of the functional in graph coordinates.
    pub fn secant_density(&self) -> f64 {
        self.detg / self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondJet {
    pub first: FirstJet,
    pub fxx: f64,
    pub fxy: f64,
    pub fyy: f64,
    pub gxx: f64,
    pub gxy: f64,
    pub gyy: f64,
}

impl SecondJet {
    /// Second partials of the immersion: `(∂xxF, ∂xyF, ∂yyF)`.
    pub fn second_partials(&self) -> [AmbientVector; 3] {
        [
            AmbientVector::new(0.0, 0.0, self.fxx, self.gxx),
            AmbientVector::new(0.0, 0.0, self.fxy, self.gxy),
            AmbientVector::new(0.0, 0.0, self.fyy, self.gyy),
        ]
    }

    /// Jet of the affine map with the given first derivatives.
    pub fn affine(first: FirstJet) -> Self {
        SecondJet {
            first,
            fxx: 0.0,
            fxy: 0.0,
            fyy: 0.0,
            gxx: 0.0,
            gxy: 0.0,
            gyy: 0.0,
        }
    }
}

pub fn induced_metric(j: &FirstJet) -> Metric {
    Metric {
        g11: j.g11,
        g12: j.g12,
        g22: j.g22,
        detg: j.detg,
    }
}

/// `(cos α, sin² α) = (c/√det g, (a² + b²)/det g)`.
pub fn kahler_angle(j: &FirstJet) -> (f64, f64) {
    (j.cos_alpha, j.sin2_alpha)
}
