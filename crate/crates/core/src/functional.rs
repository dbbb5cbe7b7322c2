//! Quadrature of surface integrals: the functional `L`, area, symplectic
//! area, degree and the angle integrals.
//!
//! On the torus every node carries weight `hx·hy`. On an open patch the
//! trapezoid rule runs over the rectangle of nodes at least `margin` away
//! from the boundary, with half weights on its edges.

use crate::error::{GeomError, Result};
use crate::jet::FirstJet;
use crate::pointwise::PointGeometry;
use crate::surface::{DomainMode, GraphSurface, Node, FIRST_JET_REACH, SECOND_JET_REACH};

/// Default floor on `cos α` for the angle integrals.
pub const ANGLE_INTEGRAL_FLOOR: f64 = 0.05;

/// Trapezoid weight of a node for the rectangle `margin` nodes in from the
/// boundary. Zero outside it.
pub fn quadrature_weight(s: &GraphSurface, node: Node, margin: usize) -> f64 {
    let cell = s.hx() * s.hy();
    match s.mode() {
        DomainMode::PeriodicTorus => cell,
        DomainMode::OpenPatch => {
            let axis = |k: usize, n: usize| {
                let (lo, hi) = (margin, n - 1 - margin);
                if k < lo || k > hi {
                    0.0
                } else if k == lo || k == hi {
                    0.5
                } else {
                    1.0
                }
            };
            cell * axis(node.i, s.nx()) * axis(node.j, s.ny())
        }
    }
}

/// `Σ w_k q(node_k)` in row-major order, skipping zero-weight nodes.
pub fn integrate<F>(s: &GraphSurface, margin: usize, mut integrand: F) -> Result<f64>
where
    F: FnMut(Node) -> Result<f64>,
{
    let mut sum = 0.0;
    for k in 0..s.len() {
        let node = s.node_of(k);
        let w = quadrature_weight(s, node, margin);
        if w != 0.0 {
            sum += w * integrand(node)?;
        }
    }
    Ok(sum)
}

/// Same as [`integrate`] over precomputed per-node values.
pub fn integrate_values(s: &GraphSurface, margin: usize, values: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (k, v) in values.iter().enumerate() {
        let w = quadrature_weight(s, s.node_of(k), margin);
        if w != 0.0 {
            sum += w * v;
        }
    }
    sum
}

fn symplectic_jet(s: &GraphSurface, node: Node) -> Result<FirstJet> {
    let j = s.first_jet(node)?;
    if j.c <= 0.0 {
        return Err(GeomError::NotSymplectic {
            node: Some((node.i, node.j)),
            c: j.c,
        });
    }
    Ok(j)
}

/// `L = ∫ sec α dμ = ∫ det g / c dx dy`.
pub fn functional_l(s: &GraphSurface) -> Result<f64> {
    integrate(s, FIRST_JET_REACH, |n| Ok(symplectic_jet(s, n)?.secant_density()))
}

/// `∫ √det g dx dy`
pub fn area(s: &GraphSurface) -> f64 {
    integrate(s, FIRST_JET_REACH, |n| Ok(s.first_jet(n)?.detg.sqrt()))
        .expect("first jets exist on the quadrature rectangle")
}

/// `∫ F*ω = ∫ c dx dy`
pub fn symplectic_area(s: &GraphSurface) -> f64 {
    integrate(s, FIRST_JET_REACH, |n| Ok(s.first_jet(n)?.c))
        .expect("first jets exist on the quadrature rectangle")
}

/// `(1/π) ∫ F*ω`
pub fn degree(s: &GraphSurface) -> f64 {
    symplectic_area(s) / std::f64::consts::PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleIntegrals {
    /// `∫ |∇α|² / cos²α dμ`
    pub i2: f64,
    /// `∫ |∇α|² / cos³α dμ`
    pub i3: f64,
}

pub fn angle_integrals(s: &GraphSurface) -> Result<AngleIntegrals> {
    angle_integrals_with_floor(s, ANGLE_INTEGRAL_FLOOR)
}

pub fn angle_integrals_with_floor(s: &GraphSurface, floor: f64) -> Result<AngleIntegrals> {
    let mut i2 = 0.0;
    let mut i3 = 0.0;
    for k in 0..s.len() {
        let node = s.node_of(k);
        let w = quadrature_weight(s, node, SECOND_JET_REACH);
        if w == 0.0 {
            continue;
        }
        let pg = PointGeometry::new(&s.second_jet(node)?);
        let cos = pg.cos_alpha();
        if cos < floor {
            return Err(GeomError::NearComplexPoint {
                i: node.i,
                j: node.j,
                cos_alpha: cos,
                floor,
            });
        }
        let dmu = w * pg.jet.first.detg.sqrt();
        let q = pg.grad_alpha_sq() / (cos * cos);
        i2 += dmu * q;
        i3 += dmu * q / cos;
    }
    Ok(AngleIntegrals { i2, i3 })
}
