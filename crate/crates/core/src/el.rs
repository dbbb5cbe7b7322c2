//! The Euler–Lagrange operator of `L`: graph form, coefficient extraction,
//! principal symbol and the frame form evaluated on a grid.
//!
//! Two graph forms live here. [`el_coefficients`] and [`el_residual_graph`]
//! are the long expanded coordinate system. [`el_residual_vertical`] and
//! [`exact_el_coefficients`] are the exact vertical components
//! `(<E, N3>, <E, N4>)` of the frame-form operator `E = cos²α H − sin²α V`.
//! The two agree whenever `g12 = 0`.

use rand::Rng;

use crate::ambient::AmbientVector;
use crate::error::{GeomError, Result};
use crate::jet::{FirstJet, SecondJet};
use crate::pointwise::PointGeometry;
use crate::surface::{GraphSurface, Node};

/// Coefficients of the second-order part of a 2×2 system
/// `A:∂²f + B:∂²g` (first row) and `C:∂²f + D:∂²g` (second row), where
/// `X:∂²u = X11 u_xx + X12 u_xy + X22 u_yy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElCoefficients {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl ElCoefficients {
    /// Contract with the second derivatives of a jet.
    pub fn contract(&self, j: &SecondJet) -> (f64, f64) {
        let rf = self.a11 * j.fxx + self.a12 * j.fxy + self.a22 * j.fyy
            + self.b11 * j.gxx + self.b12 * j.gxy + self.b22 * j.gyy;
        let rg = self.c11 * j.fxx + self.c12 * j.fxy + self.c22 * j.fyy
            + self.d11 * j.gxx + self.d12 * j.gxy + self.d22 * j.gyy;
        (rf, rg)
    }

    /// Principal symbol in direction `(ξ, η)`.
    pub fn symbol(&self, xi: f64, eta: f64) -> SymbolMatrix {
        let q = |x11: f64, x12: f64, x22: f64| x11 * xi * xi + x12 * xi * eta + x22 * eta * eta;
        SymbolMatrix {
            entries: [
                [q(self.a11, self.a12, self.a22), q(self.b11, self.b12, self.b22)],
                [q(self.c11, self.c12, self.c22), q(self.d11, self.d12, self.d22)],
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolMatrix {
    pub entries: [[f64; 2]; 2],
}

impl SymbolMatrix {
    pub fn det(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// The twelve coefficients of the expanded system, which are `det g²` times the
/// second-order part of [`el_residual_graph`].
pub fn el_coefficients(j: &FirstJet) -> ElCoefficients {
    let FirstJet { a, b, c, g11, g12, g22, .. } = *j;
    let c2 = c * c;
    let (a2, b2, ab) = (a * a, b * b, a * b);
    let r1 = g12 / g11;
    let r2 = g12 / g22;
    ElCoefficients {
        a11: g22 * c2 - g12 * ab + g12 * r1 * a2 + g22 * b2 - g22 * r1 * ab,
        a12: -2.0 * g12 * c2 + g11 * ab - 2.0 * g12 * a2 - 2.0 * g12 * b2
            + g12 * r1 * ab
            + g12 * r2 * ab
            + g22 * ab,
        a22: g11 * c2 + g11 * a2 - g12 * ab - g11 * r2 * ab + g12 * r2 * b2,
        b11: g22 * ab - g22 * r1 * a2 + g12 * b2 - g12 * r1 * ab,
        b12: -g11 * b2 + g12 * r1 * a2 + g22 * a2 - g12 * r2 * b2,
        b22: -g11 * ab + g11 * r2 * b2 - g12 * a2 + g12 * r2 * ab,
        c11: -g12 * a2 + g22 * r1 * b2 + g22 * ab - g12 * r1 * ab,
        c12: g11 * a2 - g12 * r1 * b2 - g22 * b2 + g12 * r2 * a2,
        c22: -g11 * ab - g11 * r2 * a2 + g12 * b2 + g12 * r2 * ab,
        d11: g22 * c2 + g22 * a2 + g12 * r1 * b2 + g12 * ab + g22 * r1 * ab,
        d12: -2.0 * g12 * c2 - g11 * ab - 2.0 * g12 * a2 - 2.0 * g12 * b2
            - g12 * r1 * ab
            - g12 * r2 * ab
            - g22 * ab,
        d22: g11 * c2 + g11 * b2 + g12 * ab + g11 * r2 * ab + g12 * r2 * a2,
    }
}

/// Coefficients of `det g² · (<E, N3>, <E, N4>)`, the exact graph form of the
/// frame-form operator.
pub fn exact_el_coefficients(j: &FirstJet) -> ElCoefficients {
    let FirstJet { a, b, c, g11, g12, g22, .. } = *j;
    let c2 = c * c;
    let (a2, b2, ab) = (a * a, b * b, a * b);
    ElCoefficients {
        a11: c2 * g22 - ab * g12 + b2 * g22,
        a12: -2.0 * c2 * g12 + ab * g11 - b2 * g12 - a2 * g12 + ab * g22,
        a22: c2 * g11 + a2 * g11 - ab * g12,
        b11: ab * g22 + b2 * g12,
        b12: a2 * g22 - b2 * g11,
        b22: -ab * g11 - a2 * g12,
        c11: -a2 * g12 + ab * g22,
        c12: a2 * g11 - b2 * g22,
        c22: -ab * g11 + b2 * g12,
        d11: c2 * g22 + a2 * g22 + ab * g12,
        d12: -2.0 * c2 * g12 - ab * g11 - a2 * g12 - ab * g22 - b2 * g12,
        d22: c2 * g11 + b2 * g11 + ab * g12,
    }
}

/// `(∂x cos α, ∂y cos α)` in contracted closed form.
pub fn cos_alpha_gradient_closed_form(j2: &SecondJet) -> (f64, f64) {
    let (px, py) = cos_gradient_numerators(j2);
    let s = j2.first.detg.powf(-1.5);
    (s * px, s * py)
}

/// `det g^{3/2} · ∂cos α`, polynomial in the jet.
fn cos_gradient_numerators(j2: &SecondJet) -> (f64, f64) {
    let FirstJet { a, b, g11, g12, g22, .. } = j2.first;
    let px = j2.fxx * (g12 * a - g22 * b)
        + j2.gxx * (-g22 * a - g12 * b)
        + j2.fxy * (-g11 * a + g12 * b)
        + j2.gxy * (g11 * b + g12 * a);
    let py = j2.fyy * (-g11 * a + g12 * b)
        + j2.gyy * (g11 * b + g12 * a)
        + j2.fxy * (g12 * a - g22 * b)
        + j2.gxy * (-g22 * a - g12 * b);
    (px, py)
}

fn check_symplectic(j: &FirstJet) -> Result<()> {
    if j.c > 0.0 {
        Ok(())
    } else {
        Err(GeomError::NotSymplectic { node: None, c: j.c })
    }
}

/// `(g22 u_xx − 2 g12 u_xy + g11 u_yy)` for `u = f` and `u = g`.
fn metric_laplacians(j2: &SecondJet) -> (f64, f64) {
    let FirstJet { g11, g12, g22, .. } = j2.first;
    (
        g22 * j2.fxx - 2.0 * g12 * j2.fxy + g11 * j2.fyy,
        g22 * j2.gxx - 2.0 * g12 * j2.gxy + g11 * j2.gyy,
    )
}

/// Left-hand sides of the expanded graph system.
pub fn el_residual_graph(j2: &SecondJet) -> Result<(f64, f64)> {
    let j = &j2.first;
    check_symplectic(j)?;
    let FirstJet { a, b, c, g11, g12, g22, detg, .. } = *j;
    let (lf, lg) = metric_laplacians(j2);
    let (cx, cy) = cos_alpha_gradient_closed_form(j2);
    let w = c * c / (detg * detg);
    let s = 1.0 / detg.sqrt();
    let rf = w * lf - s * (cx * (b - g12 / g11 * a) + cy * (a - g12 / g22 * b));
    let rg = w * lg - s * (cx * (a + g12 / g11 * b) - cy * (b + g12 / g22 * a));
    Ok((rf, rg))
}

/// `(<E, N3>, <E, N4>)` with `E = cos²α H − sin²α V`, from the jet alone.
pub fn el_residual_vertical(j2: &SecondJet) -> Result<(f64, f64)> {
    let j = &j2.first;
    check_symplectic(j)?;
    let FirstJet { a, b, c, detg, .. } = *j;
    let (lf, lg) = metric_laplacians(j2);
    let (cx, cy) = cos_alpha_gradient_closed_form(j2);
    let w = c * c / (detg * detg);
    let s = 1.0 / detg.sqrt();
    Ok((w * lf - s * (b * cx + a * cy), w * lg - s * (a * cx - b * cy)))
}

/// Frame-form residual `cos²α H − sin²α V` at a grid node.
pub fn el_residual_frame(s: &GraphSurface, node: Node) -> Result<AmbientVector> {
    let j2 = s.second_jet(node)?;
    PointGeometry::new(&j2).el_vector().map_err(|e| match e {
        GeomError::NotSymplectic { c, .. } => GeomError::NotSymplectic {
            node: Some((node.i, node.j)),
            c,
        },
        e => e,
    })
}

fn check_direction(xi: f64, eta: f64) -> Result<()> {
    if xi == 0.0 && eta == 0.0 {
        Err(GeomError::ZeroDirection)
    } else {
        Ok(())
    }
}

/// Principal symbol of the expanded system.
pub fn symbol(j: &FirstJet, xi: f64, eta: f64) -> Result<SymbolMatrix> {
    check_direction(xi, eta)?;
    Ok(el_coefficients(j).symbol(xi, eta))
}

/// Sum-of-squares closed form of the expanded symbol's determinant.
pub fn symbol_det_closed_form(j: &FirstJet, xi: f64, eta: f64) -> Result<f64> {
    check_direction(xi, eta)?;
    let FirstJet { a, b, c, g11, g12, g22, .. } = *j;
    let c2 = c * c;
    let ab2 = a * a + b * b;
    let (x2, y2, xy) = (xi * xi, eta * eta, xi * eta);
    let q2 = g22 * x2 + g11 * y2 - 2.0 * g12 * xy;
    let q3 = g22 * x2 + g11 * y2 - 3.0 * g12 * xy;
    let g12_2 = g12 * g12;
    let quartic = g11 * g11 * g12_2 * y2 * y2 + g22 * g22 * g12_2 * x2 * x2
        + g12_2 * g11 * g22 * x2 * y2
        - 2.0 * g12_2 * g12 * g11 * xy * y2
        - 2.0 * g12_2 * g12 * g22 * xy * x2;
    Ok(c2 * c2 * q2 * q2 + c2 * ab2 * q3 * q3 + c2 * ab2 / (g11 * g22) * quartic)
}

/// Principal symbol of the exact vertical form.
pub fn exact_symbol(j: &FirstJet, xi: f64, eta: f64) -> Result<SymbolMatrix> {
    check_direction(xi, eta)?;
    Ok(exact_el_coefficients(j).symbol(xi, eta))
}

/// `c² det g (g22 ξ² − 2 g12 ξη + g11 η²)²`
pub fn exact_symbol_det_closed_form(j: &FirstJet, xi: f64, eta: f64) -> Result<f64> {
    check_direction(xi, eta)?;
    let q = j.g22 * xi * xi - 2.0 * j.g12 * xi * eta + j.g11 * eta * eta;
    Ok(j.c * j.c * j.detg * q * q)
}

pub const JET_SAMPLE_RANGE: f64 = 1.5;
pub const JET_SAMPLE_MIN_C: f64 = 0.05;
pub const JET_SAMPLE_MIN_DETG: f64 = 0.05;

/// First jet with uniform derivatives in `[−1.5, 1.5]`, rejected until
/// `c > 0.05` and `det g > 0.05`.
pub fn random_first_jet<R: Rng + ?Sized>(rng: &mut R) -> FirstJet {
    let r = JET_SAMPLE_RANGE;
    loop {
        let j = FirstJet::new(
            rng.gen_range(-r..r),
            rng.gen_range(-r..r),
            rng.gen_range(-r..r),
            rng.gen_range(-r..r),
        );
        if j.c > JET_SAMPLE_MIN_C && j.detg > JET_SAMPLE_MIN_DETG {
            return j;
        }
    }
}

/// Random first jet as above plus uniform second derivatives in `[−1.5, 1.5]`.
pub fn random_second_jet<R: Rng + ?Sized>(rng: &mut R) -> SecondJet {
    let first = random_first_jet(rng);
    let r = JET_SAMPLE_RANGE;
    let mut d = || rng.gen_range(-r..r);
    SecondJet {
        first,
        fxx: d(),
        fxy: d(),
        fyy: d(),
        gxx: d(),
        gxy: d(),
        gyy: d(),
    }
}

/// Unit direction with uniformly distributed angle.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    (t.cos(), t.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::DomainMode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + a.abs().max(b.abs()))
    }

    fn jet_from(first: FirstJet, d: [f64; 6]) -> SecondJet {
        SecondJet {
            first,
            fxx: d[0],
            fxy: d[1],
            fyy: d[2],
            gxx: d[3],
            gxy: d[4],
            gyy: d[5],
        }
    }

    #[test]
    fn flat_plane_coefficients_are_two_laplacians() {
        let k = el_coefficients(&FirstJet::zero());
        assert_eq!((k.a11, k.a22, k.d11, k.d22), (1.0, 1.0, 1.0, 1.0));
        for v in [k.a12, k.b11, k.b12, k.b22, k.c11, k.c12, k.c22, k.d12] {
            assert_eq!(v, 0.0);
        }
        assert_eq!(exact_el_coefficients(&FirstJet::zero()), k);
    }

    #[test]
    fn tilted_plane_coefficients() {
        // values by hand substitution of a=0, b=1, c=1, g = diag(2, 1)
        let k = el_coefficients(&FirstJet::new(1.0, 0.0, 0.0, 0.0));
        let expect = [2.0, 0.0, 2.0, 0.0, -2.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0, 4.0];
        let got = [
            k.a11, k.a12, k.a22, k.b11, k.b12, k.b22, k.c11, k.c12, k.c22, k.d11, k.d12, k.d22,
        ];
        assert_eq!(got, expect);
        let m = symbol(&FirstJet::new(1.0, 0.0, 0.0, 0.0), 0.0, 1.0).unwrap();
        assert_eq!(m.entries, [[2.0, 0.0], [0.0, 4.0]]);
        assert_eq!(m.det(), 8.0);
        assert_eq!(symbol_det_closed_form(&FirstJet::new(1.0, 0.0, 0.0, 0.0), 0.0, 1.0).unwrap(), 8.0);
    }

    #[test]
    fn coefficients_match_symbolic_expansion() {
        // frozen from an exact rational expansion at fx=1/2, fy=-1/3, gx=1/4, gy=1
        let j = FirstJet::new(0.5, -1.0 / 3.0, 0.25, 1.0);
        let k = el_coefficients(&j);
        let expect = [
            (k.a11, 316315.0 / 54432.0),
            (k.b12, -40625.0 / 129276.0),
            (k.c12, -29875.0 / 57456.0),
            (k.d22, 105767.0 / 29184.0),
        ];
        for (got, want) in expect {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn flat_symbol_determinant() {
        let j = FirstJet::zero();
        assert_eq!(symbol(&j, 1.0, 0.0).unwrap().det(), 1.0);
        assert_eq!(symbol_det_closed_form(&j, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn zero_direction_is_rejected() {
        let j = FirstJet::zero();
        assert_eq!(symbol(&j, 0.0, 0.0), Err(GeomError::ZeroDirection));
        assert!(symbol_det_closed_form(&j, 0.0, 0.0).is_err());
        assert!(exact_symbol(&j, 0.0, 0.0).is_err());
    }

    #[test]
    fn affine_and_holomorphic_jets_are_critical() {
        let aff = SecondJet::affine(FirstJet::new(0.3, -0.2, 0.7, 0.1));
        assert_eq!(el_residual_graph(&aff).unwrap(), (0.0, 0.0));
        assert_eq!(cos_alpha_gradient_closed_form(&aff), (0.0, 0.0));
        // f + ig = z², z = 0.3 + 0.2i: fx = 2x, fy = −2y, gx = 2y, gy = 2x
        let (x, y) = (0.3, 0.2);
        let hol = jet_from(FirstJet::new(2.0 * x, -2.0 * y, 2.0 * y, 2.0 * x), [2.0, 0.0, -2.0, 0.0, 2.0, 0.0]);
        let (rf, rg) = el_residual_graph(&hol).unwrap();
        assert!(rf.abs() < 1e-12 && rg.abs() < 1e-12);
        let (vf, vg) = el_residual_vertical(&hol).unwrap();
        assert!(vf.abs() < 1e-12 && vg.abs() < 1e-12);
        assert_eq!(cos_alpha_gradient_closed_form(&hol), (0.0, 0.0));
    }

    #[test]
    fn non_critical_jet_matches_contraction() {
        let j = jet_from(FirstJet::zero(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let (rf, rg) = el_residual_graph(&j).unwrap();
        assert_eq!((rf, rg), (1.0, 0.0));
        let j = jet_from(FirstJet::new(0.4, 0.1, -0.3, 0.2), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let (rf, rg) = el_residual_graph(&j).unwrap();
        let (kf, kg) = el_coefficients(&j.first).contract(&j);
        let d2 = j.first.detg * j.first.detg;
        assert!(rf.abs() > 0.1);
        assert!((rf * d2 - kf).abs() < 1e-12 && (rg * d2 - kg).abs() < 1e-12);
    }

    #[test]
    fn non_symplectic_jet_is_rejected() {
        let j = SecondJet::affine(FirstJet::new(1.0, 0.0, 0.0, -1.0));
        assert!(matches!(el_residual_graph(&j), Err(GeomError::NotSymplectic { .. })));
        assert!(el_residual_vertical(&j).is_err());
    }

    #[test]
    fn both_forms_agree_without_metric_cross_term() {
        // f = f(x), g = g(y) keeps g12 = 0
        let j = jet_from(FirstJet::new(0.7, 0.0, 0.0, -0.4), [0.9, 0.0, 0.0, 0.0, 0.0, -1.3]);
        assert_eq!(j.first.g12, 0.0);
        let (rf, rg) = el_residual_graph(&j).unwrap();
        let (vf, vg) = el_residual_vertical(&j).unwrap();
        assert!((rf - vf).abs() < 1e-14 && (rg - vg).abs() < 1e-14);
    }

    #[test]
    fn random_jet_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let j = random_second_jet(&mut rng);
            let d2 = j.first.detg * j.first.detg;

            let (rf, rg) = el_residual_graph(&j).unwrap();
            let (kf, kg) = el_coefficients(&j.first).contract(&j);
            assert!(rel(rf * d2, kf) < 1e-12 && rel(rg * d2, kg) < 1e-12);

            let (vf, vg) = el_residual_vertical(&j).unwrap();
            let (ef, eg) = exact_el_coefficients(&j.first).contract(&j);
            assert!(rel(vf * d2, ef) < 1e-12 && rel(vg * d2, eg) < 1e-12);

            let pg = PointGeometry::new(&j);
            let (pf, pgv) = pg.vertical(&pg.el_vector().unwrap());
            assert!(rel(pf, vf) < 1e-12 && rel(pgv, vg) < 1e-12, "{pf} {vf} {pgv} {vg}");
        }
    }

    #[test]
    fn random_symbol_determinants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let j = random_first_jet(&mut rng);
            let (xi, eta) = random_direction(&mut rng);
            let direct = symbol(&j, xi, eta).unwrap().det();
            let closed = symbol_det_closed_form(&j, xi, eta).unwrap();
            assert!((direct - closed).abs() <= 1e-9 * (1.0 + direct.abs()));
            assert!(direct > 0.0);
            let exact = exact_symbol(&j, xi, eta).unwrap().det();
            let exact_closed = exact_symbol_det_closed_form(&j, xi, eta).unwrap();
            assert!((exact - exact_closed).abs() <= 1e-9 * (1.0 + exact.abs()));
            assert!(exact > 0.0);
        }
    }

    #[test]
    fn cos_gradient_matches_finite_differences() {
        let f = |x: f64, y: f64| 0.3 * (x + 0.2).sin() * (2.0 * y).cos() + 0.1 * x * y;
        let g = |x: f64, y: f64| 0.25 * (x - y).cos() + 0.2 * x * x;
        let cos_at = |x: f64, y: f64| {
            let h = 1e-5;
            let fx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
            let fy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
            let gx = (g(x + h, y) - g(x - h, y)) / (2.0 * h);
            let gy = (g(x, y + h) - g(x, y - h)) / (2.0 * h);
            FirstJet::new(fx, fy, gx, gy).cos_alpha
        };
        let mut errs = Vec::new();
        for n in [32usize, 64] {
            let h = 1.0 / n as f64;
            let s = GraphSurface::from_fn(n + 1, n + 1, h, h, DomainMode::OpenPatch, |x, y| (f(x, y), g(x, y))).unwrap();
            let mut err: f64 = 0.0;
            // fixed physical window so the sampled set does not drift with h
            for node in s.nodes_with_reach(2) {
                let (x, y) = s.coords(node);
                if !(0.25..=0.75).contains(&x) || !(0.25..=0.75).contains(&y) {
                    continue;
                }
                let j2 = s.second_jet(node).unwrap();
                let (cx, cy) = cos_alpha_gradient_closed_form(&j2);
                let dx = 1e-4;
                let ox = (cos_at(x + dx, y) - cos_at(x - dx, y)) / (2.0 * dx);
                let oy = (cos_at(x, y + dx) - cos_at(x, y - dx)) / (2.0 * dx);
                err = err.max((cx - ox).abs()).max((cy - oy).abs());
            }
            errs.push(err);
        }
        let ratio = errs[0] / errs[1];
        assert!((3.4..4.6).contains(&ratio), "{errs:?}");
    }

    #[test]
    fn frame_residual_is_normal_on_a_grid() {
        let s = GraphSurface::torus_from_fn(32, |x, y| (0.2 * (x + y).sin(), 0.15 * (x - 2.0 * y).cos())).unwrap();
        for node in s.nodes_with_reach(2) {
            let e = el_residual_frame(&s, node).unwrap();
            let pg = PointGeometry::new(&s.second_jet(node).unwrap());
            assert!(e.dot(&pg.e1).abs() < 1e-10 && e.dot(&pg.e2).abs() < 1e-10);
        }
    }
}
