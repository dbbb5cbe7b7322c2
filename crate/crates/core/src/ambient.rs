//! Flat C² = R⁴ with its standard complex structure and Kähler form.
//!
//! Coordinates are ordered `(x, y, u, v)` with complex coordinates
//! `z₁ = x + i y`, `z₂ = u + i v`. The complex structure acts by
//! `J(x, y, u, v) = (−y, x, −v, u)`, the metric is Euclidean and the Kähler
//! form is `ω(U, V) = ⟨JU, V⟩`, so that `⟨U, V⟩ = ω(U, JV)`.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use crate::error::{GeomError, Result};

/// Below this value of `sin α` the tangent plane is treated as a complex line.
pub const DEFAULT_FRAME_EPS: f64 = 1e-8;

/// Relative Gram determinant below which two tangent vectors count as parallel.
pub const GRAM_EPS: f64 = 1e-14;

/// A vector of R⁴ = C².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AmbientVector(pub [f64; 4]);

impl AmbientVector {
    pub const ZERO: AmbientVector = AmbientVector([0.0; 4]);

    pub const fn new(x: f64, y: f64, u: f64, v: f64) -> Self {
        AmbientVector([x, y, u, v])
    }

    pub fn dot(&self, other: &AmbientVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for AmbientVector {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl Add for AmbientVector {
    type Output = AmbientVector;
    fn add(self, rhs: AmbientVector) -> AmbientVector {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        AmbientVector(out)
    }
}

impl AddAssign for AmbientVector {
    fn add_assign(&mut self, rhs: AmbientVector) {
        *self = *self + rhs;
    }
}

impl Sub for AmbientVector {
    type Output = AmbientVector;
    fn sub(self, rhs: AmbientVector) -> AmbientVector {
        self + (-rhs)
    }
}

impl Neg for AmbientVector {
    type Output = AmbientVector;
    fn neg(self) -> AmbientVector {
        AmbientVector(self.0.map(|x| -x))
    }
}

impl Mul<AmbientVector> for f64 {
    type Output = AmbientVector;
    fn mul(self, rhs: AmbientVector) -> AmbientVector {
        AmbientVector(rhs.0.map(|x| self * x))
    }
}

/// The standard complex structure.
pub fn apply_j(u: &AmbientVector) -> AmbientVector {
    let [x, y, p, q] = u.0;
    AmbientVector([-y, x, -q, p])
}

/// The Kähler form `ω(u, v) = ⟨Ju, v⟩`.
pub fn omega(u: &AmbientVector, v: &AmbientVector) -> f64 {
    apply_j(u).dot(v)
}

/// Orthonormal frame `{e1, e2, v3, v4}` along a tangent plane in which
/// `ω = cos α u¹∧u² + cos α u³∧u⁴ + sin α u¹∧u³ − sin α u²∧u⁴`.
///
/// Equivalently `J e1 = cos α e2 + sin α v3` and `J e2 = −cos α e1 − sin α v4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptedFrame {
    pub e1: AmbientVector,
    pub e2: AmbientVector,
    pub v3: AmbientVector,
    pub v4: AmbientVector,
    pub cos_alpha: f64,
    pub sin_alpha: f64,
}

/// The canonical matrix of `J` in an adapted frame: row `k` holds the frame
/// coefficients of `J` applied to the `k`-th frame vector.
pub fn canonical_j_matrix(cos_alpha: f64, sin_alpha: f64) -> [[f64; 4]; 4] {
    let (c, s) = (cos_alpha, sin_alpha);
    [
        [0.0, c, s, 0.0],
        [-c, 0.0, 0.0, -s],
        [-s, 0.0, 0.0, c],
        [0.0, s, -c, 0.0],
    ]
}

impl AdaptedFrame {
    pub fn vectors(&self) -> [AmbientVector; 4] {
        [self.e1, self.e2, self.v3, self.v4]
    }

    /// Matrix of `ω(f_k, f_l)` over the frame vectors. For an adapted frame this
    /// equals [`canonical_j_matrix`].
    pub fn omega_matrix(&self) -> [[f64; 4]; 4] {
        let f = self.vectors();
        let mut m = [[0.0; 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            for (l, entry) in row.iter_mut().enumerate() {
                *entry = omega(&f[k], &f[l]);
            }
        }
        m
    }

    /// Largest violation over orthonormality, the canonical forms of `ω` and `J`,
    /// and `cos² + sin² = 1`.
    pub fn max_violation(&self) -> f64 {
        let f = self.vectors();
        let mut worst = 0.0_f64;
        for k in 0..4 {
            for l in 0..4 {
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((f[k].dot(&f[l]) - target).abs());
            }
        }
        let canon = canonical_j_matrix(self.cos_alpha, self.sin_alpha);
        let om = self.omega_matrix();
        for k in 0..4 {
            // coefficients of J f_k in the frame
            let jf = apply_j(&f[k]);
            for l in 0..4 {
                worst = worst.max((om[k][l] - canon[k][l]).abs());
                worst = worst.max((jf.dot(&f[l]) - canon[k][l]).abs());
            }
        }
        worst.max((self.cos_alpha.powi(2) + self.sin_alpha.powi(2) - 1.0).abs())
    }
}

/// Adapted frame of the oriented plane spanned by `(t1, t2)` with the default
/// complex-point threshold.
pub fn adapted_frame(t1: &AmbientVector, t2: &AmbientVector) -> Result<AdaptedFrame> {
    adapted_frame_with(t1, t2, DEFAULT_FRAME_EPS)
}

pub fn adapted_frame_with(
    t1: &AmbientVector,
    t2: &AmbientVector,
    eps_frame: f64,
) -> Result<AdaptedFrame> {
    let n1 = t1.norm_sq();
    let n2 = t2.norm_sq();
    let d12 = t1.dot(t2);
    let gram = n1 * n2 - d12 * d12;
    if !(gram > GRAM_EPS * n1 * n2) {
        return Err(GeomError::DegenerateTangent { gram });
    }
    let e1 = (1.0 / n1.sqrt()) * *t1;
    let w = *t2 - e1.dot(t2) * e1;
    let e2 = (1.0 / w.norm()) * w;

    let je1 = apply_j(&e1);
    let je2 = apply_j(&e2);
    let cos_alpha = je1.dot(&e2);
    // normal part of J e1 has length sin α; measuring it directly keeps
    // accuracy when cos α is close to 1
    let n3 = je1 - cos_alpha * e2;
    let sin_alpha = n3.norm();
    if sin_alpha < eps_frame {
        return Err(GeomError::ComplexPoint { sin_alpha });
    }
    let v3 = (1.0 / sin_alpha) * n3;
    let v4 = (-1.0 / sin_alpha) * (je2 + cos_alpha * e1);
    Ok(AdaptedFrame {
        e1,
        e2,
        v3,
        v4,
        cos_alpha,
        sin_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: f64, y: f64, u: f64, w: f64) -> AmbientVector {
        AmbientVector::new(x, y, u, w)
    }

    #[test]
    fn j_on_basis_vectors() {
        assert_eq!(apply_j(&v(1.0, 0.0, 0.0, 0.0)), v(0.0, 1.0, 0.0, 0.0));
        assert_eq!(apply_j(&v(0.0, 0.0, 1.0, 0.0)), v(0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn omega_pairings() {
        let e = [
            v(1.0, 0.0, 0.0, 0.0),
            v(0.0, 1.0, 0.0, 0.0),
            v(0.0, 0.0, 1.0, 0.0),
        ];
        assert_eq!(omega(&e[0], &e[1]), 1.0);
        assert_eq!(omega(&e[0], &e[2]), 0.0);
        assert_eq!(omega(&e[1], &e[1]), 0.0);
    }

    #[test]
    fn omega_is_compatible_with_metric() {
        // <U, V> = ω(U, JV), hence ω(u, Ju) = |u|²
        let u = v(0.3, -1.2, 0.7, 2.0);
        let w = v(-0.4, 0.1, 1.5, -0.6);
        assert!((omega(&u, &apply_j(&w)) - u.dot(&w)).abs() < 1e-15);
        assert!((omega(&u, &apply_j(&u)) - u.norm_sq()).abs() < 1e-15);
    }

    #[test]
    fn holomorphic_plane_is_a_complex_point() {
        let err = adapted_frame(&v(1.0, 0.0, 0.0, 0.0), &v(0.0, 1.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, GeomError::ComplexPoint { .. }));
    }

    #[test]
    fn parallel_vectors_are_degenerate() {
        let t = v(1.0, 2.0, 0.5, 0.0);
        let err = adapted_frame(&t, &(3.0 * t)).unwrap_err();
        assert!(matches!(err, GeomError::DegenerateTangent { .. }));
    }

    #[test]
    fn tilted_plane_frame() {
        let fr = adapted_frame(&v(1.0, 0.0, 1.0, 0.0), &v(0.0, 1.0, 0.0, 0.0)).unwrap();
        assert!((fr.cos_alpha - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(fr.max_violation() < 1e-12);
        assert!((omega(&fr.e1, &fr.v3) - fr.sin_alpha).abs() < 1e-12);
        assert!((omega(&fr.e2, &fr.v4) + fr.sin_alpha).abs() < 1e-12);
        assert!((omega(&fr.v3, &fr.v4) - fr.cos_alpha).abs() < 1e-12);
    }

    #[test]
    fn lagrangian_plane_frame() {
        let fr = adapted_frame(&v(1.0, 0.0, 0.0, 0.0), &v(0.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(fr.cos_alpha, 0.0);
        assert!((fr.sin_alpha - 1.0).abs() < 1e-15);
        assert_eq!(omega(&fr.e1, &fr.e2), 0.0);
        assert!(fr.max_violation() < 1e-14);
    }

    /// Reading the J matrix by columns (`J e1 = −cos e2 − sin v3`) is not
    /// compatible with `ω(e1, e2) = cos α` under `ω(U,V) = <JU,V>`: the
    /// resulting `v3` is not orthogonal to `e2`. The row reading is the one
    /// that reproduces the ω-form, which is what `adapted_frame` builds.
    #[test]
    fn column_reading_of_j_matrix_is_inconsistent() {
        let t1 = v(1.0, 0.2, 0.7, -0.3);
        let t2 = v(0.1, 1.0, 0.4, 0.9);
        let fr = adapted_frame(&t1, &t2).unwrap();
        let (c, s) = (fr.cos_alpha, fr.sin_alpha);
        let v3_col = (1.0 / s) * (-apply_j(&fr.e1) - c * fr.e2);
        let v4_col = (1.0 / s) * (apply_j(&fr.e2) - c * fr.e1);
        assert!((v3_col.dot(&fr.e2)).abs() > 0.1);
        // flipping both signs does not help either
        assert!(((-1.0 * v3_col).dot(&fr.e2)).abs() > 0.1);
        assert!((v4_col.dot(&fr.e1)).abs() > 0.1);
        // the row reading passes
        assert!(fr.max_violation() < 1e-12);
    }

    #[test]
    fn random_frames_satisfy_all_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0_f64;
        let mut accepted = 0;
        while accepted < 10_000 {
            let t1 = AmbientVector(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
            let t2 = AmbientVector(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
            match adapted_frame(&t1, &t2) {
                Ok(fr) if fr.sin_alpha >= 0.01 => {
                    worst = worst.max(fr.max_violation());
                    accepted += 1;
                }
                _ => {}
            }
        }
        assert!(worst < 1e-9, "worst violation {worst:e}");
    }

    fn arb_vec() -> impl Strategy<Value = AmbientVector> {
        prop::array::uniform4(-3.0f64..3.0).prop_map(AmbientVector)
    }

    proptest! {
        #[test]
        fn j_is_an_isometry_and_squares_to_minus_one(u in arb_vec(), w in arb_vec()) {
            let ju = apply_j(&u);
            prop_assert!((ju.norm() - u.norm()).abs() <= 1e-15 * (1.0 + u.norm()));
            prop_assert_eq!(apply_j(&ju), -u);
            let lhs = omega(&ju, &apply_j(&w));
            prop_assert!((lhs - omega(&u, &w)).abs() < 1e-12);
            prop_assert!((omega(&u, &w) + omega(&w, &u)).abs() < 1e-12);
        }

        #[test]
        fn frame_depends_only_on_oriented_plane(
            t1 in arb_vec(), t2 in arb_vec(),
            m in prop::array::uniform4(-2.0f64..2.0),
        ) {
            let det = m[0] * m[3] - m[1] * m[2];
            prop_assume!(det.abs() > 0.2);
            let fr = match adapted_frame(&t1, &t2) {
                Ok(fr) if fr.sin_alpha > 0.05 => fr,
                _ => return Ok(()),
            };
            let s1 = m[0] * t1 + m[1] * t2;
            let s2 = m[2] * t1 + m[3] * t2;
            let other = adapted_frame(&s1, &s2).unwrap();
            let expected_cos = fr.cos_alpha * det.signum();
            prop_assert!((other.cos_alpha - expected_cos).abs() < 1e-9);
            if det > 0.0 {
                // span{v3, v4} unchanged: projections of new normals onto old span
                for n in [other.v3, other.v4] {
                    let p = n.dot(&fr.v3).powi(2) + n.dot(&fr.v4).powi(2);
                    prop_assert!((p - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
