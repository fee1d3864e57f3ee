//! Models of hyperbolic space attached to a Lorentz lattice.
//!
//! * the hyperboloid `{x : x·x = 1, x·ample > 0}` with `cosh d = A·B / (‖A‖‖B‖)`;
//! * the boundary at the cusp `[E]`, identified with `V^{⊥E,P}` through `φ`;
//! * the upper half space `V^{⊥E,P} × ℝ₊`, reached through `Φ(U) = (u/w, 1/w)`;
//! * the Poincaré ball, from a real diagonalization of the form.
//!
//! Exact quantities (squared boundary distances, `φ`, `Φ`) stay in the scalar
//! field of the frame. Anything involving a square root is returned as `f64`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::frame::FibrationFrame;
use crate::lattice::{IntersectionForm, LatticeVector};
use crate::linalg::{congruence_diagonalize, Matrix};
use crate::scalar::{Rational, Scalar};

fn acosh_1p(delta: f64) -> f64 {
    // acosh(1 + δ) without cancellation for small δ
    let delta = delta.max(0.0);
    (delta + (delta * (delta + 2.0)).sqrt()).ln_1p()
}

/// Hyperbolic distance between the rays of `a` and `b` in the light cone of `ample`.
///
/// Uses `sinh² d = ((a·b)² − (a·a)(b·b)) / ((a·a)(b·b))`, which is exact in the
/// scalar field and well conditioned near `d = 0`.
pub fn hyperbolic_distance<T: Scalar>(
    form: &IntersectionForm<T>,
    ample: &LatticeVector<T>,
    a: &LatticeVector<T>,
    b: &LatticeVector<T>,
) -> Result<f64> {
    for x in [a, b] {
        if !form.in_light_cone(x, ample)? {
            return Err(Error::Domain(format!("{x} is not in the light cone")));
        }
    }
    let ab = form.inner(a, b)?;
    let aa_bb = form.inner(a, a)? * form.inner(b, b)?;
    let sinh_sq = (ab.clone() * ab - aa_bb.clone()) / aa_bb;
    Ok(sinh_sq.to_f64_lossy().max(0.0).sqrt().asinh())
}

/// A null class off the cusp ray, stored by an arbitrary positive representative.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryClass<T> {
    representative: LatticeVector<T>,
}

impl<T: Scalar> BoundaryClass<T> {
    pub fn new(frame: &FibrationFrame<T>, a: LatticeVector<T>) -> Result<Self> {
        let form = frame.form();
        if !form.inner(&a, &a)?.is_negligible() {
            return Err(Error::Domain(format!("{a} is not null")));
        }
        let amp = form.inner(&a, frame.ample())?;
        if !amp.is_positive() || amp.is_negligible() {
            return Err(Error::Domain(format!("{a} is on the wrong side of the light cone")));
        }
        if a.is_parallel(frame.class_e()) {
            return Err(Error::Cusp(format!("{a} is the cusp [E] itself")));
        }
        let ae = form.inner(&a, frame.class_e())?;
        if !ae.is_positive() || ae.is_negligible() {
            return Err(Error::Cusp(format!("{a} has A·E = {ae}, expected positive")));
        }
        Ok(BoundaryClass { representative: a })
    }

    /// The class `P − ½(x·x)E + x` whose `φ`-image is `x ∈ V^{⊥E,P}`.
    pub fn from_phi(frame: &FibrationFrame<T>, x: &LatticeVector<T>) -> Result<Self> {
        let d = frame.decompose(x)?;
        if !d.a_p.is_negligible() || !d.a_e.is_negligible() {
            return Err(Error::Input(format!("{x} is not in V^(E,P)")));
        }
        let half_xx = frame.inner(x, x)? / T::from_int(2);
        let a = &frame.class_p().add_scaled(&-half_xx, frame.class_e()) + x;
        Self::new(frame, a)
    }

    pub fn representative(&self) -> &LatticeVector<T> {
        &self.representative
    }

    /// Representative scaled to `A·E = 1`.
    pub fn normalized(&self, frame: &FibrationFrame<T>) -> LatticeVector<T> {
        let ae = frame.form().dot(&self.representative, frame.class_e());
        self.representative.scaled(&(T::one() / ae))
    }

    pub fn scaled(&self, c: &T) -> Result<Self> {
        if !c.is_positive() || c.is_negligible() {
            return Err(Error::Domain("boundary representatives scale by positive factors".into()));
        }
        Ok(BoundaryClass {
            representative: self.representative.scaled(c),
        })
    }
}

/// `|ĀB̄|²_E = 2 A·B / ((A·E)(B·E))`, exact.
pub fn boundary_distance_sq<T: Scalar>(frame: &FibrationFrame<T>, a: &BoundaryClass<T>, b: &BoundaryClass<T>) -> T {
    let f = frame.form();
    let (a, b) = (&a.representative, &b.representative);
    T::from_int(2) * f.dot(a, b) / (f.dot(a, frame.class_e()) * f.dot(b, frame.class_e()))
}

pub fn boundary_distance<T: Scalar>(frame: &FibrationFrame<T>, a: &BoundaryClass<T>, b: &BoundaryClass<T>) -> f64 {
    boundary_distance_sq(frame, a, b).to_f64_lossy().max(0.0).sqrt()
}

/// `φ(A) = 𝐚 / (A·E)`, the `V^{⊥E,P}` part of the normalized representative.
pub fn phi<T: Scalar>(frame: &FibrationFrame<T>, a: &BoundaryClass<T>) -> LatticeVector<T> {
    phi_vector(frame, &a.representative).expect("boundary classes have A·E > 0")
}

/// `φ` extended to any class with `A·E ≠ 0`.
pub fn phi_vector<T: Scalar>(frame: &FibrationFrame<T>, a: &LatticeVector<T>) -> Result<LatticeVector<T>> {
    let d = frame.decompose(a)?;
    if d.a_p.is_negligible() {
        return Err(Error::Cusp(format!("{a} has A·E = 0")));
    }
    Ok(d.perp.scaled(&(T::one() / d.a_p)))
}

/// Squared Euclidean norm `−u·u` on `V^{⊥E,P}`.
pub fn euclidean_norm_sq<T: Scalar>(form: &IntersectionForm<T>, u: &LatticeVector<T>) -> Result<T> {
    Ok(-form.inner(u, u)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpperHalfSpacePoint<T> {
    /// Horizontal part, a vector of `V^{⊥E,P}` in lattice coordinates.
    pub x: LatticeVector<T>,
    pub z: T,
}

/// `Φ(U) = (u/w, 1/w)` where `U = wP + vE + u` lies on `H` (`U·U = 1`).
pub fn to_upper_half_space<T: Scalar>(frame: &FibrationFrame<T>, u: &LatticeVector<T>) -> Result<UpperHalfSpacePoint<T>> {
    let uu = frame.inner(u, u)?;
    let off = uu.clone() - T::one();
    if (T::EXACT && !off.is_negligible()) || off.to_f64_lossy().abs() > 1e-9 {
        return Err(Error::Domain(format!("U·U = {uu}; points of H have U·U = 1")));
    }
    let d = frame.decompose(u)?;
    let w = d.a_p;
    if !w.is_positive() || w.is_negligible() {
        return Err(Error::Domain(format!("U·E = {w} is not positive")));
    }
    Ok(UpperHalfSpacePoint {
        x: d.perp.scaled(&(T::one() / w.clone())),
        z: T::one() / w,
    })
}

/// `Φ` of the ray through a light-cone vector of any scale. The horizontal
/// part is exact; only the final `√(U·U)` is rounded.
pub fn ray_to_upper_half_space<T: Scalar>(frame: &FibrationFrame<T>, u: &LatticeVector<T>) -> Result<UpperHalfSpacePoint<f64>> {
    if !frame.form().in_light_cone(u, frame.ample())? {
        return Err(Error::Domain(format!("{u} is not in the light cone")));
    }
    let d = frame.decompose(u)?;
    if !d.a_p.is_positive() || d.a_p.is_negligible() {
        return Err(Error::Domain(format!("U·E = {} is not positive", d.a_p)));
    }
    let x = d.perp.scaled(&(T::one() / d.a_p.clone())).to_f64();
    let z = frame.inner(u, u)?.to_f64_lossy().sqrt() / d.a_p.to_f64_lossy();
    Ok(UpperHalfSpacePoint { x, z })
}

/// Inverse of [`to_upper_half_space`]: `w = 1/z`, `u = w x`, `v = (1 − u·u) / 2w`.
pub fn from_upper_half_space<T: Scalar>(frame: &FibrationFrame<T>, p: &UpperHalfSpacePoint<T>) -> Result<LatticeVector<T>> {
    if !p.z.is_positive() || p.z.is_negligible() {
        return Err(Error::Domain(format!("height z = {} is not positive", p.z)));
    }
    let w = T::one() / p.z.clone();
    let u = p.x.scaled(&w);
    let v = (T::one() - frame.inner(&u, &u)?) / (T::from_int(2) * w.clone());
    Ok(&frame.class_p().scaled(&w).add_scaled(&v, frame.class_e()) + &u)
}

/// Hyperbolic distance in the upper half space with metric `(‖dx‖² + dz²)/z²`.
pub fn uhs_distance<T: Scalar>(form: &IntersectionForm<T>, p: &UpperHalfSpacePoint<T>, q: &UpperHalfSpacePoint<T>) -> Result<f64> {
    let dx = &p.x - &q.x;
    let dz = p.z.clone() - q.z.clone();
    let num = euclidean_norm_sq(form, &dx)? + dz.clone() * dz;
    let delta = num / (T::from_int(2) * p.z.clone() * q.z.clone());
    Ok(acosh_1p(delta.to_f64_lossy()))
}

/// Hyperbolic distance between two points of the open unit ball.
pub fn ball_distance(p: &[f64], q: &[f64]) -> f64 {
    let sq = |v: &mut dyn Iterator<Item = f64>| v.map(|t| t * t).sum::<f64>();
    let diff = sq(&mut p.iter().zip(q).map(|(a, b)| a - b));
    let np = sq(&mut p.iter().copied());
    let nq = sq(&mut q.iter().copied());
    acosh_1p(2.0 * diff / ((1.0 - np) * (1.0 - nq)))
}

/// An orthogonal basis `bₖ` of `V^{⊥E,P}` with the products `bₖ·bₖ < 0`.
///
/// Gram–Schmidt over the scalar field, fed first with the translation
/// vectors and then with the perpendicular parts of the standard basis.
pub(crate) fn orthogonal_perp_basis<T: Scalar>(frame: &FibrationFrame<T>) -> Result<Vec<(LatticeVector<T>, T)>> {
    let n = frame.dim();
    let target = n - 2;
    let mut ortho: Vec<(LatticeVector<T>, T)> = Vec::new();
    let candidates = frame
        .translations()
        .iter()
        .cloned()
        .map(Ok)
        .chain((0..n).map(|j| frame.decompose(&LatticeVector::basis(n, j)).map(|d| d.perp)));
    for c in candidates {
        if ortho.len() == target {
            break;
        }
        let mut w = c?;
        for (b, bb) in &ortho {
            let coef = frame.form().dot(&w, b) / bb.clone();
            w = w.add_scaled(&-coef, b);
        }
        let ww = frame.form().dot(&w, &w);
        if ww.is_negligible() {
            continue;
        }
        if ww.is_positive() {
            return Err(Error::Frame(format!("{w} in V^(E,P) has positive square")));
        }
        ortho.push((w, ww));
    }
    if ortho.len() != target {
        return Err(Error::Degenerate("V^(E,P) has the wrong dimension".into()));
    }
    Ok(ortho)
}

/// An orthonormal basis of `V^{⊥E,P}` for the Euclidean structure `−(·)`.
///
/// The first axis is always along `v₁`.
#[derive(Clone, Debug)]
pub struct EuclideanChart {
    axes: Vec<LatticeVector<f64>>,
    form: IntersectionForm<f64>,
}

impl EuclideanChart {
    pub fn new<T: Scalar>(frame: &FibrationFrame<T>) -> Result<Self> {
        let ortho = orthogonal_perp_basis(frame)?;
        let axes = ortho
            .iter()
            .map(|(b, bb)| {
                let norm = (-bb.to_f64_lossy()).sqrt();
                b.to_f64().scaled(&(1.0 / norm))
            })
            .collect();
        Ok(EuclideanChart {
            axes,
            form: frame.form().to_f64(),
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Euclidean coordinates of `u ∈ V^{⊥E,P}`.
    pub fn coords<T: Scalar>(&self, u: &LatticeVector<T>) -> Vec<f64> {
        let u = u.to_f64();
        self.axes.iter().map(|b| -self.form.dot(&u, b)).collect()
    }

    /// Lattice coordinates of the point with Euclidean coordinates `c`.
    pub fn vector(&self, c: &[f64]) -> LatticeVector<f64> {
        c.iter()
            .zip(&self.axes)
            .fold(LatticeVector::zero(self.form.dim()), |acc, (ck, b)| acc.add_scaled(ck, b))
    }
}

fn exact_coords<T: Scalar>(x: &LatticeVector<T>) -> Result<Vec<Rational>> {
    x.coords()
        .iter()
        .map(|c| c.to_rational().ok_or_else(|| Error::Domain(format!("coordinate {c} is not finite"))))
        .collect()
}

fn exact_matrix<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<Rational>> {
    let rows = m.to_rows().iter().map(|r| exact_coords(&LatticeVector::new(r.clone()))).collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows).expect("same shape"))
}

/// Real coordinates in which the form is `diag(1, −1, …, −1)`, and the
/// projection to the Poincaré ball.
#[derive(Clone, Debug)]
pub struct BallChart {
    basis: Matrix<f64>,
    // exact copies keep x·x and the Minkowski coordinates free of cancellation
    gram: Matrix<Rational>,
    inverse: Matrix<Rational>,
    scales: Vec<f64>,
    time: usize,
    orientation: f64,
}

impl BallChart {
    /// Diagonalizes the form in the order of the input basis.
    pub fn new<T: Scalar>(form: &IntersectionForm<T>, ample: &LatticeVector<T>) -> Result<Self> {
        Self::build(form, ample, None)
    }

    /// Diagonalizes starting from the ample class, which then maps to the origin.
    pub fn centered<T: Scalar>(form: &IntersectionForm<T>, ample: &LatticeVector<T>) -> Result<Self> {
        let n = form.dim();
        form.check(ample)?;
        let mut columns = vec![ample.coords().to_vec()];
        for j in 0..n {
            let mut trial = columns.clone();
            trial.push(LatticeVector::<T>::basis(n, j).into_coords());
            if Matrix::from_columns(&trial).expect("equal lengths").rank() == trial.len() {
                columns = trial;
            }
        }
        let start = Matrix::from_columns(&columns).expect("equal lengths");
        Self::build(form, ample, Some(&start))
    }

    fn build<T: Scalar>(form: &IntersectionForm<T>, ample: &LatticeVector<T>, start: Option<&Matrix<T>>) -> Result<Self> {
        if !form.in_light_cone(ample, ample)? {
            return Err(Error::Domain(format!("{ample} has nonpositive square")));
        }
        let c = congruence_diagonalize(form.gram(), start);
        let inverse = c
            .basis
            .inverse()
            .ok_or_else(|| Error::Degenerate("diagonalizing basis is singular".into()))?;
        let inverse = exact_matrix(&inverse)?;
        let gram = exact_matrix(form.gram())?;
        let positive: Vec<usize> = (0..c.diagonal.len())
            .filter(|&k| c.diagonal[k].is_positive() && !c.diagonal[k].is_negligible())
            .collect();
        if positive.len() != 1 || c.diagonal.iter().any(Scalar::is_negligible) {
            return Err(Error::Signature {
                pos: positive.len(),
                neg: c.diagonal.len() - positive.len(),
                zero: c.diagonal.iter().filter(|d| d.is_negligible()).count(),
                expected_neg: c.diagonal.len() - 1,
            });
        }
        let scales = c.diagonal.iter().map(|d| d.to_f64_lossy().abs().sqrt()).collect();
        let mut chart = BallChart {
            basis: c.basis.map(T::to_f64_lossy),
            gram,
            inverse,
            scales,
            time: positive[0],
            orientation: 1.0,
        };
        let (t, _) = chart.minkowski(ample)?;
        chart.orientation = t.signum();
        Ok(chart)
    }

    pub fn ambient_dim(&self) -> usize {
        self.scales.len()
    }

    /// `(x₀, 𝐱)` with `x·x = x₀² − |𝐱|²` and `x₀ > 0` on the ample side.
    pub fn minkowski<T: Scalar>(&self, x: &LatticeVector<T>) -> Result<(f64, Vec<f64>)> {
        if x.dim() != self.ambient_dim() {
            return Err(Error::Dimension {
                expected: self.ambient_dim(),
                found: x.dim(),
            });
        }
        let y = self.inverse.mul_vec(&exact_coords(x)?);
        let mut time = 0.0;
        let mut space = Vec::with_capacity(y.len() - 1);
        for (k, yk) in y.iter().enumerate() {
            let zk = yk.to_f64_lossy() * self.scales[k];
            if k == self.time {
                time = zk * self.orientation;
            } else {
                space.push(zk);
            }
        }
        Ok((time, space))
    }

    /// Lattice coordinates of the vector with Minkowski coordinates `(time, space)`.
    pub fn lattice_vector(&self, time: f64, space: &[f64]) -> LatticeVector<f64> {
        let mut y = Vec::with_capacity(self.scales.len());
        let mut rest = space.iter();
        for (k, s) in self.scales.iter().enumerate() {
            let zk = if k == self.time {
                time * self.orientation
            } else {
                *rest.next().expect("space has ambient_dim - 1 entries")
            };
            y.push(zk / s);
        }
        LatticeVector::new(self.basis.mul_vec(&y))
    }

    /// Image in the closed unit ball; null rays land on the unit sphere.
    pub fn coords<T: Scalar>(&self, x: &LatticeVector<T>) -> Result<Vec<f64>> {
        let (t, s) = self.minkowski(x)?;
        let xr = exact_coords(x)?;
        let xx = xr
            .iter()
            .zip(self.gram.mul_vec(&xr))
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            .to_f64_lossy();
        if t <= 0.0 || xx < -1e-9 * t * t {
            return Err(Error::Domain(format!("{x} is outside the closed light cone")));
        }
        let denom = t + xx.max(0.0).sqrt();
        Ok(s.iter().map(|v| v / denom).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn v(c: &[i64]) -> LatticeVector<Q> {
        LatticeVector::from_ints(c)
    }

    #[test]
    fn boundary_example_on_f4() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let a = BoundaryClass::new(&frame, frame.class_p()).unwrap();
        let b = BoundaryClass::new(&frame, v(&[2, 1, 1, 0])).unwrap();
        assert_eq!(boundary_distance_sq(&frame, &a, &b), Q::from_int(4));
        assert_eq!(boundary_distance(&frame, &a, &b), 2.0);
        assert_eq!(boundary_distance_sq(&frame, &a, &a), Q::from_int(0));
        let b3 = b.scaled(&Q::from_int(3)).unwrap();
        assert_eq!(boundary_distance_sq(&frame, &a, &b3), boundary_distance_sq(&frame, &a, &b));
        assert!(phi(&frame, &a).is_zero());
        assert_eq!(phi(&frame, &b3), v(&[0, 0, 1, 0]));
        assert!(matches!(BoundaryClass::new(&frame, frame.class_e().clone()), Err(Error::Cusp(_))));
        assert!(BoundaryClass::new(&frame, frame.ample().clone()).is_err());
    }

    #[test]
    fn upper_half_space_examples() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let u = frame.class_p().add_scaled(&Q::ratio(1, 2), frame.class_e());
        assert_eq!(frame.inner(&u, &u).unwrap(), Q::from_int(1));
        let p = to_upper_half_space(&frame, &u).unwrap();
        assert!(p.x.is_zero());
        assert_eq!(p.z, Q::from_int(1));
        let u2 = frame.class_p().scaled(&Q::from_int(2)).add_scaled(&Q::ratio(1, 4), frame.class_e());
        let p2 = to_upper_half_space(&frame, &u2).unwrap();
        assert_eq!(p2.z, Q::ratio(1, 2));
        assert_eq!(from_upper_half_space(&frame, &p2).unwrap(), u2);
        assert!(to_upper_half_space(&frame, &frame.class_p().scaled(&Q::from_int(-1))).is_err());
    }

    #[test]
    fn distances_agree_on_f4() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let a = v(&[2, 1, 0, 0]);
        let b = v(&[1, 1, 0, 0]);
        let d = hyperbolic_distance(frame.form(), frame.ample(), &a, &b).unwrap();
        let d2 = hyperbolic_distance(frame.form(), frame.ample(), &a.scaled(&Q::from_int(5)), &b).unwrap();
        assert!((d - d2).abs() < 1e-12);
        assert_eq!(hyperbolic_distance(frame.form(), frame.ample(), &a, &a).unwrap(), 0.0);
        // A·A = 4, B·B = 2, A·B = 3: cosh d = 3/√8
        assert!((d - (3.0 / 8f64.sqrt()).acosh()).abs() < 1e-12);

        let ff = frame.to_f64();
        let norm = |x: &LatticeVector<Q>| {
            let x = x.to_f64();
            let n = ff.inner(&x, &x).unwrap().sqrt();
            x.scaled(&(1.0 / n))
        };
        let pa = to_upper_half_space(&ff, &norm(&a)).unwrap();
        let pb = to_upper_half_space(&ff, &norm(&b)).unwrap();
        assert!((uhs_distance(ff.form(), &pa, &pb).unwrap() - d).abs() < 1e-9);

        let chart = BallChart::centered(frame.form(), frame.ample()).unwrap();
        let ba = chart.coords(&a).unwrap();
        assert!(ba.iter().all(|c| c.abs() < 1e-15));
        let bb = chart.coords(&b).unwrap();
        assert!((ball_distance(&ba, &bb) - d).abs() < 1e-9);
        let (t, sp) = chart.minkowski(&b).unwrap();
        let back = chart.lattice_vector(t, &sp);
        assert!(back.coords().iter().zip(b.to_f64().coords()).all(|(x, y)| (x - y).abs() < 1e-12));
        let null = chart.coords(&v(&[2, 1, 1, 0])).unwrap();
        let r: f64 = null.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(chart.coords(&frame.ample().scaled(&Q::from_int(-1))).is_err());
    }

    #[test]
    fn uncentered_ball_chart_sends_first_timelike_axis_to_origin() {
        let form = IntersectionForm::<Q>::from_int_rows(&[&[2, 0, 0], &[0, -1, 0], &[0, 0, -3]]).unwrap();
        let chart = BallChart::new(&form, &v(&[1, 0, 0])).unwrap();
        assert!(chart.coords(&v(&[1, 0, 0])).unwrap().iter().all(|c| *c == 0.0));
        assert!(chart.coords(&v(&[-1, 0, 0])).is_err());
    }

    #[test]
    fn euclidean_chart_on_f4() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let chart = EuclideanChart::new(&frame).unwrap();
        assert_eq!(chart.dim(), 2);
        assert_eq!(chart.coords(&v(&[0, 0, 1, 0])), vec![2.0, 0.0]);
        assert_eq!(chart.coords(&v(&[0, 0, 0, 1])), vec![0.0, 2.0]);
        let back = chart.vector(&[2.0, -4.0]);
        assert_eq!(back, LatticeVector::new(vec![0.0, 0.0, 1.0, -2.0]));
    }
}
