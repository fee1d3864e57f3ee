//! Parabolic isometries fixing the cusp `[E]`.
//!
//! `T_v(x) = x - (x·v + ½(x·E)(v·v))E + (x·E)v` preserves the form, fixes `E`
//! and acts on the boundary `V^{⊥E,P}` as translation by `v`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::FibrationFrame;
use crate::lattice::{IntersectionForm, LatticeVector};
use crate::linalg::{IntegralTest, Matrix};
use crate::scalar::Scalar;

/// An exact matrix preserving an intersection form.
#[derive(Clone, Debug)]
pub struct Isometry<T> {
    matrix: Matrix<T>,
    form: Arc<IntersectionForm<T>>,
}

impl<T: Scalar> PartialEq for Isometry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl<T: Scalar> Isometry<T> {
    /// Wraps `matrix` after checking `MᵀJM = J` and that the light cone is kept.
    pub fn new(form: Arc<IntersectionForm<T>>, matrix: Matrix<T>, ample: &LatticeVector<T>) -> Result<Self> {
        let iso = Isometry { matrix, form };
        if !iso.preserves_form() {
            return Err(Error::Input("matrix does not preserve the form".into()));
        }
        let image = iso.apply(ample)?;
        let s = iso.form.inner(ample, &image)?;
        if !s.is_positive() || s.is_negligible() {
            return Err(Error::Input("matrix swaps the two halves of the light cone".into()));
        }
        Ok(iso)
    }

    pub(crate) fn from_parts(form: Arc<IntersectionForm<T>>, matrix: Matrix<T>) -> Self {
        Isometry { matrix, form }
    }

    pub fn identity(form: Arc<IntersectionForm<T>>) -> Self {
        let n = form.dim();
        Isometry {
            matrix: Matrix::identity(n),
            form,
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn form(&self) -> &IntersectionForm<T> {
        &self.form
    }

    pub fn apply(&self, x: &LatticeVector<T>) -> Result<LatticeVector<T>> {
        self.form.check(x)?;
        Ok(&self.matrix * x)
    }

    /// `MᵀJM = J`, exactly for exact scalars.
    pub fn preserves_form(&self) -> bool {
        let j = self.form.gram();
        let back = self.matrix.transpose().mul(j).mul(&self.matrix);
        let n = j.rows();
        (0..n).all(|r| (0..n).all(|c| (back[(r, c)].clone() - j[(r, c)].clone()).is_negligible()))
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    fn same_form(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.form, &other.form) || self.form == other.form {
            Ok(())
        } else {
            Err(Error::Input("isometries act on different forms".into()))
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_form(other)?;
        Ok(Isometry {
            matrix: self.matrix.mul(&other.matrix),
            form: Arc::clone(&self.form),
        })
    }

    pub fn power(&self, m: i64) -> Result<Self> {
        let matrix = self
            .matrix
            .pow(m)
            .ok_or_else(|| Error::Degenerate("isometry is not invertible".into()))?;
        Ok(Isometry {
            matrix,
            form: Arc::clone(&self.form),
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        self.power(-1)
    }

    pub fn is_integral(&self) -> bool
    where
        T: IntegralTest,
    {
        self.matrix.is_integral()
    }
}

/// `T_v(x)` for any `v` with `v·E = 0`.
pub fn apply_translation<T: Scalar>(
    form: &IntersectionForm<T>,
    class_e: &LatticeVector<T>,
    v: &LatticeVector<T>,
    x: &LatticeVector<T>,
) -> LatticeVector<T> {
    let xe = form.dot(x, class_e);
    let half = T::ratio(1, 2);
    let coef = form.dot(x, v) + half * xe.clone() * form.dot(v, v);
    x.add_scaled(&-coef, class_e).add_scaled(&xe, v)
}

/// The matrix of `T_v`; `v` is first replaced by its `V^{⊥E,P}` representative.
pub fn translation<T: Scalar>(frame: &FibrationFrame<T>, v: &LatticeVector<T>) -> Result<Isometry<T>> {
    frame.form().check(v)?;
    if !frame.form().dot(v, frame.class_e()).is_negligible() {
        return Err(Error::Input(format!("translation vector {v} has nonzero product with [E]")));
    }
    let v = frame.stabilize(v)?;
    let n = frame.dim();
    let columns: Vec<Vec<T>> = (0..n)
        .map(|j| apply_translation(frame.form(), frame.class_e(), &v, &LatticeVector::basis(n, j)).into_coords())
        .collect();
    let matrix = Matrix::from_columns(&columns).expect("square");
    Ok(Isometry::from_parts(Arc::clone(frame.form_arc()), matrix))
}

/// `T_v([O])`, checked to be a section class.
pub fn section_translate<T: Scalar>(frame: &FibrationFrame<T>, v: &LatticeVector<T>) -> Result<LatticeVector<T>> {
    let d = translation(frame, v)?.apply(frame.class_o())?;
    let f = frame.form();
    let dd = f.dot(&d, &d);
    let de = f.dot(&d, frame.class_e());
    if !(dd + T::from_int(2)).is_negligible() || !(de - T::one()).is_negligible() {
        return Err(Error::Frame(format!("T_v([O]) = {d} is not a section class")));
    }
    Ok(d)
}

/// Integrality of `T_v`, reported only when it is expected: integral gram,
/// integral `v` and even `v·v`. `None` otherwise.
pub fn integrality_report<T: Scalar + IntegralTest>(frame: &FibrationFrame<T>, v: &LatticeVector<T>) -> Result<Option<bool>> {
    let expected = frame.form().gram().is_integral()
        && v.coords().iter().all(IntegralTest::is_integral_value)
        && (frame.form().dot(v, v) / T::from_int(2)).is_integral_value();
    if !expected {
        return Ok(None);
    }
    Ok(Some(translation(frame, v)?.is_integral()))
}
