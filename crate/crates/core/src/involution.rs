//! Pullbacks of the fiberwise involutions `P ↦ -P` and `P ↦ Qᵢ - P`.
//!
//! Both are determined by their eigenspaces: `+1` on a rank-two span
//! containing `[E]`, `-1` on its orthogonal complement. Composing them gives
//! the pushforward of fiberwise translation by `Qᵢ`, which must coincide with
//! the parabolic translation `T_{vᵢ}`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::FibrationFrame;
use crate::lattice::LatticeVector;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::translation::{translation, Isometry};

#[derive(Clone, Debug)]
pub struct EigenReflection<T> {
    pub isometry: Isometry<T>,
    /// Spans the `+1` eigenspace.
    pub plus_space: Vec<LatticeVector<T>>,
    pub tag: String,
}

impl<T: Scalar> EigenReflection<T> {
    /// `x ↦ 2·proj(x) - x`, projection taken orthogonally onto `plus_space`.
    fn build(frame: &FibrationFrame<T>, plus_space: Vec<LatticeVector<T>>, tag: String) -> Result<Self> {
        let form = frame.form();
        let n = form.dim();
        let two = T::from_int(2);
        let mut columns = Vec::with_capacity(n);
        for j in 0..n {
            let e = LatticeVector::basis(n, j);
            let (_, proj) = form.project_onto(&plus_space, &e)?;
            columns.push(proj.scaled(&two).add_scaled(&-T::one(), &e).into_coords());
        }
        let matrix = Matrix::from_columns(&columns).expect("square");
        Ok(EigenReflection {
            isometry: Isometry::from_parts(Arc::clone(frame.form_arc()), matrix),
            plus_space,
            tag,
        })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        self.isometry.matrix()
    }

    pub fn is_involution(&self) -> bool {
        let m = self.matrix();
        m.mul(m).is_identity()
    }

    /// Ranks of the `+1` and `-1` eigenspaces, from `rank(M ∓ I)`.
    pub fn eigenspace_ranks(&self) -> (usize, usize) {
        let m = self.matrix();
        let id = Matrix::identity(m.rows());
        let n = m.rows();
        (n - m.sub(&id).rank(), n - m.add(&id).rank())
    }
}

/// `σ₀*`: `+1` on `span{[E], [O]}`, `-1` on its complement.
pub fn sigma0_pullback<T: Scalar>(frame: &FibrationFrame<T>) -> Result<EigenReflection<T>> {
    EigenReflection::build(
        frame,
        vec![frame.class_e().clone(), frame.class_o().clone()],
        "sigma0".into(),
    )
}

/// `σᵢ*`: `+1` on `span{[E], [O] + Dᵢ}`, `-1` on its complement.
pub fn sigma_i_pullback<T: Scalar>(frame: &FibrationFrame<T>, d: &LatticeVector<T>) -> Result<EigenReflection<T>> {
    let form = frame.form();
    form.check(d)?;
    let dd = form.dot(d, d);
    let de = form.dot(d, frame.class_e());
    if !(dd + T::from_int(2)).is_negligible() || !(de - T::one()).is_negligible() {
        return Err(Error::Frame(format!("{d} is not a section class")));
    }
    let od = frame.class_o() + d;
    EigenReflection::build(frame, vec![frame.class_e().clone(), od], "sigma_i".into())
        .map_err(|e| Error::Frame(format!("degenerate section {d}: {e}")))
}

/// `τᵢ* = σᵢ* ∘ σ₀*`, verified against `T_{vᵢ}` before returning.
pub fn tau_pushforward<T: Scalar>(frame: &FibrationFrame<T>, i: usize) -> Result<Isometry<T>> {
    let d = frame
        .sections()
        .get(i)
        .ok_or_else(|| Error::Input(format!("frame has no section with index {i}")))?;
    let s0 = sigma0_pullback(frame)?;
    let si = sigma_i_pullback(frame, d)?;
    let tau = si.isometry.compose(&s0.isometry)?;
    let t = translation(frame, &frame.translations()[i])?;
    if tau != t {
        return Err(Error::Consistency(format!(
            "sigma_{}* o sigma_0* differs from T_v{}:\n{}vs\n{}",
            i + 1,
            i + 1,
            tau.matrix(),
            t.matrix()
        )));
    }
    Ok(tau)
}
