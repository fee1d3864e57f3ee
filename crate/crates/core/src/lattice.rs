//! Lorentzian intersection forms and vectors in rational coordinates.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{congruence_diagonalize, Matrix};
use crate::scalar::{parse_rational, Rational, Scalar};

/// Coordinates of a class relative to the basis of an [`IntersectionForm`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector<T>(Vec<T>);

impl<T: Scalar> LatticeVector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        LatticeVector(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| T::from_int(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![T::zero(); dim])
    }

    /// `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<T> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(T::is_negligible)
    }

    pub fn scaled(&self, c: &T) -> Self {
        LatticeVector(self.0.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &T, other: &Self) -> Self {
        LatticeVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + c.clone() * b.clone())
                .collect(),
        )
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LatticeVector<U> {
        LatticeVector(self.0.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> LatticeVector<f64> {
        self.map(T::to_f64_lossy)
    }

    /// Whether `other` is a scalar multiple of `self` (or either is zero).
    pub fn is_parallel(&self, other: &Self) -> bool {
        let m = Matrix::from_columns(&[self.0.clone(), other.0.clone()]).expect("same length");
        m.rank() < 2
    }
}

impl<T> Index<usize> for LatticeVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> Add for &LatticeVector<T> {
    type Output = LatticeVector<T>;

    fn add(self, rhs: Self) -> LatticeVector<T> {
        assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a.clone() + b.clone()).collect())
    }
}

impl<T: Scalar> Sub for &LatticeVector<T> {
    type Output = LatticeVector<T>;

    fn sub(self, rhs: Self) -> LatticeVector<T> {
        assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a.clone() - b.clone()).collect())
    }
}

impl<T: Scalar> Neg for &LatticeVector<T> {
    type Output = LatticeVector<T>;

    fn neg(self) -> LatticeVector<T> {
        LatticeVector(self.0.iter().map(|a| -a.clone()).collect())
    }
}

impl<T: Scalar> Mul<&LatticeVector<T>> for &Matrix<T> {
    type Output = LatticeVector<T>;

    fn mul(self, rhs: &LatticeVector<T>) -> LatticeVector<T> {
        LatticeVector(self.mul_vec(&rhs.0))
    }
}

impl<T: Scalar> fmt::Display for LatticeVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", cells.join(", "))
    }
}

/// Inertia of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

/// Exact inertia of a symmetric matrix by congruence diagonalization.
pub fn signature<T: Scalar>(gram: &Matrix<T>) -> Result<Signature> {
    if !gram.is_square() {
        return Err(Error::Input(format!(
            "gram matrix is {}x{}, not square",
            gram.rows(),
            gram.cols()
        )));
    }
    if !gram.is_symmetric() {
        return Err(Error::Input("gram matrix is not symmetric".into()));
    }
    let c = congruence_diagonalize(gram, None);
    let mut sig = Signature { pos: 0, neg: 0, zero: 0 };
    for d in &c.diagonal {
        if d.is_negligible() {
            sig.zero += 1;
        } else if d.is_positive() {
            sig.pos += 1;
        } else {
            sig.neg += 1;
        }
    }
    Ok(sig)
}

/// Symmetric form of signature `(1, dim-1)`: the intersection pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionForm<T> {
    gram: Matrix<T>,
    labels: Vec<String>,
}

impl<T: Scalar> IntersectionForm<T> {
    /// Accepts only symmetric Lorentzian gram matrices.
    pub fn new(gram: Matrix<T>) -> Result<Self> {
        let n = gram.rows();
        if n == 0 {
            return Err(Error::Input("empty gram matrix".into()));
        }
        let sig = signature(&gram)?;
        if sig.pos != 1 || sig.zero != 0 || sig.neg != n - 1 {
            return Err(Error::Signature {
                pos: sig.pos,
                neg: sig.neg,
                zero: sig.zero,
                expected_neg: n - 1,
            });
        }
        let labels = (1..=n).map(|i| format!("D{i}")).collect();
        Ok(IntersectionForm { gram, labels })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&x| T::from_int(x)).collect()).collect();
        let gram = Matrix::from_rows(rows).ok_or_else(|| Error::Input("ragged gram matrix".into()))?;
        Self::new(gram)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn check(&self, v: &LatticeVector<T>) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        Ok(())
    }

    /// `uᵀ · gram · v`.
    pub fn inner(&self, u: &LatticeVector<T>, v: &LatticeVector<T>) -> Result<T> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.dot(u, v))
    }

    /// Unchecked product for callers that already validated dimensions.
    pub(crate) fn dot(&self, u: &LatticeVector<T>, v: &LatticeVector<T>) -> T {
        let gv = self.gram.mul_vec(v.coords());
        u.coords()
            .iter()
            .zip(&gv)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn signature(&self) -> Signature {
        signature(&self.gram).expect("validated at construction")
    }

    /// Dual vectors `Dⱼ*` with `Dᵢ · Dⱼ* = δᵢⱼ`: the columns of `gram⁻¹`.
    pub fn dual_basis(&self) -> Result<DualBasis<T>> {
        let inv = self
            .gram
            .inverse()
            .ok_or_else(|| Error::Degenerate("gram matrix is singular".into()))?;
        let vectors: Vec<_> = (0..self.dim()).map(|j| LatticeVector(inv.column(j))).collect();
        let n = self.dim();
        for (j, dual) in vectors.iter().enumerate() {
            for i in 0..n {
                let delta = if i == j { T::one() } else { T::zero() };
                let prod = self.dot(&LatticeVector::basis(n, i), dual);
                if !(prod - delta).is_negligible() {
                    return Err(Error::Consistency(format!("dual basis check failed at ({i},{j})")));
                }
            }
        }
        Ok(DualBasis { vectors })
    }

    /// Strict light-cone membership on the side of `ample`.
    pub fn in_light_cone(&self, x: &LatticeVector<T>, ample: &LatticeVector<T>) -> Result<bool> {
        let xx = self.inner(x, x)?;
        let xa = self.inner(x, ample)?;
        Ok(xx.is_positive() && !xx.is_negligible() && xa.is_positive() && !xa.is_negligible())
    }

    /// Closed cone: `x·x ≥ 0` and `x·ample ≥ 0`, `x ≠ 0`.
    pub fn in_closed_light_cone(&self, x: &LatticeVector<T>, ample: &LatticeVector<T>) -> Result<bool> {
        let xx = self.inner(x, x)?;
        let xa = self.inner(x, ample)?;
        Ok(!x.is_zero() && (xx.is_positive() || xx.is_negligible()) && xa.is_positive() && !xa.is_negligible())
    }

    /// The same form written in the basis given by the columns of `change`:
    /// `changeᵀ · gram · change`. Vectors transport by `change⁻¹`.
    pub fn transported(&self, change: &Matrix<T>) -> Result<Self> {
        if change.rows() != self.dim() || !change.is_square() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: change.rows(),
            });
        }
        let gram = change.transpose().mul(&self.gram).mul(change);
        IntersectionForm::new(gram)?.with_labels(self.labels.clone())
    }

    /// Orthogonal projection (with respect to the form) onto `span`, which must
    /// carry a nondegenerate restricted form. Returns the coefficients and the projection.
    pub fn project_onto(&self, span: &[LatticeVector<T>], x: &LatticeVector<T>) -> Result<(Vec<T>, LatticeVector<T>)> {
        self.check(x)?;
        let k = span.len();
        let mut g = Matrix::zeros(k, k);
        for i in 0..k {
            self.check(&span[i])?;
            for j in 0..k {
                g[(i, j)] = self.dot(&span[i], &span[j]);
            }
        }
        let inv = g
            .inverse()
            .ok_or_else(|| Error::Degenerate("span carries a degenerate form".into()))?;
        let rhs: Vec<T> = span.iter().map(|w| self.dot(w, x)).collect();
        let coeffs = inv.mul_vec(&rhs);
        let mut proj = LatticeVector::zero(self.dim());
        for (c, w) in coeffs.iter().zip(span) {
            proj = proj.add_scaled(c, w);
        }
        Ok((coeffs, proj))
    }

    pub fn to_f64(&self) -> IntersectionForm<f64> {
        IntersectionForm {
            gram: self.gram.map(T::to_f64_lossy),
            labels: self.labels.clone(),
        }
    }
}

/// Basis dual to the form's basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBasis<T> {
    pub vectors: Vec<LatticeVector<T>>,
}

/// A JSON matrix or vector entry: an integer or a `"p/q"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged, expecting = "an integer or a rational string such as \"-3/4\"")]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Entry::Int(n) => Ok(Rational::from_int(*n)),
            Entry::Text(s) => parse_rational(s).ok_or_else(|| Error::Config(format!("`{s}` is not a rational"))),
        }
    }
}

pub(crate) fn entries_to_vector(field: &str, entries: &[Entry]) -> Result<LatticeVector<Rational>> {
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| e.to_rational().map_err(|err| Error::Config(format!("field `{field}[{i}]`: {}", err.detail()))))
        .collect::<Result<Vec<_>>>()
        .map(LatticeVector::new)
}

pub(crate) fn entries_to_gram(rows: &[Vec<Entry>]) -> Result<Matrix<Rational>> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| e.to_rational().map_err(|err| Error::Config(format!("field `gram[{i}][{j}]`: {}", err.detail()))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some((i, row)) = parsed.iter().enumerate().find(|(_, r)| r.len() != parsed.len()) {
        return Err(Error::Config(format!(
            "field `gram[{i}]`: expected {} entries, found {}",
            parsed.len(),
            row.len()
        )));
    }
    Matrix::from_rows(parsed).ok_or_else(|| Error::Config("field `gram`: ragged rows".into()))
}

pub(crate) fn parse_json<'de, D: Deserialize<'de>>(text: &'de str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        Error::Config(format!(
            "line {} column {}: field `{}`: {}",
            inner.line(),
            inner.column(),
            e.path(),
            inner
        ))
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeConfig {
    gram: Vec<Vec<Entry>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Reads `{"gram": [[...]], "labels": [...]}`.
pub fn form_from_json(text: &str) -> Result<IntersectionForm<Rational>> {
    let cfg: LatticeConfig = parse_json(text)?;
    let form = IntersectionForm::new(entries_to_gram(&cfg.gram)?)?;
    match cfg.labels {
        Some(labels) => form.with_labels(labels),
        None => Ok(form),
    }
}
