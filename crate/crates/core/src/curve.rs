//! Elliptic curves `y² = x³ + ax + b` over ℚ: group law, naive and canonical
//! heights, the Néron–Tate pairing, and pencils of curves with sections.
//!
//! The naive height is `h(P) = log max(|p|, |q|)` for `x(P) = p/q`, so the
//! canonical height computed here is twice the value in the most common
//! normalization.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lattice::{parse_json, Entry};
use crate::linalg::Matrix;
use crate::scalar::{format_rational, ln_abs, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PointQ {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl PointQ {
    pub fn new(x: Rational, y: Rational) -> Self {
        PointQ::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        PointQ::new(Rational::from_int(x), Rational::from_int(y))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, PointQ::Infinity)
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            PointQ::Infinity => None,
            PointQ::Affine { x, .. } => Some(x),
        }
    }
}

impl fmt::Display for PointQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointQ::Infinity => write!(f, "inf"),
            PointQ::Affine { x, y } => write!(f, "({},{})", format_rational(x), format_rational(y)),
        }
    }
}

/// `log max(|p|, |q|)` for `x(P) = p/q` in lowest terms; `0` at infinity.
pub fn naive_height(p: &PointQ) -> f64 {
    match p {
        PointQ::Infinity => 0.0,
        PointQ::Affine { x, .. } => projective_height(x.numer(), x.denom()),
    }
}

fn projective_height(x: &BigInt, z: &BigInt) -> f64 {
    let m = if x.magnitude() >= z.magnitude() { x } else { z };
    if m.is_zero() {
        0.0
    } else {
        ln_abs(m)
    }
}

/// Settings for the doubling-limit canonical height.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightConfig {
    pub tolerance: f64,
    /// Hard cap on the number of doublings.
    pub max_levels: u32,
    /// Largest coordinate size, in decimal digits, before giving up.
    pub digit_budget: u64,
}

impl HeightConfig {
    pub fn new(tolerance: f64) -> Self {
        HeightConfig {
            tolerance,
            max_levels: 9,
            digit_budget: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalHeight {
    pub value: f64,
    /// Number of doublings used.
    pub levels: u32,
    /// Whether two successive estimates agreed to `tolerance / 2`.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveQ {
    a: Rational,
    b: Rational,
}

impl fmt::Display for CurveQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})x + ({})", format_rational(&self.a), format_rational(&self.b))
    }
}

impl CurveQ {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        let c = CurveQ { a, b };
        if c.discriminant().is_zero() {
            return Err(Error::Input(format!("{c} is singular")));
        }
        Ok(c)
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        Self::new(Rational::from_int(a), Rational::from_int(b))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// `4a³ + 27b²`.
    pub fn discriminant(&self) -> Rational {
        let a3 = &self.a * &self.a * &self.a;
        Rational::from_int(4) * a3 + Rational::from_int(27) * &self.b * &self.b
    }

    pub fn contains(&self, p: &PointQ) -> bool {
        match p {
            PointQ::Infinity => true,
            PointQ::Affine { x, y } => y * y == x * x * x + &self.a * x + &self.b,
        }
    }

    /// Checked constructor for a point on this curve.
    pub fn point(&self, x: Rational, y: Rational) -> Result<PointQ> {
        let p = PointQ::new(x, y);
        self.require(&p)?;
        Ok(p)
    }

    fn require(&self, p: &PointQ) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Input(format!("{p} is not on {self}")))
        }
    }

    pub fn negate(&self, p: &PointQ) -> Result<PointQ> {
        self.require(p)?;
        Ok(neg(p))
    }

    pub fn add(&self, p: &PointQ, q: &PointQ) -> Result<PointQ> {
        self.require(p)?;
        self.require(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub fn double(&self, p: &PointQ) -> Result<PointQ> {
        self.add(p, p)
    }

    /// `[n]P` by double-and-add; negative `n` negates.
    pub fn multiply(&self, n: i64, p: &PointQ) -> Result<PointQ> {
        self.require(p)?;
        Ok(self.multiply_unchecked(n, p))
    }

    fn multiply_unchecked(&self, n: i64, p: &PointQ) -> PointQ {
        let mut base = if n < 0 { neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = PointQ::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        acc
    }

    fn add_unchecked(&self, p: &PointQ, q: &PointQ) -> PointQ {
        let (x1, y1, x2, y2) = match (p, q) {
            (PointQ::Infinity, _) => return q.clone(),
            (_, PointQ::Infinity) => return p.clone(),
            (PointQ::Affine { x: x1, y: y1 }, PointQ::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return PointQ::Infinity;
            }
            (Rational::from_int(3) * x1 * x1 + &self.a) / (Rational::from_int(2) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        PointQ::Affine { x: x3, y: y3 }
    }

    /// Integer coefficients `(A, B)` of the model `x ↦ u²x` and the scale `u`.
    fn integral_model(&self) -> (BigInt, BigInt, BigInt) {
        let u = self.a.denom().lcm(self.b.denom());
        let u2 = &u * &u;
        let u4 = &u2 * &u2;
        let u6 = &u4 * &u2;
        let a = (&self.a * Rational::from_integer(u4)).to_integer();
        let b = (&self.b * Rational::from_integer(u6)).to_integer();
        (a, b, u)
    }

    /// `ĥ(P) = lim 4^{-m} h([2^m]P)`.
    ///
    /// Doubling runs on `x = X/Z` of an integral model. After each step the
    /// common factor of `X` and `Z` divides `2⁸(4A³ + 27B²)²`, so it is found
    /// from residues modulo that number instead of a full-size gcd.
    pub fn canonical_height(&self, p: &PointQ, cfg: &HeightConfig) -> Result<CanonicalHeight> {
        self.require(p)?;
        if !(cfg.tolerance > 0.0) {
            return Err(Error::Input(format!("tolerance {} must be positive", cfg.tolerance)));
        }
        let x = match p {
            PointQ::Infinity => {
                return Ok(CanonicalHeight {
                    value: 0.0,
                    levels: 0,
                    converged: true,
                })
            }
            PointQ::Affine { x, .. } => x,
        };
        let (a, b, u) = self.integral_model();
        let x0 = x * Rational::from_integer(&u * &u);
        let (mut big_x, mut big_z) = (x0.numer().clone(), x0.denom().clone());
        let disc = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
        let modulus = BigInt::from(256) * &disc * &disc;
        let budget_bits = (cfg.digit_budget as f64 * std::f64::consts::LOG2_10) as u64;

        let mut prev = projective_height(&big_x, &big_z);
        let mut scale = 1.0;
        let mut defect = 0.0f64;
        for level in 1..=cfg.max_levels {
            if big_z.is_zero() {
                return Ok(CanonicalHeight {
                    value: 0.0,
                    levels: level - 1,
                    converged: true,
                });
            }
            let size = big_x.bits().max(big_z.bits());
            if 4 * size > budget_bits {
                return Err(Error::Resource {
                    levels: level - 1,
                    partial: prev,
                });
            }
            let (nx, nz) = double_x(&big_x, &big_z, &a, &b);
            let g = nx.mod_floor(&modulus).gcd(&nz.mod_floor(&modulus)).gcd(&modulus);
            big_x = nx / &g;
            big_z = nz / &g;
            if big_z.is_negative() {
                big_x = -big_x;
                big_z = -big_z;
            }
            scale *= 4.0;
            let est = if big_z.is_zero() { 0.0 } else { projective_height(&big_x, &big_z) / scale };
            // |h(2Q) − 4h(Q)| ≤ C for all Q bounds the tail by C/(3·4^m);
            // C is taken as twice the largest defect seen so far.
            defect = defect.max((est - prev).abs() * scale);
            if level >= 2 && 2.0 * defect / (3.0 * scale) < cfg.tolerance {
                return Ok(CanonicalHeight {
                    value: est,
                    levels: level,
                    converged: true,
                });
            }
            prev = est;
        }
        Ok(CanonicalHeight {
            value: prev,
            levels: cfg.max_levels,
            converged: false,
        })
    }

    /// `h([n]P)/n²` for `n = 1..=n_max`, by repeated exact addition.
    pub fn n_squared_heights(&self, p: &PointQ, n_max: u32) -> Result<Vec<f64>> {
        self.require(p)?;
        let mut acc = PointQ::Infinity;
        let mut out = Vec::with_capacity(n_max as usize);
        for n in 1..=n_max {
            acc = self.add_unchecked(&acc, p);
            out.push(naive_height(&acc) / f64::from(n * n));
        }
        Ok(out)
    }

    /// `⟨P, Q⟩ = ĥ(P + Q) − ĥ(P) − ĥ(Q)`.
    pub fn nt_pairing(&self, p: &PointQ, q: &PointQ, cfg: &HeightConfig) -> Result<f64> {
        let s = self.add(p, q)?;
        Ok(self.canonical_height(&s, cfg)?.value - self.canonical_height(p, cfg)?.value - self.canonical_height(q, cfg)?.value)
    }

    /// Symmetric matrix `⟨Pᵢ, Pⱼ⟩`.
    pub fn pairing_matrix(&self, points: &[PointQ], cfg: &HeightConfig) -> Result<Vec<Vec<f64>>> {
        let r = points.len();
        let single: Vec<f64> = points
            .iter()
            .map(|p| self.canonical_height(p, cfg).map(|h| h.value))
            .collect::<Result<_>>()?;
        let mut m = vec![vec![0.0; r]; r];
        for i in 0..r {
            m[i][i] = 2.0 * single[i];
            for j in i + 1..r {
                let s = self.add(&points[i], &points[j])?;
                let v = self.canonical_height(&s, cfg)?.value - single[i] - single[j];
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Ok(m)
    }
}

fn neg(p: &PointQ) -> PointQ {
    match p {
        PointQ::Infinity => PointQ::Infinity,
        PointQ::Affine { x, y } => PointQ::Affine { x: x.clone(), y: -y },
    }
}

/// `x([2]P)` in projective form on `y² = x³ + ax + b`.
fn double_x(x: &BigInt, z: &BigInt, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let x2 = x * x;
    let z2 = z * z;
    let z3 = &z2 * z;
    let nx = &x2 * &x2 - BigInt::from(2) * a * &x2 * &z2 - BigInt::from(8) * b * x * &z3 + a * a * &z2 * &z2;
    let nz = BigInt::from(4) * z * (&x2 * x + a * x * &z2 + b * &z3);
    (nx, nz)
}

/// Integer polynomial in `t`, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<BigInt>);

impl Poly {
    pub fn from_ints(c: &[i64]) -> Self {
        Poly(c.iter().map(|&v| BigInt::from(v)).collect()).trimmed()
    }

    pub fn one() -> Self {
        Poly(vec![BigInt::one()])
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + Rational::from_integer(c.clone()))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let get = |p: &Poly, i: usize| p.0.get(i).cloned().unwrap_or_default();
        Poly((0..n).map(|i| get(self, i) + get(other, i)).collect()).trimmed()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }
}

/// A section `(x(t), y(t))` given by integer rational functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilSection {
    pub x_num: Poly,
    pub x_den: Poly,
    pub y_num: Poly,
    pub y_den: Poly,
}

/// The family `y² = x³ + a(t)x + b(t)` with sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    a: Poly,
    b: Poly,
    sections: Vec<PencilSection>,
}

impl Pencil {
    /// Checks `y² = x³ + a x + b` for each section as a polynomial identity
    /// after clearing denominators.
    pub fn new(a: Poly, b: Poly, sections: Vec<PencilSection>) -> Result<Self> {
        for (i, s) in sections.iter().enumerate() {
            if s.x_den.is_zero() || s.y_den.is_zero() {
                return Err(Error::Config(format!("section {i}: zero denominator")));
            }
            let xd2 = s.x_den.pow(2);
            let xd3 = s.x_den.pow(3);
            let lhs = s.y_num.pow(2).mul(&xd3);
            let cubic = s.x_num.pow(3).add(&a.mul(&s.x_num).mul(&xd2)).add(&b.mul(&xd3));
            let rhs = cubic.mul(&s.y_den.pow(2));
            if lhs != rhs {
                return Err(Error::Config(format!(
                    "section {i} does not satisfy the curve equation identically in t"
                )));
            }
        }
        Ok(Pencil { a, b, sections })
    }

    /// `y² = x³ − t²x + t²` with sections `(0, t)` and `(t, t)`.
    pub fn sample() -> Self {
        let t = Poly::from_ints(&[0, 1]);
        Pencil::new(
            Poly::from_ints(&[0, 0, -1]),
            Poly::from_ints(&[0, 0, 1]),
            vec![
                PencilSection {
                    x_num: Poly::from_ints(&[]),
                    x_den: Poly::one(),
                    y_num: t.clone(),
                    y_den: Poly::one(),
                },
                PencilSection {
                    x_num: t.clone(),
                    x_den: Poly::one(),
                    y_num: t,
                    y_den: Poly::one(),
                },
            ],
        )
        .expect("sample pencil is consistent")
    }

    pub fn sections(&self) -> &[PencilSection] {
        &self.sections
    }

    /// The fiber at `t0` and its section points.
    pub fn specialize(&self, t0: &Rational) -> Result<(CurveQ, Vec<PointQ>)> {
        let curve = CurveQ::new(self.a.eval(t0), self.b.eval(t0))
            .map_err(|_| Error::SingularFiber(format_rational(t0)))?;
        let points = self
            .sections
            .iter()
            .map(|s| {
                let (xd, yd) = (s.x_den.eval(t0), s.y_den.eval(t0));
                if xd.is_zero() || yd.is_zero() {
                    return PointQ::Infinity;
                }
                PointQ::new(s.x_num.eval(t0) / xd, s.y_num.eval(t0) / yd)
            })
            .collect::<Vec<_>>();
        for p in &points {
            if !curve.contains(p) {
                return Err(Error::Consistency(format!("{p} is not on the fiber at t = {}", format_rational(t0))));
            }
        }
        Ok((curve, points))
    }
}

fn entries_to_poly(field: &str, entries: &[Entry]) -> Result<Poly> {
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let q = e.to_rational().map_err(|err| Error::Config(format!("field `{field}[{i}]`: {}", err.detail())))?;
            if !q.is_integer() {
                return Err(Error::Config(format!("field `{field}[{i}]`: coefficients must be integers")));
            }
            Ok(q.to_integer())
        })
        .collect::<Result<Vec<_>>>()
        .map(|c| Poly(c).trimmed())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionConfig {
    x: Vec<Entry>,
    y: Vec<Entry>,
    #[serde(default)]
    x_den: Option<Vec<Entry>>,
    #[serde(default)]
    y_den: Option<Vec<Entry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PencilConfig {
    a: Vec<Entry>,
    b: Vec<Entry>,
    sections: Vec<SectionConfig>,
}

/// Reads `{"a": [...], "b": [...], "sections": [{"x": [...], "y": [...]}]}`,
/// coefficients in ascending degree. Sections may add `x_den` / `y_den`.
pub fn pencil_from_json(text: &str) -> Result<Pencil> {
    let cfg: PencilConfig = parse_json(text)?;
    let sections = cfg
        .sections
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let den = |d: &Option<Vec<Entry>>, name: &str| match d {
                Some(d) => entries_to_poly(&format!("sections[{i}].{name}"), d),
                None => Ok(Poly::one()),
            };
            Ok(PencilSection {
                x_num: entries_to_poly(&format!("sections[{i}].x"), &s.x)?,
                x_den: den(&s.x_den, "x_den")?,
                y_num: entries_to_poly(&format!("sections[{i}].y"), &s.y)?,
                y_den: den(&s.y_den, "y_den")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Pencil::new(entries_to_poly("a", &cfg.a)?, entries_to_poly("b", &cfg.b)?, sections)
}

/// `log max(|num|, |den|)` of a rational parameter.
pub fn parameter_height(t: &Rational) -> f64 {
    projective_height(t.numer(), t.denom())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub t: Rational,
    pub h_t: f64,
    pub pairing: Vec<Vec<f64>>,
    pub normalized: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Parameters that were skipped, with the reason.
    pub skipped: Vec<(Rational, String)>,
    /// `max |N_{k+1} − N_k|` over entries of successive normalized matrices.
    pub successive_differences: Vec<f64>,
    /// Least-squares slope of `⟨Pᵢ, Pⱼ⟩_t` against `h(t)`, per entry.
    pub slopes: Vec<Vec<f64>>,
    /// Numerical rank of the last normalized matrix.
    pub gram_rank: usize,
    /// `max |Nᵢⱼ − Nⱼᵢ|` over all rows.
    pub max_asymmetry: f64,
}

impl ScanReport {
    /// Successive differences are nonincreasing after the first step, up to
    /// `slack`, and the last one is below `final_tol`.
    pub fn stabilizes(&self, slack: f64, final_tol: f64) -> bool {
        let d = &self.successive_differences;
        d.windows(2).skip(1).all(|w| w[1] <= w[0] + slack) && d.last().is_some_and(|&x| x < final_tol)
    }
}

fn max_entry_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Rank after scaling entries to `[-1, 1]` and zeroing those below `1e-9`.
fn numerical_rank(m: &[Vec<f64>]) -> usize {
    let scale = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let rows = m
        .iter()
        .map(|r| r.iter().map(|v| if (v / scale).abs() < 1e-9 { 0.0 } else { v / scale }).collect())
        .collect();
    Matrix::from_rows(rows).expect("square").rank()
}

/// Pairing matrices of the pencil's sections over the fibers at `t_values`.
///
/// Fibers are processed in parallel; rows come back ordered by `t`. Singular
/// fibers and fibers whose heights exceed the digit budget are skipped.
pub fn specialization_scan(pencil: &Pencil, t_values: &[Rational], cfg: &HeightConfig) -> Result<ScanReport> {
    let mut ts = t_values.to_vec();
    ts.sort();
    ts.dedup();
    let results: Vec<(Rational, Result<ScanRow>)> = ts
        .into_par_iter()
        .map(|t| {
            let row = pencil.specialize(&t).and_then(|(curve, points)| {
                let pairing = curve.pairing_matrix(&points, cfg)?;
                let h_t = parameter_height(&t);
                let normalized = pairing
                    .iter()
                    .map(|r| r.iter().map(|v| if h_t > 0.0 { v / h_t } else { f64::NAN }).collect())
                    .collect();
                Ok(ScanRow {
                    t: t.clone(),
                    h_t,
                    pairing,
                    normalized,
                })
            });
            (t, row)
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (t, r) in results {
        match r {
            Ok(row) if row.h_t > 0.0 => rows.push(row),
            Ok(_) => skipped.push((t, "h(t) = 0".to_string())),
            Err(e @ (Error::SingularFiber(_) | Error::Resource { .. })) => skipped.push((t, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if rows.is_empty() {
        return Err(Error::Input("every fiber in the scan was skipped".into()));
    }
    if rows.len() < 3 {
        return Err(Error::Input(format!(
            "only {} usable fibers; a scan needs at least three",
            rows.len()
        )));
    }

    let successive_differences = rows
        .windows(2)
        .map(|w| max_entry_diff(&w[0].normalized, &w[1].normalized))
        .collect();
    let r = pencil.sections.len();
    let n = rows.len() as f64;
    let mean_h = rows.iter().map(|row| row.h_t).sum::<f64>() / n;
    let var_h = rows.iter().map(|row| (row.h_t - mean_h).powi(2)).sum::<f64>();
    let slopes = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mean_p = rows.iter().map(|row| row.pairing[i][j]).sum::<f64>() / n;
                    let cov = rows
                        .iter()
                        .map(|row| (row.h_t - mean_h) * (row.pairing[i][j] - mean_p))
                        .sum::<f64>();
                    cov / var_h
                })
                .collect()
        })
        .collect();
    let max_asymmetry = rows
        .iter()
        .flat_map(|row| {
            (0..r).flat_map(move |i| (0..r).map(move |j| (row.normalized[i][j] - row.normalized[j][i]).abs()))
        })
        .fold(0.0, f64::max);
    let gram_rank = numerical_rank(&rows.last().expect("nonempty").normalized);
    Ok(ScanReport {
        rows,
        skipped,
        successive_differences,
        slopes,
        gram_rank,
        max_asymmetry,
    })
}

/// `t_min · stepᵏ` for every `k ≥ 0` with value `≤ t_max`.
pub fn geometric_parameters(t_min: &Rational, t_max: &Rational, step: &Rational) -> Result<Vec<Rational>> {
    if !t_min.is_positive() || step <= &Rational::one() {
        return Err(Error::Input("need t_min > 0 and a geometric step > 1".into()));
    }
    let mut out = Vec::new();
    let mut t = t_min.clone();
    while &t <= t_max {
        out.push(t.clone());
        t = t * step;
        if out.len() > 10_000 {
            return Err(Error::Input("geometric range has more than 10000 values".into()));
        }
    }
    Ok(out)
}
