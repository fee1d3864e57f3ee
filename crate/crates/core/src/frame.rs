//! The distinguished classes of an elliptic fibration with section.
//!
//! A [`FibrationFrame`] bundles the fiber class `[E]`, the zero section `[O]`,
//! an ample class, and translation vectors `vᵢ` in `V^{⊥E,P}` where
//! `P = [O] + [E]`. Section classes `Dᵢ = T_{vᵢ}([O])` are derived from the
//! translations, or supplied and cross-checked.

use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lattice::{entries_to_gram, entries_to_vector, parse_json, Entry, IntersectionForm, LatticeVector};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::translation::apply_translation;

#[derive(Clone, Debug, PartialEq)]
pub struct FibrationFrame<T> {
    form: Arc<IntersectionForm<T>>,
    class_e: LatticeVector<T>,
    class_o: LatticeVector<T>,
    ample: LatticeVector<T>,
    sections: Vec<LatticeVector<T>>,
    translations: Vec<LatticeVector<T>>,
}

/// `A = a_P·P + a_E·E + perp` with `perp ∈ V^{⊥E,P}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T> {
    pub a_p: T,
    pub a_e: T,
    pub perp: LatticeVector<T>,
}

impl<T: Scalar> FibrationFrame<T> {
    /// Assembles a frame. Only dimensions and `vᵢ·E = 0` are enforced here;
    /// everything else is reported by [`FibrationFrame::validate`].
    ///
    /// Translations are replaced by their `V^{⊥E,P}` representatives
    /// (`T_{v+aE} = T_v`). Sections are derived as `T_{vᵢ}([O])`.
    pub fn new(
        form: IntersectionForm<T>,
        class_e: LatticeVector<T>,
        class_o: LatticeVector<T>,
        ample: LatticeVector<T>,
        translations: Vec<LatticeVector<T>>,
    ) -> Result<Self> {
        let form = Arc::new(form);
        for v in [&class_e, &class_o, &ample].into_iter().chain(&translations) {
            form.check(v)?;
        }
        let mut frame = FibrationFrame {
            form,
            class_e,
            class_o,
            ample,
            sections: Vec::new(),
            translations: Vec::new(),
        };
        for (i, v) in translations.iter().enumerate() {
            if !frame.form.dot(v, &frame.class_e).is_negligible() {
                return Err(Error::Frame(format!("translation v{} has nonzero product with [E]", i + 1)));
            }
            frame.translations.push(frame.stabilize(v)?);
        }
        frame.sections = frame
            .translations
            .iter()
            .map(|v| apply_translation(&frame.form, &frame.class_e, v, &frame.class_o))
            .collect();
        Ok(frame)
    }

    /// Like [`FibrationFrame::new`], with explicitly supplied sections that
    /// must agree with the translations.
    pub fn with_sections(mut self, sections: Vec<LatticeVector<T>>) -> Result<Self> {
        if sections.len() != self.translations.len() {
            return Err(Error::Frame(format!(
                "{} sections given for {} translations",
                sections.len(),
                self.translations.len()
            )));
        }
        for (i, d) in sections.iter().enumerate() {
            self.form.check(d)?;
            if d != &self.sections[i] {
                return Err(Error::Frame(format!(
                    "section D{} = {} disagrees with T_v{}([O]) = {}",
                    i + 1,
                    d,
                    i + 1,
                    self.sections[i]
                )));
            }
        }
        self.sections = sections;
        Ok(self)
    }

    /// Synthetic frame on the basis `(E, P, f₁, f₂)` with gram
    /// `[[0,1,0,0],[1,0,0,0],[0,0,-4,0],[0,0,0,-4]]`, `[O] = P - E`,
    /// ample `2E + P` and translations `f₁, f₂`.
    pub fn reference_f4() -> Self {
        let form = IntersectionForm::from_int_rows(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, -4, 0], &[0, 0, 0, -4]])
            .expect("F4 gram is Lorentzian")
            .with_labels(vec!["E".into(), "P".into(), "f1".into(), "f2".into()])
            .expect("four labels");
        FibrationFrame::new(
            form,
            LatticeVector::from_ints(&[1, 0, 0, 0]),
            LatticeVector::from_ints(&[-1, 1, 0, 0]),
            LatticeVector::from_ints(&[2, 1, 0, 0]),
            vec![LatticeVector::from_ints(&[0, 0, 1, 0]), LatticeVector::from_ints(&[0, 0, 0, 1])],
        )
        .expect("F4 frame is well formed")
    }

    pub fn form(&self) -> &IntersectionForm<T> {
        &self.form
    }

    pub(crate) fn form_arc(&self) -> &Arc<IntersectionForm<T>> {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn class_e(&self) -> &LatticeVector<T> {
        &self.class_e
    }

    pub fn class_o(&self) -> &LatticeVector<T> {
        &self.class_o
    }

    /// `P = [O] + [E]`.
    pub fn class_p(&self) -> LatticeVector<T> {
        &self.class_o + &self.class_e
    }

    pub fn ample(&self) -> &LatticeVector<T> {
        &self.ample
    }

    pub fn sections(&self) -> &[LatticeVector<T>] {
        &self.sections
    }

    pub fn translations(&self) -> &[LatticeVector<T>] {
        &self.translations
    }

    pub fn rank(&self) -> usize {
        self.translations.len()
    }

    pub fn inner(&self, u: &LatticeVector<T>, v: &LatticeVector<T>) -> Result<T> {
        self.form.inner(u, v)
    }

    /// Replaces `v` (with `v·E = 0`) by `v - (v·P / E·P) E ∈ V^{⊥E,P}`.
    pub fn stabilize(&self, v: &LatticeVector<T>) -> Result<LatticeVector<T>> {
        self.form.check(v)?;
        if !self.form.dot(v, &self.class_e).is_negligible() {
            return Err(Error::Input(format!("{v} has nonzero product with [E]")));
        }
        let p = self.class_p();
        let ep = self.form.dot(&self.class_e, &p);
        if ep.is_negligible() {
            return Err(Error::Frame("[E]·P = 0".into()));
        }
        let c = self.form.dot(v, &p) / ep;
        Ok(v.add_scaled(&-c, &self.class_e))
    }

    /// Solves for `A = a_P·P + a_E·E + perp` with `perp·E = perp·P = 0`.
    pub fn decompose(&self, a: &LatticeVector<T>) -> Result<Decomposition<T>> {
        self.form.check(a)?;
        let p = self.class_p();
        let e = &self.class_e;
        let (pp, pe, ee) = (self.form.dot(&p, &p), self.form.dot(&p, e), self.form.dot(e, e));
        let det = pp.clone() * ee.clone() - pe.clone() * pe.clone();
        if det.is_negligible() {
            return Err(Error::Degenerate("span{E, P} is degenerate".into()));
        }
        let (ap, ae) = (self.form.dot(a, &p), self.form.dot(a, e));
        let a_p = (ee * ap.clone() - pe.clone() * ae.clone()) / det.clone();
        let a_e = (pp * ae - pe * ap) / det;
        let perp = a.add_scaled(&-a_p.clone(), &p).add_scaled(&-a_e.clone(), e);
        Ok(Decomposition { a_p, a_e, perp })
    }

    /// `v = Dᵢ - [O] - (2 + Dᵢ·[O])E`, the translation carrying `[O]` to `Dᵢ`.
    pub fn vperp_rep(&self, d: &LatticeVector<T>) -> Result<LatticeVector<T>> {
        self.form.check(d)?;
        let dd = self.form.dot(d, d);
        let de = self.form.dot(d, &self.class_e);
        if !(dd + T::from_int(2)).is_negligible() || !(de - T::one()).is_negligible() {
            return Err(Error::Frame(format!("{d} is not a section class (needs D·D = -2, D·E = 1)")));
        }
        let c = T::from_int(2) + self.form.dot(d, &self.class_o);
        let v = (d - &self.class_o).add_scaled(&-c, &self.class_e);
        let p = self.class_p();
        if !self.form.dot(&v, &self.class_e).is_negligible() || !self.form.dot(&v, &p).is_negligible() {
            return Err(Error::Frame(format!(
                "derived translation {v} is not in V^(E,P); check [O]·[O] = -2 and [O]·[E] = 1"
            )));
        }
        Ok(v)
    }

    /// Group element `Σ mᵢ vᵢ`.
    pub fn combination(&self, coeffs: &[i64]) -> Result<LatticeVector<T>> {
        if coeffs.len() != self.rank() {
            return Err(Error::Dimension {
                expected: self.rank(),
                found: coeffs.len(),
            });
        }
        Ok(coeffs
            .iter()
            .zip(&self.translations)
            .fold(LatticeVector::zero(self.dim()), |acc, (&m, v)| acc.add_scaled(&T::from_int(m), v)))
    }

    /// Checks every frame hypothesis that lattice data can decide.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let f = &self.form;
        let (e, o, a) = (&self.class_e, &self.class_o, &self.ample);
        let p = self.class_p();
        let zero = |x: &T| x.is_negligible();
        let pos = |x: &T| x.is_positive() && !x.is_negligible();
        let is = |x: T, n: i64| (x - T::from_int(n)).is_negligible();

        let sig = f.signature();
        r.push("signature", sig.pos == 1 && sig.neg == f.dim() - 1, format!("({},{},{})", sig.pos, sig.neg, sig.zero));
        let ee = f.dot(e, e);
        r.push("fiber class isotropic", zero(&ee), format!("[E]·[E] = {ee}"));
        let ea = f.dot(e, a);
        r.push("fiber class on ample side", pos(&ea), format!("[E]·D = {ea}"));
        let oo = f.dot(o, o);
        r.push("section self-intersection", is(oo.clone(), -2), format!("[O]·[O] = {oo}"));
        let oe = f.dot(o, e);
        r.push("section meets fiber once", is(oe.clone(), 1), format!("[O]·[E] = {oe}"));
        let pp = f.dot(&p, &p);
        let pe = f.dot(&p, e);
        r.push(
            "P isotropic with P·E = 1",
            zero(&pp) && is(pe.clone(), 1),
            format!("P·P = {pp}, P·E = {pe}"),
        );
        let aa = f.dot(a, a);
        r.push("ample positive", pos(&aa), format!("D·D = {aa}"));
        let ao = f.dot(a, o);
        r.push("ample against [O]", pos(&ao), format!("D·[O] = {ao}"));

        let n = self.rank();
        let rank = if n == 0 {
            0
        } else {
            let cols: Vec<Vec<T>> = self.translations.iter().map(|v| v.coords().to_vec()).collect();
            Matrix::from_columns(&cols).map_or(0, |m| m.rank())
        };
        r.push("translation rank deficiency", n > 0 && rank == n, format!("rank {rank} of {n} translations"));
        for (i, v) in self.translations.iter().enumerate() {
            let (ve, vp) = (f.dot(v, e), f.dot(v, &p));
            r.push(
                &format!("v{} in V^(E,P)", i + 1),
                zero(&ve) && zero(&vp),
                format!("v·E = {ve}, v·P = {vp}"),
            );
        }
        for (i, d) in self.sections.iter().enumerate() {
            let (dd, de, da, dor) = (f.dot(d, d), f.dot(d, e), f.dot(d, a), f.dot(d, o));
            r.push(
                &format!("D{} section self-intersection", i + 1),
                is(dd.clone(), -2),
                format!("D·D = {dd}"),
            );
            r.push(&format!("D{} meets fiber once", i + 1), is(de.clone(), 1), format!("D·E = {de}"));
            r.push(&format!("ample against D{}", i + 1), pos(&da), format!("ample·D = {da}"));
            if dor.is_negative() && !dor.is_negligible() {
                r.warn(&format!("D{} admissibility", i + 1), format!("D·[O] = {dor} < 0"));
            }
        }
        let maximal = n + 2 == f.dim();
        r.info(
            "maximal rank",
            format!("r = {n}, rho - 2 = {} ({})", f.dim() as i64 - 2, if maximal { "maximal" } else { "not maximal" }),
        );
        r.assumed(
            "translations come from automorphisms",
            "the stabilizer of [E] containing G of maximal rank is not decidable from lattice data".into(),
        );
        r
    }

    /// The frame rewritten in the basis given by the columns of `change`.
    pub fn transported(&self, change: &Matrix<T>) -> Result<Self> {
        let inv = change
            .inverse()
            .ok_or_else(|| Error::Degenerate("change of basis is singular".into()))?;
        let form = self.form.transported(change)?;
        let t = |v: &LatticeVector<T>| &inv * v;
        FibrationFrame::new(
            form,
            t(&self.class_e),
            t(&self.class_o),
            t(&self.ample),
            self.translations.iter().map(t).collect(),
        )
    }

    pub fn to_f64(&self) -> FibrationFrame<f64> {
        FibrationFrame {
            form: Arc::new(self.form.to_f64()),
            class_e: self.class_e.to_f64(),
            class_o: self.class_o.to_f64(),
            ample: self.ample.to_f64(),
            sections: self.sections.iter().map(LatticeVector::to_f64).collect(),
            translations: self.translations.iter().map(LatticeVector::to_f64).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Warn,
    Info,
    Assumed,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Warn => "warn",
            CheckStatus::Info => "info",
            CheckStatus::Assumed => "assumed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, ok: bool, detail: String) {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(Check {
            name: name.to_string(),
            status,
            detail,
        });
    }

    fn warn(&mut self, name: &str, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            status: CheckStatus::Warn,
            detail,
        });
    }

    fn info(&mut self, name: &str, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            status: CheckStatus::Info,
            detail,
        });
    }

    fn assumed(&mut self, name: &str, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            status: CheckStatus::Assumed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{}\t{}\t{}", c.status, c.name, c.detail)?;
        }
        write!(f, "{}", if self.passed() { "pass" } else { "fail" })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameConfig {
    gram: Vec<Vec<Entry>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(rename = "E")]
    class_e: Vec<Entry>,
    #[serde(rename = "O")]
    class_o: Vec<Entry>,
    ample: Vec<Entry>,
    #[serde(default)]
    translations: Vec<Vec<Entry>>,
    #[serde(default)]
    sections: Option<Vec<Vec<Entry>>>,
}

/// Reads a frame document:
/// `{"gram", "E", "O", "ample", "translations", ["sections"], ["labels"]}`.
///
/// When only sections are given, translations are derived from them with
/// [`FibrationFrame::vperp_rep`].
pub fn frame_from_json(text: &str) -> Result<FibrationFrame<Rational>> {
    let cfg: FrameConfig = parse_json(text)?;
    let mut form = IntersectionForm::new(entries_to_gram(&cfg.gram)?)?;
    if let Some(labels) = cfg.labels {
        form = form.with_labels(labels)?;
    }
    let field = |name: &str, v: &[Entry]| -> Result<LatticeVector<Rational>> {
        let vec = entries_to_vector(name, v)?;
        form.check(&vec)
            .map_err(|e| Error::Config(format!("field `{name}`: {}", e.detail())))?;
        Ok(vec)
    };
    let class_e = field("E", &cfg.class_e)?;
    let class_o = field("O", &cfg.class_o)?;
    let ample = field("ample", &cfg.ample)?;
    let translations = cfg
        .translations
        .iter()
        .enumerate()
        .map(|(i, v)| field(&format!("translations[{i}]"), v))
        .collect::<Result<Vec<_>>>()?;
    let sections = cfg
        .sections
        .as_ref()
        .map(|s| {
            s.iter()
                .enumerate()
                .map(|(i, v)| field(&format!("sections[{i}]"), v))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;

    match sections {
        Some(sections) if translations.is_empty() => {
            let bare = FibrationFrame::new(form, class_e, class_o, ample, Vec::new())?;
            let derived = sections
                .iter()
                .enumerate()
                .map(|(i, d)| bare.vperp_rep(d).map_err(|e| Error::Config(format!("field `sections[{i}]`: {}", e.detail()))))
                .collect::<Result<Vec<_>>>()?;
            let FibrationFrame { form, class_e, class_o, ample, .. } = bare;
            FibrationFrame::new(Arc::unwrap_or_clone(form), class_e, class_o, ample, derived)?.with_sections(sections)
        }
        Some(sections) => FibrationFrame::new(form, class_e, class_o, ample, translations)?.with_sections(sections),
        None => FibrationFrame::new(form, class_e, class_o, ample, translations),
    }
}
