//! Vector heights on a synthetic fibration and the Néron–Tate pairing limit.
//!
//! A [`SyntheticFibration`] stands in for a family of fibers with known
//! `h(E)`. The height of the zero section on fiber `E` is `h(E)·P`, and moving
//! along `τ_𝐯` transports heights by `T_𝐯` up to a bounded error per step:
//!
//! ```text
//! 𝐡(τ_𝐯 Q) = T_𝐯 𝐡(Q) + e' + ε[E],   e' ∈ V^{⊥E,P}, ‖e'‖ ≤ M, |ε| ≤ M.
//! ```
//!
//! The per-step errors are drawn from a ChaCha stream keyed by the seed, the
//! fiber, the group element and the direction, so every quantity here is a
//! deterministic function of the configuration.
//!
//! Canonical heights use the symmetric second difference
//! `(h_D(τⁿO) + h_D(τ⁻ⁿO) − 2h_D(O)) / 2n²`. On noise-free input it equals
//! `−½ h(E) (𝐯·𝐯) ([E]·D)` for every `n`, because constant and linear terms
//! in `n` cancel. The one-sided quotient `h_D(τⁿO)/n²` is also reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::FibrationFrame;
use crate::hyperbolic::orthogonal_perp_basis;
use crate::lattice::LatticeVector;
use crate::scalar::Scalar;
use crate::translation::apply_translation;

/// A point `Q_{𝐯,E}` with `𝐯 = Σ mᵢ vᵢ` on fiber `fiber`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiberPoint {
    pub fiber: usize,
    pub group: Vec<i64>,
}

impl FiberPoint {
    pub fn new(fiber: usize, group: Vec<i64>) -> Self {
        FiberPoint { fiber, group }
    }

    /// The point `Qᵢ` carried by the `i`-th translation (0-based).
    pub fn unit(fiber: usize, rank: usize, i: usize) -> Self {
        let mut group = vec![0; rank];
        group[i] = 1;
        FiberPoint { fiber, group }
    }

    pub fn zero(fiber: usize, rank: usize) -> Self {
        FiberPoint {
            fiber,
            group: vec![0; rank],
        }
    }

    /// `m·self + other`; both on the same fiber.
    pub fn combine(&self, m: i64, other: &FiberPoint) -> Result<Self> {
        if self.fiber != other.fiber {
            return Err(Error::Input(format!(
                "points lie on different fibers ({} and {})",
                self.fiber, other.fiber
            )));
        }
        if self.group.len() != other.group.len() {
            return Err(Error::Dimension {
                expected: self.group.len(),
                found: other.group.len(),
            });
        }
        Ok(FiberPoint {
            fiber: self.fiber,
            group: self.group.iter().zip(&other.group).map(|(a, b)| m * a + b).collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeightEstimate<T> {
    /// Symmetric second-difference estimate of `ĥ`.
    pub value: T,
    /// One-sided quotient `h_D(τⁿO) / n²`.
    pub forward: T,
    /// Worst-case distance from the noise-free value.
    pub error_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairingEstimate<T> {
    pub value: T,
    pub error_bound: f64,
}

/// Accumulated deviation from the noise-free trace after `step` moves.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceError<T> {
    pub step: usize,
    /// `‖e‖²` of the `V^{⊥E,P}` part.
    pub perp_norm_sq: T,
    /// Coefficient of `[E]`.
    pub scalar: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitRow<T> {
    pub fiber: usize,
    pub h_e: T,
    pub pairing: T,
    pub normalized: T,
    pub target: T,
    pub deviation: T,
    /// Bound on `|deviation|` implied by the per-height bounds.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitExperiment<T> {
    pub i: usize,
    pub j: usize,
    pub rows: Vec<LimitRow<T>>,
}

impl<T: Scalar> LimitExperiment<T> {
    /// Normalized pairing on the fiber of largest `h(E)`.
    pub fn limit_estimate(&self) -> &T {
        &self.rows.last().expect("at least one fiber").normalized
    }

    pub fn max_abs_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation.to_f64_lossy().abs()).fold(0.0, f64::max)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn lift<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite")
}

#[derive(Clone, Debug)]
pub struct SyntheticFibration<T> {
    frame: FibrationFrame<T>,
    fiber_heights: Vec<T>,
    noise: T,
    noise_f64: f64,
    seed: u64,
    perp_basis: Vec<(LatticeVector<T>, T)>,
}

impl<T: Scalar> SyntheticFibration<T> {
    pub fn new(frame: FibrationFrame<T>, fiber_heights: Vec<T>, noise: f64, seed: u64) -> Result<Self> {
        let report = frame.validate();
        if !report.passed() {
            let names: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
            return Err(Error::Frame(format!("frame fails: {}", names.join(", "))));
        }
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(Error::Input(format!("noise bound {noise} must be finite and nonnegative")));
        }
        if let Some(h) = fiber_heights.iter().find(|h| !h.is_positive() || h.is_negligible()) {
            return Err(Error::Input(format!("fiber height {h} must be positive")));
        }
        let perp_basis = orthogonal_perp_basis(&frame)?;
        Ok(SyntheticFibration {
            frame,
            fiber_heights,
            noise: lift(noise),
            noise_f64: noise,
            seed,
            perp_basis,
        })
    }

    pub fn frame(&self) -> &FibrationFrame<T> {
        &self.frame
    }

    pub fn fiber_heights(&self) -> &[T] {
        &self.fiber_heights
    }

    pub fn noise(&self) -> &T {
        &self.noise
    }

    fn fiber_height(&self, fiber: usize) -> Result<&T> {
        self.fiber_heights
            .get(fiber)
            .ok_or_else(|| Error::Input(format!("no fiber with index {fiber}")))
    }

    /// `𝐡(O_E) = h(E)·P`.
    pub fn base_height(&self, fiber: usize) -> Result<LatticeVector<T>> {
        Ok(self.frame.class_p().scaled(self.fiber_height(fiber)?))
    }

    fn stream(&self, fiber: usize, group: &[i64], backward: bool) -> ChaCha8Rng {
        let mut key = splitmix(self.seed);
        key = splitmix(key ^ fiber as u64);
        for &m in group {
            key = splitmix(key ^ m as u64);
        }
        key = splitmix(key ^ backward as u64);
        ChaCha8Rng::seed_from_u64(key)
    }

    /// One error term `e' + ε[E]`, checked exactly against the bound `M`.
    pub fn noise_sample(&self, rng: &mut impl Rng) -> (LatticeVector<T>, T) {
        let n = self.frame.dim();
        if self.noise.is_zero() {
            return (LatticeVector::zero(n), T::zero());
        }
        let m = self.noise_f64;
        let k = self.perp_basis.len() as f64;
        let mut e = LatticeVector::zero(n);
        let mut norm_sq = T::zero();
        for (b, bb) in &self.perp_basis {
            let q = -bb.clone();
            let c: T = lift(rng.gen_range(-1.0..=1.0) * m / (k * q.to_f64_lossy()).sqrt());
            norm_sq = norm_sq + c.clone() * c.clone() * q;
            e = e.add_scaled(&c, b);
        }
        let bound = self.noise.clone() * self.noise.clone();
        let shrink: T = lift(0.999_999);
        while norm_sq > bound {
            e = e.scaled(&shrink);
            norm_sq = norm_sq * shrink.clone() * shrink.clone();
        }
        let eps = lift(rng.gen_range(-m..=m));
        (e, eps)
    }

    /// Heights `𝐡(τ_{±𝐯}^k O_E)` for `k = 0..=n`.
    pub fn trace(&self, fiber: usize, group: &[i64], backward: bool, n: usize) -> Result<Vec<LatticeVector<T>>> {
        let mut v = self.frame.combination(group)?;
        if backward {
            v = -&v;
        }
        let mut rng = self.stream(fiber, group, backward);
        let mut h = self.base_height(fiber)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(h.clone());
        for _ in 0..n {
            let (e, eps) = self.noise_sample(&mut rng);
            h = &apply_translation(self.frame.form(), self.frame.class_e(), &v, &h) + &e;
            h = h.add_scaled(&eps, self.frame.class_e());
            out.push(h.clone());
        }
        Ok(out)
    }

    /// `𝐡(Q_{𝐯,E})`: one noisy step from the zero section.
    pub fn vector_height(&self, point: &FiberPoint) -> Result<LatticeVector<T>> {
        Ok(self.trace(point.fiber, &point.group, false, 1)?.pop().expect("two entries"))
    }

    fn check_ample(&self, d: &LatticeVector<T>) -> Result<()> {
        let f = &self.frame;
        if !f.form().in_light_cone(d, f.ample())? {
            return Err(Error::Input(format!("{d} is not in the positive cone")));
        }
        for wall in std::iter::once(f.class_o()).chain(f.sections()) {
            let s = f.inner(d, wall)?;
            if !s.is_positive() || s.is_negligible() {
                return Err(Error::Input(format!("{d} is not ample: D·{wall} = {s}")));
            }
        }
        Ok(())
    }

    /// `−½ h(E) (𝐯·𝐯) ([E]·D)`.
    pub fn closed_form_height(&self, point: &FiberPoint, d: &LatticeVector<T>) -> Result<T> {
        let v = self.frame.combination(&point.group)?;
        let he = self.fiber_height(point.fiber)?.clone();
        let f = &self.frame;
        Ok(-(he * f.inner(&v, &v)? * f.inner(f.class_e(), d)?) / T::from_int(2))
    }

    /// Canonical height `ĥ_D(Q_{𝐯,E})` from traces of length `n_max` in both directions.
    pub fn canonical_height(&self, point: &FiberPoint, d: &LatticeVector<T>, n_max: usize) -> Result<HeightEstimate<T>> {
        if n_max == 0 {
            return Err(Error::Input("n_max must be at least 1".into()));
        }
        self.check_ample(d)?;
        let f = &self.frame;
        let fwd = self.trace(point.fiber, &point.group, false, n_max)?;
        let bwd = self.trace(point.fiber, &point.group, true, n_max)?;
        let h_d = |x: &LatticeVector<T>| f.form().dot(x, d);
        let n_sq = T::from_int((n_max * n_max) as i64);
        let (hf, hb, h0) = (h_d(&fwd[n_max]), h_d(&bwd[n_max]), h_d(&fwd[0]));
        let value = (hf.clone() + hb - T::from_int(2) * h0) / (T::from_int(2) * n_sq.clone());
        let forward = hf / n_sq;

        let v = f.combination(&point.group)?;
        let v_norm = (-f.inner(&v, &v)?.to_f64_lossy()).max(0.0).sqrt();
        let ed = f.inner(f.class_e(), d)?.to_f64_lossy();
        let d_perp = f.decompose(d)?.perp;
        let d_norm = (-f.inner(&d_perp, &d_perp)?.to_f64_lossy()).max(0.0).sqrt();
        let m = self.noise_f64;
        let error_bound = m * v_norm * ed / 2.0 + m * (ed + d_norm) / n_max as f64;
        Ok(HeightEstimate {
            value,
            forward,
            error_bound,
        })
    }

    /// `⟨p₁, p₂⟩ = ĥ(p₁ + p₂) − ĥ(p₁) − ĥ(p₂)`.
    pub fn nt_pairing(&self, p1: &FiberPoint, p2: &FiberPoint, d: &LatticeVector<T>, n_max: usize) -> Result<PairingEstimate<T>> {
        let sum = p1.combine(1, p2)?;
        let hs = self.canonical_height(&sum, d, n_max)?;
        let h1 = self.canonical_height(p1, d, n_max)?;
        let h2 = self.canonical_height(p2, d, n_max)?;
        Ok(PairingEstimate {
            value: hs.value - h1.value - h2.value,
            error_bound: hs.error_bound + h1.error_bound + h2.error_bound,
        })
    }

    /// Normalized pairings `⟨Qᵢ, Qⱼ⟩ / (h(E)([E]·D))` on every fiber, with the
    /// target `−vᵢ·vⱼ`. Indices are 0-based. Fibers are processed in parallel
    /// and returned in input order.
    pub fn limit_experiment(&self, i: usize, j: usize, d: &LatticeVector<T>, n_max: usize) -> Result<LimitExperiment<T>> {
        let r = self.frame.rank();
        if i >= r || j >= r {
            return Err(Error::Input(format!("translation index out of range (rank {r})")));
        }
        if self.fiber_heights.len() < 3 {
            return Err(Error::Input("a limit experiment needs at least three fibers".into()));
        }
        if self.fiber_heights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("fiber heights must be strictly increasing".into()));
        }
        let f = &self.frame;
        let target = -f.inner(&f.translations()[i], &f.translations()[j])?;
        let ed = f.inner(f.class_e(), d)?;
        let rows = (0..self.fiber_heights.len())
            .into_par_iter()
            .map(|fiber| {
                let est = self.nt_pairing(&FiberPoint::unit(fiber, r, i), &FiberPoint::unit(fiber, r, j), d, n_max)?;
                let h_e = self.fiber_heights[fiber].clone();
                let scale = h_e.clone() * ed.clone();
                let normalized = est.value.clone() / scale.clone();
                Ok(LimitRow {
                    fiber,
                    h_e,
                    pairing: est.value,
                    deviation: normalized.clone() - target.clone(),
                    normalized,
                    target: target.clone(),
                    bound: est.error_bound / scale.to_f64_lossy(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LimitExperiment { i, j, rows })
    }

    /// Deviation of the noisy forward trace from `T_𝐯^k 𝐡(O_E)`, `k = 0..=n`.
    pub fn error_trace(&self, fiber: usize, group: &[i64], n: usize) -> Result<Vec<TraceError<T>>> {
        let f = &self.frame;
        let v = f.combination(group)?;
        let noisy = self.trace(fiber, group, false, n)?;
        let mut clean = self.base_height(fiber)?;
        let mut out = Vec::with_capacity(n + 1);
        for (step, h) in noisy.iter().enumerate() {
            if step > 0 {
                clean = apply_translation(f.form(), f.class_e(), &v, &clean);
            }
            let dec = f.decompose(&(h - &clean))?;
            if !dec.a_p.is_negligible() {
                return Err(Error::Consistency(format!("trace error has a P-component {}", dec.a_p)));
            }
            out.push(TraceError {
                step,
                perp_norm_sq: -f.inner(&dec.perp, &dec.perp)?,
                scalar: dec.a_e,
            });
        }
        Ok(out)
    }

    /// `‖perp‖ ≤ Mk` and `|scalar| ≤ M‖𝐯‖k²` at every step, compared exactly
    /// through squares. The second bound assumes `‖𝐯‖ ≥ 1`.
    pub fn error_growth_holds(&self, trace: &[TraceError<T>], v_norm_sq: &T) -> bool {
        let m2 = self.noise.clone() * self.noise.clone();
        trace.iter().all(|t| {
            let k = T::from_int(t.step as i64);
            let k2 = k.clone() * k;
            t.perp_norm_sq <= m2.clone() * k2.clone()
                && t.scalar.clone() * t.scalar.clone() <= m2.clone() * v_norm_sq.clone() * k2.clone() * k2
        })
    }
}

/// Whether `(u·v)² ≤ (u'·u')(v'·v')`, primes denoting `V^{⊥E,P}` representatives.
pub fn cauchy_schwarz_check<T: Scalar>(frame: &FibrationFrame<T>, u: &LatticeVector<T>, v: &LatticeVector<T>) -> Result<bool> {
    for x in [u, v] {
        if !frame.inner(x, frame.class_e())?.is_negligible() {
            return Err(Error::Input(format!("{x} is not orthogonal to [E]")));
        }
    }
    let (u1, v1) = (frame.stabilize(u)?, frame.stabilize(v)?);
    let uv = frame.inner(u, v)?;
    let lhs = uv.clone() * uv;
    let rhs = frame.inner(&u1, &u1)? * frame.inner(&v1, &v1)?;
    Ok(lhs <= rhs || (lhs - rhs).is_negligible())
}

/// `Σ h_{Dᵢ} Dᵢ*` from per-basis-class heights.
pub fn vector_height_from_components<T: Scalar>(frame: &FibrationFrame<T>, heights: &[T]) -> Result<LatticeVector<T>> {
    let dual = frame.form().dual_basis()?;
    if heights.len() != dual.vectors.len() {
        return Err(Error::Dimension {
            expected: dual.vectors.len(),
            found: heights.len(),
        });
    }
    Ok(heights
        .iter()
        .zip(&dual.vectors)
        .fold(LatticeVector::zero(frame.dim()), |acc, (h, d)| acc.add_scaled(h, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::Rational;

    type Q = Rational;

    fn fib(noise: f64) -> SyntheticFibration<Q> {
        let heights = [10, 100, 1000, 10000].iter().map(|&h| Q::from_int(h)).collect();
        SyntheticFibration::new(FibrationFrame::reference_f4(), heights, noise, 7).unwrap()
    }

    fn ample() -> LatticeVector<Q> {
        LatticeVector::from_ints(&[2, 1, 0, 0])
    }

    #[test]
    fn noise_free_heights_are_exact() {
        let s = fib(0.0);
        let q1 = FiberPoint::unit(0, 2, 0);
        for n in [1, 5, 50] {
            let h = s.canonical_height(&q1, &ample(), n).unwrap();
            assert_eq!(h.value, Q::from_int(20));
            assert_eq!(h.error_bound, 0.0);
        }
        let zero = FiberPoint::zero(0, 2);
        assert_eq!(s.canonical_height(&zero, &ample(), 3).unwrap().value, Q::from_int(0));
        assert_eq!(s.vector_height(&zero).unwrap(), s.base_height(0).unwrap());
        let h = s.vector_height(&FiberPoint::new(2, vec![3, -1])).unwrap();
        assert_eq!(s.frame().inner(&h, s.frame().class_e()).unwrap(), Q::from_int(1000));
    }

    #[test]
    fn noise_free_pairings() {
        let s = fib(0.0);
        let (q1, q2) = (FiberPoint::unit(0, 2, 0), FiberPoint::unit(0, 2, 1));
        assert_eq!(s.nt_pairing(&q1, &q2, &ample(), 4).unwrap().value, Q::from_int(0));
        assert_eq!(s.nt_pairing(&q1, &q1, &ample(), 4).unwrap().value, Q::from_int(40));
        let exp = s.limit_experiment(0, 0, &ample(), 8).unwrap();
        assert!(exp.rows.iter().all(|r| r.normalized == Q::from_int(4) && r.deviation.is_zero()));
        assert!(s.nt_pairing(&q1, &FiberPoint::unit(1, 2, 0), &ample(), 4).is_err());
    }

    #[test]
    fn rejects_non_ample_divisor() {
        let s = fib(0.0);
        let q = FiberPoint::unit(0, 2, 0);
        assert!(s.canonical_height(&q, &LatticeVector::from_ints(&[1, 0, 0, 0]), 4).is_err());
        assert!(s.canonical_height(&q, &ample(), 0).is_err());
    }

    #[test]
    fn noisy_heights_stay_within_bound() {
        let s = fib(1.0);
        for fiber in 0..4 {
            let q = FiberPoint::new(fiber, vec![1, 2]);
            let est = s.canonical_height(&q, &ample(), 32).unwrap();
            let exact = s.closed_form_height(&q, &ample()).unwrap();
            let err = (est.value - exact).to_f64_lossy().abs();
            assert!(err <= est.error_bound, "{err} > {}", est.error_bound);
        }
    }

    #[test]
    fn noise_samples_respect_bound() {
        let s = fib(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = s.noise().clone();
        for _ in 0..2000 {
            let (e, eps) = s.noise_sample(&mut rng);
            let d = s.frame().decompose(&e).unwrap();
            assert!(d.a_p.is_zero() && d.a_e.is_zero());
            assert!(-s.frame().inner(&e, &e).unwrap() <= m.clone() * m.clone());
            assert!(num_traits::Signed::abs(&eps) <= m);
        }
    }

    #[test]
    fn traces_obey_error_growth() {
        let s = fib(1.0);
        let vv = Q::from_int(4);
        for fiber in 0..4 {
            let t = s.error_trace(fiber, &[1, 0], 40).unwrap();
            assert!(s.error_growth_holds(&t, &vv));
        }
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let f1 = LatticeVector::from_ints(&[0, 0, 1, 0]);
        let f2 = LatticeVector::from_ints(&[0, 0, 0, 1]);
        assert!(cauchy_schwarz_check(&frame, &f1, &f1).unwrap());
        assert!(cauchy_schwarz_check(&frame, &f1, &f2).unwrap());
        let shifted = f1.add_scaled(&Q::ratio(-7, 3), frame.class_e());
        assert!(cauchy_schwarz_check(&frame, &shifted, &f2).unwrap());
        assert!(cauchy_schwarz_check(&frame, &frame.class_p(), &f2).is_err());
    }

    #[test]
    fn vector_height_components() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let hs: Vec<Q> = [3, 5, 8, 1].iter().map(|&h| Q::from_int(h)).collect();
        let h = vector_height_from_components(&frame, &hs).unwrap();
        for (j, hj) in hs.iter().enumerate() {
            assert_eq!(&frame.inner(&h, &LatticeVector::basis(4, j)).unwrap(), hj);
        }
    }
}
