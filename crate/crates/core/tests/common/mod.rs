//! Random valid frames and random rational data for the integration tests.
#![allow(dead_code)]

use k3cusp::{Frame, IntersectionForm, LatticeVector, Matrix, Rational, Scalar, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

pub fn random_rational(rng: &mut impl Rng, span: i64, max_den: i64) -> Rational {
    Rational::ratio(rng.gen_range(-span..=span), rng.gen_range(1..=max_den))
}

pub fn random_vector(rng: &mut impl Rng, dim: usize) -> Vector {
    LatticeVector::new((0..dim).map(|_| random_rational(rng, 9, 6)).collect())
}

/// Negative definite integral block `-(AᵀA + I)`.
fn negative_block(rng: &mut impl Rng, r: usize) -> Vec<Vec<i64>> {
    let a: Vec<Vec<i64>> = (0..r).map(|_| (0..r).map(|_| rng.gen_range(-2..=2)).collect()).collect();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let ata: i64 = (0..r).map(|k| a[k][i] * a[k][j]).sum();
                    -(ata + i64::from(i == j))
                })
                .collect()
        })
        .collect()
}

/// Product of random elementary integer matrices; determinant ±1.
pub fn random_unimodular(rng: &mut impl Rng, n: usize) -> Matrix<Rational> {
    let mut m = Matrix::identity(n);
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = q(rng.gen_range(-2..=2));
        let mut el = Matrix::identity(n);
        el[(i, j)] = c;
        m = m.mul(&el);
    }
    if rng.gen_bool(0.5) {
        let mut flip = Matrix::identity(n);
        flip[(0, 0)] = q(-1);
        m = m.mul(&flip);
    }
    m
}

/// `U ⊕ N` with `[E], P` spanning the hyperbolic plane `U`, translations the
/// basis of a random negative definite block `N` of rank `r`, ample `2E + P`,
/// all rewritten in a random unimodular basis.
pub fn random_frame(seed: u64, r: usize) -> Frame {
    let mut rng = rng(seed);
    let n = r + 2;
    let block = negative_block(&mut rng, r);
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i, j) {
                    (0, 1) | (1, 0) => q(1),
                    (a, b) if a >= 2 && b >= 2 => q(block[a - 2][b - 2]),
                    _ => q(0),
                })
                .collect()
        })
        .collect();
    let form = IntersectionForm::new(Matrix::from_rows(rows).unwrap()).unwrap();
    let unit = |k: usize| LatticeVector::basis(n, k);
    let mut o = unit(1);
    o = o.add_scaled(&q(-1), &unit(0));
    let ample = unit(1).add_scaled(&q(2), &unit(0));
    let base = Frame::new(form, unit(0), o, ample, (2..n).map(unit).collect()).unwrap();
    base.transported(&random_unimodular(&mut rng, n)).unwrap()
}

/// `v` with `v·[E] = 0`, built as `x − (x·E)P` for a random rational `x`.
pub fn random_stabilizer_vector(frame: &Frame, rng: &mut impl Rng) -> Vector {
    let x = random_vector(rng, frame.dim());
    let xe = frame.inner(&x, frame.class_e()).unwrap();
    x.add_scaled(&-xe, &frame.class_p())
}

/// Random rational vector of `V^{⊥E,P}`.
pub fn random_perp(frame: &Frame, rng: &mut impl Rng) -> Vector {
    let x = random_vector(rng, frame.dim());
    frame.decompose(&x).unwrap().perp
}

/// Random point of the open light cone: `P + aE + u` with `2a > −u·u`.
pub fn random_light_cone_point(frame: &Frame, rng: &mut impl Rng) -> Vector {
    let u = random_perp(frame, rng);
    let uu = frame.inner(&u, &u).unwrap();
    let slack = Rational::ratio(rng.gen_range(1..=20), rng.gen_range(1..=4));
    let a = (slack - uu) / q(2);
    let s = Rational::ratio(rng.gen_range(1..=5), rng.gen_range(1..=3));
    (&frame.class_p().add_scaled(&a, frame.class_e()) + &u).scaled(&s)
}

/// The 10 randomized frames used across tests, ranks 1 to 3.
pub fn frame_family() -> Vec<Frame> {
    (0..10).map(|s| random_frame(1000 + s, 1 + (s as usize % 3))).collect()
}
