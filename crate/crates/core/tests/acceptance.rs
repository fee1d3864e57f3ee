//! One line per acceptance criterion: status, id, measured values, time against budget.
//! Run with `cargo test -p k3cusp --test acceptance -- --nocapture` to see the table.

mod common;

use std::process::ExitCode;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use k3cusp::curve::{geometric_parameters, specialization_scan, CurveQ, HeightConfig, Pencil, PointQ};
use k3cusp::hyperbolic::{
    ball_distance, boundary_distance, boundary_distance_sq, euclidean_norm_sq, from_upper_half_space, hyperbolic_distance,
    phi, ray_to_upper_half_space, uhs_distance, BallChart, BoundaryClass, EuclideanChart, UpperHalfSpacePoint,
};
use k3cusp::involution::{sigma0_pullback, sigma_i_pullback, tau_pushforward};
use k3cusp::render::{
    circle_residuals, orbit_walls, render_svg, sample_boundary_classes, translation_defect, wall_circle_ball, wall_circle_uhs,
    RenderOptions,
};
use k3cusp::{translation, Frame, Rational, Scalar, Synthetic};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn frames() -> Vec<Frame> {
    let mut all = vec![Frame::reference_f4()];
    all.extend(frame_family());
    all
}

fn c1_isometry_exactness() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for (k, frame) in frames().iter().enumerate() {
        let mut g = rng(10 + k as u64);
        for _ in 0..1000 {
            let v = random_stabilizer_vector(frame, &mut g);
            let t = translation(frame, &v).unwrap();
            if !t.preserves_form() || &t.apply(frame.class_e()).unwrap() != frame.class_e() {
                bad += 1;
            }
            checked += 1;
        }
    }
    outcome(bad == 0, format!("{checked} translations over F4 + 10 random frames, {bad} failures"))
}

fn c2_power_and_commutation() -> Outcome {
    let mut bad = Vec::new();
    for (k, frame) in frames().iter().enumerate() {
        let mut g = rng(20 + k as u64);
        let v = random_stabilizer_vector(frame, &mut g);
        let w = random_stabilizer_vector(frame, &mut g);
        let tv = translation(frame, &v).unwrap();
        let tw = translation(frame, &w).unwrap();
        for m in -3..=5 {
            if tv.power(m).unwrap() != translation(frame, &v.scaled(&q(m))).unwrap() {
                bad.push(format!("frame {k}: T_v^{m}"));
            }
        }
        if tv.compose(&tw).unwrap() != tw.compose(&tv).unwrap() {
            bad.push(format!("frame {k}: commutation"));
        }
    }
    outcome(bad.is_empty(), format!("m in -3..=5 and T_vT_w = T_wT_v on 11 frames; failures: {bad:?}"))
}

fn c3_tau_is_translation() -> Outcome {
    let mut total = 0;
    let mut bad = 0;
    for frame in frames() {
        for i in 0..frame.rank() {
            total += 1;
            match tau_pushforward(&frame, i) {
                Ok(tau) if tau == translation(&frame, &frame.translations()[i]).unwrap() => {}
                _ => bad += 1,
            }
        }
    }
    outcome(bad == 0, format!("{total} sections (F4 both, random frames all), {bad} mismatches"))
}

fn c4_eigenstructure() -> Outcome {
    let mut total = 0;
    let mut bad = Vec::new();
    for (k, frame) in frames().iter().enumerate() {
        let n = frame.dim();
        let mut refl = vec![sigma0_pullback(frame).unwrap()];
        for d in frame.sections() {
            refl.push(sigma_i_pullback(frame, d).unwrap());
        }
        for s in refl {
            total += 1;
            let ranks = s.eigenspace_ranks();
            if !s.is_involution() || !s.isometry.preserves_form() || ranks != (2, n - 2) {
                bad.push(format!("frame {k} {}: ranks {ranks:?}", s.tag));
            }
        }
    }
    outcome(bad.is_empty(), format!("{total} reflections: square = I, J preserved, ranks (2, dim-2); failures: {bad:?}"))
}

fn c5_boundary_metric() -> Outcome {
    let f4 = Frame::reference_f4();
    let a = BoundaryClass::new(&f4, f4.class_p()).unwrap();
    let b = BoundaryClass::new(&f4, k3cusp::Vector::from_ints(&[2, 1, 1, 0])).unwrap();
    let example = boundary_distance(&f4, &a, &b);
    let mut bad = 0;
    let all = frames();
    let mut g = rng(50);
    for k in 0..1000 {
        let frame = &all[k % all.len()];
        let scale = |g: &mut rand_chacha::ChaCha8Rng| Rational::ratio(g.gen_range(1..=12), g.gen_range(1..=5));
        let a = BoundaryClass::from_phi(frame, &random_perp(frame, &mut g)).unwrap();
        let b = BoundaryClass::from_phi(frame, &random_perp(frame, &mut g)).unwrap();
        let (a, b) = (a.scaled(&scale(&mut g)).unwrap(), b.scaled(&scale(&mut g)).unwrap());
        let lhs = boundary_distance_sq(frame, &a, &b);
        let rhs = euclidean_norm_sq(frame.form(), &(&phi(frame, &a) - &phi(frame, &b))).unwrap();
        if lhs != rhs {
            bad += 1;
        }
    }
    outcome(
        bad == 0 && example == 2.0,
        format!("1000 random pairs, {bad} exact mismatches; F4 |P, 2E+P+f1|_E = {example}"),
    )
}

fn c6_upper_half_space_isometry() -> Outcome {
    let mut worst = [0.0f64; 2];
    let mut cross = 0.0f64;
    for (k, frame) in frames().iter().enumerate() {
        let ff = frame.to_f64();
        let mut g = rng(60 + k as u64);
        // Points and steps are rational, so the chord −ΔU·ΔU is exact and
        // only the truncation error of the finite difference remains.
        for _ in 0..40 {
            let x = random_perp(frame, &mut g);
            let z = Rational::ratio(g.gen_range(1..=16), 4);
            let dx = random_perp(frame, &mut g);
            let dz = Rational::ratio(g.gen_range(-8..=8), 8);
            let speed_sq = euclidean_norm_sq(frame.form(), &dx).unwrap() + dz.clone() * dz.clone();
            if speed_sq.to_f64_lossy() < 1e-6 {
                continue;
            }
            for (slot, h) in [1e-3, 1e-4].into_iter().enumerate() {
                let half = Rational::from_float(0.5 * h).unwrap();
                let at = |s: &Rational| {
                    let p = UpperHalfSpacePoint { x: x.add_scaled(s, &dx), z: z.clone() + s.clone() * dz.clone() };
                    from_upper_half_space(frame, &p).unwrap()
                };
                let du = &at(&half) - &at(&-half.clone());
                let lorentz = (-frame.inner(&du, &du).unwrap()).to_f64_lossy().sqrt();
                let uhs = h * speed_sq.to_f64_lossy().sqrt() / z.to_f64_lossy();
                worst[slot] = worst[slot].max((lorentz - uhs).abs() / uhs);
            }
        }
        let chart = BallChart::centered(frame.form(), frame.ample()).unwrap();
        for _ in 0..40 {
            let a = random_light_cone_point(frame, &mut g);
            let b = random_light_cone_point(frame, &mut g);
            let d = hyperbolic_distance(frame.form(), frame.ample(), &a, &b).unwrap();
            let du = uhs_distance(
                ff.form(),
                &ray_to_upper_half_space(frame, &a).unwrap(),
                &ray_to_upper_half_space(frame, &b).unwrap(),
            )
            .unwrap();
            let db = ball_distance(&chart.coords(&a).unwrap(), &chart.coords(&b).unwrap());
            cross = cross.max((d - du).abs()).max((d - db).abs());
        }
    }
    let order = (worst[0] / worst[1]).log10();
    outcome(
        worst[0] < 1e-4 && worst[1] < 1e-6 && order >= 1.0 && cross < 1e-9,
        format!(
            "rel err {:.2e} @1e-3, {:.2e} @1e-4, observed order {order:.2}; cross-model {cross:.2e}",
            worst[0], worst[1]
        ),
    )
}

fn norm(frame: &Frame, v: &k3cusp::Vector) -> f64 {
    (-frame.inner(v, v).unwrap()).to_f64_lossy().sqrt()
}

fn c7_synthetic_limit() -> Outcome {
    let mut exact_ok = true;
    let mut exact_rows = 0;
    for frame in [Frame::reference_f4(), random_frame(1001, 2), random_frame(1005, 3)] {
        let d = frame.ample().clone();
        let r = frame.rank();
        let s = Synthetic::new(frame, vec![q(10), q(100), q(1000), q(10_000)], 0.0, 0).unwrap();
        for i in 0..r {
            for j in i..r {
                for row in s.limit_experiment(i, j, &d, 16).unwrap().rows {
                    exact_rows += 1;
                    exact_ok &= row.normalized == row.target;
                }
            }
        }
    }
    let f4 = Frame::reference_f4();
    let s = Synthetic::new(f4.clone(), vec![q(10), q(100), q(1000), q(10_000)], 0.0, 0).unwrap();
    let diag = s.limit_experiment(0, 0, f4.ample(), 16).unwrap().rows.iter().all(|r| r.normalized == q(4));
    let off = s.limit_experiment(0, 1, f4.ample(), 16).unwrap().rows.iter().all(|r| r.normalized == q(0));

    let ed = f4.inner(f4.class_e(), f4.ample()).unwrap().to_f64_lossy();
    let mut worst_ratio = 0.0f64;
    for seed in 0..6 {
        let s = Synthetic::new(f4.clone(), vec![q(10), q(100), q(1000), q(10_000)], 1.0, seed).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            let (vi, vj) = (&f4.translations()[i], &f4.translations()[j]);
            let v_norm = norm(&f4, vi).max(norm(&f4, vj)).max(norm(&f4, &(vi + vj)));
            for row in s.limit_experiment(i, j, f4.ample(), 64).unwrap().rows {
                let bound = 3.0 * v_norm * ed / row.h_e.to_f64_lossy();
                worst_ratio = worst_ratio.max(row.deviation.to_f64_lossy().abs() / bound);
            }
        }
    }
    outcome(
        exact_ok && diag && off && worst_ratio <= 1.0,
        format!(
            "M=0: {exact_rows} rows exact, F4 diag 4 {diag}, off-diag 0 {off}; M=1: max |dev| / (3M|v|(E.D)/h(E)) = {worst_ratio:.3}"
        ),
    )
}

fn c8_error_growth() -> Outcome {
    let mut traces = 0;
    let mut bad = 0;
    let mut test_frames = vec![Frame::reference_f4()];
    test_frames.extend([random_frame(1001, 2), random_frame(1002, 3)]);
    for frame in test_frames {
        let r = frame.rank();
        let mut groups: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|k| i64::from(k == i)).collect()).collect();
        groups.push(vec![1; r]);
        for seed in 0..5 {
            let s = Synthetic::new(frame.clone(), vec![q(10), q(1000), q(100_000)], 1.0, seed).unwrap();
            for fiber in 0..3 {
                for group in &groups {
                    let v = frame.combination(group).unwrap();
                    let trace = s.error_trace(fiber, group, 100).unwrap();
                    traces += 1;
                    if !s.error_growth_holds(&trace, &-frame.inner(&v, &v).unwrap()) {
                        bad += 1;
                    }
                }
            }
        }
    }
    outcome(bad == 0, format!("{traces} traces of length 100 (seeds 0..5, M = 1), {bad} violations"))
}

fn c9_elliptic_heights() -> Outcome {
    let cfg = HeightConfig::new(1e-4);
    let torsion_curve = CurveQ::from_ints(0, 1).unwrap();
    let torsion = torsion_curve.canonical_height(&PointQ::from_ints(2, 3), &cfg).unwrap().value;
    let e = CurveQ::from_ints(0, -2).unwrap();
    let p = PointQ::from_ints(3, 5);
    let h = |pt: &PointQ| e.canonical_height(pt, &cfg).unwrap().value;
    let hp = h(&p);
    let mult = |n: i64| e.multiply(n, &p).unwrap();
    let quad = [2, 3, 5].map(|n| (h(&mult(n)) - (n * n) as f64 * hp).abs()).into_iter().fold(0.0, f64::max);
    let mut para = 0.0f64;
    for m in [2, 3] {
        let qpt = mult(m);
        let lhs = h(&e.add(&p, &qpt).unwrap()) + h(&e.add(&p, &e.negate(&qpt).unwrap()).unwrap());
        para = para.max((lhs - 2.0 * hp - 2.0 * h(&qpt)).abs());
    }
    let oracle = e.n_squared_heights(&p, 12).unwrap();
    let gap = (oracle.last().unwrap() - hp).abs();
    outcome(
        torsion < 1e-3 && quad < 4e-3 && para < 1e-2 && gap < 2e-2,
        format!(
            "h(torsion) = {torsion:.1e}; h(P) = {hp:.6}; max |h(nP) - n^2 h(P)| = {quad:.1e}; parallelogram {para:.1e}; n^2 oracle gap {gap:.1e}"
        ),
    )
}

fn c10_specialization_scan() -> Outcome {
    let ts = geometric_parameters(&q(8), &q(256), &q(2)).unwrap();
    let report = specialization_scan(&Pencil::sample(), &ts, &HeightConfig::new(1e-4)).unwrap();
    let last = &report.rows.last().unwrap().normalized;
    let positive = last[0][0] > 0.0 && last[0][0] * last[1][1] - last[0][1] * last[1][0] > 0.0;
    let diffs: Vec<String> = report.successive_differences.iter().map(|d| format!("{d:.4}")).collect();
    outcome(
        report.stabilizes(0.1, 0.1) && report.max_asymmetry < 1e-3 && positive && report.skipped.is_empty(),
        format!(
            "diffs [{}], asymmetry {:.1e}, Gram rank {}, final matrix positive definite {positive}",
            diffs.join(", "),
            report.max_asymmetry,
            report.gram_rank
        ),
    )
}

fn golden(name: &str, svg: &str) -> bool {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).map(|g| g == svg).unwrap_or(false)
}

fn c11_renderer() -> Outcome {
    let f4 = Frame::reference_f4();
    let ff = f4.to_f64();
    let chart = EuclideanChart::new(&f4).unwrap();
    let ball = BallChart::centered(f4.form(), f4.ample()).unwrap();
    let (mut rd, mut ra, mut radius_err, mut circles) = (0.0f64, 0.0f64, 0.0f64, 0);
    for w in orbit_walls(&f4, 2).unwrap() {
        let d = w.class.to_f64();
        let cu = wall_circle_uhs(&f4, &chart, &w.class).unwrap();
        let cb = wall_circle_ball(f4.form(), &ball, &w.class).unwrap();
        radius_err = radius_err.max((cu.radius - 2f64.sqrt()).abs());
        for samples in [
            sample_boundary_classes(&ff, &chart, None, &cu, 16),
            sample_boundary_classes(&ff, &chart, Some(&ball), &cb, 16),
        ] {
            let (a, b) = circle_residuals(ff.form(), &d, &samples);
            rd = rd.max(a);
            ra = ra.max(b);
            circles += 1;
        }
    }
    let mut defect = 0.0f64;
    for w in orbit_walls(&f4, 1).unwrap() {
        for i in 0..f4.rank() {
            defect = defect.max(translation_defect(&f4, &chart, &w.class, i).unwrap());
        }
    }
    let opts = RenderOptions::default();
    let uhs = render_svg(&k3cusp::render::uhs_scene(&f4, 2).unwrap(), &opts).unwrap();
    let sphere = render_svg(&k3cusp::render::ball_scene(&f4, 1).unwrap(), &opts).unwrap();
    let stable = uhs == render_svg(&k3cusp::render::uhs_scene(&f4, 2).unwrap(), &opts).unwrap();
    let goldens = golden("f4_uhs_n2.svg", &uhs) && golden("f4_ball_n1.svg", &sphere);
    outcome(
        rd < 1e-9 && ra < 1e-9 && radius_err < 1e-9 && defect < 1e-9 && stable && goldens,
        format!(
            "{circles} circles: max |A.D| {rd:.1e}, |A.A| {ra:.1e}; radius err {radius_err:.1e}; translation defect {defect:.1e}; golden match {goldens}"
        ),
    )
}

fn main() -> ExitCode {
    type Check = (&'static str, &'static str, u64, fn() -> Outcome);
    let checks: [Check; 11] = [
        ("C1", "translation isometry exactness", 10, c1_isometry_exactness),
        ("C2", "powers and commutation", 5, c2_power_and_commutation),
        ("C3", "involution composite equals translation", 5, c3_tau_is_translation),
        ("C4", "reflection eigenstructure", 5, c4_eigenstructure),
        ("C5", "boundary metric", 5, c5_boundary_metric),
        ("C6", "upper half space isometry", 10, c6_upper_half_space_isometry),
        ("C7", "synthetic pairing limit", 10, c7_synthetic_limit),
        ("C8", "error growth", 10, c8_error_growth),
        ("C9", "elliptic canonical heights", 60, c9_elliptic_heights),
        ("C10", "specialization scan", 300, c10_specialization_scan),
        ("C11", "wall renderer", 10, c11_renderer),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in checks {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed < Duration::from_secs(budget);
        if !pass {
            failed.push(id);
        }
        println!(
            "{} {id:<4} {name}: {} [{:.2} s / {budget} s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}

