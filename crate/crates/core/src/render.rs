//! Walls `T_𝐰([O])^⊥` of the ample cone and their boundary circles.
//!
//! In the upper half space the cusp `[E]` sits at infinity and a wall `D`
//! with `d = D·E ≠ 0` meets the boundary `V^{⊥E,P}` in the sphere of center
//! `𝐝/d` and radius `√2/|d|`. In the ball model a wall with Minkowski
//! coordinates `(d₀, 𝐝)` meets the unit sphere in `{𝐧 : 𝐧·𝐝 = d₀}`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::frame::FibrationFrame;
use crate::hyperbolic::{BallChart, EuclideanChart};
use crate::lattice::{IntersectionForm, LatticeVector};
use crate::scalar::Scalar;
use crate::translation::section_translate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Ball,
    UpperHalfSpace,
}

impl Model {
    pub fn tag(self) -> &'static str {
        match self {
            Model::Ball => "ball",
            Model::UpperHalfSpace => "uhs",
        }
    }
}

/// `{a : ⟨a, normal⟩ = offset}` in Euclidean boundary coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallCircle<T> {
    pub model: Model,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Unit normal of the plane containing a ball-model circle; empty in the upper half space.
    pub axis: Vec<f64>,
    pub source: LatticeVector<T>,
    /// Set for upper-half-space walls through the cusp (`D·E = 0`).
    pub degenerate: Option<Hyperplane>,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitWall<T> {
    pub group: Vec<i64>,
    pub class: LatticeVector<T>,
}

impl<T> OrbitWall<T> {
    /// `O` for the zero section, `Dᵢ` for the generators, nothing otherwise.
    pub fn label(&self) -> Option<String> {
        if self.group.iter().all(|&m| m == 0) {
            return Some("O".into());
        }
        let nonzero: Vec<_> = self.group.iter().enumerate().filter(|(_, &m)| m != 0).collect();
        match nonzero.as_slice() {
            [(i, 1)] => Some(format!("D{}", i + 1)),
            _ => None,
        }
    }
}

/// `{T_𝐰([O]) : 𝐰 = Σ mᵢvᵢ, |mᵢ| ≤ n}` in lexicographic order of `(m₁, …, m_r)`.
pub fn orbit_walls<T: Scalar>(frame: &FibrationFrame<T>, n: u32) -> Result<Vec<OrbitWall<T>>> {
    let r = frame.rank();
    let n = i64::from(n);
    let mut group = vec![-n; r];
    let mut out: Vec<OrbitWall<T>> = Vec::new();
    loop {
        let w = frame.combination(&group)?;
        let class = section_translate(frame, &w)?;
        if !out.iter().any(|o| o.class == class) {
            out.push(OrbitWall {
                group: group.clone(),
                class,
            });
        }
        let Some(k) = (0..r).rev().find(|&k| group[k] < n) else {
            break;
        };
        group[k] += 1;
        for g in group.iter_mut().skip(k + 1) {
            *g = -n;
        }
    }
    Ok(out)
}

fn require_minus_two<T: Scalar>(form: &IntersectionForm<T>, d: &LatticeVector<T>) -> Result<()> {
    let dd = form.inner(d, d)?;
    if !(dd.clone() + T::from_int(2)).is_negligible() {
        return Err(Error::Input(format!("wall class {d} has D·D = {dd}, expected -2")));
    }
    Ok(())
}

pub fn wall_circle_uhs<T: Scalar>(frame: &FibrationFrame<T>, chart: &EuclideanChart, d: &LatticeVector<T>) -> Result<WallCircle<T>> {
    require_minus_two(frame.form(), d)?;
    let dec = frame.decompose(d)?;
    let perp = chart.coords(&dec.perp);
    let base = WallCircle {
        model: Model::UpperHalfSpace,
        center: Vec::new(),
        radius: f64::INFINITY,
        axis: Vec::new(),
        source: d.clone(),
        degenerate: None,
        label: None,
    };
    if dec.a_p.is_negligible() {
        return Ok(WallCircle {
            degenerate: Some(Hyperplane {
                normal: perp,
                offset: dec.a_e.to_f64_lossy(),
            }),
            ..base
        });
    }
    let de = dec.a_p.to_f64_lossy();
    Ok(WallCircle {
        center: perp.iter().map(|c| c / de).collect(),
        radius: std::f64::consts::SQRT_2 / de.abs(),
        ..base
    })
}

pub fn wall_circle_ball<T: Scalar>(form: &IntersectionForm<T>, chart: &BallChart, d: &LatticeVector<T>) -> Result<WallCircle<T>> {
    let dd = form.inner(d, d)?;
    if !dd.is_negative() || dd.is_negligible() {
        return Err(Error::Input(format!("wall class {d} has D·D = {dd}, expected negative")));
    }
    let (d0, space) = chart.minkowski(d)?;
    let norm_sq: f64 = space.iter().map(|x| x * x).sum();
    let norm = norm_sq.sqrt();
    let ratio = d0 / norm;
    Ok(WallCircle {
        model: Model::Ball,
        center: space.iter().map(|x| x * d0 / norm_sq).collect(),
        radius: (1.0 - ratio * ratio).max(0.0).sqrt(),
        axis: space.iter().map(|x| x / norm).collect(),
        source: d.clone(),
        degenerate: None,
        label: None,
    })
}

/// Largest coordinate mismatch between the circle of `T_{vᵢ}(D)` and the
/// circle of `D` shifted by the chart coordinates of `vᵢ`.
pub fn translation_defect<T: Scalar>(frame: &FibrationFrame<T>, chart: &EuclideanChart, d: &LatticeVector<T>, i: usize) -> Result<f64> {
    let v = frame
        .translations()
        .get(i)
        .ok_or_else(|| Error::Input(format!("frame has no translation with index {i}")))?;
    let moved = crate::translation::translation(frame, v)?.apply(d)?;
    let before = wall_circle_uhs(frame, chart, d)?;
    let after = wall_circle_uhs(frame, chart, &moved)?;
    if before.degenerate.is_some() || after.degenerate.is_some() {
        return Err(Error::Input(format!("wall {d} passes through the cusp")));
    }
    let shift = chart.coords(v);
    let centers = before
        .center
        .iter()
        .zip(&shift)
        .zip(&after.center)
        .map(|((c, s), a)| (c + s - a).abs())
        .fold(0.0, f64::max);
    Ok(centers.max((before.radius - after.radius).abs()))
}

/// `k` deterministic unit vectors orthogonal to `axis` (any unit vectors if `axis` is empty).
fn sample_directions(dim: usize, axis: &[f64], k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .filter_map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / k as f64;
            let mut u: Vec<f64> = (0..dim).map(|i| (theta * (i + 1) as f64 + i as f64 * 0.7).cos()).collect();
            if !axis.is_empty() {
                let dot: f64 = u.iter().zip(axis).map(|(a, b)| a * b).sum();
                u.iter_mut().zip(axis).for_each(|(a, b)| *a -= dot * b);
            }
            let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            (n > 1e-6).then(|| u.iter().map(|x| x / n).collect())
        })
        .collect()
}

/// Null classes whose boundary points lie on `circle`, reconstructed from its center and radius.
pub fn sample_boundary_classes<T: Scalar>(
    frame: &FibrationFrame<f64>,
    chart: &EuclideanChart,
    ball: Option<&BallChart>,
    circle: &WallCircle<T>,
    k: usize,
) -> Vec<LatticeVector<f64>> {
    let on_circle = |u: &Vec<f64>| -> Vec<f64> {
        circle.center.iter().zip(u).map(|(c, x)| c + circle.radius * x).collect()
    };
    match (circle.model, ball) {
        (Model::UpperHalfSpace, _) if circle.degenerate.is_some() => {
            let h = circle.degenerate.as_ref().expect("checked");
            let nn: f64 = h.normal.iter().map(|x| x * x).sum();
            let foot: Vec<f64> = h.normal.iter().map(|x| x * h.offset / nn).collect();
            let n_unit: Vec<f64> = h.normal.iter().map(|x| x / nn.sqrt()).collect();
            sample_directions(chart.dim(), &n_unit, k)
                .iter()
                .enumerate()
                .map(|(j, u)| {
                    let a: Vec<f64> = foot.iter().zip(u).map(|(f, x)| f + (j as f64 - 3.0) * x).collect();
                    uhs_boundary_class(frame, chart, &a)
                })
                .collect()
        }
        (Model::UpperHalfSpace, _) => sample_directions(chart.dim(), &[], k)
            .iter()
            .map(|u| uhs_boundary_class(frame, chart, &on_circle(u)))
            .collect(),
        (Model::Ball, Some(b)) => sample_directions(circle.axis.len(), &circle.axis, k)
            .iter()
            .map(|u| b.lattice_vector(1.0, &on_circle(u)))
            .collect(),
        (Model::Ball, None) => Vec::new(),
    }
}

/// `P − ½(a·a)E + a` for the boundary point with Euclidean coordinates `a`.
fn uhs_boundary_class(frame: &FibrationFrame<f64>, chart: &EuclideanChart, a: &[f64]) -> LatticeVector<f64> {
    let av = chart.vector(a);
    let aa = frame.form().inner(&av, &av).expect("same dimension");
    &frame.class_p().add_scaled(&(-0.5 * aa), frame.class_e()) + &av
}

/// Largest `|A·D|` and `|A·A|` over `samples`.
pub fn circle_residuals(form: &IntersectionForm<f64>, d: &LatticeVector<f64>, samples: &[LatticeVector<f64>]) -> (f64, f64) {
    samples.iter().fold((0.0, 0.0), |(rd, ra), a| {
        let ad = form.inner(a, d).expect("same dimension").abs();
        let aa = form.inner(a, a).expect("same dimension").abs();
        (rd.max(ad), ra.max(aa))
    })
}

/// How two boundary spheres (equivalently, two walls) meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contact {
    Crossing,
    Tangent,
    Separate,
}

/// From the form: the sign of `(D·D)(D'·D') − (D·D')²`.
pub fn lattice_contact<T: Scalar>(form: &IntersectionForm<T>, d1: &LatticeVector<T>, d2: &LatticeVector<T>) -> Result<Contact> {
    let g = form.inner(d1, d1)? * form.inner(d2, d2)? - form.inner(d1, d2)?.powi(2);
    Ok(if g.is_negligible() {
        Contact::Tangent
    } else if g.is_positive() {
        Contact::Crossing
    } else {
        Contact::Separate
    })
}

trait Square {
    fn powi(self, k: i32) -> Self;
}

impl<T: Scalar> Square for T {
    fn powi(self, k: i32) -> Self {
        (0..k).fold(T::one(), |acc, _| acc * self.clone())
    }
}

fn classify(lo: f64, mid: f64, hi: f64, eps: f64) -> Contact {
    if (mid - lo).abs() <= eps || (mid - hi).abs() <= eps {
        Contact::Tangent
    } else if lo < mid && mid < hi {
        Contact::Crossing
    } else {
        Contact::Separate
    }
}

/// Geometric contact of two circles in the same model, to tolerance `eps`.
pub fn circle_contact<T>(c1: &WallCircle<T>, c2: &WallCircle<T>, eps: f64) -> Result<Contact> {
    if c1.model != c2.model {
        return Err(Error::Input("circles come from different models".into()));
    }
    match c1.model {
        Model::UpperHalfSpace => {
            if c1.degenerate.is_some() || c2.degenerate.is_some() {
                return Err(Error::Input("contact with walls through the cusp is not classified".into()));
            }
            let dist = c1.center.iter().zip(&c2.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            Ok(classify((c1.radius - c2.radius).abs(), dist, c1.radius + c2.radius, eps))
        }
        Model::Ball => {
            // spherical caps: axis angle against angular radii
            let ang = |c: &WallCircle<T>| {
                let h: f64 = c.center.iter().zip(&c.axis).map(|(a, b)| a * b).sum();
                c.radius.atan2(h)
            };
            let (a1, a2) = (ang(c1), ang(c2));
            let cos_t: f64 = c1.axis.iter().zip(&c2.axis).map(|(a, b)| a * b).sum();
            let theta = cos_t.clamp(-1.0, 1.0).acos();
            let hi = (a1 + a2).min(std::f64::consts::TAU - a1 - a2);
            Ok(classify((a1 - a2).abs(), theta, hi, eps))
        }
    }
}

/// Upper-half-space circles of the orbit walls with `|mᵢ| ≤ n`, labelled.
pub fn uhs_scene<T: Scalar>(frame: &FibrationFrame<T>, n: u32) -> Result<Vec<WallCircle<T>>> {
    let chart = EuclideanChart::new(frame)?;
    orbit_walls(frame, n)?
        .into_iter()
        .map(|w| {
            let mut c = wall_circle_uhs(frame, &chart, &w.class)?;
            c.label = w.label();
            Ok(c)
        })
        .collect()
}

/// Ball-model circles of the orbit walls, in the chart centered at the ample class.
pub fn ball_scene<T: Scalar>(frame: &FibrationFrame<T>, n: u32) -> Result<Vec<WallCircle<T>>> {
    let chart = BallChart::centered(frame.form(), frame.ample())?;
    orbit_walls(frame, n)?
        .into_iter()
        .map(|w| {
            let mut c = wall_circle_ball(frame.form(), &chart, &w.class)?;
            c.label = w.label();
            Ok(c)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    /// Width and height of the drawing in SVG user units.
    pub size: f64,
    pub stroke_width: f64,
    pub labels: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            size: 800.0,
            stroke_width: 1.5,
            labels: true,
        }
    }
}

/// Fixed six-decimal formatting with negative zero folded to zero.
fn f6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

struct Frame2d {
    min: [f64; 2],
    scale: f64,
    pad: f64,
    height: f64,
}

impl Frame2d {
    fn fit(min: [f64; 2], max: [f64; 2], opts: &RenderOptions) -> Self {
        let pad = 0.05 * opts.size;
        let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        let scale = (opts.size - 2.0 * pad) / span;
        Frame2d {
            min,
            scale,
            pad,
            height: opts.size,
        }
    }

    fn x(&self, x: f64) -> f64 {
        self.pad + (x - self.min[0]) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        self.height - self.pad - (y - self.min[1]) * self.scale
    }
}

fn header(out: &mut String, opts: &RenderOptions, title: &str) {
    let s = f6(opts.size);
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{s}" height="{s}" fill="white"/>"#);
}

fn label(out: &mut String, opts: &RenderOptions, x: f64, y: f64, text: &Option<String>) {
    if let (true, Some(t)) = (opts.labels, text) {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{t}</text>"#,
            f6(x),
            f6(y)
        );
    }
}

/// SVG 1.1 drawing of a scene. Upper-half-space scenes need boundary
/// dimension 1 or 2 and ball scenes ambient dimension 3 or 4.
pub fn render_svg<T>(scene: &[WallCircle<T>], opts: &RenderOptions) -> Result<String> {
    let first = scene.first().ok_or_else(|| Error::Input("empty scene".into()))?;
    if scene.iter().any(|c| c.model != first.model) {
        return Err(Error::Input("scene mixes models".into()));
    }
    let dim = scene
        .iter()
        .find_map(|c| (!c.center.is_empty()).then_some(c.center.len()))
        .or_else(|| first.degenerate.as_ref().map(|h| h.normal.len()))
        .unwrap_or(0);
    match (first.model, dim) {
        (Model::UpperHalfSpace, 2) => Ok(render_uhs_plane(scene, opts)),
        (Model::UpperHalfSpace, 1) => Ok(render_uhs_line(scene, opts)),
        (Model::Ball, 2) => Ok(render_disc(scene, opts)),
        (Model::Ball, 3) => Ok(render_sphere(scene, opts)),
        (m, d) => Err(Error::Input(format!("cannot draw a {} scene in dimension {d}", m.tag()))),
    }
}

fn uhs_bounds<T>(scene: &[WallCircle<T>]) -> ([f64; 2], [f64; 2]) {
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for c in scene.iter().filter(|c| c.degenerate.is_none()) {
        for k in 0..c.center.len().min(2) {
            min[k] = min[k].min(c.center[k] - c.radius);
            max[k] = max[k].max(c.center[k] + c.radius);
        }
    }
    for k in 0..2 {
        if !min[k].is_finite() {
            min[k] = -1.0;
            max[k] = 1.0;
        }
    }
    (min, max)
}

fn marker_at_infinity(out: &mut String, opts: &RenderOptions) {
    let x = f6(opts.size - 0.05 * opts.size);
    let y = f6(0.04 * opts.size);
    let _ = writeln!(
        out,
        r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="14" text-anchor="end">[E] at infinity</text>"#
    );
}

fn render_uhs_plane<T>(scene: &[WallCircle<T>], opts: &RenderOptions) -> String {
    let (min, max) = uhs_bounds(scene);
    let fr = Frame2d::fit(min, max, opts);
    let mut out = String::new();
    header(&mut out, opts, "Walls in the upper half space, viewed from the cusp");
    let sw = f6(opts.stroke_width);
    for c in scene {
        match &c.degenerate {
            None => {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="black" stroke-width="{sw}"/>"#,
                    f6(fr.x(c.center[0])),
                    f6(fr.y(c.center[1])),
                    f6(c.radius * fr.scale)
                );
                label(&mut out, opts, fr.x(c.center[0]), fr.y(c.center[1]), &c.label);
            }
            Some(h) => {
                // the line ⟨a, n⟩ = offset, drawn across the bounding box
                let (n0, n1) = (h.normal[0], h.normal[1]);
                let nn = n0 * n0 + n1 * n1;
                let foot = [n0 * h.offset / nn, n1 * h.offset / nn];
                let reach = (max[0] - min[0]).hypot(max[1] - min[1]);
                let dir = [-n1 / nn.sqrt(), n0 / nn.sqrt()];
                let _ = writeln!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="{sw}"/>"#,
                    f6(fr.x(foot[0] - reach * dir[0])),
                    f6(fr.y(foot[1] - reach * dir[1])),
                    f6(fr.x(foot[0] + reach * dir[0])),
                    f6(fr.y(foot[1] + reach * dir[1]))
                );
            }
        }
    }
    marker_at_infinity(&mut out, opts);
    out.push_str("</svg>\n");
    out
}

fn render_uhs_line<T>(scene: &[WallCircle<T>], opts: &RenderOptions) -> String {
    let (mut min, mut max) = uhs_bounds(scene);
    min[1] = 0.0;
    max[1] = max[0] - min[0];
    let fr = Frame2d::fit(min, max, opts);
    let mut out = String::new();
    header(&mut out, opts, "Walls in the upper half plane");
    let sw = f6(opts.stroke_width);
    let _ = writeln!(
        out,
        r#"<line x1="0.000000" y1="{y}" x2="{}" y2="{y}" stroke="gray" stroke-width="{sw}"/>"#,
        f6(opts.size),
        y = f6(fr.y(0.0))
    );
    for c in scene {
        match &c.degenerate {
            None => {
                let r = f6(c.radius * fr.scale);
                let _ = writeln!(
                    out,
                    r#"<path d="M {} {y} A {r} {r} 0 0 1 {} {y}" fill="none" stroke="black" stroke-width="{sw}"/>"#,
                    f6(fr.x(c.center[0] - c.radius)),
                    f6(fr.x(c.center[0] + c.radius)),
                    y = f6(fr.y(0.0))
                );
                label(&mut out, opts, fr.x(c.center[0]), fr.y(c.radius) - 4.0, &c.label);
            }
            Some(h) => {
                let x = f6(fr.x(h.offset / h.normal[0]));
                let _ = writeln!(
                    out,
                    r#"<line x1="{x}" y1="{}" x2="{x}" y2="0.000000" stroke="black" stroke-width="{sw}"/>"#,
                    f6(fr.y(0.0))
                );
            }
        }
    }
    marker_at_infinity(&mut out, opts);
    out.push_str("</svg>\n");
    out
}

fn render_disc<T>(scene: &[WallCircle<T>], opts: &RenderOptions) -> String {
    let fr = Frame2d::fit([-1.0, -1.0], [1.0, 1.0], opts);
    let mut out = String::new();
    header(&mut out, opts, "Walls in the Poincare disc");
    let sw = f6(opts.stroke_width);
    let (cx, cy, r) = (f6(fr.x(0.0)), f6(fr.y(0.0)), f6(fr.scale));
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="disc"><circle cx="{cx}" cy="{cy}" r="{r}"/></clipPath></defs>"#
    );
    let _ = writeln!(
        out,
        r#"<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="gray" stroke-width="{sw}"/>"#
    );
    let _ = writeln!(out, r#"<g clip-path="url(#disc)">"#);
    for c in scene {
        let h: f64 = c.center.iter().zip(&c.axis).map(|(a, b)| a * b).sum();
        if h.abs() < 1e-12 {
            // a diameter
            let dir = [-c.axis[1], c.axis[0]];
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="{sw}"/>"#,
                f6(fr.x(-dir[0])),
                f6(fr.y(-dir[1])),
                f6(fr.x(dir[0])),
                f6(fr.y(dir[1]))
            );
            continue;
        }
        // circle through the two ideal points, orthogonal to the unit circle
        let oc = [c.axis[0] / h, c.axis[1] / h];
        let or = (1.0 / (h * h) - 1.0).max(0.0).sqrt();
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="black" stroke-width="{sw}"/>"#,
            f6(fr.x(oc[0])),
            f6(fr.y(oc[1])),
            f6(or * fr.scale)
        );
    }
    out.push_str("</g>\n");
    for c in scene {
        label(&mut out, opts, fr.x(c.center[0]), fr.y(c.center[1]), &c.label);
    }
    out.push_str("</svg>\n");
    out
}

/// Fixed oblique view of the sphere: rotation by 35° about the x axis, then 25° about the y axis.
fn view(p: [f64; 3]) -> [f64; 3] {
    let (sa, ca) = 35f64.to_radians().sin_cos();
    let (sb, cb) = 25f64.to_radians().sin_cos();
    let q = [p[0], ca * p[1] - sa * p[2], sa * p[1] + ca * p[2]];
    [cb * q[0] + sb * q[2], q[1], -sb * q[0] + cb * q[2]]
}

fn render_sphere<T>(scene: &[WallCircle<T>], opts: &RenderOptions) -> String {
    const STEPS: usize = 180;
    let fr = Frame2d::fit([-1.0, -1.0], [1.0, 1.0], opts);
    let mut out = String::new();
    header(&mut out, opts, "Walls on the sphere at infinity of the Poincare ball");
    let sw = f6(opts.stroke_width);
    let _ = writeln!(
        out,
        r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="gray" stroke-width="{sw}"/>"#,
        f6(fr.x(0.0)),
        f6(fr.y(0.0)),
        f6(fr.scale)
    );
    let mut labels = Vec::with_capacity(scene.len());
    for c in scene {
        let basis = sample_directions(3, &c.axis, 4);
        let u = &basis[0];
        let a = &c.axis;
        // second direction: axis × u
        let w = [a[1] * u[2] - a[2] * u[1], a[2] * u[0] - a[0] * u[2], a[0] * u[1] - a[1] * u[0]];
        let pts: Vec<[f64; 3]> = (0..=STEPS)
            .map(|j| {
                let t = std::f64::consts::TAU * j as f64 / STEPS as f64;
                let mut p = [0.0; 3];
                for k in 0..3 {
                    p[k] = c.center[k] + c.radius * (t.cos() * u[k] + t.sin() * w[k]);
                }
                view(p)
            })
            .collect();
        let front_most = pts.iter().copied().fold(pts[0], |b, p| if p[2] > b[2] { p } else { b });
        // front (z ≥ 0) solid, back dashed
        let mut run: Vec<[f64; 3]> = Vec::new();
        let flush = |out: &mut String, run: &mut Vec<[f64; 3]>| {
            if run.len() >= 2 {
                let front = run[run.len() / 2][2] >= 0.0;
                let d: Vec<String> = run
                    .iter()
                    .enumerate()
                    .map(|(i, p)| format!("{} {} {}", if i == 0 { "M" } else { "L" }, f6(fr.x(p[0])), f6(fr.y(p[1]))))
                    .collect();
                let style = if front {
                    "stroke=\"black\"".to_string()
                } else {
                    "stroke=\"silver\" stroke-dasharray=\"4 3\"".to_string()
                };
                let _ = writeln!(out, r#"<path d="{}" fill="none" {style} stroke-width="{sw}"/>"#, d.join(" "));
            }
            run.clear();
        };
        for p in pts {
            if let Some(last) = run.last() {
                if (last[2] >= 0.0) != (p[2] >= 0.0) {
                    let keep = *last;
                    flush(&mut out, &mut run);
                    run.push(keep);
                }
            }
            run.push(p);
        }
        flush(&mut out, &mut run);
        labels.push((front_most, c.label.clone()));
    }
    for (p, text) in &labels {
        label(&mut out, opts, fr.x(p[0]), fr.y(p[1]) - 4.0, text);
    }
    out.push_str("</svg>\n");
    out
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
    fn orbit_of_f4() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let zero = orbit_walls(&frame, 0).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(&zero[0].class, frame.class_o());
        let one = orbit_walls(&frame, 1).unwrap();
        assert_eq!(one.len(), 9);
        for expected in [[1, 1, 1, 0], [1, 1, -1, 0], [1, 1, 0, 1], [3, 1, 1, 1], [3, 1, -1, -1], [3, 1, 1, -1]] {
            assert!(one.iter().any(|w| w.class == v(&expected)), "{expected:?}");
        }
        let labels: Vec<_> = one.iter().filter_map(|w| w.label()).collect();
        assert_eq!(labels, vec!["O", "D2", "D1"]);
    }

    #[test]
    fn orbit_is_closed_and_translation_equivariant() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let chart = EuclideanChart::new(&frame).unwrap();
        let inner = orbit_walls(&frame, 1).unwrap();
        let outer = orbit_walls(&frame, 2).unwrap();
        assert_eq!(outer.len(), 25);
        for (i, v) in frame.translations().iter().enumerate() {
            let t = crate::translation::translation(&frame, v).unwrap();
            for w in &inner {
                let moved = t.apply(&w.class).unwrap();
                assert!(outer.iter().any(|o| o.class == moved));
                assert!(translation_defect(&frame, &chart, &w.class, i).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn uhs_circles_on_f4() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let chart = EuclideanChart::new(&frame).unwrap();
        let c = wall_circle_uhs(&frame, &chart, &v(&[1, 1, 1, 0])).unwrap();
        assert_eq!(c.center, vec![2.0, 0.0]);
        assert!((c.radius - 2f64.sqrt()).abs() < 1e-15);
        let o = wall_circle_uhs(&frame, &chart, frame.class_o()).unwrap();
        assert_eq!(o.center, vec![0.0, 0.0]);
        assert!(wall_circle_uhs(&frame, &chart, &v(&[1, 0, 0, 0])).is_err());

        let ff = frame.to_f64();
        for circle in [&c, &o] {
            let samples = sample_boundary_classes(&ff, &chart, None, circle, 16);
            assert_eq!(samples.len(), 16);
            let (rd, ra) = circle_residuals(ff.form(), &circle.source.to_f64(), &samples);
            assert!(rd < 1e-9 && ra < 1e-9, "{rd} {ra}");
        }
    }

    #[test]
    fn degenerate_uhs_wall() {
        // f₁-shifted class with D·E = 0 and D·D = -2 needs a -2 vector in V^(E,P)
        let form = IntersectionForm::<Q>::from_int_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -2]]).unwrap();
        let frame = FibrationFrame::new(form, v(&[1, 0, 0]), v(&[-1, 1, 0]), v(&[2, 1, 0]), vec![v(&[0, 0, 1])]).unwrap();
        let chart = EuclideanChart::new(&frame).unwrap();
        let d = v(&[3, 0, 1]);
        let c = wall_circle_uhs(&frame, &chart, &d).unwrap();
        let h = c.degenerate.as_ref().unwrap();
        assert_eq!(h.offset, 3.0);
        let ff = frame.to_f64();
        let samples = sample_boundary_classes(&ff, &chart, None, &c, 8);
        let (rd, ra) = circle_residuals(ff.form(), &d.to_f64(), &samples);
        assert!(rd < 1e-9 && ra < 1e-9, "{rd} {ra}");
    }

    #[test]
    fn ball_circles_on_f4() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let chart = BallChart::centered(frame.form(), frame.ample()).unwrap();
        let ff = frame.to_f64();
        let echart = EuclideanChart::new(&frame).unwrap();
        for w in orbit_walls(&frame, 1).unwrap() {
            let c = wall_circle_ball(frame.form(), &chart, &w.class).unwrap();
            let samples = sample_boundary_classes(&ff, &echart, Some(&chart), &c, 16);
            assert_eq!(samples.len(), 16);
            let (rd, ra) = circle_residuals(ff.form(), &w.class.to_f64(), &samples);
            assert!(rd < 1e-9 && ra < 1e-9, "{rd} {ra}");
        }
        // a wall through the ample axis is a great circle
        let great = wall_circle_ball(frame.form(), &chart, &v(&[0, 0, 1, 0])).unwrap();
        assert!(great.center.iter().all(|x| x.abs() < 1e-12));
        assert!((great.radius - 1.0).abs() < 1e-12);
        assert!(wall_circle_ball(frame.form(), &chart, frame.ample()).is_err());
    }

    #[test]
    fn contact_patterns_agree() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let walls = orbit_walls(&frame, 1).unwrap();
        let uhs = uhs_scene(&frame, 1).unwrap();
        let ball = ball_scene(&frame, 1).unwrap();
        let mut seen = [0; 3];
        for i in 0..walls.len() {
            for j in i + 1..walls.len() {
                let exact = lattice_contact(frame.form(), &walls[i].class, &walls[j].class).unwrap();
                assert_eq!(circle_contact(&uhs[i], &uhs[j], 1e-9).unwrap(), exact);
                assert_eq!(circle_contact(&ball[i], &ball[j], 1e-9).unwrap(), exact);
                seen[exact as usize] += 1;
            }
        }
        assert!(seen.iter().all(|&k| k > 0), "{seen:?}");
    }

    #[test]
    fn svg_formatting() {
        let frame = FibrationFrame::<Q>::reference_f4();
        let chart = EuclideanChart::new(&frame).unwrap();
        let mut c = wall_circle_uhs(&frame, &chart, frame.class_o()).unwrap();
        c.label = Some("O".into());
        let svg = render_svg(&[c], &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(r#"<circle cx="400.000000" cy="400.000000" r="360.000000""#), "{svg}");
        assert!(svg.contains(">O</text>"));
        assert!(svg.contains("[E] at infinity"));
        assert!(render_svg::<Q>(&[], &RenderOptions::default()).is_err());
        assert_eq!(f6(-0.0000001), "0.000000");
    }
}
