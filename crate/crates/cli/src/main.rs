use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use k3cusp::curve::{geometric_parameters, naive_height, pencil_from_json, specialization_scan};
use k3cusp::render::{ball_scene, orbit_walls, render_svg, uhs_scene};
use k3cusp::scalar::parse_rational;
use k3cusp::{frame_from_json, CurveQ, Error, Frame, HeightConfig, Pencil, PointQ, Rational, RenderOptions, Scalar, Synthetic};

#[derive(Parser, Debug)]
#[command(name = "k3cusp", version, about = "Cusp geometry and height pairings for elliptic K3 Picard lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a frame document and print one line per check, then pass or fail.
    Validate {
        /// Frame JSON with fields gram, E, O, ample, translations and optional sections, labels.
        frame: PathBuf,
    },
    /// List the walls T_w([O]) for w in the box |m_i| <= N as TSV.
    Orbit {
        frame: PathBuf,
        /// Half-width of the coefficient box.
        #[arg(long = "N", default_value_t = 1)]
        n: u32,
    },
    /// Draw the orbit walls as an SVG file.
    Render {
        frame: PathBuf,
        /// Hyperbolic model to draw in.
        #[arg(long, value_enum, default_value_t = ModelArg::Uhs)]
        model: ModelArg,
        /// Half-width of the coefficient box.
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        /// Output path of the SVG document.
        #[arg(long)]
        out: PathBuf,
        /// Width and height of the drawing in SVG units.
        #[arg(long, default_value_t = 800.0)]
        size: f64,
        /// Omit the O, Di and cusp labels.
        #[arg(long)]
        no_labels: bool,
    },
    /// Run the synthetic pairing experiment and print hE, i, j, pairing, normalized, target, deviation.
    SyntheticPair {
        frame: PathBuf,
        /// Seed for the bounded-noise streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Noise amplitude M (0 gives exact heights).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Comma-separated fiber heights h(E), strictly increasing, at least three.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
        fibers: Vec<String>,
        /// Largest multiple used in the symmetric height quotient.
        #[arg(long, default_value_t = 64)]
        n_max: usize,
    },
    /// Canonical heights and the pairing matrix of points on y^2 = x^3 + a x + b.
    CurveHeights {
        /// Coefficient a (integer or p/q).
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Coefficient b (integer or p/q).
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// A point as x,y; repeat for several points.
        #[arg(long = "point", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
        /// Target accuracy of each canonical height.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// Specialize a pencil at t = t_min * step^k up to t_max and print the pairing matrices.
    SpecializeScan {
        /// Pencil JSON with fields a, b, sections; the built-in pencil y^2 = x^3 - t^2 x + t^2 is used when absent.
        pencil: Option<PathBuf>,
        #[arg(long, default_value = "8")]
        t_min: String,
        #[arg(long, default_value = "256")]
        t_max: String,
        /// Ratio between consecutive parameters.
        #[arg(long, default_value = "2")]
        geometric_step: String,
        /// Target accuracy of each canonical height.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Ball,
    Uhs,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_frame(path: &Path) -> Result<Frame, Failure> {
    let text = read(path)?;
    frame_from_json(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())).into(),
        other => other.into(),
    })
}

fn rational(name: &str, text: &str) -> Result<Rational, Failure> {
    parse_rational(text).ok_or_else(|| Error::Input(format!("--{name}: `{text}` is not a rational number")).into())
}

fn point(curve: &CurveQ, text: &str) -> Result<PointQ, Failure> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| Error::Input(format!("--point: `{text}` is not of the form x,y")))?;
    Ok(curve.point(rational("point", x)?, rational("point", y)?)?)
}

fn run(cli: Cli) -> Result<String, Failure> {
    let mut out = String::new();
    match cli.command {
        Command::Validate { frame } => {
            let report = load_frame(&frame)?.validate();
            writeln!(out, "{report}").ok();
            if !report.passed() {
                print!("{out}");
                let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
                return Err(Error::Frame(format!("failed checks: {}", names.join(", "))).into());
            }
        }
        Command::Orbit { frame, n } => {
            let frame = load_frame(&frame)?;
            let r = frame.rank();
            let mut header: Vec<String> = (1..=r).map(|i| format!("m{i}")).collect();
            header.extend(["class", "D.E", "D.D", "label"].map(String::from));
            writeln!(out, "{}", header.join("\t")).ok();
            for w in orbit_walls(&frame, n)? {
                let group: Vec<String> = w.group.iter().map(i64::to_string).collect();
                let de = frame.inner(&w.class, frame.class_e())?;
                let dd = frame.inner(&w.class, &w.class)?;
                writeln!(
                    out,
                    "{}\t{}\t{de}\t{dd}\t{}",
                    group.join("\t"),
                    w.class,
                    w.label().unwrap_or_default()
                )
                .ok();
            }
        }
        Command::Render {
            frame,
            model,
            n,
            out: path,
            size,
            no_labels,
        } => {
            if !(size.is_finite() && size > 0.0) {
                return Err(Error::Input(format!("--size must be positive, got {size}")).into());
            }
            let frame = load_frame(&frame)?;
            let opts = RenderOptions {
                size,
                labels: !no_labels,
                ..RenderOptions::default()
            };
            let svg = match model {
                ModelArg::Uhs => render_svg(&uhs_scene(&frame, n)?, &opts)?,
                ModelArg::Ball => render_svg(&ball_scene(&frame, n)?, &opts)?,
            };
            fs::write(&path, svg).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            writeln!(out, "wrote\t{}", path.display()).ok();
        }
        Command::SyntheticPair {
            frame,
            seed,
            noise,
            fibers,
            n_max,
        } => {
            let frame = load_frame(&frame)?;
            let heights = fibers.iter().map(|f| rational("fibers", f)).collect::<Result<Vec<_>, _>>()?;
            let d = frame.ample().clone();
            let r = frame.rank();
            let synthetic = Synthetic::new(frame, heights, noise, seed)?;
            writeln!(out, "hE\ti\tj\tpairing\tnormalized\ttarget\tdeviation").ok();
            for i in 0..r {
                for j in i..r {
                    let exp = synthetic.limit_experiment(i, j, &d, n_max)?;
                    for row in &exp.rows {
                        writeln!(
                            out,
                            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            row.h_e.to_f64_lossy(),
                            i + 1,
                            j + 1,
                            row.pairing.to_f64_lossy(),
                            row.normalized.to_f64_lossy(),
                            row.target.to_f64_lossy(),
                            row.deviation.to_f64_lossy()
                        )
                        .ok();
                    }
                }
            }
        }
        Command::CurveHeights { a, b, points, tolerance } => {
            let curve = CurveQ::new(rational("a", &a)?, rational("b", &b)?)?;
            let pts = points.iter().map(|p| point(&curve, p)).collect::<Result<Vec<_>, _>>()?;
            let cfg = HeightConfig::new(tolerance);
            writeln!(out, "record\ti\tj\tx\ty\tnaive\tvalue\tlevels\tconverged").ok();
            for (i, p) in pts.iter().enumerate() {
                let h = curve.canonical_height(p, &cfg)?;
                let (x, y) = match p {
                    PointQ::Affine { x, y } => (x.to_string(), y.to_string()),
                    PointQ::Infinity => ("inf".into(), "inf".into()),
                };
                writeln!(
                    out,
                    "height\t{}\t\t{x}\t{y}\t{}\t{}\t{}\t{}",
                    i + 1,
                    naive_height(p),
                    h.value,
                    h.levels,
                    h.converged
                )
                .ok();
            }
            let m = curve.pairing_matrix(&pts, &cfg)?;
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    writeln!(out, "pairing\t{}\t{}\t\t\t\t{v}\t\t", i + 1, j + 1).ok();
                }
            }
        }
        Command::SpecializeScan {
            pencil,
            t_min,
            t_max,
            geometric_step,
            tolerance,
        } => {
            let pencil = match pencil {
                Some(path) => pencil_from_json(&read(&path)?).map_err(|e| match e {
                    Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                    other => other,
                })?,
                None => Pencil::sample(),
            };
            let ts = geometric_parameters(
                &rational("t-min", &t_min)?,
                &rational("t-max", &t_max)?,
                &rational("geometric-step", &geometric_step)?,
            )?;
            let report = specialization_scan(&pencil, &ts, &HeightConfig::new(tolerance))?;
            writeln!(out, "t\th_t\ti\tj\tpairing\tnormalized").ok();
            for row in &report.rows {
                for (i, (pr, nr)) in row.pairing.iter().zip(&row.normalized).enumerate() {
                    for (j, (p, n)) in pr.iter().zip(nr).enumerate() {
                        writeln!(out, "{}\t{}\t{}\t{}\t{p}\t{n}", row.t, row.h_t, i + 1, j + 1).ok();
                    }
                }
            }
            for (t, why) in &report.skipped {
                eprintln!("skipped\t{t}\t{why}");
            }
            let diffs: Vec<String> = report.successive_differences.iter().map(f64::to_string).collect();
            eprintln!("successive_differences\t{}", diffs.join(","));
            eprintln!("gram_rank\t{}", report.gram_rank);
            eprintln!("max_asymmetry\t{}", report.max_asymmetry);
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (kind, msg) = match f {
                Failure::Lib(e) => (e.kind(), e.detail()),
                Failure::Io(m) => ("io", m),
            };
            eprintln!("error\t{kind}\t{}", msg.replace(['\n', '\t'], " "));
            ExitCode::from(1)
        }
    }
}
