//! Subcommand bodies. Each returns the process exit code.

use std::io::{self, Write};
use std::time::Instant;

use newtonflow::critical::critical_data_with;
use newtonflow::rng::XorShift64Star;
use newtonflow::{
    demo_polynomial, find_all_roots, render_figure, seed_ladder, select_seed, step_ratio_survey,
    trace_flow, Complex, FigureSpec, Polynomial, RootSet, SeedMode, SeedPoint, SolveError, Window,
};
use serde::Serialize;

use crate::input::read_polynomial;
use crate::{Command, ModeArg, Shared};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INCOMPLETE: u8 = 2;
pub const EXIT_SEED: u8 = 3;

const BROKEN_PIPE: &str = "broken pipe";

fn io_error(e: io::Error) -> String {
    if e.kind() == io::ErrorKind::BrokenPipe {
        BROKEN_PIPE.to_string()
    } else {
        e.to_string()
    }
}

pub fn run(command: Command) -> u8 {
    let result = match command {
        Command::Roots { input, shared } => roots(&input, &shared),
        Command::Trace {
            input,
            z0,
            certified,
            attempt,
            dump,
            shared,
        } => trace(&input, z0, certified, attempt, dump, &shared),
        Command::Figure {
            input,
            window,
            res,
            levels,
            overlay,
            out,
            shared,
        } => figure(
            input.as_deref(),
            window,
            res,
            levels,
            overlay,
            &out,
            &shared,
        ),
        Command::Bench {
            input,
            random,
            samples,
            ring_factor,
            shared,
        } => bench(
            input.as_deref(),
            random.as_deref(),
            samples,
            ring_factor,
            &shared,
        ),
    };
    match result {
        Ok(code) => code,
        // a closed pipe (`| head`) is not an error of ours
        Err(message) if message == BROKEN_PIPE => EXIT_OK,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_INPUT
        }
    }
}

fn load(input: &str, shared: &Shared) -> Result<Polynomial, String> {
    let p = read_polynomial(input)?;
    if p.degree() == 0 {
        return Err("polynomial must have degree at least 1".into());
    }
    echo(&p, shared);
    Ok(p)
}

fn echo(p: &Polynomial, shared: &Shared) {
    if shared.echo {
        eprintln!("{}", p.to_json());
    }
}

#[derive(Serialize)]
struct RootJson {
    re: f64,
    im: f64,
    multiplicity: usize,
    residual: f64,
}

#[derive(Serialize)]
struct RootsJson {
    roots: Vec<RootJson>,
    attempts: usize,
}

fn roots_json(set: &RootSet, attempts: usize) -> String {
    let doc = RootsJson {
        roots: set
            .roots
            .iter()
            .map(|r| RootJson {
                re: r.value.re,
                im: r.value.im,
                multiplicity: r.multiplicity,
                residual: r.residual,
            })
            .collect(),
        attempts,
    };
    serde_json::to_string(&doc).expect("finite roots serialize")
}

fn roots(input: &str, shared: &Shared) -> Result<u8, String> {
    let p = load(input, shared)?;
    match find_all_roots(&p, &shared.solve_options()) {
        Ok(set) => {
            println!("{}", roots_json(&set, set.attempts()));
            Ok(EXIT_OK)
        }
        Err(SolveError::Incomplete {
            partial, attempts, ..
        }) => {
            println!("{}", roots_json(&partial, attempts));
            eprintln!(
                "error: solve incomplete, {} of {} roots found",
                partial.total_multiplicity,
                p.degree()
            );
            Ok(EXIT_INCOMPLETE)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn trace(
    input: &str,
    z0: Option<Complex>,
    certified: bool,
    attempt: usize,
    dump: bool,
    shared: &Shared,
) -> Result<u8, String> {
    let p = load(input, shared)?;
    let opts = shared.solve_options();
    let mut out = io::stdout().lock();
    let seed = match z0 {
        Some(z0) => SeedPoint::explicit(&p, z0),
        None if certified || shared.seed_mode == ModeArg::Certified => {
            let data = critical_data_with(&p, &opts).map_err(|e| e.to_string())?;
            let args: Vec<String> = data.forbidden_args.iter().map(f64::to_string).collect();
            writeln!(out, "#forbidden_args\t{}", args.join("\t")).map_err(io_error)?;
            match select_seed(&p, &data, attempt, &opts.seed) {
                Ok(seed) => seed,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_SEED);
                }
            }
        }
        None => match opts.seed_mode {
            SeedMode::Random { seed } => {
                newtonflow::seed::seed_random(&p, seed, attempt, &opts.seed)
            }
            _ => seed_ladder(&p, attempt, &opts.seed),
        },
    };
    writeln!(
        out,
        "#seed\t{}\t{}\ttheta={}\tradius={}\tmargin={}\tcertified={}",
        seed.z0.re, seed.z0.im, seed.theta, seed.radius, seed.margin, seed.certified
    )
    .map_err(io_error)?;
    let trace = trace_flow(&p, seed, &opts.trace);
    if dump {
        trace.write_dump(&p, &mut out).map_err(io_error)?;
    } else {
        writeln!(out, "{}", trace.outcome_line()).map_err(io_error)?;
    }
    Ok(EXIT_OK)
}

fn figure(
    input: Option<&str>,
    window: [f64; 4],
    res: usize,
    levels: std::ops::RangeInclusive<i32>,
    overlay: Option<Option<Complex>>,
    out: &std::path::Path,
    shared: &Shared,
) -> Result<u8, String> {
    let p = match input {
        Some(input) => load(input, shared)?,
        None => {
            let p = demo_polynomial();
            echo(&p, shared);
            p
        }
    };
    let [cx, cy, hw, hh] = window;
    let w = Window::new(Complex::new(cx, cy), hw, hh, (res, res)).map_err(|e| e.to_string())?;
    let spec = FigureSpec {
        level_exponents: levels,
        show_newton_overlay: overlay.is_some(),
        newton_start: overlay.flatten(),
        ..FigureSpec::default()
    };
    let fig = render_figure(&p, &w, &spec).map_err(|e| e.to_string())?;
    std::fs::write(out, &fig.svg).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    let contours: usize = fig.levels.iter().map(|l| l.polylines.len()).sum();
    println!(
        "roots {}\ncritical_points {}\nlevel_groups {}\ncontours {}\niso_angle_curves {}\nnewton_vertices {}",
        fig.roots.len(),
        fig.critical_points.len(),
        fig.levels.len(),
        contours,
        fig.curves.len(),
        fig.newton.len()
    );
    Ok(EXIT_OK)
}

fn bench(
    input: Option<&str>,
    random: Option<&[u64]>,
    samples: usize,
    ring_factor: f64,
    shared: &Shared,
) -> Result<u8, String> {
    let p = match (input, random) {
        (_, Some(&[d, seed])) => {
            if d == 0 {
                return Err("random degree must be at least 1".into());
            }
            let p = XorShift64Star::new(seed).monic_polynomial(d as usize);
            echo(&p, shared);
            p
        }
        (Some(input), _) => load(input, shared)?,
        _ => return Err("bench needs an input or --random D SEED".into()),
    };
    let survey = step_ratio_survey(&p, ring_factor, samples).map_err(|e| e.to_string())?;
    let d = p.degree();
    println!("degree\t{d}");
    println!("samples\t{samples}");
    println!("ring_factor\t{ring_factor}");
    println!("ratio_mean\t{}", survey.mean);
    println!("ratio_min\t{}", survey.min);
    println!("ratio_max\t{}", survey.max);
    println!(
        "leading_term_ratio\t{}",
        (1.0 - 1.0 / d as f64).powi(d as i32)
    );
    println!("inverse_e\t{}", (-1.0f64).exp());

    let start = Instant::now();
    let result = find_all_roots(&p, &shared.solve_options());
    let seconds = start.elapsed().as_secs_f64();
    let (found, code) = match &result {
        Ok(set) => (set.total_multiplicity, EXIT_OK),
        Err(SolveError::Incomplete { partial, .. }) => {
            (partial.total_multiplicity, EXIT_INCOMPLETE)
        }
        Err(e) => return Err(e.to_string()),
    };
    println!("roots_found\t{found}");
    println!("solve_seconds\t{seconds:.6}");
    Ok(code)
}
