//! Command-line surface: every verification and sweep as a reproducible,
//! file-emitting subcommand with deterministic output.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::akulin::{chain_eigenstate, AkulinSpec, Direction, SpectralPoint};
use crate::akulin::{intertwiner_closed, intertwiner_from_chain, verify_factorization};
use crate::darboux::{build_darboux, conjecture_check, dressed_eigen_residual, FixedEigenstate};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ode::OdeOptions;
use crate::operator::{default_window, SymmetryTransform};
use crate::scattering::{bound_states, reflectivity_sweep, SolverOptions};
use crate::solitons::{NlsKind, NlsSolution, SgKind, SgSolution};
use crate::twolevel::detuning_sweep;

#[derive(Parser)]
#[command(name = "zssusy", version, about = "Reflectionless Zakharov-Shabat operators: \
SUSY chain verification, scattering, solitons, Darboux and pulse tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep the reflection coefficient over a zeta grid
    Reflect(ReflectArgs),
    /// Verify the SUSY factorization chain over a range of n
    SusyVerify(SusyVerifyArgs),
    /// Check chain-built intertwiners against the closed forms
    IntertwineCheck(IntertwineCheckArgs),
    /// Sample a chain-built eigenstate on a grid
    Eigenchain(EigenchainArgs),
    /// Locate discrete eigenvalues by two-sided shooting
    BoundStates(BoundStatesArgs),
    /// Sample a closed-form sine-Gordon or NLS solution
    Soliton(SolitonArgs),
    /// Probe the Darboux/intertwiner coincidence on eigen-subspaces
    DarbouxCheck(DarbouxCheckArgs),
    /// Sweep sech-pulse population transfer over detuning
    Pulse(PulseArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Config file of `key = value` lines (# comments); flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; relative paths resolve under ZSSUSY_OUT_DIR (default .)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Spacing {
    Linear,
    Log,
}

#[derive(Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct ReflectArgs {
    /// Potential strength n (integer values are reflectionless)
    #[arg(long)]
    n: f64,
    /// Width parameter xi
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// Carrier wavenumber eta
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Center x0
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    /// Overall phase phi
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 0.1)]
    zeta_min: f64,
    #[arg(long, default_value_t = 5.0)]
    zeta_max: f64,
    #[arg(long, default_value_t = 40)]
    points: usize,
    /// Spacing of the zeta grid
    #[arg(long, value_enum, default_value = "linear")]
    spacing: Spacing,
    /// Integration half-width L
    #[arg(long, default_value_t = 25.0)]
    l: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct SusyVerifyArgs {
    #[arg(long, default_value_t = -3)]
    n_min: i32,
    #[arg(long, default_value_t = 3)]
    n_max: i32,
    /// Symmetry transform to apply: all, i, x, y or z
    #[arg(long, default_value = "all")]
    transform: String,
    /// Failure threshold on the residuals
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct IntertwineCheckArgs {
    #[arg(long, default_value_t = -3)]
    n_min: i32,
    #[arg(long, default_value_t = 3)]
    n_max: i32,
    /// Failure threshold on the chain/closed-form distance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct EigenchainArgs {
    /// Chain level n >= 1
    #[arg(long, default_value_t = 1)]
    n: i32,
    /// Spectral point lambda = i zeta
    #[arg(long, default_value_t = 0.7)]
    zeta: f64,
    #[arg(long, default_value_t = -15.0)]
    x_min: f64,
    #[arg(long, default_value_t = 15.0)]
    x_max: f64,
    #[arg(long, default_value_t = 3001)]
    points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct BoundStatesArgs {
    #[arg(long)]
    n: f64,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// Upper end of the lambda scan
    #[arg(long, default_value_t = 2.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 80)]
    scan_points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    SgKink,
    SgAntikink,
    SgTwo,
    NlsOne,
    NlsBreather,
}

#[derive(Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct SolitonArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// NLS velocity parameter (ignored by sG models)
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    /// NLS overall phase (ignored by sG models)
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Overall sign for the NLS models: 1 or -1
    #[arg(long, default_value_t = 1)]
    sign: i32,
    /// Time at which to sample
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value_t = -10.0)]
    x_min: f64,
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 401)]
    points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct DarbouxCheckArgs {
    /// Comma-separated list of zeta values (lambda = i zeta)
    #[arg(long, default_value = "0.4,1.1")]
    zetas: String,
    /// Failure threshold on the subspace residual
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct PulseArgs {
    /// Pulse area parameter n
    #[arg(long)]
    n: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = -10.0)]
    delta_min: f64,
    #[arg(long, default_value_t = 10.0)]
    delta_max: f64,
    #[arg(long, default_value_t = 21)]
    points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

// --- deterministic output -------------------------------------------------

/// `%.17g`-style float formatting: 17 significant digits, fixed or
/// scientific by magnitude, trailing zeros trimmed.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("always has exponent");
    let e: i32 = exp.parse().expect("valid exponent");
    if (-4..17).contains(&e) {
        let decimals = (16 - e) as usize;
        let fixed = format!("{x:.decimals$}");
        let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        let m = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{e}")
    }
}

enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_g(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Text(s) => format!("\"{s}\""),
            _ => self.csv(),
        }
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut out = String::from("[\n");
                for (i, row) in self.rows.iter().enumerate() {
                    let fields: Vec<String> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, c)| format!("\"{k}\": {}", c.json()))
                        .collect();
                    out.push_str("  {");
                    out.push_str(&fields.join(", "));
                    out.push('}');
                    if i + 1 < self.rows.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str("]\n");
                out
            }
        }
    }

    fn write(&self, output: &OutputArgs) -> Result<()> {
        if let Some(path) = &output.out {
            let resolved = resolve_out(path);
            std::fs::write(resolved, self.render(output.format))?;
        }
        Ok(())
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        let dir = std::env::var_os("ZSSUSY_OUT_DIR").unwrap_or_else(|| ".".into());
        Path::new(&dir).join(path)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("points must be >= 1".into()));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

fn logspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(
            "log spacing needs positive endpoints".into(),
        ));
    }
    Ok(linspace(a.ln(), b.ln(), n)?.into_iter().map(f64::exp).collect())
}

// --- config file expansion --------------------------------------------------

/// Expand `--config file` into flags inserted right after the subcommand, so
/// that flags given on the command line override the file.
fn expand_config(argv: Vec<String>) -> std::io::Result<Vec<String>> {
    let mut path: Option<String> = None;
    let mut iter = argv.iter();
    while let Some(tok) = iter.next() {
        if tok == "--config" {
            path = iter.next().cloned();
        } else if let Some(p) = tok.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    if argv.len() < 2 {
        return Ok(argv);
    }
    let contents = std::fs::read_to_string(&path)?;
    let mut extra = Vec::new();
    for (lineno, raw) in contents.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("config line {}: expected `key = value`", lineno + 1),
            ));
        };
        extra.push(format!("--{}", key.trim()));
        extra.push(value.trim().to_string());
    }
    let mut out = argv;
    // argv[0] program, argv[1] subcommand; file-derived flags come first
    out.splice(2..2, extra);
    Ok(out)
}

// --- entry point -------------------------------------------------------------

/// Parse and execute; returns the process exit code
/// (0 pass, 1 usage/io error, 2 verification failure).
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match expand_config(argv) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.cmd) {
        Ok(()) => 0,
        Err(e @ Error::VerificationFailure(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Reflect(a) => reflect(a),
        Cmd::SusyVerify(a) => susy_verify(a),
        Cmd::IntertwineCheck(a) => intertwine_check(a),
        Cmd::Eigenchain(a) => eigenchain(a),
        Cmd::BoundStates(a) => bound_states_cmd(a),
        Cmd::Soliton(a) => soliton(a),
        Cmd::DarbouxCheck(a) => darboux_check(a),
        Cmd::Pulse(a) => pulse(a),
    }
}

fn reflect(a: ReflectArgs) -> Result<()> {
    let spec = AkulinSpec::new(a.n, a.xi, a.eta, a.x0, a.phi)?;
    let zetas = match a.spacing {
        Spacing::Linear => linspace(a.zeta_min, a.zeta_max, a.points)?,
        Spacing::Log => logspace(a.zeta_min, a.zeta_max, a.points)?,
    };
    let opts = SolverOptions { l: a.l, ..SolverOptions::default() };
    let data = reflectivity_sweep(&spec, &zetas, &opts)?;
    let mut max_r: f64 = 0.0;
    let rows = data
        .iter()
        .map(|d| {
            max_r = max_r.max(d.r);
            vec![
                Cell::Num(d.zeta),
                Cell::Num(d.a.re),
                Cell::Num(d.a.im),
                Cell::Num(d.b.re),
                Cell::Num(d.b.im),
                Cell::Num(d.r),
            ]
        })
        .collect();
    let table = Table { header: vec!["zeta", "re_a", "im_a", "re_b", "im_b", "R"], rows };
    table.write(&a.output)?;
    println!("reflect: {} points, max R = {}, ok", data.len(), fmt_g(max_r));
    Ok(())
}

fn parse_transforms(s: &str) -> Result<Vec<SymmetryTransform>> {
    match s.to_ascii_lowercase().as_str() {
        "all" => Ok(SymmetryTransform::ALL.to_vec()),
        "i" => Ok(vec![SymmetryTransform::I]),
        "x" => Ok(vec![SymmetryTransform::X]),
        "y" => Ok(vec![SymmetryTransform::Y]),
        "z" => Ok(vec![SymmetryTransform::Z]),
        other => Err(Error::InvalidArgument(format!(
            "transform must be all/i/x/y/z, got {other}"
        ))),
    }
}

fn susy_verify(a: SusyVerifyArgs) -> Result<()> {
    if a.n_min > a.n_max {
        return Err(Error::InvalidArgument("n-min > n-max".into()));
    }
    let transforms = parse_transforms(&a.transform)?;
    let window = default_window();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for n in a.n_min..=a.n_max {
        for &t in &transforms {
            let rep = verify_factorization(n, t, &window)?;
            let local = rep.residual_h_n.max(rep.residual_h_half).max(rep.residual_h_next);
            worst = worst.max(local);
            rows.push(vec![
                Cell::Int(n as i64),
                Cell::Text(t.to_string()),
                Cell::Num(rep.residual_h_n),
                Cell::Num(rep.residual_h_half),
                Cell::Num(rep.residual_h_next),
            ]);
        }
    }
    let table = Table {
        header: vec!["n", "transform", "res_h_n", "res_h_half", "res_h_next"],
        rows,
    };
    table.write(&a.output)?;
    if worst > a.tol {
        println!("susy-verify: max residual = {}, FAIL", fmt_g(worst));
        return Err(Error::VerificationFailure(format!(
            "max factorization residual {worst:e} > tol {:e}",
            a.tol
        )));
    }
    println!("susy-verify: max residual = {}, pass", fmt_g(worst));
    Ok(())
}

fn intertwine_check(a: IntertwineCheckArgs) -> Result<()> {
    if a.n_min > a.n_max {
        return Err(Error::InvalidArgument("n-min > n-max".into()));
    }
    let window = default_window();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for n in a.n_min..=a.n_max {
        for dir in [Direction::Up, Direction::Down] {
            let closed = intertwiner_closed(n, dir);
            for t in SymmetryTransform::ALL {
                let chain = intertwiner_from_chain(n, dir, t)?;
                let d = chain.distance(&closed, &window);
                worst = worst.max(d);
                rows.push(vec![
                    Cell::Int(n as i64),
                    Cell::Text(match dir {
                        Direction::Up => "up".into(),
                        Direction::Down => "down".into(),
                    }),
                    Cell::Text(t.to_string()),
                    Cell::Num(d),
                ]);
            }
        }
    }
    let table = Table { header: vec!["n", "direction", "transform", "distance"], rows };
    table.write(&a.output)?;
    if worst > a.tol {
        println!("intertwine-check: max distance = {}, FAIL", fmt_g(worst));
        return Err(Error::VerificationFailure(format!(
            "max chain/closed-form distance {worst:e} > tol {:e}",
            a.tol
        )));
    }
    println!("intertwine-check: max distance = {}, pass", fmt_g(worst));
    Ok(())
}

fn eigenchain(a: EigenchainArgs) -> Result<()> {
    let grid = Grid::new(a.x_min, a.x_max, a.points)?;
    let psi = chain_eigenstate(
        a.n,
        SpectralPoint(Complex64::new(0.0, a.zeta)),
        Complex64::ONE,
        Complex64::ZERO,
        &grid,
    )?;
    let rows = grid
        .points()
        .zip(psi.values())
        .map(|(x, v)| {
            vec![
                Cell::Num(x),
                Cell::Num(v[0].re),
                Cell::Num(v[0].im),
                Cell::Num(v[1].re),
                Cell::Num(v[1].im),
            ]
        })
        .collect();
    let table = Table {
        header: vec!["x", "re_psi1", "im_psi1", "re_psi2", "im_psi2"],
        rows,
    };
    table.write(&a.output)?;
    println!("eigenchain: n = {}, zeta = {}, {} points, ok", a.n, fmt_g(a.zeta), a.points);
    Ok(())
}

fn bound_states_cmd(a: BoundStatesArgs) -> Result<()> {
    let spec = AkulinSpec::new(a.n, a.xi, 0.0, 0.0, 0.0)?;
    let set = bound_states(&spec, a.lambda_max, a.scan_points, &SolverOptions::default())?;
    let rows = set
        .eigenvalues
        .iter()
        .zip(&set.mismatch_values)
        .map(|(l, m)| vec![Cell::Num(*l), Cell::Num(*m)])
        .collect();
    let table = Table { header: vec!["lambda", "mismatch"], rows };
    table.write(&a.output)?;
    println!("bound-states: {} eigenvalues in (0, {}], ok", set.eigenvalues.len(), fmt_g(a.lambda_max));
    Ok(())
}

fn soliton(a: SolitonArgs) -> Result<()> {
    if a.sign != 1 && a.sign != -1 {
        return Err(Error::InvalidArgument(format!("sign must be 1 or -1, got {}", a.sign)));
    }
    let xs = linspace(a.x_min, a.x_max, a.points)?;
    let eval: Box<dyn Fn(f64) -> Complex64> = match a.model {
        Model::SgKink | Model::SgAntikink | Model::SgTwo => {
            let kind = match a.model {
                Model::SgKink => SgKind::Kink,
                Model::SgAntikink => SgKind::Antikink,
                _ => SgKind::TwoSoliton,
            };
            let sol = SgSolution::new(kind, a.xi, a.x0)?;
            let t = a.t;
            Box::new(move |x| Complex64::new(sol.eval(x, t), 0.0))
        }
        Model::NlsOne | Model::NlsBreather => {
            let kind = if a.model == Model::NlsOne { NlsKind::OneSoliton } else { NlsKind::Breather };
            let sol = NlsSolution::new(kind, a.sign == 1, a.xi, a.eta, a.x0, a.phi)?;
            let t = a.t;
            Box::new(move |x| sol.eval(x, t))
        }
    };
    let rows = xs
        .iter()
        .map(|&x| {
            let u = eval(x);
            vec![Cell::Num(x), Cell::Num(a.t), Cell::Num(u.re), Cell::Num(u.im)]
        })
        .collect();
    let table = Table { header: vec!["x", "t", "re_u", "im_u"], rows };
    table.write(&a.output)?;
    println!("soliton: {} points at t = {}, ok", xs.len(), fmt_g(a.t));
    Ok(())
}

fn darboux_check(a: DarbouxCheckArgs) -> Result<()> {
    let mut lambdas = Vec::new();
    for piece in a.zetas.split(',') {
        let z: f64 = piece
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad zeta value `{piece}`")))?;
        lambdas.push(SpectralPoint(Complex64::new(0.0, z)));
    }
    let data = build_darboux(&FixedEigenstate::canonical(), |_| Complex64::ZERO, &default_window())?;
    let grid = Grid::new(-10.0, 10.0, 2001)?;
    let eig_grid = Grid::new(-15.0, 15.0, 6001)?;
    let rep = conjecture_check(&data, 0, &lambdas, &grid)?;
    let rows = lambdas
        .iter()
        .enumerate()
        .map(|(k, lam)| {
            let eig = dressed_eigen_residual(&data, 0, rep.sigma_y_sign, *lam, &eig_grid)
                .unwrap_or(f64::NAN);
            vec![
                Cell::Num(lam.0.im),
                Cell::Num(rep.per_lambda_scale[k].re),
                Cell::Num(rep.per_lambda_scale[k].im),
                Cell::Num(rep.residuals[k]),
                Cell::Num(eig),
            ]
        })
        .collect();
    let table = Table {
        header: vec!["zeta", "re_scale", "im_scale", "residual", "eigen_residual"],
        rows,
    };
    table.write(&a.output)?;
    if rep.max_rel_dev > a.tol {
        println!(
            "darboux-check: sigma_y sign = {}, max residual = {}, FAIL",
            fmt_g(rep.sigma_y_sign),
            fmt_g(rep.max_rel_dev)
        );
        return Err(Error::VerificationFailure(format!(
            "max subspace residual {:e} > tol {:e}",
            rep.max_rel_dev, a.tol
        )));
    }
    println!(
        "darboux-check: sigma_y sign = {}, max residual = {}, pass",
        fmt_g(rep.sigma_y_sign),
        fmt_g(rep.max_rel_dev)
    );
    Ok(())
}

fn pulse(a: PulseArgs) -> Result<()> {
    let deltas = linspace(a.delta_min, a.delta_max, a.points)?;
    let results = detuning_sweep(a.n, a.tau, &deltas, &OdeOptions::default())?;
    let mut max_p: f64 = 0.0;
    let rows = results
        .iter()
        .map(|r| {
            max_p = max_p.max(r.p_transfer);
            vec![Cell::Num(r.delta), Cell::Num(r.p_transfer)]
        })
        .collect();
    let table = Table { header: vec!["delta", "p_transfer"], rows };
    table.write(&a.output)?;
    println!("pulse: {} points, max p_transfer = {}, ok", results.len(), fmt_g(max_p));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_g_examples() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(0.5), "0.5");
        assert_eq!(fmt_g(-2.0), "-2");
        assert_eq!(fmt_g(1e18), "1e18");
        assert_eq!(fmt_g(0.1), "0.10000000000000001");
        assert_eq!(fmt_g(1.0 / 3.0), "0.33333333333333331");
    }

    #[test]
    fn fmt_g_round_trips() {
        for &x in &[std::f64::consts::PI, 1e-300, -7.25e-5, 123456.789, 3.0, 1e-9, 1.5e20] {
            let back: f64 = fmt_g(x).parse().unwrap();
            assert_eq!(back, x, "{x} -> {}", fmt_g(x));
        }
    }

    #[test]
    fn linspace_logspace_examples() {
        assert_eq!(linspace(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        let ls = logspace(0.1, 10.0, 3).unwrap();
        assert!((ls[1] - 1.0).abs() < 1e-12);
        assert!(logspace(-1.0, 1.0, 3).is_err());
    }

    #[test]
    fn config_expansion_inserts_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "n = 2\nxi = 1.5 # comment\n\n# full-line comment\n").unwrap();
        let argv: Vec<String> = vec![
            "zssusy".into(),
            "reflect".into(),
            "--xi".into(),
            "2".into(),
            "--config".into(),
            cfg.to_str().unwrap().into(),
        ];
        let out = expand_config(argv).unwrap();
        assert_eq!(
            &out[..6],
            &["zssusy", "reflect", "--n", "2", "--xi", "1.5"]
        );
        // user flag comes after the file-derived ones, so it overrides
        assert!(out[6..].contains(&"--xi".to_string()));
    }

    #[test]
    fn table_rendering() {
        let t = Table {
            header: vec!["a", "b"],
            rows: vec![
                vec![Cell::Num(0.5), Cell::Text("I".into())],
                vec![Cell::Num(-1.0), Cell::Text("X".into())],
            ],
        };
        assert_eq!(t.render(Format::Csv), "a,b\n0.5,I\n-1,X\n");
        assert_eq!(
            t.render(Format::Json),
            "[\n  {\"a\": 0.5, \"b\": \"I\"},\n  {\"a\": -1, \"b\": \"X\"}\n]\n"
        );
    }
}
