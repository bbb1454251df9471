//! The `jordan` command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::constraints::hardrod::{hardrod_f_residual, parse_f_triple};
use crate::constraints::{
    compat_residual_2x2, compat_residual_blocks, phi_closed_form_2x2, ConstraintDescriptor, ConstraintSpec,
};
use crate::error::{Error, Result};
use crate::fieldfn::{Field, Point, ScalarField};
use crate::hamiltonian::{build_metric, flatness_residual, theta, tsarev_residual, DEGENERATE_TOL};
use crate::solutions::{eval_grid, fixture_json, write_csv, FamilyDescriptor, FamilyKind, GridSpec, Variant};
use crate::systems::{catalog, JordanSystem};
use crate::verify::{adjudicate, verify_family};

/// Differential constraints and exact solutions of Jordan-block systems.
#[derive(Debug, Parser)]
#[command(name = "jordan", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the linear-degeneracy residual and the block criterion.
    CheckDegeneracy(CheckArgs),
    /// Tabulate the closed-form constraint of a 2x2 block.
    DerivePhi(PhiArgs),
    /// Evaluate an exact solution family on a grid (CSV).
    Solve(SolveArgs),
    /// Finite-difference verification and variant adjudication (JSON).
    Verify(VerifyArgs),
    /// Hankel metric, Tsarev and flatness residuals of a 2x2 block (JSON).
    Hamiltonian(HamArgs),
    /// Compatibility residuals of a constraint set (JSON).
    Compat(CompatArgs),
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// Number of uniform sample points.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Seed of the sample generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling box `lo,hi` applied to every component.
    #[arg(long = "box", value_parser = parse_pair, default_value = "0.5,2")]
    pub bounds: (f64, f64),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// System descriptor JSON, or `catalog:NAME`.
    pub system: String,
    #[command(flatten)]
    pub sampling: Sampling,
    /// Sup-norm below which a residual counts as zero.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    /// System descriptor JSON (one 2x2 block), or `catalog:NAME`.
    pub system: String,
    /// `f¹` as an expression in `u2`.
    #[arg(long, default_value = "1")]
    pub f1: String,
    /// Lower limit of the `u1` integral.
    #[arg(long, default_value_t = 0.0)]
    pub base: f64,
    /// Table range `lo,hi` for both components.
    #[arg(long = "box", value_parser = parse_pair, default_value = "0.5,2")]
    pub bounds: (f64, f64),
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Paper,
    Rederived,
    Both,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Family JSON, or `fixture:NAME`.
    pub family: String,
    /// `x0,x1,nx,t0,t1,nt`.
    #[arg(long, value_parser = parse_grid)]
    pub grid: GridSpec,
    /// Override the variant in the family file.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Family JSON, or `fixture:NAME`.
    pub family: String,
    /// Largest step of the ladder.
    #[arg(long, default_value_t = 1e-2)]
    pub h: f64,
    /// Number of halvings (at least 3 for an order estimate).
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// `x0,x1,nx,t0,t1,nt`.
    #[arg(long, value_parser = parse_grid, default_value = "0.1,0.9,20,0.05,0.4,10")]
    pub grid: GridSpec,
    /// `both` runs the adjudication of the two variants.
    #[arg(long, value_enum, default_value = "both")]
    pub variant: VariantArg,
    /// Recorded in the report; the grid itself is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HamArgs {
    /// System descriptor JSON (one 2x2 block), or `catalog:NAME`.
    pub system: String,
    #[arg(long, default_value = "1")]
    pub f1: String,
    #[arg(long, default_value_t = 0.0)]
    pub base: f64,
    /// Finite-difference step of the curvature.
    #[arg(long, default_value_t = 1e-4)]
    pub h: f64,
    #[command(flatten)]
    pub sampling: Sampling,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompatArgs {
    /// System descriptor JSON, or `catalog:NAME`.
    pub system: String,
    /// Constraint descriptor JSON: `{"phi": [...]}` or `{"hardrod_f": [f1, f2, f3]}`.
    pub constraints: PathBuf,
    #[command(flatten)]
    pub sampling: Sampling,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let v: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|e| e.to_string())?;
    match v[..] {
        [a, b] if a < b && a.is_finite() && b.is_finite() => Ok((a, b)),
        _ => Err("expected lo,hi with lo < hi".into()),
    }
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let p: Vec<&str> = s.split(',').map(str::trim).collect();
    if p.len() != 6 {
        return Err("expected x0,x1,nx,t0,t1,nt".into());
    }
    let f = |i: usize| p[i].parse::<f64>().map_err(|e| format!("'{}': {e}", p[i]));
    let n = |i: usize| p[i].parse::<usize>().map_err(|e| format!("'{}': {e}", p[i]));
    Ok(GridSpec { x0: f(0)?, x1: f(1)?, nx: n(2)?, t0: f(3)?, t1: f(4)?, nt: n(5)? })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_system(src: &str) -> Result<JordanSystem> {
    match src.strip_prefix("catalog:") {
        Some(name) => catalog::by_name(name).ok_or_else(|| Error::Input(format!("no catalog system '{name}'"))),
        None => JordanSystem::from_json(&read(Path::new(src))?),
    }
}

fn load_family(src: &str) -> Result<FamilyDescriptor> {
    match src.strip_prefix("fixture:") {
        Some(name) => {
            let kind = FamilyKind::from_name(name).ok_or_else(|| Error::Input(format!("no fixture '{name}'")))?;
            FamilyDescriptor::from_json(fixture_json(kind))
        }
        None => FamilyDescriptor::from_json(&read(Path::new(src))?),
    }
}

/// One generator per command, all derived from the user seed.
fn sampler(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn sample_points(s: &Sampling, n: usize, stream: u64) -> Vec<Point> {
    let mut r = sampler(s.seed, stream);
    let (lo, hi) = s.bounds;
    (0..s.samples).map(|_| Point::from_u(&(0..n).map(|_| r.random_range(lo..hi)).collect::<Vec<_>>())).collect()
}

fn to_json(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn sup(acc: &mut [f64], v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = a.max(x.abs());
    }
}

fn check_degeneracy(a: &CheckArgs) -> Result<String> {
    let sys = load_system(&a.system)?;
    let pts = sample_points(&a.sampling, sys.n(), 1);
    let mut lindeg = vec![0.0; sys.n()];
    let mut block = vec![0.0; sys.blocks().len()];
    for p in &pts {
        sup(&mut lindeg, &sys.lindeg_residual(p)?);
        sup(&mut block, &sys.block_degeneracy(p)?);
    }
    let (ls, bs) = (lindeg.iter().fold(0.0f64, |m, v| m.max(*v)), block.iter().fold(0.0f64, |m, v| m.max(*v)));
    let (ld, bd) = (ls < a.tol, bs < a.tol);
    to_json(&json!({
        "n": sys.n(),
        "samples": pts.len(),
        "seed": a.sampling.seed,
        "box": [a.sampling.bounds.0, a.sampling.bounds.1],
        "lindeg_sup": ls,
        "lindeg_sup_per_row": lindeg,
        "block_degeneracy_sup": bs,
        "block_degeneracy_per_block": block,
        "equivalent": ld == bd,
        "verdict": if ld && bd { "linearly degenerate" } else { "not linearly degenerate" },
    }))
}

fn derive_phi(a: &PhiArgs) -> Result<String> {
    let sys = load_system(&a.system)?;
    let f1 = ScalarField::from_source(&a.f1, 2, sys.params())?;
    let phi = phi_closed_form_2x2(&sys, &f1, a.base)?;
    let (lo, hi) = a.bounds;
    let axis: Vec<f64> = (0..10).map(|i| lo + (hi - lo) * i as f64 / 9.0).collect();
    let mut table = Vec::with_capacity(10);
    for &u1 in &axis {
        let row = axis.iter().map(|&u2| phi.eval(&Point::from_u(&[u1, u2]))).collect::<std::result::Result<Vec<_>, _>>()?;
        table.push(row);
    }
    to_json(&json!({
        "u1": axis,
        "u2": axis,
        "phi": table,
        "field": {
            "kind": "closed-form-phi",
            "lambda": phi.lambda().source(),
            "mu": phi.mu().source(),
            "f1": phi.f1().source(),
            "u1_ref": phi.u1_ref(),
        },
    }))
}

fn variant_of(v: VariantArg) -> Variant {
    match v {
        VariantArg::Rederived => Variant::Rederived,
        _ => Variant::Paper,
    }
}

fn solve(a: &SolveArgs) -> Result<String> {
    let mut d = load_family(&a.family)?;
    match a.variant {
        Some(VariantArg::Both) => return Err(Error::Input("solve takes a single variant".into())),
        Some(v) => d.variant = variant_of(v),
        None => {}
    }
    a.grid.validate()?;
    let (fc, _) = d.build()?;
    let rows = eval_grid(&fc, &a.grid)?;
    let mut out = Vec::new();
    write_csv(&rows, fc.n(), &mut out)?;
    Ok(String::from_utf8(out).expect("ascii csv"))
}

fn verify(a: &VerifyArgs) -> Result<String> {
    if a.levels == 0 || !(a.h > 0.0) {
        return Err(Error::Input("--h must be positive and --levels at least 1".into()));
    }
    a.grid.validate()?;
    let ladder: Vec<f64> = (0..a.levels).map(|k| a.h / 2f64.powi(k as i32)).collect();
    let mut d = load_family(&a.family)?;
    match a.variant {
        VariantArg::Both => {
            d.variant = Variant::Paper;
            let (p, _) = d.build()?;
            d.variant = Variant::Rederived;
            let (r, _) = d.build()?;
            let mut adj = adjudicate(&p, &r, &a.grid, &ladder)?;
            for rep in &mut adj.reports {
                rep.seed = a.seed;
            }
            to_json(&adj)
        }
        v => {
            d.variant = variant_of(v);
            let (fc, _) = d.build()?;
            let mut rep = verify_family(&fc, &a.grid, &ladder)?;
            rep.seed = a.seed;
            to_json(&rep)
        }
    }
}

fn hamiltonian(a: &HamArgs) -> Result<String> {
    let sys = load_system(&a.system)?;
    let f1 = ScalarField::from_source(&a.f1, 2, sys.params())?;
    let m = build_metric(&sys, &f1, a.base)?;
    let pts = sample_points(&a.sampling, 2, 2);
    let (mut rs, mut rc, mut fl, mut th) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in &pts {
        let g = m.at(p)?[0][1];
        if !(g.abs() >= DEGENERATE_TOL) {
            return Err(Error::Precondition(format!("degenerate metric: g12 = {g:e} at u = {:?}", p.u)));
        }
        let (s, c) = tsarev_residual(&sys, &m, p)?;
        rs = rs.max(s);
        rc = rc.max(c);
        fl = fl.max(flatness_residual(&m, p, a.h)?);
        th = th.max(theta(&sys, &f1, a.base, p)?.diff);
    }
    to_json(&json!({
        "samples": pts.len(),
        "seed": a.sampling.seed,
        "box": [a.sampling.bounds.0, a.sampling.bounds.1],
        "f1": a.f1,
        "u1_ref": a.base,
        "h": a.h,
        "r_sym_max": rs,
        "r_cov_max": rc,
        "flatness_max": fl,
        "theta_phi_max": th,
    }))
}

fn compat(a: &CompatArgs) -> Result<String> {
    let sys = load_system(&a.system)?;
    let desc: ConstraintDescriptor = serde_json::from_str(&read(&a.constraints)?)?;
    let spec = ConstraintSpec::from_descriptor(&sys, &desc)?;
    let pts = sample_points(&a.sampling, sys.n(), 3);
    let mut out = serde_json::Map::new();
    out.insert("samples".into(), json!(pts.len()));
    out.insert("seed".into(), json!(a.sampling.seed));
    out.insert("box".into(), json!([a.sampling.bounds.0, a.sampling.bounds.1]));
    let mut blocks: Option<Vec<f64>> = None;
    let mut two = [0.0f64; 2];
    let mut hf = [0.0f64; 3];
    let mut skipped = 0usize;
    let single = sys.blocks().len() == 1 && sys.n() == 2;
    let triple = match &desc {
        ConstraintDescriptor::HardRod { hardrod_f } => {
            let a = sys.param("a").ok_or_else(|| Error::Input("hard-rod system needs parameter a".into()))?;
            Some((parse_f_triple(hardrod_f, sys.params())?, a))
        }
        ConstraintDescriptor::Phi { .. } => None,
    };
    for p in &pts {
        // sample points on singular loci of the constraint are counted, not fatal
        let r = match compat_residual_blocks(&sys, &spec, p) {
            Ok(r) => r,
            Err(Error::Eval(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let acc = blocks.get_or_insert_with(|| vec![0.0; r.len()]);
        sup(acc, &r);
        if single {
            let (x, y) = compat_residual_2x2(&sys, &spec, p)?;
            sup(&mut two, &[x, y]);
        }
        if let Some((t, a)) = &triple {
            sup(&mut hf, &hardrod_f_residual([&*t[0], &*t[1], &*t[2]], p, *a)?);
        }
    }
    out.insert("skipped".into(), json!(skipped));
    out.insert("block_residual_sup".into(), json!(blocks.unwrap_or_default()));
    if single {
        out.insert("residual_2x2_sup".into(), json!(two));
    }
    if matches!(desc, ConstraintDescriptor::HardRod { .. }) {
        out.insert("hardrod_f_residual_sup".into(), json!(hf));
    }
    to_json(&Value::Object(out))
}

fn write_out(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Run one command and return its output text.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::CheckDegeneracy(a) => check_degeneracy(a),
        Command::DerivePhi(a) => derive_phi(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Hamiltonian(a) => hamiltonian(a),
        Command::Compat(a) => compat(a),
    }
}

fn out_path(cli: &Cli) -> Option<&Path> {
    match &cli.command {
        Command::CheckDegeneracy(a) => a.out.as_deref(),
        Command::DerivePhi(a) => a.out.as_deref(),
        Command::Solve(a) => a.out.as_deref(),
        Command::Verify(a) => a.out.as_deref(),
        Command::Hamiltonian(a) => a.out.as_deref(),
        Command::Compat(a) => a.out.as_deref(),
    }
}

/// Parse arguments, run, and map failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|text| write_out(&text, out_path(&cli))) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
