use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skewval::pp::{
    decide_equiv_ake, decide_equiv_divisible, pp_index, pp_satisfies, pp_to_atomic,
    theory_of_bigmodel, theory_of_truncated, AtomicSystem,
};
use skewval::scenarios::run_counterexample;
use skewval::series::Exp;
use skewval::text::{
    descriptor_field, format_descriptor, format_poly, format_pp, parse_chain, parse_descriptor,
    parse_poly, parse_pp, parse_series,
};
use skewval::{
    Config, Error, MatrixOverR, PPFormula, SeriesModel, SkewPoly, SkewRing, Solver,
    TheoryDescriptor, Tower,
};

#[derive(Parser)]
#[command(name = "skewval", version, about = "Twisted polynomial rings and valued modules")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// key=value file, overridden by the flags below
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    p: Option<u32>,
    #[arg(long, global = true)]
    s: Option<u32>,
    #[arg(long, global = true)]
    mmax: Option<usize>,
    #[arg(long, global = true)]
    precision: Option<i64>,
    #[arg(long, global = true)]
    kmax: Option<u32>,
    #[arg(long, global = true)]
    degbound: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Skew polynomial arithmetic
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Constant roots of x.r = 0
    #[command(subcommand)]
    Ann(AnnCmd),
    /// Solving x.r = y in the series module
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Series module operations
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Positive primitive formulas
    #[command(subcommand)]
    Pp(PpCmd),
    /// Theory descriptors
    #[command(subcommand)]
    Theory(TheoryCmd),
    #[command(subcommand)]
    Demo(DemoCmd),
    #[command(subcommand)]
    Chain(ChainCmd),
}

#[derive(Subcommand)]
enum PolyCmd {
    Mul { a: String, b: String },
    /// a = b quot + rem
    Divmod { a: String, b: String },
    /// Monic generator of aR + bR
    Gcd { a: String, b: String },
    Lclm { a: String, b: String },
    Factor { q: String },
    Conjugacy { q: String },
}

#[derive(Subcommand)]
enum AnnCmd {
    Roots { r: String },
    Eta { r: String },
}

#[derive(Subcommand)]
enum SolveCmd {
    Div { r: String, y: String },
    Hensel { r: String, y: String },
    Troot { y: String },
}

#[derive(Subcommand)]
enum SeriesCmd {
    Val { x: String },
    Act { x: String, r: String },
    Decompose { x: String },
    Regular { x: String, r: Option<String> },
    /// Coefficient of u^gamma, gamma written a or a/b
    Residue { x: String, gamma: String },
}

#[derive(Subcommand)]
enum PpCmd {
    /// Equivalent atomic formula
    Simplify { phi: String },
    /// |psi(N) / phi(N)| for one-variable formulas
    Index {
        phi: String,
        psi: String,
        /// Descriptor file; the big model's theory when absent
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Whether the formula holds at the given series
    Sat { phi: String, x: Vec<String> },
}

#[derive(Subcommand)]
enum TheoryCmd {
    /// Descriptor of the series model over F_{p^m}
    Of {
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Largest degree of the listed irreducibles
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Count roots inside F_{p^BIG} only
        #[arg(long)]
        truncate: Option<usize>,
    },
    /// Compare divisible-module theories
    Equiv { a: PathBuf, b: PathBuf },
    /// Compare valued-module theories
    Ake { a: PathBuf, b: PathBuf },
}

#[derive(Subcommand)]
enum DemoCmd {
    Counterexample,
}

#[derive(Subcommand)]
enum ChainCmd {
    Check { chain: String },
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn config(opts: &Opts) -> Res<Config> {
    let mut c = Config::default();
    if let Some(path) = &opts.config {
        let text = read(path)?;
        c.apply_text(&text)?;
    }
    c.p = opts.p.unwrap_or(c.p);
    c.s = opts.s.unwrap_or(c.s);
    c.m_max = opts.mmax.unwrap_or(c.m_max);
    c.precision = opts.precision.unwrap_or(c.precision);
    c.k_max = opts.kmax.unwrap_or(c.k_max);
    c.degree_bound = opts.degbound.unwrap_or(c.degree_bound);
    c.validate()?;
    Ok(c)
}

fn read(path: &PathBuf) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn two(ring: &SkewRing, tw: &Tower, a: &str, b: &str) -> Res<(SkewPoly, SkewPoly)> {
    let a = parse_poly(tw, a)?;
    let b = parse_poly(tw, b)?;
    Ok(ring.align(&a, &b)?)
}

fn parse_exp(s: &str) -> Res<Exp> {
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("expected an exponent a or a/b, found '{s}'"),
    };
    let (a, b) = match s.trim().split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let a: i64 = a.parse().map_err(|_| bad())?;
    let b: i64 = b.parse().map_err(|_| bad())?;
    if b == 0 {
        return Err(bad().into());
    }
    Ok(Exp::new(a, b))
}

fn atomic_formula(ring: &SkewRing, m: usize, sys: &AtomicSystem) -> Res<PPFormula> {
    let n = sys.free_vars;
    let cols: Vec<Vec<SkewPoly>> = if sys.equations.is_empty() {
        vec![vec![ring.zero(m); n]]
    } else {
        sys.equations.clone()
    };
    let mut entries = Vec::with_capacity(n * cols.len());
    for l in 0..n {
        for col in &cols {
            entries.push(col[l].clone());
        }
    }
    let e = cols.len();
    Ok(PPFormula::new(
        ring,
        MatrixOverR::zeros(ring, m, 0, e),
        MatrixOverR::new(ring, m, n, e, entries)?,
    )?)
}

fn load_descriptor(c: &Config, path: &PathBuf) -> Res<TheoryDescriptor> {
    let text = read(path)?;
    let (p, s, m) = descriptor_field(&text)?;
    let tw = Tower::new(p, s, c.m_max.max(m))?;
    Ok(parse_descriptor(&tw, &text)?)
}

fn run(cli: Cli) -> Res<Vec<String>> {
    let c = config(&cli.opts)?;
    let tw = Tower::new(c.p, c.s, c.m_max)?;
    let ring = SkewRing::new(&tw);
    let sm = SeriesModel::new(&tw, c.k_max, c.precision);
    let solver = Solver::new(sm);
    let out = match cli.cmd {
        Cmd::Poly(cmd) => match cmd {
            PolyCmd::Mul { a, b } => {
                let (a, b) = two(&ring, &tw, &a, &b)?;
                vec![format_poly(&ring.mul(&a, &b))]
            }
            PolyCmd::Divmod { a, b } => {
                let (a, b) = two(&ring, &tw, &a, &b)?;
                let (q, r) = ring.right_divmod(&a, &b)?;
                vec![format!("quot: {}", format_poly(&q)), format!("rem: {}", format_poly(&r))]
            }
            PolyCmd::Gcd { a, b } => {
                let (a, b) = two(&ring, &tw, &a, &b)?;
                vec![format_poly(&ring.rgcd(&a, &b)?)]
            }
            PolyCmd::Lclm { a, b } => {
                let (a, b) = two(&ring, &tw, &a, &b)?;
                vec![format_poly(&ring.lclm(&a, &b)?)]
            }
            PolyCmd::Factor { q } => {
                let q = parse_poly(&tw, &q)?;
                let f = ring.factorize(&q, c.degree_bound)?;
                let mut out = vec![format!("t-power: {}", f.t_power)];
                out.extend(f.factors.iter().map(|g| format!("factor: {}", format_poly(g))));
                out.push(format!("unit: {}", f.unit));
                out
            }
            PolyCmd::Conjugacy { q } => {
                let q = parse_poly(&tw, &q)?;
                vec![format_poly(&ring.conjugacy_rep(&q)?)]
            }
        },
        Cmd::Ann(cmd) => match cmd {
            AnnCmd::Roots { r } => {
                let set = solver.ann_roots(&parse_poly(&tw, &r)?)?;
                let roots: Vec<String> = set.roots.iter().map(ToString::to_string).collect();
                vec![
                    format!("field: F_{}^{}", tw.p(), set.field_degree),
                    format!("roots: {}", roots.join(", ")),
                ]
            }
            AnnCmd::Eta { r } => vec![solver.eta(&parse_poly(&tw, &r)?).to_string()],
        },
        Cmd::Solve(cmd) => match cmd {
            SolveCmd::Div { r, y } => {
                let r = parse_poly(&tw, &r)?;
                vec![solver.solve_div(&r, &parse_series(&sm, &y)?)?.to_string()]
            }
            SolveCmd::Hensel { r, y } => {
                let r = parse_poly(&tw, &r)?;
                vec![solver.hensel_lift(&r, &parse_series(&sm, &y)?)?.to_string()]
            }
            SolveCmd::Troot { y } => vec![solver.t_root(&parse_series(&sm, &y)?)?.to_string()],
        },
        Cmd::Series(cmd) => match cmd {
            SeriesCmd::Val { x } => vec![parse_series(&sm, &x)?.valuation()?.to_string()],
            SeriesCmd::Act { x, r } => {
                let x = parse_series(&sm, &x)?;
                vec![sm.act(&x, &parse_poly(&tw, &r)?)?.to_string()]
            }
            SeriesCmd::Decompose { x } => {
                let d = sm.decompose(&parse_series(&sm, &x)?);
                vec![
                    format!("torsion: {}", d.torsion),
                    format!("theta: {}", d.theta),
                    format!("positive: {}", d.positive),
                    format!("negative: {}", d.negative),
                ]
            }
            SeriesCmd::Regular { x, r } => {
                let x = parse_series(&sm, &x)?;
                let r = r.map(|r| parse_poly(&tw, &r)).transpose()?;
                vec![sm.is_regular(&x, r.as_ref())?.to_string()]
            }
            SeriesCmd::Residue { x, gamma } => {
                let x = parse_series(&sm, &x)?;
                let g = parse_exp(&gamma)?;
                sm.check_exponent(&g)?;
                vec![sm.residue_at(&x, &g)?.to_string()]
            }
        },
        Cmd::Pp(cmd) => match cmd {
            PpCmd::Simplify { phi } => {
                let phi = parse_pp(&tw, &phi)?;
                let sys = pp_to_atomic(&ring, &phi)?;
                vec![format_pp(&atomic_formula(&ring, phi.k_degree(), &sys)?)]
            }
            PpCmd::Index { phi, psi, theory } => {
                let phi = parse_pp(&tw, &phi)?;
                let psi = parse_pp(&tw, &psi)?;
                let theory = match theory {
                    Some(path) => load_descriptor(&c, &path)?,
                    None => {
                        let m = tw.compositum(phi.k_degree(), psi.k_degree())?;
                        theory_of_bigmodel(&ring, m, c.degree_bound.min(4))?
                    }
                };
                vec![pp_index(&ring, &phi, &psi, &theory)?.to_string()]
            }
            PpCmd::Sat { phi, x } => {
                let phi = parse_pp(&tw, &phi)?;
                let xs = x
                    .iter()
                    .map(|s| parse_series(&sm, s))
                    .collect::<skewval::Result<Vec<_>>>()?;
                let sat = pp_satisfies(&solver, &ring, &phi, &xs)?;
                let mut out = vec![format!("holds: {}", sat.holds)];
                for (i, y) in sat.witness.iter().flatten().enumerate() {
                    out.push(format!("y{} = {y}", i + 1));
                }
                out
            }
        },
        Cmd::Theory(cmd) => match cmd {
            TheoryCmd::Of { m, d, truncate } => {
                let t = match truncate {
                    Some(big) => theory_of_truncated(&solver, &ring, m, d, big)?,
                    None => theory_of_bigmodel(&ring, m, d)?,
                };
                vec![format_descriptor(&t).trim_end().to_string()]
            }
            TheoryCmd::Equiv { a, b } => {
                let (a, b) = (load_descriptor(&c, &a)?, load_descriptor(&c, &b)?);
                vec![decide_equiv_divisible(&a, &b)?.to_string()]
            }
            TheoryCmd::Ake { a, b } => {
                let (a, b) = (load_descriptor(&c, &a)?, load_descriptor(&c, &b)?);
                vec![decide_equiv_ake(&a, &b)?.to_string()]
            }
        },
        Cmd::Demo(DemoCmd::Counterexample) => {
            let cert = run_counterexample(&solver)?;
            if !cert.pass() {
                println!("{cert}");
                return Err(Failure::Lib(Error::Precondition("certificate check failed".into())));
            }
            vec![cert.to_string()]
        }
        Cmd::Chain(ChainCmd::Check { chain }) => {
            let violations = parse_chain(&chain)?.check();
            if violations.is_empty() {
                vec!["OK".into()]
            } else {
                violations.iter().map(ToString::to_string).collect()
            }
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(if e.is_parse() { 2 } else { 1 })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error[io]: {msg}");
            ExitCode::from(1)
        }
    }
}
