use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use frobint::ffield::{make_field, FieldCtx};
use frobint::localint::{
    local_mult_oracle, twisted_branch_intersection, twisted_intersection_sequence, CurveGerm,
    ORACLE_N_MAX,
};
use frobint::parser::{parse_series2, parse_unipoly};
use frobint::pseries::{Axis, BranchParam, TruncSeries1};
use frobint::sslocus::{ss_both, ss_bruteforce, ss_hasse, SSLocus};
use frobint::surface::{
    faltings_height_series, intersect_with_z, sum_of_local_mults, GlobalCurve, NonOrdDivisor,
};
use frobint::verify::{run_suite, RunConfig};

#[derive(Parser)]
#[command(name = "frobint", version, about = "Partial Frobenius intersection toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Local intersection multiplicity of a germ with a parametrized branch.
    Local {
        /// Germ in t1, t2 (e.g. "t2^2 - t1^3")
        #[arg(long)]
        f: String,
        /// Branch "alpha1,alpha2" as polynomials in u (e.g. "u,u^2")
        #[arg(long)]
        branch: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Twist axis (1 or 2)
        #[arg(long, default_value_t = 1)]
        axis: u8,
        /// Frobenius twist exponent
        #[arg(long, default_value_t = 0)]
        n: u64,
        /// Truncate the branch to this u-precision (default: exact input)
        #[arg(long)]
        prec: Option<usize>,
    },
    /// The sequence n -> (C_n . D)_x for a range of twists.
    TwistSeq {
        #[arg(long)]
        f: String,
        #[arg(long)]
        branch: String,
        #[arg(long, default_value_t = 1)]
        axis: u8,
        /// Twist range, inclusive (e.g. "0..4") or a single value
        #[arg(long, default_value = "0..4")]
        n: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "json")]
        out: OutFormat,
    },
    /// Local multiplicity of two germs by the linear-algebra oracle.
    Oracle {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Global Bezout number and its decomposition into local multiplicities.
    Global {
        /// Curve file: {"p":5,"k":1,"poly":"x1*x2 + 3*x1 + 1"}
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        d: PathBuf,
        /// Largest extension degree searched for points
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        #[arg(long, default_value = "json")]
        out: OutFormat,
    },
    /// Intersection numbers of twisted pullbacks with the non-ordinary locus.
    ZIntersect {
        #[arg(long)]
        c: PathBuf,
        #[arg(long, default_value_t = 1)]
        axis: u8,
        #[arg(long, default_value_t = 6)]
        n_max: u64,
        #[arg(long, default_value = "json")]
        out: OutFormat,
    },
    /// Faltings-height analogue h(n) along the twist sequence.
    Height {
        #[arg(long)]
        c: PathBuf,
        #[arg(long, default_value_t = 1)]
        axis: u8,
        #[arg(long, default_value_t = 6)]
        n_max: u64,
        #[arg(long, default_value = "json")]
        out: OutFormat,
    },
    /// Supersingular j-invariants in characteristic p.
    Ss {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "both")]
        method: SsMethodArg,
    },
    /// Isogeny-correspondence point counts and the density rank test.
    Density {
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        d: PathBuf,
        /// Extension degree for the pair search
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Largest Frobenius exponent per coordinate
        #[arg(long, default_value_t = 4)]
        a_max: u32,
        /// Multidegree bound "b1,b2,b3,b4" for the rank test
        #[arg(long, default_value = "1,1,1,1")]
        bound: String,
        /// Compute |S_n| for 0 <= n <= n_max
        #[arg(long, default_value_t = 6)]
        n_max: u64,
        #[arg(long, default_value = "json")]
        out: OutFormat,
    },
    /// Run a theorem-verification suite and report pass/fail per check.
    Verify {
        /// One of: local, corollary, global-z, height, ss, bezout, density, all
        suite: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, clap::ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SsMethodArg {
    Both,
    Bruteforce,
    Hasse,
}

#[derive(Serialize)]
struct Report<C: Serialize, R: Serialize> {
    command: &'static str,
    version: &'static str,
    config: C,
    result: R,
}

fn emit<C: Serialize, R: Serialize>(command: &'static str, config: C, result: R) {
    let rep = Report { command, version: env!("CARGO_PKG_VERSION"), config, result };
    println!("{}", serde_json::to_string_pretty(&rep).expect("report serialization"));
}

/// Input or usage problem: exit code 2.
struct InputError(String);

macro_rules! input_error_from {
    ($($t:ty),*) => {
        $(impl From<$t> for InputError {
            fn from(e: $t) -> Self {
                InputError(e.to_string())
            }
        })*
    };
}

input_error_from!(
    frobint::ffield::FieldError,
    frobint::parser::ParseError,
    frobint::pseries::SeriesError,
    frobint::localint::LocalIntError,
    frobint::surface::SurfaceError,
    frobint::sslocus::SSError,
    frobint::density::DensityError,
    std::num::ParseIntError
);

fn parse_axis(axis: u8) -> Result<Axis, InputError> {
    match axis {
        1 => Ok(Axis::T1),
        2 => Ok(Axis::T2),
        other => Err(InputError(format!("axis must be 1 or 2, got {other}"))),
    }
}

fn parse_branch(
    ctx: &FieldCtx,
    src: &str,
    prec: Option<usize>,
) -> Result<BranchParam, InputError> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != 2 {
        return Err(InputError(format!("branch must be 'alpha1,alpha2', got '{src}'")));
    }
    let mut comps = Vec::new();
    for part in parts {
        let poly = parse_unipoly(part.trim(), ctx, "u")?;
        let deg = poly.degree().unwrap_or(0);
        let coeffs = (0..=deg).map(|i| poly.get(i)).collect();
        let mut s = TruncSeries1::poly(coeffs);
        if let Some(n) = prec {
            s = s.truncate(n);
        }
        comps.push(s);
    }
    let a2 = comps.pop().unwrap();
    let a1 = comps.pop().unwrap();
    Ok(BranchParam::new(a1, a2)?)
}

fn parse_n_range(src: &str) -> Result<Vec<u64>, InputError> {
    if let Some((lo, hi)) = src.split_once("..") {
        let lo: u64 = lo.trim().parse()?;
        let hi: u64 = hi.trim().parse()?;
        if hi < lo {
            return Err(InputError(format!("empty twist range '{src}'")));
        }
        Ok((lo..=hi).collect())
    } else {
        Ok(vec![src.trim().parse()?])
    }
}

#[derive(serde::Deserialize)]
struct CurveFile {
    p: u64,
    #[serde(default = "one")]
    k: usize,
    poly: String,
}

fn one() -> usize {
    1
}

fn load_curve(path: &PathBuf) -> Result<(FieldCtx, GlobalCurve, String), InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let cf: CurveFile = serde_json::from_str(&text)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let ctx = make_field(cf.p, cf.k)?;
    let f = parse_series2(&cf.poly, &ctx, ["x1", "x2"])?;
    let curve = GlobalCurve::new(f)?;
    Ok((ctx, curve, cf.poly))
}

fn load_z(ctx: &FieldCtx) -> Result<NonOrdDivisor, InputError> {
    Ok(NonOrdDivisor::new(ss_bruteforce(ctx.p())?)?)
}

fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, InputError> {
    match cmd {
        Cmd::Local { f, branch, p, k, axis, n, prec } => {
            let ctx = make_field(p, k)?;
            let axis = parse_axis(axis)?;
            let germ = CurveGerm::new(parse_series2(&f, &ctx, ["t1", "t2"])?)?;
            let beta = parse_branch(&ctx, &branch, prec)?;
            let m = twisted_branch_intersection(&ctx, &germ, axis, n, &beta)?;
            #[derive(Serialize)]
            struct Cfg {
                f: String,
                branch: String,
                p: u64,
                k: usize,
                axis: Axis,
                n: u64,
            }
            emit("local", Cfg { f, branch, p, k, axis, n }, m);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::TwistSeq { f, branch, axis, n, p, k, out } => {
            let ctx = make_field(p, k)?;
            let axis = parse_axis(axis)?;
            let germ = CurveGerm::new(parse_series2(&f, &ctx, ["t1", "t2"])?)?;
            let beta = parse_branch(&ctx, &branch, None)?;
            let n_list = parse_n_range(&n)?;
            let rep = twisted_intersection_sequence(&ctx, &germ, &beta, axis, &n_list)?;
            if out == OutFormat::Csv {
                println!("n,value,precision_used");
                for e in &rep.entries {
                    let prec = if e.precision_used == frobint::pseries::EXACT {
                        "exact".to_string()
                    } else {
                        e.precision_used.to_string()
                    };
                    println!("{},{},{}", e.n, e.value, prec);
                }
            } else {
                #[derive(Serialize)]
                struct Cfg {
                    f: String,
                    branch: String,
                    p: u64,
                    k: usize,
                    n: String,
                }
                emit("twist-seq", Cfg { f, branch, p, k, n }, rep);
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Oracle { f, g, p, k } => {
            let ctx = make_field(p, k)?;
            let fs = parse_series2(&f, &ctx, ["t1", "t2"])?;
            let gs = parse_series2(&g, &ctx, ["t1", "t2"])?;
            let m = local_mult_oracle(&ctx, &fs, &gs, ORACLE_N_MAX)?;
            #[derive(Serialize)]
            struct Cfg {
                f: String,
                g: String,
                p: u64,
                k: usize,
            }
            emit("oracle", Cfg { f, g, p, k }, m);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Global { c, d, m_max, out } => {
            let (ctx, cc, cpoly) = load_curve(&c)?;
            let (ctx_d, dd, dpoly) = load_curve(&d)?;
            if ctx_d.p() != ctx.p() || ctx_d.k() != ctx.k() {
                return Err(InputError("curve files over different fields".into()));
            }
            let rep = sum_of_local_mults(&ctx, &cc, &dd, m_max)?;
            if out == OutFormat::Csv {
                println!("chart,degree,x1,x2,local_mult,contribution");
                for pt in &rep.points {
                    println!(
                        "{},{},{},{},{},{}",
                        serde_json::to_value(pt.chart).unwrap().as_str().unwrap(),
                        pt.degree,
                        pt.x1,
                        pt.x2,
                        pt.local_mult,
                        pt.contribution
                    );
                }
            } else {
                #[derive(Serialize)]
                struct Cfg {
                    c: String,
                    d: String,
                    p: u64,
                    k: usize,
                    m_max: usize,
                }
                emit(
                    "global",
                    Cfg { c: cpoly, d: dpoly, p: ctx.p(), k: ctx.k(), m_max },
                    rep,
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ZIntersect { c, axis, n_max, out } => {
            let (ctx, cc, cpoly) = load_curve(&c)?;
            let axis = parse_axis(axis)?;
            let z = load_z(&ctx)?;
            let mut records = Vec::new();
            for n in 0..=n_max {
                records.push(intersect_with_z(&ctx, &cc, &z, axis, n)?);
            }
            if out == OutFormat::Csv {
                println!("n,cz1,cz2,total,closed_form,identity_holds");
                for r in &records {
                    println!(
                        "{},{},{},{},{},{}",
                        r.n, r.cz1, r.cz2, r.total, r.closed_form, r.identity_holds
                    );
                }
            } else {
                #[derive(Serialize)]
                struct Cfg {
                    c: String,
                    p: u64,
                    k: usize,
                    axis: Axis,
                    n_max: u64,
                }
                emit(
                    "z-intersect",
                    Cfg { c: cpoly, p: ctx.p(), k: ctx.k(), axis, n_max },
                    records,
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Height { c, axis, n_max, out } => {
            let (ctx, cc, cpoly) = load_curve(&c)?;
            let axis = parse_axis(axis)?;
            let z = load_z(&ctx)?;
            let records = faltings_height_series(&ctx, &cc, &z, axis, n_max)?;
            if out == OutFormat::Csv {
                println!("n,cz1,cz2,h_num,h_den,ratio_to_prev,ratio_close,past_threshold");
                for r in &records {
                    println!(
                        "{},{},{},{},{},{},{},{}",
                        r.n,
                        r.cz1,
                        r.cz2,
                        r.h.num,
                        r.h.den,
                        r.ratio_to_prev.map(|x| format!("{:.6}", x.to_f64())).unwrap_or_default(),
                        r.ratio_close.map(|b| b.to_string()).unwrap_or_default(),
                        r.past_threshold.map(|b| b.to_string()).unwrap_or_default()
                    );
                }
            } else {
                #[derive(Serialize)]
                struct Cfg {
                    c: String,
                    p: u64,
                    k: usize,
                    axis: Axis,
                    n_max: u64,
                }
                emit("height", Cfg { c: cpoly, p: ctx.p(), k: ctx.k(), axis, n_max }, records);
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Ss { p, method } => {
            #[derive(Serialize)]
            struct Cfg {
                p: u64,
                method: &'static str,
            }
            #[derive(Serialize)]
            struct SsOut {
                js: Vec<String>,
                count: usize,
            }
            fn locus_out(l: &SSLocus) -> SsOut {
                SsOut { js: l.js_pretty(), count: l.js.len() }
            }
            match method {
                SsMethodArg::Bruteforce => {
                    let l = ss_bruteforce(p)?;
                    emit("ss", Cfg { p, method: "bruteforce" }, locus_out(&l));
                    Ok(ExitCode::SUCCESS)
                }
                SsMethodArg::Hasse => {
                    let l = ss_hasse(p)?;
                    emit("ss", Cfg { p, method: "hasse" }, locus_out(&l));
                    Ok(ExitCode::SUCCESS)
                }
                SsMethodArg::Both => {
                    let (bf, ha, agree) = ss_both(p)?;
                    #[derive(Serialize)]
                    struct BothOut {
                        bruteforce: SsOut,
                        hasse: SsOut,
                        agreement: bool,
                    }
                    emit(
                        "ss",
                        Cfg { p, method: "both" },
                        BothOut { bruteforce: locus_out(&bf), hasse: locus_out(&ha), agreement: agree },
                    );
                    Ok(if agree { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
            }
        }
        Cmd::Density { c, d, m, a_max, bound, n_max, out } => {
            let (ctx, cc, cpoly) = load_curve(&c)?;
            let (ctx_d, dd, dpoly) = load_curve(&d)?;
            if ctx_d.p() != ctx.p() || ctx_d.k() != ctx.k() {
                return Err(InputError("curve files over different fields".into()));
            }
            let bvec: Vec<u32> = bound
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<_, _>>()?;
            let barr: [u32; 4] = bvec
                .try_into()
                .map_err(|_| InputError("bound must have exactly four entries".into()))?;
            let mut sn = Vec::new();
            for n in 0..=n_max {
                match frobint::density::s_n_count(&ctx, &cc, &dd, Axis::T1, n, m.max(6)) {
                    Ok(rep) => sn.push(rep),
                    Err(e) => return Err(InputError(format!("|S_{n}|: {e}"))),
                }
            }
            let pairs = frobint::density::isogenous_pairs(&ctx, &cc, &dd, m, a_max)?;
            #[derive(Serialize)]
            struct PairRow {
                x1: String,
                x2: String,
                y1: String,
                y2: String,
                a1: u32,
                a2: u32,
                forward: bool,
            }
            let ctxm = &pairs.ctxm;
            let rows: Vec<PairRow> = pairs
                .pairs
                .iter()
                .map(|pr| PairRow {
                    x1: ctxm.fmt_elem(pr.x.0),
                    x2: ctxm.fmt_elem(pr.x.1),
                    y1: ctxm.fmt_elem(pr.y.0),
                    y2: ctxm.fmt_elem(pr.y.1),
                    a1: pr.a1,
                    a2: pr.a2,
                    forward: pr.forward,
                })
                .collect();
            if out == OutFormat::Csv {
                println!("x1,x2,y1,y2,a1,a2,forward");
                for r in &rows {
                    println!(
                        "{}",
                        csv_line(&[
                            r.x1.clone(),
                            r.x2.clone(),
                            r.y1.clone(),
                            r.y2.clone(),
                            r.a1.to_string(),
                            r.a2.to_string(),
                            r.forward.to_string(),
                        ])
                    );
                }
                return Ok(ExitCode::SUCCESS);
            }
            let rank_test = frobint::density::density_rank_test(&pairs, barr);
            let (rank_test, rank_test_error) = match rank_test {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            #[derive(Serialize)]
            struct DensityRecord {
                sn: Vec<frobint::density::SnReport>,
                pair_count: usize,
                pairs: Vec<PairRow>,
                rank_test: Option<frobint::density::RankTestReport>,
                rank_test_error: Option<String>,
            }
            #[derive(Serialize)]
            struct Cfg {
                c: String,
                d: String,
                p: u64,
                k: usize,
                m: usize,
                a_max: u32,
                bound: [u32; 4],
                n_max: u64,
            }
            emit(
                "density",
                Cfg {
                    c: cpoly,
                    d: dpoly,
                    p: ctx.p(),
                    k: ctx.k(),
                    m,
                    a_max,
                    bound: barr,
                    n_max,
                },
                DensityRecord {
                    sn,
                    pair_count: rows.len(),
                    pairs: rows,
                    rank_test,
                    rank_test_error,
                },
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { suite, p, seed } => {
            let cfg = RunConfig { p, seed };
            let rep = run_suite(&suite, &cfg).map_err(InputError)?;
            println!("{}", serde_json::to_string_pretty(&rep).expect("report serialization"));
            for c in &rep.checks {
                eprintln!(
                    "{} {} (expected {}, actual {})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.expected,
                    c.actual
                );
            }
            Ok(if rep.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
