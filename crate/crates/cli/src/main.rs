//! `smaass`: command-line front end for the siegel-maass library.
//!
//! Exit codes: 0 success, 1 numerical failure (or a failed acceptance
//! check), 2 a result computed outside its convergence precondition, 64 a
//! usage error.

mod config;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use config::{Format, RunConfig};
use siegel_maass::elliptic_poincare::{eval_elliptic_poincare, eval_elliptic_poincare_unchecked, spectral_pairing_check};
use siegel_maass::exact_terms::{lower_n, multiply, WeightedFunction};
use siegel_maass::gk_support::{
    canonical_sl2_support, contains_scalar_ktype, tensor_ktype_support, tensor_sl2, KTypeSupport, Sl2Support,
};
use siegel_maass::poincare2::{
    eval_p2, kst_y0_search, lowering_depth_probe, nonvanishing_scan, P2Params, ProbeTarget,
};
use siegel_maass::siegel_kernel::{
    apply_omega, fit_shimura_bound, h_integral, psi, PsiEvaluator, SiegelPoint,
};
use siegel_maass::sp2_cosets::enumerate_delta_cosets;
use siegel_maass::{verify, Error};

const EXIT_NUMERIC: u8 = 1;
const EXIT_ADVISORY: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "smaass", version, about = "Siegel-Maass forms, Poincare series and K-type supports")]
struct Cli {
    /// TOML run configuration (precision, quadrature, heights, format, seed).
    #[arg(long, global = true, env = "SMAASS_CONFIG")]
    config: Option<PathBuf>,
    /// Output format; overrides the config file.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Number of worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for randomized samples; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the (x, y) series behind a scan to this CSV file.
    #[arg(long, global = true, value_name = "PATH")]
    emit_plot_data: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Elliptic Fourier terms and Poincare series.
    #[command(subcommand)]
    Elliptic(EllipticCmd),
    /// Weight supports of SL2 modules.
    #[command(subcommand)]
    Sl2(Sl2Cmd),
    /// U(2) K-type supports.
    #[command(subcommand)]
    Ktype(KtypeCmd),
    /// Degree-2 kernels: h, Psi, Omega.
    #[command(subcommand)]
    Siegel(SiegelCmd),
    /// Coset representatives in Sp4(Z).
    #[command(subcommand)]
    Sp2(Sp2Cmd),
    /// The degree-2 Poincare series.
    #[command(subcommand)]
    P2(P2Cmd),
    /// Run the acceptance checks and print a pass/fail table.
    VerifyAll {
        /// Only the exact and combinatorial checks.
        #[arg(long)]
        quick: bool,
        /// Run only the listed checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum EllipticCmd {
    /// Truncated Poincare series of a product of terms.
    Eval {
        /// Factor of the seed, e.g. phi:10:0:1, psi:2:1, phi_tilde:-2:1, psi_tilde:-2:-1.
        #[arg(long = "term", required = true, allow_hyphen_values = true)]
        terms: Vec<String>,
        /// Point `x,y` in the upper half plane.
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long)]
        height: Option<i64>,
        /// Evaluate even when the summands do not decay fast enough.
        #[arg(long)]
        unchecked: bool,
    },
    /// Exact `L^n` of a product of terms, as canonical JSON.
    Lower {
        #[arg(long = "term", required = true, allow_hyphen_values = true)]
        terms: Vec<String>,
        #[arg(long, default_value_t = 1)]
        times: u32,
    },
    /// Quadrature of the spectral pairing integral against its closed form.
    SpectralCheck {
        #[arg(short = 'k', allow_hyphen_values = true)]
        k: i64,
        #[arg(short = 'l', allow_hyphen_values = true)]
        l: i64,
        #[arg(short = 's')]
        s: f64,
        #[arg(short = 'n', allow_hyphen_values = true)]
        n: i64,
        #[arg(short = 'm', allow_hyphen_values = true)]
        m: i64,
    },
}

#[derive(Subcommand, Debug)]
enum Sl2Cmd {
    /// Support diagram of a tensor product of canonical supports.
    Diagram {
        /// Factor `kind:k[:d]` with kind one of phi_kd, psi, phi_tilde, psi_tilde.
        #[arg(long = "factor", required = true, allow_hyphen_values = true)]
        factors: Vec<String>,
        /// Rendered weight window `lo,hi`.
        #[arg(long, default_value = "-12,24", allow_hyphen_values = true)]
        window: String,
    },
}

#[derive(Subcommand, Debug)]
enum KtypeCmd {
    /// Tensor product of two K-type supports with walls.
    Tensor {
        /// Occupied K-type `a,b` of the first factor (repeatable).
        #[arg(long = "left", required = true, allow_hyphen_values = true)]
        left: Vec<String>,
        #[arg(long = "right", required = true, allow_hyphen_values = true)]
        right: Vec<String>,
        /// Wall `direction:threshold` of the first factor (repeatable).
        #[arg(long = "left-wall", allow_hyphen_values = true)]
        left_walls: Vec<String>,
        #[arg(long = "right-wall", allow_hyphen_values = true)]
        right_walls: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(short = 'k')]
    k: i64,
    /// Index `m11,m12,m22`.
    #[arg(long, default_value = "1,0,1", allow_hyphen_values = true)]
    t: String,
    /// Point `x11,x12,x22,y11,y12,y22`.
    #[arg(long, default_value = "0,0,0,1,0,1", allow_hyphen_values = true)]
    z: String,
}

#[derive(Subcommand, Debug)]
enum SiegelCmd {
    /// The cone integral h_{alpha,beta}(T;Y).
    HIntegral {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "1,0,1", allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value = "1,0,1", allow_hyphen_values = true)]
        y: String,
    },
    /// Psi_k(T;Z).
    Psi(KernelArgs),
    /// Relative size of Omega_{1/2,1/2-k}(det(Y)^{k-1/2} Psi_k).
    OmegaCheck {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Fitted constants of the bound on det(TY) h_{k+1,1}.
    ShimuraFit {
        #[arg(short = 'k')]
        k: i64,
        #[arg(long, default_value = "1,0,1", allow_hyphen_values = true)]
        t: String,
        /// Grid of eigenvalues, `start:stop:step` or a list; default log-spaced 1e-2..10.
        #[arg(long)]
        ys: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum Sp2Cmd {
    /// Coset representatives with bottom-row entries bounded by the height.
    Cosets {
        #[arg(long)]
        height: Option<i64>,
        /// Print the counts instead of the matrices.
        #[arg(long)]
        count: bool,
    },
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[arg(short = 'k', default_value_t = 4)]
    k: i64,
    #[arg(long, default_value = "1,0,1", allow_hyphen_values = true)]
    t: String,
    #[arg(long = "t-prime", default_value = "1,0,1", allow_hyphen_values = true)]
    t_prime: String,
    #[arg(long)]
    height: Option<i64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Series,
    Bare,
    Holomorphic,
}

#[derive(Subcommand, Debug)]
enum P2Cmd {
    /// P2 at one point, with its strata and tail diagnostics.
    Eval {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(short = 'l')]
        l: i64,
        #[arg(long, default_value = "0,0,0,1.5,0,1.5", allow_hyphen_values = true)]
        z: String,
    },
    /// C=0 and C!=0 strata at iy0*I over a list of weights l.
    Nonvanishing {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, default_value_t = verify::SCAN_Y0)]
        y0: f64,
        #[arg(long, default_value = "8,10,12,14,16,18,20,22,24")]
        ls: String,
    },
    /// Ratios |L^d F| / |F| of the iterated lowering operator.
    DepthProbe {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(short = 'l', default_value_t = 16)]
        l: i64,
        /// Probe point (repeatable); defaults to the acceptance grid.
        #[arg(long = "z", allow_hyphen_values = true)]
        zs: Vec<String>,
        #[arg(long, default_value_t = 4)]
        d_max: u32,
        #[arg(long, value_enum, default_value_t = TargetArg::Series)]
        target: TargetArg,
    },
    /// Smallest grid y0 with |det(C iy0 I + D)| > 1 for every C != 0.
    KstSearch {
        #[arg(long)]
        height: Option<i64>,
        #[arg(long, default_value = "1.05:3:0.05")]
        grid: String,
    },
}

/// What a subcommand produced.
struct Report {
    json: Value,
    /// Header and rows for CSV.
    table: Option<(Vec<String>, Vec<Vec<String>>)>,
    text: Option<String>,
    /// Header and rows of the (x, y) plot series.
    plot: Option<(Vec<String>, Vec<Vec<String>>)>,
    /// Exit with the advisory code after printing.
    advisory: bool,
    /// Exit with the numeric-failure code after printing.
    failed: bool,
}

impl Report {
    fn json(v: Value) -> Self {
        Self {
            json: v,
            table: None,
            text: None,
            plot: None,
            advisory: false,
            failed: false,
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<Report, Failure>;

fn usage<T>(r: Result<T, String>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize to JSON")
}

/// Shortest round-trip scientific form, for CSV cells.
fn num(x: f64) -> String {
    format!("{x:e}")
}

fn cols(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn product(terms: &[String]) -> Result<WeightedFunction, Failure> {
    let mut f = WeightedFunction::unit();
    for t in terms {
        f = multiply(&f, &usage(parse::term(t))?)?;
    }
    Ok(f)
}

fn elliptic(cmd: EllipticCmd, cfg: &RunConfig) -> Out {
    match cmd {
        EllipticCmd::Eval {
            terms,
            tau,
            height,
            unchecked,
        } => {
            let f = product(&terms)?;
            let tau = usage(parse::tau(&tau))?;
            let h = height.unwrap_or(cfg.heights.elliptic);
            let v = if unchecked {
                eval_elliptic_poincare_unchecked(&f, tau, h, &cfg.precision)?
            } else {
                eval_elliptic_poincare(&f, tau, h, &cfg.precision)?
            };
            Ok(Report::json(json!({
                "value": v.value,
                "tail": v.tail,
                "tail_is_heuristic": v.tail_is_heuristic,
                "abs_sum": v.abs_sum,
                "n_cosets": v.n_cosets,
                "decay_exponent": v.decay_exponent,
                "params": {"terms": terms, "tau": tau, "height": h, "weight": f.weight},
            })))
        }
        EllipticCmd::Lower { terms, times } => {
            let f = product(&terms)?;
            let g = lower_n(&f, times);
            Ok(Report::json(json!({"weight": g.weight, "terms": g.expr.to_json()})))
        }
        EllipticCmd::SpectralCheck { k, l, s, n, m } => {
            let c = spectral_pairing_check(k, l, s, n, m, &cfg.precision)?;
            Ok(Report::json(json!({
                "lhs": c.lhs,
                "rhs": c.rhs,
                "rel_err": c.rel_err,
                "lhs_est_error": c.lhs_est_error,
                "params": {"k": k, "l": l, "s": s, "n": n, "m": m},
            })))
        }
    }
}

fn sl2(cmd: Sl2Cmd) -> Out {
    let Sl2Cmd::Diagram { factors, window } = cmd;
    let win = usage(parse::ints(&window))?;
    if win.len() != 2 || win[0] > win[1] {
        return Err(Failure::Usage(format!("window {window:?} is not lo,hi")));
    }
    let mut s: Option<Sl2Support> = None;
    for f in &factors {
        let (kind, k, d) = usage(parse::sl2_factor(f))?;
        let c = canonical_sl2_support(kind, k, d)?;
        s = Some(match s {
            None => c,
            Some(acc) => tensor_sl2(&acc, &c),
        });
    }
    let s = s.expect("at least one factor is required");
    let mut r = Report::json(json!({
        "support": to_json(&s),
        "min_weight": s.min_weight(),
        "max_weight": s.max_weight(),
        "has_lowest_weight": s.has_lowest_weight(),
        "occupied_in_window": s.occupied_in(win[0], win[1]),
    }));
    r.text = Some(s.render(win[0], win[1], s.min_weight()));
    Ok(r)
}

fn ktype(cmd: KtypeCmd) -> Out {
    let KtypeCmd::Tensor {
        left,
        right,
        left_walls,
        right_walls,
    } = cmd;
    let side = |types: &[String], walls: &[String]| -> Result<KTypeSupport, Failure> {
        let ts = types.iter().map(|t| parse::ktype(t)).collect::<Result<Vec<_>, _>>();
        let ws = walls.iter().map(|w| parse::wall(w)).collect::<Result<Vec<_>, _>>();
        Ok(KTypeSupport::from_types(usage(ts)?, usage(ws)?)?)
    };
    let (s1, s2) = (side(&left, &left_walls)?, side(&right, &right_walls)?);
    let out = tensor_ktype_support(&s1, &s2);
    let types: Vec<Value> = out
        .occupied()
        .iter()
        .map(|(t, m)| json!({"a": t.a, "b": t.b, "multiplicity": m}))
        .collect();
    let rows = out
        .occupied()
        .iter()
        .map(|(t, m)| vec![t.a.to_string(), t.b.to_string(), m.to_string()])
        .collect();
    let a_lo = out.occupied().keys().map(|t| t.b).min().unwrap_or(0);
    let a_hi = out.occupied().keys().map(|t| t.a).max().unwrap_or(0);
    let mut r = Report::json(json!({
        "ktypes": types,
        "walls": to_json(&out.walls()),
        "contains_scalar": contains_scalar_ktype(&out),
    }));
    r.table = Some((cols(&["a", "b", "multiplicity"]), rows));
    r.text = Some(out.render((a_lo, a_hi), (a_lo, a_hi)));
    Ok(r)
}

fn siegel(cmd: SiegelCmd, cfg: &RunConfig) -> Out {
    let q = &cfg.quadrature;
    match cmd {
        SiegelCmd::HIntegral { alpha, beta, t, y } => {
            let (t, y) = (usage(parse::sym(&t))?, usage(parse::sym(&y))?);
            let h = h_integral(alpha, beta, &t, &y, q)?;
            Ok(Report::json(json!({
                "value": h.value,
                "est_error": h.est_error,
                "rule": to_json(&h.rule),
                "params": {"alpha": alpha, "beta": beta, "t": t, "y": y},
            })))
        }
        SiegelCmd::Psi(KernelArgs { k, t, z }) => {
            let (t, z) = (usage(parse::sym(&t))?, usage(parse::point(&z))?);
            let v = psi(k, &t, &z, q)?;
            Ok(Report::json(json!({
                "value": v,
                "est_error": v.norm() * q.rel_tol,
                "params": {"k": k, "t": t, "z": z.coords()},
            })))
        }
        SiegelCmd::OmegaCheck { kernel, step } => {
            let KernelArgs { k, t, z } = kernel;
            let (t, z) = (usage(parse::sym(&t))?, usage(parse::point(&z))?);
            let ev = PsiEvaluator::at(k, t, &z, q)?;
            let e = k as f64 - 0.5;
            let g = |w: &SiegelPoint| Ok(w.y.det().powf(e) * ev.eval(w)?);
            let om = apply_omega(0.5, 0.5 - k as f64, &g, &z, step)?;
            let base = g(&z)?.norm();
            Ok(Report::json(json!({
                "value": om.value.norm() / base,
                "est_error": om.est_error / base,
                "omega": to_json(&om.value),
                "params": {"k": k, "t": t, "z": z.coords(), "step": step},
            })))
        }
        SiegelCmd::ShimuraFit { k, t, ys } => {
            let t = usage(parse::sym(&t))?;
            let ys = match ys {
                Some(s) => usage(parse::grid(&s))?,
                None => (0..=12).map(|i| 10f64.powf(-2.0 + 0.25 * i as f64)).collect(),
            };
            let fit = fit_shimura_bound(k, &t, &ys, q)?;
            Ok(Report::json(json!({"fit": to_json(&fit), "params": {"k": k, "t": t, "ys": ys}})))
        }
    }
}

fn sp2(cmd: Sp2Cmd, cfg: &RunConfig) -> Out {
    let Sp2Cmd::Cosets { height, count } = cmd;
    let h = height.unwrap_or(cfg.heights.sp2);
    let reps = enumerate_delta_cosets(h)?;
    let c_zero = reps.iter().filter(|g| g.c_is_zero()).count();
    if count {
        return Ok(Report::json(json!({"height": h, "cosets": reps.len(), "c_zero": c_zero})));
    }
    let mats: Vec<[[i64; 4]; 4]> = reps.iter().map(|g| g.to_rows()).collect();
    let mut r = Report::json(to_json(&mats));
    r.table = Some((
        (0..16).map(|i| format!("m{}{}", i / 4 + 1, i % 4 + 1)).collect(),
        mats.iter()
            .map(|m| m.iter().flatten().map(|x| x.to_string()).collect())
            .collect(),
    ));
    Ok(r)
}

fn series_params(s: &SeriesArgs, l: i64, cfg: &RunConfig) -> Result<P2Params, Failure> {
    let t = usage(parse::sym(&s.t))?;
    let tp = usage(parse::sym(&s.t_prime))?;
    let mut p = P2Params::new(s.k, l, t, tp, s.height.unwrap_or(cfg.heights.p2));
    p.quadrature.max_depth = cfg.quadrature.max_depth;
    p.quadrature.boundary_exponent_guard = cfg.quadrature.boundary_exponent_guard;
    Ok(p)
}

fn p2(cmd: P2Cmd, cfg: &RunConfig) -> Out {
    match cmd {
        P2Cmd::Eval { series, l, z } => {
            let p = series_params(&series, l, cfg)?;
            let z = usage(parse::point(&z))?;
            let v = eval_p2(&p, &z)?;
            let mut r = Report::json(to_json(&v));
            r.advisory = v.tail.advisory.is_some();
            Ok(r)
        }
        P2Cmd::Nonvanishing { series, y0, ls } => {
            let ls = usage(parse::ints(&ls))?;
            let p = series_params(&series, *ls.iter().min().unwrap_or(&0), cfg)?;
            let tab = nonvanishing_scan(p.k, p.t, p.t_prime, y0, &ls, p.height, &p.quadrature)?;
            let rows: Vec<Vec<String>> = tab
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.l.to_string(),
                        num(r.c_zero.re),
                        num(r.c_zero.im),
                        num(r.c_nonzero.re),
                        num(r.c_nonzero.im),
                        num(r.total.re),
                        num(r.total.im),
                        num(r.quadrature_error),
                        num(r.shell_majorant),
                    ]
                })
                .collect();
            let plot = tab
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.l.to_string(),
                        num(r.c_zero.norm()),
                        num(r.c_nonzero.norm()),
                        num(r.total.norm()),
                    ]
                })
                .collect();
            let mut r = Report::json(to_json(&tab));
            r.advisory = tab.rows.iter().any(|r| r.advisory.is_some());
            r.table = Some((
                cols(&[
                    "l", "c_zero_re", "c_zero_im", "c_nonzero_re", "c_nonzero_im", "total_re", "total_im",
                    "quadrature_error", "shell_majorant",
                ]),
                rows,
            ));
            r.plot = Some((cols(&["l", "abs_c_zero", "abs_c_nonzero", "abs_total"]), plot));
            Ok(r)
        }
        P2Cmd::DepthProbe {
            series,
            l,
            zs,
            d_max,
            target,
        } => {
            let p = series_params(&series, l, cfg)?;
            let grid = if zs.is_empty() {
                verify::probe_grid()?
            } else {
                usage(zs.iter().map(|z| parse::point(z)).collect())?
            };
            let target = match target {
                TargetArg::Series => ProbeTarget::Series,
                TargetArg::Bare => ProbeTarget::BareProduct,
                TargetArg::Holomorphic => ProbeTarget::HolomorphicSeries,
            };
            let pr = lowering_depth_probe(&p, &grid, d_max, target)?;
            let rows: Vec<Vec<String>> = (0..pr.d.len())
                .map(|i| {
                    vec![
                        pr.d[i].to_string(),
                        num(pr.ratios[i]),
                        num(pr.tail[i]),
                        num(pr.quadrature[i]),
                        num(pr.noise_floor[i]),
                    ]
                })
                .collect();
            let mut r = Report::json(json!({
                "probe": to_json(&pr),
                "strictly_decreasing": pr.strictly_decreasing(),
                "above_10x_floor": pr.stays_above(10.0),
            }));
            r.table = Some((cols(&["d", "ratio", "tail", "quadrature", "noise_floor"]), rows.clone()));
            r.plot = Some((
                cols(&["d", "ratio", "noise_floor"]),
                rows.iter().map(|r| vec![r[0].clone(), r[1].clone(), r[4].clone()]).collect(),
            ));
            Ok(r)
        }
        P2Cmd::KstSearch { height, grid } => {
            let h = height.unwrap_or(3);
            let grid = usage(parse::grid(&grid))?;
            let cert = kst_y0_search(h, &grid)?;
            let rows: Vec<Vec<String>> = cert.scan.iter().map(|(y, m)| vec![num(*y), num(*m)]).collect();
            let mut r = Report::json(to_json(&cert));
            r.table = Some((cols(&["y", "min_abs_det"]), rows.clone()));
            r.plot = Some((cols(&["y", "min_abs_det"]), rows));
            Ok(r)
        }
    }
}

fn verify_all(quick: bool, only: Vec<u32>) -> Out {
    let outcomes = if only.is_empty() {
        verify::run_all(quick)
    } else {
        only.iter().map(|&i| verify::run_one(i)).collect::<Result<_, _>>()?
    };
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&o.line());
        text.push('\n');
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    text.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
    let rows = outcomes
        .iter()
        .map(|o| {
            vec![
                o.id.to_string(),
                o.name.clone(),
                o.passed.to_string(),
                num(o.metric),
                num(o.tolerance),
                num(o.seconds),
                o.detail.clone(),
            ]
        })
        .collect();
    let mut r = Report::json(to_json(&outcomes));
    r.failed = passed != outcomes.len();
    r.text = Some(text);
    r.table = Some((cols(&["id", "name", "passed", "metric", "tolerance", "seconds", "detail"]), rows));
    Ok(r)
}

fn write_csv(w: impl Write, header: &[String], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Failure::Io(e.to_string());
    out.write_record(header).map_err(io)?;
    for r in rows {
        out.write_record(r).map_err(io)?;
    }
    out.flush().map_err(|e| Failure::Io(e.to_string()))
}

/// A closed pipe downstream (e.g. `| head`) ends the output quietly.
fn quiet_pipe(r: std::io::Result<()>) -> Result<(), Failure> {
    match r {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Io(e.to_string())),
        _ => Ok(()),
    }
}

/// One CSV row from a JSON object: nested keys joined with `.`, arrays of
/// scalars joined with `;`.
fn json_row(v: &Value) -> (Vec<String>, Vec<Vec<String>>) {
    fn walk(prefix: &str, v: &Value, h: &mut Vec<String>, row: &mut Vec<String>) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&key(k), x, h, row)),
            _ => {
                h.push(prefix.to_string());
                row.push(scalar(v));
            }
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Number(n) => n.as_f64().filter(|_| n.is_f64()).map_or_else(|| n.to_string(), num),
            Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(";"),
            other => other.to_string(),
        }
    }
    let (mut h, mut row) = (Vec::new(), Vec::new());
    walk("", v, &mut h, &mut row);
    if h == [""] {
        h[0] = "value".into();
    }
    (h, vec![row])
}

fn emit(r: &Report, format: Format, plot: Option<&PathBuf>) -> Result<(), Failure> {
    let mut stdout = std::io::stdout().lock();
    let fallback;
    let table = match (&r.table, format) {
        (None, Format::Csv) => {
            fallback = json_row(&r.json);
            Some(&fallback)
        }
        (t, _) => t.as_ref(),
    };
    match (format, table, &r.text) {
        (Format::Csv, Some((h, rows)), _) => match write_csv(&mut stdout, h, rows) {
            Err(Failure::Io(m)) if m.contains("Broken pipe") => {}
            other => other?,
        },
        (Format::Text, _, Some(t)) => quiet_pipe(stdout.write_all(t.as_bytes()))?,
        _ => {
            let j = serde_json::to_string_pretty(&r.json).expect("JSON values print");
            quiet_pipe(writeln!(stdout, "{j}"))?
        }
    }
    if let Some(path) = plot {
        match &r.plot {
            Some((h, rows)) => {
                let f = std::fs::File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                write_csv(f, h, rows)?;
            }
            None => eprintln!("note: this subcommand has no plot series; {} not written", path.display()),
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => EXIT_USAGE,
        Error::Convergence(_) => EXIT_ADVISORY,
        _ => EXIT_NUMERIC,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cfg.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set worker count: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let res = match cli.command {
        Command::Elliptic(c) => elliptic(c, &cfg),
        Command::Sl2(c) => sl2(c),
        Command::Ktype(c) => ktype(c),
        Command::Siegel(c) => siegel(c, &cfg),
        Command::Sp2(c) => sp2(c, &cfg),
        Command::P2(c) => p2(c, &cfg),
        Command::VerifyAll { quick, only } => verify_all(quick, only),
    };
    let fail = |f: Failure| -> ExitCode {
        match f {
            Failure::Usage(m) => {
                eprintln!("error: {m}");
                ExitCode::from(EXIT_USAGE)
            }
            Failure::Lib(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code(&e))
            }
            Failure::Io(m) => {
                eprintln!("error: {m}");
                ExitCode::from(EXIT_NUMERIC)
            }
        }
    };
    match res {
        Ok(r) => {
            if let Err(f) = emit(&r, cfg.format, cli.emit_plot_data.as_ref()) {
                return fail(f);
            }
            if r.failed {
                ExitCode::from(EXIT_NUMERIC)
            } else if r.advisory {
                ExitCode::from(EXIT_ADVISORY)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => fail(f),
    }
}
