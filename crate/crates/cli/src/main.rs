use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aat::aat::{
    discover_aat, discover_search, doubling_chain, koebe_normalize, schwarz_reduce, verify_aat, SchwarzOptions, VerifyOptions,
};
use aat::algebroid::{monodromy, monodromy_at_infinity, monodromy_product, AlgebroidCurve, TrackOptions};
use aat::elimination::discriminant;
use aat::function::FunctionSpec;
use aat::period::{find_roots, forsyth_fit, verify_period, weierstrass_period, Classification, PeriodOptions, Rect, RootOptions};
use aat::spec::{parse_spec, Spec};
use aat::{Error, ExecMode, MultiPoly};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "atl", version, about = "Algebraic addition theorems, algebroid branches and periods")]
struct Cli {
    /// Series order (default 16; 24 for `reduce schwarz`; must be at least 8)
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Numeric tolerance, in (0, 1e-3)
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// RNG seed, decimal or 0x-hex; the ATL_SEED environment variable overrides it
    #[arg(long, global = true, default_value = "0x5745494552", value_parser = parse_seed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest degree bound tried by searches
    #[arg(long = "degree-cap", global = true, default_value_t = 4)]
    degree_cap: u32,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Addition theorems
    #[command(subcommand)]
    Aat(AatCmd),
    /// Algebroid curves p0(u) z^n + ... + pn(u)
    #[command(subcommand)]
    Algebroid(AlgCmd),
    /// Period detection
    #[command(subcommand)]
    Period(PeriodCmd),
    /// Elimination chains and reductions
    #[command(subcommand)]
    Reduce(ReduceCmd),
}

#[derive(Subcommand)]
enum AatCmd {
    /// Check G(f(u), f(v), f(u+v)) = 0
    Verify {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long = "fn")]
        func: PathBuf,
    },
    /// Find polynomials G with G(f(u), f(v), f(u+v)) = 0
    Discover {
        #[arg(long = "fn")]
        func: PathBuf,
        /// Degree bounds in U, V, W; without it bounds (d, d, d) are tried up to --degree-cap
        #[arg(long, value_parser = parse_bounds)]
        bounds: Option<(u32, u32, u32)>,
    },
}

#[derive(Subcommand)]
enum AlgCmd {
    /// Puiseux branches at a point (re[,im] or `infinity`)
    Expand {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        center: String,
    },
    /// Poles, branch points and cycle structure
    Singular {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Branch permutations of loops from a base point
    Monodromy {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        base: Complex64,
        /// A singular location or `infinity`; without it every loop and their product
        #[arg(long)]
        around: Option<String>,
    },
}

#[derive(Subcommand)]
enum PeriodCmd {
    /// Period candidates from an addition theorem, or roots of f = C with --target
    Find {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long)]
        poly: Option<PathBuf>,
        /// Solve f(v) = target instead and fit the roots to progressions
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        target: Option<Complex64>,
        /// Search rectangle x0,x1,y0,y1
        #[arg(long, value_parser = parse_rect, default_value = "-4,4,-4,4", allow_hyphen_values = true)]
        region: Rect,
        #[arg(long, default_value_t = 4)]
        want: usize,
    },
    /// max |f(u + omega) - f(u)| over sample points
    Verify {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        omega: Complex64,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// GCD reduction of G against its shifted copies
    Schwarz {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long = "fn")]
        func: PathBuf,
        /// Explicit shift (repeatable), re[,im]
        #[arg(long = "shift", value_parser = parse_complex, allow_hyphen_values = true)]
        shifts: Vec<Complex64>,
    },
    /// Addition theorem for P1 from one among P1(x), P2(y), P3(x+y)
    Koebe {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        p1: PathBuf,
        #[arg(long)]
        p2: PathBuf,
        #[arg(long)]
        p3: PathBuf,
    },
    /// Doubling chain for f(z, x) with z = phi(u/2), x = phi(u)
    Double {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Function whose series checks the result
        #[arg(long = "fn")]
        func: PathBuf,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    }
    .map_err(|e| e.to_string())
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{}`: {}", t, e));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err("expected re or re,im".into()),
    }
}

fn parse_bounds(s: &str) -> Result<(u32, u32, u32), String> {
    let v: Vec<u32> = s.split(',').map(|t| t.trim().parse::<u32>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err("expected three bounds du,dv,dw".into()),
    }
}

fn parse_rect(s: &str) -> Result<Rect, String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x0, x1, y0, y1] if x0 < x1 && y0 < y1 => Ok(Rect::new((*x0, *x1), (*y0, *y1))),
        _ => Err("expected x0,x1,y0,y1 with x0 < x1 and y0 < y1".into()),
    }
}

enum Fail {
    /// Bad input: exit 2.
    Usage(Error),
    /// Engine failure: exit 1.
    Engine(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Engine(e)
    }
}

/// A report and whether it counts as success.
struct Outcome {
    report: Value,
    ok: bool,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn load(path: &Path) -> Result<Spec, Fail> {
    parse_spec(path).map_err(Fail::Usage)
}

fn load_fn(path: &Path) -> Result<FunctionSpec, Fail> {
    match load(path)? {
        Spec::Function(f) => Ok(f),
        s => Err(Fail::Usage(Error::Schema { line: 1, column: 1, msg: format!("{}: expected a function spec, found a {}", path.display(), s.kind()) })),
    }
}

fn load_poly(path: &Path, vars: &[&str]) -> Result<MultiPoly, Fail> {
    match load(path)? {
        Spec::Poly(p) => p.with_vars(vars).map_err(Fail::Usage),
        s => Err(Fail::Usage(Error::Schema { line: 1, column: 1, msg: format!("{}: expected a poly, found a {}", path.display(), s.kind()) })),
    }
}

fn load_curve(path: &Path) -> Result<AlgebroidCurve, Fail> {
    match load(path)? {
        Spec::Curve(c) => Ok(c),
        s => Err(Fail::Usage(Error::Schema { line: 1, column: 1, msg: format!("{}: expected a curve, found a {}", path.display(), s.kind()) })),
    }
}

struct Config {
    order: usize,
    tol: f64,
    seed: u64,
    degree_cap: u32,
}

const UVW: [&str; 3] = ["U", "V", "W"];

fn run(cmd: &Cmd, cfg: &Config) -> Result<Outcome, Fail> {
    let order = cfg.order;
    match cmd {
        Cmd::Aat(AatCmd::Verify { poly, func }) => {
            let g = load_poly(poly, &UVW)?;
            let f = load_fn(func)?;
            let cert = verify_aat(&g, &f, order, &VerifyOptions { tol: cfg.tol, seed: cfg.seed, samples: 50 })?;
            Ok(Outcome { ok: cert.verified(), report: to_value(&cert) })
        }
        Cmd::Aat(AatCmd::Discover { func, bounds }) => {
            let f = load_fn(func)?;
            let d = match bounds {
                Some(b) => discover_aat(&f, *b, order, ExecMode::best())?,
                None => discover_search(&f, cfg.degree_cap, order, ExecMode::best())?,
            };
            let mut report = to_value(&d);
            report["status"] = json!(if d.kernel_dim > 0 { "found" } else { "no-relation" });
            Ok(Outcome { ok: d.kernel_dim > 0, report })
        }
        Cmd::Algebroid(AlgCmd::Expand { curve, center }) => {
            let c = load_curve(curve)?;
            let branches = if center.trim() == "infinity" {
                c.puiseux_at_infinity(order)?
            } else {
                let z = parse_complex(center).map_err(|m| Fail::Usage(Error::InvalidInput(m)))?;
                c.puiseux_expand(z, order)?
            };
            let mut list = Vec::new();
            for b in &branches {
                let mut v = to_value(b);
                let (val, ord) = b.residual(&c)?;
                v["residual_valuation"] = json!(val);
                v["residual_order"] = json!(ord);
                list.push(v);
            }
            Ok(Outcome { ok: true, report: json!({ "center": center.trim(), "curve": c.to_json(), "branches": list }) })
        }
        Cmd::Algebroid(AlgCmd::Singular { curve }) => {
            let c = load_curve(curve)?;
            let rep = c.singular_points()?;
            let disc = discriminant(c.poly(), "z")?;
            let mut report = to_value(&rep);
            report["discriminant"] = to_value(&disc.to_json());
            Ok(Outcome { ok: true, report })
        }
        Cmd::Algebroid(AlgCmd::Monodromy { curve, base, around }) => {
            let c = load_curve(curve)?;
            let opts = TrackOptions::default();
            match around.as_deref().map(str::trim) {
                Some("infinity") => Ok(Outcome { ok: true, report: to_value(&monodromy_at_infinity(&c, *base, &opts)?) }),
                Some(t) => {
                    let target = parse_complex(t).map_err(|m| Fail::Usage(Error::InvalidInput(m)))?;
                    Ok(Outcome { ok: true, report: to_value(&monodromy(&c, *base, target, &opts)?) })
                }
                None => {
                    let (finite, inf, closed) = monodromy_product(&c, *base, &opts)?;
                    Ok(Outcome { ok: closed, report: json!({ "loops": finite, "infinity": inf, "product_is_identity": closed }) })
                }
            }
        }
        Cmd::Period(PeriodCmd::Find { func, poly, target, region, want }) => {
            let f = load_fn(func)?;
            if let Some(c) = target {
                let set = find_roots(&f, *c, *region, *want, &RootOptions::default())?;
                let mut report = json!({ "roots": set });
                if set.roots.len() >= 4 {
                    report["fit"] = to_value(&forsyth_fit(&set.roots)?);
                }
                return Ok(Outcome { ok: true, report });
            }
            let Some(poly) = poly else {
                return Err(Fail::Usage(Error::InvalidInput("period find needs --poly or --target".into())));
            };
            let g = load_poly(poly, &UVW)?;
            let opts = PeriodOptions { seed: cfg.seed, verify_tol: cfg.tol, ..Default::default() };
            let rep = weierstrass_period(&f, &g, &opts)?;
            let mut report = to_value(&rep);
            if rep.fundamental.is_some() {
                report["note"] = json!("fundamental is the smallest verified candidate after nearest-integer reduction");
            }
            Ok(Outcome { ok: rep.classification == Classification::Periodic, report })
        }
        Cmd::Period(PeriodCmd::Verify { func, omega }) => {
            let f = load_fn(func)?;
            let r = verify_period(&f, *omega, cfg.seed)?;
            let ok = r < cfg.tol;
            Ok(Outcome { ok, report: json!({ "omega": [omega.re, omega.im], "residual": r, "status": if ok { "verified" } else { "refuted" } }) })
        }
        Cmd::Reduce(ReduceCmd::Schwarz { poly, func, shifts }) => {
            let g = load_poly(poly, &UVW)?;
            let f = load_fn(func)?;
            let opts = SchwarzOptions {
                order,
                shifts: if shifts.is_empty() { None } else { Some(shifts.clone()) },
                relation_cap: cfg.degree_cap.min(3),
                ..Default::default()
            };
            let r = schwarz_reduce(&g, &f, &opts)?;
            Ok(Outcome { ok: true, report: to_value(&r) })
        }
        Cmd::Reduce(ReduceCmd::Koebe { poly, p1, p2, p3 }) => {
            let g = load_poly(poly, &UVW)?;
            let (a, b, c) = (load_fn(p1)?, load_fn(p2)?, load_fn(p3)?);
            let r = koebe_normalize(&g, &a, &b, &c, order, cfg.tol)?;
            Ok(Outcome { ok: true, report: to_value(&r) })
        }
        Cmd::Reduce(ReduceCmd::Double { poly, m, func }) => {
            let f = load_poly(poly, &["z", "x"])?;
            let phi = load_fn(func)?;
            let r = doubling_chain(&f, *m, &phi, order)?;
            Ok(Outcome { ok: true, report: to_value(&r) })
        }
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Aat(AatCmd::Verify { .. }) => "aat verify",
        Cmd::Aat(AatCmd::Discover { .. }) => "aat discover",
        Cmd::Algebroid(AlgCmd::Expand { .. }) => "algebroid expand",
        Cmd::Algebroid(AlgCmd::Singular { .. }) => "algebroid singular",
        Cmd::Algebroid(AlgCmd::Monodromy { .. }) => "algebroid monodromy",
        Cmd::Period(PeriodCmd::Find { .. }) => "period find",
        Cmd::Period(PeriodCmd::Verify { .. }) => "period verify",
        Cmd::Reduce(ReduceCmd::Schwarz { .. }) => "reduce schwarz",
        Cmd::Reduce(ReduceCmd::Koebe { .. }) => "reduce koebe",
        Cmd::Reduce(ReduceCmd::Double { .. }) => "reduce double",
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{}{}:\n", pad, k));
                        render_text(x, indent + 1, out);
                    }
                    Value::Array(a) if a.iter().any(|e| e.is_object()) => {
                        out.push_str(&format!("{}{}:\n", pad, k));
                        for (i, e) in a.iter().enumerate() {
                            out.push_str(&format!("{}  [{}]\n", pad, i));
                            render_text(e, indent + 2, out);
                        }
                    }
                    _ => out.push_str(&format!("{}{}: {}\n", pad, k, x)),
                }
            }
        }
        other => out.push_str(&format!("{}{}\n", pad, other)),
    }
}

fn emit(v: &Value, format: Format) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(v).expect("json") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(v, 0, &mut s);
            s
        }
    };
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match std::env::var("ATL_SEED") {
        Ok(s) => match parse_seed(&s) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("ATL_SEED: {}", e);
                return ExitCode::from(2);
            }
        },
        Err(_) => cli.seed,
    };
    let default_order = if matches!(cli.cmd, Cmd::Reduce(ReduceCmd::Schwarz { .. })) { 24 } else { 16 };
    let cfg = Config { order: cli.order.unwrap_or(default_order), tol: cli.tol, seed, degree_cap: cli.degree_cap };
    let mut out = Map::new();
    out.insert("command".into(), json!(command_name(&cli.cmd)));
    out.insert(
        "config".into(),
        json!({ "order": cfg.order, "tol": cfg.tol, "seed": cfg.seed, "format": cli.format, "degree_cap": cfg.degree_cap }),
    );
    let result = if cfg.order < 8 {
        Err(Fail::Usage(Error::InvalidInput(format!("--order must be at least 8, got {}", cfg.order))))
    } else if !(cfg.tol > 0.0 && cfg.tol < 1e-3) {
        Err(Fail::Usage(Error::InvalidInput(format!("--tol must lie in (0, 1e-3), got {}", cfg.tol))))
    } else {
        run(&cli.cmd, &cfg)
    };
    let code = match result {
        Ok(o) => {
            if let Value::Object(m) = o.report {
                out.extend(m);
            } else {
                out.insert("report".into(), o.report);
            }
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(f) => {
            let (e, code) = match f {
                Fail::Usage(e) => (e, 2),
                Fail::Engine(e) => (e, 1),
            };
            out.insert("error".into(), json!({ "kind": e.kind(), "message": e.to_string() }));
            code
        }
    };
    emit(&Value::Object(out), cli.format);
    ExitCode::from(code)
}
