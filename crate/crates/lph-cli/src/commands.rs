use lph::geodim::{decomposition_exponents, fit_sweep, volume_sweep, HomothetyBox};
use lph::heis::{exp_ode, geodesic_path, Covector, Point};
use lph::jac::{ray_function, surface};
use lph::mcp::{curvature_exponent_estimate, divergence_probe, mcp_inequality_scan, GridSpec, McpReport, Verdict};
use lph::polygonal::{
    branching_witness, cut_locus_member, l1_distance, l1_geodesic, linf_geodesic, linf_to_l1, monte_carlo_homothety,
    region_classify, H1Box, Selector,
};
use lph::ptrig::{dual_pair, pi_p, series_validity, trig_pair, trig_series};
use lph::{Error, Exponent};
use serde_json::json;

use crate::cli::*;
use crate::output::{num, Cell, Output, Table};

/// A failure, split by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Run = Result<Output, Failure>;

fn exponent(p: Option<f64>, command: &str) -> Result<Exponent, Failure> {
    let p = p.ok_or_else(|| Failure::Usage(format!("{command} needs --p")))?;
    Ok(Exponent::new(p)?)
}

fn grid_spec(g: Grid, band: f64, rounds: usize) -> GridSpec {
    let d = GridSpec::default();
    GridSpec { n_theta: g.n_theta, n_w: g.n_w, n_t: g.n_t.unwrap_or(d.n_t), band, rounds }
}

pub fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Ptrig(a) => ptrig(cli.p, a),
        Command::Geodesic(a) => geodesic(cli.p, a),
        Command::Jacobian(a) => jacobian(cli.p, a),
        Command::Ncurv(a) => ncurv(cli.p, a),
        Command::McpCheck(a) => mcp_check(cli.p, a),
        Command::Geodim(a) => geodim(cli.p, a),
        Command::Rayplot(a) => rayplot(cli.p, a),
        Command::Ell1(c) => ell1(cli.p, cli.seed, c),
        Command::Defaults => Ok(defaults()),
    }
}

fn ptrig(p: Option<f64>, a: &PtrigArgs) -> Run {
    let e = exponent(p, "ptrig")?;
    e.require_strict()?;
    if a.n < 2 {
        return Err(Failure::Usage("--n must be at least 2".into()));
    }
    let mut rows = Vec::with_capacity(a.n);
    let table = if a.series {
        let top = series_validity(&e);
        let mut t = Table::new(&["theta", "sin", "cos", "sin_series", "cos_series", "sin_bound", "cos_bound"]);
        for i in 0..a.n {
            let theta = top * i as f64 / a.n as f64;
            let exact = trig_pair(&e, theta)?;
            let s = trig_series(&e, theta, a.order)?;
            t.push(vec![
                theta.into(),
                exact.sin.into(),
                exact.cos.into(),
                s.sin.value.into(),
                s.cos.value.into(),
                s.sin.remainder_bound.into(),
                s.cos.remainder_bound.into(),
            ]);
            rows.push(json!({"theta": theta, "sin": exact.sin, "cos": exact.cos, "series": s}));
        }
        t
    } else {
        let full = 2.0 * pi_p(&e);
        let mut t = Table::new(&["theta", "cos", "sin", "dual_cos", "dual_sin", "identity_residual"]);
        for i in 0..a.n {
            let theta = full * i as f64 / (a.n - 1) as f64;
            let tp = trig_pair(&e, theta)?;
            let dp = dual_pair(&e, theta)?;
            let res = tp.cos.abs().powf(e.p) + tp.sin.abs().powf(e.p) - 1.0;
            t.push(vec![theta.into(), tp.cos.into(), tp.sin.into(), dp.cos.into(), dp.sin.into(), res.into()]);
            rows.push(json!({"theta": theta, "cos": tp.cos, "sin": tp.sin, "dual_cos": dp.cos, "dual_sin": dp.sin}));
        }
        t
    };
    let summary = format!("ptrig p={}: {} rows", e.p, a.n);
    Ok(Output::new("ptrig", Some(e.p), json!({ "pi_p": pi_p(&e), "rows": rows }), table, summary))
}

fn geodesic(p: Option<f64>, a: &GeodesicArgs) -> Run {
    let e = exponent(p, "geodesic")?;
    let c = Covector::new(&e, a.r, a.theta, a.w)?;
    let path = geodesic_path(&e, &c, a.t_end, a.n)?;
    let mut header = vec!["t", "x", "y", "z"];
    if a.ode {
        header.extend(["x_ode", "y_ode", "z_ode"]);
    }
    let mut table = Table::new(&header);
    let mut ode_rows = Vec::new();
    for (t, pt) in &path.samples {
        let mut row: Vec<Cell> = vec![(*t).into(), pt.x.into(), pt.y.into(), pt.z.into()];
        if a.ode {
            let o = exp_ode(&e, &c, *t)?;
            row.extend([o.x.into(), o.y.into(), o.z.into()]);
            ode_rows.push(o);
        }
        table.push(row);
    }
    let end = path.samples.last().map(|s| s.1).unwrap_or(Point::IDENTITY);
    let summary = format!("geodesic p={}: endpoint ({:.6e}, {:.6e}, {:.6e})", e.p, end.x, end.y, end.z);
    let result = if a.ode { json!({"path": path, "ode": ode_rows}) } else { json!({ "path": path }) };
    Ok(Output::new("geodesic", Some(e.p), result, table, summary))
}

fn jacobian(p: Option<f64>, a: &JacobianArgs) -> Run {
    let e = exponent(p, "jacobian")?;
    let samples = surface(&e, a.grid.n_theta, a.grid.n_w)?;
    let mut header = vec!["theta", "w", "jr", "djr_dw"];
    if a.nexp {
        header.push("n_exp");
    }
    let mut table = Table::new(&header);
    let mut rows = Vec::with_capacity(samples.len());
    for s in &samples {
        let mut row: Vec<Cell> = vec![s.theta.into(), s.w.into(), s.jr.into(), s.djr_dw.into()];
        let mut obj = json!({"theta": s.theta, "w": s.w, "jr": num(s.jr), "djr_dw": num(s.djr_dw)});
        if a.nexp {
            row.push(s.n_exp.into());
            obj["n_exp"] = num(s.n_exp);
        }
        table.push(row);
        rows.push(obj);
    }
    let min = samples.iter().map(|s| s.jr).fold(f64::INFINITY, f64::min);
    let summary = format!("jacobian p={}: {} samples, min J_R = {min:.6e}", e.p, samples.len());
    Ok(Output::new("jacobian", Some(e.p), json!({ "samples": rows, "min_jr": num(min) }), table, summary))
}

fn report_table(r: &McpReport) -> Table {
    match &r.verdict {
        Verdict::DivergenceEvidence { path } => {
            let mut t = Table::new(&["eta", "theta", "w", "n"]);
            for pt in path {
                t.push(vec![pt.eta.into(), pt.theta.into(), pt.w.into(), pt.n.into()]);
            }
            t
        }
        _ if !r.witnesses.is_empty() => {
            let mut t = Table::new(&["theta", "w", "t", "lhs", "rhs"]);
            for w in &r.witnesses {
                t.push(vec![w.theta.into(), w.w.into(), w.t.into(), w.lhs.into(), w.rhs.into()]);
            }
            t
        }
        _ => {
            let (th, w) = r.argmax.map(|a| (a.theta, a.w)).unwrap_or((f64::NAN, f64::NAN));
            Table::key_value(vec![
                ("p", r.p.into()),
                ("n_tested", r.n_tested.into()),
                ("sup_estimate", r.sup_estimate.into()),
                ("argmax_theta", th.into()),
                ("argmax_w", w.into()),
            ])
        }
    }
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Satisfied => "Satisfied",
        Verdict::ViolatedAt { .. } => "ViolatedAt",
        Verdict::DivergenceEvidence { .. } => "DivergenceEvidence",
    }
}

fn report_output(command: &'static str, r: McpReport, expect_satisfied: bool) -> Output {
    let summary = format!("{command} p={}: {} (sup estimate {})", r.p, verdict_name(&r.verdict), r.sup_estimate);
    let failed = expect_satisfied && r.verdict != Verdict::Satisfied;
    let mut out = Output::new(command, Some(r.p), &r, report_table(&r), summary);
    out.verdict_failed = failed;
    out
}

fn ncurv(p: Option<f64>, a: &NcurvArgs) -> Run {
    let e = exponent(p, "ncurv")?;
    let r = if e.p > 2.0 {
        divergence_probe(&e, a.target)?
    } else {
        curvature_exponent_estimate(&e, &grid_spec(a.grid, DEFAULT_BAND, a.rounds), a.rounds)?
    };
    Ok(report_output("ncurv", r, a.expect_satisfied))
}

fn mcp_check(p: Option<f64>, a: &McpArgs) -> Run {
    let e = exponent(p, "mcp-check")?;
    let r = mcp_inequality_scan(&e, a.n, &grid_spec(a.grid, a.band, DEFAULT_ROUNDS))?;
    Ok(report_output("mcp-check", r, a.expect_satisfied))
}

fn geodim(p: Option<f64>, a: &GeodimArgs) -> Run {
    let e = exponent(p, "geodim")?;
    let theta = match a.theta {
        Some(t) => t,
        None => 0.25 * pi_p(&e.conjugate()),
    };
    let b = HomothetyBox::new(&e, a.r, theta, a.w)?;
    if !(a.tmin > 0.0 && a.tmin < a.tmax) || a.tn < 2 {
        return Err(Failure::Usage("need 0 < tmin < tmax and tn >= 2".into()));
    }
    let sweep = volume_sweep(&e, &b, a.tmin, a.tmax, a.tn)?;
    let fit = fit_sweep(&sweep);
    let decomposition = if a.decomposition { Some(decomposition_exponents(&e, &b, a.tmin, a.tmax, a.tn)?) } else { None };
    let mut table = Table::new(&["t", "volume"]);
    for s in &sweep {
        table.push(vec![s.t.into(), s.volume.into()]);
    }
    let summary = format!(
        "geodim p={}: slope {:.6} (log correction: {}, log-fit R² {:.6})",
        e.p, fit.slope, fit.log_correction, fit.log_fit_r2
    );
    let result = json!({ "box": b, "sweep": sweep, "fit": fit, "decomposition_exponents": decomposition });
    Ok(Output::new("geodim", Some(e.p), result, table, summary))
}

fn rayplot(p: Option<f64>, a: &RayArgs) -> Run {
    let e = exponent(p, "rayplot")?;
    e.require_strict()?;
    if !(a.smin > 0.0 && a.smin < a.smax) || a.n < 2 {
        return Err(Failure::Usage("need 0 < smin < smax and n >= 2".into()));
    }
    let (l0, l1) = (a.smin.log10(), a.smax.log10());
    let mags: Vec<f64> = (0..a.n).map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (a.n - 1) as f64)).collect();
    let ss: Vec<f64> = mags.iter().rev().map(|m| -m).chain(mags.iter().copied()).collect();
    let mut table = Table::new(&["s", "p_val", "dp_val", "ratio"]);
    let mut rows = Vec::with_capacity(ss.len());
    for s in ss {
        let r = ray_function(e.q, s);
        table.push(vec![s.into(), r.p_val.into(), r.dp_val.into(), r.ratio.into()]);
        rows.push(json!({"s": s, "p_val": num(r.p_val), "dp_val": num(r.dp_val), "ratio": num(r.ratio)}));
    }
    let summary = format!("rayplot p={}: {} rows, far limit 2q+1 = {}", e.p, rows.len(), 2.0 * e.q + 1.0);
    Ok(Output::new("rayplot", Some(e.p), json!({ "q": e.q, "rows": rows }), table, summary))
}

fn polygonal_exponent(p: Option<f64>) -> Result<Exponent, Failure> {
    let e = Exponent::new(p.unwrap_or(1.0))?;
    e.require_polygonal()?;
    Ok(e)
}

fn ell1(p: Option<f64>, seed: u64, c: &Ell1Command) -> Run {
    let e = polygonal_exponent(p)?;
    let linf = e.p.is_infinite();
    let only_l1 = |what: &str| -> Result<(), Failure> {
        if linf {
            Err(Failure::Usage(format!("ell1 {what} works in l^1 coordinates; use --p 1")))
        } else {
            Ok(())
        }
    };
    match c {
        Ell1Command::Classify(pt) => {
            let h = Point::new(pt.x, pt.y, pt.z);
            let h1 = if linf { linf_to_l1(&h) } else { h };
            let r = region_classify(&h1);
            let cut = cut_locus_member(&h1);
            let dist = l1_distance(&h1);
            let table = Table::key_value(vec![
                ("tag", format!("{:?}", r.tag).as_str().into()),
                ("on_h1_h2", r.flags.on_h1_h2.into()),
                ("on_h2_h3", r.flags.on_h2_h3.into()),
                ("axis", r.flags.axis.into()),
                ("cut_locus", cut.into()),
                ("distance", dist.into()),
            ]);
            let summary = format!("ell1 classify: {:?}, cut locus {cut}", r.tag);
            let result = json!({"target": [h.x, h.y, h.z], "regime": r, "cut_locus": cut, "distance": dist});
            Ok(Output::new("ell1 classify", Some(e.p), result, table, summary))
        }
        Ell1Command::Geodesic { point, staircase, lambda } => {
            let h = Point::new(point.x, point.y, point.z);
            let sel = match staircase {
                Some(steps) => Selector::Staircase { steps: *steps, lambda: *lambda },
                None => Selector::Canonical,
            };
            let mut table = Table::new(&["x", "y"]);
            if linf {
                let g = linf_geodesic(&h, sel)?;
                for v in &g.vertices {
                    table.push(vec![v[0].into(), v[1].into()]);
                }
                let summary = format!("ell1 geodesic (l^inf): {:?}, length {}", g.regime.tag, g.length);
                let result = json!({"target": [h.x, h.y, h.z], "regime": g.regime, "vertices": g.vertices, "length": g.length});
                Ok(Output::new("ell1 geodesic", Some(e.p), result, table, summary))
            } else {
                let g = l1_geodesic(&h, sel)?;
                for v in g.vertices() {
                    table.push(vec![v[0].into(), v[1].into()]);
                }
                if let Some(w) = &g.warning {
                    eprintln!("warning: {w}");
                }
                let summary = format!("ell1 geodesic: {:?}, {} edges, length {}", g.regime.tag, g.edges.len(), g.length);
                let result = json!({
                    "target": [h.x, h.y, h.z],
                    "regime": g.regime,
                    "edges": g.edges,
                    "length": g.length,
                    "warning": g.warning,
                });
                Ok(Output::new("ell1 geodesic", Some(e.p), result, table, summary))
            }
        }
        Ell1Command::Branch { t, n } => {
            only_l1("branch")?;
            let r = branching_witness(*t, *n, seed)?;
            let table = Table::key_value(vec![
                ("t", r.t.into()),
                ("n", r.n.into()),
                ("max_offaxis", r.max_offaxis.into()),
                ("seed", Cell::Int(r.seed)),
                ("half_width", r.half_width.into()),
            ]);
            let summary = format!("ell1 branch t={}: max off-axis {:e} over {} samples", r.t, r.max_offaxis, r.n);
            Ok(Output::new("ell1 branch", Some(e.p), &r, table, summary))
        }
        Ell1Command::Volume { x, y, z, t, n } => {
            only_l1("volume")?;
            let b = H1Box::new(*x, *y, *z)?;
            let r = monte_carlo_homothety(&b, *t, *n, seed)?;
            let table = Table::key_value(vec![
                ("t", r.t.into()),
                ("n", r.n.into()),
                ("seed", Cell::Int(r.seed)),
                ("estimate", r.estimate.into()),
                ("std_error", r.std_error.into()),
                ("analytic", r.analytic.into()),
                ("threshold", r.threshold.into()),
            ]);
            let z_score = (r.estimate - r.analytic) / r.std_error;
            let summary = format!("ell1 volume t={}: {} ± {} vs {} ({z_score:+.2} SE)", r.t, r.estimate, r.std_error, r.analytic);
            Ok(Output::new("ell1 volume", Some(e.p), &r, table, summary))
        }
    }
}

/// Defaults of every option, mirrored by `defaults.json`.
pub fn defaults_value() -> serde_json::Value {
    json!({
        "seed": DEFAULT_SEED,
        "format": "json",
        "ptrig": { "n": DEFAULT_PTRIG_N, "order": DEFAULT_SERIES_ORDER },
        "geodesic": { "r": 1.0, "t_end": 1.0, "n": 101 },
        "jacobian": { "grid": DEFAULT_JAC_GRID },
        "ncurv": { "grid": DEFAULT_GRID, "rounds": DEFAULT_ROUNDS, "band": DEFAULT_BAND, "target": DEFAULT_PROBE_TARGET },
        "mcp-check": { "grid": DEFAULT_GRID, "band": DEFAULT_BAND },
        "geodim": {
            "tmin": DEFAULT_TMIN, "tmax": DEFAULT_TMAX, "tn": DEFAULT_TN,
            "R": DEFAULT_R, "Theta": "pi_q/4", "W": DEFAULT_W
        },
        "rayplot": { "smin": DEFAULT_SMIN, "smax": DEFAULT_SMAX, "n": DEFAULT_SN },
        "ell1": {
            "p": 1,
            "geodesic": { "lambda": 0.5 },
            "branch": { "t": 0.125, "n": DEFAULT_BRANCH_N },
            "volume": { "x": [1.0, 2.0], "y": [1.0, 2.0], "z": [-0.1, 0.1], "t": 0.1, "n": DEFAULT_MC_N }
        }
    })
}

fn defaults() -> Output {
    let v = defaults_value();
    Output::new("defaults", None, &v, Table::key_value(vec![]), "defaults".into())
}
