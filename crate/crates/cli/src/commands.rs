use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use finlap::convolution::DEFAULT_INTERVALS;
use finlap::terminal::ENTIRE_TOL;
use finlap::{
    convolution_gap, design_run, flt_of_signal, invert_flt, parse_flt, parse_signal, solve_terminal, system_function,
    Complex64, DMatrix, DesignRun, EntireReport, LinearSystem, Polynomial, StateSpace, SymbolicResponse,
    TerminalSystem,
};

use crate::args::{
    pick, Config, ConvolveArgs, Demo, DesignArgs, InvertArgs, TerminalArgs, TransformArgs, VerifyArgs,
};
use crate::csv::{list, quoted, Table};
use crate::error::CliError;
use crate::svg::{line_chart, Series};

const DEFAULT_HORIZON: f64 = 1.0;
const DEFAULT_ORDER: usize = 10;
const DEFAULT_SAMPLES: usize = 10;
const DESIGN_HORIZON: f64 = 0.1;
const DESIGN_PLANT: f64 = 50.0;
const DESIGN_CONTROLLER: f64 = 60.0;
const CURVE_POINTS: usize = 200;

type Out<'a> = &'a mut dyn Write;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.to_path_buf(), source: e }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), source: e }
}

/// Write `content` to `path`, or to `out` when no path is given.
fn emit(path: Option<&Path>, content: &str, out: Out) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(io_err(p)),
        None => out.write_all(content.as_bytes()).map_err(stdout_err),
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(io_err(path))
}

fn required(value: Option<String>, flag: &str) -> Result<String, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn parse_complex(src: &str) -> Result<Complex64, CliError> {
    let cleaned: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    cleaned
        .replace('j', "i")
        .parse::<Complex64>()
        .map_err(|_| CliError::Usage(format!("cannot parse complex number {src:?}")))
}

fn write_report(report: &EntireReport, out: Out) -> Result<(), CliError> {
    for r in &report.roots {
        let line = match r.limit {
            Some(l) => format!(
                "root {}: limit {}, deviation {:.3e}, {}",
                fmt_complex(r.root),
                fmt_complex(l),
                r.max_deviation,
                if r.pass { "PASS" } else { "FAIL" }
            ),
            None => format!("root {}: pole, no finite limit, FAIL", fmt_complex(r.root)),
        };
        writeln!(out, "{line}").map_err(stdout_err)?;
    }
    writeln!(out, "entire: {}", if report.passed() { "PASS" } else { "FAIL" }).map_err(stdout_err)?;
    if report.passed() {
        Ok(())
    } else {
        let poles: Vec<String> = report
            .roots
            .iter()
            .filter(|r| !r.pass)
            .map(|r| fmt_complex(r.root))
            .collect();
        Err(CliError::Failed(format!("not entire: singular at s = {}", poles.join(", "))))
    }
}

pub fn transform(args: TransformArgs, cfg: Config, out: Out) -> Result<(), CliError> {
    let signal = required(args.signal.or(cfg.signal), "signal")?;
    let horizon = positive("T", pick(args.horizon, cfg.horizon, DEFAULT_HORIZON))?;
    let tol = pick(args.tol, cfg.tol, ENTIRE_TOL);
    let expr = flt_of_signal(&parse_signal(&signal, horizon)?);
    writeln!(out, "# finlap transform signal={} T={horizon} tol={tol}", quoted(&signal)).map_err(stdout_err)?;
    writeln!(out, "F(s) = {}", expr.pretty()).map_err(stdout_err)?;
    writeln!(out, "terms: {expr}").map_err(stdout_err)?;
    write_report(&finlap::verify_entire(&expr, tol), out)
}

pub fn verify(args: VerifyArgs, cfg: Config, out: Out) -> Result<(), CliError> {
    let horizon = positive("T", pick(args.horizon, cfg.horizon, DEFAULT_HORIZON))?;
    let tol = pick(args.tol, cfg.tol, ENTIRE_TOL);
    let (label, source, expr) = match (args.expr, args.signal) {
        (Some(e), _) => ("expr", e.clone(), parse_flt(&e, horizon)?),
        (None, Some(s)) => ("signal", s.clone(), flt_of_signal(&parse_signal(&s, horizon)?)),
        (None, None) => match (cfg.expr, cfg.signal) {
            (Some(e), _) => ("expr", e.clone(), parse_flt(&e, horizon)?),
            (None, Some(s)) => ("signal", s.clone(), flt_of_signal(&parse_signal(&s, horizon)?)),
            (None, None) => return Err(CliError::Usage("missing --expr or --signal".into())),
        },
    };
    writeln!(out, "# finlap verify {label}={} T={horizon} tol={tol}", quoted(&source)).map_err(stdout_err)?;
    writeln!(out, "F(s) = {}", expr.pretty()).map_err(stdout_err)?;
    write_report(&finlap::verify_entire(&expr, tol), out)
}

fn normalized_curve(f: impl Fn(f64) -> f64, horizon: f64) -> Vec<(f64, f64)> {
    let last = f(horizon);
    (0..=CURVE_POINTS)
        .map(|i| {
            let t = if i == CURVE_POINTS { horizon } else { horizon * i as f64 / CURVE_POINTS as f64 };
            (t, f(t) / last)
        })
        .collect()
}

pub fn invert(args: InvertArgs, cfg: Config, out: Out) -> Result<(), CliError> {
    let horizon = positive("T", pick(args.horizon, cfg.horizon, DEFAULT_HORIZON))?;
    let order = pick(args.order, cfg.order, DEFAULT_ORDER);
    let samples = pick(args.samples, cfg.samples, DEFAULT_SAMPLES);
    let (signal, expr_src) = match (args.signal, args.expr) {
        (None, None) => (cfg.signal, cfg.expr),
        given => given,
    };
    let (label, source, signal, expr) = match (signal, expr_src) {
        (Some(s), _) => {
            let sig = parse_signal(&s, horizon)?;
            let expr = flt_of_signal(&sig);
            ("signal", s, Some(sig), expr)
        }
        (None, Some(e)) => {
            let expr = parse_flt(&e, horizon)?;
            ("expr", e, None, expr)
        }
        (None, None) => return Err(CliError::Usage("missing --signal or --expr".into())),
    };
    let rec = invert_flt(&expr, order)?;
    let rows = rec.sample_table(samples)?;

    let mut table = Table::new(
        "invert",
        &[
            (label, quoted(&source)),
            ("T", horizon.to_string()),
            ("N", order.to_string()),
            ("K", samples.to_string()),
        ],
        &["k", "t", "value", "normalized"],
    );
    for (k, t, v, n) in &rows {
        table.row(&[k.to_string(), t.to_string(), v.to_string(), n.to_string()]);
    }
    emit(args.out.or(cfg.out).as_deref(), &table.into_string(), out)?;

    if let Some(path) = args.svg.or(cfg.svg) {
        let mut series = vec![Series {
            label: format!("N = {order}"),
            points: normalized_curve(|t| rec.eval(t).unwrap_or(f64::NAN), horizon),
            markers: false,
        }];
        if let Some(sig) = &signal {
            series.push(Series {
                label: "exact".into(),
                points: normalized_curve(|t| sig.eval(t).unwrap_or(f64::NAN), horizon),
                markers: false,
            });
        }
        series.push(Series {
            label: "samples".into(),
            points: rows.iter().map(|r| (r.1, r.3)).collect(),
            markers: true,
        });
        write_file(&path, &line_chart(&format!("Reconstruction of {source}"), "t", "f(t) / f(T)", &series))?;
    }
    Ok(())
}

fn terminal_table(params: &[(&str, String)], sys: &TerminalSystem) -> String {
    let mut table = Table::new("terminal", params, &["unknown", "value"]);
    for (id, v) in sys.unknowns.iter().zip(&sys.solution) {
        table.row(&[id.clone(), v.to_string()]);
    }
    table.into_string()
}

pub fn terminal(args: TerminalArgs, cfg: Config, out: Out) -> Result<(), CliError> {
    let demo = args.demo.or(if args.poly.is_some() { None } else { cfg.demo });
    let out_path = args.out.or(cfg.out);
    let content = match demo {
        Some(Demo::Rotation) => {
            let horizon = positive("T", pick(args.horizon, cfg.horizon, DEFAULT_HORIZON))?;
            let system = StateSpace::new(
                DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
                vec![1.0, 0.0],
                vec!["y".into(), "z".into()],
                horizon,
            )?;
            terminal_table(
                &[("demo", "rotation".into()), ("T", horizon.to_string())],
                &system.terminal()?,
            )
        }
        Some(Demo::Cascade) => {
            let horizon = positive("T", pick(args.horizon, cfg.horizon, DESIGN_HORIZON))?;
            let p = pick(args.p, cfg.p, DESIGN_PLANT);
            let c = args
                .c
                .or(cfg.c.as_ref().and_then(|v| v.first().copied()))
                .unwrap_or(DESIGN_CONTROLLER);
            let controller = LinearSystem::new("u", Polynomial::new(vec![positive("c", c)?, 1.0]), vec![0.0])?;
            let plant = LinearSystem::new("y", Polynomial::new(vec![positive("p", p)?, 1.0]), vec![0.0])?;
            let step = finlap::flt_of_signal(&finlap::TimeSignal::step(horizon)?);
            let stages = finlap::cascade(&[controller, plant], &step)?;
            let mut table = Table::new(
                "terminal",
                &[
                    ("demo", "cascade".into()),
                    ("p", p.to_string()),
                    ("c", c.to_string()),
                    ("T", horizon.to_string()),
                ],
                &["unknown", "value"],
            );
            for stage in &stages {
                let id = stage.unknowns.last().expect("stage has an unknown");
                table.row(&[id.clone(), stage.value(id).expect("solved").to_string()]);
            }
            table.into_string()
        }
        None => {
            let horizon = positive("T", pick(args.horizon, cfg.horizon, DEFAULT_HORIZON))?;
            let poly = args
                .poly
                .or(cfg.poly)
                .ok_or_else(|| CliError::Usage("missing --demo or --poly".into()))?;
            let order = poly.len().saturating_sub(1);
            let init = pick(args.init, cfg.init, vec![0.0; order]);
            let input = pick(args.input, cfg.input, "0".to_string());
            let sys = LinearSystem::new("y", Polynomial::new(poly.clone()), init.clone())?;
            let forcing = SymbolicResponse::known(&flt_of_signal(&parse_signal(&input, horizon)?));
            let solved = solve_terminal(&[system_function(&sys, &forcing)?])?;
            terminal_table(
                &[
                    ("poly", quoted(&list(&poly))),
                    ("init", quoted(&list(&init))),
                    ("input", quoted(&input)),
                    ("T", horizon.to_string()),
                ],
                &solved,
            )
        }
    };
    emit(out_path.as_deref(), &content, out)
}

fn stage_table(run: &DesignRun, order: usize, samples: usize) -> String {
    let mut table = Table::new(
        "design",
        &[
            ("p", run.plant_pole.to_string()),
            ("c", run.controller_pole.to_string()),
            ("T", run.horizon.to_string()),
            ("N", order.to_string()),
            ("K", samples.to_string()),
        ],
        &["stage", "k", "t", "value", "normalized"],
    );
    for (stage, rows) in [("controller", &run.controller_rows), ("plant", &run.plant_rows)] {
        for (k, t, v, n) in rows {
            table.row(&[stage.to_string(), k.to_string(), t.to_string(), v.to_string(), n.to_string()]);
        }
    }
    table.into_string()
}

/// `dir/stem_c<c>.ext` for one member of a sweep.
fn per_value_path(path: &Path, c: f64) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_c{c}.{}", ext.to_string_lossy()),
        None => format!("{stem}_c{c}"),
    };
    path.with_file_name(name)
}

pub fn design(args: DesignArgs, cfg: Config, out: Out) -> Result<(), CliError> {
    let p = pick(args.p, cfg.p, DESIGN_PLANT);
    let cs = pick(args.c, cfg.c, vec![DESIGN_CONTROLLER]);
    let horizon = positive("T", pick(args.horizon, cfg.horizon, DESIGN_HORIZON))?;
    let order = pick(args.order, cfg.order, DEFAULT_ORDER);
    let samples = pick(args.samples, cfg.samples, DEFAULT_SAMPLES);
    if cs.is_empty() {
        return Err(CliError::Usage("--c needs at least one value".into()));
    }
    let runs = cs
        .iter()
        .map(|&c| design_run(p, c, horizon, order, samples))
        .collect::<finlap::Result<Vec<_>>>()?;

    let out_path = args.out.or(cfg.out);
    for run in &runs {
        let content = stage_table(run, order, samples);
        match &out_path {
            Some(path) if runs.len() > 1 => write_file(&per_value_path(path, run.controller_pole), &content)?,
            Some(path) => write_file(path, &content)?,
            None => out.write_all(content.as_bytes()).map_err(stdout_err)?,
        }
    }

    let mut summary = Table::new(
        "design",
        &[
            ("p", p.to_string()),
            ("c", quoted(&list(&cs))),
            ("T", horizon.to_string()),
            ("N", order.to_string()),
            ("K", samples.to_string()),
        ],
        &["c", "u_T", "y_T", "rise_index"],
    );
    for run in &runs {
        summary.row(&[
            run.controller_pole.to_string(),
            run.u_terminal.to_string(),
            run.y_terminal.to_string(),
            run.rise_index().map(|k| k.to_string()).unwrap_or_default(),
        ]);
    }
    emit(args.summary.or(cfg.summary).as_deref(), &summary.into_string(), out)?;

    if let Some(path) = args.svg.or(cfg.svg) {
        let mut series = Vec::new();
        for run in &runs {
            for (stage, rec) in [("u", &run.controller), ("y", &run.plant)] {
                series.push(Series {
                    label: format!("{stage}, c = {}", run.controller_pole),
                    points: normalized_curve(|t| rec.eval(t).unwrap_or(f64::NAN), horizon),
                    markers: false,
                });
            }
        }
        write_file(&path, &line_chart(&format!("Step response, p = {p}"), "t", "normalized output", &series))?;
    }
    Ok(())
}

pub fn convolve(args: ConvolveArgs, cfg: Config, out: Out) -> Result<(), CliError> {
    let f_src = required(args.f.or(cfg.f), "f")?;
    let g_src = required(args.g.or(cfg.g), "g")?;
    let horizon = positive("T", pick(args.horizon, cfg.horizon, DEFAULT_HORIZON))?;
    let s_src = pick(args.s, cfg.s, vec!["1".to_string()]);
    let grid = pick(args.grid, cfg.grid, DEFAULT_INTERVALS);
    let tol = pick(args.tol, cfg.tol, ENTIRE_TOL);
    let points = s_src.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>, _>>()?;
    let f = parse_signal(&f_src, horizon)?;
    let g = parse_signal(&g_src, horizon)?;
    let report = convolution_gap(&f, &g, &points, grid, tol)?;

    let s_list: Vec<String> = points.iter().map(|&z| fmt_complex(z)).collect();
    let mut table = Table::new(
        "convolve",
        &[
            ("f", quoted(&f_src)),
            ("g", quoted(&g_src)),
            ("T", horizon.to_string()),
            ("s", quoted(&s_list.join(","))),
            ("M", grid.to_string()),
            ("tol", tol.to_string()),
        ],
        &[
            "s_re", "s_im", "product_re", "product_im", "restricted_re", "restricted_im", "full_re", "full_im",
            "gap_abs",
        ],
    );
    for r in &report.rows {
        table.row(&[
            r.s.re.to_string(),
            r.s.im.to_string(),
            r.product.re.to_string(),
            r.product.im.to_string(),
            r.restricted.re.to_string(),
            r.restricted.im.to_string(),
            r.full.re.to_string(),
            r.full.im.to_string(),
            r.gap().to_string(),
        ]);
    }
    emit(args.out.or(cfg.out).as_deref(), &table.into_string(), out)?;
    if report.full_matches() {
        Ok(())
    } else {
        let worst = report.rows.iter().map(|r| r.full_error()).fold(0.0, f64::max);
        Err(CliError::Failed(format!(
            "transform over [0, 2T] differs from the product by {worst:.3e} > {tol}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        for (src, z) in [
            ("1", Complex64::new(1.0, 0.0)),
            ("-3i", Complex64::new(0.0, -3.0)),
            ("0.5+2i", Complex64::new(0.5, 2.0)),
            ("2 - 1j", Complex64::new(2.0, -1.0)),
            ("1e-3+2i", Complex64::new(1e-3, 2.0)),
        ] {
            assert_eq!(parse_complex(src).unwrap(), z, "{src}");
            assert_eq!(parse_complex(&fmt_complex(z)).unwrap(), z);
        }
        assert!(parse_complex("1+").is_err());
    }

    #[test]
    fn sweep_file_names() {
        assert_eq!(per_value_path(Path::new("out/run.csv"), 60.0), Path::new("out/run_c60.csv"));
        assert_eq!(per_value_path(Path::new("run"), 2.5), Path::new("run_c2.5"));
    }
}
