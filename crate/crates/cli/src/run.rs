use crate::config::{Command, CurvatureSpec, GeometryKind, RunConfig, SummationSpec};
use grauert::beams::{beam_spec, floquet_frame, riccati_gamma, Curvature};
use grauert::geometries::{
    circle_eigendata, sphere_eigendata, torus_eigendata, tube_point, EigenIndex, Eigendata, EigendataEntry, Geometry, TubePoint,
};
use grauert::qfunction::{classify_continuity, q_eval_many, ContinuityKind, QFunctionSpec, Summation};
use grauert::report::{CsvTable, Summary};
use grauert::symplectic::{classify, power_sequence, SymplecticMap};
use grauert::weyl::{
    build_smoothing_kernel, calibrate_on_circle, husimi, husimi_sup, l2_norm_boundary, period_coefficient_extract,
    smoothed_density, tempered_series, Quadrature, SearchGrid,
};
use grauert::GrauertError;
use std::path::Path;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Numeric(#[from] GrauertError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Input(String),
}

type Result<T> = std::result::Result<T, RunError>;

/// What a command produced, before it is written anywhere.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub table: CsvTable,
    pub summary: Summary,
    /// `Some(false)` when a verification ran and failed.
    pub verified: Option<bool>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.display().to_string(), source })
}

/// Reads a `d=<int>` header followed by `2d` whitespace-separated rows.
pub fn parse_matrix(text: &str) -> Result<SymplecticMap> {
    let mut lines = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty());
    let head = lines.next().ok_or_else(|| RunError::Input("empty matrix file".into()))?;
    let d: usize = head
        .strip_prefix("d=")
        .and_then(|v| v.trim().parse().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| RunError::Input(format!("first line must be d=<int>, got {head:?}")))?;
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split_whitespace().map(|v| v.parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| RunError::Input(format!("bad matrix entry: {e}")))?;
    if rows.len() != 2 * d || rows.iter().any(|r| r.len() != 2 * d) {
        return Err(RunError::Input(format!("expected {0} rows of {0} numbers for d={d}", 2 * d)));
    }
    Ok(SymplecticMap::from_rows(&rows, 1e-9)?)
}

fn geometry(cfg: &RunConfig) -> Result<GeometryKind> {
    cfg.geometry.ok_or_else(|| RunError::Input(format!("{} needs a geometry", cfg.command)))
}

fn core_geometry(g: GeometryKind) -> Geometry {
    match g {
        GeometryKind::Circle => Geometry::Circle,
        GeometryKind::Torus(m) => Geometry::Torus { m },
        GeometryKind::Sphere => Geometry::Sphere,
    }
}

fn tau(cfg: &RunConfig) -> Result<f64> {
    cfg.tau.ok_or_else(|| RunError::Input(format!("{} needs tau", cfg.command)))
}

fn point(cfg: &RunConfig, g: GeometryKind, tau: f64) -> Result<TubePoint> {
    let (x, v) = match g {
        GeometryKind::Circle => (vec![0.0], vec![-1.0]),
        GeometryKind::Torus(m) => {
            let mut v = vec![0.0; m];
            v[0] = -1.0;
            (vec![0.0; m], v)
        }
        GeometryKind::Sphere => (vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]),
    };
    let x = cfg.x.clone().unwrap_or(x);
    let v = cfg.direction.clone().unwrap_or(v);
    Ok(tube_point(core_geometry(g), &x, &v, tau)?)
}

fn eigendata(cfg: &RunConfig, g: GeometryKind, lambda_max: f64) -> Result<Eigendata> {
    Ok(match g {
        GeometryKind::Circle => circle_eigendata(lambda_max)?,
        GeometryKind::Torus(m) => torus_eigendata(m, lambda_max)?,
        GeometryKind::Sphere => sphere_eigendata(cfg.n_max.unwrap_or(0).max(lambda_max.ceil() as usize))?,
    })
}

fn entry(cfg: &RunConfig, g: GeometryKind) -> Result<EigendataEntry> {
    match g {
        GeometryKind::Sphere => {
            let (n, m) = cfg.harmonic.ok_or_else(|| RunError::Input("sphere eigenfunctions need harmonic=N,M".into()))?;
            Ok(EigendataEntry { lambda: ((n * (n + 1)) as f64).sqrt(), index: EigenIndex::Sphere { n, m } })
        }
        _ => {
            let k = cfg.k.clone().ok_or_else(|| RunError::Input("torus eigenfunctions need k".into()))?;
            if k.len() != g.dim() {
                return Err(RunError::Input(format!("k has {} entries, geometry has dimension {}", k.len(), g.dim())));
            }
            let lambda = k.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
            let index = if g == GeometryKind::Circle { EigenIndex::Circle(k[0]) } else { EigenIndex::Torus(k.into()) };
            Ok(EigendataEntry { lambda, index })
        }
    }
}

fn quadrature(cfg: &RunConfig) -> Quadrature {
    cfg.quadrature.map_or(Quadrature::Auto, Quadrature::Nodes)
}

fn summation(s: SummationSpec) -> Summation {
    match s {
        SummationSpec::Abel(n) => Summation::abel(n),
        SummationSpec::Adaptive => Summation::default_adaptive(),
        SummationSpec::Truncate(n) => Summation::Truncate(n),
        SummationSpec::Cesaro(n) => Summation::Cesaro(n),
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|a| format!("{a:e}")).collect::<Vec<_>>().join(",")
}

fn classify_cmd(cfg: &RunConfig) -> Result<Artifacts> {
    let path = cfg.matrix.as_ref().ok_or_else(|| RunError::Input("classify needs matrix".into()))?;
    let s = parse_matrix(&read(path)?)?;
    let tag = classify(&s, 1e-9)?;
    let mut summary = Summary::default();
    summary.add("d", s.d()).add("symplectic_defect", format!("{:e}", s.defect())).add("tag", &tag);
    let mut table = CsvTable::new(&["n", "re", "im", "abs", "branch"]);
    match power_sequence(&s, 5) {
        Ok(seq) => {
            for (i, g) in seq.iter().enumerate() {
                table.push(vec![
                    (i + 1).to_string(),
                    format!("{:e}", g.value.re),
                    format!("{:e}", g.value.im),
                    format!("{:e}", g.value.norm()),
                    g.branch_index.to_string(),
                ]);
            }
        }
        Err(e) => {
            summary.add("matrix_elements", format!("unavailable ({e})"));
        }
    }
    if let Ok(c) = classify_continuity(&s, cfg.period) {
        let kind = match c.kind {
            ContinuityKind::UniformlyContinuous => "uniformly-continuous".to_string(),
            ContinuityKind::JumpsAt(p) => format!("jumps offset={:e} gap={:e}", p.offset, p.gap),
        };
        summary.add("q_continuity", kind);
        if let Some(s0) = c.s0 {
            summary.add("s0", format!("{s0:e}"));
        }
    }
    Ok(Artifacts { table, summary, verified: None })
}

fn qfunc_cmd(cfg: &RunConfig) -> Result<Artifacts> {
    let mut summary = Summary::default();
    let mut spec = if let Some(path) = &cfg.matrix {
        let s = parse_matrix(&read(path)?)?;
        if let Ok(c) = classify_continuity(&s, cfg.period) {
            summary.add("tag", &c.tag);
            if let Some(p) = c.jump_points() {
                summary.add("jump_offset", format!("{:e}", p.offset)).add("jump_gap", format!("{:e}", p.gap));
            }
        }
        QFunctionSpec::from_map(&s, cfg.period, cfg.n_terms, Summation::default_abel())?
    } else if let Some(s0) = cfg.s0 {
        QFunctionSpec::elliptic(cfg.period, s0)?
    } else if let Some(mus) = &cfg.mus {
        QFunctionSpec::hyperbolic(cfg.period, mus.clone())?
    } else {
        return Err(RunError::Input("qfunc needs matrix, s0 or mus".into()));
    };
    if let Some(s) = cfg.summation {
        spec = spec.with_summation(summation(s));
    }
    summary.add("period", format!("{:e}", cfg.period)).add("summation", format!("{:?}", spec.summation));
    let hi = cfg.lambda_max.expect("validated");
    let lambdas = grid(cfg.lambda_min.unwrap_or(0.0), hi, cfg.grid_points);
    let q = q_eval_many(&spec, &lambdas)?;
    let mut table = CsvTable::new(&["lambda", "q"]);
    for (l, v) in lambdas.iter().zip(&q) {
        table.push_numbers(&[*l, *v]);
    }
    Ok(Artifacts { table, summary, verified: None })
}

fn weyl_sum_cmd(cfg: &RunConfig) -> Result<Artifacts> {
    let g = geometry(cfg)?;
    let tau = tau(cfg)?;
    let hi = cfg.lambda_max.expect("validated");
    let data = eigendata(cfg, g, hi)?;
    let p = point(cfg, g, tau)?;
    let lo = cfg.lambda_min.unwrap_or(hi / cfg.grid_points as f64);
    let lambdas = grid(lo, hi, cfg.grid_points);
    let series = tempered_series(&data, &p, tau, &lambdas)?;
    let mut summary = Summary::default();
    let model: Vec<f64> = if g == GeometryKind::Circle {
        let q = (-4.0 * tau).exp();
        let c = 1.0 + q / (1.0 - q);
        summary.add("model", "lambda - frac(lambda) + C(tau)").add("C_tau", format!("{c:e}"));
        lambdas.iter().map(|l| l - l.fract() + c).collect()
    } else {
        // leading term c·λ^{(m+1)/2}, c fitted by least squares on the grid
        let e = 0.5 * (g.dim() as f64 + 1.0);
        let f: Vec<f64> = lambdas.iter().map(|l| l.powf(e)).collect();
        let c = f.iter().zip(&series.values).map(|(a, b)| a * b).sum::<f64>() / f.iter().map(|a| a * a).sum::<f64>();
        summary
            .add("model", format!("c * lambda^{e}"))
            .add("c", format!("{c:e}"))
            .add("c_calibration_window", format!("[{lo:e}, {hi:e}]"));
        f.iter().map(|a| c * a).collect()
    };
    let mut table = CsvTable::new(&["lambda", "P_tau", "model", "residual"]);
    for ((l, v), m) in lambdas.iter().zip(&series.values).zip(&model) {
        table.push_numbers(&[*l, *v, *m, v - m]);
    }
    summary.add("eigendata_entries", data.len()).add("max_abs_residual", {
        let r = series.values.iter().zip(&model).map(|(v, m)| (v - m).abs()).fold(0.0, f64::max);
        format!("{r:e}")
    });
    Ok(Artifacts { table, summary, verified: None })
}

fn husimi_cmd(cfg: &RunConfig) -> Result<Artifacts> {
    let g = geometry(cfg)?;
    let tau = tau(cfg)?;
    let e = entry(cfg, g)?;
    let p = point(cfg, g, tau)?;
    let at = husimi(&e, &p, quadrature(cfg))?;
    let sup = husimi_sup(&e, tau, SearchGrid::default(), quadrature(cfg))?;
    let mut table = CsvTable::new(&["lambda", "husimi_at_point", "husimi_sup"]);
    table.push_numbers(&[e.lambda, at, sup.value]);
    let mut summary = Summary::default();
    summary
        .add("argmax_x", fmt_list(&sup.argmax.x))
        .add("argmax_xi", fmt_list(&sup.argmax.xi))
        .add("evaluations", sup.evaluations);
    Ok(Artifacts { table, summary, verified: None })
}

fn l2norm_cmd(cfg: &RunConfig) -> Result<Artifacts> {
    let g = geometry(cfg)?;
    let tau = tau(cfg)?;
    let e = entry(cfg, g)?;
    let n = l2_norm_boundary(&e, tau, quadrature(cfg))?;
    let mut table = CsvTable::new(&["lambda", "norm2", "norm2_scaled"]);
    // ratio to e^{2τλ}λ^{−(m−1)/2}
    let scaled = n * (-2.0 * tau * e.lambda).exp() * e.lambda.max(1.0).powf(0.5 * (g.dim() as f64 - 1.0));
    table.push_numbers(&[e.lambda, n, scaled]);
    Ok(Artifacts { table, summary: Summary::default(), verified: None })
}

fn smooth_cmd(cfg: &RunConfig) -> Result<Artifacts> {
    let g = geometry(cfg)?;
    let tau = tau(cfg)?;
    let hi = cfg.lambda_max.expect("validated");
    let kernel = build_smoothing_kernel(cfg.kernel_support, cfg.kernel_p)?;
    let w = kernel.effective_width();
    let data = eigendata(cfg, g, hi + w + 1.0)?;
    let p = point(cfg, g, tau)?;
    let lo = cfg.lambda_min.unwrap_or(w.min(hi / 2.0));
    let lambdas = grid(lo, hi, cfg.grid_points);
    let mut table = CsvTable::new(&["lambda", "density"]);
    for l in &lambdas {
        table.push_numbers(&[*l, smoothed_density(&data, &p, tau, &kernel, *l)?]);
    }
    let mut summary = Summary::default();
    summary.add("kernel_support", cfg.kernel_support).add("kernel_p", cfg.kernel_p).add("kernel_width", format!("{w:e}"));
    Ok(Artifacts { table, summary, verified: None })
}

fn extract_cmd(cfg: &RunConfig) -> Result<Artifacts> {
    let g = geometry(cfg)?;
    let tau = tau(cfg)?;
    let lambda = cfg.lambda.expect("validated");
    let kernel = build_smoothing_kernel(cfg.kernel_support, cfg.kernel_p)?;
    let cal = calibrate_on_circle(&kernel, 1, cfg.calibration_lambda, tau)?;
    let data = eigendata(cfg, g, lambda + kernel.effective_width() + 1.0)?;
    let p = point(cfg, g, tau)?;
    let v = period_coefficient_extract(&data, &p, tau, &kernel, cfg.n, cfg.period, lambda, cal)?;
    let mut table = CsvTable::new(&["n", "re", "im", "abs"]);
    table.push(vec![cfg.n.to_string(), format!("{:e}", v.re), format!("{:e}", v.im), format!("{:e}", v.norm())]);
    let mut summary = Summary::default();
    summary
        .add("calibration", format!("{cal:e}"))
        .add("calibration_window", format!("circle n=1 lambda={:e}", cfg.calibration_lambda));
    Ok(Artifacts { table, summary, verified: None })
}

fn curvature(cfg: &RunConfig) -> Result<Curvature> {
    Ok(match &cfg.curvature {
        CurvatureSpec::Sphere => Curvature::sphere(),
        CurvatureSpec::Constant(k) => Curvature::constant(*k),
        CurvatureSpec::PerturbedSphere { eps, mode } => Curvature::perturbed_sphere(*eps, *mode),
        CurvatureSpec::Cosine { base, eps, freq } => Curvature::cosine(*base, *eps, *freq),
        CurvatureSpec::Table(path) => {
            let values = read(path)?
                .split_whitespace()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
            Curvature::table(values, cfg.length)?
        }
    })
}

fn beam_cmd(cfg: &RunConfig) -> Result<Artifacts> {
    let frame = floquet_frame(&curvature(cfg)?, cfg.length, cfg.steps)?;
    let spec = beam_spec(&frame, cfg.beam_k)?;
    let gamma = riccati_gamma(&frame.solution)?;
    let sol = &frame.solution;
    let stride = sol.grid.len().div_ceil(1000).max(1);
    let mut table = CsvTable::new(&["s", "re_y", "im_y", "re_gamma", "im_gamma"]);
    for i in (0..sol.grid.len()).step_by(stride) {
        let (y, gm) = (sol.y[i][(0, 0)], gamma.gamma[i][(0, 0)]);
        table.push_numbers(&[sol.grid[i], y.re, y.im, gm.re, gm.im]);
    }
    let mut summary = Summary::default();
    summary
        .add("alphas", fmt_list(&frame.alphas))
        .add("r", format!("{:e}", spec.r))
        .add("tube_radius", format!("{:e}", spec.tube_radius()))
        .add("wronskian_drift", format!("{:e}", sol.wronskian_drift))
        .add("riccati_residual", format!("{:e}", gamma.riccati_residual))
        .add("im_identity_defect", format!("{:e}", gamma.im_identity_defect))
        .add("norm_constant", format!("{:e}", spec.norm));
    Ok(Artifacts { table, summary, verified: None })
}

fn verify_cmd() -> Result<Artifacts> {
    let report = grauert::verify::verify_all();
    let mut summary = Summary::default();
    for c in &report.criteria {
        summary.add(&format!("criterion_{}", c.id), if c.passed() { "pass" } else { "fail" });
    }
    let mut table = CsvTable::new(&["criterion", "check", "expected", "observed", "tolerance", "pass", "provenance"]);
    for c in &report.criteria {
        if let Some(e) = &c.error {
            table.push(vec![c.id.to_string(), "error".into(), "-".into(), e.clone(), "-".into(), "false".into(), "-".into()]);
        }
        for k in &c.checks {
            table.push(vec![
                c.id.to_string(),
                k.name.clone(),
                k.expected.clone(),
                k.observed.clone(),
                k.tolerance.clone(),
                k.passed.to_string(),
                k.provenance.to_string(),
            ]);
        }
    }
    Ok(Artifacts { table, summary, verified: Some(report.passed()) })
}

/// Runs one command on a worker pool of the given size.
pub fn execute(cfg: &RunConfig, workers: usize) -> Result<Artifacts> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Input(format!("cannot start {workers} workers: {e}")))?;
    let start = Instant::now();
    let mut out = pool.install(|| match cfg.command {
        Command::Classify => classify_cmd(cfg),
        Command::QFunc => qfunc_cmd(cfg),
        Command::WeylSum => weyl_sum_cmd(cfg),
        Command::Husimi => husimi_cmd(cfg),
        Command::L2Norm => l2norm_cmd(cfg),
        Command::Smooth => smooth_cmd(cfg),
        Command::Extract => extract_cmd(cfg),
        Command::Beam => beam_cmd(cfg),
        Command::VerifyAll => verify_cmd(),
    })?;
    let mut head = Summary::default();
    head.add("command", cfg.command);
    if let Some(g) = cfg.geometry {
        head.add("geometry", format!("{g:?}").to_lowercase());
    }
    if let Some(t) = cfg.tau {
        head.add("tau", t);
    }
    head.entries.append(&mut out.summary.entries);
    head.add("workers", workers).add("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    out.summary = head;
    Ok(out)
}

/// Worker count: `GW_WORKERS` if set, else the configured value, else the
/// available parallelism.
pub fn resolve_workers(cfg: &RunConfig, env: Option<&str>) -> Result<usize> {
    if let Some(v) = env {
        return v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| RunError::Input(format!("GW_WORKERS must be a positive integer, got {v:?}")));
    }
    Ok(cfg.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| RunError::Io { path: path.display().to_string(), source })
}

/// Executes and writes the artifacts; returns the process exit code.
pub fn run(cfg: &RunConfig, env_workers: Option<&str>) -> i32 {
    let outcome = resolve_workers(cfg, env_workers).and_then(|w| execute(cfg, w)).and_then(|a| {
        let csv = a.table.to_csv();
        let summary = a.summary.to_string();
        match &cfg.output {
            Some(p) => write(p, &csv)?,
            None => print!("{csv}"),
        }
        match (&cfg.summary, &cfg.output) {
            (Some(p), _) => write(p, &summary)?,
            (None, Some(_)) => print!("{summary}"),
            (None, None) => eprint!("{summary}"),
        }
        Ok(a.verified)
    });
    match outcome {
        Ok(Some(false)) => EXIT_VERIFY,
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
