use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use seqhop::analysis::{
    critical_lambda_f, figure1_csv, figure1_data, landscape_grid, nearest_pattern,
    planar_demo_grid, planar_demo_store, GridSpec, PLANAR_DEMO_PARAMS,
};
use seqhop::frameio::{
    export_sequence, list_frame_files, load_frames, load_sequence, synthesize_sequence,
    write_norms, write_synthetic, FrameFormat, FrameShape, SyntheticSpec,
};
use seqhop::retrieval::{accuracy_eta, count_scene_changes, mse_k};
use seqhop::{
    retrieve_sequence, Error, ModelParams, OptimizerSettings, PatternStore, RetrievalConfig,
};

use crate::config::{parse_range, parse_variant, pick, FileConfig};
use crate::failure::Failure;
use crate::{EvalArgs, LandscapeArgs, ModelArgs, RetrieveArgs, StabilityArgs, SynthArgs};

const DEFAULT_TIMES: [f64; 4] = [0.0, 1.0, 2.0, 3.0];
const DEFAULT_LAMBDAS: [f64; 4] = [0.0, 1.0, 2.5, 5.0];
const DEFAULT_LAMBDA_F_RANGE: &str = "0.25:10:40";

fn format_of(flag: Option<String>, file: &FileConfig) -> Result<FrameFormat, Failure> {
    match flag.or_else(|| file.format.clone()) {
        Some(text) => Ok(text.parse()?),
        None => Ok(FrameFormat::default()),
    }
}

fn model_params(args: &ModelArgs, file: &FileConfig, defaults: ModelParams) -> ModelParams {
    ModelParams {
        beta: pick(args.beta, file.beta, defaults.beta),
        sigma: pick(args.sigma, file.sigma, defaults.sigma),
        lambda: pick(args.lambda, file.lambda, defaults.lambda),
        lambda_f: pick(args.lambda_f, file.lambda_f, defaults.lambda_f),
        mu: pick(args.mu, file.mu, defaults.mu),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| Failure::io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    write_text(path, &(text + "\n"))
}

/// Resolves `(p, n)`; `p` alone keeps every frame from `p` on.
fn window_of(
    p: Option<usize>,
    n: Option<usize>,
    input: &Path,
    format: FrameFormat,
) -> Result<Option<(usize, usize)>, Failure> {
    if p == Some(0) {
        return Err(Failure::config("p counts from 1"));
    }
    if n == Some(0) {
        return Err(Failure::config("n must be at least 1"));
    }
    match (p, n) {
        (None, None) => Ok(None),
        (p, Some(n)) => Ok(Some((p.unwrap_or(1), n))),
        (Some(p), None) => {
            let available = list_frame_files(input, format)?.len();
            if p > available {
                return Err(Error::Window { p, n: 0, available }.into());
            }
            Ok(Some((p, available - p + 1)))
        }
    }
}

pub fn retrieve(args: RetrieveArgs) -> Result<(), Failure> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let input = args
        .common
        .input
        .clone()
        .or_else(|| file.input.clone())
        .ok_or_else(|| Failure::config("retrieve needs --input"))?;
    let output = pick(
        args.common.output.clone(),
        file.output.clone(),
        PathBuf::from("seqhop-out"),
    );
    let format = format_of(args.common.format.clone(), &file)?;

    let defaults = RetrievalConfig::default();
    let optimizer = OptimizerSettings {
        tol: pick(args.tol, file.tol, defaults.optimizer.tol),
        max_iters: pick(args.max_iters, file.max_iters, defaults.optimizer.max_iters),
        step_size: pick(args.step_size, file.step_size, defaults.optimizer.step_size),
        line_search: pick(
            args.line_search,
            file.line_search,
            defaults.optimizer.line_search,
        ),
        backtrack_factor: pick(
            None,
            file.backtrack_factor,
            defaults.optimizer.backtrack_factor,
        ),
        armijo_c: pick(None, file.armijo_c, defaults.optimizer.armijo_c),
    };
    let config = RetrievalConfig {
        params: model_params(&args.model, &file, defaults.params),
        optimizer,
        mse_threshold: pick(args.threshold, file.threshold, defaults.mse_threshold),
        scene_mse_threshold: pick(
            args.scene_threshold,
            file.scene_threshold,
            defaults.scene_mse_threshold,
        ),
        record_energy_traces: pick(args.record_traces, file.record_traces, false),
    };
    config.validate()?;

    let window = window_of(args.p.or(file.p), args.n.or(file.n), &input, format)?;
    let (store, shape) = load_sequence(&input, format, window)?;
    let (p, n) = window.unwrap_or((1, store.len()));

    let (frames, report) = retrieve_sequence(&store, &config)?;

    export_sequence(&frames, shape, store.source_norms(), &output, format)?;
    if let Some(norms) = store.source_norms() {
        write_norms(&output, norms)?;
    }
    let params = config.params;
    let opt = config.optimizer;
    let document = json!({
        "mse": report.mse,
        "eta": report.eta,
        "iterations": report.iterations,
        "converged": report.converged,
        "energy_final": report.energy_final,
        "energy_traces": report.energy_traces,
        "scene_changes": report.scene_changes,
        "wall_time_s": report.wall_time_s,
        "config": {
            "input": input,
            "output": output,
            "format": format.extension(),
            "p": p,
            "n": n,
            "width": shape.width,
            "height": shape.height,
            "channels": shape.channels,
            "d": shape.d(),
            "beta": params.beta,
            "sigma": params.sigma,
            "lambda": params.lambda,
            "lambda_f": params.lambda_f,
            "mu": params.mu,
            "tol": opt.tol,
            "max_iters": opt.max_iters,
            "step_size": opt.step_size,
            "line_search": opt.line_search,
            "backtrack_factor": opt.backtrack_factor,
            "armijo_c": opt.armijo_c,
            "threshold": config.mse_threshold,
            "scene_threshold": config.scene_mse_threshold,
            "record_traces": config.record_energy_traces,
        },
    });
    write_json(&output.join("report.json"), &document)?;

    println!(
        "p={p} N={n} d={} beta={} sigma={} lambda={} lambda_f={} mu={} eta={:.1} S={} time={:.2}s",
        shape.d(),
        params.beta,
        params.sigma,
        params.lambda,
        params.lambda_f,
        params.mu,
        report.eta,
        report.scene_changes,
        report.wall_time_s
    );
    Ok(())
}

pub fn synth(args: SynthArgs) -> Result<(), Failure> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let output = pick(
        args.common.output.clone(),
        file.output.clone(),
        PathBuf::from("synthetic"),
    );
    let format = format_of(args.common.format.clone(), &file)?;
    let shape = FrameShape::new(
        pick(args.width, file.width, 32),
        pick(args.height, file.height, 32),
        pick(args.channels, file.channels, 3),
    )?;
    if format == FrameFormat::Ppm && shape.channels != 3 {
        return Err(Failure::config("ppm output needs 3 channels"));
    }
    let spec = SyntheticSpec {
        shape,
        n: pick(args.n, file.n, 50),
        drift: pick(args.drift, file.drift, 0.05),
        cuts: pick(args.cuts, file.cuts.clone(), Vec::new()),
        seed: pick(args.seed, file.seed, 0),
    };
    spec.validate()?;
    write_synthetic(&spec, &output, format)?;
    let scenes = count_scene_changes(
        &synthesize_sequence(&spec)?,
        RetrievalConfig::default().scene_mse_threshold,
    );
    println!(
        "wrote N={} frames of {shape} to {} seed={} drift={} S={scenes}",
        spec.n,
        output.display(),
        spec.seed,
        spec.drift
    );
    Ok(())
}

pub fn stability(args: StabilityArgs) -> Result<(), Failure> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let lambdas = pick(args.lambdas, file.lambdas.clone(), DEFAULT_LAMBDAS.to_vec());
    let range = pick(
        args.lambda_f_range,
        file.lambda_f_range.clone(),
        DEFAULT_LAMBDA_F_RANGE.to_string(),
    );
    let grid = parse_range(&range)?;
    let variant = match args.variant.or_else(|| file.variant.clone()) {
        Some(text) => parse_variant(&text)?,
        None => Default::default(),
    };
    let mut output = pick(
        args.common.output,
        file.output.clone(),
        PathBuf::from("stability.csv"),
    );
    if output.is_dir() {
        output = output.join("stability.csv");
    }
    if lambdas.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Failure::config(format!(
            "lambdas must be finite and >= 0: {lambdas:?}"
        )));
    }

    let rows = figure1_data(&lambdas, &grid, variant)?;
    write_text(&output, &figure1_csv(&rows))?;
    for &lambda in &lambdas {
        match critical_lambda_f(lambda, variant) {
            Ok(value) => println!("lambda={lambda} critical_lambda_f={value:.6}"),
            Err(Error::NoCrossing { lo, hi, .. }) => {
                println!("lambda={lambda} critical_lambda_f=none in [{lo:e}, {hi:e}]")
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<GridSpec, Failure> {
    let bad = || {
        Failure::config(format!(
            "grid must be `resolution` or `x_min,x_max,y_min,y_max,resolution`, got {text:?}"
        ))
    };
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let grid = match parts.as_slice() {
        [res] => GridSpec {
            resolution: res.parse().map_err(|_| bad())?,
            ..planar_demo_grid()
        },
        [x0, x1, y0, y1, res] => GridSpec {
            x_min: x0.parse().map_err(|_| bad())?,
            x_max: x1.parse().map_err(|_| bad())?,
            y_min: y0.parse().map_err(|_| bad())?,
            y_max: y1.parse().map_err(|_| bad())?,
            resolution: res.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    };
    grid.validate()?;
    Ok(grid)
}

pub fn landscape(args: LandscapeArgs) -> Result<(), Failure> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let (lambda, beta, sigma) = PLANAR_DEMO_PARAMS;
    let defaults = ModelParams {
        beta,
        lambda,
        sigma,
        ..ModelParams::default()
    };
    let params = model_params(&args.model, &file, defaults);
    params.validate()?;
    let grid = match args.grid.or_else(|| file.grid.clone()) {
        Some(text) => parse_grid(&text)?,
        None => planar_demo_grid(),
    };
    let times = pick(args.times, file.times.clone(), DEFAULT_TIMES.to_vec());
    if times.is_empty() {
        return Err(Failure::config("no times requested"));
    }
    let output = pick(
        args.common.output,
        file.output.clone(),
        PathBuf::from("landscape"),
    );

    let store: PatternStore = match args.common.input.or_else(|| file.input.clone()) {
        Some(dir) => load_sequence(&dir, format_of(args.common.format, &file)?, None)?.0,
        None => planar_demo_store(),
    };
    if store.dim() != 2 {
        return Err(Failure::config(format!(
            "landscape needs two-dimensional frames, input has d = {}",
            store.dim()
        )));
    }

    for &t in &times {
        let surface = landscape_grid(&store, params.beta, params.lambda, params.sigma, t, &grid)?;
        write_text(
            &output.join(format!("landscape_t{t}.csv")),
            &surface.to_csv(),
        )?;
        let (x, y, energy) = surface.argmin();
        println!(
            "t={t} argmin=({x},{y}) energy={energy} nearest={}",
            nearest_pattern(&store, &[x, y])
        );
    }
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<(), Failure> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let original_dir = args
        .common
        .input
        .clone()
        .or_else(|| file.input.clone())
        .ok_or_else(|| Failure::config("eval needs --input"))?;
    let retrieved_dir = args
        .retrieved
        .clone()
        .or_else(|| file.retrieved.clone())
        .ok_or_else(|| Failure::config("eval needs --retrieved"))?;
    let format = format_of(args.common.format.clone(), &file)?;
    let threshold = pick(
        args.threshold,
        file.threshold,
        RetrievalConfig::default().mse_threshold,
    );
    if !(threshold > 0.0) {
        return Err(Failure::config(format!(
            "threshold must be > 0, got {threshold}"
        )));
    }
    let output = pick(
        args.common.output,
        file.output.clone(),
        retrieved_dir.clone(),
    );

    let (originals, original_shape, _) = load_frames(&original_dir, format)?;
    let (retrieved, retrieved_shape, _) = load_frames(&retrieved_dir, format)?;
    if originals.len() != retrieved.len() {
        return Err(Failure::io(format!(
            "{} original frames but {} retrieved frames",
            originals.len(),
            retrieved.len()
        )));
    }
    if original_shape != retrieved_shape {
        return Err(Failure::io(format!(
            "original frames are {original_shape}, retrieved frames are {retrieved_shape}"
        )));
    }
    let originals = PatternStore::normalized(originals)?;
    let retrieved = PatternStore::normalized(retrieved)?;
    let mse = originals
        .iter()
        .zip(retrieved.iter())
        .map(|(a, b)| mse_k(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let eta = accuracy_eta(&mse, threshold)?;
    write_json(
        &output.join("eval.json"),
        &json!({
            "mse": mse,
            "eta": eta,
            "threshold": threshold,
            "n": mse.len(),
            "original": original_dir,
            "retrieved": retrieved_dir,
        }),
    )?;
    let max = mse.iter().copied().fold(0.0, f64::max);
    let mean = mse.iter().sum::<f64>() / mse.len() as f64;
    println!(
        "N={} eta={eta:.1} mse_mean={mean:e} mse_max={max:e}",
        mse.len()
    );
    Ok(())
}
