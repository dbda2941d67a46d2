//! The seven subcommands, mapped onto the library operations.

use crate::args::*;
use crate::io::{self, ClassificationReport};
use crate::verify;
use anyhow::{anyhow, Context, Result};
use jetgeo::analysis::{classify, decompose_band, default_window, period_shift, PeriodData};
use jetgeo::dynamics::{integrate, GeodesicState, IntegrationOptions};
use jetgeo::jet::{CanonicalMomenta, JetDim, JetPoint, ReducedMomenta};
use jetgeo::poisson::casimirs;
use jetgeo::synthesis::{build_profile, synthesize, FProfile};
use std::path::Path;

/// Process exit codes: 1 config, 2 numerical, 3 verification.
pub enum AppError {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
    Verification,
}

impl AppError {
    pub fn code(&self) -> u8 {
        match self {
            AppError::Config(_) => 1,
            AppError::Numerical(_) => 2,
            AppError::Verification => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            AppError::Config(e) => format!("config error: {e:#}"),
            AppError::Numerical(e) => format!("numerical failure: {e:#}"),
            AppError::Verification => "verification failed".to_owned(),
        }
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> AppError {
    AppError::Config(e.into())
}

/// Core errors raised after validation are numerical failures; everything
/// rejected up front is a config error.
fn core_err(e: jetgeo::Error) -> AppError {
    use jetgeo::Error::*;
    match e {
        DimensionMismatch { .. } | IndexOutOfRange { .. } | DegreeTooHigh { .. }
        | InvalidAnchorSlope { .. } | WindowInverted { .. } | InvalidParameter(_) => {
            AppError::Config(anyhow!("{e}"))
        }
        _ => AppError::Numerical(anyhow!("{e}")),
    }
}

pub fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Integrate(args) => cmd_integrate(args),
        Command::Synthesize(args) => cmd_synthesize(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Period(args) => cmd_period(args),
        Command::Casimirs(args) => cmd_casimirs(args),
        Command::Gallery(args) => cmd_gallery(args),
        Command::Verify(args) => {
            if verify::run_suite(args.seed) {
                Ok(())
            } else {
                Err(AppError::Verification)
            }
        }
    }
}

fn validated_options(tol: &TolArgs, grid: &GridArgs) -> Result<IntegrationOptions, AppError> {
    if !(tol.rel_tol > 0.0) || !(tol.abs_tol > 0.0) {
        return Err(AppError::Config(anyhow!(
            "tolerances must be strictly positive"
        )));
    }
    Ok(IntegrationOptions {
        rel_tol: tol.rel_tol,
        abs_tol: tol.abs_tol,
        grid: grid.to_grid(),
    })
}

fn cmd_integrate(args: IntegrateArgs) -> Result<(), AppError> {
    JetDim::new(args.k).map_err(core_err)?;
    let u = match &args.u0 {
        Some(text) => parse_f64_list(text).map_err(config_err)?,
        None => vec![0.0; args.k],
    };
    if u.len() != args.k {
        return Err(AppError::Config(anyhow!(
            "--u0 wants exactly k = {} values",
            args.k
        )));
    }
    let q = JetPoint::new(args.x0, u, args.y0);
    let p = match (&args.reduced_p, &args.canonical_p) {
        (Some(text), _) => {
            let v = parse_f64_list(text).map_err(config_err)?;
            if v.len() != args.k + 2 {
                return Err(AppError::Config(anyhow!(
                    "--reduced-p wants k+2 = {} values",
                    args.k + 2
                )));
            }
            ReducedMomenta::new(v).map_err(core_err)?
        }
        (None, Some(text)) => {
            let v = parse_f64_list(text).map_err(config_err)?;
            if v.len() != args.k + 2 {
                return Err(AppError::Config(anyhow!(
                    "--canonical-p wants k+2 = {} values (p_x, p_1..p_k, p_y)",
                    args.k + 2
                )));
            }
            let m = CanonicalMomenta::new(v[0], v[1..=args.k].to_vec(), v[args.k + 1]);
            jetgeo::jet::power_functions(&q, &m).map_err(core_err)?
        }
        (None, None) => {
            return Err(AppError::Config(anyhow!(
                "one of --reduced-p / --canonical-p is required"
            )))
        }
    };
    let opts = validated_options(&args.tol, &args.grid)?;
    let init = GeodesicState::new(q, p, 0.0).map_err(core_err)?;
    let arc = integrate(&init, args.s_span, &opts).map_err(core_err)?;
    io::write_text(&args.out, &io::trajectory_csv(&arc))
        .map_err(|e| AppError::Numerical(e))?;
    println!("maxInvariantDrift {:.6e}", arc.max_invariant_drift);
    Ok(())
}

fn cmd_synthesize(args: SynthesizeArgs) -> Result<(), AppError> {
    let resolved = args.profile.resolve().map_err(config_err)?;
    let dim = JetDim::new(resolved.k).map_err(core_err)?;
    if !(args.s_span > 0.0) {
        return Err(AppError::Config(anyhow!("--s-span must be positive")));
    }
    let opts = validated_options(&args.tol, &args.grid)?;
    let mut q0 = JetPoint::origin(dim);
    q0.x = resolved.spec.anchor_x;
    let half = 0.5 * args.s_span;
    let arc = synthesize(&resolved.spec, dim, &q0, (-half, half), &opts).map_err(core_err)?;
    let out = args
        .profile
        .out
        .clone()
        .ok_or_else(|| AppError::Config(anyhow!("--out is required")))?;
    match args.format {
        Format::Csv => io::write_text(&out, &io::trajectory_csv(&arc)),
        Format::Svg => io::write_text(&out, &io::planar_svg(&[io::planar_points(&arc)])),
        Format::Json => {
            let prof = build_profile(&resolved.spec, dim).map_err(core_err)?;
            let residual = jetgeo::synthesis::roundtrip_residual(&arc, &prof);
            let doc = serde_json::json!({
                "k": resolved.k,
                "samples": arc.samples.len(),
                "maxInvariantDrift": arc.max_invariant_drift,
                "roundtripResidual": residual,
                "planar": io::planar_points(&arc),
            });
            io::write_text(&out, &serde_json::to_string_pretty(&doc).expect("json"))
        }
    }
    .map_err(AppError::Numerical)?;
    println!("maxInvariantDrift {:.6e}", arc.max_invariant_drift);
    Ok(())
}

fn profile_report(
    prof: &FProfile,
    window: Option<(f64, f64)>,
    quad_tol: f64,
) -> Result<ClassificationReport, AppError> {
    let window = window.unwrap_or_else(|| default_window(prof));
    let band = decompose_band(prof, window).map_err(core_err)?;
    let mut intervals = Vec::new();
    for iv in &band.intervals {
        let class = classify(iv);
        let pd = if iv.x0.is_synthetic() || iv.x1.is_synthetic() {
            PeriodData {
                length: None,
                tau: None,
                action: f64::NAN,
                quadrature_error: f64::NAN,
            }
        } else {
            period_shift(prof, iv, quad_tol).map_err(core_err)?
        };
        intervals.push(io::interval_report(iv, class, &pd));
    }
    Ok(ClassificationReport { intervals })
}

fn emit_json<T: serde::Serialize>(doc: &T, out: Option<&Path>) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(doc).expect("json");
    match out {
        Some(path) => io::write_text(path, &text).map_err(AppError::Numerical)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_classify(args: ProfileArgs) -> Result<(), AppError> {
    let resolved = args.resolve().map_err(config_err)?;
    let dim = JetDim::new(resolved.k).map_err(core_err)?;
    let prof = build_profile(&resolved.spec, dim).map_err(core_err)?;
    let report = profile_report(&prof, resolved.window, args.quad_tol)?;
    emit_json(&report, args.out.as_deref())
}

fn cmd_period(args: PeriodArgs) -> Result<(), AppError> {
    let resolved = args.profile.resolve().map_err(config_err)?;
    let dim = JetDim::new(resolved.k).map_err(core_err)?;
    let prof = build_profile(&resolved.spec, dim).map_err(core_err)?;
    let window = resolved.window.unwrap_or_else(|| default_window(&prof));
    let band = decompose_band(&prof, window).map_err(core_err)?;
    let iv = band
        .intervals
        .get(args.interval_index)
        .ok_or_else(|| {
            AppError::Config(anyhow!(
                "interval index {} out of range ({} intervals)",
                args.interval_index,
                band.intervals.len()
            ))
        })?;
    let pd = period_shift(&prof, iv, args.profile.quad_tol).map_err(core_err)?;
    let report = io::interval_report(iv, classify(iv), &pd);
    emit_json(&report, args.profile.out.as_deref())
}

fn cmd_casimirs(args: CasimirsArgs) -> Result<(), AppError> {
    let dim = JetDim::new(args.k).map_err(core_err)?;
    let doc = io::casimir_doc(&casimirs(dim));
    emit_json(&doc, args.out.as_deref())
}

fn cmd_gallery(args: GalleryArgs) -> Result<(), AppError> {
    use jetgeo::gallery;
    std::fs::create_dir_all(&args.out_dir)
        .context("creating output directory")
        .map_err(AppError::Numerical)?;
    let mut manifest = Vec::new();

    if args.figure1 {
        for curve in gallery::figure_suite().map_err(core_err)? {
            let file = format!("{}.svg", curve.label);
            let path = args.out_dir.join(&file);
            io::write_text(&path, &io::planar_svg(&[io::planar_points(&curve.arc)]))
                .map_err(AppError::Numerical)?;
            manifest.push(serde_json::json!({
                "label": curve.label,
                "alpha": curve.alpha,
                "class": curve.class.as_str(),
                "selfIntersections": curve.self_intersections,
                "intervals": curve.band.intervals.len(),
                "svg": file,
                "samples": curve.arc.samples.len(),
            }));
        }
    }
    if let Some(text) = &args.convict {
        let v = parse_f64_list(text).map_err(config_err)?;
        if v.len() != 3 {
            return Err(AppError::Config(anyhow!("--convict wants \"k,a,alpha\"")));
        }
        let params = gallery::ConvictParams::new(v[0] as usize, v[1], v[2]).map_err(core_err)?;
        let arc = gallery::convict_arc(&params, args.s_extent).map_err(core_err)?;
        let file = format!("convict-k{}-a{}-alpha{}.svg", v[0] as usize, v[1], v[2]);
        io::write_text(
            &args.out_dir.join(&file),
            &io::planar_svg(&[io::planar_points(&arc)]),
        )
        .map_err(AppError::Numerical)?;
        let defect = gallery::theta_ode_defect(&arc, &params).map_err(core_err)?;
        manifest.push(serde_json::json!({
            "label": "convict",
            "k": v[0] as usize, "a": v[1], "alpha": v[2],
            "thetaOdeDefect": defect,
            "svg": file,
        }));
    }
    if let Some(m) = args.graph {
        let arc = gallery::graph_arc(m, args.s_extent).map_err(core_err)?;
        let file = format!("graph-m{m}.svg");
        io::write_text(
            &args.out_dir.join(&file),
            &io::planar_svg(&[io::planar_points(&arc)]),
        )
        .map_err(AppError::Numerical)?;
        manifest.push(serde_json::json!({
            "label": "geodesic-graph",
            "m": m,
            "svg": file,
        }));
    }
    if manifest.is_empty() {
        return Err(AppError::Config(anyhow!(
            "nothing to produce: pass --figure1, --convict or --graph"
        )));
    }
    let doc = serde_json::json!({ "curves": manifest });
    io::write_text(
        &args.out_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&doc).expect("json"),
    )
    .map_err(AppError::Numerical)?;
    println!("gallery written to {}", args.out_dir.display());
    Ok(())
}
