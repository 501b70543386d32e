//! Subcommand implementations: each handler runs one library operation and
//! emits its report through the common envelope.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use zetalab_core::apoints::{rvm_compare, CountReport};
use zetalab_core::coeffs::{
    divisor_sequence, log_coeffs, logderiv_coeffs, power_coeffs, CoefficientSequence,
    EulerProductSpec,
};
use zetalab_core::eval::{beyond_validated_range, zeta_derivative, zeta_eval, ZetaEvaluator};
use zetalab_core::funceq::{
    delta_asymptotic, delta_eval, delta_invariants, delta_sqrt, DeltaInvariants,
    FunctionalEquationData,
};
use zetalab_core::scaling::{
    construct_tau_sequence, delta_limit_shape, lehto_scan, FillingDiscRecord, LimitShapeReport,
    ScalingProfile,
};
use zetalab_core::torus::{
    birkhoff_vs_space, build_exclusion, continuous_moment, discrete_moment, plancherel_check,
    selberg_clt, BlockExclusion, CltConfig, MomentReport, SelbergCltReport, TorusPoint,
    DEFAULT_PRIME_BOUND,
};
use zetalab_core::{c64, C64};

use crate::emit::{csv_writer, emit_json, finish_csv, open_path, open_sink};
use crate::tuple::load_tuple;
use crate::{ApointsAction, CliError, CoeffKind, Command, Format, FunceqAction, RunConfig,
            ScanAction, TorusAction};

/// Complex numbers leave the binary as named-field objects; the tuple form
/// of the numeric backend is an implementation detail.
#[derive(Serialize, Clone, Copy)]
struct Cx {
    re: f64,
    im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Cx {
        Cx { re: z.re, im: z.im }
    }
}

pub fn execute(cfg: &RunConfig, command: Command) -> Result<(), CliError> {
    match command {
        Command::Coeffs { kind, kappa, n } => coeffs(cfg, kind, kappa, n),
        Command::Funceq { action } => funceq(cfg, action),
        Command::Zeta {
            sigma,
            t,
            derivative,
        } => zeta(cfg, sigma, t, derivative),
        Command::Apoints { action } => apoints(cfg, action),
        Command::Scan { action } => scan(cfg, action),
        Command::Moments {
            sigma,
            k,
            big_t,
            l,
            lambda,
            threshold,
            excl_out,
        } => moments(cfg, sigma, k, big_t, l, lambda, threshold, excl_out.as_deref()),
        Command::Clt {
            big_t,
            bins,
            m,
            re_samples,
            im_samples,
            hist_out,
        } => clt(cfg, big_t, bins, m, re_samples, im_samples, hist_out.as_deref()),
        Command::Torus { action } => torus(cfg, action),
        Command::Report { file, points } => report(cfg, &file, points),
    }
}

/// Parse a scaling-profile argument: `constant:C`, `loglog:P` or
/// `logpower:C,P`.
fn parse_profile(text: &str) -> Result<ScalingProfile, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "profile must be constant:C, loglog:P or logpower:C,P, got {text:?}"
        ))
    };
    let (name, args) = text.split_once(':').ok_or_else(bad)?;
    let numbers: Vec<f64> = args
        .split(',')
        .map(|a| a.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match (name, numbers.as_slice()) {
        ("constant", [c]) => Ok(ScalingProfile::Constant(*c)),
        ("loglog", [p]) => Ok(ScalingProfile::LogLogPower(*p)),
        ("logpower", [c, p]) => Ok(ScalingProfile::LogPower {
            coeff: *c,
            power: *p,
        }),
        _ => Err(bad()),
    }
}

// ---------------------------------------------------------------------------
// coeffs
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CoeffRow {
    n: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct CoeffsPayload {
    kind: String,
    kappa: f64,
    n: usize,
    values: Vec<CoeffRow>,
}

fn coeffs(cfg: &RunConfig, kind: CoeffKind, kappa: f64, n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Domain("need at least one coefficient".into()));
    }
    let spec_bound = (n as u64).max(2);
    let seq: CoefficientSequence = match kind {
        CoeffKind::Divisor => divisor_sequence(kappa, n),
        CoeffKind::Power => power_coeffs(&EulerProductSpec::zeta(spec_bound), kappa, n)?,
        CoeffKind::Log => log_coeffs(&EulerProductSpec::zeta(spec_bound), n)?,
        CoeffKind::Logderiv => logderiv_coeffs(&EulerProductSpec::zeta(spec_bound), n)?,
    };
    match cfg.format {
        Format::Csv => {
            let mut sink = open_sink(cfg)?;
            writeln!(sink, "# schema-version: {}", crate::SCHEMA_VERSION)?;
            seq.to_csv(&mut sink)?;
            sink.flush()?;
            Ok(())
        }
        Format::Json => {
            let values = (1..=n)
                .map(|i| {
                    let v = seq.get(i);
                    CoeffRow {
                        n: i,
                        re: v.re,
                        im: v.im,
                    }
                })
                .collect();
            emit_json(
                cfg,
                "coeffs",
                CoeffsPayload {
                    kind: format!("{kind:?}").to_lowercase(),
                    kappa,
                    n,
                    values,
                },
            )
        }
    }
}

// ---------------------------------------------------------------------------
// funceq
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct InvariantsJson {
    degree: f64,
    q2lambda: f64,
    im_mu_p: f64,
    omega_p: Cx,
}

impl From<DeltaInvariants> for InvariantsJson {
    fn from(inv: DeltaInvariants) -> Self {
        Self {
            degree: inv.degree,
            q2lambda: inv.q2lambda,
            im_mu_p: inv.im_mu_p,
            omega_p: inv.omega_p.into(),
        }
    }
}

#[derive(Serialize)]
struct InvariantsPayload {
    invariants: InvariantsJson,
}

#[derive(Serialize)]
struct FunceqEvalPayload {
    s: Cx,
    delta: Cx,
    asymptotic: Cx,
    asymptotic_gap: f64,
}

fn funceq(cfg: &RunConfig, action: FunceqAction) -> Result<(), CliError> {
    match action {
        FunceqAction::Invariants { file } => {
            let p = load_tuple(&file)?;
            emit_json(
                cfg,
                "funceq-invariants",
                InvariantsPayload {
                    invariants: delta_invariants(&p).into(),
                },
            )
        }
        FunceqAction::Eval { file, sigma, t } => {
            let p = load_tuple(&file)?;
            let s = c64(sigma, t);
            let delta = delta_eval(&p, s)?;
            let asymptotic = delta_asymptotic(&p, s)?;
            emit_json(
                cfg,
                "funceq-eval",
                FunceqEvalPayload {
                    s: s.into(),
                    delta: delta.into(),
                    asymptotic: asymptotic.into(),
                    asymptotic_gap: (delta - asymptotic).norm(),
                },
            )
        }
    }
}

// ---------------------------------------------------------------------------
// zeta
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ZetaPayload {
    s: Cx,
    derivative_order: u32,
    value: Cx,
    /// Set when the ordinate lies beyond the validated height range of the
    /// error model.
    accuracy_flagged: bool,
}

fn zeta(cfg: &RunConfig, sigma: f64, t: f64, derivative: u32) -> Result<(), CliError> {
    let s = c64(sigma, t);
    let value = if derivative == 0 {
        zeta_eval(s, &cfg.eval)?
    } else {
        zeta_derivative(s, derivative, &cfg.eval)?
    };
    emit_json(
        cfg,
        "zeta",
        ZetaPayload {
            s: s.into(),
            derivative_order: derivative,
            value: value.into(),
            accuracy_flagged: beyond_validated_range(s, &cfg.eval),
        },
    )
}

// ---------------------------------------------------------------------------
// apoints
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RvmPayload {
    a: Cx,
    big_t: f64,
    report: CountReport,
}

fn apoints(cfg: &RunConfig, action: ApointsAction) -> Result<(), CliError> {
    match action {
        ApointsAction::Rvm { a, a_im, big_t } => {
            let evaluator = ZetaEvaluator::new(cfg.eval.clone());
            let target = c64(a, a_im);
            let report = rvm_compare(
                &evaluator,
                target,
                &FunctionalEquationData::zeta(),
                big_t,
                None,
            )?;
            emit_json(
                cfg,
                "apoints-rvm",
                RvmPayload {
                    a: target.into(),
                    big_t,
                    report,
                },
            )
        }
    }
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LehtoPayload {
    profile: String,
    t_lo: f64,
    t_hi: f64,
    band_lo: f64,
    band_hi: f64,
    records: Vec<FillingDiscRecord>,
}

#[derive(Serialize)]
struct TausPayload {
    ell: f64,
    tau_min: f64,
    taus: Vec<f64>,
}

#[derive(Serialize)]
struct ShapePayload {
    profile: String,
    report: LimitShapeReport,
}

fn scan(cfg: &RunConfig, action: ScanAction) -> Result<(), CliError> {
    match action {
        ScanAction::Lehto {
            t_lo,
            t_hi,
            band_lo,
            band_hi,
            profile,
        } => {
            let prof = parse_profile(&profile)?;
            let evaluator = ZetaEvaluator::new(cfg.eval.clone());
            let records = lehto_scan(
                &evaluator,
                &FunctionalEquationData::zeta(),
                (t_lo, t_hi),
                &prof,
                (band_lo, band_hi),
            )?;
            match cfg.format {
                Format::Csv => {
                    let mut writer = csv_writer(open_sink(cfg)?)?;
                    for record in &records {
                        writer
                            .serialize(record)
                            .map_err(|e| CliError::Domain(format!("CSV write failure: {e}")))?;
                    }
                    finish_csv(writer)
                }
                Format::Json => emit_json(
                    cfg,
                    "scan-lehto",
                    LehtoPayload {
                        profile,
                        t_lo,
                        t_hi,
                        band_lo,
                        band_hi,
                        records,
                    },
                ),
            }
        }
        ScanAction::Taus {
            ell,
            count,
            tau_min,
            file,
        } => {
            let p = match file {
                Some(path) => load_tuple(&path)?,
                None => FunctionalEquationData::zeta(),
            };
            let taus = construct_tau_sequence(&p, ell, count, tau_min)?;
            emit_json(cfg, "scan-taus", TausPayload { ell, tau_min, taus })
        }
        ScanAction::Shape { tau, profile, file } => {
            let p = match file {
                Some(path) => load_tuple(&path)?,
                None => FunctionalEquationData::zeta(),
            };
            let prof = parse_profile(&profile)?;
            // A ring inside the unit disc plus its center.
            let mut grid = vec![c64(0.0, 0.0)];
            for j in 0..8 {
                let angle = std::f64::consts::TAU * j as f64 / 8.0;
                grid.push(c64(0.8 * angle.cos(), 0.8 * angle.sin()));
            }
            let report = delta_limit_shape(&p, &prof, &tau, &grid)?;
            emit_json(cfg, "scan-shape", ShapePayload { profile, report })
        }
    }
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MomentsPayload {
    mode: &'static str,
    report: MomentReport,
    exclusion_density: f64,
    exclusion_threshold: f64,
}

#[allow(clippy::too_many_arguments)]
fn moments(
    cfg: &RunConfig,
    sigma: f64,
    k: u32,
    big_t: f64,
    l: Option<f64>,
    lambda: f64,
    threshold: Option<f64>,
    excl_out: Option<&Path>,
) -> Result<(), CliError> {
    if !(sigma > 0.5) {
        return Err(CliError::Domain(format!(
            "moment targets need sigma > 1/2, got {sigma}"
        )));
    }
    if !(big_t > 0.0) {
        return Err(CliError::Domain(format!("need T > 0, got {big_t}")));
    }
    let evaluator = ZetaEvaluator::new(cfg.eval.clone());
    let spec = EulerProductSpec::zeta(200_000);
    let block_l = l.unwrap_or(1.0);
    let excl = match threshold {
        Some(m) => {
            let alpha = sigma.min(1.9);
            let blocks = (big_t / block_l).ceil() as u64;
            build_exclusion(&evaluator, block_l, alpha, m, blocks)?
        }
        None => BlockExclusion::none(block_l, sigma)?,
    };
    let (mode, report) = match l {
        Some(step) => {
            let n_samples = ((big_t - lambda) / step).floor() as u64;
            let report = discrete_moment(
                &evaluator, &spec, sigma, lambda, step, k, n_samples, &excl,
            )?;
            ("discrete", report)
        }
        None => {
            let report = continuous_moment(&evaluator, &spec, sigma, k, big_t, &excl)?;
            ("continuous", report)
        }
    };
    if let Some(path) = excl_out {
        let mut writer = csv_writer(open_path(path)?)?;
        writer
            .write_record(["block", "excluded"])
            .map_err(|e| CliError::Domain(format!("CSV write failure: {e}")))?;
        for block in 1..=excl.scanned_blocks {
            let flag = if excl.is_excluded(block) { "1" } else { "0" };
            writer
                .write_record([block.to_string().as_str(), flag])
                .map_err(|e| CliError::Domain(format!("CSV write failure: {e}")))?;
        }
        finish_csv(writer)?;
    }
    emit_json(
        cfg,
        "moments",
        MomentsPayload {
            mode,
            report,
            exclusion_density: excl.density,
            exclusion_threshold: excl.threshold,
        },
    )
}

// ---------------------------------------------------------------------------
// clt
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CltPayload {
    config: CltConfig,
    report: SelbergCltReport,
}

fn clt(
    cfg: &RunConfig,
    big_t: f64,
    bins: usize,
    m: f64,
    re_samples: usize,
    im_samples: usize,
    hist_out: Option<&Path>,
) -> Result<(), CliError> {
    let evaluator = ZetaEvaluator::new(cfg.eval.clone());
    let clt_cfg = CltConfig {
        m,
        re_samples,
        im_samples,
    };
    let report = selberg_clt(&evaluator, big_t, bins, &clt_cfg)?;
    if let Some(path) = hist_out {
        let mut writer = csv_writer(open_path(path)?)?;
        writer
            .write_record(["bin_lo", "bin_hi", "count"])
            .map_err(|e| CliError::Domain(format!("CSV write failure: {e}")))?;
        let h = &report.histogram;
        let width = (h.hi - h.lo) / h.counts.len() as f64;
        for (i, count) in h.counts.iter().enumerate() {
            let lo = h.lo + width * i as f64;
            writer
                .write_record([
                    format!("{lo:.6}").as_str(),
                    format!("{:.6}", lo + width).as_str(),
                    count.to_string().as_str(),
                ])
                .map_err(|e| CliError::Domain(format!("CSV write failure: {e}")))?;
        }
        finish_csv(writer)?;
    }
    emit_json(
        cfg,
        "clt",
        CltPayload {
            config: clt_cfg,
            report,
        },
    )
}

// ---------------------------------------------------------------------------
// torus
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PlancherelPayload {
    sigma: f64,
    samples: usize,
    coefficient_length: usize,
    seed: u64,
    mc_mean: f64,
    target: f64,
    z_score: f64,
}

#[derive(Serialize)]
struct BirkhoffPayload {
    sigma: f64,
    big_t: f64,
    coefficient_length: usize,
    time_avg: f64,
    space_avg: f64,
    relative_gap: f64,
}

fn torus(cfg: &RunConfig, action: TorusAction) -> Result<(), CliError> {
    match action {
        TorusAction::Plancherel { sigma, samples, n } => {
            let a = CoefficientSequence::constant_ones(n);
            let (mc_mean, target, z_score) = plancherel_check(&a, sigma, samples, cfg.seed)?;
            emit_json(
                cfg,
                "torus-plancherel",
                PlancherelPayload {
                    sigma,
                    samples,
                    coefficient_length: n,
                    seed: cfg.seed,
                    mc_mean,
                    target,
                    z_score,
                },
            )
        }
        TorusAction::Birkhoff { sigma, big_t, n } => {
            let a = CoefficientSequence::constant_ones(n);
            let x0 = TorusPoint::zero(DEFAULT_PRIME_BOUND)?;
            let (time_avg, space_avg, relative_gap) = birkhoff_vs_space(&a, sigma, big_t, &x0)?;
            emit_json(
                cfg,
                "torus-birkhoff",
                BirkhoffPayload {
                    sigma,
                    big_t,
                    coefficient_length: n,
                    time_avg,
                    space_avg,
                    relative_gap,
                },
            )
        }
    }
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ReportPayload {
    invariants: InvariantsJson,
    points: usize,
    /// max over the critical line of ||Delta(1/2 + it)| - 1|.
    unit_modulus_max_dev: f64,
    /// max over a strip grid of |Delta(s) conj(Delta(1 - conj s)) - 1|.
    fe_product_max_dev: f64,
    /// max over the strip grid of |sqrt(Delta)^2 - Delta|.
    sqrt_consistency_max_dev: f64,
}

/// Run a battery of exact-identity checks on a tuple over deterministic
/// grids. The grids are embarrassingly parallel; the reduction is a plain
/// maximum, so the report does not depend on the thread count.
fn report(cfg: &RunConfig, file: &Path, points: usize) -> Result<(), CliError> {
    if points < 2 {
        return Err(CliError::Domain("report needs at least 2 grid points".into()));
    }
    let p = load_tuple(file)?;

    let line_devs: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|i| {
            let t = 10.0 + 40.0 * i as f64 / (points - 1) as f64;
            delta_eval(&p, c64(0.5, t)).map(|d| (d.norm() - 1.0).abs())
        })
        .collect::<zetalab_core::Result<_>>()?;

    let strip_devs: Vec<(f64, f64)> = (0..points)
        .into_par_iter()
        .map(|i| {
            // A deterministic low-discrepancy walk through the strip.
            let frac = |x: f64| x - x.floor();
            let sigma = 0.15 + 0.7 * frac(0.618_033_988_749_894_9 * i as f64);
            let t = 5.0 + 35.0 * (i as f64 + 0.5) / points as f64;
            let s = c64(sigma, t);
            let product: zetalab_core::Result<f64> = (|| {
                let left = delta_eval(&p, s)?;
                let right = delta_eval(&p, c64(1.0, 0.0) - s.conj())?.conj();
                Ok((left * right - 1.0).norm())
            })();
            let sqrt_dev: zetalab_core::Result<f64> = (|| {
                let root = delta_sqrt(&p, s)?;
                let whole = delta_eval(&p, s)?;
                Ok((root * root - whole).norm())
            })();
            match (product, sqrt_dev) {
                (Ok(a), Ok(b)) => Ok((a, b)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        })
        .collect::<zetalab_core::Result<_>>()?;

    let unit_modulus_max_dev = line_devs.iter().copied().fold(0.0f64, f64::max);
    let fe_product_max_dev = strip_devs.iter().map(|d| d.0).fold(0.0f64, f64::max);
    let sqrt_consistency_max_dev = strip_devs.iter().map(|d| d.1).fold(0.0f64, f64::max);

    emit_json(
        cfg,
        "report",
        ReportPayload {
            invariants: delta_invariants(&p).into(),
            points,
            unit_modulus_max_dev,
            fe_product_max_dev,
            sqrt_consistency_max_dev,
        },
    )
}
