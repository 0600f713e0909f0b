//! Sweeps and single-point evaluations driven by an [`ExperimentConfig`].

use rayon::prelude::*;

use super::config::{ExperimentConfig, SweepSpec, SweepVariable};
use super::csv::{SweepResult, Value};
use crate::channel::{build_unpolarized, reference_gain, ChannelModelKind};
use crate::design::{
    divisor_pairs, high_snr_capacity, optimal_geometry, optimal_spacing, optimize_factorization,
    polarization_eigenvalues, two_level_allocation, two_level_spectrum,
};
use crate::error::{Error, Result};
use crate::geometry::UraGeometry;
use crate::spectrum::{capacity_of_link, capacity_single_polarized, power_budget, waterfill_gains};

const SNR_CONVENTION: &str =
    "snr_db is P*beta/sigma^2 with sigma^2 = 1 and beta = (lambda/(4 pi d))^2";
const BASELINE_NORMALIZATION: &str =
    "single-polarized baseline uses the same total transmit power P";

fn header(cfg: &ExperimentConfig, command: &str, columns: Vec<String>) -> SweepResult {
    let mut r = SweepResult::new(columns);
    r.meta("command", command);
    r.meta(
        "models",
        cfg.models
            .iter()
            .map(|m| m.label())
            .collect::<Vec<_>>()
            .join(","),
    );
    r.meta("snr_convention", SNR_CONVENTION);
    if cfg.timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        r.meta("timestamp_unix", secs);
    }
    r.meta("config", cfg.to_config_string());
    r
}

fn push_all(result: &mut SweepResult, rows: Vec<Result<Vec<Value>>>) -> Result<()> {
    for row in rows {
        result.push_row(row?)?;
    }
    Ok(())
}

/// Geometry with the configured counts and spacings, falling back to the
/// optimal spacing per dimension.
fn configured_geometry(
    cfg: &ExperimentConfig,
    delta_h: Option<f64>,
    delta_v: Option<f64>,
) -> Result<UraGeometry<f64>> {
    let link = cfg.link()?;
    let dh = match delta_h.or(cfg.delta_h) {
        Some(d) => d,
        None => optimal_spacing(&link, cfg.m_h)?,
    };
    let dv = match delta_v.or(cfg.delta_v) {
        Some(d) => d,
        None => optimal_spacing(&link, cfg.m_v)?,
    };
    UraGeometry::new(cfg.m_h, cfg.m_v, dh, dv, cfg.width)
}

fn capacity_label(model: ChannelModelKind, kappa: f64, many: bool) -> String {
    if many {
        format!("capacity_{}_bits_kappa_{kappa}", model.label())
    } else {
        format!("capacity_{}_bits", model.label())
    }
}

/// Dual-polarized capacity versus antenna spacing, one column per
/// (model, kappa) pair plus optional single-polarized baselines.
pub fn run_spacing_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let spec = cfg.sweep.unwrap_or_else(SweepSpec::default_spacing);
    if spec.variable == SweepVariable::Kappa {
        return Err(Error::Config(
            "spacing-sweep varies delta, delta_h or delta_v".into(),
        ));
    }
    let points = spec.points()?;
    if points[0] < 0.0 {
        return Err(Error::Config(
            "spacing sweep must start at delta >= 0".into(),
        ));
    }

    let many = cfg.kappas.len() > 1;
    let mut columns = vec![format!("{}_m", spec.variable.label())];
    for &model in &cfg.models {
        for &k in &cfg.kappas {
            columns.push(capacity_label(model, k, many));
        }
    }
    if cfg.baseline {
        for &model in &cfg.models {
            columns.push(format!("capacity_single_pol_{}_bits", model.label()));
        }
    }
    let mut result = header(cfg, "spacing-sweep", columns);
    result.meta("sweep_variable", spec.variable.label());
    if cfg.baseline {
        result.meta("baseline", BASELINE_NORMALIZATION);
    }

    let rows: Vec<Result<Vec<Value>>> = points
        .par_iter()
        .map(|&x| spacing_row(cfg, spec.variable, x))
        .collect();
    push_all(&mut result, rows)?;
    Ok(result)
}

/// One spacing-sweep row, built from the same library calls a caller would use.
pub fn spacing_row(cfg: &ExperimentConfig, variable: SweepVariable, x: f64) -> Result<Vec<Value>> {
    let g = match variable {
        SweepVariable::Delta => configured_geometry(cfg, Some(x), Some(x))?,
        SweepVariable::DeltaH => configured_geometry(cfg, Some(x), None)?,
        SweepVariable::DeltaV => configured_geometry(cfg, None, Some(x))?,
        SweepVariable::Kappa => unreachable!("rejected by run_spacing_sweep"),
    };
    let mut row = vec![Value::Real(x)];
    for &model in &cfg.models {
        for &k in &cfg.kappas {
            row.push(
                capacity_of_link(&cfg.link_for(k)?, &g, model)?
                    .capacity
                    .into(),
            );
        }
    }
    if cfg.baseline {
        for &model in &cfg.models {
            row.push(
                capacity_single_polarized(&cfg.link()?, &g, model)?
                    .capacity
                    .into(),
            );
        }
    }
    Ok(row)
}

/// Array dimensions for every factorization of each configured `M`.
pub fn run_geometry_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let columns = [
        "m",
        "m_h",
        "m_v",
        "delta_h_m",
        "delta_v_m",
        "l_h_m",
        "l_v_m",
        "area_m2",
        "aperture_length_m",
    ];
    let mut result = header(
        cfg,
        "geometry-sweep",
        columns.iter().map(|s| s.to_string()).collect(),
    );
    let link = cfg.link()?;
    for &m in &cfg.m_values {
        for (m_h, m_v) in divisor_pairs(m) {
            let g = optimal_geometry(&link, m_h, m_v, cfg.width)?;
            let a = g.dimensions();
            result.push_row(vec![
                m.into(),
                m_h.into(),
                m_v.into(),
                g.delta_h.into(),
                g.delta_v.into(),
                a.l_h.into(),
                a.l_v.into(),
                a.area.into(),
                a.aperture_length.into(),
            ])?;
        }
    }
    Ok(result)
}

/// Capacity at the optimal spacing versus leakage, for `M = m_h * m_v`.
pub fn run_xpd_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let spec = cfg.sweep.unwrap_or_else(SweepSpec::default_kappa);
    if spec.variable != SweepVariable::Kappa {
        return Err(Error::Config("xpd-sweep varies kappa".into()));
    }
    let points = spec.points()?;
    if let Some(bad) = points.iter().find(|k| !(0.0..=0.5).contains(*k)) {
        return Err(Error::Config(format!("kappa {bad} outside [0, 1/2]")));
    }
    let columns = ["kappa", "mu1", "mu2", "capacity_bits", "closed_form"];
    let mut result = header(
        cfg,
        "xpd-sweep",
        columns.iter().map(|s| s.to_string()).collect(),
    );
    result.meta("m", cfg.m_h * cfg.m_v);
    result.meta(
        "method",
        "closed_form = 1 uses the two-level high-SNR expression; 0 water-fills the two-level spectrum",
    );
    let rows = points.iter().map(|&k| xpd_row(cfg, k)).collect();
    push_all(&mut result, rows)?;
    Ok(result)
}

pub fn xpd_row(cfg: &ExperimentConfig, kappa: f64) -> Result<Vec<Value>> {
    let link = cfg.link_for(kappa)?;
    let m = cfg.m_h * cfg.m_v;
    let beta = reference_gain(&link);
    let budget = power_budget(&link);
    let mu = polarization_eigenvalues(kappa)?;
    let alloc = two_level_allocation(mu, beta, m, budget.power, budget.noise)?;
    let (capacity, closed) = if mu.mu2 > 0.0 && alloc.both_active(budget.power) {
        (
            high_snr_capacity(mu, beta, m, budget.power, budget.noise)?,
            true,
        )
    } else {
        let gains = two_level_spectrum(mu, beta, m);
        (
            waterfill_gains(&gains, budget.power, budget.noise)?.capacity,
            false,
        )
    };
    Ok(vec![
        kappa.into(),
        mu.mu1.into(),
        mu.mu2.into(),
        capacity.into(),
        closed.into(),
    ])
}

/// Capacity of the configured geometry, for each model and leakage.
pub fn run_capacity_point(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let columns = [
        "model",
        "polarization",
        "kappa",
        "m_h",
        "m_v",
        "delta_h_m",
        "delta_v_m",
        "capacity_bits",
        "active_modes",
        "water_level",
    ];
    let mut result = header(
        cfg,
        "capacity",
        columns.iter().map(|s| s.to_string()).collect(),
    );
    let g = configured_geometry(cfg, None, None)?;
    let geo = |row: &mut Vec<Value>| {
        row.extend([
            g.m_h.into(),
            g.m_v.into(),
            g.delta_h.into(),
            g.delta_v.into(),
        ]);
    };
    for &model in &cfg.models {
        for &k in &cfg.kappas {
            let c = capacity_of_link(&cfg.link_for(k)?, &g, model)?;
            let mut row = vec![model.label().into(), "dual".into(), k.into()];
            geo(&mut row);
            row.extend([
                c.capacity.into(),
                c.active_count.into(),
                c.water_level.into(),
            ]);
            result.push_row(row)?;
        }
        if cfg.baseline {
            let c = capacity_single_polarized(&cfg.link()?, &g, model)?;
            let mut row = vec![model.label().into(), "single".into(), 0.0.into()];
            geo(&mut row);
            row.extend([
                c.capacity.into(),
                c.active_count.into(),
                c.water_level.into(),
            ]);
            result.push_row(row)?;
        }
    }
    if cfg.baseline {
        result.meta("baseline", BASELINE_NORMALIZATION);
    }
    Ok(result)
}

/// Best factorization of each configured `M` for each objective.
pub fn run_optimize(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let columns = [
        "objective",
        "m",
        "m_h",
        "m_v",
        "delta_h_m",
        "delta_v_m",
        "l_h_m",
        "l_v_m",
        "area_m2",
        "aperture_length_m",
        "ties",
        "continuous_optimum",
    ];
    let mut result = header(
        cfg,
        "optimize",
        columns.iter().map(|s| s.to_string()).collect(),
    );
    let link = cfg.link()?;
    for &m in &cfg.m_values {
        for &objective in &cfg.objectives {
            let c = optimize_factorization(m, &link, cfg.width, objective)?;
            let ties: Vec<String> = c.ties.iter().map(|(h, v)| format!("{h}x{v}")).collect();
            let ties = if ties.is_empty() {
                "none".to_string()
            } else {
                ties.join(";")
            };
            result.push_row(vec![
                objective.label().into(),
                m.into(),
                c.m_h().into(),
                c.m_v().into(),
                c.geometry.delta_h.into(),
                c.geometry.delta_v.into(),
                c.dimensions.l_h.into(),
                c.dimensions.l_v.into(),
                c.dimensions.area.into(),
                c.dimensions.aperture_length.into(),
                Value::Text(ties),
                c.continuous_optimum_attained.into(),
            ])?;
        }
    }
    Ok(result)
}

/// Largest off-diagonal of the single-polarized Gram at the optimal spacing.
pub fn run_gram_check(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let columns = [
        "model",
        "m_h",
        "m_v",
        "beta_m",
        "max_offdiag_abs",
        "max_offdiag_rel",
    ];
    let mut result = header(
        cfg,
        "gram-check",
        columns.iter().map(|s| s.to_string()).collect(),
    );
    let link = cfg.link()?;
    let g = optimal_geometry(&link, cfg.m_h, cfg.m_v, cfg.width)?;
    let beta_m = reference_gain(&link) * g.len() as f64;
    for &model in &cfg.models {
        let off = build_unpolarized(&link, &g, model)?
            .gram()
            .max_offdiag_abs();
        result.push_row(vec![
            model.label().into(),
            g.m_h.into(),
            g.m_v.into(),
            beta_m.into(),
            off.into(),
            (off / beta_m).into(),
        ])?;
    }
    Ok(result)
}
