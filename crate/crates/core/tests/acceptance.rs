//! Acceptance criteria for the reference setup: d = 100 m, lambda = 0.01 m,
//! W = lambda / 2, SNR = P beta / sigma^2 = 25 dB.
//!
//! Runs as a plain binary and prints one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use losmimo::experiments::{
    emit_csv, run_geometry_sweep, run_spacing_sweep, run_xpd_sweep, ExperimentConfig, SweepSpec,
    SweepStride,
};
use losmimo::{
    build_dual, build_unpolarized, capacity_of_link, channel_gain, gram_spectrum, optimal_geometry,
    optimal_spacing, optimize_factorization, polarization_eigenvalues, polarization_matrix,
    reference_gain, two_level_allocation, two_level_spectrum, waterfill_gains, ChannelModelKind,
    LinkConfig, Objective,
};

const DISTANCE: f64 = 100.0;
const WAVELENGTH: f64 = 0.01;
const WIDTH: f64 = WAVELENGTH / 2.0;
const SNR_DB: f64 = 25.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn link(kappa: f64, snr_db: f64) -> LinkConfig<f64> {
    LinkConfig::with_kappa(DISTANCE, WAVELENGTH, kappa, snr_db).unwrap()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_budget(t: Instant, budget: Duration, what: &str) -> Result<(), String> {
    let el = t.elapsed();
    check(
        el < budget,
        format!("{what} took {el:?}, budget {budget:?}"),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c1_optimal_spacing() -> Outcome {
    let d = optimal_spacing(&link(0.0, SNR_DB), 8).map_err(|e| e.to_string())?;
    check((d - 0.3535533906).abs() < 1e-10, format!("spacing {d}"))?;
    check(
        (d - 0.3535).abs() < 1e-4,
        format!("spacing {d} does not match 0.3535 to 4 decimals"),
    )?;
    Ok(format!("delta = {d:.10} m"))
}

fn c2_gram_identity() -> Outcome {
    let t = Instant::now();
    let l = link(0.0, SNR_DB);
    let beta = reference_gain(&l);
    let mut worst: f64 = 0.0;
    for m_h in [1, 2, 4, 8] {
        for m_v in [1, 2, 4, 8] {
            let g = optimal_geometry(&l, m_h, m_v, WIDTH).map_err(|e| e.to_string())?;
            let gram = build_unpolarized(&l, &g, ChannelModelKind::Approx)
                .map_err(|e| e.to_string())?
                .gram();
            let bm = beta * g.len() as f64;
            for i in 0..g.len() {
                check(
                    rel(gram[(i, i)].re, bm) < 1e-12,
                    format!("diagonal off at {m_h}x{m_v}"),
                )?;
            }
            let r = gram.max_offdiag_abs() / bm;
            check(
                r < 1e-8,
                format!("{m_h}x{m_v}: max off-diagonal {r:e} * beta M"),
            )?;
            worst = worst.max(r);
        }
    }
    within_budget(t, Duration::from_secs(1), "gram grid")?;
    Ok(format!(
        "worst off-diagonal {worst:.2e} * beta M over 16 geometries"
    ))
}

fn c3_capacity_threshold() -> Outcome {
    let t = Instant::now();
    let l = link(0.0, SNR_DB);
    let g = optimal_geometry(&l, 8, 8, WIDTH).map_err(|e| e.to_string())?;
    let c = capacity_of_link(&l, &g, ChannelModelKind::Approx)
        .map_err(|e| e.to_string())?
        .capacity;
    let closed = 128.0 * (1.0 + 10f64.powf(2.5) / 2.0).log2();
    check(c > 900.0, format!("capacity {c} below 900"))?;
    check(
        rel(c, closed) < 1e-6,
        format!("capacity {c} vs closed form {closed}"),
    )?;
    within_budget(t, Duration::from_secs(5), "capacity evaluation")?;
    Ok(format!("C = {c:.4} bits/symbol, closed form {closed:.4}"))
}

fn c4_exact_vs_approx() -> Outcome {
    let t = Instant::now();
    let l = link(0.0, SNR_DB);
    let g = optimal_geometry(&l, 8, 8, WIDTH).map_err(|e| e.to_string())?;
    let exact = capacity_of_link(&l, &g, ChannelModelKind::Exact)
        .map_err(|e| e.to_string())?
        .capacity;
    let approx = capacity_of_link(&l, &g, ChannelModelKind::Approx)
        .map_err(|e| e.to_string())?
        .capacity;
    let gap = (exact - approx).abs() / exact;
    check(
        gap < 1e-2,
        format!("|C_exact - C_approx| / C_exact = {gap:e}"),
    )?;
    within_budget(t, Duration::from_secs(10), "single-point check")?;

    let run = |spec: SweepSpec| -> Result<(f64, f64), String> {
        let cfg = ExperimentConfig {
            m_h: 8,
            m_v: 8,
            models: vec![ChannelModelKind::Exact],
            sweep: Some(spec),
            ..ExperimentConfig::default()
        };
        let r = run_spacing_sweep(&cfg).map_err(|e| e.to_string())?;
        let x = r.column_f64("delta_m").unwrap();
        let c = r.column_f64("capacity_exact_bits").unwrap();
        let (i, _) =
            c.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |b, (i, &v)| if v > b.1 { (i, v) } else { b },
            );
        Ok((x[i], c[i]))
    };
    let (argmax, peak) = run(SweepSpec::default_spacing())?;
    let coarse = SweepSpec {
        stride: SweepStride::Step(0.0025),
        ..SweepSpec::default_spacing()
    };
    let (coarse_argmax, _) = run(coarse)?;
    println!("      info: argmax on a 2.5 mm grid from 0.02 m is {coarse_argmax:.4} m");
    check(
        (argmax - 0.35355).abs() <= 0.0025,
        format!("sweep maximum at {argmax} m (capacity {peak})"),
    )?;
    check(peak > 900.0, format!("sweep peak {peak} below 900"))?;
    Ok(format!(
        "exact {exact:.4} vs approx {approx:.4} (gap {gap:.2e}); sweep argmax {argmax:.4} m, peak {peak:.3}"
    ))
}

fn c5_geometry_optimization() -> Outcome {
    let l = link(0.0, SNR_DB);
    for m in [4usize, 16, 64, 256] {
        let a = optimize_factorization(m, &l, WIDTH, Objective::Area).map_err(|e| e.to_string())?;
        check(
            a.m_h() == 1 || a.m_v() == 1,
            format!("M={m}: area optimum {}x{}", a.m_h(), a.m_v()),
        )?;
        let s = optimize_factorization(m, &l, WIDTH, Objective::ApertureLength)
            .map_err(|e| e.to_string())?;
        let root = (m as f64).sqrt() as usize;
        check(
            s.m_h() == root && s.m_v() == root,
            format!("M={m}: aperture-length optimum {}x{}", s.m_h(), s.m_v()),
        )?;
    }
    let usa = optimize_factorization(64, &l, WIDTH, Objective::ApertureLength)
        .map_err(|e| e.to_string())?;
    let side = usa.dimensions.l_h;
    check((side - 2.4799).abs() <= 1e-4, format!("USA side {side} m"))?;
    check(usa.dimensions.l_v == side, "USA not square")?;
    Ok(format!(
        "ULA for area, square for length; M=64 side {side:.5} m"
    ))
}

fn c6_spectrum_factorization() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for kappa in [0.0, 0.1, 0.5] {
        let l = link(kappa, SNR_DB);
        for (m_h, m_v, d) in [(2, 2, 0.4), (4, 2, 0.31), (4, 4, 0.2), (8, 8, 0.3)] {
            for g in [
                optimal_geometry(&l, m_h, m_v, WIDTH).map_err(|e| e.to_string())?,
                losmimo::UraGeometry::new(m_h, m_v, d, d * 1.3, WIDTH)
                    .map_err(|e| e.to_string())?,
            ] {
                let hd = build_dual(&l, &g, ChannelModelKind::Approx).map_err(|e| e.to_string())?;
                let hu = build_unpolarized(&l, &g, ChannelModelKind::Approx)
                    .map_err(|e| e.to_string())?;
                let k = polarization_matrix(kappa).map_err(|e| e.to_string())?;
                let sd = gram_spectrum(&hd).map_err(|e| e.to_string())?;
                let su = gram_spectrum(&hu).map_err(|e| e.to_string())?;
                let sk = gram_spectrum(&k).map_err(|e| e.to_string())?;
                let mut prod: Vec<f64> = sk
                    .eigenvalues
                    .iter()
                    .flat_map(|a| su.eigenvalues.iter().map(move |b| a * b))
                    .collect();
                prod.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let scale = sd.eigenvalues[0];
                for (x, y) in sd.eigenvalues.iter().zip(&prod) {
                    check(
                        (x - y).abs() <= 1e-8 * scale,
                        format!("kappa={kappa} {m_h}x{m_v}: {x} vs {y}"),
                    )?;
                }
                checked += 1;
            }
        }
    }
    within_budget(t, Duration::from_secs(10), "factorization check")?;
    Ok(format!(
        "{checked} channels, eigenvalues within 1e-8 of the largest"
    ))
}

fn c7_two_level_oracle() -> Outcome {
    let t = Instant::now();
    let beta = reference_gain(&link(0.0, SNR_DB));
    let m = 64;
    let (mut points, mut low, mut high) = (0, 0, 0);
    for ki in 0..10 {
        let kappa = ki as f64 * 0.05;
        for snr_db in [-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 25.0, 30.0, 40.0] {
            let mu = polarization_eigenvalues(kappa).map_err(|e| e.to_string())?;
            let p = 10f64.powf(snr_db / 10.0) / beta;
            let a = two_level_allocation(mu, beta, m, p, 1.0).map_err(|e| e.to_string())?;
            let wf = waterfill_gains(&two_level_spectrum(mu, beta, m), p, 1.0)
                .map_err(|e| e.to_string())?;
            let (w1, w2) = (wf.allocations[0], wf.allocations[m]);
            check(
                rel(a.q1, w1) < 1e-9,
                format!("kappa={kappa} snr={snr_db}: q1 {} vs {w1}", a.q1),
            )?;
            if a.both_active(p) {
                high += 1;
                check(
                    rel(a.q2, w2) < 1e-9,
                    format!("kappa={kappa} snr={snr_db}: q2 {} vs {w2}", a.q2),
                )?;
            } else {
                low += 1;
                check(
                    a.q2 == 0.0 && w2 == 0.0,
                    format!("kappa={kappa} snr={snr_db}: weak modes powered"),
                )?;
            }
            points += 1;
        }
    }
    check(
        points >= 50 && low > 0 && high > 0,
        "grid does not exercise both branches",
    )?;
    within_budget(t, Duration::from_secs(1), "allocation grid")?;
    Ok(format!(
        "{points} points ({high} both-active, {low} strong-only)"
    ))
}

fn c8_xpd_monotonicity() -> Outcome {
    let t = Instant::now();
    let mut report = Vec::new();
    for (snr, rising) in [(25.0, false), (-20.0, true)] {
        let cfg = ExperimentConfig {
            snr_db: snr,
            ..ExperimentConfig::default()
        };
        let r = run_xpd_sweep(&cfg).map_err(|e| e.to_string())?;
        let k = r.column_f64("kappa").unwrap();
        check(
            k.len() == 10 && (k[9] - 0.45).abs() < 1e-12,
            "unexpected kappa grid",
        )?;
        let c = r.column_f64("capacity_bits").unwrap();
        let ok = c
            .windows(2)
            .all(|w| if rising { w[1] > w[0] } else { w[1] < w[0] });
        check(ok, format!("{snr} dB: capacities {c:?}"))?;
        report.push(format!(
            "{snr} dB {} ({:.3} -> {:.3})",
            if rising { "rising" } else { "falling" },
            c[0],
            c[9]
        ));
    }
    within_budget(t, Duration::from_secs(1), "xpd sweeps")?;
    Ok(report.join("; "))
}

fn c9_frobenius() -> Outcome {
    let base = link(0.0, SNR_DB);
    let g = optimal_geometry(&base, 8, 8, WIDTH).map_err(|e| e.to_string())?;
    let mut sum_beta = 0.0;
    for m in 1..=g.len() {
        for k in 1..=g.len() {
            let dist = g
                .pairwise_distance(DISTANCE, m, k)
                .map_err(|e| e.to_string())?;
            sum_beta += channel_gain(&base, dist).map_err(|e| e.to_string())?;
        }
    }
    let norms: Vec<f64> = [0.0, 0.1, 0.25, 0.5]
        .iter()
        .map(|&k| {
            build_dual(&base.with_leakage(k), &g, ChannelModelKind::Exact)
                .unwrap()
                .frobenius_norm_sq()
        })
        .collect();
    for n in &norms {
        check(
            rel(*n, norms[0]) < 1e-12,
            format!("norms vary with kappa: {norms:?}"),
        )?;
    }
    check(
        rel(norms[0], 2.0 * sum_beta) < 1e-12,
        format!("{} vs 2 sum beta {}", norms[0], 2.0 * sum_beta),
    )?;
    Ok(format!("||H_d||_F^2 = {:.6e} = 2 sum beta_mk", norms[0]))
}

fn c10_geometry_shapes() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("geometry.csv");
    let cfg = ExperimentConfig::parse("m = 64, 256", &[]).map_err(|e| e.to_string())?;
    let result = run_geometry_sweep(&cfg).map_err(|e| e.to_string())?;
    emit_csv(&result, &path).map_err(|e| e.to_string())?;

    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (cm, ch, ca, cl) = (
        col("m"),
        col("m_h"),
        col("area_m2"),
        col("aperture_length_m"),
    );
    let mut rows: Vec<(usize, usize, f64, f64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        rows.push((
            rec[cm].parse().unwrap(),
            rec[ch].parse().unwrap(),
            rec[ca].parse().unwrap(),
            rec[cl].parse().unwrap(),
        ));
    }
    for m in [64usize, 256] {
        let root = (m as f64).sqrt() as usize;
        let mut sub: Vec<_> = rows.iter().filter(|r| r.0 == m).collect();
        sub.sort_by_key(|r| r.1);
        let area: Vec<f64> = sub.iter().map(|r| r.2).collect();
        let len: Vec<f64> = sub.iter().map(|r| r.3).collect();
        let mid = sub
            .iter()
            .position(|r| r.1 == root)
            .ok_or("square row missing")?;
        check(
            area.iter().all(|a| *a <= area[mid]),
            format!("M={m}: area not maximal at square"),
        )?;
        check(
            len.iter().all(|l| *l >= len[mid]),
            format!("M={m}: length not minimal at square"),
        )?;
        let rising = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        let falling = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
        check(
            rising(&area[..=mid]) && falling(&area[mid..]),
            format!("M={m}: area not unimodal {area:?}"),
        )?;
        check(
            falling(&len[..=mid]) && rising(&len[mid..]),
            format!("M={m}: length not unimodal {len:?}"),
        )?;
        check(
            area[0] == *area.last().unwrap(),
            format!("M={m}: ULA endpoints differ"),
        )?;
    }
    Ok(format!(
        "{} CSV rows; square maximizes area and minimizes length for M = 64, 256",
        rows.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("optimal spacing reproduction", c1_optimal_spacing),
        ("Gram identity at optimal spacing", c2_gram_identity),
        ("capacity threshold", c3_capacity_threshold),
        ("exact vs approximate tightness", c4_exact_vs_approx),
        ("geometry optimization", c5_geometry_optimization),
        ("spectrum factorization", c6_spectrum_factorization),
        ("two-level allocation oracle", c7_two_level_oracle),
        ("XPD monotonicity", c8_xpd_monotonicity),
        ("Frobenius conservation", c9_frobenius),
        ("Fig. 2/3 shape reproduction", c10_geometry_shapes),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS  {:>2}. {name} [{secs:.2}s]: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {:>2}. {name} [{secs:.2}s]: {msg}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
