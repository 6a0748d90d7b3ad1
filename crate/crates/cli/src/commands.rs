use anyhow::Result;
use mcf_core::kernel::HeatBall;
use mcf_core::mollifier::{pflem_identity_residual, sandwich_violations, smoothed_ecker_sandwich};
use mcf_core::quantities::{ecker_ratio, gaussian_density, huisken_integral};
use mcf_core::{
    entropy_of_slice, verify_corollary32, verify_theorem1, AmbientVec, AncientFlow, Center, EntropyResult,
    FlowSpec, KernelPoint, MollifierFamily, QuantityReport, Theorem1Report,
};

use crate::config::RunConfig;
use crate::output::{csv, OutputDir};

/// What a command tells `main` about the exit status.
pub enum Status {
    Ok,
    /// A verification ran to completion and rejected the flow.
    Rejected,
}

fn build(cfg: &RunConfig) -> Result<AncientFlow> {
    Ok(cfg.flow_spec()?.build()?)
}

fn report_csv(reports: &[QuantityReport], ambient: usize) -> String {
    csv(QuantityReport::CSV_HEADER, reports.iter().map(|r| r.csv_row(ambient)))
}

pub fn huisken(cfg: &RunConfig, out: &mut OutputDir) -> Result<Status> {
    let flow = build(cfg)?;
    let reports = cfg
        .times()
        .iter()
        .map(|&t| huisken_integral(&flow, t, &Center::ORIGIN, &cfg.quad))
        .collect::<mcf_core::Result<Vec<_>>>()?;
    out.lap("huisken");
    out.write("huisken.csv", &report_csv(&reports, flow.ambient))?;
    Ok(Status::Ok)
}

pub fn ecker(cfg: &RunConfig, out: &mut OutputDir) -> Result<Status> {
    let flow = build(cfg)?;
    let reports = cfg
        .radii()
        .iter()
        .map(|&r| ecker_ratio(&flow, &HeatBall::at_origin(r, flow.n)?, &cfg.quad))
        .collect::<mcf_core::Result<Vec<_>>>()?;
    out.lap("ecker");
    out.write("ecker.csv", &report_csv(&reports, flow.ambient))?;
    Ok(Status::Ok)
}

pub fn entropy(cfg: &RunConfig, out: &mut OutputDir) -> Result<Status> {
    let flow = build(cfg)?;
    let results = cfg
        .times()
        .iter()
        .map(|&t| entropy_of_slice(&flow, t, &cfg.optimizer, &cfg.quad))
        .collect::<mcf_core::Result<Vec<_>>>()?;
    out.lap("entropy");
    out.write(
        "entropy.csv",
        &csv(&EntropyResult::csv_header(flow.ambient), results.iter().map(|r| r.csv_row(flow.ambient))),
    )?;
    out.write_json("entropy_starts.json", &results)?;
    Ok(Status::Ok)
}

/// Densities at `(0, t0)`; `t` lists the `t0` values (default 0).
pub fn density(cfg: &RunConfig, out: &mut OutputDir) -> Result<Status> {
    let flow = build(cfg)?;
    let centers = cfg.t.clone().unwrap_or_else(|| vec![0.0]);
    let mut rows = Vec::new();
    for t0 in centers {
        let d = gaussian_density(&flow, &Center::new(AmbientVec::ZERO, t0), &cfg.quad)?;
        let l = &d.limit;
        rows.push(format!(
            "{t0:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            d.value(),
            l.error_bar,
            l.last,
            l.tail_difference,
            l.monotone
        ));
    }
    out.lap("density");
    out.write("density.csv", &csv("center_t,value,error,last,tail_difference,monotone", rows))?;
    Ok(Status::Ok)
}

pub fn verify(cfg: &RunConfig, with_entropy: bool, out: &mut OutputDir) -> Result<Status> {
    let flow = build(cfg)?;
    let schedules = cfg.schedules();
    let (report, verdict) = if with_entropy {
        let c = verify_corollary32(&flow, &schedules, &cfg.optimizer, &cfg.quad)?;
        out.lap("verify");
        let e = &c.entropy.results;
        out.write(
            "entropy.csv",
            &csv(&EntropyResult::csv_header(flow.ambient), e.iter().map(|r| r.csv_row(flow.ambient))),
        )?;
        out.write_json("entropy_comparison.json", &c)?;
        eprintln!(
            "sup lambda = {:.10} +- {:.2e}, worst excess {:.2e}",
            c.sup_lambda, c.sup_lambda_bar, c.worst_excess
        );
        (c.theorem1, c.verdict)
    } else {
        let r = verify_theorem1(&flow, &schedules, &cfg.quad)?;
        out.lap("verify");
        let v = r.verdict;
        (r, v)
    };
    out.write("limits.csv", &report.csv())?;
    out.write_json("limits.json", &report)?;
    summarize(&report);
    println!("{}", verdict.as_str());
    Ok(if verdict.accepted() { Status::Ok } else { Status::Rejected })
}

fn summarize(r: &Theorem1Report) {
    eprintln!(
        "{}: ecker {:.10} huisken {:.10} bar {:.3e} margin {:.3e}",
        r.flow, r.ecker_limit, r.huisken_limit, r.combined_bar, r.margin
    );
    for f in &r.failures {
        eprintln!("  {} at {}: {}", f.series, f.parameter, f.message);
    }
}

/// Cutoff checks per `eps`: `alpha`, the radial kernel identity on a grid,
/// the cutoff sandwich on a dense grid, and the smoothed Ecker sandwich.
pub fn mollifier(cfg: &RunConfig, out: &mut OutputDir) -> Result<Status> {
    let spec = cfg.flow.clone().unwrap_or_else(|| FlowSpec::named("circle"));
    let flow = spec.build()?;
    let radii = cfg.r.clone().unwrap_or_else(|| vec![2.0]);
    let mut points = Vec::new();
    for x in [0.0, 0.3, 1.0] {
        for t in [-1.0 / (4.0 * std::f64::consts::PI), -0.5, -2.0] {
            points.push(KernelPoint::new(AmbientVec::from_slice(&[x, 0.0]), t)?);
        }
    }
    let mut rows = Vec::new();
    let mut holds = true;
    for &eps in &cfg.eps {
        let fam = MollifierFamily::new(eps)?;
        let kernel = pflem_identity_residual(&fam, &points, flow.n)?;
        let xs: Vec<f64> = (0..=4000).map(|k| eps * (-1.0 + 3.0 * k as f64 / 4000.0)).collect();
        let violations = sandwich_violations(&fam, &xs);
        holds &= violations == 0;
        for &r in &radii {
            let s = smoothed_ecker_sandwich(&flow, r, &fam, &cfg.quad)?;
            holds &= s.holds;
            rows.push(format!(
                "{eps:.16e},{:.16e},{:.16e},{violations},{r:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                fam.alpha, kernel.max_relative, s.lower, s.value, s.upper, s.error, s.holds
            ));
        }
    }
    out.lap("mollifier");
    out.write(
        "mollifier.csv",
        &csv(
            "eps,alpha,kernel_identity_max_relative,sandwich_violations,r,lower,value,upper,error,holds",
            rows,
        ),
    )?;
    Ok(if holds { Status::Ok } else { Status::Rejected })
}
