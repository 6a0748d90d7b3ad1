//! Entropy `lambda(M_t) = sup_{x0, t0 > 0} F_{x0,t0}(M_t)` by multi-start
//! Nelder-Mead maximization over `(x0, log t0)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{AncientFlow, EntropySpace};
use crate::kernel::log_phi_unchecked;
use crate::quad::{improper_limit, integrate_gaussian_slice, Direction, LimitEstimate, QuadConfig};
use crate::quantities::f_functional;
use crate::vector::AmbientVec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub starts: usize,
    /// Objective evaluations per start.
    pub max_evaluations: usize,
    /// Simplex diameter in scaled coordinates (`x0` in units of the start's
    /// `sqrt(t0)`, `t0` in log scale).
    pub xtol: f64,
    /// Spread of `F` over the simplex.
    pub ftol: f64,
    pub seed: u64,
    /// `t0` is searched in `[T / span, T * span]` with `T = max(|t|, 1)`.
    pub scale_span: f64,
    /// Restrict `x0` to the flow's symmetry axis; `None` follows the catalog entry.
    pub axis_only: Option<bool>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 5,
            max_evaluations: 600,
            xtol: 1e-6,
            ftol: 1e-9,
            seed: 0,
            scale_span: 1e6,
            axis_only: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.max_evaluations < 10 {
            return Err(Error::InvalidArgument("optimizer needs starts >= 1 and max_evaluations >= 10".into()));
        }
        if !(self.xtol > 0.0 && self.ftol > 0.0 && self.scale_span > 1.0) {
            return Err(Error::InvalidArgument("optimizer tolerances must be positive, scale_span > 1".into()));
        }
        Ok(())
    }
}

/// One optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartTrace {
    pub index: usize,
    pub origin: String,
    pub x0: AmbientVec,
    pub t0: f64,
    pub initial_value: f64,
    pub best_value: f64,
    pub best_x0: AmbientVec,
    pub best_t0: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyResult {
    pub t: f64,
    pub lambda: f64,
    pub x0: AmbientVec,
    pub t0: f64,
    pub starts: Vec<StartTrace>,
    /// The best start converged.
    pub converged: bool,
}

impl EntropyResult {
    pub const CSV_HEADER_PREFIX: &'static str = "t,lambda";

    /// `t,lambda,x0_1..x0_N,t0,converged` for an ambient dimension `N`.
    pub fn csv_header(ambient: usize) -> String {
        let xs: Vec<String> = (1..=ambient).map(|i| format!("x0_{i}")).collect();
        format!("t,lambda,{},t0,converged", xs.join(","))
    }

    pub fn csv_row(&self, ambient: usize) -> String {
        let xs: Vec<String> = self.x0.head(ambient).iter().map(|v| format!("{v:.16e}")).collect();
        format!(
            "{:.16e},{:.16e},{},{:.16e},{}",
            self.t,
            self.lambda,
            xs.join(","),
            self.t0,
            self.converged
        )
    }
}

/// Search coordinates: `x0 = base + sum_i y_i dirs_i`, `t0 = exp(y_last)`.
struct Coordinates {
    base: AmbientVec,
    dirs: Vec<AmbientVec>,
    log_t0_bounds: (f64, f64),
}

impl Coordinates {
    fn new(flow: &AncientFlow, t: f64, opt: &OptimizerConfig) -> Self {
        let axis_only = opt
            .axis_only
            .unwrap_or(!matches!(flow.entropy_space, EntropySpace::Full));
        let (base, dirs) = match flow.entropy_space {
            EntropySpace::Line(axis) if axis_only => (axis.point, vec![axis.dir]),
            EntropySpace::Point(p) if axis_only => (p, Vec::new()),
            _ => (AmbientVec::ZERO, (0..flow.ambient).map(AmbientVec::unit).collect()),
        };
        let scale = t.abs().max(1.0);
        Self {
            base,
            dirs,
            log_t0_bounds: ((scale / opt.scale_span).ln(), (scale * opt.scale_span).ln()),
        }
    }

    fn dim(&self) -> usize {
        self.dirs.len() + 1
    }

    fn encode(&self, x0: &AmbientVec, t0: f64) -> Vec<f64> {
        let d = *x0 - self.base;
        let mut y: Vec<f64> = self.dirs.iter().map(|e| d.dot(e)).collect();
        y.push(t0.ln());
        self.clamp(y)
    }

    fn decode(&self, y: &[f64]) -> (AmbientVec, f64) {
        let mut x = self.base;
        for (e, c) in self.dirs.iter().zip(y) {
            x += *e * *c;
        }
        (x, y[self.dirs.len()].exp())
    }

    fn clamp(&self, mut y: Vec<f64>) -> Vec<f64> {
        let k = self.dirs.len();
        y[k] = y[k].clamp(self.log_t0_bounds.0, self.log_t0_bounds.1);
        y
    }
}

/// Nelder-Mead maximization of `f` from `start` with per-coordinate initial
/// steps `step`; points are projected by `project` before evaluation.
/// Returns the best point, its value, the evaluation count and convergence.
fn nelder_mead<F, P>(
    f: F,
    project: P,
    start: Vec<f64>,
    step: &[f64],
    scale: &[f64],
    opt: &OptimizerConfig,
) -> Result<(Vec<f64>, f64, usize, bool)>
where
    F: Fn(&[f64]) -> Result<f64>,
    P: Fn(Vec<f64>) -> Vec<f64>,
{
    let d = start.len();
    let mut evals = 0usize;
    let eval = |y: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        f(y)
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut origin = project(start);
    // restart from the best point until a fresh simplex no longer improves
    for _restart in 0..4 {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        let v0 = eval(&origin, &mut evals)?;
        simplex.push((origin.clone(), v0));
        for i in 0..d {
            let mut y = origin.clone();
            y[i] += step[i];
            let mut y = project(y);
            if y == origin {
                y[i] -= 2.0 * step[i];
                y = project(y);
            }
            let v = eval(&y, &mut evals)?;
            simplex.push((y, v));
        }
        let mut converged = false;
        while evals < opt.max_evaluations {
            // descending by value, ties by insertion order
            simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
            let spread = simplex[0].1 - simplex[d].1;
            let diameter = simplex
                .iter()
                .skip(1)
                .map(|(y, _)| {
                    y.iter()
                        .zip(&simplex[0].0)
                        .zip(scale)
                        .map(|((a, b), s)| ((a - b) / s).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread <= opt.ftol && diameter <= opt.xtol {
                converged = true;
                break;
            }
            let centroid: Vec<f64> = (0..d)
                .map(|j| simplex[..d].iter().map(|(y, _)| y[j]).sum::<f64>() / d as f64)
                .collect();
            let worst = simplex[d].clone();
            let along = |k: f64| -> Vec<f64> {
                project(
                    centroid
                        .iter()
                        .zip(&worst.0)
                        .map(|(c, w)| c + k * (c - w))
                        .collect(),
                )
            };
            let yr = along(1.0);
            let fr = eval(&yr, &mut evals)?;
            if fr > simplex[0].1 {
                let ye = along(2.0);
                let fe = eval(&ye, &mut evals)?;
                simplex[d] = if fe > fr { (ye, fe) } else { (yr, fr) };
                continue;
            }
            if fr > simplex[d - 1].1 {
                simplex[d] = (yr, fr);
                continue;
            }
            let (yc, fc) = if fr > worst.1 {
                let y = along(0.5);
                let v = eval(&y, &mut evals)?;
                (y, v)
            } else {
                let y = along(-0.5);
                let v = eval(&y, &mut evals)?;
                (y, v)
            };
            if fc > worst.1.max(fr) {
                simplex[d] = (yc, fc);
                continue;
            }
            // shrink toward the best vertex
            let b = simplex[0].0.clone();
            for vtx in simplex.iter_mut().skip(1) {
                let y = project(vtx.0.iter().zip(&b).map(|(v, bb)| bb + 0.5 * (v - bb)).collect());
                let v = eval(&y, &mut evals)?;
                *vtx = (y, v);
            }
        }
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (y, v) = simplex[0].clone();
        let improved = match &best {
            Some((_, bv)) => v > bv + opt.ftol,
            None => true,
        };
        if improved || best.is_none() {
            best = Some((y.clone(), v));
        }
        if !improved || !converged || evals >= opt.max_evaluations {
            let (y, v) = best.expect("best point");
            return Ok((y, v, evals, converged));
        }
        origin = y;
    }
    let (y, v) = best.expect("best point");
    Ok((y, v, evals, true))
}

/// Gaussian-weighted centroid of the slice `M_t`, weight centered at
/// `(reference, t + t0)`.
fn weighted_centroid(
    flow: &AncientFlow,
    t: f64,
    reference: &AmbientVec,
    t0: f64,
    cfg: &QuadConfig,
) -> Result<AmbientVec> {
    let f = flow.recentered(*reference, t + t0);
    let n = flow.n;
    let weight = |g: &crate::flows::SliceGeometry| log_phi_unchecked(g.x.norm2(), -t0, n).exp();
    let mass = integrate_gaussian_slice(&f, -t0, weight, cfg)?.value;
    if !(mass > 0.0) {
        return Ok(*reference);
    }
    // moments vanish by symmetry on many flows; a start point only needs them
    // to a fraction of the Gaussian width
    let loose = QuadConfig {
        abs_tol: 1e-6 * mass * t0.sqrt(),
        ..*cfg
    };
    let mut c = *reference;
    for i in 0..flow.ambient {
        let m = integrate_gaussian_slice(&f, -t0, |g| g.x[i] * weight(g), &loose)?.value;
        c[i] += m / mass;
    }
    Ok(c)
}

/// `lambda(M_t)` by multi-start maximization of the F-functional.
pub fn entropy_of_slice(
    flow: &AncientFlow,
    t: f64,
    opt: &OptimizerConfig,
    cfg: &QuadConfig,
) -> Result<EntropyResult> {
    opt.validate()?;
    if !(t < 0.0) {
        return Err(Error::Domain(format!("entropy needs t < 0, got {t}")));
    }
    flow.check_time(t)?;
    let coords = Coordinates::new(flow, t, opt);
    let reference = flow.anchor(t)?;

    // starts: weighted centroids at three scales, the Huisken center (0, 0),
    // then seeded perturbations of the first
    let mut starts: Vec<(String, AmbientVec, f64)> = Vec::new();
    for (label, t0) in [("centroid/4", -t / 4.0), ("centroid", -t), ("centroid*4", -4.0 * t)] {
        let c = weighted_centroid(flow, t, &reference, t0, cfg)?;
        starts.push((label.to_string(), c, t0));
    }
    starts.push(("huisken_center".to_string(), AmbientVec::ZERO, -t));
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed);
    let mut k = 0;
    while starts.len() < opt.starts {
        let (_, x, t0) = starts[k % 4].clone();
        let mut x = x;
        for e in &coords.dirs {
            x += *e * (rng.gen_range(-1.0..1.0) * t0.sqrt());
        }
        let t0 = t0 * rng.gen_range(-1.0f64..1.0).exp();
        starts.push((format!("perturbed#{k}"), x, t0));
        k += 1;
    }
    starts.truncate(opt.starts);

    let run = |(index, (label, x, t0)): (usize, &(String, AmbientVec, f64))| -> Result<StartTrace> {
        let y0 = coords.encode(x, *t0);
        let (_, t0c) = coords.decode(&y0);
        let width = t0c.sqrt();
        let d = coords.dim();
        let mut step = vec![0.5 * width; d];
        step[d - 1] = 0.5;
        let mut scale = vec![width; d];
        scale[d - 1] = 1.0;
        let objective = |y: &[f64]| -> Result<f64> {
            let (x0, t0) = coords.decode(y);
            f_functional(flow, t, &x0, t0, cfg)
        };
        let initial_value = objective(&y0)?;
        let (yb, vb, evals, converged) =
            nelder_mead(objective, |y| coords.clamp(y), y0.clone(), &step, &scale, opt)?;
        let (x0s, t0s) = coords.decode(&y0);
        let (bx, bt) = coords.decode(&yb);
        Ok(StartTrace {
            index,
            origin: label.clone(),
            x0: x0s,
            t0: t0s,
            initial_value,
            best_value: vb,
            best_x0: bx,
            best_t0: bt,
            evaluations: evals + 1,
            converged,
        })
    };
    let traces: Vec<StartTrace> = if cfg.parallel {
        starts.par_iter().enumerate().map(run).collect::<Result<_>>()?
    } else {
        starts.iter().enumerate().map(run).collect::<Result<_>>()?
    };
    // best value, ties to the lowest start index
    let best = traces
        .iter()
        .fold(None::<&StartTrace>, |acc, s| match acc {
            Some(b) if b.best_value >= s.best_value => Some(b),
            _ => Some(s),
        })
        .ok_or_else(|| Error::Optimizer("no optimizer starts".into()))?;
    Ok(EntropyResult {
        t,
        lambda: best.best_value,
        x0: best.best_x0,
        t0: best.best_t0,
        converged: best.converged,
        starts: traces.clone(),
    })
}

/// Entropy along a decreasing schedule of times, with the `t -> -inf` limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropySchedule {
    pub results: Vec<EntropyResult>,
    /// `lambda` non-decreasing as `t` decreases, within `slack`.
    pub monotone: bool,
    pub slack: f64,
    /// Limit of `lambda` as `t -> -inf`, the `sup_t lambda(M_t)` estimate.
    pub limit: LimitEstimate,
}

/// Default slack of the monotonicity verdict.
pub const ENTROPY_SLACK: f64 = 1e-4;

pub fn entropy_schedule(
    flow: &AncientFlow,
    times: &[f64],
    opt: &OptimizerConfig,
    cfg: &QuadConfig,
) -> Result<EntropySchedule> {
    if times.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("entropy schedule must be decreasing in t".into()));
    }
    let results = times
        .iter()
        .map(|&t| entropy_of_slice(flow, t, opt, cfg))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = results.iter().map(|r| r.lambda).collect();
    let scales: Vec<f64> = times.iter().map(|t| t.abs()).collect();
    let limit = improper_limit(&scales, &values, 0.0, Direction::NonDecreasing, ENTROPY_SLACK)?;
    Ok(EntropySchedule {
        monotone: limit.monotone,
        slack: ENTROPY_SLACK,
        results,
        limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_dimension_follows_entropy_space() {
        let opt = OptimizerConfig::default();
        let dims = |name: &str| Coordinates::new(&crate::flows::by_name(name).unwrap(), -1.0, &opt).dim();
        assert_eq!(dims("cylinder"), 1);
        assert_eq!(dims("bowl"), 2);
        assert_eq!(dims("plane"), 3);
        let full = OptimizerConfig {
            axis_only: Some(false),
            ..opt
        };
        let cyl = crate::flows::by_name("cylinder").unwrap();
        assert_eq!(Coordinates::new(&cyl, -1.0, &full).dim(), 4);
    }

    #[test]
    fn nelder_mead_finds_quadratic_peak() {
        let opt = OptimizerConfig::default();
        let f = |y: &[f64]| Ok(3.0 - (y[0] - 1.0).powi(2) - 2.0 * (y[1] + 0.5).powi(2));
        let (y, v, _, conv) = nelder_mead(f, |y| y, vec![0.0, 0.0], &[0.3, 0.3], &[1.0, 1.0], &opt).unwrap();
        assert!(conv);
        assert!((v - 3.0).abs() < 1e-9);
        assert!((y[0] - 1.0).abs() < 1e-4 && (y[1] + 0.5).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_respects_projection() {
        let opt = OptimizerConfig::default();
        // increasing in y[1]; the box caps it at 2
        let f = |y: &[f64]| Ok(-(y[0] - 0.2).powi(2) + y[1]);
        let proj = |mut y: Vec<f64>| {
            y[1] = y[1].min(2.0);
            y
        };
        let (y, v, _, _) = nelder_mead(f, proj, vec![0.0, 0.0], &[0.5, 0.5], &[1.0, 1.0], &opt).unwrap();
        assert!((y[1] - 2.0).abs() < 1e-12);
        assert!((v - 2.0).abs() < 1e-8);
    }
}
