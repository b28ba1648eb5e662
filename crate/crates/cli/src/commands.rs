use molrss::linkbudget::{radius_sweep, success_probability, threshold_molecules};
use molrss::montecarlo::{
    ks_statistic_from_values, l1_distance_from_masses, simulate_with, SimulationConfig,
};
use molrss::{
    ChannelParams, DiskRegion, EmpiricalDistribution, QuadratureOptions, ReceptionRule,
    SeriesStatus, SeriesTruncation, SignalDistribution,
};

use crate::config::{Command, ExperimentConfig, Model};
use crate::error::{CliError, ErrorKind};
use crate::output::{Diag, Table};

/// A finished table, plus the error to exit with once it is written (sweeps
/// keep going past failed radii).
pub struct Outcome {
    pub table: Table,
    pub deferred: Option<CliError>,
}

pub fn execute(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Outcome, CliError> {
    let ctx = Context { cfg, workers };
    let table = match cfg.command {
        Command::Pdf => ctx.pdf()?,
        Command::Cdf => ctx.cdf()?,
        Command::Simulate => ctx.simulate()?,
        Command::Success => ctx.success()?,
        Command::Threshold => ctx.threshold()?,
        Command::Sweep => return ctx.sweep(),
    };
    Ok(Outcome {
        table,
        deferred: None,
    })
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    workers: Option<usize>,
}

impl Context<'_> {
    fn params(&self, molecules: f64) -> Result<ChannelParams, CliError> {
        let c = self.cfg;
        Ok(match (c.model, c.velocity) {
            (Model::Drift, Some(v)) => {
                ChannelParams::drift_diffusion(molecules, c.diffusion, c.time, v)?
            }
            _ => ChannelParams::free_diffusion(molecules, c.diffusion, c.time)?,
        })
    }

    fn region(&self) -> Result<DiskRegion, CliError> {
        Ok(DiskRegion::new(self.cfg.radius)?)
    }

    fn distribution(&self, molecules: f64) -> Result<SignalDistribution, CliError> {
        let opts = QuadratureOptions {
            max_intervals: self.cfg.quad_max_intervals,
            ..QuadratureOptions::default()
        };
        Ok(SignalDistribution::new(self.params(molecules)?, self.region()?)?.with_quadrature(opts))
    }

    fn empirical(&self, molecules: f64) -> Result<EmpiricalDistribution, CliError> {
        let c = self.cfg;
        let mut sim = SimulationConfig::new(c.samples, c.seed, c.bins);
        if let Some(w) = self.workers {
            sim = sim.with_workers(w);
        }
        Ok(simulate_with(
            &self.params(molecules)?,
            &self.region()?,
            &sim,
        )?)
    }

    fn rule(&self) -> Result<ReceptionRule, CliError> {
        let threshold = self
            .cfg
            .threshold
            .ok_or_else(|| CliError::config("`threshold` is required"))?;
        Ok(ReceptionRule::new(threshold, self.cfg.target)?)
    }

    fn grid(&self, dist: &SignalDistribution) -> Vec<f64> {
        let (lo, hi) = self.cfg.y_range.unwrap_or_else(|| dist.support());
        let n = self.cfg.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// Analytic density against the histogram, at bin centres.
    fn pdf(&self) -> Result<Table, CliError> {
        let dist = self.distribution(self.cfg.molecules)?;
        let emp = self.empirical(self.cfg.molecules)?;
        let mut table = Table::new(&["y", "pdf_analytic", "pdf_empirical"]);
        for (y, density) in emp.bin_centers().into_iter().zip(emp.bin_densities()) {
            table.push(vec![y, dist.pdf(y), density]);
        }
        let ks = ks_statistic_from_values(&emp, &dist.cdf_log_sorted(emp.log_samples())?);
        // bin masses from the CDF side, which copes with the drift peak singularity
        let masses = emp
            .bin_edges()
            .windows(2)
            .map(|e| dist.mass_between(e[0], e[1]))
            .collect::<Result<Vec<_>, _>>()?;
        let l1 = l1_distance_from_masses(&emp, &masses);
        let (y_min, y_max) = dist.support();
        table.diag("y_min", Diag::Num(y_min));
        table.diag("y_max", Diag::Num(y_max));
        table.diag("ks", Diag::Num(ks));
        table.diag("l1", Diag::Num(l1));
        Ok(table)
    }

    /// Quadrature, series and empirical CDFs on a concentration grid.
    fn cdf(&self) -> Result<Table, CliError> {
        let cfg = self.cfg;
        let dist = self.distribution(cfg.molecules)?;
        let emp = self.empirical(cfg.molecules)?;
        let trunc = SeriesTruncation::new(cfg.series_terms, cfg.series_tol)?;
        let mut table = Table::new(&[
            "y",
            "cdf_quadrature",
            "cdf_series",
            "series_converged",
            "cdf_empirical",
        ]);
        let (mut max_dev, mut series_dev, mut converged) = (0.0f64, 0.0f64, 0u64);
        for y in self.grid(&dist) {
            let quad = dist.cdf(y)?;
            let (series, ok) = match cfg.model {
                Model::Free => {
                    let s = dist.free_cdf_series(y, &trunc)?;
                    (s.value, s.status == SeriesStatus::Converged)
                }
                Model::Drift => (f64::NAN, false),
            };
            let empirical = emp.ecdf(y);
            max_dev = max_dev.max((quad - empirical).abs());
            if ok {
                converged += 1;
                series_dev = series_dev.max((series - quad).abs());
            }
            table.push(vec![y, quad, series, if ok { 1.0 } else { 0.0 }, empirical]);
        }
        let ks = ks_statistic_from_values(&emp, &dist.cdf_log_sorted(emp.log_samples())?);
        table.diag("max_abs_deviation", Diag::Num(max_dev));
        table.diag("ks", Diag::Num(ks));
        table.diag("series_converged_points", Diag::Int(converged));
        table.diag("series_max_deviation", Diag::Num(series_dev));
        Ok(table)
    }

    /// The raw empirical distribution: histogram, or ECDF steps.
    fn simulate(&self) -> Result<Table, CliError> {
        let emp = self.empirical(self.cfg.molecules)?;
        let mut table = if self.cfg.ecdf {
            let mut t = Table::new(&["y", "ecdf"]);
            for (y, p) in emp.ecdf_points() {
                t.push(vec![y, p]);
            }
            t
        } else {
            let mut t = Table::new(&["bin_lower", "bin_upper", "probability", "density"]);
            let edges = emp.bin_edges();
            for (i, (p, d)) in emp
                .bin_probabilities()
                .iter()
                .zip(emp.bin_densities())
                .enumerate()
            {
                t.push(vec![edges[i], edges[i + 1], *p, d]);
            }
            t
        };
        table.diag("samples", Diag::Int(emp.sample_count()));
        table.diag("seed", Diag::Int(emp.seed()));
        Ok(table)
    }

    /// Success probability against molecule count. The empirical column
    /// reuses one single-molecule simulation, since the concentration is
    /// proportional to the molecule count.
    fn success(&self) -> Result<Table, CliError> {
        let cfg = self.cfg;
        let rule = self.rule()?;
        let counts = match &cfg.sweep {
            Some(s) => s.values.clone(),
            None => vec![cfg.molecules],
        };
        let unit = self.empirical(1.0)?;
        let ln_tau = rule.threshold().ln();
        let mut table = Table::new(&["molecules", "p_success_analytic", "p_success_empirical"]);
        let mut max_dev = 0.0f64;
        for m in counts {
            let analytic = success_probability(&rule, &self.distribution(m)?)?;
            let empirical = unit.exceedance_log(ln_tau - m.ln());
            max_dev = max_dev.max((analytic - empirical).abs());
            table.push(vec![m, analytic, empirical]);
        }
        table.diag("max_abs_deviation", Diag::Num(max_dev));
        match threshold_molecules(&rule, &self.params(1.0)?, &self.region()?) {
            Ok(m_star) => {
                let p = success_probability(&rule, &self.distribution(m_star)?)?;
                table.diag("threshold_molecules", Diag::Num(m_star));
                table.diag("success_at_threshold", Diag::Num(p));
            }
            Err(err) => {
                let err = CliError::from(err);
                table.diag("threshold_molecules", Diag::Num(f64::NAN));
                table.diag("threshold_error", Diag::Text(err.message));
            }
        }
        Ok(table)
    }

    fn threshold(&self) -> Result<Table, CliError> {
        let rule = self.rule()?;
        let m_star = threshold_molecules(&rule, &self.params(1.0)?, &self.region()?)?;
        let p = success_probability(&rule, &self.distribution(m_star)?)?;
        let mut table = Table::new(&["radius", "threshold_molecules", "success_probability"]);
        table.push(vec![self.cfg.radius, m_star, p]);
        Ok(table)
    }

    /// Minimum molecule count against disk radius. Failed radii get empty
    /// cells and a diagnostic; the worst failure becomes the exit status.
    fn sweep(&self) -> Result<Outcome, CliError> {
        let rule = self.rule()?;
        let radii = self
            .cfg
            .sweep
            .as_ref()
            .map(|s| s.values.clone())
            .ok_or_else(|| CliError::config("`sweep` needs a radius sweep"))?;
        let results = radius_sweep(&rule, &self.params(1.0)?, &radii)?;
        let mut table = Table::new(&["radius", "threshold_molecules", "success_probability"]);
        let mut failures: Vec<CliError> = Vec::new();
        for (r, solved) in results {
            match solved {
                Ok(m_star) => {
                    let dist = SignalDistribution::new(self.params(m_star)?, DiskRegion::new(r)?)?;
                    table.push(vec![r, m_star, success_probability(&rule, &dist)?]);
                }
                Err(err) => {
                    let err = CliError::from(err);
                    table.diag(format!("failed_radius_{}", failures.len()), Diag::Num(r));
                    table.diag(
                        format!("failed_reason_{}", failures.len()),
                        Diag::Text(err.message.clone()),
                    );
                    table.push(vec![r, f64::NAN, f64::NAN]);
                    failures.push(err);
                }
            }
        }
        let increasing = table.rows.windows(2).all(|w| w[1][1] > w[0][1]);
        table.diag("failures", Diag::Int(failures.len() as u64));
        table.diag(
            "strictly_increasing",
            Diag::Flag(failures.is_empty() && increasing),
        );
        let deferred = failures.into_iter().max_by_key(|e| match e.kind {
            ErrorKind::Config => 0,
            ErrorKind::Unachievable => 1,
            ErrorKind::NonConvergence => 2,
        });
        let deferred = deferred.map(|e| CliError {
            message: format!("sweep incomplete: {}", e.message),
            ..e
        });
        Ok(Outcome { table, deferred })
    }
}
