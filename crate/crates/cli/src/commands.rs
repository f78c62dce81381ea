use clap::Args;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use yanglee::entanglement::{ee_scaling_fit, state_ee, Filling};
use yanglee::numerics::linear_fit;
use yanglee::ssh::{
    corr_asymptotic, corr_real, critical_distance, fit_exponents, yang_lee_root_count, zeros_region_scan,
    Channel, CorrSeries, SshParams, SshZeroSet,
};
use yanglee::xxz::{
    ed_gap, ground_state, locate_zeros_numeric, magnon_energy_and_gap, sbae_solve_seeded, susceptibility_scaling,
    theorem1_polynomial, theorem1_zeros, verify_theorem1, SearchOptions, SearchWindow, XxzParams,
};

use crate::output::{complex, Cell, Report, Table};
use crate::{CliError, GlobalArgs};

const DEFAULT_ZERO_TOL: f64 = 1e-8;

pub const SSH_ZEROS_SCAN_HELP: &str = "CSV columns: w_minus_v,T,has_zeros,chi\nWith --boundary: T,w_minus_v,onset";
pub const SSH_CHI_HELP: &str = "CSV columns: beta,chi,formula,ratio\nWith --list: n,k,im_energy";
pub const SSH_CORR_HELP: &str = "CSV columns: x,re_c,im_c,re_asym,im_asym,re_ratio,im_ratio\n\
With --fit: delta,xi_fit,xi_exact,power,r2 (v = w + u + delta per row)";
pub const SSH_EE_HELP: &str = "CSV columns: l_a,re_s,im_s";
pub const XXZ_POLY_HELP: &str = "CSV columns: exponent,coefficient";
pub const XXZ_ZEROS_HELP: &str = "CSV columns: re_delta,im_delta,provenance,residual";
pub const XXZ_VERIFY_HELP: &str = "CSV columns: n,re_analytic,im_analytic,re_numeric,im_numeric,distance";
pub const XXZ_SBAE_HELP: &str = "CSV columns: m,index,re_zeta,im_zeta";
pub const XXZ_EE_HELP: &str = "CSV columns: l_a,s,log_sin";
pub const XXZ_GAP_HELP: &str = "CSV columns: L,re_delta,im_delta,ed_gap,formula,rel_error";
pub const XXZ_SUSCEPTIBILITY_HELP: &str = "CSV columns: delta,h,m_star,chi,chi_integer";

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 || !(lo < hi) {
        return Err(CliError::Usage(format!("need at least 2 points on an increasing range, got {n} on [{lo}, {hi}]")));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SshZerosScanArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub d_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub d_max: f64,
    #[arg(long, default_value_t = 200)]
    pub nd: usize,
    #[arg(long, default_value_t = 0.005)]
    pub t_min: f64,
    #[arg(long, default_value_t = 0.1)]
    pub t_max: f64,
    #[arg(long, default_value_t = 50)]
    pub nt: usize,
    /// Inverse temperatures; replaces the T grid.
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    /// Emit the region boundary instead of the cells.
    #[arg(long)]
    pub boundary: bool,
}

pub fn ssh_zeros_scan(a: &SshZerosScanArgs) -> Result<Report, CliError> {
    let detuning = linspace(a.d_min, a.d_max, a.nd)?;
    let temperatures = match &a.betas {
        Some(b) => b.iter().map(|b| 1.0 / b).collect(),
        None => linspace(a.t_min, a.t_max, a.nt)?,
    };
    let scan = zeros_region_scan(a.u, &detuning, &temperatures)?;
    let mut report = if a.boundary {
        let mut t = Table::new(&["T", "w_minus_v", "onset"]);
        for b in &scan.boundary {
            t.push(vec![b.temperature.into(), b.w_minus_v.into(), b.onset.into()]);
        }
        Report::new(t)
    } else {
        let mut t = Table::new(&["w_minus_v", "T", "has_zeros", "chi"]);
        for cell in scan.cells.iter().flatten() {
            t.push(vec![
                cell.w_minus_v.into(),
                cell.temperature.into(),
                cell.has_zeros.into(),
                cell.chi.into(),
            ]);
        }
        Report::new(t)
    };
    report.note("boundary_points", scan.boundary.len());
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SshChiArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub v: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub w: f64,
    #[arg(long, default_value_t = 100.0)]
    pub beta: f64,
    /// List every zero instead of the count.
    #[arg(long)]
    pub list: bool,
}

pub fn ssh_chi(a: &SshChiArgs) -> Result<Report, CliError> {
    let p = SshParams::new(a.u, a.v, a.w)?;
    let set = yang_lee_root_count(&p, a.beta)?;
    let formula = SshZeroSet::asymptotic_chi(&p, a.beta);
    let ratio = set.chi as f64 / formula;
    let mut report = if a.list {
        let mut t = Table::new(&["n", "k", "im_energy"]);
        for e in &set.entries {
            let im = (2 * e.n + 1) as f64 * std::f64::consts::PI / a.beta;
            t.push(vec![(e.n as i64).into(), e.k.into(), im.into()]);
        }
        Report::new(t)
    } else {
        let mut t = Table::new(&["beta", "chi", "formula", "ratio"]);
        t.push(vec![a.beta.into(), set.chi.into(), formula.into(), ratio.into()]);
        Report::new(t)
    };
    report.note("chi", set.chi);
    report.note_f64("formula", formula);
    report.note_f64("ratio", ratio);
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SshCorrArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 2.05, allow_hyphen_values = true)]
    pub v: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub w: f64,
    #[arg(long, default_value = "AA", value_parser = ["AA", "AB", "BA", "BB"])]
    pub channel: String,
    #[arg(long, default_value_t = 1)]
    pub x_min: i64,
    #[arg(long, default_value_t = 40)]
    pub x_max: i64,
    /// Fit ν and η over a δ grid instead of listing correlations.
    #[arg(long)]
    pub fit: bool,
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.1")]
    pub deltas: Vec<f64>,
    /// Fit window in units of ξ.
    #[arg(long, default_value_t = 3.0)]
    pub xi_lo: f64,
    #[arg(long, default_value_t = 10.0)]
    pub xi_hi: f64,
}

pub fn ssh_corr(a: &SshCorrArgs) -> Result<Report, CliError> {
    let channel: Channel = a.channel.parse()?;
    if a.fit {
        let series = a
            .deltas
            .iter()
            .map(|&d| CorrSeries::sample(&SshParams::new(a.u, a.w + a.u + d, a.w)?, channel, a.xi_lo, a.xi_hi))
            .collect::<yanglee::Result<Vec<_>>>()?;
        let fit = fit_exponents(&series)?;
        let mut t = Table::new(&["delta", "xi_fit", "xi_exact", "power", "r2"]);
        for r in &fit.xi_table {
            t.push(vec![r.delta.into(), r.xi_fit.into(), r.xi_exact.into(), r.power.into(), r.r2.into()]);
        }
        let mut report = Report::new(t);
        report.note_f64("nu", fit.nu);
        report.note_f64("eta", fit.eta);
        report.note_f64("decay_power", fit.decay_power);
        report.note_f64("nu_r2", fit.nu_r2);
        report.note("warning", fit.warning);
        return Ok(report);
    }
    if a.x_min > a.x_max {
        return Err(CliError::Usage("--x-min must not exceed --x-max".into()));
    }
    let p = SshParams::new(a.u, a.v, a.w)?;
    let gapped = critical_distance(&p).is_ok();
    let rows: Vec<Vec<Cell>> = (a.x_min..=a.x_max)
        .into_par_iter()
        .map(|x| {
            let c = corr_real(&p, x, channel)?;
            let asym = if gapped && x > 0 {
                Some(corr_asymptotic(&p, x as f64, channel)?)
            } else {
                None
            };
            let mut row: Vec<Cell> = complex(c).into();
            row.insert(0, x.into());
            match asym {
                Some(z) => {
                    row.extend(complex(z));
                    row.extend(complex(c / z));
                }
                None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            Ok(row)
        })
        .collect::<yanglee::Result<_>>()?;
    let mut t = Table::new(&["x", "re_c", "im_c", "re_asym", "im_asym", "re_ratio", "im_ratio"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(Report::new(t))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SshEeArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub v: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub w: f64,
    /// Unit cells in the periodic chain.
    #[arg(long, default_value_t = 400)]
    pub cells: usize,
    #[arg(long, value_delimiter = ',', default_value = "10,15,20,30,40,50,60,70,80")]
    pub sizes: Vec<usize>,
    /// Band filled where Re E = 0.
    #[arg(long, default_value = "im_neg", value_parser = ["im_pos", "im_neg", "full"])]
    pub filling: String,
}

pub fn ssh_ee(a: &SshEeArgs) -> Result<Report, CliError> {
    let p = SshParams::new(a.u, a.v, a.w)?;
    let filling: Filling = a.filling.parse()?;
    let fit = ee_scaling_fit(&p, a.cells, &a.sizes, filling)?;
    let mut t = Table::new(&["l_a", "re_s", "im_s"]);
    for (la, r) in &fit.points {
        t.push(vec![(*la).into(), r.s.re.into(), r.s.im.into()]);
    }
    let mut report = Report::new(t);
    report.note_f64("slope", fit.slope);
    report.note_f64("intercept", fit.intercept);
    report.note_f64("r2", fit.r2);
    report.note("classification", fit.classification.as_str());
    report.note("filling", fit.filling.as_str());
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XxzPolyArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: usize,
}

pub fn xxz_poly(a: &XxzPolyArgs) -> Result<Report, CliError> {
    let poly = theorem1_polynomial(a.sites)?;
    let mut t = Table::new(&["exponent", "coefficient"]);
    for (e, c) in poly.coeffs().iter().enumerate().filter(|(_, c)| c.norm() != 0.0) {
        t.push(vec![e.into(), (c.re as i64).into()]);
    }
    let mut report = Report::new(t);
    report.note("degree", poly.degree());
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XxzZerosArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: usize,
    #[arg(long, default_value_t = 100.0)]
    pub beta: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    #[serde(rename = "J")]
    pub j: f64,
    #[arg(long, default_value_t = 0.9)]
    pub re_min: f64,
    #[arg(long, default_value_t = 1.1)]
    pub re_max: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub im_min: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub im_max: f64,
    #[arg(long, default_value_t = 41)]
    pub nx: usize,
    #[arg(long, default_value_t = 41)]
    pub ny: usize,
    /// Which zeros to emit.
    #[arg(long, default_value = "both", value_parser = ["analytic", "numeric", "both"])]
    pub source: String,
    /// Branch window for analytic zeros.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub n_min: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub n_max: i64,
}

pub fn xxz_zeros(a: &XxzZerosArgs, g: &GlobalArgs) -> Result<Report, CliError> {
    if a.n_min > a.n_max {
        return Err(CliError::Usage("--n-min must not exceed --n-max".into()));
    }
    let mut t = Table::new(&["re_delta", "im_delta", "provenance", "residual"]);
    let mut report_warnings = Vec::new();
    if a.source != "analytic" {
        let window = SearchWindow::new((a.re_min, a.re_max), (a.im_min, a.im_max))?;
        let options = SearchOptions {
            grid: (a.nx, a.ny),
            tol: g.tol.unwrap_or(DEFAULT_ZERO_TOL),
            ..SearchOptions::default()
        };
        let locus = locate_zeros_numeric(&window, a.sites, a.j, a.beta, &options)?;
        for z in &locus.zeros {
            t.push(vec![
                z.delta.re.into(),
                z.delta.im.into(),
                locus.provenance.as_str().into(),
                z.residual.into(),
            ]);
        }
        report_warnings = locus.warnings;
    }
    if a.source != "numeric" {
        let locus = theorem1_zeros(a.sites, a.beta, a.j, a.n_min..=a.n_max)?;
        for z in &locus.zeros {
            t.push(vec![
                z.delta.re.into(),
                z.delta.im.into(),
                locus.provenance.as_str().into(),
                Cell::Empty,
            ]);
        }
    }
    let mut report = Report::new(t);
    report.note("warnings", report_warnings);
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XxzVerifyArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: usize,
    #[arg(long, default_value_t = 100.0)]
    pub beta: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    #[serde(rename = "J")]
    pub j: f64,
}

pub fn xxz_verify(a: &XxzVerifyArgs, g: &GlobalArgs) -> Result<Report, CliError> {
    let check = verify_theorem1(a.sites, a.beta, a.j, g.tol.unwrap_or(DEFAULT_ZERO_TOL))?;
    let mut t = Table::new(&["n", "re_analytic", "im_analytic", "re_numeric", "im_numeric", "distance"]);
    for pair in &check.pairs {
        let numeric = pair.numeric.map(|z| z.delta);
        t.push(vec![
            pair.analytic.n.into(),
            pair.analytic.delta.re.into(),
            pair.analytic.delta.im.into(),
            numeric.map(|z| z.re).into(),
            numeric.map(|z| z.im).into(),
            pair.distance.into(),
        ]);
    }
    let mut report = Report::new(t);
    report.note_f64("epsilon", check.epsilon);
    report.note("numeric_zeros", check.numeric.zeros.len());
    report.note("warnings", check.numeric.warnings.clone());
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XxzSbaeArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: usize,
    /// Magnon number; every 1 ≤ M ≤ L/2 when absent.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub magnons: Option<usize>,
}

pub fn xxz_sbae(a: &XxzSbaeArgs, g: &GlobalArgs) -> Result<Report, CliError> {
    let sectors: Vec<usize> = match a.magnons {
        Some(m) => vec![m],
        None => (1..=a.sites / 2).collect(),
    };
    let mut t = Table::new(&["m", "index", "re_zeta", "im_zeta"]);
    let mut max_sum = 0.0f64;
    let mut max_rule = 0.0f64;
    for m in sectors {
        let s = sbae_solve_seeded(a.sites, m, g.seed)?;
        for (i, z) in s.zeta.iter().enumerate() {
            let mut row = vec![m.into(), i.into()];
            row.extend(complex(*z));
            t.push(row);
        }
        max_sum = max_sum.max(s.sum().norm());
        max_rule = max_rule.max((s.sum_of_squares() - s.expected_sum_of_squares()).norm());
    }
    let mut report = Report::new(t);
    report.note_f64("max_abs_sum", max_sum);
    report.note_f64("max_sum_of_squares_error", max_rule);
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XxzEeArgs {
    #[arg(long = "L", default_value_t = 12)]
    #[serde(rename = "L")]
    pub sites: usize,
    #[arg(long, default_value_t = 0.99, allow_hyphen_values = true)]
    pub re_delta: f64,
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    pub im_delta: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    #[serde(rename = "J")]
    pub j: f64,
}

pub fn xxz_ee(a: &XxzEeArgs) -> Result<Report, CliError> {
    let p = XxzParams::new(a.j, Complex64::new(a.re_delta, a.im_delta), a.sites)?;
    let gs = ground_state(&p)?;
    let l = a.sites as f64;
    let mut t = Table::new(&["l_a", "s", "log_sin"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for cut in 1..a.sites {
        let s = state_ee(&gs.state, a.sites, cut)?.s;
        let x = (std::f64::consts::PI * cut as f64 / l).sin().ln();
        t.push(vec![cut.into(), s.into(), x.into()]);
        xs.push(x);
        ys.push(s);
    }
    let mut report = Report::new(t);
    report.note("m", gs.m);
    report.note_f64("re_energy", gs.energy.re);
    report.note_f64("im_energy", gs.energy.im);
    if let Some((b, a0, r2)) = linear_fit(&xs, &ys) {
        report.note_f64("fit_a", a0);
        report.note_f64("fit_b", b);
        report.note_f64("fit_r2", r2);
    }
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XxzGapArgs {
    #[arg(long = "L", value_delimiter = ',', default_value = "6,8,10")]
    #[serde(rename = "L")]
    pub sites: Vec<usize>,
    /// Re δ = Re Δ − 1 values.
    #[arg(long, value_delimiter = ',', default_value = "-0.05", allow_hyphen_values = true)]
    pub re_delta: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub im_delta: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    #[serde(rename = "J")]
    pub j: f64,
}

pub fn xxz_gap(a: &XxzGapArgs) -> Result<Report, CliError> {
    let mut t = Table::new(&["L", "re_delta", "im_delta", "ed_gap", "formula", "rel_error"]);
    for &l in &a.sites {
        for &d in &a.re_delta {
            let delta = Complex64::new(d, a.im_delta);
            let p = XxzParams::new(a.j, delta + 1.0, l)?;
            let gap = ed_gap(&p)?;
            let m = magnon_energy_and_gap(l, l / 2, a.j, delta)?;
            let formula = if d < 0.0 { m.gap_gapless } else { m.gap_gapped };
            t.push(vec![
                l.into(),
                d.into(),
                a.im_delta.into(),
                gap.into(),
                formula.into(),
                ((gap - formula) / formula).abs().into(),
            ]);
        }
    }
    Ok(Report::new(t))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XxzSusceptibilityArgs {
    #[arg(long = "L", default_value_t = 8)]
    #[serde(rename = "L")]
    pub sites: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    #[serde(rename = "J")]
    pub j: f64,
    #[arg(long, value_delimiter = ',', default_value = "-0.02,-0.05,-0.1", allow_hyphen_values = true)]
    pub deltas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.0001,0.0002")]
    pub fields: Vec<f64>,
}

pub fn xxz_susceptibility(a: &XxzSusceptibilityArgs) -> Result<Report, CliError> {
    let r = susceptibility_scaling(a.sites, a.j, &a.deltas, &a.fields)?;
    let mut t = Table::new(&["delta", "h", "m_star", "chi", "chi_integer"]);
    for row in &r.rows {
        t.push(vec![
            row.delta.into(),
            row.h.into(),
            row.m_star.into(),
            row.chi.into(),
            row.chi_integer.into(),
        ]);
    }
    let mut report = Report::new(t);
    report.note_f64("sigma", r.sigma);
    report.note(
        "chi_zero_field",
        r.chi_zero_field
            .iter()
            .map(|(d, c)| Value::from(vec![*d, *c]))
            .collect::<Vec<_>>(),
    );
    Ok(report)
}
