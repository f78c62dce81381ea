//! Acceptance criteria, one function each, with the published tolerances.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use yanglee::entanglement::{ee_scaling_fit, state_ee, Filling};
use yanglee::numerics::{eigenvalues, linear_fit};
use yanglee::ssh::{
    corr_asymptotic, corr_real, correlation_length, fit_exponents, mode_partition_factor, yang_lee_root_count,
    zeros_region_scan, Channel, CorrSeries, SshParams,
};
use yanglee::xxz::{
    ed_energy_slope, ed_gap, full_spectrum, ground_state, locate_zeros_numeric, magnon_energy_and_gap,
    sbae_solve, theorem1_polynomial, theorem1_zeros, verify_theorem1, zero_density, MagnonSector, SearchOptions,
    SearchWindow, XxzParams,
};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn from_checks(checks: &[(bool, String)]) -> Self {
        let mut detail = String::new();
        for (i, (ok, text)) in checks.iter().enumerate() {
            if i > 0 {
                detail.push_str("; ");
            }
            let _ = write!(detail, "{}{text}", if *ok { "" } else { "!! " });
        }
        Self {
            passed: checks.iter().all(|(ok, _)| *ok),
            detail,
        }
    }
}

type Check = yanglee::Result<Outcome>;

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub run: fn() -> Check,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "zero region boundary", run: region_boundary },
    Criterion { id: 2, name: "root count", run: root_count },
    Criterion { id: 3, name: "correlation asymptotics and exponents", run: correlation_asymptotics },
    Criterion { id: 4, name: "SSH entanglement transition", run: ssh_entanglement },
    Criterion { id: 5, name: "analytic vs numeric partition zeros", run: theorem1_consistency },
    Criterion { id: 6, name: "zero line and density", run: zero_line },
    Criterion { id: 7, name: "SBAE identities", run: sbae_identities },
    Criterion { id: 8, name: "first-order magnon energies", run: energy_slopes },
    Criterion { id: 9, name: "gapless level spacing", run: gap_scaling },
    Criterion { id: 10, name: "XXZ entanglement", run: xxz_entanglement },
    Criterion { id: 11, name: "property suite", run: property_suite },
];

/// Runs one criterion; errors count as failures.
pub fn evaluate(c: &Criterion) -> Outcome {
    (c.run)().unwrap_or_else(|e| Outcome {
        passed: false,
        detail: format!("error: {e}"),
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn region_boundary() -> Check {
    let u = 1.0;
    let detuning = linspace(-3.0, 3.0, 200);
    let cell = 6.0 / 199.0;
    let betas = [10.0, 50.0, 200.0];
    let mut temperatures = linspace(0.005, 0.1, 49);
    temperatures.push(0.02);
    temperatures.sort_by(f64::total_cmp);
    let scan = zeros_region_scan(u, &detuning, &temperatures)?;
    let mut offsets = Vec::new();
    let mut checks = Vec::new();
    for beta in betas {
        let t = 1.0 / beta;
        let points: Vec<f64> = scan
            .boundary
            .iter()
            .filter(|b| (b.temperature - t).abs() < 1e-12)
            .map(|b| (b.w_minus_v.abs() - u).abs())
            .collect();
        let offset = points.iter().copied().fold(f64::NAN, f64::max);
        checks.push((points.len() == 2, format!("β={beta}: {} crossings, offset {offset:.4}", points.len())));
        offsets.push(offset);
    }
    checks.push((
        offsets[2] <= 2.0 * cell,
        format!("β=200 offset {:.2} cells (≤ 2)", offsets[2] / cell),
    ));
    checks.push((
        offsets[0] >= offsets[1] && offsets[1] >= offsets[2],
        "offset non-increasing in β".into(),
    ));
    Ok(Outcome::from_checks(&checks))
}

pub fn root_count() -> Check {
    let p = SshParams::new(1.0, 1.0, 1.0)?;
    let checks = [50.0, 100.0, 400.0]
        .iter()
        .map(|&beta| {
            let chi = yang_lee_root_count(&p, beta)?.chi;
            let err = (chi as f64 / beta - 1.0 / (2.0 * PI)).abs();
            Ok((err <= 1.0 / beta, format!("β={beta}: χ={chi}, |χ/β − 1/2π|·β = {:.3}", err * beta)))
        })
        .collect::<yanglee::Result<Vec<_>>>()?;
    Ok(Outcome::from_checks(&checks))
}

pub fn correlation_asymptotics() -> Check {
    let deltas = [0.02, 0.05, 0.1];
    let mut worst: f64 = 0.0;
    for &d in &deltas {
        let p = SshParams::new(1.0, 2.0 + d, 1.0)?;
        let xi = correlation_length(&p)?;
        for x in (3.0 * xi).ceil() as i64..=(6.0 * xi).floor() as i64 {
            for channel in Channel::ALL {
                let ratio = corr_real(&p, x, channel)? / corr_asymptotic(&p, x as f64, channel)?;
                worst = worst.max((ratio - 1.0).norm());
            }
        }
    }
    let series = deltas
        .iter()
        .map(|&d| CorrSeries::sample(&SshParams::new(1.0, 2.0 + d, 1.0)?, Channel::AA, 3.0, 10.0))
        .collect::<yanglee::Result<Vec<_>>>()?;
    let fit = fit_exponents(&series)?;
    Ok(Outcome::from_checks(&[
        (worst <= 0.02, format!("max |ratio − 1| = {worst:.4} (≤ 0.02)")),
        (
            (fit.decay_power + 0.5).abs() <= 0.05,
            format!("decay power {:.3} (−0.50 ± 0.05), η = {:.3}", fit.decay_power, fit.eta),
        ),
        ((fit.nu - 1.0).abs() <= 0.05, format!("ν = {:.3} (1.00 ± 0.05)", fit.nu)),
    ]))
}

pub fn ssh_entanglement() -> Check {
    let sizes = [10, 15, 20, 30, 40, 50, 60, 70, 80];
    let broken = ee_scaling_fit(&SshParams::new(1.0, 1.0, 1.0)?, 400, &sizes, Filling::ImNeg)?;
    let gapped = ee_scaling_fit(&SshParams::new(1.0, 2.5, 1.0)?, 400, &sizes, Filling::ImNeg)?;
    Ok(Outcome::from_checks(&[
        (
            (broken.slope - 1.0 / 6.0).abs() <= 0.05,
            format!("u=v=w=1 slope {:.4} ({}, filling {})", broken.slope, broken.classification.as_str(), broken.filling.as_str()),
        ),
        (gapped.slope.abs() <= 0.05, format!("v=2.5 slope {:.4}", gapped.slope)),
    ]))
}

/// Below this the distance is roundoff and no further shrinking is expected.
const EPSILON_FLOOR: f64 = 1e-12;

pub fn theorem1_consistency() -> Check {
    let betas = [25.0, 50.0, 100.0];
    let mut checks = Vec::new();
    for l in 2..=8 {
        let eps = betas
            .iter()
            .map(|&b| Ok(verify_theorem1(l, b, 1.0, 1e-8)?.epsilon))
            .collect::<yanglee::Result<Vec<f64>>>()?;
        let shrinks = eps
            .windows(2)
            .all(|w| w[0] <= EPSILON_FLOOR || w[1] <= EPSILON_FLOOR || w[0] / w[1] >= 1.8);
        let bound = l > 6 || eps[2] <= 5e-3;
        checks.push((
            shrinks && bound && eps.iter().all(|e| e.is_finite()),
            format!("L={l} ε = {:.1e}/{:.1e}/{:.1e}", eps[0], eps[1], eps[2]),
        ));
    }
    Ok(Outcome::from_checks(&checks))
}

pub fn zero_line() -> Check {
    let (l, beta, j) = (6, 100.0, 1.0);
    let column = 2.0 * PI * (l as f64 - 1.0) / (beta * j);
    let analytic: Vec<Complex64> = theorem1_zeros(l, beta, j, -3..=3)?.zeros.iter().map(|z| z.delta).collect();
    let re = analytic.iter().map(|z| z.re);
    let re_lo = re.clone().fold(f64::INFINITY, f64::min) - 0.1 * column;
    let re_hi = re.fold(f64::NEG_INFINITY, f64::max) + 0.1 * column;
    let window = SearchWindow::new((re_lo, re_hi), (-1.6 * column, 1.6 * column))?;
    let step = column / 40.0;
    let options = SearchOptions {
        grid: (
            ((re_hi - re_lo) / step).ceil() as usize + 1,
            (3.2 * column / step).ceil() as usize + 1,
        ),
        ..SearchOptions::default()
    };
    let numeric = locate_zeros_numeric(&window, l, j, beta, &options)?;
    let inside: Vec<Complex64> = numeric
        .zeros
        .iter()
        .map(|z| z.delta)
        .filter(|z| z.im >= -column && z.im < column)
        .collect();
    let spread = inside
        .iter()
        .map(|z| {
            let nearest = analytic
                .iter()
                .min_by(|a, b| (*a - z).norm().total_cmp(&(*b - z).norm()))
                .expect("analytic zeros exist");
            (z.re - nearest.re).abs()
        })
        .fold(0.0, f64::max);
    let g = zero_density(l, beta, j)?;
    let measured = inside.len() as f64 / (2.0 * column);
    Ok(Outcome::from_checks(&[
        (spread <= 1e-3, format!("Re spread {spread:.2e} (≤ 1e−3)")),
        (
            (measured / g - 1.0).abs() <= 0.1,
            format!("density {measured:.3} vs g = {g:.3}"),
        ),
    ]))
}

pub fn sbae_identities() -> Check {
    let (mut sum, mut rule) = (0.0f64, 0.0f64);
    for l in 2..=12 {
        for m in 1..=l / 2 {
            let s = sbae_solve(l, m)?;
            sum = sum.max(s.sum().norm());
            rule = rule.max((s.sum_of_squares() - s.expected_sum_of_squares()).norm());
        }
    }
    Ok(Outcome::from_checks(&[
        (sum <= 1e-10, format!("max |Σζ| = {sum:.1e}")),
        (rule <= 1e-9, format!("max |Σζ² + M(M−1)/(L−1)| = {rule:.1e}")),
    ]))
}

pub fn energy_slopes() -> Check {
    let mut worst: f64 = 0.0;
    for l in 2..=10 {
        for m in 0..=l {
            let slope = ed_energy_slope(l, m, 1.0, 1e-4)?;
            let expected = (m * (l - m)) as f64 / (l as f64 - 1.0);
            worst = worst.max((slope - expected).abs() / expected.max(1.0));
        }
    }
    Ok(Outcome::from_checks(&[(worst <= 1e-6, format!("max relative error {worst:.1e}"))]))
}

pub fn gap_scaling() -> Check {
    let mut checks = Vec::new();
    for l in [6, 8, 10] {
        let rel = |d: f64| -> yanglee::Result<f64> {
            let delta = Complex64::from(d);
            let gap = ed_gap(&XxzParams::new(1.0, delta + 1.0, l)?)?;
            let formula = magnon_energy_and_gap(l, l / 2, 1.0, delta)?.gap_gapless;
            Ok((gap - formula).abs() / formula)
        };
        let (coarse, fine) = (rel(-0.05)?, rel(-0.025)?);
        checks.push((
            coarse <= 0.15 && fine < coarse,
            format!("L={l}: {:.1}% at δ=−0.05, {:.1}% at δ=−0.025", 100.0 * coarse, 100.0 * fine),
        ));
    }
    Ok(Outcome::from_checks(&checks))
}

pub fn xxz_entanglement() -> Check {
    let l = 12;
    let critical = ground_state(&XxzParams::new(1.0, Complex64::new(0.99, 0.01), l)?)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for cut in 1..l {
        xs.push((PI * cut as f64 / l as f64).sin().ln());
        ys.push(state_ee(&critical.state, l, cut)?.s);
    }
    let (b, a, r2) = linear_fit(&xs, &ys).ok_or_else(|| yanglee::Error::Domain("degenerate fit".into()))?;
    let product = ground_state(&XxzParams::new(1.0, Complex64::new(1.05, 0.0), l)?)?;
    let max_s = (1..l)
        .map(|cut| state_ee(&product.state, l, cut).map(|s| s.s.abs()))
        .collect::<yanglee::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Outcome::from_checks(&[
        (b > 0.0 && r2 >= 0.95, format!("Δ=0.99+0.01i: S = {a:.3} + {b:.3}·ln sin(πL_A/L), R² = {r2:.4}")),
        (max_s <= 1e-10, format!("Δ=1.05: max S = {max_s:.1e}")),
    ]))
}

/// Direct trace over the four Fock states of one momentum.
fn fock_trace(p: &SshParams, k: f64, beta: f64) -> yanglee::Result<Complex64> {
    let h = p.bloch_matrix(k);
    let mut fock = DMatrix::<Complex64>::zeros(4, 4);
    fock.view_mut((1, 1), (2, 2)).copy_from(&h);
    fock[(3, 3)] = h.trace();
    Ok(eigenvalues(&fock)?.iter().map(|e| (-e * beta).exp()).sum())
}

fn ising_trace(p: &XxzParams) -> Complex64 {
    let l = p.sites;
    (0u32..1 << l)
        .map(|s| {
            let zz: f64 = (0..l)
                .map(|i| if (s >> i) & 1 == (s >> ((i + 1) % l)) & 1 { 0.25 } else { -0.25 })
                .sum();
            -p.anisotropy * (p.j * zz)
        })
        .sum()
}

fn csv_run(args: &[&str], dir: &std::path::Path, tag: &str) -> Option<Vec<u8>> {
    let out = dir.join(format!("{tag}.csv"));
    let man = dir.join(format!("{tag}.json"));
    let mut argv = vec!["yanglee"];
    argv.extend_from_slice(args);
    let (out_s, man_s) = (out.to_str()?.to_owned(), man.to_str()?.to_owned());
    argv.extend(["--out", &out_s, "--manifest", &man_s]);
    (yanglee_cli::run(argv) == yanglee_cli::EXIT_OK).then(|| std::fs::read(&out).ok())?
}

pub fn property_suite() -> Check {
    let mut fock: f64 = 0.0;
    for (i, u) in [0.0, 0.4, 1.0, 1.7].into_iter().enumerate() {
        for (v, w) in [(0.3, 1.2), (1.0, 1.0), (2.5, 1.0), (0.8, 0.5)] {
            for n in 0..16 {
                let k = -PI + (2.0 * n as f64 + 0.5 + 0.1 * i as f64) * PI / 16.0;
                let beta = 0.2 + 0.6 * n as f64;
                let p = SshParams::new(u, v, w)?;
                let z = mode_partition_factor(&p, k, beta)?;
                let oracle = fock_trace(&p, k, beta)?;
                fock = fock.max((z - oracle).norm() / oracle.norm().max(1.0));
            }
        }
    }

    let (mut completeness, mut flip, mut hermitian): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut dims_ok = true;
    for l in 2..=8 {
        let p = XxzParams::new(1.0, Complex64::new(0.7, 0.3), l)?;
        dims_ok &= (0..=l).map(|m| MagnonSector::new(l, m).map(|s| s.dimension())).sum::<yanglee::Result<usize>>()?
            == 1 << l;
        let spectrum = full_spectrum(&p)?;
        let total: Complex64 = spectrum.iter().flat_map(|s| s.eigenvalues.iter()).sum();
        completeness = completeness.max((total - ising_trace(&p)).norm());
        for m in 0..=l {
            for (a, b) in spectrum[m].eigenvalues.iter().zip(&spectrum[l - m].eigenvalues) {
                flip = flip.max((a - b).norm());
            }
        }
        let real = full_spectrum(&p.with_anisotropy(Complex64::from(1.3)))?;
        for e in real.iter().flat_map(|s| s.eigenvalues.iter()) {
            hermitian = hermitian.max(e.im.abs());
        }
    }

    let mut structure = true;
    for l in 2..=14 {
        let poly = theorem1_polynomial(l)?;
        let lead = if l % 2 == 0 { 1.0 } else { 2.0 };
        structure &= poly.coeffs()[0] == Complex64::from(2.0) && poly.leading() == Complex64::from(lead);
    }

    let dir = tempfile::tempdir().map_err(|e| yanglee::Error::Domain(e.to_string()))?;
    let commands: [&[&str]; 3] = [
        &["ssh-zeros-scan", "--nd", "40", "--nt", "8"],
        &["xxz-zeros", "--L", "4", "--nx", "21", "--ny", "21"],
        &["xxz-sbae", "--L", "9", "--seed", "11"],
    ];
    let deterministic = commands.iter().enumerate().all(|(i, args)| {
        let first = csv_run(args, dir.path(), &format!("{i}a"));
        let second = csv_run(args, dir.path(), &format!("{i}b"));
        first.is_some() && first == second
    });

    Ok(Outcome::from_checks(&[
        (fock <= 1e-12, format!("Fock trace {fock:.1e}")),
        (dims_ok && completeness <= 1e-8, format!("sector completeness {completeness:.1e}")),
        (flip <= 1e-10, format!("spin flip {flip:.1e}")),
        (hermitian <= 1e-10, format!("Hermitian limit {hermitian:.1e}")),
        (structure, "polynomial coefficients".into()),
        (deterministic, "CSV determinism".into()),
    ]))
}
