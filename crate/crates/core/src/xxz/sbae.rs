//! First-order Bethe equations near the isotropic point in `ζ_j = cot y_j`:
//!
//! ```text
//! L ζ_j = 2 Σ_{l≠j} (1 + ζ_l ζ_j)/(ζ_l − ζ_j)
//! ```

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{newton_system, NewtonOptions};

const RETRIES: usize = 8;
const RETRY_SEED: u64 = 0x5BAE;
const MIN_SEPARATION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SbaeSolution {
    pub sites: usize,
    pub m: usize,
    /// Sorted by imaginary part.
    pub zeta: Vec<Complex64>,
    pub residual: f64,
    pub attempts: usize,
}

impl SbaeSolution {
    pub fn sum(&self) -> Complex64 {
        self.zeta.iter().sum()
    }

    pub fn sum_of_squares(&self) -> Complex64 {
        self.zeta.iter().map(|z| z * z).sum()
    }

    /// Closed form of [`Self::sum_of_squares`], `−M(M−1)/(L−1)`.
    pub fn expected_sum_of_squares(&self) -> f64 {
        -((self.m * (self.m - 1)) as f64) / (self.sites as f64 - 1.0)
    }
}

fn residuals(sites: usize, zeta: &[Complex64]) -> Vec<Complex64> {
    let l = sites as f64;
    (0..zeta.len())
        .map(|j| {
            let pair: Complex64 = (0..zeta.len())
                .filter(|&k| k != j)
                .map(|k| (Complex64::from(1.0) + zeta[k] * zeta[j]) / (zeta[k] - zeta[j]))
                .sum();
            zeta[j] * l - pair * 2.0
        })
        .collect()
}

/// Start on the imaginary axis at Chebyshev nodes, symmetric under `ζ → −ζ`.
fn symmetric_start(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| {
            let t = (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos();
            Complex64::new(0.0, 0.9 * t)
        })
        .collect()
}

pub fn sbae_solve(sites: usize, m: usize) -> Result<SbaeSolution> {
    sbae_solve_seeded(sites, m, RETRY_SEED)
}

/// [`sbae_solve`] with a caller-chosen seed for the retry perturbations.
pub fn sbae_solve_seeded(sites: usize, m: usize, seed: u64) -> Result<SbaeSolution> {
    if sites < 2 || m == 0 || m >= sites {
        return Err(Error::InvalidInput(format!("need 1 <= M <= L-1, got L={sites}, M={m}")));
    }
    let base = symmetric_start(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((sites as u64) << 16) ^ m as u64);
    let mut history = Vec::new();
    for attempt in 0..=RETRIES {
        let start: Vec<Complex64> = if attempt == 0 {
            base.clone()
        } else {
            base.iter()
                .map(|z| z + Complex64::new(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3)))
                .collect()
        };
        match newton_system(|z| residuals(sites, z), &start, NewtonOptions::default()) {
            Ok(sol) => {
                let finite = sol.x.iter().all(|z| z.re.is_finite() && z.im.is_finite());
                let separated = (0..m).all(|a| (a + 1..m).all(|b| (sol.x[a] - sol.x[b]).norm() > MIN_SEPARATION));
                if finite && separated {
                    let mut zeta = sol.x;
                    zeta.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
                    return Ok(SbaeSolution {
                        sites,
                        m,
                        zeta,
                        residual: sol.residual,
                        attempts: attempt + 1,
                    });
                }
                history.push(sol.residual);
            }
            Err(Error::Newton { residual, .. }) => history.push(residual),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Newton {
        reason: format!("SBAE L={sites} M={m} failed after {} starts, residuals {history:?}", RETRIES + 1),
        residual: history.iter().copied().fold(f64::INFINITY, f64::min),
        best: base,
    })
}
