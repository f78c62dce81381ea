//! Single-particle correlation-matrix results against exact many-body
//! diagonalization of a small antiperiodic ring.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use yanglee::entanglement::{ee_from_correlation, ssh_correlation_matrix, state_ee, Convention, Filling};
use yanglee::numerics::dense_eig;
use yanglee::ssh::SshParams;

/// `(a, b, t)` for every term `t c†_a c_b`; site `2j` is A of cell `j`, `2j+1` is B.
fn hoppings(p: &SshParams, cells: usize) -> Vec<(usize, usize, Complex64)> {
    let a = |j: usize| 2 * j;
    let b = |j: usize| 2 * j + 1;
    let mut terms = Vec::new();
    for j in 0..cells {
        terms.push((a(j), a(j), Complex64::new(0.0, p.u)));
        terms.push((b(j), b(j), Complex64::new(0.0, -p.u)));
        terms.push((a(j), b(j), Complex64::from(p.v)));
        terms.push((b(j), a(j), Complex64::from(p.v)));
        // Antiperiodic wrap: c_{j±L} = −c_j.
        let (prev, sign_prev) = if j == 0 { (cells - 1, -1.0) } else { (j - 1, 1.0) };
        let (next, sign_next) = if j + 1 == cells { (0, -1.0) } else { (j + 1, 1.0) };
        terms.push((a(j), b(prev), Complex64::from(p.w * sign_prev)));
        terms.push((b(j), a(next), Complex64::from(p.w * sign_next)));
    }
    terms
}

/// `c†_a c_b |s⟩` with Jordan-Wigner signs.
fn hop(s: u32, a: usize, b: usize) -> Option<(u32, f64)> {
    if s & (1 << b) == 0 {
        return None;
    }
    let below = |state: u32, i: usize| (state & ((1u32 << i) - 1)).count_ones();
    let t = s & !(1 << b);
    if t & (1 << a) != 0 {
        return None;
    }
    let parity = below(s, b) + below(t, a);
    Some((t | (1 << a), if parity % 2 == 0 { 1.0 } else { -1.0 }))
}

struct ManyBody {
    basis: Vec<u32>,
    right: DVector<Complex64>,
    left: DVector<Complex64>,
}

fn ground_state(p: &SshParams, cells: usize) -> ManyBody {
    let sites = 2 * cells;
    let basis: Vec<u32> = (0u32..1 << sites).filter(|s| s.count_ones() as usize == cells).collect();
    let index = |s: u32| basis.binary_search(&s).unwrap();
    let mut h = DMatrix::<Complex64>::zeros(basis.len(), basis.len());
    for (col, &s) in basis.iter().enumerate() {
        for &(a, b, t) in &hoppings(p, cells) {
            if let Some((s2, sign)) = hop(s, a, b) {
                h[(index(s2), col)] += t * sign;
            }
        }
    }
    let sys = dense_eig(&h).unwrap();
    let i = (0..sys.dim())
        .min_by(|&x, &y| sys.values[x].re.total_cmp(&sys.values[y].re))
        .unwrap();
    ManyBody {
        basis,
        right: sys.right.column(i).into_owned(),
        left: sys.left.column(i).into_owned(),
    }
}

/// `⟨L| c†_a c_b |R⟩ / ⟨L|R⟩`.
fn correlation(g: &ManyBody, a: usize, b: usize) -> Complex64 {
    let mut acc = Complex64::default();
    for (col, &s) in g.basis.iter().enumerate() {
        if let Some((s2, sign)) = hop(s, a, b) {
            let row = g.basis.binary_search(&s2).unwrap();
            acc += g.left[row].conj() * g.right[col] * sign;
        }
    }
    acc / g.left.dotc(&g.right)
}

#[test]
fn hermitian_entropy_matches_many_body() {
    let cells = 4;
    let p = SshParams::new(0.0, 1.0, 0.6).unwrap();
    let g = ground_state(&p, cells);
    let mut full = vec![Complex64::default(); 1 << (2 * cells)];
    for (amp, &s) in g.right.iter().zip(&g.basis) {
        full[s as usize] = *amp;
    }
    for la in 1..=cells / 2 {
        let c = ssh_correlation_matrix(&p, cells, la, Filling::ImNeg, Convention::LR).unwrap();
        let single = ee_from_correlation(&c).unwrap();
        let many = state_ee(&full, 2 * cells, 2 * la).unwrap();
        assert!(single.s.im.abs() < 1e-10);
        assert!((single.s_real - many.s).abs() < 1e-9, "L_A={la}: {} vs {}", single.s_real, many.s);
    }
}

#[test]
fn biorthogonal_correlations_match_many_body() {
    let cells = 4;
    let la = 2;
    for (u, v, w) in [(0.5, 2.5, 1.0), (0.3, 0.4, 1.6)] {
        let p = SshParams::new(u, v, w).unwrap();
        let g = ground_state(&p, cells);
        let c = ssh_correlation_matrix(&p, cells, la, Filling::ImNeg, Convention::LR).unwrap();
        for a in 0..2 * la {
            for b in 0..2 * la {
                let many = correlation(&g, b, a);
                assert!(
                    (c.entries[(a, b)] - many).norm() < 1e-9,
                    "({u},{v},{w}) [{a},{b}]: {} vs {many}",
                    c.entries[(a, b)]
                );
            }
        }
        assert!((c.trace() - Complex64::from(la as f64)).norm() < 1e-10);
    }
}
