//! Reference implementations used only by tests. They deliberately avoid the
//! library's own numerics: the full 2^N-dimensional space is built from
//! explicit Kronecker products, reductions are done by reshaping, and the
//! discord minimum is found by exhaustive search.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type Mat = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pauli(which: usize) -> Mat {
    let z = cx(0.0, 0.0);
    let o = cx(1.0, 0.0);
    let i = cx(0.0, 1.0);
    match which {
        0 => Mat::from_row_slice(2, 2, &[z, o, o, z]),
        1 => Mat::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => Mat::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `J_α = ½ Σ_i σ_α^{(i)}` on `n` qubits; qubit 1 is the most significant bit
/// and `|0⟩` is spin up.
pub fn full_spin(n: usize, axis: usize) -> Mat {
    let dim = 1 << n;
    let mut total = Mat::zeros(dim, dim);
    for site in 0..n {
        let mut op = Mat::identity(1, 1);
        for k in 0..n {
            let factor = if k == site { pauli(axis) } else { Mat::identity(2, 2) };
            op = op.kronecker(&factor);
        }
        total += op;
    }
    total.scale(0.5)
}

/// `exp(−i·t·H)` for Hermitian `H`.
pub fn expm_hermitian(h: &Mat, t: f64) -> Mat {
    let eig = SymmetricEigen::new(h.clone());
    let phases = Mat::from_diagonal(&DVector::from_iterator(
        h.nrows(),
        eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -t * e)),
    ));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// One-period evolution on the full tensor-product space: rotation about y
/// by `p`, then the twist `exp(−iκ J_z² / 2j)`.
pub fn full_floquet(n: usize, kappa: f64, p: f64) -> Mat {
    let j = n as f64 / 2.0;
    let jz = full_spin(n, 2);
    let rot = expm_hermitian(&full_spin(n, 1), p);
    let twist = Mat::from_diagonal(&DVector::from_iterator(
        1 << n,
        (0..1 << n).map(|k| {
            let m = jz[(k, k)].re;
            Complex64::from_polar(1.0, -kappa * m * m / (2.0 * j))
        }),
    ));
    twist * rot
}

/// Reduced density matrix of the leading `k` qubits of a pure state.
pub fn leading_rdm(psi: &Vector, n: usize, k: usize) -> Mat {
    let rows = 1 << k;
    let cols = 1 << (n - k);
    // Row-major reshape: index = row * cols + col.
    let m = Mat::from_fn(rows, cols, |r, c| psi[r * cols + c]);
    &m * m.adjoint()
}

pub fn von_neumann_bits(rho: &Mat) -> f64 {
    let h = (rho + rho.adjoint()).scale(0.5);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .filter(|&&e| e > 1e-15)
        .map(|&e| -e * e.log2())
        .sum()
}

fn entropy2(rho: &Mat) -> f64 {
    let a = rho[(0, 0)].re;
    let d = rho[(1, 1)].re;
    let b = rho[(0, 1)].norm();
    let r = ((a - d).powi(2) + 4.0 * b * b).sqrt();
    let t = a + d;
    [(t + r) / 2.0, (t - r) / 2.0]
        .iter()
        .map(|&x| x / t)
        .filter(|&x| x > 1e-15)
        .map(|x| -x * x.log2())
        .sum()
}

/// Discord with projective measurement on the second qubit, minimised by
/// exhaustive search over an `n × n` grid of the upper Bloch hemisphere.
pub fn dense_grid_discord(rho: &Mat, n: usize) -> f64 {
    let rho_b = Mat::from_fn(2, 2, |b, bp| rho[(b, bp)] + rho[(2 + b, 2 + bp)]);
    let base = entropy2(&rho_b) - von_neumann_bits(rho);
    let mut best = f64::INFINITY;
    for it in 0..n {
        let theta = it as f64 * (PI / 2.0) / (n - 1) as f64;
        for ip in 0..n {
            let phi = ip as f64 * 2.0 * PI / n as f64;
            let (s, c) = (theta / 2.0).sin_cos();
            let up = [cx(c, 0.0), Complex64::from_polar(s, phi)];
            let mut cond = 0.0;
            let orth = [-(up[1].conj()), up[0].conj()];
            for v in [up, orth] {
                // ρ_A|k[a, a'] = Σ_{b,b'} conj(v_b) ρ[(a,b),(a',b')] v_{b'}
                let block = Mat::from_fn(2, 2, |a, ap| {
                    let mut acc = cx(0.0, 0.0);
                    for b in 0..2 {
                        for bp in 0..2 {
                            acc += v[b].conj() * rho[(2 * a + b, 2 * ap + bp)] * v[bp];
                        }
                    }
                    acc
                });
                let p = (block[(0, 0)] + block[(1, 1)]).re;
                if p > 1e-14 {
                    cond += p * entropy2(&block);
                }
            }
            best = best.min(cond);
        }
    }
    base + best
}

/// Ginibre-distributed two-qubit density matrix of the given rank.
pub fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> Mat {
    let g = Mat::from_fn(4, rank, |_, _| {
        cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

/// Random SU(2) element `R_z(a) R_y(b) R_z(c)`.
pub fn su2(a: f64, b: f64, c: f64) -> Mat {
    let rz = |t: f64| {
        Mat::from_row_slice(
            2,
            2,
            &[Complex64::from_polar(1.0, -t / 2.0), cx(0.0, 0.0), cx(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
        )
    };
    let (s, co) = (b / 2.0).sin_cos();
    let ry = Mat::from_row_slice(2, 2, &[cx(co, 0.0), cx(-s, 0.0), cx(s, 0.0), cx(co, 0.0)]);
    rz(a) * ry * rz(c)
}

/// Classical kicked-top step written out directly: rotate about y by `p`,
/// then twist about z by an angle proportional to the new `z`.
pub fn classical_step(v: [f64; 3], kappa: f64, p: f64) -> [f64; 3] {
    let (sp, cp) = p.sin_cos();
    let x = v[0] * cp + v[2] * sp;
    let y = v[1];
    let z = -v[0] * sp + v[2] * cp;
    let (st, ct) = (kappa * z).sin_cos();
    [x * ct - y * st, x * st + y * ct, z]
}

/// Embeds Dicke-basis amplitudes (index `k` = `k` qubits in `|1⟩`) into the
/// full `2^n` space as normalised symmetric superpositions.
pub fn dicke_embed(amps: &Vector, n: usize) -> Vector {
    let mut binom = vec![1.0f64; n + 1];
    for k in 1..=n {
        binom[k] = binom[k - 1] * (n + 1 - k) as f64 / k as f64;
    }
    Vector::from_fn(1 << n, |idx, _| {
        let k = (idx as u32).count_ones() as usize;
        amps[k] / binom[k].sqrt()
    })
}
