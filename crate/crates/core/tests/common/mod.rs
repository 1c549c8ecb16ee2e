//! Test-only dense-matrix simulator. Builds every gate as a full
//! `2^q × 2^q` matrix from Kronecker products and multiplies it out, with no
//! code shared with the engine. Qubit 0 is the leftmost (most significant)
//! factor.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;

pub type Mat = Vec<Vec<Complex64>>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> Mat {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect()
}

pub fn hadamard() -> Mat {
    let s = 1.0 / 2f64.sqrt();
    vec![vec![c(s), c(s)], vec![c(s), c(-s)]]
}

pub fn pauli_x() -> Mat {
    vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![c(0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn apply(m: &Mat, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `gate` on qubit `q` of `total`, identity elsewhere.
pub fn on_qubit(gate: &Mat, q: usize, total: usize) -> Mat {
    let id = identity(2);
    let mut m = identity(1);
    for i in 0..total {
        m = kron(&m, if i == q { gate } else { &id });
    }
    m
}

/// Permutation `|b⟩ → |b with qubit target flipped⟩` whenever `f(bits)`,
/// where `bits[i]` is qubit `i` of the basis state.
pub fn xor_oracle(total: usize, target: usize, f: impl Fn(&[u8]) -> bool) -> Mat {
    let dim = 1 << total;
    let mut m = vec![vec![c(0.0); dim]; dim];
    for col in 0..dim {
        let bits: Vec<u8> = (0..total)
            .map(|q| ((col >> (total - 1 - q)) & 1) as u8)
            .collect();
        let row = if f(&bits) {
            col ^ (1 << (total - 1 - target))
        } else {
            col
        };
        m[row][col] = c(1.0);
    }
    m
}

/// `2|s⟩⟨s| − I` built as `H^⊗w · diag(1, −1, …, −1) · H^⊗w` on `w` qubits.
pub fn diffusion(w: usize) -> Mat {
    let mut hw = identity(1);
    for _ in 0..w {
        hw = kron(&hw, &hadamard());
    }
    let dim = 1 << w;
    let mut reflect = identity(dim);
    for (i, row) in reflect.iter_mut().enumerate().skip(1) {
        row[i] = c(-1.0);
    }
    matmul(&hw, &matmul(&reflect, &hw))
}

pub fn basis(total: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); 1 << total];
    v[index] = c(1.0);
    v
}

/// Max |a_i − e^{iφ} b_i| with φ from the largest overlap component.
pub fn phase_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let p = a
        .iter()
        .zip(b)
        .map(|(x, y)| x * y.conj())
        .max_by(|p, q| p.norm().total_cmp(&q.norm()))
        .unwrap();
    let phase = if p.norm() > 0.0 { p / p.norm() } else { c(1.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Number of balanced functions Bⁿ → B plus the two constants, counted by
/// brute force over every truth table.
pub fn count_balanced_plus_constant(n: usize) -> usize {
    let size = 1usize << n;
    (0u64..1 << size)
        .filter(|v| {
            let ones = v.count_ones() as usize;
            ones == 0 || ones == size || 2 * ones == size
        })
        .count()
}

pub mod props;
