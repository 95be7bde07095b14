//! Oracles written out by hand, independent of the library's basis and
//! measurement code.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

pub const TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eigenvector of Pauli `axis` ('X', 'Y' or 'Z') with eigenvalue `sign`.
pub fn eigvec(axis: char, sign: i8) -> [Complex64; 2] {
    let s = f64::from(sign);
    match axis {
        'X' => [c(FRAC_1_SQRT_2, 0.0), c(s * FRAC_1_SQRT_2, 0.0)],
        'Y' => [c(FRAC_1_SQRT_2, 0.0), c(0.0, s * FRAC_1_SQRT_2)],
        'Z' if sign == 1 => [c(1.0, 0.0), c(0.0, 0.0)],
        'Z' => [c(0.0, 0.0), c(1.0, 0.0)],
        _ => panic!("unknown axis {axis}"),
    }
}

/// Probability of the outcome triple when the three GHZ qubits are
/// projected onto product eigenvectors: |⟨v1 v2 v3|GHZ⟩|².
pub fn ghz_projection(axes: [char; 3], outcomes: [i8; 3]) -> f64 {
    let vs: Vec<[Complex64; 2]> = axes.iter().zip(outcomes).map(|(&a, o)| eigvec(a, o)).collect();
    let overlap = |bit: usize| vs.iter().map(|v| v[bit].conj()).product::<Complex64>();
    (FRAC_1_SQRT_2 * (overlap(0) + overlap(1))).norm_sqr()
}

pub fn pauli(axis: char) -> [[Complex64; 2]; 2] {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match axis {
        'X' => [[z, o], [o, z]],
        'Y' => [[z, -i], [i, z]],
        'Z' => [[o, z], [z, -o]],
        _ => panic!("unknown axis {axis}"),
    }
}

/// ⟨GHZ| P1 ⊗ P2 ⊗ P3 |GHZ⟩ by explicit 8x8 matrix.
pub fn ghz_stabilizer(axes: [char; 3]) -> Complex64 {
    let ps: Vec<_> = axes.iter().map(|&a| pauli(a)).collect();
    let mut ghz = [c(0.0, 0.0); 8];
    ghz[0] = c(FRAC_1_SQRT_2, 0.0);
    ghz[7] = c(FRAC_1_SQRT_2, 0.0);
    let bit = |idx: usize, q: usize| (idx >> (2 - q)) & 1;
    let mut total = c(0.0, 0.0);
    for r in 0..8 {
        for col in 0..8 {
            let m: Complex64 = (0..3).map(|q| ps[q][bit(r, q)][bit(col, q)]).product();
            total += ghz[r].conj() * m * ghz[col];
        }
    }
    total
}

/// Single-qubit reduced density matrix by explicit partial trace.
pub fn partial_trace(amps: &[Complex64], qubit: usize) -> [[Complex64; 2]; 2] {
    let n = amps.len().trailing_zeros() as usize;
    let shift = n - 1 - qubit;
    let mut rho = [[c(0.0, 0.0); 2]; 2];
    for (i, a) in amps.iter().enumerate() {
        for (j, b) in amps.iter().enumerate() {
            let (bi, bj) = ((i >> shift) & 1, (j >> shift) & 1);
            if i & !(1 << shift) == j & !(1 << shift) {
                rho[bi][bj] += a * b.conj();
            }
        }
    }
    rho
}

/// All 2^k outcome tuples, +1 before -1, first position varying slowest.
pub fn tuples(k: usize) -> Vec<Vec<i8>> {
    (0..1usize << k)
        .map(|r| {
            (0..k)
                .map(|p| if (r >> (k - 1 - p)) & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect()
}
