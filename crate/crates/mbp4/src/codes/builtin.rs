//! Built-in code families: the [[5,1,3]] code, rotated surface and toric
//! lattices, and MacKay-style bicycle codes.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{CheckMatrix, Code, CodeError};
use crate::gf2::{self, BitRow};
use crate::pauli::{Pauli1, PauliString};

/// The \[\[5,1,3\]\] code with rows XZZXI, IXZZX, XIXZZ, ZXIXZ.
pub fn gen_five_qubit() -> Code {
    let rows: Vec<PauliString> = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let checks = CheckMatrix::from_rows(rows).expect("five-qubit rows are a valid check matrix");
    Code::from_checks("five_qubit", checks, Some(3)).expect("five-qubit code is valid")
}

/// Rotated surface code [[L^2, 1, L]] for odd L >= 3.
///
/// Qubits are numbered row-major starting at 1. Interior plaquettes form a
/// checkerboard (Z-type when the face's row+column is even, X-type when odd),
/// with weight-2 X pairs on the top/bottom boundaries and weight-2 Z pairs on
/// the left/right boundaries.
pub fn gen_surface(l: usize) -> Result<Code, CodeError> {
    if l < 3 || l.is_multiple_of(2) {
        return Err(CodeError::BadParameter(format!(
            "surface code requires odd L >= 3, got {l}"
        )));
    }
    let n = l * l;
    let q = |r: usize, c: usize| r * l + c;
    let mut rows = Vec::with_capacity(n - 1);
    // interior faces
    for r in 0..l - 1 {
        for c in 0..l - 1 {
            let w = if (r + c) % 2 == 0 { Pauli1::Z } else { Pauli1::X };
            rows.push(PauliString::from_sparse(
                n,
                &[(q(r, c), w), (q(r, c + 1), w), (q(r + 1, c), w), (q(r + 1, c + 1), w)],
            ));
        }
    }
    // top/bottom boundary X pairs (even columns on top, odd on bottom)
    for c in (0..l - 1).step_by(2) {
        rows.push(PauliString::from_sparse(n, &[(q(0, c), Pauli1::X), (q(0, c + 1), Pauli1::X)]));
    }
    for c in (1..l - 1).step_by(2) {
        rows.push(PauliString::from_sparse(
            n,
            &[(q(l - 1, c), Pauli1::X), (q(l - 1, c + 1), Pauli1::X)],
        ));
    }
    // left/right boundary Z pairs (odd rows on the left, even on the right)
    for r in (1..l - 1).step_by(2) {
        rows.push(PauliString::from_sparse(n, &[(q(r, 0), Pauli1::Z), (q(r + 1, 0), Pauli1::Z)]));
    }
    for r in (0..l - 1).step_by(2) {
        rows.push(PauliString::from_sparse(
            n,
            &[(q(r, l - 1), Pauli1::Z), (q(r + 1, l - 1), Pauli1::Z)],
        ));
    }
    debug_assert_eq!(rows.len(), n - 1);
    let checks = CheckMatrix::from_rows(rows)?;
    let mut code = Code::from_checks(format!("surface_{l}"), checks, Some(l))?;
    code.set_size_label(l.to_string());
    Ok(code)
}

/// Rotated toric code [[L^2, 2, L]] for even L >= 4.
///
/// All L^2 wrapped plaquettes are measured (two of them redundant), so every
/// stabilizer has weight 4 and every qubit sits in exactly 4 checks.
pub fn gen_toric(l: usize) -> Result<Code, CodeError> {
    if l < 4 || !l.is_multiple_of(2) {
        return Err(CodeError::BadParameter(format!(
            "toric code requires even L >= 4, got {l}"
        )));
    }
    let n = l * l;
    let q = |r: usize, c: usize| (r % l) * l + (c % l);
    let mut rows = Vec::with_capacity(n);
    for r in 0..l {
        for c in 0..l {
            let w = if (r + c) % 2 == 0 { Pauli1::Z } else { Pauli1::X };
            rows.push(PauliString::from_sparse(
                n,
                &[(q(r, c), w), (q(r, c + 1), w), (q(r + 1, c), w), (q(r + 1, c + 1), w)],
            ));
        }
    }
    let checks = CheckMatrix::from_rows(rows)?;
    let mut code = Code::from_checks(format!("toric_{l}"), checks, Some(l))?;
    code.set_size_label(l.to_string());
    Ok(code)
}

/// Qubit groups for the grouped-serial schedule on an LxL lattice: 2x2 blocks
/// in row-major block order (ragged at the boundary when L is odd).
pub fn lattice_groups(l: usize) -> Vec<Vec<usize>> {
    let mut groups = Vec::new();
    let mut br = 0;
    while br < l {
        let mut bc = 0;
        while bc < l {
            let mut g = Vec::new();
            for r in br..(br + 2).min(l) {
                for c in bc..(bc + 2).min(l) {
                    g.push(r * l + c);
                }
            }
            groups.push(g);
            bc += 2;
        }
        br += 2;
    }
    groups
}

/// MacKay-style bicycle code.
///
/// A random (N/2)x(N/2) circulant C with row weight `row_weight`/2 gives the
/// binary matrix H = [C, C^T]; rows of H are deleted down to (N-K)/2 with a
/// column-weight-balancing heuristic, and the kept supports define both the
/// X-type and Z-type stabilizers. Rows commute by the circulant identity
/// C C^T = C^T C. Deterministic for a fixed seed; seeds whose deletion leaves
/// a rank-deficient matrix are re-derived internally.
pub fn gen_bicycle(n: usize, k: usize, row_weight: usize, seed: u64) -> Result<Code, CodeError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(CodeError::BadParameter(format!("bicycle N must be even and >= 4, got {n}")));
    }
    if row_weight < 2 || !row_weight.is_multiple_of(2) {
        return Err(CodeError::BadParameter(format!(
            "bicycle row-weight must be even and >= 2, got {row_weight}"
        )));
    }
    if row_weight > n / 2 {
        return Err(CodeError::BadParameter(format!(
            "bicycle row-weight {row_weight} exceeds N/2 = {}",
            n / 2
        )));
    }
    if k >= n || !(n - k).is_multiple_of(2) {
        return Err(CodeError::BadParameter(format!(
            "bicycle K must satisfy K < N with N-K even, got N={n} K={k}"
        )));
    }
    let half = n / 2;
    let target_rows = (n - k) / 2;
    if target_rows > half {
        return Err(CodeError::BadParameter(format!(
            "bicycle needs (N-K)/2 <= N/2, got {target_rows} > {half}"
        )));
    }

    for attempt in 0..64u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(seed, attempt));
        let supports = bicycle_supports(half, row_weight / 2, target_rows, &mut rng);
        let bin_rank = {
            let rows: Vec<BitRow> = supports
                .iter()
                .map(|s| {
                    let mut r = BitRow::zero(n);
                    for &c in s {
                        r.set(c, true);
                    }
                    r
                })
                .collect();
            gf2::rank(n, &rows)
        };
        if bin_rank != target_rows {
            continue;
        }
        let mut rows = Vec::with_capacity(2 * target_rows);
        for w in [Pauli1::X, Pauli1::Z] {
            for s in &supports {
                let entries: Vec<(usize, Pauli1)> = s.iter().map(|&c| (c, w)).collect();
                rows.push(PauliString::from_sparse(n, &entries));
            }
        }
        let checks = CheckMatrix::from_rows(rows)?;
        let label = format!("bicycle_{n}_{k}_{row_weight}_s{seed}");
        return Code::from_checks(label, checks, None);
    }
    Err(CodeError::BadParameter(format!(
        "bicycle N={n} K={k} k={row_weight}: no full-rank instance found for seed {seed}"
    )))
}

fn mix_seed(seed: u64, attempt: u64) -> u64 {
    // splitmix64 round over (seed, attempt)
    let mut z = seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Builds the kept row supports of H = [C, C^T] after greedy deletion.
fn bicycle_supports(half: usize, circ_weight: usize, target_rows: usize, rng: &mut ChaCha12Rng) -> Vec<Vec<usize>> {
    // distinct shifts for the circulant's first row
    let mut all: Vec<usize> = (0..half).collect();
    all.shuffle(rng);
    let mut shifts: Vec<usize> = all[..circ_weight].to_vec();
    shifts.sort_unstable();

    let n = 2 * half;
    let mut supports: Vec<Vec<usize>> = (0..half)
        .map(|i| {
            let mut s: Vec<usize> = shifts.iter().map(|&sh| (i + sh) % half).collect();
            s.extend(shifts.iter().map(|&sh| half + (i + half - sh) % half));
            s.sort_unstable();
            s
        })
        .collect();

    // Greedy deletion: with all rows of equal weight the post-deletion column
    // mean is fixed, so minimizing variance means deleting the row whose
    // support carries the largest total column weight.
    let mut col_weight = vec![0usize; n];
    for s in &supports {
        for &c in s {
            col_weight[c] += 1;
        }
    }
    let mut alive: Vec<bool> = vec![true; half];
    let mut to_delete = half - target_rows;
    while to_delete > 0 {
        let mut best_score = 0usize;
        let mut best_rows: Vec<usize> = Vec::new();
        for (i, s) in supports.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let score: usize = s.iter().map(|&c| col_weight[c]).sum();
            if best_rows.is_empty() || score > best_score {
                best_score = score;
                best_rows.clear();
                best_rows.push(i);
            } else if score == best_score {
                best_rows.push(i);
            }
        }
        let victim = best_rows[rng.gen_range(0..best_rows.len())];
        alive[victim] = false;
        for &c in &supports[victim] {
            col_weight[c] -= 1;
        }
        to_delete -= 1;
    }

    let kept: Vec<Vec<usize>> = supports
        .drain(..)
        .zip(&alive)
        .filter_map(|(s, &a)| a.then_some(s))
        .collect();
    kept
}
