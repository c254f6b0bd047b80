//! Check matrices, Tanner adjacency, code metadata and logical operators.

mod builtin;
mod format;

pub use builtin::{gen_bicycle, gen_five_qubit, gen_surface, gen_toric, lattice_groups};
pub use format::{load_check_matrix, parse_check_matrix, write_check_matrix};

use std::path::PathBuf;

use thiserror::Error;

use crate::gf2::{self, BitRow, Echelon};
use crate::pauli::{Pauli1, PauliString};

/// Errors from code construction, parsing and validation.
#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("check matrix has no rows")]
    NoRows,
    #[error("row {row} has length {found}, expected {expected}")]
    RowLengthMismatch { row: usize, found: usize, expected: usize },
    #[error("row {row} is the identity (weight 0)")]
    EmptyRow { row: usize },
    #[error("rows anticommute: {row_a} and {row_b}")]
    NonCommutingRows { row_a: usize, row_b: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid logical operators: {0}")]
    BadLogicals(String),
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One Tanner edge endpoint: the node on the other side, the check-matrix
/// entry on the edge, and a dense edge id shared by both adjacency views.
#[derive(Debug, Clone, Copy)]
pub struct EdgeRef {
    pub node: usize,
    pub pauli: Pauli1,
    pub edge: usize,
}

/// M x N quaternary check matrix with its Tanner adjacency.
///
/// Construction validates that every pair of rows commutes and that no row
/// is the identity. Edge ids are assigned in check-major order.
#[derive(Debug, Clone)]
pub struct CheckMatrix {
    rows: Vec<PauliString>,
    n: usize,
    /// N(m): neighbors of check m, ascending qubit index.
    check_adj: Vec<Vec<EdgeRef>>,
    /// M(n): neighbors of qubit n, ascending check index.
    qubit_adj: Vec<Vec<EdgeRef>>,
    edge_count: usize,
}

impl CheckMatrix {
    pub fn from_rows(rows: Vec<PauliString>) -> Result<Self, CodeError> {
        if rows.is_empty() {
            return Err(CodeError::NoRows);
        }
        let n = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(CodeError::RowLengthMismatch { row: i, found: r.len(), expected: n });
            }
            if r.is_identity() {
                return Err(CodeError::EmptyRow { row: i });
            }
        }
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if !rows[i].commutes_with(&rows[j]) {
                    return Err(CodeError::NonCommutingRows { row_a: i, row_b: j });
                }
            }
        }

        let mut check_adj: Vec<Vec<EdgeRef>> = Vec::with_capacity(rows.len());
        let mut qubit_adj: Vec<Vec<EdgeRef>> = vec![Vec::new(); n];
        let mut edge = 0;
        for (m, row) in rows.iter().enumerate() {
            let mut adj = Vec::new();
            for (q, p) in row.support() {
                adj.push(EdgeRef { node: q, pauli: p, edge });
                qubit_adj[q].push(EdgeRef { node: m, pauli: p, edge });
                edge += 1;
            }
            check_adj.push(adj);
        }

        Ok(CheckMatrix { rows, n, check_adj, qubit_adj, edge_count: edge })
    }

    #[inline]
    pub fn num_checks(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, m: usize) -> &PauliString {
        &self.rows[m]
    }

    /// Support of check `m` (the set N(m)).
    #[inline]
    pub fn check_neighbors(&self, m: usize) -> &[EdgeRef] {
        &self.check_adj[m]
    }

    /// Checks incident to qubit `n` (the set M(n)).
    #[inline]
    pub fn qubit_neighbors(&self, n: usize) -> &[EdgeRef] {
        &self.qubit_adj[n]
    }

    /// Binary syndrome of `error`: bit m is 1 iff the error anticommutes
    /// with row m. Panics on length mismatch (usage error).
    pub fn syndrome(&self, error: &PauliString) -> Vec<bool> {
        assert_eq!(
            error.len(),
            self.n,
            "error length {} does not match qubit count {}",
            error.len(),
            self.n
        );
        self.rows.iter().map(|r| !r.commutes_with(error)).collect()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.weight()).collect()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.qubit_adj.iter().map(|a| a.len()).collect()
    }

    fn symplectic_rows(&self) -> Vec<BitRow> {
        self.rows
            .iter()
            .map(|r| BitRow::from_bools(&r.symplectic_bits()))
            .collect()
    }
}

/// A stabilizer code: checks plus derived metadata and logical operators.
#[derive(Debug, Clone)]
pub struct Code {
    label: String,
    size_label: String,
    checks: CheckMatrix,
    rank: usize,
    k: usize,
    distance: Option<usize>,
    logicals: Vec<(PauliString, PauliString)>,
    /// Echelon basis of the symplectic row space, for coset membership.
    stabilizer_space: Echelon,
}

impl Code {
    /// Builds a code from validated checks, deriving K and the logical pairs.
    pub fn from_checks(
        label: impl Into<String>,
        checks: CheckMatrix,
        distance: Option<usize>,
    ) -> Result<Self, CodeError> {
        let stabilizer_space = Echelon::from_rows(2 * checks.num_qubits(), &checks.symplectic_rows());
        let rank = stabilizer_space.rank();
        let k = checks.num_qubits() - rank;
        let logicals = compute_logicals_from_space(&checks, &stabilizer_space);
        debug_assert_eq!(logicals.len(), k);
        let label = label.into();
        let size_label = checks.num_qubits().to_string();
        Ok(Code { label, size_label, checks, rank, k, distance, logicals, stabilizer_space })
    }

    /// Builds a code with externally supplied logical pairs, validating them
    /// against the checks.
    pub fn from_checks_with_logicals(
        label: impl Into<String>,
        checks: CheckMatrix,
        distance: Option<usize>,
        logicals: Vec<(PauliString, PauliString)>,
    ) -> Result<Self, CodeError> {
        let stabilizer_space = Echelon::from_rows(2 * checks.num_qubits(), &checks.symplectic_rows());
        let rank = stabilizer_space.rank();
        let k = checks.num_qubits() - rank;
        validate_logicals(&checks, &stabilizer_space, k, &logicals)?;
        let label = label.into();
        let size_label = checks.num_qubits().to_string();
        Ok(Code { label, size_label, checks, rank, k, distance, logicals, stabilizer_space })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.checks.num_qubits()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.checks.num_checks()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn distance(&self) -> Option<usize> {
        self.distance
    }

    #[inline]
    pub fn checks(&self) -> &CheckMatrix {
        &self.checks
    }

    #[inline]
    pub fn logicals(&self) -> &[(PauliString, PauliString)] {
        &self.logicals
    }

    #[inline]
    pub fn label(&self) -> &str {
        &self.label
    }

    /// "L" for the built-in lattice codes, otherwise "N".
    #[inline]
    pub fn size_label(&self) -> &str {
        &self.size_label
    }

    pub(crate) fn set_size_label(&mut self, s: impl Into<String>) {
        self.size_label = s.into();
    }

    #[inline]
    pub fn syndrome(&self, error: &PauliString) -> Vec<bool> {
        self.checks.syndrome(error)
    }

    /// True iff `p` is a product of stabilizer rows (phase-free membership
    /// in the row space of the symplectic image).
    pub fn in_stabilizer_group(&self, p: &PauliString) -> bool {
        assert_eq!(p.len(), self.n(), "operator length must match qubit count");
        self.stabilizer_space
            .contains(&BitRow::from_bools(&p.symplectic_bits()))
    }

    /// An independent generating subset of the rows (one per pivot of the
    /// symplectic row space), used by brute-force oracles.
    pub fn independent_generators(&self) -> Vec<PauliString> {
        let mut echelon = Echelon::new(2 * self.n());
        let mut gens = Vec::with_capacity(self.rank);
        for row in self.checks.rows() {
            if echelon.insert(BitRow::from_bools(&row.symplectic_bits())) {
                gens.push(row.clone());
            }
        }
        gens
    }
}

fn validate_logicals(
    checks: &CheckMatrix,
    space: &Echelon,
    k: usize,
    logicals: &[(PauliString, PauliString)],
) -> Result<(), CodeError> {
    if logicals.len() != k {
        return Err(CodeError::BadLogicals(format!(
            "expected {k} logical pairs, found {}",
            logicals.len()
        )));
    }
    let n = checks.num_qubits();
    let flat: Vec<&PauliString> = logicals.iter().flat_map(|(x, z)| [x, z]).collect();
    for l in &flat {
        if l.len() != n {
            return Err(CodeError::BadLogicals("logical length mismatch".into()));
        }
        for (m, row) in checks.rows().iter().enumerate() {
            if !l.commutes_with(row) {
                return Err(CodeError::BadLogicals(format!(
                    "logical {l} anticommutes with row {m}"
                )));
            }
        }
        if space.contains(&BitRow::from_bools(&l.symplectic_bits())) {
            return Err(CodeError::BadLogicals(format!("logical {l} lies in the stabilizer group")));
        }
    }
    for (j, (xj, zj)) in logicals.iter().enumerate() {
        for (kk, (xk, zk)) in logicals.iter().enumerate() {
            let want_anti = j == kk;
            if xj.commutes_with(zk) == want_anti {
                return Err(CodeError::BadLogicals(format!(
                    "pairing <X[{j}], Z[{kk}]> violated"
                )));
            }
            if !xj.commutes_with(xk) || !zj.commutes_with(zk) {
                return Err(CodeError::BadLogicals("logicals of equal type must commute".into()));
            }
        }
    }
    Ok(())
}

/// Extracts K symplectically paired logical operators from a check matrix.
///
/// Representatives of N(S)/S are found as the part of the centralizer
/// nullspace that is independent of the row space, then paired by a
/// symplectic Gram-Schmidt sweep so that `<X_j, Z_k> = delta_jk`.
pub fn compute_logicals(checks: &CheckMatrix) -> Vec<(PauliString, PauliString)> {
    let space = Echelon::from_rows(2 * checks.num_qubits(), &checks.symplectic_rows());
    compute_logicals_from_space(checks, &space)
}

fn compute_logicals_from_space(
    checks: &CheckMatrix,
    space: &Echelon,
) -> Vec<(PauliString, PauliString)> {
    let n = checks.num_qubits();
    // Centralizer: commutation against row r is the dot product with r's
    // half-swapped symplectic vector.
    let swapped: Vec<BitRow> = checks
        .rows()
        .iter()
        .map(|r| {
            let bits = r.symplectic_bits();
            let mut sw = Vec::with_capacity(2 * n);
            sw.extend_from_slice(&bits[n..]);
            sw.extend_from_slice(&bits[..n]);
            BitRow::from_bools(&sw)
        })
        .collect();
    let centralizer = gf2::nullspace(2 * n, &swapped);

    let mut extended = space.clone();
    let mut reps: Vec<PauliString> = Vec::new();
    for v in &centralizer {
        if extended.insert(v.clone()) {
            reps.push(PauliString::from_symplectic_bits(&v.to_bools()));
        }
    }
    debug_assert_eq!(reps.len() % 2, 0);

    let mut pairs = Vec::with_capacity(reps.len() / 2);
    let mut pool = reps;
    while let Some(a) = pool.pop() {
        let j = pool
            .iter()
            .position(|b| !a.commutes_with(b))
            .expect("symplectic form is nondegenerate on N(S)/S");
        let b = pool.swap_remove(j);
        for c in pool.iter_mut() {
            let fa = !c.commutes_with(&a);
            let fb = !c.commutes_with(&b);
            if fa {
                c.mul_assign(&b);
            }
            if fb {
                c.mul_assign(&a);
            }
        }
        pairs.push((a, b));
    }
    pairs.reverse();
    pairs
}
