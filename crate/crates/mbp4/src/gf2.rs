//! Bit-packed GF(2) linear algebra: rank, row-echelon bases with membership
//! queries, and nullspace computation. Rows are `u64`-packed bit vectors.

/// A packed GF(2) row vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitRow {
    cols: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zero(cols: usize) -> Self {
        BitRow {
            cols,
            words: vec![0; cols.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut r = BitRow::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                r.set(i, true);
            }
        }
        r
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.cols).map(|i| self.get(i)).collect()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let (w, b) = (i / 64, i % 64);
        if v {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.cols, other.cols);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the first set bit, if any.
    pub fn leading_one(&self) -> Option<usize> {
        for (w, &word) in self.words.iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }
}

/// Row-echelon basis of a GF(2) row space, supporting membership reduction.
///
/// Pivot columns are strictly increasing; each basis row has its leading one
/// at its pivot column.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<BitRow>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<'a>(cols: usize, rows: impl IntoIterator<Item = &'a BitRow>) -> Self {
        let mut e = Echelon::new(cols);
        for r in rows {
            e.insert(r.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis in place; the remainder is zero iff
    /// `row` was in the span.
    pub fn reduce(&self, row: &mut BitRow) {
        debug_assert_eq!(row.cols, self.cols);
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if row.get(p) {
                row.xor_assign(r);
            }
        }
    }

    pub fn contains(&self, row: &BitRow) -> bool {
        let mut r = row.clone();
        self.reduce(&mut r);
        r.is_zero()
    }

    /// Inserts a row, keeping echelon form. Returns true if it increased the
    /// rank (i.e. the row was independent of the basis so far).
    pub fn insert(&mut self, mut row: BitRow) -> bool {
        self.reduce(&mut row);
        match row.leading_one() {
            None => false,
            Some(p) => {
                // back-substitute to keep pivot columns clean above
                for (r, &q) in self.rows.iter_mut().zip(&self.pivots) {
                    debug_assert!(q != p);
                    if r.get(p) {
                        r.xor_assign(&row);
                    }
                }
                let pos = self.pivots.partition_point(|&q| q < p);
                self.rows.insert(pos, row);
                self.pivots.insert(pos, p);
                true
            }
        }
    }
}

/// Rank of an arbitrary list of packed rows.
pub fn rank<'a>(cols: usize, rows: impl IntoIterator<Item = &'a BitRow>) -> usize {
    Echelon::from_rows(cols, rows).rank()
}

/// Basis of the right nullspace `{ v : M v = 0 }` of the matrix with the
/// given rows.
pub fn nullspace(cols: usize, rows: &[BitRow]) -> Vec<BitRow> {
    // Eliminate a working copy, tracking pivot columns.
    let mut work: Vec<BitRow> = Vec::new();
    let mut pivot_of_row: Vec<usize> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for (w, &p) in work.iter().zip(&pivot_of_row) {
            if r.get(p) {
                r.xor_assign(w);
            }
        }
        if let Some(p) = r.leading_one() {
            for (w, &q) in work.iter_mut().zip(&pivot_of_row) {
                debug_assert!(q != p);
                if w.get(p) {
                    w.xor_assign(&r);
                }
            }
            work.push(r);
            pivot_of_row.push(p);
        }
    }
    let mut is_pivot = vec![false; cols];
    for &p in &pivot_of_row {
        is_pivot[p] = true;
    }
    // One basis vector per free column: free column set to 1, pivot columns
    // solved from the reduced rows.
    let mut basis = Vec::with_capacity(cols - work.len());
    for (free, _) in is_pivot.iter().enumerate().filter(|(_, &p)| !p) {
        let mut v = BitRow::zero(cols);
        v.set(free, true);
        for (w, &p) in work.iter().zip(&pivot_of_row) {
            if w.get(free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}
