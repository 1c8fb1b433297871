//! Exact linear algebra over the rationals.
//!
//! Everything funnels through [`Rref`]: rows go in (in any order), and a
//! unique reduced row echelon form comes out, so every subspace handled by
//! the crate has one canonical matrix representation. Elimination is done
//! on integer-scaled rows with content normalization; leading-one
//! normalization happens once at the end.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Rational;

#[derive(Clone, Debug)]
struct EchelonRow {
    lead: usize,
    entries: Vec<BigInt>,
}

/// Incremental exact row reducer with a canonical finalized form.
#[derive(Clone, Debug)]
pub struct Rref {
    ncols: usize,
    // echelon (not yet fully reduced) rows, keyed by leading column
    rows: BTreeMap<usize, EchelonRow>,
}

fn normalize_content(entries: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for e in entries.iter() {
        if !e.is_zero() {
            g = g.gcd(e);
        }
    }
    if g.is_zero() || g.is_one() {
    } else {
        for e in entries.iter_mut() {
            *e = &*e / &g;
        }
    }
    if let Some(first) = entries.iter().find(|e| !e.is_zero()) {
        if first.is_negative() {
            for e in entries.iter_mut() {
                *e = -&*e;
            }
        }
    }
}

impl Rref {
    pub fn new(ncols: usize) -> Rref {
        Rref {
            ncols,
            rows: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; returns true if it increased the rank.
    pub fn add_row(&mut self, row: &[Rational]) -> bool {
        assert_eq!(row.len(), self.ncols, "row width mismatch");
        let mut scale = BigInt::one();
        for r in row {
            scale = scale.lcm(r.denom());
        }
        let ints: Vec<BigInt> = row.iter().map(|r| r.numer() * (&scale / r.denom())).collect();
        self.add_int_row(ints)
    }

    fn add_int_row(&mut self, mut entries: Vec<BigInt>) -> bool {
        let mut lead = match entries.iter().position(|e| !e.is_zero()) {
            Some(l) => l,
            None => return false,
        };
        loop {
            match self.rows.get(&lead) {
                None => break,
                Some(pivot) => {
                    // entries <- entries*p - pivot*q, clearing column `lead`
                    let q = entries[lead].clone();
                    let p = pivot.entries[lead].clone();
                    let g = p.gcd(&q);
                    let p = &p / &g;
                    let q = &q / &g;
                    for i in lead..self.ncols {
                        entries[i] = &entries[i] * &p - &pivot.entries[i] * &q;
                    }
                    match entries.iter().position(|e| !e.is_zero()) {
                        Some(l) => lead = l,
                        None => return false,
                    }
                }
            }
        }
        normalize_content(&mut entries);
        self.rows.insert(lead, EchelonRow { lead, entries });
        true
    }

    /// Reduces an external vector against the echelon rows; the result is
    /// zero exactly when the vector lies in the row space.
    pub fn reduce_vector(&self, row: &[Rational]) -> Vec<Rational> {
        assert_eq!(row.len(), self.ncols);
        let mut out = row.to_vec();
        for (lead, pivot) in &self.rows {
            if out[*lead].is_zero() {
                continue;
            }
            let factor = &out[*lead] / Rational::from(pivot.entries[*lead].clone());
            for i in *lead..self.ncols {
                if !pivot.entries[i].is_zero() {
                    out[i] -= &factor * Rational::from(pivot.entries[i].clone());
                }
            }
        }
        out
    }

    pub fn contains(&self, row: &[Rational]) -> bool {
        self.reduce_vector(row).iter().all(|x| x.is_zero())
    }

    /// Unique reduced row echelon basis of the row space, rows ordered by
    /// pivot column, each with leading coefficient one.
    pub fn canonical_rows(&self) -> Vec<Vec<Rational>> {
        let mut rows: Vec<EchelonRow> = self.rows.values().cloned().collect();
        // back-eliminate: clear each pivot column above its row
        for j in (0..rows.len()).rev() {
            let (above, rest) = rows.split_at_mut(j);
            let pivot = &rest[0];
            let col = pivot.lead;
            for r in above.iter_mut() {
                if r.entries[col].is_zero() {
                    continue;
                }
                let q = r.entries[col].clone();
                let p = pivot.entries[col].clone();
                let g = p.gcd(&q);
                let p = &p / &g;
                let q = &q / &g;
                for i in 0..self.ncols {
                    r.entries[i] = &r.entries[i] * &p - &pivot.entries[i] * &q;
                }
                normalize_content(&mut r.entries);
            }
        }
        rows.iter()
            .map(|r| {
                let leadval = Rational::from(r.entries[r.lead].clone());
                r.entries
                    .iter()
                    .map(|e| Rational::from(e.clone()) / leadval.clone())
                    .collect()
            })
            .collect()
    }

    /// Pivot columns in ascending order.
    pub fn pivot_cols(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }
}

/// Canonical reduced row echelon form of a spanning set.
pub fn rref_rows(rows: impl IntoIterator<Item = Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let mut rr = Rref::new(ncols);
    for row in rows {
        rr.add_row(&row);
    }
    rr.canonical_rows()
}

/// Canonical basis of the solution space of `M x = 0`, where the rows of
/// `M` are the given constraint rows.
pub fn kernel_basis(
    constraints: impl IntoIterator<Item = Vec<Rational>>,
    ncols: usize,
) -> Vec<Vec<Rational>> {
    let mut rr = Rref::new(ncols);
    for row in constraints {
        rr.add_row(&row);
    }
    let reduced = rr.canonical_rows();
    let pivots = rr.pivot_cols();
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in 0..ncols {
        if is_pivot[f] {
            continue;
        }
        let mut v = vec![Rational::zero(); ncols];
        v[f] = Rational::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -reduced[r][f].clone();
        }
        basis.push(v);
    }
    rref_rows(basis, ncols)
}

/// Canonical basis of the intersection of two row spaces given by
/// spanning rows `u` and `w` of common width `ncols`.
pub fn intersect_rowspaces(
    u: &[Vec<Rational>],
    w: &[Vec<Rational>],
    ncols: usize,
) -> Vec<Vec<Rational>> {
    if u.is_empty() || w.is_empty() {
        return Vec::new();
    }
    let k = u.len();
    let m = w.len();
    // columns of the stacked transpose system: x (k) then y (m), with
    // sum_i x_i u_i = sum_j y_j w_j
    let mut constraints = Vec::with_capacity(ncols);
    for col in 0..ncols {
        let mut row = Vec::with_capacity(k + m);
        for ui in u {
            row.push(ui[col].clone());
        }
        for wj in w {
            row.push(-wj[col].clone());
        }
        constraints.push(row);
    }
    let solutions = kernel_basis(constraints, k + m);
    let combos = solutions.into_iter().map(|xy| {
        let mut v = vec![Rational::zero(); ncols];
        for (i, ui) in u.iter().enumerate() {
            if !xy[i].is_zero() {
                for c in 0..ncols {
                    v[c] += &xy[i] * &ui[c];
                }
            }
        }
        v
    });
    rref_rows(combos, ncols)
}
