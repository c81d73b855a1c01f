//! Sparse feature vectors and the row-major design matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted index -> weight vector. Zero weights are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    dim: usize,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: Vec::new(),
            dim,
        }
    }

    /// Canonicalize arbitrary pairs: sort, merge duplicate indices, drop
    /// zeros. Panics on indices outside the dimension.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_unstable_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, w) in pairs {
            assert!(i < dim, "index {i} out of dimension {dim}");
            match entries.last_mut() {
                Some((last, acc)) if *last == i => *acc += w,
                _ => entries.push((i, w)),
            }
        }
        entries.retain(|(_, w)| *w != 0.0);
        Self { entries, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Value at an index (0 when absent).
    pub fn get(&self, index: usize) -> f64 {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let mut a = self.entries.iter().peekable();
        let mut b = other.entries.iter().peekable();
        let mut sum = 0.0;
        while let (Some(&&(ia, wa)), Some(&&(ib, wb))) = (a.peek(), b.peek()) {
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    sum += wa * wb;
                    a.next();
                    b.next();
                }
            }
        }
        sum
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    /// Scale every stored weight in place.
    pub fn scale(&mut self, factor: f64) {
        for (_, w) in &mut self.entries {
            *w *= factor;
        }
    }

    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        let mut a = self.entries.iter().peekable();
        let mut b = other.entries.iter().peekable();
        let mut sum = 0.0;
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ia, wa)), Some(&&(ib, wb))) => match ia.cmp(&ib) {
                    std::cmp::Ordering::Less => {
                        sum += wa * wa;
                        a.next();
                    }
                    std::cmp::Ordering::Greater => {
                        sum += wb * wb;
                        b.next();
                    }
                    std::cmp::Ordering::Equal => {
                        let d = wa - wb;
                        sum += d * d;
                        a.next();
                        b.next();
                    }
                },
                (Some(&&(_, wa)), None) => {
                    sum += wa * wa;
                    a.next();
                }
                (None, Some(&&(_, wb))) => {
                    sum += wb * wb;
                    b.next();
                }
                (None, None) => break,
            }
        }
        sum
    }

    /// `self + gap * (other - self)`; the segment point used by SMOTE.
    pub fn interpolate(&self, other: &SparseVector, gap: f64) -> SparseVector {
        let mut pairs = Vec::with_capacity(self.nnz() + other.nnz());
        let mut a = self.entries.iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ia, wa)), Some(&&(ib, wb))) => match ia.cmp(&ib) {
                    std::cmp::Ordering::Less => {
                        pairs.push((ia, wa + gap * (0.0 - wa)));
                        a.next();
                    }
                    std::cmp::Ordering::Greater => {
                        pairs.push((ib, gap * wb));
                        b.next();
                    }
                    std::cmp::Ordering::Equal => {
                        pairs.push((ia, wa + gap * (wb - wa)));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&(ia, wa)), None) => {
                    pairs.push((ia, wa + gap * (0.0 - wa)));
                    a.next();
                }
                (None, Some(&&(ib, wb))) => {
                    pairs.push((ib, gap * wb));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVector::from_pairs(self.dim.max(other.dim), pairs)
    }

    /// Shift every index by `offset` into a wider target dimension.
    pub fn offset(&self, offset: usize, new_dim: usize) -> SparseVector {
        let entries = self
            .entries
            .iter()
            .map(|&(i, w)| {
                assert!(offset + i < new_dim);
                (offset + i, w)
            })
            .collect();
        SparseVector {
            entries,
            dim: new_dim,
        }
    }
}

/// Named column span inside an assembled design matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpan {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

/// Row collection sharing one dimension, with a named block layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    rows: Vec<SparseVector>,
    dim: usize,
    layout: Vec<BlockSpan>,
}

impl DesignMatrix {
    /// Wrap rows of a single unnamed block.
    pub fn from_rows(rows: Vec<SparseVector>, dim: usize) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.dim() != dim {
                return Err(Error::Eval(format!(
                    "row {i} has dimension {} but the matrix expects {dim}",
                    row.dim()
                )));
            }
        }
        Ok(Self {
            rows,
            dim,
            layout: vec![BlockSpan {
                name: "all".to_string(),
                offset: 0,
                width: dim,
            }],
        })
    }

    /// Concatenate equally sized blocks column-wise, recording the layout.
    pub fn assemble(blocks: &[(&str, &[SparseVector])]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Eval("cannot assemble zero blocks".to_string()));
        }
        let n_rows = blocks[0].1.len();
        for (name, rows) in blocks {
            if rows.len() != n_rows {
                return Err(Error::Eval(format!(
                    "block `{name}` has {} rows, expected {n_rows}",
                    rows.len()
                )));
            }
        }

        let mut layout = Vec::with_capacity(blocks.len());
        let mut offset = 0usize;
        for (name, rows) in blocks {
            let width = rows.first().map(|r| r.dim()).unwrap_or(0);
            for (i, row) in rows.iter().enumerate() {
                if row.dim() != width {
                    return Err(Error::Eval(format!(
                        "block `{name}` row {i} has dimension {}, expected {width}",
                        row.dim()
                    )));
                }
            }
            layout.push(BlockSpan {
                name: name.to_string(),
                offset,
                width,
            });
            offset += width;
        }
        let dim = offset;

        let mut rows = Vec::with_capacity(n_rows);
        for r in 0..n_rows {
            let mut pairs = Vec::new();
            for (span, (_, block_rows)) in layout.iter().zip(blocks.iter()) {
                for &(i, w) in block_rows[r].entries() {
                    pairs.push((span.offset + i, w));
                }
            }
            rows.push(SparseVector::from_pairs(dim, pairs));
        }
        Ok(Self { rows, dim, layout })
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseVector {
        &self.rows[i]
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> &[BlockSpan] {
        &self.layout
    }

    pub fn span(&self, name: &str) -> Option<&BlockSpan> {
        self.layout.iter().find(|s| s.name == name)
    }

    /// New matrix with the given rows appended (same dimension required).
    pub fn with_extra_rows(&self, extra: Vec<SparseVector>) -> Result<Self> {
        let mut rows = self.rows.clone();
        for row in extra {
            if row.dim() != self.dim {
                return Err(Error::Eval(format!(
                    "appended row has dimension {}, expected {}",
                    row.dim(),
                    self.dim
                )));
            }
            rows.push(row);
        }
        Ok(Self {
            rows,
            dim: self.dim,
            layout: self.layout.clone(),
        })
    }

    /// Sub-matrix at the given row indices, layout preserved.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            dim: self.dim,
            layout: self.layout.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(dim: usize, pairs: &[(usize, f64)]) -> SparseVector {
        SparseVector::from_pairs(dim, pairs.to_vec())
    }

    #[test]
    fn from_pairs_sorts_merges_and_drops_zeros() {
        let v = sv(5, &[(3, 1.0), (1, 2.0), (3, -1.0), (0, 0.0)]);
        assert_eq!(v.entries(), &[(1, 2.0)]);
    }

    #[test]
    fn dot_and_distance_agree_with_dense_arithmetic() {
        let a = sv(4, &[(0, 1.0), (2, 2.0)]);
        let b = sv(4, &[(1, 3.0), (2, 4.0)]);
        assert_eq!(a.dot(&b), 8.0);
        // dense: (1-0)^2 + (0-3)^2 + (2-4)^2 = 1 + 9 + 4
        assert_eq!(a.squared_distance(&b), 14.0);
    }

    #[test]
    fn interpolation_is_a_convex_combination() {
        let a = sv(3, &[(0, 1.0)]);
        let b = sv(3, &[(1, 2.0)]);
        let mid = a.interpolate(&b, 0.25);
        assert_eq!(mid.get(0), 0.75);
        assert_eq!(mid.get(1), 0.5);
        assert_eq!(a.interpolate(&b, 0.0), a);
        assert_eq!(a.interpolate(&b, 1.0), b);
    }

    #[test]
    fn assemble_concatenates_blocks_with_spans() {
        let text = [sv(3, &[(0, 1.0)]), sv(3, &[(2, 0.5)])];
        let meta = [sv(2, &[(1, 1.0)]), sv(2, &[(0, 1.0)])];
        let matrix = DesignMatrix::assemble(&[("text", &text), ("meta", &meta)]).unwrap();
        assert_eq!(matrix.dim(), 5);
        assert_eq!(
            matrix.layout(),
            &[
                BlockSpan {
                    name: "text".into(),
                    offset: 0,
                    width: 3
                },
                BlockSpan {
                    name: "meta".into(),
                    offset: 3,
                    width: 2
                }
            ]
        );
        assert_eq!(matrix.row(0).entries(), &[(0, 1.0), (4, 1.0)]);
        assert_eq!(matrix.row(1).entries(), &[(2, 0.5), (3, 1.0)]);
    }

    #[test]
    fn assemble_of_zero_rows_keeps_dimension() {
        let text = [SparseVector::zeros(3)];
        let meta = [SparseVector::zeros(2)];
        let matrix = DesignMatrix::assemble(&[("text", &text), ("meta", &meta)]).unwrap();
        assert_eq!(matrix.dim(), 5);
        assert!(matrix.row(0).is_zero());
    }

    #[test]
    fn assemble_rejects_row_count_mismatch() {
        let text = [sv(3, &[]), sv(3, &[])];
        let meta = [sv(2, &[])];
        let err = DesignMatrix::assemble(&[("text", &text), ("meta", &meta)]).unwrap_err();
        assert!(err.to_string().contains("meta"));
    }

    #[test]
    fn assemble_is_deterministic() {
        let text = [sv(3, &[(1, 0.3)])];
        let meta = [sv(2, &[(0, 1.0)])];
        let a = DesignMatrix::assemble(&[("text", &text), ("meta", &meta)]).unwrap();
        let b = DesignMatrix::assemble(&[("text", &text), ("meta", &meta)]).unwrap();
        assert_eq!(a, b);
    }
}
