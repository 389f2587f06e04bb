//! Zero-pattern structure: perfect matchings, positive diagonals, the
//! projection onto entries that lie on positive diagonals, membership in
//! `P_n`, fully indecomposable blocks, and Frobenius–König witnesses.
//!
//! An entry is structurally zero iff it equals `0.0` exactly.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::Result;
use crate::{NonnegMatrix, Scalar};

const UNMATCHED: usize = usize::MAX;

/// Square boolean mask, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Support {
    n: usize,
    cells: Vec<bool>,
}

impl Support {
    pub fn new(n: usize, cells: Vec<bool>) -> Self {
        assert_eq!(cells.len(), n * n, "support mask must be n x n");
        Self { n, cells }
    }

    pub fn of<T: Scalar>(a: &NonnegMatrix<T>) -> Result<Self> {
        let n = a.order()?;
        Ok(Self::new(n, a.support()))
    }

    pub fn full(n: usize) -> Self {
        Self::new(n, vec![true; n * n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| self.get(i, j)).collect())
            .collect()
    }
}

/// Maximum matching of the row/column bipartite graph of a support mask.
#[derive(Debug, Clone)]
struct Matching {
    row_to_col: Vec<usize>,
    col_to_row: Vec<usize>,
    size: usize,
}

/// Hopcroft–Karp, `O(E sqrt(V))`.
fn hopcroft_karp(adj: &[Vec<usize>], n_cols: usize) -> Matching {
    let n_rows = adj.len();
    let mut row_to_col = vec![UNMATCHED; n_rows];
    let mut col_to_row = vec![UNMATCHED; n_cols];
    let mut dist = vec![0usize; n_rows];
    let mut size = 0;

    loop {
        // BFS layering from free rows.
        let mut queue = VecDeque::new();
        for r in 0..n_rows {
            if row_to_col[r] == UNMATCHED {
                dist[r] = 0;
                queue.push_back(r);
            } else {
                dist[r] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(r) = queue.pop_front() {
            for &c in &adj[r] {
                let r2 = col_to_row[c];
                if r2 == UNMATCHED {
                    found = true;
                } else if dist[r2] == usize::MAX {
                    dist[r2] = dist[r] + 1;
                    queue.push_back(r2);
                }
            }
        }
        if !found {
            break;
        }
        let mut next_edge = vec![0usize; n_rows];
        for r in 0..n_rows {
            if row_to_col[r] == UNMATCHED
                && augment(
                    r,
                    adj,
                    &mut row_to_col,
                    &mut col_to_row,
                    &mut dist,
                    &mut next_edge,
                )
            {
                size += 1;
            }
        }
    }
    Matching {
        row_to_col,
        col_to_row,
        size,
    }
}

/// Layered DFS along the BFS levels; iterative so deep chains cannot overflow the stack.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    row_to_col: &mut [usize],
    col_to_row: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    let mut stack: Vec<usize> = vec![root];
    // Columns chosen along the current path, parallel to `stack`.
    let mut path_cols: Vec<usize> = Vec::new();
    while let Some(&r) = stack.last() {
        if next_edge[r] >= adj[r].len() {
            dist[r] = usize::MAX;
            stack.pop();
            path_cols.pop();
            continue;
        }
        let c = adj[r][next_edge[r]];
        next_edge[r] += 1;
        let r2 = col_to_row[c];
        if r2 == UNMATCHED {
            path_cols.push(c);
            for (&row, &col) in stack.iter().zip(&path_cols) {
                row_to_col[row] = col;
                col_to_row[col] = row;
            }
            return true;
        }
        if dist[r2] == dist[r].wrapping_add(1) {
            path_cols.push(c);
            stack.push(r2);
        }
    }
    false
}

/// Perfect matching (row `i` ↦ column `m[i]`) through `true` entries, if one exists.
pub fn max_bipartite_matching(support: &Support) -> Option<Vec<usize>> {
    let m = hopcroft_karp(&support.adjacency(), support.n());
    (m.size == support.n()).then_some(m.row_to_col)
}

/// A fully indecomposable component: equal-size row and column index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Zero submatrix `rows × cols` with `|rows| + |cols| = n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FkWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl FkWitness {
    /// Checks the defining property against a matrix.
    pub fn certifies<T: Scalar>(&self, a: &NonnegMatrix<T>) -> bool {
        a.is_square()
            && self.rows.len() + self.cols.len() == a.rows() + 1
            && self
                .rows
                .iter()
                .all(|&i| self.cols.iter().all(|&j| a.get(i, j) == T::zero()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternReport {
    pub has_positive_diagonal: bool,
    /// Support of the projection `Π(A)`.
    pub pi_support: Support,
    #[serde(rename = "in_Pn")]
    pub in_pn: bool,
    /// Fully indecomposable components of `Π(A)`, ordered by smallest row index.
    pub blocks: Vec<Block>,
    pub fk_witness: Option<FkWitness>,
}

impl PatternReport {
    /// Full structural analysis of a square matrix's zero pattern.
    pub fn analyze<T: Scalar>(a: &NonnegMatrix<T>) -> Result<Self> {
        let support = Support::of(a)?;
        Ok(analyze_support(&support))
    }
}

fn analyze_support(support: &Support) -> PatternReport {
    let n = support.n();
    let adj = support.adjacency();
    let matching = hopcroft_karp(&adj, n);

    if matching.size < n {
        return PatternReport {
            has_positive_diagonal: false,
            pi_support: Support::new(n, vec![false; n * n]),
            in_pn: false,
            blocks: Vec::new(),
            fk_witness: Some(konig_witness(&adj, &matching, n)),
        };
    }

    // Row digraph: i -> i' whenever i can take the column matched to i'.
    // An entry (i, m(i')) lies on a positive diagonal iff i and i' share a
    // strongly connected component (alternating cycle) or i == i'.
    let mut graph = DiGraph::<usize, ()>::with_capacity(n, adj.iter().map(Vec::len).sum());
    let nodes: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
    for (i, cols) in adj.iter().enumerate() {
        for &c in cols {
            let i2 = matching.col_to_row[c];
            if i2 != i {
                graph.add_edge(nodes[i], nodes[i2], ());
            }
        }
    }
    let mut component = vec![0usize; n];
    let mut blocks: Vec<Block> = tarjan_scc(&graph)
        .into_iter()
        .map(|scc| {
            let mut rows: Vec<usize> = scc.into_iter().map(|v| graph[v]).collect();
            rows.sort_unstable();
            let mut cols: Vec<usize> = rows.iter().map(|&r| matching.row_to_col[r]).collect();
            cols.sort_unstable();
            Block { rows, cols }
        })
        .collect();
    blocks.sort_by_key(|b| b.rows[0]);
    for (k, b) in blocks.iter().enumerate() {
        for &r in &b.rows {
            component[r] = k;
        }
    }

    let cells: Vec<bool> = (0..n * n)
        .map(|idx| {
            let (i, c) = (idx / n, idx % n);
            support.get(i, c) && component[i] == component[matching.col_to_row[c]]
        })
        .collect();
    let in_pn = cells == support.cells;

    PatternReport {
        has_positive_diagonal: true,
        pi_support: Support::new(n, cells),
        in_pn,
        blocks,
        fk_witness: None,
    }
}

/// Zero submatrix from the König vertex cover of a deficient maximum matching.
fn konig_witness(adj: &[Vec<usize>], matching: &Matching, n: usize) -> FkWitness {
    // Alternating reachability from free rows.
    let mut row_seen = vec![false; n];
    let mut col_seen = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n)
        .filter(|&r| matching.row_to_col[r] == UNMATCHED)
        .collect();
    for &r in &queue {
        row_seen[r] = true;
    }
    while let Some(r) = queue.pop_front() {
        for &c in &adj[r] {
            if !col_seen[c] {
                col_seen[c] = true;
                let r2 = matching.col_to_row[c];
                if r2 != UNMATCHED && !row_seen[r2] {
                    row_seen[r2] = true;
                    queue.push_back(r2);
                }
            }
        }
    }
    // Reached rows only see reached columns, so reached rows × unreached columns is zero.
    let mut rows: Vec<usize> = (0..n).filter(|&r| row_seen[r]).collect();
    let mut cols: Vec<usize> = (0..n).filter(|&c| !col_seen[c]).collect();
    // |rows| + |cols| = 2n - size >= n + 1; shrink to exactly n + 1.
    while rows.len() + cols.len() > n + 1 {
        if cols.len() > 1 {
            cols.pop();
        } else {
            rows.pop();
        }
    }
    FkWitness { rows, cols }
}

/// `Π(A)`: zero every entry that lies on no positive diagonal.
pub fn pi_projection<T: Scalar>(a: &NonnegMatrix<T>) -> Result<(NonnegMatrix<T>, PatternReport)> {
    let report = PatternReport::analyze(a)?;
    let n = a.rows();
    let projected = NonnegMatrix::from_fn(n, n, |i, j| {
        if report.pi_support.get(i, j) {
            a.get(i, j)
        } else {
            T::zero()
        }
    })?;
    Ok((projected, report))
}

/// Fully indecomposable components of `Π(A)` together with `P_n` membership.
pub fn decompose_fully_indecomposable<T: Scalar>(a: &NonnegMatrix<T>) -> Result<PatternReport> {
    PatternReport::analyze(a)
}

/// Zero submatrix certifying `per A = 0`, or `None` when `A` has a positive diagonal.
pub fn frobenius_konig_witness<T: Scalar>(a: &NonnegMatrix<T>) -> Result<Option<FkWitness>> {
    Ok(PatternReport::analyze(a)?.fk_witness)
}
