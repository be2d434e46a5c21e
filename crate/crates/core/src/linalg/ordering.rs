//! Fill-reducing symmetric orderings.
//!
//! Nested dissection uses level-structure separators: from a pseudo-peripheral
//! vertex, a breadth-first search splits the graph into levels and the middle
//! level becomes the separator, numbered after both halves. Small pieces keep
//! their natural order.

use alloc::vec;
use alloc::vec::Vec;

use super::scalar::Scalar;
use super::sparse::CsrMatrix;

/// Subgraphs at or below this size are numbered in natural order.
const LEAF_SIZE: usize = 48;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ordering {
    /// Identity permutation.
    Natural,
    #[default]
    NestedDissection,
}

impl Ordering {
    /// Elimination order `perm`, meaning row `perm[k]` is eliminated k-th.
    pub fn permutation<T: Scalar>(self, a: &CsrMatrix<T>) -> Vec<usize> {
        match self {
            Ordering::Natural => (0..a.nrows()).collect(),
            Ordering::NestedDissection => nested_dissection(a),
        }
    }
}

struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    fn from_pattern<T: Scalar>(a: &CsrMatrix<T>) -> Self {
        let n = a.nrows();
        let mut ptr = Vec::with_capacity(n + 1);
        let mut adj = Vec::with_capacity(a.nnz());
        ptr.push(0);
        for i in 0..n {
            adj.extend(a.row(i).0.iter().copied().filter(|&j| j != i));
            ptr.push(adj.len());
        }
        Self { ptr, adj }
    }

    #[inline]
    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }
}

struct Dissector<'g> {
    graph: &'g Graph,
    /// Subgraph id each vertex currently belongs to; `usize::MAX` once numbered.
    part: Vec<usize>,
    next_part: usize,
    level: Vec<usize>,
    stamp: Vec<usize>,
    epoch: usize,
    order: Vec<usize>,
}

fn nested_dissection<T: Scalar>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.nrows();
    let graph = Graph::from_pattern(a);
    let mut d = Dissector {
        graph: &graph,
        part: vec![0; n],
        next_part: 1,
        level: vec![0; n],
        stamp: vec![0; n],
        epoch: 0,
        order: Vec::with_capacity(n),
    };
    let all: Vec<usize> = (0..n).collect();
    // explicit stack instead of recursion; separators are pushed after their halves
    enum Task {
        Split(Vec<usize>),
        Emit(Vec<usize>),
    }
    let mut stack = vec![Task::Split(all)];
    while let Some(task) = stack.pop() {
        match task {
            Task::Emit(mut vs) => {
                vs.sort_unstable();
                for &v in &vs {
                    d.part[v] = usize::MAX;
                }
                d.order.extend(vs);
            }
            Task::Split(vs) => {
                if vs.len() <= LEAF_SIZE {
                    stack.push(Task::Emit(vs));
                    continue;
                }
                let comps = d.components(&vs);
                if comps.len() > 1 {
                    // first component is numbered first
                    for c in comps.into_iter().rev() {
                        stack.push(Task::Split(c));
                    }
                    continue;
                }
                let (left, right, sep) = d.bisect(&vs);
                if right.is_empty() && sep.is_empty() {
                    stack.push(Task::Emit(left));
                    continue;
                }
                stack.push(Task::Emit(sep));
                stack.push(Task::Split(right));
                stack.push(Task::Split(left));
            }
        }
    }
    debug_assert_eq!(d.order.len(), n);
    d.order
}

impl Dissector<'_> {
    fn relabel(&mut self, vs: &[usize]) -> usize {
        let id = self.next_part;
        self.next_part += 1;
        for &v in vs {
            self.part[v] = id;
        }
        id
    }

    fn components(&mut self, vs: &[usize]) -> Vec<Vec<usize>> {
        let id = self.relabel(vs);
        self.epoch += 1;
        let mut sorted = vs.to_vec();
        sorted.sort_unstable();
        let mut comps = Vec::new();
        for &root in &sorted {
            if self.stamp[root] == self.epoch {
                continue;
            }
            self.stamp[root] = self.epoch;
            let mut comp = vec![root];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in self.graph.neighbors(v) {
                    if self.part[w] == id && self.stamp[w] != self.epoch {
                        self.stamp[w] = self.epoch;
                        comp.push(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// BFS from `root` inside the current part; returns vertices in visit order
    /// and fills `self.level`.
    fn bfs(&mut self, root: usize, id: usize) -> Vec<usize> {
        self.epoch += 1;
        self.stamp[root] = self.epoch;
        self.level[root] = 0;
        let mut visit = vec![root];
        let mut head = 0;
        while head < visit.len() {
            let v = visit[head];
            head += 1;
            for &w in self.graph.neighbors(v) {
                if self.part[w] == id && self.stamp[w] != self.epoch {
                    self.stamp[w] = self.epoch;
                    self.level[w] = self.level[v] + 1;
                    visit.push(w);
                }
            }
        }
        visit
    }

    fn degree_in(&self, v: usize, id: usize) -> usize {
        self.graph.neighbors(v).iter().filter(|&&w| self.part[w] == id).count()
    }

    /// Splits a connected vertex set into `(left, right, separator)`.
    fn bisect(&mut self, vs: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let id = self.relabel(vs);
        let mut root = *vs.iter().min().unwrap();
        let mut visit = self.bfs(root, id);
        let mut depth = self.level[*visit.last().unwrap()];
        // pseudo-peripheral vertex search
        loop {
            let last_level = depth;
            let candidate = visit
                .iter()
                .copied()
                .filter(|&v| self.level[v] == last_level)
                .min_by_key(|&v| (self.degree_in(v, id), v))
                .unwrap();
            let trial = self.bfs(candidate, id);
            let trial_depth = self.level[*trial.last().unwrap()];
            if trial_depth > depth {
                root = candidate;
                visit = trial;
                depth = trial_depth;
            } else {
                // restore levels of the accepted root
                visit = self.bfs(root, id);
                break;
            }
        }

        let n = visit.len();
        // level holding the median vertex
        let mid = self.level[visit[n / 2]].max(1).min(depth.saturating_sub(1).max(1));
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut sep = Vec::new();
        for &v in &visit {
            let l = self.level[v];
            if l < mid {
                left.push(v);
            } else if l > mid {
                right.push(v);
            } else {
                // separator vertices not touching the far side can join the near side
                let touches_right = self.graph.neighbors(v).iter().any(|&w| self.part[w] == id && self.level[w] > mid);
                if touches_right {
                    sep.push(v);
                } else {
                    left.push(v);
                }
            }
        }
        if depth < 2 {
            // too shallow to dissect (a clique-like piece)
            let mut all = left;
            all.extend(right);
            all.extend(sep);
            return (all, Vec::new(), Vec::new());
        }
        (left, right, sep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn grid_laplacian(n: usize) -> CsrMatrix<f64> {
        let idx = |i: usize, j: usize| j * n + i;
        let mut t = Vec::new();
        for j in 0..n {
            for i in 0..n {
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < n {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < n {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(n * n, n * n, &t).unwrap()
    }

    fn is_permutation(p: &[usize]) -> bool {
        let mut seen = vec![false; p.len()];
        p.iter().all(|&i| i < p.len() && !core::mem::replace(&mut seen[i], true))
    }

    #[test]
    fn nested_dissection_is_a_permutation() {
        for n in [1, 3, 7, 20, 33] {
            let a = grid_laplacian(n);
            let p = Ordering::NestedDissection.permutation(&a);
            assert_eq!(p.len(), n * n);
            assert!(is_permutation(&p), "n = {n}");
        }
    }

    #[test]
    fn diagonal_matrix_keeps_natural_order() {
        let a: CsrMatrix<f64> = CsrMatrix::identity(100);
        let p = Ordering::NestedDissection.permutation(&a);
        assert_eq!(p, (0..100).collect::<Vec<_>>());
    }
}
