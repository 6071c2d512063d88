use super::observations::ObservationSet;

/// Disjoint sets with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(count: usize) -> Self {
        UnionFind {
            parent: (0..count).collect(),
            size: vec![1; count],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` when `x` and `y` were already joined.
    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ComponentSize {
    pub rows: usize,
    pub cols: usize,
    pub edges: usize,
}

impl ComponentSize {
    pub fn vertices(&self) -> usize {
        self.rows + self.cols
    }
}

/// Connected components of the bipartite graph `G = (R, C, E)`.
///
/// Labels are assigned in order of first appearance, scanning rows `0..n`
/// and then columns `0..m`.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    pub row_label: Vec<usize>,
    pub col_label: Vec<usize>,
    pub sizes: Vec<ComponentSize>,
    /// Component with the most vertices (smallest label on ties); `None`
    /// when every component is a single vertex.
    pub giant: Option<usize>,
}

impl ComponentLabeling {
    pub fn new(obs: &ObservationSet) -> Self {
        let (n, m) = (obs.rows(), obs.cols());
        let mut uf = UnionFind::new(n + m);
        for &(i, a) in obs.edges() {
            uf.union(i, n + a);
        }
        let mut label_of_root = vec![usize::MAX; n + m];
        let mut sizes: Vec<ComponentSize> = Vec::new();
        let mut labels = vec![0usize; n + m];
        for (x, label) in labels.iter_mut().enumerate() {
            let root = uf.find(x);
            if label_of_root[root] == usize::MAX {
                label_of_root[root] = sizes.len();
                sizes.push(ComponentSize::default());
            }
            *label = label_of_root[root];
            if x < n {
                sizes[*label].rows += 1;
            } else {
                sizes[*label].cols += 1;
            }
        }
        for &(i, _) in obs.edges() {
            sizes[labels[i]].edges += 1;
        }
        let mut giant = None;
        let mut best = 1;
        for (c, s) in sizes.iter().enumerate() {
            if s.vertices() > best {
                best = s.vertices();
                giant = Some(c);
            }
        }
        let col_label = labels.split_off(n);
        ComponentLabeling {
            row_label: labels,
            col_label,
            sizes,
            giant,
        }
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn giant_size(&self) -> Option<ComponentSize> {
        self.giant.map(|c| self.sizes[c])
    }

    /// Fraction of rows inside the largest component (0 when there is none).
    pub fn giant_row_fraction(&self) -> f64 {
        self.giant_size()
            .map(|s| s.rows as f64 / self.row_label.len() as f64)
            .unwrap_or(0.0)
    }

    pub fn giant_col_fraction(&self) -> f64 {
        self.giant_size()
            .map(|s| s.cols as f64 / self.col_label.len() as f64)
            .unwrap_or(0.0)
    }

    pub fn same_component(&self, i: usize, a: usize) -> bool {
        self.row_label[i] == self.col_label[a]
    }
}

pub fn connected_components(obs: &ObservationSet) -> ComponentLabeling {
    ComponentLabeling::new(obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_has_only_singletons() {
        let obs = ObservationSet::empty(3, 4);
        let c = connected_components(&obs);
        assert_eq!(c.count(), 7);
        assert_eq!(c.giant, None);
        assert_eq!(c.giant_row_fraction(), 0.0);
    }

    #[test]
    fn path_forms_one_component() {
        // i=0 - a=0 - j=1
        let obs = ObservationSet::from_entries(3, 2, vec![(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        let c = connected_components(&obs);
        assert_eq!(c.row_label[0], c.row_label[1]);
        assert_eq!(c.row_label[0], c.col_label[0]);
        assert_ne!(c.row_label[2], c.row_label[0]);
        assert_ne!(c.col_label[1], c.col_label[0]);
        let g = c.giant_size().unwrap();
        assert_eq!((g.rows, g.cols, g.edges), (2, 1, 2));
    }

    #[test]
    fn ties_go_to_smallest_label() {
        let obs = ObservationSet::from_entries(2, 2, vec![(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let c = connected_components(&obs);
        assert_eq!(c.giant, Some(0));
        assert_eq!(c.row_label[0], 0);
    }

    #[test]
    fn sizes_cover_all_vertices() {
        let obs = ObservationSet::from_entries(
            4,
            3,
            vec![(0, 0, 1.0), (1, 1, 1.0), (2, 1, 1.0), (2, 2, 1.0)],
        )
        .unwrap();
        let c = connected_components(&obs);
        assert_eq!(c.sizes.iter().map(|s| s.rows).sum::<usize>(), 4);
        assert_eq!(c.sizes.iter().map(|s| s.cols).sum::<usize>(), 3);
        assert_eq!(c.sizes.iter().map(|s| s.edges).sum::<usize>(), 4);
    }
}
