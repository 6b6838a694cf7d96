use fixedbitset::FixedBitSet;

/// Membership mask over node indices `0..capacity`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NodeSet(FixedBitSet);

impl NodeSet {
    pub fn new(capacity: usize) -> Self {
        NodeSet(FixedBitSet::with_capacity(capacity))
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = FixedBitSet::with_capacity(capacity);
        s.insert_range(..);
        NodeSet(s)
    }

    pub fn from_indices(capacity: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(capacity);
        for i in nodes {
            s.insert(i);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, node: usize) -> bool {
        !self.0.put(node)
    }

    pub fn remove(&mut self, node: usize) {
        self.0.set(node, false);
    }

    pub fn contains(&self, node: usize) -> bool {
        self.0.contains(node)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn clear(&mut self) {
        self.0.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let mut s = self.0.clone();
        s.union_with(&other.0);
        NodeSet(s)
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        let mut s = self.0.clone();
        s.intersect_with(&other.0);
        NodeSet(s)
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        let mut s = self.0.clone();
        s.difference_with(&other.0);
        NodeSet(s)
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        self.0.union_with(&other.0);
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for NodeSet {
    /// Capacity is one past the largest index.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let v: Vec<usize> = iter.into_iter().collect();
        let cap = v.iter().max().map_or(0, |m| m + 1);
        NodeSet::from_indices(cap, v)
    }
}
