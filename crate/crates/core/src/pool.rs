//! Order-statistic set used as the sampling pool of random order coding.
//!
//! A treap keyed by value and augmented with subtree sizes. Selecting,
//! removing and inserting by rank are all expected `O(log n)`.

use std::cmp::Ordering;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    left: u32,
    right: u32,
    prio: u32,
    size: u32,
}

/// A strictly increasing collection supporting rank queries.
#[derive(Clone, Debug)]
pub struct SortedPool<T> {
    nodes: Vec<Node>,
    values: Vec<Option<T>>,
    free: Vec<u32>,
    root: u32,
    rng: u64,
}

impl<T: Ord> Default for SortedPool<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Ord> SortedPool<T> {
    pub fn new() -> Self {
        SortedPool {
            nodes: Vec::new(),
            values: Vec::new(),
            free: Vec::new(),
            root: NIL,
            rng: 0x9e37_79b9_7f4a_7c15,
        }
    }

    /// Builds a pool from values that are already strictly increasing.
    /// Returns the offending pair position if they are not.
    pub fn from_sorted(values: Vec<T>) -> Result<Self, usize> {
        if let Some(i) = values.windows(2).position(|w| w[0] >= w[1]) {
            return Err(i + 1);
        }
        let mut pool = Self::new();
        pool.nodes.reserve(values.len());
        // Cartesian-tree construction over random priorities.
        let mut spine: Vec<u32> = Vec::new();
        for v in values {
            let id = pool.alloc(v);
            let mut last = NIL;
            while let Some(&top) = spine.last() {
                if pool.nodes[top as usize].prio < pool.nodes[id as usize].prio {
                    last = top;
                    spine.pop();
                } else {
                    break;
                }
            }
            pool.nodes[id as usize].left = last;
            if let Some(&top) = spine.last() {
                pool.nodes[top as usize].right = id;
            }
            spine.push(id);
        }
        pool.root = spine.first().copied().unwrap_or(NIL);
        pool.fix_sizes(pool.root);
        Ok(pool)
    }

    pub fn len(&self) -> usize {
        self.size(self.root) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    /// The value of rank `index` (0-based).
    pub fn get(&self, mut index: usize) -> Option<&T> {
        let mut t = self.root;
        while t != NIL {
            let left = self.nodes[t as usize].left;
            let ls = self.size(left) as usize;
            if index < ls {
                t = left;
            } else if index == ls {
                return self.values[t as usize].as_ref();
            } else {
                index -= ls + 1;
                t = self.nodes[t as usize].right;
            }
        }
        None
    }

    /// Number of values strictly less than `value`.
    pub fn rank(&self, value: &T) -> usize {
        let mut t = self.root;
        let mut acc = 0;
        while t != NIL {
            let node = &self.nodes[t as usize];
            if self.value(t) < value {
                acc += self.size(node.left) as usize + 1;
                t = node.right;
            } else {
                t = node.left;
            }
        }
        acc
    }

    pub fn contains(&self, value: &T) -> bool {
        self.get(self.rank(value)) == Some(value)
    }

    /// Inserts `value` and returns its rank, or hands it back if an equal
    /// value is already present.
    pub fn insert(&mut self, value: T) -> Result<usize, T> {
        let mut t = self.root;
        let mut rank = 0;
        while t != NIL {
            let node = &self.nodes[t as usize];
            match value.cmp(self.value(t)) {
                Ordering::Less => t = node.left,
                Ordering::Equal => return Err(value),
                Ordering::Greater => {
                    rank += self.size(node.left) as usize + 1;
                    t = node.right;
                }
            }
        }
        // Descend to where the new priority belongs, then split below it.
        let prio = self.next_prio();
        let (mut parent, mut left_child) = (NIL, false);
        let mut t = self.root;
        while t != NIL && self.nodes[t as usize].prio >= prio {
            self.nodes[t as usize].size += 1;
            parent = t;
            left_child = value < *self.value(t);
            let node = &self.nodes[t as usize];
            t = if left_child { node.left } else { node.right };
        }
        let (l, r) = self.split_by_value(t, &value);
        let id = self.alloc_with(value, prio);
        self.nodes[id as usize].left = l;
        self.nodes[id as usize].right = r;
        self.update(id);
        self.link(parent, left_child, id);
        Ok(rank)
    }

    /// Removes and returns the value of rank `index`.
    pub fn remove_at(&mut self, index: usize) -> Option<T> {
        if index >= self.len() {
            return None;
        }
        let mut index = index as u32;
        let (mut parent, mut left_child) = (NIL, false);
        let mut t = self.root;
        loop {
            self.nodes[t as usize].size -= 1;
            let node = &self.nodes[t as usize];
            let ls = self.size(node.left);
            if index == ls {
                break;
            }
            parent = t;
            left_child = index < ls;
            if left_child {
                t = node.left;
            } else {
                index -= ls + 1;
                t = node.right;
            }
        }
        let (l, r) = (self.nodes[t as usize].left, self.nodes[t as usize].right);
        let m = self.merge(l, r);
        self.link(parent, left_child, m);
        self.free.push(t);
        self.values[t as usize].take()
    }

    /// Drains the pool in increasing order.
    pub fn into_sorted_vec(mut self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        self.drain_into(&mut out);
        out
    }

    /// Appends the values to `out` in increasing order and leaves the pool
    /// empty, keeping its allocations.
    pub fn drain_into(&mut self, out: &mut Vec<T>) {
        if self.root == NIL {
            return;
        }
        out.reserve(self.len());
        let mut stack = Vec::new();
        let mut t = self.root;
        while t != NIL || !stack.is_empty() {
            while t != NIL {
                stack.push(t);
                t = self.nodes[t as usize].left;
            }
            let top = stack.pop().expect("non-empty");
            out.push(self.values[top as usize].take().expect("live node"));
            t = self.nodes[top as usize].right;
        }
        self.nodes.clear();
        self.values.clear();
        self.free.clear();
        self.root = NIL;
    }

    fn value(&self, t: u32) -> &T {
        self.values[t as usize].as_ref().expect("live node")
    }

    fn next_prio(&mut self) -> u32 {
        // xorshift64*
        self.rng ^= self.rng >> 12;
        self.rng ^= self.rng << 25;
        self.rng ^= self.rng >> 27;
        (self.rng.wrapping_mul(0x2545_f491_4f6c_dd1d) >> 32) as u32
    }

    fn alloc(&mut self, value: T) -> u32 {
        let prio = self.next_prio();
        self.alloc_with(value, prio)
    }

    fn alloc_with(&mut self, value: T, prio: u32) -> u32 {
        let node = Node {
            left: NIL,
            right: NIL,
            prio,
            size: 1,
        };
        match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                self.values[id as usize] = Some(value);
                id
            }
            None => {
                self.nodes.push(node);
                self.values.push(Some(value));
                (self.nodes.len() - 1) as u32
            }
        }
    }

    #[inline]
    fn size(&self, t: u32) -> u32 {
        if t == NIL {
            0
        } else {
            self.nodes[t as usize].size
        }
    }

    fn link(&mut self, parent: u32, left_child: bool, child: u32) {
        if parent == NIL {
            self.root = child;
        } else if left_child {
            self.nodes[parent as usize].left = child;
        } else {
            self.nodes[parent as usize].right = child;
        }
    }

    #[inline]
    fn update(&mut self, t: u32) {
        let n = &self.nodes[t as usize];
        let s = 1 + self.size(n.left) + self.size(n.right);
        self.nodes[t as usize].size = s;
    }

    fn fix_sizes(&mut self, root: u32) {
        // post-order without recursion
        let mut stack = vec![(root, false)];
        while let Some((t, done)) = stack.pop() {
            if t == NIL {
                continue;
            }
            if done {
                self.update(t);
            } else {
                stack.push((t, true));
                stack.push((self.nodes[t as usize].left, false));
                stack.push((self.nodes[t as usize].right, false));
            }
        }
    }

    fn merge(&mut self, l: u32, r: u32) -> u32 {
        if l == NIL {
            return r;
        }
        if r == NIL {
            return l;
        }
        if self.nodes[l as usize].prio >= self.nodes[r as usize].prio {
            let lr = self.nodes[l as usize].right;
            let m = self.merge(lr, r);
            self.nodes[l as usize].right = m;
            self.update(l);
            l
        } else {
            let rl = self.nodes[r as usize].left;
            let m = self.merge(l, rl);
            self.nodes[r as usize].left = m;
            self.update(r);
            r
        }
    }

    /// Splits into (values < `value`, values >= `value`).
    fn split_by_value(&mut self, t: u32, value: &T) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        if self.value(t) < value {
            let right = self.nodes[t as usize].right;
            let (a, b) = self.split_by_value(right, value);
            self.nodes[t as usize].right = a;
            self.update(t);
            (t, b)
        } else {
            let left = self.nodes[t as usize].left;
            let (a, b) = self.split_by_value(left, value);
            self.nodes[t as usize].left = b;
            self.update(t);
            (a, t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn basic_ops() {
        let mut p = SortedPool::from_sorted(vec![10, 20, 30]).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.insert(25), Ok(2));
        assert_eq!(p.insert(20), Err(20));
        assert_eq!(p.get(3), Some(&30));
        assert_eq!(p.remove_at(0), Some(10));
        assert_eq!(p.remove_at(9), None);
        assert_eq!(p.rank(&26), 2);
        assert_eq!(p.into_sorted_vec(), vec![20, 25, 30]);
    }

    #[test]
    fn from_sorted_rejects_unsorted() {
        assert_eq!(SortedPool::from_sorted(vec![1, 3, 3]).unwrap_err(), 2);
        assert!(SortedPool::<u8>::from_sorted(vec![]).unwrap().is_empty());
    }

    #[test]
    fn large_pool_stays_consistent() {
        let n = 100_000u32;
        let mut p = SortedPool::from_sorted((0..n).map(|x| 2 * x).collect()).unwrap();
        for i in 0..1000u32 {
            assert_eq!(p.insert(2 * i * 97 % (2 * n) + 1).map(|_| ()), Ok(()));
        }
        assert_eq!(p.len(), n as usize + 1000);
        let v = p.into_sorted_vec();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn matches_btreeset(ops in prop::collection::vec((any::<bool>(), 0u16..200), 0..400)) {
            let mut pool = SortedPool::new();
            let mut model = BTreeSet::new();
            for (insert, x) in ops {
                if insert {
                    let r = pool.insert(x);
                    if model.insert(x) {
                        prop_assert_eq!(r, Ok(model.range(..x).count()));
                    } else {
                        prop_assert_eq!(r, Err(x));
                    }
                } else if !model.is_empty() {
                    let idx = x as usize % model.len();
                    let expected = *model.iter().nth(idx).unwrap();
                    model.remove(&expected);
                    prop_assert_eq!(pool.remove_at(idx), Some(expected));
                }
                prop_assert_eq!(pool.len(), model.len());
            }
            prop_assert_eq!(pool.into_sorted_vec(), model.into_iter().collect::<Vec<_>>());
        }
    }
}
