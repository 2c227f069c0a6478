//! Implicit treap: an ordered sequence with O(log n) expected search by a
//! caller-supplied direction function, rank access, and range splicing.

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dir {
    Left,
    Here,
    Right,
}

#[derive(Debug, Clone)]
struct Node<E> {
    elem: E,
    prio: u64,
    left: u32,
    right: u32,
    size: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Treap<E> {
    nodes: Vec<Node<E>>,
    free: Vec<u32>,
    root: u32,
    seed: u64,
}

impl<E: Clone> Treap<E> {
    pub fn new() -> Self {
        Treap {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            seed: 0x9E37_79B9_7F4A_7C15,
        }
    }

    pub fn len(&self) -> usize {
        self.size(self.root) as usize
    }

    fn size(&self, t: u32) -> u32 {
        if t == NIL {
            0
        } else {
            self.nodes[t as usize].size
        }
    }

    fn next_prio(&mut self) -> u64 {
        // splitmix64
        self.seed = self.seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.seed;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn alloc(&mut self, elem: E) -> u32 {
        let prio = self.next_prio();
        let node = Node { elem, prio, left: NIL, right: NIL, size: 1 };
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn pull(&mut self, t: u32) {
        let (l, r) = (self.nodes[t as usize].left, self.nodes[t as usize].right);
        self.nodes[t as usize].size = 1 + self.size(l) + self.size(r);
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let ar = self.nodes[a as usize].right;
            let m = self.merge(ar, b);
            self.nodes[a as usize].right = m;
            self.pull(a);
            a
        } else {
            let bl = self.nodes[b as usize].left;
            let m = self.merge(a, bl);
            self.nodes[b as usize].left = m;
            self.pull(b);
            b
        }
    }

    /// Splits off the first `k` elements.
    fn split(&mut self, t: u32, k: u32) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        let l = self.nodes[t as usize].left;
        let ls = self.size(l);
        if k <= ls {
            let (a, b) = self.split(l, k);
            self.nodes[t as usize].left = b;
            self.pull(t);
            (a, t)
        } else {
            let r = self.nodes[t as usize].right;
            let (a, b) = self.split(r, k - ls - 1);
            self.nodes[t as usize].right = a;
            self.pull(t);
            (t, b)
        }
    }

    pub fn push_back(&mut self, elem: E) {
        let id = self.alloc(elem);
        self.root = self.merge(self.root, id);
    }

    pub fn get(&self, rank: usize) -> &E {
        let mut t = self.root;
        let mut k = rank as u32;
        loop {
            assert!(t != NIL, "rank out of range");
            let node = &self.nodes[t as usize];
            let ls = self.size(node.left);
            if k < ls {
                t = node.left;
            } else if k == ls {
                return &node.elem;
            } else {
                k -= ls + 1;
                t = node.right;
            }
        }
    }

    /// Descends by `dir` and returns the rank of the element answering `Here`.
    pub fn find(&self, mut dir: impl FnMut(&E) -> Dir) -> Option<usize> {
        let mut t = self.root;
        let mut offset = 0u32;
        while t != NIL {
            let node = &self.nodes[t as usize];
            match dir(&node.elem) {
                Dir::Here => return Some((offset + self.size(node.left)) as usize),
                Dir::Left => t = node.left,
                Dir::Right => {
                    offset += self.size(node.left) + 1;
                    t = node.right;
                }
            }
        }
        None
    }

    fn drain_into(&mut self, t: u32, out: &mut Vec<E>) {
        if t == NIL {
            return;
        }
        let (l, r) = (self.nodes[t as usize].left, self.nodes[t as usize].right);
        self.drain_into(l, out);
        out.push(self.nodes[t as usize].elem.clone());
        self.free.push(t);
        self.drain_into(r, out);
    }

    /// Replaces ranks `lo..=hi` with `with`, returning the removed elements in order.
    pub fn splice(&mut self, lo: usize, hi: usize, with: Vec<E>) -> Vec<E> {
        debug_assert!(lo <= hi && hi < self.len());
        let (a, bc) = self.split(self.root, lo as u32);
        let (b, c) = self.split(bc, (hi - lo + 1) as u32);
        let mut removed = Vec::with_capacity(hi - lo + 1);
        self.drain_into(b, &mut removed);
        let mut mid = NIL;
        for e in with {
            let id = self.alloc(e);
            mid = self.merge(mid, id);
        }
        let left = self.merge(a, mid);
        self.root = self.merge(left, c);
        removed
    }

    pub fn to_vec(&self) -> Vec<E> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut t = self.root;
        while t != NIL || !stack.is_empty() {
            while t != NIL {
                stack.push(t);
                t = self.nodes[t as usize].left;
            }
            let top = stack.pop().expect("non-empty stack");
            out.push(self.nodes[top as usize].elem.clone());
            t = self.nodes[top as usize].right;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splice_and_find() {
        let mut t = Treap::new();
        for i in 0..100 {
            t.push_back(i * 10);
        }
        assert_eq!(t.len(), 100);
        assert_eq!(*t.get(37), 370);
        let removed = t.splice(10, 12, vec![-1, -2]);
        assert_eq!(removed, vec![100, 110, 120]);
        assert_eq!(t.len(), 99);
        assert_eq!(*t.get(10), -1);
        assert_eq!(*t.get(12), 130);
        let pos = t.find(|&e| {
            if e < 0 {
                Dir::Right
            } else if e < 500 {
                Dir::Right
            } else if e == 500 {
                Dir::Here
            } else {
                Dir::Left
            }
        });
        // Negative entries sit between 90 and 130, so a monotone search still
        // walks past them.
        assert_eq!(pos.map(|r| *t.get(r)), Some(500));
        let v = t.to_vec();
        assert_eq!(v.len(), 99);
        assert_eq!(&v[9..13], &[90, -1, -2, 130]);
    }
}
