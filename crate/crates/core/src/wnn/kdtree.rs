use crate::geom::Point;
use crate::scalar::Scalar;

use super::{Nearest, StaticWnn, WeightedSite};

const LEAF_SIZE: usize = 8;
const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node<T> {
    lo: Point<T>,
    hi: Point<T>,
    min_weight: T,
    start: u32,
    end: u32,
    left: u32,
    right: u32,
}

/// A kd-tree over sites where every subtree records its bounding box and
/// minimum weight. A subtree can only hold a site with key at least
/// `min_weight + dist(q, box)`; since float add/sub/mul/sqrt are monotone
/// that bound never exceeds the computed key of any site inside, so pruning
/// on `bound > best` is exact, including the tag tie-break.
#[derive(Debug, Clone)]
pub struct KdWnn<T> {
    sites: Vec<WeightedSite<T>>,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> KdWnn<T> {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    fn build_node(&mut self, start: usize, end: usize) -> u32 {
        let slice = &self.sites[start..end];
        let mut lo = slice[0].position;
        let mut hi = slice[0].position;
        let mut min_weight = slice[0].weight;
        for s in &slice[1..] {
            lo.x = lo.x.min(s.position.x);
            lo.y = lo.y.min(s.position.y);
            hi.x = hi.x.max(s.position.x);
            hi.y = hi.y.max(s.position.y);
            min_weight = min_weight.min(s.weight);
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            lo,
            hi,
            min_weight,
            start: start as u32,
            end: end as u32,
            left: NIL,
            right: NIL,
        });
        if end - start > LEAF_SIZE {
            let mid = start + (end - start) / 2;
            let split_x = hi.x - lo.x >= hi.y - lo.y;
            self.sites[start..end].select_nth_unstable_by(mid - start, |a, b| {
                let (ka, kb) = if split_x {
                    (a.position.x, b.position.x)
                } else {
                    (a.position.y, b.position.y)
                };
                ka.partial_cmp(&kb).expect("finite coordinates")
            });
            let left = self.build_node(start, mid);
            let right = self.build_node(mid, end);
            let node = &mut self.nodes[id as usize];
            node.left = left;
            node.right = right;
        }
        id
    }

    #[inline]
    fn bound(&self, id: u32, q: Point<T>) -> T {
        let n = &self.nodes[id as usize];
        let zero = T::zero();
        let dx = (n.lo.x - q.x).max(zero).max(q.x - n.hi.x);
        let dy = (n.lo.y - q.y).max(zero).max(q.y - n.hi.y);
        n.min_weight + (dx * dx + dy * dy).sqrt()
    }
}

impl<T: Scalar> StaticWnn<T> for KdWnn<T> {
    fn build(sites: &[WeightedSite<T>]) -> Self {
        let sites: Vec<_> = sites.iter().filter(|s| s.weight.is_finite()).copied().collect();
        let mut tree = KdWnn {
            nodes: Vec::with_capacity(2 * sites.len() / LEAF_SIZE + 1),
            sites,
        };
        if !tree.sites.is_empty() {
            tree.build_node(0, tree.sites.len());
        }
        tree
    }

    fn query(&self, q: Point<T>) -> Option<Nearest<T>> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<Nearest<T>> = None;
        let mut stack: Vec<(T, u32)> = Vec::with_capacity(64);
        stack.push((self.bound(0, q), 0));
        while let Some((bound, id)) = stack.pop() {
            if let Some(b) = best {
                if bound > b.value {
                    continue;
                }
            }
            let node = &self.nodes[id as usize];
            if node.left == NIL {
                for s in &self.sites[node.start as usize..node.end as usize] {
                    best = Nearest::min_opt(best, Some(Nearest { tag: s.tag, value: s.key(q) }));
                }
                continue;
            }
            let bl = self.bound(node.left, q);
            let br = self.bound(node.right, q);
            // Nearer child is popped first.
            if bl <= br {
                stack.push((br, node.right));
                stack.push((bl, node.left));
            } else {
                stack.push((bl, node.left));
                stack.push((br, node.right));
            }
        }
        best
    }
}
