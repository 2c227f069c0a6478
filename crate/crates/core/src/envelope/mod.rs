//! Boundary of a union of unit disks clipped to a halfplane, and first-cover
//! indices.
//!
//! Everything here works in a canonical frame: the halfplane is `y >= y0`
//! and every disk center satisfies `cy <= y0`. Inside the halfplane a disk is
//! the region under its upper arc, so the union is the region under the upper
//! envelope of the arcs. Two such arcs cross at most once above the higher
//! center, which gives the two structural facts the construction relies on:
//! envelope pieces appear in the same left-to-right order as their centers,
//! and each disk contributes at most one piece.
//!
//! The envelope is stored as a partition of the real line into elements:
//! arc pieces and baseline segments (including the two infinite rays).

mod first_cover;
mod treap;

pub use first_cover::{first_cover, first_cover_multicell, FirstCoverAnswer};

use thiserror::Error;

use crate::geom::{within_unit, Point};
use crate::scalar::Scalar;
use treap::{Dir, Treap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("disk center ({x}, {y}) lies above the baseline y = {baseline}")]
    CenterAboveBaseline { x: f64, y: f64, baseline: f64 },
    #[error("point ({x}, {y}) lies below the baseline y = {baseline}")]
    OutsideHalfplane { x: f64, y: f64, baseline: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcOwner<T> {
    pub tag: usize,
    pub center: Point<T>,
}

/// One element of the envelope over `[x_left, x_right]`. `owner == None`
/// marks a stretch of baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece<T> {
    pub x_left: T,
    pub x_right: T,
    pub owner: Option<ArcOwner<T>>,
}

#[inline]
fn arc_height<T: Scalar>(center: Point<T>, x: T) -> T {
    let dx = x - center.x;
    center.y + (T::one() - dx * dx).max(T::zero()).sqrt()
}

impl<T: Scalar> Piece<T> {
    fn height(&self, x: T, baseline: T) -> T {
        match self.owner {
            Some(o) => arc_height(o.center, x),
            None => baseline,
        }
    }
}

/// Result of a successful insertion: the new piece's endpoints and the tags
/// of arc pieces it fully replaced.
#[derive(Debug, Clone, PartialEq)]
pub struct AddOutcome<T> {
    pub left: Point<T>,
    pub right: Point<T>,
    pub replaced: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Envelope<T> {
    baseline: T,
    tree: Treap<Piece<T>>,
    created: usize,
}

/// Upper intersection of two unit circles, if they meet.
fn upper_crossing<T: Scalar>(a: Point<T>, b: Point<T>) -> Option<Point<T>> {
    let d2 = a.dist2(b);
    let four = T::lit(4.0);
    if d2 <= T::zero() || d2 > four {
        return None;
    }
    let d = d2.sqrt();
    let h = (T::one() - d2 / four).max(T::zero()).sqrt();
    let mx = (a.x + b.x) * T::half();
    let my = (a.y + b.y) * T::half();
    let px = -(b.y - a.y) / d;
    let py = (b.x - a.x) / d;
    let p1 = Point::new(mx + h * px, my + h * py);
    let p2 = Point::new(mx - h * px, my - h * py);
    Some(if p1.y >= p2.y { p1 } else { p2 })
}

impl<T: Scalar> Envelope<T> {
    /// The empty envelope: the whole baseline.
    pub fn new(baseline: T) -> Self {
        let mut tree = Treap::new();
        tree.push_back(Piece {
            x_left: T::neg_infinity(),
            x_right: T::infinity(),
            owner: None,
        });
        Envelope { baseline, tree, created: 0 }
    }

    pub fn baseline(&self) -> T {
        self.baseline
    }

    /// Every element in left-to-right order, baseline stretches included.
    pub fn pieces(&self) -> Vec<Piece<T>> {
        self.tree.to_vec()
    }

    /// Arc pieces only, left to right.
    pub fn arcs(&self) -> Vec<Piece<T>> {
        self.tree.to_vec().into_iter().filter(|p| p.owner.is_some()).collect()
    }

    /// Pieces created over the envelope's lifetime (new arcs plus split-off remainders).
    pub fn created(&self) -> usize {
        self.created
    }

    /// Adds the unit disk at `center`. Returns `None` when the disk adds
    /// nothing to the union inside the halfplane.
    ///
    /// The new piece's endpoints are found by two binary searches over the
    /// current elements. For an element `[s, e]`, with `in(x)` meaning the
    /// envelope point above `x` lies in the new disk: `in(s)` puts the left
    /// endpoint at or before `s`; `!in(s) && in(e)` puts it inside; if neither
    /// holds the element is untouched by the disk and the side follows from
    /// comparing center abscissae (arc) or from the disk's baseline chord
    /// (baseline stretch). The right endpoint is symmetric.
    pub fn add_disk(&mut self, center: Point<T>, tag: usize) -> Result<Option<AddOutcome<T>>, EnvelopeError> {
        let y0 = self.baseline;
        if !(center.is_finite() && center.y <= y0) {
            return Err(EnvelopeError::CenterAboveBaseline {
                x: center.x.to_f64().unwrap_or(f64::NAN),
                y: center.y.to_f64().unwrap_or(f64::NAN),
                baseline: y0.to_f64().unwrap_or(f64::NAN),
            });
        }
        let depth = y0 - center.y;
        if depth >= T::one() {
            return Ok(None);
        }
        let half_chord = (T::one() - depth * depth).sqrt();
        let (a, b) = (center.x - half_chord, center.x + half_chord);
        let new_height = |x: T| arc_height(center, x);
        let inside = |piece: &Piece<T>, x: T| -> bool {
            x.is_finite() && x >= a && x <= b && new_height(x) >= piece.height(x, y0)
        };

        let mut dominated = false;
        let untouched = |piece: &Piece<T>, dominated: &mut bool| -> Dir {
            match piece.owner {
                Some(o) => {
                    if center.x < o.center.x {
                        Dir::Left
                    } else if center.x > o.center.x {
                        Dir::Right
                    } else {
                        // Same abscissa: the disk whose piece survives covers this one.
                        *dominated = true;
                        Dir::Left
                    }
                }
                None => {
                    if piece.x_right <= a {
                        Dir::Right
                    } else if piece.x_left >= b {
                        Dir::Left
                    } else {
                        Dir::Here
                    }
                }
            }
        };

        let rp = self.tree.find(|piece| {
            if let Some(o) = piece.owner {
                if o.center == center {
                    dominated = true;
                    return Dir::Left;
                }
            }
            if inside(piece, piece.x_left) {
                Dir::Left
            } else if inside(piece, piece.x_right) {
                Dir::Here
            } else {
                untouched(piece, &mut dominated)
            }
        });
        if dominated {
            return Ok(None);
        }
        let rq = self.tree.find(|piece| {
            if inside(piece, piece.x_right) {
                Dir::Right
            } else if inside(piece, piece.x_left) {
                Dir::Here
            } else {
                untouched(piece, &mut dominated)
            }
        });
        let (rp, rq) = match (rp, rq) {
            (Some(p), Some(q)) if p <= q && !dominated => (p, q),
            _ => return Ok(None),
        };

        let ep = *self.tree.get(rp);
        let eq = *self.tree.get(rq);
        let clamp = |x: T, piece: &Piece<T>| x.max(piece.x_left).min(piece.x_right).max(a).min(b);
        let px = match ep.owner {
            Some(o) => upper_crossing(o.center, center).map_or(ep.x_left, |c| c.x),
            None => a,
        };
        let qx = match eq.owner {
            Some(o) => upper_crossing(o.center, center).map_or(eq.x_right, |c| c.x),
            None => b,
        };
        let (px, qx) = (clamp(px, &ep), clamp(qx, &eq));
        if px >= qx {
            return Ok(None);
        }

        let mut with = Vec::with_capacity(3);
        let keep_left = ep.x_left < px;
        let keep_right = qx < eq.x_right;
        if keep_left {
            with.push(Piece { x_right: px, ..ep });
        }
        with.push(Piece {
            x_left: px,
            x_right: qx,
            owner: Some(ArcOwner { tag, center }),
        });
        if keep_right {
            with.push(Piece { x_left: qx, ..eq });
        }
        self.created += 1 + usize::from(rp == rq && keep_left && keep_right);

        let removed = self.tree.splice(rp, rq, with);
        let last = removed.len() - 1;
        let replaced = removed
            .iter()
            .enumerate()
            .filter(|&(i, _)| (i != 0 || !keep_left) && (i != last || !keep_right))
            .filter_map(|(_, p)| p.owner.map(|o| o.tag))
            .collect();
        Ok(Some(AddOutcome {
            left: Point::new(px, new_height(px)),
            right: Point::new(qx, new_height(qx)),
            replaced,
        }))
    }

    /// Whether `p` lies in the union of inserted disks. Locates the element
    /// above `p.x` (a shared endpoint belongs to the left element), then
    /// applies the exact edge predicate to that element's disk and its two
    /// neighbors, so rounding in the breakpoints cannot flip the answer.
    pub fn covers(&self, p: Point<T>) -> Result<bool, EnvelopeError> {
        if !(p.y >= self.baseline) {
            return Err(EnvelopeError::OutsideHalfplane {
                x: p.x.to_f64().unwrap_or(f64::NAN),
                y: p.y.to_f64().unwrap_or(f64::NAN),
                baseline: self.baseline.to_f64().unwrap_or(f64::NAN),
            });
        }
        let rank = self
            .tree
            .find(|piece| {
                if p.x > piece.x_right {
                    Dir::Right
                } else if p.x <= piece.x_left {
                    Dir::Left
                } else {
                    Dir::Here
                }
            })
            .expect("elements partition the line");
        let lo = rank.saturating_sub(1);
        let hi = (rank + 1).min(self.tree.len() - 1);
        Ok((lo..=hi).any(|r| match self.tree.get(r).owner {
            Some(o) => within_unit(o.center, p),
            None => false,
        }))
    }

    /// Envelope height above `x` (the baseline where no arc is present).
    pub fn height_at(&self, x: T) -> T {
        let rank = self
            .tree
            .find(|piece| {
                if x > piece.x_right {
                    Dir::Right
                } else if x <= piece.x_left {
                    Dir::Left
                } else {
                    Dir::Here
                }
            })
            .expect("elements partition the line");
        self.tree.get(rank).height(x, self.baseline)
    }

    /// Checks the structural invariants: elements tile the line, each tag
    /// owns at most one arc, and arc order matches center order.
    pub fn check_invariants(&self) -> Result<(), String> {
        let pieces = self.pieces();
        if pieces.first().map(|p| p.x_left) != Some(T::neg_infinity())
            || pieces.last().map(|p| p.x_right) != Some(T::infinity())
        {
            return Err("elements do not span the line".into());
        }
        for w in pieces.windows(2) {
            if w[0].x_right != w[1].x_left {
                return Err(format!("gap or overlap at x = {}", w[0].x_right));
            }
        }
        let mut tags = std::collections::HashSet::new();
        let mut prev_x: Option<T> = None;
        for p in &pieces {
            if p.x_left > p.x_right {
                return Err(format!("inverted element [{}, {}]", p.x_left, p.x_right));
            }
            if let Some(o) = p.owner {
                if !tags.insert(o.tag) {
                    return Err(format!("tag {} owns two pieces", o.tag));
                }
                if let Some(px) = prev_x {
                    if o.center.x < px {
                        return Err(format!("piece of tag {} out of center order", o.tag));
                    }
                }
                prev_x = Some(o.center.x);
            }
        }
        Ok(())
    }
}
