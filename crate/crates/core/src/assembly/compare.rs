//! Bounded search for structure-preserving matchings of reduced structures.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{invariant_report, is_reduced, Edge, Endpoint, GraphStructure};
use crate::bundles::{Block, BoundaryIso};
use crate::gl2z::Mat2;
use crate::intlin::{kernel, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub blocks: Vec<BlockMatch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatch {
    pub from: String,
    pub to: String,
    pub fiber: Mat2,
    /// Boundary `k` of `from` goes to boundary `k + rotation` (cyclically) of `to`.
    pub rotation: usize,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.blocks.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} -> {} fiber {}", m.from, m.to, m.fiber)?;
            if m.rotation != 0 {
                write!(f, " boundaries rotated by {}", m.rotation)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Yes(Witness),
    /// Name of the first invariant that separates the two structures.
    No(&'static str),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("structure {which} is not reduced: run reduce first")]
    NotReduced { which: usize },
}

/// Compares two reduced structures in the oriented category.
///
/// `Yes` carries a block bijection with `SL(2,Z)` fiber matrices that
/// conjugate one monodromy representation onto the other and carry every
/// glueing onto the matching glueing; only matrices whose coordinates in
/// the intertwiner lattice lie in `[-search_bound, search_bound]` are tried.
pub fn isomorphic_reduced(
    gs1: &GraphStructure,
    gs2: &GraphStructure,
    search_bound: u32,
) -> Result<Comparison, CompareError> {
    for (which, gs) in [(1, gs1), (2, gs2)] {
        if !is_reduced(gs).0 {
            return Err(CompareError::NotReduced { which });
        }
    }
    let (r1, r2) = (invariant_report(gs1), invariant_report(gs2));
    if let Some(field) = r1.first_difference(&r2) {
        return Ok(Comparison::No(field));
    }
    let search = Search::new(gs1, gs2, i64::from(search_bound));
    let mut assignment = Vec::new();
    let mut used = vec![false; gs2.blocks.len()];
    Ok(if search.extend(&mut assignment, &mut used) {
        Comparison::Yes(Witness {
            blocks: assignment
                .into_iter()
                .enumerate()
                .map(|(i, (j, fiber, rotation))| BlockMatch {
                    from: gs1.blocks[i].name.clone(),
                    to: gs2.blocks[j].name.clone(),
                    fiber,
                    rotation,
                })
                .collect(),
        })
    } else {
        Comparison::Inconclusive
    })
}

struct Search<'a> {
    gs1: &'a GraphStructure,
    gs2: &'a GraphStructure,
    bound: i64,
    /// Edges of the second structure keyed by `(block, boundary)` of either end;
    /// the flag is set when the key is the source.
    ends2: HashMap<(usize, usize), (usize, bool)>,
    ends1: Vec<((usize, usize), (usize, usize))>,
}

impl<'a> Search<'a> {
    fn new(gs1: &'a GraphStructure, gs2: &'a GraphStructure, bound: i64) -> Self {
        let locate = |gs: &GraphStructure, e: &Edge| {
            (
                gs.locate(&e.source).expect("validated endpoint"),
                gs.locate(&e.target).expect("validated endpoint"),
            )
        };
        let mut ends2 = HashMap::new();
        for (k, e) in gs2.edges.iter().enumerate() {
            let (s, t) = locate(gs2, e);
            ends2.insert(s, (k, true));
            ends2.insert(t, (k, false));
        }
        let ends1 = gs1.edges.iter().map(|e| locate(gs1, e)).collect();
        Search {
            gs1,
            gs2,
            bound,
            ends2,
            ends1,
        }
    }

    fn extend(&self, assignment: &mut Vec<Assigned>, used: &mut [bool]) -> bool {
        let i = assignment.len();
        if i == self.gs1.blocks.len() {
            return true;
        }
        let b1 = &self.gs1.blocks[i];
        for j in 0..self.gs2.blocks.len() {
            let b2 = &self.gs2.blocks[j];
            if used[j] || b1.surface() != b2.surface() {
                continue;
            }
            for r in 0..rotations(b2) {
                for x in intertwiners(&b1.rep.images, &rotated_images(b2, r), self.bound) {
                    assignment.push((j, x, r));
                    if self.edges_consistent(assignment) {
                        used[j] = true;
                        if self.extend(assignment, used) {
                            return true;
                        }
                        used[j] = false;
                    }
                    assignment.pop();
                }
            }
        }
        false
    }

    /// Checks every edge of the first structure whose ends are both assigned
    /// and touch the most recently assigned block.
    fn edges_consistent(&self, assignment: &[Assigned]) -> bool {
        let last = assignment.len() - 1;
        for (k, &((sa, si), (ta, ti))) in self.ends1.iter().enumerate() {
            if sa.max(ta) != last {
                continue;
            }
            let image =
                |(b, _, r): &Assigned, k: usize| (*b, (k + r) % self.gs2.blocks[*b].labels.len());
            let (xs, xt) = (&assignment[sa].1, &assignment[ta].1);
            let Some(&(k2, is_source)) = self.ends2.get(&image(&assignment[sa], si)) else {
                return false;
            };
            let e2 = &self.gs2.edges[k2];
            let other = if is_source { &e2.target } else { &e2.source };
            if self.gs2.locate(other) != Some(image(&assignment[ta], ti)) {
                return false;
            }
            let iso2 = if is_source {
                e2.iso.clone()
            } else {
                match e2.iso.inverse() {
                    Some(inv) => inv,
                    None => return false,
                }
            };
            let e1 = &self.gs1.edges[k];
            let beta_s = fiber_iso(&e1.iso.source.phi, &iso2.source.phi, xs);
            let beta_t = fiber_iso(&e1.iso.target.phi, &iso2.target.phi, xt);
            if beta_s.compose(&iso2) != e1.iso.compose(&beta_t) {
                return false;
            }
        }
        true
    }
}

fn fiber_iso(from: &Mat2, to: &Mat2, x: &Mat2) -> BoundaryIso {
    use crate::bundles::TorusBundleOverCircle as Bundle;
    BoundaryIso::fiber_map(
        Bundle::new(from.clone()),
        Bundle::new(to.clone()),
        x,
        [BigInt::zero(), BigInt::zero()],
        1,
    )
}

/// Second-structure block index, fiber matrix, boundary rotation.
type Assigned = (usize, Mat2, usize);

/// Over a planar base the boundary words multiply to 1, so every cyclic
/// rotation of the boundary order is again a standard presentation.
fn rotations(b: &Block) -> usize {
    if b.surface().genus == 0 {
        b.labels.len()
    } else {
        1
    }
}

fn rotated_images(b: &Block, r: usize) -> Vec<Mat2> {
    if r == 0 {
        return b.rep.images.clone();
    }
    let bm = b.boundary_monodromies();
    let n = bm.len();
    (0..n - 1).map(|k| bm[(k + r) % n].clone()).collect()
}

/// `X ∈ SL(2,Z)` with `X ρ₁(g) = ρ₂(g) X` for every base generator, ordered
/// by size of coordinates.
fn intertwiners(images1: &[Mat2], images2: &[Mat2], bound: i64) -> Vec<Mat2> {
    let mut rows: IntMatrix = Vec::new();
    for (m1, m2) in images1.iter().zip(images2) {
        let z = BigInt::zero();
        rows.push(vec![&m1.a - &m2.a, m1.c.clone(), -&m2.b, z.clone()]);
        rows.push(vec![m1.b.clone(), &m1.d - &m2.a, z.clone(), -&m2.b]);
        rows.push(vec![-&m2.c, z.clone(), &m1.a - &m2.d, m1.c.clone()]);
        rows.push(vec![z, -&m2.c, m1.b.clone(), &m1.d - &m2.d]);
    }
    let basis = if rows.is_empty() {
        crate::intlin::identity(4)
    } else {
        kernel(&rows, 4)
    };
    let r = basis.len();
    let mut out: Vec<(i64, Mat2)> = Vec::new();
    let mut coeffs = vec![-bound; r];
    loop {
        let mut e = [
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
        ];
        for (c, v) in coeffs.iter().zip(&basis) {
            for i in 0..4 {
                e[i] += &v[i] * c;
            }
        }
        let [a, b, c, d] = e;
        let x = Mat2::new(a, b, c, d);
        if x.det().is_one() {
            let size = coeffs.iter().map(|c| c.abs()).sum();
            out.push((size, x));
        }
        let mut i = 0;
        loop {
            if i == r {
                out.sort_by_key(|(size, _)| *size);
                return out.into_iter().map(|(_, x)| x).collect();
            }
            if coeffs[i] < bound {
                coeffs[i] += 1;
                break;
            }
            coeffs[i] = -bound;
            i += 1;
        }
    }
}

/// Copy with fresh block and boundary labels, reversed block and edge order
/// and every edge stored in the opposite direction.
pub fn relabel(gs: &GraphStructure) -> GraphStructure {
    let n = gs.blocks.len();
    let block_name = |i: usize| format!("R{}", n - i);
    let boundary_name = |k: usize| format!("e{}", k + 1);
    let blocks = gs
        .blocks
        .iter()
        .enumerate()
        .rev()
        .map(|(i, b)| {
            let mut b = b.clone();
            b.name = block_name(i);
            b.labels = (0..b.labels.len()).map(boundary_name).collect();
            b
        })
        .collect();
    let endpoint = |e: &Endpoint| {
        let (i, k) = gs.locate(e).expect("validated endpoint");
        Endpoint::new(block_name(i), boundary_name(k))
    };
    let edges = gs
        .edges
        .iter()
        .rev()
        .map(|e| Edge {
            source: endpoint(&e.target),
            target: endpoint(&e.source),
            iso: e.iso.inverse().expect("validated glueing"),
        })
        .collect();
    GraphStructure { blocks, edges }
}
