//! Graph-manifolds assembled from blocks along boundary glueings.

mod compare;
mod reduce;

pub use compare::{isomorphic_reduced, relabel, BlockMatch, CompareError, Comparison, Witness};
pub use reduce::{reduce, ReduceError};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bundles::{validate_block, Block, BlockViolation, BoundaryIso, GlueingViolation};
use crate::gl2z::{classify, ConjClass};
use crate::intlin::{abelian_invariants, IntMatrix};
use crate::meyer::manifold_signature;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub block: String,
    pub boundary: String,
}

impl Endpoint {
    pub fn new(block: impl Into<String>, boundary: impl Into<String>) -> Self {
        Endpoint {
            block: block.into(),
            boundary: boundary.into(),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.block, self.boundary)
    }
}

/// Glueing of `source` to `target`; `iso` maps π₁ of the source boundary
/// to π₁ of the target boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: Endpoint,
    pub target: Endpoint,
    pub iso: BoundaryIso,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphStructure {
    pub blocks: Vec<Block>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureViolation {
    Block {
        block: String,
        violation: BlockViolation,
    },
    DuplicateBlock(String),
    UnknownEndpoint(Endpoint),
    OpenBoundary(Endpoint),
    BoundaryReused(Endpoint),
    GlueingMismatch {
        edge: usize,
        side: &'static str,
        expected: String,
        found: String,
    },
    Glueing {
        edge: usize,
        violation: GlueingViolation,
    },
    OrientationPreserving {
        edge: usize,
    },
    Disconnected,
    Empty,
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureViolation::Block { block, violation } => write!(f, "block {block}: {violation}"),
            StructureViolation::DuplicateBlock(b) => write!(f, "duplicate block label {b}"),
            StructureViolation::UnknownEndpoint(e) => write!(f, "unknown boundary label {e}"),
            StructureViolation::OpenBoundary(e) => write!(f, "open boundary {e}"),
            StructureViolation::BoundaryReused(e) => write!(f, "boundary {e} glued more than once"),
            StructureViolation::GlueingMismatch {
                edge,
                side,
                expected,
                found,
            } => write!(
                f,
                "glueing mismatch on edge {edge}: {side} monodromy is {expected}, glueing declares {found}"
            ),
            StructureViolation::Glueing { edge, violation } => write!(f, "edge {edge}: {violation}"),
            StructureViolation::OrientationPreserving { edge } => write!(
                f,
                "edge {edge}: glueing must reverse the boundary orientation"
            ),
            StructureViolation::Disconnected => write!(f, "underlying graph is disconnected"),
            StructureViolation::Empty => write!(f, "no blocks"),
        }
    }
}

impl GraphStructure {
    pub fn block_index(&self, label: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == label)
    }

    pub fn block(&self, label: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == label)
    }

    /// `(block index, boundary index)` of an endpoint.
    pub fn locate(&self, e: &Endpoint) -> Option<(usize, usize)> {
        let b = self.block_index(&e.block)?;
        let k = self.blocks[b].label_index(&e.boundary)?;
        Some((b, k))
    }
}

pub fn validate_structure(gs: &GraphStructure) -> Vec<StructureViolation> {
    let mut out = Vec::new();
    if gs.blocks.is_empty() {
        out.push(StructureViolation::Empty);
        return out;
    }
    let mut names = BTreeSet::new();
    for b in &gs.blocks {
        if !names.insert(b.name.clone()) {
            out.push(StructureViolation::DuplicateBlock(b.name.clone()));
        }
        for violation in validate_block(b) {
            out.push(StructureViolation::Block {
                block: b.name.clone(),
                violation,
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let mut used: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, edge) in gs.edges.iter().enumerate() {
        let mut located = Vec::new();
        for (side, end, declared) in [
            ("source", &edge.source, &edge.iso.source.phi),
            ("target", &edge.target, &edge.iso.target.phi),
        ] {
            let Some(loc) = gs.locate(end) else {
                out.push(StructureViolation::UnknownEndpoint(end.clone()));
                continue;
            };
            if used.insert(loc, i).is_some() {
                out.push(StructureViolation::BoundaryReused(end.clone()));
            }
            let actual = gs.blocks[loc.0].boundary_bundle(loc.1).phi;
            if &actual != declared {
                out.push(StructureViolation::GlueingMismatch {
                    edge: i,
                    side,
                    expected: actual.to_string(),
                    found: declared.to_string(),
                });
            }
            located.push(loc);
        }
        if located.len() < 2 {
            continue;
        }
        let violations = edge.iso.violations();
        if violations.is_empty() {
            if edge.iso.degree() != Some(-1) {
                out.push(StructureViolation::OrientationPreserving { edge: i });
            }
        } else {
            out.extend(
                violations
                    .into_iter()
                    .map(|violation| StructureViolation::Glueing { edge: i, violation }),
            );
        }
    }
    for (b, block) in gs.blocks.iter().enumerate() {
        for (k, label) in block.labels.iter().enumerate() {
            if !used.contains_key(&(b, k)) {
                out.push(StructureViolation::OpenBoundary(Endpoint::new(
                    block.name.clone(),
                    label.clone(),
                )));
            }
        }
    }
    if out.is_empty() && !connected(gs) {
        out.push(StructureViolation::Disconnected);
    }
    out
}

fn connected(gs: &GraphStructure) -> bool {
    spanning_tree(gs).1 == gs.blocks.len()
}

/// Tree edges of a breadth-first spanning tree from the least block label,
/// visiting edges in order of their endpoint labels; also the number of
/// blocks reached.
fn spanning_tree(gs: &GraphStructure) -> (BTreeSet<usize>, usize) {
    let mut order: Vec<usize> = (0..gs.edges.len()).collect();
    order.sort_by(|&a, &b| {
        let ea = &gs.edges[a];
        let eb = &gs.edges[b];
        (&ea.source, &ea.target).cmp(&(&eb.source, &eb.target))
    });
    let Some(root) = (0..gs.blocks.len()).min_by_key(|&b| &gs.blocks[b].name) else {
        return (BTreeSet::new(), 0);
    };
    let mut seen = vec![false; gs.blocks.len()];
    seen[root] = true;
    let mut reached = 1;
    let mut tree = BTreeSet::new();
    let mut queue = VecDeque::from([root]);
    while let Some(b) = queue.pop_front() {
        for &e in &order {
            let edge = &gs.edges[e];
            let (Some(s), Some(t)) = (
                gs.block_index(&edge.source.block),
                gs.block_index(&edge.target.block),
            ) else {
                continue;
            };
            let other = if s == b {
                t
            } else if t == b {
                s
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                reached += 1;
                tree.insert(e);
                queue.push_back(other);
            }
        }
    }
    (tree, reached)
}

/// Edges whose glueing is fiber-preserving.
pub fn is_reduced(gs: &GraphStructure) -> (bool, Vec<usize>) {
    let offending: Vec<usize> = gs
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.iso.is_fiber_preserving())
        .map(|(i, _)| i)
        .collect();
    (offending.is_empty(), offending)
}

/// Inclusion–exclusion over blocks `T² × B` and decomposing manifolds.
pub fn euler_characteristic(gs: &GraphStructure) -> i64 {
    const TORUS: i64 = 0;
    const CLOSED_3_MANIFOLD: i64 = 0;
    let blocks: i64 = gs
        .blocks
        .iter()
        .map(|b| TORUS * b.surface().euler_characteristic())
        .sum();
    blocks - CLOSED_3_MANIFOLD * gs.edges.len() as i64
}

/// Free rank and torsion of H₁ from the abelianized graph-of-groups presentation.
pub fn first_homology(gs: &GraphStructure) -> (usize, Vec<BigInt>) {
    // generator layout: per block x, y, base generators; then one stable
    // letter per edge outside the spanning tree
    let mut offset = Vec::with_capacity(gs.blocks.len());
    let mut n = 0;
    for b in &gs.blocks {
        offset.push(n);
        n += 2 + b.surface().rank();
    }
    let (tree, _) = spanning_tree(gs);
    n += gs.edges.len() - tree.len();

    let mut relations: IntMatrix = Vec::new();
    for (bi, b) in gs.blocks.iter().enumerate() {
        let o = offset[bi];
        for m in &b.rep.images {
            // g e_j g⁻¹ = ρ(g) e_j
            for j in 0..2 {
                let col = m.column(j);
                let mut row = vec![BigInt::zero(); n];
                row[o] = col[0].clone();
                row[o + 1] = col[1].clone();
                row[o + j] -= 1;
                relations.push(row);
            }
        }
    }
    let boundary_ab = |bi: usize, k: usize| -> Vec<BigInt> {
        let block = &gs.blocks[bi];
        let mut v = vec![BigInt::zero(); n];
        for &(g, e) in &block.surface().boundary_words()[k] {
            v[offset[bi] + 2 + g] += i64::from(e);
        }
        v
    };
    for edge in &gs.edges {
        let (Some((sa, ka)), Some((sb, kb))) = (gs.locate(&edge.source), gs.locate(&edge.target))
        else {
            continue;
        };
        let image_ab = |e: &crate::bundles::Pi1Element| -> Vec<BigInt> {
            let mut v = boundary_ab(sb, kb);
            for x in v.iter_mut() {
                *x *= e.k;
            }
            v[offset[sb]] += &e.v[0];
            v[offset[sb] + 1] += &e.v[1];
            v
        };
        let src_x = {
            let mut v = vec![BigInt::zero(); n];
            v[offset[sa]] += 1;
            v
        };
        let src_y = {
            let mut v = vec![BigInt::zero(); n];
            v[offset[sa] + 1] += 1;
            v
        };
        let src_t = boundary_ab(sa, ka);
        for (src, img) in [
            (src_x, &edge.iso.x),
            (src_y, &edge.iso.y),
            (src_t, &edge.iso.t),
        ] {
            let dst = image_ab(img);
            relations.push(src.iter().zip(&dst).map(|(a, b)| a - b).collect());
        }
    }
    abelian_invariants(&relations, n)
}

/// Invariants compared by [`isomorphic_reduced`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub block_count: usize,
    /// Sorted `(surface, sorted boundary classes)` per block.
    pub blocks: Vec<(String, Vec<String>)>,
    /// Sorted classes of both sides of every decomposing manifold.
    pub decomposing: Vec<(ConjClass, ConjClass)>,
    /// `None` when some base is non-orientable.
    pub sigma: Option<BigRational>,
    pub euler: i64,
    pub h1: (usize, Vec<BigInt>),
    pub reduced: bool,
    /// Decomposing classes of a reduced structure that are not parabolic.
    pub findings: Vec<String>,
}

pub fn invariant_report(gs: &GraphStructure) -> InvariantReport {
    let mut blocks: Vec<(String, Vec<String>)> = gs
        .blocks
        .iter()
        .map(|b| {
            let mut classes: Vec<String> =
                b.boundary_monodromies().iter().map(class_name).collect();
            classes.sort();
            (b.surface().to_string(), classes)
        })
        .collect();
    blocks.sort();
    let mut decomposing: Vec<(ConjClass, ConjClass)> = gs
        .edges
        .iter()
        .filter_map(|e| {
            let a = classify(&e.iso.source.phi).ok()?;
            let b = classify(&e.iso.target.phi).ok()?;
            Some(if a <= b { (a, b) } else { (b, a) })
        })
        .collect();
    decomposing.sort();
    let (reduced, _) = is_reduced(gs);
    let mut findings = Vec::new();
    if reduced {
        for (i, e) in gs.edges.iter().enumerate() {
            for phi in [&e.iso.source.phi, &e.iso.target.phi] {
                match classify(phi) {
                    Ok(ConjClass::Parabolic { sign: 1, .. }) => {}
                    Ok(c) => {
                        findings.push(format!("edge {i}: decomposing class {c} is not parabolic"))
                    }
                    Err(err) => findings.push(format!("edge {i}: {err}")),
                }
            }
        }
    }
    InvariantReport {
        block_count: gs.blocks.len(),
        blocks,
        decomposing,
        sigma: manifold_signature(gs).ok(),
        euler: euler_characteristic(gs),
        h1: first_homology(gs),
        reduced,
        findings,
    }
}

fn class_name(m: &crate::gl2z::Mat2) -> String {
    match classify(m) {
        Ok(c) => c.to_string(),
        Err(_) => format!("GL{m}"),
    }
}

fn fraction(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl InvariantReport {
    /// First field in which two reports differ.
    pub fn first_difference(&self, other: &InvariantReport) -> Option<&'static str> {
        if self.block_count != other.block_count {
            Some("block_count")
        } else if self.blocks != other.blocks {
            Some("blocks")
        } else if self.decomposing != other.decomposing {
            Some("decomposing")
        } else if self.sigma != other.sigma {
            Some("sigma")
        } else if self.euler != other.euler {
            Some("euler")
        } else if self.h1 != other.h1 {
            Some("h1")
        } else {
            None
        }
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "blocks: {}", self.block_count)?;
        for (surface, classes) in &self.blocks {
            writeln!(f, "block: {surface} | {}", classes.join(" "))?;
        }
        for (a, b) in &self.decomposing {
            writeln!(f, "decomposing: {a} ~ {b}")?;
        }
        match &self.sigma {
            Some(s) => writeln!(f, "sigma: {}", fraction(s))?,
            None => writeln!(f, "sigma: unsupported (non-orientable base)")?,
        }
        writeln!(f, "euler: {}", self.euler)?;
        let torsion: Vec<String> = self.h1.1.iter().map(|t| t.to_string()).collect();
        writeln!(f, "h1: rank {} torsion [{}]", self.h1.0, torsion.join(","))?;
        writeln!(f, "reduced: {}", if self.reduced { "yes" } else { "no" })?;
        if self.findings.is_empty() {
            writeln!(f, "findings: none")
        } else {
            for finding in &self.findings {
                writeln!(f, "finding: {finding}")?;
            }
            Ok(())
        }
    }
}
