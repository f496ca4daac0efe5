//! Contraction of fiber-preserving edges into larger blocks.
//!
//! A merged block keeps the fiber coordinates of the edge's source block.
//! Every surviving boundary word of the merged base is, as an element of the
//! amalgamated (or HNN) base group, one of the old boundary words; the old and
//! new boundary subgroups are then related by a fiber-preserving map whose
//! translation part comes from a crossed homomorphism that makes the glued
//! sections agree. Those maps are composed into the remaining edges.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{validate_structure, Endpoint, GraphStructure};
use crate::bundles::{Block, BoundaryIso, Letter, SurfaceWithBoundary, TorusBundleOverCircle};
use crate::gl2z::{Mat2, Vec2};
use crate::intlin;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error(
        "contraction consumes every boundary component: this is a single T²-bundle over a closed surface, not a graph-manifold presentation with boundary blocks"
    )]
    ClosedBase,
    #[error("contracting edge {edge} is unsupported: {reason}")]
    Unsupported { edge: usize, reason: String },
}

/// Repeatedly contracts fiber-preserving edges until none remain.
pub fn reduce(gs: &GraphStructure) -> Result<GraphStructure, ReduceError> {
    let violations = validate_structure(gs);
    if let Some(v) = violations.first() {
        return Err(ReduceError::Invalid(v.to_string()));
    }
    let mut cur = gs.clone();
    while let Some(edge) = cur.edges.iter().position(|e| e.iso.is_fiber_preserving()) {
        cur = contract(&cur, edge)?;
        debug_assert!(
            validate_structure(&cur).is_empty(),
            "{:?}",
            validate_structure(&cur)
        );
    }
    Ok(cur)
}

fn zero2() -> Vec2 {
    [BigInt::zero(), BigInt::zero()]
}

fn add2(a: &Vec2, b: &Vec2) -> Vec2 {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

fn product(ms: impl IntoIterator<Item = Mat2>) -> Mat2 {
    ms.into_iter()
        .fold(Mat2::identity(), |acc, m| acc.compose(&m))
}

/// Matrices `M_g` with `δ(word) = Σ_g M_g δ(g)` for a crossed homomorphism
/// `δ(uv) = δ(u) + ρ(u)δ(v)`.
fn crossed_coefficients(images: &[Mat2], word: &[Letter]) -> Vec<Mat2> {
    let zero = Mat2::new(0, 0, 0, 0);
    let mut coeffs = vec![zero; images.len()];
    let mut prefix = Mat2::identity();
    for &(g, e) in word {
        if e > 0 {
            coeffs[g] = coeffs[g].add(&prefix);
            prefix = prefix.compose(&images[g]);
        } else {
            prefix = prefix.compose(&images[g].inv());
            coeffs[g] = coeffs[g].sub(&prefix);
        }
    }
    coeffs
}

fn crossed_eval(images: &[Mat2], values: &[Vec2], word: &[Letter]) -> Vec2 {
    crossed_coefficients(images, word)
        .iter()
        .zip(values)
        .fold(zero2(), |acc, (m, v)| add2(&acc, &m.apply(v)))
}

/// Integer solution of `Σ blocks[k] · unknown_k = rhs`, preferring a single
/// unknown with unimodular coefficient.
fn solve_blocks(blocks: &[Mat2], rhs: &Vec2) -> Option<Vec<Vec2>> {
    let mut out = vec![zero2(); blocks.len()];
    if let Some(k) = blocks.iter().position(|m| m.is_unimodular()) {
        out[k] = blocks[k].inv().apply(rhs);
        return Some(out);
    }
    let cols = 2 * blocks.len();
    let mut rows = intlin::zeros(2, cols);
    for (k, m) in blocks.iter().enumerate() {
        rows[0][2 * k] = m.a.clone();
        rows[0][2 * k + 1] = m.b.clone();
        rows[1][2 * k] = m.c.clone();
        rows[1][2 * k + 1] = m.d.clone();
    }
    let x = intlin::solve(&rows, cols, rhs)?;
    for k in 0..blocks.len() {
        out[k] = [x[2 * k].clone(), x[2 * k + 1].clone()];
    }
    Some(out)
}

/// Where an old boundary went and the map of its π₁ onto the new boundary.
struct Moved {
    block: String,
    boundary: usize,
    map: BoundaryIso,
}

fn unique_labels(candidates: Vec<(String, String)>) -> Vec<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, l) in &candidates {
        *counts.entry(l.as_str()).or_default() += 1;
    }
    candidates
        .iter()
        .map(|(block, l)| {
            if counts[l.as_str()] > 1 {
                format!("{block}_{l}")
            } else {
                l.clone()
            }
        })
        .collect()
}

fn contract(gs: &GraphStructure, edge: usize) -> Result<GraphStructure, ReduceError> {
    let e = &gs.edges[edge];
    let unsupported = |reason: &str| ReduceError::Unsupported {
        edge,
        reason: reason.into(),
    };
    let (ia, i) = gs.locate(&e.source).expect("validated endpoint");
    let (ib, j) = gs.locate(&e.target).expect("validated endpoint");
    let a = &gs.blocks[ia];
    let b = &gs.blocks[ib];
    if a.surface().orientable != b.surface().orientable {
        return Err(unsupported("merging orientable and non-orientable bases"));
    }
    let mut h = e.iso.clone();
    let c = h.fiber_matrix().expect("fiber-preserving edge");
    let eps = h.t.k;

    let remaining = if ia == ib {
        a.labels.len() - 2
    } else {
        a.labels.len() + b.labels.len() - 2
    };
    if remaining == 0 {
        return Err(ReduceError::ClosedBase);
    }

    let mut moved: BTreeMap<(usize, usize), Moved> = BTreeMap::new();
    let no_section = || unsupported("no compatible section");
    let merged = if ia == ib {
        if !a.surface().orientable {
            return Err(unsupported("self-glueing of a non-orientable base"));
        }
        if eps != -1 || !c.det().is_one() {
            return Err(unsupported(
                "self-glueing would produce a non-orientable base",
            ));
        }
        let (i, j) = if i < j {
            (i, j)
        } else {
            h = h.inverse().expect("valid glueing");
            (j, i)
        };
        let (block, maps) = self_glue(a, i, j, &h).ok_or_else(no_section)?;
        for (k, m) in maps {
            moved.insert((ia, k), m);
        }
        block
    } else if eps == 1 {
        let (mirrored, mirror_maps) = mirror_block(b);
        let h = h.compose(&mirror_maps[j]);
        let (block, maps_a, maps_b) =
            merge_distinct(a, &mirrored, i, b.labels.len() - 1 - j, &h).ok_or_else(no_section)?;
        for (k, m) in maps_a {
            moved.insert((ia, k), m);
        }
        for (k, m) in maps_b {
            let old = b.labels.len() - 1 - k;
            let map = mirror_maps[old].compose(&m.map);
            moved.insert((ib, old), Moved { map, ..m });
        }
        block
    } else {
        let (block, maps_a, maps_b) = merge_distinct(a, b, i, j, &h).ok_or_else(no_section)?;
        for (k, m) in maps_a {
            moved.insert((ia, k), m);
        }
        for (k, m) in maps_b {
            moved.insert((ib, k), m);
        }
        block
    };

    let mut blocks: Vec<Block> = Vec::new();
    for (k, blk) in gs.blocks.iter().enumerate() {
        if k == ia {
            blocks.push(merged.clone());
        } else if k != ib {
            blocks.push(blk.clone());
        }
    }
    let relocate = |end: &Endpoint| -> Option<(Endpoint, &BoundaryIso)> {
        let loc = gs.locate(end)?;
        let m = moved.get(&loc)?;
        Some((
            Endpoint::new(m.block.clone(), merged.labels[m.boundary].clone()),
            &m.map,
        ))
    };
    let mut edges = Vec::new();
    for (k, old) in gs.edges.iter().enumerate() {
        if k == edge {
            continue;
        }
        let mut new = old.clone();
        if let Some((end, g)) = relocate(&old.source) {
            new.source = end;
            new.iso = g
                .inverse()
                .expect("boundary map is invertible")
                .compose(&new.iso);
        }
        if let Some((end, g)) = relocate(&old.target) {
            new.target = end;
            new.iso = new.iso.compose(g);
        }
        edges.push(new);
    }
    Ok(GraphStructure { blocks, edges })
}

/// Same oriented block presented with reversed base and fiber orientation;
/// also the boundary maps from old boundary `k` to new boundary `b − 1 − k`.
fn mirror_block(block: &Block) -> (Block, Vec<BoundaryIso>) {
    let s = block.surface();
    let j = Mat2::reflection();
    let flip = |m: &Mat2| j.compose(m).compose(&j);
    let rho = &block.rep.images;
    let g = s.genus as usize;
    let nb = s.boundary_count as usize;
    let old_bm = block.boundary_monodromies();
    let mut images = Vec::with_capacity(rho.len());
    if s.orientable {
        for k in 0..g {
            let src = g - 1 - k;
            images.push(flip(&rho[2 * src + 1]));
            images.push(flip(&rho[2 * src]));
        }
    } else {
        for k in 0..g {
            images.push(flip(&rho[g - 1 - k].inv()));
        }
    }
    for m in 0..nb - 1 {
        images.push(flip(&old_bm[nb - 1 - m].inv()));
    }
    let labels: Vec<String> = block.labels.iter().rev().cloned().collect();
    let mirrored = Block::new(block.name.clone(), s.clone(), images).with_labels(labels);
    let new_bm = mirrored.boundary_monodromies();
    let maps = (0..nb)
        .map(|k| {
            let target = &new_bm[nb - 1 - k];
            debug_assert_eq!(*target, flip(&old_bm[k].inv()));
            BoundaryIso::fiber_map(
                TorusBundleOverCircle::new(old_bm[k].clone()),
                TorusBundleOverCircle::new(target.clone()),
                &j,
                zero2(),
                -1,
            )
        })
        .collect();
    (mirrored, maps)
}

type Moves = Vec<(usize, Moved)>;

/// Amalgamates `a` and `b` along `a.i ~ b.j` for a glueing with `ε = −1`,
/// `det C = 1`, returning the boundary maps of `a` and of `b`.
fn merge_distinct(
    a: &Block,
    b: &Block,
    i: usize,
    j: usize,
    h: &BoundaryIso,
) -> Option<(Block, Moves, Moves)> {
    let sa = a.surface();
    let sb = b.surface();
    let (na, nb) = (sa.boundary_count as usize, sb.boundary_count as usize);
    let c = h.fiber_matrix()?;
    let ci = c.inv();
    let rho_a = &a.rep.images;
    let rho_b: Vec<Mat2> = b
        .rep
        .images
        .iter()
        .map(|m| ci.compose(m).compose(&c))
        .collect();
    let words_a = sa.boundary_words();
    let words_b = sb.boundary_words();
    let bm_a = a.boundary_monodromies();
    let bm_b: Vec<Mat2> = b
        .boundary_monodromies()
        .iter()
        .map(|m| ci.compose(m).compose(&c))
        .collect();

    let n = na + nb - 2;
    let name = format!("{}+{}", a.name, b.name);

    // new boundary order: A[..i], B[j+1..], B[..j], A[i+1..]
    let mut seq: Vec<(bool, usize)> = Vec::with_capacity(n);
    seq.extend((0..i).map(|k| (true, k)));
    seq.extend((j + 1..nb).map(|k| (false, k)));
    seq.extend((0..j).map(|k| (false, k)));
    seq.extend((i + 1..na).map(|k| (true, k)));

    let rho_z = product((i + 1..na).map(|k| bm_a[k].clone()));
    let rho_x = product((0..j).map(|k| bm_b[k].clone()));
    let rho_k = rho_z.inv().compose(&rho_x.inv());
    let rho_k_inv = rho_k.inv();

    let mut images = Vec::new();
    images.extend(rho_a[..sa.handle_generators()].iter().cloned());
    images.extend(
        rho_b[..sb.handle_generators()]
            .iter()
            .map(|m| rho_k.compose(m).compose(&rho_k_inv)),
    );
    let mono = |&(from_a, k): &(bool, usize)| {
        if from_a {
            bm_a[k].clone()
        } else {
            bm_b[k].clone()
        }
    };
    images.extend(seq[..n - 1].iter().map(mono));

    // δ_A(c_i) + φ_{A,i} δ_B(d_j) = C⁻¹ w
    let coeff_a = crossed_coefficients(rho_a, &words_a[i]);
    let coeff_b: Vec<Mat2> = crossed_coefficients(&rho_b, &words_b[j])
        .iter()
        .map(|m| bm_a[i].compose(m))
        .collect();
    let all: Vec<Mat2> = coeff_a.iter().chain(&coeff_b).cloned().collect();
    let values = solve_blocks(&all, &ci.apply(&h.t.v))?;
    let (delta_a, delta_b) = values.split_at(rho_a.len());

    let surface = SurfaceWithBoundary {
        orientable: sa.orientable,
        genus: sa.genus + sb.genus,
        boundary_count: n as u32,
    };
    let labels = unique_labels(
        seq.iter()
            .map(|&(from_a, k)| {
                if from_a {
                    (a.name.clone(), a.labels[k].clone())
                } else {
                    (b.name.clone(), b.labels[k].clone())
                }
            })
            .collect(),
    );
    let block = Block::new(name.clone(), surface, images).with_labels(labels);
    let new_bm = block.boundary_monodromies();
    let (mut moves_a, mut moves_b) = (Vec::new(), Vec::new());
    for (pos, &(from_a, k)) in seq.iter().enumerate() {
        debug_assert_eq!(new_bm[pos], mono(&(from_a, k)));
        let (old_phi, fiber, offset) = if from_a {
            (
                bm_a[k].clone(),
                Mat2::identity(),
                crossed_eval(rho_a, delta_a, &words_a[k]),
            )
        } else {
            (
                b.boundary_monodromies()[k].clone(),
                ci.clone(),
                crossed_eval(&rho_b, delta_b, &words_b[k]),
            )
        };
        let map = BoundaryIso::fiber_map(
            TorusBundleOverCircle::new(old_phi),
            TorusBundleOverCircle::new(new_bm[pos].clone()),
            &fiber,
            offset,
            1,
        );
        let entry = Moved {
            block: name.clone(),
            boundary: pos,
            map,
        };
        if from_a {
            moves_a.push((k, entry));
        } else {
            moves_b.push((k, entry));
        }
    }
    Some((block, moves_a, moves_b))
}

/// HNN-type contraction of the self-edge `a.i → a.j` (`i < j`), `ε = −1`,
/// `det C = 1`: one new handle, two fewer boundaries.
fn self_glue(a: &Block, i: usize, j: usize, h: &BoundaryIso) -> Option<(Block, Moves)> {
    let s = a.surface();
    let nb = s.boundary_count as usize;
    let n = nb - 2;
    let c = h.fiber_matrix()?;
    let rho = &a.rep.images;
    let words = s.boundary_words();
    let bm = a.boundary_monodromies();
    let seq: Vec<usize> = (0..nb).filter(|&k| k != i && k != j).collect();
    let rho_p = product(bm.iter().cloned());
    let rho_u = product((0..i).map(|k| bm[k].clone()));
    let rho_v = product((i + 1..j).map(|k| bm[k].clone()));
    let rho_k = rho_p.inv().compose(&rho_u);
    let rho_k_inv = rho_k.inv();
    let alpha = rho_k.compose(&rho_v).compose(&c).compose(&rho_k_inv);
    let beta = rho_k.compose(&bm[i]).compose(&rho_k_inv);

    let mut images: Vec<Mat2> = rho[..s.handle_generators()].to_vec();
    images.push(alpha);
    images.push(beta);
    images.extend(seq[..n - 1].iter().map(|&k| bm[k].clone()));

    // (I − φ_j⁻¹)u + C δ(c_i) + φ_j⁻¹ δ(c_j) = w
    let phi_j_inv = bm[j].inv();
    let mut blocks = vec![Mat2::identity().sub(&phi_j_inv)];
    let ci = crossed_coefficients(rho, &words[i]);
    let cj = crossed_coefficients(rho, &words[j]);
    for (x, y) in ci.iter().zip(&cj) {
        blocks.push(c.compose(x).add(&phi_j_inv.compose(y)));
    }
    let values = solve_blocks(&blocks, &h.t.v)?;
    let delta = &values[1..];

    let surface = SurfaceWithBoundary::orientable(s.genus + 1, n as u32);
    let labels = seq.iter().map(|&k| a.labels[k].clone()).collect();
    let block = Block::new(a.name.clone(), surface, images).with_labels(labels);
    let new_bm = block.boundary_monodromies();
    let mut moves = Vec::new();
    for (pos, &k) in seq.iter().enumerate() {
        debug_assert_eq!(new_bm[pos], bm[k]);
        let map = BoundaryIso::fiber_map(
            TorusBundleOverCircle::new(bm[k].clone()),
            TorusBundleOverCircle::new(bm[k].clone()),
            &Mat2::identity(),
            crossed_eval(rho, delta, &words[k]),
            1,
        );
        moves.push((
            k,
            Moved {
                block: a.name.clone(),
                boundary: pos,
                map,
            },
        ));
    }
    Some((block, moves))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossed_coefficients_of_inverse_letter() {
        let images = vec![Mat2::r()];
        let coeffs = crossed_coefficients(&images, &[(0, -1)]);
        assert_eq!(coeffs[0], -Mat2::r().inv());
    }

    #[test]
    fn mirror_maps_are_valid() {
        let block = Block::new(
            "G",
            SurfaceWithBoundary::orientable(1, 2),
            vec![Mat2::r(), Mat2::l(), Mat2::new(2, 1, 1, 1)],
        );
        let (m, maps) = mirror_block(&block);
        assert!(crate::bundles::validate_block(&m).is_empty());
        for g in maps {
            assert!(g.violations().is_empty());
            assert_eq!(g.degree(), Some(1));
        }
    }
}
