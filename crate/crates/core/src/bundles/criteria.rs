use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{SurfaceWithBoundary, TorusBundleOverCircle};
use crate::gl2z::{eigenvector_eigenvalue_one, Mat2};
use crate::intlin::{abelian_invariants, kernel, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error("boundary index {index} out of range for {count} boundary components")]
    BoundaryIndex { index: usize, count: u32 },
    #[error("monodromy {0} is not triangular")]
    NotTriangular(Box<Mat2>),
    #[error("need the same number of generator images on both sides")]
    GeneratorMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCovering {
    pub exists: bool,
    /// Intertwiner of least `|det|` in the searched box, first nonzero entry positive.
    pub witness: Option<Mat2>,
}

/// Coefficient box radius for the witness search over the solution lattice.
const WITNESS_BOX: i64 = 3;

/// Injective `α` with `α φ₁ = φ₂ α` for a circle base.
pub fn fiber_covering_exists(phi1: &Mat2, phi2: &Mat2) -> FiberCovering {
    fiber_covering_exists_multi(std::slice::from_ref(phi1), std::slice::from_ref(phi2))
        .expect("one generator on each side")
}

/// Simultaneous intertwiner `α φ₁(γ) = φ₂(γ) α` over all base generators γ.
pub fn fiber_covering_exists_multi(
    phi1: &[Mat2],
    phi2: &[Mat2],
) -> Result<FiberCovering, CriteriaError> {
    if phi1.len() != phi2.len() {
        return Err(CriteriaError::GeneratorMismatch);
    }
    // unknowns (p, q, r, s) of α = (p q; r s)
    let mut rows: IntMatrix = Vec::new();
    for (m1, m2) in phi1.iter().zip(phi2) {
        let z = BigInt::zero();
        // α m1 − m2 α, entry by entry
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
    let combine = |coeffs: &[i64]| -> Mat2 {
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
        Mat2::new(a, b, c, d)
    };
    // det is a quadratic form in the coefficients; a nonzero one cannot vanish
    // on all of {0,1,2}^r
    let exists = Grid::new(r, 0, 2).any(|c| !combine(&c).det().is_zero());
    if !exists {
        return Ok(FiberCovering {
            exists,
            witness: None,
        });
    }
    let witness = Grid::new(r, -WITNESS_BOX, WITNESS_BOX)
        .map(|c| combine(&c))
        .filter(|m| !m.det().is_zero())
        .map(normalize_sign)
        .min_by_key(|m| {
            let entries = [&m.a, &m.b, &m.c, &m.d];
            (
                m.det().abs(),
                m.max_abs_entry(),
                entries.iter().map(|x| x.abs()).sum::<BigInt>(),
                entries.map(|x| -x.clone()),
            )
        });
    Ok(FiberCovering { exists, witness })
}

fn normalize_sign(m: Mat2) -> Mat2 {
    let first = [&m.a, &m.b, &m.c, &m.d]
        .into_iter()
        .find(|x| !x.is_zero())
        .cloned();
    match first {
        Some(x) if x.is_negative() => -m,
        _ => m,
    }
}

/// All integer vectors of length `n` with entries in `[lo, hi]`.
struct Grid {
    current: Option<Vec<i64>>,
    lo: i64,
    hi: i64,
}

impl Grid {
    fn new(n: usize, lo: i64, hi: i64) -> Self {
        Grid {
            current: Some(vec![lo; n]),
            lo,
            hi,
        }
    }
}

impl Iterator for Grid {
    type Item = Vec<i64>;
    fn next(&mut self) -> Option<Vec<i64>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == next.len() {
                self.current = None;
                break;
            }
            if next[i] < self.hi {
                next[i] += 1;
                self.current = Some(next);
                break;
            }
            next[i] = self.lo;
            i += 1;
        }
        Some(out)
    }
}

/// Whether the torus fibration of `M_φ` is unique up to homotopy.
pub fn fibration_unique(mb: &TorusBundleOverCircle) -> bool {
    !eigenvector_eigenvalue_one(&mb.phi).is_present()
}

/// `H₁(M_φ) = Z ⊕ coker(φ − I)`: free rank and torsion coefficients.
pub fn torus_bundle_homology(mb: &TorusBundleOverCircle) -> (usize, Vec<BigInt>) {
    let n = mb.phi.sub(&Mat2::identity());
    // relations are the columns of φ − I
    let relations = vec![
        vec![n.a.clone(), n.c.clone()],
        vec![n.b.clone(), n.d.clone()],
    ];
    let (rank, torsion) = abelian_invariants(&relations, 2);
    (rank + 1, torsion)
}

/// Whether the boundary subgroup at `boundary_index` is closed under square roots.
pub fn square_root_closed(
    surface: &SurfaceWithBoundary,
    boundary_index: usize,
) -> Result<bool, CriteriaError> {
    if boundary_index >= surface.boundary_count as usize {
        return Err(CriteriaError::BoundaryIndex {
            index: boundary_index,
            count: surface.boundary_count,
        });
    }
    Ok(surface.excluded_name() != Some("Möbius band"))
}

/// For triangular `φ`: whether `M_φ` admits an orientation-reversing
/// self-diffeomorphism (Euler number of the circle bundle is zero).
pub fn orientation_reversing_self_diffeo_exists(phi: &Mat2) -> Result<bool, CriteriaError> {
    if !phi.b.is_zero() && !phi.c.is_zero() {
        return Err(CriteriaError::NotTriangular(Box::new(phi.clone())));
    }
    Ok(phi.is_diagonal())
}
