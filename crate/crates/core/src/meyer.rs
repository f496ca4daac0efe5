//! Meyer's signature cocycle on SL(2,Z) and the function Ψ it bounds.
//!
//! `meyer_form_signature` is the signature of the bilinear form on
//! `V(A,B) = {(x,y) : (A⁻¹ − I)x + (B − I)y = 0}`,
//! `⟨(x₁,y₁),(x₂,y₂)⟩ = ω(x₁ + y₁, (I − B)y₂)` with `ω(u,v) = u₁v₀ − u₀v₁`.
//! `meyer_cocycle` adds the coboundary of a class function `g` supported on
//! torsion and parabolic elements, so that its coboundary potential Ψ
//! satisfies `Ψ(±(1 n; 0 1)) = n` and vanishes on `±I`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::gl2z::{Gl2zError, Mat2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeyerError {
    #[error(transparent)]
    Matrix(#[from] Gl2zError),
    #[error("signature unsupported: {0}")]
    Unsupported(String),
}

fn require_sl(m: &Mat2) -> Result<(), Gl2zError> {
    let det = m.det();
    if det.is_one() {
        Ok(())
    } else {
        Err(Gl2zError::NotInSl2z { det })
    }
}

fn sign(x: &BigInt) -> i64 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Basis of the rational nullspace of a 2×4 matrix.
fn nullspace(rows: [[BigRational; 4]; 2]) -> Vec<[BigRational; 4]> {
    let mut m = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..4 {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..4)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
            v[free] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][free].clone();
            }
            v
        })
        .collect()
}

/// Signature of a symmetric rational matrix by symmetric elimination.
fn signature(mut g: Vec<Vec<BigRational>>) -> i64 {
    let mut total = 0;
    while !g.is_empty() {
        let n = g.len();
        let k = match (0..n).find(|&i| !g[i][i].is_zero()) {
            Some(k) => k,
            None => {
                let Some((i, j)) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !g[i][j].is_zero())
                else {
                    break;
                };
                // replace basis vector i by e_i + e_j, making g[i][i] = 2 g[i][j]
                let row_j = g[j].clone();
                for (x, y) in g[i].iter_mut().zip(row_j) {
                    *x += y;
                }
                for row in g.iter_mut() {
                    let y = row[j].clone();
                    row[i] += y;
                }
                i
            }
        };
        let p = g[k][k].clone();
        total += if p.is_positive() { 1 } else { -1 };
        let rest: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        g = rest
            .iter()
            .map(|&i| {
                rest.iter()
                    .map(|&j| &g[i][j] - &g[i][k] * &g[k][j] / &p)
                    .collect()
            })
            .collect();
    }
    total
}

/// Signature of Meyer's form on `V(A,B)`; lies in `{−2,…,2}`.
pub fn meyer_form_signature(a: &Mat2, b: &Mat2) -> Result<i64, Gl2zError> {
    require_sl(a)?;
    require_sl(b)?;
    let ai = a.inv().sub(&Mat2::identity());
    let bi = b.sub(&Mat2::identity());
    let rows = [
        [rat(&ai.a), rat(&ai.b), rat(&bi.a), rat(&bi.b)],
        [rat(&ai.c), rat(&ai.d), rat(&bi.c), rat(&bi.d)],
    ];
    let basis = nullspace(rows);
    let (b00, b01, b10, b11) = (rat(&b.a), rat(&b.b), rat(&b.c), rat(&b.d));
    let form = |v: &[BigRational; 4], w: &[BigRational; 4]| {
        let u = [&v[0] + &v[2], &v[1] + &v[3]];
        let y = [&w[2], &w[3]];
        let z0 = y[0] - (&b00 * y[0] + &b01 * y[1]);
        let z1 = y[1] - (&b10 * y[0] + &b11 * y[1]);
        &u[1] * z0 - &u[0] * z1
    };
    let gram = basis
        .iter()
        .map(|v| basis.iter().map(|w| form(v, w)).collect())
        .collect();
    Ok(signature(gram))
}

/// Correction potential on torsion and parabolic classes.
fn correction(m: &Mat2) -> i64 {
    let tr = m.trace();
    if tr == BigInt::from(2) && !m.is_identity() {
        if m.c.is_zero() {
            sign(&m.b)
        } else {
            -sign(&m.c)
        }
    } else if tr.is_zero() {
        -sign(&m.c)
    } else if tr.is_one() {
        -2 * sign(&m.c)
    } else {
        0
    }
}

/// Meyer's 2-cocycle, normalized so that Ψ is integral on parabolics.
pub fn meyer_cocycle(a: &Mat2, b: &Mat2) -> Result<i64, Gl2zError> {
    let form = meyer_form_signature(a, b)?;
    Ok(form + correction(a) + correction(b) - correction(&a.compose(b)))
}

fn tau(a: &Mat2, b: &Mat2) -> BigRational {
    BigRational::from_integer(meyer_cocycle(a, b).expect("SL(2,Z) arguments").into())
}

/// `Ψ(XY)` from `Ψ(X)`, `Ψ(Y)`.
fn fold(psi_x: &BigRational, x: &Mat2, psi_y: &BigRational, y: &Mat2) -> BigRational {
    psi_x + psi_y - BigRational::from_integer(3.into()) * tau(x, y)
}

/// Ψ on the generators, forced by `S⁴ = I`, `(ST)⁶ = I` and `Ψ(I) = 0`.
struct GeneratorValues {
    s: BigRational,
    s_inv: BigRational,
    t: BigRational,
    t_inv: BigRational,
}

fn power_sum(g: &Mat2, order: u32) -> BigRational {
    let mut acc = BigRational::zero();
    let mut p = g.clone();
    for _ in 1..order {
        acc += tau(&p, g);
        p = p.compose(g);
    }
    acc
}

fn generator_values() -> GeneratorValues {
    let three = BigRational::from_integer(3.into());
    let s = Mat2::s();
    let s_inv = s.inv();
    let u = s.compose(&Mat2::r());
    // Ψ(g^k) = kΨ(g) − 3 Σ_{j<k} τ(g^j, g), and Ψ(g^order) = 0
    let psi_s = &three * power_sum(&s, 4) / BigRational::from_integer(4.into());
    let psi_u = &three * power_sum(&u, 6) / BigRational::from_integer(6.into());
    let psi_s_inv = -&psi_s + &three * tau(&s, &s_inv);
    let psi_t = &psi_s_inv + &psi_u - &three * tau(&s_inv, &u);
    let t = Mat2::r();
    let psi_t_inv = -&psi_t + &three * tau(&t, &t.inv());
    GeneratorValues {
        s: psi_s,
        s_inv: psi_s_inv,
        t: psi_t,
        t_inv: psi_t_inv,
    }
}

/// Factor of an SL(2,Z) word: `S` or `T^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    S,
    T(BigInt),
}

impl Factor {
    pub fn matrix(&self) -> Mat2 {
        match self {
            Factor::S => Mat2::s(),
            Factor::T(k) => Mat2::unipotent(k.clone()),
        }
    }
}

/// Writes `m ∈ SL(2,Z)` as a product of `S` and powers of `T` by the
/// Euclidean algorithm on the first column.
pub fn word_decomposition(m: &Mat2) -> Result<Vec<Factor>, Gl2zError> {
    require_sl(m)?;
    let s_inv = Mat2::s().inv();
    let mut cur = m.clone();
    let mut factors = Vec::new();
    // invariant: m = factors · cur
    while !cur.c.is_zero() {
        if !cur.a.is_zero() && cur.a.abs() >= cur.c.abs() {
            let q = num_integer::Integer::div_floor(&cur.a, &cur.c);
            cur = Mat2::unipotent(-&q).compose(&cur);
            factors.push(Factor::T(q));
        } else {
            cur = s_inv.compose(&cur);
            factors.push(Factor::S);
        }
    }
    if cur.a.is_negative() {
        factors.push(Factor::S);
        factors.push(Factor::S);
        cur = -cur;
    }
    if !cur.b.is_zero() {
        factors.push(Factor::T(cur.b.clone()));
    }
    Ok(factors)
}

fn psi_t_power(k: &BigInt, g: &GeneratorValues) -> BigRational {
    if k.is_zero() {
        return BigRational::zero();
    }
    let (base, mut psi_base) = if k.is_positive() {
        (Mat2::r(), g.t.clone())
    } else {
        (Mat2::unipotent(-1), g.t_inv.clone())
    };
    let mut e = k.abs();
    let two = BigInt::from(2);
    let mut acc = Mat2::identity();
    let mut psi_acc = BigRational::zero();
    let mut sq = base;
    while !e.is_zero() {
        if (&e % &two).is_one() {
            psi_acc = fold(&psi_acc, &acc, &psi_base, &sq);
            acc = acc.compose(&sq);
        }
        e /= &two;
        if !e.is_zero() {
            psi_base = fold(&psi_base, &sq, &psi_base, &sq);
            sq = sq.compose(&sq);
        }
    }
    psi_acc
}

/// Ψ of a product of factors, folded left to right.
pub fn psi_of_word(factors: &[Factor]) -> BigRational {
    let g = generator_values();
    let mut prefix = Mat2::identity();
    let mut value = BigRational::zero();
    for f in factors {
        let (m, psi_f) = match f {
            Factor::S => (Mat2::s(), g.s.clone()),
            Factor::T(k) => (Mat2::unipotent(k.clone()), psi_t_power(k, &g)),
        };
        value = fold(&value, &prefix, &psi_f, &m);
        prefix = prefix.compose(&m);
    }
    value
}

/// Meyer's function Ψ.
pub fn psi(m: &Mat2) -> Result<BigRational, Gl2zError> {
    Ok(psi_of_word(&word_decomposition(m)?))
}

/// Inverse-generator values, exposed for the CLI and tests.
pub fn psi_generators() -> [(&'static str, BigRational); 4] {
    let g = generator_values();
    [("S", g.s), ("S^-1", g.s_inv), ("T", g.t), ("T^-1", g.t_inv)]
}

/// `(1/3) Σ Ψ(φᵢ)` over the boundary monodromies of a block.
pub fn block_signature(block: &crate::bundles::Block) -> Result<BigRational, MeyerError> {
    if !block.surface().orientable {
        return Err(MeyerError::Unsupported("non-orientable base".into()));
    }
    let mut total = BigRational::zero();
    for phi in block.boundary_monodromies() {
        if !phi.det().is_one() {
            return Err(MeyerError::Unsupported(format!(
                "boundary monodromy {phi} has determinant −1"
            )));
        }
        total += psi(&phi)?;
    }
    Ok(total / BigRational::from_integer(3.into()))
}

/// Sum of block signatures (Novikov additivity).
pub fn manifold_signature(gs: &crate::assembly::GraphStructure) -> Result<BigRational, MeyerError> {
    gs.blocks
        .iter()
        .map(block_signature)
        .try_fold(BigRational::zero(), |acc, s| Ok(acc + s?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn generator_values_are_integral() {
        let g = generator_values();
        assert_eq!(g.s, r(0));
        assert_eq!(g.s_inv, r(0));
        assert_eq!(g.t, r(1));
        assert_eq!(g.t_inv, r(-1));
    }

    #[test]
    fn form_signature_of_t_t() {
        let t = Mat2::r();
        assert_eq!(meyer_form_signature(&t, &t).unwrap(), -1);
        assert_eq!(meyer_cocycle(&t, &t).unwrap(), 0);
        assert_eq!(meyer_cocycle(&t, &t.inv()).unwrap(), 0);
    }

    #[test]
    fn cocycle_vanishes_at_identity() {
        for m in [
            Mat2::r(),
            Mat2::s(),
            Mat2::new(2, 1, 1, 1),
            -Mat2::identity(),
        ] {
            assert_eq!(meyer_cocycle(&Mat2::identity(), &m).unwrap(), 0);
            assert_eq!(meyer_cocycle(&m, &Mat2::identity()).unwrap(), 0);
        }
    }

    #[test]
    fn psi_on_unipotents() {
        assert_eq!(psi(&Mat2::unipotent(4)).unwrap(), r(4));
        assert_eq!(psi(&Mat2::unipotent(-9)).unwrap(), r(-9));
        assert_eq!(psi(&Mat2::identity()).unwrap(), r(0));
        assert_eq!(psi(&-Mat2::identity()).unwrap(), r(0));
        assert_eq!(psi(&Mat2::new(-1, 7, 0, -1)).unwrap(), r(-7));
    }

    #[test]
    fn decomposition_multiplies_back() {
        for m in [
            Mat2::new(2, 1, 1, 1),
            Mat2::new(-5, 3, -7, 4),
            Mat2::s(),
            -Mat2::r(),
        ] {
            let w = word_decomposition(&m).unwrap();
            let p = w
                .iter()
                .fold(Mat2::identity(), |acc, f| acc.compose(&f.matrix()));
            assert_eq!(p, m);
        }
    }

    #[test]
    fn rejects_det_minus_one() {
        assert!(psi(&Mat2::reflection()).is_err());
        assert!(meyer_cocycle(&Mat2::reflection(), &Mat2::r()).is_err());
    }
}
