use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::contfrac::{least_rotation, period_matrix, stabilizer_form};
use super::{Gl2zError, Mat2, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    R,
    L,
}

impl Letter {
    pub fn matrix(self) -> Mat2 {
        match self {
            Letter::R => Mat2::r(),
            Letter::L => Mat2::l(),
        }
    }
}

/// Positive word in `R`, `L` stored at its least rotation (`R < L`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    /// Canonical rotation of `letters` and the number of leading letters
    /// moved to the end to reach it.
    pub fn canonical(letters: Vec<Letter>) -> (CyclicWord, usize) {
        let shift = least_rotation(&letters);
        let mut rotated = letters[shift..].to_vec();
        rotated.extend_from_slice(&letters[..shift]);
        (CyclicWord(rotated), shift)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn matrix(&self) -> Mat2 {
        word_matrix(&self.0)
    }

    /// The word with `R` and `L` exchanged (conjugation by the coordinate swap).
    pub fn swapped(&self) -> CyclicWord {
        let letters = self
            .0
            .iter()
            .map(|l| match l {
                Letter::R => Letter::L,
                Letter::L => Letter::R,
            })
            .collect();
        CyclicWord::canonical(letters).0
    }
}

fn word_matrix(letters: &[Letter]) -> Mat2 {
    letters
        .iter()
        .fold(Mat2::identity(), |acc, l| acc.compose(&l.matrix()))
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Letter::R => "R",
                Letter::L => "L",
            })?;
        }
        Ok(())
    }
}

impl FromStr for CyclicWord {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .map(|c| match c {
                'R' => Ok(Letter::R),
                'L' => Ok(Letter::L),
                other => Err(format!("invalid letter `{other}`")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !letters.contains(&Letter::R) || !letters.contains(&Letter::L) {
            return Err("hyperbolic words contain both R and L".into());
        }
        Ok(CyclicWord::canonical(letters).0)
    }
}

/// Conjugacy class of an element of SL(2,Z).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConjClass {
    /// `±I`.
    Central { sign: i8 },
    /// Finite order, `|trace| < 2`. `rotation` is the sign of the lower-left
    /// entry, which separates a class from its inverse class.
    Elliptic { trace: i8, rotation: i8 },
    /// `sign · (1 n; 0 1)`, `n ≠ 0`.
    Parabolic { sign: i8, n: BigInt },
    /// `sign · w` for a positive word `w` in `R`, `L`.
    Hyperbolic { sign: i8, word: CyclicWord },
}

impl ConjClass {
    pub fn representative(&self) -> Mat2 {
        match self {
            ConjClass::Central { sign } => signed(Mat2::identity(), *sign),
            ConjClass::Elliptic { trace, rotation } => elliptic_representative(*trace, *rotation),
            ConjClass::Parabolic { sign, n } => signed(Mat2::unipotent(n.clone()), *sign),
            ConjClass::Hyperbolic { sign, word } => signed(word.matrix(), *sign),
        }
    }

    /// Conjugate to `(1 n; 0 1)` for some `n` (identity included).
    pub fn is_unipotent_type(&self) -> bool {
        matches!(
            self,
            ConjClass::Central { sign: 1 } | ConjClass::Parabolic { sign: 1, .. }
        )
    }

    /// Order of the class in SL(2,Z), `None` when infinite.
    pub fn order(&self) -> Option<u32> {
        match self {
            ConjClass::Central { sign: 1 } => Some(1),
            ConjClass::Central { .. } => Some(2),
            ConjClass::Elliptic { trace: 0, .. } => Some(4),
            ConjClass::Elliptic { trace: 1, .. } => Some(6),
            ConjClass::Elliptic { .. } => Some(3),
            _ => None,
        }
    }
}

fn sign_str(s: i8) -> &'static str {
    if s < 0 {
        "-1"
    } else {
        "+1"
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjClass::Central { sign } => write!(f, "Central({})", sign_str(*sign)),
            ConjClass::Elliptic { trace, rotation } => {
                write!(
                    f,
                    "Elliptic(trace={},rotation={})",
                    trace,
                    sign_str(*rotation)
                )
            }
            ConjClass::Parabolic { sign, n } => write!(f, "Parabolic({},{})", sign_str(*sign), n),
            ConjClass::Hyperbolic { sign, word } => {
                write!(f, "Hyperbolic({},{})", sign_str(*sign), word)
            }
        }
    }
}

fn signed(m: Mat2, sign: i8) -> Mat2 {
    if sign < 0 {
        -m
    } else {
        m
    }
}

fn elliptic_representative(trace: i8, rotation: i8) -> Mat2 {
    match (trace, rotation > 0) {
        (0, true) => Mat2::new(0, -1, 1, 0),
        (0, false) => Mat2::new(0, 1, -1, 0),
        (1, true) => Mat2::new(0, -1, 1, 1),
        (1, false) => Mat2::new(1, 1, -1, 0),
        (_, true) => Mat2::new(-1, -1, 1, 0),
        (_, false) => Mat2::new(0, 1, -1, -1),
    }
}

fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn classify(m: &Mat2) -> Result<ConjClass, Gl2zError> {
    classify_with_conjugator(m).map(|(class, _)| class)
}

/// Class of `m` together with `P` such that `P · m · P⁻¹` is the class
/// representative.
pub fn classify_with_conjugator(m: &Mat2) -> Result<(ConjClass, Mat2), Gl2zError> {
    let det = m.det();
    if !det.is_one() {
        return Err(Gl2zError::NotInSl2z { det });
    }
    let trace = m.trace();
    let abs_trace = trace.abs();
    let two = BigInt::from(2);
    let result = if abs_trace < two {
        classify_elliptic(m)
    } else if abs_trace == two {
        let sign = sign_of(&trace);
        if m.is_diagonal() {
            (ConjClass::Central { sign }, Mat2::identity())
        } else {
            classify_parabolic(m, sign)
        }
    } else {
        classify_hyperbolic(m)
    };
    debug_assert_eq!(m.conjugated_by(&result.1), result.0.representative());
    Ok(result)
}

fn classify_parabolic(m: &Mat2, sign: i8) -> (ConjClass, Mat2) {
    let nil = signed(m.clone(), sign).sub(&Mat2::identity());
    let v = primitive_kernel(&nil).expect("rank one nilpotent");
    let g = v[0].extended_gcd(&v[1]);
    // columns v, u with det = 1
    let u = [-&g.y, g.x.clone()];
    let basis = Mat2::from_columns(&v, &u);
    let p = basis.inv();
    let rep = m.conjugated_by(&p);
    let n = signed(rep.clone(), sign).b;
    (ConjClass::Parabolic { sign, n }, p)
}

fn classify_elliptic(m: &Mat2) -> (ConjClass, Mat2) {
    let trace: i8 = if m.trace().is_zero() {
        0
    } else if m.trace().is_positive() {
        1
    } else {
        -1
    };
    let rotation = sign_of(&m.c);
    let class = ConjClass::Elliptic { trace, rotation };
    let (reduced, p) = reduce_elliptic(m);
    let target = class.representative();
    let x = search_conjugator(&reduced, &target, 6)
        .expect("reduced elliptic elements are close to the representative");
    (class, x.compose(&p))
}

/// Descent by `T^k` and `S` conjugations to `|c| ≤ 1`.
fn reduce_elliptic(m: &Mat2) -> (Mat2, Mat2) {
    let mut cur = m.clone();
    let mut p = Mat2::identity();
    loop {
        let two_c = BigInt::from(2) * &cur.c;
        let k = (&cur.d - &cur.a + &cur.c).div_floor(&two_c);
        if !k.is_zero() {
            let t = Mat2::unipotent(k);
            cur = cur.conjugated_by(&t);
            p = t.compose(&p);
        }
        if cur.c.abs() > cur.b.abs() {
            cur = cur.conjugated_by(&Mat2::s());
            p = Mat2::s().compose(&p);
        } else {
            return (cur, p);
        }
    }
}

/// Breadth-first search for `X` with `X · from · X⁻¹ = to` among words of
/// length ≤ `depth` in `T^{±1}`, `S^{±1}`.
fn search_conjugator(from: &Mat2, to: &Mat2, depth: usize) -> Option<Mat2> {
    let gens = [Mat2::r(), Mat2::unipotent(-1), Mat2::s(), Mat2::s().inv()];
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(Mat2::identity());
    queue.push_back((Mat2::identity(), 0usize));
    while let Some((x, len)) = queue.pop_front() {
        if &from.conjugated_by(&x) == to {
            return Some(x);
        }
        if len == depth {
            continue;
        }
        for g in &gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                queue.push_back((y, len + 1));
            }
        }
    }
    None
}

fn classify_hyperbolic(m: &Mat2) -> (ConjClass, Mat2) {
    let sign = sign_of(&m.trace());
    let positive = signed(m.clone(), sign);
    let form =
        stabilizer_form(&positive, true).expect("hyperbolic elements have a periodic fixed point");
    debug_assert_eq!(form.eps, 1);
    let mut letters = Vec::new();
    let mut index = 0usize;
    for _ in 0..form.power {
        for p in &form.period {
            let letter = if index.is_multiple_of(2) {
                Letter::R
            } else {
                Letter::L
            };
            let count: usize = p.try_into().expect("partial quotient fits in usize");
            letters.extend(std::iter::repeat_n(letter, count));
            index += 1;
        }
    }
    let (word, shift) = CyclicWord::canonical(letters.clone());
    let moved = word_matrix(&letters[..shift]);
    let p = moved.inv().compose(&form.conjugator.inv());
    (ConjClass::Hyperbolic { sign, word }, p)
}

/// Primitive generator of the kernel of a rank-one matrix, first nonzero
/// coordinate positive.
fn primitive_kernel(m: &Mat2) -> Option<Vec2> {
    let (x, y) = if !m.a.is_zero() || !m.b.is_zero() {
        (m.a.clone(), m.b.clone())
    } else if !m.c.is_zero() || !m.d.is_zero() {
        (m.c.clone(), m.d.clone())
    } else {
        return None;
    };
    let g = x.gcd(&y);
    let mut v = [y / &g, -x / &g];
    if v[0].is_negative() || (v[0].is_zero() && v[1].is_negative()) {
        v = [-&v[0], -&v[1]];
    }
    if !m.apply(&v).iter().all(Zero::is_zero) {
        return None;
    }
    Some(v)
}

/// Result of the eigenvalue-one query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EigenOne {
    /// `M = I`: every vector is fixed.
    AllVectors,
    /// Primitive fixed vector, first nonzero coordinate positive.
    Vector(Vec2),
    Absent,
}

impl EigenOne {
    pub fn is_present(&self) -> bool {
        !matches!(self, EigenOne::Absent)
    }
}

pub fn eigenvector_eigenvalue_one(m: &Mat2) -> EigenOne {
    let n = m.sub(&Mat2::identity());
    if n.is_zero() {
        return EigenOne::AllVectors;
    }
    if !n.det().is_zero() {
        return EigenOne::Absent;
    }
    match primitive_kernel(&n) {
        Some(v) => EigenOne::Vector(v),
        None => EigenOne::Absent,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    Sl2z,
    Gl2z,
}

/// Conjugacy class of a determinant −1 element of GL(2,Z).
#[derive(Clone, Debug, PartialEq, Eq)]
enum ReversingClass {
    /// Involutions: `diag(1,-1)` when the ±1 eigenvectors span Z², else the swap.
    Reflection { split: bool },
    Twisted {
        eps: i8,
        period: Vec<BigInt>,
        power: usize,
    },
}

fn classify_reversing(m: &Mat2) -> (ReversingClass, Mat2) {
    if m.trace().is_zero() {
        let plus = primitive_kernel(&m.sub(&Mat2::identity())).expect("reflection fixes a line");
        let minus = primitive_kernel(&m.add(&Mat2::identity())).expect("reflection negates a line");
        let basis = Mat2::from_columns(&plus, &minus);
        if basis.det().abs().is_one() {
            return (ReversingClass::Reflection { split: true }, basis.inv());
        }
        for minus in [minus.clone(), [-&minus[0], -&minus[1]]] {
            let sum = [&plus[0] + &minus[0], &plus[1] + &minus[1]];
            if sum.iter().all(|x| x.is_even()) {
                let e = [&sum[0] / 2, &sum[1] / 2];
                let me = m.apply(&e);
                let basis = Mat2::from_columns(&e, &me);
                if basis.det().abs().is_one() {
                    return (ReversingClass::Reflection { split: false }, basis.inv());
                }
            }
        }
        unreachable!("involution without an adapted basis");
    }
    let form = stabilizer_form(m, false).expect("nonzero trace reversing element");
    let shift = least_rotation(&form.period);
    let mut period = form.period[shift..].to_vec();
    period.extend_from_slice(&form.period[..shift]);
    let moved = period_matrix(&form.period[..shift]);
    let p = moved.inv().compose(&form.conjugator.inv());
    (
        ReversingClass::Twisted {
            eps: form.eps,
            period,
            power: form.power,
        },
        p,
    )
}

/// Decides whether some `C` in the ambient group satisfies `C·m1·C⁻¹ = m2`
/// and returns one such `C`.
pub fn conjugate_in(m1: &Mat2, m2: &Mat2, ambient: Ambient) -> Result<Option<Mat2>, Gl2zError> {
    match ambient {
        Ambient::Sl2z => {
            let (c1, p1) = classify_with_conjugator(m1)?;
            let (c2, p2) = classify_with_conjugator(m2)?;
            Ok((c1 == c2).then(|| p2.inv().compose(&p1)))
        }
        Ambient::Gl2z => {
            let (d1, d2) = (m1.det(), m2.det());
            for d in [&d1, &d2] {
                if !d.abs().is_one() {
                    return Err(Gl2zError::NotUnimodular { det: d.clone() });
                }
            }
            if d1 != d2 {
                return Ok(None);
            }
            if d1.is_one() {
                if let Some(c) = conjugate_in(m1, m2, Ambient::Sl2z)? {
                    return Ok(Some(c));
                }
                let j = Mat2::swap();
                let flipped = m1.conjugated_by(&j);
                return Ok(conjugate_in(&flipped, m2, Ambient::Sl2z)?.map(|c| c.compose(&j)));
            }
            let (c1, p1) = classify_reversing(m1);
            let (c2, p2) = classify_reversing(m2);
            Ok((c1 == c2).then(|| p2.inv().compose(&p1)))
        }
    }
}
