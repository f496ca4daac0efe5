//! Surfaces with boundary, monodromy representations and blocks; torus
//! bundles over the circle with their π₁ arithmetic and glueing maps.
//!
//! Generators of the free group π₁ of a surface with boundary are, in order,
//! `a1, b1, …, ag, bg, c1, …, c(n−1)` (orientable, genus g, n boundary
//! components) or `q1, …, qg, c1, …, c(n−1)` (g crosscaps). Boundary `i < n`
//! is the loop `ci`; the last boundary is
//! `(c1⋯c(n−1))⁻¹ · [a1,b1]⋯[ag,bg]`, respectively `(c1⋯c(n−1))⁻¹ · q1²⋯qg²`,
//! with `[a,b] = a b a⁻¹ b⁻¹`.

mod criteria;
mod torus;

pub use criteria::{
    fiber_covering_exists, fiber_covering_exists_multi, fibration_unique,
    orientation_reversing_self_diffeo_exists, square_root_closed, torus_bundle_homology,
    CriteriaError, FiberCovering,
};
pub use torus::{BoundaryIso, GlueingViolation, Pi1Element, TorusBundleOverCircle};

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::gl2z::Mat2;

/// Letter of a free-group word: generator index and exponent ±1.
pub type Letter = (usize, i8);
pub type Word = Vec<Letter>;

pub fn invert_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceWithBoundary {
    pub orientable: bool,
    /// Handles (orientable) or crosscaps (non-orientable).
    pub genus: u32,
    pub boundary_count: u32,
}

impl SurfaceWithBoundary {
    pub fn orientable(genus: u32, boundary_count: u32) -> Self {
        SurfaceWithBoundary {
            orientable: true,
            genus,
            boundary_count,
        }
    }

    pub fn non_orientable(crosscaps: u32, boundary_count: u32) -> Self {
        SurfaceWithBoundary {
            orientable: false,
            genus: crosscaps,
            boundary_count,
        }
    }

    pub fn pants() -> Self {
        Self::orientable(0, 3)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let g = i64::from(self.genus);
        let b = i64::from(self.boundary_count);
        if self.orientable {
            2 - 2 * g - b
        } else {
            2 - g - b
        }
    }

    /// Rank of the free fundamental group.
    pub fn rank(&self) -> usize {
        (1 - self.euler_characteristic()).max(0) as usize
    }

    /// Number of handle/crosscap generators preceding the `ci`.
    pub fn handle_generators(&self) -> usize {
        let g = self.genus as usize;
        if self.orientable {
            2 * g
        } else {
            g
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.rank());
        for i in 1..=self.genus {
            if self.orientable {
                names.push(format!("a{i}"));
                names.push(format!("b{i}"));
            } else {
                names.push(format!("q{i}"));
            }
        }
        for i in 1..self.boundary_count {
            names.push(format!("c{i}"));
        }
        names
    }

    /// Disc, annulus or Möbius band.
    pub fn excluded_name(&self) -> Option<&'static str> {
        match (self.orientable, self.genus, self.boundary_count) {
            (true, 0, 1) => Some("disc"),
            (true, 0, 2) => Some("annulus"),
            (false, 1, 1) => Some("Möbius band"),
            _ => None,
        }
    }

    pub fn boundary_words(&self) -> Vec<Word> {
        let h = self.handle_generators();
        let n = self.boundary_count as usize;
        let mut words: Vec<Word> = (0..n.saturating_sub(1)).map(|i| vec![(h + i, 1)]).collect();
        let mut last: Word = (0..n.saturating_sub(1))
            .rev()
            .map(|i| (h + i, -1))
            .collect();
        if self.orientable {
            for i in 0..self.genus as usize {
                let (a, b) = (2 * i, 2 * i + 1);
                last.extend([(a, 1), (b, 1), (a, -1), (b, -1)]);
            }
        } else {
            for i in 0..self.genus as usize {
                last.extend([(i, 1), (i, 1)]);
            }
        }
        words.push(last);
        words
    }

    /// Whether generator `i` reverses the orientation of the surface.
    pub fn generator_reverses(&self, i: usize) -> bool {
        !self.orientable && i < self.genus as usize
    }
}

impl fmt::Display for SurfaceWithBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.orientable {
            "orientable"
        } else {
            "non-orientable"
        };
        write!(f, "{kind} {} {}", self.genus, self.boundary_count)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyRep {
    pub surface: SurfaceWithBoundary,
    pub images: Vec<Mat2>,
}

impl MonodromyRep {
    pub fn evaluate(&self, word: &[Letter]) -> Mat2 {
        word.iter().fold(Mat2::identity(), |acc, &(g, e)| {
            let m = &self.images[g];
            if e > 0 {
                acc.compose(m)
            } else {
                acc.compose(&m.inv())
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub rep: MonodromyRep,
    /// One label per boundary component, in boundary-word order.
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockViolation {
    NonNegativeEuler {
        chi: i64,
    },
    ExcludedSurface(&'static str),
    ImageCount {
        expected: usize,
        found: usize,
    },
    NotUnimodular {
        generator: String,
        det: BigInt,
    },
    /// Total space not orientable: determinant must be −1 exactly on crosscaps.
    OrientationCharacter {
        generator: String,
        det: BigInt,
    },
    LabelCount {
        expected: usize,
        found: usize,
    },
    DuplicateLabel(String),
}

impl fmt::Display for BlockViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockViolation::NonNegativeEuler { chi } => {
                write!(f, "χ = {chi}, base must have negative Euler characteristic")
            }
            BlockViolation::ExcludedSurface(name) => write!(f, "excluded surface ({name})"),
            BlockViolation::ImageCount { expected, found } => {
                write!(f, "expected {expected} generator images, found {found}")
            }
            BlockViolation::NotUnimodular { generator, det } => {
                write!(
                    f,
                    "image of {generator} has determinant {det}, not unimodular"
                )
            }
            BlockViolation::OrientationCharacter { generator, det } => write!(
                f,
                "image of {generator} has determinant {det}; total space would be non-orientable"
            ),
            BlockViolation::LabelCount { expected, found } => {
                write!(f, "expected {expected} boundary labels, found {found}")
            }
            BlockViolation::DuplicateLabel(l) => write!(f, "duplicate boundary label `{l}`"),
        }
    }
}

impl Block {
    pub fn new(name: impl Into<String>, surface: SurfaceWithBoundary, images: Vec<Mat2>) -> Self {
        let labels = (1..=surface.boundary_count)
            .map(|i| format!("d{i}"))
            .collect();
        Block {
            name: name.into(),
            rep: MonodromyRep { surface, images },
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn surface(&self) -> &SurfaceWithBoundary {
        &self.rep.surface
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn boundary_monodromies(&self) -> Vec<Mat2> {
        self.surface()
            .boundary_words()
            .iter()
            .map(|w| self.rep.evaluate(w))
            .collect()
    }

    pub fn labelled_boundary_monodromies(&self) -> Vec<(String, Mat2)> {
        self.labels
            .iter()
            .cloned()
            .zip(self.boundary_monodromies())
            .collect()
    }

    pub fn boundary_bundle(&self, index: usize) -> TorusBundleOverCircle {
        let word = &self.surface().boundary_words()[index];
        TorusBundleOverCircle::new(self.rep.evaluate(word))
    }
}

pub fn validate_block(block: &Block) -> Vec<BlockViolation> {
    let surface = block.surface();
    let mut out = Vec::new();
    let chi = surface.euler_characteristic();
    if chi >= 0 {
        out.push(BlockViolation::NonNegativeEuler { chi });
    }
    if let Some(name) = surface.excluded_name() {
        out.push(BlockViolation::ExcludedSurface(name));
    }
    let names = surface.generator_names();
    if block.rep.images.len() != names.len() {
        out.push(BlockViolation::ImageCount {
            expected: names.len(),
            found: block.rep.images.len(),
        });
    } else {
        for (i, (m, name)) in block.rep.images.iter().zip(&names).enumerate() {
            let det = m.det();
            if !m.is_unimodular() {
                out.push(BlockViolation::NotUnimodular {
                    generator: name.clone(),
                    det,
                });
            } else if det.is_one() == surface.generator_reverses(i) {
                out.push(BlockViolation::OrientationCharacter {
                    generator: name.clone(),
                    det,
                });
            }
        }
    }
    if block.labels.len() != surface.boundary_count as usize {
        out.push(BlockViolation::LabelCount {
            expected: surface.boundary_count as usize,
            found: block.labels.len(),
        });
    }
    for (i, l) in block.labels.iter().enumerate() {
        if block.labels[..i].contains(l) {
            out.push(BlockViolation::DuplicateLabel(l.clone()));
        }
    }
    out
}

pub fn boundary_monodromies(block: &Block) -> Vec<(String, Mat2)> {
    block.labelled_boundary_monodromies()
}
