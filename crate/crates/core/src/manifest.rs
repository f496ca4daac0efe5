//! The line-oriented `.gm` format.
//!
//! ```text
//! version 1
//! block A
//!   surface orientable 0 3
//!   boundaries p q r
//!   image c1 [[1,1],[0,1]]
//!   image c2 [[1,0],[0,1]]
//! glue A.p B.p
//!   x (1,0,0)
//!   y (0,1,0)
//!   t (0,0,-1)
//! ```
//!
//! `#` starts a comment. `boundaries` is optional and defaults to `d1 … dn`.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::assembly::{validate_structure, Edge, Endpoint, GraphStructure, StructureViolation};
use crate::bundles::{Block, BoundaryIso, Pi1Element, SurfaceWithBoundary};
use crate::gl2z::Mat2;

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ManifestError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ManifestError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecl {
    pub label: String,
    pub surface: SurfaceWithBoundary,
    pub boundaries: Vec<String>,
    /// Images in generator order.
    pub images: Vec<Mat2>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueDecl {
    pub source: Endpoint,
    pub target: Endpoint,
    pub x: Pi1Element,
    pub y: Pi1Element,
    pub t: Pi1Element,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub version: u32,
    pub blocks: Vec<BlockDecl>,
    pub glues: Vec<GlueDecl>,
}

/// A line split into whitespace-separated tokens with 1-based columns.
struct Line<'a> {
    number: usize,
    text: &'a str,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn new(number: usize, raw: &'a str) -> Self {
        let text = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    tokens.push((s, &text[s..i]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            tokens.push((s, &text[s..]));
        }
        Line {
            number,
            text,
            tokens,
        }
    }

    fn column(&self, byte: usize) -> usize {
        self.text[..byte].chars().count() + 1
    }

    fn err(&self, token: usize, message: impl Into<String>) -> ManifestError {
        let col = self
            .tokens
            .get(token)
            .map_or(self.text.chars().count() + 1, |&(b, _)| self.column(b));
        ManifestError::at(self.number, col, message)
    }

    /// Everything from token `i` to the end of the line.
    fn rest(&self, i: usize) -> Option<&'a str> {
        self.tokens.get(i).map(|&(b, _)| self.text[b..].trim_end())
    }

    fn arity(&self, expected: usize) -> Result<(), ManifestError> {
        if self.tokens.len() == expected {
            Ok(())
        } else {
            let at = self.tokens.len().min(expected);
            Err(self.err(
                at,
                format!(
                    "`{}` takes {} argument(s), found {}",
                    self.tokens[0].1,
                    expected - 1,
                    self.tokens.len() - 1
                ),
            ))
        }
    }
}

struct PendingBlock {
    label: String,
    line: usize,
    surface: Option<(SurfaceWithBoundary, usize)>,
    boundaries: Option<(Vec<String>, usize)>,
    images: Vec<(String, Mat2, usize, usize)>,
}

struct PendingGlue {
    source: Endpoint,
    target: Endpoint,
    line: usize,
    x: Option<Pi1Element>,
    y: Option<Pi1Element>,
    t: Option<Pi1Element>,
}

enum Section {
    None,
    Block(Box<PendingBlock>),
    Glue(Box<PendingGlue>),
}

pub fn parse(text: &str) -> Result<Manifest, ManifestError> {
    let mut version = None;
    let mut blocks = Vec::new();
    let mut glues = Vec::new();
    let mut section = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let line = Line::new(i + 1, raw);
        let Some(&(_, keyword)) = line.tokens.first() else {
            continue;
        };
        if version.is_none() {
            if keyword != "version" {
                return Err(line.err(0, "expected `version 1` first"));
            }
            line.arity(2)?;
            let v: u32 = line.tokens[1]
                .1
                .parse()
                .map_err(|_| line.err(1, "version must be an integer"))?;
            if v != VERSION {
                return Err(line.err(1, format!("unsupported version {v}")));
            }
            version = Some(v);
            continue;
        }
        match keyword {
            "block" | "glue" => {
                finish(
                    std::mem::replace(&mut section, Section::None),
                    &mut blocks,
                    &mut glues,
                )?;
                line.arity(if keyword == "block" { 2 } else { 3 })?;
                section = if keyword == "block" {
                    Section::Block(Box::new(PendingBlock {
                        label: line.tokens[1].1.to_string(),
                        line: line.number,
                        surface: None,
                        boundaries: None,
                        images: Vec::new(),
                    }))
                } else {
                    Section::Glue(Box::new(PendingGlue {
                        source: parse_endpoint(&line, 1)?,
                        target: parse_endpoint(&line, 2)?,
                        line: line.number,
                        x: None,
                        y: None,
                        t: None,
                    }))
                };
            }
            "surface" | "boundaries" | "image" => {
                let Section::Block(b) = &mut section else {
                    return Err(line.err(0, format!("`{keyword}` outside a block section")));
                };
                block_line(b, &line, keyword)?;
            }
            "x" | "y" | "t" => {
                let Section::Glue(g) = &mut section else {
                    return Err(line.err(0, format!("`{keyword}` outside a glue section")));
                };
                let value: Pi1Element = line
                    .rest(1)
                    .ok_or_else(|| line.err(1, format!("`{keyword}` needs an image (a,b,k)")))?
                    .parse()
                    .map_err(|e: String| line.err(1, e))?;
                let slot = match keyword {
                    "x" => &mut g.x,
                    "y" => &mut g.y,
                    _ => &mut g.t,
                };
                if slot.replace(value).is_some() {
                    return Err(line.err(0, format!("duplicate image of {keyword}")));
                }
            }
            other => return Err(line.err(0, format!("unknown keyword `{other}`"))),
        }
    }
    let Some(version) = version else {
        return Err(ManifestError::at(
            1,
            1,
            "empty manifest: expected `version 1`",
        ));
    };
    finish(section, &mut blocks, &mut glues)?;
    Ok(Manifest {
        version,
        blocks,
        glues,
    })
}

fn parse_endpoint(line: &Line, i: usize) -> Result<Endpoint, ManifestError> {
    let tok = line.tokens[i].1;
    match tok.split_once('.') {
        Some((b, l)) if !b.is_empty() && !l.is_empty() => Ok(Endpoint::new(b, l)),
        _ => Err(line.err(i, format!("expected <block>.<boundary>, found `{tok}`"))),
    }
}

fn block_line(b: &mut PendingBlock, line: &Line, keyword: &str) -> Result<(), ManifestError> {
    match keyword {
        "surface" => {
            line.arity(4)?;
            let orientable = match line.tokens[1].1 {
                "orientable" => true,
                "non-orientable" => false,
                other => {
                    return Err(line.err(
                        1,
                        format!("expected `orientable` or `non-orientable`, found `{other}`"),
                    ))
                }
            };
            let num = |i: usize| -> Result<u32, ManifestError> {
                line.tokens[i]
                    .1
                    .parse()
                    .map_err(|_| line.err(i, "expected a non-negative integer"))
            };
            let surface = SurfaceWithBoundary {
                orientable,
                genus: num(2)?,
                boundary_count: num(3)?,
            };
            if b.surface.replace((surface, line.number)).is_some() {
                return Err(line.err(0, "duplicate surface"));
            }
        }
        "boundaries" => {
            let labels = line.tokens[1..]
                .iter()
                .map(|(_, t)| t.to_string())
                .collect();
            if b.boundaries.replace((labels, line.number)).is_some() {
                return Err(line.err(0, "duplicate boundaries"));
            }
        }
        _ => {
            if line.tokens.len() < 3 {
                return Err(line.err(
                    line.tokens.len(),
                    "expected `image <generator> [[a,b],[c,d]]`",
                ));
            }
            let m: Mat2 = line
                .rest(2)
                .expect("checked length")
                .parse()
                .map_err(|e: String| line.err(2, e))?;
            if !m.is_unimodular() {
                return Err(line.err(2, format!("determinant {}, not unimodular", m.det())));
            }
            b.images.push((
                line.tokens[1].1.to_string(),
                m,
                line.number,
                line.column(line.tokens[1].0),
            ));
        }
    }
    Ok(())
}

fn finish(
    section: Section,
    blocks: &mut Vec<BlockDecl>,
    glues: &mut Vec<GlueDecl>,
) -> Result<(), ManifestError> {
    match section {
        Section::None => {}
        Section::Block(b) => {
            let Some((surface, surface_line)) = b.surface else {
                return Err(ManifestError::at(
                    b.line,
                    1,
                    format!("block {} has no surface", b.label),
                ));
            };
            let names = surface.generator_names();
            let mut images: Vec<Option<Mat2>> = vec![None; names.len()];
            for (name, m, line, col) in b.images {
                let Some(i) = names.iter().position(|n| *n == name) else {
                    return Err(ManifestError::at(
                        line,
                        col,
                        format!(
                            "unknown generator label `{name}` for surface {surface} (generators: {})",
                            names.join(" ")
                        ),
                    ));
                };
                if images[i].replace(m).is_some() {
                    return Err(ManifestError::at(
                        line,
                        col,
                        format!("duplicate image of {name}"),
                    ));
                }
            }
            if let Some(i) = images.iter().position(Option::is_none) {
                return Err(ManifestError::at(
                    surface_line,
                    1,
                    format!(
                        "arity mismatch: surface {surface} has {} generators, image of {} missing",
                        names.len(),
                        names[i]
                    ),
                ));
            }
            let boundaries = match b.boundaries {
                Some((labels, line)) => {
                    if labels.len() != surface.boundary_count as usize {
                        return Err(ManifestError::at(
                            line,
                            1,
                            format!(
                                "arity mismatch: surface has {} boundary components, {} labels given",
                                surface.boundary_count,
                                labels.len()
                            ),
                        ));
                    }
                    labels
                }
                None => (1..=surface.boundary_count)
                    .map(|i| format!("d{i}"))
                    .collect(),
            };
            blocks.push(BlockDecl {
                label: b.label,
                surface,
                boundaries,
                images: images.into_iter().map(|m| m.expect("checked")).collect(),
                line: b.line,
            });
        }
        Section::Glue(g) => {
            let missing = [("x", &g.x), ("y", &g.y), ("t", &g.t)]
                .into_iter()
                .find(|(_, v)| v.is_none());
            if let Some((name, _)) = missing {
                return Err(ManifestError::at(
                    g.line,
                    1,
                    format!("glue has no image of {name}"),
                ));
            }
            glues.push(GlueDecl {
                source: g.source,
                target: g.target,
                x: g.x.expect("checked"),
                y: g.y.expect("checked"),
                t: g.t.expect("checked"),
                line: g.line,
            });
        }
    }
    Ok(())
}

impl Manifest {
    /// Builds and validates the structure; errors are located at the
    /// declaration they concern.
    pub fn to_structure(&self) -> Result<GraphStructure, Vec<ManifestError>> {
        let blocks: Vec<Block> = self
            .blocks
            .iter()
            .map(|d| {
                Block::new(d.label.clone(), d.surface.clone(), d.images.clone())
                    .with_labels(d.boundaries.clone())
            })
            .collect();
        let partial = GraphStructure {
            blocks,
            edges: Vec::new(),
        };
        let mut errors = Vec::new();
        let mut edges = Vec::new();
        for g in &self.glues {
            let mut bundles = Vec::new();
            for end in [&g.source, &g.target] {
                match partial.locate(end) {
                    Some((b, k)) => bundles.push(partial.blocks[b].boundary_bundle(k)),
                    None => errors.push(ManifestError::at(
                        g.line,
                        1,
                        StructureViolation::UnknownEndpoint(end.clone()).to_string(),
                    )),
                }
            }
            if let [s, t] = &bundles[..] {
                edges.push(Edge {
                    source: g.source.clone(),
                    target: g.target.clone(),
                    iso: BoundaryIso::new(
                        s.clone(),
                        t.clone(),
                        g.x.clone(),
                        g.y.clone(),
                        g.t.clone(),
                    ),
                });
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        let gs = GraphStructure {
            blocks: partial.blocks,
            edges,
        };
        let errors: Vec<ManifestError> = validate_structure(&gs)
            .into_iter()
            .map(|v| {
                let line = match &v {
                    StructureViolation::Block { block, .. }
                    | StructureViolation::DuplicateBlock(block) => self.block_line(block),
                    StructureViolation::OpenBoundary(e)
                    | StructureViolation::UnknownEndpoint(e) => self.block_line(&e.block),
                    StructureViolation::BoundaryReused(e) => self
                        .glues
                        .iter()
                        .filter(|g| g.source == *e || g.target == *e)
                        .nth(1)
                        .map_or(1, |g| g.line),
                    StructureViolation::GlueingMismatch { edge, .. }
                    | StructureViolation::Glueing { edge, .. }
                    | StructureViolation::OrientationPreserving { edge } => self.glues[*edge].line,
                    StructureViolation::Disconnected | StructureViolation::Empty => 1,
                };
                ManifestError::at(line, 1, v.to_string())
            })
            .collect();
        if errors.is_empty() {
            Ok(gs)
        } else {
            Err(errors)
        }
    }

    fn block_line(&self, label: &str) -> usize {
        self.blocks
            .iter()
            .find(|b| b.label == label)
            .map_or(1, |b| b.line)
    }

    /// Manifest of a structure, with declaration lines as they would be
    /// serialized.
    pub fn from_structure(gs: &GraphStructure) -> Manifest {
        let mut m = Manifest {
            version: VERSION,
            blocks: gs
                .blocks
                .iter()
                .map(|b| BlockDecl {
                    label: b.name.clone(),
                    surface: b.surface().clone(),
                    boundaries: b.labels.clone(),
                    images: b.rep.images.clone(),
                    line: 0,
                })
                .collect(),
            glues: gs
                .edges
                .iter()
                .map(|e| GlueDecl {
                    source: e.source.clone(),
                    target: e.target.clone(),
                    x: e.iso.x.clone(),
                    y: e.iso.y.clone(),
                    t: e.iso.t.clone(),
                    line: 0,
                })
                .collect(),
        };
        m.renumber();
        m
    }

    /// Sets declaration lines to their positions in the canonical text.
    fn renumber(&mut self) {
        let mut line = 1;
        for b in &mut self.blocks {
            line += 2;
            b.line = line;
            line += 2 + b.images.len();
        }
        for g in &mut self.glues {
            line += 2;
            g.line = line;
            line += 3;
        }
    }
}

/// Canonical text: two-space indentation, one blank line between sections,
/// images in generator order, no comments.
pub fn serialize(m: &Manifest) -> String {
    m.to_string()
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "version {}", self.version)?;
        for b in &self.blocks {
            writeln!(out)?;
            writeln!(out, "block {}", b.label)?;
            writeln!(out, "  surface {}", b.surface)?;
            writeln!(out, "  boundaries {}", b.boundaries.join(" "))?;
            for (name, m) in b.surface.generator_names().iter().zip(&b.images) {
                writeln!(out, "  image {name} {m}")?;
            }
        }
        for g in &self.glues {
            writeln!(out)?;
            writeln!(out, "glue {} {}", g.source, g.target)?;
            writeln!(out, "  x {}", g.x)?;
            writeln!(out, "  y {}", g.y)?;
            writeln!(out, "  t {}", g.t)?;
        }
        f.write_str(&out)
    }
}

/// Parses and validates in one step.
pub fn load(text: &str) -> Result<GraphStructure, Vec<ManifestError>> {
    parse(text).map_err(|e| vec![e])?.to_structure()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOUBLE: &str = "\
version 1
# two pants with trivial monodromy
block A
  surface orientable 0 3
  image c1 [[1,0],[0,1]]
  image c2 [[1,0],[0,1]]
block B
  surface orientable 0 3
  image c1 [[1,0],[0,1]]
  image c2 [[1,0],[0,1]]
glue A.d1 B.d1
  x (1,0,0)
  y (0,1,0)
  t (0,0,-1)
glue A.d2 B.d2
  x (1,0,0)
  y (0,1,0)
  t (0,0,-1)
glue A.d3 B.d3
  x (1,0,0)
  y (0,1,0)
  t (0,0,-1)
";

    #[test]
    fn minimal_double_validates() {
        let gs = load(DOUBLE).unwrap();
        assert_eq!(gs.blocks.len(), 2);
        assert_eq!(gs.edges.len(), 3);
    }

    #[test]
    fn round_trip_is_canonical() {
        let m = parse(DOUBLE).unwrap();
        let text = serialize(&m);
        let again = parse(&text).unwrap();
        assert_eq!(serialize(&again), text);
        assert_eq!(
            again,
            Manifest::from_structure(&again.to_structure().unwrap())
        );
    }

    #[test]
    fn singular_matrix_is_located() {
        let text = DOUBLE.replace(
            "image c2 [[1,0],[0,1]]\nblock B",
            "image c2 [[1,1],[1,1]]\nblock B",
        );
        let err = parse(&text).unwrap_err();
        assert_eq!((err.line, err.column), (6, 12));
        assert!(err.message.contains("determinant 0, not unimodular"));
    }

    #[test]
    fn dangling_endpoint() {
        let text = DOUBLE.replace("glue A.d3 B.d3", "glue A.d3 B.d9");
        let errs = load(&text).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| e.message.contains("unknown boundary label B.d9") && e.line == 19));
    }

    #[test]
    fn syntax_errors_are_located() {
        let err = parse("version 1\nblock A\n  surfce orientable 0 3\n").unwrap_err();
        assert_eq!((err.line, err.column), (3, 3));
        let err = parse("version 1\nglue A.p\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse("version 1\nblock A\n  surface orientable 0 3\n  image c7 [[1,0],[0,1]]\n")
            .unwrap_err();
        assert!(err.message.contains("unknown generator label"));
        assert_eq!((err.line, err.column), (4, 9));
    }
}
