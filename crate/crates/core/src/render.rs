//! Text and SVG lattice diagrams.
//!
//! ASCII legend: `X`/`Y`/`Z` single allowed letter, `+` for {X,Z}, `*` for {X,Y,Z},
//! `.` noiseless qubit, `S` special qubit, `@` plaquette at −1, `-`/`|` Z/X plaquettes.

use std::fmt::Write as _;

use crate::compile::{Cell, CompiledInstance};
use crate::decoders::DecodingInstance;
use crate::gadget;
use crate::lattice::{RotatedLayout, StabKind, SyndromeVector};
use crate::noise::NoiseModel;
use crate::pauli::{Letter, LetterSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Ascii,
    Svg,
}

impl std::str::FromStr for RenderFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "ascii" => Ok(RenderFormat::Ascii),
            "svg" => Ok(RenderFormat::Svg),
            _ => Err(crate::Error::InvalidParameter(format!("unknown render format `{s}`"))),
        }
    }
}

struct GadgetBox {
    label: String,
    anchor: Cell,
    width: i64,
    height: i64,
}

struct Scene<'a> {
    layout: &'a RotatedLayout,
    noise: &'a NoiseModel,
    syndrome: &'a SyndromeVector,
    special: Option<Cell>,
    boxes: Vec<GadgetBox>,
}

pub fn render(inst: &CompiledInstance, format: RenderFormat) -> String {
    let boxes = inst
        .placements
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let dims = match inst.template_of(p) {
                Ok(t) => (t.width, t.height),
                Err(_) => gadget::template(p.kind, (p.param > 0).then_some(p.param))
                    .map(|t| (t.width, t.height))
                    .unwrap_or((1, 1)),
            };
            GadgetBox {
                label: format!("{}#{i}", p.kind.id()),
                anchor: p.anchor,
                width: dims.0 as i64,
                height: dims.1 as i64,
            }
        })
        .collect();
    let scene = Scene {
        layout: &inst.layout,
        noise: &inst.noise,
        syndrome: &inst.syndrome,
        special: inst.special_qubit,
        boxes,
    };
    draw(&scene, format)
}

pub fn render_decoding(inst: &DecodingInstance, format: RenderFormat) -> String {
    let scene = Scene { layout: &inst.layout, noise: &inst.noise, syndrome: &inst.syndrome, special: None, boxes: vec![] };
    draw(&scene, format)
}

fn draw(s: &Scene, format: RenderFormat) -> String {
    match format {
        RenderFormat::Ascii => ascii(s),
        RenderFormat::Svg => svg(s),
    }
}

fn qubit_glyph(ls: LetterSet) -> char {
    let ls = ls.nontrivial();
    match ls.len() {
        0 => '.',
        1 => ls.letters().next().unwrap().as_char(),
        2 if ls.contains(Letter::X) && ls.contains(Letter::Z) => '+',
        3 => '*',
        _ => '?',
    }
}

fn allowed(s: &Scene, q: usize) -> LetterSet {
    s.noise.allowed_letters(q).unwrap_or_default()
}

fn flipped(s: &Scene, c: i64, r: i64) -> bool {
    s.layout.generator_index(c, r).is_some_and(|g| s.syndrome.flipped.contains(&g))
}

fn ascii(s: &Scene) -> String {
    let (w, h) = (s.layout.width() as i64, s.layout.height() as i64);
    let mut out = String::new();
    writeln!(out, "lattice {w}x{h}, {} flipped", s.syndrome.flipped.len()).unwrap();
    for y in (0..=2 * h).rev() {
        let mut line = String::with_capacity(2 * w as usize + 1);
        for x in 0..=2 * w {
            let ch = if x % 2 == 1 && y % 2 == 1 {
                let (c, r) = ((x - 1) / 2, (y - 1) / 2);
                if s.special == Some((c, r)) {
                    'S'
                } else {
                    qubit_glyph(allowed(s, s.layout.qubit_index(c, r).unwrap()))
                }
            } else if x % 2 == 0 && y % 2 == 0 {
                let (c, r) = (x / 2 - 1, y / 2 - 1);
                match s.layout.plaquette_kind(c, r) {
                    _ if flipped(s, c, r) => '@',
                    Some(StabKind::Z) => '-',
                    Some(StabKind::X) => '|',
                    None => ' ',
                }
            } else {
                ' '
            };
            line.push(ch);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for b in &s.boxes {
        writeln!(out, "{} at {},{} size {}x{}", b.label, b.anchor.0, b.anchor.1, b.width, b.height).unwrap();
    }
    out
}

const UNIT: i64 = 24;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn svg(s: &Scene) -> String {
    let (w, h) = (s.layout.width() as i64, s.layout.height() as i64);
    // qubit (c, r) sits at ((c + 1)·U, (h − r)·U), row 0 at the bottom
    let px = |c: i64| (c + 1) * UNIT;
    let py = |r: i64| (h - r) * UNIT;
    let (vw, vh) = ((w + 1) * UNIT, (h + 1) * UNIT);
    let mut out = String::new();
    writeln!(out, r##"<?xml version="1.0" encoding="UTF-8"?>"##).unwrap();
    writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{vw}" height="{vh}" viewBox="0 0 {vw} {vh}">"##
    )
    .unwrap();
    out.push_str("<g id=\"plaquettes\">\n");
    for r in -1..h {
        for c in -1..w {
            let Some(kind) = s.layout.plaquette_kind(c, r) else { continue };
            let fill = match kind {
                StabKind::Z => "#cfe0f5",
                StabKind::X => "#f5d3cf",
            };
            // boundary plaquettes are drawn as half-width strips
            let (x0, y0) = (px(c).max(px(0) - UNIT / 2), py(r + 1).max(py(h - 1) - UNIT / 2));
            let (x1, y1) = (px(c + 1).min(px(w - 1) + UNIT / 2), py(r).min(py(0) + UNIT / 2));
            writeln!(
                out,
                r##"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="{fill}" stroke="#888" stroke-width="0.5"/>"##,
                x1 - x0,
                y1 - y0
            )
            .unwrap();
            if flipped(s, c, r) {
                writeln!(
                    out,
                    r##"<circle cx="{}" cy="{}" r="{}" fill="#222" class="syndrome"/>"##,
                    px(c) + UNIT / 2,
                    py(r) - UNIT / 2,
                    UNIT / 5
                )
                .unwrap();
            }
        }
    }
    out.push_str("</g>\n<g id=\"qubits\">\n");
    for q in 0..s.layout.num_qubits() {
        let (c, r) = s.layout.coords(q);
        let ls = allowed(s, q).nontrivial();
        let special = s.special == Some((c, r));
        let (fill, radius) = if special {
            ("#ffd24a", UNIT / 3)
        } else if ls.is_empty() {
            ("#ffffff", UNIT / 8)
        } else {
            ("#ffffff", UNIT / 3)
        };
        writeln!(
            out,
            r##"<circle cx="{}" cy="{}" r="{radius}" fill="{fill}" stroke="#333" stroke-width="0.8"/>"##,
            px(c),
            py(r)
        )
        .unwrap();
        if !ls.is_empty() {
            writeln!(
                out,
                r##"<text x="{}" y="{}" font-size="{}" text-anchor="middle" font-family="monospace">{}</text>"##,
                px(c),
                py(r) + UNIT / 8,
                UNIT / 3,
                escape(&ls.to_string())
            )
            .unwrap();
        }
    }
    out.push_str("</g>\n<g id=\"gadgets\">\n");
    for b in &s.boxes {
        let x0 = px(b.anchor.0) - UNIT / 2;
        let y0 = py(b.anchor.1 + b.height - 1) - UNIT / 2;
        writeln!(
            out,
            r##"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="#2a7" stroke-dasharray="4 2"/>"##,
            b.width * UNIT,
            b.height * UNIT
        )
        .unwrap();
        writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="{}" font-family="monospace" fill="#2a7">{}</text>"##,
            x0 + 2,
            y0 + UNIT / 3,
            UNIT / 3,
            escape(&b.label)
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile_formula, CompileMode};
    use crate::formula::parse_expression;
    use crate::gadget::GadgetKind;

    fn empty(w: usize, h: usize) -> DecodingInstance {
        let layout = RotatedLayout::new(w, h).unwrap();
        let noise = NoiseModel::new(layout.num_qubits());
        DecodingInstance::new(layout, noise, SyndromeVector::default()).unwrap()
    }

    #[test]
    fn empty_grid_has_no_letters() {
        let text = render_decoding(&empty(3, 3), RenderFormat::Ascii);
        let grid: String = text.lines().skip(1).collect();
        assert!(!grid.chars().any(|c| c.is_ascii_alphabetic()));
        assert_eq!(grid.chars().filter(|&c| c == '.').count(), 9);
        assert_eq!(text.lines().count(), 1 + 7);
    }

    #[test]
    fn variable_region_is_one_x_column() {
        let inst = compile_formula(&parse_expression("x1").unwrap(), CompileMode::qmld_default()).unwrap();
        let text = render(&inst, RenderFormat::Ascii);
        let rows: Vec<Vec<char>> = text.lines().skip(1).take(2 * inst.layout.height() + 1).map(|l| l.chars().collect()).collect();
        let top = rows.len() as i64 - 1;
        let glyph = |c: i64, r: i64| rows[(top - (2 * r + 1)) as usize].get((2 * c + 1) as usize).copied().unwrap_or(' ');
        let p = inst.placements.iter().find(|p| p.kind == GadgetKind::Variable).unwrap();
        let t = inst.template_of(p).unwrap();
        let cols: std::collections::BTreeSet<i64> = t.noise.keys().map(|k| k.0).collect();
        assert_eq!(cols.len(), 1);
        for &(c, r) in t.noise.keys() {
            assert_eq!(glyph(p.anchor.0 + c, p.anchor.1 + r), 'X');
        }
        assert!(text.contains("VARIABLE#"));
    }
}
