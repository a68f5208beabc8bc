//! Line-oriented triple files.
//!
//! ```text
//! [group]
//! base = Z                        # Z, Z/n, comma lists, omega(...)
//! top = Z
//!
//! [subgroup]
//! y = 2                           # generators of Y, one per line
//! window <r> = <k>                # countable direct sums only
//! sum <r> = <belem>               # generators of S_r; none means S_r = 0
//!
//! [endomorphism]
//! y <x> -> <x>                    # f on each Y generator
//! sum <r> <belem> -> base{...}    # f on each S_r generator placed at r
//! tail <r> -> shift <s> at <x>
//! diff <r> <coord> <y> -> base{...}
//!
//! [transversal]
//! <element>                       # one per line, identity first
//!
//! [generators]
//! <name> = <element>
//! ```
//!
//! `#` starts a comment. Element literals may use generator names defined
//! earlier in the `[generators]` section.

use super::{DiffSpec, ResidueSpec, SimilarityError, Tail, TripleSpec};
use crate::abelian::{AbelianDescriptor, AbelianElement};
use crate::literal::{
    format_abelian, format_base, format_element, format_x, parse_abelian_descriptor,
    parse_abelian_prefix, parse_base, parse_element_with, parse_x, parse_x_descriptor,
    parse_x_prefix, LiteralError,
};
use crate::wreath::{BaseMap, GroupDescriptor, WreathElement, XDescriptor, XElement};

struct Line<'a> {
    no: usize,
    text: &'a str,
}

fn err(no: usize, message: impl Into<String>) -> SimilarityError {
    SimilarityError::Config {
        line: no,
        message: message.into(),
    }
}

fn lit(no: usize) -> impl Fn(LiteralError) -> SimilarityError {
    move |e| err(no, e.to_string())
}

fn split_once<'a>(no: usize, s: &'a str, sep: &str) -> Result<(&'a str, &'a str), SimilarityError> {
    s.split_once(sep)
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| err(no, format!("expected '{}'", sep)))
}

fn x_then_rest<'a>(
    no: usize,
    xd: &XDescriptor,
    s: &'a str,
) -> Result<(XElement, &'a str), SimilarityError> {
    let (x, used) = parse_x_prefix(xd, s).map_err(lit(no))?;
    Ok((x, s[used..].trim()))
}

fn residue_slot<'a>(residues: &'a mut Vec<ResidueSpec>, r: &XElement) -> &'a mut ResidueSpec {
    let i = match residues.iter().position(|s| s.residue == *r) {
        Some(i) => i,
        None => {
            residues.push(ResidueSpec {
                residue: r.clone(),
                window: None,
                generators: Vec::new(),
                images: Vec::new(),
                tail: None,
            });
            residues.len() - 1
        }
    };
    &mut residues[i]
}

pub fn parse_config(text: &str) -> Result<TripleSpec, SimilarityError> {
    let mut sections: Vec<(String, Vec<Line<'_>>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !["group", "subgroup", "endomorphism", "transversal", "generators"].contains(&name.as_str()) {
                return Err(err(no, format!("unknown section [{}]", name)));
            }
            if sections.iter().any(|(n, _)| *n == name) {
                return Err(err(no, format!("section [{}] repeated", name)));
            }
            sections.push((name, Vec::new()));
            continue;
        }
        match sections.last_mut() {
            Some((_, lines)) => lines.push(Line { no, text: line }),
            None => return Err(err(no, "content before the first section")),
        }
    }
    let section = |name: &str| -> &[Line<'_>] {
        sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, l)| l.as_slice())
            .unwrap_or(&[])
    };

    let mut base = None;
    let mut top = None;
    for l in section("group") {
        let (key, value) = split_once(l.no, l.text, "=")?;
        match key {
            "base" => base = Some(parse_abelian_descriptor(value).map_err(lit(l.no))?),
            "top" => top = Some(parse_x_descriptor(value).map_err(lit(l.no))?),
            _ => return Err(err(l.no, format!("unknown group key '{}'", key))),
        }
    }
    let (base, top): (AbelianDescriptor, XDescriptor) = match (base, top) {
        (Some(b), Some(t)) => (b, t),
        _ => return Err(err(0, "[group] needs 'base' and 'top'")),
    };
    let d = GroupDescriptor::new(base, top);
    let xd = d.top_group().clone();
    let bd = d.base_group().clone();

    let mut generators: Vec<(String, WreathElement)> = Vec::new();
    for l in section("generators") {
        let (name, value) = split_once(l.no, l.text, "=")?;
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(err(l.no, format!("bad generator name '{}'", name)));
        }
        if generators.iter().any(|(n, _)| n == name) {
            return Err(err(l.no, format!("generator '{}' defined twice", name)));
        }
        let g = parse_element_with(&d, &generators, value).map_err(lit(l.no))?;
        generators.push((name.to_string(), g));
    }

    let mut y_generators = Vec::new();
    let mut residues: Vec<ResidueSpec> = Vec::new();
    for l in section("subgroup") {
        let (head, value) = split_once(l.no, l.text, "=")?;
        let (kw, arg) = head.split_once(char::is_whitespace).unwrap_or((head, ""));
        match kw {
            "y" if arg.is_empty() => y_generators.push(parse_x(&xd, value).map_err(lit(l.no))?),
            "sum" => {
                let r = parse_x(&xd, arg.trim()).map_err(lit(l.no))?;
                let g = crate::literal::parse_abelian(&bd, value).map_err(lit(l.no))?;
                residue_slot(&mut residues, &r).generators.push(g);
            }
            "window" => {
                let r = parse_x(&xd, arg.trim()).map_err(lit(l.no))?;
                let k: usize = value
                    .parse()
                    .map_err(|_| err(l.no, "window must be a nonnegative integer"))?;
                residue_slot(&mut residues, &r).window = Some(k);
            }
            _ => return Err(err(l.no, format!("unknown subgroup line '{}'", l.text))),
        }
    }

    let mut y_images: Vec<Option<XElement>> = vec![None; y_generators.len()];
    let mut images: Vec<Vec<Option<BaseMap>>> =
        residues.iter().map(|r| vec![None; r.generators.len()]).collect();
    let mut diffs = Vec::new();
    for l in section("endomorphism") {
        let (lhs, rhs) = split_once(l.no, l.text, "->")?;
        let (kw, arg) = lhs.split_once(char::is_whitespace).unwrap_or((lhs, ""));
        let arg = arg.trim();
        match kw {
            "y" => {
                let y = parse_x(&xd, arg).map_err(lit(l.no))?;
                let i = y_generators
                    .iter()
                    .position(|g| *g == y)
                    .ok_or_else(|| err(l.no, format!("{} is not a Y generator", format_x(&y))))?;
                y_images[i] = Some(parse_x(&xd, rhs).map_err(lit(l.no))?);
            }
            "sum" => {
                let (r, rest) = x_then_rest(l.no, &xd, arg)?;
                let (g, used) = parse_abelian_prefix(&bd, rest).map_err(lit(l.no))?;
                if !rest[used..].trim().is_empty() {
                    return Err(err(l.no, "unexpected text after the generator"));
                }
                let ri = residues
                    .iter()
                    .position(|s| s.residue == r)
                    .ok_or_else(|| err(l.no, format!("residue {} has no generators", format_x(&r))))?;
                let gi = residues[ri]
                    .generators
                    .iter()
                    .enumerate()
                    .position(|(j, s)| *s == g && images[ri][j].is_none())
                    .ok_or_else(|| err(l.no, "not an unassigned generator of this residue"))?;
                images[ri][gi] = Some(parse_base(&d, rhs).map_err(lit(l.no))?);
            }
            "tail" => {
                let r = parse_x(&xd, arg).map_err(lit(l.no))?;
                let rest = rhs
                    .strip_prefix("shift")
                    .ok_or_else(|| err(l.no, "expected 'shift <s> at <x>'"))?;
                let (s, target) = split_once(l.no, rest, " at ")?;
                let shift: i64 = s.parse().map_err(|_| err(l.no, "bad shift"))?;
                let target = parse_x(&xd, target).map_err(lit(l.no))?;
                let slot = residues
                    .iter_mut()
                    .find(|s| s.residue == r)
                    .ok_or_else(|| err(l.no, format!("residue {} has no window", format_x(&r))))?;
                slot.tail = Some(Tail { shift, target });
            }
            "diff" => {
                let (r, rest) = x_then_rest(l.no, &xd, arg)?;
                let (coord, rest) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err(l.no, "expected 'diff <r> <coord> <y>'"))?;
                let coord: usize = coord.parse().map_err(|_| err(l.no, "bad coordinate"))?;
                let y = parse_x(&xd, rest.trim()).map_err(lit(l.no))?;
                let image = parse_base(&d, rhs).map_err(lit(l.no))?;
                diffs.push(DiffSpec {
                    residue: r,
                    coord,
                    y,
                    image,
                });
            }
            _ => return Err(err(l.no, format!("unknown endomorphism line '{}'", l.text))),
        }
    }
    let y_images = y_images
        .into_iter()
        .zip(&y_generators)
        .map(|(img, y)| img.ok_or_else(|| err(0, format!("no image for Y generator {}", format_x(y)))))
        .collect::<Result<Vec<_>, _>>()?;
    for (slot, imgs) in residues.iter_mut().zip(images) {
        for (g, img) in slot.generators.iter().zip(imgs) {
            let img = img.ok_or_else(|| {
                err(
                    0,
                    format!(
                        "no image for generator {} of residue {}",
                        format_abelian(&bd, g),
                        format_x(&slot.residue)
                    ),
                )
            })?;
            slot.images.push(img);
        }
    }

    let mut transversal = Vec::new();
    for l in section("transversal") {
        transversal.push(parse_element_with(&d, &generators, l.text).map_err(lit(l.no))?);
    }

    Ok(TripleSpec {
        group: d,
        y_generators,
        y_images,
        residues,
        diffs,
        transversal,
        generators,
    })
}

fn element_line(d: &GroupDescriptor, g: &WreathElement) -> String {
    format_element(d, g)
}

fn sum_generator(bd: &AbelianDescriptor, g: &AbelianElement) -> String {
    format_abelian(bd, g)
}

pub fn format_config(spec: &TripleSpec) -> String {
    let d = &spec.group;
    let bd = d.base_group();
    let mut out = String::new();
    out.push_str("[group]\n");
    out.push_str(&format!("base = {}\n", bd));
    out.push_str(&format!("top = {}\n", d.top_group().as_abelian()));

    out.push_str("\n[subgroup]\n");
    for y in &spec.y_generators {
        out.push_str(&format!("y = {}\n", format_x(y)));
    }
    for r in &spec.residues {
        if let Some(w) = r.window {
            out.push_str(&format!("window {} = {}\n", format_x(&r.residue), w));
        }
        for g in &r.generators {
            out.push_str(&format!("sum {} = {}\n", format_x(&r.residue), sum_generator(bd, g)));
        }
    }

    out.push_str("\n[endomorphism]\n");
    for (y, img) in spec.y_generators.iter().zip(&spec.y_images) {
        out.push_str(&format!("y {} -> {}\n", format_x(y), format_x(img)));
    }
    for r in &spec.residues {
        for (g, img) in r.generators.iter().zip(&r.images) {
            out.push_str(&format!(
                "sum {} {} -> {}\n",
                format_x(&r.residue),
                sum_generator(bd, g),
                format_base(d, img)
            ));
        }
        if let Some(t) = &r.tail {
            out.push_str(&format!(
                "tail {} -> shift {} at {}\n",
                format_x(&r.residue),
                t.shift,
                format_x(&t.target)
            ));
        }
    }
    for df in &spec.diffs {
        out.push_str(&format!(
            "diff {} {} {} -> {}\n",
            format_x(&df.residue),
            df.coord,
            format_x(&df.y),
            format_base(d, &df.image)
        ));
    }

    out.push_str("\n[transversal]\n");
    for x in &spec.transversal {
        out.push_str(&element_line(d, x));
        out.push('\n');
    }

    out.push_str("\n[generators]\n");
    for (name, g) in &spec.generators {
        out.push_str(&format!("{} = {}\n", name, element_line(d, g)));
    }
    out
}
