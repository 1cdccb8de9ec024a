//! Line-oriented frame format.
//!
//! ```text
//! sort1: x0 x1
//! sortD: y0 y1          # `sort∂:` also accepted
//! I: (x0,y0) (x1,y1)
//! U: x1                 # or `U: all`
//! T: (y0|x0,y0)         # y T x v written (y|x,v)
//! R: (x0|x0,x1)
//! S: (y0|y1,x0)
//! class: LK            # optional tag
//! ```

use super::{FrameError, RelName, Relation, Sort, SortedFrame};
use crate::bitset::PointSet;

pub fn parse_frame(text: &str) -> Result<SortedFrame, FrameError> {
    let mut w1: Option<Vec<String>> = None;
    let mut wd: Option<Vec<String>> = None;
    let mut lines: Vec<(usize, String, String)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| FrameError::Parse {
            line: ln + 1,
            msg: format!("expected `key: value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        match key {
            "sort1" => w1.get_or_insert_with(Vec::new).extend(value.split_whitespace().map(str::to_string)),
            "sortD" | "sort∂" => wd.get_or_insert_with(Vec::new).extend(value.split_whitespace().map(str::to_string)),
            "I" | "U" | "T" | "R" | "S" | "class" => lines.push((ln + 1, key.to_string(), value)),
            other => {
                return Err(FrameError::Parse { line: ln + 1, msg: format!("unknown key `{other}`") });
            }
        }
    }
    let w1 = w1.ok_or(FrameError::Parse { line: 0, msg: "missing `sort1:`".into() })?;
    let wd = wd.ok_or(FrameError::Parse { line: 0, msg: "missing `sortD:`".into() })?;
    let find = |sort: Sort, names: &[String], name: &str| {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| FrameError::UnknownPoint { sort, name: name.to_string() })
    };

    let mut inc = vec![PointSet::EMPTY; w1.len()];
    let mut u = None;
    let mut rels: Vec<Relation> = Vec::new();
    let mut tag = None;
    for (line, key, value) in &lines {
        let perr = |msg: String| FrameError::Parse { line: *line, msg };
        match key.as_str() {
            "I" => {
                for item in tuples(value).map_err(perr)? {
                    let parts: Vec<&str> = item.split(',').collect();
                    if parts.len() != 2 {
                        return Err(perr(format!("expected (x,y), got ({item})")));
                    }
                    let x = find(Sort::One, &w1, parts[0])?;
                    let y = find(Sort::D, &wd, parts[1])?;
                    inc[x].insert(y);
                }
            }
            "U" => {
                let set = if value == "all" {
                    PointSet::full(w1.len())
                } else {
                    value
                        .split_whitespace()
                        .map(|n| find(Sort::One, &w1, n))
                        .collect::<Result<PointSet, _>>()?
                };
                u = Some(set);
            }
            "class" => tag = Some(value.clone()),
            letter => {
                let name = match letter {
                    "T" => RelName::T,
                    "R" => RelName::R,
                    _ => RelName::S,
                };
                let (out, s1, s2) = name.signature();
                let names = |s: Sort| if s == Sort::One { &w1 } else { &wd };
                let mut rel = Relation::empty(name, names(s1).len(), names(s2).len());
                if let Some(existing) = rels.iter().position(|r| r.name() == name) {
                    rel = rels.remove(existing);
                }
                for item in tuples(value).map_err(perr)? {
                    let (o, args) = item
                        .split_once('|')
                        .ok_or_else(|| perr(format!("expected (out|a,b), got ({item})")))?;
                    let (a, b) = args.split_once(',').ok_or_else(|| perr(format!("expected (out|a,b), got ({item})")))?;
                    let o = find(out, names(out), o)?;
                    let a = find(s1, names(s1), a)?;
                    let b = find(s2, names(s2), b)?;
                    rel.insert(o, a, b);
                }
                rels.push(rel);
            }
        }
    }
    let mut frame = SortedFrame::new(w1, wd, inc)?;
    if let Some(u) = u {
        frame = frame.with_unit(u);
    }
    for rel in rels {
        frame = frame.with_relation(rel)?;
    }
    Ok(frame.with_class_tag(tag))
}

fn tuples(value: &str) -> Result<Vec<String>, String> {
    let compact: String = value.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or("missing `)`")?;
        out.push(body[..close].to_string());
        rest = &body[close + 1..];
    }
    Ok(out)
}

pub(super) fn render(frame: &SortedFrame) -> String {
    let mut out = String::new();
    out.push_str(&format!("sort1: {}\n", frame.names(Sort::One).join(" ")));
    out.push_str(&format!("sortD: {}\n", frame.names(Sort::D).join(" ")));
    let mut pairs = Vec::new();
    for x in 0..frame.size(Sort::One) {
        for y in frame.incidence_row(Sort::One, x).iter() {
            pairs.push(format!("({},{})", frame.name(Sort::One, x), frame.name(Sort::D, y)));
        }
    }
    out.push_str(&format!("I: {}\n", pairs.join(" ")));
    if let Some(u) = frame.unit_set() {
        let names: Vec<&str> = u.iter().map(|i| frame.name(Sort::One, i)).collect();
        out.push_str(&format!("U: {}\n", names.join(" ")).replace(" \n", "\n"));
    }
    for name in RelName::ALL {
        if let Some(rel) = frame.relation(name) {
            let (o, a, b) = name.signature();
            let items: Vec<String> = rel
                .tuples()
                .into_iter()
                .map(|(i, j, k)| format!("({}|{},{})", frame.name(o, i), frame.name(a, j), frame.name(b, k)))
                .collect();
            out.push_str(&format!("{}: {}\n", name.letter(), items.join(" ")).replace(" \n", "\n"));
        }
    }
    if let Some(tag) = frame.class_tag() {
        out.push_str(&format!("class: {tag}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "sort1: x0 x1\nsortD: y0\nI: (x1,y0)\nU: all\nT: (y0|x0,y0)\nR: (x0|x1,x1)\n";
        let f = parse_frame(text).unwrap();
        assert_eq!(f.unit_set(), Some(PointSet::full(2)));
        let again = parse_frame(&f.to_text()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn unknown_point() {
        let r = parse_frame("sort1: x0\nsortD: y0\nI: (x0,y9)\n");
        assert!(matches!(r, Err(FrameError::UnknownPoint { .. })));
    }

    #[test]
    fn unicode_sort_key() {
        let f = parse_frame("sort1: a\nsort∂: a\nI: (a,a)\n").unwrap();
        assert!(f.incident(0, 0));
    }
}
