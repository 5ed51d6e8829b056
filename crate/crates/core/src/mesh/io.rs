//! Plain-text mesh format.
//!
//! ```text
//! mesh 2d k=<degree>
//! nodes <N>
//! <x> <y>                      (N lines)
//! elements <E>
//! <i_0> ... <i_{n-1}>          (E lines, n = (k+1)(k+2)/2, 0-based)
//! boundary <B>
//! <element> <local_face> <tag> (B lines)
//! ```
//!
//! Tokens are separated by ASCII whitespace. Element nodes follow the
//! reference node order of [`crate::mesh::reference`]: corners, face nodes in
//! face direction, then interior nodes. Blank lines are allowed anywhere;
//! anything after the boundary block is an error.

use std::fmt::Write as _;
use std::path::Path;

use super::{Mesh, MeshError};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let toks: Vec<&str> = line.split_ascii_whitespace().collect();
            if !toks.is_empty() {
                return Some((i + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), MeshError> {
        self.next_content().ok_or_else(|| MeshError::Parse {
            line: 0,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn err(line: usize, msg: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, MeshError> {
    tok.parse()
        .map_err(|_| err(line, format!("cannot parse {tok:?} as a number")))
}

fn header_count(toks: &[&str], line: usize, keyword: &str) -> Result<usize, MeshError> {
    if toks.len() != 2 || toks[0] != keyword {
        return Err(err(line, format!("expected `{keyword} <count>`")));
    }
    parse_num(toks[1], line)
}

pub fn parse(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (ln, toks) = lines.expect("header")?;
    if toks.len() != 3 || toks[0] != "mesh" || toks[1] != "2d" || !toks[2].starts_with("k=") {
        return Err(err(ln, "expected `mesh 2d k=<degree>`"));
    }
    let k: usize = parse_num(&toks[2][2..], ln)?;
    if k == 0 {
        return Err(err(ln, "degree must be at least 1"));
    }
    let npe = (k + 1) * (k + 2) / 2;

    let (ln, toks) = lines.expect("nodes header")?;
    let n_nodes = header_count(&toks, ln, "nodes")?;
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, toks) = lines.expect("node coordinates")?;
        if toks.len() != 2 {
            return Err(err(ln, "expected `x y`"));
        }
        nodes.push([parse_num(toks[0], ln)?, parse_num(toks[1], ln)?]);
    }

    let (ln, toks) = lines.expect("elements header")?;
    let n_el = header_count(&toks, ln, "elements")?;
    let mut elements = Vec::with_capacity(n_el);
    for _ in 0..n_el {
        let (ln, toks) = lines.expect("element connectivity")?;
        if toks.len() != npe {
            return Err(err(ln, format!("expected {npe} node indices, found {}", toks.len())));
        }
        let el = toks
            .iter()
            .map(|t| {
                let i: usize = parse_num(t, ln)?;
                if i >= n_nodes {
                    Err(err(ln, format!("node index {i} out of range")))
                } else {
                    Ok(i)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        elements.push(el);
    }

    let (ln, toks) = lines.expect("boundary header")?;
    let n_b = header_count(&toks, ln, "boundary")?;
    let mut boundary = Vec::with_capacity(n_b);
    for _ in 0..n_b {
        let (ln, toks) = lines.expect("boundary face")?;
        if toks.len() != 3 {
            return Err(err(ln, "expected `element local_face tag`"));
        }
        let e: usize = parse_num(toks[0], ln)?;
        let f: usize = parse_num(toks[1], ln)?;
        if e >= n_el || f > 2 {
            return Err(err(ln, format!("boundary face ({e}, {f}) does not exist")));
        }
        boundary.push((e, f, toks[2].to_string()));
    }
    if let Some((ln, _)) = lines.next_content() {
        return Err(err(ln, "trailing content after boundary block"));
    }
    Mesh::new(k, nodes, elements, &boundary)
}

pub fn read(path: &Path) -> Result<Mesh, MeshError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(0, format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn write_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mesh 2d k={}", mesh.k);
    let _ = writeln!(s, "nodes {}", mesh.nodes.len());
    for x in &mesh.nodes {
        let _ = writeln!(s, "{:e} {:e}", x[0], x[1]);
    }
    let _ = writeln!(s, "elements {}", mesh.elements.len());
    for el in &mesh.elements {
        let line: Vec<String> = el.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    let b = mesh.boundary_list();
    let _ = writeln!(s, "boundary {}", b.len());
    for (e, f, t) in b {
        let _ = writeln!(s, "{e} {f} {t}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;

    const TWO: &str = "mesh 2d k=1
nodes 4
0 0
1 0
1 1
0 1
elements 2
0 1 2
0 2 3
boundary 4
0 0 bottom
0 1 right
1 1 top
1 2 left
";

    #[test]
    fn parses_two_triangles() {
        let mesh = parse(TWO).unwrap();
        assert_eq!(mesh.n_elements(), 2);
        assert_eq!(mesh.n_faces(), 5);
        assert_eq!(mesh.boundary_tags(), vec!["bottom", "right", "top", "left"]);
    }

    #[test]
    fn rejects_trailing_garbage_with_line_number() {
        let text = format!("{TWO}extra\n");
        match parse(&text) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_counts() {
        let text = TWO.replace("0 1 2\n", "0 1\n");
        assert!(matches!(parse(&text), Err(MeshError::Parse { line: 8, .. })));
        let text = TWO.replace("nodes 4", "nodes 5");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn write_then_parse_preserves_mesh() {
        let mesh = generate::unit_square(2, 3).unwrap();
        let back = parse(&write_string(&mesh)).unwrap();
        assert_eq!(back.elements, mesh.elements);
        assert_eq!(back.faces, mesh.faces);
        for (a, b) in back.nodes.iter().zip(&mesh.nodes) {
            assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
        }
    }
}
