//! Graphs, permutations and DIMACS file I/O.
//!
//! Vertices are `0..n` in the Rust API. The DIMACS text format (and the CLI)
//! use the conventional 1-based vertex numbers; the parser and serializer
//! translate at the boundary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::Error;

/// An undirected simple graph with optional vertex colors.
///
/// No self-loops, no duplicate edges. The adjacency structure is derived
/// from the edge set at construction and kept sorted, so neighbor queries
/// are binary searches and iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Normalized edge list: each pair `(u, v)` has `u < v`, sorted, deduped.
    edges: Vec<(u32, u32)>,
    /// CSR adjacency: neighbors of `v` are `adj[adj_off[v]..adj_off[v + 1]]`.
    adj_off: Vec<usize>,
    adj: Vec<u32>,
    /// Optional vertex colors (positive values); `None` means uncolored.
    colors: Option<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges are collapsed.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Graph, Error> {
        let mut list: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Parameter(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::Parameter(format!("self-loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Graph::from_normalized(n, list, None))
    }

    fn from_normalized(n: usize, edges: Vec<(u32, u32)>, colors: Option<Vec<u32>>) -> Graph {
        let mut deg = vec![0usize; n];
        for &(u, v) in &edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut adj_off = vec![0usize; n + 1];
        for v in 0..n {
            adj_off[v + 1] = adj_off[v] + deg[v];
        }
        let mut adj = vec![0u32; adj_off[n]];
        let mut cursor = adj_off.clone();
        for &(u, v) in &edges {
            adj[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            adj[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..n {
            adj[adj_off[v]..adj_off[v + 1]].sort_unstable();
        }
        Graph {
            n,
            edges,
            adj_off,
            adj,
            colors,
        }
    }

    /// Attaches vertex colors; `colors[v]` must be positive for every vertex.
    pub fn with_colors(mut self, colors: Vec<u32>) -> Result<Graph, Error> {
        if colors.len() != self.n {
            return Err(Error::SizeMismatch(format!(
                "{} colors for {} vertices",
                colors.len(),
                self.n
            )));
        }
        if colors.contains(&0) {
            return Err(Error::Parameter("vertex colors must be positive".into()));
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[self.adj_off[v as usize]..self.adj_off[v as usize + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj_off[v as usize + 1] - self.adj_off[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn colors(&self) -> Option<&[u32]> {
        self.colors.as_deref()
    }

    /// Relabels the graph: edge `{u, v}` becomes `{phi(u), phi(v)}` and
    /// colors travel with their vertices.
    pub fn apply_permutation(&self, phi: &Permutation) -> Result<Graph, Error> {
        if phi.len() != self.n {
            return Err(Error::SizeMismatch(format!(
                "permutation on {} points applied to graph on {} vertices",
                phi.len(),
                self.n
            )));
        }
        let mut edges: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (phi.apply(u), phi.apply(v));
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        let colors = self.colors.as_ref().map(|c| {
            let mut out = vec![0u32; self.n];
            for v in 0..self.n {
                out[phi.apply(v as u32) as usize] = c[v];
            }
            out
        });
        Ok(Graph::from_normalized(self.n, edges, colors))
    }

    /// Parses the DIMACS edge format.
    ///
    /// Accepted lines: `c` comments, exactly one `p edge <n> <m>` header,
    /// `e <u> <v>` edges (1-based, no self-loops, duplicates collapsed) and
    /// optional `n <v> <color>` vertex colors. Vertices without a color line
    /// default to color 1 when any color line is present.
    pub fn parse_dimacs(text: &str) -> Result<Graph, Error> {
        let mut n: Option<usize> = None;
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut colors: BTreeMap<u32, u32> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim_end_matches('\r');
            let mut fields = line.split_ascii_whitespace();
            let Some(kind) = fields.next() else { continue };
            match kind {
                "c" => continue,
                "p" => {
                    if n.is_some() {
                        return Err(Error::parse(lineno, "duplicate problem header"));
                    }
                    let format = fields.next();
                    if format != Some("edge") {
                        return Err(Error::parse(
                            lineno,
                            format!("expected 'p edge <n> <m>', got {line:?}"),
                        ));
                    }
                    let nv: usize = next_number(&mut fields, lineno, "vertex count")?;
                    let _m: usize = next_number(&mut fields, lineno, "edge count")?;
                    if fields.next().is_some() {
                        return Err(Error::parse(lineno, "trailing fields after header"));
                    }
                    n = Some(nv);
                }
                "e" => {
                    let n = n.ok_or_else(|| Error::parse(lineno, "edge before header"))?;
                    let u: usize = next_number(&mut fields, lineno, "edge endpoint")?;
                    let v: usize = next_number(&mut fields, lineno, "edge endpoint")?;
                    if fields.next().is_some() {
                        return Err(Error::parse(lineno, "trailing fields after edge"));
                    }
                    if u == 0 || v == 0 || u > n || v > n {
                        return Err(Error::parse(
                            lineno,
                            format!("vertex index out of range 1..={n}"),
                        ));
                    }
                    if u == v {
                        return Err(Error::parse(lineno, format!("self-loop at vertex {u}")));
                    }
                    let (u, v) = ((u - 1) as u32, (v - 1) as u32);
                    edges.push((u.min(v), u.max(v)));
                }
                "n" => {
                    let n = n.ok_or_else(|| Error::parse(lineno, "color line before header"))?;
                    let v: usize = next_number(&mut fields, lineno, "vertex index")?;
                    let color: u32 = next_number(&mut fields, lineno, "color")?;
                    if fields.next().is_some() {
                        return Err(Error::parse(lineno, "trailing fields after color line"));
                    }
                    if v == 0 || v > n {
                        return Err(Error::parse(
                            lineno,
                            format!("vertex index out of range 1..={n}"),
                        ));
                    }
                    if color == 0 {
                        return Err(Error::parse(lineno, "colors must be positive"));
                    }
                    if colors.insert((v - 1) as u32, color).is_some() {
                        return Err(Error::parse(
                            lineno,
                            format!("duplicate color for vertex {v}"),
                        ));
                    }
                }
                other => {
                    return Err(Error::parse(lineno, format!("unknown line type {other:?}")));
                }
            }
        }
        let n =
            n.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing 'p edge' header"))?;
        edges.sort_unstable();
        edges.dedup();
        let colors = if colors.is_empty() {
            None
        } else {
            let mut full = vec![1u32; n];
            for (v, c) in colors {
                full[v as usize] = c;
            }
            Some(full)
        };
        Ok(Graph::from_normalized(n, edges, colors))
    }

    /// Serializes to DIMACS: header, color lines sorted by vertex, then
    /// edges in lexicographic order. Output is deterministic byte-for-byte.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p edge {} {}", self.n, self.edges.len());
        if let Some(colors) = &self.colors {
            for (v, c) in colors.iter().enumerate() {
                let _ = writeln!(out, "n {} {}", v + 1, c);
            }
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }
}

fn next_number<T: std::str::FromStr>(
    fields: &mut std::str::SplitAsciiWhitespace<'_>,
    lineno: usize,
    what: &str,
) -> Result<T, Error> {
    let tok = fields
        .next()
        .ok_or_else(|| Error::parse(lineno, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(lineno, format!("invalid {what} {tok:?}")))
}

/// A bijection on `0..n`, stored as the image array `image[v] = phi(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation {
            image: (0..n as u32).collect(),
        }
    }

    /// Validates that `image` is a bijection on `0..image.len()`.
    pub fn from_images(image: Vec<u32>) -> Result<Permutation, Error> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x as usize >= n || seen[x as usize] {
                return Err(Error::Contract(format!(
                    "image array is not a bijection on 0..{n}"
                )));
            }
            seen[x as usize] = true;
        }
        Ok(Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn apply(&self, v: u32) -> u32 {
        self.image[v as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `compose(a, b)` maps `v` to `a(b(v))`.
    pub fn compose(&self, b: &Permutation) -> Result<Permutation, Error> {
        if self.len() != b.len() {
            return Err(Error::SizeMismatch(format!(
                "composing permutations on {} and {} points",
                self.len(),
                b.len()
            )));
        }
        Ok(Permutation {
            image: b.image.iter().map(|&x| self.image[x as usize]).collect(),
        })
    }

    pub fn invert(&self) -> Permutation {
        let mut image = vec![0u32; self.len()];
        for (v, &x) in self.image.iter().enumerate() {
            image[x as usize] = v as u32;
        }
        Permutation { image }
    }
}

/// True iff applying `phi` to `g1` yields exactly `g2`, colors included.
///
/// The witness direction is fixed by the identity
/// `is_isomorphism(g, g.apply_permutation(phi), phi) == true`.
pub fn is_isomorphism(g1: &Graph, g2: &Graph, phi: &Permutation) -> Result<bool, Error> {
    if g1.n() != g2.n() || phi.len() != g1.n() {
        return Err(Error::SizeMismatch(format!(
            "isomorphism check over sizes {}, {}, {}",
            g1.n(),
            g2.n(),
            phi.len()
        )));
    }
    if g1.edge_count() != g2.edge_count() {
        return Ok(false);
    }
    for &(u, v) in g1.edges() {
        if !g2.has_edge(phi.apply(u), phi.apply(v)) {
            return Ok(false);
        }
    }
    match (g1.colors(), g2.colors()) {
        (None, None) => {}
        (Some(c1), Some(c2)) => {
            for v in 0..g1.n() {
                if c1[v] != c2[phi.apply(v as u32) as usize] {
                    return Ok(false);
                }
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

/// True iff `phi` maps `g` onto itself.
pub fn is_automorphism(g: &Graph, phi: &Permutation) -> Result<bool, Error> {
    is_isomorphism(g, g, phi)
}
