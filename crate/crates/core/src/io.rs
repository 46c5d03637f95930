//! File formats for graphs and point clouds.
//!
//! Graph text format:
//!
//! ```text
//! n d p tau seed
//! 1            <- row 1: adjacency of vertex 1 to vertex 0
//! 01           <- row 2: adjacency of vertex 2 to vertices 0, 1
//! ...          <- rows 1..n-1, row i has exactly i characters
//! ```
//!
//! Graphs that do not come from a point cloud use `d = 0` and `nan` for `p`
//! and `tau`. Point clouds are little-endian: `M: u64`, `d: u64`, then `M·d`
//! `f64` coordinates in row-major order.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sphere::{GeometricGraph, SpherePointCloud};

/// A graph plus the header fields of its file.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: Graph,
    pub d: usize,
    pub p: f64,
    pub tau: f64,
    pub seed: u64,
}

impl GraphFile {
    pub fn plain(graph: Graph) -> Self {
        GraphFile {
            graph,
            d: 0,
            p: f64::NAN,
            tau: f64::NAN,
            seed: 0,
        }
    }
}

impl From<GeometricGraph> for GraphFile {
    fn from(g: GeometricGraph) -> Self {
        GraphFile {
            graph: g.graph,
            d: g.d,
            p: g.p,
            tau: g.tau,
            seed: g.seed,
        }
    }
}

pub fn write_graph<W: Write>(mut w: W, file: &GraphFile) -> Result<()> {
    let g = &file.graph;
    let n = g.n_vertices();
    writeln!(w, "{} {} {} {} {}", n, file.d, file.p, file.tau, file.seed)?;
    let mut line = String::with_capacity(n);
    for i in 1..n {
        line.clear();
        line.extend((0..i).map(|j| if g.has_edge(i, j) { '1' } else { '0' }));
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_graph<R: BufRead>(r: R) -> Result<GraphFile> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty graph file".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(Error::Parse(format!(
            "graph header needs `n d p tau seed`, got {header:?}"
        )));
    }
    let n: usize = parse_field(fields[0], "n")?;
    let d: usize = parse_field(fields[1], "d")?;
    let p: f64 = parse_field(fields[2], "p")?;
    let tau: f64 = parse_field(fields[3], "tau")?;
    let seed: u64 = parse_field(fields[4], "seed")?;
    let mut graph = Graph::empty(n);
    for i in 1..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing adjacency row {i}")))??;
        let row = line.trim_end();
        if row.len() != i {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {i}",
                row.len()
            )));
        }
        for (j, c) in row.bytes().enumerate() {
            match c {
                b'1' => graph.add_edge(i, j),
                b'0' => {}
                _ => return Err(Error::Parse(format!("row {i}: bad character {:?}", c as char))),
            }
        }
    }
    Ok(GraphFile {
        graph,
        d,
        p,
        tau,
        seed,
    })
}

fn parse_field<T: std::str::FromStr>(s: &str, name: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {name} from {s:?}")))
}

pub fn write_cloud<W: Write>(mut w: W, cloud: &SpherePointCloud) -> Result<()> {
    w.write_all(&(cloud.len() as u64).to_le_bytes())?;
    w.write_all(&(cloud.dim() as u64).to_le_bytes())?;
    for x in cloud.as_slice() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a point cloud; the seed is not stored in the file and is supplied here.
pub fn read_cloud<R: Read>(mut r: R, seed: u64) -> Result<SpherePointCloud> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let m = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let d = u64::from_le_bytes(word) as usize;
    let mut points = Vec::with_capacity(m.saturating_mul(d).min(1 << 28));
    for _ in 0..m * d {
        r.read_exact(&mut word)?;
        points.push(f64::from_le_bytes(word));
    }
    SpherePointCloud::from_rows(points, m, d, seed)
}
