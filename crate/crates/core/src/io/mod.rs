//! Graph serialization: GraphML, a plain-text edge list, and a compact
//! little-endian binary layout.
//!
//! Coordinates and distances are 32-bit floats. The text formats print them
//! as the shortest decimal that parses back to the same value, so every
//! format round-trips exactly. The bucket directory of a node store is not
//! serialized; read-back stores hold all nodes in one bucket.

mod binary;
mod edgelist;
mod graphml;

pub use binary::{read_binary, write_binary, BINARY_MAGIC, BINARY_VERSION, HEADER_BYTES};
pub use edgelist::{read_edgelist, write_edgelist};
pub use graphml::{read_graphml, write_graphml, GRAPHML_NS};

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::edgegen::EdgeStore;
use crate::error::{Result, SernError};
use crate::nodegen::NodeStore;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    GraphMl,
    EdgeList,
    Binary,
    /// Degree and edge-length statistics only; no edges are stored.
    Stats,
}

impl FromStr for OutputFormat {
    type Err = SernError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "graphml" => Ok(OutputFormat::GraphMl),
            "edgelist" => Ok(OutputFormat::EdgeList),
            "binary" => Ok(OutputFormat::Binary),
            "stats" => Ok(OutputFormat::Stats),
            other => Err(SernError::param(format!(
                "unknown format '{other}', expected graphml, edgelist, binary or stats"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::GraphMl => "graphml",
            OutputFormat::EdgeList => "edgelist",
            OutputFormat::Binary => "binary",
            OutputFormat::Stats => "stats",
        })
    }
}

pub fn write_graph<W: Write>(format: OutputFormat, nodes: &NodeStore, edges: &EdgeStore, out: W) -> Result<()> {
    match format {
        OutputFormat::GraphMl => write_graphml(nodes, edges, out),
        OutputFormat::EdgeList => write_edgelist(nodes, edges, out),
        OutputFormat::Binary => write_binary(nodes, edges, out),
        OutputFormat::Stats => Err(SernError::param("the stats format carries no graph")),
    }
}

pub fn read_graph<R: BufRead>(format: OutputFormat, input: R) -> Result<(NodeStore, EdgeStore)> {
    match format {
        OutputFormat::GraphMl => read_graphml(input),
        OutputFormat::EdgeList => read_edgelist(input),
        OutputFormat::Binary => read_binary(input),
        OutputFormat::Stats => Err(SernError::param("the stats format carries no graph")),
    }
}

fn check_ids(n: usize, edges: &EdgeStore) -> Result<()> {
    match edges.pairs().position(|(a, b)| a as usize >= n || b as usize >= n) {
        Some(k) => Err(SernError::Format(format!("edge {k} refers to a node outside 0..{n}"))),
        None => Ok(()),
    }
}
