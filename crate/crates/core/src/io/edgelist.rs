use std::io::{BufRead, BufWriter, Write};

use crate::edgegen::{EdgeSink, EdgeStore};
use crate::error::{Result, SernError};
use crate::nodegen::NodeStore;

/// `# nodes n` and `# edges e`, then `x y` per node and `i j [d]` per edge.
pub fn write_edgelist<W: Write>(nodes: &NodeStore, edges: &EdgeStore, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "# nodes {}", nodes.len())?;
    writeln!(w, "# edges {}", edges.len())?;
    for (x, y) in nodes.xs().iter().zip(nodes.ys()) {
        writeln!(w, "{x} {y}")?;
    }
    match edges.distances() {
        Some(ds) => {
            for ((a, b), d) in edges.pairs().zip(ds) {
                writeln!(w, "{a} {b} {d}")?;
            }
        }
        None => {
            for (a, b) in edges.pairs() {
                writeln!(w, "{a} {b}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| SernError::Format(format!("line {line}: bad or missing field")))
}

pub fn read_edgelist<R: BufRead>(input: R) -> Result<(NodeStore, EdgeStore)> {
    let mut n: Option<usize> = None;
    let mut e: Option<usize> = None;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut edges: Option<EdgeStore> = None;
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix('#') {
            let mut it = rest.split_whitespace();
            match it.next() {
                Some("nodes") => n = Some(field(it.next(), lineno)?),
                Some("edges") => e = Some(field(it.next(), lineno)?),
                _ => {}
            }
            continue;
        }
        let (Some(n), Some(e)) = (n, e) else {
            return Err(SernError::Format("missing '# nodes' or '# edges' header".into()));
        };
        let mut it = text.split_whitespace();
        if xs.len() < n {
            xs.push(field::<f32>(it.next(), lineno)?);
            ys.push(field::<f32>(it.next(), lineno)?);
        } else {
            let a: u32 = field(it.next(), lineno)?;
            let b: u32 = field(it.next(), lineno)?;
            let d = it.next();
            let store = edges.get_or_insert_with(|| EdgeStore::with_capacity(e, d.is_some()));
            if store.has_distances() != d.is_some() {
                return Err(SernError::Format(format!("line {lineno}: inconsistent distance column")));
            }
            let d = if d.is_some() { field(d, lineno)? } else { 0.0 };
            store.push(a, b, d);
        }
        if it.next().is_some() {
            return Err(SernError::Format(format!("line {lineno}: trailing fields")));
        }
    }
    let (Some(n), Some(e)) = (n, e) else {
        return Err(SernError::Format("missing '# nodes' or '# edges' header".into()));
    };
    let edges = edges.unwrap_or_default();
    if xs.len() != n || edges.len() != e {
        return Err(SernError::Format(format!(
            "header promises {n} nodes and {e} edges, found {} and {}",
            xs.len(),
            edges.len()
        )));
    }
    super::check_ids(n, &edges)?;
    Ok((NodeStore::from_coordinates(xs, ys)?, edges))
}
