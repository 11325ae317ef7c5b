use std::collections::HashMap;
use std::io::{BufRead, BufWriter, Write};

use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use crate::edgegen::{EdgeSink, EdgeStore};
use crate::error::{Result, SernError};
use crate::nodegen::NodeStore;

pub const GRAPHML_NS: &str = "http://graphml.graphdrawing.org/xmlns";
const SCHEMA: &str = "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd";
const XSI: &str = "http://www.w3.org/2001/XMLSchema-instance";

/// Undirected GraphML with node keys `x`, `y` and, when stored, edge key `d`.
/// Node `k` has id `n<k>`.
pub fn write_graphml<W: Write>(nodes: &NodeStore, edges: &EdgeStore, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        w,
        r#"<graphml xmlns="{GRAPHML_NS}" xmlns:xsi="{XSI}" xsi:schemaLocation="{GRAPHML_NS} {SCHEMA}">"#
    )?;
    writeln!(w, r#"  <key id="x" for="node" attr.name="x" attr.type="float"/>"#)?;
    writeln!(w, r#"  <key id="y" for="node" attr.name="y" attr.type="float"/>"#)?;
    if edges.has_distances() {
        writeln!(w, r#"  <key id="d" for="edge" attr.name="d" attr.type="float"/>"#)?;
    }
    writeln!(w, r#"  <graph id="G" edgedefault="undirected">"#)?;
    for (k, (x, y)) in nodes.xs().iter().zip(nodes.ys()).enumerate() {
        writeln!(
            w,
            r#"    <node id="n{k}"><data key="x">{x}</data><data key="y">{y}</data></node>"#
        )?;
    }
    match edges.distances() {
        Some(ds) => {
            for ((a, b), d) in edges.pairs().zip(ds) {
                writeln!(
                    w,
                    r#"    <edge source="n{a}" target="n{b}"><data key="d">{d}</data></edge>"#
                )?;
            }
        }
        None => {
            for (a, b) in edges.pairs() {
                writeln!(w, r#"    <edge source="n{a}" target="n{b}"/>"#)?;
            }
        }
    }
    writeln!(w, "  </graph>")?;
    writeln!(w, "</graphml>")?;
    w.flush()?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> SernError {
    SernError::Format(msg.into())
}

fn attr(e: &BytesStart<'_>, name: &str) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|err| bad(format!("attribute: {err}")))?;
        if a.key.as_ref() == name {
            let v = a
                .normalized_value(XmlVersion::Implicit1_0)
                .map_err(|err| bad(format!("attribute value: {err}")))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn node_index(id: &str) -> Result<u32> {
    id.strip_prefix('n')
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| bad(format!("node id '{id}' is not of the form n<k>")))
}

#[derive(Clone, Copy, PartialEq)]
enum Owner {
    Node,
    Edge,
}

/// Reads files produced by [`write_graphml`]: node ids must be `n0..n{n-1}`.
pub fn read_graphml<R: BufRead>(input: R) -> Result<(NodeStore, EdgeStore)> {
    let mut reader = Reader::from_reader(input);
    let mut buf = Vec::new();
    // key id -> attribute name
    let mut keys: HashMap<String, String> = HashMap::new();
    let mut points: Vec<Option<[f32; 2]>> = Vec::new();
    let mut pairs: Vec<(u32, u32, Option<f32>)> = Vec::new();
    let mut owner: Option<Owner> = None;
    let mut data_key: Option<String> = None;
    let mut text = String::new();
    let mut node = (0u32, None::<f32>, None::<f32>);
    let mut edge = (0u32, 0u32, None::<f32>);

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| bad(format!("xml at byte {}: {e}", reader.buffer_position())))?;
        let empty = matches!(event, Event::Empty(_));
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => match e.local_name().as_ref() {
                "key" => {
                    if let (Some(id), Some(name)) = (attr(e, "id")?, attr(e, "attr.name")?) {
                        keys.insert(id, name);
                    }
                }
                "graph" => {
                    if attr(e, "edgedefault")?.as_deref() == Some("directed") {
                        return Err(bad("directed graphs are not supported"));
                    }
                }
                "node" => {
                    let id = attr(e, "id")?.ok_or_else(|| bad("node without id"))?;
                    node = (node_index(&id)?, None, None);
                    owner = Some(Owner::Node);
                }
                "edge" => {
                    let s = attr(e, "source")?.ok_or_else(|| bad("edge without source"))?;
                    let t = attr(e, "target")?.ok_or_else(|| bad("edge without target"))?;
                    edge = (node_index(&s)?, node_index(&t)?, None);
                    owner = Some(Owner::Edge);
                }
                "data" => {
                    data_key = attr(e, "key")?;
                    text.clear();
                }
                _ => {}
            },
            Event::Text(ref t) if data_key.is_some() => text.push_str(t),
            _ => {}
        }
        let closing = match event {
            Event::End(ref e) => Some(e.local_name().as_ref().to_owned()),
            Event::Empty(ref e) if empty => Some(e.local_name().as_ref().to_owned()),
            Event::Eof => break,
            _ => None,
        };
        match closing.as_deref() {
            Some("data") => {
                if let Some(key) = data_key.take() {
                    let name = keys.get(&key).map(String::as_str).unwrap_or(key.as_str());
                    let value = || -> Result<f32> {
                        text.trim()
                            .parse()
                            .map_err(|_| bad(format!("bad number '{}'", text.trim())))
                    };
                    match (owner, name) {
                        (Some(Owner::Node), "x") => node.1 = Some(value()?),
                        (Some(Owner::Node), "y") => node.2 = Some(value()?),
                        (Some(Owner::Edge), "d") => edge.2 = Some(value()?),
                        _ => {}
                    }
                }
            }
            Some("node") => {
                let (k, x, y) = node;
                let (Some(x), Some(y)) = (x, y) else {
                    return Err(bad(format!("node n{k} lacks x or y")));
                };
                let k = k as usize;
                if k >= points.len() {
                    points.resize(k + 1, None);
                }
                if points[k].replace([x, y]).is_some() {
                    return Err(bad(format!("node n{k} appears twice")));
                }
                owner = None;
            }
            Some("edge") => {
                pairs.push(edge);
                owner = None;
            }
            _ => {}
        }
        buf.clear();
    }

    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for (k, p) in points.iter().enumerate() {
        let [x, y] = p.ok_or_else(|| bad(format!("node n{k} is missing")))?;
        xs.push(x);
        ys.push(y);
    }
    // a declared `d` key keeps the distance column even for edgeless graphs
    let with_d = keys.values().any(|name| name == "d") || pairs.first().is_some_and(|p| p.2.is_some());
    let mut edges = EdgeStore::with_capacity(pairs.len(), with_d);
    for (a, b, d) in pairs {
        if d.is_some() != with_d {
            return Err(bad("only some edges carry a distance"));
        }
        edges.push(a, b, d.unwrap_or(0.0));
    }
    super::check_ids(xs.len(), &edges)?;
    Ok((NodeStore::from_coordinates(xs, ys)?, edges))
}
