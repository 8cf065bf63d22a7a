//! Graph files and the OpenFlights route network.
//!
//! Edge lists are plain text: one undirected edge per line as two
//! whitespace-separated node ids, `#` starts a comment line.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::graph::{Coordinates, Graph};

/// Missing-value marker used throughout the OpenFlights files.
const MISSING: &str = "\\N";
const ROUTE_FIELDS: usize = 9;

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    parse_edge_list(BufReader::new(file))
}

pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph, IoError> {
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut max_id: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| IoError::io("<edge list>", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(IoError::Parse {
                line: line_no,
                message: format!("expected two node ids, got '{trimmed}'"),
            });
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| IoError::Parse {
                line: line_no,
                message: format!("'{s}' is not a non-negative integer"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            return Err(IoError::SelfLoop { line: line_no, node: u });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(IoError::DuplicateEdge { line: line_no, u, v });
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let n = max_id.map_or(0, |m| m + 1);
    Ok(Graph::from_edges(n, edges).expect("edges validated while parsing"))
}

/// Writes `g` as an edge list; each header line is emitted as a `#` comment.
pub fn write_edge_list<W: Write>(mut out: W, g: &Graph, header: &[String]) -> std::io::Result<()> {
    for line in header {
        for part in line.lines() {
            writeln!(out, "# {part}")?;
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}

pub fn write_coordinates_csv<W: Write>(out: W, coords: &Coordinates) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "x", "y"])?;
    for (i, &(x, y)) in coords.0.iter().enumerate() {
        w.serialize((i, x, y))?;
    }
    w.flush().map_err(|e| IoError::io("<coordinates>", e))?;
    Ok(())
}

/// Creates `path` by writing to a sibling temporary file and renaming it
/// into place, so readers never observe a partial file.
pub fn write_atomic<F>(path: impl AsRef<Path>, fill: F) -> Result<(), IoError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), IoError>,
{
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| IoError::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| IoError::io(&dir, e))?;
    {
        let mut buffered = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut buffered)?;
        buffered.flush().map_err(|e| IoError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub routes_file: String,
    pub airports_file: Option<String>,
    pub total_rows: usize,
    pub accepted_rows: usize,
    pub dropped_rows: usize,
    /// Dropped rows broken down by reason.
    pub dropped_by_reason: BTreeMap<String, usize>,
    pub airports_rows: Option<usize>,
    pub airports_seen: usize,
    pub lcc_airports: usize,
    pub lcc_edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AirportNetwork {
    /// Largest connected component of the route graph.
    pub graph: Graph,
    /// Airport code of each node.
    pub labels: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestOptions {
    /// Treat malformed rows as fatal instead of skipping them.
    pub strict: bool,
}

pub fn ingest_openflights(
    routes_path: impl AsRef<Path>,
    airports_path: Option<&Path>,
    options: IngestOptions,
) -> Result<AirportNetwork, IoError> {
    let routes_path = routes_path.as_ref();
    let routes = File::open(routes_path).map_err(|e| IoError::io(routes_path, e))?;
    let known = match airports_path {
        Some(p) => {
            let f = File::open(p).map_err(|e| IoError::io(p, e))?;
            Some(read_airport_codes(f)?)
        }
        None => None,
    };
    let mut net = ingest_routes(routes, known.as_ref(), options)?;
    net.provenance.routes_file = routes_path.display().to_string();
    net.provenance.airports_file = airports_path.map(|p| p.display().to_string());
    Ok(net)
}

/// Codes known to an OpenFlights `airports.dat` file.
#[derive(Debug, Clone, Default)]
pub struct AirportCodes {
    pub codes: HashSet<String>,
    pub rows: usize,
}

/// Reads IATA (field 4) and ICAO (field 5) codes from `airports.dat`.
pub fn read_airport_codes<R: Read>(reader: R) -> Result<AirportCodes, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut known = AirportCodes::default();
    for record in rdr.records() {
        let record = record?;
        known.rows += 1;
        for idx in [4, 5] {
            if let Some(code) = record.get(idx).map(str::trim) {
                if !code.is_empty() && code != MISSING {
                    known.codes.insert(code.to_string());
                }
            }
        }
    }
    Ok(known)
}

fn code(field: Option<&str>) -> Option<&str> {
    field.map(str::trim).filter(|c| !c.is_empty() && *c != MISSING)
}

/// Builds the undirected airport graph from OpenFlights `routes.dat` rows.
pub fn ingest_routes<R: Read>(
    reader: R,
    known: Option<&AirportCodes>,
    options: IngestOptions,
) -> Result<AirportNetwork, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut prov = Provenance::default();
    let skip = |prov: &mut Provenance, reason: &str| {
        prov.dropped_rows += 1;
        *prov.dropped_by_reason.entry(reason.to_string()).or_default() += 1;
    };
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        prov.total_rows += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) if options.strict => {
                return Err(IoError::Parse {
                    line: row,
                    message: e.to_string(),
                })
            }
            Err(_) => {
                skip(&mut prov, "unparsable");
                continue;
            }
        };
        if record.len() != ROUTE_FIELDS {
            if options.strict {
                return Err(IoError::Parse {
                    line: row,
                    message: format!("expected {ROUTE_FIELDS} fields, found {}", record.len()),
                });
            }
            skip(&mut prov, "wrong_field_count");
            continue;
        }
        let (Some(src), Some(dst)) = (code(record.get(2)), code(record.get(4))) else {
            skip(&mut prov, "missing_airport");
            continue;
        };
        if src == dst {
            skip(&mut prov, "self_loop");
            continue;
        }
        if let Some(known) = known {
            if !known.codes.contains(src) || !known.codes.contains(dst) {
                skip(&mut prov, "unknown_airport");
                continue;
            }
        }
        prov.accepted_rows += 1;
        let (a, b) = if src < dst { (src, dst) } else { (dst, src) };
        pairs.insert((a.to_string(), b.to_string()));
    }
    if pairs.is_empty() {
        return Err(IoError::EmptyNetwork);
    }

    let codes: Vec<&str> = pairs
        .iter()
        .flat_map(|(a, b)| [a.as_str(), b.as_str()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&str, usize> = codes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let edges = pairs.iter().map(|(a, b)| (index[a.as_str()], index[b.as_str()]));
    let full = Graph::from_edges(codes.len(), edges).expect("pairs are distinct and loop-free");
    let (graph, mapping) = full.largest_connected_component();
    let mut labels = vec![String::new(); graph.node_count()];
    for (old, new) in mapping.iter().enumerate() {
        if let Some(new) = *new {
            labels[new] = codes[old].to_string();
        }
    }
    prov.airports_seen = codes.len();
    prov.airports_rows = known.map(|k| k.rows);
    prov.lcc_airports = graph.node_count();
    prov.lcc_edges = graph.edge_count();
    Ok(AirportNetwork {
        graph,
        labels,
        provenance: prov,
    })
}

pub fn write_labels_csv<W: Write>(out: W, labels: &[String]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "label"])?;
    for (i, label) in labels.iter().enumerate() {
        w.serialize((i, label))?;
    }
    w.flush().map_err(|e| IoError::io("<labels>", e))?;
    Ok(())
}
