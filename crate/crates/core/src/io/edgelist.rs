use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::report::atomic_write;
use crate::graph::Graph;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestWarnings {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl IngestWarnings {
    pub fn total(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

#[derive(Clone, Debug)]
pub struct IngestedGraph {
    pub graph: Graph,
    /// Original id of each dense node index, ascending.
    pub original_ids: Vec<u64>,
    pub warnings: IngestWarnings,
}

/// Reads a whitespace-separated edge list from `path`.
pub fn ingest_edge_list(path: &Path) -> Result<IngestedGraph> {
    parse_edge_list(File::open(path)?)
}

/// Parses one `u v` pair of non-negative integers per line. Blank lines and lines
/// starting with `#` are skipped; self-loops and repeated pairs (in either
/// direction) are dropped and counted. Node ids are relabelled densely in
/// ascending order of the original id; a node seen only in a self-loop is kept
/// as an isolated node.
pub fn parse_edge_list<R: Read>(reader: R) -> Result<IngestedGraph> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut ids = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut warnings = IngestWarnings::default();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected two node ids, found {} fields", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<u64>()
                .map_err(|e| Error::Parse { line: i + 1, message: format!("bad node id `{s}`: {e}") })
        };
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        ids.insert(u);
        ids.insert(v);
        if u == v {
            warnings.self_loops += 1;
            continue;
        }
        if !seen.insert((u.min(v), u.max(v))) {
            warnings.duplicates += 1;
            continue;
        }
        raw.push((u, v));
    }
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if warnings.total() > 0 {
        log::warn!(
            "edge list cleaning dropped {} self-loops and {} duplicate edges",
            warnings.self_loops,
            warnings.duplicates
        );
    }
    let original_ids: Vec<u64> = ids.into_iter().collect();
    let dense = |id: u64| original_ids.binary_search(&id).unwrap();
    let edges: Vec<(usize, usize)> = raw.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
    let graph = Graph::from_edges(original_ids.len(), &edges)?;
    Ok(IngestedGraph { graph, original_ids, warnings })
}

pub fn edge_list_string(g: &Graph) -> String {
    let mut out = format!("# nodes {} edges {}\n", g.node_count(), g.edge_count());
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn write_edge_list(g: &Graph, path: &Path) -> Result<()> {
    atomic_write(path, edge_list_string(g).as_bytes())
}
