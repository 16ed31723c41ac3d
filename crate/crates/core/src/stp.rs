//! SteinLib STP instance files and the known-optimum registry.
//!
//! STP is line oriented: `SECTION <name>` ... `END` blocks followed by `EOF`.
//! Only the `Comment`, `Graph` and `Terminals` sections are interpreted;
//! other sections (coordinates, presolve data) are skipped. Vertex ids in
//! the file are 1-based.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::graph::{connected_components, EdgeSet, Graph, GraphError, Instance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StpError {
    #[error("missing `SECTION {0}`")]
    MissingSection(&'static str),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: edge weight {weight} must be positive and finite")]
    InvalidWeight { line: usize, weight: f64 },
    #[error("line {line}: vertex {vertex} outside 1..={nodes}")]
    VertexOutOfRange { line: usize, vertex: i64, nodes: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: terminal {terminal} is not a vertex (1..={nodes})")]
    TerminalOutOfRange { line: usize, terminal: i64, nodes: usize },
    #[error("line {line}: `{keyword}` declares {declared} but {found} were listed")]
    CountMismatch {
        line: usize,
        keyword: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("line {line}: no terminals listed")]
    NoTerminals { line: usize },
    #[error("line {line}: graph is disconnected (vertices {component:?} unreachable)")]
    Disconnected { line: usize, component: Vec<usize> },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Outside,
    Comment,
    Graph,
    Terminals,
    Skipped,
}

fn parse_int(token: Option<&str>, line: usize, what: &str) -> Result<i64, StpError> {
    let token = token.ok_or_else(|| StpError::Syntax {
        line,
        message: format!("expected {what}"),
    })?;
    token.parse::<i64>().map_err(|_| StpError::Syntax {
        line,
        message: format!("`{token}` is not a valid {what}"),
    })
}

fn parse_count(token: Option<&str>, line: usize, what: &str) -> Result<usize, StpError> {
    let value = parse_int(token, line, what)?;
    usize::try_from(value).map_err(|_| StpError::Syntax {
        line,
        message: format!("{what} must be non-negative, got {value}"),
    })
}

fn no_trailing<'a>(mut tokens: impl Iterator<Item = &'a str>, line: usize) -> Result<(), StpError> {
    match tokens.next() {
        Some(extra) => Err(StpError::Syntax {
            line,
            message: format!("unexpected trailing token `{extra}`"),
        }),
        None => Ok(()),
    }
}

/// Parses STP text into a validated [`Instance`].
pub fn parse_stp(text: &str) -> Result<Instance, StpError> {
    let mut section = Section::Outside;
    let mut seen_graph = None;
    let mut seen_terminals = None;
    let mut name = String::new();
    let mut nodes: Option<(usize, usize)> = None;
    let mut declared_edges: Option<(usize, usize)> = None;
    let mut declared_terminals: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut terminals: Vec<usize> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        match section {
            Section::Outside => match keyword {
                "SECTION" => {
                    let title = tokens.next().ok_or_else(|| StpError::Syntax {
                        line,
                        message: "SECTION without a name".into(),
                    })?;
                    section = match title {
                        "Comment" => Section::Comment,
                        "Graph" => {
                            seen_graph = Some(line);
                            Section::Graph
                        }
                        "Terminals" => {
                            seen_terminals = Some(line);
                            Section::Terminals
                        }
                        _ => Section::Skipped,
                    };
                }
                "EOF" => break,
                // file magic such as `33D32945 STP File, STP Format Version 1.0`
                _ if line == 1 => {}
                other => {
                    return Err(StpError::Syntax {
                        line,
                        message: format!("unexpected `{other}` outside a section"),
                    })
                }
            },
            _ if keyword == "END" => section = Section::Outside,
            Section::Comment => {
                if keyword == "Name" {
                    let rest = raw.trim_start()[4..].trim();
                    name = rest.trim_matches('"').to_string();
                }
            }
            Section::Skipped => {}
            Section::Graph => match keyword {
                "Nodes" => {
                    let n = parse_count(tokens.next(), line, "node count")?;
                    no_trailing(tokens, line)?;
                    if n == 0 {
                        return Err(StpError::Syntax {
                            line,
                            message: "graph must have at least one node".into(),
                        });
                    }
                    nodes = Some((n, line));
                }
                "Edges" => {
                    let m = parse_count(tokens.next(), line, "edge count")?;
                    no_trailing(tokens, line)?;
                    declared_edges = Some((m, line));
                }
                "E" => {
                    let (n, _) = nodes.ok_or_else(|| StpError::Syntax {
                        line,
                        message: "`E` before `Nodes`".into(),
                    })?;
                    let mut endpoint = |what| -> Result<usize, StpError> {
                        let v = parse_int(tokens.next(), line, what)?;
                        if v < 1 || v as u64 > n as u64 {
                            return Err(StpError::VertexOutOfRange {
                                line,
                                vertex: v,
                                nodes: n,
                            });
                        }
                        Ok(v as usize - 1)
                    };
                    let u = endpoint("edge endpoint")?;
                    let v = endpoint("edge endpoint")?;
                    let weight_token = tokens.next().ok_or_else(|| StpError::Syntax {
                        line,
                        message: "expected edge weight".into(),
                    })?;
                    let weight: f64 = weight_token.parse().map_err(|_| StpError::Syntax {
                        line,
                        message: format!("`{weight_token}` is not a valid edge weight"),
                    })?;
                    no_trailing(tokens, line)?;
                    if !(weight.is_finite() && weight > 0.0) {
                        return Err(StpError::InvalidWeight { line, weight });
                    }
                    if u == v {
                        return Err(StpError::SelfLoop { line, vertex: u + 1 });
                    }
                    edges.push((u, v, weight));
                }
                other => {
                    return Err(StpError::Syntax {
                        line,
                        message: format!("unsupported keyword `{other}` in Graph section"),
                    })
                }
            },
            Section::Terminals => match keyword {
                "Terminals" => {
                    let k = parse_count(tokens.next(), line, "terminal count")?;
                    no_trailing(tokens, line)?;
                    declared_terminals = Some((k, line));
                }
                "T" => {
                    let (n, _) = nodes.ok_or_else(|| StpError::Syntax {
                        line,
                        message: "`T` before the Graph section".into(),
                    })?;
                    let t = parse_int(tokens.next(), line, "terminal")?;
                    no_trailing(tokens, line)?;
                    if t < 1 || t as u64 > n as u64 {
                        return Err(StpError::TerminalOutOfRange {
                            line,
                            terminal: t,
                            nodes: n,
                        });
                    }
                    terminals.push(t as usize - 1);
                }
                other => {
                    return Err(StpError::Syntax {
                        line,
                        message: format!("unsupported keyword `{other}` in Terminals section"),
                    })
                }
            },
        }
    }

    let graph_line = seen_graph.ok_or(StpError::MissingSection("Graph"))?;
    let terminals_line = seen_terminals.ok_or(StpError::MissingSection("Terminals"))?;
    let (n, _) = nodes.ok_or(StpError::Syntax {
        line: graph_line,
        message: "Graph section has no `Nodes` line".into(),
    })?;
    if let Some((declared, line)) = declared_edges {
        if declared != edges.len() {
            return Err(StpError::CountMismatch {
                line,
                keyword: "Edges",
                declared,
                found: edges.len(),
            });
        }
    }
    if let Some((declared, line)) = declared_terminals {
        if declared != terminals.len() {
            return Err(StpError::CountMismatch {
                line,
                keyword: "Terminals",
                declared,
                found: terminals.len(),
            });
        }
    }
    if terminals.is_empty() {
        return Err(StpError::NoTerminals {
            line: terminals_line,
        });
    }

    let graph = Graph::new(n, edges).map_err(|e| StpError::Syntax {
        line: graph_line,
        message: e.to_string(),
    })?;
    let components = connected_components(&graph, &EdgeSet::full(graph.edge_count()));
    if components.len() > 1 {
        return Err(StpError::Disconnected {
            line: graph_line,
            component: components[1].iter().map(|v| v + 1).collect(),
        });
    }
    let instance = Instance::new(graph, terminals).map_err(|e| match e {
        GraphError::Disconnected { component } => StpError::Disconnected {
            line: graph_line,
            component: component.iter().map(|v| v + 1).collect(),
        },
        other => StpError::Syntax {
            line: terminals_line,
            message: other.to_string(),
        },
    })?;
    Ok(instance.with_name(name))
}

/// Reads an STP file; the instance is named after the file stem.
pub fn read_stp(path: &Path) -> Result<Instance, StpError> {
    let text = std::fs::read_to_string(path).map_err(|e| StpError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(parse_stp(&text)?.with_name(stem))
}

fn format_length(length: f64) -> String {
    if length.fract() == 0.0 && length.abs() < 9.007_199_254_740_992e15 {
        format!("{}", length as i64)
    } else {
        format!("{length}")
    }
}

/// Canonical STP text: Comment, Graph, Terminals, EOF; edges by `(u, v)`.
pub fn emit_stp(instance: &Instance) -> String {
    let graph = &instance.graph;
    let mut out = String::new();
    out.push_str("33D32945 STP File, STP Format Version 1.0\n\n");
    out.push_str("SECTION Comment\n");
    let _ = writeln!(out, "Name \"{}\"", instance.name);
    out.push_str("END\n\nSECTION Graph\n");
    let _ = writeln!(out, "Nodes {}", graph.vertex_count());
    let _ = writeln!(out, "Edges {}", graph.edge_count());
    // edges are stored sorted by (u, v) already
    for (_, e) in graph.edges() {
        let _ = writeln!(out, "E {} {} {}", e.u + 1, e.v + 1, format_length(e.length));
    }
    out.push_str("END\n\nSECTION Terminals\n");
    let _ = writeln!(out, "Terminals {}", instance.terminals.len());
    for &t in &instance.terminals {
        let _ = writeln!(out, "T {}", t + 1);
    }
    out.push_str("END\n\nEOF\n");
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("line {line}: expected `name,value`")]
    Syntax { line: usize },
    #[error("line {line}: `{value}` is not a positive number")]
    InvalidValue { line: usize, value: String },
    #[error("line {line}: duplicate entry for `{name}`")]
    Duplicate { line: usize, name: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Known optimal tree lengths by instance name (case-insensitive).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OptimumRegistry {
    entries: BTreeMap<String, f64>,
}

impl OptimumRegistry {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.get(&name.to_ascii_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

pub fn load_optima(text: &str) -> Result<OptimumRegistry, RegistryError> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (name, value) = trimmed.split_once(',').ok_or(RegistryError::Syntax { line })?;
        let name = name.trim().to_ascii_lowercase();
        let value_str = value.trim();
        if name.is_empty() {
            return Err(RegistryError::Syntax { line });
        }
        let value: f64 = value_str
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v > 0.0)
            .ok_or_else(|| RegistryError::InvalidValue {
                line,
                value: value_str.to_string(),
            })?;
        if entries.insert(name.clone(), value).is_some() {
            return Err(RegistryError::Duplicate { line, name });
        }
    }
    Ok(OptimumRegistry { entries })
}

pub fn read_optima(path: &Path) -> Result<OptimumRegistry, RegistryError> {
    let text = std::fs::read_to_string(path).map_err(|e| RegistryError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_optima(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
SECTION Graph
Nodes 2
Edges 1
E 1 2 5
END

SECTION Terminals
Terminals 2
T 1
T 2
END

EOF
";

    #[test]
    fn parses_minimal_file() {
        let inst = parse_stp(MINIMAL).unwrap();
        assert_eq!(inst.graph.vertex_count(), 2);
        assert_eq!(inst.graph.edge_count(), 1);
        assert_eq!(inst.graph.edge(crate::graph::EdgeId(0)).length, 5.0);
        assert_eq!(inst.terminals, vec![0, 1]);
    }

    #[test]
    fn emits_single_edge_line() {
        let text = emit_stp(&parse_stp(MINIMAL).unwrap());
        assert_eq!(text.lines().filter(|l| l.starts_with("E ")).count(), 1);
        assert!(text.lines().any(|l| l == "E 1 2 5"));
        let order: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("SECTION") || *l == "EOF")
            .collect();
        assert_eq!(
            order,
            ["SECTION Comment", "SECTION Graph", "SECTION Terminals", "EOF"]
        );
    }

    #[test]
    fn fractional_weights_keep_their_digits() {
        assert_eq!(format_length(5.0), "5");
        assert_eq!(format_length(2.5), "2.5");
        let text = MINIMAL.replace("E 1 2 5", "E 1 2 0.1");
        let inst = parse_stp(&text).unwrap();
        assert_eq!(parse_stp(&emit_stp(&inst)).unwrap(), inst);
    }

    #[test]
    fn missing_sections_are_reported() {
        let no_terms = MINIMAL.split("SECTION Terminals").next().unwrap();
        assert_eq!(parse_stp(no_terms), Err(StpError::MissingSection("Terminals")));
        assert_eq!(
            parse_stp("SECTION Terminals\nT 1\nEND\nEOF\n"),
            Err(StpError::Syntax {
                line: 2,
                message: "`T` before the Graph section".into()
            })
        );
        assert_eq!(parse_stp("EOF\n"), Err(StpError::MissingSection("Graph")));
    }

    #[test]
    fn invariant_violations_carry_line_numbers() {
        assert_eq!(
            parse_stp(&MINIMAL.replace("E 1 2 5", "E 1 2 0")),
            Err(StpError::InvalidWeight { line: 4, weight: 0.0 })
        );
        assert_eq!(
            parse_stp(&MINIMAL.replace("E 1 2 5", "E 1 3 5")),
            Err(StpError::VertexOutOfRange {
                line: 4,
                vertex: 3,
                nodes: 2
            })
        );
        assert_eq!(
            parse_stp(&MINIMAL.replace("T 2", "T 7")),
            Err(StpError::TerminalOutOfRange {
                line: 10,
                terminal: 7,
                nodes: 2
            })
        );
        assert_eq!(
            parse_stp(&MINIMAL.replace("E 1 2 5", "E 2 2 5")),
            Err(StpError::SelfLoop { line: 4, vertex: 2 })
        );
    }

    #[test]
    fn disconnected_graph_rejected() {
        let text = MINIMAL.replace("Nodes 2", "Nodes 3");
        assert_eq!(
            parse_stp(&text),
            Err(StpError::Disconnected {
                line: 1,
                component: vec![3]
            })
        );
    }

    #[test]
    fn unknown_sections_are_skipped() {
        let text = MINIMAL.replace(
            "EOF",
            "SECTION Coordinates\nDD 1 0 0\nDD 2 1 1\nEND\n\nEOF",
        );
        assert!(parse_stp(&text).is_ok());
    }

    #[test]
    fn comment_name_is_captured() {
        let text = format!("SECTION Comment\nName    \"B01\"\nEND\n\n{MINIMAL}");
        assert_eq!(parse_stp(&text).unwrap().name, "B01");
    }

    #[test]
    fn registry_parses_entries_and_comments() {
        let reg = load_optima("# header\n\nb01,82\nB02, 83\n").unwrap();
        assert_eq!(reg.get("b01"), Some(82.0));
        assert_eq!(reg.get("b02"), Some(83.0));
        assert_eq!(reg.len(), 2);
    }

    #[test]
    fn registry_empty_and_errors() {
        assert!(load_optima("").unwrap().is_empty());
        assert_eq!(
            load_optima("b01,82\nb01,82\n"),
            Err(RegistryError::Duplicate {
                line: 2,
                name: "b01".into()
            })
        );
        assert_eq!(
            load_optima("b01,eighty\n"),
            Err(RegistryError::InvalidValue {
                line: 1,
                value: "eighty".into()
            })
        );
        assert_eq!(load_optima("b01 82\n"), Err(RegistryError::Syntax { line: 1 }));
    }
}
