//! Plain-text artifact formats.
//!
//! Graph file: first line n, then one line per vertex pair `i j s` (or
//! `i j s w` for weighted pairs) with i < j and s in {+1, -1}. Every pair
//! must appear exactly once; blank lines and `#` comments are ignored.
//!
//! Partition file: one line of n whitespace-separated module labels;
//! arbitrary non-negative labels are canonicalized on read.
//!
//! Solutions file: header `optimum count status` (status `complete` or
//! `truncated`), then one canonical membership vector per line.
//!
//! Distance file: a full p x p CSV, symmetric with a zero diagonal, every
//! entry printed with 12 significant digits.

use crate::error::{CcError, Result};
use crate::graph::SignedGraph;
use crate::metrics::DissimilarityMatrix;
use crate::partition::Partition;
use crate::solver::{SearchStats, SolutionSpace};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::path::Path;

/// Lines that carry content: trailing comments stripped, blanks skipped,
/// 1-based line numbers kept for error messages.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((idx + 1, line))
        }
    })
}

fn parse<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| CcError::Parse(format!("line {line}: bad {what} {token:?}")))
}

pub fn graph_to_string(g: &SignedGraph) -> String {
    let mut out = format!("{}\n", g.n());
    for (i, j, s, w) in g.pairs() {
        if g.is_unit_weight() {
            out.push_str(&format!("{i} {j} {s:+}\n"));
        } else {
            out.push_str(&format!("{i} {j} {s:+} {w}\n"));
        }
    }
    out
}

pub fn graph_from_str(text: &str) -> Result<SignedGraph> {
    let mut lines = content_lines(text);
    let (ln, first) = lines
        .next()
        .ok_or_else(|| CcError::Parse("empty graph file".into()))?;
    let n: usize = parse(first, ln, "vertex count")?;
    let mut edges = Vec::new();
    for (ln, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 && tokens.len() != 4 {
            return Err(CcError::Parse(format!(
                "line {ln}: expected `i j s` or `i j s w`, got {line:?}"
            )));
        }
        let i: usize = parse(tokens[0], ln, "vertex")?;
        let j: usize = parse(tokens[1], ln, "vertex")?;
        let s: i8 = match tokens[2] {
            "+1" | "1" => 1,
            "-1" => -1,
            other => {
                return Err(CcError::Parse(format!("line {ln}: bad sign {other:?}")));
            }
        };
        let w = if tokens.len() == 4 {
            Some(parse::<f64>(tokens[3], ln, "weight")?)
        } else {
            None
        };
        edges.push((i, j, s, w));
    }
    SignedGraph::from_edges(n, &edges)
}

pub fn partition_to_string(p: &Partition) -> String {
    format!("{p}\n")
}

pub fn partition_from_str(text: &str) -> Result<Partition> {
    let mut lines = content_lines(text);
    let (ln, line) = lines
        .next()
        .ok_or_else(|| CcError::Parse("empty partition file".into()))?;
    if let Some((extra, _)) = lines.next() {
        return Err(CcError::Parse(format!(
            "line {extra}: a partition file holds a single line"
        )));
    }
    let labels = line
        .split_whitespace()
        .map(|t| parse::<u32>(t, ln, "module label"))
        .collect::<Result<Vec<u32>>>()?;
    Partition::canonicalize(&labels)
}

pub fn solutions_to_string(space: &SolutionSpace) -> String {
    let status = if space.complete {
        "complete"
    } else {
        "truncated"
    };
    let mut out = format!("{} {} {status}\n", space.optimum, space.solutions.len());
    for s in &space.solutions {
        out.push_str(&format!("{s}\n"));
    }
    out
}

pub fn solutions_from_str(text: &str) -> Result<SolutionSpace> {
    let mut lines = content_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| CcError::Parse("empty solutions file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(CcError::Parse(format!(
            "line {ln}: expected `optimum count status`, got {header:?}"
        )));
    }
    let optimum: f64 = parse(tokens[0], ln, "optimum")?;
    let count: usize = parse(tokens[1], ln, "solution count")?;
    let complete = match tokens[2] {
        "complete" => true,
        "truncated" => false,
        other => {
            return Err(CcError::Parse(format!("line {ln}: bad status {other:?}")));
        }
    };
    let mut solutions = Vec::with_capacity(count);
    for (ln, line) in lines {
        let membership = line
            .split_whitespace()
            .map(|t| parse::<u32>(t, ln, "module label"))
            .collect::<Result<Vec<u32>>>()?;
        let p = Partition::from_membership(membership).map_err(|e| {
            CcError::Parse(format!(
                "line {ln}: not a canonical membership vector ({e})"
            ))
        })?;
        if let Some(prev) = solutions.last() {
            let prev: &Partition = prev;
            if prev.len() != p.len() {
                return Err(CcError::Parse(format!(
                    "line {ln}: vector length changed from {} to {}",
                    prev.len(),
                    p.len()
                )));
            }
        }
        solutions.push(p);
    }
    if solutions.len() != count {
        return Err(CcError::Parse(format!(
            "header announces {count} solutions, file holds {}",
            solutions.len()
        )));
    }
    Ok(SolutionSpace {
        optimum,
        solutions,
        complete,
        stats: SearchStats::default(),
    })
}

pub fn distances_to_csv(m: &DissimilarityMatrix) -> String {
    let p = m.size();
    let mut out = String::new();
    for i in 0..p {
        for j in 0..p {
            if j > 0 {
                out.push(',');
            }
            // 12 significant digits survive the round trip unchanged.
            out.push_str(&format!("{:.11e}", m.get(i, j)));
        }
        out.push('\n');
    }
    out
}

pub fn distances_from_csv(text: &str) -> Result<DissimilarityMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in content_lines(text) {
        rows.push(
            line.split(',')
                .map(|t| parse::<f64>(t.trim(), ln, "distance"))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    DissimilarityMatrix::from_rows(&rows)
}

pub fn read_graph(path: &Path) -> Result<SignedGraph> {
    graph_from_str(&read_text(path)?)
}

pub fn write_graph(path: &Path, g: &SignedGraph) -> Result<()> {
    write_text(path, &graph_to_string(g))
}

pub fn read_partition(path: &Path) -> Result<Partition> {
    partition_from_str(&read_text(path)?)
}

pub fn write_partition(path: &Path, p: &Partition) -> Result<()> {
    write_text(path, &partition_to_string(p))
}

pub fn read_solutions(path: &Path) -> Result<SolutionSpace> {
    solutions_from_str(&read_text(path)?)
}

pub fn write_solutions(path: &Path, space: &SolutionSpace) -> Result<()> {
    write_text(path, &solutions_to_string(space))
}

pub fn read_distances(path: &Path) -> Result<DissimilarityMatrix> {
    distances_from_csv(&read_text(path)?)
}

pub fn write_distances(path: &Path, m: &DissimilarityMatrix) -> Result<()> {
    write_text(path, &distances_to_csv(m))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_ctx(path, e))
}

/// Writes through a sibling temp file and a rename, so concurrent readers
/// and interrupted runs never observe a half-written artifact.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp.{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| io_ctx(dir, e))?;
    }
    fs::write(&tmp, contents).map_err(|e| io_ctx(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_ctx(path, e))
}

fn io_ctx(path: &Path, e: std::io::Error) -> CcError {
    CcError::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::variation_of_information;
    use crate::partition::all_partitions;

    #[test]
    fn graph_round_trip() {
        let g =
            SignedGraph::complete_with(5, |i, j| if (i + j) % 2 == 0 { 1 } else { -1 }).unwrap();
        let text = graph_to_string(&g);
        assert_eq!(graph_from_str(&text).unwrap(), g);
        assert!(text.starts_with("5\n0 1 -1\n0 2 +1\n"));
    }

    #[test]
    fn weighted_graph_round_trip() {
        let g = SignedGraph::from_parts(3, vec![1, -1, 1], vec![2.5, 1.0, 0.125]).unwrap();
        let text = graph_to_string(&g);
        assert!(text.contains("0 1 +1 2.5"));
        assert_eq!(graph_from_str(&text).unwrap(), g);
    }

    #[test]
    fn graph_parser_reports_line_numbers() {
        let bad = "3\n0 1 +1\n0 2 *1\n1 2 -1\n";
        match graph_from_str(bad) {
            Err(CcError::Parse(msg)) => assert!(msg.contains("line 3"), "{msg}"),
            other => panic!("expected a parse error, got {other:?}"),
        }
        assert!(graph_from_str("").is_err());
        assert!(graph_from_str("3\n0 1 +1\n0 2 -1\n").is_err()); // missing pair
    }

    #[test]
    fn graph_file_tolerates_comments_and_blanks() {
        let text = "# triangle\n3\n\n0 1 +1 # friends\n0 2 -1\n1 2 -1\n";
        let g = graph_from_str(text).unwrap();
        assert_eq!(g.sign(0, 1), 1);
        assert_eq!(g.sign(1, 2), -1);
    }

    #[test]
    fn partition_round_trip_canonicalizes() {
        let p = partition_from_str("5 5 0 3\n").unwrap();
        assert_eq!(p.membership(), &[0, 0, 1, 2]);
        assert_eq!(partition_to_string(&p), "0 0 1 2\n");
        assert!(partition_from_str("0 1\n2 2\n").is_err());
        assert!(partition_from_str("\n").is_err());
    }

    #[test]
    fn solutions_round_trip() {
        let space = SolutionSpace {
            optimum: 18.0,
            solutions: vec![
                Partition::canonicalize(&[0, 0, 1, 1]).unwrap(),
                Partition::canonicalize(&[0, 1, 0, 1]).unwrap(),
            ],
            complete: true,
            stats: SearchStats::default(),
        };
        let text = solutions_to_string(&space);
        assert!(text.starts_with("18 2 complete\n"));
        let back = solutions_from_str(&text).unwrap();
        assert_eq!(back.optimum, 18.0);
        assert_eq!(back.solutions, space.solutions);
        assert!(back.complete);
    }

    #[test]
    fn solutions_header_must_match_the_body() {
        let text = "3 2 complete\n0 0 1\n";
        assert!(solutions_from_str(text).is_err());
        let text = "3 1 complete\n0 2 1\n"; // not restricted-growth
        assert!(solutions_from_str(text).is_err());
        let text = "3 1 maybe\n0 0 1\n";
        assert!(solutions_from_str(text).is_err());
    }

    #[test]
    fn truncated_status_round_trips() {
        let space = SolutionSpace {
            optimum: 2.0,
            solutions: vec![Partition::single_module(3)],
            complete: false,
            stats: SearchStats::default(),
        };
        let text = solutions_to_string(&space);
        assert!(text.starts_with("2 1 truncated\n"));
        assert!(!solutions_from_str(&text).unwrap().complete);
    }

    #[test]
    fn distance_csv_round_trips_at_12_significant_digits() {
        let parts: Vec<Partition> = all_partitions(5).step_by(7).collect();
        let m = DissimilarityMatrix::from_partitions(&parts).unwrap();
        let text = distances_to_csv(&m);
        let back = distances_from_csv(&text).unwrap();
        assert_eq!(back.size(), m.size());
        for i in 0..m.size() {
            for j in 0..m.size() {
                let a = m.get(i, j);
                let b = back.get(i, j);
                // Half a unit in the 12th significant digit.
                assert!(
                    (a - b).abs() <= 5e-12 * a.abs().max(1.0),
                    "({i}, {j}): {a} vs {b}"
                );
            }
        }
        // Writing the re-read matrix again is byte-stable.
        assert_eq!(distances_to_csv(&back), text);
    }

    #[test]
    fn distance_csv_rejects_asymmetry() {
        assert!(distances_from_csv("0,1\n2,0\n").is_err());
        assert!(distances_from_csv("0,1\n1,0,2\n").is_err());
        assert!(distances_from_csv("").is_err());
    }

    #[test]
    fn vi_values_survive_the_csv_round_trip_exactly_enough() {
        let a = Partition::canonicalize(&[0, 0, 1, 1, 2]).unwrap();
        let b = Partition::canonicalize(&[0, 1, 1, 2, 2]).unwrap();
        let d = variation_of_information(&a, &b).unwrap();
        let printed = format!("{d:.11e}");
        let back: f64 = printed.parse().unwrap();
        assert!((d - back).abs() <= 5e-12 * d.max(1.0));
    }

    #[test]
    fn files_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let g = SignedGraph::complete_with(4, |i, j| if j - i == 1 { 1 } else { -1 }).unwrap();
        let path = dir.path().join("g.graph");
        write_graph(&path, &g).unwrap();
        assert_eq!(read_graph(&path).unwrap(), g);
        let missing = dir.path().join("absent.graph");
        match read_graph(&missing) {
            Err(CcError::Io(e)) => assert!(e.to_string().contains("absent.graph")),
            other => panic!("expected an io error, got {other:?}"),
        }
    }
}
