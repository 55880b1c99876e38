//! On-disk network layout: a directory holding
//!
//! * `edges.txt` – one edge per line, two whitespace-separated 0-based ids;
//! * `coords.csv` – `node_id,r,theta,community`;
//! * `communities.csv` – `node_id,community`;
//! * `geodesics.csv` – optional dense geodesic matrix, no header.
//!
//! Each file may start with `#` lines (the writer records the generating
//! parameters there); readers skip them. Floats are written in shortest
//! round-trip form, so a save/load cycle is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::generator::GeneratedNetwork;
use crate::geometry::{GeodesicMatrix, PolarPoint};
use crate::graph::Graph;

pub const EDGES_FILE: &str = "edges.txt";
pub const COORDS_FILE: &str = "coords.csv";
pub const COMMUNITIES_FILE: &str = "communities.csv";
pub const GEODESICS_FILE: &str = "geodesics.csv";

/// A network read back from disk.
#[derive(Debug, Clone)]
pub struct StoredNetwork {
    pub graph: Graph,
    pub coords: Vec<PolarPoint>,
    pub communities: Vec<usize>,
    pub geodesics: Option<GeodesicMatrix>,
}

fn header_lines(header: &str) -> String {
    header.lines().map(|l| format!("# {l}\n")).collect()
}

/// Writes `net` into `dir` (created if needed). `header` goes into a leading
/// comment block of every file.
pub fn save_network(
    dir: &Path,
    net: &GeneratedNetwork,
    header: &str,
    with_geodesics: bool,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let head = header_lines(header);

    let mut edges = head.clone();
    for (u, v) in net.graph.edges() {
        writeln!(edges, "{u} {v}").unwrap();
    }
    fs::write(dir.join(EDGES_FILE), edges)?;

    let mut coords = head.clone();
    coords.push_str("node_id,r,theta,community\n");
    for (k, (p, c)) in net.coords.iter().zip(&net.communities).enumerate() {
        writeln!(coords, "{k},{},{},{c}", p.r(), p.theta()).unwrap();
    }
    fs::write(dir.join(COORDS_FILE), coords)?;

    let mut comms = head.clone();
    comms.push_str("node_id,community\n");
    for (k, c) in net.communities.iter().enumerate() {
        writeln!(comms, "{k},{c}").unwrap();
    }
    fs::write(dir.join(COMMUNITIES_FILE), comms)?;

    if with_geodesics {
        let mut geo = head;
        let n = net.geodesics.n();
        for i in 0..n {
            let row: Vec<String> = net
                .geodesics
                .row(i)
                .iter()
                .map(|x| format!("{x}"))
                .collect();
            geo.push_str(&row.join(","));
            geo.push('\n');
        }
        fs::write(dir.join(GEODESICS_FILE), geo)?;
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(field: &str, what: &str, file: &Path) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Data(format!("{}: invalid {what} '{field}'", file.display())))
}

/// Reads a network directory written by [`save_network`].
pub fn load_network(dir: &Path) -> Result<StoredNetwork> {
    let coords_path = dir.join(COORDS_FILE);
    for required in [&coords_path, &dir.join(EDGES_FILE)] {
        if !required.is_file() {
            return Err(Error::Data(format!("{} not found", required.display())));
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(&coords_path)?;
    let mut rows: Vec<(usize, PolarPoint, usize)> = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() < 3 {
            return Err(Error::Data(format!("{}: short row", coords_path.display())));
        }
        let id: usize = parse(&rec[0], "node id", &coords_path)?;
        let r: f64 = parse(&rec[1], "radius", &coords_path)?;
        let theta: f64 = parse(&rec[2], "angle", &coords_path)?;
        let community: usize = match rec.get(3) {
            Some(c) if !c.is_empty() => parse(c, "community", &coords_path)?,
            _ => 0,
        };
        if !(r >= 0.0 && r.is_finite() && theta.is_finite()) {
            return Err(Error::Data(format!(
                "{}: invalid coordinates for node {id}",
                coords_path.display()
            )));
        }
        rows.push((id, PolarPoint::new(r, theta), community));
    }
    rows.sort_by_key(|row| row.0);
    if rows.iter().enumerate().any(|(k, row)| row.0 != k) {
        return Err(Error::Data(format!(
            "{}: node ids must be 0..n",
            coords_path.display()
        )));
    }
    let n = rows.len();
    let coords: Vec<PolarPoint> = rows.iter().map(|row| row.1).collect();
    let communities: Vec<usize> = rows.iter().map(|row| row.2).collect();

    let edges_path = dir.join(EDGES_FILE);
    let text = fs::read_to_string(&edges_path)?;
    let mut edges = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Data(format!(
                "{}: expected two ids per line: '{line}'",
                edges_path.display()
            )));
        };
        edges.push((
            parse(a, "node id", &edges_path)?,
            parse(b, "node id", &edges_path)?,
        ));
    }
    let graph = Graph::from_edges(n, edges)?;

    let geo_path = dir.join(GEODESICS_FILE);
    let geodesics = if geo_path.exists() {
        let text = fs::read_to_string(&geo_path)?;
        let mut data = Vec::with_capacity(n * n);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for field in line.split(',') {
                data.push(parse::<f64>(field, "distance", &geo_path)?);
            }
        }
        Some(GeodesicMatrix::from_row_major(n, data).ok_or_else(|| {
            Error::Data(format!(
                "{}: not a valid {n}x{n} distance matrix",
                geo_path.display()
            ))
        })?)
    } else {
        None
    };

    Ok(StoredNetwork {
        graph,
        coords,
        communities,
        geodesics,
    })
}
