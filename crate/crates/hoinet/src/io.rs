//! File formats: time-series CSV, model JSON, and the network outputs
//! (JSON, GraphML, CSV tables).

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use hoinet_core::netout::Significance;
use hoinet_core::{DenseMatrix, HoiNetwork, TimeSeries, VarModel};
use serde::{Deserialize, Serialize};

use crate::error::{HoiError, Result};

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| HoiError::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| HoiError::io(path, e))
}

/// Reads a comma-separated series, one sample per row. A first row that does
/// not parse as numbers is taken as the column labels.
pub fn read_series<R: Read>(reader: R) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut labels = None;
    let mut data = Vec::new();
    let mut width = 0;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                width = row.len();
                data.extend(row);
            }
            Err(_) if line == 0 => labels = Some(rec.iter().map(str::to_owned).collect::<Vec<_>>()),
            Err(e) => return Err(HoiError::Csv(format!("row {}: {e}", line + 1))),
        }
    }
    if data.is_empty() {
        return Err(HoiError::Csv("no numeric rows".into()));
    }
    let values = DenseMatrix::new(data.len() / width, width, data)?;
    Ok(TimeSeries::new(values, labels)?)
}

pub fn read_series_csv(path: &Path) -> Result<TimeSeries> {
    read_series(open(path)?)
}

/// Writes the series with a header row (labels, or `X1..XN`).
pub fn write_series<W: Write>(writer: W, series: &TimeSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let labels = series_labels(series);
    w.write_record(&labels)?;
    let mut row = Vec::with_capacity(series.n_nodes());
    for t in 0..series.n_samples() {
        row.clear();
        row.extend(series.values().row(t).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| HoiError::io("<csv>", e))
}

pub fn write_series_csv(path: &Path, series: &TimeSeries) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| HoiError::io(path, e))?;
    write_series(std::io::BufWriter::new(file), series)
}

pub fn series_labels(series: &TimeSeries) -> Vec<String> {
    match series.labels() {
        Some(l) => l.to_vec(),
        None => (1..=series.n_nodes()).map(|i| format!("X{i}")).collect(),
    }
}

pub fn read_model_json(path: &Path) -> Result<VarModel> {
    Ok(serde_json::from_reader(std::io::BufReader::new(open(path)?))?)
}

pub fn write_model_json(path: &Path, model: &VarModel) -> Result<()> {
    write_file(path, &(serde_json::to_string_pretty(model)? + "\n"))
}

pub fn to_json(net: &HoiNetwork) -> String {
    serde_json::to_string_pretty(net).expect("network values are finite") + "\n"
}

pub fn from_json(doc: &str) -> Result<HoiNetwork> {
    Ok(serde_json::from_str(doc)?)
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const GRAPHML_KEYS: &[(&str, &str, &str)] = &[
    ("label", "node", "string"),
    ("entropy_rate", "node", "double"),
    ("gradient", "node", "double"),
    ("gradient_significant", "node", "boolean"),
    ("node_class", "node", "string"),
    ("mir", "edge", "double"),
    ("mir_significant", "edge", "boolean"),
    ("local_oir", "edge", "double"),
    ("local_oir_significant", "edge", "boolean"),
    ("edge_class", "edge", "string"),
    ("oir", "graph", "double"),
    ("oir_significant", "graph", "boolean"),
    ("graph_class", "graph", "string"),
];

fn data(out: &mut String, indent: &str, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{indent}<data key=\"{key}\">{value}</data>");
}

fn sig_data(out: &mut String, indent: &str, key: &str, sig: Option<&Significance>) {
    if let Some(s) = sig {
        data(out, indent, key, s.significant);
    }
}

/// GraphML 1.0 document: undirected graph, node and edge ids `n{index}`/`e{k}`.
pub fn to_graphml(net: &HoiNetwork) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    for (id, target, ty) in GRAPHML_KEYS {
        let name = id.trim_start_matches("node_").trim_start_matches("edge_").trim_start_matches("graph_");
        let _ = writeln!(out, "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>");
    }
    out.push_str("  <graph id=\"hoi\" edgedefault=\"undirected\">\n");
    let ind = "      ";
    data(&mut out, "    ", "oir", net.global.oir);
    sig_data(&mut out, "    ", "oir_significant", net.global.oir_significance.as_ref());
    data(&mut out, "    ", "graph_class", net.global.class.as_str());
    for n in &net.nodes {
        let _ = writeln!(out, "    <node id=\"n{}\">", n.index);
        data(&mut out, ind, "label", xml_escape(&n.label));
        data(&mut out, ind, "entropy_rate", n.entropy_rate);
        data(&mut out, ind, "gradient", n.gradient);
        sig_data(&mut out, ind, "gradient_significant", n.gradient_significance.as_ref());
        data(&mut out, ind, "node_class", n.class.as_str());
        out.push_str("    </node>\n");
    }
    for (k, l) in net.links.iter().enumerate() {
        let _ = writeln!(out, "    <edge id=\"e{k}\" source=\"n{}\" target=\"n{}\">", l.i, l.j);
        data(&mut out, ind, "mir", l.mir);
        sig_data(&mut out, ind, "mir_significant", l.mir_significance.as_ref());
        data(&mut out, ind, "local_oir", l.local_oir);
        sig_data(&mut out, ind, "local_oir_significant", l.local_oir_significance.as_ref());
        data(&mut out, ind, "edge_class", l.class.as_str());
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// The three plot-ready tables. Test columns are left empty when no test was run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvTables {
    pub nodes: String,
    pub links: String,
    pub global: String,
}

pub const NODE_COLUMNS: [&str; 7] = ["label", "er", "gradient", "gradient_lo", "gradient_hi", "gradient_sig", "class"];
pub const LINK_COLUMNS: [&str; 9] = ["i", "j", "mir", "mir_sig", "local_oir", "lo", "hi", "sig", "class"];
pub const GLOBAL_COLUMNS: [&str; 5] = ["oir", "lo", "hi", "sig", "class"];

fn bounds(sig: Option<&Significance>) -> [String; 3] {
    match sig {
        Some(s) => [s.lower.to_string(), s.upper.to_string(), s.significant.to_string()],
        None => Default::default(),
    }
}

fn table<const K: usize>(header: [&str; K], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn to_csv_tables(net: &HoiNetwork) -> CsvTables {
    let nodes = table(
        NODE_COLUMNS,
        net.nodes.iter().map(|n| {
            let [lo, hi, sig] = bounds(n.gradient_significance.as_ref());
            vec![n.label.clone(), n.entropy_rate.to_string(), n.gradient.to_string(), lo, hi, sig, n.class.as_str().into()]
        }),
    );
    let links = table(
        LINK_COLUMNS,
        net.links.iter().map(|l| {
            let mir_sig = l.mir_significance.map(|s| s.significant.to_string()).unwrap_or_default();
            let [lo, hi, sig] = bounds(l.local_oir_significance.as_ref());
            vec![
                l.i.to_string(),
                l.j.to_string(),
                l.mir.to_string(),
                mir_sig,
                l.local_oir.to_string(),
                lo,
                hi,
                sig,
                l.class.as_str().into(),
            ]
        }),
    );
    let g = &net.global;
    let [lo, hi, sig] = bounds(g.oir_significance.as_ref());
    let global = table(GLOBAL_COLUMNS, std::iter::once(vec![g.oir.to_string(), lo, hi, sig, g.class.as_str().into()]));
    CsvTables { nodes, links, global }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Graphml,
}

/// Writes `{stem}.json`, `{stem}_{nodes,links,global}.csv` and/or
/// `{stem}.graphml` into `dir`; returns the paths written.
pub fn write_network(dir: &Path, stem: &str, net: &HoiNetwork, formats: &[OutputFormat]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| HoiError::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, body: &str| -> Result<()> {
        let p = dir.join(name);
        write_file(&p, body)?;
        written.push(p);
        Ok(())
    };
    for f in formats {
        match f {
            OutputFormat::Json => put(format!("{stem}.json"), &to_json(net))?,
            OutputFormat::Graphml => put(format!("{stem}.graphml"), &to_graphml(net))?,
            OutputFormat::Csv => {
                let t = to_csv_tables(net);
                put(format!("{stem}_nodes.csv"), &t.nodes)?;
                put(format!("{stem}_links.csv"), &t.links)?;
                put(format!("{stem}_global.csv"), &t.global)?;
            }
        }
    }
    Ok(written)
}

/// Writes any serializable value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let mut s = String::new();
    open(path)?.read_to_string(&mut s).map_err(|e| HoiError::io(path, e))?;
    Ok(serde_json::from_str(&s)?)
}
