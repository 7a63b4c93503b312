//! The 4-cycle ratio table, the Iris virginica table and the replicate (violin) data.

use std::fmt;
use std::str::FromStr;

use gwishart_core::constants::{approx_ratio, roverato_estimate, true_ratio_c4};
use gwishart_core::fourier::{fourier_constant, QuadratureConfig};
use gwishart_core::montecarlo::{check_distinct, mc_constant};
use gwishart_core::symmat::scatter_matrix;
use gwishart_core::{Graph, SymmetricMatrix};
use rayon::prelude::*;

use crate::formats::{format_number, into_string, parse_data_csv};
use crate::{Error, Result};

/// Iris virginica measurements (Fisher, 1936): 50 rows of SL, SW, PL, PW in cm.
pub const IRIS_VIRGINICA_CSV: &str = include_str!("../data/iris_virginica.csv");

pub const VARIABLES: [&str; 4] = ["SL", "SW", "PL", "PW"];

/// Published exact log-constants of the three 4-cycles, ascending.
pub const REFERENCE_EXACT: [f64; 3] = [83.6851, 111.3223, 112.7664];
/// Published conjectured log-constants, ascending.
pub const REFERENCE_CONJECTURED: [f64; 3] = [83.6836, 111.3175, 112.7618];
pub const REFERENCE_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub delta: u32,
    pub true_ratio: f64,
    pub approx_ratio: f64,
}

/// `C_{C4}` ratio against its common-neighbour approximation for `δ = 1..=delta_max`.
pub fn figure1_table(delta_max: u32) -> Result<Vec<RatioRow>> {
    (1..=delta_max)
        .map(|d| {
            let delta = f64::from(d);
            Ok(RatioRow { delta: d, true_ratio: true_ratio_c4(delta)?, approx_ratio: approx_ratio(delta, 0)? })
        })
        .collect()
}

pub fn ratio_csv(rows: &[RatioRow], full_precision: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["delta", "true_ratio", "approx_ratio"])?;
    for r in rows {
        w.write_record([
            r.delta.to_string(),
            format_number(r.true_ratio, full_precision),
            format_number(r.approx_ratio, full_precision),
        ])?;
    }
    into_string(w)
}

/// The three labelled 4-cycles on SL, SW, PL, PW (0-based).
pub fn nonchordal_graphs_4() -> Vec<Graph> {
    [[(0, 1), (1, 2), (2, 3), (0, 3)], [(0, 1), (1, 3), (2, 3), (0, 2)], [(0, 2), (1, 2), (1, 3), (0, 3)]]
        .into_iter()
        .map(|edges| Graph::new(4, edges).expect("fixed 4-cycles are valid"))
        .collect()
}

/// The two chords of a 4-cycle, in sorted order.
pub fn chords(g: &Graph) -> Vec<(usize, usize)> {
    g.non_edges()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Centering {
    Centered,
    Uncentered,
}

impl Centering {
    pub fn is_centered(self) -> bool {
        self == Centering::Centered
    }
}

impl fmt::Display for Centering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_centered() { "centered" } else { "uncentered" })
    }
}

impl FromStr for Centering {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "centered" => Ok(Centering::Centered),
            "uncentered" => Ok(Centering::Uncentered),
            _ => Err(format!("unknown centering '{s}' (expected centered or uncentered)")),
        }
    }
}

/// Data and prior for the Iris experiment. The posterior has shape `δ + N` and scale
/// `U + I₄`, with `U` the scatter matrix of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct IrisConfig {
    pub rows: Vec<Vec<f64>>,
    pub delta_prior: f64,
    pub centering: Centering,
    pub samples: usize,
    pub seed: u64,
}

impl IrisConfig {
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = parse_data_csv(text)?;
        if table.columns.len() != VARIABLES.len() {
            return Err(crate::parse_error(1, format!("expected 4 columns, found {}", table.columns.len())));
        }
        Ok(Self { rows: table.rows, delta_prior: 3.0, centering: Centering::Centered, samples: 1000, seed: 1 })
    }

    pub fn vendored() -> Self {
        Self::from_csv(IRIS_VIRGINICA_CSV).expect("vendored data parses")
    }

    pub fn with_centering(&self, centering: Centering) -> Self {
        Self { centering, ..self.clone() }
    }

    pub fn scatter(&self) -> Result<SymmetricMatrix> {
        Ok(scatter_matrix(&self.rows, self.centering.is_centered())?)
    }

    pub fn posterior_delta(&self) -> f64 {
        self.delta_prior + self.rows.len() as f64
    }

    pub fn posterior_scale(&self) -> Result<SymmetricMatrix> {
        Ok(self.scatter()?.add(&SymmetricMatrix::identity(VARIABLES.len()))?)
    }
}

/// Exact log-constant of a one-chord-from-chordal graph through the Fourier integral.
pub fn exact_log(g: &Graph, chord: (usize, usize), delta: f64, scale: &SymmetricMatrix) -> Result<f64> {
    let g_star = g.with_edge(chord.0, chord.1)?;
    Ok(fourier_constant(&g_star, chord, delta, scale, &QuadratureConfig::default())?.log_magnitude())
}

/// Exact and conjectured log-constants of one graph.
pub fn reference_logs(g: &Graph, delta: f64, scale: &SymmetricMatrix) -> Result<(f64, f64)> {
    let chord = chords(g)[0];
    let exact = exact_log(g, chord, delta, scale)?;
    let identity = SymmetricMatrix::identity(g.n());
    let g_star = g.with_edge(chord.0, chord.1)?;
    let c_identity = fourier_constant(&g_star, chord, delta, &identity, &QuadratureConfig::default())?;
    let conjectured = roverato_estimate(g, delta, scale, c_identity)?.log_magnitude();
    Ok((exact, conjectured))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrisRow {
    pub graph_id: String,
    pub graph: Graph,
    pub exact_log: f64,
    pub conjectured_log: f64,
    pub mc_log: f64,
    pub mc_std_error: f64,
}

impl IrisRow {
    /// Monte Carlo agrees with the exact value within three standard errors.
    pub fn mc_agrees(&self) -> bool {
        (self.exact_log - self.mc_log).abs() < 3.0 * self.mc_std_error
    }
}

pub fn graph_id(index: usize) -> String {
    format!("G{}", index + 1)
}

/// Edge list with variable names, e.g. `SL-SW;SW-PL`.
pub fn named_edges(g: &Graph) -> String {
    g.edges().iter().map(|&(u, v)| format!("{}-{}", VARIABLES[u], VARIABLES[v])).collect::<Vec<_>>().join(";")
}

pub fn iris_table(cfg: &IrisConfig) -> Result<Vec<IrisRow>> {
    let delta = cfg.posterior_delta();
    let scale = cfg.posterior_scale()?;
    nonchordal_graphs_4()
        .into_par_iter()
        .enumerate()
        .map(|(i, g)| {
            let (exact_log, conjectured_log) = reference_logs(&g, delta, &scale)?;
            let mc = mc_constant(&g, delta, &scale, cfg.samples, cfg.seed)?;
            Ok(IrisRow {
                graph_id: graph_id(i),
                graph: g,
                exact_log,
                conjectured_log,
                mc_log: mc.log_value,
                mc_std_error: mc.std_error,
            })
        })
        .collect()
}

fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values
}

/// Sorted exact and conjectured values both within [`REFERENCE_TOLERANCE`] of the published ones.
pub fn matches_reference(rows: &[IrisRow]) -> bool {
    let close = |got: Vec<f64>, want: &[f64]| {
        got.len() == want.len() && got.iter().zip(want).all(|(a, b)| (a - b).abs() < REFERENCE_TOLERANCE)
    };
    close(sorted(rows.iter().map(|r| r.exact_log).collect()), &REFERENCE_EXACT)
        && close(sorted(rows.iter().map(|r| r.conjectured_log).collect()), &REFERENCE_CONJECTURED)
}

/// Runs the table centered, then uncentered, and returns the first convention that
/// reproduces the published values.
pub fn resolve_iris_table(cfg: &IrisConfig) -> Result<(Centering, Vec<IrisRow>)> {
    for centering in [Centering::Centered, Centering::Uncentered] {
        let rows = iris_table(&cfg.with_centering(centering))?;
        if matches_reference(&rows) {
            return Ok((centering, rows));
        }
    }
    Err(Error::TableMismatch {
        centered: cfg.with_centering(Centering::Centered).scatter()?,
        uncentered: cfg.with_centering(Centering::Uncentered).scatter()?,
    })
}

pub fn iris_csv(rows: &[IrisRow], centering: Centering, full_precision: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "graph_id",
        "edges",
        "centering",
        "exact_log",
        "conjectured_log",
        "mc_log",
        "mc_std_error",
        "mc_within_3se",
    ])?;
    for r in rows {
        w.write_record([
            r.graph_id.clone(),
            named_edges(&r.graph),
            centering.to_string(),
            format_number(r.exact_log, full_precision),
            format_number(r.conjectured_log, full_precision),
            format_number(r.mc_log, full_precision),
            format_number(r.mc_std_error, full_precision),
            r.mc_agrees().to_string(),
        ])?;
    }
    into_string(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolinKind {
    Mc,
    Exact,
    Conjectured,
}

impl ViolinKind {
    fn as_str(self) -> &'static str {
        match self {
            ViolinKind::Mc => "mc",
            ViolinKind::Exact => "exact",
            ViolinKind::Conjectured => "conjectured",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolinRow {
    pub graph_id: String,
    pub kind: ViolinKind,
    /// `None` on reference rows.
    pub seed: Option<u64>,
    pub log_estimate: f64,
    pub std_error: Option<f64>,
}

/// Monte Carlo replicates for each 4-cycle followed by the exact and conjectured
/// reference rows for each graph.
pub fn violin_data(cfg: &IrisConfig, seeds: &[u64], samples: usize) -> Result<Vec<ViolinRow>> {
    check_distinct(seeds)?;
    let delta = cfg.posterior_delta();
    let scale = cfg.posterior_scale()?;
    let graphs = nonchordal_graphs_4();
    let cells: Vec<(usize, u64)> = (0..graphs.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let mut rows = cells
        .into_par_iter()
        .map(|(i, seed)| {
            let mc = mc_constant(&graphs[i], delta, &scale, samples, seed)?;
            Ok(ViolinRow {
                graph_id: graph_id(i),
                kind: ViolinKind::Mc,
                seed: Some(seed),
                log_estimate: mc.log_value,
                std_error: Some(mc.std_error),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let references = graphs.par_iter().map(|g| reference_logs(g, delta, &scale)).collect::<Result<Vec<_>>>()?;
    for (i, (exact, conjectured)) in references.into_iter().enumerate() {
        for (kind, value) in [(ViolinKind::Exact, exact), (ViolinKind::Conjectured, conjectured)] {
            rows.push(ViolinRow { graph_id: graph_id(i), kind, seed: None, log_estimate: value, std_error: None });
        }
    }
    Ok(rows)
}

pub fn violin_csv(rows: &[ViolinRow], full_precision: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["graph_id", "kind", "seed", "log_estimate", "std_error"])?;
    for r in rows {
        w.write_record([
            r.graph_id.clone(),
            r.kind.as_str().to_owned(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            format_number(r.log_estimate, full_precision),
            r.std_error.map(|s| format_number(s, full_precision)).unwrap_or_default(),
        ])?;
    }
    into_string(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_table_first_row() {
        let rows = figure1_table(10).unwrap();
        assert_eq!(rows.len(), 10);
        assert!((rows[0].true_ratio - 0.405285).abs() < 1e-6);
        assert_eq!(rows[0].approx_ratio, 0.5);
        assert!(rows.iter().all(|r| r.approx_ratio > r.true_ratio));
        let last = rows[9];
        let rel = (last.approx_ratio - last.true_ratio) / last.true_ratio;
        assert!((rel / (1.0 / 200.0) - 1.0).abs() < 0.3);
        let csv = ratio_csv(&rows[..1], false).unwrap();
        assert_eq!(csv, "delta,true_ratio,approx_ratio\n1,0.405285,0.500000\n");
    }

    #[test]
    fn three_labelled_four_cycles() {
        let graphs = nonchordal_graphs_4();
        assert_eq!(graphs.len(), 3);
        for g in &graphs {
            assert!(!g.is_chordal());
            assert_eq!(g.edge_count(), 4);
            for (u, v) in chords(g) {
                assert!(g.with_edge(u, v).unwrap().is_chordal());
            }
        }
        assert_eq!(crate::formats::format_edges(&graphs[0], ","), "1-2,1-4,2-3,3-4");
        assert_eq!(named_edges(&graphs[2]), "SL-PL;SL-PW;SW-PL;SW-PW");
    }

    #[test]
    fn vendored_data_shape() {
        let cfg = IrisConfig::vendored();
        assert_eq!(cfg.rows.len(), 50);
        assert_eq!(cfg.posterior_delta(), 53.0);
        assert!(cfg.posterior_scale().unwrap().is_positive_definite());
        assert!(IrisConfig::from_csv("a,b\n1,2\n").is_err());
        assert_eq!("uncentered".parse::<Centering>().unwrap(), Centering::Uncentered);
        assert!("both".parse::<Centering>().is_err());
    }
}
