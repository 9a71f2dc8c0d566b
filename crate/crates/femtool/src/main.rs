//! femtool: runs the bundled finite element examples and writes CSV.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use femtool_core::assembly::AssemblyOptions;
use femtool_core::femspace::{Element, FiniteElementSpace};
use femtool_core::geometry::{broad_phase_pairs, closest_pair_solvers, sparsity_pattern_with, PatternOptions};
use femtool_core::mesh::{load_mesh, uniform_rectangle_mesh, Diagonal, MeshSize, SimplicialMesh};
use femtool_core::problems::{convergence_study, examples, RunOptions, StudyLevel};
use femtool_core::quadrature::{error_factor, rule_cost, tensor_product_cost};
use femtool_core::solve::linear_solvers;
use femtool_core::FemError;

const COLUMNS: &str = "\
CSV columns:
  poisson, nonlinear, stokes, convdiff:
    h            longest edge of the mesh actually used
    dofs         number of unknowns
    <metric>     example-specific errors (l2_error, linf_error, pressure_l2_error,
                 velocity_l2_error) or diagnostics (divergence, max_u)
    rate_<m>     observed convergence rate of error metric m against the previous row
    iterations   Newton iterations (nonlinear) or linear-solver iterations
    residual     final residual norm
    wall_time_s  only with --timing
  convdiff additionally writes convdiff_field.csv (x, y, u at every vertex) when --out is given.
  quad-tables:
    n, d, gm_nodes, tensor_nodes, error_factor (two decimals), error_factor_exact
  sparsity:
    h, element, dofs, broad_phase_pairs, pattern_pairs, all_pairs, density

Every file starts with a '#' line recording the toolkit version and the configuration.
Exit status: 0 on success, 1 on numerical failure, 2 on configuration errors.";

#[derive(Parser, Debug)]
#[command(name = "femtool", version, about = "Finite element examples with geometric sparsity detection", after_help = COLUMNS)]
struct Cli {
    /// poisson, convdiff, nonlinear, stokes, quad-tables or sparsity
    example: String,

    /// Single mesh size, as a decimal or a fraction such as 1/32
    #[arg(long, conflicts_with = "h_seq")]
    h: Option<String>,

    /// Comma-separated, strictly decreasing mesh sizes, e.g. 1/4,1/8,1/16
    #[arg(long = "h-seq")]
    h_seq: Option<String>,

    /// Directory for the CSV files; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,

    /// Fixed odd quadrature degree for every integral
    #[arg(long = "quad-degree")]
    quad_degree: Option<usize>,

    /// Recorded in the metadata line; every example is deterministic
    #[arg(long)]
    seed: Option<u64>,

    /// Linear solver: direct, cg or dense
    #[arg(long, default_value = "direct")]
    solver: String,

    /// Closest-pair solver used by the sparsity report
    #[arg(long, default_value = "min-norm-point")]
    closest: String,

    /// Element for poisson, convdiff and sparsity: p1 or p2
    #[arg(long)]
    element: Option<String>,

    /// Run on this mesh file instead of the generated one (single level)
    #[arg(long, conflicts_with_all = ["h", "h_seq"])]
    mesh: Option<PathBuf>,

    /// Add a wall_time_s column (makes the output run-dependent)
    #[arg(long)]
    timing: bool,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Numerical(FemError),
    Io(io::Error),
}

impl From<FemError> for CliError {
    fn from(e: FemError) -> Self {
        Self::Numerical(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("femtool: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("femtool: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!("femtool: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_size(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad_size(s))?;
            let den: f64 = den.trim().parse().map_err(|_| bad_size(s))?;
            num / den
        }
        None => s.parse().map_err(|_| bad_size(s))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("mesh size must be positive, got `{s}`")))
    }
}

fn bad_size(s: &str) -> CliError {
    CliError::Config(format!("cannot parse mesh size `{s}`"))
}

fn sizes(cli: &Cli, default: Vec<f64>) -> CliResult<Vec<f64>> {
    let hs = match (&cli.h, &cli.h_seq) {
        (Some(h), _) => vec![parse_size(h)?],
        (None, Some(seq)) => seq.split(',').map(parse_size).collect::<CliResult<Vec<_>>>()?,
        (None, None) => default,
    };
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Config("--h-seq must be strictly decreasing".into()));
    }
    Ok(hs)
}

fn element(cli: &Cli) -> CliResult<Option<Element>> {
    match cli.element.as_deref() {
        None => Ok(None),
        Some("p1" | "P1") => Ok(Some(Element::P1)),
        Some("p2" | "P2") => Ok(Some(Element::P2)),
        Some(other) => Err(CliError::Config(format!("unknown element `{other}` (available: p1, p2)"))),
    }
}

/// Shortest round-trip form, in scientific notation outside [1e-3, 1e6).
fn num(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn metadata(cli: &Cli, hs: &[f64]) -> String {
    let list = |v: &[f64]| v.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(",");
    format!(
        "# femtool {} example={} h={} quad-degree={} solver={} closest={} element={} mesh={} seed={}",
        env!("CARGO_PKG_VERSION"),
        cli.example,
        if cli.mesh.is_some() { "from-mesh".to_string() } else { list(hs) },
        cli.quad_degree.map_or("auto".to_string(), |d| d.to_string()),
        cli.solver,
        cli.closest,
        cli.element.as_deref().unwrap_or("default"),
        cli.mesh.as_ref().map_or("generated".to_string(), |p| p.display().to_string()),
        cli.seed.map_or("none".to_string(), |s| s.to_string()),
    )
}

/// A CSV document: metadata line, header, rows.
struct Table {
    meta: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        writeln!(buf, "{}", self.meta)?;
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }
}

fn emit(cli: &Cli, name: &str, table: &Table) -> CliResult<()> {
    let bytes = table.render()?;
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(format!("{name}.csv")), bytes)?;
        }
        None => io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(d) = cli.quad_degree {
        if d % 2 == 0 {
            return Err(CliError::Config(format!("--quad-degree must be odd, got {d}")));
        }
    }
    let solver = linear_solvers().get(&cli.solver).map_err(|e| CliError::Config(e.to_string()))?;
    let closest = closest_pair_solvers().get(&cli.closest).map_err(|e| CliError::Config(e.to_string()))?;
    let element = element(cli)?;
    let assembly = AssemblyOptions {
        quadrature_degree: cli.quad_degree,
    };

    match cli.example.as_str() {
        "quad-tables" => quad_tables(cli),
        "sparsity" => {
            let hs = sizes(cli, vec![0.25, 0.125, 0.0625])?;
            let opts = PatternOptions {
                solver: closest,
                ..PatternOptions::default()
            };
            sparsity(cli, &hs, element, &opts)
        }
        name => {
            let registry = examples();
            let example = registry.get(name).map_err(|_| {
                CliError::Config(format!(
                    "unknown example `{name}` (available: {}, quad-tables, sparsity)",
                    registry.names().join(", ")
                ))
            })?;
            if element.is_some() && !matches!(name, "poisson" | "convdiff") {
                return Err(CliError::Config(format!("--element is not supported by `{name}`")));
            }
            let mesh = cli.mesh.as_deref().map(read_mesh).transpose()?;
            let hs = match &mesh {
                Some(m) => vec![m.max_edge_length()],
                None => sizes(cli, example.default_h_sequence())?,
            };
            let options = RunOptions {
                assembly,
                linear_solver: solver,
                mesh: mesh.map(Arc::new),
                element,
            };
            let study = convergence_study(example.as_ref(), &hs, &options)?;
            emit(cli, name, &study_table(cli, &hs, example.rate_metrics(), &study))?;
            if let (Some(dir), Some(field)) = (&cli.out, study.last().and_then(|l| l.run.field.as_ref())) {
                let table = Table {
                    meta: metadata(cli, &hs),
                    header: vec!["x".into(), "y".into(), "u".into()],
                    rows: field.iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect(),
                };
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("{name}_field.csv")), table.render()?)?;
            }
            Ok(())
        }
    }
}

fn read_mesh(path: &Path) -> CliResult<SimplicialMesh> {
    let file = fs::File::open(path).map_err(|e| CliError::Config(format!("cannot open mesh {}: {e}", path.display())))?;
    load_mesh(io::BufReader::new(file)).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn study_table(cli: &Cli, hs: &[f64], rate_metrics: &[&str], study: &[StudyLevel]) -> Table {
    let mut header = vec!["h".to_string(), "dofs".to_string()];
    if let Some(first) = study.first() {
        header.extend(first.run.metrics.iter().map(|(n, _)| n.to_string()));
    }
    header.extend(rate_metrics.iter().map(|m| format!("rate_{m}")));
    header.extend(["iterations".to_string(), "residual".to_string()]);
    if cli.timing {
        header.push("wall_time_s".into());
    }
    let rows = study
        .iter()
        .map(|level| {
            let r = &level.run;
            let mut row = vec![r.h.to_string(), r.dofs.to_string()];
            row.extend(r.metrics.iter().map(|(_, v)| num(*v)));
            row.extend(level.rates.iter().map(|(_, rate)| rate.map_or(String::new(), num)));
            row.extend([r.iterations.to_string(), num(r.residual)]);
            if cli.timing {
                row.push(r.wall_time.as_secs_f64().to_string());
            }
            row
        })
        .collect();
    Table {
        meta: metadata(cli, hs),
        header,
        rows,
    }
}

fn quad_tables(cli: &Cli) -> CliResult<()> {
    let mut rows = Vec::new();
    for n in 1..=10 {
        for d in [3, 5, 7] {
            let ef = error_factor(n, d)?.error_factor;
            rows.push(vec![
                n.to_string(),
                d.to_string(),
                rule_cost(n, d)?.to_string(),
                tensor_product_cost(n, d)?.to_string(),
                format!("{ef:.2}"),
                ef.to_string(),
            ]);
        }
    }
    let header = ["n", "d", "gm_nodes", "tensor_nodes", "error_factor", "error_factor_exact"];
    emit(
        cli,
        "quad-tables",
        &Table {
            meta: metadata(cli, &[]),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        },
    )
}

fn sparsity(cli: &Cli, hs: &[f64], element: Option<Element>, opts: &PatternOptions) -> CliResult<()> {
    let elements = element.map_or(vec![Element::P1, Element::P2], |e| vec![e]);
    let mut rows = Vec::new();
    for &h in hs {
        let grid = uniform_rectangle_mesh((-1.0, 1.0), (-1.0, 1.0), MeshSize::MaxSide(h), Diagonal::Forward)?;
        let mesh = Arc::new(grid.mesh);
        for &e in &elements {
            let space = FiniteElementSpace::new(Arc::clone(&mesh), e, &mesh.dirichlet_facets())?;
            let hulls = space.support_hulls();
            let boxes: Vec<_> = hulls.iter().map(|p| p.bounding_box()).collect();
            let candidates = broad_phase_pairs(&boxes, &boxes).len();
            let pattern = sparsity_pattern_with(&hulls, &hulls, opts)?;
            let all = space.len() * space.len();
            rows.push(vec![
                grid.max_side.to_string(),
                format!("{e:?}"),
                space.len().to_string(),
                candidates.to_string(),
                pattern.len().to_string(),
                all.to_string(),
                num(pattern.len() as f64 / all as f64),
            ]);
        }
    }
    let header = ["h", "element", "dofs", "broad_phase_pairs", "pattern_pairs", "all_pairs", "density"];
    emit(
        cli,
        "sparsity",
        &Table {
            meta: metadata(cli, hs),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        },
    )
}
