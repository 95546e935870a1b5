//! Command-line scenario runner.

mod energies;
mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use energies::{parse_energies, parse_energies_str, parse_state_energies};
pub use format::{fmt_num, render_table, to_csv, LabeledMatrix};

use crate::coupling::{
    classify_exchange, couple, like_particle_pairs, scheme_overlap, CoupledBasis, CoupledState, CouplingTree,
    Preset,
};
use crate::error::Error;
use crate::half::HalfInt;
use crate::spin_core::{CMatrix, Species, SpinSystem};
use crate::zeeman::{classify, field_grid, level_curves, moment_matrix, DegeneracySpec, ZeemanOrder};

#[derive(Debug, Parser)]
#[command(name = "ps2spin", version, about = "Coupled spin bases and Zeeman analysis for positronium-like systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coupled states as rows over product states.
    Basis(ScenarioArgs),
    /// Matrix of μ_z in the coupled basis.
    Moment(ScenarioArgs),
    /// Linear / quadratic / no Zeeman shift per coupled state.
    Classify(ScenarioArgs),
    /// Level curves E(B) over a field grid.
    Sweep(ScenarioArgs),
    /// Parity of each coupled state under like-particle exchanges.
    Exchange(ScenarioArgs),
    /// Overlaps between two coupling schemes.
    Overlap(OverlapArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Preset (dipositronium, positronium) or comma-separated species, e.g. "e,p,e".
    #[arg(long, default_value = "dipositronium")]
    pub system: String,
    /// like-pairs, positronium-pairs, or a tree such as "((e1,e2),(p1,p2))".
    #[arg(long)]
    pub scheme: Option<String>,
    /// Restrict to one spin projection, e.g. 1, -1, 1/2.
    #[arg(long = "m", allow_hyphen_values = true)]
    pub m: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// File of `label,energy` lines giving zero-field energies.
    #[arg(long)]
    pub energies: Option<PathBuf>,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub bmin: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub bmax: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Magnetic-moment unit.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mu0: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Scheme for the columns; defaults to the other dipositronium preset.
    #[arg(long)]
    pub against: Option<String>,
}

/// A resolved scenario.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub system_name: String,
    pub system: SpinSystem,
    pub tree: CouplingTree,
    pub sector: Option<HalfInt>,
    pub degeneracy: Option<PathBuf>,
    pub sweep: (f64, f64, usize),
    pub format: OutputFormat,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn resolve_system(spec: &str, mu0: f64) -> Result<(String, SpinSystem), CliError> {
    let system = match spec.trim() {
        "dipositronium" | "ps2" => SpinSystem::dipositronium(),
        "positronium" | "ps" => SpinSystem::positronium(),
        list if list.contains(',') || list.len() == 1 => {
            let species = list.split(',').map(Species::parse).collect::<Result<Vec<_>, _>>().map_err(usage)?;
            SpinSystem::new(&species).map_err(usage)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown system '{other}'; use dipositronium, positronium, or a species list like e,p,e,p"
            )))
        }
    };
    Ok((spec.trim().to_string(), system.with_mu0(mu0).map_err(usage)?))
}

fn resolve_tree(scheme: Option<&str>, system: &SpinSystem, fallback: Preset) -> Result<CouplingTree, CliError> {
    let four = system.dimension() == 16 && CouplingTree::like_pairs().check_system(system).is_ok();
    match scheme.map(str::trim) {
        Some("like-pairs") if four => Ok(CouplingTree::like_pairs()),
        Some("positronium-pairs") if four => Ok(CouplingTree::positronium_pairs()),
        Some("positronium-pairs") if system.len() == 2 => CouplingTree::parse("(0,1)", system).map_err(usage),
        Some(name @ ("like-pairs" | "positronium-pairs")) => Err(CliError::Usage(format!(
            "scheme '{name}' needs the dipositronium system; give an explicit tree such as \"(e1,p1)\""
        ))),
        Some(expr) if expr.starts_with('(') || system.index_of(expr).is_some() => {
            CouplingTree::parse(expr, system).map_err(|e| CliError::Usage(format!("{e} in scheme '{expr}'")))
        }
        Some(other) => Err(CliError::Usage(format!(
            "unknown scheme '{other}'; use like-pairs, positronium-pairs, or a tree like \"((e1,e2),(p1,p2))\""
        ))),
        None if four => Ok(CouplingTree::preset(fallback)),
        None => CouplingTree::sequential(system.len()).map_err(usage),
    }
}

fn parse_m(s: &str) -> Result<HalfInt, CliError> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("invalid --m value '{s}'; use an integer or n/2"));
    let value = match s.split_once('/') {
        Some((num, "2")) => num.trim().parse::<i32>().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => 2 * s.parse::<i32>().map_err(|_| bad())?,
    };
    Ok(HalfInt::from_twice(value))
}

impl ScenarioConfig {
    fn from_args(args: &ScenarioArgs) -> Result<Self, CliError> {
        let (system_name, system) = resolve_system(&args.system, args.mu0)?;
        let tree = resolve_tree(args.scheme.as_deref(), &system, Preset::LikePairs)?;
        let sector = args.m.as_deref().map(parse_m).transpose()?;
        if let Some(path) = &args.energies {
            if !path.is_file() {
                return Err(CliError::Usage(format!("energies file '{}' not found", path.display())));
            }
        }
        Ok(ScenarioConfig {
            system_name,
            system,
            tree,
            sector,
            degeneracy: args.energies.clone(),
            sweep: (args.bmin, args.bmax, args.steps),
            format: args.format,
        })
    }

    fn header(&self, command: &str) -> String {
        let m = self.sector.map_or("all".to_string(), |m| m.to_string());
        format!(
            "# {command} system={} scheme={} M={m} mu0={}\n",
            self.system_name,
            self.tree.render(&self.system),
            fmt_num(self.system.mu0(), 0.0)
        )
    }

    /// Selected states: one sector, or every sector by descending `M`.
    fn states(&self, basis: &CoupledBasis) -> Vec<CoupledState> {
        match self.sector {
            Some(m) => basis.m_sector(m).rows,
            None => basis.m_values().into_iter().flat_map(|m| basis.m_sector(m).rows).collect(),
        }
    }

    fn degeneracy(&self, basis: &CoupledBasis, states: &[CoupledState]) -> Result<DegeneracySpec, CliError> {
        match &self.degeneracy {
            None => Ok(DegeneracySpec::singletons(states.len())),
            Some(path) => {
                let all: Vec<String> = basis.states().iter().map(|s| s.label.clone()).collect();
                let text = energies::read_energies(path).map_err(usage)?;
                let energies = parse_state_energies(&text, &all)?;
                let selected: Vec<f64> = states
                    .iter()
                    .map(|s| energies[all.iter().position(|l| *l == s.label).expect("state from basis")])
                    .collect();
                Ok(DegeneracySpec::from_state_energies(&selected)?)
            }
        }
    }
}

/// Parses `args` (including the program name) and runs one command. Returns
/// the process exit code: 0 success, 1 domain error, 2 usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(CliError::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Basis(a) => basis_cmd(&ScenarioConfig::from_args(a)?),
        Command::Moment(a) => moment_cmd(&ScenarioConfig::from_args(a)?),
        Command::Classify(a) => classify_cmd(&ScenarioConfig::from_args(a)?),
        Command::Sweep(a) => sweep_cmd(&ScenarioConfig::from_args(a)?),
        Command::Exchange(a) => exchange_cmd(&ScenarioConfig::from_args(a)?),
        Command::Overlap(a) => {
            let cfg = ScenarioConfig::from_args(&a.scenario)?;
            let other = match cfg.tree.preset_kind() {
                Some(Preset::LikePairs) => Preset::PositroniumPairs,
                _ => Preset::LikePairs,
            };
            let against = match a.against.as_deref() {
                Some(s) => resolve_tree(Some(s), &cfg.system, other)?,
                None => resolve_tree(None, &cfg.system, other)?,
            };
            overlap_cmd(&cfg, &against)
        }
    }
}

fn labels(states: &[CoupledState]) -> Vec<String> {
    states.iter().map(|s| s.label.clone()).collect()
}

fn emit_matrix(cfg: &ScenarioConfig, command: &str, m: &LabeledMatrix<'_>) -> String {
    match cfg.format {
        OutputFormat::Table => cfg.header(command) + &m.table("state"),
        OutputFormat::Json => m.json(),
        OutputFormat::Csv => m.csv("state"),
    }
}

fn basis_cmd(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let basis = couple(&cfg.system, &cfg.tree)?;
    let (rows, cols, matrix) = match cfg.sector {
        Some(m) => {
            let t = basis.m_sector(m);
            (t.row_labels(), t.column_labels(), t.matrix)
        }
        None => {
            let states = cfg.states(&basis);
            let t = basis.transform();
            let matrix = CMatrix::from_fn(states.len(), t.columns.len(), |r, c| states[r].vector[t.columns[c].index]);
            (labels(&states), t.column_labels(), matrix)
        }
    };
    Ok(emit_matrix(cfg, "basis", &LabeledMatrix { rows: &rows, cols: &cols, entries: &matrix }))
}

fn moment_cmd(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let basis = couple(&cfg.system, &cfg.tree)?;
    let states = cfg.states(&basis);
    let mm = moment_matrix(&cfg.system, &states)?;
    Ok(emit_matrix(cfg, "moment", &LabeledMatrix { rows: &mm.labels, cols: &mm.labels, entries: &mm.entries }))
}

fn overlap_cmd(cfg: &ScenarioConfig, against: &CouplingTree) -> Result<String, CliError> {
    let a = couple(&cfg.system, &cfg.tree)?;
    let b = couple(&cfg.system, against)?;
    let (sa, sb) = (cfg.states(&a), cfg.states(&b));
    let entries = if cfg.sector.is_some() {
        CMatrix::from_fn(sa.len(), sb.len(), |i, j| sa[i].vector.dotc(&sb[j].vector))
    } else {
        scheme_overlap(&sa, &sb)?
    };
    let (ra, rb) = (labels(&sa), labels(&sb));
    let m = LabeledMatrix { rows: &ra, cols: &rb, entries: &entries };
    Ok(match cfg.format {
        OutputFormat::Table => {
            let mut head = cfg.header("overlap");
            head.push_str(&format!("# against={}\n", against.render(&cfg.system)));
            head + &m.table("state")
        }
        OutputFormat::Json => m.json(),
        OutputFormat::Csv => m.csv("state"),
    })
}

fn classify_cmd(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let basis = couple(&cfg.system, &cfg.tree)?;
    let states = cfg.states(&basis);
    let mm = moment_matrix(&cfg.system, &states)?;
    let spec = cfg.degeneracy(&basis, &states)?;
    let report = classify(&mm, &spec)?;
    let snap = format::snap_for(report.states.iter().map(|s| &s.moment));
    let header: Vec<String> =
        ["state", "M", "group", "<mu_z>", "slope", "class", "partners"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = report
        .states
        .iter()
        .map(|s| {
            vec![
                s.label.clone(),
                s.m.to_string(),
                s.group.to_string(),
                fmt_num(s.moment, snap),
                fmt_num(s.linear_slope, snap),
                s.classification.to_string(),
                s.quadratic_partners.join(" "),
            ]
        })
        .collect();
    Ok(match cfg.format {
        OutputFormat::Table => {
            let mut text = cfg.header("classify") + &render_table(&header, &rows);
            text.push_str(&format!(
                "# LINEAR={} QUADRATIC={} NONE={}\n",
                report.count(ZeemanOrder::Linear),
                report.count(ZeemanOrder::Quadratic),
                report.count(ZeemanOrder::None)
            ));
            text
        }
        OutputFormat::Csv => to_csv(&header, &rows),
        OutputFormat::Json => {
            let items: Vec<String> = report
                .states
                .iter()
                .map(|s| {
                    let partners: Vec<String> = s.quadratic_partners.iter().map(|p| format::json_string(p)).collect();
                    format!(
                        "{{\"label\":{},\"M\":{},\"group\":{},\"moment\":{},\"slope\":{},\"class\":\"{}\",\"partners\":[{}]}}",
                        format::json_string(&s.label),
                        fmt_num(s.m.value(), 0.0),
                        s.group,
                        fmt_num(s.moment, snap),
                        fmt_num(s.linear_slope, snap),
                        s.classification,
                        partners.join(",")
                    )
                })
                .collect();
            format!("{{\"states\":[{}]}}\n", items.join(","))
        }
    })
}

fn sweep_cmd(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let basis = couple(&cfg.system, &cfg.tree)?;
    let states = cfg.states(&basis);
    let mm = moment_matrix(&cfg.system, &states)?;
    let spec = cfg.degeneracy(&basis, &states)?;
    let (lo, hi, steps) = cfg.sweep;
    let fields = field_grid(lo, hi, steps).map_err(usage)?;
    let curves = level_curves(&mm, &spec, &fields)?;
    let snap = format::snap_for(curves.curves.iter().flat_map(|c| c.energies.iter()));
    let bsnap = format::snap_for(fields.iter());
    Ok(match cfg.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = curves
                .rows()
                .into_iter()
                .map(|(b, label, e)| vec![fmt_num(b, bsnap), label.to_string(), fmt_num(e, snap)])
                .collect();
            to_csv(&["B".into(), "label".into(), "energy".into()], &rows)
        }
        OutputFormat::Table => {
            let mut header = vec!["B".to_string()];
            header.extend(curves.curves.iter().map(|c| c.label.clone()));
            let rows: Vec<Vec<String>> = fields
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let mut row = vec![fmt_num(*b, bsnap)];
                    row.extend(curves.curves.iter().map(|c| fmt_num(c.energies[i], snap)));
                    row
                })
                .collect();
            let mut text = cfg.header("sweep") + &render_table(&header, &rows);
            let flagged: Vec<&str> =
                curves.curves.iter().filter(|c| c.ambiguous).map(|c| c.label.as_str()).collect();
            if !flagged.is_empty() {
                text.push_str(&format!("# ambiguous tracking: {}\n", flagged.join(" ")));
            }
            text
        }
        OutputFormat::Json => {
            let fs: Vec<String> = fields.iter().map(|b| fmt_num(*b, bsnap)).collect();
            let cs: Vec<String> = curves
                .curves
                .iter()
                .map(|c| {
                    let es: Vec<String> = c.energies.iter().map(|e| fmt_num(*e, snap)).collect();
                    format!(
                        "{{\"label\":{},\"energies\":[{}],\"ambiguous\":{}}}",
                        format::json_string(&c.label),
                        es.join(","),
                        c.ambiguous
                    )
                })
                .collect();
            format!("{{\"fields\":[{}],\"curves\":[{}]}}\n", fs.join(","), cs.join(","))
        }
    })
}

fn exchange_cmd(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let basis = couple(&cfg.system, &cfg.tree)?;
    let states = cfg.states(&basis);
    let pairs = like_particle_pairs(&cfg.system);
    let table = classify_exchange(&cfg.system, &states, &pairs)?;
    let mut header = vec!["state".to_string()];
    header.extend(
        pairs
            .iter()
            .map(|&(i, j)| format!("{}<->{}", cfg.system.name(i), cfg.system.name(j))),
    );
    let rows: Vec<Vec<String>> = states
        .iter()
        .zip(&table)
        .map(|(s, parities)| {
            let mut row = vec![s.label.clone()];
            row.extend(parities.iter().map(ToString::to_string));
            row
        })
        .collect();
    Ok(match cfg.format {
        OutputFormat::Table => cfg.header("exchange") + &render_table(&header, &rows),
        OutputFormat::Csv => to_csv(&header, &rows),
        OutputFormat::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|r| {
                    let ps: Vec<String> = r[1..].iter().map(|p| format::json_string(p)).collect();
                    format!("{{\"label\":{},\"parities\":[{}]}}", format::json_string(&r[0]), ps.join(","))
                })
                .collect();
            let ps: Vec<String> = header[1..].iter().map(|p| format::json_string(p)).collect();
            format!("{{\"pairs\":[{}],\"states\":[{}]}}\n", ps.join(","), items.join(","))
        }
    })
}
