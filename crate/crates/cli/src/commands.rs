use std::fmt::{self, Write as _};
use std::time::{SystemTime, UNIX_EPOCH};

use coxhom::polytope::mixed_volume;
use coxhom::solver::{solve_with, SliceStrategy, SolveConfig, SolveOutput};
use coxhom::startsys::{polyhedral_start, StartSystem};
use coxhom::system::SparseSystem;
use coxhom::toric::{CoxData, MV_SEED};

use crate::io::{InputError, SolutionFile, SystemFile};

#[derive(Debug)]
pub enum CliError {
    Input(InputError),
    Solver(coxhom::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e)
    }
}

impl From<coxhom::Error> for CliError {
    fn from(e: coxhom::Error) -> Self {
        CliError::Solver(e)
    }
}

pub fn read_system_file(path: &str) -> Result<SystemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    Ok(SystemFile::parse(&text)?)
}

pub fn write_output(path: &str, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tau_eg: f64,
    pub slice: SliceStrategy,
    pub seed: u64,
    pub start: Option<String>,
    pub record_condition: bool,
}

pub struct SolveReport {
    pub file: SolutionFile,
    pub output: SolveOutput,
}

impl SolveReport {
    pub fn exit_code(&self) -> i32 {
        if self.output.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Start pair from `--start`, from the system file's own start block, or generated.
fn start_for(file: &SystemFile, opts: &SolveOptions, cox: &CoxData) -> Result<StartSystem, CliError> {
    if let Some(path) = &opts.start {
        let start_file = read_system_file(path)?;
        return start_file
            .start_system()?
            .ok_or_else(|| CliError::Input(InputError::Invalid(format!("{path} has no start block"))));
    }
    if let Some(s) = file.start_system()? {
        return Ok(s);
    }
    Ok(polyhedral_start(&cox.supports, opts.seed)?)
}

pub fn solve(file: &SystemFile, opts: &SolveOptions) -> Result<SolveReport, CliError> {
    let system = file.system()?;
    let cox = CoxData::from_system(&system)?;
    let start = start_for(file, opts, &cox)?;
    let cfg = SolveConfig {
        tau_eg: opts.tau_eg,
        seed: opts.seed,
        slice: opts.slice,
        record_condition: opts.record_condition,
        ..SolveConfig::default()
    };
    let output = solve_with(&cox, &system, &start, &cfg)?;
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(SolveReport { file: SolutionFile::new(&cox, &cfg, &output, now), output })
}

/// Parses a comma-separated list of 1-based indices.
pub fn parse_stratum(text: &str, k: usize) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part
            .parse()
            .map_err(|_| CliError::Input(InputError::Invalid(format!("bad stratum index {part:?}"))))?;
        if i == 0 || i > k {
            return Err(CliError::Input(InputError::Invalid(format!("stratum index {i} outside 1..={k}"))));
        }
        out.push(i - 1);
    }
    Ok(out)
}

fn monomial(gen: &[usize]) -> String {
    gen.iter().map(|i| format!("x{}", i + 1)).collect::<Vec<_>>().join("*")
}

pub fn info(system: &SparseSystem, stratum: Option<&str>) -> Result<String, CliError> {
    let cox = CoxData::from_system(system)?;
    let mut s = String::new();
    let _ = writeln!(s, "n: {}", cox.n);
    let _ = writeln!(s, "k: {}", cox.k);
    let _ = writeln!(s, "rays:");
    for j in 0..cox.k {
        let _ = writeln!(s, "  x{}: {:?}", j + 1, cox.ray(j));
    }
    let _ = writeln!(s, "F:");
    for row in cox.f.to_rows_i64() {
        let _ = writeln!(s, "  {row:?}");
    }
    let _ = writeln!(s, "offsets:");
    for (i, a) in cox.offsets.iter().enumerate() {
        let _ = writeln!(s, "  f{}: {a:?}", i + 1);
    }
    let _ = writeln!(s, "class group: {}", cox.class_group());
    let gens: Vec<String> = cox.irrelevant_gens.iter().map(|g| monomial(g)).collect();
    let _ = writeln!(s, "irrelevant generators: {}", gens.join(", "));
    let _ = writeln!(s, "bkk: {}", cox.bkk);
    let _ = writeln!(s, "generic orbit degree: {}", cox.generic_orbit_degree);
    if let Some(text) = stratum {
        let idx = parse_stratum(text, cox.k)?;
        let d = cox.orbit_degree(&idx)?;
        let shown: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        let _ = writeln!(
            s,
            "orbit degree on stratum {{{}}}: {} (components {}, lattice index {}, volume {})",
            shown.join(","),
            d.degree,
            d.components,
            d.lattice_index,
            d.volume
        );
    }
    Ok(s)
}

pub fn mv(system: &SparseSystem) -> Result<u64, CliError> {
    Ok(mixed_volume(&system.supports(), MV_SEED)?)
}

/// The system file with a generated start block attached.
pub fn start(file: &SystemFile, seed: u64) -> Result<SystemFile, CliError> {
    let system = file.system()?;
    let start = polyhedral_start(&system.supports(), seed)?;
    Ok(SystemFile::from_system(file.variables.clone(), &system, Some(&start)))
}
