//! Reading input files.

use std::fs;
use std::path::{Path, PathBuf};

use groupoid_moduli::algebroid::{catalog, poisson_to_algebroid, AlgebroidData, AlgebroidSpec, ExprSource, FieldSpec, PoissonData, PoissonSpec};
use groupoid_moduli::fingroupoid::{GroupoidSpec, GroupoidTables, SubgroupoidSpec};
use groupoid_moduli::{CwSurface, FiniteGroupoid, Subgroupoid, SurfaceSpec};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

/// Anything that should end the run with exit code 2.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path} is not valid input: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{0}")]
    Argument(String),
}

impl InputError {
    fn invalid(path: &Path, err: impl ToString) -> Self {
        InputError::Invalid { path: path.to_path_buf(), message: err.to_string() }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Read { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| InputError::Parse { path: path.to_path_buf(), source })
}

/// Raw tables when the file holds them, so that `validate` can report axiom
/// failures instead of rejecting the input.
pub enum GroupoidInput {
    Tables(GroupoidTables),
    Built(FiniteGroupoid),
}

pub fn groupoid_input(path: &Path) -> Result<GroupoidInput, InputError> {
    match read_json::<GroupoidSpec>(path)? {
        GroupoidSpec::Tables(t) => Ok(GroupoidInput::Tables(t)),
        spec => spec.build().map(GroupoidInput::Built).map_err(|e| InputError::invalid(path, e)),
    }
}

pub fn groupoid(path: &Path) -> Result<FiniteGroupoid, InputError> {
    read_json::<GroupoidSpec>(path)?.build().map_err(|e| InputError::invalid(path, e))
}

/// `base` and `full` name the two standard subgroupoids; anything else is a
/// file path.
pub fn subgroupoid(g: &FiniteGroupoid, arg: &str) -> Result<Subgroupoid, InputError> {
    let path = Path::new(arg);
    let spec: SubgroupoidSpec = match arg {
        "base" | "full" => serde_json::from_value(serde_json::Value::String(arg.to_string()))
            .map_err(|source| InputError::Parse { path: path.to_path_buf(), source })?,
        _ => read_json(path)?,
    };
    spec.build(g).map_err(|e| InputError::invalid(path, e))
}

pub fn surface(path: &Path) -> Result<CwSurface, InputError> {
    read_json::<SurfaceSpec>(path)?.build().map_err(|e| InputError::invalid(path, e))
}

/// `{"catalog": name}` or an explicit Poisson bivector.
#[derive(Deserialize)]
#[serde(untagged)]
enum PoissonFile {
    Catalog { catalog: String },
    Explicit(PoissonSpec),
}

/// `{"catalog": name}`, `{"from_poisson": <poisson file>}` or an explicit
/// algebroid.
#[derive(Deserialize)]
#[serde(untagged)]
enum AlgebroidFile {
    Catalog { catalog: String },
    FromPoisson { from_poisson: PoissonFile },
    Explicit(AlgebroidSpec),
}

fn poisson_spec(file: PoissonFile, path: &Path) -> Result<PoissonSpec, InputError> {
    match file {
        PoissonFile::Catalog { catalog: name } => catalog::poisson(&name).map_err(|e| InputError::invalid(path, e)),
        PoissonFile::Explicit(spec) => Ok(spec),
    }
}

pub fn poisson(path: &Path) -> Result<PoissonData, InputError> {
    poisson_spec(read_json(path)?, path)?.build().map_err(|e| InputError::invalid(path, e))
}

/// `h` is the finite-difference step used for the structure functions of a
/// Poisson-derived algebroid.
pub fn algebroid(path: &Path, h: f64) -> Result<AlgebroidData, InputError> {
    match read_json::<AlgebroidFile>(path)? {
        AlgebroidFile::Catalog { catalog: name } => {
            catalog::algebroid(&name).and_then(|s| s.build()).map_err(|e| InputError::invalid(path, e))
        }
        AlgebroidFile::FromPoisson { from_poisson } => {
            let p = poisson_spec(from_poisson, path)?.build().map_err(|e| InputError::invalid(path, e))?;
            Ok(poisson_to_algebroid(&p, h))
        }
        AlgebroidFile::Explicit(spec) => spec.build().map_err(|e| InputError::invalid(path, e)),
    }
}

pub fn field(path: &Path) -> Result<FieldSpec, InputError> {
    read_json(path)
}

/// A JSON array of expressions in `u1, u2`, one per algebroid index.
pub fn expressions(path: &Path) -> Result<Vec<ExprSource>, InputError> {
    read_json(path)
}
