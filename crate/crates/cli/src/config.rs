use std::path::PathBuf;

use flexinfo_core::io::vec_from_json;
use flexinfo_core::{ArithmeticMode, Belief, Scalar};
use serde_json::{json, Value};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_250_101;

/// Everything a command depends on; recorded in every report.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub mode: ArithmeticMode,
    pub grid: Option<usize>,
    pub out: PathBuf,
    pub seed: u64,
    /// Raw `p1,p2,...` strings, parsed in the run's arithmetic mode.
    pub priors: Vec<String>,
}

impl RunConfig {
    pub fn new(command: &str, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            command: command.to_owned(),
            inputs: Vec::new(),
            mode: ArithmeticMode::Exact,
            grid: None,
            out: out.into(),
            seed: DEFAULT_SEED,
            priors: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "mode": self.mode.as_str(),
            "grid": self.grid,
            "seed": self.seed,
            "priors": self.priors,
        })
    }

    pub fn parse_priors<S: Scalar>(&self) -> Result<Vec<Belief<S>>, CliError> {
        self.priors.iter().map(|p| parse_prior(p)).collect()
    }

    /// Creates the output directory and checks that it accepts files.
    pub fn prepare_out(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", self.out.display())))?;
        let meta = std::fs::metadata(&self.out)
            .map_err(|e| CliError::Input(format!("cannot inspect {}: {e}", self.out.display())))?;
        if meta.permissions().readonly() {
            return Err(CliError::Input(format!("{} is not writable", self.out.display())));
        }
        Ok(())
    }
}

/// `"3/10,7/10"` or `"0.3,0.7"`.
pub fn parse_prior<S: Scalar>(text: &str) -> Result<Belief<S>, CliError> {
    let items: Vec<Value> = text.split(',').map(|s| Value::String(s.trim().to_owned())).collect();
    let v = vec_from_json::<S>(&Value::Array(items), "--prior")?;
    Ok(Belief::new(v)?)
}
