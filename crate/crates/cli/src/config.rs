use std::path::{Path, PathBuf};

use clap::Parser;
use epsilon_core::exactalg::parse_rat;
use epsilon_core::Rat;
use serde::Deserialize;

/// Epsilon factors and the product formula for rank-one connections `d + ω dz` on P¹.
#[derive(Parser, Debug, Default)]
#[command(name = "epsilon-rh", version)]
pub struct Args {
    /// Connection form ω, e.g. "1/2/z - 1"
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Additive character form ν (as ν dz)
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Working precision in decimal digits
    #[arg(long)]
    pub precision: Option<u32>,
    /// Regular rational point where fibers are normalized
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
    /// Also evaluate every local Gauss sum by direct integration
    #[arg(long)]
    pub oracle: bool,
    /// Drop undetermined Betti-field units from the closed forms
    #[arg(long)]
    pub omit_m_units: bool,
    /// Write the JSON report here
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Print the invariant table only, without numerics
    #[arg(long)]
    pub explain: bool,
    /// TOML file with the same keys; flags given on the command line win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    omega: Option<String>,
    nu: Option<String>,
    precision: Option<u32>,
    anchor: Option<String>,
    oracle: Option<bool>,
    omit_m_units: Option<bool>,
    json: Option<PathBuf>,
    explain: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub omega: String,
    pub nu: String,
    pub precision: u32,
    pub anchor: Rat,
    pub oracle: bool,
    pub omit_m_units: bool,
    pub json_out: Option<PathBuf>,
    pub explain: bool,
}

fn read_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

impl JobConfig {
    /// Merge flags over the optional config file. Errors are parse errors.
    pub fn from_args(args: Args) -> Result<JobConfig, String> {
        let file = match &args.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let omega = args.omega.or(file.omega).ok_or("no connection form given (--omega)")?;
        let anchor_s = args.anchor.or(file.anchor).unwrap_or_else(|| "1".into());
        let anchor = parse_rat(&anchor_s).ok_or_else(|| format!("anchor {anchor_s:?} is not a rational number"))?;
        let precision = args.precision.or(file.precision).unwrap_or(12);
        if !(4..=15).contains(&precision) {
            return Err(format!("precision {precision} outside 4..=15 digits"));
        }
        Ok(JobConfig {
            omega,
            nu: args.nu.or(file.nu).unwrap_or_else(|| "1".into()),
            precision,
            anchor,
            oracle: args.oracle || file.oracle.unwrap_or(false),
            omit_m_units: args.omit_m_units || file.omit_m_units.unwrap_or(false),
            json_out: args.json.or(file.json),
            explain: args.explain || file.explain.unwrap_or(false),
        })
    }
}
