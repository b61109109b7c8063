//! `vanishing`: evaluate the vanishing predicate on a batch of descriptors,
//! or run the calibration scan for one blowup.

use std::io::Read;
use std::path::PathBuf;

use gamma_monodromy::gathmann::{crosscheck_against_bls, must_vanish, CorrelatorDescriptor, CrosscheckReport};
use serde::{Deserialize, Serialize};

use crate::report::{CliError, Envelope};

#[derive(Debug, Clone)]
pub enum VanishingArgs {
    /// JSON file with descriptors; `-` reads stdin.
    Input(PathBuf),
    Scan { n: usize, order: usize, dmax: usize },
}

/// Accepted input shapes: a bare array, or an object with a `descriptors` array.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Batch {
    List(Vec<CorrelatorDescriptor>),
    Wrapped { descriptors: Vec<CorrelatorDescriptor> },
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub descriptor: CorrelatorDescriptor,
    pub must_vanish: bool,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum VanishingReport {
    Batch { verdicts: Vec<Verdict> },
    Scan(CrosscheckReport),
}

pub fn parse_batch(text: &str) -> Result<Vec<CorrelatorDescriptor>, CliError> {
    let batch: Batch = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid descriptor batch: {e}")))?;
    let list = match batch {
        Batch::List(v) | Batch::Wrapped { descriptors: v } => v,
    };
    for (i, d) in list.iter().enumerate() {
        d.validate().map_err(|e| CliError::Usage(format!("descriptor {i}: {e}")))?;
    }
    Ok(list)
}

pub fn run(args: &VanishingArgs) -> Result<Envelope<VanishingReport>, CliError> {
    match args {
        VanishingArgs::Input(path) => {
            let mut text = String::new();
            if path.as_os_str() == "-" {
                std::io::stdin().read_to_string(&mut text)?;
            } else {
                text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            }
            let verdicts = parse_batch(&text)?
                .into_iter()
                .map(|d| Verdict { must_vanish: must_vanish(&d), descriptor: d })
                .collect();
            Ok(Envelope::new("vanishing", true, VanishingReport::Batch { verdicts }))
        }
        VanishingArgs::Scan { n, order, dmax } => {
            let r = crosscheck_against_bls(*n, *order, *dmax)?;
            Ok(Envelope::new("vanishing", r.passed(), VanishingReport::Scan(r)))
        }
    }
}
