//! On-disk problem instances and channels.

use std::path::Path;

use serde::{Deserialize, Serialize};

use secrecy_core::{AuxChannel, DistortionMatrix, Pmf, ProblemInstance};

use crate::CliError;

/// A problem instance as stored in JSON. Labels are optional and default to `0..n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction_alphabet: Option<Vec<String>>,
    pub pmf: Vec<f64>,
    pub distortion: Vec<Vec<f64>>,
}

/// A validated instance with its labels.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: ProblemInstance,
    pub source_labels: Vec<String>,
    pub reconstruction_labels: Vec<String>,
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn check_labels(labels: &Option<Vec<String>>, expected: usize, what: &str) -> Result<Vec<String>, CliError> {
    match labels {
        None => Ok(default_labels(expected)),
        Some(l) if l.len() == expected => Ok(l.clone()),
        Some(l) => Err(CliError::Usage(format!("{what} has {} labels but {expected} symbols", l.len()))),
    }
}

impl InstanceFile {
    pub fn validate(&self) -> Result<LoadedInstance, CliError> {
        let source = Pmf::new(self.pmf.clone())?;
        let distortion = DistortionMatrix::new(self.distortion.clone())?;
        let instance = ProblemInstance::new(source, distortion)?;
        let source_labels = check_labels(&self.source_alphabet, instance.source.len(), "source_alphabet")?;
        let reconstruction_labels = check_labels(
            &self.reconstruction_alphabet,
            instance.distortion.reconstruction_len(),
            "reconstruction_alphabet",
        )?;
        Ok(LoadedInstance {
            instance,
            source_labels,
            reconstruction_labels,
        })
    }
}

pub fn load_instance(path: &Path) -> Result<LoadedInstance, CliError> {
    let text = read(path)?;
    let file: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{} is not a valid instance file: {e}", path.display())))?;
    file.validate()
}

/// Channel files hold `{"cond": [[p(u|x) for x] for u]}`, the format `oracle` emits.
pub fn load_channel(path: &Path) -> Result<AuxChannel, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not a valid channel file: {e}", path.display())))
}
