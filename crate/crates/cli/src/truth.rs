//! Ground truth over the whole configuration space, cached by program hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ccrush_core::baselines::{brute_force, BaselineError};
use ccrush_core::exec::end_to_end_all;
use ccrush_core::lang::Program;
use ccrush_core::{Configuration, Millis, OptionSet};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub configuration: Configuration,
    pub ms: Millis,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// SHA-256 of the program source.
    pub program: String,
    pub options: OptionSet,
    pub rows: Vec<TruthRow>,
}

impl GroundTruth {
    pub fn pairs(&self) -> Vec<(Configuration, Millis)> {
        self.rows.iter().map(|r| (r.configuration.clone(), r.ms)).collect()
    }
}

pub fn source_hash(source: &str) -> String {
    hex::encode(Sha256::digest(source.as_bytes()))
}

pub fn cache_path(dir: &Path, hash: &str) -> PathBuf {
    dir.join(format!("{hash}.gt.json"))
}

/// Measures every configuration, in binary-counter order.
pub fn compute(program: &Program, hash: &str, jobs: usize) -> Result<GroundTruth, CliError> {
    let plan = brute_force(program.options()).map_err(|e| match e {
        BaselineError::CapExceeded { options, cap } => CliError::Cap { options, cap },
        other => CliError::Input(other.to_string()),
    })?;
    let times = end_to_end_all(program, &plan.configurations, jobs).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(GroundTruth {
        program: hash.to_string(),
        options: program.options().clone(),
        rows: plan
            .configurations
            .into_iter()
            .zip(times)
            .map(|(configuration, ms)| TruthRow { configuration, ms })
            .collect(),
    })
}

/// Loads the cached ground truth if present, otherwise computes and stores
/// it. The flag tells whether the cache was hit.
pub fn load_or_compute(
    program: &Program,
    source: &str,
    cache: Option<&Path>,
    jobs: usize,
) -> Result<(GroundTruth, bool), CliError> {
    let hash = source_hash(source);
    let Some(dir) = cache else {
        return Ok((compute(program, &hash, jobs)?, false));
    };
    let path = cache_path(dir, &hash);
    if path.exists() {
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let gt: GroundTruth = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: corrupt ground-truth cache: {e}", path.display())))?;
        if gt.program != hash {
            return Err(CliError::Input(format!("{}: cache belongs to another program", path.display())));
        }
        return Ok((gt, true));
    }
    let gt = compute(program, &hash, jobs)?;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string(&gt).expect("ground truth serializes")).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
    Ok((gt, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccrush_core::corpus;

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(source_hash("").len(), 64);
        assert_eq!(&source_hash("abc")[..8], "ba7816bf");
    }

    #[test]
    fn short_example_truth() {
        let p = corpus::running_example_short();
        let gt = compute(&p, "h", 2).unwrap();
        assert_eq!(gt.rows.len(), 1024);
        assert_eq!(gt.rows[0].ms, Millis::from_integer(1000));
    }
}
