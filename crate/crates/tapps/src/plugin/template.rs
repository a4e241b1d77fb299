//! The `template` plugin: a minimal worked example of the plugin contract.
//!
//! It copies the input dataframe's series and rows into the results frame
//! unchanged, which makes it handy both as a starting point for new
//! plugins and as a fixture for tests that only care about the plumbing.

use crate::plugin::{ParameterSet, PluginError};

/// Plugin entry point: echo the input dataframe into the results frame.
pub fn entry(mut p: ParameterSet) -> Result<ParameterSet, PluginError> {
    let input = p
        .input_frame
        .as_ref()
        .ok_or_else(|| PluginError::Failed("no input dataframe bound".to_string()))?;
    let results_name = match &p.results_frame {
        Some(f) => f.name().to_string(),
        None => return Err(PluginError::Failed("no results dataframe provided".to_string())),
    };
    let mut copied = input.clone();
    copied.set_name(&results_name);
    p.results_frame = Some(copied);
    Ok(p)
}
