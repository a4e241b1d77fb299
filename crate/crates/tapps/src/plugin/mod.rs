//! Plugin discovery and the parameter-set contract.
//!
//! A plugin is advertised by a folder `<name>_<release>` holding a plain
//! `manifest` file, and implemented by an entry function compiled into
//! this binary's registry. Discovery walks the plugins directory, checks
//! each folder against the naming rule and its manifest against the
//! registry, and reports what loaded and what failed (with a reason).
//! Plugins communicate only through a ParameterSet: an input frame goes
//! in, a results frame comes out.

pub mod summarize;
pub mod template;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::dataframe::DataFrame;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PluginError {
    #[error("value at series '{series}', label '{label}' is not numeric")]
    NonNumericCell { series: String, label: String },
    #[error("{0}")]
    Failed(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ManifestError {
    #[error("manifest line {0} is not a 'key: value' pair")]
    BadLine(usize),
    #[error("manifest is missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("release must be a positive integer, got '{0}'")]
    BadRelease(String),
    #[error("instructions block is never closed with '>>'")]
    UnterminatedInstructions,
}

/// Errors from driving a plugin entry over a parameter set.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("parameter set has no input dataframe")]
    MissingInputFrame,
    #[error("plugin failed: {0}")]
    PluginFailure(String),
}

/// Folder naming rule: a single lowercase word, one underscore, then an
/// integer release number.
pub fn validate_name(folder: &str) -> bool {
    let Some((name, release)) = folder.split_once('_') else {
        return false;
    };
    !name.is_empty()
        && name.bytes().all(|b| b.is_ascii_lowercase())
        && !release.is_empty()
        && release.bytes().all(|b| b.is_ascii_digit())
}

/// Parsed `manifest` file: identity and user-facing help for one plugin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub plugin_name: String,
    pub release: u32,
    pub description: String,
    pub instructions: String,
}

/// Parse the line-oriented manifest format: `key: value` pairs plus an
/// optional multi-line block between `instructions<<` and `>>` lines.
pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let mut plugin_name = None;
    let mut release = None;
    let mut description = None;
    let mut instructions = String::new();
    let mut lines = text.lines().enumerate();
    while let Some((idx, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "instructions<<" {
            let mut block = Vec::new();
            let mut closed = false;
            for (_, inner) in lines.by_ref() {
                if inner.trim() == ">>" {
                    closed = true;
                    break;
                }
                block.push(inner.to_string());
            }
            if !closed {
                return Err(ManifestError::UnterminatedInstructions);
            }
            instructions = block.join("\n");
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(ManifestError::BadLine(idx + 1));
        };
        let value = value.trim();
        match key.trim() {
            "plugin_name" => plugin_name = Some(value.to_string()),
            "release" => {
                let parsed: Option<u32> = value.parse().ok().filter(|r| *r > 0);
                release = Some(parsed.ok_or_else(|| ManifestError::BadRelease(value.to_string()))?);
            }
            "description" => description = Some(value.to_string()),
            _ => {}
        }
    }
    Ok(Manifest {
        plugin_name: plugin_name.ok_or(ManifestError::MissingKey("plugin_name"))?,
        release: release.ok_or(ManifestError::MissingKey("release"))?,
        description: description.ok_or(ManifestError::MissingKey("description"))?,
        instructions,
    })
}

/// The communication record between the shell and a plugin. The plugin
/// name is fixed at creation; the results frame appears only after a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    plugin_name: String,
    pub analysis_name: Option<String>,
    pub analytical_method: Option<String>,
    pub narrative: Option<String>,
    pub input_frame: Option<DataFrame>,
    pub results_frame: Option<DataFrame>,
    pub options: BTreeMap<String, String>,
}

impl ParameterSet {
    /// The template a plugin hands out: name filled in, all else absent.
    pub fn template(plugin_name: impl Into<String>) -> Self {
        ParameterSet {
            plugin_name: plugin_name.into(),
            analysis_name: None,
            analytical_method: None,
            narrative: None,
            input_frame: None,
            results_frame: None,
            options: BTreeMap::new(),
        }
    }

    pub fn plugin_name(&self) -> &str {
        &self.plugin_name
    }
}

pub type PluginEntry =
    Arc<dyn Fn(ParameterSet) -> Result<ParameterSet, PluginError> + Send + Sync>;

pub type Registry = BTreeMap<String, PluginEntry>;

/// Implementations shipped in this binary, keyed by plugin name.
pub fn builtin_registry() -> Registry {
    let mut r: Registry = BTreeMap::new();
    r.insert("summarize".to_string(), Arc::new(summarize::entry) as PluginEntry);
    r.insert("template".to_string(), Arc::new(template::entry) as PluginEntry);
    r
}

#[derive(Clone)]
pub struct PluginDescriptor {
    pub manifest: Manifest,
    pub entry: PluginEntry,
    pub default_parameters: ParameterSet,
}

impl fmt::Debug for PluginDescriptor {
    /// The entry closure has no useful rendering; show the data fields.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PluginDescriptor")
            .field("manifest", &self.manifest)
            .field("default_parameters", &self.default_parameters)
            .finish_non_exhaustive()
    }
}

/// Everything discovery found: usable plugins plus an audit trail.
#[derive(Debug, Clone, Default)]
pub struct DiscoveryResult {
    /// Usable plugins keyed by plugin name.
    pub plugins: BTreeMap<String, PluginDescriptor>,
    /// Sorted names of successfully loaded plugins.
    pub loaded: Vec<String>,
    /// Sorted (folder name, reason) pairs for everything that did not load.
    pub failed: Vec<(String, String)>,
}

/// Scan a plugins directory. Failures never abort discovery; they are
/// recorded per folder. A missing directory counts as empty.
pub fn discover_plugins(dir: &Path, registry: &Registry) -> DiscoveryResult {
    let mut result = DiscoveryResult::default();
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(_) => return result,
    };
    let mut folders: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    folders.sort();
    for folder in folders {
        match inspect_folder(dir, &folder, registry, &result.plugins) {
            Ok(descriptor) => {
                let name = descriptor.manifest.plugin_name.clone();
                result.plugins.insert(name.clone(), descriptor);
                result.loaded.push(name);
            }
            Err(reason) => result.failed.push((folder, reason)),
        }
    }
    result.loaded.sort();
    result.failed.sort();
    result
}

fn inspect_folder(
    dir: &Path,
    folder: &str,
    registry: &Registry,
    already: &BTreeMap<String, PluginDescriptor>,
) -> Result<PluginDescriptor, String> {
    if !validate_name(folder) {
        return Err("folder name must be <lowercaseword>_<integer>".to_string());
    }
    let manifest_path = dir.join(folder).join("manifest");
    let text = std::fs::read_to_string(&manifest_path)
        .map_err(|e| format!("cannot read manifest: {e}"))?;
    let manifest = parse_manifest(&text).map_err(|e| e.to_string())?;
    let expected = format!("{}_{}", manifest.plugin_name, manifest.release);
    if expected != folder {
        return Err(format!(
            "manifest names '{expected}' but the folder is '{folder}'"
        ));
    }
    if already.contains_key(&manifest.plugin_name) {
        return Err(format!(
            "plugin '{}' is already loaded from another folder",
            manifest.plugin_name
        ));
    }
    let entry = registry
        .get(&manifest.plugin_name)
        .cloned()
        .ok_or_else(|| format!("no implementation registered for '{}'", manifest.plugin_name))?;
    let default_parameters = ParameterSet::template(&manifest.plugin_name);
    Ok(PluginDescriptor {
        manifest,
        entry,
        default_parameters,
    })
}

/// Drive one plugin run over a copy of the stored set: bind a fresh empty
/// results frame named `<set_name>_results`, call the entry, and check the
/// returned set honors the contract. The caller swaps the result in.
pub fn run_entry(
    entry: &PluginEntry,
    stored: &ParameterSet,
    set_name: &str,
) -> Result<ParameterSet, RunError> {
    if stored.input_frame.is_none() {
        return Err(RunError::MissingInputFrame);
    }
    let mut working = stored.clone();
    working.results_frame = Some(DataFrame::new(format!("{set_name}_results")));
    let returned = entry(working).map_err(|e| RunError::PluginFailure(e.to_string()))?;
    if returned.plugin_name != stored.plugin_name {
        return Err(RunError::PluginFailure(
            "plugin changed the immutable plugin_name".to_string(),
        ));
    }
    if returned.results_frame.is_none() {
        return Err(RunError::PluginFailure(
            "plugin returned no results dataframe".to_string(),
        ));
    }
    Ok(returned)
}
