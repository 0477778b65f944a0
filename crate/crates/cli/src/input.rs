//! File I/O and error plumbing shared by the subcommands.

use std::path::Path;

use discfair::fairness::set_system_to_instance;
use discfair::{GroupedInstance, SetSystem};

use crate::NotionArg;

/// A message and the process exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn load_set_system(path: &Path) -> Result<SetSystem, Failure> {
    Ok(SetSystem::from_json(&read_file(path)?)?)
}

/// A grouped instance, or for `cd` also a set system turned into one agent per set.
pub fn load_fair_instance(path: &Path, notion: NotionArg) -> Result<GroupedInstance, Failure> {
    let bytes = read_file(path)?;
    let is_set_system = serde_json::from_slice::<serde_json::Value>(&bytes)
        .map(|v| v.get("universe_size").is_some())
        .unwrap_or(false);
    if is_set_system {
        if notion != NotionArg::Cd {
            return Err(Failure::usage(format!(
                "{} is a set system; {notion:?} needs a grouped instance",
                path.display()
            )));
        }
        return Ok(set_system_to_instance(&SetSystem::from_json(&bytes)?));
    }
    Ok(GroupedInstance::from_json(&bytes)?)
}
