use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Rational;

use super::catalog::catalog_builders;
use super::spec::FamilySpec;
use super::{Family, FamilyKind, Params};

/// Directory of extra family JSON files picked up by the CLI.
pub const CATALOG_ENV: &str = "POSINORM_CATALOG";

#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: String,
    pub default: Option<Rational>,
    pub range: &'static str,
}

/// A named constructor for one family of sequences.
pub trait FamilyBuilder: Send + Sync {
    fn name(&self) -> &str;
    fn kind(&self) -> FamilyKind;
    fn description(&self) -> &str;
    fn params(&self) -> Vec<ParamSpec> {
        Vec::new()
    }
    fn build(&self, params: &Params) -> Result<Family>;
}

/// Builders keyed by name; iteration order is alphabetical.
#[derive(Clone, Default)]
pub struct FamilyRegistry {
    builders: BTreeMap<String, Arc<dyn FamilyBuilder>>,
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_catalog() -> Self {
        let mut reg = Self::empty();
        for b in catalog_builders() {
            reg.register(b);
        }
        reg
    }

    /// Registers a builder, replacing any previous one of the same name.
    pub fn register(&mut self, builder: Arc<dyn FamilyBuilder>) {
        self.builders.insert(builder.name().to_string(), builder);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn FamilyBuilder>> {
        self.builders.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn builders(&self) -> impl Iterator<Item = &Arc<dyn FamilyBuilder>> {
        self.builders.values()
    }

    pub fn build(&self, name: &str, params: &Params) -> Result<Family> {
        let builder = self.get(name).ok_or_else(|| Error::UnknownFamily(name.to_string()))?;
        let known: Vec<String> = builder.params().into_iter().map(|p| p.name).collect();
        if let Some(extra) = params.keys().find(|k| !known.contains(k)) {
            return Err(Error::ParamOutOfRange {
                family: name.to_string(),
                param: extra.clone(),
                reason: "not a parameter of this family".into(),
            });
        }
        builder.build(params)
    }

    /// Registers every `*.json` family spec found in `dir` (sorted by file
    /// name, so later files win on name clashes deterministically).
    pub fn load_dir(&mut self, dir: &Path) -> Result<usize> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for p in &paths {
            let spec = FamilySpec::from_json(&std::fs::read_to_string(p)?)?;
            self.register(Arc::new(spec.into_builder()));
        }
        Ok(paths.len())
    }
}
