use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use seqeffects::quantum::{binary_povm, validate_density, validate_effect, validate_povm};
use seqeffects::{ComplexMatrix, DensityOperator, EffectOperator, Povm, Tolerances};
use serde::{Deserialize, Serialize};

pub const INSTANCE_VERSION: u32 = 1;

/// Named effects, POVMs and states of one dimension. Matrices are rows of
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub dim: usize,
    #[serde(default)]
    pub effects: BTreeMap<String, ComplexMatrix>,
    #[serde(default)]
    pub povms: BTreeMap<String, Vec<ComplexMatrix>>,
    #[serde(default)]
    pub states: BTreeMap<String, ComplexMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    /// The file could not be read or written.
    Io(String),
    /// The contents do not parse or do not validate.
    Invalid(String),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::Io(m) => write!(f, "i/o error: {m}"),
            InstanceError::Invalid(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl std::error::Error for InstanceError {}

fn invalid(msg: impl Into<String>) -> InstanceError {
    InstanceError::Invalid(msg.into())
}

impl InstanceFile {
    pub fn new(dim: usize) -> Self {
        Self {
            version: INSTANCE_VERSION,
            dim,
            effects: BTreeMap::new(),
            povms: BTreeMap::new(),
            states: BTreeMap::new(),
        }
    }

    pub fn with_effect(mut self, name: &str, e: &EffectOperator) -> Self {
        self.effects.insert(name.to_string(), e.matrix().clone());
        self
    }

    pub fn with_povm(mut self, name: &str, p: &Povm) -> Self {
        self.povms.insert(name.to_string(), p.matrices());
        self
    }

    pub fn with_state(mut self, name: &str, w: &DensityOperator) -> Self {
        self.states.insert(name.to_string(), w.matrix().clone());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files serialize")
    }

    /// Parses and validates.
    pub fn from_json(text: &str, tol: &Tolerances) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        file.validate(tol)?;
        Ok(file)
    }

    pub fn read(path: &Path, tol: &Tolerances) -> Result<Self, InstanceError> {
        let text = fs::read_to_string(path).map_err(|e| InstanceError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, tol).map_err(|e| match e {
            InstanceError::Invalid(m) => invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Checks the version, every dimension, and each entry against its kind.
    pub fn validate(&self, tol: &Tolerances) -> Result<(), InstanceError> {
        if self.version != INSTANCE_VERSION {
            return Err(invalid(format!("unsupported version {}", self.version)));
        }
        let dim_ok = |name: &str, m: &ComplexMatrix| {
            if m.dim() == self.dim {
                Ok(())
            } else {
                Err(invalid(format!("{name}: dimension {} but file declares {}", m.dim(), self.dim)))
            }
        };
        for (name, m) in &self.effects {
            dim_ok(name, m)?;
            validate_effect(m, tol).map_err(|e| invalid(format!("effect {name}: {e}")))?;
        }
        for (name, ms) in &self.povms {
            for m in ms {
                dim_ok(name, m)?;
            }
            validate_povm(ms, tol).map_err(|e| invalid(format!("povm {name}: {e}")))?;
        }
        for (name, m) in &self.states {
            dim_ok(name, m)?;
            validate_density(m, tol).map_err(|e| invalid(format!("state {name}: {e}")))?;
        }
        Ok(())
    }

    /// The named POVM, or the binary POVM `{E, I − E}` of the named effect.
    /// Without a name the file must hold exactly one POVM or effect.
    pub fn povm(&self, name: Option<&str>, tol: &Tolerances) -> Result<Povm, InstanceError> {
        let name = match name {
            Some(n) => n.to_string(),
            None => {
                let names: Vec<&String> = self.povms.keys().chain(self.effects.keys()).collect();
                match names.as_slice() {
                    [only] => only.to_string(),
                    [] => return Err(invalid("file holds no POVM or effect")),
                    _ => return Err(invalid("file holds several POVMs/effects; select one with path#name")),
                }
            }
        };
        if let Some(ms) = self.povms.get(&name) {
            return validate_povm(ms, tol)
                .map(|p| p.with_label(name.clone()))
                .map_err(|e| invalid(e.to_string()));
        }
        if let Some(m) = self.effects.get(&name) {
            let e = validate_effect(m, tol).map_err(|e| invalid(e.to_string()))?;
            return binary_povm(&e, tol)
                .map(|p| p.with_label(name.clone()))
                .map_err(|e| invalid(e.to_string()));
        }
        Err(invalid(format!("no POVM or effect named {name}")))
    }

    pub fn state(&self, name: Option<&str>, tol: &Tolerances) -> Result<DensityOperator, InstanceError> {
        let m = match name {
            Some(n) => self.states.get(n).ok_or_else(|| invalid(format!("no state named {n}")))?,
            None => {
                let mut it = self.states.values();
                match (it.next(), it.next()) {
                    (Some(m), None) => m,
                    (None, _) => return Err(invalid("file holds no state")),
                    _ => return Err(invalid("file holds several states; select one with path#name")),
                }
            }
        };
        validate_density(m, tol).map_err(|e| invalid(e.to_string()))
    }
}

/// Splits `path#name` into its parts.
pub fn split_reference(reference: &str) -> (&str, Option<&str>) {
    match reference.rsplit_once('#') {
        Some((path, name)) if !name.is_empty() => (path, Some(name)),
        _ => (reference, None),
    }
}
