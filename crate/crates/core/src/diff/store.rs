use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tape::{Gradients, Tape, Var};
use super::DiffError;

pub const STORE_VERSION: u32 = 1;

/// Index of a parameter inside a [`ParameterStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamId(pub usize);

/// One named learnable array with its Adam moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub shape: Vec<usize>,
    pub value: Vec<f64>,
    #[serde(skip)]
    pub grad: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

/// Named parameters Θ plus optimizer state.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParameterStore {
    params: Vec<Parameter>,
    pub step: u64,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    version: u32,
    store: ParameterStore,
}

/// Parameters bound as leaves of one tape.
pub struct BoundParams<'t> {
    vars: Vec<Vec<Var<'t>>>,
}

impl<'t> BoundParams<'t> {
    pub fn get(&self, id: ParamId) -> &[Var<'t>] {
        &self.vars[id.0]
    }
}

impl ParameterStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        name: &str,
        shape: &[usize],
        value: Vec<f64>,
    ) -> Result<ParamId, DiffError> {
        if self.index.contains_key(name) {
            return Err(DiffError::DuplicateName(name.to_string()));
        }
        let expected: usize = shape.iter().product();
        if expected != value.len() {
            return Err(DiffError::ShapeMismatch {
                name: name.to_string(),
                expected,
                got: value.len(),
            });
        }
        let n = value.len();
        self.params.push(Parameter {
            name: name.to_string(),
            shape: shape.to_vec(),
            value,
            grad: vec![0.0; n],
            m: vec![0.0; n],
            v: vec![0.0; n],
        });
        let id = self.params.len() - 1;
        self.index.insert(name.to_string(), id);
        Ok(ParamId(id))
    }

    pub fn id(&self, name: &str) -> Result<ParamId, DiffError> {
        self.index
            .get(name)
            .map(|&i| ParamId(i))
            .ok_or_else(|| DiffError::UnknownParameter(name.to_string()))
    }

    pub fn param(&self, id: ParamId) -> &Parameter {
        &self.params[id.0]
    }

    pub fn param_mut(&mut self, id: ParamId) -> &mut Parameter {
        &mut self.params[id.0]
    }

    pub fn value(&self, id: ParamId) -> &[f64] {
        &self.params[id.0].value
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut [f64] {
        &mut self.params[id.0].value
    }

    pub fn grad(&self, id: ParamId) -> &[f64] {
        &self.params[id.0].grad
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Parameter] {
        &mut self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Register every parameter entry as a leaf of `tape`.
    pub fn bind<'t>(&self, tape: &'t Tape) -> BoundParams<'t> {
        BoundParams {
            vars: self.params.iter().map(|p| tape.vars(&p.value)).collect(),
        }
    }

    /// Add the adjoints of the bound leaves to the stored gradients.
    pub fn accumulate(&mut self, bound: &BoundParams<'_>, grads: &Gradients) {
        for (p, vars) in self.params.iter_mut().zip(&bound.vars) {
            for (g, v) in p.grad.iter_mut().zip(vars) {
                *g += grads.wrt(v);
            }
        }
    }

    pub fn zero_grad(&mut self) {
        for p in &mut self.params {
            p.grad.iter_mut().for_each(|g| *g = 0.0);
        }
    }

    pub fn to_json(&self) -> Result<String, DiffError> {
        serde_json::to_string(&StoreFile {
            version: STORE_VERSION,
            store: self.clone(),
        })
        .map_err(|e| DiffError::Corrupt(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, DiffError> {
        let header: serde_json::Value =
            serde_json::from_str(text).map_err(|e| DiffError::Corrupt(e.to_string()))?;
        let found = header
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| DiffError::Corrupt("missing version".into()))? as u32;
        if found != STORE_VERSION {
            return Err(DiffError::Version {
                found,
                expected: STORE_VERSION,
            });
        }
        let file: StoreFile =
            serde_json::from_value(header).map_err(|e| DiffError::Corrupt(e.to_string()))?;
        let mut store = file.store;
        store.reindex()?;
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<(), DiffError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, DiffError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Rebuild the name index and gradient buffers after deserialisation.
    pub(crate) fn reindex(&mut self) -> Result<(), DiffError> {
        self.index.clear();
        for (i, p) in self.params.iter_mut().enumerate() {
            let n: usize = p.shape.iter().product();
            if p.value.len() != n || p.m.len() != n || p.v.len() != n {
                return Err(DiffError::Corrupt(format!("parameter `{}` length", p.name)));
            }
            p.grad = vec![0.0; n];
            if self.index.insert(p.name.clone(), i).is_some() {
                return Err(DiffError::DuplicateName(p.name.clone()));
            }
        }
        Ok(())
    }
}
