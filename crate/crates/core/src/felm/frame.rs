use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use super::{FitError, FitResultT};

/// Dense group codes `0..n_groups` for one categorical column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyColumn {
    codes: Vec<u32>,
    n_groups: usize,
}

impl KeyColumn {
    /// Interns labels in order of first appearance.
    pub fn from_labels<T: Hash + Eq>(labels: &[T]) -> Self {
        let mut seen: HashMap<&T, u32> = HashMap::new();
        let codes = labels
            .iter()
            .map(|l| {
                let next = seen.len() as u32;
                *seen.entry(l).or_insert(next)
            })
            .collect();
        Self {
            codes,
            n_groups: seen.len(),
        }
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Named numeric and categorical columns of equal length.
#[derive(Debug, Clone, Default)]
pub struct Frame {
    n_rows: usize,
    numeric: BTreeMap<String, Vec<f64>>,
    keys: BTreeMap<String, KeyColumn>,
}

impl Frame {
    pub fn new(n_rows: usize) -> Self {
        Self {
            n_rows,
            ..Self::default()
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn check_len(&self, name: &str, got: usize) -> FitResultT<()> {
        if got != self.n_rows {
            return Err(FitError::Length {
                name: name.to_string(),
                expected: self.n_rows,
                got,
            });
        }
        Ok(())
    }

    pub fn add_numeric(&mut self, name: &str, values: Vec<f64>) -> FitResultT<()> {
        self.check_len(name, values.len())?;
        self.numeric.insert(name.to_string(), values);
        Ok(())
    }

    pub fn with_numeric(mut self, name: &str, values: Vec<f64>) -> FitResultT<Self> {
        self.add_numeric(name, values)?;
        Ok(self)
    }

    pub fn add_key<T: Hash + Eq>(&mut self, name: &str, labels: &[T]) -> FitResultT<()> {
        self.check_len(name, labels.len())?;
        self.keys.insert(name.to_string(), KeyColumn::from_labels(labels));
        Ok(())
    }

    pub fn with_key<T: Hash + Eq>(mut self, name: &str, labels: &[T]) -> FitResultT<Self> {
        self.add_key(name, labels)?;
        Ok(self)
    }

    pub fn numeric(&self, name: &str) -> FitResultT<&[f64]> {
        self.numeric
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| FitError::UnknownColumn(name.to_string()))
    }

    pub fn key(&self, name: &str) -> FitResultT<&KeyColumn> {
        self.keys
            .get(name)
            .ok_or_else(|| FitError::UnknownColumn(name.to_string()))
    }

    pub fn numeric_mut(&mut self, name: &str) -> FitResultT<&mut Vec<f64>> {
        self.numeric
            .get_mut(name)
            .ok_or_else(|| FitError::UnknownColumn(name.to_string()))
    }
}
