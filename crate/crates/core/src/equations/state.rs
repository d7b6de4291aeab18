use crate::error::{Error, Result};
use crate::sbp::SbpOperatorSet;
use crate::scalar::Real;

/// All components at all nodes, stored component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct StateField<T> {
    components: usize,
    nodes: usize,
    data: Vec<T>,
}

impl<T: Real> StateField<T> {
    pub fn zeros(components: usize, nodes: usize) -> Self {
        Self {
            components,
            nodes,
            data: vec![T::zero(); components * nodes],
        }
    }

    pub fn from_data(components: usize, nodes: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != components * nodes {
            return Err(Error::ShapeMismatch {
                expected: components * nodes,
                got: data.len(),
            });
        }
        Ok(Self {
            components,
            nodes,
            data,
        })
    }

    /// Samples `f(x, y)` at every node of `ops`.
    pub fn from_fn(ops: &SbpOperatorSet<T>, components: usize, mut f: impl FnMut([T; 2]) -> Vec<T>) -> Self {
        let mut out = Self::zeros(components, ops.len());
        for g in 0..ops.len() {
            let v = f(ops.grid().position(g));
            out.set_node(g, &v);
        }
        out
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn component(&self, c: usize) -> &[T] {
        &self.data[c * self.nodes..(c + 1) * self.nodes]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [T] {
        &mut self.data[c * self.nodes..(c + 1) * self.nodes]
    }

    pub fn get(&self, c: usize, g: usize) -> T {
        self.data[c * self.nodes + g]
    }

    pub fn node(&self, g: usize) -> Vec<T> {
        (0..self.components).map(|c| self.get(c, g)).collect()
    }

    pub fn node_into(&self, g: usize, out: &mut [T]) {
        for (c, o) in out.iter_mut().enumerate().take(self.components) {
            *o = self.data[c * self.nodes + g];
        }
    }

    pub fn set_node(&mut self, g: usize, values: &[T]) {
        for (c, &v) in values.iter().enumerate().take(self.components) {
            self.data[c * self.nodes + g] = v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self + k * other`.
    pub fn axpy(&self, k: T, other: &Self) -> Self {
        Self {
            components: self.components,
            nodes: self.nodes,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + k * b)
                .collect(),
        }
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            components: self.components,
            nodes: self.nodes,
            data: self.data.iter().map(|&a| a * k).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}
