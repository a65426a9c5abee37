use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }
}

/// Gate order used wherever the four gates are iterated together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Forget,
    Input,
    Output,
    Candidate,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Forget, Gate::Input, Gate::Output, Gate::Candidate];
}

/// Weights of a single-layer LSTM with a scalar sigmoid head.
///
/// Each gate matrix has shape `hidden x (hidden + inputs)` and multiplies the
/// concatenation `[h_prev, x]`. The same struct doubles as a gradient buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub hidden: usize,
    pub inputs: usize,
    pub w_f: Matrix,
    pub w_i: Matrix,
    pub w_o: Matrix,
    pub w_c: Matrix,
    pub b_f: Vec<f64>,
    pub b_i: Vec<f64>,
    pub b_o: Vec<f64>,
    pub b_c: Vec<f64>,
    pub w_fc: Vec<f64>,
    pub b_fc: f64,
}

pub const TENSOR_NAMES: [&str; 10] = [
    "w_f", "w_i", "w_o", "w_c", "b_f", "b_i", "b_o", "b_c", "w_fc", "b_fc",
];

impl LstmParams {
    pub fn zeros(hidden: usize, inputs: usize) -> Self {
        let m = || Matrix::zeros(hidden, hidden + inputs);
        LstmParams {
            hidden,
            inputs,
            w_f: m(),
            w_i: m(),
            w_o: m(),
            w_c: m(),
            b_f: vec![0.0; hidden],
            b_i: vec![0.0; hidden],
            b_o: vec![0.0; hidden],
            b_c: vec![0.0; hidden],
            w_fc: vec![0.0; hidden],
            b_fc: 0.0,
        }
    }

    /// Matrices (gates and head) uniform on `[-1/sqrt(H), 1/sqrt(H)]`, biases zero.
    pub fn init(hidden: usize, inputs: usize, seed: u64) -> Self {
        let mut p = Self::zeros(hidden, inputs);
        let bound = 1.0 / (hidden as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for m in [&mut p.w_f, &mut p.w_i, &mut p.w_o, &mut p.w_c] {
            for v in &mut m.data {
                *v = rng.random_range(-bound..=bound);
            }
        }
        for v in &mut p.w_fc {
            *v = rng.random_range(-bound..=bound);
        }
        p
    }

    pub fn gate(&self, g: Gate) -> (&Matrix, &[f64]) {
        match g {
            Gate::Forget => (&self.w_f, &self.b_f),
            Gate::Input => (&self.w_i, &self.b_i),
            Gate::Output => (&self.w_o, &self.b_o),
            Gate::Candidate => (&self.w_c, &self.b_c),
        }
    }

    pub fn gate_mut(&mut self, g: Gate) -> (&mut Matrix, &mut [f64]) {
        match g {
            Gate::Forget => (&mut self.w_f, &mut self.b_f),
            Gate::Input => (&mut self.w_i, &mut self.b_i),
            Gate::Output => (&mut self.w_o, &mut self.b_o),
            Gate::Candidate => (&mut self.w_c, &mut self.b_c),
        }
    }

    /// All parameter tensors as flat slices, in [`TENSOR_NAMES`] order.
    pub fn tensors(&self) -> [&[f64]; 10] {
        [
            &self.w_f.data,
            &self.w_i.data,
            &self.w_o.data,
            &self.w_c.data,
            &self.b_f,
            &self.b_i,
            &self.b_o,
            &self.b_c,
            &self.w_fc,
            std::slice::from_ref(&self.b_fc),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 10] {
        [
            &mut self.w_f.data,
            &mut self.w_i.data,
            &mut self.w_o.data,
            &mut self.w_c.data,
            &mut self.b_f,
            &mut self.b_i,
            &mut self.b_o,
            &mut self.b_c,
            &mut self.w_fc,
            std::slice::from_mut(&mut self.b_fc),
        ]
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
    }

    /// Checks every tensor against `hidden` and `inputs`.
    pub fn validate(&self) -> Result<()> {
        let (h, n) = (self.hidden, self.inputs);
        for (name, m) in [
            ("w_f", &self.w_f),
            ("w_i", &self.w_i),
            ("w_o", &self.w_o),
            ("w_c", &self.w_c),
        ] {
            if m.rows != h || m.cols != h + n || m.data.len() != h * (h + n) {
                return Err(Error::Shape(format!(
                    "{name} is {}x{}, expected {h}x{}",
                    m.rows,
                    m.cols,
                    h + n
                )));
            }
        }
        for (name, b) in [
            ("b_f", &self.b_f),
            ("b_i", &self.b_i),
            ("b_o", &self.b_o),
            ("b_c", &self.b_c),
            ("w_fc", &self.w_fc),
        ] {
            if b.len() != h {
                return Err(Error::Shape(format!(
                    "{name} has length {}, expected {h}",
                    b.len()
                )));
            }
        }
        if !self.is_finite() {
            return Err(Error::Model("parameters contain non-finite values".into()));
        }
        Ok(())
    }
}
