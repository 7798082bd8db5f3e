//! Diagonal flows and finite matrix families.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::exact::rat::{fmt_rat, Rat};
use crate::exact::scalar::same_field;
use crate::exact::{ExactError, Mat, NumberField};

/// Weights (A_1, …, A_d) of a_t = diag(e^{A_1 t}, …, e^{A_d t}).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Flow {
    weights: Vec<Rat>,
    order: Vec<usize>,
}

impl Flow {
    pub fn new(weights: Vec<Rat>) -> Result<Flow, ExactError> {
        if weights.is_empty() {
            return Err(ExactError::DimensionMismatch { expected: 1, got: 0 });
        }
        let mut order: Vec<usize> = (0..weights.len()).collect();
        // stable: ties keep index order
        order.sort_by(|&i, &j| weights[j].cmp(&weights[i]));
        Ok(Flow { weights, order })
    }

    pub fn from_i64(w: &[i64]) -> Flow {
        Flow::new(w.iter().map(|&x| Rat::from_integer(x.into())).collect()).expect("nonempty weights")
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rat {
        &self.weights[i]
    }

    /// Coordinate indices sorted by descending weight.
    pub fn descending_order(&self) -> &[usize] {
        &self.order
    }

    pub fn total(&self) -> Rat {
        self.weights.iter().fold(Rat::zero(), |acc, w| acc + w)
    }

    pub fn is_unimodular(&self) -> bool {
        self.total().is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.weights.iter().all(|w| *w == self.weights[0])
    }

    pub fn max_weight(&self) -> &Rat {
        self.weights.iter().max().unwrap()
    }

    pub fn min_weight(&self) -> &Rat {
        self.weights.iter().min().unwrap()
    }
}

impl fmt::Debug for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(fmt_rat).collect();
        write!(f, "({})", w.join(", "))
    }
}

impl Serialize for Flow {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let w: Vec<String> = self.weights.iter().map(fmt_rat).collect();
        w.serialize(s)
    }
}

/// Finite sample set standing in for M ⊂ GL_d.
#[derive(Clone, Debug)]
pub struct MatrixFamily {
    dim: usize,
    samples: Vec<Mat>,
    label: String,
}

impl MatrixFamily {
    pub fn new(samples: Vec<Mat>, label: &str) -> Result<MatrixFamily, ExactError> {
        let first = samples.first().ok_or(ExactError::DimensionMismatch { expected: 1, got: 0 })?;
        let dim = first.rows();
        let mut ctx: Option<Arc<NumberField>> = None;
        for m in &samples {
            if m.rows() != dim || m.cols() != dim {
                return Err(ExactError::DimensionMismatch { expected: dim, got: if m.rows() != dim { m.rows() } else { m.cols() } });
            }
            if let Some(f) = m.field() {
                match &ctx {
                    None => ctx = Some(f.clone()),
                    Some(g) if !same_field(f, g) => return Err(ExactError::FieldMismatch),
                    _ => {}
                }
            }
            if m.det()?.is_zero() {
                return Err(ExactError::Singular);
            }
        }
        Ok(MatrixFamily { dim, samples, label: label.to_string() })
    }

    pub fn singleton(l: Mat) -> Result<MatrixFamily, ExactError> {
        MatrixFamily::new(vec![l], "singleton")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Mat] {
        &self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.samples.iter().find_map(Mat::field)
    }

    pub fn is_rational(&self) -> bool {
        self.field().is_none()
    }
}
