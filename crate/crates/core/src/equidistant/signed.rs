use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric::{DistanceField, FocalItem};
use crate::surface::{SurfacePoint, TriSurface};

/// Relative size of the value substituted for near-zero samples.
pub const EPS_ZERO_REL: f64 = 1e-9;

/// `f = d(·, A) − d(·, B)` on the common sample set.
///
/// Samples with `|f| < ε_zero` count as `polarity · ε_zero`; the relabelled
/// field from [`SignedField::swapped`] flips the polarity, so the zero sets of
/// `f` and `−f` agree exactly.
#[derive(Clone, Debug)]
pub struct SignedField {
    a: Arc<DistanceField>,
    b: Arc<DistanceField>,
    values: Vec<f64>,
    polarity: f64,
    eps: f64,
}

impl SignedField {
    pub fn new(a: Arc<DistanceField>, b: Arc<DistanceField>) -> Result<SignedField> {
        if !Arc::ptr_eq(a.domain(), b.domain()) && a.domain().n_samples() != b.domain().n_samples() {
            return Err(Error::SampleMismatch);
        }
        let n = a.domain().n_samples() as u32;
        let values: Vec<f64> = (0..n).map(|i| a.value(i) - b.value(i)).collect();
        let diam = a.max_value().max(b.max_value());
        Ok(SignedField {
            a,
            b,
            values,
            polarity: 1.0,
            eps: EPS_ZERO_REL * diam,
        })
    }

    /// The field of the relabelled scene, `f_BA = −f_AB`.
    pub fn swapped(&self) -> SignedField {
        SignedField {
            a: self.b.clone(),
            b: self.a.clone(),
            values: self.values.iter().map(|v| -v).collect(),
            polarity: -self.polarity,
            eps: self.eps,
        }
    }

    pub fn field_a(&self) -> &DistanceField {
        &self.a
    }

    pub fn field_b(&self) -> &DistanceField {
        &self.b
    }

    pub fn surface(&self) -> &TriSurface {
        self.a.surface()
    }

    pub fn eps_zero(&self) -> f64 {
        self.eps
    }

    pub fn polarity(&self) -> f64 {
        self.polarity
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, id: u32) -> f64 {
        self.values[id as usize]
    }

    /// Value used for sign decisions.
    pub fn sign_value(&self, id: u32) -> f64 {
        let v = self.values[id as usize];
        if v.abs() < self.eps {
            self.polarity * self.eps
        } else {
            v
        }
    }

    /// `f` at an arbitrary surface point.
    pub fn eval(&self, p: &SurfacePoint) -> f64 {
        self.a.eval(p) - self.b.eval(p)
    }

    /// Sign-decision value at an arbitrary point.
    pub fn eval_sign(&self, p: &SurfacePoint) -> f64 {
        let v = self.eval(p);
        if v.abs() < self.eps {
            self.polarity * self.eps
        } else {
            v
        }
    }

    /// Smallest distance between the focal sets.
    pub fn separation(&self) -> f64 {
        fn one_way(from: &DistanceField, to: &DistanceField) -> f64 {
            let n = from.domain().n_samples() as u32;
            let mut m = (0..n)
                .filter(|&i| from.is_source(i))
                .map(|i| to.value(i))
                .fold(f64::INFINITY, f64::min);
            for it in &from.focal().items {
                if let FocalItem::Point(p) = it {
                    m = m.min(to.eval(p));
                }
            }
            m
        }
        one_way(&self.a, &self.b).min(one_way(&self.b, &self.a))
    }
}
