use crate::error::{Error, Result};
use crate::scalar::Real;

/// Discrete probability distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbDist<T: Real = f64> {
    p: Vec<T>,
}

impl<T: Real> ProbDist<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < T::zero()) {
            return Err(Error::InvalidDistribution(format!("entry {}", bad.as_f64())));
        }
        let total = p.iter().fold(T::zero(), |a, b| a + *b);
        if (total - T::one()).abs() > T::tol() {
            return Err(Error::InvalidDistribution(format!("sums to {}", total.as_f64())));
        }
        Ok(Self { p })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(w: &[T]) -> Result<Self> {
        let total = w.iter().fold(T::zero(), |a, b| a + *b);
        if total <= T::zero() {
            return Err(Error::InvalidDistribution("zero total weight".into()));
        }
        Self::new(w.iter().map(|x| *x / total).collect())
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![T::one() / T::lit(d as f64); d])
    }

    /// Two-outcome distribution `(1-p, p)`.
    pub fn bernoulli(p: T) -> Result<Self> {
        Self::new(vec![T::one() - p, p])
    }

    pub fn probs(&self) -> &[T] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn entropy(&self) -> T {
        shannon_entropy(self)
    }
}

/// `-Σ p log₂ p` with `0 log 0 = 0`.
pub fn shannon_entropy<T: Real>(p: &ProbDist<T>) -> T {
    entropy_of(p.probs())
}

pub(crate) fn entropy_of<T: Real>(p: &[T]) -> T {
    p.iter()
        .filter(|x| **x > T::zero())
        .fold(T::zero(), |acc, x| acc - *x * x.log2())
}

/// Binary entropy `h(p)`.
pub fn binary_entropy<T: Real>(p: T) -> T {
    entropy_of(&[p, T::one() - p])
}

/// `Σ p log₂(p/q)`; infinite when `p` is not absolutely continuous w.r.t. `q`.
pub fn relative_entropy<T: Real>(p: &ProbDist<T>, q: &ProbDist<T>) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", p.len(), q.len())));
    }
    let mut acc = T::zero();
    for (a, b) in p.probs().iter().zip(q.probs()) {
        if *a <= T::zero() {
            continue;
        }
        if *b <= T::zero() {
            return Ok(T::lit(f64::INFINITY));
        }
        acc += *a * (*a / *b).log2();
    }
    Ok(acc)
}

/// Joint distribution `p(x, y)` stored row-major with `x` as the row.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist<T: Real = f64> {
    rows: usize,
    cols: usize,
    table: Vec<T>,
}

impl<T: Real> JointDist<T> {
    pub fn new(table: Vec<Vec<T>>) -> Result<Self> {
        let rows = table.len();
        let cols = table.first().map(Vec::len).unwrap_or(0);
        if rows == 0 || cols == 0 || table.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDistribution("ragged or empty table".into()));
        }
        let flat: Vec<T> = table.into_iter().flatten().collect();
        ProbDist::new(flat.clone())?;
        Ok(Self { rows, cols, table: flat })
    }

    /// `p(x)p(y)`.
    pub fn product(px: &ProbDist<T>, py: &ProbDist<T>) -> Self {
        let table = px
            .probs()
            .iter()
            .flat_map(|a| py.probs().iter().map(move |b| *a * *b))
            .collect();
        Self { rows: px.len(), cols: py.len(), table }
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.table[x * self.cols + y]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn marginal_x(&self) -> ProbDist<T> {
        ProbDist {
            p: (0..self.rows)
                .map(|x| (0..self.cols).fold(T::zero(), |a, y| a + self.get(x, y)))
                .collect(),
        }
    }

    pub fn marginal_y(&self) -> ProbDist<T> {
        ProbDist {
            p: (0..self.cols)
                .map(|y| (0..self.rows).fold(T::zero(), |a, x| a + self.get(x, y)))
                .collect(),
        }
    }

    pub fn as_dist(&self) -> ProbDist<T> {
        ProbDist { p: self.table.clone() }
    }

    pub fn joint_entropy(&self) -> T {
        entropy_of(&self.table)
    }

    /// `H(X|Y) = H(X,Y) - H(Y)`.
    pub fn conditional_x_given_y(&self) -> T {
        self.joint_entropy() - self.marginal_y().entropy()
    }

    /// `H(Y|X) = H(X,Y) - H(X)`.
    pub fn conditional_y_given_x(&self) -> T {
        self.joint_entropy() - self.marginal_x().entropy()
    }

    /// `H(X:Y) = H(X) + H(Y) - H(X,Y)`.
    pub fn mutual_information(&self) -> T {
        self.marginal_x().entropy() + self.marginal_y().entropy() - self.joint_entropy()
    }
}

/// Entropies derived from a joint distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedEntropies<T: Real = f64> {
    pub h_x: T,
    pub h_y: T,
    pub joint: T,
    pub conditional_x_given_y: T,
    pub conditional_y_given_x: T,
    pub mutual: T,
    pub relative_to_product: T,
}

pub fn derived_entropies<T: Real>(j: &JointDist<T>) -> DerivedEntropies<T> {
    let (px, py) = (j.marginal_x(), j.marginal_y());
    let product = JointDist::product(&px, &py);
    DerivedEntropies {
        h_x: px.entropy(),
        h_y: py.entropy(),
        joint: j.joint_entropy(),
        conditional_x_given_y: j.conditional_x_given_y(),
        conditional_y_given_x: j.conditional_y_given_x(),
        mutual: j.mutual_information(),
        relative_to_product: relative_entropy(&j.as_dist(), &product.as_dist())
            .expect("shapes agree by construction"),
    }
}
