//! Dense complex tensors with a row/column split and the Einstein-product algebra.
//!
//! Entries are stored first-index-fastest over all axes, row block first. With
//! that order the storage of a tensor in `C^{S(s) x T(t)}` is exactly the
//! column-major storage of its reshaped `prod(S) x prod(T)` matrix.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::reshape;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which consistent norm gates and bounds are evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    #[default]
    Frobenius,
    Spectral,
}

impl Norm {
    pub fn name(self) -> &'static str {
        match self {
            Norm::Frobenius => "frobenius",
            Norm::Spectral => "spectral",
        }
    }
}

/// Axis extents plus the index splitting row axes from column axes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    extents: Vec<usize>,
    split: usize,
}

impl Shape {
    pub fn new(extents: Vec<usize>, split: usize) -> Result<Self> {
        if split > extents.len() {
            return Err(Error::InvalidSplit {
                split,
                ndim: extents.len(),
            });
        }
        if let Some((axis, &extent)) = extents.iter().enumerate().find(|(_, &e)| e == 0) {
            return Err(Error::ZeroExtent { axis, extent });
        }
        Ok(Self { extents, split })
    }

    /// Builds `rows x cols` from the two multi-shapes.
    pub fn from_blocks(rows: &[usize], cols: &[usize]) -> Result<Self> {
        let extents = rows.iter().chain(cols).copied().collect();
        Self::new(extents, rows.len())
    }

    /// The square shape `half x half`.
    pub fn square(half: &[usize]) -> Result<Self> {
        Self::from_blocks(half, half)
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn ndim(&self) -> usize {
        self.extents.len()
    }

    pub fn row_extents(&self) -> &[usize] {
        &self.extents[..self.split]
    }

    pub fn col_extents(&self) -> &[usize] {
        &self.extents[self.split..]
    }

    /// Flattened row count.
    pub fn rows(&self) -> usize {
        self.row_extents().iter().product()
    }

    /// Flattened column count.
    pub fn cols(&self) -> usize {
        self.col_extents().iter().product()
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_square(&self) -> bool {
        self.row_extents() == self.col_extents()
    }

    /// Row and column blocks swapped.
    pub fn transposed(&self) -> Shape {
        Shape {
            extents: self.col_extents().iter().chain(self.row_extents()).copied().collect(),
            split: self.ndim() - self.split,
        }
    }

    /// Linear position of a full multi-index, first index fastest.
    pub fn offset(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.extents.len() {
            return None;
        }
        let mut offset = 0;
        let mut stride = 1;
        for (&i, &e) in index.iter().zip(&self.extents) {
            if i >= e {
                return None;
            }
            offset += i * stride;
            stride *= e;
        }
        Some(offset)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("x");
        write!(f, "({} | {})", join(self.row_extents()), join(self.col_extents()))
    }
}

/// Dense complex tensor in `C^{S(s) x T(t)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Shape,
    data: Vec<Complex64>,
}

impl Tensor {
    pub fn new(shape: Shape, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != shape.len() {
            return Err(Error::EntryCount {
                shape: shape.extents.clone(),
                expected: shape.len(),
                actual: entries.len(),
            });
        }
        if let Some(index) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { shape, data: entries })
    }

    pub fn from_real(shape: Shape, entries: &[f64]) -> Result<Self> {
        Self::new(shape, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_parts(shape: Shape, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(shape.len(), data.len());
        Self { shape, data }
    }

    pub fn zeros(shape: Shape) -> Self {
        let data = vec![ZERO; shape.len()];
        Self { shape, data }
    }

    /// Identity of `C^{half x half}`: its reshaped matrix is the identity matrix.
    pub fn identity(half: &[usize]) -> Result<Self> {
        let shape = Shape::square(half)?;
        let n = shape.rows();
        let mut t = Self::zeros(shape);
        for i in 0..n {
            t.data[i + n * i] = ONE;
        }
        Ok(t)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, index: &[usize]) -> Option<Complex64> {
        self.shape.offset(index).map(|k| self.data[k])
    }

    /// Same entries under a new split point.
    pub fn with_split(&self, split: usize) -> Result<Self> {
        let shape = Shape::new(self.shape.extents.clone(), split)?;
        Ok(Self::from_parts(shape, self.data.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Largest absolute imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Einstein product contracting this tensor's column block with `other`'s row block.
    pub fn dot(&self, other: &Tensor) -> Result<Tensor> {
        if self.shape.col_extents() != other.shape.row_extents() {
            return Err(Error::BlockMismatch {
                left: self.shape.col_extents().to_vec(),
                right: other.shape.row_extents().to_vec(),
            });
        }
        einstein_product(self, other, self.shape.ndim() - self.shape.split)
    }

    pub fn conj_transpose(&self) -> Tensor {
        let (rows, cols) = (self.shape.rows(), self.shape.cols());
        let mut data = vec![ZERO; self.data.len()];
        for j in 0..cols {
            for i in 0..rows {
                data[j + cols * i] = self.data[i + rows * j].conj();
            }
        }
        Tensor::from_parts(self.shape.transposed(), data)
    }

    pub fn scale(&self, alpha: Complex64) -> Tensor {
        Tensor::from_parts(self.shape.clone(), self.data.iter().map(|&z| alpha * z).collect())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        linear_combine(ONE, self, ONE, other)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        linear_combine(ONE, self, -ONE, other)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value of the reshaped matrix.
    pub fn spectral_norm(&self) -> f64 {
        reshape::singular_values(&reshape::rsh(self))
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    pub fn norm(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Frobenius => self.frobenius_norm(),
            Norm::Spectral => self.spectral_norm(),
        }
    }
}

/// `(a *_n b)`: sums the last `n` axes of `a` against the first `n` axes of `b`.
///
/// The result keeps `a`'s leading axes as its row block and `b`'s trailing axes
/// as its column block.
pub fn einstein_product(a: &Tensor, b: &Tensor, n: usize) -> Result<Tensor> {
    let (na, nb) = (a.shape.ndim(), b.shape.ndim());
    if n > na || n > nb {
        return Err(Error::ContractionOrder {
            requested: n,
            left_ndim: na,
            right_ndim: nb,
        });
    }
    let lead_ndim = na - n;
    for i in 0..n {
        let (left, right) = (a.shape.extents[lead_ndim + i], b.shape.extents[i]);
        if left != right {
            return Err(Error::ShapeMismatch {
                axis: lead_ndim + i,
                left,
                right,
            });
        }
    }
    let lead: usize = a.shape.extents[..lead_ndim].iter().product();
    let inner: usize = b.shape.extents[..n].iter().product();
    let trail: usize = b.shape.extents[n..].iter().product();

    let mut out = vec![ZERO; lead * trail];
    for j in 0..trail {
        let col = &mut out[lead * j..lead * (j + 1)];
        for h in 0..inner {
            let bhj = b.data[h + inner * j];
            if bhj == ZERO {
                continue;
            }
            let a_col = &a.data[lead * h..lead * (h + 1)];
            for (c, &aih) in col.iter_mut().zip(a_col) {
                *c += aih * bhj;
            }
        }
    }

    let extents = a.shape.extents[..lead_ndim]
        .iter()
        .chain(&b.shape.extents[n..])
        .copied()
        .collect();
    let shape = Shape::new(extents, lead_ndim)?;
    Ok(Tensor::from_parts(shape, out))
}

/// Entrywise `alpha * a + beta * b`.
pub fn linear_combine(alpha: Complex64, a: &Tensor, beta: Complex64, b: &Tensor) -> Result<Tensor> {
    if a.shape != b.shape {
        return Err(Error::ShapeDiffers {
            left: a.shape.extents.clone(),
            right: b.shape.extents.clone(),
        });
    }
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| alpha * x + beta * y)
        .collect();
    Ok(Tensor::from_parts(a.shape.clone(), data))
}

/// Hermitian inner product `sum a * conj(b)`.
pub fn inner_product(a: &Tensor, b: &Tensor) -> Result<Complex64> {
    if a.shape != b.shape {
        return Err(Error::ShapeDiffers {
            left: a.shape.extents.clone(),
            right: b.shape.extents.clone(),
        });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y.conj()).sum())
}
