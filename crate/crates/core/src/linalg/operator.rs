use std::collections::BTreeSet;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::layout::SubsystemLayout;
use crate::error::{Error, Result};
use crate::tolerance::HERMITIAN_TOL;

pub type C64 = Complex64;

/// Dense complex square matrix acting on a labelled tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    layout: SubsystemLayout,
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn new(layout: SubsystemLayout, mat: DMatrix<C64>) -> Result<Self> {
        let n = layout.total_dim();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::ShapeMismatch {
                rows: mat.nrows(),
                cols: mat.ncols(),
                expected: n,
            });
        }
        Ok(Self { layout, mat })
    }

    pub fn zeros(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self {
            layout,
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self {
            layout,
            mat: DMatrix::identity(n, n),
        }
    }

    /// Wraps a matrix on a single labelled factor.
    pub fn on(label: &str, mat: DMatrix<C64>) -> Result<Self> {
        let layout = SubsystemLayout::single(label, mat.nrows())?;
        Self::new(layout, mat)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Same matrix, new labels (dimensions unchanged).
    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        let layout = SubsystemLayout::new(labels.iter().copied(), self.layout.dims().to_vec())?;
        Ok(Self {
            layout,
            mat: self.mat.clone(),
        })
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: self.mat.transpose(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: self.mat.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: &self.mat * C64::new(s, 0.0),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-entry distance `‖self − other‖_max`; layouts must agree.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_same_layout(other)?;
        Ok(self
            .mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(X + X†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part().mat;
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.require_hermitian()?;
        Ok(self.hermitian_eigenvalues()[0])
    }

    /// Positive semidefiniteness: smallest eigenvalue `≥ −tol`.
    ///
    /// Rejects inputs whose Hermiticity defect exceeds [`HERMITIAN_TOL`].
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(())
    }

    pub(crate) fn check_same_layout(&self, other: &Operator) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!(
                "{} vs {}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }

    /// Hilbert–Schmidt inner product `Tr(a† b)`.
    pub fn hs_inner(&self, other: &Operator) -> Result<C64> {
        self.check_same_layout(other)?;
        Ok(self
            .mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Operator) -> Result<C64> {
        self.check_same_layout(other)?;
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.mat[(i, j)] * other.mat[(j, i)];
            }
        }
        Ok(acc)
    }

    /// Kronecker product; the layout is `self` followed by `other`.
    pub fn tensor(&self, other: &Operator) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self {
            layout,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    /// Reorders tensor factors to `new_order`, which must list every label once.
    pub fn permute_subsystems<S: AsRef<str>>(&self, new_order: &[S]) -> Result<Self> {
        let not_perm =
            || Error::NotPermutation(new_order.iter().map(|s| s.as_ref().to_string()).collect());
        if new_order.len() != self.layout.len() {
            return Err(not_perm());
        }
        let mut order = Vec::with_capacity(new_order.len());
        for label in new_order {
            let pos = self
                .layout
                .position(label.as_ref())
                .map_err(|_| not_perm())?;
            if order.contains(&pos) {
                return Err(not_perm());
            }
            order.push(pos);
        }
        Ok(self.permute_positions(&order))
    }

    /// `order[k]` is the old position of the factor placed at new position `k`.
    pub(crate) fn permute_positions(&self, order: &[usize]) -> Self {
        if order.iter().enumerate().all(|(k, &p)| k == p) {
            return self.clone();
        }
        let new_layout = self.layout.reordered(order);
        let old_strides = self.layout.strides();
        let new_dims = new_layout.dims();
        let n = self.dim();
        // new flat index -> old flat index
        let mut map = vec![0usize; n];
        let mut digits = vec![0usize; order.len()];
        for slot in map.iter_mut() {
            *slot = digits
                .iter()
                .zip(order)
                .map(|(&dig, &p)| dig * old_strides[p])
                .sum();
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < new_dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        let mat = DMatrix::from_fn(n, n, |r, c| self.mat[(map[r], map[c])]);
        Self {
            layout: new_layout,
            mat,
        }
    }

    /// Traces out the named factors; the remaining ones keep their order.
    pub fn partial_trace<S: AsRef<str>>(&self, over: &[S]) -> Result<Self> {
        let traced: BTreeSet<usize> = over
            .iter()
            .map(|l| self.layout.position(l.as_ref()))
            .collect::<Result<_>>()?;
        let traced: Vec<usize> = traced.into_iter().collect();
        let keep: Vec<usize> = (0..self.layout.len())
            .filter(|i| !traced.contains(i))
            .collect();
        let order: Vec<usize> = keep.iter().chain(&traced).copied().collect();
        let permuted = self.permute_positions(&order);
        let t: usize = traced.iter().map(|&i| self.layout.dims()[i]).product();
        let k = self.dim() / t;
        let mat = DMatrix::from_fn(k, k, |i, j| {
            (0..t)
                .map(|s| permuted.mat[(i * t + s, j * t + s)])
                .sum::<C64>()
        });
        Ok(Self {
            layout: self.layout.without(&traced),
            mat,
        })
    }

    /// `R_Y(X) = I_Y/d_Y ⊗ Tr_Y(X)`, reassembled in the original factor order.
    pub fn trace_and_replace(&self, label: &str) -> Result<Self> {
        let d = self.layout.dim_of(label)?;
        let reduced = self.partial_trace(&[label])?;
        let mixed = Self::identity(SubsystemLayout::single(label, d)?).scale(1.0 / d as f64);
        mixed
            .tensor(&reduced)?
            .permute_subsystems(self.layout.labels())
    }

    /// Extends `self` by identities to `target` and orders factors as in `target`.
    pub fn embed(&self, target: &SubsystemLayout) -> Result<Self> {
        for (label, &dim) in self.layout.labels().iter().zip(self.layout.dims()) {
            let tdim = target.dim_of(label)?;
            if tdim != dim {
                return Err(Error::LayoutMismatch(format!(
                    "`{label}` has dimension {dim}, target expects {tdim}"
                )));
            }
        }
        let missing: Vec<(String, usize)> = target
            .labels()
            .iter()
            .zip(target.dims())
            .filter(|(l, _)| !self.layout.contains(l))
            .map(|(l, &d)| (l.clone(), d))
            .collect();
        let rest = SubsystemLayout::new(
            missing.iter().map(|(l, _)| l.clone()),
            missing.iter().map(|&(_, d)| d),
        )?;
        self.tensor(&Self::identity(rest))?
            .permute_subsystems(target.labels())
    }

    /// Matrix product; layouts must agree.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(Self {
            layout: self.layout.clone(),
            mat: &self.mat * &other.mat,
        })
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: u * &self.mat * u.adjoint(),
        }
    }
}

macro_rules! elementwise_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Operator> for &Operator {
            type Output = Operator;

            /// Panics if the layouts differ.
            fn $method(self, rhs: &Operator) -> Operator {
                assert_eq!(self.layout, rhs.layout, "operator layouts differ");
                Operator {
                    layout: self.layout.clone(),
                    mat: &self.mat $op &rhs.mat,
                }
            }
        }

        impl $trait<Operator> for Operator {
            type Output = Operator;

            fn $method(self, rhs: Operator) -> Operator {
                &self $op &rhs
            }
        }

        impl $trait<&Operator> for Operator {
            type Output = Operator;

            fn $method(self, rhs: &Operator) -> Operator {
                &self $op rhs
            }
        }
    };
}

elementwise_op!(Add, add, +);
elementwise_op!(Sub, sub, -);

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        assert_eq!(self.layout, rhs.layout, "operator layouts differ");
        self.mat += &rhs.mat;
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;

    /// Matrix product. Panics if the layouts differ.
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.layout, rhs.layout, "operator layouts differ");
        Operator {
            layout: self.layout.clone(),
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, s: f64) -> Operator {
        self.scale(s)
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;

    fn mul(self, s: f64) -> Operator {
        self.scale(s)
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;

    fn mul(self, op: &Operator) -> Operator {
        op.scale(self)
    }
}

impl Mul<Operator> for f64 {
    type Output = Operator;

    fn mul(self, op: Operator) -> Operator {
        op.scale(self)
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}
