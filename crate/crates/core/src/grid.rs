//! Uniform grid on the unit torus and the finite-difference operators
//! shared by every scheme.
//!
//! Indexing is periodic: `U_l = U_{l mod N}` for every integer `l`. No ghost
//! cells are stored; a [`GridFunction`] is a plain length-`N` sequence.

use std::io::Read;
use std::ops::Index;
use std::path::Path;

use crate::error::{Error, Result};

/// The widest stencil in the kit spans five nodes.
pub const MIN_CELLS: usize = 4;

/// Uniform grid `x_i = i h`, `i = 0..N-1`, on the torus `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid1D {
    n_cells: usize,
    h: f64,
}

impl PeriodicGrid1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::invalid(format!(
                "grid needs at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        Ok(Self {
            n_cells,
            h: 1.0 / n_cells as f64,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(move |i| self.node(i))
    }

    fn check(&self, u: &GridFunction, i: usize) {
        assert_eq!(
            u.len(),
            self.n_cells,
            "grid function length does not match grid"
        );
        assert!(i < self.n_cells, "node index {i} out of range");
    }

    /// `(U_{i+1} - U_i) / h`
    pub fn delta_plus(&self, u: &GridFunction, i: usize) -> f64 {
        self.check(u, i);
        (u.at(i as isize + 1) - u[i]) / self.h
    }

    /// `(U_i - U_{i-1}) / h`
    pub fn delta_minus(&self, u: &GridFunction, i: usize) -> f64 {
        self.check(u, i);
        (u[i] - u.at(i as isize - 1)) / self.h
    }

    /// `(U_{i+1} - U_{i-1}) / (2h)`
    pub fn delta_central1(&self, u: &GridFunction, i: usize) -> f64 {
        self.check(u, i);
        (u.at(i as isize + 1) - u.at(i as isize - 1)) / (2.0 * self.h)
    }

    /// `(U_{i+1} - 2 U_i + U_{i-1}) / h^2`, evaluated as `delta_plus` of
    /// `delta_minus` so the factorization holds bit for bit.
    pub fn delta_central2(&self, u: &GridFunction, i: usize) -> f64 {
        self.check(u, i);
        let right = (u.at(i as isize + 1) - u[i]) / self.h;
        let left = (u[i] - u.at(i as isize - 1)) / self.h;
        (right - left) / self.h
    }

    pub fn d_plus(&self, u: &GridFunction) -> GridFunction {
        GridFunction(stencil::forward(u.values(), self.h))
    }

    pub fn d_minus(&self, u: &GridFunction) -> GridFunction {
        GridFunction(stencil::backward(u.values(), self.h))
    }

    pub fn d_central1(&self, u: &GridFunction) -> GridFunction {
        GridFunction(stencil::central1(u.values(), self.h))
    }

    pub fn d_central2(&self, u: &GridFunction) -> GridFunction {
        GridFunction(stencil::central2(u.values(), self.h))
    }

    /// `sum_i W_i h`; on the torus this coincides with the trapezoidal rule.
    pub fn quadrature_sum(&self, w: &GridFunction) -> f64 {
        stencil::quadrature(w.values(), self.h)
    }

    /// Discrete l2 norm `(sum_i e_i^2 h)^{1/2}`.
    pub fn l2_norm(&self, e: &GridFunction) -> f64 {
        e.values().iter().map(|x| x * x).sum::<f64>().sqrt() * self.h.sqrt()
    }

    /// Samples an initial profile at the nodes; see [`InitialProfile`].
    pub fn project_initial_datum(
        &self,
        profile: &InitialProfile,
        normalize: bool,
    ) -> Result<GridFunction> {
        let values: Vec<f64> = match profile {
            InitialProfile::Cos16 => self.nodes().map(cos16).collect(),
            InitialProfile::Constant(c) => vec![*c; self.n_cells],
            InitialProfile::Values(v) => {
                if v.len() != self.n_cells {
                    return Err(Error::invalid(format!(
                        "initial data has {} values, grid has {} nodes",
                        v.len(),
                        self.n_cells
                    )));
                }
                v.clone()
            }
        };
        if let Some((node, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < 0.0)
        {
            return Err(Error::invalid(format!(
                "initial datum is negative or not finite at node {node}: {value}"
            )));
        }
        let mut u = GridFunction(values);
        if normalize {
            let mass = self.quadrature_sum(&u);
            if mass <= 0.0 {
                return Err(Error::invalid("cannot normalize a datum with zero mass"));
            }
            u.0.iter_mut().for_each(|x| *x /= mass);
        }
        Ok(u)
    }
}

/// `0.001 + cos^16(pi x)`
pub fn cos16(x: f64) -> f64 {
    0.001 + (std::f64::consts::PI * x).cos().powi(16)
}

/// Built-in initial data.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `n0(x) = 0.001 + cos^16(pi x)`.
    Cos16,
    Constant(f64),
    /// Node values given explicitly, e.g. loaded with [`GridFunction::read_csv`].
    Values(Vec<f64>),
}

/// Real values on the nodes of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction(Vec<f64>);

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at node {i}")));
        }
        Ok(Self(values))
    }

    pub fn constant(grid: &PeriodicGrid1D, c: f64) -> Self {
        Self(vec![c; grid.n_cells()])
    }

    pub fn from_fn(grid: &PeriodicGrid1D, f: impl Fn(f64) -> f64) -> Self {
        Self(grid.nodes().map(f).collect())
    }

    // Internal constructor for values produced by arithmetic on finite inputs.
    pub(crate) fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Periodic access, `U_l = U_{l mod N}`.
    pub fn at(&self, l: isize) -> f64 {
        let n = self.0.len() as isize;
        self.0[l.rem_euclid(n) as usize]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.len(), other.len());
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Reads one value per line, no header.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 1 {
                return Err(Error::invalid(format!(
                    "line {}: expected one value, found {}",
                    line + 1,
                    record.len()
                )));
            }
            let value: f64 = record[0]
                .parse()
                .map_err(|e| Error::invalid(format!("line {}: {e}", line + 1)))?;
            values.push(value);
        }
        Self::new(values)
    }

    /// Writes one value per line with 17 significant digits.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        use std::io::Write;
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for x in &self.0 {
            writeln!(out, "{x:.16e}")?;
        }
        out.flush()?;
        Ok(())
    }
}

impl Index<usize> for GridFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for GridFunction {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Slice-level periodic stencils used on the hot paths of the schemes.
pub(crate) mod stencil {
    #[inline]
    fn next(i: usize, n: usize) -> usize {
        if i + 1 == n {
            0
        } else {
            i + 1
        }
    }

    #[inline]
    fn prev(i: usize, n: usize) -> usize {
        if i == 0 {
            n - 1
        } else {
            i - 1
        }
    }

    pub fn forward(u: &[f64], h: f64) -> Vec<f64> {
        let n = u.len();
        (0..n).map(|i| (u[next(i, n)] - u[i]) / h).collect()
    }

    pub fn backward(u: &[f64], h: f64) -> Vec<f64> {
        let n = u.len();
        (0..n).map(|i| (u[i] - u[prev(i, n)]) / h).collect()
    }

    pub fn central1(u: &[f64], h: f64) -> Vec<f64> {
        let n = u.len();
        let two_h = 2.0 * h;
        (0..n).map(|i| (u[next(i, n)] - u[prev(i, n)]) / two_h).collect()
    }

    pub fn central2(u: &[f64], h: f64) -> Vec<f64> {
        let n = u.len();
        (0..n)
            .map(|i| {
                let right = (u[next(i, n)] - u[i]) / h;
                let left = (u[i] - u[prev(i, n)]) / h;
                (right - left) / h
            })
            .collect()
    }

    pub fn quadrature(w: &[f64], h: f64) -> f64 {
        w.iter().sum::<f64>() * h
    }

    /// `sum_i a_i b_i h`
    pub fn inner(a: &[f64], b: &[f64], h: f64) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h
    }
}
