//! Nonnegative least squares by the Lawson-Hanson active-set method.
//!
//! Columns are normalized before solving; passive-set subproblems are solved
//! through a cached Gram matrix with a Cholesky factorization.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::dot;
use crate::parallel::par_map;

#[derive(Clone, Debug, PartialEq)]
pub struct NnlsOptions {
    /// Cap on outer iterations (columns entering the passive set).
    pub max_iter: usize,
    /// Stop once this many columns are passive.
    pub max_passive: Option<usize>,
    /// Stop when an outer step lowers the objective by less than this
    /// fraction.
    pub rel_decrease: f64,
    /// Optimality threshold on the normalized gradient, relative to `|Aᵀy|∞`.
    pub grad_tol: f64,
}

impl Default for NnlsOptions {
    fn default() -> Self {
        NnlsOptions { max_iter: 5000, max_passive: None, rel_decrease: 1e-10, grad_tol: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub hit_cap: bool,
}

/// Dense column-major matrix with `rows` entries per column.
#[derive(Clone, Debug)]
pub struct Columns {
    rows: usize,
    data: Vec<f64>,
}

impl Columns {
    pub fn new(rows: usize, cols: Vec<Vec<f64>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols.len());
        for c in cols {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, got: c.len() });
            }
            data.extend(c);
        }
        Ok(Columns { rows, data })
    }

    pub fn from_flat(rows: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || data.len() % rows != 0 {
            return Err(Error::DimensionMismatch { expected: rows, got: data.len() });
        }
        Ok(Columns { rows, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.data.len() / self.rows
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// `A x` for a sparse coefficient list.
    pub fn combine(&self, coef: &[(usize, f64)]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for &(j, c) in coef {
            for (o, a) in out.iter_mut().zip(self.col(j)) {
                *o += c * a;
            }
        }
        out
    }
}

struct Solver<'a> {
    a: &'a Columns,
    scale: Vec<f64>,
    aty: Vec<f64>,
    gram: HashMap<(usize, usize), f64>,
}

impl Solver<'_> {
    fn g(&mut self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        if let Some(v) = self.gram.get(&key) {
            return *v;
        }
        let v = dot(self.a.col(i), self.a.col(j)) / (self.scale[i] * self.scale[j]);
        self.gram.insert(key, v);
        v
    }

    /// Unconstrained least squares on the passive columns.
    fn solve(&mut self, passive: &[usize]) -> Option<Vec<f64>> {
        let k = passive.len();
        let mut m = DMatrix::zeros(k, k);
        for (p, &i) in passive.iter().enumerate() {
            for (q, &j) in passive.iter().enumerate().skip(p) {
                let v = self.g(i, j);
                m[(p, q)] = v;
                m[(q, p)] = v;
            }
        }
        let rhs = DVector::from_iterator(k, passive.iter().map(|&i| self.aty[i]));
        if let Some(ch) = m.clone().cholesky() {
            return Some(ch.solve(&rhs).iter().copied().collect());
        }
        let ridge = 1e-12 * (0..k).map(|i| m[(i, i)]).fold(0.0, f64::max);
        for i in 0..k {
            m[(i, i)] += ridge;
        }
        m.cholesky().map(|ch| ch.solve(&rhs).iter().copied().collect())
    }

    fn residual(&self, y: &[f64], x: &[f64]) -> Vec<f64> {
        let coef: Vec<(usize, f64)> = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, v / self.scale[j]))
            .collect();
        let ax = self.a.combine(&coef);
        y.iter().zip(&ax).map(|(p, q)| p - q).collect()
    }
}

/// Minimizes `|Ax - y|₂` over `x ≥ 0`.
pub fn nnls(a: &Columns, y: &[f64], opts: &NnlsOptions) -> Result<NnlsSolution> {
    let cols = a.cols();
    if cols == 0 {
        return Err(Error::EmptyDictionary);
    }
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: y.len() });
    }
    let scale: Vec<f64> = (0..cols).map(|j| dot(a.col(j), a.col(j)).sqrt().max(f64::MIN_POSITIVE)).collect();
    let aty: Vec<f64> = par_map(cols, |j| dot(a.col(j), y) / scale[j]);
    let grad_floor = opts.grad_tol * aty.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut s = Solver { a, scale, aty, gram: HashMap::new() };

    let mut x = vec![0.0; cols];
    let mut passive: Vec<usize> = Vec::new();
    let mut is_passive = vec![false; cols];
    let mut obj = dot(y, y);
    let mut iterations = 0;
    let mut hit_cap = false;
    let mut excluded = vec![false; cols];
    let mut best_x = x.clone();
    let mut best_obj = obj;

    loop {
        if let Some(mp) = opts.max_passive {
            if passive.len() >= mp {
                break;
            }
        }
        if iterations >= opts.max_iter {
            hit_cap = true;
            break;
        }
        let r = s.residual(y, &x);
        let w: Vec<f64> = par_map(cols, |j| dot(s.a.col(j), &r) / s.scale[j]);
        let mut best: Option<(usize, f64)> = None;
        for j in 0..cols {
            if is_passive[j] || excluded[j] {
                continue;
            }
            if w[j] > grad_floor && best.is_none_or(|(_, bw)| w[j] > bw) {
                best = Some((j, w[j]));
            }
        }
        let Some((t, _)) = best else { break };
        iterations += 1;
        passive.push(t);
        is_passive[t] = true;

        let mut entered = true;
        loop {
            let z = match s.solve(&passive) {
                Some(z) => z,
                None => {
                    // dependent column: drop it
                    passive.retain(|&j| j != t);
                    is_passive[t] = false;
                    excluded[t] = true;
                    break;
                }
            };
            if z.iter().all(|v| *v > 0.0) {
                for (&j, v) in passive.iter().zip(&z) {
                    x[j] = *v;
                }
                break;
            }
            if entered {
                let pos = passive.iter().position(|&j| j == t).expect("t passive");
                if z[pos] <= 0.0 {
                    passive.retain(|&j| j != t);
                    is_passive[t] = false;
                    excluded[t] = true;
                    break;
                }
            }
            entered = false;
            let mut alpha = f64::INFINITY;
            for (&j, v) in passive.iter().zip(&z) {
                if *v <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - v));
                }
            }
            for (&j, v) in passive.iter().zip(&z) {
                x[j] += alpha * (v - x[j]);
            }
            for &j in &passive {
                if x[j] <= 1e-300 {
                    x[j] = 0.0;
                    is_passive[j] = false;
                }
            }
            passive.retain(|&j| is_passive[j]);
            if passive.is_empty() {
                break;
            }
        }
        if !is_passive[t] {
            continue;
        }
        excluded.iter_mut().for_each(|e| *e = false);
        let r = s.residual(y, &x);
        let new_obj = dot(&r, &r);
        let decrease = obj - new_obj;
        let prev = obj;
        obj = new_obj;
        if new_obj < best_obj {
            best_obj = new_obj;
            best_x.clone_from(&x);
        }
        // a step that fails to improve means rounding has taken over
        if decrease < opts.rel_decrease * prev {
            break;
        }
    }
    let x: Vec<f64> = best_x.iter().zip(&s.scale).map(|(v, sc)| v / sc).collect();
    let r = {
        let coef: Vec<(usize, f64)> = x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect();
        let ax = a.combine(&coef);
        y.iter().zip(&ax).map(|(p, q)| p - q).collect::<Vec<f64>>()
    };
    Ok(NnlsSolution { x, residual_norm: dot(&r, &r).sqrt(), iterations, hit_cap })
}
