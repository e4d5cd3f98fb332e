//! Backward differentiation formulas.
//!
//! Coefficients are always ordered newest level first: `(c_0, ..., c_q)`
//! multiplies `(W^{k+1}, W^k, ..., W^{k+1-q})`, and the combination is divided
//! by the time step.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

pub const MAX_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct BdfFormula {
    order: usize,
    coeffs: Vec<f64>,
}

/// BDF-q weights for `q` in 1..=3.
pub fn bdf_coefficients(q: usize) -> Result<BdfFormula> {
    let coeffs = match q {
        1 => vec![1.0, -1.0],
        2 => vec![1.5, -2.0, 0.5],
        3 => vec![11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0],
        _ => {
            return Err(Error::invalid(format!(
                "BDF order must be 1, 2 or 3 (got {q})"
            )))
        }
    };
    Ok(BdfFormula { order: q, coeffs })
}

impl BdfFormula {
    pub fn new(q: usize) -> Result<Self> {
        bdf_coefficients(q)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Weights on the successive differences `W^{k+1-j} - W^{k-j}`,
    /// `d_j = c_0 + ... + c_j`. Evaluating in this form makes the combination
    /// vanish exactly on constant data.
    fn difference_weights(&self) -> Vec<f64> {
        self.coeffs[..self.order]
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c;
                Some(*acc)
            })
            .collect()
    }

    /// `c_0 newest + sum_j c_j previous[j-1]`, not divided by the step.
    /// `previous` is ordered newest first and must hold at least `q` values.
    pub fn combine_scalar(&self, newest: f64, previous: &[f64]) -> f64 {
        assert!(previous.len() >= self.order, "insufficient history");
        let mut upper = newest;
        let mut acc = 0.0;
        for (d, &lower) in self.difference_weights().iter().zip(previous) {
            acc += d * (upper - lower);
            upper = lower;
        }
        acc
    }

    /// Slice form of [`combine`](Self::combine): `previous` holds the older
    /// levels newest first.
    pub fn combine_slices(&self, newest: &[f64], previous: &[&[f64]]) -> Vec<f64> {
        assert!(previous.len() >= self.order, "insufficient history");
        let weights = self.difference_weights();
        let mut out = vec![0.0; newest.len()];
        let mut upper = newest;
        for (d, &lower) in weights.iter().zip(previous) {
            assert_eq!(lower.len(), out.len(), "history level has the wrong length");
            for ((o, a), b) in out.iter_mut().zip(upper).zip(lower) {
                *o += d * (a - b);
            }
            upper = lower;
        }
        out
    }

    pub fn apply_scalar(&self, newest: f64, previous: &[f64], tau: f64) -> f64 {
        self.combine_scalar(newest, previous) / tau
    }

    /// Componentwise combination `c_0 newest + sum_j c_j hist_j`, not divided
    /// by the step.
    pub fn combine(&self, hist: &History, newest: &GridFunction) -> Result<GridFunction> {
        if hist.len() < self.order {
            return Err(Error::invalid(format!(
                "BDF{} needs {} previous levels, history holds {}",
                self.order,
                self.order,
                hist.len()
            )));
        }
        let previous: Vec<&[f64]> = hist.levels().map(|w| w.values()).collect();
        Ok(GridFunction::from_vec(self.combine_slices(newest.values(), &previous)))
    }
}

/// `(c_0 newest + sum_{j>=1} c_j hist_j) / tau`.
pub fn apply_bdf(
    formula: &BdfFormula,
    hist: &History,
    newest: &GridFunction,
    tau: f64,
) -> Result<GridFunction> {
    Ok(formula.combine(hist, newest)?.map(|w| w / tau))
}

/// Most recent levels of a trajectory, newest first, with their times.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    capacity: usize,
    levels: VecDeque<(f64, GridFunction)>,
}

impl History {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            levels: VecDeque::with_capacity(capacity),
        }
    }

    /// Builds a history from levels given newest first.
    pub fn from_levels(capacity: usize, levels: impl IntoIterator<Item = (f64, GridFunction)>) -> Self {
        let mut h = Self::new(capacity);
        let collected: Vec<_> = levels.into_iter().collect();
        for (t, w) in collected.into_iter().rev() {
            h.push(t, w);
        }
        h
    }

    /// Pushes a new newest level, dropping the oldest once full.
    pub fn push(&mut self, time: f64, level: GridFunction) {
        if self.levels.len() == self.capacity {
            self.levels.pop_back();
        }
        self.levels.push_front((time, level));
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Level `j` back from the newest (`0` is the newest).
    pub fn get(&self, j: usize) -> Option<&GridFunction> {
        self.levels.get(j).map(|(_, w)| w)
    }

    pub fn time(&self, j: usize) -> Option<f64> {
        self.levels.get(j).map(|(t, _)| *t)
    }

    pub fn newest(&self) -> &GridFunction {
        &self.levels.front().expect("empty history").1
    }

    pub fn levels(&self) -> impl Iterator<Item = &GridFunction> {
        self.levels.iter().map(|(_, w)| w)
    }

    /// Same times, each level transformed.
    pub fn map_levels(&self, f: impl Fn(&GridFunction) -> GridFunction) -> Self {
        Self {
            capacity: self.capacity,
            levels: self.levels.iter().map(|(t, w)| (*t, f(w))).collect(),
        }
    }
}

/// Position along a uniform-step trajectory: the recent levels of the
/// scheme's unknown plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    history: History,
    step: usize,
    tau: f64,
}

impl SchemeState {
    /// Starts at step 0, time 0, keeping up to `capacity` levels.
    pub fn new(initial: GridFunction, tau: f64, capacity: usize) -> Self {
        let mut history = History::new(capacity);
        history.push(0.0, initial);
        Self {
            history,
            step: 0,
            tau,
        }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `k tau`
    pub fn time(&self) -> f64 {
        self.step as f64 * self.tau
    }

    pub fn current(&self) -> &GridFunction {
        self.history.newest()
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    /// The state after accepting `next` as the new level.
    pub fn advanced(&self, next: GridFunction) -> Self {
        let mut out = self.clone();
        out.step += 1;
        let t = out.time();
        out.history.push(t, next);
        out
    }
}
