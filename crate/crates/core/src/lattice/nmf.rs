//! Rank-r NMF by multiplicative updates, `V ~ W H`.
//!
//! Each iteration updates `H` first and then `W` with the new `H`:
//!
//! ```text
//! H <- H * (W^T V) / (W^T W H + eps)
//! W <- W * (V H^T) / (W H H^T + eps)
//! ```
//!
//! With `alpha`/`beta` set, `2*alpha*W` and `2*beta*H` (the gradients of
//! squared Frobenius penalties) join the respective denominators.

use std::fmt::Write as _;

use super::{LatticeError, Matrix};
use crate::prng::TlcgState;

/// Relative slack allowed when checking that the reconstruction error does
/// not increase: `e(t+1) <= e(t) + MONOTONE_SLACK * max(e(t), ||V||)`.
/// Near an exact fit the error sits at the rounding floor and jitters.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// Resolution of the uniform initializer: entries are `k / 2^30`, `k >= 1`.
const INIT_RESOLUTION: i64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmfConfig {
    pub rank: usize,
    pub max_iterations: usize,
    /// Denominator guard.
    pub epsilon: f64,
    /// Penalty weight on `W`.
    pub alpha: f64,
    /// Penalty weight on `H`.
    pub beta: f64,
    /// Stop once `|e_prev - e| / e_prev` drops below this.
    pub tolerance: f64,
    pub init_seed: u64,
}

impl Default for NmfConfig {
    fn default() -> Self {
        Self {
            rank: 2,
            max_iterations: 500,
            epsilon: 1e-9,
            alpha: 0.0,
            beta: 0.0,
            tolerance: 1e-9,
            init_seed: 0,
        }
    }
}

impl NmfConfig {
    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.rank == 0 {
            return Err(LatticeError::InvalidConfig("rank must be >= 1"));
        }
        if self.max_iterations == 0 {
            return Err(LatticeError::InvalidConfig("max_iterations must be >= 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(LatticeError::InvalidConfig("epsilon must be positive"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(LatticeError::InvalidConfig("alpha must be >= 0"));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(LatticeError::InvalidConfig("beta must be >= 0"));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(LatticeError::InvalidConfig("tolerance must be >= 0"));
        }
        Ok(())
    }
}

/// Non-negative factors `W` (m x r) and `H` (r x n).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    w: Matrix,
    h: Matrix,
}

impl FactorPair {
    pub fn new(w: Matrix, h: Matrix) -> Result<Self, LatticeError> {
        if w.cols() != h.rows() {
            return Err(LatticeError::ShapeMismatch(format!(
                "W is {}x{} but H is {}x{}",
                w.rows(),
                w.cols(),
                h.rows(),
                h.cols()
            )));
        }
        if !w.is_nonnegative() || !h.is_nonnegative() {
            return Err(LatticeError::NegativeInput);
        }
        Ok(Self { w, h })
    }

    /// Uniform `(0, 1]` entries drawn from a triple-LCG stream seeded with
    /// `seed`: all of `W` row by row, then all of `H`.
    pub fn random(rows: usize, rank: usize, cols: usize, seed: u64) -> Self {
        let mut tlcg = TlcgState::with_default_params(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    let k = tlcg.next_in(0, INIT_RESOLUTION).expect("non-empty range") + 1;
                    k as f64 / INIT_RESOLUTION as f64
                })
                .collect()
        };
        let w = Matrix::from_vec(rows, rank, draw(rows * rank)).expect("shape");
        let h = Matrix::from_vec(rank, cols, draw(rank * cols)).expect("shape");
        Self { w, h }
    }

    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn into_parts(self) -> (Matrix, Matrix) {
        (self.w, self.h)
    }
}

/// Outcome of a factorization run.
#[derive(Debug, Clone, PartialEq)]
pub struct NmfRun {
    pub factors: FactorPair,
    /// Reconstruction error before the first update and after each one.
    pub errors: Vec<f64>,
}

impl NmfRun {
    pub fn iterations(&self) -> usize {
        self.errors.len() - 1
    }

    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("at least the initial error")
    }
}

/// `||V - W H||_F`.
pub fn reconstruction_error(v: &Matrix, w: &Matrix, h: &Matrix) -> Result<f64, LatticeError> {
    if w.cols() != h.rows() || v.rows() != w.rows() || v.cols() != h.cols() {
        return Err(LatticeError::ShapeMismatch(format!(
            "V {}x{}, W {}x{}, H {}x{}",
            v.rows(),
            v.cols(),
            w.rows(),
            w.cols(),
            h.rows(),
            h.cols()
        )));
    }
    let mut sum = 0.0;
    for i in 0..v.rows() {
        for j in 0..v.cols() {
            let mut wh = 0.0;
            for k in 0..w.cols() {
                wh += w.get(i, k) * h.get(k, j);
            }
            let d = v.get(i, j) - wh;
            sum += d * d;
        }
    }
    Ok(sum.sqrt())
}

/// One unregularized update of `H` then `W`.
pub fn multiplicative_step(v: &Matrix, factors: &mut FactorPair, epsilon: f64) {
    let FactorPair { w, h } = factors;

    let numer = w.t_matmul(v).expect("shapes checked by caller");
    let denom = w.t_matmul(w).expect("shape").matmul(h).expect("shape");
    for r in 0..h.rows() {
        for c in 0..h.cols() {
            let val = h.get(r, c) * numer.get(r, c) / (denom.get(r, c) + epsilon);
            h.set(r, c, val);
        }
    }

    let numer = v.matmul_t(h).expect("shape");
    let denom = w.matmul(&h.matmul_t(h).expect("shape")).expect("shape");
    for r in 0..w.rows() {
        for c in 0..w.cols() {
            let val = w.get(r, c) * numer.get(r, c) / (denom.get(r, c) + epsilon);
            w.set(r, c, val);
        }
    }
}

/// One update with Frobenius penalties `alpha ||W||^2` and `beta ||H||^2`.
/// With both weights zero it is bit-identical to [`multiplicative_step`].
pub fn regularized_step(v: &Matrix, factors: &mut FactorPair, epsilon: f64, alpha: f64, beta: f64) {
    let FactorPair { w, h } = factors;

    let numer = w.t_matmul(v).expect("shapes checked by caller");
    let denom = w.t_matmul(w).expect("shape").matmul(h).expect("shape");
    for r in 0..h.rows() {
        for c in 0..h.cols() {
            let old = h.get(r, c);
            let penalty = beta * 2.0 * old;
            let val = old * numer.get(r, c) / (denom.get(r, c) + penalty + epsilon);
            h.set(r, c, val);
        }
    }

    let numer = v.matmul_t(h).expect("shape");
    let denom = w.matmul(&h.matmul_t(h).expect("shape")).expect("shape");
    for r in 0..w.rows() {
        for c in 0..w.cols() {
            let old = w.get(r, c);
            let penalty = alpha * 2.0 * old;
            let val = old * numer.get(r, c) / (denom.get(r, c) + penalty + epsilon);
            w.set(r, c, val);
        }
    }
}

/// Factorizes `v` starting from the deterministic random initializer.
pub fn nmf_multiplicative(v: &Matrix, config: &NmfConfig) -> Result<NmfRun, LatticeError> {
    config.validate()?;
    if v.rows() == 0 || v.cols() == 0 {
        return Err(LatticeError::EmptyMatrix);
    }
    let init = FactorPair::random(v.rows(), config.rank, v.cols(), config.init_seed);
    nmf_from(v, init, config)
}

/// Factorizes `v` starting from explicit factors.
pub fn nmf_from(v: &Matrix, init: FactorPair, config: &NmfConfig) -> Result<NmfRun, LatticeError> {
    config.validate()?;
    if v.rows() == 0 || v.cols() == 0 {
        return Err(LatticeError::EmptyMatrix);
    }
    if !v.is_nonnegative() {
        return Err(LatticeError::NegativeInput);
    }
    let mut factors = init;
    let mut prev = reconstruction_error(v, &factors.w, &factors.h)?;
    let mut errors = Vec::with_capacity(config.max_iterations + 1);
    errors.push(prev);

    let regularized = config.alpha > 0.0 || config.beta > 0.0;
    for _ in 0..config.max_iterations {
        if regularized {
            regularized_step(v, &mut factors, config.epsilon, config.alpha, config.beta);
        } else {
            multiplicative_step(v, &mut factors, config.epsilon);
        }
        let err = reconstruction_error(v, &factors.w, &factors.h)?;
        errors.push(err);
        let change = if prev > 0.0 {
            (prev - err).abs() / prev
        } else {
            0.0
        };
        prev = err;
        if change < config.tolerance {
            break;
        }
    }
    Ok(NmfRun { factors, errors })
}

/// Text form of `W`: `PIOUW <m> <r>` then one line per row, entries with
/// five decimals separated by single spaces, every line ending in `\n`.
pub fn serialize_w(w: &Matrix) -> String {
    let mut out = String::with_capacity(16 + w.rows() * w.cols() * 10);
    writeln!(out, "PIOUW {} {}", w.rows(), w.cols()).unwrap();
    for r in 0..w.rows() {
        for (c, v) in w.row(r).iter().enumerate() {
            if c > 0 {
                out.push(' ');
            }
            write!(out, "{v:.5}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> LatticeError {
    LatticeError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_entry(token: &str, line: usize) -> Result<f64, LatticeError> {
    let well_formed = token.split_once('.').is_some_and(|(int, frac)| {
        !int.is_empty()
            && int.bytes().all(|b| b.is_ascii_digit())
            && frac.len() == 5
            && frac.bytes().all(|b| b.is_ascii_digit())
    });
    if !well_formed {
        return Err(parse_err(
            line,
            format!("expected a 5-decimal entry, got {token:?}"),
        ));
    }
    token
        .parse()
        .map_err(|_| parse_err(line, format!("bad entry {token:?}")))
}

pub fn parse_w(text: &str) -> Result<Matrix, LatticeError> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| parse_err(text.lines().count().max(1), "missing final newline"))?;
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or_default();
    let dims: Vec<&str> = header.split(' ').collect();
    let (rows, cols) = match dims.as_slice() {
        ["PIOUW", m, r] => match (m.parse::<usize>(), r.parse::<usize>()) {
            (Ok(m), Ok(r)) if r > 0 => (m, r),
            _ => return Err(parse_err(1, format!("bad dimensions in {header:?}"))),
        },
        _ => {
            return Err(parse_err(
                1,
                format!("expected `PIOUW <m> <r>`, got {header:?}"),
            ))
        }
    };
    let mut data = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        let lineno = row + 2;
        let line = lines
            .next()
            .ok_or_else(|| parse_err(lineno, format!("missing row {row}")))?;
        let entries: Vec<&str> = line.split(' ').collect();
        if entries.len() != cols {
            return Err(parse_err(
                lineno,
                format!("expected {cols} entries, got {}", entries.len()),
            ));
        }
        for e in entries {
            data.push(parse_entry(e, lineno)?);
        }
    }
    if lines.next().is_some() {
        return Err(parse_err(rows + 2, "trailing content"));
    }
    Matrix::from_vec(rows, cols, data)
}
