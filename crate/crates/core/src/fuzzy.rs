//! Interval type-2 A2-C0 TSK fuzzy neural network with two inputs.
//!
//! Each antecedent is a triangular membership function with a shared centre
//! and an uncertain width `[width_lower, width_upper]`, so every input yields
//! a lower and an upper grade. Rule `(i, j)` fires with the product of the
//! grades and carries a crisp consequent `f_ij`. The output mixes the
//! normalized lower and upper firing levels with the weight `q`:
//!
//! ```text
//! τn = q Σ f_ij W̃lower_ij + (1 - q) Σ f_ij W̃upper_ij
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Triangular type-2 membership function with uncertain width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Type2TriangularMf {
    pub center: f64,
    pub width_lower: f64,
    pub width_upper: f64,
}

impl Type2TriangularMf {
    pub fn new(center: f64, width_lower: f64, width_upper: f64) -> Result<Self> {
        let mf = Self {
            center,
            width_lower,
            width_upper,
        };
        mf.validate()?;
        Ok(mf)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(Error::InvalidNetwork(format!("non-finite centre {}", self.center)));
        }
        if !(self.width_lower > 0.0 && self.width_lower <= self.width_upper && self.width_upper.is_finite()) {
            return Err(Error::InvalidNetwork(format!(
                "widths must satisfy 0 < lower <= upper, got [{}, {}]",
                self.width_lower, self.width_upper
            )));
        }
        Ok(())
    }

    /// Lower and upper membership grades at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let dist = (x - self.center).abs();
        (triangle(dist, self.width_lower), triangle(dist, self.width_upper))
    }
}

fn triangle(dist: f64, width: f64) -> f64 {
    if dist < width {
        1.0 - dist / width
    } else {
        0.0
    }
}

/// Grid layout and initialization of a fresh network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    /// Number of membership functions on the first input (I).
    pub rows: usize,
    /// Number of membership functions on the second input (J).
    pub cols: usize,
    /// Centres of the first input are spread over `[-x1_range, x1_range]`.
    pub x1_range: f64,
    /// Wide enough that the outer grades on ė stay clear of its noise.
    pub x2_range: f64,
    pub initial_q: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            rows: 3,
            cols: 3,
            x1_range: 1.0,
            x2_range: 10.0,
            initial_q: 0.5,
        }
    }
}

/// All learnable parameters of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T2FnnState {
    pub mfs_x1: Vec<Type2TriangularMf>,
    pub mfs_x2: Vec<Type2TriangularMf>,
    /// Consequents, row-major `I × J` (`f[i * J + j]`).
    pub consequents: Vec<f64>,
    pub q: f64,
}

fn spread(count: usize, range: f64) -> Vec<Type2TriangularMf> {
    let spacing = 2.0 * range / (count - 1) as f64;
    (0..count)
        .map(|k| Type2TriangularMf {
            center: -range + k as f64 * spacing,
            width_lower: 0.75 * spacing,
            width_upper: 1.5 * spacing,
        })
        .collect()
}

impl T2FnnState {
    /// Uniformly spaced centres, overlapping supports, zero consequents.
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        if cfg.rows < 2 || cfg.cols < 2 {
            return Err(Error::InvalidNetwork(format!(
                "need at least a 2x2 rule grid, got {}x{}",
                cfg.rows, cfg.cols
            )));
        }
        if !(cfg.x1_range > 0.0 && cfg.x2_range > 0.0) {
            return Err(Error::InvalidNetwork("input ranges must be positive".into()));
        }
        let state = Self {
            mfs_x1: spread(cfg.rows, cfg.x1_range),
            mfs_x2: spread(cfg.cols, cfg.x2_range),
            consequents: vec![0.0; cfg.rows * cfg.cols],
            q: cfg.initial_q,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn rows(&self) -> usize {
        self.mfs_x1.len()
    }

    pub fn cols(&self) -> usize {
        self.mfs_x2.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows() < 2 || self.cols() < 2 {
            return Err(Error::InvalidNetwork("need at least a 2x2 rule grid".into()));
        }
        if self.consequents.len() != self.rows() * self.cols() {
            return Err(Error::InvalidNetwork(format!(
                "expected {} consequents, got {}",
                self.rows() * self.cols(),
                self.consequents.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::InvalidNetwork(format!("q = {} outside [0, 1]", self.q)));
        }
        if self.consequents.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidNetwork("non-finite consequent".into()));
        }
        self.mfs_x1.iter().chain(&self.mfs_x2).try_for_each(|mf| mf.validate())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let state: Self = serde_json::from_str(text)?;
        state.validate()?;
        Ok(state)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Evaluates every membership function and the rule firing strengths.
    ///
    /// Normalization divides by the raw sum, or by `denom_floor` when the
    /// raw sum is smaller.
    pub fn fire(&self, x1: f64, x2: f64, denom_floor: f64) -> FiringStrengths {
        let grade = |mf: &Type2TriangularMf, x: f64| {
            let (lower, upper) = mf.eval(x);
            MfGrade {
                offset: x - mf.center,
                lower,
                upper,
            }
        };
        let grades_x1: Vec<MfGrade> = self.mfs_x1.iter().map(|mf| grade(mf, x1)).collect();
        let grades_x2: Vec<MfGrade> = self.mfs_x2.iter().map(|mf| grade(mf, x2)).collect();

        let n = grades_x1.len() * grades_x2.len();
        let mut w_lower = Vec::with_capacity(n);
        let mut w_upper = Vec::with_capacity(n);
        for g1 in &grades_x1 {
            for g2 in &grades_x2 {
                w_lower.push(g1.lower * g2.lower);
                w_upper.push(g1.upper * g2.upper);
            }
        }
        let sum_lower: f64 = w_lower.iter().sum();
        let sum_upper: f64 = w_upper.iter().sum();
        let den_lower = sum_lower.max(denom_floor);
        let den_upper = sum_upper.max(denom_floor);
        let wt_lower = w_lower.iter().map(|w| w / den_lower).collect();
        let wt_upper = w_upper.iter().map(|w| w / den_upper).collect();

        FiringStrengths {
            grades_x1,
            grades_x2,
            w_lower,
            w_upper,
            sum_lower,
            sum_upper,
            wt_lower,
            wt_upper,
            denom_floor,
        }
    }

    /// Network output from the normalized firing levels.
    pub fn infer(&self, fs: &FiringStrengths) -> f64 {
        let lower = dot(&self.consequents, &fs.wt_lower);
        let upper = dot(&self.consequents, &fs.wt_upper);
        self.q * lower + (1.0 - self.q) * upper
    }

    /// Network output written as two weighted averages over the raw firing
    /// strengths. Agrees with [`T2FnnState::infer`] up to rounding.
    pub fn infer_ratio_form(&self, fs: &FiringStrengths) -> f64 {
        let num_lower = dot(&self.consequents, &fs.w_lower);
        let num_upper = dot(&self.consequents, &fs.w_upper);
        self.q * num_lower / fs.sum_lower.max(fs.denom_floor)
            + (1.0 - self.q) * num_upper / fs.sum_upper.max(fs.denom_floor)
    }

    /// Convenience: fire and infer in one call.
    pub fn output(&self, x1: f64, x2: f64, denom_floor: f64) -> f64 {
        self.infer(&self.fire(x1, x2, denom_floor))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Grades of one membership function at the current input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfGrade {
    /// `x - c`
    pub offset: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Raw and normalized rule firing levels, row-major like the consequents.
#[derive(Debug, Clone, PartialEq)]
pub struct FiringStrengths {
    pub grades_x1: Vec<MfGrade>,
    pub grades_x2: Vec<MfGrade>,
    pub w_lower: Vec<f64>,
    pub w_upper: Vec<f64>,
    pub sum_lower: f64,
    pub sum_upper: f64,
    pub wt_lower: Vec<f64>,
    pub wt_upper: Vec<f64>,
    pub denom_floor: f64,
}

impl FiringStrengths {
    /// `q W̃lower + (1 - q) W̃upper`
    pub fn mix(&self, q: f64) -> Vec<f64> {
        self.wt_lower
            .iter()
            .zip(&self.wt_upper)
            .map(|(l, u)| q * l + (1.0 - q) * u)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net() -> T2FnnState {
        T2FnnState::new(&NetworkConfig::default()).unwrap()
    }

    #[test]
    fn mf_peak_support_and_hand_value() {
        let mf = Type2TriangularMf::new(0.0, 1.0, 2.0).unwrap();
        assert_eq!(mf.eval(0.0), (1.0, 1.0));
        assert_eq!(mf.eval(2.0), (0.0, 0.0));
        assert_eq!(mf.eval(-3.5), (0.0, 0.0));
        assert_eq!(mf.eval(0.5), (0.5, 0.75));
    }

    #[test]
    fn mf_rejects_inverted_widths() {
        assert!(Type2TriangularMf::new(0.0, 2.0, 1.0).is_err());
        assert!(Type2TriangularMf::new(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn default_grid_layout() {
        let n = net();
        let c: Vec<f64> = n.mfs_x1.iter().map(|m| m.center).collect();
        assert_eq!(c, vec![-1.0, 0.0, 1.0]);
        assert_eq!(n.mfs_x2[0].width_upper, 15.0);
        assert_eq!(n.mfs_x2[0].width_lower, 7.5);
        assert_eq!(n.q, 0.5);
        assert!(n.consequents.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn rejects_degenerate_grid() {
        let cfg = NetworkConfig {
            rows: 1,
            ..Default::default()
        };
        assert!(T2FnnState::new(&cfg).is_err());
    }

    #[test]
    fn firing_on_two_peaks() {
        let n = net();
        let fs = n.fire(1.0, -10.0, 1e-3);
        // row 2 (c=1), col 0 (c=-10)
        assert_eq!(fs.w_upper[2 * 3], 1.0);
        assert_eq!(fs.w_lower[2 * 3], 1.0);
    }

    #[test]
    fn constant_consequents_pass_through() {
        let mut n = net();
        n.consequents = vec![0.7; 9];
        for q in [0.0, 0.3, 1.0] {
            n.q = q;
            let fs = n.fire(0.37, -1.2, 1e-3);
            assert!((n.infer(&fs) - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn q_one_ignores_upper_levels() {
        let mut n = net();
        n.q = 1.0;
        n.consequents = (0..9).map(|k| k as f64).collect();
        let a = n.fire(0.2, 0.3, 1e-3);
        let mut widened = n.clone();
        for mf in widened.mfs_x1.iter_mut() {
            mf.width_upper *= 3.0;
        }
        let b = widened.fire(0.2, 0.3, 1e-3);
        assert_ne!(a.wt_upper, b.wt_upper);
        assert_eq!(n.infer(&a), widened.infer(&b));
    }

    #[test]
    fn floored_normalization_far_outside() {
        let n = net();
        let fs = n.fire(50.0, 50.0, 1e-3);
        assert_eq!(fs.sum_lower, 0.0);
        assert!(fs.wt_lower.iter().all(|&w| w == 0.0));
        assert_eq!(n.infer(&fs), 0.0);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let mut n = net();
        n.consequents[4] = -0.25;
        let back = T2FnnState::from_json(&n.to_json().unwrap()).unwrap();
        assert_eq!(back, n);
        n.q = 1.5;
        assert!(T2FnnState::from_json(&serde_json::to_string(&n).unwrap()).is_err());
    }
}
