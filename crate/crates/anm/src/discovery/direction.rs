//! Bivariate direction inference: fit both candidate models, keep the one
//! whose residual is more independent of its input.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::hsic::{hsic_pvalue, HsicOptions};
use crate::regression::{self, RegressionMethod};
use crate::NodeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    XCausesY,
    YCausesX,
    Undecided,
}

#[derive(Clone, Copy, Debug)]
pub struct DirectionOptions {
    /// Both models rejected when both p-values are at or below this floor;
    /// the verdict is then undecided. 0.0 disables rejection.
    pub rejection_floor: f64,
}

impl Default for DirectionOptions {
    fn default() -> DirectionOptions {
        DirectionOptions { rejection_floor: 0.0 }
    }
}

#[derive(Clone, Debug)]
pub struct DirectionVerdict {
    /// Independence p-value of (residual of y on x) vs x.
    pub p_forward: f64,
    /// Independence p-value of (residual of x on y) vs y.
    pub p_backward: f64,
    pub decision: Direction,
    /// Ranking confidence: the larger of the two p-values.
    pub rank_key: f64,
    pub degenerate: bool,
}

fn residual_independence_p(d: &Dataset, response: usize, rm: RegressionMethod) -> Result<f64> {
    let predictor = 1 - response;
    let fit = regression::fit(d, response, NodeSet::singleton(predictor), rm).map_err(|e| {
        Error::RegressionFailed { response, predictors: vec![predictor], source: Box::new(e) }
    })?;
    let r = hsic_pvalue(&[&fit.residuals], &[d.column(predictor)], &HsicOptions::default())?;
    Ok(r.p_value)
}

pub fn infer_direction(x: &[f64], y: &[f64], rm: RegressionMethod) -> Result<DirectionVerdict> {
    infer_direction_with(x, y, rm, &DirectionOptions::default())
}

pub fn infer_direction_with(
    x: &[f64],
    y: &[f64],
    rm: RegressionMethod,
    opts: &DirectionOptions,
) -> Result<DirectionVerdict> {
    if x.len() != y.len() {
        return Err(Error::RowCountMismatch(x.len(), y.len()));
    }
    if x.len() < 20 {
        return Err(Error::TooFewSamples { need: 19, got: x.len(), what: "direction inference" });
    }
    let sd = |col: &[f64]| {
        let n = col.len() as f64;
        let m = col.iter().sum::<f64>() / n;
        (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt()
    };
    if sd(x) < 1e-12 || sd(y) < 1e-12 {
        return Ok(DirectionVerdict {
            p_forward: 1.0,
            p_backward: 1.0,
            decision: Direction::Undecided,
            rank_key: 1.0,
            degenerate: true,
        });
    }

    let d = Dataset::new(vec!["x".into(), "y".into()], vec![x.to_vec(), y.to_vec()])?;
    let p_forward = residual_independence_p(&d, 1, rm)?;
    let p_backward = residual_independence_p(&d, 0, rm)?;

    let rank_key = p_forward.max(p_backward);
    let decision = if rank_key <= opts.rejection_floor || p_forward == p_backward {
        Direction::Undecided
    } else if p_forward > p_backward {
        Direction::XCausesY
    } else {
        Direction::YCausesX
    };

    Ok(DirectionVerdict { p_forward, p_backward, decision, rank_key, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn sn(rng: &mut impl Rng) -> f64 {
        StandardNormal.sample(rng)
    }

    #[test]
    fn cubic_gaussian_pair_is_oriented() {
        let mut hits = 0;
        for seed in 0..10u64 {
            let mut rng = rng_from_seed(600 + seed);
            let n = 300;
            let x: Vec<f64> = (0..n).map(|_| sn(&mut rng)).collect();
            let y: Vec<f64> = x.iter().map(|v| v + v.powi(3) + sn(&mut rng)).collect();
            let v = infer_direction(&x, &y, RegressionMethod::Kernel).unwrap();
            if v.decision == Direction::XCausesY {
                hits += 1;
            }
        }
        assert!(hits >= 9, "oriented {hits}/10");
    }

    #[test]
    fn linear_gaussian_pair_accepts_both_models() {
        let mut both_fit = 0;
        for seed in 0..10u64 {
            let mut rng = rng_from_seed(700 + seed);
            let n = 300;
            let x: Vec<f64> = (0..n).map(|_| sn(&mut rng)).collect();
            let y: Vec<f64> = x.iter().map(|v| 0.8 * v + 0.6 * sn(&mut rng)).collect();
            let v = infer_direction(&x, &y, RegressionMethod::Linear).unwrap();
            if v.p_forward > 0.05 && v.p_backward > 0.05 {
                both_fit += 1;
            }
        }
        assert!(both_fit >= 8, "both models accepted in {both_fit}/10");
    }

    #[test]
    fn independent_pair_ranks_high() {
        let mut rng = rng_from_seed(800);
        let n = 200;
        let x: Vec<f64> = (0..n).map(|_| sn(&mut rng)).collect();
        let y: Vec<f64> = (0..n).map(|_| sn(&mut rng)).collect();
        let v = infer_direction(&x, &y, RegressionMethod::Linear).unwrap();
        assert!(v.rank_key > 0.05);
    }

    #[test]
    fn constant_column_is_degenerate() {
        let x = vec![1.0; 50];
        let y: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let v = infer_direction(&x, &y, RegressionMethod::Linear).unwrap();
        assert!(v.degenerate);
        assert_eq!(v.decision, Direction::Undecided);
    }

    #[test]
    fn decision_matches_argmax() {
        let mut rng = rng_from_seed(900);
        let n = 150;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + 0.3 * rng.gen_range(-1.0..1.0f64)).collect();
        let v = infer_direction(&x, &y, RegressionMethod::Linear).unwrap();
        match v.decision {
            Direction::XCausesY => assert!(v.p_forward > v.p_backward),
            Direction::YCausesX => assert!(v.p_backward > v.p_forward),
            Direction::Undecided => assert_eq!(v.p_forward, v.p_backward),
        }
        assert_eq!(v.rank_key, v.p_forward.max(v.p_backward));
    }

    #[test]
    fn affine_rescaling_preserves_decision() {
        let mut rng = rng_from_seed(901);
        let n = 250;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + 0.3 * rng.gen_range(-1.0..1.0f64)).collect();
        let xs: Vec<f64> = x.iter().map(|v| 12.0 * v - 7.0).collect();
        let ys: Vec<f64> = y.iter().map(|v| -0.2 * v + 3.0).collect();
        let a = infer_direction(&x, &y, RegressionMethod::Linear).unwrap();
        let b = infer_direction(&xs, &ys, RegressionMethod::Linear).unwrap();
        assert_eq!(a.decision, b.decision);
    }

    #[test]
    fn undersized_input_is_rejected() {
        let x = vec![0.0; 10];
        let y = vec![0.0; 10];
        assert!(matches!(
            infer_direction(&x, &y, RegressionMethod::Linear),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
