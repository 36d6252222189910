//! Trimmed means and least-squares lines over any float type.

use num_traits::Float;

/// Mean of the samples left after dropping the `trim` smallest and `trim`
/// largest, with the extremes of the full sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimmedStats<F> {
    pub mean: F,
    pub min: F,
    pub max: F,
    pub kept: usize,
}

impl<F: Float> TrimmedStats<F> {
    /// `None` unless more than `2 * trim` samples are given or if any is NaN.
    pub fn compute(samples: &[F], trim: usize) -> Option<Self> {
        if samples.len() <= 2 * trim || samples.iter().any(|x| x.is_nan()) {
            return None;
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
        let middle = &sorted[trim..sorted.len() - trim];
        let sum = middle.iter().fold(F::zero(), |acc, &x| acc + x);
        Some(TrimmedStats {
            mean: sum / F::from(middle.len())?,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            kept: middle.len(),
        })
    }
}

/// `y = slope * x + intercept`, with the coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<F> {
    pub slope: F,
    pub intercept: F,
    pub r_squared: F,
}

impl<F: Float> LinearFit<F> {
    /// Ordinary least squares. Needs two distinct x values.
    pub fn fit(xs: &[F], ys: &[F]) -> Option<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return None;
        }
        let n = F::from(xs.len())?;
        let mean_x = xs.iter().fold(F::zero(), |a, &x| a + x) / n;
        let mean_y = ys.iter().fold(F::zero(), |a, &y| a + y) / n;
        let (mut sxx, mut sxy, mut syy) = (F::zero(), F::zero(), F::zero());
        for (&x, &y) in xs.iter().zip(ys) {
            let (dx, dy) = (x - mean_x, y - mean_y);
            sxx = sxx + dx * dx;
            sxy = sxy + dx * dy;
            syy = syy + dy * dy;
        }
        if sxx == F::zero() {
            return None;
        }
        let slope = sxy / sxx;
        let intercept = mean_y - slope * mean_x;
        let ss_res = xs.iter().zip(ys).fold(F::zero(), |acc, (&x, &y)| {
            let r = y - (slope * x + intercept);
            acc + r * r
        });
        // A flat series is fitted exactly by a flat line.
        let r_squared = if syy == F::zero() {
            F::one()
        } else {
            F::one() - ss_res / syy
        };
        Some(LinearFit {
            slope,
            intercept,
            r_squared,
        })
    }

    pub fn predict(&self, x: F) -> F {
        self.slope * x + self.intercept
    }
}
