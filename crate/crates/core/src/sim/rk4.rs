//! Classical fixed-step fourth-order Runge–Kutta.

use crate::error::{Error, Result};

const EDGE_INSET: f64 = 1e-12;

/// Reusable RK4 stepper holding its stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    scratch: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            scratch: vec![0.0; dim],
        }
    }

    /// Advance `state` from `x` to `x + h`. Every stage derivative is checked
    /// for finiteness.
    ///
    /// The first and last stages are sampled a relative `1e-12` inside the
    /// step, so a right-hand side with a breakpoint on a grid node (a profile
    /// that is only C¹, say) is always evaluated on the side the step covers.
    pub fn step<F>(&mut self, field: &mut F, x: f64, h: f64, state: &mut [f64]) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let n = state.len();
        debug_assert_eq!(n, self.k1.len());

        let inset = EDGE_INSET * h;
        field(x + inset, state, &mut self.k1)?;
        check_finite(&self.k1, x)?;
        for i in 0..n {
            self.scratch[i] = state[i] + 0.5 * h * self.k1[i];
        }
        field(x + 0.5 * h, &self.scratch, &mut self.k2)?;
        check_finite(&self.k2, x + 0.5 * h)?;
        for i in 0..n {
            self.scratch[i] = state[i] + 0.5 * h * self.k2[i];
        }
        field(x + 0.5 * h, &self.scratch, &mut self.k3)?;
        check_finite(&self.k3, x + 0.5 * h)?;
        for i in 0..n {
            self.scratch[i] = state[i] + h * self.k3[i];
        }
        field(x + h - inset, &self.scratch, &mut self.k4)?;
        check_finite(&self.k4, x + h)?;
        for i in 0..n {
            state[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        check_finite(state, x + h)
    }
}

fn check_finite(v: &[f64], at: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { at })
    }
}

/// Uniformly spaced integration grid `start, start + step, ..., end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive, got {step}"
            )));
        }
        if !(end > start) {
            return Err(Error::InvalidParameter(format!(
                "grid needs end > start, got [{start}, {end}]"
            )));
        }
        Ok(Self { start, end, step })
    }

    /// Number of steps; the last point may overshoot `end` by less than half a step.
    pub fn steps(&self) -> usize {
        ((self.end - self.start) / self.step).round() as usize
    }

    pub fn len(&self) -> usize {
        self.steps() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }
}

/// Integrate `field` over `grid`, returning the state at every grid point.
pub fn integrate_rk4<F>(mut field: F, initial: &[f64], grid: &UniformGrid) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let mut rk = Rk4::new(initial.len());
    let mut state = initial.to_vec();
    let mut out = Vec::with_capacity(grid.len());
    out.push(state.clone());
    for k in 0..grid.steps() {
        rk.step(&mut field, grid.point(k), grid.step, &mut state)?;
        out.push(state.clone());
    }
    Ok(out)
}
