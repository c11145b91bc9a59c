//! Time-indexed sequences of fields and mixed `L^q_t L^r_x` norms.

use crate::field::{lebesgue_norm, Field};
use crate::grid::Grid1D;
use crate::{Error, Result};
use std::sync::Arc;

/// A sequence of states at strictly increasing instants starting at `t = 0`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Field>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<Field>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyInput("trajectory needs at least one instant"));
        }
        if times.len() != states.len() {
            return Err(Error::Format(format!(
                "{} instants vs {} states",
                times.len(),
                states.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::Format(format!("first instant must be 0, got {}", times[0])));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Format("instants must be strictly increasing".into()));
        }
        for s in &states[1..] {
            states[0].check_same_grid(s)?;
        }
        Ok(Trajectory { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Field] {
        &self.states
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        self.states[0].grid()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn state(&self, i: usize) -> &Field {
        &self.states[i]
    }

    pub fn final_state(&self) -> &Field {
        self.states.last().unwrap()
    }

    /// State at a stored instant, located by value within `tol`.
    pub fn state_at(&self, t: f64, tol: f64) -> Option<&Field> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= tol)
            .map(|i| &self.states[i])
    }

    /// Pointwise map over states, keeping the instants.
    pub fn map_states(&self, f: impl Fn(&Field) -> Field) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(f).collect(),
        }
    }

    pub fn zip_sub(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.times.len() != other.times.len() {
            return Err(Error::Format("trajectories carry different instants".into()));
        }
        let states = self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            times: self.times.clone(),
            states,
        })
    }
}

/// Mixed norm `( integral_I ||f(t)||_r^q dt )^{1/q}` with the time integral
/// taken by the trapezoid rule on the stored instants; `q = infinity` takes
/// the max over instants. Rejects single-instant trajectories when `q` is
/// finite (no interval to integrate over).
pub fn mixed_norm(traj: &Trajectory, q: f64, r: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    let space: Vec<f64> = traj
        .states()
        .iter()
        .map(|s| lebesgue_norm(s, r))
        .collect::<Result<_>>()?;
    if q.is_infinite() {
        return Ok(space.iter().fold(0.0, |a, &b| a.max(b)));
    }
    if traj.len() < 2 {
        return Err(Error::DegenerateTimeNorm);
    }
    let times = traj.times();
    let mut acc = 0.0;
    for i in 0..times.len() - 1 {
        let dt = times[i + 1] - times[i];
        acc += 0.5 * dt * (space[i].powf(q) + space[i + 1].powf(q));
    }
    Ok(acc.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn unit_indicator(g: &Arc<Grid1D>) -> Field {
        Field::from_fn(g, |x| {
            if (0.0..1.0).contains(&x) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::ZERO
            }
        })
        .unwrap()
    }

    #[test]
    fn constant_unit_trajectory_has_unit_mixed_norm() {
        let g = Grid1D::new(1024, 8.0).unwrap();
        let f = unit_indicator(&g);
        let times: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let states = vec![f; times.len()];
        let traj = Trajectory::new(times, states).unwrap();
        let v = mixed_norm(&traj, 4.0, 3.0).unwrap();
        assert!(rel(v, 1.0) < 1e-10, "{v}");
    }

    #[test]
    fn linear_ramp_matches_closed_form() {
        // ||f(t)||_r = t on [0,1]: (int t^2 dt)^(1/2) = 1/sqrt(3)
        let g = Grid1D::new(1024, 8.0).unwrap();
        let f = unit_indicator(&g);
        let m = 2000usize;
        let times: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        let states: Vec<Field> = times
            .iter()
            .map(|&t| f.scale(Complex64::new(t, 0.0)))
            .collect();
        let traj = Trajectory::new(times, states).unwrap();
        let v = mixed_norm(&traj, 2.0, 3.0).unwrap();
        assert!(rel(v, (1.0f64 / 3.0).sqrt()) < 1e-6, "{v}");
    }

    #[test]
    fn sup_in_time_is_max_over_instants() {
        let g = Grid1D::new(256, 8.0).unwrap();
        let f = unit_indicator(&g);
        let times = vec![0.0, 0.3, 1.0];
        let states = vec![
            f.scale(Complex64::new(0.5, 0.0)),
            f.scale(Complex64::new(2.0, 0.0)),
            f.scale(Complex64::new(1.0, 0.0)),
        ];
        let traj = Trajectory::new(times, states).unwrap();
        let v = mixed_norm(&traj, f64::INFINITY, 2.0).unwrap();
        let want = lebesgue_norm(&f.scale(Complex64::new(2.0, 0.0)), 2.0).unwrap();
        assert!(rel(v, want) < 1e-14);
    }

    #[test]
    fn single_instant_rejected_for_finite_q() {
        let g = Grid1D::new(64, 2.0).unwrap();
        let traj = Trajectory::new(vec![0.0], vec![Field::zero(&g)]).unwrap();
        assert!(mixed_norm(&traj, 2.0, 2.0).is_err());
        assert!(mixed_norm(&traj, f64::INFINITY, 2.0).is_ok());
    }

    #[test]
    fn tensor_grid_space_time_norm_matches_q_equals_r() {
        // with q = r, Fubini makes the mixed norm a plain space-time norm
        let g = Grid1D::new(128, 4.0).unwrap();
        let times: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
        let states: Vec<Field> = times
            .iter()
            .map(|&t| {
                Field::from_fn(&g, |x| Complex64::new((x + 0.3 * t).sin() * (-x * x / 2.0).exp(), t * x * 0.1))
                    .unwrap()
            })
            .collect();
        let traj = Trajectory::new(times.clone(), states.clone()).unwrap();
        let q = 3.0;
        let v = mixed_norm(&traj, q, q).unwrap();

        // direct tensor quadrature with the same trapezoid-in-time weights
        let dx = g.dx();
        let mut acc = 0.0;
        for i in 0..times.len() {
            let w = if i == 0 || i == times.len() - 1 { 0.5 } else { 1.0 } / 16.0;
            let s: f64 = states[i].values().iter().map(|v| v.norm().powf(q)).sum();
            acc += w * s * dx;
        }
        assert!(rel(v, acc.powf(1.0 / q)) < 1e-12);
    }
}
