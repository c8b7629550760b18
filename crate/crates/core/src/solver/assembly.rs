//! Residual and Jacobian of the compartment equations.
//!
//! Unknown layout: `x[0]` is the left boundary potential `φ_A`, followed by
//! one block `[c_1, .., c_m, φ]` per compartment. With this ordering every
//! equation couples only to its own and the neighbouring blocks, so the
//! Jacobian is banded with half-bandwidth `2 (m + 1) - 1`.
//!
//! Rows are scaled per unit width: continuity rows read
//! `(c - c_prev)/dt + (J_out - J_in)/δ`, Poisson rows `(D_out - D_in)/δ - ρ`.

use super::banded::BandMatrix;
use super::StateVector;
use crate::network::{Discretization, FluxEval};

/// What is imposed at the left boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryControl {
    Potential(f64),
    Current(f64),
}

/// Time discretization of the storage terms.
#[derive(Debug, Clone, Copy)]
pub enum TimeTerm<'a> {
    Steady,
    Implicit { prev: &'a StateVector, dt: f64 },
}

pub struct Layout {
    pub n: usize,
    pub m: usize,
}

impl Layout {
    pub fn new(disc: &Discretization) -> Self {
        Self {
            n: disc.len(),
            m: disc.species(),
        }
    }

    #[inline]
    pub fn block(&self) -> usize {
        self.m + 1
    }

    pub fn unknowns(&self) -> usize {
        1 + self.n * self.block()
    }

    pub fn bandwidth(&self) -> usize {
        2 * self.block() - 1
    }

    #[inline]
    pub fn conc(&self, i: usize, k: usize) -> usize {
        1 + k * self.block() + i
    }

    #[inline]
    pub fn phi(&self, k: usize) -> usize {
        1 + k * self.block() + self.m
    }

    pub fn is_concentration(&self, idx: usize) -> bool {
        idx > 0 && (idx - 1) % self.block() < self.m
    }

    pub fn pack(&self, s: &StateVector) -> Vec<f64> {
        let mut x = vec![0.0; self.unknowns()];
        x[0] = s.phi_left;
        for k in 0..self.n {
            for i in 0..self.m {
                x[self.conc(i, k)] = s.conc[i][k];
            }
            x[self.phi(k)] = s.phi[k];
        }
        x
    }

    pub fn unpack(&self, x: &[f64], into: &mut StateVector) {
        into.phi_left = x[0];
        for k in 0..self.n {
            for i in 0..self.m {
                into.conc[i][k] = x[self.conc(i, k)];
            }
            into.phi[k] = x[self.phi(k)];
        }
    }
}

/// Flux of species `i` across face `f` (0 = left boundary, n = right
/// boundary) together with the unknown indices of its two nodes.
pub fn face_flux(
    disc: &Discretization,
    lay: &Layout,
    x: &[f64],
    i: usize,
    f: usize,
) -> (FluxEval, [Option<usize>; 2], [Option<usize>; 2]) {
    let n = lay.n;
    if f == 0 {
        let j = disc.left_boundary_flux(i, x[lay.conc(i, 0)], x[lay.phi(0)], x[0]);
        (j, [None, Some(lay.conc(i, 0))], [Some(0), Some(lay.phi(0))])
    } else if f == n {
        let k = n - 1;
        let j = disc.right_boundary_flux(i, x[lay.conc(i, k)], x[lay.phi(k)]);
        (j, [Some(lay.conc(i, k)), None], [Some(lay.phi(k)), None])
    } else {
        let (l, r) = (f - 1, f);
        let j = disc.interior_flux(
            i,
            l,
            [x[lay.conc(i, l)], x[lay.conc(i, r)]],
            [x[lay.phi(l)], x[lay.phi(r)]],
        );
        (
            j,
            [Some(lay.conc(i, l)), Some(lay.conc(i, r))],
            [Some(lay.phi(l)), Some(lay.phi(r))],
        )
    }
}

/// Displacement across face `f` and its conductance with the node indices:
/// `D = G (φ_left - φ_right)`.
pub fn face_displacement(disc: &Discretization, lay: &Layout, x: &[f64], f: usize) -> (f64, f64, [Option<usize>; 2]) {
    let n = lay.n;
    if f == 0 {
        let g = disc.boundary_displacement_conductance(0);
        (g * (x[0] - x[lay.phi(0)]), g, [Some(0), Some(lay.phi(0))])
    } else if f == n {
        let g = disc.boundary_displacement_conductance(n - 1);
        (g * x[lay.phi(n - 1)], g, [Some(lay.phi(n - 1)), None])
    } else {
        let g = disc.displacement_conductance(f - 1);
        let (l, r) = (lay.phi(f - 1), lay.phi(f));
        (g * (x[l] - x[r]), g, [Some(l), Some(r)])
    }
}

/// Evaluates the residual into `res` and, if requested, the Jacobian.
pub fn assemble(
    disc: &Discretization,
    x: &[f64],
    control: BoundaryControl,
    time: TimeTerm<'_>,
    res: &mut [f64],
    mut jac: Option<&mut BandMatrix>,
) {
    let lay = Layout::new(disc);
    let (n, m) = (lay.n, lay.m);
    res.fill(0.0);
    if let Some(j) = jac.as_deref_mut() {
        j.clear();
    }
    macro_rules! jadd {
        ($row:expr, $col:expr, $v:expr) => {
            if let (Some(j), Some(col)) = (jac.as_deref_mut(), $col) {
                j.add($row, col, $v);
            }
        };
    }

    // storage and local charge
    for k in 0..n {
        for i in 0..m {
            let row = lay.conc(i, k);
            if let TimeTerm::Implicit { prev, dt } = time {
                res[row] += (x[row] - prev.conc[i][k]) / dt;
                jadd!(row, Some(row), 1.0 / dt);
            }
        }
        let row = lay.phi(k);
        let rho = disc.charge_density(k, |i| x[lay.conc(i, k)]);
        res[row] -= rho;
        for i in 0..m {
            jadd!(row, Some(lay.conc(i, k)), -disc.valence(i));
        }
    }

    // face fluxes and displacements
    for f in 0..=n {
        let left = f.checked_sub(1);
        let right = (f < n).then_some(f);
        for i in 0..m {
            let (j, cols_c, cols_phi) = face_flux(disc, &lay, x, i, f);
            let partials = [
                (cols_c[0], j.dc_left),
                (cols_c[1], j.dc_right),
                (cols_phi[0], j.dphi_left),
                (cols_phi[1], j.dphi_right),
            ];
            if let Some(k) = left {
                let row = lay.conc(i, k);
                let w = 1.0 / disc.width(k);
                res[row] += w * j.value;
                for (col, d) in partials {
                    jadd!(row, col, w * d);
                }
            }
            if let Some(k) = right {
                let row = lay.conc(i, k);
                let w = 1.0 / disc.width(k);
                res[row] -= w * j.value;
                for (col, d) in partials {
                    jadd!(row, col, -w * d);
                }
            }
        }
        let (d, g, cols) = face_displacement(disc, &lay, x, f);
        if let Some(k) = left {
            let row = lay.phi(k);
            let w = 1.0 / disc.width(k);
            res[row] += w * d;
            jadd!(row, cols[0], w * g);
            jadd!(row, cols[1], -w * g);
        }
        if let Some(k) = right {
            let row = lay.phi(k);
            let w = 1.0 / disc.width(k);
            res[row] -= w * d;
            jadd!(row, cols[0], -w * g);
            jadd!(row, cols[1], w * g);
        }
    }

    // boundary equation
    match control {
        BoundaryControl::Potential(v) => {
            res[0] = x[0] - v;
            jadd!(0, Some(0), 1.0);
        }
        BoundaryControl::Current(current) => {
            let mut r = -current;
            for i in 0..m {
                let z = disc.valence(i);
                let (j, cols_c, cols_phi) = face_flux(disc, &lay, x, i, 0);
                r += z * j.value;
                jadd!(0, cols_c[1], z * j.dc_right);
                jadd!(0, cols_phi[0], z * j.dphi_left);
                jadd!(0, cols_phi[1], z * j.dphi_right);
            }
            if let TimeTerm::Implicit { prev, dt } = time {
                let (d, g, cols) = face_displacement(disc, &lay, x, 0);
                r += (d - prev.displacement_left) / dt;
                jadd!(0, cols[0], g / dt);
                jadd!(0, cols[1], -g / dt);
            }
            res[0] = r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CompartmentGrid, Region};
    use crate::units::DimensionlessSystem;

    fn small_problem() -> (Discretization, StateVector) {
        let s = DimensionlessSystem::default();
        let widths = vec![2.0, 0.6, 0.05, 0.05, 1.5, 0.6, 0.05, 3.0];
        use Region::*;
        let regions = vec![
            SolutionLeft,
            SolutionLeft,
            SolutionLeft,
            Membrane,
            Membrane,
            Membrane,
            SolutionRight,
            SolutionRight,
        ];
        let g = CompartmentGrid::from_widths(widths, regions).unwrap();
        let disc = Discretization::new(&s, &g).unwrap();
        let mut st = StateVector::uniform(&s, &g);
        for k in 0..g.len() {
            st.conc[0][k] = 1.0 + 0.1 * (k as f64).sin();
            st.conc[1][k] = 0.8 + 0.05 * (k as f64).cos();
            st.phi[k] = 0.3 * (k as f64 * 0.7).sin();
        }
        st.phi_left = 0.4;
        st.displacement_left = 0.01;
        (disc, st)
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let (disc, st) = small_problem();
        let lay = Layout::new(&disc);
        let x = lay.pack(&st);
        let mut prev = st.clone();
        prev.conc[0][2] += 0.01;
        let controls = [BoundaryControl::Potential(0.7), BoundaryControl::Current(0.02)];
        for control in controls {
            for time in [TimeTerm::Steady, TimeTerm::Implicit { prev: &prev, dt: 0.3 }] {
                let nx = lay.unknowns();
                let bw = lay.bandwidth();
                let mut jac = BandMatrix::new(nx, bw, bw);
                let mut r0 = vec![0.0; nx];
                assemble(&disc, &x, control, time, &mut r0, Some(&mut jac));
                let h = 1e-7;
                for col in 0..nx {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[col] += h;
                    xm[col] -= h;
                    let mut rp = vec![0.0; nx];
                    let mut rm = vec![0.0; nx];
                    assemble(&disc, &xp, control, time, &mut rp, None);
                    assemble(&disc, &xm, control, time, &mut rm, None);
                    for row in 0..nx {
                        let fd = (rp[row] - rm[row]) / (2.0 * h);
                        let an = jac.get(row, col);
                        assert!(
                            (fd - an).abs() <= 1e-5 * (1.0 + an.abs()),
                            "J[{row},{col}] analytic {an} vs fd {fd}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pack_unpack_round_trip() {
        let (disc, st) = small_problem();
        let lay = Layout::new(&disc);
        let x = lay.pack(&st);
        let mut back = st.clone();
        back.phi.fill(0.0);
        back.conc[1].fill(0.0);
        lay.unpack(&x, &mut back);
        assert_eq!(back, st);
        assert!(lay.is_concentration(lay.conc(1, 3)));
        assert!(!lay.is_concentration(lay.phi(3)));
        assert!(!lay.is_concentration(0));
    }
}
