//! Single-active-electron model on a uniform 1D grid.
//!
//! The kinetic energy uses the 3-point stencil `-1/2 d^2/dx^2` with hard
//! walls: the wavefunction vanishes on the (virtual) points just outside the
//! grid. The same stencil is used by the eigensolver, the energy functional
//! and the Crank-Nicolson propagator so that all of them describe one and the
//! same discrete Hamiltonian.
//!
//! Sign conventions: the electron carries charge -1, so the dipole is
//! `R = -<x>` and a dipolar field `E(t)` enters as the potential `+x E(t)`.

mod eigen;
mod grid;

pub use eigen::{eigenstates, EigenSolution};
pub use grid::Grid1D;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real potential sampled on a grid (Hartree).
#[derive(Debug, Clone, PartialEq)]
pub struct StaticPotential {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl StaticPotential {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidParameter(format!(
                "potential has {} samples for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "potential is not finite at grid point {i}"
            )));
        }
        Ok(Self { grid, values })
    }

    /// Zero potential: a particle in a hard-walled box.
    pub fn free(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_points()],
        }
    }

    /// Diagonal of `T + V` for the 3-point stencil.
    pub fn hamiltonian_diagonal(&self) -> Vec<f64> {
        let kin = self.grid.kinetic_diagonal();
        self.values.iter().map(|v| v + kin).collect()
    }
}

/// Soft-Coulomb attraction `-1/sqrt(x^2 + softening)`.
pub fn soft_coulomb(grid: Grid1D, softening: f64) -> Result<StaticPotential> {
    if !(softening > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "soft-Coulomb softening must be positive, got {softening}"
        )));
    }
    let values = grid
        .coordinates()
        .map(|x| -1.0 / (x * x + softening).sqrt())
        .collect();
    StaticPotential::new(grid, values)
}

/// Complex amplitudes of one electron on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: Grid1D,
    pub amplitudes: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::InvalidParameter(format!(
                "wavefunction has {} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Build from a closure of the coordinate, then normalize.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let mut psi = Self::new(grid, grid.coordinates().map(f).collect())?;
        psi.normalize()?;
        Ok(psi)
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_squared();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(
                "cannot normalize a null wavefunction".into(),
            ));
        }
        let s = 1.0 / n.sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    /// `<self|other>` with the grid measure.
    pub fn inner(&self, other: &Wavefunction) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.spacing()
    }

    /// Normalized linear combination `sum_k c_k |states_k>`.
    pub fn superposition(states: &[(&Wavefunction, Complex64)]) -> Result<Wavefunction> {
        let first = states.first().ok_or(Error::Empty("superposition"))?.0;
        let mut amps = vec![Complex64::new(0.0, 0.0); first.amplitudes.len()];
        for (psi, c) in states {
            if psi.grid != first.grid {
                return Err(Error::InvalidParameter(
                    "superposition of states on different grids".into(),
                ));
            }
            for (a, b) in amps.iter_mut().zip(&psi.amplitudes) {
                *a += c * b;
            }
        }
        let mut out = Wavefunction::new(first.grid, amps)?;
        out.normalize()?;
        Ok(out)
    }
}

/// Dipole moment `R = -sum x |psi|^2 dx` of a single electron.
pub fn dipole(psi: &Wavefunction) -> f64 {
    dipole_of(&psi.amplitudes, &psi.grid)
}

pub(crate) fn dipole_of(amplitudes: &[Complex64], grid: &Grid1D) -> f64 {
    -grid
        .coordinates()
        .zip(amplitudes)
        .map(|(x, a)| x * a.norm_sqr())
        .sum::<f64>()
        * grid.spacing()
}

/// Dipole velocity from the discrete current, `-<p>` for one electron.
///
/// This is the exact time derivative of [`dipole`] under the 3-point
/// Hamiltonian with any local potential: `[x, T]` is the centered difference.
pub fn dipole_velocity(psi: &Wavefunction) -> f64 {
    dipole_velocity_of(&psi.amplitudes)
}

pub(crate) fn dipole_velocity_of(a: &[Complex64]) -> f64 {
    let n = a.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = 0.0;
    for i in 0..n {
        let right = if i + 1 < n { a[i + 1] } else { zero };
        let left = if i > 0 { a[i - 1] } else { zero };
        acc += (a[i].conj() * (right - left)).im;
    }
    -0.5 * acc
}

/// `<psi|T + V|psi>` with the 3-point kinetic stencil.
pub fn electronic_energy(psi: &Wavefunction, potential: &StaticPotential) -> f64 {
    let a = &psi.amplitudes;
    let n = a.len();
    let dx = psi.grid.spacing();
    let off = -0.5 / (dx * dx);
    let kin = psi.grid.kinetic_diagonal();
    let mut e = 0.0;
    for i in 0..n {
        let mut h = a[i] * (kin + potential.values[i]);
        if i > 0 {
            h += a[i - 1] * off;
        }
        if i + 1 < n {
            h += a[i + 1] * off;
        }
        e += (a[i].conj() * h).re;
    }
    e * dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hydrogen() -> (StaticPotential, EigenSolution) {
        let grid = Grid1D::new(301, 0.1).unwrap();
        let v = soft_coulomb(grid, 1.0).unwrap();
        let eig = eigenstates(&v, 4).unwrap();
        (v, eig)
    }

    #[test]
    fn soft_coulomb_values() {
        let grid = Grid1D::new(301, 0.1).unwrap();
        let v = soft_coulomb(grid, 1.0).unwrap();
        assert_eq!(v.values[150], -1.0);
        let min = v
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(min, 150);
        let g = Grid1D::with_center(3, 3f64.sqrt(), 0.0).unwrap();
        let v = soft_coulomb(g, 1.0).unwrap();
        assert_abs_diff_eq!(v.values[0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v.values[2], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn soft_coulomb_rejects_nonpositive_softening() {
        let grid = Grid1D::new(11, 0.1).unwrap();
        assert!(soft_coulomb(grid, 0.0).is_err());
        assert!(soft_coulomb(grid, -1.0).is_err());
    }

    #[test]
    fn dipole_of_ground_state_vanishes() {
        let (_, eig) = hydrogen();
        assert!(dipole(&eig.states[0]).abs() < 1e-10);
    }

    #[test]
    fn dipole_of_point_charge() {
        let grid = Grid1D::new(41, 0.1).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 41];
        amps[40] = Complex64::new(1.0, 0.0);
        let mut psi = Wavefunction::new(grid, amps).unwrap();
        psi.normalize().unwrap();
        assert_abs_diff_eq!(dipole(&psi), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn superposition_dipole_matches_matrix_element() {
        let (_, eig) = hydrogen();
        let one = Complex64::new(1.0, 0.0);
        let psi =
            Wavefunction::superposition(&[(&eig.states[0], one), (&eig.states[1], one)]).unwrap();
        let x01: f64 = eig.states[0]
            .grid
            .coordinates()
            .zip(
                eig.states[0]
                    .amplitudes
                    .iter()
                    .zip(&eig.states[1].amplitudes),
            )
            .map(|(x, (a, b))| x * (a.conj() * b).re)
            .sum::<f64>()
            * 0.1;
        assert_abs_diff_eq!(dipole(&psi), -x01, epsilon = 1e-12);
        // Oracle value computed independently with a dense LAPACK tridiagonal solve.
        assert_abs_diff_eq!(x01.abs(), 1.0479204888213107, epsilon = 1e-9);
    }

    #[test]
    fn real_wavefunctions_carry_no_current() {
        let (_, eig) = hydrogen();
        assert_eq!(dipole_velocity(&eig.states[1]), 0.0);
    }

    #[test]
    fn boosted_gaussian_velocity() {
        let grid = Grid1D::new(2001, 0.02).unwrap();
        let k = 0.7;
        let psi =
            Wavefunction::from_fn(grid, |x| Complex64::from_polar((-x * x / 4.0).exp(), k * x))
                .unwrap();
        // discrete momentum sin(k dx)/dx, times the nearest-neighbour overlap of the envelope
        let dx = 0.02f64;
        let expected = -(k * dx).sin() / dx * (-dx * dx / 8.0).exp();
        assert_abs_diff_eq!(dipole_velocity(&psi), expected, epsilon = 1e-10);
        assert_abs_diff_eq!(dipole_velocity(&psi), -k, epsilon = 1e-4);
    }

    #[test]
    fn energies_of_eigenstates_and_mixtures() {
        let (v, eig) = hydrogen();
        assert_abs_diff_eq!(
            electronic_energy(&eig.states[0], &v),
            eig.energies[0],
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            electronic_energy(&eig.states[1], &v),
            eig.energies[1],
            epsilon = 1e-8
        );
        let one = Complex64::new(1.0, 0.0);
        let psi =
            Wavefunction::superposition(&[(&eig.states[0], one), (&eig.states[1], one)]).unwrap();
        assert_abs_diff_eq!(
            electronic_energy(&psi, &v),
            0.5 * (eig.energies[0] + eig.energies[1]),
            epsilon = 1e-8
        );
    }

    #[test]
    fn same_parity_dipole_elements_vanish() {
        let (_, eig) = hydrogen();
        let elem = |m: usize, n: usize| -> f64 {
            eig.states[m]
                .grid
                .coordinates()
                .zip(
                    eig.states[m]
                        .amplitudes
                        .iter()
                        .zip(&eig.states[n].amplitudes),
                )
                .map(|(x, (a, b))| x * (a.conj() * b).re)
                .sum::<f64>()
                * 0.1
        };
        assert!(elem(0, 2).abs() < 1e-8);
        assert!(elem(1, 3).abs() < 1e-8);
        assert!(elem(0, 1).abs() > 0.5);
        // alternating parity
        for (n, s) in eig.states.iter().enumerate() {
            let a = &s.amplitudes;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..a.len() {
                assert!((a[i] - a[a.len() - 1 - i] * sign).norm() < 1e-8);
            }
        }
    }
}
