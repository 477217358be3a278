//! Backward-Euler finite-volume solver for the 2D heat equation with a
//! Joule-heated film, Picard-iterated on temperature-dependent properties.

use serde::{Deserialize, Serialize};

use super::banded::{BandedCholesky, BandedMatrix};
use super::boundary::{BoundaryCondition, PropertyMode};
use super::drive::{electro_thermal_source, DrivePulse};
use super::trace::{Trace, TraceSample, TransientState};
use crate::device::{DiscretizedDomain, HeaterElement, MaterialId};
use crate::error::{PropertyError, SolverError};
use crate::gasmix::{HumidAirModel, HumidAirState, PROPERTY_T_MAX, PROPERTY_T_MIN};

const STEFAN_BOLTZMANN: f64 = 5.670_374_419e-8;
/// Fewest time steps allowed per pulse.
pub const MIN_STEPS_PER_PULSE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Picard stops once the max nodal change between iterates drops below this [K].
    pub picard_tol_k: f64,
    pub max_picard_iterations: usize,
    /// Emissivity of the heater film for the linearized radiation loss; zero
    /// disables radiation.
    pub emissivity: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            picard_tol_k: 1e-4,
            max_picard_iterations: 25,
            emissivity: 0.0,
        }
    }
}

/// Unknown numbering: column-major, with one extra film-plane slot per
/// column when the domain carries a heater film.
#[derive(Debug, Clone, Copy)]
struct Layout {
    nx: usize,
    nz: usize,
    slots: usize,
    film_row: Option<usize>,
}

impl Layout {
    fn new(domain: &DiscretizedDomain) -> Self {
        let film_row = domain.film.as_ref().map(|f| f.face_row);
        let nz = domain.nz();
        Self {
            nx: domain.nx(),
            nz,
            slots: nz + film_row.is_some() as usize,
            film_row,
        }
    }

    fn len(&self) -> usize {
        self.nx * self.slots
    }

    #[inline]
    fn cell(&self, i: usize, k: usize) -> usize {
        let shift = matches!(self.film_row, Some(f) if k >= f) as usize;
        i * self.slots + k + shift
    }

    #[inline]
    fn film(&self, i: usize) -> Option<usize> {
        self.film_row.map(|f| i * self.slots + f)
    }
}

/// Per-cell material properties at one Picard iterate.
struct CellProperties {
    lambda: Vec<f64>,
    capacity: Vec<f64>,
}

/// A conductance from an unknown to a fixed temperature outside the domain.
#[derive(Debug, Clone, Copy)]
struct BoundaryLink {
    node: usize,
    g: f64,
    t_outside: f64,
}

/// Result of one accepted time step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: TransientState,
    /// Max nodal change of every Picard iterate [K].
    pub picard_history: Vec<f64>,
    pub energy_in_j: f64,
    pub energy_stored_j: f64,
    pub energy_out_j: f64,
}

/// Everything a transient run needs; borrows the immutable inputs.
pub struct Solver<'a> {
    domain: &'a DiscretizedDomain,
    gas: &'a HumidAirModel,
    heater: &'a HeaterElement,
    drive: DrivePulse,
    mode: PropertyMode,
    ambient: HumidAirState,
    settings: SolverSettings,
    layout: Layout,
    /// Properties of a constant-property run, evaluated once.
    frozen: Option<CellProperties>,
    /// Factorizations of the constant system keyed by step length bits.
    factors: Vec<(u64, BandedCholesky)>,
}

impl<'a> Solver<'a> {
    pub fn new(
        domain: &'a DiscretizedDomain,
        gas: &'a HumidAirModel,
        heater: &'a HeaterElement,
        drive: DrivePulse,
        mode: PropertyMode,
        ambient: HumidAirState,
        settings: SolverSettings,
    ) -> Result<Self, SolverError> {
        drive.validate()?;
        mode.validate()?;
        for bc in [
            domain.boundaries.left,
            domain.boundaries.right,
            domain.boundaries.bottom,
            domain.boundaries.top,
        ] {
            bc.validate()?;
        }
        if !(settings.emissivity >= 0.0 && settings.emissivity <= 1.0) {
            return Err(SolverError::InvalidInput(
                "emissivity must lie in [0, 1]".into(),
            ));
        }
        let layout = Layout::new(domain);
        let mut solver = Self {
            domain,
            gas,
            heater,
            drive,
            mode,
            ambient,
            settings,
            layout,
            frozen: None,
            factors: Vec::new(),
        };
        if let PropertyMode::ConstantAtReference { t_ref } = mode {
            let uniform = vec![t_ref; layout.len()];
            solver.frozen = Some(solver.properties(&uniform)?);
        }
        Ok(solver)
    }

    pub fn domain(&self) -> &DiscretizedDomain {
        self.domain
    }

    /// Uniform field at the ambient temperature, t = 0.
    pub fn initial_state(&self) -> TransientState {
        let field = vec![self.ambient.t; self.layout.len()];
        let heater_temperature = self.heater_temperature(&field);
        TransientState {
            time: 0.0,
            instantaneous_power: electro_thermal_source(
                &self.drive,
                self.heater,
                heater_temperature,
                0.0,
            ),
            heater_temperature,
            field,
        }
    }

    /// Width-weighted mean temperature of the heater film nodes; falls back
    /// to the field mean for domains without a film.
    pub fn heater_temperature(&self, field: &[f64]) -> f64 {
        heater_temperature(self.domain, field)
    }

    fn properties(&self, field: &[f64]) -> Result<CellProperties, PropertyError> {
        let d = self.domain;
        let n = d.cell_count();
        let mut lambda = vec![0.0; n];
        let mut capacity = vec![0.0; n];
        let fixed_t = match self.mode {
            PropertyMode::ConstantAtReference { t_ref } => Some(t_ref),
            PropertyMode::TemperatureDependent => None,
        };
        for i in 0..d.nx() {
            for k in 0..d.nz() {
                let c = d.cell_index(i, k);
                let t = fixed_t.unwrap_or(field[self.layout.cell(i, k)]);
                let volume = d.dx(i) * d.dz(k) * d.depth_m;
                let (l, rc) = match d.materials[c] {
                    MaterialId::Gas => {
                        let state = HumidAirState { t, ..self.ambient };
                        (
                            self.gas.lambda_mixture(state.x, t)?,
                            self.gas.volumetric_heat_capacity(&state)?,
                        )
                    }
                    solid => {
                        let m = match solid {
                            MaterialId::Substrate => &d.solids.substrate,
                            _ => &d.solids.cap_ceramic,
                        };
                        if fixed_t.is_none() && !(PROPERTY_T_MIN..=PROPERTY_T_MAX).contains(&t) {
                            return Err(PropertyError::TemperatureOutOfRange {
                                t,
                                min: PROPERTY_T_MIN,
                                max: PROPERTY_T_MAX,
                            });
                        }
                        (m.lambda_w_mk.at(t), m.volumetric_heat_capacity())
                    }
                };
                lambda[c] = l;
                capacity[c] = rc * volume;
            }
        }
        Ok(CellProperties { lambda, capacity })
    }

    fn boundary_conductance(
        &self,
        bc: BoundaryCondition,
        g_half: f64,
        area: f64,
    ) -> Option<(f64, f64)> {
        match bc {
            BoundaryCondition::Adiabatic => None,
            BoundaryCondition::FixedAmbient => Some((g_half, self.ambient.t)),
            BoundaryCondition::FixedTemperature(t) => Some((g_half, t)),
            BoundaryCondition::Convective { h } => {
                if h <= 0.0 {
                    None
                } else {
                    Some((1.0 / (1.0 / g_half + 1.0 / (h * area)), self.ambient.t))
                }
            }
        }
    }

    /// Conductance matrix and boundary links for the given properties.
    fn assemble(&self, props: &CellProperties, field: &[f64]) -> (BandedMatrix, Vec<BoundaryLink>) {
        let d = self.domain;
        let lay = self.layout;
        let depth = d.depth_m;
        let mut a = BandedMatrix::zeros(lay.len(), lay.slots);
        let mut links = Vec::new();
        let lam = |i: usize, k: usize| props.lambda[d.cell_index(i, k)];
        for i in 0..lay.nx {
            let dx = d.dx(i);
            for k in 0..lay.nz {
                let dz = d.dz(k);
                let me = lay.cell(i, k);
                if i + 1 < lay.nx {
                    let dx2 = d.dx(i + 1);
                    let g = depth * dz / (0.5 * dx / lam(i, k) + 0.5 * dx2 / lam(i + 1, k));
                    a.add_link(me, lay.cell(i + 1, k), g);
                }
                if k + 1 < lay.nz {
                    if lay.film_row == Some(k + 1) {
                        let film = lay.film(i).expect("film row present");
                        a.add_link(me, film, depth * dx * 2.0 * lam(i, k) / dz);
                        let dz2 = d.dz(k + 1);
                        a.add_link(
                            film,
                            lay.cell(i, k + 1),
                            depth * dx * 2.0 * lam(i, k + 1) / dz2,
                        );
                    } else {
                        let dz2 = d.dz(k + 1);
                        let g = depth * dx / (0.5 * dz / lam(i, k) + 0.5 * dz2 / lam(i, k + 1));
                        a.add_link(me, lay.cell(i, k + 1), g);
                    }
                }
                let faces = [
                    (i == 0, d.boundaries.left, dz, dx),
                    (i + 1 == lay.nx, d.boundaries.right, dz, dx),
                    (k == 0, d.boundaries.bottom, dx, dz),
                    (k + 1 == lay.nz, d.boundaries.top, dx, dz),
                ];
                for (on_face, bc, length, normal) in faces {
                    if !on_face {
                        continue;
                    }
                    let area = length * depth;
                    let g_half = area * 2.0 * lam(i, k) / normal;
                    if let Some((g, t_outside)) = self.boundary_conductance(bc, g_half, area) {
                        a.add_diag(me, g);
                        links.push(BoundaryLink {
                            node: me,
                            g,
                            t_outside,
                        });
                    }
                }
            }
        }
        if self.settings.emissivity > 0.0 {
            if let Some(film) = &d.film {
                let ta = self.ambient.t;
                for i in film.heater_columns.clone() {
                    let node = lay.film(i).expect("film row present");
                    let t = field[node];
                    let h_rad =
                        self.settings.emissivity * STEFAN_BOLTZMANN * (t * t + ta * ta) * (t + ta);
                    let g = h_rad * d.dx(i) * depth;
                    a.add_diag(node, g);
                    links.push(BoundaryLink {
                        node,
                        g,
                        t_outside: ta,
                    });
                }
            }
        }
        (a, links)
    }

    /// Spreads the domain's share of `power` over the heater film nodes,
    /// uniform per unit width.
    fn add_source(&self, rhs: &mut [f64], power: f64) {
        let d = self.domain;
        if let Some(film) = &d.film {
            let width = d.heater_width();
            let q = power * d.power_share / width;
            for i in film.heater_columns.clone() {
                rhs[self.layout.film(i).expect("film row present")] += q * d.dx(i);
            }
        }
    }

    /// One backward-Euler step of length `dt` (or a steady solve when `dt`
    /// is `None`), Picard-iterated until the field stops changing.
    pub fn step(
        &mut self,
        state: &TransientState,
        dt: Option<f64>,
    ) -> Result<StepOutcome, SolverError> {
        self.step_from(state, dt, None)
    }

    /// `step` with an optional first Picard iterate.
    fn step_from(
        &mut self,
        state: &TransientState,
        dt: Option<f64>,
        guess: Option<Vec<f64>>,
    ) -> Result<StepOutcome, SolverError> {
        if let Some(dt) = dt {
            if !(dt > 0.0) {
                return Err(SolverError::InvalidInput(format!(
                    "time step {dt} s must be positive"
                )));
            }
        }
        if state.field.len() != self.layout.len() {
            return Err(SolverError::InvalidInput(
                "state does not match domain".into(),
            ));
        }
        let t_new = state.time + dt.unwrap_or(0.0);
        // the pulse state of a step is decided at its midpoint
        let t_eval = match dt {
            Some(dt) => state.time + 0.5 * dt,
            None => state.time,
        };
        let constant_linear = self.frozen.is_some() && self.settings.emissivity == 0.0;
        let mut iterate = guess.unwrap_or_else(|| state.field.clone());
        let mut history = Vec::new();
        loop {
            let owned;
            let props = match &self.frozen {
                Some(p) => p,
                None => {
                    owned = self.properties(&iterate)?;
                    &owned
                }
            };
            let t_heater = self.heater_temperature(&iterate);
            let power = electro_thermal_source(&self.drive, self.heater, t_heater, t_eval);
            let (mut matrix, links) = self.assemble(props, &iterate);
            let mut rhs = vec![0.0; self.layout.len()];
            // solved in deviation from ambient so equilibrium stays exact
            let ta = self.ambient.t;
            for l in &links {
                rhs[l.node] += l.g * (l.t_outside - ta);
            }
            self.add_source(&mut rhs, power);
            let capacity_of = |props: &CellProperties, lay: &Layout, d: &DiscretizedDomain| {
                let mut cap = vec![0.0; lay.len()];
                for i in 0..lay.nx {
                    for k in 0..lay.nz {
                        cap[lay.cell(i, k)] = props.capacity[d.cell_index(i, k)];
                    }
                }
                cap
            };
            let cap = capacity_of(props, &self.layout, self.domain);
            if let Some(dt) = dt {
                for (g, c) in cap.iter().enumerate() {
                    rhs[g] += c / dt * (state.field[g] - ta);
                    matrix.add_diag(g, c / dt);
                }
            }
            let next = if constant_linear {
                let key = dt.unwrap_or(f64::INFINITY).to_bits();
                match self.factors.iter().find(|(k, _)| *k == key) {
                    Some((_, f)) => f.solve(&rhs),
                    None => {
                        let f = matrix.factor()?;
                        let x = f.solve(&rhs);
                        if self.factors.len() >= 4 {
                            self.factors.remove(0);
                        }
                        self.factors.push((key, f));
                        x
                    }
                }
            } else {
                matrix.factor()?.solve(&rhs)
            };
            let next: Vec<f64> = next.into_iter().map(|v| v + ta).collect();
            let change = next
                .iter()
                .zip(&iterate)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if !change.is_finite() {
                return Err(SolverError::NonConvergence {
                    time: t_new,
                    history,
                });
            }
            history.push(change);
            let converged = change < self.settings.picard_tol_k
                || (constant_linear && !self.power_depends_on_temperature() && history.len() >= 1);
            if converged || history.len() >= self.settings.max_picard_iterations {
                if !converged {
                    return Err(SolverError::NonConvergence {
                        time: t_new,
                        history,
                    });
                }
                let step_len = dt.unwrap_or(0.0);
                let energy_in = power * self.domain.power_share * step_len;
                let energy_stored: f64 = match dt {
                    Some(_) => cap
                        .iter()
                        .zip(next.iter().zip(&state.field))
                        .map(|(c, (a, b))| c * (a - b))
                        .sum(),
                    None => 0.0,
                };
                let energy_out: f64 = links
                    .iter()
                    .map(|l| l.g * (next[l.node] - l.t_outside))
                    .sum::<f64>()
                    * step_len;
                let heater_temperature = self.heater_temperature(&next);
                return Ok(StepOutcome {
                    state: TransientState {
                        time: t_new,
                        field: next,
                        heater_temperature,
                        instantaneous_power: power,
                    },
                    picard_history: history,
                    energy_in_j: energy_in,
                    energy_stored_j: energy_stored,
                    energy_out_j: energy_out,
                });
            }
            iterate = next;
        }
    }

    fn power_depends_on_temperature(&self) -> bool {
        match self.drive.mode {
            super::DriveMode::ConstantCurrent(i) => i > 0.0 || self.drive.measuring_current_a > 0.0,
            super::DriveMode::ConstantPower(_) => self.drive.measuring_current_a > 0.0,
        }
    }

    /// Runs from the uniform initial field to `total_sim_time_s`. Steps are
    /// at most `dt` long and land exactly on the pulse end and on every
    /// readout time, where field snapshots are kept.
    pub fn run(&mut self, dt: f64, readout_times: &[f64]) -> Result<Trace, SolverError> {
        let total = self.drive.total_sim_time_s;
        if !(dt > 0.0) {
            return Err(SolverError::InvalidInput(format!(
                "time step {dt} s must be positive"
            )));
        }
        let pulse = self.drive.pulse_duration_s;
        if pulse > 0.0 && pulse / dt < MIN_STEPS_PER_PULSE * (1.0 - 1e-9) {
            return Err(SolverError::InvalidInput(format!(
                "time step {dt} s gives fewer than {MIN_STEPS_PER_PULSE} steps per pulse"
            )));
        }
        let mut marks: Vec<f64> = readout_times.to_vec();
        for &t in &marks {
            if !(t > 0.0 && t <= total) {
                return Err(SolverError::InvalidInput(format!(
                    "readout time {t} s outside (0, {total}] s"
                )));
            }
        }
        if pulse > 0.0 {
            marks.push(pulse);
        }
        marks.push(total);
        marks.sort_by(f64::total_cmp);
        marks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * total);

        let mut state = self.initial_state();
        let mut trace = Trace::new(&state, pulse);
        let mut t0 = 0.0;
        let mut previous: Option<(Vec<f64>, bool)> = None;
        for &mark in &marks {
            let span = mark - t0;
            let n = ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for s in 1..=n {
                let target = if s == n { mark } else { t0 + h * s as f64 };
                let active = self.drive.is_active(state.time + 0.5 * h);
                // linear extrapolation from the last step within the segment
                let guess = match &previous {
                    Some((field, was_active))
                        if s > 1 && *was_active == active && self.frozen.is_none() =>
                    {
                        let g: Vec<f64> = state
                            .field
                            .iter()
                            .zip(field)
                            .map(|(a, b)| 2.0 * a - b)
                            .collect();
                        g.iter()
                            .all(|t| (PROPERTY_T_MIN..=PROPERTY_T_MAX).contains(t))
                            .then_some(g)
                    }
                    _ => None,
                };
                let mut out = self.step_from(&state, Some(h), guess)?;
                previous = Some((state.field.clone(), active));
                out.state.time = target;
                trace.samples.push(TraceSample {
                    time: target,
                    heater_temperature: out.state.heater_temperature,
                    power_w: out.state.instantaneous_power,
                    energy_in_j: out.energy_in_j,
                    energy_stored_j: out.energy_stored_j,
                    energy_out_j: out.energy_out_j,
                    picard_iterations: out.picard_history.len(),
                });
                state = out.state;
            }
            trace.snapshots.push(state.clone());
            t0 = mark;
        }
        Ok(trace)
    }

    /// Steady state under the drive as it stands at `time` (the pulse is
    /// usually off), reached by Picard iteration without the storage term.
    pub fn steady_state(&mut self, time: f64) -> Result<TransientState, SolverError> {
        let mut start = self.initial_state();
        start.time = time;
        Ok(self.step(&start, None)?.state)
    }
}

pub(crate) fn heater_temperature(domain: &DiscretizedDomain, field: &[f64]) -> f64 {
    let lay = Layout::new(domain);
    match &domain.film {
        Some(film) if !film.heater_columns.is_empty() => {
            let mut sum = 0.0;
            let mut w = 0.0;
            for i in film.heater_columns.clone() {
                let dx = domain.dx(i);
                sum += dx * field[lay.film(i).expect("film row present")];
                w += dx;
            }
            sum / w
        }
        _ => field.iter().sum::<f64>() / field.len() as f64,
    }
}

/// Bilinear interpolation of the nodal field (cell centers plus the film
/// plane) at `(x, z)`. Points between the outermost nodes and the domain
/// edge take the nearest node value along that axis.
pub fn probe(
    domain: &DiscretizedDomain,
    state: &TransientState,
    x: f64,
    z: f64,
) -> Result<f64, SolverError> {
    let (x0, x1) = (
        domain.x_faces[0],
        *domain.x_faces.last().expect("non-empty mesh"),
    );
    let (z0, z1) = (
        domain.z_faces[0],
        *domain.z_faces.last().expect("non-empty mesh"),
    );
    if !(x >= x0 && x <= x1 && z >= z0 && z <= z1) {
        return Err(SolverError::OutOfDomain { x, z });
    }
    let lay = Layout::new(domain);
    let xs: Vec<f64> = (0..domain.nx()).map(|i| domain.x_center(i)).collect();
    // z nodes with the slot each one reads from
    let mut zs: Vec<(f64, usize)> = Vec::with_capacity(lay.slots);
    for k in 0..domain.nz() {
        if lay.film_row == Some(k) {
            zs.push((domain.z_faces[k], k));
        }
        zs.push((domain.z_center(k), lay.cell(0, k)));
    }
    let bracket = |nodes: &[f64], v: f64| -> (usize, usize, f64) {
        if v <= nodes[0] {
            return (0, 0, 0.0);
        }
        if v >= nodes[nodes.len() - 1] {
            let l = nodes.len() - 1;
            return (l, l, 0.0);
        }
        let hi = nodes.partition_point(|&n| n <= v);
        let lo = hi - 1;
        (lo, hi, (v - nodes[lo]) / (nodes[hi] - nodes[lo]))
    };
    let (ia, ib, fx) = bracket(&xs, x);
    let zpos: Vec<f64> = zs.iter().map(|p| p.0).collect();
    let (ka, kb, fz) = bracket(&zpos, z);
    let val = |i: usize, kz: usize| state.field[i * lay.slots + zs[kz].1];
    let bottom = val(ia, ka) * (1.0 - fx) + val(ib, ka) * fx;
    let top = val(ia, kb) * (1.0 - fx) + val(ib, kb) * fx;
    Ok(bottom * (1.0 - fz) + top * fz)
}

/// Convenience wrapper: builds a [`Solver`] and runs it.
#[allow(clippy::too_many_arguments)]
pub fn simulate_transient(
    domain: &DiscretizedDomain,
    gas: &HumidAirModel,
    heater: &HeaterElement,
    drive: &DrivePulse,
    mode: PropertyMode,
    ambient: HumidAirState,
    dt: f64,
    readout_times: &[f64],
    settings: SolverSettings,
) -> Result<Trace, SolverError> {
    Solver::new(domain, gas, heater, *drive, mode, ambient, settings)?.run(dt, readout_times)
}
