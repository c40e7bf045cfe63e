use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::modes::build_mode;
use crate::physics::ShearState;
use crate::symbol::{growth_slope, vertical_roots, Frequency};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Courant factor on `dx / (c + v)`.
pub const CFL_LIMIT: f64 = 0.5;

/// Largest accepted `Re mu * dx` for analytic-mode runs.
pub const RESOLUTION_LIMIT: f64 = 0.2;

/// Boundary to interface amplitude ratio above which a run is flagged.
pub const FAR_FIELD_LIMIT: f64 = 1e-8;

/// Uniform grid `x2 = ±i dx`, `i = 0..=N`, on each side; node 0 is shared by the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalGrid {
    half_width: f64,
    points_per_side: usize,
    spacing: f64,
}

impl VerticalGrid {
    pub fn new(half_width: f64, points_per_side: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("half_width", format!("must be finite and > 0, got {half_width}")));
        }
        if points_per_side < 64 {
            return Err(invalid("points_per_side", format!("must be >= 64, got {points_per_side}")));
        }
        Ok(Self {
            half_width,
            points_per_side,
            spacing: half_width / points_per_side as f64,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_side(&self) -> usize {
        self.points_per_side
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `Re mu^+ dx` at the growing root, or `|eta| dx` when no root exists.
    pub fn resolution_product(&self, state: &ShearState, eta: f64) -> f64 {
        let rate = growth_slope(state)
            .ok()
            .and_then(|x1| vertical_roots(state, &Frequency::real(x1 * eta.abs(), eta.abs())).ok())
            .map_or(eta.abs(), |r| r.mu_plus.re);
        rate * self.spacing
    }

    pub fn is_resolved(&self, state: &ShearState, eta: f64) -> bool {
        self.resolution_product(state, eta) <= RESOLUTION_LIMIT
    }

    /// Largest admissible time step.
    pub fn max_step(&self, state: &ShearState) -> f64 {
        CFL_LIMIT * self.spacing / (state.sound_speed() + state.shear_velocity().abs())
    }

    fn len(&self) -> usize {
        self.points_per_side + 1
    }

    /// Trapezoid quadrature weight of node `i`.
    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.points_per_side {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    /// Grid samples of the growing normal mode with unit front amplitude.
    AnalyticMode,
    /// `h = exp(-x2^2)`, zero velocity and front.
    FrontBump,
    Zero,
}

/// Physical fields on both sides; index `i` of each vector sits at `x2 = ±i dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub eta: f64,
    pub time: f64,
    pub h_upper: Vec<Complex64>,
    pub h_lower: Vec<Complex64>,
    pub v1_upper: Vec<Complex64>,
    pub v1_lower: Vec<Complex64>,
    pub v2_upper: Vec<Complex64>,
    pub v2_lower: Vec<Complex64>,
    pub front_amp: Complex64,
}

/// Characteristic interface state shared by both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceState {
    pub h: Complex64,
    /// Interface normal velocity `v2` seen from above and below.
    pub v2_upper: Complex64,
    pub v2_lower: Complex64,
}

/// Energy bookkeeping for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    /// `½ sum H (c^2|h|^2 + |v|^2) + ½|g|^2`.
    pub energy: f64,
    /// `2c^2 Re(h(0) conj(i v eta g)) + Re(v2(0) conj(g))`.
    pub production: f64,
    /// Penalty and far-boundary losses of the discretisation.
    pub dissipation: f64,
}

/// Layout: for each side (upper, lower), blocks `h`, `v1`, `u` of length `N+1`,
/// then the front amplitude. On the lower side `u = -v2`, so both sides use the
/// distance `xi = |x2|` and the same equations.
#[derive(Debug, Clone, Copy)]
struct System {
    c: f64,
    v: f64,
    eta: f64,
    grid: VerticalGrid,
}

#[derive(Debug, Clone)]
pub struct Solver {
    sys: System,
    dt: f64,
    time: f64,
    y: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl System {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn interface(&self, y: &[Complex64]) -> (InterfaceState, [Complex64; 2], Complex64) {
        let len = self.len();
        let c = self.c;
        let g = y[6 * len];
        let jump = 2.0 * I * self.v * self.eta * g;
        let outgoing = [0, 1].map(|s| c * y[3 * s * len] - y[(3 * s + 2) * len]);
        let h = (outgoing[0] + outgoing[1] + jump) / (2.0 * c);
        let u_upper = c * h - outgoing[0];
        let u_lower = c * h - outgoing[1];
        // incoming characteristic targets per side
        let targets = [outgoing[1] + jump, outgoing[0] + jump];
        (
            InterfaceState {
                h,
                v2_upper: u_upper,
                v2_lower: -u_lower,
            },
            targets,
            jump,
        )
    }

    fn rhs(&self, y: &[Complex64], out: &mut [Complex64]) {
        let len = self.len();
        let n = self.grid.points_per_side;
        let dx = self.grid.spacing;
        let c = self.c;
        let c2 = c * c;
        let eta = self.eta;
        let (iface, targets, _) = self.interface(y);
        let h0 = 0.5 * dx;

        for side in 0..2 {
            let shear = if side == 0 { self.v } else { -self.v };
            let doppler = I * shear * eta;
            let hb = 3 * side * len;
            let vb = hb + len;
            let ub = vb + len;
            let h = &y[hb..hb + len];
            let v1 = &y[vb..vb + len];
            let u = &y[ub..ub + len];
            for i in 0..len {
                let (du, dh) = if i == 0 {
                    ((u[1] - u[0]) / dx, (h[1] - h[0]) / dx)
                } else if i == n {
                    ((u[n] - u[n - 1]) / dx, (h[n] - h[n - 1]) / dx)
                } else {
                    ((u[i + 1] - u[i - 1]) / (2.0 * dx), (h[i + 1] - h[i - 1]) / (2.0 * dx))
                };
                out[hb + i] = -doppler * h[i] - I * eta * v1[i] - du;
                out[vb + i] = -doppler * v1[i] - c2 * I * eta * h[i];
                out[ub + i] = -doppler * u[i] - c2 * dh;
            }
            // incoming characteristic at the interface
            let w0 = c * h[0] + u[0];
            let miss = w0 - targets[side];
            out[hb] -= miss / (2.0 * h0);
            out[ub] -= c * miss / (2.0 * h0);
            // incoming characteristic at the far end is set to zero
            let a_n = c * h[n] - u[n];
            out[hb + n] -= a_n / (2.0 * h0);
            out[ub + n] += c * a_n / (2.0 * h0);
        }
        let g = y[6 * len];
        out[6 * len] = iface.v2_upper - I * self.v * eta * g;
    }
    fn block(&self, side: usize, var: usize) -> std::ops::Range<usize> {
        let start = (3 * side + var) * self.len();
        start..start + self.len()
    }

    fn energy_terms(&self, y: &[Complex64]) -> EnergyTerms {
        let len = self.len();
        let n = self.grid.points_per_side;
        let c = self.c;
        let g = y[6 * len];
        let (iface, targets, jump) = self.interface(y);
        let mut energy = 0.5 * g.norm_sqr();
        let mut dissipation = 0.0;
        for side in 0..2 {
            let h = &y[self.block(side, 0)];
            let v1 = &y[self.block(side, 1)];
            let u = &y[self.block(side, 2)];
            for i in 0..len {
                energy += 0.5 * self.grid.weight(i) * (c * c * h[i].norm_sqr() + v1[i].norm_sqr() + u[i].norm_sqr());
            }
            let miss = c * h[0] + u[0] - targets[side];
            let w_n = c * h[n] + u[n];
            let a_n = c * h[n] - u[n];
            dissipation += 0.25 * c * (miss.norm_sqr() + w_n.norm_sqr() + a_n.norm_sqr());
        }
        let production = c * c * (iface.h * jump.conj()).re + (iface.v2_upper * g.conj()).re;
        EnergyTerms {
            energy,
            production,
            dissipation,
        }
    }
}

impl Solver {
    pub fn new(state: &ShearState, eta: f64, grid: VerticalGrid, dt: f64, init: InitialData) -> Result<Self> {
        if !(eta.is_finite() && eta != 0.0) {
            return Err(invalid("eta", format!("must be finite and non-zero, got {eta}")));
        }
        let limit = grid.max_step(state);
        if !(dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        if dt > limit {
            return Err(Error::StepTooLarge { dt, limit });
        }
        let len = grid.len();
        let mut y = vec![Complex64::new(0.0, 0.0); 6 * len + 1];
        match init {
            InitialData::Zero => {}
            InitialData::FrontBump => {
                for side in 0..2 {
                    for i in 0..len {
                        let x = i as f64 * grid.spacing;
                        y[3 * side * len + i] = Complex64::new((-x * x).exp(), 0.0);
                    }
                }
            }
            InitialData::AnalyticMode => {
                let product = grid.resolution_product(state, eta);
                if product > RESOLUTION_LIMIT {
                    return Err(Error::UnderResolved { product });
                }
                let base = build_mode(state, eta.abs(), Complex64::new(1.0, 0.0))?;
                let mode = if eta < 0.0 { base.conjugate() } else { base };
                for i in 0..len {
                    let x = i as f64 * grid.spacing;
                    y[i] = mode.pressure_upper.value(x);
                    y[len + i] = mode.v1_upper.value(x);
                    y[2 * len + i] = mode.v2_upper.value(x);
                    y[3 * len + i] = mode.pressure_lower.value(-x);
                    y[4 * len + i] = mode.v1_lower.value(-x);
                    y[5 * len + i] = -mode.v2_lower.value(-x);
                }
                y[6 * len] = mode.front_amp;
            }
        }
        let n = y.len();
        Ok(Self {
            sys: System {
                c: state.sound_speed(),
                v: state.shear_velocity(),
                eta,
                grid,
            },
            dt,
            time: 0.0,
            y,
            k: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]),
            tmp: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &VerticalGrid {
        &self.sys.grid
    }

    pub fn front_amp(&self) -> Complex64 {
        self.y[6 * self.sys.grid.len()]
    }


    /// One classical fourth-order Runge-Kutta step.
    pub fn step(&mut self) {
        let dt = self.dt;
        let [k1, k2, k3, k4] = &mut self.k;
        let y = &self.y;
        let tmp = &mut self.tmp;
        let this = self.sys;
        this.rhs(y, k1);
        axpy(tmp, y, 0.5 * dt, k1);
        this.rhs(tmp, k2);
        axpy(tmp, y, 0.5 * dt, k2);
        this.rhs(tmp, k3);
        axpy(tmp, y, dt, k3);
        this.rhs(tmp, k4);
        for i in 0..self.y.len() {
            self.y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        self.time += dt;
    }

    pub fn snapshot(&self) -> ModeState {
        let take = |side: usize, var: usize, sign: f64| -> Vec<Complex64> {
            self.y[self.sys.block(side, var)].iter().map(|z| z * sign).collect()
        };
        ModeState {
            eta: self.sys.eta,
            time: self.time,
            h_upper: take(0, 0, 1.0),
            h_lower: take(1, 0, 1.0),
            v1_upper: take(0, 1, 1.0),
            v1_lower: take(1, 1, 1.0),
            v2_upper: take(0, 2, 1.0),
            v2_lower: take(1, 2, -1.0),
            front_amp: self.front_amp(),
        }
    }

    pub fn interface_state(&self) -> InterfaceState {
        self.sys.interface(&self.y).0
    }

    pub fn energy_terms(&self) -> EnergyTerms {
        self.sys.energy_terms(&self.y)
    }

    /// `dE/dt` of the semi-discrete system evaluated from the right-hand side.
    pub fn energy_rate(&self) -> f64 {
        let mut out = vec![Complex64::new(0.0, 0.0); self.y.len()];
        self.sys.rhs(&self.y, &mut out);
        let len = self.sys.grid.len();
        let c2 = self.sys.c * self.sys.c;
        let mut rate = (self.front_amp().conj() * out[6 * len]).re;
        for side in 0..2 {
            for var in 0..3 {
                let scale = if var == 0 { c2 } else { 1.0 };
                let r = self.sys.block(side, var);
                for (i, (y, f)) in self.y[r.clone()].iter().zip(&out[r]).enumerate() {
                    rate += scale * self.sys.grid.weight(i) * (y.conj() * f).re;
                }
            }
        }
        rate
    }

    /// `max |(c h, u)|` at the far ends relative to the interface values.
    pub fn far_field_ratio(&self) -> f64 {
        let n = self.sys.grid.points_per_side;
        let c = self.sys.c;
        let mut far: f64 = 0.0;
        let mut near: f64 = 0.0;
        for side in 0..2 {
            let h = &self.y[self.sys.block(side, 0)];
            let u = &self.y[self.sys.block(side, 2)];
            far = far.max((c * h[n]).norm()).max(u[n].norm());
            near = near.max((c * h[0]).norm()).max(u[0].norm());
        }
        if near == 0.0 {
            if far == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            far / near
        }
    }
}

/// Energy terms of a snapshot taken on `grid`.
pub fn snapshot_energy(state: &ShearState, grid: &VerticalGrid, snapshot: &ModeState) -> Result<EnergyTerms> {
    let len = grid.len();
    let blocks = [
        &snapshot.h_upper,
        &snapshot.v1_upper,
        &snapshot.v2_upper,
        &snapshot.h_lower,
        &snapshot.v1_lower,
        &snapshot.v2_lower,
    ];
    if blocks.iter().any(|b| b.len() != len) {
        return Err(invalid("snapshot", format!("field length does not match grid ({len} nodes)")));
    }
    let mut y = Vec::with_capacity(6 * len + 1);
    for (k, b) in blocks.iter().enumerate() {
        let sign = if k == 5 { -1.0 } else { 1.0 };
        y.extend(b.iter().map(|z| z * sign));
    }
    y.push(snapshot.front_amp);
    let sys = System {
        c: state.sound_speed(),
        v: state.shear_velocity(),
        eta: snapshot.eta,
        grid: *grid,
    };
    Ok(sys.energy_terms(&y))
}

fn axpy(out: &mut [Complex64], y: &[Complex64], a: f64, k: &[Complex64]) {
    for ((o, y), k) in out.iter_mut().zip(y).zip(k) {
        *o = y + a * k;
    }
}
