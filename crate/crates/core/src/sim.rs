//! Fixed-step time-domain simulation of LTI systems and the PI loop.
//!
//! Both paths use classical RK4 with the reference held constant over each
//! step. For linear dynamics the four RK4 stages collapse into a fixed
//! transition pair `x+ = Φ x + Γ r`, with `Φ = Σ_{j≤4} (hA)^j / j!` and
//! `Γ = h Σ_{j≤3} (hA)^j / (j+1)! B`, which is what the unsaturated paths
//! step with. Saturation makes the loop nonlinear; that path evaluates the
//! stages explicitly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lti::{to_state_space, LtiError, Polynomial, StateSpace, TransferFunction};

/// Any state component above this magnitude aborts the run.
pub const BLOWUP_LIMIT: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("invalid PI gains kp={kp}, ki={ki}: gains must be finite and nonnegative")]
    InvalidGains { kp: f64, ki: f64 },
    #[error("zero controller: kp and ki are both zero")]
    ZeroController,
    #[error("numerical blowup: state magnitude exceeded 1e12 at t = {time} s")]
    NumericalBlowup { time: f64 },
    #[error("algebraic loop: 1 + kp*D = 0")]
    AlgebraicLoop,
    #[error(transparent)]
    Lti(#[from] LtiError),
}

/// Proportional and integral gains of `u = kp e + ki ∫e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGains")]
pub struct PIGains {
    kp: f64,
    ki: f64,
}

#[derive(Deserialize)]
struct RawGains {
    kp: f64,
    ki: f64,
}

impl TryFrom<RawGains> for PIGains {
    type Error = SimError;

    fn try_from(raw: RawGains) -> Result<Self, Self::Error> {
        Self::new(raw.kp, raw.ki)
    }
}

impl PIGains {
    pub fn new(kp: f64, ki: f64) -> Result<Self, SimError> {
        if !(kp.is_finite() && ki.is_finite() && kp >= 0.0 && ki >= 0.0) {
            return Err(SimError::InvalidGains { kp, ki });
        }
        Ok(Self { kp, ki })
    }

    pub fn kp(&self) -> f64 {
        self.kp
    }

    pub fn ki(&self) -> f64 {
        self.ki
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.kp, self.ki]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Step size in seconds.
    pub dt: f64,
    /// Horizon in seconds.
    pub t_final: f64,
    pub reference_amplitude: f64,
    /// Symmetric actuation limit; `None` leaves the PI output unclamped.
    pub saturation: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 15.0,
            reference_amplitude: 1.0,
            saturation: None,
        }
    }
}

impl SimConfig {
    pub fn with_horizon(t_final: f64) -> Self {
        Self {
            t_final,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final >= 10.0 * self.dt) {
            return bad(format!(
                "t_final must be at least 10*dt, got {}",
                self.t_final
            ));
        }
        let ratio = self.t_final / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return bad(format!("t_final/dt = {ratio} is not an integer step count"));
        }
        if !self.reference_amplitude.is_finite() {
            return bad("reference amplitude must be finite".into());
        }
        if let Some(limit) = self.saturation {
            if !(limit.is_finite() && limit > 0.0) {
                return bad(format!("saturation limit must be positive, got {limit}"));
            }
        }
        Ok(())
    }

    /// Number of integration steps; the trace holds `steps() + 1` samples.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// One sample of the loop signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub r: f64,
    pub e: f64,
    pub u: f64,
    pub y: f64,
}

/// Uniformly sampled reference, error, actuation and output, starting at
/// `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    dt: f64,
    t: Vec<f64>,
    r: Vec<f64>,
    e: Vec<f64>,
    u: Vec<f64>,
    y: Vec<f64>,
}

impl SimTrace {
    fn with_capacity(dt: f64, n: usize) -> Self {
        Self {
            dt,
            t: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            e: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, s: &Sample) {
        self.t.push(s.t);
        self.r.push(s.r);
        self.e.push(s.e);
        self.u.push(s.u);
        self.y.push(s.y);
    }

    /// Rebuilds a trace from stored columns, checking the trace invariants.
    pub fn from_columns(
        dt: f64,
        t: Vec<f64>,
        r: Vec<f64>,
        e: Vec<f64>,
        u: Vec<f64>,
        y: Vec<f64>,
    ) -> Result<Self, SimError> {
        let n = t.len();
        if [r.len(), e.len(), u.len(), y.len()].iter().any(|&l| l != n) {
            return Err(SimError::InvalidConfig(
                "trace columns differ in length".into(),
            ));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "trace dt must be positive, got {dt}"
            )));
        }
        let all = t.iter().chain(&r).chain(&e).chain(&u).chain(&y);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(SimError::InvalidConfig(
                "trace contains non-finite samples".into(),
            ));
        }
        for k in 0..n {
            if e[k] != r[k] - y[k] {
                return Err(SimError::InvalidConfig(format!("e != r - y at sample {k}")));
            }
        }
        Ok(Self { dt, t, r, e, u, y })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn e(&self) -> &[f64] {
        &self.e
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn t_final(&self) -> f64 {
        self.t.last().copied().unwrap_or(0.0)
    }

    pub fn samples(&self) -> impl Iterator<Item = Sample> + '_ {
        (0..self.len()).map(|k| Sample {
            t: self.t[k],
            r: self.r[k],
            e: self.e[k],
            u: self.u[k],
            y: self.y[k],
        })
    }
}

/// `(kp s + ki) / s`, kept unreduced even when `ki = 0`.
pub fn pi_tf(gains: PIGains) -> Result<TransferFunction, SimError> {
    if gains.kp == 0.0 && gains.ki == 0.0 {
        return Err(SimError::ZeroController);
    }
    let num = Polynomial::new(vec![gains.kp, gains.ki])?;
    let den = Polynomial::new(vec![1.0, 0.0])?;
    Ok(TransferFunction::new(num, den)?)
}

/// Open-loop step response of `sys`; the actuation column repeats the
/// reference.
pub fn simulate_step(sys: &TransferFunction, cfg: &SimConfig) -> Result<SimTrace, SimError> {
    let mut trace = SimTrace::with_capacity(cfg.dt, cfg.steps() + 1);
    run_step(sys, cfg, |s| trace.push(s))?;
    Ok(trace)
}

/// Streaming form of [`simulate_step`]; `sink` sees every sample in order.
pub fn run_step<F: FnMut(&Sample)>(
    sys: &TransferFunction,
    cfg: &SimConfig,
    sink: F,
) -> Result<(), SimError> {
    cfg.validate()?;
    let ss = to_state_space(sys);
    let n = ss.order();
    let lin = LinearLoop {
        prop: Propagator::new(ss.a(), ss.b(), n, cfg.dt),
        cy: ss.c().to_vec(),
        dy: ss.d(),
        cu: vec![0.0; n],
        du: 1.0,
    };
    drive_linear(&lin, cfg, sink)
}

/// Closed-loop step response of `plant` under the continuous PI law.
pub fn simulate_pi_loop(
    plant: &TransferFunction,
    gains: PIGains,
    cfg: &SimConfig,
) -> Result<SimTrace, SimError> {
    let mut trace = SimTrace::with_capacity(cfg.dt, cfg.steps() + 1);
    run_pi_loop(plant, gains, cfg, |s| trace.push(s))?;
    Ok(trace)
}

/// Streaming form of [`simulate_pi_loop`].
///
/// The state is the plant state augmented with the error integral.
pub fn run_pi_loop<F: FnMut(&Sample)>(
    plant: &TransferFunction,
    gains: PIGains,
    cfg: &SimConfig,
    sink: F,
) -> Result<(), SimError> {
    cfg.validate()?;
    let law = PiLaw::new(to_state_space(plant), gains, cfg.saturation)?;
    match cfg.saturation {
        None => drive_linear(&law.linearize(cfg.dt), cfg, sink),
        Some(_) => {
            let n = law.plant.order() + 1;
            let r = cfg.reference_amplitude;
            let read = |z: &[f64]| {
                let (u, y, _) = law.output(z, r);
                (r, r - y, u, y)
            };
            let mut stages = Rk4Scratch::new(n);
            let step = |z: &[f64], next: &mut [f64]| {
                stages.step(z, cfg.dt, |s, ds| law.derivative(s, r, ds), next)
            };
            drive(cfg, n, step, read, sink)
        }
    }
}

/// PI law wrapped around a plant realization.
struct PiLaw {
    plant: StateSpace,
    kp: f64,
    ki: f64,
    /// `1 / (1 + kp D)`, resolving feedthrough in the loop.
    loop_gain: f64,
    saturation: Option<f64>,
}

impl PiLaw {
    fn new(plant: StateSpace, gains: PIGains, saturation: Option<f64>) -> Result<Self, SimError> {
        let denom = 1.0 + gains.kp * plant.d();
        if denom == 0.0 {
            return Err(SimError::AlgebraicLoop);
        }
        Ok(Self {
            plant,
            kp: gains.kp,
            ki: gains.ki,
            loop_gain: 1.0 / denom,
            saturation,
        })
    }

    /// Returns `(u, y, u_unclamped)` for augmented state `z = [x, ∫e]`.
    fn output(&self, z: &[f64], r: f64) -> (f64, f64, f64) {
        let n = self.plant.order();
        let cx = dot(self.plant.c(), &z[..n]);
        let raw = self.loop_gain * (self.kp * (r - cx) + self.ki * z[n]);
        let u = match self.saturation {
            Some(limit) => raw.clamp(-limit, limit),
            None => raw,
        };
        (u, cx + self.plant.d() * u, raw)
    }

    fn derivative(&self, z: &[f64], r: f64, dz: &mut [f64]) {
        let n = self.plant.order();
        let (u, y, raw) = self.output(z, r);
        let e = r - y;
        for i in 0..n {
            dz[i] = dot(&self.plant.a()[i * n..(i + 1) * n], &z[..n]) + self.plant.b()[i] * u;
        }
        // Conditional integration: hold the integral while clamped and the
        // error would push further into the limit.
        let winding = u != raw && e * raw > 0.0;
        dz[n] = if winding { 0.0 } else { e };
    }

    /// Unsaturated loop as a linear system, read off the derivative and
    /// output maps column by column.
    fn linearize(&self, h: f64) -> LinearLoop {
        let n = self.plant.order() + 1;
        let mut a = vec![0.0; n * n];
        let mut cy = vec![0.0; n];
        let mut cu = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            z.iter_mut().for_each(|v| *v = 0.0);
            z[j] = 1.0;
            self.derivative(&z, 0.0, &mut col);
            for i in 0..n {
                a[i * n + j] = col[i];
            }
            let (u, y, _) = self.output(&z, 0.0);
            cu[j] = u;
            cy[j] = y;
        }
        z.iter_mut().for_each(|v| *v = 0.0);
        let mut b = vec![0.0; n];
        self.derivative(&z, 1.0, &mut b);
        let (du, dy, _) = self.output(&z, 1.0);
        LinearLoop {
            prop: Propagator::new(&a, &b, n, h),
            cy,
            dy,
            cu,
            du,
        }
    }
}

/// Linear system driven by the constant reference, with outputs
/// `y = cy·z + dy r` and `u = cu·z + du r`.
struct LinearLoop {
    prop: Propagator,
    cy: Vec<f64>,
    dy: f64,
    cu: Vec<f64>,
    du: f64,
}

/// Steps a linear loop, using fixed-size arrays for small orders.
fn drive_linear<F: FnMut(&Sample)>(
    lin: &LinearLoop,
    cfg: &SimConfig,
    sink: F,
) -> Result<(), SimError> {
    match lin.prop.n {
        0 => drive_fixed::<0, F>(lin, cfg, sink),
        1 => drive_fixed::<1, F>(lin, cfg, sink),
        2 => drive_fixed::<2, F>(lin, cfg, sink),
        3 => drive_fixed::<3, F>(lin, cfg, sink),
        4 => drive_fixed::<4, F>(lin, cfg, sink),
        5 => drive_fixed::<5, F>(lin, cfg, sink),
        6 => drive_fixed::<6, F>(lin, cfg, sink),
        n => {
            let r = cfg.reference_amplitude;
            let read = |z: &[f64]| {
                let y = dot(&lin.cy, z) + lin.dy * r;
                (r, r - y, dot(&lin.cu, z) + lin.du * r, y)
            };
            drive(cfg, n, |z, next| lin.prop.step(z, r, next), read, sink)
        }
    }
}

fn drive_fixed<const N: usize, F: FnMut(&Sample)>(
    lin: &LinearLoop,
    cfg: &SimConfig,
    mut sink: F,
) -> Result<(), SimError> {
    let mut phi = [[0.0; N]; N];
    for (i, row) in phi.iter_mut().enumerate() {
        row.copy_from_slice(&lin.prop.phi[i * N..(i + 1) * N]);
    }
    let r = cfg.reference_amplitude;
    let gamma: [f64; N] = std::array::from_fn(|i| lin.prop.gamma[i] * r);
    let cy: [f64; N] = std::array::from_fn(|i| lin.cy[i]);
    let cu: [f64; N] = std::array::from_fn(|i| lin.cu[i]);
    let (y_ff, u_ff) = (lin.dy * r, lin.du * r);

    let steps = cfg.steps();
    let mut z = [0.0; N];
    for k in 0..=steps {
        let y = cy.iter().zip(&z).map(|(c, v)| c * v).sum::<f64>() + y_ff;
        let u = cu.iter().zip(&z).map(|(c, v)| c * v).sum::<f64>() + u_ff;
        let t = k as f64 * cfg.dt;
        if !(y.is_finite() && u.is_finite()) {
            return Err(SimError::NumericalBlowup { time: t });
        }
        sink(&Sample {
            t,
            r,
            e: r - y,
            u,
            y,
        });
        if k == steps {
            break;
        }
        let next: [f64; N] = std::array::from_fn(|i| {
            phi[i].iter().zip(&z).map(|(p, v)| p * v).sum::<f64>() + gamma[i]
        });
        if next.iter().any(|v| !(v.abs() <= BLOWUP_LIMIT)) {
            return Err(SimError::NumericalBlowup {
                time: (k + 1) as f64 * cfg.dt,
            });
        }
        z = next;
    }
    Ok(())
}

/// Exact RK4 transition for `x' = A x + B r` with `r` held over the step.
struct Propagator {
    n: usize,
    phi: Vec<f64>,
    gamma: Vec<f64>,
}

impl Propagator {
    fn new(a: &[f64], b: &[f64], n: usize, h: f64) -> Self {
        // Horner: Φ = I + hA(I + hA/2(I + hA/3(I + hA/4)))
        //         S = I + hA/2(I + hA/3(I + hA/4)),  Γ = h S B
        let ha: Vec<f64> = a.iter().map(|v| v * h).collect();
        let mut inner = identity(n);
        for j in [4.0, 3.0, 2.0] {
            inner = add_identity(&scaled(&matmul(&ha, &inner, n), 1.0 / j), n);
        }
        let phi = add_identity(&matmul(&ha, &inner, n), n);
        let gamma = (0..n)
            .map(|i| h * dot(&inner[i * n..(i + 1) * n], b))
            .collect();
        Self { n, phi, gamma }
    }

    #[inline]
    fn step(&self, x: &[f64], r: f64, next: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            next[i] = dot(&self.phi[i * n..(i + 1) * n], x) + self.gamma[i] * r;
        }
    }
}

/// Stage buffers for explicit classical RK4.
pub(crate) struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    pub(crate) fn step<F: Fn(&[f64], &mut [f64])>(
        &mut self,
        x: &[f64],
        h: f64,
        f: F,
        next: &mut [f64],
    ) {
        let n = x.len();
        f(x, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        f(&self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        f(&self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        f(&self.tmp, &mut self.k4);
        for i in 0..n {
            next[i] =
                x[i] + h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Common stepping loop: emit a sample, advance, check for blowup.
fn drive<S, R, F>(
    cfg: &SimConfig,
    n: usize,
    mut advance: S,
    read: R,
    mut sink: F,
) -> Result<(), SimError>
where
    S: FnMut(&[f64], &mut [f64]),
    R: Fn(&[f64]) -> (f64, f64, f64, f64),
    F: FnMut(&Sample),
{
    let steps = cfg.steps();
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    for k in 0..=steps {
        let (r, e, u, y) = read(&x);
        let sample = Sample {
            t: k as f64 * cfg.dt,
            r,
            e,
            u,
            y,
        };
        if !(e.is_finite() && u.is_finite() && y.is_finite()) {
            return Err(SimError::NumericalBlowup { time: sample.t });
        }
        sink(&sample);
        if k == steps {
            break;
        }
        advance(&x, &mut next);
        if next.iter().any(|v| !(v.abs() <= BLOWUP_LIMIT)) {
            return Err(SimError::NumericalBlowup {
                time: (k + 1) as f64 * cfg.dt,
            });
        }
        std::mem::swap(&mut x, &mut next);
    }
    Ok(())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn add_identity(m: &[f64], n: usize) -> Vec<f64> {
    let mut out = m.to_vec();
    for i in 0..n {
        out[i * n + i] += 1.0;
    }
    out
}

fn scaled(m: &[f64], k: f64) -> Vec<f64> {
    m.iter().map(|v| v * k).collect()
}

fn matmul(x: &[f64], y: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let xik = x[i * n + k];
            for j in 0..n {
                out[i * n + j] += xik * y[k * n + j];
            }
        }
    }
    out
}
