//! Free rigid body on the rotor group of euclidean 3-space.
//!
//! Body bivectors are expanded in `B1 = e2e3`, `B2 = e3e1`, `B3 = e1e2`,
//! for which `B_i x B_j = -eps_ijk B_k` and `~B_i . B_j = delta_ij`. The
//! state carries the body angular momentum `L_B` and the rotor `R`; the
//! angular velocity `W_B = I^{-1}(L_B)` is derived on demand.

use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::lie::{normalize_rotor, sandwich, BivectorAlgebra};
use crate::multivector::{MetricSignature, Multivector, Signature};

pub type Mv = Multivector<f64>;

struct Basis {
    sig: Signature,
    gens: [Mv; 3],
    structure: [[[f64; 3]; 3]; 3],
}

fn basis() -> &'static Basis {
    static BASIS: OnceLock<Basis> = OnceLock::new();
    BASIS.get_or_init(|| {
        let sig = MetricSignature::euclidean(3);
        let b = |i: usize, j: usize| Mv::blade(&sig, &[i, j]).expect("valid blade");
        let alg = BivectorAlgebra::so3();
        let mut structure = [[[0.0; 3]; 3]; 3];
        for (i, row) in alg.structure().iter().enumerate() {
            for (j, col) in row.iter().enumerate() {
                for (k, c) in col.iter().enumerate() {
                    structure[i][j][k] = c.to_complex().re;
                }
            }
        }
        Basis { gens: [b(1, 2), b(2, 0), b(0, 1)], sig, structure }
    })
}

pub fn signature() -> &'static Signature {
    &basis().sig
}

/// `c_1 B1 + c_2 B2 + c_3 B3`.
pub fn bivector(c: [f64; 3]) -> Mv {
    let g = &basis().gens;
    let mut out = Mv::zero(signature());
    for (gi, ci) in g.iter().zip(c) {
        out = &out + &gi.scale(&ci);
    }
    out
}

/// Coefficients `c_k = ~B_k . b` of the bivector part.
pub fn components(b: &Mv) -> [f64; 3] {
    let g = &basis().gens;
    let mut out = [0.0; 3];
    for (k, gk) in g.iter().enumerate() {
        out[k] = gk.reverse().inner(b).map(|s| s.scalar_part()).unwrap_or(f64::NAN);
    }
    out
}

/// `(a x b)_k = C^k_ij a_i b_j` for the commutator product of bivectors.
pub fn bracket(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    let c = &basis().structure;
    let mut out = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[k] += c[i][j][k] * a[i] * b[j];
            }
        }
    }
    out
}

/// Symmetric positive operator on body bivectors, stored as the matrix of
/// `I(B_j)` components.
#[derive(Clone, Debug, PartialEq)]
pub struct InertiaOperator {
    matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

impl InertiaOperator {
    pub fn principal(moments: [f64; 3]) -> Result<Self> {
        if moments.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::Invalid(format!("principal moments must be positive, got {moments:?}")));
        }
        Self::from_matrix(Matrix3::from_diagonal(&Vector3::from(moments)))
    }

    pub fn from_matrix(matrix: Matrix3<f64>) -> Result<Self> {
        if (matrix - matrix.transpose()).abs().max() > 1e-12 * matrix.abs().max() {
            return Err(Error::Invalid("inertia operator must be symmetric".into()));
        }
        let eig = matrix.symmetric_eigenvalues();
        if eig.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::Invalid(format!("inertia operator must be positive, eigenvalues {eig:?}")));
        }
        let inverse = matrix.try_inverse().ok_or(Error::Singular)?;
        Ok(InertiaOperator { matrix, inverse })
    }

    /// `I(B) = sum_n m_n x_n (x_n . B)` over point masses.
    pub fn from_masses(samples: &[(f64, [f64; 3])]) -> Result<Self> {
        let sig = signature();
        let mut cols = [[0.0; 3]; 3];
        for (j, col) in cols.iter_mut().enumerate() {
            let bj = &basis().gens[j];
            let mut acc = Mv::zero(sig);
            for (m, x) in samples {
                let xv = Mv::vector(sig, x)?;
                acc = &acc + &xv.star(&xv.inner(bj)?)?.scale(m);
            }
            *col = components(&acc.grade(2));
        }
        Self::from_matrix(Matrix3::from_fn(|i, j| cols[j][i]))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn apply(&self, w: [f64; 3]) -> [f64; 3] {
        (self.matrix * Vector3::from(w)).into()
    }

    pub fn apply_inverse(&self, l: [f64; 3]) -> [f64; 3] {
        (self.inverse * Vector3::from(l)).into()
    }

    /// Bivector form of `apply`.
    pub fn apply_bivector(&self, b: &Mv) -> Mv {
        bivector(self.apply(components(b)))
    }

    /// `~A . I(B)`.
    pub fn pairing(&self, a: &Mv, b: &Mv) -> f64 {
        a.reverse().inner(&self.apply_bivector(b)).map(|s| s.scalar_part()).unwrap_or(f64::NAN)
    }

    /// `H = 1/2 ~W . I(W)` with `W = I^{-1}(L)`.
    pub fn energy(&self, l: [f64; 3]) -> f64 {
        let w = self.apply_inverse(l);
        0.5 * w.iter().zip(&l).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// `|L_B|^2`.
pub fn casimir(l: [f64; 3]) -> f64 {
    l.iter().map(|c| c * c).sum()
}

/// `d/dt L_B = W_B x I(W_B)` in components.
pub fn euler_rhs(l: [f64; 3], inertia: &InertiaOperator) -> [f64; 3] {
    bracket(inertia.apply_inverse(l), l)
}

/// `d/dt L_i = {L_i, H}_LPB = C^k_ij L_k dH/dL_j`.
pub fn lie_poisson_rhs(l: [f64; 3], inertia: &InertiaOperator) -> [f64; 3] {
    let c = &basis().structure;
    let dh = inertia.apply_inverse(l);
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            for (k, lk) in l.iter().enumerate() {
                *o += c[i][j][k] * lk * dh[j];
            }
        }
    }
    out
}

/// `W_B x I(W_B)` with the commutator product of multivectors.
pub fn euler_rhs_bivector(l: &Mv, inertia: &InertiaOperator) -> Result<Mv> {
    let w = bivector(inertia.apply_inverse(components(l)));
    w.commutator(&inertia.apply_bivector(&w))
}

/// Principal-axis form `I_1 dw_1/dt = (I_2 - I_3) w_2 w_3` and cyclic.
pub fn euler_rhs_principal(w: [f64; 3], moments: [f64; 3]) -> [f64; 3] {
    let [i1, i2, i3] = moments;
    [(i2 - i3) * w[1] * w[2] / i1, (i3 - i1) * w[2] * w[0] / i2, (i1 - i2) * w[0] * w[1] / i3]
}

#[derive(Clone, Debug)]
pub struct RigidBodyState {
    pub t: f64,
    pub l: [f64; 3],
    pub rotor: Mv,
}

impl RigidBodyState {
    pub fn new(l: [f64; 3]) -> Self {
        RigidBodyState { t: 0.0, l, rotor: Mv::one(signature()) }
    }

    /// Spatial angular momentum `R I(W_B) R~`.
    pub fn spatial_momentum(&self) -> Result<[f64; 3]> {
        Ok(components(&sandwich(&self.rotor, &bivector(self.l))?))
    }

    /// Rotation matrix with columns `R e_j R~`.
    pub fn orientation(&self) -> Result<Matrix3<f64>> {
        let sig = signature();
        let mut m = Matrix3::zeros();
        for j in 0..3 {
            let v = sandwich(&self.rotor, &Mv::generator(sig, j)?)?;
            for i in 0..3 {
                m[(i, j)] = v.coeff(1 << i);
            }
        }
        Ok(m)
    }

    /// `max |R R~ - 1|`.
    pub fn rotor_defect(&self) -> f64 {
        self.rotor.star(&self.rotor.reverse()).map(|n| (&n - &Mv::one(signature())).max_abs()).unwrap_or(f64::INFINITY)
    }

    /// `[scalar, B1, B2, B3]` coefficients of the rotor.
    pub fn rotor_components(&self) -> [f64; 4] {
        let c = components(&self.rotor);
        [self.rotor.scalar_part(), c[0], c[1], c[2]]
    }

    fn is_finite(&self) -> bool {
        self.l.iter().all(|c| c.is_finite()) && self.rotor.terms().all(|(_, c)| c.is_finite())
    }
}

fn derivative(l: [f64; 3], r: &Mv, inertia: &InertiaOperator) -> Result<([f64; 3], Mv)> {
    let w = inertia.apply_inverse(l);
    Ok((bracket(w, l), r.star(&bivector(w))?.scale(&-0.5)))
}

fn axpy(l: [f64; 3], r: &Mv, h: f64, dl: [f64; 3], dr: &Mv) -> ([f64; 3], Mv) {
    ([l[0] + h * dl[0], l[1] + h * dl[1], l[2] + h * dl[2]], r + &dr.scale(&h))
}

/// One classical RK4 step of `(L_B, R)` followed by rotor renormalization.
pub fn rk4_step(state: &RigidBodyState, inertia: &InertiaOperator, dt: f64) -> Result<RigidBodyState> {
    let (l, r) = (state.l, &state.rotor);
    let (k1l, k1r) = derivative(l, r, inertia)?;
    let (l2, r2) = axpy(l, r, dt / 2.0, k1l, &k1r);
    let (k2l, k2r) = derivative(l2, &r2, inertia)?;
    let (l3, r3) = axpy(l, r, dt / 2.0, k2l, &k2r);
    let (k3l, k3r) = derivative(l3, &r3, inertia)?;
    let (l4, r4) = axpy(l, r, dt, k3l, &k3r);
    let (k4l, k4r) = derivative(l4, &r4, inertia)?;
    let mut nl = l;
    for i in 0..3 {
        nl[i] += dt / 6.0 * (k1l[i] + 2.0 * k2l[i] + 2.0 * k3l[i] + k4l[i]);
    }
    let dr = &(&(&k1r + &k2r.scale(&2.0)) + &k3r.scale(&2.0)) + &k4r;
    let nr = normalize_rotor(&(r + &dr.scale(&(dt / 6.0))))?;
    Ok(RigidBodyState { t: state.t + dt, l: nl, rotor: nr })
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub inertia: InertiaOperator,
    pub dt: f64,
    pub states: Vec<RigidBodyState>,
}

fn run(state: &RigidBodyState, inertia: &InertiaOperator, dt: f64, steps: usize) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(steps + 1);
    states.push(state.clone());
    for step in 1..=steps {
        let next = rk4_step(&states[step - 1], inertia, dt).map_err(|_| Error::Diverged { step })?;
        if !next.is_finite() || next.l.iter().any(|c| c.abs() > 1e150) {
            return Err(Error::Diverged { step });
        }
        states.push(next);
    }
    Ok(Trajectory { inertia: inertia.clone(), dt, states })
}

pub fn integrate(state: &RigidBodyState, inertia: &InertiaOperator, dt: f64, steps: usize) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
    }
    run(state, inertia, dt, steps)
}

/// Integrates forward `steps` times, then back with `-dt`, and returns the
/// largest deviation of `L_B` and `R` from the start.
pub fn reversal_error(state: &RigidBodyState, inertia: &InertiaOperator, dt: f64, steps: usize) -> Result<f64> {
    let fwd = integrate(state, inertia, dt, steps)?;
    let end = fwd.states.last().expect("nonempty trajectory");
    let back = run(end, inertia, -dt, steps)?;
    let last = back.states.last().expect("nonempty trajectory");
    let dl = state.l.iter().zip(&last.l).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(dl.max(state.rotor.distance(&last.rotor)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationReport {
    pub casimir_drift: f64,
    pub energy_drift: f64,
    pub spatial_momentum_drift: f64,
    pub rotor_defect: f64,
    pub orthogonality_defect: f64,
}

impl Trajectory {
    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| self.inertia.energy(s.l)).collect()
    }

    pub fn casimirs(&self) -> Vec<f64> {
        self.states.iter().map(|s| casimir(s.l)).collect()
    }

    /// Per-state `max |L(t) - L(0)|` for the spatial angular momentum.
    pub fn spatial_drifts(&self) -> Result<Vec<f64>> {
        let l0 = self.states[0].spatial_momentum()?;
        self.states
            .iter()
            .map(|s| Ok(s.spatial_momentum()?.iter().zip(&l0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)))
            .collect()
    }

    pub fn conservation(&self) -> Result<ConservationReport> {
        let drift = |v: Vec<f64>| v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max);
        let mut orth: f64 = 0.0;
        let mut unit: f64 = 0.0;
        for s in &self.states {
            let m = s.orientation()?;
            orth = orth.max((m.transpose() * m - Matrix3::identity()).abs().max());
            unit = unit.max(s.rotor_defect());
        }
        Ok(ConservationReport {
            casimir_drift: drift(self.casimirs()),
            energy_drift: drift(self.energies()),
            spatial_momentum_drift: self.spatial_drifts()?.into_iter().fold(0.0, f64::max),
            rotor_defect: unit,
            orthogonality_defect: orth,
        })
    }

    /// Residual of the bivector Poincare equation `d/dt I(s) - I(s) x s`
    /// with `s = 2 R~ dR/dt` reconstructed from the rotor samples by
    /// five-point differences. One entry per interior sample.
    pub fn poincare_residuals(&self) -> Result<Vec<f64>> {
        let n = self.states.len();
        if n < 9 {
            return Err(Error::Invalid("Poincare residual needs at least 9 samples".into()));
        }
        let h = self.dt;
        let stencil = |f: &dyn Fn(usize) -> Mv, k: usize| -> Mv {
            let s = &(&f(k - 2) - &f(k - 1).scale(&8.0)) + &(&f(k + 1).scale(&8.0) - &f(k + 2));
            s.scale(&(1.0 / (12.0 * h)))
        };
        let rotor = |k: usize| self.states[k].rotor.clone();
        let mut s_series = vec![Mv::zero(signature()); n];
        for k in 2..n - 2 {
            s_series[k] = self.states[k].rotor.reverse().star(&stencil(&rotor, k))?.scale(&2.0).grade(2);
        }
        let momentum: Vec<Mv> = s_series.iter().map(|s| self.inertia.apply_bivector(s)).collect();
        let m_at = |k: usize| momentum[k].clone();
        (4..n - 4)
            .map(|k| {
                let lhs = &stencil(&m_at, k) - &momentum[k].commutator(&s_series[k])?;
                Ok(lhs.max_abs())
            })
            .collect()
    }

    pub fn max_poincare_residual(&self) -> Result<f64> {
        Ok(self.poincare_residuals()?.into_iter().fold(0.0, f64::max))
    }

    pub const COLUMNS: [&'static str; 12] =
        ["t", "L1", "L2", "L3", "energy", "casimir", "R0", "R23", "R31", "R12", "spatial_L_drift", "rotor_defect"];

    /// One row per state in the order of `COLUMNS`.
    pub fn rows(&self) -> Result<Vec<[f64; 12]>> {
        let drifts = self.spatial_drifts()?;
        Ok(self
            .states
            .iter()
            .zip(drifts)
            .map(|(s, d)| {
                let r = s.rotor_components();
                [
                    s.t,
                    s.l[0],
                    s.l[1],
                    s.l[2],
                    self.inertia.energy(s.l),
                    casimir(s.l),
                    r[0],
                    r[1],
                    r[2],
                    r[3],
                    d,
                    s.rotor_defect(),
                ]
            })
            .collect())
    }
}
