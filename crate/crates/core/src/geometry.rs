//! Numeric differential geometry on embedded charts.
//!
//! A chart maps intrinsic coordinates `x^i` into a Euclidean ambient space.
//! Frames, metric, Christoffel symbols and curvature are evaluated pointwise
//! in floats; derivatives come from analytic callbacks where a chart has
//! them and from central differences otherwise.

use nalgebra::DMatrix;

use crate::calculus::{coordinate_signature, derivation, interior};
use crate::error::{Error, Result};
use crate::lie::induced_field;
use crate::multivector::{MetricSignature, Multivector, Signature};

/// First-derivative step for embeddings without analytic partials.
pub const H_FIRST: f64 = 1e-5;
/// Second-derivative step for embeddings without analytic second partials.
pub const H_SECOND: f64 = 1e-4;
/// Five-point step for derivatives of the metric, Christoffel symbols,
/// frames and form coefficients.
pub const H_CONNECTION: f64 = 1e-3;
/// Five-point step for derivatives of curvature.
pub const H_CURVATURE: f64 = 1e-2;
/// Minimum distance of sphere charts from the coordinate poles.
pub const POLE_GUARD: f64 = 0.05;

pub type Vec2 = Vec<Vec<f64>>;
pub type Vec3 = Vec<Vec<Vec<f64>>>;
pub type Vec4 = Vec<Vec<Vec<Vec<f64>>>>;

pub trait Chart: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn embed(&self, x: &[f64]) -> Vec<f64>;

    /// `d_i x^a` as `[i][a]`.
    fn d1(&self, _x: &[f64]) -> Option<Vec2> {
        None
    }

    /// `d_i d_j x^a` as `[i][j][a]`.
    fn d2(&self, _x: &[f64]) -> Option<Vec3> {
        None
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        Ok(())
    }
}

fn shifted(x: &[f64], i: usize, s: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += s;
    y
}

/// Central two-point difference.
pub fn central(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], i: usize, h: f64) -> Vec<f64> {
    let (p, m) = (f(&shifted(x, i, h)), f(&shifted(x, i, -h)));
    p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

/// Five-point difference of a fallible vector valued function.
pub fn five_point(f: impl Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], i: usize, h: f64) -> Result<Vec<f64>> {
    let m2 = f(&shifted(x, i, -2.0 * h))?;
    let m1 = f(&shifted(x, i, -h))?;
    let p1 = f(&shifted(x, i, h))?;
    let p2 = f(&shifted(x, i, 2.0 * h))?;
    Ok((0..m2.len()).map(|k| (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h)).collect())
}

pub fn tangents(chart: &dyn Chart, x: &[f64]) -> Vec2 {
    chart.d1(x).unwrap_or_else(|| (0..chart.dim()).map(|i| central(|y| chart.embed(y), x, i, H_FIRST)).collect())
}

pub fn second_partials(chart: &dyn Chart, x: &[f64]) -> Vec3 {
    if let Some(d2) = chart.d2(x) {
        return d2;
    }
    let d = chart.dim();
    if chart.d1(x).is_some() {
        return (0..d)
            .map(|i| {
                let di = central(|y| tangents(chart, y).concat(), x, i, H_SECOND);
                di.chunks(chart.ambient_dim()).map(|c| c.to_vec()).collect()
            })
            .collect();
    }
    let h = H_SECOND;
    let f = |y: &[f64]| chart.embed(y);
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let pp = f(&shifted(&shifted(x, i, h), j, h));
                    let pm = f(&shifted(&shifted(x, i, h), j, -h));
                    let mp = f(&shifted(&shifted(x, i, -h), j, h));
                    let mm = f(&shifted(&shifted(x, i, -h), j, -h));
                    (0..pp.len()).map(|a| (pp[a] - pm[a] - mp[a] + mm[a]) / (4.0 * h * h)).collect()
                })
                .collect()
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Frame vectors, reciprocal frame and metric at one point.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub point: Vec<f64>,
    pub position: Vec<f64>,
    /// `xi_i` as `[i][a]`.
    pub xi: Vec2,
    /// `xi^i = g^{ij} xi_j` as `[i][a]`.
    pub xi_up: Vec2,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub sqrt_det: f64,
}

pub fn metric(chart: &dyn Chart, x: &[f64]) -> DMatrix<f64> {
    let xi = tangents(chart, x);
    let d = chart.dim();
    DMatrix::from_fn(d, d, |i, j| dot(&xi[i], &xi[j]))
}

pub fn frames_at(chart: &dyn Chart, x: &[f64]) -> Result<FrameData> {
    chart.check_domain(x)?;
    let xi = tangents(chart, x);
    let d = chart.dim();
    let g = DMatrix::from_fn(d, d, |i, j| dot(&xi[i], &xi[j]));
    let det = g.determinant();
    if !det.is_finite() || det.abs() < 1e-12 {
        return Err(Error::DegenerateMetric(x.to_vec()));
    }
    let g_inv = g.clone().try_inverse().ok_or_else(|| Error::DegenerateMetric(x.to_vec()))?;
    let xi_up = (0..d)
        .map(|i| (0..chart.ambient_dim()).map(|a| (0..d).map(|j| g_inv[(i, j)] * xi[j][a]).sum()).collect())
        .collect();
    Ok(FrameData { point: x.to_vec(), position: chart.embed(x), xi, xi_up, g, g_inv, sqrt_det: det.abs().sqrt() })
}

impl FrameData {
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.position.len()
    }

    /// `a^i xi_i`.
    pub fn vector(&self, a: &[f64]) -> Vec<f64> {
        (0..self.ambient_dim()).map(|k| (0..self.dim()).map(|i| a[i] * self.xi[i][k]).sum()).collect()
    }

    /// `xi^i . v`.
    pub fn components(&self, v: &[f64]) -> Vec<f64> {
        self.xi_up.iter().map(|u| dot(u, v)).collect()
    }

    pub fn tangent_part(&self, v: &[f64]) -> Vec<f64> {
        self.vector(&self.components(v))
    }

    pub fn normal_part(&self, v: &[f64]) -> Vec<f64> {
        let t = self.tangent_part(v);
        v.iter().zip(&t).map(|(a, b)| a - b).collect()
    }

    /// `max |xi_i . xi^j - delta_ij|`.
    pub fn reciprocity_residual(&self) -> f64 {
        let d = self.dim();
        max_abs(
            (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| dot(&self.xi[i], &self.xi_up[j]) - if i == j { 1.0 } else { 0.0 }),
        )
    }

    pub fn ambient_signature(&self) -> Signature {
        MetricSignature::euclidean(self.ambient_dim())
    }

    pub fn to_multivector(&self, v: &[f64]) -> Result<Multivector<f64>> {
        Multivector::vector(&self.ambient_signature(), v)
    }

    /// `I_d = xi_1 ^ .. ^ xi_d`.
    pub fn pseudoscalar(&self) -> Result<Multivector<f64>> {
        let sig = self.ambient_signature();
        let mut out = Multivector::one(&sig);
        for v in &self.xi {
            out = out.wedge(&Multivector::vector(&sig, v)?)?;
        }
        Ok(out)
    }

    /// `P(A) = (A . I_d) I_d^{-1}`.
    pub fn project(&self, a: &Multivector<f64>) -> Result<Multivector<f64>> {
        let i = self.pseudoscalar()?;
        let rev = i.reverse();
        let norm = i.star(&rev)?.scalar_part();
        let inv = rev.scale(&(1.0 / norm));
        a.inner(&i)?.star(&inv)
    }
}

/// `Gamma^i_jk = (d_j xi_k) . xi^i`, as `[i][j][k]`.
pub fn christoffel_extrinsic(chart: &dyn Chart, x: &[f64]) -> Result<Vec3> {
    let f = frames_at(chart, x)?;
    Ok(christoffel_from_frames(&f, &second_partials(chart, x)))
}

fn christoffel_from_frames(f: &FrameData, d2: &Vec3) -> Vec3 {
    let d = f.dim();
    (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| dot(&d2[j][k], &f.xi_up[i])).collect()).collect()).collect()
}

fn metric_flat(chart: &dyn Chart, y: &[f64]) -> Result<Vec<f64>> {
    Ok(metric(chart, y).iter().copied().collect())
}

/// `d_l g_jk` as `[l][j][k]`.
pub fn metric_derivatives(chart: &dyn Chart, x: &[f64]) -> Result<Vec3> {
    let d = chart.dim();
    (0..d)
        .map(|l| {
            let dg = five_point(|y| metric_flat(chart, y), x, l, H_CONNECTION)?;
            // nalgebra stores column-major; the metric is symmetric
            Ok((0..d).map(|j| (0..d).map(|k| dg[j + d * k]).collect()).collect())
        })
        .collect()
}

/// `1/2 g^il (d_j g_kl + d_k g_jl - d_l g_jk)`.
pub fn christoffel_metric(chart: &dyn Chart, x: &[f64]) -> Result<Vec3> {
    let f = frames_at(chart, x)?;
    let dg = metric_derivatives(chart, x)?;
    let d = chart.dim();
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d)
                        .map(|k| {
                            (0..d).map(|l| 0.5 * f.g_inv[(i, l)] * (dg[j][k][l] + dg[k][j][l] - dg[l][j][k])).sum()
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct ChristoffelReport {
    pub gamma: Vec3,
    pub gamma_metric: Vec3,
    /// `max |Gamma_extrinsic - Gamma_metric|`.
    pub agreement: f64,
    /// `max |d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_li|`.
    pub compatibility: f64,
    /// `max |Gamma^i_jk - Gamma^i_kj|`.
    pub asymmetry: f64,
}

pub fn christoffel(chart: &dyn Chart, x: &[f64]) -> Result<ChristoffelReport> {
    let gamma = christoffel_extrinsic(chart, x)?;
    let gamma_metric = christoffel_metric(chart, x)?;
    let f = frames_at(chart, x)?;
    let dg = metric_derivatives(chart, x)?;
    let d = chart.dim();
    let idx = || (0..d).flat_map(move |i| (0..d).flat_map(move |j| (0..d).map(move |k| (i, j, k))));
    let agreement = max_abs(idx().map(|(i, j, k)| gamma[i][j][k] - gamma_metric[i][j][k]));
    let asymmetry = max_abs(idx().map(|(i, j, k)| gamma[i][j][k] - gamma[i][k][j]));
    let compatibility = max_abs(idx().map(|(k, i, j)| {
        let mut r = dg[k][i][j];
        for l in 0..d {
            r -= gamma[l][k][i] * f.g[(l, j)] + gamma[l][k][j] * f.g[(l, i)];
        }
        r
    }));
    Ok(ChristoffelReport { gamma, gamma_metric, agreement, compatibility, asymmetry })
}

/// Christoffel symbols after checking both derivations agree within `tol`.
pub fn christoffel_checked(chart: &dyn Chart, x: &[f64], tol: f64) -> Result<Vec3> {
    let r = christoffel(chart, x)?;
    if r.agreement > tol {
        return Err(Error::Invalid(format!(
            "metric and extrinsic Christoffel symbols differ by {:e} at {x:?}",
            r.agreement
        )));
    }
    Ok(r.gamma)
}

fn flatten3(t: &Vec3) -> Vec<f64> {
    t.iter().flatten().flatten().copied().collect()
}

/// `R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk
/// - Gamma^l_jm Gamma^m_ik`, as `[l][i][j][k]`; `R(d_i, d_j) d_k = R^l_ijk d_l`.
pub fn riemann(chart: &dyn Chart, x: &[f64]) -> Result<Vec4> {
    let d = chart.dim();
    let gamma = christoffel_extrinsic(chart, x)?;
    let dgamma: Vec<Vec<f64>> = (0..d)
        .map(|i| five_point(|y| Ok(flatten3(&christoffel_extrinsic(chart, y)?)), x, i, H_CONNECTION))
        .collect::<Result<_>>()?;
    let dg = |i: usize, l: usize, j: usize, k: usize| dgamma[i][(l * d + j) * d + k];
    Ok((0..d)
        .map(|l| {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            (0..d)
                                .map(|k| {
                                    let mut r = dg(i, l, j, k) - dg(j, l, i, k);
                                    for m in 0..d {
                                        r += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                                    }
                                    r
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

/// Sectional curvature of the plane spanned by coordinate directions `a`, `b`.
pub fn sectional_curvature(frame: &FrameData, r: &Vec4, a: usize, b: usize) -> f64 {
    let g = &frame.g;
    let num: f64 = (0..frame.dim()).map(|l| g[(a, l)] * r[l][a][b][b]).sum();
    num / (g[(a, a)] * g[(b, b)] - g[(a, b)] * g[(a, b)])
}

pub fn gaussian_curvature(chart: &dyn Chart, x: &[f64]) -> Result<f64> {
    if chart.dim() != 2 {
        return Err(Error::Invalid("Gaussian curvature needs a 2-dimensional chart".into()));
    }
    Ok(sectional_curvature(&frames_at(chart, x)?, &riemann(chart, x)?, 0, 1))
}

/// `max |R^l_ijk + R^l_jki + R^l_kij|`.
pub fn first_bianchi_residual(r: &Vec4) -> f64 {
    let d = r.len();
    let mut m: f64 = 0.0;
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    m = m.max((r[l][i][j][k] + r[l][j][k][i] + r[l][k][i][j]).abs());
                }
            }
        }
    }
    m
}

/// `R(xi_i ^ xi_j) = 1/2 R^l_ijk xi_l ^ xi^k`, the curvature bivector with
/// `c . R(a ^ b) = -R(a, b) c`.
pub fn curvature_bivector(frame: &FrameData, r: &Vec4, i: usize, j: usize) -> Result<Multivector<f64>> {
    let sig = frame.ambient_signature();
    let mut out = Multivector::zero(&sig);
    for l in 0..frame.dim() {
        for k in 0..frame.dim() {
            let c = 0.5 * r[l][i][j][k];
            if c != 0.0 {
                let w = Multivector::vector(&sig, &frame.xi[l])?.wedge(&Multivector::vector(&sig, &frame.xi_up[k])?)?;
                out = &out + &w.scale(&c);
            }
        }
    }
    Ok(out)
}

/// `R(a ^ b)` for coordinate components `a`, `b`.
pub fn curvature_of(frame: &FrameData, r: &Vec4, a: &[f64], b: &[f64]) -> Result<Multivector<f64>> {
    let d = frame.dim();
    let mut out = Multivector::zero(&frame.ambient_signature());
    for i in 0..d {
        for j in 0..d {
            let c = a[i] * b[j];
            if c != 0.0 {
                out = &out + &curvature_bivector(frame, r, i, j)?.scale(&c);
            }
        }
    }
    Ok(out)
}

/// `|a . R(b ^ c) + b . R(c ^ a) + c . R(a ^ b)|` in the ambient space.
pub fn ricci_identity_residual(frame: &FrameData, r: &Vec4, a: &[f64], b: &[f64], c: &[f64]) -> Result<f64> {
    let v = |u: &[f64]| frame.to_multivector(&frame.vector(u));
    let s = &(&v(a)?.inner(&curvature_of(frame, r, b, c)?)? + &v(b)?.inner(&curvature_of(frame, r, c, a)?)?)
        + &v(c)?.inner(&curvature_of(frame, r, a, b)?)?;
    Ok(s.max_abs())
}

/// `max |nabla_m R^l_ijk + nabla_i R^l_jmk + nabla_j R^l_mik|`.
pub fn second_bianchi_residual(chart: &dyn Chart, x: &[f64]) -> Result<f64> {
    let d = chart.dim();
    let r = riemann(chart, x)?;
    let gamma = christoffel_extrinsic(chart, x)?;
    let flat = |t: &Vec4| -> Vec<f64> { t.iter().flatten().flatten().flatten().copied().collect() };
    let dr: Vec<Vec<f64>> =
        (0..d).map(|m| five_point(|y| Ok(flat(&riemann(chart, y)?)), x, m, H_CURVATURE)).collect::<Result<_>>()?;
    let at = |m: usize, l: usize, i: usize, j: usize, k: usize| dr[m][((l * d + i) * d + j) * d + k];
    let nabla = |m: usize, l: usize, i: usize, j: usize, k: usize| {
        let mut v = at(m, l, i, j, k);
        for n in 0..d {
            v += gamma[l][m][n] * r[n][i][j][k];
            v -= gamma[n][m][i] * r[l][n][j][k];
            v -= gamma[n][m][j] * r[l][i][n][k];
            v -= gamma[n][m][k] * r[l][i][j][n];
        }
        v
    };
    let mut worst: f64 = 0.0;
    for m in 0..d {
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let s = nabla(m, l, i, j, k) + nabla(i, l, j, m, k) + nabla(j, l, m, i, k);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// `S(a) = xi^i ^ P_perp((a . d) xi_i)`; satisfies `b . S(a) = P_perp((a . d) b)`
/// for constant-coefficient tangent `b`.
pub fn shape_bivector(chart: &dyn Chart, x: &[f64], a: &[f64]) -> Result<Multivector<f64>> {
    let f = frames_at(chart, x)?;
    let d2 = second_partials(chart, x);
    let sig = f.ambient_signature();
    let mut out = Multivector::zero(&sig);
    for i in 0..f.dim() {
        let di: Vec<f64> = (0..f.ambient_dim()).map(|k| (0..f.dim()).map(|j| a[j] * d2[j][i][k]).sum()).collect();
        let n = f.normal_part(&di);
        out = &out + &Multivector::vector(&sig, &f.xi_up[i])?.wedge(&Multivector::vector(&sig, &n)?)?;
    }
    Ok(out)
}

/// `P_perp((a . d) b)` for constant-coefficient tangent `b`.
pub fn normal_derivative(chart: &dyn Chart, x: &[f64], a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let f = frames_at(chart, x)?;
    let d2 = second_partials(chart, x);
    let v: Vec<f64> = (0..f.ambient_dim())
        .map(|k| {
            (0..f.dim()).flat_map(|i| (0..f.dim()).map(move |j| (i, j))).map(|(i, j)| a[j] * b[i] * d2[j][i][k]).sum()
        })
        .collect();
    Ok(f.normal_part(&v))
}

/// A frame field `theta_r^i(x)` given as `[r][i]`.
pub type FrameField<'a> = &'a dyn Fn(&[f64]) -> Result<Vec2>;

/// Gram-Schmidt orthonormalization of the coordinate frame.
pub fn orthonormal_frame(chart: &dyn Chart, x: &[f64]) -> Result<Vec2> {
    let g = metric(chart, x);
    let d = chart.dim();
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| a[i] * g[(i, j)] * b[j]).sum()
    };
    let mut out: Vec2 = Vec::new();
    for r in 0..d {
        let mut v: Vec<f64> = (0..d).map(|i| if i == r { 1.0 } else { 0.0 }).collect();
        for u in &out {
            let c = inner(&v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        let n = inner(&v, &v);
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::DegenerateMetric(x.to_vec()));
        }
        out.push(v.iter().map(|a| a / n.sqrt()).collect());
    }
    Ok(out)
}

fn invert(m: &Vec2, x: &[f64]) -> Result<Vec2> {
    let d = m.len();
    let a = DMatrix::from_fn(d, d, |r, i| m[r][i]);
    let inv = a.try_inverse().ok_or_else(|| Error::Singular)?;
    let _ = x;
    // coframe theta^r_i with theta^r_i theta_s^i = delta
    Ok((0..d).map(|r| (0..d).map(|i| inv[(i, r)]).collect()).collect())
}

/// Non-coordinate frame quantities at one point.
#[derive(Clone, Debug)]
pub struct NonCoordinateFrame {
    /// `theta_r^i`.
    pub frame: Vec2,
    /// `theta^r_i`.
    pub coframe: Vec2,
    /// `C^t_rs = [theta_r, theta_s]_JLB . theta^t`, as `[t][r][s]`.
    pub c: Vec3,
    /// `Gamma^t_rs = theta^t . (theta_r . D) theta_s`, as `[t][r][s]`.
    pub gamma: Vec3,
    /// The same symbols from the frame metric and `C`.
    pub gamma_koszul: Vec3,
    /// `T^t_rs = Gamma^t_rs - Gamma^t_sr - C^t_rs`.
    pub torsion: Vec3,
    /// `max |d theta^r (theta_t, theta_u) + C^r_tu|`.
    pub maurer_cartan: f64,
}

fn frame_derivatives(field: FrameField, x: &[f64], d: usize) -> Result<Vec3> {
    // [i][r][j] = d_i theta_r^j
    (0..d)
        .map(|i| {
            let v = five_point(|y| Ok(field(y)?.concat()), x, i, H_CONNECTION)?;
            Ok(v.chunks(d).map(|c| c.to_vec()).collect())
        })
        .collect()
}

fn coframe_field(field: FrameField, x: &[f64]) -> Result<Vec<f64>> {
    Ok(invert(&field(x)?, x)?.concat())
}

pub fn noncoordinate_frame(chart: &dyn Chart, x: &[f64], field: FrameField) -> Result<NonCoordinateFrame> {
    let d = chart.dim();
    let th = field(x)?;
    let co = invert(&th, x)?;
    let dth = frame_derivatives(field, x, d)?;
    let gamma_c = christoffel_extrinsic(chart, x)?;
    let g = metric(chart, x);
    let idx3 = || (0..d).flat_map(move |a| (0..d).flat_map(move |b| (0..d).map(move |c| (a, b, c))));

    // bracket components in the coordinate basis
    let bracket = |r: usize, s: usize| -> Vec<f64> {
        (0..d).map(|l| (0..d).map(|i| th[r][i] * dth[i][s][l] - th[s][i] * dth[i][r][l]).sum()).collect()
    };
    let mut c = vec![vec![vec![0.0; d]; d]; d];
    for r in 0..d {
        for s in 0..d {
            let b = bracket(r, s);
            for t in 0..d {
                c[t][r][s] = (0..d).map(|l| co[t][l] * b[l]).sum();
            }
        }
    }
    let mut gamma = vec![vec![vec![0.0; d]; d]; d];
    for (t, r, s) in idx3() {
        let mut v = 0.0;
        for l in 0..d {
            let mut cov = 0.0;
            for i in 0..d {
                cov += th[r][i] * dth[i][s][l];
                for m in 0..d {
                    cov += th[r][i] * gamma_c[l][i][m] * th[s][m];
                }
            }
            v += co[t][l] * cov;
        }
        gamma[t][r][s] = v;
    }

    // frame metric and its directional derivatives
    let frame_metric = |y: &[f64]| -> Result<Vec<f64>> {
        let t = field(y)?;
        let gy = metric(chart, y);
        Ok((0..d)
            .flat_map(|r| (0..d).map(move |s| (r, s)))
            .map(|(r, s)| {
                (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| t[r][i] * gy[(i, j)] * t[s][j]).sum()
            })
            .collect())
    };
    let gf = frame_metric(x)?;
    let dgf: Vec<Vec<f64>> = (0..d).map(|i| five_point(frame_metric, x, i, H_CONNECTION)).collect::<Result<_>>()?;
    let dir = |r: usize, s: usize, u: usize| -> f64 { (0..d).map(|i| th[r][i] * dgf[i][s * d + u]).sum() };
    let gfm = DMatrix::from_fn(d, d, |r, s| gf[r * d + s]);
    let gf_inv = gfm.try_inverse().ok_or(Error::Singular)?;
    let c_low = |r: usize, s: usize, u: usize| -> f64 { (0..d).map(|t| gf[t * d + u] * c[t][r][s]).sum() };
    let mut gamma_koszul = vec![vec![vec![0.0; d]; d]; d];
    for (t, r, s) in idx3() {
        gamma_koszul[t][r][s] = (0..d)
            .map(|u| {
                0.5 * gf_inv[(t, u)]
                    * (dir(r, s, u) + dir(s, r, u) - dir(u, r, s) + c_low(u, r, s) + c_low(u, s, r) - c_low(s, r, u))
            })
            .sum();
    }
    let _ = &g;

    let mut torsion = vec![vec![vec![0.0; d]; d]; d];
    for (t, r, s) in idx3() {
        torsion[t][r][s] = gamma[t][r][s] - gamma[t][s][r] - c[t][r][s];
    }

    // d theta^r evaluated on (theta_t, theta_u)
    let dco: Vec<Vec<f64>> =
        (0..d).map(|i| five_point(|y| coframe_field(field, y), x, i, H_CONNECTION)).collect::<Result<_>>()?;
    let mut maurer_cartan: f64 = 0.0;
    for (r, t, u) in idx3() {
        let mut v = 0.0;
        for i in 0..d {
            for j in 0..d {
                let dtheta = dco[i][r * d + j] - dco[j][r * d + i];
                v += dtheta * th[t][i] * th[u][j];
            }
        }
        maurer_cartan = maurer_cartan.max((v + c[r][t][u]).abs());
    }

    Ok(NonCoordinateFrame { frame: th, coframe: co, c, gamma, gamma_koszul, torsion, maurer_cartan })
}

/// Connection one-forms `omega^a_{b,i} = theta^a_l (d_i theta_b^l + Gamma^l_im theta_b^m)`,
/// as `[a][b][i]`.
pub fn connection_forms(chart: &dyn Chart, x: &[f64], field: FrameField) -> Result<Vec3> {
    let d = chart.dim();
    let th = field(x)?;
    let co = invert(&th, x)?;
    let dth = frame_derivatives(field, x, d)?;
    let gamma = christoffel_extrinsic(chart, x)?;
    Ok((0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    (0..d)
                        .map(|i| {
                            (0..d)
                                .map(|l| {
                                    let mut v = dth[i][b][l];
                                    for m in 0..d {
                                        v += gamma[l][i][m] * th[b][m];
                                    }
                                    co[a][l] * v
                                })
                                .sum()
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

#[derive(Clone, Copy, Debug)]
pub struct CartanResiduals {
    /// `max |d omega + omega ^ omega - R|` over frame indices and coordinate pairs.
    pub curvature: f64,
    /// `max |d theta + omega ^ theta|`.
    pub torsion: f64,
}

pub fn cartan_structure_residuals(chart: &dyn Chart, x: &[f64], field: FrameField) -> Result<CartanResiduals> {
    let d = chart.dim();
    let th = field(x)?;
    let co = invert(&th, x)?;
    let om = connection_forms(chart, x, field)?;
    let dom: Vec<Vec<f64>> = (0..d)
        .map(|i| five_point(|y| Ok(flatten3(&connection_forms(chart, y, field)?)), x, i, H_CONNECTION))
        .collect::<Result<_>>()?;
    let dco: Vec<Vec<f64>> =
        (0..d).map(|i| five_point(|y| coframe_field(field, y), x, i, H_CONNECTION)).collect::<Result<_>>()?;
    let r = riemann(chart, x)?;
    let mut curvature: f64 = 0.0;
    let mut torsion: f64 = 0.0;
    for a in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut t = dco[i][a * d + j] - dco[j][a * d + i];
                for b in 0..d {
                    t += om[a][b][i] * co[b][j] - om[a][b][j] * co[b][i];
                }
                torsion = torsion.max(t.abs());
                for b in 0..d {
                    let mut lhs = dom[i][(a * d + b) * d + j] - dom[j][(a * d + b) * d + i];
                    for c in 0..d {
                        lhs += om[a][c][i] * om[c][b][j] - om[a][c][j] * om[c][b][i];
                    }
                    let mut rhs = 0.0;
                    for l in 0..d {
                        for m in 0..d {
                            rhs += co[a][l] * r[l][i][j][m] * th[b][m];
                        }
                    }
                    curvature = curvature.max((lhs - rhs).abs());
                }
            }
        }
    }
    Ok(CartanResiduals { curvature, torsion })
}

/// Basis of `dx^i` blades for forms on a `d`-dimensional chart.
pub fn form_signature(d: usize) -> Signature {
    coordinate_signature(&format!("forms:{d}"), (1..=d).map(|i| format!("dx{i}")).collect())
}

pub type FormField<'a> = &'a dyn Fn(&[f64]) -> Result<Multivector<f64>>;
pub type VectorField<'a> = &'a dyn Fn(&[f64]) -> Result<Vec<f64>>;

fn coefficients(a: &Multivector<f64>) -> Vec<f64> {
    let n = 1u64 << a.signature().dim();
    (0..n).map(|m| a.coeff(m)).collect()
}

fn from_coefficients(sig: &Signature, c: &[f64]) -> Multivector<f64> {
    let mut out = Multivector::zero(sig);
    for (m, v) in c.iter().enumerate() {
        if *v != 0.0 {
            out.add_blade(m as u64, v);
        }
    }
    out
}

/// `d_i` of every coefficient.
pub fn form_partial(field: FormField, x: &[f64], i: usize) -> Result<Multivector<f64>> {
    let sig = field(x)?.signature().clone();
    let c = five_point(|y| Ok(coefficients(&field(y)?)), x, i, H_CONNECTION)?;
    Ok(from_coefficients(&sig, &c))
}

/// `dA = dx^i ^ d_i A`.
pub fn exterior_derivative(field: FormField, x: &[f64]) -> Result<Multivector<f64>> {
    let sig = field(x)?.signature().clone();
    let mut out = Multivector::zero(&sig);
    for i in 0..sig.dim() {
        out = &out + &Multivector::generator(&sig, i)?.wedge(&form_partial(field, x, i)?)?;
    }
    Ok(out)
}

/// Hodge dual with `g^{ij}` and `sqrt|g|` of the chart.
pub fn hodge(frame: &FrameData, a: &Multivector<f64>) -> Multivector<f64> {
    let d = frame.dim();
    let inv: Vec<f64> = (0..d * d).map(|k| frame.g_inv[(k / d, k % d)]).collect();
    a.hodge_with(&inv, &frame.sqrt_det)
}

/// `d^dagger A = (-1)^(d r + d + 1) * d * A` for an `r`-form.
pub fn coderivative(chart: &dyn Chart, field: FormField, x: &[f64]) -> Result<Multivector<f64>> {
    let a = field(x)?;
    if a.is_zero() {
        return Ok(a);
    }
    let r = a.homogeneous_grade()?;
    let d = chart.dim();
    let starred = |y: &[f64]| -> Result<Multivector<f64>> { Ok(hodge(&frames_at(chart, y)?, &field(y)?)) };
    let out = hodge(&frames_at(chart, x)?, &exterior_derivative(&starred, x)?);
    Ok(if (d * r + d + 1) % 2 == 1 { out.neg() } else { out })
}

/// Covariant derivative `D_j A` of a form field.
pub fn covariant_derivative(chart: &dyn Chart, field: FormField, x: &[f64], j: usize) -> Result<Multivector<f64>> {
    let a = field(x)?;
    let sig = a.signature().clone();
    let gamma = christoffel_extrinsic(chart, x)?;
    let d = chart.dim();
    // D_j dx^k = -Gamma^k_ji dx^i
    let moved = derivation(&a, |k| {
        let c: Vec<f64> = (0..d).map(|i| -gamma[k][j][i]).collect();
        Multivector::vector(&sig, &c).expect("dimension matches")
    })?;
    Ok(&form_partial(field, x, j)? + &moved)
}

/// `d . A = xi^j . D_j A`, contracting with `g^{ji}`.
pub fn divergence(chart: &dyn Chart, field: FormField, x: &[f64]) -> Result<Multivector<f64>> {
    let f = frames_at(chart, x)?;
    let d = chart.dim();
    let mut out = Multivector::zero(field(x)?.signature());
    for j in 0..d {
        let up: Vec<f64> = (0..d).map(|i| f.g_inv[(j, i)]).collect();
        out = &out + &interior(&up, &covariant_derivative(chart, field, x, j)?);
    }
    Ok(out)
}

/// Component Jacobi-Lie bracket `(a^j d_j b^i - b^j d_j a^i)`.
pub fn jacobi_lie_bracket(a: VectorField, b: VectorField, x: &[f64]) -> Result<Vec<f64>> {
    let (av, bv) = (a(x)?, b(x)?);
    let d = av.len();
    let da: Vec<Vec<f64>> = (0..d).map(|j| five_point(a, x, j, H_CONNECTION)).collect::<Result<_>>()?;
    let db: Vec<Vec<f64>> = (0..d).map(|j| five_point(b, x, j, H_CONNECTION)).collect::<Result<_>>()?;
    Ok((0..d).map(|i| (0..d).map(|j| av[j] * db[j][i] - bv[j] * da[j][i]).sum()).collect())
}

/// `(a . d) b - (b . d) a` computed on ambient vectors `a^i xi_i`.
pub fn jacobi_lie_bracket_ambient(chart: &dyn Chart, a: VectorField, b: VectorField, x: &[f64]) -> Result<Vec<f64>> {
    let amb = |v: VectorField, y: &[f64]| -> Result<Vec<f64>> { Ok(frames_at(chart, y)?.vector(&v(y)?)) };
    let (av, bv) = (a(x)?, b(x)?);
    let d = av.len();
    let dir = |u: &[f64], v: VectorField| -> Result<Vec<f64>> {
        let mut out = vec![0.0; chart.ambient_dim()];
        for j in 0..d {
            let dj = five_point(|y| amb(v, y), x, j, H_CONNECTION)?;
            out.iter_mut().zip(&dj).for_each(|(o, t)| *o += u[j] * t);
        }
        Ok(out)
    };
    let (ab, ba) = (dir(&av, b)?, dir(&bv, a)?);
    Ok(ab.iter().zip(&ba).map(|(p, q)| p - q).collect())
}

/// Lie derivative of a form by Cartan's formula `(d i_a + i_a d) A`.
pub fn lie_derivative_form(a: VectorField, field: FormField, x: &[f64]) -> Result<Multivector<f64>> {
    let contracted = |y: &[f64]| -> Result<Multivector<f64>> { Ok(interior(&a(y)?, &field(y)?)) };
    let dfield = |y: &[f64]| exterior_derivative(field, y);
    Ok(&exterior_derivative(&contracted, x)? + &interior(&a(x)?, &dfield(x)?))
}

/// Component form `a^k d_k A + (d_i a^k)` substituted for each `dx^k`.
pub fn lie_derivative_form_components(a: VectorField, field: FormField, x: &[f64]) -> Result<Multivector<f64>> {
    let w = field(x)?;
    let sig = w.signature().clone();
    let av = a(x)?;
    let d = av.len();
    let da: Vec<Vec<f64>> = (0..d).map(|i| five_point(a, x, i, H_CONNECTION)).collect::<Result<_>>()?;
    let mut out = derivation(&w, |k| {
        let c: Vec<f64> = (0..d).map(|i| da[i][k]).collect();
        Multivector::vector(&sig, &c).expect("dimension matches")
    })?;
    for k in 0..d {
        out = &out + &form_partial(field, x, k)?.scale(&av[k]);
    }
    Ok(out)
}

/// Flat plane `R^d` with the identity embedding.
#[derive(Clone, Debug)]
pub struct Plane {
    pub dim: usize,
}

impl Chart for Plane {
    fn name(&self) -> String {
        format!("plane:{}", self.dim)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn ambient_dim(&self) -> usize {
        self.dim
    }
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn d1(&self, _x: &[f64]) -> Option<Vec2> {
        Some((0..self.dim).map(|i| (0..self.dim).map(|a| if a == i { 1.0 } else { 0.0 }).collect()).collect())
    }
    fn d2(&self, _x: &[f64]) -> Option<Vec3> {
        Some(vec![vec![vec![0.0; self.dim]; self.dim]; self.dim])
    }
}

/// Round sphere of a given radius: `S^2` in `(theta, phi)` or `S^3` in
/// `(chi, theta, phi)`.
#[derive(Clone, Debug)]
pub struct Sphere {
    pub radius: f64,
    pub dim: usize,
}

impl Sphere {
    pub fn new(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) || !(dim == 2 || dim == 3) {
            return Err(Error::Invalid("sphere needs a positive radius and dimension 2 or 3".into()));
        }
        Ok(Sphere { radius, dim })
    }

    pub fn unit() -> Self {
        Sphere { radius: 1.0, dim: 2 }
    }

    /// Each ambient component is `r` times a product of `sin`/`cos` of
    /// single coordinates; `true` marks a sine.
    fn factors(&self) -> &'static [&'static [(usize, bool)]] {
        if self.dim == 2 {
            &[&[(0, true), (1, false)], &[(0, true), (1, true)], &[(0, false)]]
        } else {
            &[
                &[(0, true), (1, true), (2, false)],
                &[(0, true), (1, true), (2, true)],
                &[(0, true), (1, false)],
                &[(0, false)],
            ]
        }
    }

    /// Partial derivative of the embedding along the listed coordinates.
    fn partial(&self, x: &[f64], along: &[usize]) -> Vec<f64> {
        let order = |c: usize| along.iter().filter(|&&a| a == c).count();
        self.factors()
            .iter()
            .map(|comp| {
                if along.iter().any(|a| !comp.iter().any(|(c, _)| c == a)) {
                    return 0.0;
                }
                comp.iter().fold(self.radius, |acc, &(c, sine)| {
                    let (s, co) = x[c].sin_cos();
                    // d/dx cycles sin -> cos -> -sin -> -cos
                    let cycle = if sine { [s, co, -s, -co] } else { [co, -s, -co, s] };
                    acc * cycle[order(c) % 4]
                })
            })
            .collect()
    }
}

impl Chart for Sphere {
    fn name(&self) -> String {
        format!("sphere:{}:{}", self.dim, self.radius)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn ambient_dim(&self) -> usize {
        self.dim + 1
    }
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        self.partial(x, &[])
    }
    fn d1(&self, x: &[f64]) -> Option<Vec2> {
        Some((0..self.dim).map(|i| self.partial(x, &[i])).collect())
    }
    fn d2(&self, x: &[f64]) -> Option<Vec3> {
        Some((0..self.dim).map(|i| (0..self.dim).map(|j| self.partial(x, &[i, j])).collect()).collect())
    }
    fn check_domain(&self, x: &[f64]) -> Result<()> {
        let polar = if self.dim == 2 { &x[..1] } else { &x[..2] };
        if x.len() != self.dim
            || x.iter().any(|v| !v.is_finite())
            || polar.iter().any(|t| t.sin().abs() < POLE_GUARD.sin())
        {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        Ok(())
    }
}

/// Torus with tube radius `r` around a circle of radius `big_r`, in `(u, v)`.
#[derive(Clone, Debug)]
pub struct Torus {
    pub big_r: f64,
    pub r: f64,
}

impl Chart for Torus {
    fn name(&self) -> String {
        format!("torus:{}:{}", self.big_r, self.r)
    }
    fn dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        let (u, v) = (x[0], x[1]);
        let w = self.big_r + self.r * v.cos();
        vec![w * u.cos(), w * u.sin(), self.r * v.sin()]
    }
    fn d1(&self, x: &[f64]) -> Option<Vec2> {
        let (u, v, r) = (x[0], x[1], self.r);
        let w = self.big_r + r * v.cos();
        Some(vec![
            vec![-w * u.sin(), w * u.cos(), 0.0],
            vec![-r * v.sin() * u.cos(), -r * v.sin() * u.sin(), r * v.cos()],
        ])
    }
    fn d2(&self, x: &[f64]) -> Option<Vec3> {
        let (u, v, r) = (x[0], x[1], self.r);
        let w = self.big_r + r * v.cos();
        let uu = vec![-w * u.cos(), -w * u.sin(), 0.0];
        let uv = vec![r * v.sin() * u.sin(), -r * v.sin() * u.cos(), 0.0];
        let vv = vec![-r * v.cos() * u.cos(), -r * v.cos() * u.sin(), -r * v.sin()];
        Some(vec![vec![uu, uv.clone()], vec![uv, vv]])
    }
}

/// Cotangent bundle of a chart, embedded as
/// `(q + pi)(q, p) = x^a(q) sigma_a + p_j xi^j_a(q) tau^a`.
pub struct Cotangent {
    pub base: Box<dyn Chart>,
}

impl Cotangent {
    /// Canonical one-form coefficients at `(q, p)`: `theta(v) = T pi(v) . pi`.
    pub fn canonical_one_form(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.base.ambient_dim();
        let d = self.base.dim();
        let f = frames_at(self, x)?;
        let pi = &self.embed(x)[n..];
        let _ = d;
        Ok(f.xi.iter().map(|t| dot(&t[..n], pi)).collect())
    }
}

impl Chart for Cotangent {
    fn name(&self) -> String {
        format!("cotangent:{}", self.base.name())
    }
    fn dim(&self) -> usize {
        2 * self.base.dim()
    }
    fn ambient_dim(&self) -> usize {
        2 * self.base.ambient_dim()
    }
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        let d = self.base.dim();
        let q = &x[..d];
        let mut out = self.base.embed(q);
        let n = out.len();
        let xi = tangents(self.base.as_ref(), q);
        let g = DMatrix::from_fn(d, d, |i, j| dot(&xi[i], &xi[j]));
        let g_inv = g.try_inverse().unwrap_or_else(|| DMatrix::from_element(d, d, f64::NAN));
        for a in 0..n {
            let mut s = 0.0;
            for j in 0..d {
                for k in 0..d {
                    s += x[d + j] * g_inv[(j, k)] * xi[k][a];
                }
            }
            out.push(s);
        }
        out
    }
    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        self.base.check_domain(&x[..self.base.dim()])
    }
}

/// Hides a chart's analytic derivatives so the finite-difference fallback is used.
pub struct Numeric<C: Chart>(pub C);

impl<C: Chart> Chart for Numeric<C> {
    fn name(&self) -> String {
        format!("numeric:{}", self.0.name())
    }
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        self.0.embed(x)
    }
    fn check_domain(&self, x: &[f64]) -> Result<()> {
        self.0.check_domain(x)
    }
}

/// Multiplies the embedding of a chart by a constant.
pub struct Scaled<C: Chart> {
    pub chart: C,
    pub factor: f64,
}

impl<C: Chart> Chart for Scaled<C> {
    fn name(&self) -> String {
        format!("scaled:{}:{}", self.factor, self.chart.name())
    }
    fn dim(&self) -> usize {
        self.chart.dim()
    }
    fn ambient_dim(&self) -> usize {
        self.chart.ambient_dim()
    }
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        self.chart.embed(x).iter().map(|v| v * self.factor).collect()
    }
    fn d1(&self, x: &[f64]) -> Option<Vec2> {
        self.chart.d1(x).map(|m| m.into_iter().map(|r| r.into_iter().map(|v| v * self.factor).collect()).collect())
    }
    fn d2(&self, x: &[f64]) -> Option<Vec3> {
        self.chart.d2(x).map(|t| {
            t.into_iter()
                .map(|m| m.into_iter().map(|r| r.into_iter().map(|v| v * self.factor).collect()).collect())
                .collect()
        })
    }
    fn check_domain(&self, x: &[f64]) -> Result<()> {
        self.chart.check_domain(x)
    }
}

/// Builds a chart from a spec string: `plane:D`, `sphere:R`, `sphere3:R`,
/// `torus:R:r`, `cotangent:D`.
pub fn parse_chart(spec: &str) -> Result<Box<dyn Chart>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Invalid(format!("bad number `{s}` in chart `{spec}`")));
    let count =
        |s: &str| s.parse::<usize>().map_err(|_| Error::Invalid(format!("bad dimension `{s}` in chart `{spec}`")));
    match parts.as_slice() {
        ["plane", d] => Ok(Box::new(Plane { dim: count(d)? })),
        ["sphere", r] => Ok(Box::new(Sphere::new(num(r)?, 2)?)),
        ["sphere3", r] => Ok(Box::new(Sphere::new(num(r)?, 3)?)),
        ["torus", a, b] => {
            let (big_r, r) = (num(a)?, num(b)?);
            if !(r > 0.0 && big_r > r) {
                return Err(Error::Invalid("torus needs R > r > 0".into()));
            }
            Ok(Box::new(Torus { big_r, r }))
        }
        ["cotangent", d] => Ok(Box::new(Cotangent { base: Box::new(Plane { dim: count(d)? }) })),
        _ => Err(Error::Invalid(format!("unknown chart `{spec}`"))),
    }
}

/// Result of checking `xi_phi . Omega = dP` for the rotation about
/// `sigma_3` on the unit sphere.
#[derive(Clone, Debug)]
pub struct CircleActionReport {
    pub grid: usize,
    /// `max |(B . x) . Omega - dP|` with `P = cos theta`.
    pub pde_residual: f64,
    /// `max |B . x - xi_phi|`.
    pub field_residual: f64,
    /// `max |Omega_{theta phi} - sin theta|` with `Omega` from the embedding.
    pub omega_residual: f64,
}

impl CircleActionReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.pde_residual < tol && self.field_residual < tol && self.omega_residual < tol
    }
}

/// Samples an `n x n` grid with `theta` in `[margin, pi - margin]` and
/// `phi` in `[0, 2 pi)`.
pub fn circle_action_s2(n: usize, margin: f64) -> Result<CircleActionReport> {
    let sphere = Sphere::unit();
    if margin < POLE_GUARD || n < 2 {
        return Err(Error::OutsideDomain(vec![margin, 0.0]));
    }
    let sig = MetricSignature::euclidean(3);
    // B = -sigma_1 sigma_2
    let b = Multivector::<f64>::blade(&sig, &[0, 1])?.neg();
    let fsig = form_signature(2);
    let p_of = |y: &[f64]| -> Result<Multivector<f64>> { Ok(Multivector::scalar(&fsig, sphere.embed(y)[2])) };
    let mut report = CircleActionReport { grid: n, pde_residual: 0.0, field_residual: 0.0, omega_residual: 0.0 };
    for i in 0..n {
        for j in 0..n {
            let theta = margin + (std::f64::consts::PI - 2.0 * margin) * i as f64 / (n - 1) as f64;
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let x = [theta, phi];
            let f = frames_at(&sphere, &x)?;
            let pos = Multivector::vector(&sig, &f.position)?;
            let v = induced_field(&b, &pos)?;
            let amb: Vec<f64> = (0..3).map(|k| v.coeff(1 << k)).collect();
            report.field_residual = report.field_residual.max(max_abs(amb.iter().zip(&f.xi[1]).map(|(p, q)| p - q)));
            // x . (xi_theta x xi_phi) for Omega = x^1 s^2 s^3 + x^2 s^3 s^1 + x^3 s^1 s^2
            let (a, c) = (&f.xi[0], &f.xi[1]);
            let cross = [a[1] * c[2] - a[2] * c[1], a[2] * c[0] - a[0] * c[2], a[0] * c[1] - a[1] * c[0]];
            let om = dot(&f.position, &cross);
            report.omega_residual = report.omega_residual.max((om - theta.sin()).abs());
            let omega = Multivector::blade(&fsig, &[0, 1])?.scale(&om);
            let lhs = interior(&f.components(&amb), &omega);
            let dp = exterior_derivative(&p_of, &x)?;
            report.pde_residual = report.pde_residual.max((&lhs - &dp).max_abs());
        }
    }
    Ok(report)
}
