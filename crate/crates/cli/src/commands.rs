use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;
use serde_json::{json, Value};
use starga::geometry::{christoffel, frames_at, gaussian_curvature, parse_chart, Chart, POLE_GUARD};
use starga::lie::BivectorAlgebra;
use starga::moyal::{ExtendedPhaseSpace, Superfunction};
use starga::rigid_body::{integrate, reversal_error, InertiaOperator, RigidBodyState, Trajectory};
use starga::suite::{run_group, SuiteConfig, GROUPS};
use starga::{Error, Gaussian, MetricSignature, Multivector, Result, Signature};

use crate::input::{self, HamiltonianSpec, RigidBodySpec, SuiteSpec};
use crate::output::{exact, exact_str, float, Failure, Report};
use crate::Common;

// algebra

pub fn algebra(name: &str, _common: &Common) -> Result<Report> {
    let parts: Vec<&str> = name.split(':').collect();
    if let ["clifford", d, kind] = parts.as_slice() {
        let d: usize = d.parse().map_err(|_| Error::Invalid(format!("bad dimension in `{name}`")))?;
        if d == 0 || d > 8 {
            return Err(Error::Invalid("blade tables are limited to 1..=8 generators".into()));
        }
        let sig = match *kind {
            "euclidean" | "euclid" => MetricSignature::euclidean(d),
            "std" => MetricSignature::minkowski_standard(d),
            "nonstd" => MetricSignature::minkowski_nonstandard(d),
            "symplectic" if d.is_multiple_of(2) => MetricSignature::symplectic(d / 2),
            _ => return Err(Error::Invalid(format!("unknown signature `{kind}`"))),
        };
        return blade_table(name, &sig);
    }
    let alg = BivectorAlgebra::parse(name)?;
    lie_tables(&alg)
}

fn blade_label(sig: &Signature, mask: u64) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..sig.dim()).filter(|i| mask >> i & 1 == 1).map(|i| sig.labels()[i].as_str()).collect::<Vec<_>>().join("^")
}

fn blade_table(name: &str, sig: &Signature) -> Result<Report> {
    // blades in grade order, then by mask
    let mut masks: Vec<u64> = (0..=sig.all_mask()).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let labels: Vec<String> = masks.iter().map(|&m| blade_label(sig, m)).collect();
    let unit = |m: u64| Multivector::<Gaussian>::from_terms(sig, [(m, Gaussian::one())]);
    let mut table = Vec::with_capacity(masks.len());
    for &a in &masks {
        let row: Vec<String> =
            masks.iter().map(|&b| Ok(unit(a)?.star(&unit(b)?)?.display(exact_str))).collect::<Result<_>>()?;
        table.push(row);
    }
    let mut rows = Vec::new();
    for (label, row) in labels.iter().zip(&table) {
        let mut r = vec![label.clone()];
        r.extend(row.iter().cloned());
        rows.push(r);
    }
    let mut header = vec!["*".to_string()];
    header.extend(labels.iter().cloned());
    Ok(Report {
        json: json!({ "algebra": name, "signature": sig.id(), "blades": labels, "products": table }),
        header,
        rows,
        failures: vec![],
    })
}

fn lie_tables(alg: &BivectorAlgebra) -> Result<Report> {
    let n = alg.dim();
    let c = alg.structure();
    let kappa = alg.killing()?;
    let generators: Vec<String> = alg.generators().iter().map(|g| g.display(exact_str)).collect();
    let structure: Vec<Value> = (0..n)
        .map(|i| {
            json!((0..n).map(|j| json!((0..n).map(|k| exact(&c[i][j][k])).collect::<Vec<_>>())).collect::<Vec<_>>())
        })
        .collect();
    let killing: Vec<Value> = kappa.iter().map(|row| json!(row.iter().map(exact).collect::<Vec<_>>())).collect();

    let mut rows = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        rows.push(vec!["generator".into(), alg.labels()[i].clone(), String::new(), String::new(), g.clone()]);
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !c[i][j][k].is_zero() {
                    let l = alg.labels();
                    rows.push(vec![
                        "structure".into(),
                        l[i].clone(),
                        l[j].clone(),
                        l[k].clone(),
                        exact_str(&c[i][j][k]),
                    ]);
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let l = alg.labels();
            rows.push(vec!["killing".into(), l[i].clone(), l[j].clone(), String::new(), exact_str(&kappa[i][j])]);
        }
    }

    let mut failures = Vec::new();
    let jacobi = alg.jacobi_violation();
    if let Some((i, j, k)) = jacobi {
        failures.push(Failure::new(format!("Jacobi identity ({i},{j},{k})"), 1.0, 0.0));
    }
    Ok(Report {
        json: json!({
            "algebra": alg.name(),
            "signature": alg.signature().id(),
            "dim": n,
            "labels": alg.labels(),
            "generators": generators,
            "structure_constants": structure,
            "killing": killing,
            "jacobi": jacobi.is_none(),
        }),
        header: ["table", "i", "j", "k", "value"].map(String::from).to_vec(),
        rows,
        failures,
    })
}

// brst

#[derive(Args, Debug)]
pub struct BrstArgs {
    /// Hamiltonian as a JSON monomial list.
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    /// oscillator, zero, cubic or quartic.
    #[arg(long)]
    pub preset: Option<String>,
}

pub fn brst(args: &BrstArgs, _common: &Common) -> Result<Report> {
    let spec = match (&args.input, &args.preset) {
        (Some(path), _) => input::read::<HamiltonianSpec>(path)?,
        (None, Some(p)) => HamiltonianSpec::preset(p)?,
        (None, None) => return Err(Error::Invalid("give --input or --preset".into())),
    };
    let ext = ExtendedPhaseSpace::new(spec.dof, spec.with_hbar);
    let h = spec.polynomial(ext.base())?;
    let reg = ext.registry();
    let nvars = reg.len();
    let show = |f: &Superfunction| f.display(|c| format!("({})", c.display(reg)));

    let ht = ext.extended_hamiltonian(&h)?;
    let eom = ext.equations_of_motion_check(&h)?;
    let brst = ext.brst_check(&h)?;

    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut section = |kind: &str, list: &[(String, Superfunction)]| -> Vec<Value> {
        list.iter()
            .map(|(name, r)| {
                let zero = r.is_zero();
                if !zero {
                    failures.push(Failure::new(format!("{kind} {name}"), r.len() as f64, 0.0));
                }
                rows.push(vec![kind.to_string(), name.clone(), zero.to_string(), show(r)]);
                json!({ "name": name, "zero": zero, "residual": show(r) })
            })
            .collect()
    };
    let eom_json = section("equation_of_motion", &eom);
    let brackets_json = section("bracket", &brst.brackets);

    Ok(Report {
        json: json!({
            "dof": spec.dof,
            "with_hbar": spec.with_hbar,
            "variables": reg.names(),
            "hamiltonian": h.display(reg),
            "extended_hamiltonian": { "display": show(&ht), "value": ht.to_json(nvars) },
            "equations_of_motion": eom_json,
            "brackets": brackets_json,
        }),
        header: ["kind", "name", "zero", "residual"].map(String::from).to_vec(),
        rows,
        failures,
    })
}

// geometry

#[derive(Args, Debug)]
pub struct GeometryArgs {
    /// plane:D, sphere:R, sphere3:R, torus:R:r or cotangent:D.
    #[arg(long, conflicts_with = "input")]
    pub chart: Option<String>,
    /// Chart as JSON, e.g. {"family": "torus", "R": 2, "r": 1}.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Points per coordinate.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
    /// Distance kept from polar coordinate singularities.
    #[arg(long, default_value_t = 0.2)]
    pub margin: f64,
}

#[derive(Deserialize, Debug)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum ChartSpec {
    Plane {
        dim: usize,
    },
    Sphere {
        radius: f64,
        #[serde(default = "two")]
        dim: usize,
    },
    Torus {
        #[serde(rename = "R")]
        big_r: f64,
        r: f64,
    },
    Cotangent {
        dim: usize,
    },
}

fn two() -> usize {
    2
}

impl ChartSpec {
    fn to_spec(&self) -> Result<String> {
        Ok(match self {
            ChartSpec::Plane { dim } => format!("plane:{dim}"),
            ChartSpec::Sphere { radius, dim: 2 } => format!("sphere:{radius}"),
            ChartSpec::Sphere { radius, dim: 3 } => format!("sphere3:{radius}"),
            ChartSpec::Sphere { dim, .. } => {
                return Err(Error::Invalid(format!("sphere dimension {dim} is not 2 or 3")))
            }
            ChartSpec::Torus { big_r, r } => format!("torus:{big_r}:{r}"),
            ChartSpec::Cotangent { dim } => format!("cotangent:{dim}"),
        })
    }
}

/// Coordinate box sampled for each chart family.
fn domain(spec: &str, dim: usize, margin: f64) -> Vec<(f64, f64, bool)> {
    let polar = (margin, PI - margin, true);
    let turn = (0.0, 2.0 * PI, false);
    match spec.split(':').next() {
        Some("sphere") => vec![polar, turn],
        Some("sphere3") => vec![polar, polar, turn],
        Some("torus") => vec![turn, turn],
        _ => vec![(-1.0, 1.0, true); dim],
    }
}

/// `n` samples per axis; closed intervals include both ends, periodic ones
/// drop the repeated endpoint.
fn axis(lo: f64, hi: f64, closed: bool, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let den = if closed { (n - 1) as f64 } else { n as f64 };
    (0..n).map(|k| lo + (hi - lo) * k as f64 / den).collect()
}

fn grid_points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![]];
    for a in axes {
        out = out.into_iter().flat_map(|p| a.iter().map(move |v| [p.clone(), vec![*v]].concat())).collect();
    }
    out
}

fn expected_curvature(spec: &str) -> Option<f64> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["sphere", r] => r.parse::<f64>().ok().map(|r| 1.0 / (r * r)),
        ["plane", "2"] => Some(0.0),
        _ => None,
    }
}

pub fn geometry(args: &GeometryArgs, common: &Common) -> Result<Report> {
    let spec = match (&args.chart, &args.input) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => input::read::<ChartSpec>(path)?.to_spec()?,
        (None, None) => return Err(Error::Invalid("give --chart or --input".into())),
    };
    if args.grid == 0 {
        return Err(Error::Invalid("grid must be positive".into()));
    }
    if !(args.margin >= POLE_GUARD && args.margin < PI / 2.0) {
        return Err(Error::Invalid(format!("margin must lie in [{POLE_GUARD}, pi/2)")));
    }
    let chart: Box<dyn Chart> = parse_chart(&spec)?;
    let d = chart.dim();
    let points = args.grid.checked_pow(d as u32).filter(|n| *n <= 1_000_000);
    if points.is_none() {
        return Err(Error::Invalid(format!("a grid of {} points per axis in {d} dimensions is too large", args.grid)));
    }
    let axes: Vec<Vec<f64>> =
        domain(&spec, d, args.margin).into_iter().map(|(lo, hi, c)| axis(lo, hi, c, args.grid)).collect();
    let pts = grid_points(&axes);

    let analytic = chart.d1(&pts[0]).is_some() && chart.d2(&pts[0]).is_some();
    let limit = if analytic { 1e-8 } else { 1e-5 } * common.tol;
    let k_expected = expected_curvature(&spec);
    let k_limit = 1e-6 * common.tol;

    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    for i in 0..d {
        for j in i..d {
            header.push(format!("g{}{}", i + 1, j + 1));
        }
    }
    for i in 0..d {
        for j in 0..d {
            for k in j..d {
                header.push(format!("Gamma{}_{}{}", i + 1, j + 1, k + 1));
            }
        }
    }
    header.push("agreement".into());
    header.push("compatibility".into());
    if d == 2 {
        header.push("K".into());
    }

    let mut values: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    let (mut worst_agree, mut worst_compat, mut worst_k) = (0.0f64, 0.0f64, 0.0f64);
    for x in &pts {
        let f = frames_at(chart.as_ref(), x)?;
        let cr = christoffel(chart.as_ref(), x)?;
        let mut row = x.clone();
        for i in 0..d {
            for j in i..d {
                row.push(f.g[(i, j)]);
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in j..d {
                    row.push(cr.gamma_metric[i][j][k]);
                }
            }
        }
        row.push(cr.agreement);
        row.push(cr.compatibility);
        worst_agree = worst_agree.max(cr.agreement);
        worst_compat = worst_compat.max(cr.compatibility);
        if d == 2 {
            let k = gaussian_curvature(chart.as_ref(), x)?;
            if let Some(e) = k_expected {
                worst_k = worst_k.max((k - e).abs());
            }
            row.push(k);
        }
        values.push(row);
    }

    let mut checks = vec![("Christoffel agreement", worst_agree, limit), ("metric compatibility", worst_compat, limit)];
    if k_expected.is_some() && d == 2 {
        checks.push(("Gaussian curvature", worst_k, k_limit));
    }
    let (checks_json, failures) = judge(&checks);

    Ok(Report {
        json: json!({
            "chart": chart.name(),
            "dim": d,
            "analytic_derivatives": analytic,
            "grid": args.grid,
            "margin": args.margin,
            "columns": header,
            "rows": values,
            "checks": checks_json,
        }),
        rows: values.iter().map(|r| r.iter().map(|v| float(*v)).collect()).collect(),
        header,
        failures,
    })
}

/// Reports `(name, value, limit)` checks; NaN values fail.
fn judge(checks: &[(&str, f64, f64)]) -> (Vec<Value>, Vec<Failure>) {
    let mut failures = Vec::new();
    let json = checks
        .iter()
        .map(|&(name, value, limit)| {
            let passed = value <= limit;
            if !passed {
                failures.push(Failure::new(name, value, limit));
            }
            json!({ "name": name, "value": value, "limit": limit, "passed": passed })
        })
        .collect();
    (json, failures)
}

// rigid body

#[derive(Args, Debug)]
pub struct RigidBodyArgs {
    /// Principal moments I1,I2,I3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub inertia: Option<Vec<f64>>,
    /// Initial body angular momentum.
    #[arg(long = "L0", value_delimiter = ',', allow_hyphen_values = true)]
    pub l0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Emit every n-th state.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Parameters as JSON; overrides the flags above.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

fn triple(v: &Option<Vec<f64>>, default: [f64; 3], what: &str) -> Result<[f64; 3]> {
    match v {
        None => Ok(default),
        Some(v) => v.as_slice().try_into().map_err(|_| Error::Invalid(format!("{what} needs three values"))),
    }
}

pub fn rigid_body(args: &RigidBodyArgs, common: &Common) -> Result<Report> {
    let spec = match &args.input {
        Some(path) => input::read::<RigidBodySpec>(path)?,
        None => RigidBodySpec {
            inertia: triple(&args.inertia, [1.0, 2.0, 3.0], "--inertia")?,
            l0: triple(&args.l0, [0.7, -0.4, 0.5], "--L0")?,
            dt: args.dt,
            steps: args.steps,
            every: Some(args.every),
        },
    };
    let every = spec.every.unwrap_or(1);
    if every == 0 {
        return Err(Error::Invalid("every must be positive".into()));
    }
    let inertia = InertiaOperator::principal(spec.inertia)?;
    let s0 = RigidBodyState::new(spec.l0);
    let traj: Trajectory = integrate(&s0, &inertia, spec.dt, spec.steps)?;
    let c = traj.conservation()?;
    let tol = common.tol;
    let mut checks = vec![
        ("Casimir drift", c.casimir_drift, 1e-10 * tol),
        ("energy drift", c.energy_drift, 1e-8 * tol),
        ("spatial angular momentum drift", c.spatial_momentum_drift, 1e-6 * tol),
        ("rotor normalization", c.rotor_defect.max(c.orthogonality_defect), 1e-9 * tol),
        ("forward-backward reversal", reversal_error(&s0, &inertia, spec.dt, spec.steps)?, 1e-8 * tol),
    ];
    if traj.states.len() >= 9 {
        checks.push(("Poincare equation residual", traj.max_poincare_residual()?, 1e-6 * tol));
    }
    let (checks_json, failures) = judge(&checks);

    let all = traj.rows()?;
    let last = all.len() - 1;
    let kept: Vec<[f64; 12]> =
        all.into_iter().enumerate().filter(|(k, _)| k % every == 0 || *k == last).map(|(_, r)| r).collect();

    Ok(Report {
        json: json!({
            "inertia": spec.inertia,
            "L0": spec.l0,
            "dt": spec.dt,
            "steps": spec.steps,
            "columns": Trajectory::COLUMNS,
            "rows": kept,
            "checks": checks_json,
        }),
        header: Trajectory::COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: kept.iter().map(|r| r.iter().map(|v| float(*v)).collect()).collect(),
        failures,
    })
}

// property suite

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// Check groups to run (1-8); all when omitted.
    #[arg(long = "group")]
    pub groups: Vec<u8>,
    /// Suite sizes as JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

pub fn property_suite(args: &SuiteArgs, common: &Common) -> Result<Report> {
    let spec = match &args.input {
        Some(path) => input::read::<SuiteSpec>(path)?,
        None => SuiteSpec::default(),
    };
    let mut cfg = SuiteConfig { seed: common.seed, ..SuiteConfig::default() };
    let set = |slot: &mut usize, v: Option<usize>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut cfg.triples, spec.triples);
    set(&mut cfg.vector_pairs, spec.vector_pairs);
    set(&mut cfg.hamiltonians, spec.hamiltonians);
    set(&mut cfg.grid, spec.grid);
    set(&mut cfg.symplectic_samples, spec.symplectic_samples);
    let mut groups =
        if !args.groups.is_empty() { args.groups.clone() } else { spec.groups.unwrap_or_else(|| GROUPS.to_vec()) };
    groups.sort_unstable();
    groups.dedup();

    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for id in groups {
        let mut r = run_group(id, &cfg)?;
        r.scale_limits(common.tol);
        for m in &r.measurements {
            rows.push(vec![
                r.id.to_string(),
                r.title.clone(),
                m.name.clone(),
                float(m.value),
                float(m.limit),
                m.passed().to_string(),
            ]);
            if !m.passed() {
                failures.push(Failure::new(format!("group {}: {}", r.id, m.name), m.value, m.limit));
            }
        }
        let mut v = serde_json::to_value(&r).expect("serializable");
        v["passed"] = json!(r.passed());
        reports.push(v);
    }
    Ok(Report {
        json: json!({ "seed": cfg.seed, "tol": common.tol, "groups": reports }),
        header: ["group", "title", "check", "value", "limit", "passed"].map(String::from).to_vec(),
        rows,
        failures,
    })
}
