//! One function per subcommand. Each runs on the configured metric and grids,
//! writes its artifacts and records checks against the library tolerances.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use serde_json::json;
use sm_tomo::fixtures::{boundary_potentials, p_poly, random_fan, random_sm, random_tensor, rot_bump, Fixture};
use sm_tomo::geometry::{check_simplicity, make_metric, TraceOptions};
use sm_tomo::grid::DiskGrid;
use sm_tomo::io::{write_fan_csv, write_flux_csv, write_history_csv, write_tensor_csv};
use sm_tomo::reconstruct::{construct_first_integral, degree_energy_fraction, reconstruct_from_data, SolveOptions};
use sm_tomo::sm::{
    apply_eta, apply_x, apply_xpm, fiber_fourier, harmonic_project, inner_product_sm, norm_sm, santalo_check,
    signed_degree, Sign, SmField,
};
use sm_tomo::tensor::{
    boundary_flux, divergence, ell_m, norm_tensor, solenoidal_decompose, solenoidal_extension_m1, sym_derivative,
    DecomposeOptions, Decomposer, ExtensionOptions, SymTensorField,
};
use sm_tomo::tolerances as tol;
use sm_tomo::transform::{inner_product_mu, norm_mu, FanBeamData, FanBeamGrid, RayTransform};
use sm_tomo::{Grid, Metric, Tensor, Transform};

use crate::config::Config;
use crate::error::CliError;
use crate::output::{above, below, Output};

type Res = Result<(), CliError>;

pub const COMMANDS: [&str; 10] = [
    "simplicity",
    "santalo",
    "adjoint-check",
    "kernel-check",
    "decompose",
    "extend-m1",
    "harmonics",
    "reconstruct",
    "first-integral",
    "emit-fixture",
];

/// Metric, grids and a lazily traced transform built from a validated config.
pub struct Ctx {
    pub config: Config,
    pub metric: Metric,
    pub grid: Arc<Grid>,
    pub fan: FanBeamGrid,
    transform: OnceLock<Transform>,
}

impl Ctx {
    pub fn new(config: Config) -> Result<Self, CliError> {
        let metric = make_metric(config.metric)?;
        let grid = Arc::new(DiskGrid::new(config.grid.nx)?);
        let fan = FanBeamGrid::new(config.grid.nbeta, config.grid.nalpha)?;
        Ok(Ctx { config, metric, grid, fan, transform: OnceLock::new() })
    }

    pub fn ntheta(&self) -> usize {
        self.config.grid.ntheta
    }

    pub fn seed(&self) -> u64 {
        self.config.experiment.seed
    }

    pub fn rank(&self) -> usize {
        self.config.experiment.rank
    }

    pub fn transform(&self) -> Result<&Transform, CliError> {
        if let Some(t) = self.transform.get() {
            return Ok(t);
        }
        let opts = TraceOptions::with_step(self.config.solver.ray_step);
        let t = RayTransform::new(self.metric, self.grid.clone(), self.ntheta(), self.fan, opts)?;
        Ok(self.transform.get_or_init(|| t))
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions { tol: self.config.solver.cg_tol, max_iter: self.config.solver.max_iter, ..SolveOptions::default() }
    }

    fn flat(&self) -> bool {
        self.metric.is_flat()
    }
}

pub fn run(name: &str, ctx: &Ctx, out: &mut Output, fixture: Option<&str>) -> Res {
    match name {
        "simplicity" => simplicity(ctx, out),
        "santalo" => santalo(ctx, out),
        "adjoint-check" => adjoint(ctx, out),
        "kernel-check" => kernel(ctx, out),
        "decompose" => decompose(ctx, out),
        "extend-m1" => extend_m1(ctx, out),
        "harmonics" => harmonics(ctx, out),
        "reconstruct" => reconstruct(ctx, out),
        "first-integral" => first_integral(ctx, out),
        "emit-fixture" => emit_fixture(ctx, out, fixture.unwrap_or(&ctx.config.experiment.fixture)),
        other => Err(CliError::Config(format!("unknown experiment `{other}` (expected one of {})", COMMANDS.join(", ")))),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        a / b
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn simplicity(ctx: &Ctx, out: &mut Output) -> Res {
    let r = check_simplicity(&ctx.metric);
    out.json("simplicity.json", &r)?;
    out.csv("witnesses.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["check", "beta", "alpha", "value"])?;
        for wt in &r.witnesses {
            let check = serde_json::to_value(wt.check).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            c.write_record([check, wt.beta.to_string(), wt.alpha.to_string(), wt.value.to_string()])?;
        }
        c.flush()?;
        Ok(())
    })?;
    out.check(above("non-trapping", flag(r.non_trapping), 1.0));
    out.check(above("no conjugate points", flag(r.no_conjugate_points), 1.0));
    out.check(above("convex boundary", flag(r.convex_boundary), 1.0));
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}

fn santalo(ctx: &Ctx, out: &mut Output) -> Res {
    let rt = ctx.transform()?;
    let nt = ctx.ntheta();
    let one = SmField::from_fn(ctx.grid.clone(), nt, |_, _, _| 1.0)?;
    let r1 = santalo_check(rt, &one)?;
    let f = random_sm(ctx.grid.clone(), nt, ctx.seed())?;
    let rf = santalo_check(rt, &f)?;
    out.json("santalo.json", &json!({ "constant": r1, "random": rf }))?;
    out.csv("chords.csv", |w| write_fan_csv(&rt.forward_i(&one)?, w))?;
    let limit = if ctx.flat() { tol::SANTALO_FLAT } else { tol::SANTALO_BUMP };
    if ctx.flat() {
        let want = 2.0 * PI * PI;
        out.check(below("f=1 lhs vs 2pi^2", (r1.lhs - want).abs() / want, tol::SANTALO_FLAT));
        out.check(below("f=1 rhs vs 2pi^2", (r1.rhs - want).abs() / want, tol::SANTALO_FLAT));
    } else {
        out.check(below("f=1 lhs vs rhs", r1.rel_err, limit));
    }
    out.check(below("random f lhs vs rhs", rf.rel_err, limit));
    Ok(())
}

fn adjoint(ctx: &Ctx, out: &mut Output) -> Res {
    let rt = ctx.transform()?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for i in 0..5u64 {
        let f = random_sm(ctx.grid.clone(), ctx.ntheta(), ctx.seed() + 100 + i)?;
        let phi = random_fan(ctx.fan, ctx.seed() + 200 + i);
        let lhs = inner_product_mu(&rt.forward_i(&f)?, &phi)?;
        let rhs = inner_product_sm(&ctx.metric, &f, &rt.backproject(&phi)?)?;
        let err = (lhs - rhs).abs() / (norm_sm(&ctx.metric, &f) * norm_mu(&phi));
        worst = worst.max(err);
        rows.push((i, lhs, rhs, err));
    }
    out.csv("adjoint.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["pair", "lhs", "rhs", "rel_err"])?;
        for (i, l, r, e) in &rows {
            c.write_record([i.to_string(), l.to_string(), r.to_string(), e.to_string()])?;
        }
        c.flush()?;
        Ok(())
    })?;
    out.check(below("worst of 5 pairs", worst, tol::ADJOINT));
    Ok(())
}

fn potential_rank(ctx: &Ctx) -> Result<usize, CliError> {
    match ctx.rank() {
        m @ 1..=2 => Ok(m),
        m => Err(sm_tomo::Error::UnsupportedRank(m).into()),
    }
}

fn kernel(ctx: &Ctx, out: &mut Output) -> Res {
    let m = potential_rank(ctx)?;
    let rt = ctx.transform()?;
    let mut rows = Vec::new();
    for (name, p) in boundary_potentials(ctx.grid.clone(), m - 1)? {
        let dp = sym_derivative(&ctx.metric, &p)?;
        let data = rt.forward_im(&dp)?;
        let sup = dp.sup_norm(&ctx.metric);
        let ratio = data.max_abs() / sup;
        out.check(below(format!("m={m} {name} sup|I dp| / sup|dp|"), ratio, tol::KERNEL));
        out.csv(&format!("kernel_{name}.csv"), |w| write_fan_csv(&data, w))?;
        rows.push(json!({ "potential": name, "sup_transform": data.max_abs(), "sup_dp": sup, "ratio": ratio }));
    }
    out.json("kernel.json", &json!({ "rank": m, "potentials": rows }))?;
    Ok(())
}

fn decompose(ctx: &Ctx, out: &mut Output) -> Res {
    let m = potential_rank(ctx)?;
    let g = ctx.grid.clone();
    // Known potential plus a field that is solenoidal on every conformal disk.
    let (p, w) = if m == 1 {
        (
            SymTensorField::from_fn(g.clone(), 0, |x, y| [(1.0 - x * x - y * y) * (1.0 + 0.5 * x), 0.0, 0.0])?,
            SymTensorField::from_fn(g.clone(), 1, |x, y| [1.0 + y * y, 1.0 + x * x, 0.0])?,
        )
    } else {
        (
            SymTensorField::from_fn(g.clone(), 1, |x, y| {
                let q = 1.0 - x * x - y * y;
                [q * (x + 0.3), q * (y * y - 0.2 * x), 0.0]
            })?,
            SymTensorField::from_fn(g.clone(), 2, |x, y| [x * x - y * y, -2.0 * x * y, y * y - x * x])?,
        )
    };
    let v = sym_derivative(&ctx.metric, &p)?.add(&w)?;
    let dec = Decomposer::new(&ctx.metric, g.clone(), m)?;
    let opts = DecomposeOptions::default();
    let pair = dec.decompose(&v, &opts)?;
    let perr = norm_tensor(&ctx.metric, &pair.p.sub(&p)?) / norm_tensor(&ctx.metric, &p);
    let again = dec.decompose(&pair.v_s, &opts)?;
    let idem = norm_tensor(&ctx.metric, &again.p) / norm_tensor(&ctx.metric, &pair.v_s);
    let random = solenoidal_decompose(&ctx.metric, &random_tensor(g, m, ctx.seed())?, &opts)?;
    out.csv("v.csv", |wr| write_tensor_csv(&v, wr))?;
    out.csv("v_s.csv", |wr| write_tensor_csv(&pair.v_s, wr))?;
    out.csv("p.csv", |wr| write_tensor_csv(&pair.p, wr))?;
    out.json(
        "decompose.json",
        &json!({
            "rank": m,
            "constructed": pair.residuals,
            "potential_error": perr,
            "idempotence": idem,
            "random": random.residuals,
        }),
    )?;
    out.check(below("potential error", perr, tol::DECOMPOSE_POTENTIAL));
    out.check(below("|delta v_s|", pair.residuals.div_norm, tol::DECOMPOSE_DIVERGENCE));
    out.check(below("recomposition", pair.residuals.recomposition_norm, tol::DECOMPOSE_RECOMPOSITION));
    out.check(below("idempotence |p|/|v|", idem, tol::DECOMPOSE_SOLVER));
    out.check(below("random |delta v_s|", random.residuals.div_norm, tol::DECOMPOSE_DIVERGENCE));
    out.check(below("random recomposition", random.residuals.recomposition_norm, tol::DECOMPOSE_RECOMPOSITION));
    Ok(())
}

fn extend_m1(ctx: &Ctx, out: &mut Output) -> Res {
    let g = ctx.grid.clone();
    let opts = ExtensionOptions::default();
    let fields = [
        ("constant", SymTensorField::from_fn(g.clone(), 1, |_, _| [0.0, 1.0, 0.0])?),
        ("quadratic", SymTensorField::from_fn(g.clone(), 1, |x, y| [1.0 + y * y, 1.0 + x * x, 0.0])?),
        ("rotation_bump", rot_bump(g)?),
    ];
    let mut rows = Vec::new();
    for (label, u) in fields {
        let div = norm_tensor(&ctx.metric, &divergence(&ctx.metric, &u)?) / norm_tensor(&ctx.metric, &u);
        out.csv(&format!("flux_{label}.csv"), |w| write_flux_csv(&boundary_flux(&u, opts.nbeta)?, w))?;
        let ext = solenoidal_extension_m1(&ctx.metric, &u, &opts)?;
        let weak = ext.weak_divergence_residual();
        out.check(below(format!("{label} weak divergence residual"), weak, tol::EXTENSION_WEAK));
        let mut row = json!({ "field": label, "divergence": div, "net_flux": ext.net_flux, "weak_residual": weak });
        if label == "constant" {
            // u = (0, 1) has normal flux sin(phi); the annulus solution separates.
            let r2 = opts.radius * opts.radius;
            let (a, b) = (-1.0 / (r2 - 1.0), -r2 / (r2 - 1.0));
            let (mut err, mut scale): (f64, f64) = (0.0, 0.0);
            for i in 0..64 {
                for j in 0..=16 {
                    let r = 1.0 + (opts.radius - 1.0) * j as f64 / 16.0;
                    let phi = 2.0 * PI * i as f64 / 64.0;
                    let want = (a * r + b / r) * phi.sin();
                    err = err.max((ext.outer.value(r * phi.cos(), r * phi.sin()) - want).abs());
                    scale = scale.max(want.abs());
                }
            }
            out.check(below("separated annulus solution", err / scale, tol::EXTENSION_CLOSED_FORM));
            row["closed_form_error"] = json!(err / scale);
        }
        rows.push(row);
    }
    out.json("extension.json", &json!({ "radius": opts.radius, "fields": rows }))?;
    Ok(())
}

/// Solenoidal on every conformal disk: a radial bump times the rotation, and
/// the trace-free tensor whose entries are the parts of `z^2`.
fn solenoidal_fixture(grid: Arc<Grid>, m: usize) -> Result<Tensor, CliError> {
    Ok(match m {
        0 => sm_tomo::fixtures::gauss(grid, 0.4)?,
        1 => rot_bump(grid)?,
        _ => SymTensorField::from_fn(grid, 2, |x, y| [x * x - y * y, -2.0 * x * y, y * y - x * x])?,
    })
}

fn harmonics(ctx: &Ctx, out: &mut Output) -> Res {
    let (metric, grid, nt) = (&ctx.metric, ctx.grid.clone(), ctx.ntheta());
    let mut report = serde_json::Map::new();

    let mut shift: f64 = 0.0;
    for k in [0isize, 1, 3] {
        let f = SmField::from_fn(grid.clone(), nt, |x, y, th| {
            Complex::from_polar(1.0, k as f64 * th) * ((x - 0.1) * (x - 0.1) + 0.5 * y).exp()
        })?;
        for (sign, s) in [(Sign::Plus, 1), (Sign::Minus, -1)] {
            let e = fiber_fourier(&apply_eta(metric, &f, sign)).energy_by_bin();
            let total: f64 = e.iter().sum();
            let off: f64 = e.iter().enumerate().filter(|(j, _)| signed_degree(*j, nt) != k + s).map(|(_, v)| v).sum();
            shift = shift.max(off / total);
        }
    }
    out.check(below("eta degree shift leakage", shift, tol::DEGREE_SHIFT));
    report.insert("degree_shift".into(), json!(shift));

    // Compactly supported so the adjoint identity has no boundary term.
    let b0 = |x: f64, y: f64| {
        let r2 = x * x + y * y;
        if r2 < 0.64 {
            (-1.0 / (0.64 - r2)).exp() * (1.0 + x)
        } else {
            0.0
        }
    };
    let mut adj: f64 = 0.0;
    for m in 0..3usize {
        let a = SmField::from_fn(grid.clone(), nt, |x, y, th| b0(x, y) * (m as f64 * th).cos() + b0(y, x) * (m as f64 * th).sin())?;
        let b = SmField::from_fn(grid.clone(), nt, |x, y, th| {
            b0(x - 0.1, y) * ((m + 1) as f64 * th).sin() + y * b0(y, x) * ((m + 1) as f64 * th).cos()
        })?;
        let a = harmonic_project(&a, m)?;
        let b = harmonic_project(&b, m + 1)?;
        let xa = apply_xpm(metric, &a, Sign::Plus)?;
        let xb = apply_xpm(metric, &b, Sign::Minus)?;
        let lhs = inner_product_sm(metric, &xa.field, &b.field)? + inner_product_sm(metric, &a.field, &xb.field)?;
        adj = adj.max(lhs.abs() / (norm_sm(metric, &a.field) * norm_sm(metric, &b.field)));
    }
    out.check(below("<X+ a, b> + <a, X- b>", adj, tol::GK_ADJOINT));
    report.insert("gk_adjoint".into(), json!(adj));

    let c = harmonic_project(&random_sm(grid.clone(), nt, ctx.seed())?, 0)?;
    let z = apply_xpm(metric, &c, Sign::Minus)?.field.max_abs();
    out.check(below("X- on degree 0, max abs", z, 0.0));
    report.insert("x_minus_degree0".into(), json!(z));

    if ctx.flat() {
        let f = SmField::from_fn(grid.clone(), nt, |x, _, th| Complex::from_polar(1.0, th) * x)?;
        let e = apply_eta(metric, &f, Sign::Plus);
        let mut worst: f64 = 0.0;
        for n in grid.inside_nodes() {
            for k in 0..nt {
                worst = worst.max((e.at(n, k) - Complex::from_polar(0.5, 2.0 * f.theta(k))).norm());
            }
        }
        out.check(below("eta+(x1 e^it) = e^2it/2", worst, tol::ETA_FLAT));
        report.insert("eta_flat".into(), json!(worst));
    }

    for m in 1..=2 {
        let v = solenoidal_fixture(grid.clone(), m)?;
        let xf = apply_x(metric, &ell_m(metric, &v, nt)?);
        let leak = degree_energy_fraction(&xf, |k| k < m).sqrt();
        out.check(below(format!("m={m} low-degree leakage of X l(v_s)"), leak, tol::LEAKAGE));
        report.insert(format!("leakage_m{m}"), json!(leak));
    }

    // (X l_1 dp)_0 is half the Laplace-Beltrami operator: -2 e^(-2 lambda) for p = 1 - r^2.
    let p = p_poly(grid.clone())?;
    let f = ell_m(metric, &sym_derivative(metric, &p)?, nt)?;
    let avg = harmonic_project(&apply_x(metric, &f), 0)?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for n in grid.inside_nodes() {
        let (x, y) = grid.xy(n);
        let want = -2.0 * (-2.0 * metric.lambda(x, y)).exp();
        let got = avg.field.at(n, 0);
        worst = worst.max((got - want).abs());
        rows.push((x, y, got, want));
    }
    out.check(below("(X l_1 dp)_0 max abs error", worst, tol::FIBER_AVERAGE));
    report.insert("fiber_average".into(), json!(worst));
    out.csv("fiber_average.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["x1", "x2", "value", "expected"])?;
        for (x, y, g, e) in &rows {
            c.write_record([x.to_string(), y.to_string(), g.to_string(), e.to_string()])?;
        }
        c.flush()?;
        Ok(())
    })?;
    out.json("harmonics.json", &report)?;
    Ok(())
}

fn reconstruct(ctx: &Ctx, out: &mut Output) -> Res {
    let m = ctx.rank();
    let rt = ctx.transform()?;
    let g = ctx.grid.clone();
    let opts = ctx.solve_options();
    let v = match m {
        0 => SymTensorField::from_fn(g.clone(), 0, |x, y| [(-((x - 0.2).powi(2) + y * y) / 0.18).exp(), 0.0, 0.0])?,
        1 => rot_bump(g.clone())?,
        _ => solenoidal_decompose(&ctx.metric, &random_tensor(g.clone(), 2, ctx.seed())?, &DecomposeOptions::default())?.v_s,
    };
    let data = rt.forward_im(&v)?;
    let rep = reconstruct_from_data(rt, &data, m, &opts)?;
    let vhat = rep.tensor().expect("tensor solve");
    let err = norm_tensor(&ctx.metric, &vhat.sub(&v)?) / norm_tensor(&ctx.metric, &v);
    out.csv("data.csv", |w| write_fan_csv(&data, w))?;
    out.csv("truth.csv", |w| write_tensor_csv(&v, w))?;
    out.csv("reconstruction.csv", |w| write_tensor_csv(vhat, w))?;
    out.csv("history.csv", |w| write_history_csv(&rep.residual_history, w))?;
    let mut report = json!({ "rank": m, "round_trip_error": err, "solve": rep });
    out.check(below(format!("m={m} round trip"), err, tol::ROUND_TRIP));
    if m >= 1 {
        let (name, p) = boundary_potentials(g, m - 1)?.remove(0);
        let dp = sym_derivative(&ctx.metric, &p)?;
        let prep = reconstruct_from_data(rt, &rt.forward_im(&dp)?, m, &opts)?;
        let ratio = norm_tensor(&ctx.metric, prep.tensor().expect("tensor solve")) / norm_tensor(&ctx.metric, &dp);
        out.check(below(format!("m={m} potential {name} reconstructs to zero"), ratio, tol::POTENTIAL_INVISIBLE));
        report["potential_ratio"] = json!(ratio);
    }
    if rep.stagnated {
        report["warning"] = json!("solver stagnated");
    }
    out.json("reconstruct.json", &report)?;
    Ok(())
}

fn first_integral(ctx: &Ctx, out: &mut Output) -> Res {
    let m = ctx.rank();
    let rt = ctx.transform()?;
    let u = solenoidal_fixture(ctx.grid.clone(), m)?;
    let opts = SolveOptions { max_iter: ctx.config.solver.max_iter, ..SolveOptions::first_integral() };
    let rep = construct_first_integral(rt, &u, &opts)?;
    let f = rep.sm().expect("first integral");
    let moment = sm_tomo::tensor::l_m(&ctx.metric, f, m)?;
    let gap = rep.diagnostic("projection_gap").unwrap_or(f64::NAN);
    let inv = rep.invariance_norm.unwrap_or(f64::NAN);
    let tail = rep.diagnostic("tail_fraction").unwrap_or(0.0);
    out.check(below(format!("m={m} |L_m f - u|/|u|"), gap, tol::FIRST_INTEGRAL_GAP));
    out.check(below(format!("m={m} invariance |X f|/|f|"), inv, tol::INVARIANCE));
    if m == 1 {
        out.check(above("degree >= 3 tail fraction", tail, 1e-3));
    }
    let spectrum = fiber_fourier(f).energy_by_bin();
    let mut by_degree = vec![0.0; nt_half(ctx.ntheta())];
    for (j, e) in spectrum.iter().enumerate() {
        let d = signed_degree(j, ctx.ntheta()).unsigned_abs();
        if d < by_degree.len() {
            by_degree[d] += e;
        }
    }
    let total: f64 = by_degree.iter().sum();
    out.csv("degree_energy.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["degree", "energy_fraction"])?;
        for (d, e) in by_degree.iter().enumerate() {
            c.write_record([d.to_string(), rel(*e, total).to_string()])?;
        }
        c.flush()?;
        Ok(())
    })?;
    out.csv("target.csv", |w| write_tensor_csv(&u, w))?;
    out.csv("moment.csv", |w| write_tensor_csv(&moment, w))?;
    out.csv("history.csv", |w| write_history_csv(&rep.residual_history, w))?;
    out.json("first_integral.json", &json!({ "rank": m, "report": rep }))?;
    Ok(())
}

fn nt_half(nt: usize) -> usize {
    nt / 2 + 1
}

fn emit_fixture(ctx: &Ctx, out: &mut Output, name: &str) -> Res {
    let fixture: Fixture = name.parse()?;
    let u = fixture.build(ctx.grid.clone(), ctx.seed())?;
    let stem = fixture.name().to_ascii_lowercase();
    out.tag("fixture", fixture.name());
    out.tag("rank", fixture.rank());
    if fixture == Fixture::Random {
        out.tag("seed", ctx.seed());
    }
    out.csv(&format!("{stem}.csv"), |w| write_tensor_csv(&u, w))?;
    if fixture.rank() >= 1 {
        let flux = boundary_flux(&u, ctx.config.grid.nbeta)?;
        out.csv(&format!("{stem}_flux.csv"), |w| write_flux_csv(&flux, w))?;
        if fixture == Fixture::Rot {
            let worst = flux.values[0].iter().fold(0.0f64, |a, v| a.max(v.abs()));
            out.check(below("ROT boundary flux max abs", worst, 1e-12));
        }
    }
    if fixture == Fixture::PPoly {
        let c = ctx.grid.side() / 2;
        let v = u.at(ctx.grid.index(c, c))[0];
        out.check(below("P_POLY |p(0) - 1|", (v - 1.0).abs(), 0.0));
    }
    if fixture == Fixture::Random {
        let phi: FanBeamData<f64> = random_fan(ctx.fan, ctx.seed());
        out.csv("random_fan.csv", |w| write_fan_csv(&phi, w))?;
    }
    Ok(())
}
