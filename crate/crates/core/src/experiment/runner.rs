//! Executes one configured experiment and collects its report.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::config::{ConfigError, Experiment, ExperimentConfig, MAX_GRID_POINTS};
use super::report::{Criterion, ExperimentReport};
use super::scan::{
    consistency_residual, convergence_order, gaussian_probes, hermite_probes, interval_expectation, is_commensurate,
    linear_fit, periodic_expectation, plane_wave_probes, richardson, GaussianProbe,
};
use crate::canonical::{
    displacement_operator, expected_time_closed_form, heisenberg_rate, kinetic_operator, momentum_operator,
    time_operator, HeisenbergConvention, ParticleParams,
};
use crate::error::{Error, Result};
use crate::fock::{
    check_jump_inequality, fock_expectation, jump_time_bound, ladder_commutator, momentum_ladder,
    oscillator_eigenfunction, time_ladder, FockSpace,
};
use crate::grid::{expectation, make_uniform_grid, normalize, Grid, PlaneWaveParams, Topology};
use crate::operator::{adjoint, commutator, hermiticity_residual, position, Boundary, LinearOperator};

/// Why a run stopped early: configuration problems are reported to the
/// caller, numeric errors end up in the report.
enum Failure {
    Config(ConfigError),
    Numeric(Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

type Step = std::result::Result<(), Failure>;

/// Runs `config`. An invalid resolved configuration is an `Err`; numeric
/// failures are recorded in the report's `error` field.
pub fn run_experiment(config: &ExperimentConfig) -> std::result::Result<ExperimentReport, ConfigError> {
    let mut report = ExperimentReport::new(config.experiment.name());
    let step = match config.experiment {
        Experiment::Hermiticity => hermiticity(config, &mut report),
        Experiment::Correspondence => correspondence(config, &mut report),
        Experiment::Displacement => displacement(config, &mut report),
        Experiment::HeisenbergFlow => heisenberg_flow(config, &mut report),
        Experiment::FreeParticleDivergence => free_particle_divergence(config, &mut report),
        Experiment::Massless => massless(config, &mut report),
        Experiment::NegativeMass => negative_mass(config, &mut report),
        Experiment::OscillatorExpectation => oscillator_expectation(config, &mut report),
        Experiment::JumpTime => jump_time(config, &mut report),
        Experiment::ConvergenceStudy => convergence_study(config, &mut report),
    };
    match step {
        Ok(()) => Ok(report),
        Err(Failure::Config(e)) => Err(e),
        Err(Failure::Numeric(e)) => {
            report.fail(e.to_string());
            Ok(report)
        }
    }
}

struct Defaults {
    a: f64,
    b: f64,
    n: usize,
    topology: Option<Topology>,
    m: f64,
    p: f64,
}

/// Grid and particle parameters with per-experiment defaults filled in.
/// `topology == None` means the closed interval evaluated with halo cells.
#[derive(Clone, Copy)]
struct Setup {
    a: f64,
    b: f64,
    n: usize,
    topology: Option<Topology>,
    particle: ParticleParams,
}

impl Setup {
    fn resolve(cfg: &ExperimentConfig, d: Defaults) -> std::result::Result<Self, ConfigError> {
        let a = cfg.grid.a.unwrap_or(d.a);
        let b = cfg.grid.b.unwrap_or(d.b);
        if b <= a {
            return Err(ConfigError::Invalid {
                key: if cfg.grid.b.is_some() { "grid.b" } else { "grid.a" }.into(),
                message: format!("need b > a, got a = {a}, b = {b}"),
            });
        }
        let m = cfg.particle.m.unwrap_or(d.m);
        let hbar = cfg.particle.hbar.unwrap_or(1.0);
        let p = match (cfg.particle.p, cfg.particle.v) {
            (Some(p), None) => p,
            (None, Some(v)) => m * v,
            (None, None) => d.p,
            (Some(p), Some(v)) => {
                if (p - m * v).abs() > 1e-12 * p.abs().max(1.0) {
                    return Err(ConfigError::Invalid {
                        key: "particle.v".into(),
                        message: format!("p = {p} disagrees with m v = {}", m * v),
                    });
                }
                p
            }
        };
        let v = match cfg.particle.v {
            Some(v) => v,
            None if m != 0.0 => p / m,
            None => 0.0,
        };
        Ok(Setup {
            a,
            b,
            n: cfg.grid.n.unwrap_or(d.n),
            topology: cfg.grid.topology.or(d.topology),
            particle: ParticleParams { m, p, v, hbar },
        })
    }

    fn length(&self) -> f64 {
        self.b - self.a
    }

    fn wave(&self) -> PlaneWaveParams {
        PlaneWaveParams { hbar: self.particle.hbar, ..PlaneWaveParams::with_momentum(self.particle.p) }
    }

    fn grid(&self, n: usize) -> Result<Grid> {
        make_uniform_grid(self.a, self.b, n, self.topology.unwrap_or(Topology::Closed))
    }

    fn boundary(&self) -> Boundary {
        Boundary::natural(self.topology.unwrap_or(Topology::Closed))
    }

    fn echo(&self, r: &mut ExperimentReport) {
        r.input("grid.a", self.a);
        r.input("grid.b", self.b);
        r.input("grid.n", self.n);
        r.input("grid.topology", self.topology.map_or("closed (halo)", Topology::name));
        r.input("particle.m", self.particle.m);
        r.input("particle.p", self.particle.p);
        r.input("particle.v", self.particle.v);
        r.input("particle.hbar", self.particle.hbar);
    }

    /// Plane-wave expectation over `[a, b]`: exact periodic evaluation when
    /// the wave fits the period, halo evaluation on the closed interval otherwise.
    fn plane_wave_expectation<F>(&self, n: usize, build: F) -> std::result::Result<(C64, f64), Failure>
    where
        F: Fn(&Grid, Boundary) -> Result<LinearOperator>,
    {
        let wave = self.wave();
        match self.topology {
            Some(Topology::Periodic) => {
                if !is_commensurate(self.particle.p, self.length(), self.particle.hbar) {
                    return Err(ConfigError::Invalid {
                        key: "grid.topology".into(),
                        message: format!(
                            "plane wave p = {} does not fit the period {}; use topology = closed",
                            self.particle.p,
                            self.length()
                        ),
                    }
                    .into());
                }
                let t = periodic_expectation(self.a, self.b, n, &wave, build)?;
                Ok((t, self.length() / n as f64))
            }
            _ => {
                let t = interval_expectation(self.a, self.b, n, &wave, build)?;
                Ok((t, self.length() / (n - 1) as f64))
            }
        }
    }
}

fn require_points(key: &str, n: usize) -> std::result::Result<(), ConfigError> {
    if n > MAX_GRID_POINTS {
        return Err(ConfigError::Invalid {
            key: key.into(),
            message: format!("finest grid needs {n} points, above the limit of {MAX_GRID_POINTS}"),
        });
    }
    Ok(())
}

fn tolerance(cfg: &ExperimentConfig, r: &mut ExperimentReport, name: &str, default: f64) -> f64 {
    let t = cfg.tolerance(name, default);
    r.input(&format!("tol.{name}"), t);
    t
}

fn refinement_levels(n: usize, count: usize) -> Vec<usize> {
    (0..count).map(|k| n << k).collect()
}

#[derive(Debug, Clone, Copy)]
enum Named {
    Time,
    Momentum,
    Kinetic,
    Displacement,
}

impl Named {
    const ALL: [Named; 4] = [Named::Time, Named::Momentum, Named::Kinetic, Named::Displacement];

    fn name(self) -> &'static str {
        match self {
            Named::Time => "time",
            Named::Momentum => "momentum",
            Named::Kinetic => "kinetic",
            Named::Displacement => "displacement",
        }
    }

    fn build(self, grid: &Grid, bc: Boundary, params: &ParticleParams) -> Result<LinearOperator> {
        match self {
            Named::Time => time_operator(grid, bc, params),
            Named::Momentum => momentum_operator(grid, bc, params),
            Named::Kinetic => kinetic_operator(grid, bc, params),
            Named::Displacement => displacement_operator(grid, bc, params),
        }
    }

    /// The continuum operator applied to a Gaussian probe.
    fn continuum(self, probe: &GaussianProbe, x: f64, params: &ParticleParams) -> C64 {
        let ParticleParams { m, p, hbar, .. } = *params;
        match self {
            Named::Time => C64::new(0.0, -hbar * m / (p * p)) * probe.derivative(x),
            Named::Momentum => C64::new(0.0, -hbar) * probe.derivative(x),
            Named::Kinetic => -(hbar * hbar / (2.0 * m)) * probe.second_derivative(x),
            Named::Displacement => -(hbar * hbar / (p * p)) * probe.second_derivative(x),
        }
    }
}

fn hermiticity(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let s = Setup::resolve(cfg, Defaults { a: 0.0, b: 4.0, n: 256, topology: None, m: 1.0, p: 2.0 })?;
    require_points("grid.n", 2 * s.n)?;
    s.echo(r);
    let tol_periodic = tolerance(cfg, r, "periodic_residual", 1e-12);
    let tol_closed = tolerance(cfg, r, "closed_residual", 1e-2);
    let tol_ratio = tolerance(cfg, r, "refinement_ratio", 0.5);
    let params = &s.particle;

    let periodic = make_uniform_grid(s.a, s.b, s.n, Topology::Periodic)?;
    let mut probes = plane_wave_probes(&periodic, params.hbar)?;
    probes.extend(gaussian_probes(&periodic).iter().map(|g| g.sample(&periodic)));
    probes.extend(hermite_probes(&periodic, 3)?);
    r.input("probes.periodic", probes.len());
    for named in Named::ALL {
        let op = named.build(&periodic, Boundary::Periodic, params)?;
        let res = hermiticity_residual(&op, &probes)?;
        let scale = op.matrix().max_abs().max(1.0);
        r.check(Criterion::new(
            format!("{} periodic n={} probe residual", named.name(), s.n),
            res.probe,
            0.0,
            "<Af|g> = <f|Ag>",
            res.probe,
            tol_periodic * scale,
        ));
        r.check(Criterion::exact(
            format!("{} periodic max|A - A^+|", named.name()),
            res.matrix,
            0.0,
            "self-adjoint matrix",
        ));
    }

    let coarse = make_uniform_grid(s.a, s.b, s.n, Topology::Closed)?;
    let fine = make_uniform_grid(s.a, s.b, 2 * s.n, Topology::Closed)?;
    let gaussians = gaussian_probes(&coarse);
    for named in Named::ALL {
        let residual = |grid: &Grid| -> Result<f64> {
            let op = named.build(grid, Boundary::DirichletVanishing, params)?;
            consistency_residual(&op, &gaussians, |g, x| named.continuum(g, x, params))
        };
        let rc = residual(&coarse)?;
        let rf = residual(&fine)?;
        for (n, res) in [(s.n, rc), (2 * s.n, rf)] {
            r.check(Criterion::new(
                format!("{} closed n={n} consistency residual", named.name()),
                res,
                0.0,
                "<A_h f|g> = <f|A g> as h -> 0",
                res,
                tol_closed,
            ));
        }
        r.check(Criterion::absolute(
            format!("{} closed residual ratio n={}/{}", named.name(), s.n, 2 * s.n),
            rc / rf,
            4.0,
            "second-order decay",
            tol_ratio,
        ));
        let discrete = hermiticity_residual(
            &named.build(&fine, Boundary::DirichletVanishing, params)?,
            &gaussians.iter().map(|g| g.sample(&fine)).collect::<Vec<_>>(),
        )?;
        r.value(format!("{} closed n={} discrete probe residual", named.name(), 2 * s.n), discrete.probe);
    }
    Ok(())
}

fn correspondence(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let s = Setup::resolve(cfg, Defaults { a: 0.0, b: 4.0, n: 512, topology: None, m: 1.0, p: 2.0 })?;
    let count = cfg.scan.refinements.unwrap_or(3);
    let levels = refinement_levels(s.n, count);
    require_points("scan.refinements", levels[count - 1])?;
    s.echo(r);
    r.input("scan.refinements", count);
    let tol_err = tolerance(cfg, r, "expectation_error", 1e-3);
    let tol_order = tolerance(cfg, r, "convergence_order", 0.2);

    let reference = expected_time_closed_form(&s.particle, s.a, s.b)?;
    let params = s.particle;
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    for &n in &levels {
        let (t, h) = s.plane_wave_expectation(n, |g, bc| time_operator(g, bc, &params))?;
        r.check(Criterion::absolute(format!("<t> n={n}"), t.re, reference, "m(b-a)/p", tol_err));
        r.check(Criterion::absolute(format!("Im <t> n={n}"), t.im, 0.0, "real expectation", tol_err));
        r.value(format!("h n={n}"), h);
        hs.push(h);
        errs.push((t.re - reference).abs());
    }
    r.check(Criterion::absolute(
        "convergence order of <t>",
        convergence_order(&hs, &errs),
        2.0,
        "second-order central stencil",
        tol_order,
    ));
    Ok(())
}

fn displacement(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let d = Defaults { a: 0.0, b: 1.0, n: 256, topology: Some(Topology::Periodic), m: 1.0, p: 2.0 * PI };
    let s = Setup::resolve(cfg, d)?;
    let levels = refinement_levels(s.n, 2);
    require_points("grid.n", levels[1])?;
    s.echo(r);
    let tol_err = tolerance(cfg, r, "expectation_error", 1e-3);
    let tol_ratio = tolerance(cfg, r, "refinement_ratio", 0.5);

    let params = s.particle;
    let mut errs = Vec::new();
    for &n in &levels {
        let (d, _) = s.plane_wave_expectation(n, |g, bc| displacement_operator(g, bc, &params))?;
        r.check(Criterion::absolute(format!("<D> n={n}"), d.re, s.length(), "b - a", tol_err));
        r.check(Criterion::absolute(format!("Im <D> n={n}"), d.im, 0.0, "real expectation", tol_err));
        errs.push((d.re - s.length()).abs());
    }
    r.check(Criterion::absolute(
        format!("<D> error ratio n={}/{}", levels[0], levels[1]),
        errs[0] / errs[1],
        4.0,
        "second-order decay",
        tol_ratio,
    ));
    Ok(())
}

fn heisenberg_flow(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let d = Defaults { a: 0.0, b: 4.0, n: 256, topology: Some(Topology::Periodic), m: 1.0, p: 2.0 };
    let s = Setup::resolve(cfg, d)?;
    s.echo(r);
    let tol_rate = tolerance(cfg, r, "rate", 1e-12);
    let tol_comm = tolerance(cfg, r, "commutator", 1e-13);
    let tol_ehrenfest = tolerance(cfg, r, "ehrenfest", 1e-10);

    let params = &s.particle;
    let grid = s.grid(s.n)?;
    let bc = s.boundary();
    let t = time_operator(&grid, bc, params)?;
    let h = kinetic_operator(&grid, bc, params)?;
    r.check(Criterion::absolute(
        "max|[t, H]|",
        commutator(&t, &h)?.matrix().max_abs(),
        0.0,
        "commuting stencils",
        tol_comm,
    ));

    let gaussians = gaussian_probes(&grid);
    let mut states = plane_wave_probes(&grid, params.hbar)?;
    states.extend(gaussians[..2].iter().map(|g| g.sample(&grid)));
    for (i, psi) in states.iter().enumerate() {
        for (label, convention) in
            [("standard", HeisenbergConvention::Standard), ("literal", HeisenbergConvention::Literal)]
        {
            let rate = heisenberg_rate(&t, &h, psi, params.hbar, convention)?;
            r.check(Criterion::absolute(
                format!("|d<t>/dt| state {i} {label}"),
                rate.norm(),
                0.0,
                "constant flow of time",
                tol_rate,
            ));
        }
    }

    let psi = normalize(&gaussians[1].sample(&grid))?;
    let x = position(&grid, bc)?;
    let p = momentum_operator(&grid, bc, params)?;
    let ehrenfest = expectation(&p, &psi)?.re / params.m;
    let standard = heisenberg_rate(&x, &h, &psi, params.hbar, HeisenbergConvention::Standard)?;
    let literal = heisenberg_rate(&x, &h, &psi, params.hbar, HeisenbergConvention::Literal)?;
    r.check(Criterion::absolute("d<x>/dt standard", standard.re, ehrenfest, "<p>/m", tol_ehrenfest));
    r.value("d<x>/dt literal", literal.re);
    r.value("<p>/m", ehrenfest);
    Ok(())
}

fn free_particle_divergence(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let s = Setup::resolve(cfg, Defaults { a: 0.0, b: 1.0, n: 33, topology: None, m: 1.0, p: 1.0 })?;
    let doublings = cfg.scan.doublings.unwrap_or(6);
    let base = s.n - 1;
    require_points("scan.doublings", 2 * (base << (doublings - 1)) + 1)?;
    s.echo(r);
    r.input("scan.doublings", doublings);
    let tol_interval = tolerance(cfg, r, "interval_relative", 1e-6);
    let tol_slope = tolerance(cfg, r, "slope_relative", 1e-6);

    let params = s.particle;
    let wave = s.wave();
    let build = |g: &Grid, bc: Boundary| time_operator(g, bc, &params);
    let (mut lengths, mut times) = (Vec::new(), Vec::new());
    for k in 0..doublings {
        let length = s.length() * (1u64 << k) as f64;
        let b = s.a + length;
        let n = (base << k) + 1;
        let coarse = interval_expectation(s.a, b, n, &wave, build)?.re;
        let fine = interval_expectation(s.a, b, 2 * n - 1, &wave, build)?.re;
        let t = richardson(coarse, fine);
        let reference = expected_time_closed_form(&params, s.a, b)?;
        r.value(format!("<t> raw L={length}"), coarse);
        r.check(Criterion::relative(format!("<t> L={length}"), t, reference, "m(b-a)/p", tol_interval));
        lengths.push(length);
        times.push(t);
    }
    let stalls = times.windows(2).filter(|w| w[1].abs() <= w[0].abs()).count();
    r.check(Criterion::exact("non-increasing steps of |<t>|", stalls as f64, 0.0, "unbounded growth"));
    let (slope, _) = linear_fit(&lengths, &times);
    r.check(Criterion::relative("slope d<t>/dL", slope, params.m / params.p, "m/p", tol_slope));
    Ok(())
}

fn massless(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let d = Defaults { a: 0.0, b: 4.0, n: 256, topology: Some(Topology::Periodic), m: 0.0, p: 1.0 };
    let s = Setup::resolve(cfg, d)?;
    s.echo(r);
    let params = &s.particle;
    let grid = s.grid(s.n)?;
    let t = time_operator(&grid, s.boundary(), params)?;
    r.check(Criterion::exact("max|t_ij|", t.matrix().max_abs(), 0.0, "zero operator"));
    let wave = crate::grid::sample_plane_wave(&grid, &s.wave())?;
    r.check(Criterion::exact("|<t>| plane wave", expectation(&t, &wave)?.norm(), 0.0, "m(b-a)/p"));
    for (i, g) in gaussian_probes(&grid).iter().enumerate() {
        let psi = g.sample(&grid);
        r.check(Criterion::exact(format!("|<t>| gaussian {i}"), expectation(&t, &psi)?.norm(), 0.0, "zero operator"));
    }
    let closed = expected_time_closed_form(params, s.a, s.b)?;
    r.check(Criterion::exact("m(b-a)/p", closed, 0.0, "m = 0"));
    Ok(())
}

const SIGN_MASSES: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
const SIGN_VELOCITIES: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];

fn negative_mass(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let s = Setup::resolve(cfg, Defaults { a: 0.0, b: 4.0, n: 512, topology: None, m: -1.0, p: -1.0 })?;
    s.echo(r);
    let tol_closed = tolerance(cfg, r, "closed_form_relative", 1e-14);
    let tol_err = tolerance(cfg, r, "expectation_error", 1e-3);
    let v = if s.particle.v > 0.0 { s.particle.v } else { 1.0 };
    let length = s.length();

    for m in SIGN_MASSES {
        for v in SIGN_VELOCITIES {
            let t = expected_time_closed_form(&ParticleParams::from_velocity(m, v), s.a, s.b)?;
            r.check(Criterion::exact(
                format!("sign m(b-a)/p m={m} v={v}"),
                t.signum(),
                v.signum() * length.signum(),
                "sign(v) sign(b-a)",
            ));
            r.check(Criterion::relative(format!("m(b-a)/p m={m} v={v}"), t, length / v, "(b-a)/v", tol_closed));
        }
    }
    for m in SIGN_MASSES.into_iter().filter(|m| *m < 0.0) {
        let shifted =
            Setup { particle: ParticleParams { hbar: s.particle.hbar, ..ParticleParams::from_velocity(m, v) }, ..s };
        let params = shifted.particle;
        let (t, _) = shifted.plane_wave_expectation(s.n, |g, bc| time_operator(g, bc, &params))?;
        r.check(Criterion::absolute(format!("<t> m={m} v={v}"), t.re, length / v, "(b-a)/v", tol_err));
    }
    Ok(())
}

fn oscillator_expectation(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let d = Defaults { a: -12.0, b: 12.0, n: 2048, topology: None, m: 1.0, p: 1.0 };
    let s = Setup::resolve(cfg, d)?;
    let dim = cfg.fock.dim.unwrap_or(32);
    let omega = cfg.fock.omega.unwrap_or(1.0);
    let p_eff = cfg.fock.p_eff.unwrap_or(1.0);
    s.echo(r);
    r.input("fock.dim", dim);
    r.input("fock.omega", omega);
    r.input("fock.p_eff", p_eff);
    let tol_cross = tolerance(cfg, r, "cross_check", 1e-8);

    let space = FockSpace::new(dim, omega, s.particle.m, s.particle.hbar, p_eff)?;
    let t = time_ladder(&space)?;
    let alpha = space.alpha()?;
    r.value("Re alpha", alpha.re);
    r.value("Im alpha", alpha.im);
    for n in 0..=space.max_admissible() {
        let e = fock_expectation(&t, n, &space)?;
        r.check(Criterion::exact(format!("|<{n}|t|{n}>|"), e.norm(), 0.0, "orthogonality of |n> and |n+-1>"));
    }
    let herm = t.matrix().sub(adjoint(&t).matrix()).max_abs();
    r.check(Criterion::exact("max|t - t^+| ladder", herm, 0.0, "Hermitian"));

    let c = ladder_commutator(&space);
    let last = dim - 1;
    let mut block = 0.0_f64;
    let mut edge = 0.0_f64;
    for (i, row) in (0..dim).map(|i| (i, c.matrix().row(i))) {
        for (j, v) in row.iter().enumerate() {
            if i < last && j < last {
                let delta = if i == j { 1.0 } else { 0.0 };
                block = block.max((v - delta).norm());
            } else if i != j {
                edge = edge.max(v.norm());
            }
        }
    }
    r.check(Criterion::exact("max|[a, a+] - 1| leading block", block, 0.0, "canonical commutation"));
    r.check(Criterion::exact("max|[a, a+]| off-diagonal edge", edge, 0.0, "truncation touches the diagonal only"));
    r.check(Criterion::exact("[a, a+] last diagonal", c.matrix()[(last, last)].re, 1.0 - dim as f64, "1 - dim"));

    let grid = s.grid(s.n)?;
    let p_grid = momentum_operator(&grid, s.boundary(), &s.particle)?;
    let p_fock = momentum_ladder(&space)?;
    for n in 0..=space.max_admissible().min(5) {
        let psi = oscillator_eigenfunction(n, &grid, &space)?;
        let on_grid = expectation(&p_grid, &psi)?;
        let on_fock = fock_expectation(&p_fock, n, &space)?;
        r.check(Criterion::new(
            format!("grid <p> psi_{n}"),
            on_grid.norm(),
            on_fock.norm(),
            "ladder-basis <n|p|n>",
            (on_grid - on_fock).norm(),
            tol_cross,
        ));
    }
    Ok(())
}

fn jump_time(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let omega = cfg.fock.omega.unwrap_or(1.0);
    let hbar = cfg.particle.hbar.unwrap_or(1.0);
    r.input("fock.omega", omega);
    r.input("particle.hbar", hbar);

    r.check(Criterion::exact("dt_min dE=1 hbar=1", jump_time_bound(1.0, 1.0)?, 0.5, "hbar/(2 dE)"));
    let delta_e = hbar * omega;
    let bound = jump_time_bound(delta_e, hbar)?;
    r.value("dE = hbar omega", delta_e);
    r.value("dt_min", bound);
    r.check(Criterion::new(
        "dE dt_min - hbar/2",
        delta_e * bound,
        hbar / 2.0,
        "hbar/2",
        (delta_e * bound - hbar / 2.0).abs(),
        4.0 * f64::EPSILON * hbar,
    ));
    for dt in [bound, 1e-12, 1e-6, 1.0, 1e6, 1e12] {
        for fraction in [0.0, 0.5, 1.0, 1.5] {
            let tau = fraction * dt;
            let check = check_jump_inequality(tau, dt)?;
            let expected = if fraction <= 1.0 { 1.0 } else { 0.0 };
            r.check(Criterion::exact(
                format!("tau_J <= dt tau_J={tau:e} dt={dt:e}"),
                if check.satisfied { 1.0 } else { 0.0 },
                expected,
                "tau_J <= dt",
            ));
        }
    }
    Ok(())
}

fn convergence_study(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Step {
    let s = Setup::resolve(cfg, Defaults { a: 0.0, b: 4.0, n: 64, topology: None, m: 1.0, p: 2.0 })?;
    let count = cfg.scan.refinements.unwrap_or(4);
    let levels = refinement_levels(s.n, count);
    require_points("scan.refinements", levels[count - 1])?;
    s.echo(r);
    r.input("scan.refinements", count);
    let tol_order = tolerance(cfg, r, "convergence_order", 0.2);

    let params = s.particle;
    let reference = expected_time_closed_form(&params, s.a, s.b)?;
    let gaussians = gaussian_probes(&make_uniform_grid(s.a, s.b, s.n, Topology::Closed)?);
    let (mut hs, mut errs, mut herm) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &levels {
        let (t, h) = s.plane_wave_expectation(n, |g, bc| time_operator(g, bc, &params))?;
        let x = params.p * h / params.hbar;
        // |sin x / x - 1| <= x^2 / 6 bounds the stencil symbol error.
        r.check(Criterion::new(
            format!("<t> error n={n}"),
            t.re,
            reference,
            "m(b-a)/p",
            (t.re - reference).abs(),
            reference.abs() * x * x / 6.0,
        ));
        let grid = make_uniform_grid(s.a, s.b, n, Topology::Closed)?;
        let op = time_operator(&grid, Boundary::DirichletVanishing, &params)?;
        let res = consistency_residual(&op, &gaussians, |g, x| Named::Time.continuum(g, x, &params))?;
        r.value(format!("h n={n}"), h);
        r.value(format!("time closed consistency residual n={n}"), res);
        hs.push(h);
        errs.push((t.re - reference).abs());
        herm.push((grid.h(), res));
    }
    r.check(Criterion::absolute(
        "convergence order <t>",
        convergence_order(&hs, &errs),
        2.0,
        "second order",
        tol_order,
    ));
    let (hh, rr): (Vec<f64>, Vec<f64>) = herm.into_iter().unzip();
    r.check(Criterion::absolute(
        "convergence order hermiticity residual",
        convergence_order(&hh, &rr),
        2.0,
        "second order",
        tol_order,
    ));
    Ok(())
}
