//! Scenario bodies. Each one fills tables, constants and checks on the report.

use super::{Cell, Op, ScenarioConfig, ScenarioReport, Table};
use crate::cover::layer;
use crate::error::{Error, Result};
use crate::extension::{extend_l1, layer_energy, ExtensionOperator, ScheduleOptions};
use crate::fixtures::{circle_domain, fixture_family, Fixture};
use crate::norms::{besov_seminorm, jn_norm, l1_norm, lip_constant, BesovMethod, FieldFn, JnOptions};
use crate::space::{build_domain, regularity_audit, AuditBounds, AuditOptions, Discretization, DomainSpec, Shape, Support};
use crate::sum;
use crate::trace::{trace_identity_report, TraceReportOptions};
use std::f64::consts::{FRAC_PI_2, TAU};

/// Weierstrass parameters and the partial sums compared.
const WEIERSTRASS_ALPHA: f64 = 0.5;
const WEIERSTRASS_THETA: f64 = 0.25;
const WEIERSTRASS_TERMS: (u32, u32) = (8, 12);

fn domain(cfg: &ScenarioConfig, h: f64) -> Result<Discretization> {
    let tag = cfg
        .shapes
        .first()
        .ok_or_else(|| Error::InvalidSpec("no shape configured".into()))?;
    let spec = DomainSpec::new(Shape::parse(tag, None, None)?, h).with_seed(cfg.seed);
    build_domain(&spec)
}

fn hausdorff_total(disc: &Discretization) -> f64 {
    sum::sum(disc.h_weights().iter().copied())
}

fn fixtures(cfg: &ScenarioConfig) -> Result<Vec<Fixture>> {
    cfg.fixtures.iter().map(|n| Fixture::parse(n)).collect()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

/// Largest over smallest, or 1 when there is at most one value.
fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(0.0, f64::max);
    if v.len() < 2 { 1.0 } else { hi / lo }
}

fn fmt_h(h: f64) -> String {
    format!("h={h}")
}

pub(super) fn besov_extension_bound(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let drift = cfg.tol("drift")?;
    let lin_tol = cfg.tol("linearity")?;
    let const_tol = cfg.tol("constant_energy")?;
    let family = fixture_family(cfg.seed, 20);
    let tracked = fixtures(cfg)?;
    let mut table = Table::new("ratios", &["h", "fixture", "bv_energy", "besov_value", "ratio"]);
    let mut per_mesh = Vec::new();
    let mut tracked_ratios: Vec<Vec<f64>> = vec![Vec::new(); tracked.len()];
    for &h in &cfg.meshes {
        let d = domain(cfg, h)?;
        let op = ExtensionOperator::new(&d)?;
        let mut c: f64 = 0.0;
        let all = family.iter().map(|f| (f, false)).chain(tracked.iter().map(|f| (f, true)));
        let mut t = 0;
        for (fx, is_tracked) in all {
            let f = fx.sample(&d)?;
            let e = op.apply(&f, &d)?;
            let bv = e.bv_energy(&d)?;
            let b = besov_seminorm(&f, &d, 0.0, 1.0, BesovMethod::Dyadic)?.value;
            let ratio = bv / b;
            table.push(vec![h.into(), fx.name().into(), bv.into(), b.into(), ratio.into()]);
            if is_tracked {
                tracked_ratios[t].push(ratio);
                t += 1;
            } else {
                c = c.max(ratio);
            }
        }
        rep.constant(format!("C {}", fmt_h(h)), c);
        per_mesh.push(c);

        // linearity, constants and range on the first two family members
        let f = family[0].sample(&d)?;
        let g = family[1].sample(&d)?;
        let (ef, eg) = (op.apply(&f, &d)?, op.apply(&g, &d)?);
        let ec = op.apply(&f.axpby(2.0, &g, -3.0)?, &d)?;
        let mut lin: f64 = 0.0;
        for i in 0..d.n_interior() {
            let want = 2.0 * ef.values.values()[i] - 3.0 * eg.values.values()[i];
            lin = lin.max((ec.values.values()[i] - want).abs() / want.abs().max(1.0));
        }
        rep.check(format!("linearity {}", fmt_h(h)), lin, Op::Le, lin_tol);
        let one = op.apply(&FieldFn::constant(&d, Support::Boundary, 1.0)?, &d)?;
        rep.check(format!("constant bv_energy {}", fmt_h(h)), one.bv_energy(&d)?, Op::Le, const_tol);
        let over = family
            .iter()
            .map(|fx| {
                let f = fx.sample(&d)?;
                let e = op.apply(&f, &d)?;
                Ok((f.min() - e.values.min()).max(e.values.max() - f.max()))
            })
            .collect::<Result<Vec<f64>>>()?;
        rep.check(format!("range overshoot {}", fmt_h(h)), max_of(over), Op::Le, lin_tol);
    }
    for w in per_mesh.windows(2) {
        rep.check("C drift between meshes", spread(w), Op::Lt, drift);
    }
    for (fx, r) in tracked.iter().zip(&tracked_ratios) {
        rep.check(format!("{} ratio drift", fx.name()), spread(r), Op::Lt, drift);
    }
    rep.tables.push(table);
    Ok(())
}

pub(super) fn layer_estimates(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let drift = cfg.tol("drift")?;
    let const_tol = cfg.tol("constant_energy")?;
    if cfg.sweep.is_empty() || cfg.sweep.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidSpec("layer-estimates needs positive ρ₂ values in sweep".into()));
    }
    let mut table = Table::new(
        "layers",
        &["h", "fixture", "rho2", "gradient", "l1", "gradient_ratio", "l1_ratio"],
    );
    let fxs = fixtures(cfg)?;
    let mut cg: f64 = 0.0;
    let mut cl: f64 = 0.0;
    for &h in &cfg.meshes {
        let d = domain(cfg, h)?;
        let op = ExtensionOperator::new(&d)?;
        let hd = hausdorff_total(&d);
        for fx in &fxs {
            if !fx.is_lipschitz() {
                return Err(Error::InvalidSpec(format!("{} is not a Lipschitz fixture", fx.name())));
            }
            let f = fx.sample(&d)?;
            let e = op.apply(&f, &d)?;
            let lip = lip_constant(&f, &d, None)?;
            let l1 = l1_norm(&f, &d)?;
            let (mut gr, mut lr) = (Vec::new(), Vec::new());
            for &r2 in &cfg.sweep {
                let le = layer_energy(&e, 0.0, r2, &d)?;
                let g = le.gradient / (r2 * hd * lip);
                let l = le.l1 / (r2 * l1);
                table.push(vec![
                    h.into(),
                    fx.name().into(),
                    r2.into(),
                    le.gradient.into(),
                    le.l1.into(),
                    g.into(),
                    l.into(),
                ]);
                gr.push(g);
                lr.push(l);
            }
            cg = cg.max(max_of(gr.iter().copied()));
            cl = cl.max(max_of(lr.iter().copied()));
            let tag = format!("{} {}", fx.name(), fmt_h(h));
            rep.check(format!("gradient ratio spread over rho2 {tag}"), spread(&gr), Op::Lt, drift);
            rep.check(format!("l1 ratio spread over rho2 {tag}"), spread(&lr), Op::Lt, drift);
        }
        let one = op.apply(&FieldFn::constant(&d, Support::Boundary, 1.0)?, &d)?;
        let g = max_of(
            cfg.sweep
                .iter()
                .map(|&r2| layer_energy(&one, 0.0, r2, &d).map(|le| le.gradient))
                .collect::<Result<Vec<_>>>()?,
        );
        rep.check(format!("constant data layer gradient {}", fmt_h(h)), g, Op::Le, const_tol);
    }
    rep.constant("C gradient", cg);
    rep.constant("C l1", cl);
    rep.tables.push(table);
    Ok(())
}

pub(super) fn l1_extension_bound(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let drift = cfg.tol("drift")?;
    let lip_sum_tol = cfg.tol("lip_sum")?;
    let l1_cap = cfg.tol("l1_constant")?;
    let const_tol = cfg.tol("constant")?;
    let opts = ScheduleOptions::default();
    let fxs = fixtures(cfg)?;
    let mut table = Table::new(
        "extensions",
        &["h", "fixture", "depth", "l1_ratio", "bv_ratio", "lip_sum_ratio", "decay_ratio", "rho1"],
    );
    let mut sched = Table::new("schedules", &["h", "fixture", "k", "rho_k", "lip_fk", "l1_err_k"]);
    let (mut cl1, mut cbv) = (Vec::new(), Vec::new());
    let mut per_fixture_bv: Vec<Vec<f64>> = vec![Vec::new(); fxs.len()];
    for &h in &cfg.meshes {
        let d = domain(cfg, h)?;
        let op = ExtensionOperator::new(&d)?;
        let hd = hausdorff_total(&d);
        let (mut ml1, mut mbv): (f64, f64) = (0.0, 0.0);
        for (fi, fx) in fxs.iter().enumerate() {
            let f = fx.sample(&d)?;
            let e = extend_l1(&f, &op.cover, &op.pou, &d, &opts)?;
            let s = e.schedule.as_ref().ok_or(Error::Empty("layer schedule"))?;
            let nf = l1_norm(&f, &d)?;
            let fl1 = sum::sum(e.values.values().iter().zip(d.mu_weights()).map(|(v, w)| v.abs() * w));
            let l1r = fl1 / (d.diam() * nf);
            let bvr = e.bv_energy(&d)? / ((1.0 + hd) * nf);
            let lsr = s.lip_sum() / nf;
            let decay = s.decay_ratio(&d)?;
            table.push(vec![
                h.into(),
                fx.name().into(),
                s.depth().into(),
                l1r.into(),
                bvr.into(),
                lsr.into(),
                decay.into(),
                s.radii[0].into(),
            ]);
            for r in &s.rows {
                sched.push(vec![
                    h.into(),
                    fx.name().into(),
                    r.k.into(),
                    r.rho_k.into(),
                    r.lip_fk.into(),
                    r.l1_err_k.into(),
                ]);
            }
            let tag = format!("{} {}", fx.name(), fmt_h(h));
            rep.check(format!("stage decay {tag}"), decay, Op::Le, 1.0);
            rep.check(format!("lip sum over norm {tag}"), lsr, Op::Le, lip_sum_tol);
            let halving = s.radii.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            rep.check(format!("radius halving {tag}"), halving, Op::Le, 0.5);
            rep.check(format!("first radius {tag}"), s.radii[0], Op::Le, d.diam() / 4.0);
            let eps = 2f64.powi(2 - s.depth() as i32) * nf;
            let lo = f.min().min(0.0) - eps;
            let hi = f.max().max(0.0) + eps;
            rep.check(format!("range floor {tag}"), e.values.min(), Op::Ge, lo);
            rep.check(format!("range ceiling {tag}"), e.values.max(), Op::Le, hi);
            ml1 = ml1.max(l1r);
            mbv = mbv.max(bvr);
            per_fixture_bv[fi].push(bvr);
        }
        rep.constant(format!("C l1 {}", fmt_h(h)), ml1);
        rep.constant(format!("C bv {}", fmt_h(h)), mbv);
        rep.check(format!("l1 constant {}", fmt_h(h)), ml1, Op::Le, l1_cap);
        cl1.push(ml1);
        cbv.push(mbv);

        let c = 1.5;
        let f = FieldFn::constant(&d, Support::Boundary, c)?;
        let e = extend_l1(&f, &op.cover, &op.pou, &d, &opts)?;
        let s = e.schedule.as_ref().ok_or(Error::Empty("layer schedule"))?;
        let inner = layer(&d, 0.0, s.radii.get(1).copied().unwrap_or(s.radii[0]))?;
        let dev = max_of(
            e.values
                .values()
                .iter()
                .zip(&inner)
                .filter(|(_, m)| **m)
                .map(|(v, _)| (v - c).abs()),
        );
        rep.check(format!("constant reproduced near boundary {}", fmt_h(h)), dev, Op::Le, const_tol);
    }
    for w in cl1.windows(2) {
        rep.check("l1 constant drift", spread(w), Op::Lt, drift);
    }
    for w in cbv.windows(2) {
        rep.check("bv constant drift", spread(w), Op::Lt, drift);
    }
    for (fx, r) in fxs.iter().zip(&per_fixture_bv) {
        if matches!(fx, Fixture::Step) {
            rep.check("step bv ratio drift", spread(r), Op::Lt, drift);
        }
    }
    rep.tables.push(table);
    rep.tables.push(sched);
    Ok(())
}

pub(super) fn trace_recovery(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let (lo, hi) = (cfg.tol("halving_lo")?, cfg.tol("halving_hi")?);
    let frac = cfg.tol("converged_fraction")?;
    let const_tol = cfg.tol("constant")?;
    if cfg.sweep.is_empty() {
        return Err(Error::InvalidSpec("trace-recovery needs r_min values in sweep".into()));
    }
    let mut table = Table::new(
        "errors",
        &[
            "h",
            "fixture",
            "r_min",
            "max_error",
            "max_error_at_r_min",
            "resolved_at_r_min",
            "fraction_converged",
            "unresolved",
            "max_failure_jump_distance",
            "constant_c",
        ],
    );
    let mut rows = Table::new(
        "rows",
        &["h", "fixture", "r_min", "z_id", "Tu", "error", "final_residual", "slope", "converged", "is_jump_neighbor"],
    );
    let num = |v: Option<f64>| v.map_or(Cell::Text(String::new()), Cell::from);
    for &h in &cfg.meshes {
        let d = domain(cfg, h)?;
        let op = ExtensionOperator::new(&d)?;
        for fx in fixtures(cfg)? {
            let f = fx.sample(&d)?;
            let e = op.apply(&f, &d)?;
            let mut at_r = Vec::new();
            for (si, &r_min) in cfg.sweep.iter().enumerate() {
                let opts = TraceReportOptions {
                    r_min,
                    seed: cfg.seed,
                    ..Default::default()
                };
                let tr = trace_identity_report(&f, &e, &d, &opts)?;
                table.push(vec![
                    h.into(),
                    fx.name().into(),
                    r_min.into(),
                    tr.max_error.into(),
                    tr.max_error_at_r_min.into(),
                    tr.resolved_at_r_min.into(),
                    tr.fraction_converged.into(),
                    tr.unresolved.into(),
                    tr.max_failure_jump_distance.into(),
                    tr.constant_c.into(),
                ]);
                for r in &tr.rows {
                    rows.push(vec![
                        h.into(),
                        fx.name().into(),
                        r_min.into(),
                        r.z_id.into(),
                        num(r.tu),
                        num(r.error),
                        num(r.final_residual),
                        num(r.slope),
                        r.converged.into(),
                        r.is_jump_neighbor.into(),
                    ]);
                }
                let tag = format!("{} {} r_min={r_min}", fx.name(), fmt_h(h));
                rep.constant(format!("trace C {tag}"), tr.constant_c);
                match fx {
                    Fixture::Constant { .. } => {
                        rep.check(format!("constant max error {tag}"), tr.max_error, Op::Le, const_tol);
                        rep.check(format!("constant converged {tag}"), tr.fraction_converged, Op::Ge, 1.0);
                    }
                    _ if fx.is_lipschitz() => at_r.push(tr.max_error_at_r_min),
                    _ if si == 0 => {
                        rep.check(format!("converged fraction {tag}"), tr.fraction_converged, Op::Ge, frac);
                        let near = if tr.failures_near_jumps { 1.0 } else { 0.0 };
                        rep.check(format!("failures near jumps {tag}"), near, Op::Ge, 1.0);
                        rep.constant(format!("failure jump distance {tag}"), tr.max_failure_jump_distance);
                    }
                    _ => {}
                }
            }
            for (w, r) in at_r.windows(2).zip(cfg.sweep.windows(2)) {
                let ratio = w[1] / w[0];
                rep.check_between(
                    &format!("{} error ratio {} r_min {}→{}", fx.name(), fmt_h(h), r[0], r[1]),
                    ratio,
                    lo,
                    hi,
                );
            }
        }
    }
    rep.tables.push(table);
    rep.tables.push(rows);
    Ok(())
}

/// Exact values for `u_n = χ_{U_n}`: `(L¹, |Du|, trace L¹)`.
fn tube_norms(n: usize) -> (f64, f64, f64) {
    let w = 4f64.powi(-(n as i32));
    let height = 2f64.powi(-(n as i32));
    let area = 2.0 * w * height;
    let mouth = 2.0 * w;
    let walls = FRAC_PI_2 * (2.0 * height + 2.0 * w);
    (area, mouth, walls)
}

pub(super) fn thin_tube_counterexample(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let (lo, hi) = (cfg.tol("growth_lo")?, cfg.tol("growth_hi")?);
    let exact_tol = cfg.tol("exact")?;
    let orders: Vec<usize> = cfg
        .sweep
        .iter()
        .map(|&v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidSpec(format!("tube order {v} is not a positive integer")))
            }
        })
        .collect::<Result<_>>()?;
    let top = orders.iter().copied().max().ok_or(Error::Empty("tube orders"))?;
    let d = build_domain(&DomainSpec::new(Shape::ThinTubes(top), cfg.meshes[0]).exact())?;

    let mut table = Table::new(
        "tubes",
        &["n", "l1", "bv_seminorm", "trace_l1", "ratio", "l1_mesh", "trace_mesh"],
    );
    let mut ratios = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for &n in &orders {
        let (area, mouth, walls) = tube_norms(n);
        let c = 1.0 / (n * n) as f64;
        let w = 4f64.powi(-(n as i32));
        let height = 2f64.powi(-(n as i32));
        let in_x = |x: f64| (x - c).abs() <= w * (1.0 + 1e-12);
        let l1_mesh = sum::sum(
            d.interior_points()
                .iter()
                .zip(d.mu_weights())
                .filter(|(p, _)| p.y > 0.0 && p.y < height && in_x(p.x))
                .map(|(_, m)| *m),
        );
        let trace_mesh = sum::sum(
            d.boundary_points()
                .iter()
                .zip(d.h_weights())
                .filter(|(p, _)| p.y > 0.0 && p.y <= height * (1.0 + 1e-12) && in_x(p.x))
                .map(|(_, m)| *m),
        );
        worst_rel = worst_rel
            .max((l1_mesh - area).abs() / area)
            .max((trace_mesh - walls).abs() / walls);
        let ratio = walls / (area + mouth);
        table.push(vec![
            n.into(),
            area.into(),
            mouth.into(),
            walls.into(),
            ratio.into(),
            l1_mesh.into(),
            trace_mesh.into(),
        ]);
        ratios.push(ratio);
    }
    rep.check("mesh sums match exact values", worst_rel, Op::Le, exact_tol);
    for (w, n) in ratios.windows(2).zip(orders.windows(2)) {
        rep.check_between(&format!("ratio growth n={}→{}", n[0], n[1]), w[1] / w[0], lo, hi);
    }
    rep.tables.push(table);
    Ok(())
}

pub(super) fn space_comparison(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let jn_hi = cfg.tol("jn_upper")?;
    let est = cfg.tol("estimator_spread")?;
    let band = cfg.tol("harmonic_band")?;
    let wb = cfg.tol("weierstrass_besov")?;
    let wbv = cfg.tol("weierstrass_bv")?;
    let m = (TAU / cfg.meshes[0]).round() as usize;
    let d = circle_domain(m)?;
    let jn_opts = JnOptions {
        restarts: 32,
        seed: cfg.seed,
    };
    let mut table = Table::new(
        "norms",
        &["fixture", "l1", "jn0", "jn_theta", "dyadic", "kernel", "fixed_balls", "dyadic_r2", "jn0_over_l1"],
    );
    for fx in fixtures(cfg)? {
        let f = fx.sample(&d)?;
        let l1 = l1_norm(&f, &d)?;
        let jn0 = jn_norm(&f, &d, 0.0, 1.0, 1.0, &jn_opts)?.value;
        let jnt = jn_norm(&f, &d, 0.5, 1.0, 1.0, &jn_opts)?.value;
        let semis = BesovMethod::ALL
            .iter()
            .map(|&me| besov_seminorm(&f, &d, 0.0, 1.0, me).map(|r| r.seminorm))
            .collect::<Result<Vec<f64>>>()?;
        let dyadic = besov_seminorm(&f, &d, 0.0, 1.0, BesovMethod::Dyadic)?;
        let r2 = besov_seminorm(&f, &d, 0.0, 2.0, BesovMethod::Dyadic)?.seminorm;
        let ratio = jn0 / l1;
        table.push(vec![
            fx.name().into(),
            l1.into(),
            jn0.into(),
            jnt.into(),
            semis[0].into(),
            semis[1].into(),
            semis[2].into(),
            r2.into(),
            ratio.into(),
        ]);
        let name = fx.name();
        rep.check_between(&format!("jn0 over l1 {name}"), ratio, 1.0, jn_hi);
        if semis.iter().all(|s| *s > 0.0) {
            rep.check(format!("besov estimator spread {name}"), spread(&semis), Op::Le, est);
        }
        if dyadic.seminorm > 0.0 {
            rep.constant(format!("besov R=2 over R=1 {name}"), r2 / dyadic.seminorm);
            rep.constant(format!("jn0 over besov value {name}"), jn0 / dyadic.value);
        }
        rep.constant(format!("jn0.5 over jn0 {name}"), jnt / jn0);
        let mut prev = dyadic.value;
        for theta in [0.25, 0.5] {
            let v = besov_seminorm(&f, &d, theta, 1.0, BesovMethod::Dyadic)?.value;
            rep.check(format!("besov nondecreasing in theta {name} θ={theta}"), v, Op::Ge, prev);
            prev = v;
        }
    }

    let mut div = Table::new("divergent", &["terms", "fixed_balls_value", "harmonic", "ratio", "ratio_over_c"]);
    let mut c = None;
    for &j in &cfg.sweep {
        let terms = j as u32;
        let f = Fixture::Divergent { terms }.sample(&d)?;
        let v = besov_seminorm(&f, &d, 0.0, 1.0, BesovMethod::FixedBalls)?.value;
        let hj = sum::sum((1..=terms).map(|k| 1.0 / f64::from(k)));
        // c is fitted at the first truncation
        let c = *c.get_or_insert(v / hj);
        let rel = v / hj / c;
        div.push(vec![terms.into(), v.into(), hj.into(), (v / hj).into(), rel.into()]);
        rep.check_between(&format!("divergent value over harmonic number J={terms}, relative to c"), rel, 1.0 / band, band);
    }
    if let Some(c) = c {
        rep.constant("divergent c", c);
    }

    let dw = circle_domain(2 * m)?;
    let mut wt = Table::new("weierstrass", &["terms", "besov_seminorm", "bv_energy"]);
    let mut vals = Vec::new();
    for terms in [WEIERSTRASS_TERMS.0, WEIERSTRASS_TERMS.1] {
        let f = Fixture::Weierstrass {
            alpha: WEIERSTRASS_ALPHA,
            terms,
        }
        .sample(&dw)?;
        let b = besov_seminorm(&f, &dw, WEIERSTRASS_THETA, 1.0, BesovMethod::Dyadic)?.seminorm;
        let e = crate::norms::bv_energy(&f, &dw, None)?;
        wt.push(vec![terms.into(), b.into(), e.into()]);
        vals.push((b, e));
    }
    rep.check("weierstrass besov seminorm ratio", vals[1].0 / vals[0].0, Op::Le, wb);
    rep.check("weierstrass bv_energy ratio", vals[1].1 / vals[0].1, Op::Ge, wbv);
    rep.tables.push(table);
    rep.tables.push(div);
    rep.tables.push(wt);
    Ok(())
}

/// Radii `2^{−6 + k/2}`, `k = 0..=8`, shared by every thin-tube audit.
fn tube_audit_radii() -> Vec<f64> {
    (0..=8).map(|k| 2f64.powf(-6.0 + 0.5 * f64::from(k))).collect()
}

pub(super) fn regularity_audit_scenario(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let bounds = AuditBounds {
        max_spread: cfg.tol("ahlfors_spread")?,
        density_min: cfg.tol("density_min")?,
        ..AuditBounds::default()
    };
    let opts = AuditOptions {
        seed: cfg.seed,
        bounds,
        ..AuditOptions::default()
    };
    let h = cfg.meshes[0];
    let mut table = Table::new(
        "audit",
        &["domain", "doubling", "ahlfors_min", "ahlfors_max", "ahlfors_spread", "density_min"],
    );
    let push = |t: &mut Table, name: String, r: &crate::space::RegularityReport| {
        t.push(vec![
            name.into(),
            r.doubling_constant.into(),
            r.ahlfors_min.into(),
            r.ahlfors_max.into(),
            r.ahlfors_spread.into(),
            r.density_min.into(),
        ]);
    };
    for tag in &cfg.shapes {
        let shape = Shape::parse(tag, None, None)?;
        let exact = matches!(shape, Shape::ThinTubes(_));
        let mut spec = DomainSpec::new(shape, h).with_seed(cfg.seed);
        if exact {
            spec = spec.exact();
        }
        let d = build_domain(&spec)?;
        let r = if exact {
            regularity_audit(&d, Some(&tube_audit_radii()), &opts)?
        } else {
            regularity_audit(&d, None, &opts)?
        };
        push(&mut table, tag.clone(), &r);
        rep.check(format!("ahlfors spread {tag}"), r.ahlfors_spread, Op::Lt, bounds.max_spread);
        rep.check(format!("density minimum {tag}"), r.density_min, Op::Ge, bounds.density_min);
    }
    let mut dens = Vec::new();
    for &n in &cfg.sweep {
        let n = n as usize;
        let d = build_domain(&DomainSpec::new(Shape::ThinTubes(n), h).exact())?;
        let r = regularity_audit(&d, Some(&tube_audit_radii()), &opts)?;
        push(&mut table, Shape::ThinTubes(n).tag(), &r);
        dens.push((n, r.density_min));
    }
    for w in dens.windows(2) {
        rep.check(
            format!("thin-tubes density decreases N={}→{}", w[0].0, w[1].0),
            w[1].1,
            Op::Lt,
            w[0].1,
        );
    }
    rep.tables.push(table);
    Ok(())
}
