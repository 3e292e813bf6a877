//! Internal consistency suite behind `satotate selfcheck`.

use std::f64::consts::PI;

use satotate::census::{run_census, verify_bands, CensusOptions};
use satotate::measures::{
    angles_to_traces, delta_to_lambda, disc_d0, joint_density, sym_to_delta, traces_to_sym,
    AnglePoint, Chart,
};
use satotate::tracedist::{self, comparison_grid, DensityControl, DensityRoute};
use satotate::GroupKind;

const ROUTE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfCheckOptions {
    /// Multiplies every `USp(4)` series value; anything but 1 should break route agreement.
    pub g_series_scale: f64,
    pub threads: usize,
}

impl Default for SelfCheckOptions {
    fn default() -> Self {
        Self {
            g_series_scale: 1.0,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<String, String>;
type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn value(g: GroupKind, s: f64, route: DensityRoute) -> Result<f64, String> {
    tracedist::density(g, s, route, &DensityControl::default())
        .map(|v| v.value)
        .map_err(fail)
}

fn route_agreement(opts: &SelfCheckOptions) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = (GroupKind::Usp4, 0.0);
    for g in [GroupKind::Usp4, GroupKind::Su2xSu2] {
        let scale = if g == GroupKind::Usp4 {
            opts.g_series_scale
        } else {
            1.0
        };
        for s in comparison_grid() {
            let diff = (scale * value(g, s, DensityRoute::Series)?
                - value(g, s, DensityRoute::Quadrature)?)
            .abs();
            if diff > worst {
                worst = diff;
                at = (g, s);
            }
        }
    }
    let detail = format!(
        "max |series - quadrature| = {worst:.2e} ({} at s1 = {})",
        at.0, at.1
    );
    if worst <= ROUTE_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn normalization() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for g in GroupKind::ALL {
        let total = tracedist::cdf(g, 4.0, &DensityControl::default()).map_err(fail)?;
        ok &= (total - 1.0).abs() <= 1e-8;
        parts.push(format!("{g} {:.1e}", total - 1.0));
    }
    let detail = format!("F(4) - 1: {}", parts.join(", "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn closed_forms() -> Outcome {
    let mut worst_h: f64 = 0.0;
    let mut worst_d: f64 = 0.0;
    for s in comparison_grid() {
        let h = value(GroupKind::Su2xSu2, s, DensityRoute::ClosedForm)?
            - value(GroupKind::Su2xSu2, s, DensityRoute::Quadrature)?;
        worst_h = worst_h.max(h.abs());
        let d = value(GroupKind::DiagonalSu2, s, DensityRoute::ClosedForm)?
            - value(GroupKind::DiagonalSu2, s, DensityRoute::Series)?;
        worst_d = worst_d.max(d.abs());
    }
    let detail = format!("H {worst_h:.1e}, Delta {worst_d:.1e}");
    if worst_h <= 1e-8 && worst_d <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-11 * a.abs().max(b.abs()).max(1.0)
}

fn jacobians() -> Outcome {
    let angles = [
        (0.4, 2.1),
        (1.0, 2.9),
        (2.2, 0.7),
        (1.3, 1.9),
        (0.2, 0.9),
        (2.6, 1.1),
    ];
    let mut checked = 0;
    for (th1, th2) in angles {
        let a = AnglePoint::new(th1, th2).map_err(fail)?;
        let t = angles_to_traces(a);
        let s = traces_to_sym(t);
        let d = sym_to_delta(s).map_err(fail)?;
        let d0 = disc_d0(&t.into());
        for g in [GroupKind::Usp4, GroupKind::Su2xSu2] {
            let fa = joint_density(g, &a.into(), Chart::Angle).map_err(fail)?;
            let ft = joint_density(g, &t.into(), Chart::Trace).map_err(fail)?;
            let fs = joint_density(g, &s.into(), Chart::Sym).map_err(fail)?;
            let fd = joint_density(g, &d.into(), Chart::Delta).map_err(fail)?;
            let mut ok = close(fa, ft * 4.0 * th1.sin() * th2.sin())
                && close(fs, 2.0 * ft / d0.sqrt())
                && close(fd, fs * 0.5 * d.delta0);
            if d.s1 <= 0.0 {
                let l = delta_to_lambda(d).map_err(fail)?;
                let fl = joint_density(g, &l.into(), Chart::Lambda).map_err(fail)?;
                ok &= close(fl, fd * l.eps);
            }
            if !ok {
                return Err(format!("{g} inconsistent at angles ({th1}, {th2})"));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} point/group pairs consistent across charts"
    ))
}

fn census_bands(threads: usize) -> Outcome {
    let opts = CensusOptions {
        include_degree6: false,
        threads,
    };
    let report = run_census(5, &opts).map_err(fail)?;
    let classes = report.class_list();
    let failing = classes
        .iter()
        .filter(|(fc, _)| !verify_bands(fc).holds())
        .count();
    let detail = format!(
        "q = 5: {} classes, {} curves, {failing} failing",
        classes.len(),
        report.total_curves()
    );
    if failing == 0 && report.all_bands_hold() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn calibration() -> Outcome {
    let cal = tracedist::calibrate_elliptic_form(&DensityControl::default()).map_err(fail)?;
    let detail = format!(
        "elliptic-form constant {:.12} (pi * c = {:.10}, spread {:.1e} over {} points)",
        cal.constant,
        cal.constant * PI,
        cal.max_rel_deviation,
        cal.points
    );
    if cal.is_constant() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ratios() -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, q) in [(1.0, 16.0), (0.5, 101.0), (3.0, 47.0), (2.2, 1e4)] {
        let eps = d / f64::sqrt(q);
        let fg = tracedist::leading_cdf(GroupKind::Usp4, eps);
        let fh = tracedist::leading_cdf(GroupKind::Su2xSu2, eps);
        let fd = tracedist::leading_cdf(GroupKind::DiagonalSu2, eps);
        worst = worst
            .max((fd / fh / tracedist::ratio_delta_over_h(d, q) - 1.0).abs())
            .max((fh / fg / tracedist::ratio_h_over_g(d, q) - 1.0).abs());
    }
    let detail = format!("max relative deviation {worst:.1e}");
    if worst <= 1e-14 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn run(opts: &SelfCheckOptions) -> Vec<CheckLine> {
    let checks: [Check<'_>; 7] = [
        ("route agreement", Box::new(|| route_agreement(opts))),
        ("normalization", Box::new(normalization)),
        ("closed forms H/Delta", Box::new(closed_forms)),
        ("chart jacobians", Box::new(jacobians)),
        ("census bands", Box::new(|| census_bands(opts.threads))),
        ("calibration", Box::new(calibration)),
        ("ratio identities", Box::new(ratios)),
    ];
    checks
        .into_iter()
        .map(|(name, check)| {
            let (passed, detail) = match check() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckLine {
                name,
                passed,
                detail,
            }
        })
        .collect()
}

pub fn render(lines: &[CheckLine]) -> String {
    let width = lines.iter().map(|l| l.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for l in lines {
        let mark = if l.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{mark}  {:width$}  {}\n", l.name, l.detail));
    }
    let passed = lines.iter().filter(|l| l.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", lines.len()));
    out
}
