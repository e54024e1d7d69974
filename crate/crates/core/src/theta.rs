//! Theta-function evaluation on the imaginary axis, the positivity sum of
//! the theta local-minimum criterion, and the theta second-variation fit.

use crate::error::{Error, Result};
use crate::gram::FloatForm;
use crate::linalg::{exp_map, trace_ainv_h_squared, SymMat};
use crate::ratmat::Rat;
use crate::zeta::{theta_sums_many_forms, ZetaEngine, ZetaParams};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct ThetaValue {
    pub y: f64,
    pub value: f64,
    pub err: f64,
}

/// Theta of the working form at iy: direct shell sum for effective y >= 1,
/// modular transformation through the dual otherwise.
pub fn theta(engine: &ZetaEngine, y: f64, params: ZetaParams) -> Result<ThetaValue> {
    if y <= 0.0 {
        return Err(Error::Domain("theta needs y > 0".into()));
    }
    let y_eff = y * engine.lattice.scale_f64();
    let n = engine.dim();
    if y_eff >= 1.0 {
        let (sum, err) = adaptive_theta_side(engine, false, y_eff, params)?;
        Ok(ThetaValue {
            y,
            value: 1.0 + sum,
            err,
        })
    } else {
        // Theta_A(iy) = y^(-n/2) det(A)^(-1/2) Theta_{A^(-1)}(i/y)
        let (dual_sum, derr) = adaptive_theta_side(engine, true, 1.0 / y_eff, params)?;
        let factor = y_eff.powf(-(n as f64) / 2.0) * engine.det_f64().powf(-0.5);
        Ok(ThetaValue {
            y,
            value: factor * (1.0 + dual_sum),
            err: factor * derr,
        })
    }
}

/// Direct theta sum with no transformation, at an explicit bound: the raw
/// series for cross-checking the modular identity. Err is the model tail
/// bound (may be large for small y; it is reported honestly).
pub fn theta_raw(engine: &ZetaEngine, y: f64, bound: &Rat, budget: u64) -> Result<ThetaValue> {
    if y <= 0.0 {
        return Err(Error::Domain("theta needs y > 0".into()));
    }
    let y_eff = y * engine.lattice.scale_f64();
    let side = engine.side_data(false, bound, budget)?;
    let (sum, err) = side.theta_sum(y_eff, engine.dim());
    Ok(ThetaValue {
        y,
        value: 1.0 + sum,
        err,
    })
}

fn adaptive_theta_side(
    engine: &ZetaEngine,
    dual: bool,
    y_eff: f64,
    params: ZetaParams,
) -> Result<(f64, f64)> {
    let gram = if dual {
        &engine.dual_gram
    } else {
        &engine.lattice.gram
    };
    let m1 = crate::shells::first_k_shell_data(gram, 1, crate::shells::EnumConfig::with_budget(params.budget))?[0]
        .norm
        .clone();
    let mut bound = &m1 * Rat::from_integer(2.into());
    for _ in 0..24 {
        let side = engine.side_data(dual, &bound, params.budget)?;
        let (sum, err) = side.theta_sum(y_eff, engine.dim());
        if err <= params.eps {
            return Ok((sum, err));
        }
        bound = &bound * Rat::from_integer(2.into());
    }
    Err(Error::Resource(format!(
        "theta tail target {:.3e} unreachable within the shell budget",
        params.eps
    )))
}

/// Signed sum S(y) = sum_x u(u - (n/2+1)) e^-u with u = pi y W[x] over the
/// working form W; positivity of S certifies the theta local-minimum
/// criterion at y. The sign is `Some` only when |S| > err.
#[derive(Debug, Clone, Copy)]
pub struct ThetaMinSum {
    pub y: f64,
    pub value: f64,
    pub err: f64,
    /// +1 / -1 when certified, None when |S| <= err.
    pub sign: Option<i32>,
    /// The threshold (n/2+1)/(pi m_1) above which every term is positive.
    pub threshold: f64,
}

pub fn theta_min_sum(engine: &ZetaEngine, y: f64, params: ZetaParams) -> Result<ThetaMinSum> {
    if y <= 0.0 {
        return Err(Error::Domain("theta_min_sum needs y > 0".into()));
    }
    let n = engine.dim();
    let c = n as f64 / 2.0 + 1.0;
    let scale = engine.lattice.scale_f64();
    let y_eff = y * scale;
    let gram = &engine.lattice.gram;
    let cfg = crate::shells::EnumConfig::with_budget(params.budget);
    let m1 = crate::shells::first_k_shell_data(gram, 1, cfg)?[0].norm.clone();
    let m1_eff = crate::ratmat::rat_to_f64(&m1) * scale;
    let threshold = c / (PI * m1_eff);
    let mut bound = &m1 * Rat::from_integer(2.into());
    for _ in 0..24 {
        let side = engine.side_data(false, &bound, params.budget)?;
        let mut cs = crate::special::CompSum::new();
        for &(m, a) in &side.shells {
            let u = PI * y_eff * m;
            cs.add(a as f64 * u * (u - c) * (-u).exp());
        }
        // Tail weight u^2 e^-u dominates |u(u-c)e^-u| once u >= max(2, c+...):
        // ensure the cut is deep enough that the weight decreases.
        let u_cut = PI * y_eff * side.bound;
        if u_cut > c.max(4.0) {
            let tail = side.tail_bound(n, |m| {
                let u = PI * y_eff * m;
                u * u * (-u).exp()
            });
            let err = tail + cs.rounding_bound();
            if err <= params.eps {
                let value = cs.value();
                let sign = if value - err > 0.0 {
                    Some(1)
                } else if value + err < 0.0 {
                    Some(-1)
                } else {
                    None
                };
                return Ok(ThetaMinSum {
                    y,
                    value,
                    err,
                    sign,
                    threshold,
                });
            }
        }
        bound = &bound * Rat::from_integer(2.into());
    }
    Err(Error::Resource(format!(
        "theta_min_sum tail target {:.3e} unreachable within the shell budget",
        params.eps
    )))
}

/// Central-difference + Richardson fit of the quadratic t-coefficient of
/// t -> Theta_{e_W(tH)}(iy), compared against the prediction
/// Tr((W^-1 H)^2) / (n(n+2)) * S(y).
#[derive(Debug, Clone)]
pub struct ThetaVariationFit {
    pub y: f64,
    pub step: f64,
    pub fitted: f64,
    pub predicted: f64,
    pub relative_gap: f64,
    pub linear_coefficient: f64,
    /// Design certificates passed to the truncation depth (when checked).
    pub certified: Option<bool>,
}

pub fn theta_second_variation_fit(
    engine: &ZetaEngine,
    y: f64,
    h: &SymMat,
    step: f64,
    params: ZetaParams,
    strict: bool,
) -> Result<ThetaVariationFit> {
    if y <= 0.0 || step <= 0.0 {
        return Err(Error::Domain("theta fit needs y > 0 and step > 0".into()));
    }
    let n = engine.dim();
    let scale = engine.lattice.scale_f64();
    let w = SymMat::from_gram(&engine.lattice.gram).scaled(scale);
    let w_inv = w.inverse();
    // Vector cutoff: unscaled-norm bound R with pi y scale R deep enough for
    // ~1e-14 absolute tails relative to the leading shell.
    let y_eff = y * scale;
    let gram = &engine.lattice.gram;
    let cfg = crate::shells::EnumConfig::with_budget(params.budget);
    let m1 = crate::shells::first_k_shell_data(gram, 1, cfg)?[0].norm.clone();
    let m1f = crate::ratmat::rat_to_f64(&m1);
    let mut bound_f = m1f * 2.0;
    while PI * y_eff * bound_f < PI * y_eff * m1f + 34.5 {
        bound_f *= 1.5;
    }
    let bound = Rat::from_float(bound_f).unwrap_or_else(|| Rat::from_integer(64.into()));

    let certified = if strict {
        let depth_data = crate::shells::shell_data(gram, &bound, cfg)?;
        let report = crate::design::certify_lattice(
            &engine.lattice,
            depth_data.len(),
            4,
            cfg,
        )?;
        if !report.all_4_design {
            return Err(Error::Precondition(format!(
                "4-design certificates fail for {} within the truncation depth",
                engine.lattice.name
            )));
        }
        Some(true)
    } else {
        None
    };

    let ts = [0.0, step, -step, step / 2.0, -step / 2.0];
    let forms: Vec<FloatForm> = ts
        .iter()
        .map(|&t| exp_map(&w, h, t).to_float_form())
        .collect();
    // Theta sums stream over the unscaled gram's vectors; the forms already
    // carry the scale.
    let sums = theta_sums_many_forms(gram, &forms, y, &bound, params.budget)?;
    let f: Vec<f64> = sums.iter().map(|&(v, _)| 1.0 + v).collect();
    let d_h = (f[1] - 2.0 * f[0] + f[2]) / (step * step);
    let d_h2 = (f[3] - 2.0 * f[0] + f[4]) / (step * step / 4.0);
    let fitted = (4.0 * d_h2 - d_h) / 3.0 / 2.0;
    let linear_coefficient = (f[1] - f[2]) / (2.0 * step);

    let s_y = theta_min_sum(engine, y, params)?;
    let tr = trace_ainv_h_squared(&w_inv, h);
    let predicted = tr / (n as f64 * (n as f64 + 2.0)) * s_y.value;
    let relative_gap = if predicted != 0.0 {
        ((fitted - predicted) / predicted).abs()
    } else {
        fitted.abs()
    };
    Ok(ThetaVariationFit {
        y,
        step,
        fitted,
        predicted,
        relative_gap,
        linear_coefficient,
        certified,
    })
}

/// CSV rows (y, theta, err).
pub fn theta_csv(values: &[ThetaValue]) -> String {
    let mut out = String::from("y,theta,err\n");
    for v in values {
        out.push_str(&format!("{:.12e},{:.12e},{:.3e}\n", v.y, v.value, v.err));
    }
    out
}

/// CSV rows (y, s_sum, err, sign).
pub fn theta_min_sum_csv(values: &[ThetaMinSum]) -> String {
    let mut out = String::from("y,s,err,sign\n");
    for v in values {
        let sign = v.sign.map(|s| s.to_string()).unwrap_or_else(|| "?".into());
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.3e},{}\n",
            v.y, v.value, v.err, sign
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_lattice;
    use crate::rng::random_tangent_direction;

    fn engine(name: &str, dim: Option<usize>) -> ZetaEngine {
        ZetaEngine::new(&catalog_lattice(name, dim).unwrap())
    }

    #[test]
    fn theta_z1_matches_jacobi_theta3() {
        // Theta_Z(i) = theta3(e^-pi) = 1.0864348112133080145753161215102236.
        let e = engine("Zn", Some(1));
        let v = theta(&e, 1.0, ZetaParams::default()).unwrap();
        let expect = 1.086_434_811_213_308;
        assert!((v.value - expect).abs() < 1e-13 + v.err, "{}", v.value);
    }

    #[test]
    fn theta_value_at_least_one_and_monotone() {
        let e = engine("A2", None);
        let mut last = f64::INFINITY;
        for &y in &[0.7, 1.0, 1.5, 2.5, 4.0] {
            let v = theta(&e, y, ZetaParams::default()).unwrap();
            assert!(v.value >= 1.0);
            assert!(v.value < last);
            last = v.value;
        }
    }

    #[test]
    fn e8_self_dual_fixed_point() {
        // Theta_E8(i/y) = y^4 Theta_E8(iy) forces consistency at y = 1:
        // the direct route and the transform route must agree.
        let e = engine("E8", None);
        let direct = theta_raw(&e, 1.0, &Rat::from_integer(24.into()), 10_000_000).unwrap();
        let via_engine = theta(&e, 1.0, ZetaParams::default()).unwrap();
        assert!(
            (direct.value - via_engine.value).abs() <= direct.err + via_engine.err,
            "{} vs {}",
            direct.value,
            via_engine.value
        );
    }

    #[test]
    fn functional_equation_residual() {
        // |Theta_A(i/y) - y^(n/2) det^-1/2 Theta_{A^-1}(iy)| small for y = 3
        // (both sides computed at honest depths).
        let l = catalog_lattice("D4", None).unwrap();
        let e = ZetaEngine::new(&l);
        let ed = ZetaEngine::new(&l.dual());
        let y = 3.0f64;
        let lhs = theta_raw(&e, 1.0 / y, &Rat::from_integer(40.into()), 10_000_000).unwrap();
        let rhs_theta = theta_raw(&ed, y, &Rat::from_integer(12.into()), 10_000_000).unwrap();
        let factor = y.powf(2.0) * e.det_f64().powf(-0.5);
        let rhs = factor * rhs_theta.value;
        assert!(
            (lhs.value - rhs).abs() <= lhs.err + factor * rhs_theta.err + 1e-10,
            "{} vs {}",
            lhs.value,
            rhs
        );
    }

    #[test]
    fn leading_term_asymptotics() {
        // Theta - 1 ~ a_1 e^(-pi y m_1) for large y.
        let e = engine("E8", None);
        let y = 5.0;
        let v = theta(&e, y, ZetaParams::default().eps(1e-16)).unwrap();
        let lead = 240.0 * (-PI * y * 2.0).exp();
        let ratio = (v.value - 1.0) / lead;
        assert!((0.9..1.1).contains(&ratio), "{ratio}");
    }

    #[test]
    fn d4_min_sum_positive_above_threshold() {
        let l = catalog_lattice("D4", None).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let n2p1 = 3.0;
        let m1_eff = 2.0 * l.scale_f64();
        let y = 2.0 * n2p1 / (PI * m1_eff);
        let s = theta_min_sum(&e, y, ZetaParams::default().eps(1e-8)).unwrap();
        assert_eq!(s.sign, Some(1), "S = {} err {}", s.value, s.err);
        assert!((s.threshold - n2p1 / (PI * m1_eff)).abs() < 1e-12);
    }

    #[test]
    fn theta_fit_d4() {
        let l = catalog_lattice("D4", None).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let w = SymMat::from_gram(&l.gram).scaled(l.scale_f64());
        let h = random_tangent_direction(11, &w.inverse());
        let fit =
            theta_second_variation_fit(&e, 2.0, &h, 1e-3, ZetaParams::default().eps(1e-9), true)
                .unwrap();
        assert!(fit.relative_gap <= 1e-3, "gap {}", fit.relative_gap);
        assert_eq!(fit.certified, Some(true));
    }

    #[test]
    fn theta_fit_zero_direction() {
        let l = catalog_lattice("E8", None).unwrap();
        let e = ZetaEngine::new(&l);
        let h = SymMat::zero(8);
        let fit =
            theta_second_variation_fit(&e, 1.5, &h, 1e-3, ZetaParams::default().eps(1e-9), false)
                .unwrap();
        assert!(fit.fitted.abs() < 1e-12);
        assert!(fit.predicted.abs() < 1e-12);
    }

    #[test]
    fn theta_fit_negative_control_zn4() {
        // Z^4 shells are not all 4-designs: strict mode must refuse.
        let l = catalog_lattice("Zn", Some(4)).unwrap();
        let e = ZetaEngine::new(&l);
        let w = SymMat::from_gram(&l.gram);
        let h = random_tangent_direction(5, &w.inverse());
        let err = theta_second_variation_fit(&e, 2.0, &h, 1e-3, ZetaParams::default(), true);
        assert!(err.is_err());
        // Non-strict: the fit runs; the prediction is generically off.
        let fit = theta_second_variation_fit(&e, 2.0, &h, 1e-3, ZetaParams::default(), false)
            .unwrap();
        assert!(fit.certified.is_none());
        assert!(fit.relative_gap > 1e-3, "gap {}", fit.relative_gap);
    }
}
