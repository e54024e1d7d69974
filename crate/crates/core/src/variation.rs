//! Determinant-one deformation machinery: tangent directions, the
//! exponential map, first/second variation of zeta along deformation paths,
//! height comparisons, and the aggregated extremality report.
//!
//! Deformed forms B_t = e_W(tH) are evaluated with the same incomplete-gamma
//! continuation as the zeta engine, but per vector (shell symmetry is broken
//! by H). Every t-value shares one streamed enumeration pass per side so
//! truncation error is correlated across the path and cancels in
//! differences.

use crate::error::{Error, Result};
use crate::gram::FloatForm;
use crate::lattice::Lattice;
use crate::linalg::{exp_map, jacobi_eigen, tangent_project, trace_ainv_h_squared, SymMat};
use crate::ratmat::Rat;
use crate::rng::random_tangent_direction;
use crate::special::{gamma_upper_scaled, ln_gamma, CompSum};
use crate::zeta::{
    f_sums_many_forms, strip_scan, theta_sums_many_forms, StripScan, ZetaEngine, ZetaParams,
    EULER_GAMMA,
};
use std::f64::consts::PI;

/// A tangent direction at the working form W: Tr(W^-1 H) = 0.
#[derive(Debug, Clone)]
pub struct TangentDirection {
    pub h: SymMat,
}

impl TangentDirection {
    /// Project an arbitrary symmetric matrix onto the tangent space at W.
    pub fn project(w: &SymMat, s: &SymMat) -> Self {
        let w_inv = w.inverse();
        TangentDirection {
            h: tangent_project(&w_inv, s),
        }
    }

    /// Seeded random unit direction at W.
    pub fn seeded(seed: u64, w: &SymMat) -> Self {
        TangentDirection {
            h: random_tangent_direction(seed, &w.inverse()),
        }
    }

    /// |Tr(W^-1 H)| (the tangency defect).
    pub fn tangency_defect(&self, w: &SymMat) -> f64 {
        w.inverse().trace_product(&self.h).abs()
    }
}

/// Working form of a lattice as a float matrix (scale applied).
pub fn working_sym(lattice: &Lattice) -> SymMat {
    SymMat::from_gram(&lattice.gram).scaled(lattice.scale_f64())
}

/// zeta(B, s) for perturbed forms B_i near the working form, one streamed
/// pass per side, shared across all forms. Returns (value, err) per form.
pub struct PathEvaluator<'a> {
    engine: &'a ZetaEngine,
    /// Enumeration bounds (in unscaled primal/dual Gram norms).
    bound_primal: Rat,
    bound_dual: Rat,
    /// Tail bounds of the two F sums at the chosen cutoffs (inflated for the
    /// perturbation).
    tail_primal: f64,
    tail_dual: f64,
    budget: u64,
    det_w: f64,
    scale: f64,
}

impl<'a> PathEvaluator<'a> {
    /// Choose per-side cutoffs so the (perturbation-inflated) F tails stay
    /// below eps at the given sigma values.
    pub fn new(
        engine: &'a ZetaEngine,
        sigma_primal: f64,
        sigma_dual: f64,
        max_relative_perturbation: f64,
        params: ZetaParams,
    ) -> Result<Self> {
        let n = engine.dim();
        let scale = engine.lattice.scale_f64();
        let shrink = 1.0 - 2.0 * max_relative_perturbation;
        if shrink <= 0.5 {
            return Err(Error::Domain("perturbation too large for the path tail model".into()));
        }
        let pick = |dual: bool, sigma: f64| -> Result<(Rat, f64)> {
            let gram_scale = if dual { 1.0 / scale } else { scale };
            let mut bound =
                crate::shells::first_k_shell_data(
                    if dual { &engine.dual_gram } else { &engine.lattice.gram },
                    1,
                    crate::shells::EnumConfig::with_budget(params.budget),
                )?[0]
                .norm
                .clone()
                    * Rat::from_integer(2.into());
            for _ in 0..24 {
                let side = engine.side_data(dual, &bound, params.budget)?;
                let tail = side.tail_bound(n, |m| {
                    gamma_upper_scaled(sigma, PI * m * gram_scale * shrink)
                });
                if tail <= params.eps {
                    return Ok((bound, tail));
                }
                bound = &bound * Rat::new(3.into(), 2.into());
            }
            Err(Error::Resource(format!(
                "path tail target {:.3e} unreachable within the shell budget",
                params.eps
            )))
        };
        let (bound_primal, tail_primal) = pick(false, sigma_primal)?;
        let (bound_dual, tail_dual) = pick(true, sigma_dual)?;
        let det_w = engine.det_f64() * scale.powi(n as i32);
        Ok(PathEvaluator {
            engine,
            bound_primal,
            bound_dual,
            tail_primal,
            tail_dual,
            budget: params.budget,
            det_w,
            scale,
        })
    }

    /// zeta(B_i, s) for working-scale forms B_i (and their inverses),
    /// continued representation. det(B_i) is taken as det(W) (the forms come
    /// from the determinant-preserving exponential map).
    pub fn zeta_many(
        &self,
        s: f64,
        forms: &[SymMat],
        inverses: &[SymMat],
    ) -> Result<Vec<(f64, f64)>> {
        let n = self.engine.dim();
        let n2 = n as f64 / 2.0;
        if s == n2 || s == 0.0 {
            return Err(Error::Domain("path evaluation needs s != n/2 and s != 0".into()));
        }
        let primal_forms: Vec<FloatForm> = forms.iter().map(|f| f.to_float_form()).collect();
        let dual_forms: Vec<FloatForm> = inverses.iter().map(|f| f.to_float_form()).collect();
        let fp = f_sums_many_forms(
            &self.engine.lattice.gram,
            &primal_forms,
            s,
            &self.bound_primal,
            self.budget,
        )?;
        let fd = f_sums_many_forms(
            &self.engine.dual_gram,
            &dual_forms,
            n2 - s,
            &self.bound_dual,
            self.budget,
        )?;
        let dets = self.det_w.powf(-0.5);
        let (inv_gamma, sign) = inv_gamma_s_plus_1(s);
        let factor = (s * PI.ln()).exp() * inv_gamma * sign;
        Ok(fp
            .iter()
            .zip(&fd)
            .map(|(&(fpv, fpe), &(fdv, fde))| {
                let h = dets / (s - n2) + fpv + dets * fdv;
                let err_h = fpe + self.tail_primal + dets * (fde + self.tail_dual);
                let g = -1.0 + s * h;
                let value = factor * g;
                let err = factor.abs() * s.abs() * err_h + 1e-15 * value.abs();
                (value, err)
            })
            .collect())
    }

    /// zeta'(B*, 0) for the duals of working-scale forms B_i: the height
    /// comparator. B* = B^-1; F_{B*}(0) runs over dual vectors and
    /// F_B(n/2) over primal vectors.
    pub fn height_many(&self, forms: &[SymMat], inverses: &[SymMat]) -> Result<Vec<(f64, f64)>> {
        let n = self.engine.dim();
        let n2 = n as f64 / 2.0;
        let primal_forms: Vec<FloatForm> = forms.iter().map(|f| f.to_float_form()).collect();
        let dual_forms: Vec<FloatForm> = inverses.iter().map(|f| f.to_float_form()).collect();
        // F_{B*}(0): sum over the dual lattice's vectors evaluated at B^-1.
        let f0 = f_sums_many_forms(
            &self.engine.dual_gram,
            &dual_forms,
            0.0,
            &self.bound_dual,
            self.budget,
        )?;
        let fn2 = f_sums_many_forms(
            &self.engine.lattice.gram,
            &primal_forms,
            n2,
            &self.bound_primal,
            self.budget,
        )?;
        let det_bstar = 1.0 / self.det_w;
        let dets = det_bstar.powf(-0.5);
        Ok(f0
            .iter()
            .zip(&fn2)
            .map(|(&(f0v, f0e), &(fnv, fne))| {
                let h0 = -dets / n2 + f0v + dets * fnv;
                let err = f0e + self.tail_dual + dets * (fne + self.tail_primal);
                (h0 - EULER_GAMMA - PI.ln(), err)
            })
            .collect())
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

fn inv_gamma_s_plus_1(s: f64) -> (f64, f64) {
    let x = s + 1.0;
    if x > 0.0 {
        ((-ln_gamma(x)).exp(), 1.0)
    } else if x == x.floor() {
        (0.0, 1.0)
    } else {
        let k = (-x.floor()) as i64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        ((-ln_gamma(x)).exp(), sign)
    }
}

/// Truncated first-variation series <H, sum' x_hat / W[x]^s> over shells
/// 1..=depth; vanishes shell-by-shell when every shell is a 2-design.
#[derive(Debug, Clone)]
pub struct FirstVariation {
    pub s: f64,
    pub depth: usize,
    pub residual: f64,
    /// Truncation bound: what a tail of non-design shells could contribute.
    pub bound: f64,
    /// Rounding-level floor of the streamed sum.
    pub rounding: f64,
    pub certified_2_design: Option<bool>,
}

pub fn zeta_first_variation(
    engine: &ZetaEngine,
    s: f64,
    h: &SymMat,
    depth: usize,
    params: ZetaParams,
    strict: bool,
) -> Result<FirstVariation> {
    let n = engine.dim();
    if s <= n as f64 / 2.0 {
        return Err(Error::Domain("first variation needs s > n/2".into()));
    }
    let cfg = crate::shells::EnumConfig::with_budget(params.budget);
    let certified = if strict {
        let report = crate::design::certify_lattice(&engine.lattice, depth, 2, cfg)?;
        if !report.all_2_design {
            return Err(Error::Precondition(format!(
                "2-design certificates fail for {} within depth {}",
                engine.lattice.name, depth
            )));
        }
        Some(true)
    } else {
        None
    };
    let data = crate::shells::first_k_shell_data(&engine.lattice.gram, depth, cfg)?;
    let bound = data.last().unwrap().norm.clone();
    let scale = engine.lattice.scale_f64();
    let w = working_sym(&engine.lattice);
    let wf = w.to_float_form();
    let hf = h.to_float_form();
    let e = crate::shells::Enumerator::new(&engine.lattice.gram)?;
    let (cs, _) = e.stream_fold(
        &bound,
        params.budget,
        CompSum::new,
        |acc, x, _| {
            let wx = wf.eval(x);
            let hx = hf.eval(x);
            acc.add(2.0 * (hx / wx) * wx.powf(-s));
        },
        |mut a, b| {
            a.add(b.value());
            a
        },
    )?;
    // Tail bound: |<H, x_hat>| <= max |eigenvalue of W^-1 H| on any vector.
    let winv = w.inverse();
    let wh = winv.matmul(h).symmetrized();
    let (evals, _) = jacobi_eigen(&wh);
    let hmax = evals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let side = engine.side_data(false, &bound, params.budget)?;
    let (_, dir_tail) = side.direct_sum(s, n);
    let tail = hmax * dir_tail * scale.powf(-s);
    Ok(FirstVariation {
        s,
        depth,
        residual: cs.value(),
        bound: tail,
        rounding: cs.rounding_bound() + 1e-15 * cs.value().abs(),
        certified_2_design: certified,
    })
}

/// Richardson central-difference fit of t -> zeta(e_W(tH), s) against the
/// second-variation prediction zeta(W,s) s(s-n/2)/(n(n+2)) Tr((W^-1 H)^2).
#[derive(Debug, Clone)]
pub struct VariationReport {
    pub s: f64,
    pub step: f64,
    pub fitted_quadratic: f64,
    pub fitted_linear: f64,
    /// Bound on what the linear coefficient may legitimately be (truncation
    /// plus fit noise).
    pub linear_bound: f64,
    pub predicted_quadratic: f64,
    pub relative_gap: f64,
    pub zeta_value: f64,
    pub tr_winv_h_sq: f64,
    /// Predicted coefficient > 0: the direction certifies a local minimum.
    pub local_min_direction: bool,
    /// Cubic contamination detected (step too large).
    pub unreliable: bool,
    pub certified_4_design: Option<bool>,
}

pub fn zeta_second_variation_fit(
    engine: &ZetaEngine,
    s: f64,
    h: &SymMat,
    step: f64,
    cert_depth: usize,
    params: ZetaParams,
    strict: bool,
) -> Result<VariationReport> {
    let n = engine.dim();
    let n2 = n as f64 / 2.0;
    if s == n2 || s <= 0.0 {
        return Err(Error::Domain("second variation needs s > 0, s != n/2".into()));
    }
    let cfg = crate::shells::EnumConfig::with_budget(params.budget);
    let certified = if strict {
        let report = crate::design::certify_lattice(&engine.lattice, cert_depth, 4, cfg)?;
        if !report.all_4_design {
            return Err(Error::Precondition(format!(
                "4-design certificates fail for {} within depth {}",
                engine.lattice.name, cert_depth
            )));
        }
        Some(true)
    } else {
        None
    };
    let w = working_sym(&engine.lattice);
    let w_inv = w.inverse();
    let perturb = step * 2.0 * h.frobenius().max(1.0) * w_inv.frobenius();
    let pe = PathEvaluator::new(engine, s, n2 - s, perturb.min(0.1), params)?;
    let ts = [0.0, step, -step, step / 2.0, -step / 2.0];
    let forms: Vec<SymMat> = ts.iter().map(|&t| exp_map(&w, h, t)).collect();
    let inverses: Vec<SymMat> = forms.iter().map(|f| f.inverse()).collect();
    let vals = pe.zeta_many(s, &forms, &inverses)?;
    let f: Vec<f64> = vals.iter().map(|&(v, _)| v).collect();
    let d_h = (f[1] - 2.0 * f[0] + f[2]) / (step * step);
    let d_h2 = (f[3] - 2.0 * f[0] + f[4]) / (step * step / 4.0);
    let fitted_quadratic = (4.0 * d_h2 - d_h) / 3.0 / 2.0;
    // Linear coefficient with its own Richardson step (the raw central
    // difference carries an O(step^2) cubic-term bias).
    let lin_h = (f[1] - f[2]) / (2.0 * step);
    let lin_h2 = (f[3] - f[4]) / step;
    let fitted_linear = (4.0 * lin_h2 - lin_h) / 3.0;
    let unreliable = (d_h - d_h2).abs() > 0.25 * d_h2.abs().max(1e-300);

    let zv = engine.zeta(s, params)?;
    let tr = trace_ainv_h_squared(&w_inv, h);
    let predicted_quadratic = zv.value * s * (s - n2) / (n as f64 * (n as f64 + 2.0)) * tr;
    let relative_gap = if predicted_quadratic != 0.0 {
        ((fitted_quadratic - predicted_quadratic) / predicted_quadratic).abs()
    } else {
        fitted_quadratic.abs()
    };
    // Fit-noise floor for the linear coefficient: evaluation errors divided
    // by the step, plus the observed Richardson residual of the linear
    // differences (what the remaining O(step^4) terms can contribute).
    let eval_err = vals.iter().map(|&(_, e)| e).fold(0.0f64, f64::max);
    let linear_bound =
        2.0 * eval_err / step + (lin_h - lin_h2).abs() + 1e-13 * f[0].abs() / step;
    Ok(VariationReport {
        s,
        step,
        fitted_quadratic,
        fitted_linear,
        linear_bound,
        predicted_quadratic,
        relative_gap,
        zeta_value: zv.value,
        tr_winv_h_sq: tr,
        local_min_direction: predicted_quadratic > 0.0,
        unreliable,
        certified_4_design: certified,
    })
}

/// Height comparison row: zeta'((e_W(tH))*, 0) over t in {0, +-step,
/// +-2 step}, demonstrating the strict local minimum at t = 0.
///
/// The predicted quadratic coefficient is Tr((W^-1 H)^2) / (2(n+2)):
/// differentiating zeta(e_W(tH), s) = zeta(W,s)[1 + t^2 s(s-n/2)/(n(n+2))
/// Tr((W^-1H)^2)] at s = 0 gives d/ds[s(s-n/2)] = -n/2 there, and
/// zeta(W,0) = -1, so the coefficient carries a factor (n/2)/(n(n+2)) =
/// 1/(2(n+2)). The fitted value confirms this to fit accuracy.
#[derive(Debug, Clone)]
pub struct HeightCompare {
    pub step: f64,
    /// (t, height value, err), ordered -2step .. +2step.
    pub rows: Vec<(f64, f64, f64)>,
    pub strict_min_at_zero: bool,
    pub fitted_quadratic: f64,
    /// Tr((W^-1 H)^2) / (2(n+2)).
    pub predicted_quadratic: f64,
    pub relative_gap: f64,
}

pub fn height_compare(
    engine: &ZetaEngine,
    h: &SymMat,
    step: f64,
    params: ZetaParams,
) -> Result<HeightCompare> {
    let n = engine.dim();
    let n2 = n as f64 / 2.0;
    let w = working_sym(&engine.lattice);
    let w_inv = w.inverse();
    let perturb = 2.0 * step * 2.0 * h.frobenius().max(1.0) * w_inv.frobenius();
    let pe = PathEvaluator::new(engine, n2, 0.0, perturb.min(0.1), params)?;
    let ts = [-2.0 * step, -step, 0.0, step, 2.0 * step];
    let forms: Vec<SymMat> = ts.iter().map(|&t| exp_map(&w, h, t)).collect();
    let inverses: Vec<SymMat> = forms.iter().map(|f| f.inverse()).collect();
    let vals = pe.height_many(&forms, &inverses)?;
    let rows: Vec<(f64, f64, f64)> = ts
        .iter()
        .zip(&vals)
        .map(|(&t, &(v, e))| (t, v, e))
        .collect();
    let center = rows[2].1;
    let strict_min_at_zero = rows
        .iter()
        .enumerate()
        .all(|(i, &(_, v, _))| i == 2 || v > center);
    // Richardson from the +-step and +-2step values.
    let d1 = (rows[3].1 - 2.0 * center + rows[1].1) / (step * step);
    let d2 = (rows[4].1 - 2.0 * center + rows[0].1) / (4.0 * step * step);
    let fitted_quadratic = (4.0 * d1 - d2) / 3.0 / 2.0;
    let tr = trace_ainv_h_squared(&w_inv, h);
    let predicted_quadratic = tr / (2.0 * (n as f64 + 2.0));
    let relative_gap = ((fitted_quadratic - predicted_quadratic) / predicted_quadratic).abs();
    Ok(HeightCompare {
        step,
        rows,
        strict_min_at_zero,
        fitted_quadratic,
        predicted_quadratic,
        relative_gap,
    })
}

/// Aggregated extremality evidence for one lattice at several s values.
#[derive(Debug, Clone)]
pub struct ExtremalityVerdict {
    pub s: f64,
    /// "yes" / "no" / "inconclusive".
    pub verdict: &'static str,
    pub detail: String,
    pub report: Option<VariationReport>,
}

#[derive(Debug, Clone)]
pub struct ExtremalityReport {
    pub lattice: String,
    pub depth: usize,
    pub all_4_design: bool,
    pub strip_all_negative: Option<bool>,
    pub theta_criterion_sign: Option<i32>,
    pub theta_y: f64,
    pub verdicts: Vec<ExtremalityVerdict>,
}

pub fn extremality_report(
    engine: &ZetaEngine,
    s_list: &[f64],
    depth: usize,
    seed: u64,
    params: ZetaParams,
) -> Result<ExtremalityReport> {
    let n = engine.dim();
    let n2 = n as f64 / 2.0;
    let cfg = crate::shells::EnumConfig::with_budget(params.budget);
    let design = crate::design::certify_lattice(&engine.lattice, depth, 4, cfg)?;
    let w = working_sym(&engine.lattice);
    let h = TangentDirection::seeded(seed, &w).h;

    // Strip scan only when some requested s needs it (0 < s < n/2).
    let needs_strip = s_list.iter().any(|&s| s > 0.0 && s < n2);
    let strip = if needs_strip {
        Some(strip_scan(engine, 37, params)?)
    } else {
        None
    };

    // Theta criterion at the representative y just above the threshold.
    let m1 = crate::shells::first_k_shell_data(&engine.lattice.gram, 1, cfg)?[0]
        .norm
        .clone();
    let m1_eff = crate::ratmat::rat_to_f64(&m1) * engine.lattice.scale_f64();
    let theta_y = 1.01 * (n2 + 1.0) / (PI * m1_eff);
    let theta_sign = crate::theta::theta_min_sum(engine, theta_y, params.eps(params.eps.max(1e-8)))
        .ok()
        .and_then(|s| s.sign);

    let mut verdicts = Vec::new();
    for &s in s_list {
        if s <= 0.0 || s == n2 {
            verdicts.push(ExtremalityVerdict {
                s,
                verdict: "inconclusive",
                detail: "s outside the theorem's range".into(),
                report: None,
            });
            continue;
        }
        if !design.all_4_design {
            verdicts.push(ExtremalityVerdict {
                s,
                verdict: "no",
                detail: format!("4-design certificates fail within depth {depth}"),
                report: None,
            });
            continue;
        }
        let report = zeta_second_variation_fit(engine, s, &h, 1e-3, depth, params, false)?;
        let fit_ok = report.relative_gap <= 1e-2 && !report.unreliable;
        let (verdict, detail) = if s > n2 {
            if report.local_min_direction && fit_ok {
                ("yes", format!("s > n/2 and all shells to depth {depth} hold 4-designs"))
            } else {
                ("inconclusive", "second-variation fit did not confirm".into())
            }
        } else {
            match strip.as_ref().map(|sc| sc.all_negative_certain) {
                Some(true) if report.local_min_direction && fit_ok => (
                    "yes",
                    "zeta < 0 across the strip grid and 4-designs hold".to_string(),
                ),
                Some(false) => ("inconclusive", "zeta sign not certainly negative".into()),
                _ => ("inconclusive", "strip scan unavailable".into()),
            }
        };
        verdicts.push(ExtremalityVerdict {
            s,
            verdict,
            detail,
            report: Some(report),
        });
    }
    Ok(ExtremalityReport {
        lattice: engine.lattice.name.clone(),
        depth,
        all_4_design: design.all_4_design,
        strip_all_negative: strip.map(|s| s.all_negative_certain),
        theta_criterion_sign: theta_sign,
        theta_y,
        verdicts,
    })
}

/// Re-exported for the CLI: scan the strip and return the scan.
pub fn run_strip_scan(engine: &ZetaEngine, grid: usize, params: ZetaParams) -> Result<StripScan> {
    strip_scan(engine, grid, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_lattice;

    fn engine(name: &str) -> ZetaEngine {
        ZetaEngine::new(&catalog_lattice(name, None).unwrap())
    }

    #[test]
    fn tangent_projection_examples() {
        // (I, I) -> 0
        let w = SymMat::identity(3);
        let t = TangentDirection::project(&w, &SymMat::identity(3));
        assert!(t.h.frobenius() < 1e-14);
        // (I, diag(1,-1,0)) unchanged
        let mut s = SymMat::zero(3);
        s.set(0, 0, 1.0);
        s.set(1, 1, -1.0);
        let t = TangentDirection::project(&w, &s);
        for (a, b) in t.h.a.iter().zip(&s.a) {
            assert!((a - b).abs() < 1e-14);
        }
        // (diag(1,4), I): verify <A^-1, H> = 0
        let mut a = SymMat::zero(2);
        a.set(0, 0, 1.0);
        a.set(1, 1, 4.0);
        let t = TangentDirection::project(&a, &SymMat::identity(2));
        assert!(t.tangency_defect(&a) < 1e-14);
    }

    #[test]
    fn first_variation_vanishes_for_e8() {
        let e = engine("E8");
        let w = working_sym(&e.lattice);
        let h = TangentDirection::seeded(3, &w).h;
        let fv = zeta_first_variation(&e, 5.0, &h, 6, ZetaParams::default(), true).unwrap();
        assert!(
            fv.residual.abs() <= fv.bound,
            "residual {} bound {}",
            fv.residual,
            fv.bound
        );
        assert!(fv.residual.abs() < 1e-10, "residual {}", fv.residual);
        assert_eq!(fv.certified_2_design, Some(true));
    }

    #[test]
    fn first_variation_zero_direction() {
        let e = engine("D4");
        let h = SymMat::zero(4);
        let fv = zeta_first_variation(&e, 3.0, &h, 3, ZetaParams::default(), false).unwrap();
        assert_eq!(fv.residual, 0.0);
    }

    #[test]
    fn first_variation_z2_offdiagonal() {
        // Z^2 shells are 2-designs; the off-diagonal direction also vanishes.
        let e = ZetaEngine::new(&catalog_lattice("Zn", Some(2)).unwrap());
        let mut h = SymMat::zero(2);
        h.set(0, 1, 1.0);
        h.set(1, 0, 1.0);
        let fv = zeta_first_variation(&e, 2.0, &h, 10, ZetaParams::default(), true).unwrap();
        assert!(fv.residual.abs() < 1e-12, "residual {}", fv.residual);
    }

    #[test]
    fn second_variation_d4() {
        let l = catalog_lattice("D4", None).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let w = working_sym(&l);
        let h = TangentDirection::seeded(7, &w).h;
        let r = zeta_second_variation_fit(&e, 3.0, &h, 1e-3, 5, ZetaParams::default(), true)
            .unwrap();
        assert!(r.relative_gap <= 1e-4, "gap {}", r.relative_gap);
        assert!(r.local_min_direction);
        assert!(r.fitted_linear.abs() <= r.linear_bound.max(1e-9));
        // Symmetry: -H gives the same quadratic coefficient.
        let hm = h.scaled(-1.0);
        let r2 = zeta_second_variation_fit(&e, 3.0, &hm, 1e-3, 5, ZetaParams::default(), false)
            .unwrap();
        let rel = ((r.fitted_quadratic - r2.fitted_quadratic) / r.fitted_quadratic).abs();
        assert!(rel < 1e-6, "asymmetry {rel}");
    }

    #[test]
    fn second_variation_sign_below_pole() {
        // E8 at s = 2 < n/2 = 4: predicted coefficient sign =
        // sign(zeta(E8,2) * s(s-4)) = positive iff zeta(E8,2) < 0.
        let l = catalog_lattice("E8", None).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let w = working_sym(&l);
        let h = TangentDirection::seeded(9, &w).h;
        let r = zeta_second_variation_fit(&e, 2.0, &h, 1e-3, 3, ZetaParams::default(), false)
            .unwrap();
        let z = e.zeta(2.0, ZetaParams::default()).unwrap().value;
        assert!(z < 0.0);
        assert!(r.predicted_quadratic > 0.0);
        assert!(r.relative_gap < 1e-2, "gap {}", r.relative_gap);
    }

    #[test]
    fn height_compare_e8_min_at_zero() {
        let l = catalog_lattice("E8", None).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let w = working_sym(&l);
        let h = TangentDirection::seeded(1, &w).h;
        let hc = height_compare(&e, &h, 1e-2, ZetaParams::default()).unwrap();
        assert!(hc.strict_min_at_zero);
        assert!(hc.relative_gap < 0.05, "gap {}", hc.relative_gap);
    }

    #[test]
    fn height_zero_direction_constant_row() {
        let l = catalog_lattice("D4", None).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let h = SymMat::zero(4);
        let hc = height_compare(&e, &h, 1e-2, ZetaParams::default()).unwrap();
        let v0 = hc.rows[2].1;
        for &(_, v, _) in &hc.rows {
            assert!((v - v0).abs() < 1e-12);
        }
        assert!(!hc.strict_min_at_zero);
    }

    #[test]
    fn extremality_zn4_is_no() {
        let l = catalog_lattice("Zn", Some(4)).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let r = extremality_report(&e, &[4.0], 3, 7, ZetaParams::default()).unwrap();
        assert!(!r.all_4_design);
        assert_eq!(r.verdicts[0].verdict, "no");
    }

    #[test]
    fn extremality_a2_yes_above_half() {
        let l = catalog_lattice("A2", None).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let r = extremality_report(&e, &[2.0], 5, 7, ZetaParams::default()).unwrap();
        assert_eq!(r.verdicts[0].verdict, "yes", "{}", r.verdicts[0].detail);
    }
}
