//! Epstein zeta evaluation.
//!
//! For real s away from the pole at n/2, the completed function
//!
//!   Lambda(A,s) = pi^-s Gamma(s) zeta(A,s)
//!               = -1/s + det^-1/2/(s - n/2) + F_A(s) + det^-1/2 F_{A^-1}(n/2 - s)
//!
//! with F_B(sigma) = sum_{x != 0} (pi B[x])^-sigma Gamma(sigma, pi B[x]),
//! follows from splitting the Mellin integral of the theta function at y = 1
//! and applying the theta modular transformation. Every F term is a sum over
//! shells, so evaluation needs only shell data (m_k, a_k) plus a tail bound
//! from the enumerated shell-count growth (inflated x4). The returned value
//! is computed as
//!
//!   zeta(A,s) = pi^s (s Lambda) / Gamma(s+1)
//!
//! which is regular at s = 0 and gives zeta(A,0) = -1 exactly.
//!
//! The derivative at 0 follows by differentiating the same representation:
//! the product rule kills the dF/ds terms at s = 0, leaving
//!
//!   zeta'(A,0) = H(0) - gamma_euler - ln pi,
//!   H(0) = -(2/n) det^-1/2 + F_A(0) + det^-1/2 F_{A^-1}(n/2).

use crate::error::{Error, Result};
use crate::gram::{FloatForm, GramMatrix};
use crate::lattice::Lattice;
use crate::ratmat::Rat;
use crate::shells::{EnumConfig, Enumerator, ShellData, DEFAULT_BUDGET};
use crate::special::{gamma_upper_scaled, ln_gamma, CompSum};
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default truncation-error target: 2^-42.
pub const DEFAULT_EPS: f64 = 2.3e-13;

#[derive(Debug, Clone, Copy)]
pub struct ZetaParams {
    /// Absolute truncation target for the completed-sum tails.
    pub eps: f64,
    /// Enumeration budget per shell-data pass (canonical vectors).
    pub budget: u64,
}

impl Default for ZetaParams {
    fn default() -> Self {
        ZetaParams {
            eps: DEFAULT_EPS,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl ZetaParams {
    pub fn with_precision_bits(bits: u32) -> Self {
        ZetaParams {
            eps: 2f64.powi(-(bits.min(48) as i32)),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DirectSeries,
    Continued,
}

#[derive(Debug, Clone, Copy)]
pub struct ZetaValue {
    pub s: f64,
    pub value: f64,
    /// Rigorous-style truncation bound plus accumulated rounding allowance.
    pub err: f64,
    pub method: Method,
}

pub use crate::shells::shell_data_cached;

/// Float view of one side's shell data with its growth estimate.
#[derive(Debug, Clone)]
pub struct SideData {
    /// (norm, cardinality) pairs, both signs counted.
    pub shells: Vec<(f64, u64)>,
    /// Enumeration bound actually used.
    pub bound: f64,
    /// max over enumerated prefixes of N(m) / m^(n/2).
    pub growth: f64,
    pub min_norm: f64,
    /// Exact granularity of the norm values: norms are multiples of this
    /// (1/den of the cleared-denominator form, doubled for even lattices),
    /// so the true tail starts no earlier than bound + spacing.
    pub spacing: f64,
}

impl SideData {
    fn from_shell_data(data: &[ShellData], bound: f64, n: usize, spacing: f64) -> Self {
        let mut shells = Vec::with_capacity(data.len());
        let mut cum = 0u64;
        let mut growth_all: f64 = 0.0;
        let mut growth_deep: f64 = 0.0;
        for d in data {
            let m = crate::ratmat::rat_to_f64(&d.norm);
            cum += d.count;
            shells.push((m, d.count));
            let v = cum as f64 / m.powf(n as f64 / 2.0);
            growth_all = growth_all.max(v);
            if m >= bound / 2.0 {
                growth_deep = growth_deep.max(v);
            }
        }
        // The asymptotic count model is fit on the deeper half of the
        // enumerated range (the first shell of a dense lattice would inflate
        // it badly); the x4 safety factor sits on top in tail_bound.
        let growth = if growth_deep > 0.0 {
            growth_deep
        } else {
            growth_all
        };
        let min_norm = shells.first().map(|&(m, _)| m).unwrap_or(bound);
        SideData {
            shells,
            bound,
            growth,
            min_norm,
            spacing,
        }
    }

    /// Model-density tail bound for sum_{m > bound} a(m) w(m), where
    /// `weight(m)` must dominate the true per-vector weight and decrease on
    /// the tail. The model mass starts at bound + 0.9 * spacing (no norm can
    /// exist earlier) and is integrated in bands narrow enough that the
    /// left-edge weight does not overstate a decaying integrand; the
    /// enumerated growth is inflated x4.
    pub fn tail_bound(&self, n: usize, weight: impl Fn(f64) -> f64) -> f64 {
        let start = self.bound + 0.9 * self.spacing;
        let step = (self.spacing * 0.5).clamp(1e-3, 0.25);
        let half_n = n as f64 / 2.0;
        let mut total = 0.0;
        let mut prev_cum = start.powf(half_n);
        for j in 1..=60_000 {
            let m_left = start + (j - 1) as f64 * step;
            let m_right = start + j as f64 * step;
            let cum = m_right.powf(half_n);
            let band = 4.0 * self.growth * (cum - prev_cum);
            prev_cum = cum;
            let term = band * weight(m_left);
            total += term;
            if term.abs() < 1e-4 * total.abs() + 1e-300 && j > 8 {
                break;
            }
        }
        total
    }

    /// F_B(sigma) = sum over shells of a_k gus(sigma, pi m_k), with the tail
    /// bound and a rounding allowance.
    pub fn f_sum(&self, sigma: f64, n: usize) -> (f64, f64) {
        let mut cs = CompSum::new();
        for &(m, a) in &self.shells {
            cs.add(a as f64 * gamma_upper_scaled(sigma, PI * m));
        }
        let tail = self.tail_bound(n, |m| {
            let u = PI * m;
            gamma_upper_scaled(sigma, u)
        });
        (cs.value(), tail + cs.rounding_bound() + 1e-14 * cs.value().abs())
    }

    /// Direct Dirichlet series sum_k a_k m_k^-s with its tail bound
    /// (requires s > n/2).
    pub fn direct_sum(&self, s: f64, n: usize) -> (f64, f64) {
        let mut cs = CompSum::new();
        for &(m, a) in &self.shells {
            cs.add(a as f64 * m.powf(-s));
        }
        let half_n = n as f64 / 2.0;
        let tail = 4.0 * self.growth * half_n * self.bound.powf(half_n - s) / (s - half_n);
        (cs.value(), tail + cs.rounding_bound())
    }

    /// Theta sum sum_k a_k e^(-pi y m_k) (without the +1 of the origin).
    pub fn theta_sum(&self, y: f64, n: usize) -> (f64, f64) {
        let mut cs = CompSum::new();
        for &(m, a) in &self.shells {
            cs.add(a as f64 * (-PI * y * m).exp());
        }
        let tail = self.tail_bound(n, |m| (-PI * y * m).exp());
        (cs.value(), tail + cs.rounding_bound())
    }
}

/// Per-lattice analytic context: exact primal/dual Gram matrices plus lazily
/// deepened shell data on both sides.
pub struct ZetaEngine {
    pub lattice: Lattice,
    pub dual_gram: GramMatrix,
    n: usize,
    det: f64,
    /// ln(lambda^2) of the attached symbolic scale (0 when unscaled).
    ln_scale: f64,
}

impl ZetaEngine {
    pub fn new(lattice: &Lattice) -> Self {
        let dual_gram = lattice.gram.inverse();
        let det = crate::ratmat::rat_to_f64(&lattice.det());
        let ln_scale = lattice.scale.ln(&lattice.det());
        ZetaEngine {
            lattice: lattice.clone(),
            dual_gram,
            n: lattice.dim(),
            det,
            ln_scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// det of the unscaled exact Gram as f64.
    pub fn det_f64(&self) -> f64 {
        self.det
    }

    /// Multiplier (lambda^2)^(-s) translating unscaled values to the working
    /// form (Eq.-(3) scaling law).
    pub fn scale_factor(&self, s: f64) -> f64 {
        (-s * self.ln_scale).exp()
    }

    fn side_gram(&self, dual: bool) -> &GramMatrix {
        if dual {
            &self.dual_gram
        } else {
            &self.lattice.gram
        }
    }

    /// Shell data for one side up to `bound`, through the process cache.
    pub fn side_data(&self, dual: bool, bound: &Rat, budget: u64) -> Result<SideData> {
        let gram = self.side_gram(dual);
        let data = shell_data_cached(gram, bound, EnumConfig::with_budget(budget))?;
        Ok(SideData::from_shell_data(
            &data,
            crate::ratmat::rat_to_f64(bound),
            self.n,
            norm_spacing(gram),
        ))
    }

    fn min_norm_rat(&self, dual: bool, budget: u64) -> Result<Rat> {
        let gram = self.side_gram(dual);
        let data =
            crate::shells::first_k_shell_data_cached(gram, 1, EnumConfig::with_budget(budget))?;
        Ok(data[0].norm.clone())
    }

    /// Find a bound whose F-tail at `sigma` is below eps; deepen by doubling.
    fn side_for_eps(&self, dual: bool, sigma: f64, eps: f64, budget: u64) -> Result<SideData> {
        let m1 = self.min_norm_rat(dual, budget)?;
        let mut bound = &m1 * Rat::from_integer(2.into());
        for _ in 0..24 {
            let side = self.side_data(dual, &bound, budget)?;
            let tail = side.tail_bound(self.n, |m| gamma_upper_scaled(sigma, PI * m));
            if tail <= eps {
                return Ok(side);
            }
            bound = &bound * Rat::from_integer(2.into());
        }
        Err(Error::Resource(format!(
            "tail target {eps:.3e} unreachable within the shell budget"
        )))
    }

    /// Completed Lambda(A,s) of the *unscaled* form, from explicit per-side
    /// shell data. Returns (value, err).
    pub fn lambda_from_sides(&self, s: f64, primal: &SideData, dual: &SideData) -> (f64, f64) {
        let n2 = self.n as f64 / 2.0;
        let dets = self.det.powf(-0.5);
        let (fp, ep) = primal.f_sum(s, self.n);
        let (fd, ed) = dual.f_sum(n2 - s, self.n);
        let value = -1.0 / s + dets / (s - n2) + fp + dets * fd;
        (value, ep + dets * ed)
    }

    /// zeta of the working form at real s != n/2 via the continued
    /// representation, with explicit per-side data.
    pub fn zeta_from_sides(&self, s: f64, primal: &SideData, dual: &SideData) -> Result<ZetaValue> {
        let n2 = self.n as f64 / 2.0;
        if s == n2 {
            return Err(Error::Domain(format!("pole at s = n/2 = {n2}")));
        }
        if s == 0.0 {
            return Ok(ZetaValue {
                s,
                value: -1.0,
                err: 0.0,
                method: Method::Continued,
            });
        }
        let dets = self.det.powf(-0.5);
        let (fp, ep) = primal.f_sum(s, self.n);
        let (fd, ed) = dual.f_sum(n2 - s, self.n);
        let h = dets / (s - n2) + fp + dets * fd;
        let err_h = ep + dets * ed;
        let g = -1.0 + s * h;
        // zeta = pi^s G / Gamma(s+1); Gamma(s+1) via ln_gamma with sign
        // handling for s < -1 (between negative-integer poles).
        let (inv_gamma, sign) = inv_gamma_s_plus_1(s);
        let factor = (s * PI.ln() - 0.0).exp() * inv_gamma * sign;
        let scale = self.scale_factor(s);
        let value = factor * g * scale;
        let err = factor.abs() * s.abs() * err_h * scale + 1e-15 * value.abs();
        Ok(ZetaValue {
            s,
            value,
            err,
            method: Method::Continued,
        })
    }

    /// Analytically continued evaluation at real s (s != n/2), deepening the
    /// shell data until the truncation target is met.
    pub fn zeta(&self, s: f64, params: ZetaParams) -> Result<ZetaValue> {
        let n2 = self.n as f64 / 2.0;
        if s == n2 {
            return Err(Error::Domain(format!("pole at s = n/2 = {n2}")));
        }
        if s == 0.0 {
            return Ok(ZetaValue {
                s,
                value: -1.0,
                err: 0.0,
                method: Method::Continued,
            });
        }
        let primal = self.side_for_eps(false, s, params.eps / 2.0, params.budget)?;
        let dets = self.det.powf(-0.5);
        let dual_eps = params.eps / (2.0 * dets).max(1e-300);
        let dual = self.side_for_eps(true, n2 - s, dual_eps, params.budget)?;
        self.zeta_from_sides(s, &primal, &dual)
    }

    /// Direct shell summation, valid for s > n/2.
    pub fn zeta_direct(&self, s: f64, params: ZetaParams) -> Result<ZetaValue> {
        let n2 = self.n as f64 / 2.0;
        if s <= n2 {
            return Err(Error::Domain(format!(
                "direct series needs s > n/2 = {n2}, got {s}"
            )));
        }
        let m1 = self.min_norm_rat(false, params.budget)?;
        let mut bound = &m1 * Rat::from_integer(2.into());
        for _ in 0..24 {
            let side = self.side_data(false, &bound, params.budget)?;
            let (value, err) = side.direct_sum(s, self.n);
            if err <= params.eps {
                let scale = self.scale_factor(s);
                return Ok(ZetaValue {
                    s,
                    value: value * scale,
                    err: err * scale,
                    method: Method::DirectSeries,
                });
            }
            bound = &bound * Rat::from_integer(2.into());
        }
        Err(Error::Resource(format!(
            "direct-series target {:.3e} unreachable within the shell budget",
            params.eps
        )))
    }

    /// zeta'(working form, 0): H(0) - gamma - ln pi + ln(lambda^2).
    pub fn zeta_derivative_at_0(&self, params: ZetaParams) -> Result<(f64, f64)> {
        let n2 = self.n as f64 / 2.0;
        let primal = self.side_for_eps(false, 0.0, params.eps / 2.0, params.budget)?;
        let dets = self.det.powf(-0.5);
        let dual_eps = params.eps / (2.0 * dets).max(1e-300);
        let dual = self.side_for_eps(true, n2, dual_eps, params.budget)?;
        let (h0, err) = self.h_zero_from_sides(&primal, &dual);
        Ok((h0 - EULER_GAMMA - PI.ln() + self.ln_scale, err))
    }

    /// H(0) from explicit sides (shared with the path evaluator).
    pub fn h_zero_from_sides(&self, primal: &SideData, dual: &SideData) -> (f64, f64) {
        let n2 = self.n as f64 / 2.0;
        let dets = self.det.powf(-0.5);
        let (fp, ep) = primal.f_sum(0.0, self.n);
        let (fd, ed) = dual.f_sum(n2, self.n);
        let h0 = -dets / n2 + fp + dets * fd;
        (h0, ep + dets * ed)
    }
}

/// Float view of the exact norm granularity.
pub fn norm_spacing(gram: &GramMatrix) -> f64 {
    crate::ratmat::rat_to_f64(&crate::shells::exact_norm_spacing(gram))
}

/// 1/Gamma(s+1) with sign, finite everywhere (zero at negative integers).
fn inv_gamma_s_plus_1(s: f64) -> (f64, f64) {
    let x = s + 1.0;
    if x > 0.0 {
        ((-ln_gamma(x)).exp(), 1.0)
    } else if x == x.floor() {
        (0.0, 1.0)
    } else {
        // Gamma(x) sign for x < 0: (-1)^floor(x) pattern via reflection.
        let k = (-x.floor()) as i64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        ((-ln_gamma(x)).exp(), sign)
    }
}

/// Sign/zero scan of zeta over a uniform grid in the critical strip.
#[derive(Debug, Clone)]
pub struct StripScan {
    pub grid: Vec<f64>,
    pub values: Vec<ZetaValue>,
    /// true iff every grid value is certainly negative (value + err < 0).
    pub all_negative_certain: bool,
    /// (s_lo, s_hi, refined zero) for each certain sign change.
    pub zero_brackets: Vec<(f64, f64, f64)>,
}

pub fn strip_scan(engine: &ZetaEngine, grid_points: usize, params: ZetaParams) -> Result<StripScan> {
    if grid_points < 3 {
        return Err(Error::Domain("strip scan needs at least 3 grid points".into()));
    }
    let n2 = engine.dim() as f64 / 2.0;
    let delta = n2 / (grid_points as f64 + 1.0);
    let grid: Vec<f64> = (1..=grid_points).map(|j| delta * j as f64).collect();
    let mut values = Vec::with_capacity(grid.len());
    for &s in &grid {
        values.push(engine.zeta(s, params)?);
    }
    let all_negative_certain = values.iter().all(|v| v.value + v.err < 0.0);
    let mut zero_brackets = Vec::new();
    for w in 0..grid.len() - 1 {
        let a = &values[w];
        let b = &values[w + 1];
        let sa = certain_sign(a);
        let sb = certain_sign(b);
        if let (Some(sa), Some(sb)) = (sa, sb) {
            if sa != sb {
                let zero = bisect_zero(engine, grid[w], grid[w + 1], params)?;
                zero_brackets.push((grid[w], grid[w + 1], zero));
            }
        }
    }
    Ok(StripScan {
        grid,
        values,
        all_negative_certain,
        zero_brackets,
    })
}

fn certain_sign(v: &ZetaValue) -> Option<i32> {
    if v.value - v.err > 0.0 {
        Some(1)
    } else if v.value + v.err < 0.0 {
        Some(-1)
    } else {
        None
    }
}

fn bisect_zero(engine: &ZetaEngine, mut lo: f64, mut hi: f64, params: ZetaParams) -> Result<f64> {
    let f_lo = engine.zeta(lo, params)?.value;
    let sign_lo = f_lo.signum();
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let fm = engine.zeta(mid, params)?.value;
        if fm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Streamed per-vector sums of gus(sigma, pi * B_i[x]) over the canonical
/// vectors of `gram` with norm <= bound, for several forms at once.
/// Deterministic: per-job compensated sums merged in job order.
pub fn f_sums_many_forms(
    gram: &GramMatrix,
    forms: &[FloatForm],
    sigma: f64,
    bound: &Rat,
    budget: u64,
) -> Result<Vec<(f64, f64)>> {
    let e = Enumerator::new(gram)?;
    let k = forms.len();
    let (sums, _) = e.stream_fold(
        bound,
        budget,
        || vec![CompSum::new(); k],
        |acc, x, _norm| {
            for (cs, form) in acc.iter_mut().zip(forms) {
                let b = form.eval(x);
                cs.add(2.0 * gamma_upper_scaled(sigma, PI * b));
            }
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.add(y.value());
            }
            a
        },
    )?;
    Ok(sums
        .iter()
        .map(|cs| (cs.value(), cs.rounding_bound()))
        .collect())
}

/// Streamed theta sums sum_x e^(-pi y B_i[x]) (origin excluded) for several
/// forms.
pub fn theta_sums_many_forms(
    gram: &GramMatrix,
    forms: &[FloatForm],
    y: f64,
    bound: &Rat,
    budget: u64,
) -> Result<Vec<(f64, f64)>> {
    let e = Enumerator::new(gram)?;
    let k = forms.len();
    let (sums, _) = e.stream_fold(
        bound,
        budget,
        || vec![CompSum::new(); k],
        |acc, x, _norm| {
            for (cs, form) in acc.iter_mut().zip(forms) {
                let b = form.eval(x);
                cs.add(2.0 * (-PI * y * b).exp());
            }
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.add(y.value());
            }
            a
        },
    )?;
    Ok(sums
        .iter()
        .map(|cs| (cs.value(), cs.rounding_bound()))
        .collect())
}

/// CSV row emission for plots: (s, zeta, err).
pub fn zeta_csv(values: &[ZetaValue]) -> String {
    let mut out = String::from("s,zeta,err\n");
    for v in values {
        out.push_str(&format!("{:.12e},{:.12e},{:.3e}\n", v.s, v.value, v.err));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_lattice;

    fn engine(name: &str, dim: Option<usize>) -> ZetaEngine {
        ZetaEngine::new(&catalog_lattice(name, dim).unwrap())
    }

    #[test]
    fn zeta_z1_at_1_is_pi_squared_over_3() {
        let e = engine("Zn", Some(1));
        let v = e.zeta(1.0, ZetaParams::default()).unwrap();
        let expect = PI * PI / 3.0;
        assert!((v.value - expect).abs() < 1e-12, "{} vs {expect}", v.value);
        assert!(v.err < 1e-12);
    }

    #[test]
    fn zeta_at_zero_is_minus_one() {
        for (name, dim) in [("Zn", Some(3)), ("A2", None), ("E8", None)] {
            let e = engine(name, dim);
            let v = e.zeta(0.0, ZetaParams::default()).unwrap();
            assert_eq!(v.value, -1.0);
            assert_eq!(v.err, 0.0);
        }
    }

    #[test]
    fn pole_is_an_error() {
        let e = engine("A2", None);
        assert!(e.zeta(1.0, ZetaParams::default()).is_err());
    }

    #[test]
    fn direct_and_continued_agree_above_pole() {
        let e = engine("E8", None);
        let s = 6.0;
        let cont = e.zeta(s, ZetaParams::default()).unwrap();
        let dir = e
            .zeta_direct(s, ZetaParams::default().eps(5e-2))
            .unwrap();
        assert!(
            (cont.value - dir.value).abs() <= cont.err + dir.err,
            "{} vs {} (errs {} {})",
            cont.value,
            dir.value,
            cont.err,
            dir.err
        );
    }

    #[test]
    fn scaling_law() {
        // zeta(lambda L, s) = lambda^-2s zeta(L, s): scale the Gram by 4 (lambda^2 = 4).
        let l = catalog_lattice("D4", None).unwrap();
        let scaled = l.scaled_gram(&Rat::from_integer(4.into())).unwrap();
        let e1 = ZetaEngine::new(&l);
        let e2 = ZetaEngine::new(&scaled);
        for s in [1.0, 3.0] {
            let a = e1.zeta(s, ZetaParams::default()).unwrap();
            let b = e2.zeta(s, ZetaParams::default()).unwrap();
            let expect = 4f64.powf(-s) * a.value;
            assert!(
                (b.value - expect).abs() <= 4f64.powf(-s) * a.err + b.err,
                "s={s}: {} vs {expect}",
                b.value
            );
        }
    }

    #[test]
    fn functional_equation_residual_small() {
        // Lambda(A,s) = det^-1/2 Lambda(A^-1, n/2 - s), matched truncation.
        let l = catalog_lattice("D4", None).unwrap();
        let e = ZetaEngine::new(&l);
        let ed = ZetaEngine::new(&l.dual());
        let bound = Rat::from_integer(12.into());
        let bound_dual = Rat::from_integer(6.into());
        for s in [0.5, 1.0, 1.5] {
            let p = e.side_data(false, &bound, DEFAULT_BUDGET).unwrap();
            let d = e.side_data(true, &bound_dual, DEFAULT_BUDGET).unwrap();
            let (lhs, lerr) = e.lambda_from_sides(s, &p, &d);
            let pd = ed.side_data(false, &bound_dual, DEFAULT_BUDGET).unwrap();
            let dd = ed.side_data(true, &bound, DEFAULT_BUDGET).unwrap();
            let (rhs_raw, rerr) = ed.lambda_from_sides(2.0 - s, &pd, &dd);
            let dets = e.det_f64().powf(-0.5);
            let rhs = dets * rhs_raw;
            assert!(
                (lhs - rhs).abs() <= (lerr + dets * rerr).max(1e-10),
                "s={s}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn derivative_at_zero_z1() {
        // zeta(Z,s) = 2 zeta_R(2s): zeta'(0) = 4 zeta_R'(0) = -2 ln(2 pi).
        let e = engine("Zn", Some(1));
        let (d, err) = e.zeta_derivative_at_0(ZetaParams::default()).unwrap();
        let expect = -2.0 * (2.0 * PI).ln();
        assert!((d - expect).abs() < 1e-10 + err, "{d} vs {expect}");
    }

    #[test]
    fn derivative_matches_central_difference() {
        let e = engine("A2", None);
        let (d, _) = e.zeta_derivative_at_0(ZetaParams::default()).unwrap();
        let h = 1e-4;
        let p = e.zeta(h, ZetaParams::default()).unwrap().value;
        let m = e.zeta(-h, ZetaParams::default()).unwrap().value;
        let fd = (p - m) / (2.0 * h);
        assert!((d - fd).abs() < 1e-6, "{d} vs {fd}");
    }

    #[test]
    fn strip_scan_d4_negative() {
        let l = catalog_lattice("D4", None).unwrap().rescale_to_covolume_one();
        let e = ZetaEngine::new(&l);
        let scan = strip_scan(&e, 11, ZetaParams::default()).unwrap();
        assert!(scan.all_negative_certain);
        assert!(scan.zero_brackets.is_empty());
    }

    #[test]
    fn zn2_factorization_oracle() {
        // zeta(Z^2, s) = 4 zeta_R(s) beta(s); reference at s = 1.5 from
        // mpmath: 4 * 2.6123753486854883 * 0.8645026534612020 =
        // 9.033621683100950.
        let e = engine("Zn", Some(2));
        let v = e.zeta(1.5, ZetaParams::default()).unwrap();
        let expect = 9.033_621_683_100_950;
        assert!((v.value - expect).abs() < 1e-9 + v.err, "{}", v.value);
    }
}
