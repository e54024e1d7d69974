//! Exact enumeration of lattice shells.
//!
//! A floating Cholesky factor prunes the search tree; membership and norm
//! classification use exact integer evaluation of x' G x on the
//! cleared-denominator form, so shell data is exact. Only one of {x, -x} is
//! enumerated (the last nonzero coordinate is positive); cardinalities count
//! both signs.

use crate::error::{Error, Result};
use crate::gram::{GramMatrix, IntForm};
use crate::lattice::Lattice;
use crate::ratmat::Rat;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, LazyLock, Mutex};

/// Default cap on the number of (canonical) vectors an enumeration may
/// accept before reporting a resource error.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Relative inflation applied to the pruning radius so float rounding can
/// never exclude a vector whose exact norm is within the bound.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct EnumConfig {
    pub budget: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            budget: DEFAULT_BUDGET,
        }
    }
}

impl EnumConfig {
    pub fn with_budget(budget: u64) -> Self {
        EnumConfig { budget }
    }
}

/// Exact per-shell data: the norm m_k and cardinality a_k (both signs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellData {
    pub norm: Rat,
    pub count: u64,
}

/// A fully materialized shell: vectors are the canonical halves, in
/// lexicographic order; `count` still counts both signs.
#[derive(Debug, Clone)]
pub struct Shell {
    pub index: usize,
    pub norm: Rat,
    pub count: u64,
    pub vectors: Option<Vec<Vec<i64>>>,
}

impl Shell {
    /// Expand the canonical half to the full +-pair list.
    pub fn expanded_vectors(&self) -> Option<Vec<Vec<i64>>> {
        self.vectors.as_ref().map(|vs| {
            let mut out = Vec::with_capacity(vs.len() * 2);
            for v in vs {
                out.push(v.clone());
                out.push(v.iter().map(|&c| -c).collect());
            }
            out
        })
    }
}

#[derive(Debug, Clone)]
pub struct ShellList {
    pub shells: Vec<Shell>,
    /// Every vector with 0 < norm <= bound is accounted for.
    pub bound: Rat,
}

impl ShellList {
    pub fn data(&self) -> Vec<ShellData> {
        self.shells
            .iter()
            .map(|s| ShellData {
                norm: s.norm.clone(),
                count: s.count,
            })
            .collect()
    }
}

/// Cholesky-based exact enumerator for one Gram matrix. The integer form is
/// internally LLL-reduced (a unimodular change of basis, the classic
/// Fincke-Pohst preprocessing) and coordinates are permuted so positions
/// with large diagonal entries are fixed first; both transforms are undone
/// on emission, and vectors are sign-normalized so the last nonzero entry in
/// original coordinates is positive.
pub struct Enumerator {
    n: usize,
    /// Reduced-and-permuted cleared-denominator form.
    form: IntForm,
    /// A = U' Q U with U unit upper triangular: q[i] and u[i*n+j] for j > i.
    q: Vec<f64>,
    u: Vec<f64>,
    /// Diagonal of the exact inverse of the reduced-permuted form (box
    /// bounds for the walker's coordinates).
    inv_diag: Vec<f64>,
    /// perm[pos] = reduced-basis row index enumerated at tree position pos.
    perm: Vec<usize>,
    /// Rows of the unimodular reduction transform: reduced basis vector i =
    /// sum_j transform[i][j] * (original basis vector j). None when trivial.
    transform: Option<Vec<Vec<i64>>>,
}

impl Enumerator {
    pub fn new(gram: &GramMatrix) -> Result<Self> {
        let n = gram.dim();
        let form = gram.int_form_i64().ok_or_else(|| {
            Error::Resource("Gram entries too large for exact i64 enumeration".into())
        })?;
        let reduction = crate::reduce::reduce_gram(n, &form.mat);
        let (red_mat, transform) = if reduction.nontrivial {
            (reduction.gram, Some(reduction.u))
        } else {
            (form.mat.clone(), None)
        };
        // Ascending diagonal: the last-fixed positions carry the largest
        // entries, which tightens ranges near the root of the search tree.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&a, &b| {
            red_mat[a * n + a]
                .cmp(&red_mat[b * n + b])
                .then(a.cmp(&b))
        });
        let mut pm = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                pm[i * n + j] = red_mat[perm[i] * n + perm[j]];
            }
        }
        let form = IntForm {
            n,
            den: form.den,
            mat: pm,
        };
        let af: Vec<f64> = form.mat.iter().map(|&v| v as f64 / form.den as f64).collect();
        let (q, u) = cholesky_utqu(n, &af).ok_or_else(|| {
            Error::Domain("floating Cholesky failed; matrix near-singular".into())
        })?;
        // Exact inverse of the reduced-permuted form for box bounds.
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| form.mat[i * n + j]).collect())
            .collect();
        let red_gram = GramMatrix::new(crate::ratmat::RatMat::from_i64_rows(&rows))
            .map_err(|e| Error::Domain(format!("reduced form invalid: {e}")))?;
        let inv = red_gram.inverse();
        // The den cancels in bound * inv_diag, so scale by den here.
        let inv_diag = (0..n)
            .map(|i| crate::ratmat::rat_to_f64(inv.entry(i, i)) * form.den as f64)
            .collect();
        Ok(Enumerator {
            n,
            form,
            q,
            u,
            inv_diag,
            perm,
            transform,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn denominator(&self) -> i64 {
        self.form.den
    }

    /// Largest |x_i| that can occur within `bound`, plus one for safety.
    fn coord_bound(&self, bound_f: f64) -> i64 {
        let mx = self
            .inv_diag
            .iter()
            .map(|&d| (bound_f * d).max(0.0).sqrt())
            .fold(0.0f64, f64::max);
        mx.ceil() as i64 + 1
    }

    fn check_i64_safety(&self, bound_f: f64) -> Result<()> {
        let b = self.coord_bound(bound_f) as i128;
        let gmax = self.form.mat.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as i128;
        let worst = (self.n as i128) * (self.n as i128) * gmax * b * b;
        if worst > (i64::MAX as i128) / 4 {
            return Err(Error::Resource(
                "enumeration bound too large for exact i64 arithmetic".into(),
            ));
        }
        Ok(())
    }

    /// Stream every canonical vector with 0 < norm <= bound into per-job
    /// accumulators, merging in deterministic job order. Returns the merged
    /// accumulator and the number of canonical vectors accepted.
    pub fn stream_fold<Acc, Init, Fold, Merge>(
        &self,
        bound: &Rat,
        budget: u64,
        init: Init,
        fold: Fold,
        merge: Merge,
    ) -> Result<(Acc, u64)>
    where
        Acc: Send,
        Init: Fn() -> Acc + Sync,
        Fold: Fn(&mut Acc, &[i64], i64) + Sync,
        Merge: Fn(Acc, Acc) -> Acc,
    {
        if !bound.is_positive() {
            return Err(Error::Domain("enumeration bound must be positive".into()));
        }
        // Exact integer bound: x accepted iff 0 < x'Gx <= bound * den.
        let bound_num_rat = bound * Rat::from_integer(self.form.den.into());
        let bound_num = bound_num_rat.floor().to_integer().to_i64().ok_or_else(|| {
            Error::Resource("enumeration bound out of i64 range".into())
        })?;
        if bound_num <= 0 {
            // No nonzero vector can have norm <= bound.
            return Ok((init(), 0));
        }
        let bound_f = bound_num as f64 / self.form.den as f64;
        self.check_i64_safety(bound_f)?;
        let radius = bound_f * (1.0 + PRUNE_SLACK) + PRUNE_SLACK;

        let jobs = self.make_jobs(radius);
        let accepted = AtomicU64::new(0);
        let results: Result<Vec<(Acc, u64)>> = jobs
            .par_iter()
            .map(|prefix| {
                let mut acc = init();
                let mut walker = Walker::new(self, radius, bound_num, budget, &accepted);
                let count = walker.run(prefix, &mut acc, &fold)?;
                Ok((acc, count))
            })
            .collect();
        let results = results?;
        let mut total = 0u64;
        let mut merged: Option<Acc> = None;
        for (acc, c) in results {
            total += c;
            merged = Some(match merged {
                None => acc,
                Some(m) => merge(m, acc),
            });
        }
        if total > budget {
            return Err(Error::Resource(format!(
                "enumeration accepted {} vectors, over the budget of {}",
                total, budget
            )));
        }
        Ok((merged.unwrap_or_else(&init), total))
    }

    /// Job prefixes: values for the top coordinates, respecting the
    /// canonical-half constraint (last nonzero coordinate positive). The
    /// remaining zero-chain is enumerated as explicit deeper prefixes.
    fn make_jobs(&self, radius: f64) -> Vec<Vec<i64>> {
        let n = self.n;
        let mut jobs = Vec::new();
        // Deeper splits give rayon enough jobs to balance wildly different
        // subtree sizes on few cores.
        let split_levels = match n {
            0..=7 => 1,
            8..=15 => 2,
            _ => 3,
        };
        // Prefix = values for coordinates n-1, n-2, ... (highest first).
        // expand(prefix, zero_prefix): push jobs fixing the next level.
        fn expand(
            e: &Enumerator,
            radius: f64,
            jobs: &mut Vec<Vec<i64>>,
            prefix: Vec<i64>,
            split_levels: usize,
        ) {
            let n = e.n;
            let level = n - 1 - prefix.len();
            let depth = prefix.len();
            let all_zero = prefix.iter().all(|&v| v == 0);
            if depth == split_levels && !all_zero {
                jobs.push(prefix);
                return;
            }
            if depth >= split_levels && all_zero {
                if level == 0 {
                    // Only coordinate left: positive values, one job.
                    jobs.push(prefix);
                    return;
                }
                // Keep splitting the zero chain one level at a time.
            }
            // Range of x_level given the prefix, from the float factor.
            let (rho, center) = e.partial_state(&prefix);
            if rho > radius {
                return;
            }
            let halfwidth = ((radius - rho) / e.q[level]).sqrt() + 1e-9;
            let lo_f = -center - halfwidth;
            let hi_f = -center + halfwidth;
            let lo = lo_f.floor() as i64;
            let hi = hi_f.ceil() as i64;
            let lo = if all_zero { 0.max(lo) } else { lo };
            for v in lo..=hi {
                let mut p = prefix.clone();
                p.push(v);
                if p.iter().all(|&x| x == 0) {
                    if level == 0 {
                        continue; // the zero vector
                    }
                    expand(e, radius, jobs, p, split_levels);
                } else if p.len() >= split_levels {
                    jobs.push(p);
                } else {
                    expand(e, radius, jobs, p, split_levels);
                }
            }
        }
        expand(self, radius, &mut jobs, Vec::new(), split_levels);
        jobs
    }

    /// Float partial norm and center at the level below a prefix.
    fn partial_state(&self, prefix: &[i64]) -> (f64, f64) {
        let n = self.n;
        let mut rho = 0.0;
        // y_k = x_k + sum_{j>k} u_kj x_j for fixed top coordinates.
        for (d, _) in prefix.iter().enumerate() {
            let k = n - 1 - d;
            let mut y = prefix[d] as f64;
            for (dj, xj) in prefix.iter().enumerate().take(d) {
                let j = n - 1 - dj;
                y += self.u[k * n + j] * *xj as f64;
            }
            rho += self.q[k] * y * y;
        }
        let level = n - 1 - prefix.len();
        let mut center = 0.0;
        for (dj, xj) in prefix.iter().enumerate() {
            let j = n - 1 - dj;
            center += self.u[level * n + j] * *xj as f64;
        }
        (rho, center)
    }
}

/// Depth-first walker for one job prefix. Maintains float partial sums for
/// pruning and exact i64 partial sums for acceptance.
struct Walker<'a> {
    e: &'a Enumerator,
    radius: f64,
    bound_num: i64,
    budget: u64,
    accepted: &'a AtomicU64,
    local: u64,
    unflushed: u64,
    x: Vec<i64>,
    /// Unpermuted, sign-normalized output coordinates.
    out: Vec<i64>,
    /// sigma[l*n + j] = sum over fixed coordinates i >= l of u[j][i] x_i,
    /// maintained for j < l; row n is the all-zero initial state.
    sigma: Vec<f64>,
    /// texact[l*n + j] = sum_{i >= l} G[j][i] x_i (exact, cleared denom).
    texact: Vec<i64>,
    /// nu[l] = exact partial norm over coordinates >= l.
    nu: Vec<i64>,
    /// rho[l] = float partial norm over coordinates >= l.
    rho: Vec<f64>,
}

const FLUSH_EVERY: u64 = 65_536;

impl<'a> Walker<'a> {
    fn new(
        e: &'a Enumerator,
        radius: f64,
        bound_num: i64,
        budget: u64,
        accepted: &'a AtomicU64,
    ) -> Self {
        let n = e.n;
        Walker {
            e,
            radius,
            bound_num,
            budget,
            accepted,
            local: 0,
            unflushed: 0,
            x: vec![0; n],
            out: vec![0; n],
            sigma: vec![0.0; (n + 1) * n],
            texact: vec![0; (n + 1) * n],
            nu: vec![0; n + 1],
            rho: vec![0.0; n + 1],
        }
    }

    /// Install the prefix (top coordinates) and walk the subtree. Returns the
    /// number of canonical vectors accepted by this job.
    fn run<Acc>(
        &mut self,
        prefix: &[i64],
        acc: &mut Acc,
        fold: &(impl Fn(&mut Acc, &[i64], i64) + Sync),
    ) -> Result<u64> {
        let n = self.e.n;
        for (d, &v) in prefix.iter().enumerate() {
            let level = n - 1 - d;
            self.enter(level, v);
            if self.rho[level] > self.radius {
                return Ok(0);
            }
        }
        let start_level = n - prefix.len();
        let zero_prefix = prefix.iter().all(|&v| v == 0);
        if start_level == 0 {
            if !zero_prefix {
                self.emit(acc, fold)?;
            }
        } else {
            self.descend(start_level - 1, zero_prefix, acc, fold)?;
        }
        self.accepted.fetch_add(self.unflushed, Ordering::Relaxed);
        self.unflushed = 0;
        Ok(self.local)
    }

    /// Fix x[level] = v: update sigma/texact/nu/rho for the level below.
    #[inline]
    fn enter(&mut self, level: usize, v: i64) {
        let n = self.e.n;
        self.x[level] = v;
        let vf = v as f64;
        for j in 0..level {
            self.sigma[level * n + j] =
                self.sigma[(level + 1) * n + j] + self.e.u[j * n + level] * vf;
        }
        let g = &self.e.form.mat;
        for j in 0..level {
            self.texact[level * n + j] = self.texact[(level + 1) * n + j] + g[j * n + level] * v;
        }
        let t_here = self.texact[(level + 1) * n + level];
        self.nu[level] = self.nu[level + 1] + 2 * v * t_here + g[level * n + level] * v * v;
        let y = vf + self.sigma[(level + 1) * n + level];
        self.rho[level] = self.rho[level + 1] + self.e.q[level] * y * y;
    }

    fn descend<Acc>(
        &mut self,
        level: usize,
        zero_prefix: bool,
        acc: &mut Acc,
        fold: &(impl Fn(&mut Acc, &[i64], i64) + Sync),
    ) -> Result<()> {
        let n = self.e.n;
        let slack = self.radius - self.rho[level + 1];
        if slack < 0.0 {
            return Ok(());
        }
        let center = self.sigma[(level + 1) * n + level];
        let halfwidth = (slack / self.e.q[level]).sqrt() + 1e-9;
        let mut lo = (-center - halfwidth).floor() as i64;
        let hi = (-center + halfwidth).ceil() as i64;
        if zero_prefix && lo < 0 {
            lo = 0;
        }
        for v in lo..=hi {
            self.enter(level, v);
            if self.rho[level] > self.radius {
                continue;
            }
            let still_zero = zero_prefix && v == 0;
            if level == 0 {
                if !still_zero {
                    self.emit(acc, fold)?;
                }
            } else {
                self.descend(level - 1, still_zero, acc, fold)?;
            }
        }
        Ok(())
    }

    #[inline]
    fn emit<Acc>(
        &mut self,
        acc: &mut Acc,
        fold: &(impl Fn(&mut Acc, &[i64], i64) + Sync),
    ) -> Result<()> {
        let norm_num = self.nu[0];
        debug_assert!(norm_num > 0);
        if norm_num <= self.bound_num {
            let n = self.e.n;
            match &self.e.transform {
                None => {
                    for (pos, &orig) in self.e.perm.iter().enumerate() {
                        self.out[orig] = self.x[pos];
                    }
                }
                Some(transform) => {
                    self.out.fill(0);
                    for (pos, &ri) in self.e.perm.iter().enumerate() {
                        let v = self.x[pos];
                        if v != 0 {
                            let row = &transform[ri];
                            for j in 0..n {
                                self.out[j] += v * row[j];
                            }
                        }
                    }
                }
            }
            if self
                .out
                .iter()
                .rev()
                .find(|&&c| c != 0)
                .is_some_and(|&c| c < 0)
            {
                for c in self.out.iter_mut() {
                    *c = -*c;
                }
            }
            fold(acc, &self.out, norm_num);
            self.local += 1;
            self.unflushed += 1;
            if self.unflushed == FLUSH_EVERY {
                let total = self.accepted.fetch_add(FLUSH_EVERY, Ordering::Relaxed) + FLUSH_EVERY;
                self.unflushed = 0;
                if total > self.budget {
                    return Err(Error::Resource(format!(
                        "enumeration exceeded the vector-count budget of {}",
                        self.budget
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Float U'QU factorization (q strictly positive on success).
fn cholesky_utqu(n: usize, a: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut q = vec![0.0; n];
    let mut u = vec![0.0; n * n];
    for i in 0..n {
        let mut qi = a[i * n + i];
        for k in 0..i {
            qi -= q[k] * u[k * n + i] * u[k * n + i];
        }
        if !(qi > 0.0) {
            return None;
        }
        q[i] = qi;
        for j in (i + 1)..n {
            let mut v = a[i * n + j];
            for k in 0..i {
                v -= q[k] * u[k * n + i] * u[k * n + j];
            }
            u[i * n + j] = v / qi;
        }
    }
    Some((q, u))
}

/// Shell data (norms and cardinalities) for all shells with norm <= bound.
pub fn shell_data(gram: &GramMatrix, bound: &Rat, cfg: EnumConfig) -> Result<Vec<ShellData>> {
    let e = Enumerator::new(gram)?;
    let den = e.denominator();
    let (map, _) = e.stream_fold(
        bound,
        cfg.budget,
        BTreeMap::<i64, u64>::new,
        |m, _x, norm| {
            *m.entry(norm).or_insert(0) += 2;
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    )?;
    Ok(map
        .into_iter()
        .map(|(num, count)| ShellData {
            norm: Rat::new(num.into(), den.into()),
            count,
        })
        .collect())
}

/// Materialization threshold per the streaming design: shells above this
/// cardinality keep no vector list.
pub const MATERIALIZE_LIMIT: u64 = 1_000_000;

/// Enumerate all shells with norm <= bound. Vectors are materialized for
/// shells with at most `MATERIALIZE_LIMIT` vectors.
pub fn enumerate_shells(lattice: &Lattice, bound: &Rat, cfg: EnumConfig) -> Result<ShellList> {
    enumerate_shells_gram(&lattice.gram, bound, cfg)
}

pub fn enumerate_shells_gram(gram: &GramMatrix, bound: &Rat, cfg: EnumConfig) -> Result<ShellList> {
    let e = Enumerator::new(gram)?;
    let den = e.denominator();
    type Acc = BTreeMap<i64, (u64, Vec<Vec<i64>>)>;
    let (map, _) = e.stream_fold(
        bound,
        cfg.budget,
        Acc::new,
        |m, x, norm| {
            let entry = m.entry(norm).or_insert_with(|| (0, Vec::new()));
            entry.0 += 2;
            if (entry.0 / 2) <= MATERIALIZE_LIMIT {
                entry.1.push(x.to_vec());
            }
        },
        |mut a, b| {
            for (k, (c, vs)) in b {
                let entry = a.entry(k).or_insert_with(|| (0, Vec::new()));
                entry.0 += c;
                entry.1.extend(vs);
            }
            a
        },
    )?;
    let mut shells = Vec::new();
    for (idx, (num, (count, mut vecs))) in map.into_iter().enumerate() {
        let vectors = if count / 2 <= MATERIALIZE_LIMIT && (vecs.len() as u64) == count / 2 {
            vecs.sort_unstable();
            Some(vecs)
        } else {
            None
        };
        shells.push(Shell {
            index: idx + 1,
            norm: Rat::new(num.into(), den.into()),
            count,
            vectors,
        });
    }
    Ok(ShellList {
        shells,
        bound: bound.clone(),
    })
}

/// Exactly the first K shells in increasing norm order, by adaptive bound
/// doubling until K complete shells are found.
pub fn first_k_shells(lattice: &Lattice, k: usize, cfg: EnumConfig) -> Result<ShellList> {
    first_k_shells_gram(&lattice.gram, k, cfg)
}

pub fn first_k_shells_gram(gram: &GramMatrix, k: usize, cfg: EnumConfig) -> Result<ShellList> {
    if k == 0 {
        return Err(Error::Domain("shell count must be >= 1".into()));
    }
    // Some basis vector e_i realizes the minimal diagonal entry, so at least
    // one shell exists within that bound.
    let mut bound = (0..gram.dim())
        .map(|i| gram.entry(i, i).clone())
        .min()
        .expect("nonempty diagonal");
    loop {
        let list = enumerate_shells_gram(gram, &bound, cfg)?;
        if list.shells.len() >= k {
            let shells = list.shells.into_iter().take(k).collect::<Vec<_>>();
            let bound = shells.last().unwrap().norm.clone();
            return Ok(ShellList { shells, bound });
        }
        // Gentle growth: a factor of 2 can overshoot into enormous shells.
        bound = &bound * Rat::new(3.into(), 2.into());
    }
}

/// Shell-data-only variant of `first_k_shells` (cheap for huge shells).
pub fn first_k_shell_data(gram: &GramMatrix, k: usize, cfg: EnumConfig) -> Result<Vec<ShellData>> {
    if k == 0 {
        return Err(Error::Domain("shell count must be >= 1".into()));
    }
    let mut bound = (0..gram.dim())
        .map(|i| gram.entry(i, i).clone())
        .min()
        .expect("nonempty diagonal");
    loop {
        let data = shell_data(gram, &bound, cfg)?;
        if data.len() >= k {
            return Ok(data.into_iter().take(k).collect());
        }
        bound = &bound * Rat::new(3.into(), 2.into());
    }
}


/// Process-wide shell-data cache: heavy enumerations for a Gram matrix are
/// shared between engines and checks (keyed by the exact matrix and bound).
static SHELL_CACHE: LazyLock<Mutex<HashMap<(String, String), Arc<Vec<ShellData>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn gram_key(g: &GramMatrix) -> String {
    let mut s = String::with_capacity(g.dim() * g.dim() * 4);
    s.push_str(&g.dim().to_string());
    for i in 0..g.dim() {
        for j in i..g.dim() {
            s.push(';');
            s.push_str(&crate::ratmat::format_rat(g.entry(i, j)));
        }
    }
    s
}

pub fn shell_data_cached(
    gram: &GramMatrix,
    bound: &Rat,
    cfg: EnumConfig,
) -> Result<Arc<Vec<ShellData>>> {
    let key = (gram_key(gram), crate::ratmat::format_rat(bound));
    if let Some(hit) = SHELL_CACHE.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let data = Arc::new(shell_data(gram, bound, cfg)?);
    SHELL_CACHE.lock().unwrap().insert(key, data.clone());
    Ok(data)
}

/// Exact norm granularity: norms lie in (1/den) Z, or (2/den) Z when the
/// cleared-denominator form is even (its diagonal is even).
pub fn exact_norm_spacing(gram: &GramMatrix) -> Rat {
    match gram.int_form_i64() {
        Some(form) => {
            let even = (0..form.n).all(|i| form.mat[i * form.n + i] % 2 == 0);
            Rat::new(if even { 2 } else { 1 }.into(), form.den.into())
        }
        None => Rat::new(1.into(), 1.into()),
    }
}

/// Cached variant of `first_k_shell_data` whose first bound guess is
/// m_1 + (k-1) * spacing (exact for lattices whose norms step uniformly;
/// harmlessly grown by 3/2 otherwise). Keeps deep enumerations shareable.
pub fn first_k_shell_data_cached(
    gram: &GramMatrix,
    k: usize,
    cfg: EnumConfig,
) -> Result<Vec<ShellData>> {
    if k == 0 {
        return Err(Error::Domain("shell count must be >= 1".into()));
    }
    let m1_bound = (0..gram.dim())
        .map(|i| gram.entry(i, i).clone())
        .min()
        .expect("nonempty diagonal");
    let first = shell_data_cached(gram, &m1_bound, cfg)?;
    let m1 = first
        .first()
        .map(|d| d.norm.clone())
        .expect("diagonal bound contains a lattice vector");
    if k == 1 && first.len() == 1 {
        return Ok(first.as_ref().clone());
    }
    let spacing = exact_norm_spacing(gram);
    let mut bound = &m1 + &spacing * Rat::from_integer(((k - 1) as i64).into());
    loop {
        let data = shell_data_cached(gram, &bound, cfg)?;
        if data.len() >= k {
            return Ok(data.iter().take(k).cloned().collect());
        }
        bound = &bound * Rat::new(3.into(), 2.into());
    }
}

/// Minimal norm m_1 and kissing number a_1.
pub fn min_norm_and_kissing(lattice: &Lattice, cfg: EnumConfig) -> Result<(Rat, u64)> {
    let data = first_k_shell_data(&lattice.gram, 1, cfg)?;
    Ok((data[0].norm.clone(), data[0].count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::GramMatrix;

    fn zn(n: usize) -> GramMatrix {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        GramMatrix::from_i64_rows(&rows).unwrap()
    }

    fn rat(v: i64) -> Rat {
        Rat::from_integer(v.into())
    }

    #[test]
    fn z2_unit_shell() {
        let data = shell_data(&zn(2), &rat(1), EnumConfig::default()).unwrap();
        assert_eq!(data.len(), 1);
        assert_eq!(data[0].norm, rat(1));
        assert_eq!(data[0].count, 4);
    }

    #[test]
    fn z1_first_three_shells() {
        let g = zn(1);
        let list = first_k_shells_gram(&g, 3, EnumConfig::default()).unwrap();
        let norms: Vec<Rat> = list.shells.iter().map(|s| s.norm.clone()).collect();
        assert_eq!(norms, vec![rat(1), rat(4), rat(9)]);
        assert!(list.shells.iter().all(|s| s.count == 2));
    }

    #[test]
    fn a2_shells() {
        let g = GramMatrix::from_i64_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let list = first_k_shells_gram(&g, 2, EnumConfig::default()).unwrap();
        assert_eq!(list.shells[0].norm, rat(2));
        assert_eq!(list.shells[0].count, 6);
        assert_eq!(list.shells[1].norm, rat(6));
        assert_eq!(list.shells[1].count, 6);
    }

    #[test]
    fn d4_kissing() {
        let g = GramMatrix::from_i64_rows(&[
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ])
        .unwrap();
        let data = shell_data(&g, &rat(2), EnumConfig::default()).unwrap();
        assert_eq!(data.len(), 1);
        assert_eq!(data[0].count, 24);
    }

    #[test]
    fn budget_error() {
        let g = zn(2);
        let err = shell_data(&g, &rat(100), EnumConfig::with_budget(3)).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("budget"), "{msg}");
    }

    #[test]
    fn vectors_are_canonical_and_sorted() {
        let g = zn(2);
        let list = enumerate_shells_gram(&g, &rat(2), EnumConfig::default()).unwrap();
        // shells: norm 1 {e1, e2}, norm 2 {(1,1),(1,-1)} canonical halves
        assert_eq!(list.shells[0].count, 4);
        assert_eq!(list.shells[1].count, 4);
        let v0 = list.shells[0].vectors.as_ref().unwrap();
        assert_eq!(v0.len(), 2);
        let mut sorted = v0.clone();
        sorted.sort();
        assert_eq!(*v0, sorted);
        for v in v0 {
            let last_nonzero = v.iter().rev().find(|&&c| c != 0).unwrap();
            assert!(*last_nonzero > 0);
        }
    }

    #[test]
    fn rational_gram_shells() {
        // dual of A2: (1/3) [[2,-1],[-1,2]]; min norm 2/3, kissing 6.
        let third = Rat::new(1.into(), 3.into());
        let m = crate::ratmat::RatMat::from_rows(vec![
            vec![&rat(2) * &third, -&third],
            vec![-&third, &rat(2) * &third],
        ]);
        let g = GramMatrix::new(m).unwrap();
        let data = first_k_shell_data(&g, 1, EnumConfig::default()).unwrap();
        assert_eq!(data[0].norm, Rat::new(2.into(), 3.into()));
        assert_eq!(data[0].count, 6);
    }
}
