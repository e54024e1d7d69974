//! Exact spherical-design certification for lattice shells.
//!
//! A shell holds a t-design (t even) iff its order-t moment tensor equals the
//! matching multiple of the symmetrized tensor powers of A^{-1}; in
//! quadratic-form coordinates the conditions are exact rational identities:
//!
//!   t=2:  sum xx'       = (a m / n) A^{-1}
//!   t=4:  sum x^(4)[ijkl] = a m^2/(n(n+2)) * (A~ij A~kl + A~ik A~jl + A~il A~jk)
//!   t=6:  sum x^(6)      = a m^3/(n(n+2)(n+4)) * (sum over the 15 pairings)
//!
//! where A~ = A^{-1}. The t=6 constant is forced by contracting the identity
//! with A tensor A tensor A. Defects are exact max-norms of difference
//! tensors. Moments are accumulated over streamed canonical vectors (each
//! counted with multiplicity 2; odd moments vanish by central symmetry).

use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::lattice::Lattice;
use crate::ratmat::{Rat, RatMat};
use crate::shells::{first_k_shell_data, EnumConfig, Enumerator, Shell, ShellData};
use num_traits::{Signed, ToPrimitive, Zero};

/// Index bookkeeping for symmetry-reduced tensors of degree 2, 4, 6.
pub struct TensorShapes {
    pub n: usize,
    /// Sorted pairs (i <= j) in lex order.
    pub pairs: Vec<(usize, usize)>,
    /// pair_offset[j] = index of the pair (j, j); pairs with first index >= j
    /// form the suffix starting there.
    pub pair_offset: Vec<usize>,
    /// Per-pair base offset into the degree-4 storage.
    pub quad_base: Vec<usize>,
    pub quad_len: usize,
    /// Sorted triples (i <= j <= k) in lex order.
    pub triples: Vec<(usize, usize, usize)>,
    pub triple_offset: Vec<usize>,
    pub sext_base: Vec<usize>,
    pub sext_len: usize,
}

impl TensorShapes {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        let mut pair_offset = vec![0usize; n + 1];
        for i in 0..n {
            pair_offset[i] = pairs.len();
            for j in i..n {
                pairs.push((i, j));
            }
        }
        pair_offset[n] = pairs.len();
        // Segment lengths round up to the SIMD block width so the rank
        // update kernels never run scalar remainders; padded slots only ever
        // accumulate zeros (panels are zero-padded past the true width).
        let pad = |v: usize| (v + BLOCK - 1) / BLOCK * BLOCK;
        let mut quad_base = Vec::with_capacity(pairs.len());
        let mut quad_len = 0usize;
        for &(_, j) in &pairs {
            quad_base.push(quad_len);
            quad_len += pad(pairs.len() - pair_offset[j]);
        }
        let mut triples = Vec::new();
        let mut triple_offset = vec![0usize; n + 1];
        for i in 0..n {
            triple_offset[i] = triples.len();
            for j in i..n {
                for k in j..n {
                    triples.push((i, j, k));
                }
            }
        }
        triple_offset[n] = triples.len();
        let mut sext_base = Vec::with_capacity(triples.len());
        let mut sext_len = 0usize;
        for &(_, _, k) in &triples {
            sext_base.push(sext_len);
            sext_len += pad(triples.len() - triple_offset[k]);
        }
        TensorShapes {
            n,
            pairs,
            pair_offset,
            quad_base,
            quad_len,
            triples,
            triple_offset,
            sext_base,
            sext_len,
        }
    }

    #[inline]
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.pair_offset[i] + (j - i)
    }

    /// Accumulate x^(2) into `t2` (canonical vector, multiplicity handled at
    /// comparison time). Wrapping arithmetic: callers pre-verify bounds.
    #[inline]
    pub fn add_t2(&self, t2: &mut [i64], x: &[i64]) {
        let mut idx = 0;
        for i in 0..self.n {
            let xi = x[i];
            for j in i..self.n {
                t2[idx] = t2[idx].wrapping_add(xi.wrapping_mul(x[j]));
                idx += 1;
            }
        }
    }

    /// Accumulate x^(4) into the i32 hot buffer (spilled to i64 by the
    /// caller before it can overflow; products are pre-verified to fit i32).
    #[inline]
    pub fn add_t4(&self, t4: &mut [i32], scratch: &mut [i32], x: &[i64]) {
        let npairs = self.pairs.len();
        let mut idx = 0;
        for i in 0..self.n {
            let xi = x[i] as i32;
            for j in i..self.n {
                scratch[idx] = xi.wrapping_mul(x[j] as i32);
                idx += 1;
            }
        }
        for (p, &(_, j)) in self.pairs.iter().enumerate() {
            let off = self.pair_offset[j];
            let pv = scratch[p];
            let base = self.quad_base[p];
            let seg = &mut t4[base..base + (npairs - off)];
            let src = &scratch[off..npairs];
            for (dst, &s) in seg.iter_mut().zip(src) {
                *dst = dst.wrapping_add(pv.wrapping_mul(s));
            }
        }
    }

    /// Accumulate x^(6) into the i32 hot buffer (same spill discipline).
    #[inline]
    pub fn add_t6(&self, t6: &mut [i32], scratch3: &mut [i32], x: &[i64]) {
        let ntr = self.triples.len();
        let mut idx = 0;
        for i in 0..self.n {
            let xi = x[i] as i32;
            for j in i..self.n {
                let xij = xi.wrapping_mul(x[j] as i32);
                for k in j..self.n {
                    scratch3[idx] = xij.wrapping_mul(x[k] as i32);
                    idx += 1;
                }
            }
        }
        for (t, &(_, _, k)) in self.triples.iter().enumerate() {
            let off = self.triple_offset[k];
            let tv = scratch3[t];
            let base = self.sext_base[t];
            let seg = &mut t6[base..base + (ntr - off)];
            let src = &scratch3[off..ntr];
            for (dst, &s) in seg.iter_mut().zip(src) {
                *dst = dst.wrapping_add(tv.wrapping_mul(s));
            }
        }
    }
}

/// Fully symmetric order-t moment tensor of a shell, exact.
#[derive(Debug, Clone)]
pub struct MomentTensor {
    pub degree: u32,
    pub n: usize,
    /// Entries on the symmetry-reduced (sorted multi-index) set, full-shell
    /// values (both signs counted).
    pub entries: Vec<Rat>,
}

impl MomentTensor {
    /// Contract twice against the form A: for the moment tensor of a shell of
    /// norm m this must equal m times the order-(t-2) moment tensor.
    pub fn contract_form(&self, shapes: &TensorShapes, a: &GramMatrix) -> MomentTensor {
        let n = self.n;
        match self.degree {
            4 => {
                let mut out = vec![Rat::zero(); shapes.pairs.len()];
                for (pi, &(i, j)) in shapes.pairs.iter().enumerate() {
                    let mut s = Rat::zero();
                    for k in 0..n {
                        for l in 0..n {
                            let v = self.get4(shapes, i, j, k, l);
                            s += v * a.entry(k, l);
                        }
                    }
                    out[pi] = s;
                }
                MomentTensor {
                    degree: 2,
                    n,
                    entries: out,
                }
            }
            2 => {
                let mut s = Rat::zero();
                for k in 0..n {
                    for l in 0..n {
                        s += self.get2(shapes, k, l) * a.entry(k, l);
                    }
                }
                MomentTensor {
                    degree: 0,
                    n,
                    entries: vec![s],
                }
            }
            _ => panic!("contract_form supports degrees 2 and 4"),
        }
    }

    pub fn get2(&self, shapes: &TensorShapes, i: usize, j: usize) -> &Rat {
        &self.entries[shapes.pair_index(i, j)]
    }

    pub fn get4(&self, shapes: &TensorShapes, i: usize, j: usize, k: usize, l: usize) -> &Rat {
        let mut v = [i, j, k, l];
        v.sort_unstable();
        let p = shapes.pair_index(v[0], v[1]);
        let q = shapes.pair_index(v[2], v[3]);
        // The segment for pair p starts at the pair (v1, v1).
        &self.entries[shapes.quad_base[p] + (q - shapes.pair_offset[v[1]])]
    }
}

#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub t: u32,
    pub pass: bool,
    /// Exact max-norm of the difference tensor; zero iff pass.
    pub defect: Rat,
}

#[derive(Debug, Clone)]
pub struct DesignCertificate {
    pub shell_index: usize,
    pub norm: Rat,
    pub count: u64,
    pub outcomes: Vec<DesignOutcome>,
    /// Largest verified even t in {0, 2, 4, 6} (downward closed by
    /// construction: testing stops at the first failing t).
    pub strength: u32,
}

#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub lattice: String,
    pub depth: usize,
    pub t_max: u32,
    pub certificates: Vec<DesignCertificate>,
    pub all_2_design: bool,
    pub all_4_design: bool,
}

/// Vectors buffered per panel before the rank-PANEL tensor update; amortizes
/// the per-segment loop overhead of the symmetric storage.
const PANEL: usize = 16;

/// Column block width of the rank-update kernels (segment padding unit).
const BLOCK: usize = 16;

/// Moment accumulators for one shell (canonical halves). Pair/triple
/// products of incoming vectors are buffered in panels; full panels are
/// folded into hot i32 tensors with a rank-PANEL update, and the hot tensors
/// spill into i64 totals every `flush_period` vectors, well before any i32
/// overflow is possible.
struct ShellAcc {
    canonical: u64,
    pending: u32,
    flush_period: u32,
    t2: Vec<i64>,
    panel2: Vec<i32>,
    panel2_rows: usize,
    scal2: Vec<i32>,
    t4_hot: Vec<i32>,
    t4: Vec<i64>,
    panel3: Vec<i32>,
    panel3_rows: usize,
    scal3: Vec<i32>,
    t6_hot: Vec<i32>,
    t6: Vec<i64>,
}

impl ShellAcc {
    fn new(shapes: &TensorShapes, t_max: u32, flush_period: u32) -> Self {
        let npairs = shapes.pairs.len();
        let ntriples = shapes.triples.len();
        // Panel rows are zero-padded by BLOCK so the rank update can read
        // full blocks past each segment's true width.
        let stride2 = npairs + BLOCK;
        let stride3 = ntriples + BLOCK;
        ShellAcc {
            canonical: 0,
            pending: 0,
            flush_period,
            t2: vec![0; npairs],
            panel2: if t_max >= 4 {
                vec![0; PANEL * stride2]
            } else {
                Vec::new()
            },
            panel2_rows: 0,
            scal2: if t_max >= 4 {
                vec![0; PANEL * npairs]
            } else {
                Vec::new()
            },
            t4_hot: if t_max >= 4 {
                vec![0; shapes.quad_len]
            } else {
                Vec::new()
            },
            t4: if t_max >= 4 {
                vec![0; shapes.quad_len]
            } else {
                Vec::new()
            },
            panel3: if t_max >= 6 {
                vec![0; PANEL * stride3]
            } else {
                Vec::new()
            },
            panel3_rows: 0,
            scal3: if t_max >= 6 {
                vec![0; PANEL * ntriples]
            } else {
                Vec::new()
            },
            t6_hot: if t_max >= 6 {
                vec![0; shapes.sext_len]
            } else {
                Vec::new()
            },
            t6: if t_max >= 6 {
                vec![0; shapes.sext_len]
            } else {
                Vec::new()
            },
        }
    }

    /// Buffer one vector (its degree-2 products, and degree-3 products when
    /// t=6 is tracked); flush panels and spill as needed.
    #[inline]
    fn push(&mut self, shapes: &TensorShapes, x: &[i64], t_max: u32) {
        self.canonical += 1;
        if t_max >= 4 {
            let npairs = shapes.pairs.len();
            let stride2 = npairs + BLOCK;
            let row = &mut self.panel2[self.panel2_rows * stride2..][..npairs];
            let mut idx = 0;
            for i in 0..shapes.n {
                let xi = x[i] as i32;
                for j in i..shapes.n {
                    row[idx] = xi.wrapping_mul(x[j] as i32);
                    idx += 1;
                }
            }
            self.panel2_rows += 1;
        } else {
            shapes.add_t2(&mut self.t2, x);
        }
        if t_max >= 6 {
            let ntriples = shapes.triples.len();
            let stride3 = ntriples + BLOCK;
            let row = &mut self.panel3[self.panel3_rows * stride3..][..ntriples];
            let mut idx = 0;
            for i in 0..shapes.n {
                let xi = x[i] as i32;
                for j in i..shapes.n {
                    let xij = xi.wrapping_mul(x[j] as i32);
                    for k in j..shapes.n {
                        row[idx] = xij.wrapping_mul(x[k] as i32);
                        idx += 1;
                    }
                }
            }
            self.panel3_rows += 1;
        }
        if self.panel2_rows == PANEL || self.panel3_rows == PANEL {
            self.flush_panels(shapes);
        }
        self.pending += 1;
        if self.pending >= self.flush_period {
            self.spill(shapes);
        }
    }

    fn flush_panels(&mut self, shapes: &TensorShapes) {
        if self.panel2_rows > 0 {
            let npairs = shapes.pairs.len();
            let stride2 = npairs + BLOCK;
            for v in 0..self.panel2_rows {
                let row = &self.panel2[v * stride2..][..npairs];
                for (t, &p) in self.t2.iter_mut().zip(row) {
                    *t += p as i64;
                }
                for (p, &val) in row.iter().enumerate() {
                    self.scal2[p * PANEL + v] = val;
                }
            }
            rank_update(
                &mut self.t4_hot,
                &self.panel2,
                &self.scal2,
                self.panel2_rows,
                stride2,
                shapes.pairs.len(),
                &shapes.quad_base,
                |p| shapes.pair_offset[shapes.pairs[p].1],
            );
            self.panel2_rows = 0;
        }
        if self.panel3_rows > 0 {
            let ntriples = shapes.triples.len();
            let stride3 = ntriples + BLOCK;
            for v in 0..self.panel3_rows {
                let row = &self.panel3[v * stride3..][..ntriples];
                for (p, &val) in row.iter().enumerate() {
                    self.scal3[p * PANEL + v] = val;
                }
            }
            rank_update(
                &mut self.t6_hot,
                &self.panel3,
                &self.scal3,
                self.panel3_rows,
                stride3,
                shapes.triples.len(),
                &shapes.sext_base,
                |t| shapes.triple_offset[shapes.triples[t].2],
            );
            self.panel3_rows = 0;
        }
    }

    fn spill(&mut self, shapes: &TensorShapes) {
        self.flush_panels(shapes);
        for (a, b) in self.t4.iter_mut().zip(self.t4_hot.iter_mut()) {
            *a += *b as i64;
            *b = 0;
        }
        for (a, b) in self.t6.iter_mut().zip(self.t6_hot.iter_mut()) {
            *a += *b as i64;
            *b = 0;
        }
        self.pending = 0;
    }

    fn merge(&mut self, other: &mut ShellAcc, shapes: &TensorShapes) {
        self.spill(shapes);
        other.spill(shapes);
        self.canonical += other.canonical;
        for (a, b) in self.t2.iter_mut().zip(&other.t2) {
            *a += b;
        }
        for (a, b) in self.t4.iter_mut().zip(&other.t4) {
            *a += b;
        }
        for (a, b) in self.t6.iter_mut().zip(&other.t6) {
            *a += b;
        }
    }
}

/// Rank-k update of the symmetric tensor storage from a panel of product
/// rows: for every index tuple p, hot[p-segment] += sum_v scal_t[p][v] *
/// row_v[suffix], over BLOCK-padded segments (no scalar remainders; the
/// panel rows are zero-padded so the overhang contributes zeros).
/// Dispatches to an AVX2-compiled copy when the CPU has it; the baseline
/// x86-64 target cannot vectorize i32 multiplies well.
#[allow(clippy::too_many_arguments)]
fn rank_update(
    hot: &mut [i32],
    panel: &[i32],
    scal_t: &[i32],
    rows: usize,
    stride: usize,
    ntuples: usize,
    base: &[usize],
    offset_of: impl Fn(usize) -> usize,
) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // Sound: the feature is detected at runtime; the function body
            // contains no other unsafe operations.
            unsafe {
                rank_update_avx2(hot, panel, scal_t, rows, stride, ntuples, base, offset_of);
            }
            return;
        }
    }
    rank_update_plain(hot, panel, scal_t, rows, stride, ntuples, base, offset_of);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
#[allow(clippy::too_many_arguments)]
unsafe fn rank_update_avx2(
    hot: &mut [i32],
    panel: &[i32],
    scal_t: &[i32],
    rows: usize,
    stride: usize,
    ntuples: usize,
    base: &[usize],
    offset_of: impl Fn(usize) -> usize,
) {
    rank_update_plain(hot, panel, scal_t, rows, stride, ntuples, base, offset_of);
}

#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn rank_update_plain(
    hot: &mut [i32],
    panel: &[i32],
    scal_t: &[i32],
    rows: usize,
    stride: usize,
    ntuples: usize,
    base: &[usize],
    offset_of: impl Fn(usize) -> usize,
) {
    if rows == PANEL {
        for p in 0..ntuples {
            let off = offset_of(p);
            let blocks = (ntuples - off + BLOCK - 1) / BLOCK;
            let seg = &mut hot[base[p]..base[p] + blocks * BLOCK];
            let scal = &scal_t[p * PANEL..p * PANEL + PANEL];
            for b in 0..blocks {
                let mut acc = [0i32; BLOCK];
                for (v, &s) in scal.iter().enumerate() {
                    let src = &panel[v * stride + off + b * BLOCK..][..BLOCK];
                    for l in 0..BLOCK {
                        acc[l] = acc[l].wrapping_add(s.wrapping_mul(src[l]));
                    }
                }
                let dst = &mut seg[b * BLOCK..(b + 1) * BLOCK];
                for l in 0..BLOCK {
                    dst[l] = dst[l].wrapping_add(acc[l]);
                }
            }
        }
    } else {
        // Partial panels (spill/merge boundaries): plain rank-1 updates.
        for v in 0..rows {
            let row = &panel[v * stride..][..stride];
            for p in 0..ntuples {
                let off = offset_of(p);
                let len = ntuples - off;
                let seg = &mut hot[base[p]..base[p] + len];
                let s0 = row[p];
                for (dst, &r) in seg.iter_mut().zip(&row[off..off + len]) {
                    *dst = dst.wrapping_add(s0.wrapping_mul(r));
                }
            }
        }
    }
}

struct MomentJobAcc {
    shells: Vec<ShellAcc>,
}

/// Moment accumulation for every shell with norm <= bound, in one streamed
/// pass (shells are discovered lazily; no prior count pass is needed).
fn accumulate_moments(
    gram: &GramMatrix,
    bound: &Rat,
    t_max: u32,
    cfg: EnumConfig,
) -> Result<std::collections::BTreeMap<i64, ShellAcc>> {
    let shapes = TensorShapes::new(gram.dim());
    let e = Enumerator::new(gram)?;

    // Overflow pre-checks for the wrapping kernels: per-vector entry
    // magnitudes must fit i32 (hot buffers), and the grand totals i64.
    let bf = crate::ratmat::rat_to_f64(bound);
    let inv = gram.inverse();
    let box_bound = (0..gram.dim())
        .map(|i| (bf * crate::ratmat::rat_to_f64(inv.entry(i, i))).sqrt())
        .fold(0.0f64, f64::max)
        .ceil()
        + 1.0;
    let worst_entry = box_bound.powi(t_max.min(6) as i32);
    if worst_entry * (cfg.budget as f64) * 4.0 > i64::MAX as f64 {
        return Err(Error::Resource(
            "moment accumulation would overflow i64; reduce depth".into(),
        ));
    }
    if worst_entry > (i32::MAX / 4) as f64 {
        return Err(Error::Resource(
            "coordinate products too large for the i32 moment kernel; reduce depth".into(),
        ));
    }
    let flush_period = ((i32::MAX / 2) as f64 / worst_entry).min(1e9).max(1.0) as u32;

    type Acc = std::collections::BTreeMap<i64, ShellAcc>;
    let (mut acc, _count) = e.stream_fold(
        bound,
        cfg.budget,
        Acc::new,
        |acc, x, norm| {
            acc.entry(norm)
                .or_insert_with(|| ShellAcc::new(&shapes, t_max, flush_period))
                .push(&shapes, x, t_max);
        },
        |mut a, b| {
            for (k, mut sb) in b {
                match a.entry(k) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        o.get_mut().merge(&mut sb, &shapes);
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(sb);
                    }
                }
            }
            a
        },
    )?;
    for sa in acc.values_mut() {
        sa.spill(&shapes);
    }
    Ok(acc)
}

/// All pairings of {0..2t-1} into unordered pairs, as index pairs.
fn pairings(t: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for idx in 0..free.len() {
            let b = free.remove(idx);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(idx, b);
        }
        free.insert(0, a);
    }
    let mut free: Vec<usize> = (0..2 * t).collect();
    let mut out = Vec::new();
    rec(&mut free, &mut Vec::new(), &mut out);
    out
}

/// Reference value of the design identity right-hand side at a sorted
/// multi-index, c * sum over pairings of products of A^{-1} entries.
fn rhs_value(ainv: &RatMat, idx: &[usize], pair_list: &[Vec<(usize, usize)>], c: &Rat) -> Rat {
    let mut s = Rat::zero();
    for pairing in pair_list {
        let mut prod = c.clone();
        for &(a, b) in pairing {
            prod *= &ainv[(idx[a], idx[b])];
        }
        s += prod;
    }
    s
}

/// Design-identity constants: c_t = a_k m_k^{t/2} * n(n+2)...(n+t-2) denominators.
fn design_constant(t: u32, n: usize, count: u64, norm: &Rat) -> Rat {
    let a = Rat::from_integer(count.into());
    let nn = |v: usize| Rat::from_integer((v as i64).into());
    match t {
        2 => a * norm / nn(n),
        4 => a * norm * norm / (nn(n) * nn(n + 2)),
        6 => a * norm * norm * norm / (nn(n) * nn(n + 2) * nn(n + 4)),
        _ => unreachable!(),
    }
}

fn compare_t2(
    shapes: &TensorShapes,
    ainv: &RatMat,
    t2: &[i64],
    count: u64,
    norm: &Rat,
) -> DesignOutcome {
    let c = design_constant(2, shapes.n, count, norm);
    let mut defect = Rat::zero();
    for (p, &(i, j)) in shapes.pairs.iter().enumerate() {
        let lhs = Rat::from_integer((2 * t2[p]).into());
        let rhs = &c * &ainv[(i, j)];
        let d = (lhs - rhs).abs();
        if d > defect {
            defect = d;
        }
    }
    DesignOutcome {
        t: 2,
        pass: defect.is_zero(),
        defect,
    }
}

fn compare_t4(
    shapes: &TensorShapes,
    ainv: &RatMat,
    t4: &[i64],
    count: u64,
    norm: &Rat,
) -> DesignOutcome {
    let c = design_constant(4, shapes.n, count, norm);
    let pair_list = pairings(2);
    let mut defect = Rat::zero();
    for (p, &(i, j)) in shapes.pairs.iter().enumerate() {
        let off = shapes.pair_offset[j];
        for (q, &(k, l)) in shapes.pairs.iter().enumerate().skip(off) {
            let lhs = Rat::from_integer((2 * t4[shapes.quad_base[p] + (q - off)]).into());
            let rhs = rhs_value(ainv, &[i, j, k, l], &pair_list, &c);
            let d = (lhs - rhs).abs();
            if d > defect {
                defect = d;
            }
        }
    }
    DesignOutcome {
        t: 4,
        pass: defect.is_zero(),
        defect,
    }
}

fn compare_t6(
    shapes: &TensorShapes,
    ainv: &RatMat,
    t6: &[i64],
    count: u64,
    norm: &Rat,
) -> DesignOutcome {
    let c = design_constant(6, shapes.n, count, norm);
    let pair_list = pairings(3);
    let mut defect = Rat::zero();
    for (tr, &(i, j, k)) in shapes.triples.iter().enumerate() {
        let off = shapes.triple_offset[k];
        for (ts, &(l, m, o)) in shapes.triples.iter().enumerate().skip(off) {
            let lhs = Rat::from_integer((2 * t6[shapes.sext_base[tr] + (ts - off)]).into());
            let rhs = rhs_value(ainv, &[i, j, k, l, m, o], &pair_list, &c);
            let d = (lhs - rhs).abs();
            if d > defect {
                defect = d;
            }
        }
    }
    DesignOutcome {
        t: 6,
        pass: defect.is_zero(),
        defect,
    }
}

/// Spill cadence keeping the i32 hot buffers exact, from the actual
/// coordinate magnitudes of a materialized shell.
fn flush_period_for(vectors: &[Vec<i64>], t: u32) -> Result<u32> {
    let bmax = vectors
        .iter()
        .flat_map(|v| v.iter().map(|&c| c.unsigned_abs()))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let worst = bmax.powi(t.min(6) as i32);
    if worst > (i32::MAX / 4) as f64 {
        return Err(Error::Resource(
            "coordinate products too large for the i32 moment kernel".into(),
        ));
    }
    Ok(((i32::MAX / 2) as f64 / worst).min(1e9).max(1.0) as u32)
}

fn validate_t(t: u32) -> Result<()> {
    if !matches!(t, 2 | 4 | 6) {
        return Err(Error::Domain(format!(
            "design strength t={} unsupported (t must be 2, 4, or 6; odd t \
             holds automatically by central symmetry)",
            t
        )));
    }
    Ok(())
}

/// Exact t-design decision for one materialized shell.
pub fn is_t_design(shell: &Shell, gram: &GramMatrix, t: u32) -> Result<DesignOutcome> {
    validate_t(t)?;
    let Some(vectors) = &shell.vectors else {
        return Err(Error::Domain(
            "shell has no materialized vectors; use certify_lattice (streaming)".into(),
        ));
    };
    let n = gram.dim();
    let shapes = TensorShapes::new(n);
    let flush_period = flush_period_for(vectors, t)?;
    let mut acc = ShellAcc::new(&shapes, t, flush_period);
    for x in vectors {
        if x.len() != n {
            return Err(Error::Domain("shell/gram dimension mismatch".into()));
        }
        // consistency: exact norm check
        let bx: Vec<num_bigint::BigInt> = x.iter().map(|&v| v.into()).collect();
        if gram.evaluate(&bx) != shell.norm {
            return Err(Error::Domain(
                "shell vector norm does not match the declared shell norm".into(),
            ));
        }
        acc.push(&shapes, x, t);
    }
    acc.spill(&shapes);
    let ainv = gram.inverse();
    let out = match t {
        2 => compare_t2(&shapes, ainv.matrix(), &acc.t2, shell.count, &shell.norm),
        4 => compare_t4(&shapes, ainv.matrix(), &acc.t4, shell.count, &shell.norm),
        6 => compare_t6(&shapes, ainv.matrix(), &acc.t6, shell.count, &shell.norm),
        _ => unreachable!(),
    };
    Ok(out)
}

/// Exact full-shell moment tensor of a materialized shell (test/diagnostic
/// surface; certify_lattice streams instead).
pub fn moment_tensor(shell: &Shell, gram: &GramMatrix, degree: u32) -> Result<MomentTensor> {
    validate_t(degree)?;
    let Some(vectors) = &shell.vectors else {
        return Err(Error::Domain("shell has no materialized vectors".into()));
    };
    let n = gram.dim();
    let shapes = TensorShapes::new(n);
    let flush_period = flush_period_for(vectors, degree)?;
    let mut acc = ShellAcc::new(&shapes, degree, flush_period);
    for x in vectors {
        acc.push(&shapes, x, degree);
    }
    acc.spill(&shapes);
    let raw = match degree {
        2 => &acc.t2,
        4 => &acc.t4,
        6 => &acc.t6,
        _ => unreachable!(),
    };
    Ok(MomentTensor {
        degree,
        n,
        entries: raw
            .iter()
            .map(|&v| Rat::from_integer((2 * v).into()))
            .collect(),
    })
}

/// Certify shells 1..=depth of a lattice at strengths 2..=t_max (streaming;
/// huge shells never materialize). A single moment pass both discovers the
/// shells and accumulates their tensors; the initial bound guess comes from
/// the minimal norm plus the exact norm granularity and grows until `depth`
/// shells are covered.
pub fn certify_lattice(
    lattice: &Lattice,
    depth: usize,
    t_max: u32,
    cfg: EnumConfig,
) -> Result<CertifyReport> {
    validate_t(t_max.max(2))?;
    if depth == 0 {
        return Err(Error::Domain("depth must be >= 1".into()));
    }
    let gram = &lattice.gram;
    let m1 = first_k_shell_data(gram, 1, cfg)?[0].norm.clone();
    let spacing = exact_norm_spacing(gram);
    let mut bound = &m1 + &spacing * Rat::from_integer(((depth - 1) as i64).into());
    let mut accs = loop {
        let accs = accumulate_moments(gram, &bound, t_max, cfg)?;
        if accs.len() >= depth {
            break accs;
        }
        bound = &bound * Rat::new(3.into(), 2.into());
    };
    let den = gram
        .int_form_i64()
        .map(|f| f.den)
        .expect("int form verified by enumeration");

    let shapes = TensorShapes::new(gram.dim());
    let ainv = gram.inverse();
    let mut certificates = Vec::new();
    for (slot, (norm_num, acc)) in accs.iter_mut().enumerate().take(depth) {
        let norm = Rat::new((*norm_num).into(), den.into());
        let count = acc.canonical * 2;
        let mut outcomes = Vec::new();
        let mut strength = 0u32;
        let mut failed = false;
        for t in [2u32, 4, 6] {
            if t > t_max {
                break;
            }
            let out = match t {
                2 => compare_t2(&shapes, ainv.matrix(), &acc.t2, count, &norm),
                4 => compare_t4(&shapes, ainv.matrix(), &acc.t4, count, &norm),
                6 => compare_t6(&shapes, ainv.matrix(), &acc.t6, count, &norm),
                _ => unreachable!(),
            };
            let pass = out.pass;
            outcomes.push(out);
            if pass && !failed {
                strength = t;
            } else {
                failed = true;
            }
        }
        certificates.push(DesignCertificate {
            shell_index: slot + 1,
            norm,
            count,
            outcomes,
            strength,
        });
    }
    let all_2 = certificates.iter().all(|c| c.strength >= 2);
    let all_4 = t_max >= 4 && certificates.iter().all(|c| c.strength >= 4);
    Ok(CertifyReport {
        lattice: lattice.name.clone(),
        depth,
        t_max,
        certificates,
        all_2_design: all_2,
        all_4_design: all_4,
    })
}

/// Exact granularity of the norms: 1/den, or 2/den when the cleared form is
/// even (its diagonal is even).
fn exact_norm_spacing(gram: &GramMatrix) -> Rat {
    match gram.int_form_i64() {
        Some(form) => {
            let even = (0..form.n).all(|i| form.mat[i * form.n + i] % 2 == 0);
            Rat::new(if even { 2 } else { 1 }.into(), form.den.into())
        }
        None => Rat::new(1.into(), 1.into()),
    }
}

/// Evidence (to depth K, not a proof for all shells) that every layer holds a
/// 2-design: Delone-Ryshkov "strongly critical" condition.
pub fn strongly_critical(lattice: &Lattice, depth: usize, cfg: EnumConfig) -> Result<bool> {
    let report = certify_lattice(lattice, depth, 2, cfg)?;
    Ok(report.all_2_design)
}

/// Perfection report: rank of span{x x' : x in M_1} inside symmetric
/// matrices; perfect iff rank = n(n+1)/2.
#[derive(Debug, Clone)]
pub struct PerfectionReport {
    pub rank: usize,
    pub full_rank: usize,
    pub perfect: bool,
    pub kissing: u64,
}

pub fn is_perfect(lattice: &Lattice, cfg: EnumConfig) -> Result<PerfectionReport> {
    let gram = &lattice.gram;
    let n = gram.dim();
    let width = n * (n + 1) / 2;
    let shapes = TensorShapes::new(n);
    // Stream minimal vectors, building rank incrementally. Mod-p full rank
    // certifies full rational rank (rank_p <= rank <= width pinches); if the
    // mod-p rank is deficient, re-run the exact rational elimination.
    let data = first_k_shell_data(gram, 1, cfg)?;
    let bound = data[0].norm.clone();
    let e = Enumerator::new(gram)?;
    const P: u64 = 2_147_483_629;
    let (rows, _) = e.stream_fold(
        &bound,
        cfg.budget,
        Vec::<Vec<i64>>::new,
        |acc, x, _| acc.push(x.to_vec()),
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    let mut modp = crate::ratmat::RankAccumulatorModP::new(width, P);
    for x in &rows {
        let mut row = vec![0u64; width];
        for (p, &(i, j)) in shapes.pairs.iter().enumerate() {
            let v = x[i] * x[j];
            row[p] = v.rem_euclid(P as i64) as u64;
        }
        modp.offer(row);
        if modp.is_full() {
            break;
        }
    }
    let rank = if modp.is_full() {
        width
    } else {
        // Exact confirmation for the deficient case.
        let mut exact = crate::ratmat::RankAccumulator::new(width);
        for x in &rows {
            let mut row = vec![Rat::zero(); width];
            for (p, &(i, j)) in shapes.pairs.iter().enumerate() {
                row[p] = Rat::from_integer((x[i] * x[j]).into());
            }
            exact.offer(row);
            if exact.is_full() {
                break;
            }
        }
        exact.rank()
    };
    Ok(PerfectionReport {
        rank,
        full_rank: width,
        perfect: rank == width,
        kissing: data[0].count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_lattice;
    use crate::ratmat::rat_from_i64;
    use crate::shells::enumerate_shells;

    fn cfg() -> EnumConfig {
        EnumConfig::default()
    }

    #[test]
    fn zn4_shell1_passes_t2_fails_t4() {
        let l = catalog_lattice("Zn", Some(4)).unwrap();
        let r = certify_lattice(&l, 1, 4, cfg()).unwrap();
        let c = &r.certificates[0];
        assert_eq!(c.count, 8);
        assert!(c.outcomes[0].pass, "t=2 must pass");
        assert!(!c.outcomes[1].pass, "t=4 must fail");
        assert_eq!(c.strength, 2);
        // Defect is exactly 1: T[0000]=2 vs c*3*1 = 1.
        assert_eq!(c.outcomes[1].defect, rat_from_i64(1));
    }

    #[test]
    fn e8_first_shell_4_design() {
        let l = catalog_lattice("E8", None).unwrap();
        let r = certify_lattice(&l, 1, 4, cfg()).unwrap();
        assert!(r.certificates[0].outcomes[1].pass);
        assert_eq!(r.certificates[0].strength, 4);
    }

    #[test]
    fn d4_five_shells_4_design() {
        let l = catalog_lattice("D4", None).unwrap();
        let r = certify_lattice(&l, 5, 4, cfg()).unwrap();
        assert!(r.all_4_design);
    }

    #[test]
    fn a2_is_strongly_critical() {
        let l = catalog_lattice("A2", None).unwrap();
        assert!(strongly_critical(&l, 5, cfg()).unwrap());
    }

    #[test]
    fn is_t_design_matches_certify_on_materialized_shell() {
        let l = catalog_lattice("D4", None).unwrap();
        let shells = enumerate_shells(&l, &rat_from_i64(2), cfg()).unwrap();
        let out = is_t_design(&shells.shells[0], &l.gram, 4).unwrap();
        assert!(out.pass);
        let out6 = is_t_design(&shells.shells[0], &l.gram, 6).unwrap();
        assert!(!out6.pass, "D4 minimal vectors are not a 6-design");
    }

    #[test]
    fn odd_t_rejected() {
        let l = catalog_lattice("A2", None).unwrap();
        let shells = enumerate_shells(&l, &rat_from_i64(2), cfg()).unwrap();
        assert!(is_t_design(&shells.shells[0], &l.gram, 3).is_err());
        assert!(is_t_design(&shells.shells[0], &l.gram, 8).is_err());
    }

    #[test]
    fn moment_contraction_identity() {
        // Contracting the order-4 tensor with A gives m * order-2 tensor.
        let l = catalog_lattice("A2", None).unwrap();
        let shells = enumerate_shells(&l, &rat_from_i64(2), cfg()).unwrap();
        let shell = &shells.shells[0];
        let shapes = TensorShapes::new(2);
        let t4 = moment_tensor(shell, &l.gram, 4).unwrap();
        let t2 = moment_tensor(shell, &l.gram, 2).unwrap();
        let contracted = t4.contract_form(&shapes, &l.gram);
        for (p, v) in contracted.entries.iter().enumerate() {
            assert_eq!(v, &(&shell.norm * &t2.entries[p]));
        }
        // Trace identity: <sum xx', A> = a * m.
        let trace = t2.contract_form(&shapes, &l.gram);
        assert_eq!(
            trace.entries[0],
            &shell.norm * rat_from_i64(shell.count as i64)
        );
    }

    #[test]
    fn perfection_examples() {
        let e8 = catalog_lattice("E8", None).unwrap();
        let r = is_perfect(&e8, cfg()).unwrap();
        assert!(r.perfect);
        assert_eq!(r.rank, 36);

        let a2 = catalog_lattice("A2", None).unwrap();
        let r = is_perfect(&a2, cfg()).unwrap();
        assert!(r.perfect);
        assert_eq!(r.rank, 3);

        let z4 = catalog_lattice("Zn", Some(4)).unwrap();
        let r = is_perfect(&z4, cfg()).unwrap();
        assert!(!r.perfect);
        assert_eq!(r.rank, 4);
    }

    #[test]
    fn scale_invariance_of_verdicts() {
        let l = catalog_lattice("D4", None).unwrap();
        let scaled = l.scaled_gram(&Rat::new(3.into(), 2.into())).unwrap();
        let r1 = certify_lattice(&l, 2, 4, cfg()).unwrap();
        let r2 = certify_lattice(&scaled, 2, 4, cfg()).unwrap();
        for (a, b) in r1.certificates.iter().zip(&r2.certificates) {
            assert_eq!(a.strength, b.strength);
            assert_eq!(a.count, b.count);
        }
    }
}
