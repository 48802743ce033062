//! Brute-force enumeration oracles.
//!
//! These recompute the laws and every pair diagnostic from first principles
//! with no shared shortcuts: spin interactions are summed pairwise (never
//! through the magnetization identity), site conditionals come from full
//! configuration weights (never through tanh), and dimer counts come from
//! explicit matching enumeration (never through the double factorial). They
//! exist to catch algebra errors in the O(n) production paths and back the
//! CLI `oracle` subcommand.

use crate::curie_weiss;
use crate::discrete::PairDiagnostics;
use crate::error::{invalid, Result};
use crate::monomer_dimer;

/// Enumeration cap for the spin model (2^n configurations, n^2 per site).
pub const SPIN_CAP: u32 = 14;
/// Enumeration cap for the dimer model (all matchings of K_n).
pub const DIMER_CAP: u32 = 10;

/// Exact per-atom quantities recovered by enumeration.
#[derive(Debug, Clone, Copy)]
pub struct OracleAtom {
    /// Atom label: total spin s for Curie-Weiss, monomer count t for
    /// the monomer-dimer model.
    pub label: f64,
    pub prob: f64,
    pub e_delta: f64,
    pub e_delta2: f64,
    pub e_delta4: f64,
}

/// Worst absolute gaps between enumeration and the production computation.
#[derive(Debug, Clone, Copy)]
pub struct OracleComparison {
    pub n: u64,
    pub law_gap: f64,
    pub drift_gap: f64,
    pub square_gap: f64,
    pub fourth_gap: f64,
    /// Monomer-dimer only: max |enumerated matching count - (v-1)!!| over
    /// all monomer sets (exact integers; 0 when the closed form is right).
    pub matching_count_gap: u64,
}

impl OracleComparison {
    pub fn max_float_gap(&self) -> f64 {
        self.law_gap
            .max(self.drift_gap)
            .max(self.square_gap)
            .max(self.fourth_gap)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_float_gap() <= tol && self.matching_count_gap == 0
    }
}

/// Enumerate the Curie-Weiss model over all 2^n spin configurations.
///
/// Per configuration the Gibbs weight is exp(beta/n sum_{i<j} sigma_i sigma_j)
/// with the double sum evaluated literally, and each site conditional is the
/// two-point law proportional to the full configuration weights with that
/// site set to +1 / -1.
pub fn enumerate_curie_weiss(n: u32, beta: f64) -> Result<Vec<OracleAtom>> {
    if n == 0 || n > SPIN_CAP {
        return Err(invalid("n", format!("enumeration supports 1 <= n <= {SPIN_CAP}, got {n}")));
    }
    let nf = n as f64;
    let n_configs = 1usize << n;
    let spins_of = |config: usize| -> Vec<f64> {
        (0..n as usize)
            .map(|i| if config >> i & 1 == 1 { 1.0 } else { -1.0 })
            .collect()
    };
    let pair_energy = |spins: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..spins.len() {
            for j in (i + 1)..spins.len() {
                acc += spins[i] * spins[j];
            }
        }
        acc
    };

    let scale34 = nf.powf(0.75);
    let mut group_weight = vec![0.0f64; n as usize + 1];
    let mut group_drift = vec![0.0f64; n as usize + 1];
    let mut group_square = vec![0.0f64; n as usize + 1];
    let mut group_fourth = vec![0.0f64; n as usize + 1];

    for config in 0..n_configs {
        let mut spins = spins_of(config);
        let weight = (beta / nf * pair_energy(&spins)).exp();
        let s: f64 = spins.iter().sum();
        let idx = ((nf + s) / 2.0) as usize;

        let mut drift = 0.0;
        let mut flips = 0.0;
        for i in 0..n as usize {
            let original = spins[i];
            spins[i] = 1.0;
            let w_plus = (beta / nf * pair_energy(&spins)).exp();
            spins[i] = -1.0;
            let w_minus = (beta / nf * pair_energy(&spins)).exp();
            spins[i] = original;
            let mean_resampled = (w_plus - w_minus) / (w_plus + w_minus);
            drift += original - mean_resampled;
            let w_opposite = if original > 0.0 { w_minus } else { w_plus };
            flips += w_opposite / (w_plus + w_minus);
        }
        let e_delta = drift / (nf * scale34);
        let mean_flip = flips / nf;
        group_weight[idx] += weight;
        group_drift[idx] += weight * e_delta;
        group_square[idx] += weight * 4.0 / nf.powf(1.5) * mean_flip;
        group_fourth[idx] += weight * 16.0 / nf.powi(3) * mean_flip;
    }

    let total: f64 = group_weight.iter().sum();
    Ok((0..=n as usize)
        .map(|idx| {
            let w = group_weight[idx];
            OracleAtom {
                label: 2.0 * idx as f64 - nf,
                prob: w / total,
                e_delta: group_drift[idx] / w,
                e_delta2: group_square[idx] / w,
                e_delta4: group_fourth[idx] / w,
            }
        })
        .collect())
}

/// All matchings of K_n, bucketed by the exact set of uncovered vertices.
/// Index = vertex bitmask of the monomer set; value = number of matchings.
pub fn matching_counts_by_monomer_set(n: u32) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << n];
    // decide vertices from the lowest undecided one: stay a monomer, or
    // pair with any higher undecided vertex
    fn go(undecided: u32, monomers: u32, counts: &mut [u64]) {
        if undecided == 0 {
            counts[monomers as usize] += 1;
            return;
        }
        let v = undecided.trailing_zeros();
        let rest = undecided & !(1 << v);
        go(rest, monomers | (1 << v), counts);
        let mut others = rest;
        while others != 0 {
            let u = others.trailing_zeros();
            go(rest & !(1 << u), monomers, counts);
            others &= !(1 << u);
        }
    }
    go((1u32 << n) - 1, 0, &mut counts);
    counts
}

/// (v-1)!! by the integer recurrence (1 for v = 0), the perfect-matching
/// count the production law relies on.
pub fn perfect_matchings(v: u32) -> u64 {
    if v % 2 == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut factor = v.saturating_sub(1) as u64;
    while factor > 1 {
        acc *= factor;
        factor -= 2;
    }
    acc
}

/// Enumerate the monomer-dimer model: the law over monomer counts comes from
/// a direct sum over dimer configurations, and the pair diagnostics from the
/// 4-outcome conditionals with enumerated dimer counts.
pub fn enumerate_monomer_dimer(n: u32, j: f64, h: f64) -> Result<Vec<OracleAtom>> {
    if n < 2 || n > DIMER_CAP {
        return Err(invalid("n", format!("enumeration supports 2 <= n <= {DIMER_CAP}, got {n}")));
    }
    let nf = n as f64;
    let counts = matching_counts_by_monomer_set(n);
    let neg_h = |t: u32| -> f64 {
        let x = t as f64 / nf;
        nf * (j * x * x + (nf.ln() / 2.0 + h - j) * x)
    };

    let scale34 = nf.powf(0.75);
    let pairs_total = nf * (nf - 1.0) / 2.0;
    let mut group_weight = vec![0.0f64; n as usize + 1];
    let mut group_drift = vec![0.0f64; n as usize + 1];
    let mut group_square = vec![0.0f64; n as usize + 1];
    let mut group_fourth = vec![0.0f64; n as usize + 1];

    for mask in 0..(1usize << n) {
        let d_count = counts[mask];
        if d_count == 0 {
            continue;
        }
        let t = mask.count_ones();
        let weight = d_count as f64 * neg_h(t).exp();

        let mut e_delta = 0.0;
        let mut e_delta2 = 0.0;
        let mut e_delta4 = 0.0;
        for u in 0..n as usize {
            for v in (u + 1)..n as usize {
                let current: u32 = (mask >> u & 1) as u32 + (mask >> v & 1) as u32;
                let rest = mask & !(1 << u) & !(1 << v);
                let mut cond = [0.0f64; 4];
                for (slot, (su, sv)) in [(0u32, 0u32), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
                    let modified = rest | ((*su as usize) << u) | ((*sv as usize) << v);
                    let tt = modified.count_ones();
                    cond[slot] = counts[modified] as f64 * neg_h(tt).exp();
                }
                let z: f64 = cond.iter().sum();
                for (slot, (su, sv)) in [(0u32, 0u32), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
                    let q = cond[slot] / z;
                    let delta = (current as f64 - (*su + *sv) as f64) / scale34;
                    e_delta += q * delta;
                    e_delta2 += q * delta * delta;
                    e_delta4 += q * delta.powi(4);
                }
            }
        }
        e_delta /= pairs_total;
        e_delta2 /= pairs_total;
        e_delta4 /= pairs_total;

        let idx = t as usize;
        group_weight[idx] += weight;
        group_drift[idx] += weight * e_delta;
        group_square[idx] += weight * e_delta2;
        group_fourth[idx] += weight * e_delta4;
    }

    let total: f64 = group_weight.iter().sum();
    Ok((0..=n as usize)
        .filter(|&idx| group_weight[idx] > 0.0)
        .map(|idx| OracleAtom {
            label: idx as f64,
            prob: group_weight[idx] / total,
            e_delta: group_drift[idx] / group_weight[idx],
            e_delta2: group_square[idx] / group_weight[idx],
            e_delta4: group_fourth[idx] / group_weight[idx],
        })
        .collect())
}

fn compare_atoms(
    n: u64,
    oracle: &[OracleAtom],
    law_probs: &[(f64, f64)],
    diag: &PairDiagnostics,
    matching_count_gap: u64,
) -> OracleComparison {
    assert_eq!(oracle.len(), law_probs.len());
    assert_eq!(oracle.len(), diag.atoms.len());
    let mut cmp = OracleComparison {
        n,
        law_gap: 0.0,
        drift_gap: 0.0,
        square_gap: 0.0,
        fourth_gap: 0.0,
        matching_count_gap,
    };
    for ((o, &(label, prob)), d) in oracle.iter().zip(law_probs).zip(&diag.atoms) {
        assert_eq!(o.label, label);
        cmp.law_gap = cmp.law_gap.max((o.prob - prob).abs());
        cmp.drift_gap = cmp.drift_gap.max((o.e_delta - d.e_delta).abs());
        cmp.square_gap = cmp.square_gap.max((o.e_delta2 - d.e_delta2).abs());
        cmp.fourth_gap = cmp.fourth_gap.max((o.e_delta4 - d.e_delta4).abs());
    }
    cmp
}

/// Enumerate the critical Curie-Weiss model and compare against the
/// production law and diagnostics.
pub fn check_curie_weiss(n: u32) -> Result<OracleComparison> {
    let oracle = enumerate_curie_weiss(n, 1.0)?;
    let law = curie_weiss::magnetization_law(n as u64, 1.0)?;
    let diag = curie_weiss::pair_diagnostics(n as u64)?;
    let probs: Vec<(f64, f64)> = law
        .atoms()
        .iter()
        .map(|a| (a.location, a.log_prob.exp()))
        .collect();
    Ok(compare_atoms(n as u64, &oracle, &probs, &diag, 0))
}

/// Enumerate the critical monomer-dimer model and compare against the
/// production law, diagnostics, and the double-factorial dimer counts.
pub fn check_monomer_dimer(n: u32) -> Result<OracleComparison> {
    let cp = monomer_dimer::critical_constants()?;
    let oracle = enumerate_monomer_dimer(n, cp.j_c, cp.h_c)?;
    let law = monomer_dimer::magnetization_law(n as u64, cp.j_c, cp.h_c)?;
    let diag = monomer_dimer::pair_diagnostics(n as u64)?;
    let probs: Vec<(f64, f64)> = law
        .atoms()
        .iter()
        .map(|a| (a.location, a.log_prob.exp()))
        .collect();

    let counts = matching_counts_by_monomer_set(n);
    let mut matching_gap = 0u64;
    for (mask, &count) in counts.iter().enumerate() {
        let monomers = (mask as u32).count_ones();
        let expected = perfect_matchings(n - monomers);
        matching_gap = matching_gap.max(count.abs_diff(expected));
    }
    Ok(compare_atoms(n as u64, &oracle, &probs, &diag, matching_gap))
}
