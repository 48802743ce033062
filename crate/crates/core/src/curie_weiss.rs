//! Exact finite-n law of the Curie-Weiss magnetization and exchangeable-pair
//! diagnostics for the single-site heat-bath update at the critical
//! temperature.
//!
//! The law of S_n = sum of spins lives on {-n, -n+2, ..., n} with log-weight
//! log C(n, (n+s)/2) + beta (s^2 - n) / (2n), using
//! sum_{i<j} sigma_i sigma_j = (S_n^2 - n)/2. The pair (W, W') resamples one
//! uniformly chosen site from its conditional law; every conditional moment
//! of Delta = W - W' is a function of s alone, so diagnostics aggregate the
//! two site classes in O(1) per atom and O(n) total.

use crate::discrete::{BoundCheckReport, DiscreteLaw, PairAtom, PairDiagnostics, SignedLogSum};
use crate::error::{invalid, Error, Result};
use crate::special::ln_gamma;

/// Largest supported n (the law is O(n) atoms).
pub const N_CAP: u64 = 10_000_000;

fn validate(n: u64, beta: f64) -> Result<()> {
    if n < 1 {
        return Err(invalid("n", format!("expected n >= 1, got {n}")));
    }
    if n > N_CAP {
        return Err(Error::Resource(format!("n = {n} exceeds cap {N_CAP}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid("beta", format!("expected finite beta > 0, got {beta}")));
    }
    Ok(())
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Log-weights of S_n over s in {-n, -n+2, ..., n}.
fn log_weights(n: u64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let count = n as usize + 1;
    let mut locations = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for idx in 0..count {
        let s = -(nf) + 2.0 * idx as f64;
        let n_pos = (nf + s) / 2.0;
        locations.push(s);
        weights.push(ln_choose(nf, n_pos) + beta * (s * s - nf) / (2.0 * nf));
    }
    (locations, weights)
}

/// Exact law of the total spin S_n at inverse temperature `beta`.
pub fn magnetization_law(n: u64, beta: f64) -> Result<DiscreteLaw> {
    validate(n, beta)?;
    let (locations, weights) = log_weights(n, beta);
    DiscreteLaw::from_log_weights(locations, weights)
}

/// Law of W = S_n / n^{3/4}; same probabilities, rescaled atoms.
pub fn w_law(n: u64, beta: f64) -> Result<DiscreteLaw> {
    validate(n, beta)?;
    let (locations, weights) = log_weights(n, beta);
    let scale = (n as f64).powf(0.75);
    let rescaled = locations.into_iter().map(|s| s / scale).collect();
    DiscreteLaw::from_log_weights(rescaled, weights)
}

/// Exchangeable-pair diagnostics at the critical point beta = 1.
///
/// Per atom s (with n_+ = (n+s)/2 positive spins): the resampled value of a
/// site with current spin sigma follows P(+1 | rest) = (1 + tanh((s - sigma)/n))/2,
/// and
///   E(Delta   | s) = n^{-7/4} [ n_+ (1 - tanh((s-1)/n)) + n_- (-1 - tanh((s+1)/n)) ]
///   E(Delta^2 | s) = (4 / n^{3/2}) * mean site flip probability
///   E(Delta^4 | s) = (16 / n^3)   * mean site flip probability
/// with lambda = n^{-3/2}, psi(w) = w^3/3 and R = lambda psi(w) - E(Delta|s).
pub fn pair_diagnostics(n: u64) -> Result<PairDiagnostics> {
    let beta = 1.0;
    validate(n, beta)?;
    let law = w_law(n, beta)?;
    let nf = n as f64;
    let n34 = nf.powf(0.75);
    let lambda = nf.powf(-1.5);

    let mut atoms = Vec::with_capacity(law.len());
    for (idx, atom) in law.atoms().iter().enumerate() {
        let s = -(nf) + 2.0 * idx as f64;
        let w = atom.location;
        let n_pos = (nf + s) / 2.0;
        let n_neg = (nf - s) / 2.0;
        let tanh_minus = (beta * (s - 1.0) / nf).tanh();
        let tanh_plus = (beta * (s + 1.0) / nf).tanh();

        let e_delta = (n_pos * (1.0 - tanh_minus) + n_neg * (-1.0 - tanh_plus)) / nf.powf(1.75);
        // flip probabilities per site class
        let flip_pos = (1.0 - tanh_minus) / 2.0;
        let flip_neg = (1.0 + tanh_plus) / 2.0;
        let mean_flip = (n_pos * flip_pos + n_neg * flip_neg) / nf;
        let e_delta2 = 4.0 / nf.powf(1.5) * mean_flip;
        let e_delta4 = 16.0 / nf.powi(3) * mean_flip;

        let psi_w = w * w * w / 3.0;
        atoms.push(PairAtom {
            w,
            log_prob: atom.log_prob,
            e_delta,
            e_delta2,
            e_delta4,
            psi_w,
            remainder: lambda * psi_w - e_delta,
        });
    }

    Ok(PairDiagnostics {
        lambda,
        delta_support_bound: 2.0 / n34,
        atoms,
    })
}

/// Checks |R(s)| <= 2|w|^5/(15 n^2) + |w|/n^2 + n^{-11/4} at every atom.
pub fn verify_remainder_bound(n: u64) -> Result<BoundCheckReport> {
    let diag = pair_diagnostics(n)?;
    let nf = n as f64;
    let n2 = nf * nf;
    let floor = nf.powf(-2.75);
    Ok(BoundCheckReport::from_terms(diag.atoms.iter().map(|a| {
        let w = a.w.abs();
        (a.remainder.abs(), 2.0 * w.powi(5) / (15.0 * n2) + w / n2 + floor)
    })))
}

/// Checks |2 n^{-3/2} - E(Delta^2 | s)| <= 2 n^{-5/2} + 2 n^{-2} w^2 at
/// every atom.
pub fn verify_cond_var_bound(n: u64) -> Result<BoundCheckReport> {
    let diag = pair_diagnostics(n)?;
    let nf = n as f64;
    let target = 2.0 * nf.powf(-1.5);
    Ok(BoundCheckReport::from_terms(diag.atoms.iter().map(|a| {
        (
            (target - a.e_delta2).abs(),
            2.0 * nf.powf(-2.5) + 2.0 * a.w * a.w / (nf * nf),
        )
    })))
}

/// E|W|^{2p} as an exact atom sum (p >= 0; p = 0 gives total mass).
pub fn moment(n: u64, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(invalid("p", format!("expected p >= 0, got {p}")));
    }
    Ok(w_law(n, 1.0)?.abs_moment(2.0 * p))
}

/// E(Delta^2 1(|Delta| <= a_tr) 1(z - a_tr <= W <= z + a_tr)) exactly.
///
/// Delta is supported on {0, +-2/n^{3/4}}, so the Delta-indicator resolves
/// exactly: the nonzero-Delta outcomes survive iff a_tr >= 2/n^{3/4}.
pub fn concentration_lhs(n: u64, z: f64, a_tr: f64) -> Result<f64> {
    if !(a_tr > 0.0) {
        return Err(invalid("a_tr", format!("expected a_tr > 0, got {a_tr}")));
    }
    let diag = pair_diagnostics(n)?;
    if a_tr < diag.delta_support_bound {
        return Ok(0.0);
    }
    let mut acc = SignedLogSum::new();
    for atom in &diag.atoms {
        if atom.w >= z - a_tr && atom.w <= z + a_tr {
            acc.add(atom.e_delta2, atom.log_prob);
        }
    }
    Ok(acc.value())
}

/// Concentration-inequality audit: the exact LHS together with the
/// structural factor (1 + E|W|^{2p}) a (sqrt(E R^2) + lambda) / (1+z)^p and
/// the implied empirical constant (their ratio).
#[derive(Debug, Clone, Copy)]
pub struct ConcentrationReport {
    pub lhs: f64,
    pub rhs_structure: f64,
    pub empirical_constant: f64,
}

pub fn concentration_report(n: u64, z: f64, a_tr: f64, p: f64) -> Result<ConcentrationReport> {
    let lhs = concentration_lhs(n, z, a_tr)?;
    let diag = pair_diagnostics(n)?;
    let e2p = moment(n, p)?;
    let er2 = diag.expect(|a| a.remainder * a.remainder);
    let rhs_structure =
        (1.0 + e2p) * a_tr * (er2.sqrt() + diag.lambda) / (1.0 + z).powf(p);
    let empirical_constant = if rhs_structure > 0.0 { lhs / rhs_structure } else { 0.0 };
    Ok(ConcentrationReport {
        lhs,
        rhs_structure,
        empirical_constant,
    })
}

/// Max over adjacent magnetization states of
/// |log(pi(s) K(s, s')) - log(pi(s') K(s', s))|, the detailed-balance gap of
/// the magnetization-level heat-bath kernel. Zero in exact arithmetic.
pub fn detailed_balance_max_gap(n: u64, beta: f64) -> Result<f64> {
    validate(n, beta)?;
    let law = magnetization_law(n, beta)?;
    let nf = n as f64;
    let mut worst: f64 = 0.0;
    for idx in 0..law.len().saturating_sub(1) {
        let s = law.location(idx);
        let t = (beta * (s + 1.0) / nf).tanh();
        let n_neg = (nf - s) / 2.0;
        let n_pos_up = (nf + s + 2.0) / 2.0;
        // up-move: choose a -1 site, resample it to +1
        let log_k_up = (n_neg / nf).ln() + ((1.0 + t) / 2.0).ln();
        // down-move from s+2: choose a +1 site, resample it to -1
        let log_k_down = (n_pos_up / nf).ln() + ((1.0 - t) / 2.0).ln();
        let lhs = law.atoms()[idx].log_prob + log_k_up;
        let rhs = law.atoms()[idx + 1].log_prob + log_k_down;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}
