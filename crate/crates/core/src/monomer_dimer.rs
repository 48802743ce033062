//! The imitative monomer-dimer model on the complete graph, reformulated as
//! a weighted Curie-Weiss model over monomer counts.
//!
//! A configuration sigma in {0,1}^n marks the monomer (dimer-free) sites;
//! the number of dimer configurations with that exact monomer set is the
//! perfect-matching count (n - t - 1)!! of the covered vertices. The induced
//! law over the monomer count t carries weight
//! C(n,t) (n-t-1)!! exp(n (J (t/n)^2 + (log n / 2 + h - J) t/n)), and at the
//! critical pair (J_c, h_c) the centered, n^{1/4}-scaled monomer density has
//! a quartic limit law with rate constant lambda_c / 24 where
//! lambda_c = -p~''''(m_c).
//!
//! The exchangeable pair resamples a uniformly chosen unordered vertex pair
//! {u, v} from its joint conditional law. Because the configuration weight
//! depends on sigma only through t, the conditional 4-outcome block reduces
//! to ratios of neighboring count weights, and parity kills the odd moves:
//! Delta is supported on {0, +-2/n^{3/4}} exactly.

use crate::discrete::{DiscreteLaw, PairAtom, PairDiagnostics, SignedLogSum};
use crate::error::{domain, invalid, Error, Result};
use crate::special::ln_gamma;

/// Largest supported n; the law and diagnostics are O(n).
pub const N_CAP: u64 = 1_000_000;

/// The monomer-activity function g(x) = (sqrt(e^{4x} + 4 e^{2x}) - e^{2x})/2,
/// evaluated in the conjugate form 2 / (1 + sqrt(1 + 4 e^{-2x})) which is
/// cancellation-free and overflow-safe for all x.
pub fn g_fn(x: f64) -> f64 {
    2.0 / (1.0 + (1.0 + 4.0 * (-2.0 * x).exp()).sqrt())
}

/// The effective field tau(x) = (2x - 1) J + h.
pub fn tau_fn(x: f64, j: f64, h: f64) -> f64 {
    (2.0 * x - 1.0) * j + h
}

/// The variational pressure p~(x) = -J x^2 - (1 - g(tau(x)) + log(1 - g(tau(x))))/2.
pub fn p_tilde(x: f64, j: f64, h: f64) -> Result<f64> {
    let g = g_fn(tau_fn(x, j, h));
    let one_minus = 1.0 - g;
    if one_minus <= 0.0 {
        return Err(domain(
            "p_tilde",
            format!("1 - g(tau(x)) = {one_minus} is outside the log domain at x = {x}"),
        ));
    }
    Ok(-j * x * x - 0.5 * (one_minus + one_minus.ln()))
}

/// The critical point of the model and the quartic rate constant.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub j_c: f64,
    pub h_c: f64,
    pub m_c: f64,
    pub tau_c: f64,
    /// -p~''''(m_c) > 0, by Richardson-extrapolated central differences.
    pub lambda_c: f64,
}

fn central_fourth<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 4.0 * f(x - h) + 6.0 * f(x) - 4.0 * f(x + h) + f(x + 2.0 * h)) / h.powi(4)
}

/// One Richardson step for an O(h^2) central stencil.
fn richardson<F: Fn(f64) -> f64>(stencil: &dyn Fn(&F, f64, f64) -> f64, f: &F, x: f64, h: f64) -> f64 {
    (4.0 * stencil(f, x, h / 2.0) - stencil(f, x, h)) / 3.0
}

/// Critical constants: closed forms for (J_c, h_c, m_c), lambda_c by a
/// Richardson step sweep over h in {1e-2, 5e-3, 2.5e-3} with a 1e-4 relative
/// consistency gate between the two extrapolants.
pub fn critical_constants() -> Result<CriticalPoint> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let j_c = 1.0 / (4.0 * (3.0 - 2.0 * sqrt2));
    let h_c = ((12.0 - 8.0 * sqrt2).ln() - 1.0) / 4.0;
    let m_c = 2.0 - sqrt2;
    let tau_c = tau_fn(m_c, j_c, h_c);

    let pressure = |x: f64| p_tilde(x, j_c, h_c).expect("p_tilde defined near m_c");
    let first = richardson(&central_fourth, &pressure, m_c, 1e-2);
    let second = richardson(&central_fourth, &pressure, m_c, 5e-3);
    let rel = ((first - second) / second).abs();
    if rel > 1e-4 {
        return Err(Error::NumericConsistency {
            what: "lambda_c",
            detail: format!("Richardson estimates {first:e} and {second:e} differ by {rel:e} relative"),
        });
    }
    let lambda_c = -second;
    if !(lambda_c > 0.0) {
        return Err(Error::NumericConsistency {
            what: "lambda_c",
            detail: format!("expected -p_tilde'''' > 0, got {}", -lambda_c),
        });
    }
    Ok(CriticalPoint {
        j_c,
        h_c,
        m_c,
        tau_c,
        lambda_c,
    })
}

/// Richardson-extrapolated central estimates of p~^(j)(x) for j = 1, 2, 3.
/// Step sizes are chosen so both truncation and rounding sit well below the
/// 1e-6 stationarity tolerance given the size of the higher derivatives.
pub fn p_tilde_low_derivatives(x: f64, j: f64, h: f64) -> Result<[f64; 3]> {
    // fail early if any stencil point leaves the log domain
    for offset in [-8e-3, -4e-3, -2e-3, -1e-3, 0.0, 1e-3, 2e-3, 4e-3, 8e-3] {
        p_tilde(x + offset, j, h)?;
    }
    let f = |t: f64| p_tilde(t, j, h).expect("checked above");
    let d1 = |f: &dyn Fn(f64) -> f64, x: f64, h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = |f: &dyn Fn(f64) -> f64, x: f64, h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let d3 = |f: &dyn Fn(f64) -> f64, x: f64, h: f64| {
        (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
    };
    let rich = |d: &dyn Fn(&dyn Fn(f64) -> f64, f64, f64) -> f64, h: f64| {
        (4.0 * d(&f, x, h / 2.0) - d(&f, x, h)) / 3.0
    };
    Ok([rich(&d1, 2e-3), rich(&d2, 2e-3), rich(&d3, 4e-3)])
}

/// log((v-1)!!), the number of perfect matchings of the complete graph on v
/// vertices: log Gamma(v+1) - (v/2) log 2 - log Gamma(v/2 + 1) for even v,
/// -inf for odd v, 0 for v = 0 (the empty matching).
pub fn matching_count_log(v: u64) -> f64 {
    if v % 2 == 1 {
        return f64::NEG_INFINITY;
    }
    if v == 0 {
        return 0.0;
    }
    let vf = v as f64;
    ln_gamma(vf + 1.0) - vf / 2.0 * std::f64::consts::LN_2 - ln_gamma(vf / 2.0 + 1.0)
}

fn validate_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(invalid("n", format!("expected n >= 2, got {n}")));
    }
    if n > N_CAP {
        return Err(Error::Resource(format!("n = {n} exceeds cap {N_CAP}")));
    }
    Ok(())
}

/// Monomer counts with the right parity, and their configuration-level
/// log-weights omega(t) = log (n-t-1)!! - H(t) (no binomial factor).
fn config_log_weights(n: u64, j: f64, h: f64) -> (Vec<u64>, Vec<f64>) {
    let nf = n as f64;
    let field = nf.ln() / 2.0 + h - j;
    let start = n % 2;
    let mut counts = Vec::with_capacity((n / 2 + 1) as usize);
    let mut weights = Vec::with_capacity((n / 2 + 1) as usize);
    let mut t = start;
    while t <= n {
        let x = t as f64 / nf;
        counts.push(t);
        weights.push(matching_count_log(n - t) + nf * (j * x * x + field * x));
        t += 2;
    }
    (counts, weights)
}

/// Exact law of the monomer count t at parameters (J, h); atoms carry
/// locations t with n - t even (odd-parity counts have no dimer completion).
pub fn magnetization_law(n: u64, j: f64, h: f64) -> Result<DiscreteLaw> {
    validate_n(n)?;
    if !j.is_finite() || !h.is_finite() {
        return Err(invalid("j", format!("expected finite (J, h), got ({j}, {h})")));
    }
    let nf = n as f64;
    let (counts, omega) = config_log_weights(n, j, h);
    let locations = counts.iter().map(|&t| t as f64).collect();
    let weights = counts
        .iter()
        .zip(&omega)
        .map(|(&t, &w)| ln_gamma(nf + 1.0) - ln_gamma(t as f64 + 1.0) - ln_gamma((n - t) as f64 + 1.0) + w)
        .collect();
    DiscreteLaw::from_log_weights(locations, weights)
}

/// Law of W = n^{1/4} (t/n - m_c) at the critical point.
pub fn w_law(n: u64) -> Result<DiscreteLaw> {
    let cp = critical_constants()?;
    let law = magnetization_law(n, cp.j_c, cp.h_c)?;
    let nf = n as f64;
    let quarter = nf.powf(0.25);
    let locations = law
        .atoms()
        .iter()
        .map(|a| quarter * (a.location / nf - cp.m_c))
        .collect();
    let weights = law.atoms().iter().map(|a| a.log_prob).collect();
    DiscreteLaw::from_log_weights(locations, weights)
}

/// The regression rate
/// lambda = 2 (1-m_c) (m_c^2 + (1-m_c) e^{2 tau_c}) / (((1-m_c) + e^{2 tau_c}) n^{3/2}).
pub fn lambda(n: u64) -> Result<f64> {
    if n < 1 {
        return Err(invalid("n", "expected n >= 1"));
    }
    let cp = critical_constants()?;
    let e2t = (2.0 * cp.tau_c).exp();
    let one_m = 1.0 - cp.m_c;
    let numerator = 2.0 * one_m * (cp.m_c * cp.m_c + one_m * e2t);
    Ok(numerator / ((one_m + e2t) * (n as f64).powf(1.5)))
}

/// Exchangeable-pair diagnostics at (J_c, h_c).
///
/// The pair {u, v} is uniform over the C(n,2) unordered vertex pairs; given
/// the configuration, (sigma_u', sigma_v') is drawn from the 4-outcome
/// conditional whose weights are the configuration weights of the modified
/// count t - sigma_u - sigma_v + s + t'. Parity zeroes the two mixed
/// outcomes, so per atom only the neighbor-count ratios
/// r- = omega(t-2)/(omega(t-2) + omega(t)) and
/// r+ = omega(t+2)/(omega(t) + omega(t+2)) enter:
///   E(Delta   | t) = 2 [C(t,2) r- - C(n-t,2) r+] / (C(n,2) n^{3/4})
///   E(Delta^2 | t) = (4 / n^{3/2}) [C(t,2) r- + C(n-t,2) r+] / C(n,2)
///   E(Delta^4 | t) = (16 / n^3)    [C(t,2) r- + C(n-t,2) r+] / C(n,2)
/// with psi(w) = lambda_c w^3 / 6 and R = lambda psi(w) - E(Delta | t).
pub fn pair_diagnostics(n: u64) -> Result<PairDiagnostics> {
    validate_n(n)?;
    let cp = critical_constants()?;
    let lam = lambda(n)?;
    let nf = n as f64;
    let quarter = nf.powf(0.25);
    let n34 = nf.powf(0.75);
    let pairs_total = nf * (nf - 1.0) / 2.0;

    let (counts, omega) = config_log_weights(n, cp.j_c, cp.h_c);
    let law = magnetization_law(n, cp.j_c, cp.h_c)?;
    debug_assert_eq!(law.len(), counts.len());

    let ratio = |log_a: f64, log_b: f64| -> f64 {
        // exp(log_a) / (exp(log_a) + exp(log_b)) with shared max subtraction
        let m = log_a.max(log_b);
        let ea = (log_a - m).exp();
        let eb = (log_b - m).exp();
        ea / (ea + eb)
    };

    let mut atoms = Vec::with_capacity(counts.len());
    for (i, (&t, law_atom)) in counts.iter().zip(law.atoms()).enumerate() {
        let tf = t as f64;
        let vf = (n - t) as f64;
        let w = quarter * (tf / nf - cp.m_c);

        let mut drift = 0.0;
        let mut bracket = 0.0;
        if t >= 2 {
            let r_minus = ratio(omega[i - 1], omega[i]);
            let count = tf * (tf - 1.0) / 2.0;
            drift += count * r_minus;
            bracket += count * r_minus;
        }
        if n - t >= 2 {
            let r_plus = ratio(omega[i + 1], omega[i]);
            let count = vf * (vf - 1.0) / 2.0;
            drift -= count * r_plus;
            bracket += count * r_plus;
        }
        let e_delta = 2.0 * drift / (pairs_total * n34);
        let scale = bracket / pairs_total;
        let e_delta2 = 4.0 / nf.powf(1.5) * scale;
        let e_delta4 = 16.0 / nf.powi(3) * scale;

        let psi_w = cp.lambda_c * w * w * w / 6.0;
        atoms.push(PairAtom {
            w,
            log_prob: law_atom.log_prob,
            e_delta,
            e_delta2,
            e_delta4,
            psi_w,
            remainder: lam * psi_w - e_delta,
        });
    }

    Ok(PairDiagnostics {
        lambda: lam,
        delta_support_bound: 2.0 / n34,
        atoms,
    })
}

/// sup over atoms of |E(Delta^2 | t) / (2 lambda) - 1| * n^{1/4} / (|w| + 1),
/// the finite-n constant of the conditional-variance contraction.
pub fn verify_cond_var_scaling(n: u64) -> Result<f64> {
    let diag = pair_diagnostics(n)?;
    let quarter = (n as f64).powf(0.25);
    let mut sup: f64 = 0.0;
    for a in &diag.atoms {
        sup = sup.max((a.e_delta2 / (2.0 * diag.lambda) - 1.0).abs() * quarter / (a.w.abs() + 1.0));
    }
    Ok(sup)
}

/// sup over atoms of |R| n^{7/4} / (|w|^4 + 1), the empirical constant of
/// the remainder envelope.
pub fn remainder_scaling(n: u64) -> Result<f64> {
    let diag = pair_diagnostics(n)?;
    let scale = (n as f64).powf(1.75);
    let mut sup: f64 = 0.0;
    for a in &diag.atoms {
        sup = sup.max(a.remainder.abs() * scale / (a.w.powi(4) + 1.0));
    }
    Ok(sup)
}

/// P(|W| > delta n^{1/4}) exactly from the critical law.
pub fn tail_concentration(n: u64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("expected delta > 0, got {delta}")));
    }
    let law = w_law(n)?;
    let threshold = delta * (n as f64).powf(0.25);
    let mut acc = SignedLogSum::new();
    for atom in law.atoms() {
        if atom.location.abs() > threshold {
            acc.add(1.0, atom.log_prob);
        }
    }
    Ok(acc.value())
}

/// Detailed-balance gap of the magnetization-level pair-update kernel:
/// max over adjacent counts of |log(pi K) - log(pi' K')|.
pub fn detailed_balance_max_gap(n: u64) -> Result<f64> {
    validate_n(n)?;
    let cp = critical_constants()?;
    let (counts, omega) = config_log_weights(n, cp.j_c, cp.h_c);
    let law = magnetization_law(n, cp.j_c, cp.h_c)?;
    let mut worst: f64 = 0.0;
    for i in 0..counts.len() - 1 {
        let t = counts[i] as f64;
        let v = (n - counts[i]) as f64;
        let m = omega[i].max(omega[i + 1]);
        let denom = (omega[i] - m).exp() + (omega[i + 1] - m).exp();
        let r_plus = (omega[i + 1] - m).exp() / denom;
        let r_minus = (omega[i] - m).exp() / denom;
        // up-move from t: choose a dimer-covered pair, resample to monomers
        let log_k_up = (v * (v - 1.0) / 2.0).ln() + r_plus.ln();
        // down-move from t+2: choose a monomer pair, resample to dimer-covered
        let log_k_down = ((t + 2.0) * (t + 1.0) / 2.0).ln() + r_minus.ln();
        let lhs = law.atoms()[i].log_prob + log_k_up;
        let rhs = law.atoms()[i + 1].log_prob + log_k_down;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}
