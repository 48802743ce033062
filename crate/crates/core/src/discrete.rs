//! Exact finite-support laws kept in log space, and the per-atom
//! exchangeable-pair statistics shared by both models.
//!
//! Atom probabilities routinely reach e^{-900} in the far tail, so the law
//! stores log-probabilities end to end and exposes both cumulative sides
//! (lower mass and upper mass) so callers can always difference tails on
//! their small side. All reductions run in a fixed left-to-right order.

use crate::error::{invalid, Result};

/// log(e^a + e^b) without overflow.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log sum exp over a slice, fixed order, tolerant of -inf entries.
pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for &v in values {
        acc += (v - m).exp();
    }
    m + acc.ln()
}

/// Signed log-space accumulator: tracks sum of c_i where c_i = sign_i e^{log_i}.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SignedLogSum {
    pos: f64,
    neg: f64,
}

impl SignedLogSum {
    pub(crate) fn new() -> Self {
        SignedLogSum {
            pos: f64::NEG_INFINITY,
            neg: f64::NEG_INFINITY,
        }
    }

    pub(crate) fn add(&mut self, value: f64, log_weight: f64) {
        if value == 0.0 || log_weight == f64::NEG_INFINITY {
            return;
        }
        let term = value.abs().ln() + log_weight;
        if value > 0.0 {
            self.pos = log_add_exp(self.pos, term);
        } else {
            self.neg = log_add_exp(self.neg, term);
        }
    }

    pub(crate) fn value(&self) -> f64 {
        self.pos.exp() - self.neg.exp()
    }
}

/// One atom of a discrete law: a location and its log-probability.
#[derive(Debug, Clone, Copy)]
pub struct Atom {
    pub location: f64,
    pub log_prob: f64,
}

/// An exact finite-support probability law: sorted atoms with
/// log-probabilities normalized by log-sum-exp.
#[derive(Debug, Clone)]
pub struct DiscreteLaw {
    atoms: Vec<Atom>,
    /// cum_lower[i] = log P(X <= location_i)
    cum_lower: Vec<f64>,
    /// cum_upper[i] = log P(X >= location_i)
    cum_upper: Vec<f64>,
}

impl DiscreteLaw {
    /// Build from unnormalized log-weights. Locations must be finite and
    /// strictly increasing after sorting; entries with log-weight -inf are
    /// dropped.
    pub fn from_log_weights(locations: Vec<f64>, log_weights: Vec<f64>) -> Result<DiscreteLaw> {
        if locations.len() != log_weights.len() {
            return Err(invalid(
                "log_weights",
                format!(
                    "length mismatch: {} locations vs {} weights",
                    locations.len(),
                    log_weights.len()
                ),
            ));
        }
        if locations.is_empty() {
            return Err(invalid("locations", "empty atom list"));
        }
        let mut pairs: Vec<(f64, f64)> = locations
            .into_iter()
            .zip(log_weights)
            .filter(|&(_, lw)| lw != f64::NEG_INFINITY)
            .collect();
        if pairs.is_empty() {
            return Err(invalid("log_weights", "all weights are zero"));
        }
        for &(loc, lw) in &pairs {
            if !loc.is_finite() {
                return Err(invalid("locations", format!("non-finite location {loc}")));
            }
            if lw.is_nan() || lw == f64::INFINITY {
                return Err(invalid("log_weights", format!("invalid log weight {lw}")));
            }
        }
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite locations"));
        for w in pairs.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(invalid(
                    "locations",
                    format!("duplicate atom location {}", w[0].0),
                ));
            }
        }
        let norm = log_sum_exp(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        let atoms: Vec<Atom> = pairs
            .into_iter()
            .map(|(location, lw)| Atom {
                location,
                log_prob: lw - norm,
            })
            .collect();

        let mut cum_lower = Vec::with_capacity(atoms.len());
        let mut running = f64::NEG_INFINITY;
        for atom in &atoms {
            running = log_add_exp(running, atom.log_prob);
            cum_lower.push(running.min(0.0));
        }
        let mut cum_upper = vec![0.0; atoms.len()];
        running = f64::NEG_INFINITY;
        for i in (0..atoms.len()).rev() {
            running = log_add_exp(running, atoms[i].log_prob);
            cum_upper[i] = running.min(0.0);
        }

        Ok(DiscreteLaw {
            atoms,
            cum_lower,
            cum_upper,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn location(&self, i: usize) -> f64 {
        self.atoms[i].location
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.atoms[i].log_prob.exp()
    }

    /// log P(X <= location_i).
    pub fn log_cdf_at(&self, i: usize) -> f64 {
        self.cum_lower[i]
    }

    /// log P(X >= location_i).
    pub fn log_upper_at(&self, i: usize) -> f64 {
        self.cum_upper[i]
    }

    /// Total mass (should be 1 up to rounding).
    pub fn total_mass(&self) -> f64 {
        self.cum_lower.last().unwrap().exp()
    }

    /// Index of the last atom with location <= z, if any.
    pub fn last_index_at_or_below(&self, z: f64) -> Option<usize> {
        match self
            .atoms
            .binary_search_by(|a| a.location.partial_cmp(&z).expect("finite"))
        {
            Ok(i) => Some(i),
            Err(0) => None,
            Err(i) => Some(i - 1),
        }
    }

    /// Right-continuous CDF value P(X <= z).
    pub fn cdf(&self, z: f64) -> f64 {
        match self.last_index_at_or_below(z) {
            None => 0.0,
            Some(i) => self.cum_lower[i].exp(),
        }
    }

    /// Upper tail P(X > z), computed from the upper cumulative side.
    pub fn upper_tail(&self, z: f64) -> f64 {
        match self.last_index_at_or_below(z) {
            None => 1.0,
            Some(i) if i + 1 == self.atoms.len() => 0.0,
            Some(i) => self.cum_upper[i + 1].exp(),
        }
    }

    /// E g(X) as an exact atom sum with signed log-space accumulation.
    pub fn expect<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let mut acc = SignedLogSum::new();
        for atom in &self.atoms {
            acc.add(g(atom.location), atom.log_prob);
        }
        acc.value()
    }

    /// E |X|^r via log-sum-exp (exact at r = 0).
    pub fn abs_moment(&self, r: f64) -> f64 {
        if r == 0.0 {
            return self.total_mass();
        }
        let mut m = f64::NEG_INFINITY;
        let terms: Vec<f64> = self
            .atoms
            .iter()
            .filter(|a| a.location != 0.0)
            .map(|a| a.log_prob + r * a.location.abs().ln())
            .collect();
        for &t in &terms {
            m = m.max(t);
        }
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        let mut acc = 0.0;
        for &t in &terms {
            acc += (t - m).exp();
        }
        (m + acc.ln()).exp()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    /// Largest |normalization - 1| diagnostic.
    pub fn normalization_gap(&self) -> f64 {
        (self.total_mass() - 1.0).abs()
    }
}

/// Per-atom exchangeable-pair statistics: conditional increments of the
/// pair update given the atom, the drift psi, and the regression remainder
/// R = lambda psi(w) - E(Delta | w).
#[derive(Debug, Clone, Copy)]
pub struct PairAtom {
    pub w: f64,
    pub log_prob: f64,
    pub e_delta: f64,
    pub e_delta2: f64,
    pub e_delta4: f64,
    pub psi_w: f64,
    pub remainder: f64,
}

/// Exchangeable-pair diagnostics over the full atom set of a model at size n.
#[derive(Debug, Clone)]
pub struct PairDiagnostics {
    pub lambda: f64,
    /// Almost-sure bound on |Delta| (the pair increment support radius).
    pub delta_support_bound: f64,
    pub atoms: Vec<PairAtom>,
}

impl PairDiagnostics {
    /// E over atoms of `value(atom)`, probability weighted, in log space.
    pub fn expect<F: Fn(&PairAtom) -> f64>(&self, value: F) -> f64 {
        let mut acc = SignedLogSum::new();
        for atom in &self.atoms {
            acc.add(value(atom), atom.log_prob);
        }
        acc.value()
    }
}

/// Result of checking a per-atom inequality: the largest signed violation
/// (negative when the bound holds everywhere) and the supremum of
/// |lhs| / rhs over atoms (the empirical constant).
#[derive(Debug, Clone, Copy)]
pub struct BoundCheckReport {
    pub max_violation: f64,
    pub empirical_constant: f64,
}

impl BoundCheckReport {
    pub(crate) fn from_terms(terms: impl Iterator<Item = (f64, f64)>) -> BoundCheckReport {
        let mut max_violation = f64::NEG_INFINITY;
        let mut empirical_constant = 0.0f64;
        for (lhs, rhs) in terms {
            max_violation = max_violation.max(lhs - rhs);
            if rhs > 0.0 {
                empirical_constant = empirical_constant.max(lhs / rhs);
            }
        }
        BoundCheckReport {
            max_violation,
            empirical_constant,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn normalizes_and_sorts() {
        let law =
            DiscreteLaw::from_log_weights(vec![2.0, -1.0, 0.5], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(law.len(), 3);
        assert!(law.location(0) < law.location(1) && law.location(1) < law.location(2));
        assert_abs_diff_eq!(law.total_mass(), 1.0, epsilon = 1e-14);
        // heaviest atom is at -1
        assert_eq!(law.location(0), -1.0);
        assert_relative_eq!(
            law.prob(0),
            1.0f64.exp() / (1.0f64.exp() + 2.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn drops_zero_weight_atoms() {
        let law = DiscreteLaw::from_log_weights(
            vec![0.0, 1.0, 2.0],
            vec![0.0, f64::NEG_INFINITY, 0.0],
        )
        .unwrap();
        assert_eq!(law.len(), 2);
    }

    #[test]
    fn rejects_duplicates_and_mismatch() {
        assert!(DiscreteLaw::from_log_weights(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(DiscreteLaw::from_log_weights(vec![1.0], vec![0.0, 0.0]).is_err());
        assert!(DiscreteLaw::from_log_weights(vec![], vec![]).is_err());
    }

    #[test]
    fn cdf_is_right_continuous() {
        let law = DiscreteLaw::from_log_weights(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(law.cdf(-0.5), 0.0);
        assert_abs_diff_eq!(law.cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(law.cdf(0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(law.cdf(1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(law.upper_tail(0.0), 0.5, epsilon = 1e-15);
        assert_eq!(law.upper_tail(1.0), 0.0);
        assert_eq!(law.upper_tail(-1.0), 1.0);
    }

    #[test]
    fn tails_keep_relative_precision() {
        // the upper tail must come out as exp(-700), never as 1 - (1 - exp(-700))
        let law = DiscreteLaw::from_log_weights(vec![0.0, 10.0], vec![0.0, -700.0]).unwrap();
        let tail = law.upper_tail(5.0);
        assert!(tail > 0.0);
        assert_relative_eq!(tail.ln(), -700.0, max_relative = 1e-12);
        // past the exp range the log-space accessor still carries the mass
        let deep = DiscreteLaw::from_log_weights(vec![0.0, 10.0], vec![0.0, -800.0]).unwrap();
        assert_relative_eq!(deep.log_upper_at(1), -800.0, max_relative = 1e-12);
    }

    #[test]
    fn expectations() {
        let law = DiscreteLaw::from_log_weights(vec![-1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(law.mean(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(law.abs_moment(2.0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(law.abs_moment(0.0), 1.0, epsilon = 1e-14);
        let skewed = DiscreteLaw::from_log_weights(vec![0.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(skewed.mean(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(skewed.abs_moment(2.0), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn signed_log_sum_cancellation() {
        let mut acc = SignedLogSum::new();
        acc.add(1.0, -700.0);
        acc.add(-1.0, -700.0);
        assert_abs_diff_eq!(acc.value(), 0.0, epsilon = 1e-320);
        let mut acc2 = SignedLogSum::new();
        acc2.add(3.0, 0.0);
        acc2.add(-1.0, 0.0);
        assert_abs_diff_eq!(acc2.value(), 2.0, epsilon = 1e-14);
    }
}
