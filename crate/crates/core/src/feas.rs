//! Exact feasibility of systems of strict linear inequalities over the
//! rationals, by Fourier-Motzkin elimination. Small systems only; the
//! classifiers use it to produce witness charges and the ladder certificate
//! uses it to confirm joint infeasibility.

use crate::scalar::Rational;

/// The strict inequality `coeffs . x > rhs`.
#[derive(Debug, Clone)]
pub struct StrictIneq {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl StrictIneq {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        StrictIneq { coeffs, rhs }
    }

    /// Homogeneous inequality `coeffs . x > 0`.
    pub fn positive(coeffs: Vec<Rational>) -> Self {
        StrictIneq { coeffs, rhs: Rational::zero() }
    }

    fn eval_partial(&self, known: &[Option<Rational>]) -> (Rational, Vec<(usize, Rational)>) {
        let mut constant = -&self.rhs;
        let mut unknown = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match &known[i] {
                Some(v) => constant = constant + c * v,
                None => unknown.push((i, c.clone())),
            }
        }
        (constant, unknown)
    }
}

/// Find an exact rational point satisfying every strict inequality, or
/// `None` when the system is infeasible.
pub fn strict_feasible_witness(n_vars: usize, ineqs: &[StrictIneq]) -> Option<Vec<Rational>> {
    // Eliminate variables n-1, n-2, ..., 0, keeping the systems around for
    // the back substitution.
    let mut systems: Vec<Vec<StrictIneq>> = vec![ineqs.to_vec()];
    for var in (0..n_vars).rev() {
        let current = systems.last().unwrap();
        let mut next = Vec::new();
        let mut lowers = Vec::new(); // coeff > 0: x > bound
        let mut uppers = Vec::new(); // coeff < 0: x < bound
        for ineq in current {
            let c = &ineq.coeffs[var];
            if c.is_zero() {
                next.push(ineq.clone());
            } else if c.is_negative() {
                uppers.push(ineq.clone());
            } else {
                lowers.push(ineq.clone());
            }
        }
        // Combine each lower with each upper: scale to cancel the variable.
        for lo in &lowers {
            for hi in &uppers {
                let a = &lo.coeffs[var];
                let b = &hi.coeffs[var]; // negative
                // a > 0, b < 0: (-b) * lo + a * hi eliminates var, stays strict.
                let mb = -b;
                let coeffs: Vec<Rational> = lo
                    .coeffs
                    .iter()
                    .zip(&hi.coeffs)
                    .map(|(lc, hc)| &(&mb * lc) + &(a * hc))
                    .collect();
                let rhs = &(&mb * &lo.rhs) + &(a * &hi.rhs);
                next.push(StrictIneq::new(coeffs, rhs));
            }
        }
        systems.push(next);
    }
    // The fully eliminated system has only constant inequalities 0 > rhs.
    if systems.last().unwrap().iter().any(|i| !i.rhs.is_negative()) {
        return None;
    }
    // Back substitution: choose each variable inside its open interval.
    let mut known: Vec<Option<Rational>> = vec![None; n_vars];
    for var in 0..n_vars {
        // systems[n_vars - var] was produced after eliminating `var`;
        // systems[n_vars - 1 - var] still contains it.
        let system = &systems[n_vars - 1 - var];
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for ineq in system {
            let c = &ineq.coeffs[var];
            if c.is_zero() {
                continue;
            }
            let (constant, unknown) = ineq.eval_partial(&known);
            debug_assert!(
                unknown.len() == 1 && unknown[0].0 == var,
                "back substitution expects a single unknown"
            );
            // c * x + constant > 0
            let bound = &(-&constant) * &c.recip().expect("nonzero coefficient");
            if c.is_negative() {
                upper = Some(match upper {
                    None => bound,
                    Some(u) => {
                        if bound < u {
                            bound
                        } else {
                            u
                        }
                    }
                });
            } else {
                lower = Some(match lower {
                    None => bound,
                    Some(l) => {
                        if bound > l {
                            bound
                        } else {
                            l
                        }
                    }
                });
            }
        }
        let value = match (lower, upper) {
            (None, None) => Rational::zero(),
            (Some(l), None) => l + Rational::one(),
            (None, Some(u)) => u - Rational::one(),
            (Some(l), Some(u)) => {
                debug_assert!(l < u, "interval must be nonempty for a feasible system");
                (l + u) * Rational::new(1, 2).unwrap()
            }
        };
        known[var] = Some(value);
    }
    let witness: Vec<Rational> = known.into_iter().map(Option::unwrap).collect();
    debug_assert!(ineqs.iter().all(|i| {
        let lhs: Rational = i
            .coeffs
            .iter()
            .zip(&witness)
            .map(|(c, x)| c * x)
            .fold(Rational::zero(), |a, b| a + b);
        lhs > i.rhs
    }));
    Some(witness)
}

/// Feasibility without a witness.
pub fn strict_feasible(n_vars: usize, ineqs: &[StrictIneq]) -> bool {
    strict_feasible_witness(n_vars, ineqs).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn feasible_chain() {
        // x0 > x1 > x2, x2 > 5
        let ineqs = vec![
            StrictIneq::positive(vec![rat(1, 1), rat(-1, 1), rat(0, 1)]),
            StrictIneq::positive(vec![rat(0, 1), rat(1, 1), rat(-1, 1)]),
            StrictIneq::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)], rat(5, 1)),
        ];
        let w = strict_feasible_witness(3, &ineqs).unwrap();
        assert!(w[0] > w[1] && w[1] > w[2] && w[2] > rat(5, 1));
    }

    #[test]
    fn infeasible_cycle() {
        // x0 > x1, x1 > x0
        let ineqs = vec![
            StrictIneq::positive(vec![rat(1, 1), rat(-1, 1)]),
            StrictIneq::positive(vec![rat(-1, 1), rat(1, 1)]),
        ];
        assert!(!strict_feasible(2, &ineqs));
    }

    #[test]
    fn strictness_matters() {
        // x > 0 and -x > 0 jointly infeasible; x > 0 and -x > -1 feasible.
        assert!(!strict_feasible(
            1,
            &[
                StrictIneq::positive(vec![rat(1, 1)]),
                StrictIneq::positive(vec![rat(-1, 1)]),
            ]
        ));
        let w = strict_feasible_witness(
            1,
            &[
                StrictIneq::positive(vec![rat(1, 1)]),
                StrictIneq::new(vec![rat(-1, 1)], rat(-1, 1)),
            ],
        )
        .unwrap();
        assert!(w[0] > rat(0, 1) && w[0] < rat(1, 1));
    }

    #[test]
    fn empty_system_is_feasible() {
        assert!(strict_feasible(4, &[]));
    }
}
