use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Numerical thresholds shared by the geometric routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T> {
    /// Membership in `K_k`, `W_k`, `V_k`.
    pub mem: T,
    /// Feasibility residual for witnesses.
    pub feas: T,
    /// Strict interiority `f_k > int`.
    pub int: T,
    /// Relative singular-value threshold for rank decisions.
    pub rank: T,
    /// Degeneracy-system residual.
    pub deg: T,
    /// Moment-map residual of lifted points.
    pub lift: T,
    /// Operator-algebra residuals of induced structures.
    pub alg: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            mem: T::lit(1e-9),
            feas: T::lit(1e-8),
            int: T::lit(1e-6),
            rank: T::lit(1e-8),
            deg: T::lit(1e-8),
            lift: T::lit(1e-10),
            alg: T::lit(1e-8),
        }
    }
}

/// Partial overrides, as read from a config file or the command line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub mem: Option<f64>,
    pub feas: Option<f64>,
    pub int: Option<f64>,
    pub rank: Option<f64>,
    pub deg: Option<f64>,
    pub lift: Option<f64>,
    pub alg: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply<T: Real>(&self, mut t: Tolerances<T>) -> Tolerances<T> {
        let set = |slot: &mut T, v: Option<f64>| {
            if let Some(v) = v {
                *slot = T::lit(v);
            }
        };
        set(&mut t.mem, self.mem);
        set(&mut t.feas, self.feas);
        set(&mut t.int, self.int);
        set(&mut t.rank, self.rank);
        set(&mut t.deg, self.deg);
        set(&mut t.lift, self.lift);
        set(&mut t.alg, self.alg);
        t
    }

    pub fn merge(self, other: ToleranceOverrides) -> ToleranceOverrides {
        ToleranceOverrides {
            mem: other.mem.or(self.mem),
            feas: other.feas.or(self.feas),
            int: other.int.or(self.int),
            rank: other.rank.or(self.rank),
            deg: other.deg.or(self.deg),
            lift: other.lift.or(self.lift),
            alg: other.alg.or(self.alg),
        }
    }
}
