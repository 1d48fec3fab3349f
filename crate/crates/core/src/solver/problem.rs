use super::grid::{Domain, Grid};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest grid edge (nodes per axis minus one) accepted in three dimensions.
pub const MAX_INTERVALS_3D: usize = 32;

/// Named right-hand sides.
#[derive(Debug, Clone, PartialEq)]
pub enum RhsSpec {
    /// `g = c`.
    Constant(f64),
    /// `g = |x|^2`.
    RadialSquare,
    /// One value per grid node, in node order.
    Tabulated(Vec<f64>),
}

impl RhsSpec {
    /// Parses `constant <c>` or `radial-square`. Tabulated data comes from a
    /// file and is attached by the caller.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        match parts.next() {
            Some("constant") => {
                let c = parts
                    .next()
                    .ok_or_else(|| Error::Config("`constant` needs a value".into()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad constant: {e}")))?;
                Ok(RhsSpec::Constant(c))
            }
            Some("radial-square") => Ok(RhsSpec::RadialSquare),
            Some(other) => Err(Error::Config(format!(
                "unknown g `{other}` (expected constant <c> | radial-square | tabulated <path>)"
            ))),
            None => Err(Error::Config("empty g specification".into())),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RhsSpec::Constant(c) => format!("constant {c}"),
            RhsSpec::RadialSquare => "radial-square".into(),
            RhsSpec::Tabulated(v) => format!("tabulated ({} values)", v.len()),
        }
    }
}

/// Inputs of [`build_problem`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub domain: Domain,
    pub d: usize,
    pub m: usize,
    pub h: f64,
    pub rhs: RhsSpec,
    /// Budget `K` in `|grad g|^2 <= K g`.
    pub k_budget: f64,
}

/// Result of validating `|grad g|^2 <= K g` and `1 / sup g <= K` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck {
    pub k_budget: f64,
    /// `max (|grad_h g|^2 - K g)` over interior nodes.
    pub worst_excess: f64,
    /// Excess within roundoff.
    pub exact: bool,
    /// Excess within the `O(h)` allowance `h (1 + K)`.
    pub within_o_h: bool,
    pub sup_g: f64,
    /// `1 / sup g <= K`; fails for `g = 0`.
    pub sup_condition: bool,
}

impl AssumptionCheck {
    pub fn passes(&self) -> bool {
        self.within_o_h && self.sup_condition
    }
}

/// Dirichlet problem `P_m(D^2 u) = g^(m-1)` in the domain, `u = 0` on its boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProblem<T> {
    pub grid: Grid<T>,
    pub domain: Domain,
    pub m: usize,
    /// Right-hand side at every node of the box.
    pub g: Vec<T>,
    pub k_budget: f64,
    pub rhs: RhsSpec,
    pub assumption: AssumptionCheck,
}

impl<T: Real> GridProblem<T> {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn spacing(&self) -> T {
        self.grid.spacing()
    }

    /// Same problem with `g` replaced by `g + shift`.
    pub fn shifted_rhs(&self, shift: T) -> Self {
        let mut out = self.clone();
        for g in &mut out.g {
            *g = *g + shift;
        }
        out.assumption = check_assumption(&out.grid, out.domain, &out.g, out.k_budget);
        out
    }

    /// Whether `inf g = 0` over interior nodes.
    pub fn is_degenerate(&self) -> bool {
        let snap = snap_distance(self.spacing());
        (0..self.grid.node_count())
            .filter(|&i| self.domain.distance(&self.grid.coords(i)) > snap)
            .any(|i| self.g[i] <= T::zero())
    }
}

/// Nodes closer than this to the boundary are treated as boundary nodes.
pub fn snap_distance<T: Real>(h: T) -> T {
    T::lit(1e-3) * h
}

fn check_assumption<T: Real>(grid: &Grid<T>, domain: Domain, g: &[T], k_budget: f64) -> AssumptionCheck {
    let h = grid.spacing().to_f64_lossy();
    let d = grid.dim();
    let snap = snap_distance(grid.spacing());
    let mut worst = f64::NEG_INFINITY;
    let mut scale = 0.0f64;
    for idx in 0..grid.node_count() {
        if domain.distance(&grid.coords(idx)) <= snap {
            continue;
        }
        let mut grad2 = 0.0;
        let mut complete = true;
        for k in 0..d {
            let mut e = vec![0; d];
            e[k] = 1;
            let plus = grid.offset(idx, &e);
            e[k] = -1;
            let minus = grid.offset(idx, &e);
            match (plus, minus) {
                (Some(p), Some(q)) => {
                    let gk = (g[p].to_f64_lossy() - g[q].to_f64_lossy()) / (2.0 * h);
                    grad2 += gk * gk;
                }
                _ => complete = false,
            }
        }
        if !complete {
            continue;
        }
        let gv = g[idx].to_f64_lossy();
        scale = scale.max(grad2.abs()).max(k_budget * gv.abs());
        worst = worst.max(grad2 - k_budget * gv);
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    let sup_g = g.iter().map(|v| v.to_f64_lossy()).fold(0.0, f64::max);
    AssumptionCheck {
        k_budget,
        worst_excess: worst,
        exact: worst <= 1e-12 * (1.0 + scale),
        within_o_h: worst <= h * (1.0 + k_budget),
        sup_g,
        sup_condition: sup_g > 0.0 && 1.0 / sup_g <= k_budget,
    }
}

/// Validates a configuration and samples `g` on the grid.
pub fn build_problem<T: Real>(config: &ProblemConfig) -> Result<GridProblem<T>> {
    let ProblemConfig { domain, d, m, h, ref rhs, k_budget } = *config;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Config(format!("grid spacing h must be positive, got {h}")));
    }
    let n_real = 2.0 / h;
    let n = n_real.round() as usize;
    if n < 2 || (n_real - n as f64).abs() > 1e-9 * n_real {
        return Err(Error::Config(format!("2 / h must be an integer >= 2, got {n_real}")));
    }
    if d != 2 && d != 3 {
        return Err(Error::Config(format!("dimension d must be 2 or 3, got {d}")));
    }
    if m < 2 || m > d {
        return Err(Error::Config(format!("order m must lie in 2..={d}, got {m}")));
    }
    if d == 3 && n > MAX_INTERVALS_3D {
        return Err(Error::Config(format!(
            "three-dimensional grids are limited to {} nodes per axis",
            MAX_INTERVALS_3D + 1
        )));
    }
    if !(k_budget >= 0.0) || !k_budget.is_finite() {
        return Err(Error::Config(format!("K must be nonnegative, got {k_budget}")));
    }
    let grid = Grid::<T>::new(d, n);
    let g: Vec<T> = match rhs {
        RhsSpec::Constant(c) => vec![T::lit(*c); grid.node_count()],
        RhsSpec::RadialSquare => (0..grid.node_count())
            .map(|i| grid.coords(i).iter().map(|&x| x * x).sum())
            .collect(),
        RhsSpec::Tabulated(values) => {
            if values.len() != grid.node_count() {
                return Err(Error::Config(format!(
                    "tabulated g has {} values, grid has {} nodes",
                    values.len(),
                    grid.node_count()
                )));
            }
            values.iter().map(|&v| T::lit(v)).collect()
        }
    };
    if let Some(bad) = g.iter().position(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return Err(Error::Config(format!("g must be finite and nonnegative; node {bad} has g = {}", g[bad])));
    }
    let assumption = check_assumption(&grid, domain, &g, k_budget);
    Ok(GridProblem { grid, domain, m, g, k_budget, rhs: rhs.clone(), assumption })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(domain: Domain, rhs: RhsSpec, k: f64) -> ProblemConfig {
        ProblemConfig { domain, d: 2, m: 2, h: 1.0 / 32.0, rhs, k_budget: k }
    }

    #[test]
    fn constant_disc() {
        let p = build_problem::<f64>(&cfg(Domain::Ball, RhsSpec::Constant(1.0), 0.0)).unwrap();
        assert_eq!(p.grid.intervals(), 64);
        assert_eq!(p.assumption.worst_excess, 0.0);
        assert!(p.assumption.exact && p.assumption.within_o_h);
        // 1 / sup g = 1 > K = 0.
        assert!(!p.assumption.sup_condition);
        let p = build_problem::<f64>(&cfg(Domain::Ball, RhsSpec::Constant(1.0), 1.0)).unwrap();
        assert!(p.assumption.passes());
    }

    #[test]
    fn radial_square_identity() {
        let p = build_problem::<f64>(&cfg(Domain::Ball, RhsSpec::RadialSquare, 4.0)).unwrap();
        assert!(p.assumption.exact, "{:?}", p.assumption);
        assert!(p.assumption.passes());
        assert!(p.is_degenerate());
        let p = build_problem::<f64>(&cfg(Domain::Ball, RhsSpec::RadialSquare, 3.0)).unwrap();
        assert!(!p.assumption.exact);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            build_problem::<f64>(&cfg(Domain::Cube, RhsSpec::Constant(-1.0), 1.0)),
            Err(Error::Config(_))
        ));
        let mut c = cfg(Domain::Ball, RhsSpec::Constant(1.0), 1.0);
        c.h = 0.0;
        assert!(matches!(build_problem::<f64>(&c), Err(Error::Config(_))));
        c.h = 0.3;
        assert!(matches!(build_problem::<f64>(&c), Err(Error::Config(_))));
        assert!(matches!(RhsSpec::parse("gaussian"), Err(Error::Config(_))));
        assert_eq!(RhsSpec::parse("constant 2.5").unwrap(), RhsSpec::Constant(2.5));
        let mut c = cfg(Domain::Cube, RhsSpec::Constant(1.0), 1.0);
        c.d = 3;
        c.h = 1.0 / 32.0;
        assert!(matches!(build_problem::<f64>(&c), Err(Error::Config(_))));
    }
}
