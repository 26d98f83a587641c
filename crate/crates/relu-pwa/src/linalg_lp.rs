//! Dense small-scale linear programming: a two-phase tableau simplex with
//! Bland's anti-cycling rule, plus the Chebyshev-center LP lift.
//!
//! Everything downstream (polyhedron emptiness, interior points, mp-LP
//! slices) runs through [`solve_lp`]. Problems here are tiny and dense, so
//! the solver favors robustness over speed: Bland's rule always, no
//! factorization reuse.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Componentwise feasibility tolerance for returned optimizers.
pub const FEAS_TOL: f64 = 1e-9;
/// Reduced-cost threshold below which a column may enter the basis.
pub const OPT_TOL: f64 = 1e-9;

/// Pivot entries smaller than this are treated as zero in the ratio test.
const PIVOT_TOL: f64 = 1e-11;
/// Half-width of the truncation box used to report a center for unbounded
/// Chebyshev problems.
const TRUNCATION: f64 = 1e6;

/// `min cᵀx  s.t.  A x ≤ b`, with `x` free unless `var_bounds` is given.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub cost: Array1<f64>,
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    /// Optional `(lo, hi)` per variable; use `±INFINITY` for one-sided
    /// bounds. Translated into inequality rows at solve time.
    pub var_bounds: Option<Vec<(f64, f64)>>,
}

impl LinearProgram {
    pub fn new(cost: Array1<f64>, a: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimMismatch(format!(
                "constraint matrix has {} rows but bound vector has {} entries",
                a.nrows(),
                b.len()
            )));
        }
        if a.ncols() != cost.len() {
            return Err(Error::DimMismatch(format!(
                "constraint matrix has {} columns but cost vector has {} entries",
                a.ncols(),
                cost.len()
            )));
        }
        if cost.iter().any(|v| !v.is_finite())
            || a.iter().any(|v| !v.is_finite())
            || b.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Invalid("LP data contains non-finite entries".into()));
        }
        Ok(LinearProgram {
            cost,
            a,
            b,
            var_bounds: None,
        })
    }

    pub fn with_var_bounds(mut self, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.len() != self.cost.len() {
            return Err(Error::DimMismatch(format!(
                "{} variable bounds for {} variables",
                bounds.len(),
                self.cost.len()
            )));
        }
        self.var_bounds = Some(bounds);
        Ok(self)
    }
}

/// Solver verdict. An optimizer is present exactly when the LP is optimal.
#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: Array1<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(&Array1<f64>, f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, *value)),
            _ => None,
        }
    }
}

/// Result of the largest-inscribed-ball problem for `{x : A x ≤ b}`.
#[derive(Debug, Clone)]
pub enum Chebyshev {
    /// Deepest interior point and its distance to the nearest facet. An
    /// unbounded polyhedron reports `radius = +∞` with a center taken from a
    /// box-truncated problem.
    Center { point: Array1<f64>, radius: f64 },
    /// The polyhedron has no point at all.
    Empty,
}

impl Chebyshev {
    pub fn radius(&self) -> Option<f64> {
        match self {
            Chebyshev::Center { radius, .. } => Some(*radius),
            Chebyshev::Empty => None,
        }
    }
}

enum Verdict {
    Optimal,
    Unbounded,
}

/// Tableau state for one phase of the simplex method.
struct Tableau {
    /// Current dictionary `B⁻¹ N` over all columns, row-major.
    t: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    /// Runs Bland-rule simplex to optimality on the given cost vector.
    /// Columns with `enterable[j] == false` never enter the basis.
    fn run(&mut self, cost: &[f64], enterable: &[bool]) -> Result<Verdict> {
        let max_iter = 200_000usize.max(1000 * (self.ncols + self.t.len()));
        for _ in 0..max_iter {
            // reduced costs r_j = c_j − c_Bᵀ T_j
            let mut entering = None;
            for j in 0..self.ncols {
                if !enterable[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for (i, row) in self.t.iter().enumerate() {
                    let cb = cost[self.basis[i]];
                    if cb != 0.0 {
                        r -= cb * row[j];
                    }
                }
                if r < -OPT_TOL {
                    entering = Some(j);
                    break; // Bland: smallest index
                }
            }
            let Some(j) = entering else {
                return Ok(Verdict::Optimal);
            };

            // ratio test, ties broken by smallest basic-variable index
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let piv = self.t[i][j];
                if piv > PIVOT_TOL {
                    let ratio = self.rhs[i] / piv;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - PIVOT_TOL
                                || (ratio < lr + PIVOT_TOL && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((i, _)) = leave else {
                return Ok(Verdict::Unbounded);
            };
            self.pivot(i, j);
        }
        Err(Error::Invalid(
            "simplex iteration limit exceeded; LP data is numerically pathological".into(),
        ))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[row][col];
        let inv = 1.0 / piv;
        for v in self.t[row].iter_mut() {
            *v *= inv;
        }
        self.rhs[row] *= inv;
        self.t[row][col] = 1.0;
        for i in 0..self.t.len() {
            if i == row {
                continue;
            }
            let factor = self.t[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..self.ncols {
                let delta = factor * self.t[row][j];
                self.t[i][j] -= delta;
            }
            self.t[i][col] = 0.0;
            self.rhs[i] -= factor * self.rhs[row];
        }
        self.basis[row] = col;
    }

    /// Drops rows whose basic variable is an artificial stuck at zero and
    /// that have no usable pivot among the structural columns.
    fn clear_artificials(&mut self, art_start: usize) {
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] < art_start {
                i += 1;
                continue;
            }
            let pivot_col = (0..art_start).find(|&j| self.t[i][j].abs() > 1e-7);
            match pivot_col {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    // redundant constraint: 0 = 0 after elimination
                    self.t.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

/// Solves `min cᵀx  s.t.  A x ≤ b` (free variables) with the two-phase
/// simplex method. Never reports a "numerical failure": Bland's rule
/// guarantees termination, and degenerate bases are pivoted through.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let d = lp.cost.len();

    // gather inequality rows, expanding variable bounds
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(lp.a.nrows() + 2 * d);
    for (row, &bi) in lp.a.rows().into_iter().zip(lp.b.iter()) {
        rows.push((row.to_vec(), bi));
    }
    if let Some(bounds) = &lp.var_bounds {
        for (k, &(lo, hi)) in bounds.iter().enumerate() {
            if lo.is_finite() {
                let mut r = vec![0.0; d];
                r[k] = -1.0;
                rows.push((r, -lo));
            }
            if hi.is_finite() {
                let mut r = vec![0.0; d];
                r[k] = 1.0;
                rows.push((r, hi));
            }
        }
    }

    let m = rows.len();
    // columns: x⁺ (d) | x⁻ (d) | slack (m) | artificial (as needed)
    let art_start = 2 * d + m;
    let mut art_count = 0;
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_rows = Vec::new();
    for (i, (a, b)) in rows.iter().enumerate() {
        let neg = *b < 0.0;
        let sign = if neg { -1.0 } else { 1.0 };
        let mut row = vec![0.0; art_start];
        for k in 0..d {
            row[k] = sign * a[k];
            row[d + k] = -sign * a[k];
        }
        row[2 * d + i] = sign;
        rhs.push(sign * b);
        if neg {
            art_rows.push(t.len());
            art_count += 1;
            basis.push(art_start + art_count - 1);
        } else {
            basis.push(2 * d + i);
        }
        t.push(row);
    }
    let ncols = art_start + art_count;
    for row in t.iter_mut() {
        row.resize(ncols, 0.0);
    }
    for (k, &ri) in art_rows.iter().enumerate() {
        t[ri][art_start + k] = 1.0;
    }

    let mut tab = Tableau {
        t,
        rhs,
        basis,
        ncols,
    };

    // phase 1: drive artificials to zero
    if art_count > 0 {
        let mut phase1_cost = vec![0.0; ncols];
        for j in art_start..ncols {
            phase1_cost[j] = 1.0;
        }
        let enterable = vec![true; ncols];
        match tab.run(&phase1_cost, &enterable)? {
            Verdict::Unbounded => unreachable!("phase-1 objective is bounded below by zero"),
            Verdict::Optimal => {}
        }
        let p1: f64 = tab
            .basis
            .iter()
            .zip(tab.rhs.iter())
            .filter(|(b, _)| **b >= art_start)
            .map(|(_, v)| v)
            .sum();
        if p1 > FEAS_TOL {
            return Ok(LpOutcome::Infeasible);
        }
        tab.clear_artificials(art_start);
    }

    // phase 2: original objective, artificials banned
    let mut cost = vec![0.0; ncols];
    for k in 0..d {
        cost[k] = lp.cost[k];
        cost[d + k] = -lp.cost[k];
    }
    let mut enterable = vec![true; ncols];
    for e in enterable.iter_mut().skip(art_start) {
        *e = false;
    }
    match tab.run(&cost, &enterable)? {
        Verdict::Unbounded => Ok(LpOutcome::Unbounded),
        Verdict::Optimal => {
            let mut x = Array1::zeros(d);
            for (i, &bv) in tab.basis.iter().enumerate() {
                if bv < d {
                    x[bv] += tab.rhs[i];
                } else if bv < 2 * d {
                    x[bv - d] -= tab.rhs[i];
                }
            }
            let value = lp.cost.dot(&x);
            Ok(LpOutcome::Optimal { x, value })
        }
    }
}

/// Center and radius of the largest ball inscribed in `{x : A x ≤ b}`,
/// via the standard lift `max r  s.t.  aᵢᵀx + ‖aᵢ‖ r ≤ bᵢ, r ≥ 0`.
pub fn chebyshev_center(a: &Array2<f64>, b: &Array1<f64>) -> Result<Chebyshev> {
    let d = a.ncols();
    let m = a.nrows();
    if b.len() != m {
        return Err(Error::DimMismatch(format!(
            "A has {m} rows but b has {} entries",
            b.len()
        )));
    }

    let mut lifted = Array2::zeros((m + 1, d + 1));
    let mut rhs = Array1::zeros(m + 1);
    for i in 0..m {
        let norm = a.row(i).dot(&a.row(i)).sqrt();
        for j in 0..d {
            lifted[[i, j]] = a[[i, j]];
        }
        lifted[[i, d]] = norm;
        rhs[i] = b[i];
    }
    lifted[[m, d]] = -1.0; // r ≥ 0
    let mut cost = Array1::zeros(d + 1);
    cost[d] = -1.0; // maximize r

    let lp = LinearProgram::new(cost.clone(), lifted.clone(), rhs.clone())?;
    match solve_lp(&lp)? {
        LpOutcome::Infeasible => Ok(Chebyshev::Empty),
        LpOutcome::Optimal { x, .. } => {
            let radius = x[d];
            let point = x.slice(ndarray::s![..d]).to_owned();
            Ok(Chebyshev::Center { point, radius })
        }
        LpOutcome::Unbounded => {
            // truncate and report the truncated center with an infinite radius
            let mut bounds = vec![(-TRUNCATION, TRUNCATION); d];
            bounds.push((0.0, TRUNCATION));
            let truncated = LinearProgram::new(cost, lifted, rhs)?.with_var_bounds(bounds)?;
            match solve_lp(&truncated)? {
                LpOutcome::Optimal { x, .. } => Ok(Chebyshev::Center {
                    point: x.slice(ndarray::s![..d]).to_owned(),
                    radius: f64::INFINITY,
                }),
                _ => unreachable!("truncated Chebyshev LP is feasible and bounded"),
            }
        }
    }
}
