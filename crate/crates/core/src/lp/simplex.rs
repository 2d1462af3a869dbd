use std::fmt::Write as _;
use std::io::Write;

use super::{LinearProgram, LpOutcome, Relation, Sense};
use crate::{tol, Error, Result};

// Reduced costs below this are treated as non-improving.
const OPTIMALITY: f64 = 1e-9;
// Phase-one objective below -INFEASIBILITY means no feasible point.
const INFEASIBILITY: f64 = 1e-8;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

/// Condensed tableau: for every row `r`,
/// `x[basic[r]] + sum_j a[r][j] * x[nonbasic[j]] = b[r]`,
/// and the objective is `z = z0 + sum_j d[j] * x[nonbasic[j]]`.
struct Dictionary<'w> {
    a: Vec<f64>,
    b: Vec<f64>,
    d: Vec<f64>,
    z0: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    kinds: Vec<Kind>,
    pivots: usize,
    trace: Option<&'w mut dyn Write>,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl<'w> Dictionary<'w> {
    fn width(&self) -> usize {
        self.nonbasic.len()
    }

    fn at(&self, r: usize, j: usize) -> f64 {
        self.a[r * self.width() + j]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.width();
        let p = self.a[r * w + j];
        let inv = 1.0 / p;
        for k in 0..w {
            self.a[r * w + k] *= inv;
        }
        self.a[r * w + j] = inv;
        self.b[r] *= inv;
        let (pivot_row, b_r) = (self.a[r * w..(r + 1) * w].to_vec(), self.b[r]);
        for i in 0..self.b.len() {
            if i == r {
                continue;
            }
            let f = self.a[i * w + j];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[i * w..(i + 1) * w];
            for (rk, pk) in row.iter_mut().zip(&pivot_row) {
                *rk -= f * pk;
            }
            row[j] = -f * inv;
            self.b[i] -= f * b_r;
        }
        let dj = self.d[j];
        if dj != 0.0 {
            for (dk, pk) in self.d.iter_mut().zip(&pivot_row) {
                *dk -= dj * pk;
            }
            self.d[j] = -dj * inv;
            self.z0 += dj * b_r;
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[j]);
        self.pivots += 1;
        self.dump(&format!("pivot {} (row {r}, column {j})", self.pivots));
    }

    /// Bland's rule: lowest-index improving variable enters, ratio ties go to
    /// the lowest-index basic variable.
    fn run(&mut self) -> Result<Step> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Internal("simplex pivot limit reached".into()));
            }
            let entering = (0..self.width()).filter(|&j| self.d[j] > OPTIMALITY).min_by_key(|&j| self.nonbasic[j]);
            let Some(j) = entering else {
                return Ok(Step::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.b.len() {
                let a = self.at(r, j);
                if a <= tol::PIVOT {
                    continue;
                }
                let ratio = self.b[r].max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, q)) => {
                        let slack = 1e-12 * (1.0 + q.abs());
                        if ratio < q - slack || (ratio <= q + slack && self.basic[r] < self.basic[best]) {
                            Some((r, ratio))
                        } else {
                            Some((best, q))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(Step::Unbounded(j)),
                Some((r, _)) => self.pivot(r, j),
            }
        }
    }

    fn drop_columns(&mut self, keep: impl Fn(Kind) -> bool) {
        let w = self.width();
        let cols: Vec<usize> = (0..w).filter(|&j| keep(self.kinds[self.nonbasic[j]])).collect();
        let rows = self.b.len();
        let mut a = Vec::with_capacity(rows * cols.len());
        for r in 0..rows {
            a.extend(cols.iter().map(|&j| self.a[r * w + j]));
        }
        self.a = a;
        self.d = cols.iter().map(|&j| self.d[j]).collect();
        self.nonbasic = cols.iter().map(|&j| self.nonbasic[j]).collect();
    }

    fn drop_row(&mut self, r: usize) {
        let w = self.width();
        self.a.drain(r * w..(r + 1) * w);
        self.b.remove(r);
        self.basic.remove(r);
    }

    fn dump(&mut self, title: &str) {
        let Some(out) = self.trace.as_mut() else { return };
        let mut s = String::new();
        let _ = writeln!(s, "== {title}");
        let _ = write!(s, "{:>8} |", "basis");
        for &v in &self.nonbasic {
            let _ = write!(s, " {:>10}", format!("x{v}"));
        }
        let _ = writeln!(s, " | {:>10}", "rhs");
        for r in 0..self.basic.len() {
            let _ = write!(s, "{:>8} |", format!("x{}", self.basic[r]));
            for j in 0..self.nonbasic.len() {
                let _ = write!(s, " {:>10.4}", self.a[r * self.nonbasic.len() + j]);
            }
            let _ = writeln!(s, " | {:>10.4}", self.b[r]);
        }
        let _ = write!(s, "{:>8} |", "z");
        for &dj in &self.d {
            let _ = write!(s, " {dj:>10.4}");
        }
        let _ = writeln!(s, " | {:>10.4}", self.z0);
        let _ = out.write_all(s.as_bytes());
    }
}

/// Solves `lp` with a two-phase simplex using Bland's rule.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_inner(lp, None)
}

/// As [`solve`], writing the tableau after every pivot to `out`.
pub fn solve_traced(lp: &LinearProgram, out: &mut dyn Write) -> Result<LpOutcome> {
    solve_inner(lp, Some(out))
}

fn solve_inner(lp: &LinearProgram, trace: Option<&mut dyn Write>) -> Result<LpOutcome> {
    lp.validate()?;
    let nv = lp.num_vars();
    let sign = match lp.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };

    // Shift x = x' + lb and orient every row so its rhs is nonnegative.
    struct Row {
        coeffs: Vec<f64>,
        relation: Relation,
        rhs: f64,
    }
    let rows: Vec<Row> = lp
        .constraints
        .iter()
        .map(|c| {
            let shift: f64 = c.coeffs.iter().zip(&lp.lower_bounds).map(|(a, l)| a * l).sum();
            let rhs = c.rhs - shift;
            if rhs < 0.0 {
                let relation = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                Row { coeffs: c.coeffs.iter().map(|a| -a).collect(), relation, rhs: -rhs }
            } else {
                Row { coeffs: c.coeffs.clone(), relation: c.relation, rhs }
            }
        })
        .collect();

    // Variable numbering: structural, then one slack/surplus per inequality,
    // then one artificial per >= or = row.
    let mut kinds = vec![Kind::Structural; nv];
    let mut slack_of = vec![None; rows.len()];
    for (r, row) in rows.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack_of[r] = Some(kinds.len());
            kinds.push(Kind::Slack);
        }
    }
    let mut basic = Vec::with_capacity(rows.len());
    for row in &rows {
        basic.push(usize::MAX);
        if row.relation != Relation::Le {
            kinds.push(Kind::Artificial);
        }
    }
    let mut next_art = nv + slack_of.iter().flatten().count();
    let mut nonbasic: Vec<usize> = (0..nv).collect();
    for (r, row) in rows.iter().enumerate() {
        match row.relation {
            Relation::Le => basic[r] = slack_of[r].expect("inequality has a slack"),
            Relation::Ge => {
                basic[r] = next_art;
                next_art += 1;
                nonbasic.push(slack_of[r].expect("inequality has a slack"));
            }
            Relation::Eq => {
                basic[r] = next_art;
                next_art += 1;
            }
        }
    }
    let w = nonbasic.len();
    let mut a = vec![0.0; rows.len() * w];
    for (r, row) in rows.iter().enumerate() {
        a[r * w..r * w + nv].copy_from_slice(&row.coeffs);
    }
    for (j, &v) in nonbasic.iter().enumerate().skip(nv) {
        let r = slack_of.iter().position(|s| *s == Some(v)).expect("surplus belongs to a row");
        a[r * w + j] = -1.0;
    }

    let mut dict = Dictionary {
        a,
        b: rows.iter().map(|r| r.rhs).collect(),
        d: vec![0.0; w],
        z0: 0.0,
        basic,
        nonbasic,
        kinds,
        pivots: 0,
        trace,
    };

    // Phase one: maximize minus the sum of artificials.
    let has_artificial = dict.basic.iter().any(|&v| dict.kinds[v] == Kind::Artificial);
    if has_artificial {
        for r in 0..dict.b.len() {
            if dict.kinds[dict.basic[r]] == Kind::Artificial {
                dict.z0 -= dict.b[r];
                for j in 0..w {
                    dict.d[j] += dict.a[r * w + j];
                }
            }
        }
        dict.dump("phase one start");
        match dict.run()? {
            Step::Optimal => {}
            Step::Unbounded(_) => {
                return Err(Error::Internal("phase one cannot be unbounded".into()));
            }
        }
        if dict.z0 < -INFEASIBILITY * (1.0 + dict.b.iter().map(|b| b.abs()).fold(0.0, f64::max)) {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < dict.b.len() {
            if dict.kinds[dict.basic[r]] != Kind::Artificial {
                r += 1;
                continue;
            }
            let col = (0..dict.width())
                .filter(|&j| dict.kinds[dict.nonbasic[j]] != Kind::Artificial)
                .filter(|&j| dict.at(r, j).abs() > tol::PIVOT)
                .min_by_key(|&j| dict.nonbasic[j]);
            match col {
                Some(j) => {
                    dict.pivot(r, j);
                    r += 1;
                }
                None => dict.drop_row(r),
            }
        }
        dict.drop_columns(|k| k != Kind::Artificial);
    }

    // Phase two objective in terms of the current nonbasic variables.
    let cost = |v: usize| if v < nv { sign * lp.objective[v] } else { 0.0 };
    let w = dict.width();
    dict.z0 = (0..dict.b.len()).map(|r| cost(dict.basic[r]) * dict.b[r]).sum();
    dict.d = (0..w)
        .map(|j| {
            cost(dict.nonbasic[j]) - (0..dict.b.len()).map(|r| cost(dict.basic[r]) * dict.a[r * w + j]).sum::<f64>()
        })
        .collect();
    dict.dump("phase two start");

    let step = dict.run()?;
    let mut x = lp.lower_bounds.clone();
    match step {
        Step::Optimal => {
            for (r, &v) in dict.basic.iter().enumerate() {
                if v < nv {
                    x[v] += dict.b[r];
                }
            }
            let shift: f64 = lp.objective.iter().zip(&lp.lower_bounds).map(|(c, l)| c * l).sum();
            Ok(LpOutcome::Optimal { value: sign * dict.z0 + shift, assignment: x })
        }
        Step::Unbounded(j) => {
            let mut ray = vec![0.0; nv];
            if dict.nonbasic[j] < nv {
                ray[dict.nonbasic[j]] = 1.0;
            }
            for (r, &v) in dict.basic.iter().enumerate() {
                if v < nv {
                    ray[v] = -dict.at(r, j);
                }
            }
            Ok(LpOutcome::Unbounded { ray })
        }
    }
}
