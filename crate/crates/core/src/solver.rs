//! Exact branch-and-bound over bounded integer variables.
//!
//! Every node runs interval (bounds) propagation over the constraints to a
//! fixpoint. Branching picks the unfixed variable with the fewest remaining
//! values (ties by declaration order) and either enumerates a two-value domain
//! or bisects a larger one. Objectives are enforced as a cutoff row that is
//! tightened whenever the incumbent improves, so the search is exact: a
//! reported optimum or infeasibility is a proof, not an estimate.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{LinearModel, Objective, Relation, Sense, VarId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub node_cap: Option<u64>,
    pub time_cap: Option<Duration>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Feasible,
    Infeasible,
    LimitReached,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::LimitReached => "limit_reached",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// Present unless infeasible (or a limit hit before any incumbent).
    pub assignment: Option<Vec<i64>>,
    /// Objective values of the assignment, one per objective. For a
    /// lexicographic solve these are the optima of the successive phases.
    pub objective_values: Vec<i64>,
    pub stats: Stats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("activity of {0} may overflow 64-bit arithmetic")]
    Overflow(String),
    #[error("no objectives")]
    NoObjectives,
    #[error("projection variable {0:?} is not declared")]
    UnknownVariable(VarId),
    #[error("enumeration cap must be at least 1")]
    ZeroCap,
}

/// Result of [`enumerate_feasible`]: distinct projected value vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub projection: Vec<VarId>,
    /// Each entry holds values in `projection` order.
    pub items: Vec<Vec<i64>>,
    /// True when more than `cap` distinct projections exist.
    pub truncated: bool,
    pub stats: Stats,
}

#[derive(Debug, Clone)]
struct Row {
    terms: Vec<(usize, i64)>,
    lo: Option<i64>,
    hi: Option<i64>,
}

#[derive(Debug, Clone)]
struct Compiled {
    lo: Vec<i64>,
    hi: Vec<i64>,
    rows: Vec<Row>,
    var_rows: Vec<Vec<usize>>,
}

impl Compiled {
    fn new(model: &LinearModel) -> Result<Self, SolveError> {
        let lo: Vec<i64> = model.variables().iter().map(|v| v.lower).collect();
        let hi: Vec<i64> = model.variables().iter().map(|v| v.upper).collect();
        let mut c = Compiled {
            var_rows: vec![Vec::new(); lo.len()],
            lo,
            hi,
            rows: Vec::new(),
        };
        for con in model.constraints() {
            let (lo, hi) = match con.relation {
                Relation::Le => (None, Some(con.rhs)),
                Relation::Ge => (Some(con.rhs), None),
                Relation::Eq => (Some(con.rhs), Some(con.rhs)),
            };
            c.push_row(&con.name, &con.terms, lo, hi)?;
        }
        Ok(c)
    }

    fn push_row(
        &mut self,
        name: &str,
        terms: &[(VarId, i64)],
        lo: Option<i64>,
        hi: Option<i64>,
    ) -> Result<usize, SolveError> {
        // Bound the largest possible |activity| so the hot loop can use plain arithmetic.
        let mut bound: i64 = 0;
        for &(v, c) in terms {
            let mag = self.lo[v.0].unsigned_abs().max(self.hi[v.0].unsigned_abs());
            let term = i64::try_from(mag)
                .ok()
                .and_then(|m| m.checked_mul(c.checked_abs()?))
                .ok_or_else(|| SolveError::Overflow(name.to_string()))?;
            bound = bound
                .checked_add(term)
                .ok_or_else(|| SolveError::Overflow(name.to_string()))?;
        }
        for rhs in [lo, hi].into_iter().flatten() {
            bound
                .checked_add(rhs.checked_abs().unwrap_or(i64::MAX))
                .and_then(|b| b.checked_mul(2))
                .ok_or_else(|| SolveError::Overflow(name.to_string()))?;
        }
        let r = self.rows.len();
        self.rows.push(Row {
            terms: terms.iter().map(|&(v, c)| (v.0, c)).collect(),
            lo,
            hi,
        });
        for &(v, _) in terms {
            self.var_rows[v.0].push(r);
        }
        Ok(r)
    }

    fn satisfied(&self, values: &[i64]) -> bool {
        self.rows.iter().all(|row| {
            let a: i64 = row.terms.iter().map(|&(v, c)| c * values[v]).sum();
            row.lo.is_none_or(|l| a >= l) && row.hi.is_none_or(|h| a <= h)
        })
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if a % b != 0 && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}

#[derive(Debug, Clone)]
struct Node {
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// Variable whose domain was just narrowed by branching.
    touched: Option<usize>,
}

/// Propagates row bounds to a fixpoint. Returns false on a proven conflict.
fn propagate(c: &Compiled, lo: &mut [i64], hi: &mut [i64], seed: &[usize]) -> bool {
    let mut queued = vec![false; c.rows.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &r in seed {
        if !queued[r] {
            queued[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(r) = queue.pop_front() {
        queued[r] = false;
        let row = &c.rows[r];
        let (mut min_act, mut max_act) = (0i64, 0i64);
        for &(v, a) in &row.terms {
            if a > 0 {
                min_act += a * lo[v];
                max_act += a * hi[v];
            } else {
                min_act += a * hi[v];
                max_act += a * lo[v];
            }
        }
        if row.hi.is_some_and(|h| min_act > h) || row.lo.is_some_and(|l| max_act < l) {
            return false;
        }
        for &(v, a) in &row.terms {
            let (old_lo, old_hi) = (lo[v], hi[v]);
            if let Some(h) = row.hi {
                let own_min = if a > 0 { a * old_lo } else { a * old_hi };
                let slack = h - (min_act - own_min);
                if a > 0 {
                    hi[v] = hi[v].min(floor_div(slack, a));
                } else {
                    lo[v] = lo[v].max(ceil_div(slack, a));
                }
            }
            if let Some(l) = row.lo {
                let own_max = if a > 0 { a * old_hi } else { a * old_lo };
                let need = l - (max_act - own_max);
                if a > 0 {
                    lo[v] = lo[v].max(ceil_div(need, a));
                } else {
                    hi[v] = hi[v].min(floor_div(need, a));
                }
            }
            if lo[v] > hi[v] {
                return false;
            }
            if lo[v] != old_lo || hi[v] != old_hi {
                for &r2 in &c.var_rows[v] {
                    if !queued[r2] {
                        queued[r2] = true;
                        queue.push_back(r2);
                    }
                }
            }
        }
    }
    true
}

/// Most constrained unfixed variable among `candidates`, ties by position.
fn pick_branch(lo: &[i64], hi: &[i64], candidates: &[usize]) -> Option<usize> {
    candidates
        .iter()
        .copied()
        .filter(|&v| lo[v] < hi[v])
        .min_by_key(|&v| (hi[v] - lo[v], v))
}

/// Children of a node on `var`, in exploration order.
fn branch(node: &Node, var: usize, prefer_high: bool) -> [Node; 2] {
    let (lo, hi) = (node.lo[var], node.hi[var]);
    let mid = lo + (hi - lo) / 2;
    let mut low = Node {
        lo: node.lo.clone(),
        hi: node.hi.clone(),
        touched: Some(var),
    };
    low.hi[var] = mid;
    let mut high = Node {
        lo: node.lo.clone(),
        hi: node.hi.clone(),
        touched: Some(var),
    };
    high.lo[var] = mid + 1;
    if prefer_high {
        [high, low]
    } else {
        [low, high]
    }
}

struct Budget {
    start: Instant,
    limits: Limits,
    nodes: u64,
}

impl Budget {
    fn new(limits: Limits) -> Self {
        Budget {
            start: Instant::now(),
            limits,
            nodes: 0,
        }
    }

    /// Counts a node; false once a limit is exhausted.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.limits.node_cap.is_some_and(|cap| self.nodes > cap) {
            return false;
        }
        if self.nodes.is_multiple_of(256) {
            if let Some(cap) = self.limits.time_cap {
                if self.start.elapsed() > cap {
                    return false;
                }
            }
        }
        true
    }

    fn stats(&self) -> Stats {
        Stats {
            nodes: self.nodes,
            elapsed: self.start.elapsed(),
        }
    }
}

enum Outcome {
    Done(Option<Vec<i64>>),
    Limit(Option<Vec<i64>>),
}

/// Depth-first search for the best assignment under `objective` (or any
/// feasible one when `None`).
fn search(
    c: &mut Compiled,
    objective: Option<&Objective>,
    budget: &mut Budget,
    root: Node,
    order: &[usize],
) -> Outcome {
    // Cutoff row: objective strictly better than the incumbent.
    let cutoff = objective.map(|obj| {
        let terms: Vec<(usize, i64)> = obj.terms.iter().map(|&(v, a)| (v.0, a)).collect();
        let r = c.rows.len();
        c.rows.push(Row {
            terms: terms.clone(),
            lo: None,
            hi: None,
        });
        for &(v, _) in &terms {
            c.var_rows[v].push(r);
        }
        r
    });
    let prefer_high: Vec<bool> = {
        let mut p = vec![false; c.lo.len()];
        if let Some(obj) = objective {
            for &(v, a) in &obj.terms {
                p[v.0] = match obj.sense {
                    Sense::Minimize => a < 0,
                    Sense::Maximize => a > 0,
                };
            }
        }
        p
    };

    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut stack = vec![root];
    let mut first = true;
    let outcome = loop {
        let Some(mut node) = stack.pop() else {
            break Outcome::Done(best.map(|b| b.1));
        };
        if !budget.tick() {
            break Outcome::Limit(best.map(|b| b.1));
        }
        let mut seed: Vec<usize> = match (first, node.touched) {
            (true, _) => (0..c.rows.len()).collect(),
            (false, Some(v)) => c.var_rows[v].clone(),
            (false, None) => Vec::new(),
        };
        first = false;
        if let Some(r) = cutoff {
            seed.push(r);
        }
        if !propagate(c, &mut node.lo, &mut node.hi, &seed) {
            continue;
        }
        match pick_branch(&node.lo, &node.hi, order) {
            Some(var) => {
                let [a, b] = branch(&node, var, prefer_high[var]);
                stack.push(b);
                stack.push(a);
            }
            None => {
                // Everything outside `order` is expected to be fixed by now;
                // finish any stragglers with a nested search.
                let values = if node.lo == node.hi {
                    Some(node.lo.clone())
                } else {
                    complete(c, &node, budget)
                };
                let Some(values) = values else { continue };
                if !c.satisfied(&values) {
                    continue;
                }
                match objective {
                    None => break Outcome::Done(Some(values)),
                    Some(obj) => {
                        let value = obj.evaluate(&values);
                        let r = cutoff.expect("cutoff row exists with an objective");
                        let tail = obj.constant;
                        match obj.sense {
                            Sense::Minimize => c.rows[r].hi = Some(value - tail - 1),
                            Sense::Maximize => c.rows[r].lo = Some(value - tail + 1),
                        }
                        best = Some((value, values));
                    }
                }
            }
        }
    };
    if let Some(r) = cutoff {
        c.rows.truncate(r);
        for rows in &mut c.var_rows {
            rows.retain(|&x| x < r);
        }
    }
    outcome
}

/// Any feasible completion of `node` over all variables.
fn complete(c: &Compiled, node: &Node, budget: &mut Budget) -> Option<Vec<i64>> {
    let all: Vec<usize> = (0..c.lo.len()).collect();
    let mut stack = vec![Node {
        lo: node.lo.clone(),
        hi: node.hi.clone(),
        touched: None,
    }];
    while let Some(mut n) = stack.pop() {
        budget.nodes += 1;
        let seed = match n.touched {
            Some(v) => c.var_rows[v].clone(),
            None => Vec::new(),
        };
        if !propagate(c, &mut n.lo, &mut n.hi, &seed) {
            continue;
        }
        match pick_branch(&n.lo, &n.hi, &all) {
            Some(var) => {
                let [a, b] = branch(&n, var, false);
                stack.push(b);
                stack.push(a);
            }
            None => {
                if c.satisfied(&n.lo) {
                    return Some(n.lo);
                }
            }
        }
    }
    None
}

fn root(c: &Compiled) -> Node {
    Node {
        lo: c.lo.clone(),
        hi: c.hi.clone(),
        touched: None,
    }
}

/// Solves a model with zero or one objective; a lexicographic list is
/// delegated to [`solve_lex`].
pub fn solve(model: &LinearModel, limits: &Limits) -> Result<SolveResult, SolveError> {
    if model.objectives().len() > 1 {
        return solve_lex(model, limits);
    }
    let mut c = Compiled::new(model)?;
    let objective = model.objectives().first();
    if let Some(obj) = objective {
        c.push_row("objective", &obj.terms, None, None)?;
        c.rows.pop();
        for rows in &mut c.var_rows {
            rows.retain(|&r| r < c.rows.len());
        }
    }
    let mut budget = Budget::new(*limits);
    let order: Vec<usize> = (0..c.lo.len()).collect();
    let start = root(&c);
    let outcome = search(&mut c, objective, &mut budget, start, &order);
    let (status, assignment) = match (outcome, objective) {
        (Outcome::Done(Some(a)), Some(_)) => (Status::Optimal, Some(a)),
        (Outcome::Done(Some(a)), None) => (Status::Feasible, Some(a)),
        (Outcome::Done(None), _) => (Status::Infeasible, None),
        (Outcome::Limit(a), _) => (Status::LimitReached, a),
    };
    let objective_values = match (&assignment, objective) {
        (Some(a), Some(obj)) => vec![obj.evaluate(a)],
        _ => Vec::new(),
    };
    Ok(SolveResult {
        status,
        assignment,
        objective_values,
        stats: budget.stats(),
    })
}

/// Optimizes the objectives one after another, each phase constrained to
/// the optima of the earlier ones.
pub fn solve_lex(model: &LinearModel, limits: &Limits) -> Result<SolveResult, SolveError> {
    let objectives = model.objectives();
    if objectives.is_empty() {
        return Err(SolveError::NoObjectives);
    }
    let mut c = Compiled::new(model)?;
    for obj in objectives {
        c.push_row(&obj.label, &obj.terms, None, None)?;
        c.rows.pop();
    }
    for rows in &mut c.var_rows {
        rows.retain(|&r| r < c.rows.len());
    }
    let mut budget = Budget::new(*limits);
    let order: Vec<usize> = (0..c.lo.len()).collect();
    let mut optima = Vec::new();
    let mut incumbent = None;
    for obj in objectives {
        let start = root(&c);
        match search(&mut c, Some(obj), &mut budget, start, &order) {
            Outcome::Done(Some(a)) => {
                let value = obj.evaluate(&a);
                optima.push(value);
                let fixed = value - obj.constant;
                let terms: Vec<(VarId, i64)> = obj.terms.clone();
                c.push_row(&obj.label, &terms, Some(fixed), Some(fixed))?;
                incumbent = Some(a);
            }
            Outcome::Done(None) => {
                return Ok(SolveResult {
                    status: Status::Infeasible,
                    assignment: None,
                    objective_values: optima,
                    stats: budget.stats(),
                })
            }
            Outcome::Limit(a) => {
                let objective_values = match &a {
                    Some(a) => objectives.iter().map(|o| o.evaluate(a)).collect(),
                    None => optima,
                };
                return Ok(SolveResult {
                    status: Status::LimitReached,
                    assignment: a.or(incumbent),
                    objective_values,
                    stats: budget.stats(),
                });
            }
        }
    }
    Ok(SolveResult {
        status: Status::Optimal,
        assignment: incumbent,
        objective_values: optima,
        stats: budget.stats(),
    })
}

/// All distinct values of `projection` over feasible assignments, up to `cap`.
/// Items are sorted by variable name, then value.
pub fn enumerate_feasible(
    model: &LinearModel,
    projection: &[VarId],
    cap: usize,
) -> Result<Enumeration, SolveError> {
    if cap == 0 {
        return Err(SolveError::ZeroCap);
    }
    for &v in projection {
        if v.0 >= model.variables().len() {
            return Err(SolveError::UnknownVariable(v));
        }
    }
    let mut c = Compiled::new(model)?;
    let mut budget = Budget::new(Limits::none());
    let order: Vec<usize> = projection.iter().map(|v| v.0).collect();
    let mut items: Vec<Vec<i64>> = Vec::new();
    let mut truncated = false;

    let mut stack = vec![root(&c)];
    let mut first = true;
    while let Some(mut node) = stack.pop() {
        budget.nodes += 1;
        let seed: Vec<usize> = match (first, node.touched) {
            (true, _) => (0..c.rows.len()).collect(),
            (false, Some(v)) => c.var_rows[v].clone(),
            (false, None) => Vec::new(),
        };
        first = false;
        if !propagate(&c, &mut node.lo, &mut node.hi, &seed) {
            continue;
        }
        match pick_branch(&node.lo, &node.hi, &order) {
            Some(var) => {
                let [a, b] = branch(&node, var, false);
                stack.push(b);
                stack.push(a);
            }
            None => {
                if complete(&c, &node, &mut budget).is_some() {
                    if items.len() == cap {
                        truncated = true;
                        break;
                    }
                    items.push(order.iter().map(|&v| node.lo[v]).collect());
                }
            }
        }
    }
    // Deterministic order: by variable name, then value.
    let mut by_name: Vec<usize> = (0..projection.len()).collect();
    by_name.sort_by(|&a, &b| {
        model.variable(projection[a]).name.cmp(&model.variable(projection[b]).name)
    });
    items.sort_by(|x, y| {
        by_name
            .iter()
            .map(|&k| x[k])
            .cmp(by_name.iter().map(|&k| y[k]))
    });
    c.rows.clear();
    Ok(Enumeration {
        projection: projection.to_vec(),
        items,
        truncated,
        stats: budget.stats(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinExpr, Role, Tag};

    #[test]
    fn x_at_least_two_is_infeasible() {
        let mut m = LinearModel::new("t");
        let x = m.add_binary("x", Role::Other);
        m.constrain("c", Tag::Auxiliary, x, Relation::Ge, 2);
        let r = solve(&m, &Limits::none()).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert!(r.assignment.is_none());
    }

    #[test]
    fn knapsack_optimum() {
        // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 5
        let mut m = LinearModel::new("knap");
        let a = m.add_binary("a", Role::Other);
        let b = m.add_binary("b", Role::Other);
        let c = m.add_binary("c", Role::Other);
        m.constrain(
            "cap",
            Tag::Auxiliary,
            LinExpr::term(a, 2) + LinExpr::term(b, 3) + c,
            Relation::Le,
            5,
        );
        m.set_objective(Objective::new(
            "value",
            Sense::Maximize,
            LinExpr::term(a, 5) + LinExpr::term(b, 4) + LinExpr::term(c, 3),
        ));
        let r = solve(&m, &Limits::none()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective_values, vec![9]);
        assert_eq!(r.assignment.unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn general_integers_and_negative_coefficients() {
        // min t - 2u  s.t. t + u >= 7, t - u <= 1, 0 <= t,u <= 6
        let mut m = LinearModel::new("ints");
        let t = m.add_var("t", 0, 6, Role::Other);
        let u = m.add_var("u", 0, 6, Role::Other);
        m.constrain("a", Tag::Auxiliary, LinExpr::from(t) + u, Relation::Ge, 7);
        m.constrain("b", Tag::Auxiliary, LinExpr::from(t) - u, Relation::Le, 1);
        m.set_objective(Objective::new("o", Sense::Minimize, LinExpr::from(t) - LinExpr::term(u, 2)));
        let r = solve(&m, &Limits::none()).unwrap();
        // u = 6 is best; t >= 1 from the first row.
        assert_eq!(r.assignment.unwrap(), vec![1, 6]);
        assert_eq!(r.objective_values, vec![-11]);
    }

    #[test]
    fn lexicographic_phases() {
        // max x + y, then min y subject to x + y <= 1 ... both phases matter.
        let mut m = LinearModel::new("lex");
        let x = m.add_binary("x", Role::Other);
        let y = m.add_binary("y", Role::Other);
        m.constrain("c", Tag::Auxiliary, LinExpr::sum([x, y]), Relation::Le, 1);
        m.set_objectives(vec![
            Objective::new("matched", Sense::Maximize, LinExpr::sum([x, y])),
            Objective::new("y", Sense::Minimize, y.into()),
        ]);
        let r = solve_lex(&m, &Limits::none()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective_values, vec![1, 0]);
        assert_eq!(r.assignment.unwrap(), vec![1, 0]);
    }

    #[test]
    fn lex_without_objectives_errors() {
        let m = LinearModel::new("empty");
        assert_eq!(solve_lex(&m, &Limits::none()).unwrap_err(), SolveError::NoObjectives);
    }

    #[test]
    fn enumeration_projects_and_sorts() {
        let mut m = LinearModel::new("proj");
        let t = m.add_var("t", 0, 8, Role::Other);
        let x = m.add_binary("x", Role::Other);
        m.constrain("lo", Tag::Auxiliary, t, Relation::Ge, 4);
        m.constrain("hi", Tag::Auxiliary, LinExpr::from(t) + x, Relation::Le, 7);
        let e = enumerate_feasible(&m, &[t], 100).unwrap();
        assert_eq!(e.items, vec![vec![4], vec![5], vec![6], vec![7]]);
        assert!(!e.truncated);
        let e = enumerate_feasible(&m, &[t], 2).unwrap();
        assert_eq!(e.items.len(), 2);
        assert!(e.truncated);
    }

    #[test]
    fn node_cap_reports_limit() {
        let mut m = LinearModel::new("cap");
        let vars: Vec<VarId> = (0..12).map(|k| m.add_binary(format!("x{k}"), Role::Other)).collect();
        m.set_objective(Objective::new("o", Sense::Maximize, LinExpr::sum(vars.iter().copied())));
        m.constrain("odd", Tag::Auxiliary, LinExpr::sum(vars.iter().copied()), Relation::Le, 7);
        let r = solve(&m, &Limits { node_cap: Some(3), time_cap: None }).unwrap();
        assert_eq!(r.status, Status::LimitReached);
    }

    #[test]
    fn overflow_is_detected() {
        let mut m = LinearModel::new("big");
        let x = m.add_var("x", 0, i64::MAX / 2, Role::Other);
        m.constrain("c", Tag::Auxiliary, LinExpr::term(x, 4), Relation::Le, 1);
        assert!(matches!(solve(&m, &Limits::none()), Err(SolveError::Overflow(_))));
    }

    #[test]
    fn division_helpers() {
        assert_eq!(floor_div(7, 2), 3);
        assert_eq!(floor_div(-7, 2), -4);
        assert_eq!(floor_div(7, -2), -4);
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(ceil_div(-7, 2), -3);
        assert_eq!(ceil_div(-7, -2), 4);
    }
}
