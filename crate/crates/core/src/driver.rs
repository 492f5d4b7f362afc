//! Order reduction, principalization and embedded-resolution detection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::center::{find_center, is_snc_hypersurface};
use crate::chart::{controlled_transform, strict_transform, total_transform, Chart, CoordinateChange};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::order::{max_order_localized, monomial_part, t_ideal, MarkedIdeal, Order};
use crate::poly::{Monomial, Polynomial};

/// Default blow-up budget.
pub const DEFAULT_BUDGET: usize = 64;

#[derive(Clone, Debug)]
pub struct DriverOptions {
    /// Maximum number of blow-ups (codimension-one ones included).
    pub budget: usize,
    /// Variable to try first when choosing maximal contact.
    pub preferred_contact: Option<String>,
}

impl Default for DriverOptions {
    fn default() -> Self {
        DriverOptions { budget: DEFAULT_BUDGET, preferred_contact: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeStatus {
    BlownUp,
    Principalized,
    OrderReduced,
    Failed,
    /// Not processed because the budget ran out.
    Pending,
}

impl fmt::Display for NodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeStatus::BlownUp => "blown-up",
            NodeStatus::Principalized => "principalized",
            NodeStatus::OrderReduced => "order-reduced",
            NodeStatus::Failed => "failed",
            NodeStatus::Pending => "pending",
        };
        f.write_str(s)
    }
}

/// One chart of the blow-up tree.
#[derive(Clone, Debug)]
pub struct Node {
    pub id: String,
    pub parent: Option<usize>,
    /// Number of blow-ups above this chart.
    pub stage: u32,
    /// The chart as created by its parent's blow-up.
    pub chart: Chart,
    /// Total transform of the input ideal.
    pub total: Ideal,
    /// Controlled transform received from the parent.
    pub inherited: Option<Ideal>,
    /// A new round starts here: `controlled` is the total with its monomial
    /// part divided out, and `mark` is its maximal order.
    pub round_start: bool,
    pub controlled: Ideal,
    pub mark: u32,
    pub monomial_part: Monomial,
    /// Maximal order of `controlled` on the chart.
    pub maxord: Order,
    /// Coordinate changes made before blowing up.
    pub changes: Vec<CoordinateChange>,
    pub center: Option<Vec<String>>,
    /// Set on a leaf whose controlled ideal is a smooth hypersurface `(h)`
    /// crossing the exceptional divisor normally. Blowing up `V(h)` is an
    /// isomorphism that turns it into an exceptional component, so the leaf
    /// needs no further charts.
    pub divisor: Option<Polynomial>,
    pub children: Vec<usize>,
    pub status: NodeStatus,
    pub reason: Option<String>,
}

impl Node {
    /// The chart after this node's coordinate changes.
    pub fn prepared_chart(&self) -> Result<Chart> {
        let mut c = self.chart.clone();
        for ch in &self.changes {
            c.apply_change(ch)?;
        }
        Ok(c)
    }
}

#[derive(Clone, Debug)]
pub struct BlowUpTree {
    pub nodes: Vec<Node>,
}

impl BlowUpTree {
    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn get(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn blowups(&self) -> usize {
        self.nodes.iter().filter(|n| n.center.is_some() || n.divisor.is_some()).count()
    }

    /// (chart id, center) for every blown-up chart, in processing order.
    pub fn centers(&self) -> Vec<(String, Vec<String>)> {
        self.nodes.iter().filter_map(|n| n.center.clone().map(|c| (n.id.clone(), c))).collect()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    /// Root-to-node chain of indices.
    pub fn path(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![i];
        while let Some(p) = self.nodes[i].parent {
            out.push(p);
            i = p;
        }
        out.reverse();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Principalized,
    OrderReduced,
    Failed { reason: String, budget_exhausted: bool },
}

#[derive(Clone, Debug)]
pub struct ResolutionResult {
    pub tree: BlowUpTree,
    pub outcome: Outcome,
}

impl ResolutionResult {
    pub fn succeeded(&self) -> bool {
        !matches!(self.outcome, Outcome::Failed { .. })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Principalize,
    OrderReduce,
}

/// Blow up until the total transform is a monomial in exceptional
/// coordinates (times a unit) on every chart.
pub fn principalize(ideal: &Ideal, chart: Chart, opts: &DriverOptions) -> Result<ResolutionResult> {
    if ideal.is_zero() {
        return Err(Error::InvalidArgument("cannot principalize the zero ideal".into()));
    }
    run(ideal, None, chart, opts, Mode::Principalize)
}

/// Blow up admissible centers until the controlled transform of `(I, a)` has
/// maximal order below `a` on every chart.
pub fn order_reduce(m: &MarkedIdeal, chart: Chart, opts: &DriverOptions) -> Result<ResolutionResult> {
    if let Order::Finite(o) = max_order_localized(&m.ideal, &chart.inverted)? {
        if o > m.mark {
            return Err(Error::InvalidArgument(format!("maximal order {o} exceeds the mark {}", m.mark)));
        }
    } else {
        return Err(Error::InvalidArgument("cannot order-reduce the zero ideal".into()));
    }
    run(&m.ideal, Some(m.mark), chart, opts, Mode::OrderReduce)
}

fn run(ideal: &Ideal, mark: Option<u32>, chart: Chart, opts: &DriverOptions, mode: Mode) -> Result<ResolutionResult> {
    let n = ideal.vars().len();
    let root = Node {
        id: chart.id.clone(),
        parent: None,
        stage: 0,
        chart,
        total: ideal.clone(),
        inherited: mark.map(|_| ideal.clone()),
        round_start: false,
        controlled: ideal.clone(),
        mark: mark.unwrap_or(0),
        monomial_part: Monomial::one(n),
        maxord: Order::Infinity,
        changes: Vec::new(),
        center: None,
        divisor: None,
        children: Vec::new(),
        status: NodeStatus::Pending,
        reason: None,
    };
    let mut tree = BlowUpTree { nodes: vec![root] };
    let mut stack = vec![0usize];
    let mut blowups = 0usize;
    let mut failure: Option<(String, bool)> = None;

    while let Some(i) = stack.pop() {
        if blowups >= opts.budget {
            let done = step_leaf_only(&mut tree.nodes[i], mode)?;
            if !done {
                tree.nodes[i].status = NodeStatus::Pending;
                tree.nodes[i].reason = Some(Error::BudgetExhausted(opts.budget).to_string());
                if failure.as_ref().is_none_or(|(_, b)| !*b) {
                    failure = Some((Error::BudgetExhausted(opts.budget).to_string(), true));
                }
            }
            continue;
        }
        match step(&mut tree, i, mode, opts) {
            Ok(children) => {
                if !children.is_empty() || tree.nodes[i].divisor.is_some() {
                    blowups += 1;
                }
                for c in children.into_iter().rev() {
                    stack.push(c);
                }
            }
            Err(e) => {
                let node = &mut tree.nodes[i];
                node.status = NodeStatus::Failed;
                node.reason = Some(e.to_string());
                if failure.is_none() {
                    failure = Some((e.to_string(), false));
                }
            }
        }
    }

    let outcome = match failure {
        Some((reason, budget_exhausted)) => Outcome::Failed { reason, budget_exhausted },
        None => match mode {
            Mode::Principalize => Outcome::Principalized,
            Mode::OrderReduce => Outcome::OrderReduced,
        },
    };
    Ok(ResolutionResult { tree, outcome })
}

/// Set up the node's working ideal and mark. Returns true if the node is a
/// finished leaf.
fn step_leaf_only(node: &mut Node, mode: Mode) -> Result<bool> {
    let inv = node.chart.inverted.clone();
    let e = node.chart.exceptional_names();
    let (m, residual) = monomial_part(&node.total, &e)?;
    node.monomial_part = m;
    match mode {
        Mode::Principalize => {
            let continuing = match &node.inherited {
                Some(c) => max_order_localized(c, &inv)? >= Order::Finite(node.mark.max(1)),
                None => false,
            };
            if continuing {
                node.controlled = node.inherited.clone().expect("checked");
                node.round_start = false;
                node.maxord = max_order_localized(&node.controlled, &inv)?;
                return Ok(false);
            }
            node.round_start = true;
            node.controlled = residual;
            let o = max_order_localized(&node.controlled, &inv)?;
            node.maxord = o;
            match o {
                Order::Finite(0) => {
                    node.mark = 0;
                    node.status = NodeStatus::Principalized;
                    Ok(true)
                }
                Order::Finite(b) => {
                    node.mark = b;
                    Ok(false)
                }
                Order::Infinity => Err(Error::InvalidArgument("total transform vanishes identically".into())),
            }
        }
        Mode::OrderReduce => {
            node.controlled = node.inherited.clone().expect("order reduction always has a controlled ideal");
            let o = max_order_localized(&node.controlled, &inv)?;
            node.maxord = o;
            if o < Order::Finite(node.mark) {
                node.status = NodeStatus::OrderReduced;
                return Ok(true);
            }
            Ok(false)
        }
    }
}

fn step(tree: &mut BlowUpTree, i: usize, mode: Mode, opts: &DriverOptions) -> Result<Vec<usize>> {
    if step_leaf_only(&mut tree.nodes[i], mode)? {
        return Ok(Vec::new());
    }
    let node = &tree.nodes[i];
    let mark = node.mark;
    let choice = match find_center(&node.chart, &node.controlled, mark, opts.preferred_contact.as_deref()) {
        Ok(c) => c,
        Err(e @ Error::NoAlgebraicContact(_)) => {
            let Some(h) = divisor_leaf(&node.chart, &node.controlled, mark)? else {
                return Err(e);
            };
            let node = &mut tree.nodes[i];
            node.divisor = Some(h);
            node.status = match mode {
                Mode::Principalize => NodeStatus::Principalized,
                Mode::OrderReduce => NodeStatus::OrderReduced,
            };
            return Ok(Vec::new());
        }
        Err(e) => return Err(e),
    };
    let mut total = node.total.clone();
    for ch in &choice.changes {
        total = ch.apply_ideal(&total)?;
    }
    let controlled = choice.ideal.clone();
    let prepared = choice.chart.clone();
    if !is_admissible(&prepared, &controlled, mark, &choice.center)? {
        return Err(Error::InadmissibleCenter {
            center: choice.center.clone(),
            detail: format!("T({controlled}, {mark}) is not contained in the center"),
        });
    }
    let stage = node.stage + 1;
    let charts = prepared.blow_up_charts(&choice.center, stage)?;
    let mut children = Vec::with_capacity(charts.len());
    let mut new_nodes = Vec::with_capacity(charts.len());
    for bu in &charts {
        let child_total = total_transform(&total, bu);
        let inherited = controlled_transform(&controlled, mark, bu)?;
        new_nodes.push(Node {
            id: bu.chart.id.clone(),
            parent: Some(i),
            stage,
            chart: bu.chart.clone(),
            total: child_total,
            inherited: Some(inherited.clone()),
            round_start: false,
            controlled: inherited,
            mark,
            monomial_part: Monomial::one(total.vars().len()),
            maxord: Order::Infinity,
            changes: Vec::new(),
            center: None,
            divisor: None,
            children: Vec::new(),
            status: NodeStatus::Pending,
            reason: None,
        });
    }
    let node = &mut tree.nodes[i];
    node.changes = choice.changes;
    node.center = Some(choice.center);
    node.status = NodeStatus::BlownUp;
    for n in new_nodes {
        children.push(tree.nodes.len());
        tree.nodes.push(n);
    }
    tree.nodes[i].children = children.clone();
    Ok(children)
}

/// The generator `h` when `(ideal, mark)` is `((h), 1)` with `V(h)` smooth and
/// transverse to the exceptional divisor.
pub fn divisor_leaf(chart: &Chart, ideal: &Ideal, mark: u32) -> Result<Option<Polynomial>> {
    if mark != 1 {
        return Ok(None);
    }
    let min = ideal.minimized()?;
    let [h] = min.gens() else {
        return Ok(None);
    };
    if max_order_localized(&min, &chart.inverted)? != Order::Finite(1) {
        return Ok(None);
    }
    Ok(is_snc_hypersurface(chart, h)?.then(|| h.clone()))
}

/// `T(I, a)` lies in the ideal of the center on the chart.
pub fn is_admissible(chart: &Chart, ideal: &Ideal, mark: u32, center: &[String]) -> Result<bool> {
    let z = Ideal::of_variables(&chart.vars, center)?;
    for g in t_ideal(ideal, mark)?.gens() {
        if !z.contains_localized(g, &chart.inverted)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(f, ∂f/∂x_1, ..., ∂f/∂x_n)` is the unit ideal.
pub fn is_smooth_hypersurface(f: &Polynomial) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("the zero polynomial defines no hypersurface".into()));
    }
    let mut gens = vec![f.clone()];
    gens.extend((0..f.nvars()).map(|k| f.differentiate_at(k)));
    Ideal::new(f.vars(), gens).is_unit()
}

enum PathState {
    Empty,
    Fired(u32),
    Never,
}

/// The stage of the first blow-up whose center contains the strict transform
/// of `x` on each chart path, maximized over paths where the strict transform
/// is nonempty. `None` if some such path never fires or `x` is empty.
pub fn detect_embedded_resolution(result: &ResolutionResult, x: &Ideal) -> Result<Option<u32>> {
    let mut fired = Vec::new();
    let mut never = false;
    let mut stack = vec![(0usize, x.clone())];
    while let Some((i, xi)) = stack.pop() {
        match path_state(result, i, &xi, &mut stack)? {
            PathState::Empty => {}
            PathState::Fired(s) => fired.push(s),
            PathState::Never => never = true,
        }
    }
    if never || fired.is_empty() {
        return Ok(None);
    }
    Ok(fired.into_iter().max())
}

fn path_state(result: &ResolutionResult, i: usize, xi: &Ideal, stack: &mut Vec<(usize, Ideal)>) -> Result<PathState> {
    let node = &result.tree.nodes[i];
    if xi.is_unit_localized(&node.chart.inverted)? {
        return Ok(PathState::Empty);
    }
    let mut xp = xi.clone();
    for ch in &node.changes {
        xp = ch.apply_ideal(&xp)?;
    }
    if let Some(h) = &node.divisor {
        return Ok(if xp.contains_localized(h, &node.chart.inverted)? {
            PathState::Fired(node.stage + 1)
        } else {
            PathState::Never
        });
    }
    let Some(center) = &node.center else {
        return Ok(PathState::Never);
    };
    let chart = node.prepared_chart()?;
    if xp.is_unit_localized(&chart.inverted)? {
        return Ok(PathState::Empty);
    }
    let mut contains = true;
    for v in center {
        let p = Polynomial::var(&chart.vars, v)?;
        if !xp.contains_localized(&p, &chart.inverted)? {
            contains = false;
            break;
        }
    }
    if contains {
        return Ok(PathState::Fired(node.stage + 1));
    }
    let charts = chart.blow_up_charts(center, node.stage + 1)?;
    for (bu, &c) in charts.iter().zip(&node.children) {
        stack.push((c, strict_transform(&xp, bu)?));
    }
    // children decide
    Ok(PathState::Empty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_many, parse_polynomial, vars, Vars};

    fn ideal(v: &Vars, gens: &[&str]) -> Ideal {
        Ideal::new(v, parse_many(gens, v).unwrap())
    }

    fn run(v: &Vars, gens: &[&str]) -> ResolutionResult {
        principalize(&ideal(v, gens), Chart::root(v), &DriverOptions::default()).unwrap()
    }

    #[test]
    fn smoothness_examples() {
        let v = vars(&["x", "z"]);
        assert!(is_smooth_hypersurface(&parse_polynomial("z^2 - x", &v).unwrap()).unwrap());
        assert!(!is_smooth_hypersurface(&parse_polynomial("z^2 - x^3", &v).unwrap()).unwrap());
        assert!(is_smooth_hypersurface(&parse_polynomial("x", &v).unwrap()).unwrap());
    }

    #[test]
    fn monomial_input_needs_no_blow_up() {
        let v = vars(&["x", "y"]);
        let chart = Chart::root(&v).with_exceptional(&["x", "y"]).unwrap();
        let r = principalize(&ideal(&v, &["x^2*y^3"]), chart, &DriverOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Principalized);
        assert_eq!(r.tree.blowups(), 0);
    }

    #[test]
    fn cusp_principalizes() {
        let v = vars(&["x", "y"]);
        let r = run(&v, &["y^2 - x^3"]);
        assert_eq!(r.outcome, Outcome::Principalized, "{:#?}", r.tree.centers());
        assert_eq!(r.tree.root().center.as_deref(), Some(&["x".to_string(), "y".to_string()][..]));
        let x = ideal(&v, &["y^2 - x^3"]);
        assert_eq!(detect_embedded_resolution(&r, &x).unwrap(), Some(4));
    }

    #[test]
    fn order_reduction_examples() {
        let v = vars(&["x", "y"]);
        let m = MarkedIdeal::new(ideal(&v, &["y^2 - x^3"]), 2).unwrap();
        let r = order_reduce(&m, Chart::root(&v), &DriverOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::OrderReduced);
        assert_eq!(r.tree.blowups(), 1);
        let xc = r.tree.get("root/x-chart").unwrap();
        assert_eq!(xc.controlled.gens()[0], parse_polynomial("y^2 - x", &v).unwrap());

        let m = MarkedIdeal::new(ideal(&v, &["x*y"]), 2).unwrap();
        let r = order_reduce(&m, Chart::root(&v), &DriverOptions::default()).unwrap();
        assert_eq!(r.tree.blowups(), 1);

        let w = vars(&["x"]);
        let m = MarkedIdeal::new(ideal(&w, &["x"]), 1).unwrap();
        let r = order_reduce(&m, Chart::root(&w), &DriverOptions::default()).unwrap();
        assert_eq!(r.tree.centers(), vec![("root".to_string(), vec!["x".to_string()])]);
        assert!(r.tree.get("root/x-chart").unwrap().controlled.is_unit().unwrap());
    }

    #[test]
    fn two_squares() {
        let v = vars(&["x", "y"]);
        let r = run(&v, &["x^2", "y^2"]);
        assert_eq!(r.outcome, Outcome::Principalized);
        let xc = r.tree.get("root/x-chart").unwrap();
        assert!(max_order_localized(xc.inherited.as_ref().unwrap(), &[]).unwrap() < Order::Finite(2));
    }

    #[test]
    fn smooth_curve_fires_immediately() {
        let v = vars(&["x", "y"]);
        let r = run(&v, &["y - x^2"]);
        assert_eq!(r.outcome, Outcome::Principalized);
        assert_eq!(detect_embedded_resolution(&r, &ideal(&v, &["y - x^2"])).unwrap(), Some(1));
    }

    #[test]
    fn empty_locus_never_fires() {
        let v = vars(&["x", "y"]);
        let r = run(&v, &["1"]);
        assert_eq!(r.tree.blowups(), 0);
        assert_eq!(detect_embedded_resolution(&r, &ideal(&v, &["1"])).unwrap(), None);
    }

    #[test]
    fn budget_is_reported() {
        let v = vars(&["x", "y"]);
        let opts = DriverOptions { budget: 2, ..DriverOptions::default() };
        let r = principalize(&ideal(&v, &["y^2 - x^3"]), Chart::root(&v), &opts).unwrap();
        assert!(matches!(r.outcome, Outcome::Failed { budget_exhausted: true, .. }));
        assert_eq!(r.tree.blowups(), 2);
    }
}
