//! Machine-readable blow-up traces and their independent re-verification.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chart::{total_transform, Chart, CoordinateChange};
use crate::driver::{
    detect_embedded_resolution, is_admissible, order_reduce, principalize, DriverOptions, Node, NodeStatus, Outcome,
    ResolutionResult,
};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::order::{max_order_localized, monomial_part, MarkedIdeal, Order};
use crate::poly::{parse_many, parse_polynomial, scalar, var_index, vars, Monomial, Polynomial, Vars};

pub const TRACE_VERSION: &str = "res-kernel-trace/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    Principalize,
    OrderReduce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceInput {
    pub mode: TraceMode,
    pub vars: Vec<String>,
    pub ideal: Vec<String>,
    pub exceptional: Vec<String>,
    pub mark: Option<u32>,
    pub budget: usize,
    pub contact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeStatus {
    Principalized,
    OrderReduced,
    Failed,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceOutcome {
    pub status: OutcomeStatus,
    pub reason: Option<String>,
    pub blowups: usize,
    /// Stage at which embedded resolution was detected, when requested.
    pub embedded_stage: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceChange {
    Localize { element: String },
    Substitute { var: String, numerator: String, denominator: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalVar {
    pub var: String,
    pub stage: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub maxord: Order,
    pub monomial_part: String,
    pub unit_normalized: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub id: String,
    pub parent: Option<String>,
    pub stage: u32,
    pub chart_var: Option<String>,
    pub exceptional: Vec<ExceptionalVar>,
    pub inverted: Vec<String>,
    pub total: Vec<String>,
    pub inherited: Option<Vec<String>>,
    pub round_start: bool,
    pub controlled: Vec<String>,
    pub mark: u32,
    pub residual: Vec<String>,
    pub changes: Vec<TraceChange>,
    pub center: Option<Vec<String>>,
    /// Smooth hypersurface blown up on a leaf; see [`Node::divisor`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<String>,
    pub status: NodeStatus,
    pub reason: Option<String>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub version: String,
    pub input: TraceInput,
    pub nodes: Vec<TraceNode>,
    pub outcome: TraceOutcome,
}

fn strings(i: &Ideal) -> Vec<String> {
    i.gens().iter().map(|g| g.to_string()).collect()
}

fn change_to_trace(c: &CoordinateChange) -> TraceChange {
    match c {
        CoordinateChange::Localize { element } => TraceChange::Localize { element: element.to_string() },
        CoordinateChange::Substitute { var, numerator, denominator } => TraceChange::Substitute {
            var: var.clone(),
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
        },
    }
}

fn monomial_string(vars: &Vars, m: &Monomial) -> String {
    Polynomial::monomial(vars, m.clone(), scalar(1)).to_string()
}

fn trace_node(result: &ResolutionResult, n: &Node) -> Result<TraceNode> {
    let vars = n.chart.vars.clone();
    let (m, residual) = monomial_part(&n.total, &n.chart.exceptional_names())?;
    let chart_var = match n.chart.log.last() {
        Some(crate::chart::ChartEvent::BlowUp { chart_var, .. }) if n.parent.is_some() => Some(chart_var.clone()),
        _ => None,
    };
    Ok(TraceNode {
        id: n.id.clone(),
        parent: n.parent.map(|p| result.tree.nodes[p].id.clone()),
        stage: n.stage,
        chart_var,
        exceptional: n.chart.exceptional.iter().map(|(v, s)| ExceptionalVar { var: v.clone(), stage: *s }).collect(),
        inverted: n.chart.inverted.iter().map(|p| p.to_string()).collect(),
        total: strings(&n.total),
        inherited: n.inherited.as_ref().map(strings),
        round_start: n.round_start,
        controlled: strings(&n.controlled),
        mark: n.mark,
        residual: strings(&residual),
        changes: n.changes.iter().map(change_to_trace).collect(),
        center: n.center.clone(),
        divisor: n.divisor.as_ref().map(|h| h.to_string()),
        status: n.status,
        reason: n.reason.clone(),
        diagnostics: Diagnostics {
            maxord: n.maxord,
            monomial_part: monomial_string(&vars, &m),
            unit_normalized: n.chart.unit_normalize(&n.total).iter().map(|p| p.to_string()).collect(),
        },
    })
}

impl TraceDocument {
    /// Nodes are listed in depth-first order by chart index.
    pub fn from_result(input: TraceInput, result: &ResolutionResult, embedded_stage: Option<u32>) -> Result<TraceDocument> {
        let mut order = Vec::new();
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            order.push(i);
            stack.extend(result.tree.nodes[i].children.iter().rev());
        }
        let nodes = order.iter().map(|&i| trace_node(result, &result.tree.nodes[i])).collect::<Result<Vec<_>>>()?;
        let (status, reason) = match &result.outcome {
            Outcome::Principalized => (OutcomeStatus::Principalized, None),
            Outcome::OrderReduced => (OutcomeStatus::OrderReduced, None),
            Outcome::Failed { reason, budget_exhausted: true } => (OutcomeStatus::BudgetExhausted, Some(reason.clone())),
            Outcome::Failed { reason, .. } => (OutcomeStatus::Failed, Some(reason.clone())),
        };
        Ok(TraceDocument {
            version: TRACE_VERSION.into(),
            input,
            nodes,
            outcome: TraceOutcome { status, reason, blowups: result.tree.blowups(), embedded_stage },
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<TraceDocument> {
        serde_json::from_str(s).map_err(|e| Error::TraceFormat(e.to_string()))
    }

    pub fn node(&self, id: &str) -> Option<&TraceNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// (chart id, center) pairs in document order.
    pub fn centers(&self) -> Vec<(String, Vec<String>)> {
        self.nodes.iter().filter_map(|n| n.center.clone().map(|c| (n.id.clone(), c))).collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ring: {}", self.input.vars.join(", "));
        let _ = writeln!(out, "ideal: ({})", self.input.ideal.join(", "));
        if !self.input.exceptional.is_empty() {
            let _ = writeln!(out, "exceptional: {}", self.input.exceptional.join(", "));
        }
        for n in &self.nodes {
            let pad = "  ".repeat(n.stage as usize);
            let _ = writeln!(out, "{pad}{} [stage {}] {}", n.id, n.stage, n.status);
            let _ = writeln!(out, "{pad}  total: ({})", n.total.join(", "));
            let _ = writeln!(out, "{pad}  up to units: ({})", n.diagnostics.unit_normalized.join(", "));
            if !n.inverted.is_empty() {
                let _ = writeln!(out, "{pad}  inverted: {}", n.inverted.join(", "));
            }
            if n.status == NodeStatus::Principalized {
                let _ = writeln!(out, "{pad}  monomial: {}", n.diagnostics.monomial_part);
            } else {
                let _ = writeln!(
                    out,
                    "{pad}  controlled: ({}) mark {} maxord {}{}",
                    n.controlled.join(", "),
                    n.mark,
                    n.diagnostics.maxord,
                    if n.round_start { " (new round)" } else { "" }
                );
            }
            for c in &n.changes {
                let s = match c {
                    TraceChange::Localize { element } => format!("invert {element}"),
                    TraceChange::Substitute { var, numerator, denominator } if denominator == "1" => format!("{var} = {numerator}"),
                    TraceChange::Substitute { var, numerator, denominator } => format!("{var} = ({numerator})/({denominator})"),
                };
                let _ = writeln!(out, "{pad}  change: {s}");
            }
            if let Some(c) = &n.center {
                let _ = writeln!(out, "{pad}  center: {{{}}}", c.join(", "));
            }
            if let Some(h) = &n.divisor {
                let _ = writeln!(out, "{pad}  divisor: V({h})");
            }
            if let Some(r) = &n.reason {
                let _ = writeln!(out, "{pad}  reason: {r}");
            }
        }
        let o = &self.outcome;
        let status = serde_json::to_value(&o.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let _ = writeln!(out, "outcome: {status} after {} blow-ups", o.blowups);
        if let Some(r) = &o.reason {
            let _ = writeln!(out, "reason: {r}");
        }
        if let Some(s) = o.embedded_stage {
            let _ = writeln!(out, "embedded resolution at stage {s}");
        }
        out
    }
}

/// Run the driver described by `input` and record the trace. With
/// `detect_embedded`, the input ideal is also treated as a subvariety and the
/// embedded-resolution stage is recorded.
pub fn run_input(input: TraceInput, detect_embedded: bool) -> Result<TraceDocument> {
    if input.vars.is_empty() {
        return Err(Error::InvalidArgument("no variables given".into()));
    }
    for (i, v) in input.vars.iter().enumerate() {
        if input.vars[..i].contains(v) {
            return Err(Error::InvalidArgument(format!("variable `{v}` listed twice")));
        }
    }
    if input.ideal.is_empty() {
        return Err(Error::InvalidArgument("no generators given".into()));
    }
    let v = vars(&input.vars);
    let ideal = Ideal::new(&v, parse_many(&input.ideal, &v)?);
    let chart = Chart::root(&v).with_exceptional(&input.exceptional)?;
    let opts = DriverOptions { budget: input.budget, preferred_contact: input.contact.clone() };
    if let Some(c) = &input.contact {
        var_index(&v, c)?;
    }
    let (result, stage) = match input.mode {
        TraceMode::Principalize => {
            let r = principalize(&ideal, chart, &opts)?;
            let stage = if detect_embedded { detect_embedded_resolution(&r, &ideal)? } else { None };
            (r, stage)
        }
        TraceMode::OrderReduce => {
            let mark = input.mark.ok_or_else(|| Error::InvalidArgument("order reduction needs a mark".into()))?;
            let m = MarkedIdeal::new(ideal, mark)?;
            (order_reduce(&m, chart, &opts)?, None)
        }
    };
    TraceDocument::from_result(input, &result, stage)
}

/// Summary of a successful trace check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceReport {
    pub nodes: usize,
    pub edges: usize,
    pub blowups: usize,
}

fn reject(msg: impl Into<String>) -> Error {
    Error::TraceRejected(msg.into())
}

fn parse_all(v: &Vars, gens: &[String]) -> Result<Vec<Polynomial>> {
    gens.iter().map(|g| parse_polynomial(g, v).map_err(|e| Error::TraceFormat(format!("`{g}`: {e}")))).collect()
}

fn parse_ideal(v: &Vars, gens: &[String]) -> Result<Ideal> {
    Ok(Ideal::new(v, parse_all(v, gens)?))
}

fn parse_change(v: &Vars, c: &TraceChange) -> Result<CoordinateChange> {
    let p = |s: &String| parse_polynomial(s, v).map_err(|e| Error::TraceFormat(format!("`{s}`: {e}")));
    Ok(match c {
        TraceChange::Localize { element } => CoordinateChange::Localize { element: p(element)? },
        TraceChange::Substitute { var, numerator, denominator } => {
            CoordinateChange::Substitute { var: var.clone(), numerator: p(numerator)?, denominator: p(denominator)? }
        }
    })
}

fn same_gens(a: &[Polynomial], b: &[Polynomial]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

fn same_polys_unordered(a: &[Polynomial], b: &[Polynomial]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// Re-verify a trace from its input alone: every chart is rebuilt from its
/// parent, every coordinate change is re-certified, every center is checked
/// admissible and every transform identity is recomputed.
pub fn check_trace(doc: &TraceDocument) -> Result<TraceReport> {
    if doc.version != TRACE_VERSION {
        return Err(Error::TraceFormat(format!("unsupported version `{}`", doc.version)));
    }
    let v: Vars = vars(&doc.input.vars);
    let input = parse_ideal(&v, &doc.input.ideal)?;
    let by_id: BTreeMap<&str, &TraceNode> = doc.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    if by_id.len() != doc.nodes.len() {
        return Err(reject("duplicate chart ids"));
    }
    let roots: Vec<&TraceNode> = doc.nodes.iter().filter(|n| n.parent.is_none()).collect();
    let [root] = roots.as_slice() else {
        return Err(reject("a trace has exactly one root"));
    };
    let root_chart = Chart::root(&v).with_exceptional(&doc.input.exceptional)?;
    if !parse_ideal(&v, &root.total)?.same_ideal(&input)? {
        return Err(reject("root total transform differs from the input ideal"));
    }
    if root.stage != 0 {
        return Err(reject("root must be at stage 0"));
    }
    let order_reduce = doc.input.mode == TraceMode::OrderReduce;
    if order_reduce {
        let Some(mark) = doc.input.mark else { return Err(Error::TraceFormat("order reduction needs a mark".into())) };
        if root.round_start || root.mark != mark {
            return Err(reject("root of an order reduction carries the input mark"));
        }
    }

    let mut report = TraceReport { nodes: 0, edges: 0, blowups: 0 };
    // (node id, rebuilt chart, parent's mark)
    let mut stack: Vec<(&TraceNode, Chart, Option<u32>)> = vec![(root, root_chart, None)];
    let mut failures = 0usize;
    let mut budget_hit = false;
    while let Some((node, chart, parent_mark)) = stack.pop() {
        report.nodes += 1;
        let ctx = |m: &str| reject(format!("{}: {m}", node.id));
        check_chart(node, &chart).map_err(|e| ctx(&e))?;
        let total = parse_ideal(&v, &node.total)?;
        let controlled = parse_ideal(&v, &node.controlled)?;
        let inherited = node.inherited.as_ref().map(|g| parse_ideal(&v, g)).transpose()?;
        let inv = chart.inverted.clone();

        match node.status {
            NodeStatus::Failed | NodeStatus::Pending => {
                if node.center.is_some() || node.divisor.is_some() {
                    return Err(ctx("unprocessed chart has a center"));
                }
                if node.reason.is_none() {
                    return Err(ctx("failed chart without a reason"));
                }
                failures += 1;
                budget_hit |= node.status == NodeStatus::Pending;
                continue;
            }
            _ => {}
        }

        // round bookkeeping
        let (mono, residual) = monomial_part(&total, &chart.exceptional_names())?;
        if !same_gens(residual.gens(), &parse_all(&v, &node.residual)?) {
            return Err(ctx("residual is not the total with its monomial part divided out"));
        }
        if monomial_string(&v, &mono) != node.diagnostics.monomial_part {
            return Err(ctx("monomial part mismatch"));
        }
        if order_reduce {
            let inh = inherited.as_ref().ok_or_else(|| ctx("missing controlled transform"))?;
            if node.round_start || !same_gens(inh.gens(), controlled.gens()) {
                return Err(ctx("order reduction never restarts rounds"));
            }
            if parent_mark.is_some_and(|m| m != node.mark) {
                return Err(ctx("mark changed inside a round"));
            }
        } else {
            let must_start = match (&inherited, parent_mark) {
                (Some(inh), Some(m)) => max_order_localized(inh, &inv)? < Order::Finite(m),
                _ => true,
            };
            if must_start != node.round_start {
                return Err(ctx("round start does not match the maximal order of the controlled transform"));
            }
            if node.round_start {
                if !same_gens(controlled.gens(), residual.gens()) {
                    return Err(ctx("new round must work on the residual"));
                }
                let b = max_order_localized(&controlled, &inv)?;
                if b != Order::Finite(node.mark) {
                    return Err(ctx(&format!("mark {} is not the maximal order {b}", node.mark)));
                }
            } else {
                let inh = inherited.as_ref().ok_or_else(|| ctx("missing controlled transform"))?;
                if !same_gens(inh.gens(), controlled.gens()) || parent_mark != Some(node.mark) {
                    return Err(ctx("controlled ideal and mark must be inherited inside a round"));
                }
            }
        }
        let maxord = max_order_localized(&controlled, &inv)?;
        if maxord != node.diagnostics.maxord {
            return Err(ctx("maxord diagnostic mismatch"));
        }

        if let Some(h) = &node.divisor {
            let h = parse_polynomial(h, &v)?;
            check_divisor(&chart, &controlled, node.mark, &h).map_err(|e| ctx(&e))?;
            let done = if order_reduce { NodeStatus::OrderReduced } else { NodeStatus::Principalized };
            if node.status != done || node.center.is_some() || !node.changes.is_empty() {
                return Err(ctx("a divisor leaf is a finished chart without other centers"));
            }
            if !order_reduce && !same_ideal_localized(&residual, &Ideal::principal(h.clone()), &inv)? {
                return Err(ctx("the divisor is not the residual of the total transform"));
            }
            report.blowups += 1;
            continue;
        }
        match node.status {
            NodeStatus::Principalized => {
                if order_reduce || node.center.is_some() {
                    return Err(ctx("unexpected principalized leaf"));
                }
                if !residual.is_unit_localized(&inv)? {
                    return Err(ctx("residual of a principalized chart is not a unit"));
                }
                continue;
            }
            NodeStatus::OrderReduced => {
                if !order_reduce || node.center.is_some() || maxord >= Order::Finite(node.mark) {
                    return Err(ctx("order-reduced leaf still has maximal order at least the mark"));
                }
                continue;
            }
            _ => {}
        }

        // blown-up chart: replay the coordinate changes with certificates
        let center = node.center.as_ref().ok_or_else(|| ctx("blown-up chart without a center"))?;
        let mut chart = chart;
        let mut total = total;
        let mut work = controlled;
        for tc in &node.changes {
            let c = parse_change(&v, tc)?;
            if let CoordinateChange::Localize { element } = &c {
                if !work.sum(&Ideal::principal(element.clone())).is_unit_localized(&chart.inverted)? {
                    return Err(ctx(&format!("inverting {element} loses points of the controlled locus")));
                }
            }
            chart.apply_change(&c).map_err(|e| ctx(&e.to_string()))?;
            total = c.apply_ideal(&total)?;
            work = c.apply_ideal(&work)?;
        }
        if !is_admissible(&chart, &work, node.mark, center)? {
            return Err(ctx(&format!("center {{{}}} is not admissible for mark {}", center.join(", "), node.mark)));
        }
        let charts = chart.blow_up_charts(center, node.stage + 1).map_err(|e| ctx(&e.to_string()))?;
        let kids: Vec<&TraceNode> = doc.nodes.iter().filter(|n| n.parent.as_deref() == Some(node.id.as_str())).collect();
        if kids.len() != charts.len() {
            return Err(ctx(&format!("expected {} charts, found {}", charts.len(), kids.len())));
        }
        let mut next = Vec::new();
        for bu in charts {
            let kid = kids
                .iter()
                .find(|k| k.chart_var.as_deref() == Some(bu.chart_var.as_str()))
                .ok_or_else(|| ctx(&format!("missing {}-chart", bu.chart_var)))?;
            report.edges += 1;
            if kid.id != bu.chart.id || kid.stage != node.stage + 1 {
                return Err(ctx(&format!("child {} has the wrong id or stage", kid.id)));
            }
            let kid_total = parse_all(&v, &kid.total)?;
            if !same_gens(total_transform(&total, &bu).gens(), &kid_total) {
                return Err(ctx(&format!("total transform on {} does not match", kid.id)));
            }
            let inh = kid.inherited.as_ref().ok_or_else(|| ctx("child without a controlled transform"))?;
            let inh = parse_all(&v, inh)?;
            let x = Polynomial::var(&v, &bu.chart_var)?.pow(node.mark);
            let pulled: Vec<Polynomial> = work.gens().iter().map(|g| bu.pullback(g)).collect();
            let scaled: Vec<Polynomial> = inh.iter().map(|g| &x * g).collect();
            if !same_gens(&pulled, &scaled) {
                return Err(ctx(&format!("pullback is not {}^{} times the controlled transform on {}", bu.chart_var, node.mark, kid.id)));
            }
            next.push((*kid, bu.chart, Some(node.mark)));
        }
        report.blowups += 1;
        for item in next.into_iter().rev() {
            stack.push(item);
        }
    }
    if report.nodes != doc.nodes.len() {
        return Err(reject("trace contains charts unreachable from the root"));
    }
    if report.blowups != doc.outcome.blowups {
        return Err(reject("blow-up count mismatch"));
    }
    let expected = match (failures, budget_hit, order_reduce) {
        (0, _, false) => OutcomeStatus::Principalized,
        (0, _, true) => OutcomeStatus::OrderReduced,
        (_, true, _) => OutcomeStatus::BudgetExhausted,
        _ => OutcomeStatus::Failed,
    };
    if expected != doc.outcome.status && !(expected == OutcomeStatus::BudgetExhausted && doc.outcome.status == OutcomeStatus::Failed) {
        return Err(reject("outcome does not match the leaves"));
    }
    Ok(report)
}

fn same_ideal_localized(a: &Ideal, b: &Ideal, inv: &[Polynomial]) -> Result<bool> {
    for g in a.gens() {
        if !b.contains_localized(g, inv)? {
            return Ok(false);
        }
    }
    for g in b.gens() {
        if !a.contains_localized(g, inv)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(controlled, mark) = ((h), 1)` and `V(h)` is smooth with normal crossings
/// against every set of exceptional coordinates.
fn check_divisor(chart: &Chart, controlled: &Ideal, mark: u32, h: &Polynomial) -> std::result::Result<(), String> {
    let err = |e: Error| e.to_string();
    if mark != 1 {
        return Err("a divisor leaf needs mark 1".into());
    }
    let inv = &chart.inverted;
    if !same_ideal_localized(controlled, &Ideal::principal(h.clone()), inv).map_err(err)? {
        return Err("the controlled ideal is not generated by the divisor".into());
    }
    let v = &chart.vars;
    let exc: Vec<usize> = chart.exceptional.iter().map(|(x, _)| var_index(v, x)).collect::<Result<_>>().map_err(err)?;
    for mask in 0u32..(1 << exc.len()) {
        let gens: Vec<Polynomial> = std::iter::once(h.clone())
            .chain((0..v.len()).map(|k| {
                let on = exc.iter().enumerate().any(|(i, &j)| j == k && mask & (1 << i) != 0);
                if on {
                    Polynomial::var_at(v, k)
                } else {
                    h.differentiate_at(k)
                }
            }))
            .collect();
        if !Ideal::new(v, gens).is_unit_localized(inv).map_err(err)? {
            return Err(format!("V({h}) does not cross the exceptional divisor normally"));
        }
    }
    Ok(())
}

fn check_chart(node: &TraceNode, chart: &Chart) -> std::result::Result<(), String> {
    let exc: Vec<(String, u32)> = node.exceptional.iter().map(|e| (e.var.clone(), e.stage)).collect();
    if exc != chart.exceptional {
        return Err("exceptional coordinates differ from the rebuilt chart".into());
    }
    let inv = parse_all(&chart.vars, &node.inverted).map_err(|e| e.to_string())?;
    if !same_polys_unordered(&inv, &chart.inverted) {
        return Err("inverted elements differ from the rebuilt chart".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cusp_doc() -> TraceDocument {
        let v = vars(&["x", "y"]);
        let i = Ideal::new(&v, parse_many(&["y^2 - x^3"], &v).unwrap());
        let r = principalize(&i, Chart::root(&v), &DriverOptions::default()).unwrap();
        let input = TraceInput {
            mode: TraceMode::Principalize,
            vars: vec!["x".into(), "y".into()],
            ideal: vec!["y^2 - x^3".into()],
            exceptional: vec![],
            mark: None,
            budget: 64,
            contact: None,
        };
        TraceDocument::from_result(input, &r, None).unwrap()
    }

    #[test]
    fn cusp_trace_checks() {
        let d = cusp_doc();
        let rep = check_trace(&d).unwrap();
        assert_eq!(rep.blowups, 7);
        assert_eq!(rep.nodes, d.nodes.len());
        assert_eq!(d.nodes[0].id, "root");
        assert_eq!(d.nodes[1].id, "root/x-chart");
    }

    #[test]
    fn json_round_trip() {
        let d = cusp_doc();
        let s = d.to_json();
        let back = TraceDocument::from_json(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json(), s);
        assert!(s.contains("\"version\": \"res-kernel-trace/1\""));
    }

    #[test]
    fn mutated_center_is_rejected() {
        let d = cusp_doc();
        for (i, n) in d.nodes.iter().enumerate() {
            let Some(c) = &n.center else { continue };
            let mut bad = d.clone();
            bad.nodes[i].center = Some(if c.len() == 2 { vec![c[0].clone()] } else { vec!["x".into(), "y".into()] });
            assert!(matches!(check_trace(&bad), Err(Error::TraceRejected(_))), "{} accepted", n.id);
        }
    }

    #[test]
    fn tampered_transform_is_rejected() {
        let mut d = cusp_doc();
        d.nodes[1].total = vec!["x^2*y^2 - x^2".into()];
        assert!(check_trace(&d).is_err());
        let mut d = cusp_doc();
        d.version = "other".into();
        assert!(matches!(check_trace(&d), Err(Error::TraceFormat(_))));
    }

    #[test]
    fn text_rendering() {
        let t = cusp_doc().render_text();
        assert!(t.contains("root/x-chart/y-chart/x-chart/y-chart [stage 4] principalized"));
        assert!(t.contains("outcome: principalized after 7 blow-ups"));
    }
}
