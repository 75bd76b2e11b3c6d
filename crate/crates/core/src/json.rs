//! Stable JSON views of derivations, label paths, and run traces.
//!
//! Types and contexts are rendered in the concrete syntax (the same text
//! the pretty-printer emits), so the schemas stay flat:
//!
//! - forwarder derivation: `{rule, endpoint, targets, source_done,
//!   conclusion, children}`;
//! - plain derivation: `{rule, endpoint?, conclusion, children, forwarder?}`;
//! - label path: `[{kind, endpoint, target | targets}]`;
//! - run trace: `[{kind, endpoints, result}]`.

use serde_json::{json, Value};

use crate::cp::CpDerivation;
use crate::forwarder::{Derivation, FwdError};
use crate::lts::Label;
use crate::mcut::RunTrace;

pub fn derivation_to_json(d: &Derivation) -> Value {
    json!({
        "rule": d.rule.to_string(),
        "endpoint": d.endpoint.to_string(),
        "targets": d.targets.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "source_done": d.source_done,
        "conclusion": d.conclusion.to_string(),
        "children": d.children.iter().map(derivation_to_json).collect::<Vec<_>>(),
    })
}

pub fn cp_derivation_to_json(d: &CpDerivation) -> Value {
    let mut v = json!({
        "rule": d.rule.to_string(),
        "conclusion": d.conclusion.to_string(),
        "children": d.children.iter().map(cp_derivation_to_json).collect::<Vec<_>>(),
    });
    if let Some(e) = &d.endpoint {
        v["endpoint"] = json!(e.to_string());
    }
    if let Some(f) = &d.forwarder {
        v["forwarder"] = derivation_to_json(f);
    }
    v
}

pub fn label_to_json(l: &Label) -> Value {
    match l {
        Label::ParStep(x, u) => json!({"kind": "par", "endpoint": x.to_string(), "target": u.to_string()}),
        Label::TensorStep(x, u) => json!({"kind": "tensor", "endpoint": x.to_string(), "target": u.to_string()}),
        Label::BotStep(x, u) => json!({"kind": "bot", "endpoint": x.to_string(), "target": u.to_string()}),
        Label::OneStep(x, us) => json!({
            "kind": "one",
            "endpoint": x.to_string(),
            "targets": us.iter().map(|u| u.to_string()).collect::<Vec<_>>(),
        }),
        Label::AxStep(x, y) => json!({"kind": "ax", "endpoint": x.to_string(), "target": y.to_string()}),
    }
}

pub fn path_to_json(path: &[Label]) -> Value {
    Value::Array(path.iter().map(label_to_json).collect())
}

pub fn trace_to_json(trace: &RunTrace) -> Value {
    Value::Array(
        trace
            .entries
            .iter()
            .map(|e| {
                json!({
                    "kind": e.kind.to_string(),
                    "endpoints": e.endpoints.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
                    "result": e.result.to_string(),
                })
            })
            .collect(),
    )
}

pub fn fwd_error_to_json(e: &FwdError) -> Value {
    json!({
        "kind": e.kind.to_string(),
        "message": e.message,
        "context": e.context.to_string(),
    })
}
