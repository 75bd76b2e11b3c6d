//! Forwarder toolkit for linear-logic session types.
//!
//! A forwarder is a process that only relays messages between endpoints:
//! everything it receives is eventually passed on, nothing is invented or
//! dropped, and per-peer message order is preserved. Such processes certify
//! that a set of session types can be safely composed into a multiparty
//! session, strictly generalising pairwise duality.
//!
//! The crate provides:
//!
//! - [`syntax`]: plain and annotated session types, duality, annotation and
//!   erasure maps;
//! - [`queue`] / [`context`]: per-endpoint queues of in-transit items and
//!   typing contexts that attach a queue to every endpoint;
//! - [`process`]: the process term language, including the multi-cut
//!   composition form;
//! - [`cp`]: a syntax-directed checker for ordinary linear process typing;
//! - [`forwarder`]: the checker for the forwarder judgement, producing an
//!   explicit derivation tree;
//! - [`synth`]: backtracking proof search that synthesises forwarders, with
//!   or without annotations given up front;
//! - [`lts`]: the transition semantics of typing contexts and the live-path
//!   decision procedure for multiparty compatibility;
//! - [`mcut`]: the multi-cut reduction engine that executes composed
//!   processes mediated by a forwarder until the composition is cut-free;
//! - [`compose`]: helpers that build identity forwarders and multi-cut
//!   composites out of synthesised witnesses;
//! - [`dsl`]: a small concrete syntax with parser and pretty-printer;
//! - [`enumerate`] / [`batch`]: exhaustive families of types and contexts,
//!   and data-parallel sweep drivers over them.
//!
//! The `parallel` feature (on by default) backs the sweep drivers in
//! [`batch`] with rayon; without it they fall back to sequential loops with
//! identical results.

pub mod batch;
pub mod compose;
pub mod context;
pub mod cp;
pub mod dsl;
pub mod enumerate;
pub mod forwarder;
pub mod json;
pub mod lts;
pub mod mcut;
pub mod process;
pub mod queue;
pub mod synth;
pub mod syntax;

pub use context::{Context, ContextError, CpContext, EndpointState, Usage};
pub use cp::{check_cp, CpDerivation, CpRule, TypeError};
pub use forwarder::{check_forwarder, check_forwarder_with, CheckOptions, Derivation, FwdError, FwdErrorKind, FwdRule};
pub use lts::{live_path, step, Label, LtsError, LtsState};
pub use mcut::{normalize, reduce_step, validate_mcut, RunError, RunTrace, StepKind, TraceEntry};
pub use process::{FreshNames, Process};
pub use queue::{Queue, QueueEntry, QueuePayload};
pub use synth::{synth_annotated, synth_plain, SynthConfig};
pub use syntax::{annotate, dual, erase, Name, AnnType, PlainType};
