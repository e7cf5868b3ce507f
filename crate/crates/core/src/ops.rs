//! Elementary-operation counting and the structured event trace.
//!
//! The counter tallies assignments, additions/subtractions and comparisons of
//! numbers. Every matrix or array read-and-compare, every write and every
//! integer add/sub performed by the procedures is charged one unit; loop
//! control is not charged. When disabled, the counter records nothing and no
//! procedure's control flow depends on it.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Assignment,
    Arithmetic,
    Comparison,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    enabled: bool,
    pub assignments: u64,
    pub arithmetic: u64,
    pub comparisons: u64,
}

impl OpCounter {
    pub fn new(enabled: bool) -> Self {
        OpCounter {
            enabled,
            ..OpCounter::default()
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    #[inline]
    pub fn count(&mut self, kind: OpKind, k: u64) {
        if !self.enabled {
            return;
        }
        match kind {
            OpKind::Assignment => self.assignments += k,
            OpKind::Arithmetic => self.arithmetic += k,
            OpKind::Comparison => self.comparisons += k,
        }
    }

    pub fn total(&self) -> u64 {
        self.assignments + self.arithmetic + self.comparisons
    }
}

/// One structured trace event. Indices are stored 0-based and rendered
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    MainVertex { vertex: usize, column: usize },
    VertexFormed { vertex: usize },
    EdgeFormed { from: usize, to: usize, column: usize, conjunctive: bool },
    UselessMarked { vertex: usize, column: usize },
    FinalMarked { vertex: usize },
    RpStart { vertex: usize },
    VertexRemoved { vertex: usize },
    EdgeRemoved { from: usize, to: usize, column: usize },
    RpResult { vertex: usize, removable: bool },
    Snapshot,
    Restore,
    IncompatFound { column: usize, vertices: Vec<usize> },
    IncompatEliminated { column: usize, vertex: usize },
    ExtensionPlanned { vertex: usize, column: usize },
    Extended { vertices: Vec<usize> },
    Shortcut { row: usize },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &[usize]) -> fmt::Result {
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    f.write_char(',')?;
                }
                write!(f, "v{}", x + 1)?;
            }
            Ok(())
        }
        match self {
            Event::MainVertex { vertex, column } => {
                write!(f, "main-vertex v{} col={}", vertex + 1, column + 1)
            }
            Event::VertexFormed { vertex } => write!(f, "vertex-formed v{}", vertex + 1),
            Event::EdgeFormed {
                from,
                to,
                column,
                conjunctive,
            } => {
                let label = if *conjunctive { '&' } else { '|' };
                write!(f, "edge-formed v{} {}{} v{}", from + 1, label, column + 1, to + 1)
            }
            Event::UselessMarked { vertex, column } => {
                write!(f, "useless-marked v{} col={}", vertex + 1, column + 1)
            }
            Event::FinalMarked { vertex } => write!(f, "final-marked v{}", vertex + 1),
            Event::RpStart { vertex } => write!(f, "rp-start v{}", vertex + 1),
            Event::VertexRemoved { vertex } => write!(f, "vertex-removed v{}", vertex + 1),
            Event::EdgeRemoved { from, to, column } => {
                write!(f, "edge-removed v{} col={} v{}", from + 1, column + 1, to + 1)
            }
            Event::RpResult { vertex, removable } => write!(
                f,
                "rp-result v{} {}",
                vertex + 1,
                if *removable { "removable" } else { "non-removable" }
            ),
            Event::Snapshot => f.write_str("snapshot"),
            Event::Restore => f.write_str("restore"),
            Event::IncompatFound { column, vertices } => {
                write!(f, "incompat-found col={} ", column + 1)?;
                list(f, vertices)
            }
            Event::IncompatEliminated { column, vertex } => {
                write!(f, "incompat-eliminated col={} by v{}", column + 1, vertex + 1)
            }
            Event::ExtensionPlanned { vertex, column } => {
                write!(f, "extension-planned v{} col={}", vertex + 1, column + 1)
            }
            Event::Extended { vertices } => {
                f.write_str("extended ")?;
                list(f, vertices)
            }
            Event::Shortcut { row } => write!(f, "shortcut-both-single row={}", row + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub event: Event,
    /// Op-counter total when the event was recorded (0 if counting is off).
    pub ops: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    enabled: bool,
    events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new(enabled: bool) -> Self {
        Trace {
            enabled,
            events: Vec::new(),
        }
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    /// One line per event, `<event> @<ops>`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            let _ = writeln!(s, "{} @{}", e.event, e.ops);
        }
        s
    }

    /// One line per event without the counter readings.
    pub fn render_events(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            let _ = writeln!(s, "{}", e.event);
        }
        s
    }
}

/// Counter and trace threaded through every procedure of one solve.
#[derive(Debug, Clone, Default)]
pub struct Meter {
    pub ops: OpCounter,
    pub trace: Trace,
}

impl Meter {
    pub fn new(count_ops: bool, trace: bool) -> Self {
        Meter {
            ops: OpCounter::new(count_ops),
            trace: Trace::new(trace),
        }
    }

    /// A meter that records nothing.
    pub fn off() -> Self {
        Meter::new(false, false)
    }

    #[inline]
    pub fn cmp(&mut self, k: u64) {
        self.ops.count(OpKind::Comparison, k);
    }

    #[inline]
    pub fn assign(&mut self, k: u64) {
        self.ops.count(OpKind::Assignment, k);
    }

    #[inline]
    pub fn arith(&mut self, k: u64) {
        self.ops.count(OpKind::Arithmetic, k);
    }

    #[inline]
    pub fn emit(&mut self, event: Event) {
        if self.trace.enabled {
            let ops = self.ops.total();
            self.trace.events.push(TraceEvent { event, ops });
        }
    }

    /// Like [`Meter::emit`] but builds the event only when tracing is on.
    #[inline]
    pub fn emit_with(&mut self, build: impl FnOnce() -> Event) {
        if self.trace.enabled {
            self.emit(build());
        }
    }
}
