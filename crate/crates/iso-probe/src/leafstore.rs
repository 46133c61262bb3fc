//! Invariant-keyed storage of discovered leaves.
//!
//! Actual leaves are keyed by their trace hash, fake leaves by their full
//! deviation value; the two namespaces never mix. Equal keys are candidate
//! matches only — every candidate is certified by the caller before it is
//! believed, so hash collisions between non-equivalent leaves cost time but
//! never correctness.
//!
//! The first `full_leaf_budget` leaves per tree keep their whole discrete
//! coloring; later ones store just the individualization path and reproduce
//! the coloring by replaying it.

use std::collections::HashMap;

use crate::coloring::Coloring;
use crate::graph::{Graph, Permutation};
use crate::refinement::{DeviationValue, Refiner};
use crate::selector::SelectorKind;
use crate::walk::{leaf_permutation, replay_path, FakeLeaf, Leaf};
use crate::Error;

/// Which of the two search trees a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeId {
    T1,
    T2,
}

impl TreeId {
    pub fn other(self) -> TreeId {
        match self {
            TreeId::T1 => TreeId::T2,
            TreeId::T2 => TreeId::T1,
        }
    }

    fn idx(self) -> usize {
        match self {
            TreeId::T1 => 0,
            TreeId::T2 => 1,
        }
    }
}

/// Lookup key of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafKey {
    Actual(u64),
    Fake(DeviationValue),
}

/// What a record can reproduce.
#[derive(Debug, Clone)]
pub enum LeafPayload {
    /// The whole discrete coloring; materializes without recomputation.
    Full { coloring: Coloring, base: Vec<u32> },
    /// The individualization path only; materializes via replay.
    PathOnly { base: Vec<u32> },
    /// An early-out deviation; never materializes.
    Fake(DeviationValue),
}

#[derive(Debug, Clone)]
pub struct LeafRecord {
    pub key: LeafKey,
    pub payload: LeafPayload,
    pub origin: TreeId,
}

/// Index of a record inside its store.
pub type RecordId = usize;

/// What the solver stages for insertion.
#[derive(Debug, Clone, Copy)]
pub enum LeafInsert<'a> {
    Actual(&'a Leaf),
    Fake(&'a FakeLeaf),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StoreCounters {
    pub full: u64,
    pub path_only: u64,
    pub fake: u64,
    /// Path replays performed by materialization.
    pub replays: u64,
}

/// Leaf storage for both trees of one solver run.
///
/// Insertion is two-phase: [`LeafStore::insert_or_candidates`] stages the
/// record and returns every same-kind record under the same key from both
/// trees; after certifying the candidates the caller either confirms the
/// staged record or discards it as a duplicate.
#[derive(Debug)]
pub struct LeafStore {
    actual: [HashMap<u64, Vec<RecordId>>; 2],
    fake: [HashMap<DeviationValue, Vec<RecordId>>; 2],
    records: Vec<LeafRecord>,
    full_count: [usize; 2],
    full_leaf_budget: usize,
    pending: Option<RecordId>,
    counters: StoreCounters,
}

impl LeafStore {
    pub fn new(full_leaf_budget: usize) -> LeafStore {
        LeafStore {
            actual: [HashMap::new(), HashMap::new()],
            fake: [HashMap::new(), HashMap::new()],
            records: Vec::new(),
            full_count: [0, 0],
            full_leaf_budget,
            pending: None,
            counters: StoreCounters::default(),
        }
    }

    pub fn counters(&self) -> StoreCounters {
        self.counters
    }

    pub fn record(&self, id: RecordId) -> &LeafRecord {
        &self.records[id]
    }

    /// Stages `entry` for tree `tree` and returns all candidate records of
    /// the same kind under the same key, from both trees (same tree first).
    /// The staged record becomes visible only after [`Self::confirm_insert`].
    pub fn insert_or_candidates(&mut self, tree: TreeId, entry: LeafInsert<'_>) -> Vec<RecordId> {
        assert!(
            self.pending.is_none(),
            "previous staged insert not resolved"
        );
        let (key, payload) = match entry {
            LeafInsert::Actual(leaf) => {
                let payload = if self.full_count[tree.idx()] < self.full_leaf_budget {
                    LeafPayload::Full {
                        coloring: leaf.coloring.clone(),
                        base: leaf.base.clone(),
                    }
                } else {
                    LeafPayload::PathOnly {
                        base: leaf.base.clone(),
                    }
                };
                (LeafKey::Actual(leaf.trace.hash()), payload)
            }
            LeafInsert::Fake(fake) => (
                LeafKey::Fake(fake.deviation),
                LeafPayload::Fake(fake.deviation),
            ),
        };
        let mut candidates = Vec::new();
        for t in [tree, tree.other()] {
            let bucket = match key {
                LeafKey::Actual(h) => self.actual[t.idx()].get(&h),
                LeafKey::Fake(d) => self.fake[t.idx()].get(&d),
            };
            if let Some(ids) = bucket {
                candidates.extend_from_slice(ids);
            }
        }
        let id = self.records.len();
        self.records.push(LeafRecord {
            key,
            payload,
            origin: tree,
        });
        self.pending = Some(id);
        candidates
    }

    /// Commits the staged record into its tree's map.
    pub fn confirm_insert(&mut self) {
        let id = self.pending.take().expect("no staged insert to confirm");
        let rec = &self.records[id];
        let t = rec.origin.idx();
        match rec.key {
            LeafKey::Actual(h) => {
                self.actual[t].entry(h).or_default().push(id);
                match rec.payload {
                    LeafPayload::Full { .. } => {
                        self.full_count[t] += 1;
                        self.counters.full += 1;
                    }
                    LeafPayload::PathOnly { .. } => self.counters.path_only += 1,
                    LeafPayload::Fake(_) => unreachable!(),
                }
            }
            LeafKey::Fake(d) => {
                self.fake[t].entry(d).or_default().push(id);
                self.counters.fake += 1;
            }
        }
    }

    /// Drops the staged record (it duplicated a certified match).
    pub fn discard_pending(&mut self) {
        let id = self.pending.take().expect("no staged insert to discard");
        debug_assert_eq!(id, self.records.len() - 1);
        self.records.pop();
    }

    /// Full coloring records confirmed for `tree`; never exceeds the budget.
    pub fn full_records(&self, tree: TreeId) -> usize {
        self.full_count[tree.idx()]
    }

    /// The permutation of an actual-leaf record, replaying its path when
    /// only the path was stored.
    pub fn materialize(
        &mut self,
        g: &Graph,
        refiner: &mut Refiner,
        selector: SelectorKind,
        id: RecordId,
    ) -> Result<Permutation, Error> {
        match &self.records[id].payload {
            LeafPayload::Full { coloring, .. } => leaf_permutation(coloring),
            LeafPayload::PathOnly { base } => {
                let base = base.clone();
                self.counters.replays += 1;
                let coloring = replay_path(g, refiner, selector, &base)?;
                leaf_permutation(&coloring)
            }
            LeafPayload::Fake(_) => {
                Err(Error::Contract("materialize called on a fake leaf".into()))
            }
        }
    }
}
