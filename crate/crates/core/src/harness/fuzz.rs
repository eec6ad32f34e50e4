// Copyright 2026 The rdfvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Randomized three-way merge checks.
//!
//! Each iteration commits a base dataset, applies one generated change on
//! `main` and another on a side branch, merges the side branch with the
//! three-way strategy and compares the merge snapshot with the expected
//! dataset `(base ∖ (C1⁻ ∪ C2⁻)) ∪ C1⁺ ∪ C2⁺`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::atomic::AtomicPartition;
use crate::delta::{apply, Change};
use crate::error::Result;
use crate::harness::gen::{fresh_classes, gen_dataset, pick_classes, QuadGen};
use crate::history::{Repository, Signature};
use crate::merge::Strategy;

/// Shape of the generated fixtures.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzConfig {
    pub base_size: usize,
    pub blank_ratio: f64,
    /// Upper bound for each of the shared and per-side additions and
    /// removals.
    pub max_edit: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            base_size: 1000,
            blank_ratio: 0.2,
            max_edit: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzFailure {
    pub iteration: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub iterations: usize,
    pub failures: Vec<FuzzFailure>,
    /// Hash over every expected result, to compare runs.
    pub fingerprint: String,
}

impl FuzzReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The two sides of one iteration.
#[derive(Clone, Debug)]
pub struct MergeFixture {
    pub base: AtomicPartition,
    pub left: Change,
    pub right: Change,
}

impl MergeFixture {
    /// Changes sharing some removals and additions and differing in others.
    pub fn generate(seed: u64, config: &FuzzConfig) -> Result<MergeFixture> {
        let base = crate::atomic::atomic_partition(&gen_dataset(seed, config.base_size, config.blank_ratio));
        let mut gen = QuadGen::new(seed ^ 0x5eed, (config.base_size as u64 / 4).max(8));
        let count = |gen: &mut QuadGen| gen.rng().gen_range(0..=config.max_edit);

        let (n_shared, n_left, n_right) = (count(&mut gen), count(&mut gen), count(&mut gen));
        let budget = (n_shared + n_left + n_right).min(base.len());
        let removed = pick_classes(&mut gen, &base, budget)?;
        let mut removed = removed.iter().map(|(_, g)| g.clone());
        let mut take = |n: usize| -> AtomicPartition {
            removed.by_ref().take(n).map(|g| (*g).clone()).collect()
        };
        let shared_rm = take(n_shared);
        let left_rm = take(n_left);
        let right_rm = take(n_right);

        let (a_shared, a_left, a_right) = (count(&mut gen), count(&mut gen), count(&mut gen));
        let shared_add = fresh_classes(&mut gen, a_shared, &[&base])?;
        let left_add = fresh_classes(&mut gen, a_left, &[&base, &shared_add])?;
        let mut right_add = fresh_classes(&mut gen, a_right, &[&base, &shared_add, &left_add])?;

        let mut left = Change::new(shared_add.union(&left_add), shared_rm.union(&left_rm));
        if left.is_empty() {
            left.positive = fresh_classes(&mut gen, 1, &[&base, &shared_add, &right_add])?;
        }
        if right_add.union(&shared_add).is_empty() && shared_rm.union(&right_rm).is_empty() {
            right_add = fresh_classes(&mut gen, 1, &[&base, &left.positive])?;
        }
        let right = Change::new(shared_add.union(&right_add), shared_rm.union(&right_rm));
        Ok(MergeFixture { base, left, right })
    }

    /// The merge result by class arithmetic alone.
    pub fn expected(&self) -> AtomicPartition {
        self.base
            .difference(&self.left.negative.union(&self.right.negative))
            .union(&self.left.positive)
            .union(&self.right.positive)
    }
}

/// Runs one iteration in a fresh repository under `dir`. Returns the expected
/// result, or a description of the disagreement.
pub fn run_iteration(dir: &std::path::Path, fixture: &MergeFixture) -> Result<std::result::Result<AtomicPartition, String>> {
    let repo = Repository::init(dir)?;
    let mut ws = repo.working_state()?;
    let base = repo.commit(&mut ws, fixture.base.clone(), &Signature::new("fuzz", 1), "base")?;
    repo.branch("side", base)?;
    let left = apply(&fixture.base, &fixture.left)?;
    repo.commit(&mut ws, left, &Signature::new("fuzz", 2), "left")?;
    let mut side = repo.checkout(&ws, "side", false)?;
    let right = apply(&fixture.base, &fixture.right)?;
    let theirs = repo.commit(&mut side, right, &Signature::new("fuzz", 3), "right")?;
    let mut ws = repo.checkout(&side, "main", false)?;

    let expected = fixture.expected();
    let (outcome, commit) = repo.merge(&mut ws, theirs, Strategy::ThreeWay, &Signature::new("fuzz", 4), None)?;
    if !outcome.conflicts.is_empty() {
        return Ok(Err(format!("{} conflicts reported", outcome.conflicts.len())));
    }
    let Some(commit) = commit else {
        return Ok(Err("no merge commit written".into()));
    };
    let record = repo.read_commit(&commit)?;
    if record.parents.len() != 2 {
        return Ok(Err(format!("merge commit has {} parents", record.parents.len())));
    }
    let stored = repo.store().get_blob(&record.snapshot)?;
    if stored != expected.canonical_bytes() {
        let got = repo.snapshot(&commit)?;
        return Ok(Err(format!(
            "result differs: {} unexpected classes, {} missing",
            got.difference(&expected).len(),
            expected.difference(&got).len()
        )));
    }
    Ok(Ok(expected))
}

/// `n` iterations derived from `seed`.
pub fn fuzz_merge(n: usize, seed: u64, config: &FuzzConfig) -> Result<FuzzReport> {
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let scratch = tempfile::tempdir().map_err(|source| crate::store::StoreError::Io {
        path: std::env::temp_dir(),
        source,
    })?;
    let mut report = FuzzReport {
        iterations: n,
        ..FuzzReport::default()
    };
    let mut fingerprint = Sha256::new();
    for iteration in 0..n {
        let iteration_seed: u64 = seeds.gen();
        let fixture = MergeFixture::generate(iteration_seed, config)?;
        let dir = scratch.path().join(iteration.to_string());
        let verdict = run_iteration(&dir, &fixture).map_err(|e| e.to_string()).and_then(|r| r);
        match verdict {
            Ok(expected) => {
                for h in expected.hashes() {
                    fingerprint.update(h.as_bytes());
                }
            }
            Err(message) => report.failures.push(FuzzFailure {
                iteration,
                seed: iteration_seed,
                message,
            }),
        }
        fingerprint.update(b"\n");
        // Best effort; the scratch directory goes away at the end anyway.
        let _ = std::fs::remove_dir_all(&dir);
    }
    report.fingerprint = hex::encode(fingerprint.finalize());
    Ok(report)
}
