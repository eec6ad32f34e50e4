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


//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdfvc_core::atomic::oracle::bruteforce_quads;
use rdfvc_core::atomic::{atomic_partition, class_hash, equivalent, AtomicGraph, AtomicPartition};
use rdfvc_core::delta::{apply_dataset, diff, invert};
use rdfvc_core::harness::gen::{gen_change, gen_change_on, gen_dataset, QuadGen};
use rdfvc_core::history::{Repository, Signature};
use rdfvc_core::merge::{compute_merge, merge_three_way, Strategy};
use rdfvc_core::rdf::{parse_nquads, BlankNode, Dataset, GraphName, Iri, Literal, Quad, Term};
use rdfvc_core::sync::PullOutcome;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rdfvc(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rdfvc"))
        .arg("--porcelain")
        .args(args)
        .env_remove("RDFVC_SERVER")
        .output()
        .map_err(err)?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    if !out.status.success() {
        return Err(format!(
            "rdfvc {} exited with {:?}: {}{}",
            args.join(" "),
            out.status.code(),
            stdout.trim(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(stdout)
}

fn part(text: &str) -> AtomicPartition {
    atomic_partition(&parse_nquads(text.as_bytes()).expect("fixture parses"))
}

fn sig(t: i64) -> Signature {
    Signature::new("acceptance", t)
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, format!("took {elapsed:.1?}, limit {limit:?}"))
}

fn fuzz_merge() -> Verdict {
    let started = Instant::now();
    let out = rdfvc(&["fuzz-merge", "-n", "1000", "--seed", "42", "--base-size", "1000"])?;
    let elapsed = started.elapsed();
    let fields: Vec<&str> = out.trim().split('\t').collect();
    check(fields.len() == 4 && fields[0] == "fuzz", format!("unexpected output {out:?}"))?;
    check(fields[1] == "1000", format!("{} iterations", fields[1]))?;
    check(fields[2] == "0", format!("{} failures", fields[2]))?;
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!("1000 iterations, 0 failures in {elapsed:.1?}"))
}

fn replay(scratch: &Path) -> Verdict {
    let data = scratch.join("initial.nq");
    let log = scratch.join("log.txt");
    let data_s = data.to_str().unwrap();
    rdfvc(&["generate", "dataset", "--size", "46370", "--seed", "2017", "--blank-ratio", "0.1", "-o", data_s])?;
    let statements = std::fs::read_to_string(&data).map_err(err)?.lines().count();
    check(statements >= 46000, format!("initial dataset has {statements} statements"))?;
    rdfvc(&["generate", "log", "-i", data_s, "--transactions", "1000", "--seed", "2017", "-o", log.to_str().unwrap()])?;

    let started = Instant::now();
    let into = scratch.join("replay");
    let out = rdfvc(&["verify-replay", "-i", data_s, "-l", log.to_str().unwrap(), "--into", into.to_str().unwrap()])?;
    let elapsed = started.elapsed();
    let _ = std::fs::remove_dir_all(&into);
    let fields: Vec<usize> = out.trim().split('\t').skip(1).map(|f| f.parse().unwrap_or(usize::MAX)).collect();
    let [transactions, applied, skipped, mismatches] = fields[..] else {
        return Err(format!("unexpected output {out:?}"));
    };
    check(transactions >= 1000, format!("{transactions} transactions"))?;
    check(applied + skipped == transactions, format!("replay stopped after {} of {transactions}", applied + skipped))?;
    check(mismatches == 0, format!("{mismatches} mismatches"))?;
    within(elapsed, Duration::from_secs(600))?;
    Ok(format!(
        "{statements} initial statements, {transactions} transactions ({applied} committed, {skipped} without effect), 0 mismatches in {elapsed:.1?}"
    ))
}

/// Renames every blank node, so equality has to go through isomorphism.
fn relabel(d: &Dataset, tag: &str) -> Dataset {
    let mut out = Dataset::new();
    for q in d.iter() {
        out.insert(q.map_blank_nodes(|b| BlankNode::new(format!("{tag}{}", b.as_str())).unwrap()));
    }
    out
}

fn same(a: &Dataset, b: &Dataset) -> bool {
    atomic_partition(a).canonical_bytes() == atomic_partition(b).canonical_bytes()
}

fn delta_roundtrips() -> Verdict {
    let mut blank_pairs = 0;
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gen_dataset(seed, rng.gen_range(20..200), 0.4);
        // G2: drop some statements (possibly splitting blank graphs), then
        // add a generated change, then rename all blank nodes.
        let mut quads: Vec<Quad> = g.iter().cloned().collect();
        quads.shuffle(&mut rng);
        quads.truncate(quads.len() - rng.gen_range(0..quads.len() / 4 + 1));
        let kept: Dataset = {
            let mut d = Dataset::new();
            for q in quads {
                d.insert(q);
            }
            d
        };
        let change = gen_change(seed ^ 0xd1ff, &kept, rng.gen_range(1..10), rng.gen_range(0..5)).map_err(err)?;
        let g2 = relabel(&apply_dataset(&kept, &change).map_err(err)?, "r");
        if g2.iter().any(|q| !q.is_ground()) {
            blank_pairs += 1;
        }

        let c = diff(&g, &g2);
        let forward = apply_dataset(&g, &c).map_err(|e| format!("seed {seed}: apply: {e}"))?;
        check(same(&forward, &g2), format!("seed {seed}: apply(G, diff(G, G2)) differs from G2"))?;
        let back = apply_dataset(&forward, &invert(&c)).map_err(|e| format!("seed {seed}: invert: {e}"))?;
        check(same(&back, &g), format!("seed {seed}: inverted change does not restore G"))?;
    }
    check(blank_pairs > 400, format!("only {blank_pairs} pairs with blank nodes"))?;
    Ok(format!("500 pairs ({blank_pairs} with blank nodes), canonical bytes equal both ways"))
}

/// Small, symmetric-prone datasets: few predicates and values so that
/// distinct components are often isomorphic or nearly so.
fn oracle_dataset(rng: &mut ChaCha8Rng) -> Dataset {
    let iri = |i: usize| Iri::new(format!("http://example.org/{i}")).unwrap();
    let mut d = Dataset::new();
    let copy = rng.gen_bool(0.5);
    let (max_blanks, max_len) = if copy { (4, 15) } else { (8, 30) };
    let blanks: Vec<BlankNode> = (0..rng.gen_range(0..=max_blanks)).map(|i| BlankNode::new(format!("n{i}")).unwrap()).collect();
    let node = |rng: &mut ChaCha8Rng| -> Term {
        if !blanks.is_empty() && rng.gen_bool(0.7) {
            Term::from(blanks[rng.gen_range(0..blanks.len())].clone())
        } else {
            Term::from(iri(rng.gen_range(0..3)))
        }
    };
    let target = rng.gen_range(1..=max_len);
    while d.len() < target {
        let s = node(rng);
        let o = if rng.gen_bool(0.2) {
            Term::from(Literal::simple(["x", "y"][rng.gen_range(0..2)]))
        } else {
            node(rng)
        };
        let g = if rng.gen_bool(0.2) { GraphName::Named(iri(9)) } else { GraphName::Default };
        if let Ok(q) = Quad::new(s, iri(10 + rng.gen_range(0..2)), o, g) {
            d.insert(q);
        }
    }
    // A renamed copy of the blank part guarantees isomorphic pairs.
    let blank_part: Vec<Quad> = d.iter().filter(|q| !q.is_ground()).cloned().collect();
    if copy {
        for q in blank_part {
            d.insert(q.map_blank_nodes(|b| BlankNode::new(format!("copy{}", b.as_str())).unwrap()));
        }
    }
    d
}

/// Connected components by repeated merging over shared blank nodes; no
/// union-find, no hashing.
fn naive_components(d: &Dataset) -> Vec<Vec<Quad>> {
    let mut groups: Vec<(BTreeSet<String>, Vec<Quad>)> = Vec::new();
    for q in d.iter() {
        let labels: BTreeSet<String> = q.blank_nodes().map(|b| b.as_str().to_owned()).collect();
        let mut merged = (labels, vec![q.clone()]);
        if !merged.0.is_empty() {
            let mut i = 0;
            while i < groups.len() {
                if !groups[i].0.is_disjoint(&merged.0) {
                    let (l, qs) = groups.swap_remove(i);
                    merged.0.extend(l);
                    merged.1.extend(qs);
                } else {
                    i += 1;
                }
            }
        }
        groups.push(merged);
    }
    groups.into_iter().map(|(_, qs)| qs).collect()
}

fn oracle_agreement() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut pairs, mut equal_pairs, mut datasets) = (0usize, 0usize, 0usize);
    while datasets < 200 {
        let d = oracle_dataset(&mut rng);
        let blank_count = d.iter().flat_map(|q| q.blank_nodes().cloned()).collect::<BTreeSet<_>>().len();
        if d.len() > 30 || blank_count > 8 {
            continue;
        }
        datasets += 1;
        let comps = naive_components(&d);
        let partition = atomic_partition(&d);

        // Isomorphism classes by brute force.
        let mut classes: Vec<Vec<Quad>> = Vec::new();
        for c in &comps {
            let mut found = false;
            for k in &classes {
                if bruteforce_quads(c, k).map_err(err)? {
                    found = true;
                    break;
                }
            }
            if !found {
                classes.push(c.clone());
            }
        }
        check(
            partition.len() == classes.len(),
            format!("dataset {datasets}: {} classes, oracle finds {}", partition.len(), classes.len()),
        )?;
        for k in &classes {
            let g = AtomicGraph::new(k.clone()).map_err(err)?;
            let rep = partition.get(&class_hash(&g)).ok_or(format!("dataset {datasets}: class missing from partition"))?;
            check(bruteforce_quads(rep.quads(), k).map_err(err)?, format!("dataset {datasets}: representative not isomorphic"))?;
        }
        for (i, a) in comps.iter().enumerate() {
            for b in &comps[i + 1..] {
                let oracle = bruteforce_quads(a, b).map_err(err)?;
                let (ga, gb) = (AtomicGraph::new(a.clone()).map_err(err)?, AtomicGraph::new(b.clone()).map_err(err)?);
                check(equivalent(&ga, &gb) == oracle, format!("dataset {datasets}: equivalence disagrees"))?;
                check((class_hash(&ga) == class_hash(&gb)) == oracle, format!("dataset {datasets}: class hash disagrees"))?;
                pairs += 1;
                equal_pairs += oracle as usize;
            }
        }
    }
    check(equal_pairs >= 100, format!("only {equal_pairs} isomorphic pairs exercised"))?;
    Ok(format!("200 datasets, {pairs} component pairs ({equal_pairs} isomorphic), exact agreement"))
}

fn touch_scenario() -> Verdict {
    let dir = tempfile::tempdir().map_err(err)?;
    let repo = Repository::init(dir.path().join("r")).map_err(err)?;
    let mut ws = repo.working_state().map_err(err)?;
    let base = "<http://ex/s> <http://ex/p> <http://ex/o1> .\n<http://ex/s> <http://ex/p> <http://ex/o2> .\n";
    let g = "<http://ex/s> <http://ex/q> _:n .\n_:n <http://ex/r> \"g\" .\n";
    let o3 = "<http://ex/s> <http://ex/p> <http://ex/o3> .\n";
    let o4 = "<http://ex/s> <http://ex/p> <http://ex/o4> .\n";
    let a = repo.commit(&mut ws, part(base), &sig(1), "a").map_err(err)?;
    repo.commit(&mut ws, part(&format!("{base}{g}")), &sig(2), "b").map_err(err)?;
    let c = repo.commit(&mut ws, part(&format!("{base}{o3}")), &sig(3), "c").map_err(err)?;
    repo.branch("other", a).map_err(err)?;
    let mut other = repo.checkout(&ws, "other", false).map_err(err)?;
    let d = repo.commit(&mut other, part(&format!("{base}{g}{o4}")), &sig(4), "d").map_err(err)?;

    let three_way = compute_merge(&repo, c, d, Strategy::ThreeWay).map_err(err)?;
    check(three_way.base == Some(a), "merge base is not a")?;
    check(three_way.result == part(&format!("{base}{o3}{o4}{g}")), "three-way result is not base + o3 + o4 + g")?;
    check(three_way.conflicts.is_empty(), "three-way reported conflicts")?;

    let touch = compute_merge(&repo, c, d, Strategy::Touch).map_err(err)?;
    check(touch.conflicts.ours_added_theirs_removed.is_empty(), "Y1 is not empty")?;
    check(touch.conflicts.theirs_added_ours_removed == part(g), "Y2 is not {g}")?;
    check(touch.result == part(&format!("{base}{o3}{o4}")), "touch result is not base + o3 + o4")?;
    Ok("three-way keeps g; touch reports Y1 = {}, Y2 = {g} and leaves g out".into())
}

fn revert_fallback() -> Verdict {
    let dir = tempfile::tempdir().map_err(err)?;
    let repo = Repository::init(dir.path().join("r")).map_err(err)?;
    let mut ws = repo.working_state().map_err(err)?;
    let [a, b, c, d, e] = ["a", "b", "c", "d", "e"].map(|x| format!("<http://ex/{x}> <http://ex/p> \"{x}\" .\n"));
    let g = "_:x <http://ex/p> _:y .\n_:y <http://ex/q> \"g\" .\n";
    repo.commit(&mut ws, part(&format!("{a}{b}")), &sig(1), "1").map_err(err)?;
    let c2 = repo.commit(&mut ws, part(&format!("{a}{c}{g}")), &sig(2), "2").map_err(err)?;
    repo.commit(&mut ws, part(&format!("{a}{c}{g}{d}")), &sig(3), "3").map_err(err)?;
    repo.commit(&mut ws, part(&format!("{c}{g}{d}{e}")), &sig(4), "4").map_err(err)?;

    // Undoing commit 2 (-b +c +g) on a head that has since dropped a and
    // added d and e: (head ∩ c1) ∪ (head ∖ c2) ∪ (c1 ∖ c2) = {} ∪ {d, e} ∪ {b}.
    let expected = part(&format!("{b}{d}{e}"));
    let before = repo.snapshot(&ws.head().unwrap()).map_err(err)?;
    let formula = merge_three_way(&repo.snapshot(&c2).map_err(err)?, &part(&format!("{a}{b}")), &before);
    check(formula == expected, "three-way formula disagrees with the hand-computed set")?;
    let reverted = repo.revert(&mut ws, c2, &sig(5)).map_err(err)?;
    let got = repo.snapshot(&reverted).map_err(err)?;
    check(
        got.canonical_bytes() == expected.canonical_bytes(),
        format!("revert produced {} statements, expected {{b, d, e}}", got.quad_count()),
    )?;
    Ok("revert of commit 2 of 4 yields exactly {b, d, e}".into())
}

fn sync_convergence() -> Verdict {
    let dir = tempfile::tempdir().map_err(err)?;
    let (pa, pb) = (dir.path().join("a"), dir.path().join("b"));
    let a = Repository::init(&pa).map_err(err)?;
    let b = Repository::init(&pb).map_err(err)?;
    a.add_remote("b", &pb).map_err(err)?;
    b.add_remote("a", &pa).map_err(err)?;
    let base = gen_dataset(70, 300, 0.3);
    let mut wa = a.working_state().map_err(err)?;
    a.commit(&mut wa, atomic_partition(&base), &sig(1), "base").map_err(err)?;
    let mut wb = b.working_state().map_err(err)?;
    b.pull(&mut wb, "a", "main", Strategy::ThreeWay, &sig(2)).map_err(err)?;

    // Disjoint edits on both sides.
    let ca = gen_change(71, &base, 12, 6).map_err(err)?;
    let cb = gen_change(72, &base, 9, 8).map_err(err)?;
    check(ca.negative.is_disjoint(&cb.negative) && ca.positive.is_disjoint(&cb.positive), "edits overlap")?;
    let da = rdfvc_core::delta::apply(wa.dataset(), &ca).map_err(err)?;
    let db = rdfvc_core::delta::apply(wb.dataset(), &cb).map_err(err)?;
    a.commit(&mut wa, da, &sig(3), "edit a").map_err(err)?;
    b.commit(&mut wb, db, &sig(4), "edit b").map_err(err)?;

    for (repo, ws, remote, t) in [(&a, &mut wa, "b", 5), (&b, &mut wb, "a", 6)] {
        *ws = repo.working_state().map_err(err)?;
        if let PullOutcome::Conflicts(o) = repo.pull(ws, remote, "main", Strategy::ThreeWay, &sig(t)).map_err(err)? {
            return Err(format!("pull from {remote}: {} conflicts", o.conflicts.len()));
        }
        repo.push("main", remote, "main").map_err(err)?;
    }
    let (wa, wb) = (a.working_state().map_err(err)?, b.working_state().map_err(err)?);
    check(wa.head().is_some() && wa.head() == wb.head(), "heads differ")?;
    check(wa.dataset().canonical_bytes() == wb.dataset().canonical_bytes(), "datasets differ")?;
    let expected = base_expected(&base, &ca, &cb);
    check(wa.dataset() == &expected, "merged dataset lacks one side's edits")?;
    Ok(format!("both at {}, {} statements", &wa.head().unwrap().to_string()[..12], wa.dataset().quad_count()))
}

fn base_expected(base: &Dataset, ca: &rdfvc_core::delta::Change, cb: &rdfvc_core::delta::Change) -> AtomicPartition {
    atomic_partition(base)
        .difference(&ca.negative.union(&cb.negative))
        .union(&ca.positive)
        .union(&cb.positive)
}

fn performance() -> Verdict {
    let dir = tempfile::tempdir().map_err(err)?;
    let repo = Repository::init(dir.path().join("r")).map_err(err)?;
    let mut ws = repo.working_state().map_err(err)?;
    let base = gen_dataset(10_000, 10_000, 0.1);
    repo.commit(&mut ws, atomic_partition(&base), &sig(0), "base").map_err(err)?;

    let mut gen = QuadGen::new(10_001, 2_500);
    let started = Instant::now();
    for i in 0..1000u64 {
        let change = gen_change_on(&mut gen, ws.dataset(), 1, 1, &AtomicPartition::new()).map_err(err)?;
        let next = rdfvc_core::delta::apply(ws.dataset(), &change).map_err(err)?;
        repo.commit(&mut ws, next, &sig(i as i64 + 1), "tx").map_err(err)?;
    }
    let elapsed = started.elapsed();
    within(elapsed, Duration::from_secs(60))?;

    let objects = |repo: &Repository| repo.store().object_ids().map(|ids| ids.len()).map_err(err);
    let head = ws.head().unwrap();
    let before = objects(&repo)?;
    let change = gen_change(5000, &ws.dataset().to_dataset(), 3, 3).map_err(err)?;
    let next = rdfvc_core::delta::apply(ws.dataset(), &change).map_err(err)?;
    let edited = repo.commit(&mut ws, next, &sig(2000), "edit").map_err(err)?;
    let after_edit = objects(&repo)?;
    let reverted = repo.revert(&mut ws, edited, &sig(2001)).map_err(err)?;
    let after_revert = objects(&repo)?;
    let same_blob = repo.read_commit(&reverted).map_err(err)?.snapshot == repo.read_commit(&head).map_err(err)?.snapshot;
    check(after_edit == before + 2, format!("edit added {} objects", after_edit - before))?;
    check(same_blob, "reverted state has a different snapshot blob")?;
    check(after_revert == after_edit + 1, format!("revert added {} objects, expected only the commit", after_revert - after_edit))?;
    Ok(format!(
        "1000 commits on 10000 statements in {elapsed:.1?}; revert to a stored state added 1 object (commit only)"
    ))
}

fn main() {
    let scratch = tempfile::tempdir().expect("scratch directory");
    let criteria: Vec<Criterion> = vec![
        ("merge verification (fuzz-merge -n 1000 --seed 42)", Box::new(fuzz_merge)),
        ("replay correctness (verify-replay)", Box::new(|| replay(scratch.path()))),
        ("delta calculus round trips", Box::new(delta_roundtrips)),
        ("atomic partition vs brute-force oracle", Box::new(oracle_agreement)),
        ("touch merge scenario", Box::new(touch_scenario)),
        ("revert fallback", Box::new(revert_fallback)),
        ("sync convergence", Box::new(sync_convergence)),
        ("commit throughput and snapshot dedup", Box::new(performance)),
    ];
    let only: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|n| n.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let started = Instant::now();
        let verdict = run();
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {n} PASS {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
