//! Acceptance suite. Each criterion runs under a time limit and prints a
//! PASS or FAIL line; the process exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use chrono::{DateTime, TimeZone, Utc};
use proptest::prelude::*;
use proptest::sample::Index;
use proptest::test_runner::{Config as PropConfig, TestCaseError, TestRunner};
use serde_json::{json, Value};

use curio_core::annotation::{
    self, export_annotations, import_annotations, list_annotations, parse_export, store_annotation, submit_annotation,
    Annotation, AnnotationBody, AnnotationFilter, BodyInput, BodyKind, ExportFormat, NewAnnotation, Rect, RegionInput,
    Status, CSV_HEADER,
};
use curio_core::assignment::{self, TaskCandidate};
use curio_core::quality::{self, majority_vote, Policy, ReviewDecision, Verdict, VoteOutcome};
use curio_core::store::snapshot_text;
use curio_core::users::{self, Registration};
use curio_core::{collection, domain, search, vocabulary, Dataset, Iri, Store, Triple};

// ---------------------------------------------------------------- helpers

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(rel: &str) -> Vec<u8> {
    let path = fixtures().join(rel);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

fn ioc(slug: &str) -> Iri {
    iri(&format!("http://example.org/ioc/{slug}"))
}

fn bird_object(n: usize) -> Iri {
    iri(&format!("http://example.org/object/bird-{n:02}"))
}

fn at(secs: i64) -> DateTime<Utc> {
    Utc.timestamp_opt(secs, 0).unwrap()
}

fn event_start() -> i64 {
    Utc.with_ymd_and_hms(2015, 6, 13, 9, 0, 0).unwrap().timestamp()
}

fn bird_base() -> Dataset {
    let mut ds = Dataset::new();
    vocabulary::load_scheme(&mut ds, &fixture("bird/mini-ioc.ttl"), &iri("http://example.org/ioc")).unwrap();
    vocabulary::load_scheme(&mut ds, &fixture("mini-iconclass.ttl"), &iri("http://example.org/iconclass")).unwrap();
    domain::load_domains(&mut ds, &fixture("bird/domain.json")).unwrap();
    let report = collection::ingest_objects(&mut ds, &fixture("bird/collection.jsonl")).unwrap();
    collection::bind_to_domain(&mut ds, "bird", &report.source_collections).unwrap();
    ds
}

fn add_fashion(ds: &mut Dataset) {
    vocabulary::load_scheme(ds, &fixture("fashion/mini-fashion.ttl"), &iri("http://example.org/fashion")).unwrap();
    domain::load_domains(ds, &fixture("fashion/domain.json")).unwrap();
    for (file, domain_id) in [("fashion/jewelry.jsonl", "jewelry"), ("fashion/lace.jsonl", "lace")] {
        let report = collection::ingest_objects(ds, &fixture(file)).unwrap();
        collection::bind_to_domain(ds, domain_id, &report.source_collections).unwrap();
    }
}

fn jsonl_ids(rel: &str) -> BTreeSet<Iri> {
    String::from_utf8(fixture(rel))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| iri(serde_json::from_str::<Value>(l).unwrap()["id"].as_str().unwrap()))
        .collect()
}

fn text_annotation(ds: &mut Dataset, user: &str, object: &Iri, text: &str, secs: i64) -> Annotation {
    let req = NewAnnotation {
        user: user.into(),
        object: object.clone(),
        field: "iconography".into(),
        body: BodyInput::Text { text: text.into() },
        region: None,
    };
    submit_annotation(ds, req, at(secs)).unwrap()
}

fn concept_annotation(ds: &mut Dataset, user: &str, object: &Iri, concept: &Iri, secs: i64) -> Annotation {
    let req = NewAnnotation {
        user: user.into(),
        object: object.clone(),
        field: "scientific_name".into(),
        body: BodyInput::Concept {
            concept: concept.clone(),
            entered_text: String::new(),
        },
        region: Some(RegionInput {
            image: None,
            rect: Rect { x: 10, y: 10, w: 100, h: 100 },
        }),
    };
    submit_annotation(ds, req, at(secs)).unwrap()
}

fn save(ds: &Dataset, path: &Path) {
    Store::from_dataset(ds.clone()).snapshot(path).unwrap();
}

struct CliOutput {
    code: i32,
    stdout: String,
    stderr: String,
}

fn curio(store: &Path, args: &[&str]) -> CliOutput {
    let out = Command::new(env!("CARGO_BIN_EXE_curio"))
        .arg("--store")
        .arg(store)
        .args(args)
        .env_remove("CURIO_STORE")
        .output()
        .expect("run curio");
    CliOutput {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn curio_ok(store: &Path, args: &[&str]) -> String {
    let out = curio(store, args);
    assert_eq!(out.code, 0, "curio {args:?} failed: {}", out.stderr);
    out.stdout
}

fn quads(ds: &Dataset) -> BTreeSet<(Iri, Triple)> {
    ds.quads().map(|(g, t)| (g.clone(), t)).collect()
}

fn run_props<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) {
    let config = PropConfig {
        cases,
        failure_persistence: None,
        ..PropConfig::default()
    };
    let mut runner = TestRunner::new_with_rng(config, proptest::test_runner::TestRng::deterministic_rng(Default::default()));
    if let Err(e) = runner.run(&strategy, test) {
        panic!("{e}");
    }
}

// ------------------------------------------------------ annotation fixtures

const SPECIES: [(&str, &str, &str, &str); 5] = [
    // gold concept, its parent, a two-step ancestor, an unrelated species
    ("bubo-bubo", "bubo", "strigidae", "bubo-scandiacus"),
    ("bubo-scandiacus", "bubo", "strigidae", "strix-aluco"),
    ("strix-aluco", "strix", "strigidae", "athene-noctua"),
    ("athene-noctua", "athene", "strigidae", "tyto-alba"),
    ("tyto-alba", "tyto", "tytonidae", "bubo-bubo"),
];

const GOLD_TOTAL: usize = 427;
const GOLD_EXACT: usize = 344;
const GOLD_GENERALIZED: usize = 11;

/// 427 annotations on 427 generated prints: 344 name the gold species,
/// 11 its genus, the rest an ancestor two steps up or another species.
fn gold_fixture() -> (Dataset, String, usize) {
    let mut ds = bird_base();
    let mut jsonl = String::new();
    for i in 0..GOLD_TOTAL {
        jsonl.push_str(&format!(
            "{{\"id\":\"http://example.org/object/gold-{i:03}\",\"title\":{{\"en\":\"Study sheet {i}\"}},\"image\":\"images/gold-{i:03}.jpg\",\"image_width\":600,\"image_height\":600,\"source_collection\":\"http://example.org/collection/gold-study\"}}\n"
        ));
    }
    let report = collection::ingest_objects(&mut ds, jsonl.as_bytes()).unwrap();
    assert_eq!(report.ingested, GOLD_TOTAL);
    collection::bind_to_domain(&mut ds, "bird", &report.source_collections).unwrap();

    let mut gold = String::from("object_id,field,concept_iri\n");
    let mut two_step = 0;
    for i in 0..GOLD_TOTAL {
        let object = iri(&format!("http://example.org/object/gold-{i:03}"));
        let (species, parent, grand, other) = SPECIES[i % SPECIES.len()];
        gold.push_str(&format!("{},scientific_name,{}\n", object.as_str(), ioc(species).as_str()));
        // Interleave the kinds instead of grouping them.
        let rank = (i * 100) % GOLD_TOTAL;
        let concept = if rank < GOLD_EXACT {
            species
        } else if rank < GOLD_EXACT + GOLD_GENERALIZED {
            parent
        } else if rank.is_multiple_of(2) {
            two_step += 1;
            grand
        } else {
            other
        };
        concept_annotation(&mut ds, &format!("expert-{:02}", i % 23), &object, &ioc(concept), event_start() + i as i64);
    }
    (ds, gold, two_step)
}

const EVENT_TOTAL: usize = 835;
const ONLINE_TOTAL: usize = 307;
const EVENT_PEOPLE: usize = 14;

/// 835 annotations inside the event window by 14 people and 307 outside
/// it by 25 people, five of whom also took part in the event.
fn stats_fixture() -> Dataset {
    let mut ds = bird_base();
    let mut k = 0usize;
    for p in 0..EVENT_PEOPLE {
        let n = EVENT_TOTAL / EVENT_PEOPLE + usize::from(p < EVENT_TOTAL % EVENT_PEOPLE);
        for _ in 0..n {
            let text = if k.is_multiple_of(97) { "vigilance, \"wisdom\"\nand night" } else { "wisdom" };
            text_annotation(&mut ds, &format!("visitor-{p:02}"), &bird_object(k % 12 + 1), text, event_start() + 60 + k as i64);
            k += 1;
        }
    }
    let online_start = Utc.with_ymd_and_hms(2015, 6, 20, 12, 0, 0).unwrap().timestamp();
    let online_people: Vec<String> = (0..20)
        .map(|p| format!("remote-{p:02}"))
        .chain((0..5).map(|p| format!("visitor-{p:02}")))
        .collect();
    for (p, person) in online_people.iter().enumerate() {
        let n = ONLINE_TOTAL / online_people.len() + usize::from(p < ONLINE_TOTAL % online_people.len());
        for _ in 0..n {
            text_annotation(&mut ds, person, &bird_object(k % 12 + 1), "omen", online_start + k as i64);
            k += 1;
        }
    }
    ds
}

/// Forty fashion annotations, each judged by three curators. Majority
/// decides 37 of them (31 correct); three end without a strict winner.
fn vote_fixture() -> (Dataset, usize, usize) {
    use Verdict::{Correct as C, Incorrect as I, Unable as U};
    let correct: [[Verdict; 3]; 5] = [[C, C, I], [C, C, C], [C, U, C], [U, C, C], [U, U, C]];
    let incorrect: [[Verdict; 3]; 3] = [[I, I, C], [U, I, U], [I, I, I]];
    let tied: [[Verdict; 3]; 3] = [[C, I, U], [I, U, C], [U, U, U]];
    let mut ds = Dataset::new();
    add_fashion(&mut ds);
    let objects: Vec<Iri> = jsonl_ids("fashion/jewelry.jsonl").into_iter().chain(jsonl_ids("fashion/lace.jsonl")).collect();
    let start = Utc.with_ymd_and_hms(2016, 3, 12, 10, 0, 0).unwrap().timestamp();
    let (mut accepted, mut rejected) = (0, 0);
    for i in 0..40 {
        let req = NewAnnotation {
            user: format!("visitor-{:02}", i % 9),
            object: objects[i % objects.len()].clone(),
            field: "detail".into(),
            body: BodyInput::Text { text: format!("detail {i}") },
            region: Some(RegionInput {
                image: None,
                rect: Rect { x: 5, y: 5, w: 50, h: 50 },
            }),
        };
        let a = submit_annotation(&mut ds, req, at(start + i as i64)).unwrap();
        // Spread the outcomes through the sample.
        let votes = match i {
            _ if i % 13 == 12 => tied[i / 13],
            _ if i % 6 == 5 => {
                rejected += 1;
                incorrect[i % 3]
            }
            _ => {
                accepted += 1;
                correct[i % 5]
            }
        };
        for (r, v) in votes.iter().enumerate() {
            quality::review(&mut ds, &a.id, &format!("curator-{r}"), *v, at(start + 40_000 + (i * 10 + r) as i64)).unwrap();
        }
    }
    (ds, accepted, rejected)
}

// ---------------------------------------------------------------- criteria

/// Times only the `evaluate-gold` run; fixture construction is excluded.
fn gold_arithmetic() -> Option<Duration> {
    let dir = tempfile::tempdir().unwrap();
    let (ds, gold, two_step) = gold_fixture();
    let store = dir.path().join("store.nq");
    let gold_path = dir.path().join("gold.csv");
    save(&ds, &store);
    std::fs::write(&gold_path, gold).unwrap();

    let started = Instant::now();
    let out = curio_ok(&store, &["evaluate-gold", "--gold", gold_path.to_str().unwrap(), "--any-ancestor", "--format", "json"]);
    let elapsed = started.elapsed();
    let report: Value = serde_json::from_str(&out).unwrap();
    let s = &report["summary"];
    assert_eq!(s["total"], GOLD_TOTAL);
    assert_eq!(s["exact"], GOLD_EXACT);
    assert_eq!(s["generalized"], GOLD_GENERALIZED);
    assert_eq!(s["exact_percent"], 80, "{s}");
    assert_eq!(s["generalized_percent"], 3, "{s}");
    assert_eq!(s["any_ancestor"], GOLD_GENERALIZED + two_step);

    // Same figures when the gold standard is stored first.
    curio_ok(&store, &["load-gold", "--file", gold_path.to_str().unwrap()]);
    let table = curio_ok(&store, &["evaluate-gold"]);
    assert!(table.contains("(80%)") && table.contains("(3%)"), "{table}");
    Some(elapsed)
}

fn event_online_split() -> Option<Duration> {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.nq");
    save(&stats_fixture(), &store);
    let started = Instant::now();
    let out = curio_ok(&store, &["stats", "--domain", "bird", "--format", "json"]);
    let elapsed = started.elapsed();
    let stats: Value = serde_json::from_str(&out).unwrap();
    assert_eq!((stats["event"].as_u64(), stats["online"].as_u64()), (Some(835), Some(307)));
    assert_eq!(stats["event_contributors"], EVENT_PEOPLE);
    assert_eq!(stats["event_average"], 59.6);
    assert_eq!(stats["online_contributors"], 25);
    let table = curio_ok(&store, &["stats", "--domain", "bird"]);
    assert!(table.contains("59.6"), "{table}");
    Some(elapsed)
}

fn vote_oracle(votes: &[Verdict]) -> VoteOutcome<Verdict> {
    let all = [Verdict::Correct, Verdict::Incorrect, Verdict::Unable];
    let counts: Vec<usize> = all.iter().map(|v| votes.iter().filter(|x| *x == v).count()).collect();
    let top = counts.iter().copied().max().unwrap();
    let leaders: Vec<Verdict> = all.iter().zip(&counts).filter(|(_, c)| **c == top && top > 0).map(|(v, _)| *v).collect();
    if leaders.len() == 1 {
        VoteOutcome::Winner(leaders[0])
    } else {
        VoteOutcome::Inconclusive(leaders)
    }
}

fn majority_voting() -> Option<Duration> {
    let all = [Verdict::Correct, Verdict::Incorrect, Verdict::Unable];
    let anno = iri("urn:curio:annotation:enumeration");
    for size in 0..=6u32 {
        let mut multisets = BTreeSet::new();
        for code in 0..3usize.pow(size) {
            let votes: Vec<Verdict> = (0..size).map(|d| all[code / 3usize.pow(d) % 3]).collect();
            let mut key = votes.clone();
            key.sort();
            multisets.insert(key);
            assert_eq!(majority_vote(&votes), vote_oracle(&votes), "{votes:?}");

            // Reviews: unable abstains, a strict winner decides.
            let decisions: Vec<ReviewDecision> = votes
                .iter()
                .enumerate()
                .map(|(r, v)| ReviewDecision {
                    annotation: anno.clone(),
                    reviewer: format!("r{r}"),
                    verdict: *v,
                    created_at: at(r as i64),
                })
                .collect();
            let c = votes.iter().filter(|v| **v == Verdict::Correct).count();
            let i = votes.iter().filter(|v| **v == Verdict::Incorrect).count();
            let expected = match c.cmp(&i) {
                std::cmp::Ordering::Greater => Some(Status::Accepted),
                std::cmp::Ordering::Less => Some(Status::Rejected),
                std::cmp::Ordering::Equal => None,
            };
            assert_eq!(quality::decide(&decisions, Policy::Majority), expected, "{votes:?}");
        }
        assert_eq!(multisets.len(), ((size + 1) * (size + 2) / 2) as usize);
    }

    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.nq");
    let (ds, accepted, rejected) = vote_fixture();
    save(&ds, &store);
    let out = curio_ok(&store, &["finalize-reviews", "--policy", "majority"]);
    assert_eq!(out.trim(), format!("accepted {accepted}, rejected {rejected}, undecided 3"));
    assert_eq!((accepted, rejected), (31, 6));
    assert_eq!(quality::round_half_up_percent(accepted, accepted + rejected), 84);
    let after = Store::open(&store).unwrap();
    let submitted = list_annotations(&after.read(), &AnnotationFilter {
        status: Some(Status::Submitted),
        ..Default::default()
    })
    .unwrap();
    assert_eq!(submitted.len(), 3);
    None
}

struct AssignmentWorld {
    base: Dataset,
    objects: Vec<Iri>,
    bird: BTreeSet<Iri>,
    subdomains: Vec<(String, BTreeSet<Iri>)>,
    fashion: BTreeSet<Iri>,
    concepts: Vec<Iri>,
    topics: Vec<Iri>,
}

fn assignment_world() -> AssignmentWorld {
    let mut base = bird_base();
    add_fashion(&mut base);
    for u in 0..6 {
        let reg = Registration {
            login: format!("u{u}"),
            display_name: format!("User {u}"),
            language: "en".into(),
            credential: "long enough".into(),
        };
        users::register(&mut base, reg, at(0)).unwrap();
    }
    let bird = jsonl_ids("bird/collection.jsonl");
    let jewelry = jsonl_ids("fashion/jewelry.jsonl");
    let lace = jsonl_ids("fashion/lace.jsonl");
    let all = domain::registry(&base).unwrap();
    let subdomains: Vec<(String, BTreeSet<Iri>)> = domain::descendants(&all, "fashion")
        .into_iter()
        .filter(|d| d != "fashion")
        .map(|d| {
            let objects = match d.as_str() {
                "jewelry" => jewelry.clone(),
                "lace" => lace.clone(),
                _ => BTreeSet::new(),
            };
            (d, objects)
        })
        .collect();
    assert!(subdomains.len() >= 2);
    let fashion: BTreeSet<Iri> = jewelry.union(&lace).cloned().collect();
    let concepts: Vec<Iri> = vocabulary::scheme_concepts(&base, &iri("http://example.org/ioc")).into_iter().collect();
    let topics: Vec<Iri> = vocabulary::branch_subset(&base, &iri("http://example.org/ioc"), &ioc("aves"))
        .unwrap()
        .members
        .into_iter()
        .collect();
    AssignmentWorld {
        objects: bird.iter().chain(fashion.iter()).cloned().collect(),
        base,
        bird,
        subdomains,
        fashion,
        concepts,
        topics,
    }
}

fn check_ranked(
    got: &[TaskCandidate],
    domain_objects: &BTreeSet<Iri>,
    done: &BTreeSet<Iri>,
    counts: &BTreeMap<Iri, usize>,
    n: usize,
) -> Result<(), TestCaseError> {
    let eligible: BTreeSet<&Iri> = domain_objects.iter().filter(|o| !done.contains(*o)).collect();
    let returned: BTreeSet<&Iri> = got.iter().map(|t| &t.object).collect();
    prop_assert_eq!(returned.len(), got.len(), "duplicate objects");
    prop_assert_eq!(got.len(), n.min(eligible.len()));
    for t in got {
        prop_assert!(eligible.contains(&t.object), "{} not eligible", t.object.as_str());
        prop_assert_eq!(t.annotator_count, counts.get(&t.object).copied().unwrap_or(0));
    }
    prop_assert!(got.windows(2).all(|w| w[0].annotator_count <= w[1].annotator_count));
    if let Some(last) = got.last() {
        for o in &eligible {
            if counts.get(*o).copied().unwrap_or(0) < last.annotator_count {
                prop_assert!(returned.contains(o), "skipped less-annotated {}", o.as_str());
            }
        }
    }
    Ok(())
}

fn assignment_invariants() -> Option<Duration> {
    let world = assignment_world();
    let strategy = (
        prop::collection::vec((0..6usize, any::<Index>(), 0..3u8, any::<Index>()), 0..40),
        0..6usize,
        1..10usize,
        any::<u64>(),
        prop::collection::vec((any::<Index>(), 1..=5u8), 0..4),
        any::<Index>(),
    );
    run_props(1000, strategy, |(annos, who, n, seed, levels, sub)| {
        let w = &world;
        let mut ds = w.base.clone();
        let mut annotators: BTreeMap<Iri, BTreeSet<usize>> = BTreeMap::new();
        for (k, (u, obj, status, concept)) in annos.iter().enumerate() {
            let object = obj.get(&w.objects).clone();
            annotators.entry(object.clone()).or_default().insert(*u);
            let body = if w.bird.contains(&object) {
                let c = concept.get(&w.concepts).clone();
                AnnotationBody {
                    kind: BodyKind::Concept,
                    entered_text: c.as_str().to_owned(),
                    concept: Some(c),
                    text: None,
                }
            } else {
                AnnotationBody {
                    kind: BodyKind::Text,
                    concept: None,
                    text: Some("silk".into()),
                    entered_text: "silk".into(),
                }
            };
            let a = Annotation {
                id: iri(&format!("urn:curio:annotation:p{k}")),
                object,
                region: None,
                field: "scientific_name".into(),
                body,
                user: format!("u{u}"),
                created_at: at(k as i64),
                status: [Status::Submitted, Status::Accepted, Status::Rejected][*status as usize],
            };
            store_annotation(&mut ds, &a).unwrap();
        }
        let user = format!("u{who}");
        let levels: BTreeMap<Iri, u8> = levels.iter().map(|(t, l)| (t.get(&w.topics).clone(), *l)).collect();
        if !levels.is_empty() {
            assignment::set_expertise(&mut ds, &user, "bird", &levels).unwrap();
        }
        let counts: BTreeMap<Iri, usize> = annotators.iter().map(|(o, us)| (o.clone(), us.len())).collect();
        let done: BTreeSet<Iri> = annotators
            .iter()
            .filter(|(_, us)| us.contains(&who))
            .map(|(o, _)| o.clone())
            .collect();

        let ranked = assignment::assign_ranked(&ds, &user, "bird", n, seed).unwrap();
        check_ranked(&ranked, &w.bird, &done, &counts, n)?;
        prop_assert_eq!(&ranked, &assignment::assign_ranked(&ds, &user, "bird", n, seed).unwrap());

        let (chosen, chosen_objects) = sub.get(&w.subdomains);
        let picked = assignment::assign_subdomain(&ds, &user, "fashion", chosen, n, seed).unwrap();
        check_ranked(&picked, chosen_objects, &done, &counts, n)?;
        prop_assert!(picked.iter().all(|t| w.fashion.contains(&t.object)));
        prop_assert_eq!(&picked, &assignment::assign_subdomain(&ds, &user, "fashion", chosen, n, seed).unwrap());

        let recommended = assignment::assign_recommend(&ds, &user, "bird", n, seed).unwrap();
        prop_assert!(recommended.len() <= n);
        for t in &recommended {
            prop_assert!(w.bird.contains(&t.object) && !done.contains(&t.object));
        }
        if levels.is_empty() {
            check_ranked(&recommended, &w.bird, &done, &counts, n)?;
        } else {
            prop_assert!(recommended.windows(2).all(|p| p[0].score >= p[1].score));
        }
        prop_assert_eq!(&recommended, &assignment::assign_recommend(&ds, &user, "bird", n, seed).unwrap());
        Ok(())
    });
    None
}

fn vocabulary_oracles() -> Option<Duration> {
    let strategy = (1usize..=500).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(prop::collection::vec(any::<Index>(), 0..4), n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((any::<Index>(), any::<Index>()), 12),
        )
    });
    let scheme = iri("http://example.org/dag");
    run_props(200, strategy, |(n, picks, narrower_form, queries)| {
        let c = |i: usize| format!("<http://example.org/dag/c{i}>");
        let mut ttl = String::from(
            "@prefix skos: <http://www.w3.org/2004/02/skos/core#> .\n<http://example.org/dag> a skos:ConceptScheme .\n",
        );
        // Parents always have a smaller index, so the graph is acyclic.
        let mut parents: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for i in 0..n {
            ttl.push_str(&format!("{} a skos:Concept ; skos:inScheme <http://example.org/dag> ; skos:prefLabel \"c{i}\"@en .\n", c(i)));
            if i == 0 {
                continue;
            }
            for p in &picks[i] {
                let j = p.index(i);
                parents[i].insert(j);
                if narrower_form[i] {
                    ttl.push_str(&format!("{} skos:narrower {} .\n", c(j), c(i)));
                } else {
                    ttl.push_str(&format!("{} skos:broader {} .\n", c(i), c(j)));
                }
            }
        }
        let mut ds = Dataset::new();
        vocabulary::load_scheme(&mut ds, ttl.as_bytes(), &scheme).unwrap();
        let concept = |i: usize| iri(&format!("http://example.org/dag/c{i}"));

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(i);
            }
        }
        for (a, b) in &queries {
            let (seed, target) = (a.index(n), b.index(n));

            let mut reach = BTreeSet::from([seed]);
            let mut queue = vec![seed];
            while let Some(x) = queue.pop() {
                for &ch in &children[x] {
                    if reach.insert(ch) {
                        queue.push(ch);
                    }
                }
            }
            let expected: BTreeSet<Iri> = reach.into_iter().map(concept).collect();
            let subset = vocabulary::branch_subset(&ds, &scheme, &concept(seed)).unwrap();
            prop_assert_eq!(&subset.members, &expected);

            // Shortest distance from every concept up to `target`, in index order.
            let mut dist: Vec<Option<usize>> = vec![None; n];
            dist[target] = Some(0);
            for k in target + 1..n {
                dist[k] = parents[k].iter().filter_map(|&p| dist[p]).min().map(|d| d + 1);
            }
            let got = vocabulary::generalization_steps(&ds, &scheme, &concept(seed), &concept(target)).unwrap();
            prop_assert_eq!(got, dist[seed], "from c{} to c{}", seed, target);
        }
        Ok(())
    });
    None
}

fn search_objects(ds: &Dataset, q: &str, lang: &str) -> BTreeSet<Iri> {
    search::search(ds, q, lang, None).unwrap().objects()
}

fn search_multilinguality() -> Option<Duration> {
    let mut bird = bird_base();
    concept_annotation(&mut bird, "ann", &bird_object(2), &ioc("strix-aluco"), event_start());
    concept_annotation(&mut bird, "ann", &bird_object(5), &ioc("tyto-alba"), event_start() + 1);
    let mut fashion = Dataset::new();
    add_fashion(&mut fashion);

    let mut checked = 0;
    for (ds, schemes) in [
        (&bird, vec!["http://example.org/ioc", "http://example.org/iconclass"]),
        (&fashion, vec!["http://example.org/fashion"]),
    ] {
        for scheme in schemes {
            for concept in vocabulary::scheme_concepts(ds, &iri(scheme)) {
                let labels = vocabulary::all_labels(ds, &concept);
                if labels.len() < 2 {
                    continue;
                }
                let mut results = labels
                    .iter()
                    .map(|l| (l.lexical().to_owned(), search_objects(ds, l.lexical(), l.language().unwrap_or("en"))));
                let (first_label, first) = results.next().unwrap();
                for (label, objects) in results {
                    assert_eq!(objects, first, "`{label}` vs `{first_label}` for {}", concept.as_str());
                }
                checked += 1;
            }
        }
    }
    assert!(checked >= 10, "only {checked} concepts with several labels");

    // Annotating with a narrower concept makes the broader label find the object.
    let heron = bird_object(3);
    for q in ["Eagle-owls", "Oehoes", "Bubo"] {
        assert!(!search_objects(&bird, q, "en").contains(&heron), "{q} before annotating");
    }
    concept_annotation(&mut bird, "ann", &heron, &ioc("bubo-bubo"), event_start() + 2);
    for q in ["Eagle-owls", "Oehoes", "Bubo"] {
        assert!(search_objects(&bird, q, "nl").contains(&heron), "{q} after annotating");
    }
    // Three narrower steps plus the annotation edge exceed the path limit.
    assert!(!search_objects(&bird, "Owls", "en").contains(&heron));
    None
}

fn round_trips() -> Option<Duration> {
    let dir = tempfile::tempdir().unwrap();
    let (gold, _, _) = gold_fixture();
    let (votes, _, _) = vote_fixture();
    let stats = stats_fixture();

    for (name, ds) in [("gold", &gold), ("votes", &votes), ("stats", &stats)] {
        let path = dir.path().join(format!("{name}.nq"));
        save(ds, &path);
        let restored = Store::open(&path).unwrap();
        assert_eq!(quads(&restored.read()), quads(ds), "{name} snapshot");
        assert_eq!(snapshot_text(&restored.read()), snapshot_text(ds));

        let all = list_annotations(ds, &AnnotationFilter::default()).unwrap();
        let nt = export_annotations(ds, &AnnotationFilter::default(), ExportFormat::NTriples, "en").unwrap();
        assert_eq!(parse_export(nt.as_bytes()).unwrap(), all, "{name} export");
        let mut fresh = ds.clone();
        fresh.remove_matching(&curio_core::store::annotation_graph(), None, None, None);
        assert!(list_annotations(&fresh, &AnnotationFilter::default()).unwrap().is_empty());
        assert_eq!(import_annotations(&mut fresh, nt.as_bytes()).unwrap(), all.len());
        assert_eq!(list_annotations(&fresh, &AnnotationFilter::default()).unwrap(), all, "{name} import");

        let csv_text = export_annotations(ds, &AnnotationFilter::default(), ExportFormat::Csv, "en").unwrap();
        let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(csv_text.as_bytes());
        let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
        assert_eq!(header.join(","), CSV_HEADER);
        let rows: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>().unwrap();
        assert_eq!(rows.len(), all.len());
        for (row, a) in rows.iter().zip(&all) {
            assert_eq!(&row[0], a.id.as_str());
            assert_eq!(&row[6], a.body.entered_text);
            assert_eq!(&row[13], a.status.as_str());
        }
    }
    None
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn end_to_end() -> Option<Duration> {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.nq");
    let fx = fixtures();
    let path = |rel: &str| fx.join(rel).to_str().unwrap().to_owned();
    curio_ok(&store, &["load-vocabulary", "--file", &path("bird/mini-ioc.ttl")]);
    curio_ok(&store, &["load-vocabulary", "--file", &path("mini-iconclass.ttl")]);
    curio_ok(&store, &["load-domain", "--file", &path("bird/domain.json")]);
    let loaded = curio_ok(&store, &["load-collection", "--file", &path("bird/collection.jsonl"), "--domain", "bird"]);
    assert!(loaded.contains("ingested 12 objects"), "{loaded}");

    let mut child = Command::new(env!("CARGO_BIN_EXE_curio"))
        .arg("--store")
        .arg(&store)
        .args(["serve", "--listen", "127.0.0.1:0", "--allow-seed"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let stdout = child.stdout.take().unwrap();
    let server = Server(child);
    let mut line = String::new();
    BufReader::new(stdout).read_line(&mut line).unwrap();
    let base = line.trim().strip_prefix("listening on ").unwrap_or_else(|| panic!("unexpected: {line}")).to_owned();

    let http = reqwest::blocking::Client::new();
    let url = |p: &str| format!("{base}{p}");
    let post = |p: &str, token: Option<&str>, body: Value| {
        let mut req = http.post(url(p)).json(&body);
        if let Some(t) = token {
            req = req.bearer_auth(t);
        }
        let resp = req.send().unwrap();
        let status = resp.status().as_u16();
        (status, resp.json::<Value>().unwrap_or(Value::Null))
    };
    let get = |p: &str, token: &str| http.get(url(p)).bearer_auth(token).send().unwrap();
    let session = |login: &str| {
        let (status, _) = post("/api/users/register", None, json!({ "login": login, "display_name": login, "credential": "s3cret-pass" }));
        assert_eq!(status, 201);
        let (status, body) = post("/api/login", None, json!({ "login": login, "credential": "s3cret-pass" }));
        assert_eq!(status, 200);
        body["token"].as_str().unwrap().to_owned()
    };

    let alice = session("alice");
    let (status, body) = post("/api/expertise", Some(&alice), json!({ "domain": "bird", "levels": { ioc("bubo").as_str(): 5 } }));
    assert_eq!(status, 200, "{body}");

    let tasks: Value = get("/api/tasks/next?domain=bird&mode=recommendation&n=3&seed=42", &alice).json().unwrap();
    assert_eq!(tasks["mode"], "recommendation");
    let owl = bird_object(4);
    assert_eq!(tasks["tasks"][0]["object"], owl.as_str(), "{tasks}");
    assert_eq!(tasks["tasks"][0]["score"], 1.25);

    let (status, created) = post(
        "/api/annotations",
        Some(&alice),
        json!({
            "object": owl.as_str(),
            "field": "scientific_name",
            "body": { "kind": "concept", "concept": ioc("bubo-bubo").as_str() },
            "region": { "x": 120, "y": 80, "w": 300, "h": 260 }
        }),
    );
    assert_eq!(status, 201, "{created}");
    let id = created["id"].as_str().unwrap().to_owned();
    assert_eq!(created["region"]["w"], 300);

    let found: Value = http.get(url("/api/search?q=Oehoe&lang=nl")).send().unwrap().json().unwrap();
    let hits: BTreeSet<&str> = found["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["objects"].as_array().unwrap())
        .map(|h| h["object"].as_str().unwrap())
        .collect();
    assert!(hits.contains(owl.as_str()), "{found}");

    let rita = session("rita");
    let (status, _) = post("/api/reviews", Some(&rita), json!({ "annotation": id, "verdict": "correct" }));
    assert_eq!(status, 201);
    let (status, report) = post("/api/reviews/finalize", Some(&rita), json!({ "policy": "single-reviewer" }));
    assert_eq!(status, 200);
    assert_eq!(report["accepted"], json!([id]));

    let resp = get("/api/export/annotations?format=csv", &alice);
    assert_eq!(resp.headers()["content-type"].to_str().unwrap().split(';').next(), Some("text/csv"));
    let csv_text = resp.text().unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>().unwrap();
    let row = rows.iter().find(|r| r[0] == id).expect("exported row");
    assert_eq!((&row[1], &row[4], &row[13]), (owl.as_str(), ioc("bubo-bubo").as_str(), "accepted"));
    drop(server);

    // The snapshot on disk carries the same state.
    let exported = curio_ok(&store, &["export", "--status", "accepted", "--format", "nt"]);
    let annotations = parse_export(exported.as_bytes()).unwrap();
    assert_eq!(annotations.len(), 1);
    assert_eq!(annotations[0].id.as_str(), id);
    assert_eq!(annotation::read_annotation(&Store::open(&store).unwrap().read(), &annotations[0].id).unwrap().status, Status::Accepted);
    None
}

// ---------------------------------------------------------------- runner

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else {
        "panic".to_owned()
    }
}

type Criterion = (&'static str, Duration, fn() -> Option<Duration>);

fn main() -> ExitCode {
    // A criterion returns the duration of its timed step, or None to be
    // timed as a whole.
    let criteria: [Criterion; 8] = [
        ("gold-standard arithmetic", Duration::from_secs(1), gold_arithmetic),
        ("event/online split and averages", Duration::from_secs(1), event_online_split),
        ("majority voting", Duration::from_secs(1), majority_voting),
        ("task-assignment invariants", Duration::from_secs(30), assignment_invariants),
        ("vocabulary oracle equivalence", Duration::from_secs(10), vocabulary_oracles),
        ("search multilinguality", Duration::from_secs(5), search_multilinguality),
        ("round-trips", Duration::from_secs(5), round_trips),
        ("end-to-end pipeline", Duration::from_secs(10), end_to_end),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, limit, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let mut elapsed = started.elapsed();
        let verdict = match outcome {
            Err(payload) => Err(panic_message(payload.as_ref())),
            Ok(timed) => {
                elapsed = timed.unwrap_or(elapsed);
                if elapsed > limit {
                    Err(format!("over the {limit:?} limit"))
                } else {
                    Ok(())
                }
            }
        };
        match verdict {
            Ok(()) => println!("PASS  {name:<34} {:>8.3} s  (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<34} {:>8.3} s  (limit {} s): {why}", elapsed.as_secs_f64(), limit.as_secs());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
