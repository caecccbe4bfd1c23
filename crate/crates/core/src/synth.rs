//! Seeded synthetic scenarios with planted cascades.
//!
//! Planted shares are laid out on a single increasing timeline, URL after
//! URL, at least two seconds apart. Every planted child `i` of parent `j`
//! gets an interaction `i -> j` one second before its first share, and the
//! user chosen for `i` has no earlier out-edge to anyone who already shared
//! that URL. The planted parent is therefore the only eligible candidate and
//! inference must recover it. Background chatter (heavy-tailed activity,
//! random replies and mentions, unrelated URLs) is stamped after the planted
//! window so it can never create an earlier eligible edge.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{normalize_url, write_events, ActionEvent, EventFormat, NormalizedUrl, TrollRegistry, UrlMode};

/// 2016-09-21T00:00:00Z
pub const DEFAULT_START_TS: i64 = 1_474_416_000;

/// How the planted cascades of each URL are shaped.
#[derive(Debug, Clone, PartialEq)]
pub enum CascadePlan {
    Random {
        trees_per_url: (usize, usize),
        tree_size: (usize, usize),
        singletons_per_url: usize,
        /// Probability that a share is followed by a repeat share from an
        /// earlier sharer of the same URL.
        repeat_prob: f64,
    },
    /// Per URL, per tree: a parent array with `parents[0] == None` and
    /// `parents[k] < k` otherwise.
    Explicit(Vec<Vec<Vec<Option<usize>>>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub seed: u64,
    pub n_trolls: usize,
    pub n_real: usize,
    /// Ignored by `CascadePlan::Explicit`, which fixes its own URL count.
    pub n_urls: usize,
    /// Tail exponent of per-user background activity; must exceed 1.
    pub activity_exponent: f64,
    /// Seconds from `start_ts` within which every event must fall.
    pub horizon: i64,
    pub start_ts: i64,
    pub background_events: usize,
    pub plan: CascadePlan,
    /// Slope of planted score against log-influence (negative plants an
    /// anti-correlation).
    pub score_slope: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            seed: 42,
            n_trolls: 20,
            n_real: 5_000,
            n_urls: 50,
            activity_exponent: 2.2,
            horizon: 47 * 24 * 3600,
            start_ts: DEFAULT_START_TS,
            background_events: 30_000,
            plan: CascadePlan::Random {
                trees_per_url: (1, 4),
                tree_size: (2, 40),
                singletons_per_url: 3,
                repeat_prob: 0.1,
            },
            score_slope: -0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlantedEdge {
    pub url: NormalizedUrl,
    pub parent: String,
    pub child: String,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub events: Vec<ActionEvent>,
    pub registry: TrollRegistry,
    pub ground_truth: Vec<PlantedEdge>,
    pub scores: Vec<(String, f64)>,
    pub planted_urls: Vec<NormalizedUrl>,
}

#[derive(Debug, Clone)]
pub struct ScenarioFiles {
    pub events: PathBuf,
    pub registry: PathBuf,
    pub ground_truth: PathBuf,
    pub scores: PathBuf,
}

impl Scenario {
    /// Planted parent maps keyed by URL: child id -> parent id.
    pub fn planted_parents(&self) -> BTreeMap<NormalizedUrl, BTreeMap<String, String>> {
        let mut out: BTreeMap<NormalizedUrl, BTreeMap<String, String>> =
            self.planted_urls.iter().map(|u| (u.clone(), BTreeMap::new())).collect();
        for e in &self.ground_truth {
            out.entry(e.url.clone()).or_default().insert(e.child.clone(), e.parent.clone());
        }
        out
    }

    /// Write `events.tsv`, `registry.txt`, `ground_truth.csv` and
    /// `scores.csv` into `dir`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<ScenarioFiles> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = ScenarioFiles {
            events: dir.join("events.tsv"),
            registry: dir.join("registry.txt"),
            ground_truth: dir.join("ground_truth.csv"),
            scores: dir.join("scores.csv"),
        };
        let create = |p: &Path| File::create(p).map(BufWriter::new).map_err(|e| Error::io(p, e));

        let mut w = create(&files.events)?;
        write_events(&self.events, EventFormat::Tsv, &mut w)?;
        w.flush()?;

        let mut w = create(&files.registry)?;
        writeln!(w, "# synthetic troll registry")?;
        for id in self.registry.iter() {
            writeln!(w, "{id}")?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_writer(create(&files.ground_truth)?);
        w.write_record(["url", "parent", "child"])?;
        for e in &self.ground_truth {
            w.write_record([e.url.as_str(), &e.parent, &e.child])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_writer(create(&files.scores)?);
        w.write_record(["user", "score"])?;
        for (u, s) in &self.scores {
            w.write_record([u.as_str(), &format!("{s:.6}")])?;
        }
        w.flush()?;
        Ok(files)
    }
}

fn validate(p: &ScenarioParams) -> Result<()> {
    if !(p.activity_exponent > 1.0) {
        return Err(Error::Config(format!("activity exponent must exceed 1, got {}", p.activity_exponent)));
    }
    if p.horizon <= 0 {
        return Err(Error::Config("horizon must be positive".into()));
    }
    if p.start_ts < 0 {
        return Err(Error::Config("start timestamp must be non-negative".into()));
    }
    if let CascadePlan::Random { trees_per_url, tree_size, repeat_prob, .. } = &p.plan {
        if trees_per_url.0 > trees_per_url.1 || tree_size.0 > tree_size.1 || tree_size.0 < 2 {
            return Err(Error::Config("random plan ranges must be ordered with tree size >= 2".into()));
        }
        if !(0.0..=1.0).contains(repeat_prob) {
            return Err(Error::Config("repeat probability must lie in [0, 1]".into()));
        }
    }
    if let CascadePlan::Explicit(urls) = &p.plan {
        for tree in urls.iter().flatten() {
            let ok = !tree.is_empty()
                && tree[0].is_none()
                && tree.iter().enumerate().skip(1).all(|(k, p)| p.is_some_and(|p| p < k));
            if !ok {
                return Err(Error::Config("explicit tree parent arrays must be rooted at 0 with parents before children".into()));
            }
        }
    }
    Ok(())
}

fn random_tree(rng: &mut ChaCha8Rng, size: usize) -> Vec<Option<usize>> {
    (0..size)
        .map(|k| match k {
            0 => None,
            _ => {
                let roll: f64 = rng.gen();
                Some(if roll < 0.3 {
                    0
                } else if roll < 0.5 {
                    k - 1
                } else {
                    rng.gen_range(0..k)
                })
            }
        })
        .collect()
}

struct Slot {
    tree: usize,
    local: usize,
}

/// Random interleaving that keeps each tree's node order.
fn interleave(rng: &mut ChaCha8Rng, trees: &[Vec<Option<usize>>]) -> Vec<Slot> {
    let mut next = vec![0usize; trees.len()];
    let mut remaining: usize = trees.iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(remaining);
    while remaining > 0 {
        let mut pick = rng.gen_range(0..remaining);
        let tree = (0..trees.len())
            .find(|&t| {
                let left = trees[t].len() - next[t];
                if pick < left {
                    true
                } else {
                    pick -= left;
                    false
                }
            })
            .unwrap();
        out.push(Slot { tree, local: next[tree] });
        next[tree] += 1;
        remaining -= 1;
    }
    out
}

struct Planter {
    rng: ChaCha8Rng,
    ids: Vec<String>,
    n_trolls: usize,
    /// planted out-neighbours per user
    out_adj: Vec<Vec<u32>>,
    /// `stamp[u] == url_index + 1` iff u already shared the current URL
    stamp: Vec<u32>,
}

impl Planter {
    fn eligible(&self, u: usize, url_stamp: u32) -> bool {
        self.stamp[u] != url_stamp && self.out_adj[u].iter().all(|&v| self.stamp[v as usize] != url_stamp)
    }

    /// A user from `[lo, hi)` that has not shared the URL and has no
    /// out-edge to anyone who has.
    fn pick(&mut self, lo: usize, hi: usize, url_stamp: u32) -> Option<usize> {
        if lo >= hi {
            return None;
        }
        for _ in 0..64 {
            let u = self.rng.gen_range(lo..hi);
            if self.eligible(u, url_stamp) {
                return Some(u);
            }
        }
        let start = self.rng.gen_range(lo..hi);
        (start..hi).chain(lo..start).find(|&u| self.eligible(u, url_stamp))
    }
}

struct Planted {
    ids: Vec<String>,
    registry: TrollRegistry,
    /// planted events in time order, ids not yet assigned
    events: Vec<ActionEvent>,
    ground_truth: Vec<PlantedEdge>,
    planted_urls: Vec<NormalizedUrl>,
    children: Vec<u64>,
    background_from: i64,
    end: i64,
}

fn plant(params: &ScenarioParams) -> Result<Planted> {
    validate(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_users = params.n_trolls + params.n_real;
    let mut ids: Vec<String> = (0..params.n_trolls).map(|i| format!("t{i:05}")).collect();
    ids.extend((0..params.n_real).map(|i| format!("u{i:07}")));
    let registry = TrollRegistry::new(ids[..params.n_trolls].iter().cloned());

    let url_plans: Vec<Vec<Vec<Option<usize>>>> = match &params.plan {
        CascadePlan::Explicit(urls) => urls.clone(),
        CascadePlan::Random { trees_per_url, tree_size, singletons_per_url, .. } => (0..params.n_urls)
            .map(|_| {
                let k = rng.gen_range(trees_per_url.0..=trees_per_url.1);
                let mut trees: Vec<_> = (0..k)
                    .map(|_| {
                        let size = rng.gen_range(tree_size.0..=tree_size.1);
                        random_tree(&mut rng, size)
                    })
                    .collect();
                trees.extend((0..*singletons_per_url).map(|_| vec![None]));
                trees
            })
            .collect(),
    };
    let repeat_prob = match params.plan {
        CascadePlan::Random { repeat_prob, .. } => repeat_prob,
        CascadePlan::Explicit(_) => 0.0,
    };

    let mut planter = Planter {
        rng: ChaCha8Rng::seed_from_u64(params.seed ^ 0x9e37_79b9_7f4a_7c15),
        ids,
        n_trolls: params.n_trolls,
        out_adj: vec![Vec::new(); n_users],
        stamp: vec![0; n_users],
    };

    // (ts, event) pairs; ids are assigned after the global sort
    let mut raw: Vec<(i64, ActionEvent)> = Vec::new();
    let mut ground_truth = Vec::new();
    let mut planted_urls = Vec::new();
    let mut children = vec![0u64; n_users];
    let mut t = params.start_ts;
    let end = params.start_ts + params.horizon;

    for (ui, trees) in url_plans.iter().enumerate() {
        let url_stamp = ui as u32 + 1;
        let url = normalize_url(&format!("https://campaign.example/item/{ui:05}"), UrlMode::Strict)?;
        planted_urls.push(url.clone());
        let total: usize = trees.iter().map(Vec::len).sum();
        if total > n_users {
            return Err(Error::Infeasible(format!(
                "URL {ui} plants {total} sharers but only {n_users} users exist"
            )));
        }
        let slots = interleave(&mut rng, trees);
        let troll_slot = (params.n_trolls > 0 && !slots.is_empty()).then(|| rng.gen_range(0..slots.len()));
        let mut assigned: Vec<Vec<usize>> = trees.iter().map(|t| vec![usize::MAX; t.len()]).collect();
        let mut sharers: Vec<usize> = Vec::with_capacity(total);

        for (si, slot) in slots.iter().enumerate() {
            t += 2 + rng.gen_range(0..3);
            let want_troll = Some(si) == troll_slot || (params.n_trolls > 0 && rng.gen_bool(0.02));
            let user = if want_troll {
                planter.pick(0, planter.n_trolls, url_stamp)
            } else {
                None
            }
            .or_else(|| planter.pick(planter.n_trolls, n_users, url_stamp))
            .or_else(|| planter.pick(0, planter.n_trolls, url_stamp))
            .ok_or_else(|| Error::Infeasible(format!("no eligible user left for URL {ui}")))?;
            assigned[slot.tree][slot.local] = user;

            if let Some(p) = trees[slot.tree][slot.local] {
                let parent = assigned[slot.tree][p];
                planter.out_adj[user].push(parent as u32);
                children[parent] += 1;
                let reply = rng.gen_bool(0.5);
                raw.push((
                    t - 1,
                    ActionEvent {
                        event_id: String::new(),
                        author: planter.ids[user].clone(),
                        ts: t - 1,
                        reply_to: reply.then(|| planter.ids[parent].clone()),
                        mentions: if reply { vec![] } else { vec![planter.ids[parent].clone()] },
                        urls: vec![],
                    },
                ));
                ground_truth.push(PlantedEdge {
                    url: url.clone(),
                    parent: planter.ids[parent].clone(),
                    child: planter.ids[user].clone(),
                });
            }
            planter.stamp[user] = url_stamp;
            sharers.push(user);
            raw.push((t, share_event(&planter.ids[user], t, &url)));

            if repeat_prob > 0.0 && rng.gen_bool(repeat_prob) {
                let again = sharers[rng.gen_range(0..sharers.len())];
                raw.push((t + 1, share_event(&planter.ids[again], t + 1, &url)));
            }
        }
        t += 2;
    }
    if t + 1 >= end {
        return Err(Error::Infeasible(format!(
            "planted schedule needs {} s but the horizon is {} s",
            t - params.start_ts,
            params.horizon
        )));
    }

    raw.sort_by_key(|(ts, _)| *ts);
    ground_truth.sort();
    Ok(Planted {
        ids: planter.ids,
        registry,
        events: raw.into_iter().map(|(_, e)| e).collect(),
        ground_truth,
        planted_urls,
        children,
        background_from: t + 1,
        end,
    })
}

fn planted_scores(params: &ScenarioParams, p: &Planted) -> Vec<(String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ SCORE_SALT);
    let max_children = p.children.iter().copied().max().unwrap_or(0).max(1) as f64;
    (params.n_trolls..p.ids.len())
        .map(|u| {
            let x = (1.0 + p.children[u] as f64).ln() / (1.0 + max_children).ln();
            let noise: f64 = rng.gen_range(-0.02..0.02);
            (p.ids[u].clone(), (0.5 + params.score_slope * x + noise).clamp(0.0, 1.0))
        })
        .collect()
}

const BACKGROUND_SALT: u64 = 0x5bd1_e995_2545_f491;
const SCORE_SALT: u64 = 0x2545_f491_4f6c_dd1d;

fn id_width(total: usize) -> usize {
    total.max(1).to_string().len().max(9)
}

pub fn generate(params: &ScenarioParams) -> Result<Scenario> {
    let planted = plant(params)?;
    let scores = planted_scores(params, &planted);
    let total = planted.events.len() + params.background_events;
    let width = id_width(total);
    let mut events = Vec::with_capacity(total);
    events.extend(planted.events.iter().cloned());
    events.extend(Background::new(params, &planted.ids, planted.background_from, planted.end));
    for (k, e) in events.iter_mut().enumerate() {
        e.event_id = format!("e{k:0width$}");
    }
    Ok(Scenario {
        events,
        registry: planted.registry,
        ground_truth: planted.ground_truth,
        scores,
        planted_urls: planted.planted_urls,
    })
}

/// Same files as `generate(params)?.write_to_dir(dir)`, but background
/// events are streamed to disk instead of being held in memory.
pub fn write_scenario(params: &ScenarioParams, dir: impl AsRef<Path>) -> Result<ScenarioFiles> {
    let planted = plant(params)?;
    let scores = planted_scores(params, &planted);
    let total = planted.events.len() + params.background_events;
    let width = id_width(total);
    let shell = Scenario {
        events: vec![],
        registry: planted.registry.clone(),
        ground_truth: planted.ground_truth.clone(),
        scores,
        planted_urls: planted.planted_urls.clone(),
    };
    let files = shell.write_to_dir(dir)?;
    let mut w = BufWriter::with_capacity(1 << 20, File::create(&files.events).map_err(|e| Error::io(&files.events, e))?);
    let mut batch = Vec::with_capacity(4096);
    let all = planted.events.iter().cloned().chain(Background::new(params, &planted.ids, planted.background_from, planted.end));
    for (k, mut e) in all.enumerate() {
        e.event_id = format!("e{k:0width$}");
        batch.push(e);
        if batch.len() == batch.capacity() {
            write_events(&batch, EventFormat::Tsv, &mut w)?;
            batch.clear();
        }
    }
    write_events(&batch, EventFormat::Tsv, &mut w)?;
    w.flush()?;
    Ok(files)
}

fn share_event(author: &str, ts: i64, url: &NormalizedUrl) -> ActionEvent {
    ActionEvent {
        event_id: String::new(),
        author: author.to_string(),
        ts,
        reply_to: None,
        mentions: vec![],
        urls: vec![url.clone()],
    }
}

/// Heavy-tailed background chatter over `[from, to)`, in time order.
/// Authors are drawn with Pareto weights; targets follow a copying model
/// (half uniform, half a repeat of an earlier target), which gives
/// heavy-tailed in-degrees too.
struct Background<'a> {
    rng: ChaCha8Rng,
    ids: &'a [String],
    n_trolls: usize,
    authors: Option<WeightedIndex<f64>>,
    noise_urls: Vec<NormalizedUrl>,
    targets: Vec<u32>,
    k: usize,
    count: usize,
    from: i64,
    span: i64,
}

impl<'a> Background<'a> {
    fn new(params: &ScenarioParams, ids: &'a [String], from: i64, to: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ BACKGROUND_SALT);
        let tail = 1.0 / (params.activity_exponent - 1.0);
        let authors = (ids.len() >= 2).then(|| {
            let weights: Vec<f64> = (0..ids.len())
                .map(|_| rng.gen_range(f64::EPSILON..1.0f64).powf(-tail).min(1e9))
                .collect();
            WeightedIndex::new(&weights).expect("positive weights")
        });
        let noise_urls = (0..(params.n_urls.max(1) * 10))
            .map(|k| normalize_url(&format!("https://news.example/story/{k}"), UrlMode::Strict).unwrap())
            .collect();
        Background {
            rng,
            ids,
            n_trolls: params.n_trolls,
            count: if authors.is_some() { params.background_events } else { 0 },
            authors,
            noise_urls,
            targets: Vec::new(),
            k: 0,
            from,
            span: to - from,
        }
    }

    fn target(&mut self) -> usize {
        let v = if !self.targets.is_empty() && self.rng.gen_bool(0.5) {
            self.targets[self.rng.gen_range(0..self.targets.len())] as usize
        } else {
            self.rng.gen_range(0..self.ids.len())
        };
        self.targets.push(v as u32);
        v
    }
}

impl Iterator for Background<'_> {
    type Item = ActionEvent;

    fn next(&mut self) -> Option<ActionEvent> {
        if self.k >= self.count {
            return None;
        }
        let ts = self.from + (self.k as i128 * self.span as i128 / self.count as i128) as i64;
        self.k += 1;
        let a = self.authors.as_ref().unwrap().sample(&mut self.rng);
        let reply_to = if self.rng.gen_bool(0.4) {
            Some(self.target()).filter(|&v| v != a).map(|v| self.ids[v].clone())
        } else {
            None
        };
        let mut mentions: Vec<String> = Vec::new();
        for _ in 0..self.rng.gen_range(0..3) {
            let v = self.target();
            if v != a && !mentions.contains(&self.ids[v]) {
                mentions.push(self.ids[v].clone());
            }
        }
        let urls = if a >= self.n_trolls && self.rng.gen_bool(0.3) {
            let k = (self.rng.gen::<f64>().powi(3) * self.noise_urls.len() as f64) as usize;
            vec![self.noise_urls[k.min(self.noise_urls.len() - 1)].clone()]
        } else {
            vec![]
        };
        Some(ActionEvent { event_id: String::new(), author: self.ids[a].clone(), ts, reply_to, mentions, urls })
    }
}

/// The four-user fixture: interactions `B -> A @1`, `C -> B @2`, `D -> C @3`
/// and shares of one URL by D @4, A @5, B @6, C @7. A is the only troll.
pub fn worked_scenario() -> (Vec<ActionEvent>, TrollRegistry) {
    let url = normalize_url("https://example.com/story", UrlMode::Strict).unwrap();
    let ev = |id: &str, author: &str, ts, reply: Option<&str>, mention: Option<&str>, share: bool| ActionEvent {
        event_id: id.into(),
        author: author.into(),
        ts,
        reply_to: reply.map(Into::into),
        mentions: mention.into_iter().map(Into::into).collect(),
        urls: if share { vec![url.clone()] } else { vec![] },
    };
    let events = vec![
        ev("e1", "B", 1, Some("A"), None, false),
        ev("e2", "C", 2, None, Some("B"), false),
        ev("e3", "D", 3, Some("C"), None, false),
        ev("e4", "D", 4, None, None, true),
        ev("e5", "A", 5, None, None, true),
        ev("e6", "B", 6, None, None, true),
        ev("e7", "C", 7, None, None, true),
    ];
    (events, TrollRegistry::new(["A"]))
}

/// Map user ids to their planted influence (number of planted children).
pub fn planted_influence(s: &Scenario) -> HashMap<String, u64> {
    let mut m = HashMap::new();
    for e in &s.ground_truth {
        *m.entry(e.parent.clone()).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioParams {
        ScenarioParams { n_real: 400, n_trolls: 5, n_urls: 8, background_events: 2_000, ..Default::default() }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        generate(&small()).unwrap().write_to_dir(a.path()).unwrap();
        generate(&small()).unwrap().write_to_dir(b.path()).unwrap();
        for f in ["events.tsv", "registry.txt", "ground_truth.csv", "scores.csv"] {
            assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
        }
        let c = generate(&ScenarioParams { seed: 43, ..small() }).unwrap();
        assert_ne!(c.events, generate(&small()).unwrap().events);
    }

    #[test]
    fn streamed_files_match_in_memory_files() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        generate(&small()).unwrap().write_to_dir(a.path()).unwrap();
        write_scenario(&small(), b.path()).unwrap();
        for f in ["events.tsv", "registry.txt", "ground_truth.csv", "scores.csv"] {
            assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn background_follows_planted_window() {
        let p = small();
        let s = generate(&p).unwrap();
        let last_planted = s
            .events
            .iter()
            .filter(|e| e.urls.iter().any(|u| s.planted_urls.contains(u)))
            .map(|e| e.ts)
            .max()
            .unwrap();
        let background: Vec<_> = s.events.iter().filter(|e| e.urls.iter().any(|u| u.as_str().contains("news.example"))).collect();
        assert!(!background.is_empty());
        assert!(background.iter().all(|e| e.ts > last_planted && e.ts < p.start_ts + p.horizon));
    }

    #[test]
    fn no_trolls_means_empty_registry() {
        let s = generate(&ScenarioParams { n_trolls: 0, ..small() }).unwrap();
        assert!(s.registry.is_empty());
        assert!(s.ground_truth.iter().all(|e| e.parent.starts_with('u') && e.child.starts_with('u')));
    }

    #[test]
    fn every_planted_url_has_a_troll_sharer() {
        let s = generate(&small()).unwrap();
        for url in &s.planted_urls {
            assert!(s.events.iter().any(|e| e.urls.contains(url) && s.registry.contains(&e.author)));
        }
    }

    #[test]
    fn infeasible_and_invalid_params() {
        let big = ScenarioParams {
            n_real: 10,
            n_trolls: 0,
            plan: CascadePlan::Explicit(vec![vec![(0..50usize).map(|k| k.checked_sub(1)).collect()]]),
            ..small()
        };
        assert!(matches!(generate(&big), Err(Error::Infeasible(_))));
        assert!(matches!(generate(&ScenarioParams { activity_exponent: 1.0, ..small() }), Err(Error::Config(_))));
        assert!(matches!(generate(&ScenarioParams { horizon: 10, ..small() }), Err(Error::Infeasible(_))));
    }

    #[test]
    fn events_are_valid_records() {
        let s = generate(&small()).unwrap();
        let mut ids: Vec<&str> = s.events.iter().map(|e| e.event_id.as_str()).collect();
        ids.dedup();
        assert_eq!(ids.len(), s.events.len());
        for e in &s.events {
            assert!(e.ts >= 0);
            assert_ne!(e.reply_to.as_deref(), Some(e.author.as_str()));
            assert!(!e.mentions.contains(&e.author));
        }
        assert!(s.events.windows(2).all(|w| w[0].ts <= w[1].ts));
    }
}
