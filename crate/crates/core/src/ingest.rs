//! Event-log and troll-registry ingestion.
//!
//! Two line-oriented event formats are accepted:
//!
//! * tab-separated, six fields in fixed order:
//!   `event_id  author  ts  reply_to  mentions  urls`, where `reply_to` may be
//!   empty and `mentions` / `urls` are comma-joined (possibly empty);
//! * one JSON object per line carrying the same field names.
//!
//! Malformed lines are skipped and reported with their 1-based line number.
//! Only I/O failures are fatal.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A URL in canonical form: trimmed, lowercase scheme and host, no fragment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormalizedUrl(String);

impl NormalizedUrl {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for NormalizedUrl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NormalizedUrl {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UrlMode {
    /// Keep malformed URLs as their trimmed raw string.
    #[default]
    Lenient,
    /// Reject malformed URLs (and, during parsing, the line carrying them).
    Strict,
}

/// Canonicalize a raw URL string.
///
/// Lowercases the scheme and host, strips the fragment and surrounding
/// whitespace. Path, query and userinfo are kept byte-for-byte. The result is
/// a fixed point: normalizing it again returns the same string.
pub fn normalize_url(raw: &str, mode: UrlMode) -> Result<NormalizedUrl> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(Error::InvalidUrl(raw.to_string()));
    }
    match canonicalize(trimmed) {
        Some(url) => Ok(NormalizedUrl(url)),
        None => match mode {
            UrlMode::Lenient => Ok(NormalizedUrl(trimmed.to_string())),
            UrlMode::Strict => Err(Error::InvalidUrl(raw.to_string())),
        },
    }
}

fn canonicalize(s: &str) -> Option<String> {
    if s.chars().any(char::is_whitespace) {
        return None;
    }
    let (scheme, rest) = s.split_once("://")?;
    let mut sc = scheme.chars();
    if !sc.next()?.is_ascii_alphabetic()
        || !sc.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
    {
        return None;
    }
    let authority_end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let (authority, tail) = rest.split_at(authority_end);
    let host_start = authority.rfind('@').map_or(0, |i| i + 1);
    let (userinfo, host) = authority.split_at(host_start);
    if host.is_empty() {
        return None;
    }
    let tail = tail.split('#').next().unwrap_or("");

    let mut out = String::with_capacity(s.len());
    out.push_str(&scheme.to_ascii_lowercase());
    out.push_str("://");
    out.push_str(userinfo);
    out.push_str(&host.to_ascii_lowercase());
    out.push_str(tail);
    Some(out)
}

/// One timestamped social action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionEvent {
    pub event_id: String,
    pub author: String,
    /// Epoch seconds, UTC.
    pub ts: i64,
    pub reply_to: Option<String>,
    pub mentions: Vec<String>,
    pub urls: Vec<NormalizedUrl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EventFormat {
    #[default]
    Tsv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub format: EventFormat,
    pub url_mode: UrlMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based line number in the source.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub events: Vec<ActionEvent>,
    pub errors: Vec<LineError>,
    /// Valid records that needed repair: self-replies dropped, duplicate or
    /// self mentions removed, duplicate URLs within one event collapsed.
    pub repaired: usize,
}

const CHUNK_LINES: usize = 1 << 16;

/// Incremental parser yielding validated events in chunks of up to 65,536
/// lines, so callers can fold a large log without holding every record.
/// Duplicate event ids are detected across the whole stream.
pub struct EventStream<R> {
    lines: std::io::Lines<R>,
    opts: ParseOptions,
    line_no: usize,
    seen: HashSet<Box<str>>,
    errors: Vec<LineError>,
    repaired: usize,
}

impl<R: BufRead> EventStream<R> {
    pub fn new(reader: R, opts: ParseOptions) -> Self {
        EventStream { lines: reader.lines(), opts, line_no: 0, seen: HashSet::new(), errors: Vec::new(), repaired: 0 }
    }

    /// The next batch of valid events in source order; `None` at end of input.
    pub fn next_chunk(&mut self) -> Result<Option<Vec<ActionEvent>>> {
        loop {
            let mut chunk = Vec::with_capacity(CHUNK_LINES);
            for line in self.lines.by_ref().take(CHUNK_LINES) {
                self.line_no += 1;
                chunk.push((self.line_no, line?));
            }
            if chunk.is_empty() {
                return Ok(None);
            }
            let opts = self.opts;
            let parsed: Vec<_> = chunk
                .par_iter()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(n, l)| (*n, parse_line(l, opts)))
                .collect();
            drop(chunk);
            let mut events = Vec::with_capacity(parsed.len());
            for (line, outcome) in parsed {
                match outcome {
                    Ok((event, repaired)) => {
                        if !self.seen.insert(event.event_id.as_str().into()) {
                            let message = format!("duplicate event_id {:?}", event.event_id);
                            log::warn!("skipped line {line}: {message}");
                            self.errors.push(LineError { line, message });
                            continue;
                        }
                        self.repaired += repaired as usize;
                        events.push(event);
                    }
                    Err(message) => {
                        log::warn!("skipped line {line}: {message}");
                        self.errors.push(LineError { line, message });
                    }
                }
            }
            if !events.is_empty() {
                return Ok(Some(events));
            }
        }
    }

    pub fn errors(&self) -> &[LineError] {
        &self.errors
    }

    pub fn repaired(&self) -> usize {
        self.repaired
    }
}

pub fn open_event_stream(path: impl AsRef<Path>, opts: ParseOptions) -> Result<EventStream<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(EventStream::new(BufReader::with_capacity(1 << 20, file), opts))
}

/// Parse a line-delimited event stream. Valid events are returned in source
/// order; malformed lines and duplicate event ids are counted in `errors`.
pub fn parse_event_stream<R: BufRead>(reader: R, opts: ParseOptions) -> Result<ParseReport> {
    let mut stream = EventStream::new(reader, opts);
    let mut events = Vec::new();
    while let Some(chunk) = stream.next_chunk()? {
        events.extend(chunk);
    }
    Ok(ParseReport { events, errors: stream.errors, repaired: stream.repaired })
}

pub fn parse_events_file(path: impl AsRef<Path>, opts: ParseOptions) -> Result<ParseReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_event_stream(BufReader::with_capacity(1 << 20, file), opts)
}

#[derive(Deserialize, Serialize)]
struct JsonEvent {
    event_id: String,
    author: String,
    ts: i64,
    #[serde(default)]
    reply_to: Option<String>,
    #[serde(default)]
    mentions: Vec<String>,
    #[serde(default)]
    urls: Vec<String>,
}

fn parse_line(line: &str, opts: ParseOptions) -> std::result::Result<(ActionEvent, bool), String> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let raw = match opts.format {
        EventFormat::Tsv => {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 6 {
                return Err(format!("expected 6 tab-separated fields, found {}", fields.len()));
            }
            let ts = fields[2]
                .trim()
                .parse::<i64>()
                .map_err(|_| format!("timestamp {:?} is not an integer", fields[2]))?;
            JsonEvent {
                event_id: fields[0].to_string(),
                author: fields[1].to_string(),
                ts,
                reply_to: Some(fields[3].to_string()),
                mentions: split_list(fields[4]),
                urls: split_list(fields[5]),
            }
        }
        EventFormat::Jsonl => serde_json::from_str(line).map_err(|e| format!("bad record: {e}"))?,
    };
    validate(raw, opts.url_mode)
}

fn split_list(field: &str) -> Vec<String> {
    field
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn validate(raw: JsonEvent, url_mode: UrlMode) -> std::result::Result<(ActionEvent, bool), String> {
    let event_id = raw.event_id.trim().to_string();
    let author = raw.author.trim().to_string();
    if event_id.is_empty() {
        return Err("empty event_id".into());
    }
    if author.is_empty() {
        return Err("empty author".into());
    }
    if raw.ts < 0 {
        return Err(format!("negative timestamp {}", raw.ts));
    }
    let mut repaired = false;
    let reply_to = match raw.reply_to.map(|r| r.trim().to_string()) {
        Some(r) if r.is_empty() => None,
        Some(r) if r == author => {
            repaired = true;
            None
        }
        other => other,
    };

    let mut mentions = Vec::with_capacity(raw.mentions.len());
    for m in raw.mentions {
        let m = m.trim();
        if m.is_empty() {
            continue;
        }
        if m == author || mentions.iter().any(|x: &String| x == m) {
            repaired = true;
            continue;
        }
        mentions.push(m.to_string());
    }

    let mut urls: Vec<NormalizedUrl> = Vec::with_capacity(raw.urls.len());
    for u in raw.urls {
        if u.trim().is_empty() {
            continue;
        }
        let url = normalize_url(&u, url_mode).map_err(|e| e.to_string())?;
        if urls.contains(&url) {
            repaired = true;
        } else {
            urls.push(url);
        }
    }

    Ok((ActionEvent { event_id, author, ts: raw.ts, reply_to, mentions, urls }, repaired))
}

/// Serialize events in the given input format; parsing the output yields the
/// same records.
pub fn write_events<W: Write>(events: &[ActionEvent], format: EventFormat, mut out: W) -> Result<()> {
    for e in events {
        match format {
            EventFormat::Tsv => {
                let urls: Vec<&str> = e.urls.iter().map(NormalizedUrl::as_str).collect();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    e.event_id,
                    e.author,
                    e.ts,
                    e.reply_to.as_deref().unwrap_or(""),
                    e.mentions.join(","),
                    urls.join(",")
                )?;
            }
            EventFormat::Jsonl => {
                let rec = JsonEvent {
                    event_id: e.event_id.clone(),
                    author: e.author.clone(),
                    ts: e.ts,
                    reply_to: e.reply_to.clone(),
                    mentions: e.mentions.clone(),
                    urls: e.urls.iter().map(|u| u.0.clone()).collect(),
                };
                serde_json::to_writer(&mut out, &rec).map_err(|e| Error::Data(e.to_string()))?;
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

/// Ground-truth set of flagged (troll) account ids. Membership is exact
/// string equality.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrollRegistry {
    ids: BTreeSet<String>,
}

impl TrollRegistry {
    pub fn new<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TrollRegistry { ids: ids.into_iter().map(Into::into).collect() }
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Ids in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().map(String::as_str)
    }
}

/// Read a registry: one id per line, blank lines and `#` comments ignored.
/// An empty registry is allowed and only logged.
pub fn load_troll_registry<R: BufRead>(reader: R) -> Result<TrollRegistry> {
    let mut ids = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        let id = line.trim();
        if id.is_empty() || id.starts_with('#') {
            continue;
        }
        ids.insert(id.to_string());
    }
    if ids.is_empty() {
        log::warn!("troll registry is empty; every user will be treated as real");
    }
    Ok(TrollRegistry { ids })
}

pub fn load_troll_registry_file(path: impl AsRef<Path>) -> Result<TrollRegistry> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_troll_registry(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm(s: &str) -> String {
        normalize_url(s, UrlMode::Lenient).unwrap().into_string()
    }

    fn parse(text: &str) -> ParseReport {
        parse_event_stream(text.as_bytes(), ParseOptions::default()).unwrap()
    }

    #[test]
    fn url_examples() {
        assert_eq!(norm("HTTP://Example.com/A#frag"), "http://example.com/A");
        assert_eq!(norm("http://a.b/x"), "http://a.b/x");
        assert_eq!(norm(" http://a.b/x "), "http://a.b/x");
        assert_eq!(norm("https://User@Host.COM?q=A#f"), "https://User@host.com?q=A");
    }

    #[test]
    fn malformed_url_modes() {
        assert_eq!(norm("  not a url "), "not a url");
        assert_eq!(norm("www.example.com/x#y"), "www.example.com/x#y");
        assert!(matches!(
            normalize_url("www.example.com", UrlMode::Strict),
            Err(Error::InvalidUrl(_))
        ));
        assert!(normalize_url("   ", UrlMode::Lenient).is_err());
        assert!(normalize_url("http:///path", UrlMode::Strict).is_err());
    }

    #[test]
    fn three_valid_lines() {
        let r = parse("e1\ta\t1\t\t\t\ne2\tb\t2\ta\t\thttp://x.y/1\ne3\tc\t3\t\ta,b\t\n");
        assert_eq!(r.events.len(), 3);
        assert!(r.errors.is_empty());
        assert_eq!(r.events[1].reply_to.as_deref(), Some("a"));
        assert_eq!(r.events[2].mentions, vec!["a", "b"]);
    }

    #[test]
    fn malformed_line_is_skipped_and_reported() {
        let r = parse("e1\ta\t1\t\t\t\ne2\tb\tnope\t\t\t\ne3\tc\t3\t\t\t\n");
        assert_eq!(r.events.len(), 2);
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].line, 2);
    }

    #[test]
    fn duplicate_event_id_rejected() {
        let r = parse("e1\ta\t1\t\t\t\ne1\tb\t2\t\t\t\n");
        assert_eq!(r.events.len(), 1);
        assert_eq!(r.events[0].author, "a");
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].line, 2);
    }

    #[test]
    fn field_count_and_negative_ts() {
        let r = parse("e1\ta\t1\t\t\ne2\ta\t-5\t\t\t\n\ne3\t\t1\t\t\t\n");
        assert!(r.events.is_empty());
        let lines: Vec<usize> = r.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![1, 2, 4]);
    }

    #[test]
    fn self_interactions_are_repaired() {
        let r = parse("e1\ta\t1\ta\ta,b,b\thttp://x.y/1,HTTP://X.Y/1\n");
        let e = &r.events[0];
        assert_eq!(e.reply_to, None);
        assert_eq!(e.mentions, vec!["b"]);
        assert_eq!(e.urls.len(), 1);
        assert_eq!(r.repaired, 1);
    }

    #[test]
    fn strict_mode_rejects_line_with_bad_url() {
        let opts = ParseOptions { format: EventFormat::Tsv, url_mode: UrlMode::Strict };
        let r = parse_event_stream("e1\ta\t1\t\t\tgarbage\n".as_bytes(), opts).unwrap();
        assert!(r.events.is_empty());
        assert_eq!(r.errors.len(), 1);
    }

    #[test]
    fn jsonl_variant() {
        let text = r#"{"event_id":"e1","author":"a","ts":4,"reply_to":"","mentions":["b"],"urls":["HTTP://A.B/x#1"]}
{"event_id":"e2","author":"b","ts":5,"reply_to":"a"}
{"event_id":"e3","author":"b"}
"#;
        let opts = ParseOptions { format: EventFormat::Jsonl, url_mode: UrlMode::Lenient };
        let r = parse_event_stream(text.as_bytes(), opts).unwrap();
        assert_eq!(r.events.len(), 2);
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.events[0].reply_to, None);
        assert_eq!(r.events[0].urls[0].as_str(), "http://a.b/x");
        assert_eq!(r.events[1].reply_to.as_deref(), Some("a"));
    }

    #[test]
    fn registry_examples() {
        let r = load_troll_registry("a\n#c\nb\n".as_bytes()).unwrap();
        assert_eq!(r.iter().collect::<Vec<_>>(), vec!["a", "b"]);
        let r = load_troll_registry("a\na\n".as_bytes()).unwrap();
        assert_eq!(r.len(), 1);
        let r = load_troll_registry("".as_bytes()).unwrap();
        assert!(r.is_empty());
    }

    fn id() -> impl Strategy<Value = String> {
        "[a-z0-9_]{1,6}"
    }

    fn event() -> impl Strategy<Value = (String, String, i64, Option<String>, Vec<String>, Vec<String>)> {
        (
            id(),
            id(),
            0i64..2_000_000_000,
            proptest::option::of(id()),
            proptest::collection::vec(id(), 0..4),
            proptest::collection::vec("(https?://[A-Za-z.]{1,8}/[a-zA-Z0-9]{0,5}(#[a-z]{0,3})?)|([a-z]{1,5})", 0..3),
        )
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(raw in "[ ]{0,2}[a-zA-Z]{1,5}(://)?[A-Za-z.@]{0,8}[/?#]?[A-Za-z#/]{0,6}[ ]{0,2}") {
            if let Ok(once) = normalize_url(&raw, UrlMode::Lenient) {
                let twice = normalize_url(once.as_str(), UrlMode::Lenient).unwrap();
                prop_assert_eq!(once, twice);
            }
        }

        #[test]
        fn tsv_and_jsonl_round_trip(raw in proptest::collection::vec(event(), 0..20)) {
            let text: String = raw
                .iter()
                .enumerate()
                .map(|(i, (_, a, ts, r, m, u))| {
                    format!("e{i}\t{a}\t{ts}\t{}\t{}\t{}\n", r.clone().unwrap_or_default(), m.join(","), u.join(","))
                })
                .collect();
            let first = parse(&text);
            prop_assert!(first.errors.is_empty());
            for format in [EventFormat::Tsv, EventFormat::Jsonl] {
                let mut buf = Vec::new();
                write_events(&first.events, format, &mut buf).unwrap();
                let opts = ParseOptions { format, url_mode: UrlMode::Lenient };
                let again = parse_event_stream(buf.as_slice(), opts).unwrap();
                prop_assert_eq!(&again.events, &first.events);
                prop_assert_eq!(again.repaired, 0);
            }
        }
    }
}
