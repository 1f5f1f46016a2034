//! Interactive filter evaluation: axis range brushes, keyword search,
//! per-document exclusion, Keep/Exclude set operations, hidden topics, and
//! CSV export of the surviving documents.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analytics::{topic_label, Analytics, DisplayMode};
use crate::error::{Error, Result};

/// The full filter chain a user has built up.
///
/// Serialized as
/// `{"mode":"rank","axis_ranges":{"17":[1,3]},"keyword":"data","excluded":[..],"kept":[..]|null,"hidden":[..]}`;
/// every member is optional on input.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterState {
    pub mode: DisplayMode,
    /// Inclusive `(lo, hi)` bounds per topic id, in the active mode's units.
    pub axis_ranges: BTreeMap<usize, (f64, f64)>,
    pub keyword: Option<String>,
    #[serde(rename = "excluded")]
    pub excluded_docs: BTreeSet<usize>,
    /// `None` means every document.
    #[serde(rename = "kept")]
    pub kept_docs: Option<BTreeSet<usize>>,
    #[serde(rename = "hidden")]
    pub hidden_topics: BTreeSet<usize>,
}

impl FilterState {
    pub fn new(mode: DisplayMode) -> Self {
        Self { mode, ..Self::default() }
    }

    /// The keyword as matched: trimmed and lowercased, `None` when blank.
    pub fn normalized_keyword(&self) -> Option<String> {
        self.keyword.as_deref().map(str::trim).filter(|k| !k.is_empty()).map(str::to_lowercase)
    }

    /// Checks the state against a model with `k` topics and `d` documents.
    pub fn validate(&self, k: usize, d: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::FilterState(msg));
        let (min, max) = match self.mode {
            DisplayMode::Rank => (1.0, k as f64),
            DisplayMode::Probability => (0.0, 1.0),
        };
        for (&topic, &(lo, hi)) in &self.axis_ranges {
            if topic >= k {
                return bad(format!("range on unknown topic {topic}"));
            }
            if self.hidden_topics.contains(&topic) {
                return bad(format!("range on hidden topic {}", topic_label(topic)));
            }
            if !(lo.is_finite() && hi.is_finite() && min <= lo && lo <= hi && hi <= max) {
                return bad(format!(
                    "range [{lo}, {hi}] on {} must satisfy {min} <= lo <= hi <= {max} in {} mode",
                    topic_label(topic),
                    self.mode
                ));
            }
        }
        if let Some(&topic) = self.hidden_topics.iter().find(|&&t| t >= k) {
            return bad(format!("hidden topic {topic} out of range"));
        }
        let kept = self.kept_docs.iter().flatten();
        if let Some(&doc) = self.excluded_docs.iter().chain(kept).find(|&&doc| doc >= d) {
            return bad(format!("document {doc} out of range"));
        }
        if let Some(kept) = &self.kept_docs {
            if let Some(doc) = kept.intersection(&self.excluded_docs).next() {
                return bad(format!("document {doc} is both kept and excluded"));
            }
        }
        Ok(())
    }

    fn admits(&self, doc: usize, analytics: &Analytics, keyword: Option<&str>) -> bool {
        if self.excluded_docs.contains(&doc) {
            return false;
        }
        if self.kept_docs.as_ref().is_some_and(|kept| !kept.contains(&doc)) {
            return false;
        }
        let values = analytics.view(self.mode).row(doc);
        if !self.axis_ranges.iter().all(|(&t, &(lo, hi))| (lo..=hi).contains(&values[t])) {
            return false;
        }
        keyword.is_none_or(|kw| analytics.doc_words[doc].iter().any(|w| w.term.to_lowercase() == kw))
    }
}

/// Parses a filter state from its JSON form.
pub fn parse_state(text: &str) -> Result<FilterState> {
    serde_json::from_str(text).map_err(|e| Error::FilterState(e.to_string()))
}

/// Documents surviving a filter, in ascending id order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Selection {
    pub doc_ids: Vec<usize>,
    pub count: usize,
}

impl Selection {
    pub fn new(doc_ids: impl IntoIterator<Item = usize>) -> Self {
        let doc_ids: Vec<usize> = doc_ids.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        Self { count: doc_ids.len(), doc_ids }
    }

    pub fn all(d: usize) -> Self {
        Self::new(0..d)
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn contains(&self, doc: usize) -> bool {
        self.doc_ids.binary_search(&doc).is_ok()
    }
}

/// A document survives when it satisfies every axis range, matches the
/// keyword (if any), is not excluded, and is kept (if a kept set exists).
pub fn apply(state: &FilterState, analytics: &Analytics) -> Result<Selection> {
    state.validate(analytics.num_topics(), analytics.num_docs())?;
    let keyword = state.normalized_keyword();
    Ok(Selection::new((0..analytics.num_docs()).filter(|&doc| state.admits(doc, analytics, keyword.as_deref()))))
}

/// Result of [`keep`].
#[derive(Debug, Clone, PartialEq)]
pub struct KeepOutcome {
    pub state: FilterState,
    /// Set when the selection was empty and the state left unchanged.
    pub warning: Option<String>,
}

/// Restricts all later filtering to `current`, then clears the brushes and
/// keyword that produced it.
pub fn keep(state: &FilterState, current: &Selection) -> KeepOutcome {
    if current.is_empty() {
        return KeepOutcome {
            state: state.clone(),
            warning: Some("nothing to keep: the current selection is empty".into()),
        };
    }
    let selected: BTreeSet<usize> = current.doc_ids.iter().copied().collect();
    let kept = match &state.kept_docs {
        Some(prior) => prior.intersection(&selected).copied().collect(),
        None => selected,
    };
    let next = FilterState { kept_docs: Some(kept), axis_ranges: BTreeMap::new(), keyword: None, ..state.clone() };
    KeepOutcome { state: next, warning: None }
}

/// Adds `docs` to the excluded set and drops them from the kept set.
pub fn exclude(state: &FilterState, docs: &BTreeSet<usize>) -> FilterState {
    let mut next = state.clone();
    next.excluded_docs.extend(docs);
    if let Some(kept) = &mut next.kept_docs {
        kept.retain(|d| !docs.contains(d));
    }
    next
}

/// Lifts exclusion for `docs`. Documents dropped from the kept set by an
/// earlier exclusion stay out of it.
pub fn restore(state: &FilterState, docs: &BTreeSet<usize>) -> FilterState {
    let mut next = state.clone();
    next.excluded_docs.retain(|d| !docs.contains(d));
    next
}

/// Hides a topic axis and drops any range on it.
pub fn remove_topic(state: &FilterState, topic: usize) -> FilterState {
    let mut next = state.clone();
    next.hidden_topics.insert(topic);
    next.axis_ranges.remove(&topic);
    next
}

/// Shows a hidden topic axis again. Its former range is not restored.
pub fn show_topic(state: &FilterState, topic: usize) -> FilterState {
    let mut next = state.clone();
    next.hidden_topics.remove(&topic);
    next
}

/// Documents whose searchable words contain the trimmed query, ignoring
/// case. A blank query matches everything.
pub fn search(query: &str, analytics: &Analytics) -> Selection {
    let query = query.trim().to_lowercase();
    if query.is_empty() {
        return Selection::all(analytics.num_docs());
    }
    Selection::new((0..analytics.num_docs()).filter(|&doc| analytics.has_top_word(doc, &query)))
}

/// Writes `doc_id,title,top_words,T1_rank,...,TK_rank` rows for the
/// selection in ascending id order. Top words are joined with `;`.
pub fn export_csv<W: Write>(selection: &Selection, analytics: &Analytics, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    let k = analytics.num_topics();
    let mut header = vec!["doc_id".to_string(), "title".into(), "top_words".into()];
    header.extend((0..k).map(|t| format!("{}_rank", topic_label(t))));
    writer.write_record(&header)?;

    let mut ids = selection.doc_ids.clone();
    ids.sort_unstable();
    for doc in ids {
        if doc >= analytics.num_docs() {
            return Err(Error::DocumentOutOfRange { doc_id: doc, len: analytics.num_docs() });
        }
        let words: Vec<&str> = analytics.doc_words[doc].iter().map(|w| w.term.as_str()).collect();
        let mut record = vec![doc.to_string(), analytics.titles[doc].clone(), words.join(";")];
        record.extend(analytics.ranks.row(doc).iter().map(usize::to_string));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn export_csv_bytes(selection: &Selection, analytics: &Analytics) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    export_csv(selection, analytics, &mut buf)?;
    Ok(buf)
}
