//! Big Five inventory scoring from 1–5 Likert answers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::SurveyAnswer;
use crate::types::UserId;

pub const SCALE_MIN: u8 = 1;
pub const SCALE_MAX: u8 = 5;
pub const KEY_HEADER: [&str; 3] = ["item_id", "trait", "reversed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Trait {
    #[serde(rename = "O")]
    Openness,
    #[serde(rename = "C")]
    Conscientiousness,
    #[serde(rename = "E")]
    Extraversion,
    #[serde(rename = "A")]
    Agreeableness,
    #[serde(rename = "N")]
    Neuroticism,
}

impl Trait {
    pub const ALL: [Trait; 5] = [
        Trait::Openness,
        Trait::Conscientiousness,
        Trait::Extraversion,
        Trait::Agreeableness,
        Trait::Neuroticism,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Trait::Openness => "O",
            Trait::Conscientiousness => "C",
            Trait::Extraversion => "E",
            Trait::Agreeableness => "A",
            Trait::Neuroticism => "N",
        }
    }
}

impl fmt::Display for Trait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Trait {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Trait::ALL
            .into_iter()
            .find(|t| t.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Format(format!("unknown trait {s:?}")))
    }
}

/// Reverse-keyed score on the 1–5 scale.
pub fn reverse(score: u8) -> u8 {
    SCALE_MIN + SCALE_MAX - score
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyEntry {
    pub trait_: Trait,
    pub reversed: bool,
}

/// Item id to trait and direction.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScoringKey {
    items: BTreeMap<String, KeyEntry>,
}

impl ScoringKey {
    /// Every trait needs at least one item.
    pub fn new(items: impl IntoIterator<Item = (String, KeyEntry)>) -> Result<Self> {
        let items: BTreeMap<String, KeyEntry> = items.into_iter().collect();
        let covered: BTreeSet<Trait> = items.values().map(|k| k.trait_).collect();
        let missing: Vec<String> = Trait::ALL
            .iter()
            .filter(|t| !covered.contains(t))
            .map(|t| format!("trait {t} has no items"))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Validation(missing));
        }
        Ok(ScoringKey { items })
    }

    pub fn get(&self, item: &str) -> Option<&KeyEntry> {
        self.items.get(item)
    }

    pub fn items(&self) -> &BTreeMap<String, KeyEntry> {
        &self.items
    }

    /// Parses `item_id,trait,reversed` CSV; `reversed` is `true/false` or `1/0`.
    pub fn read<R: Read>(source: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        if header != KEY_HEADER {
            return Err(Error::Format(format!(
                "key header {header:?}, expected {KEY_HEADER:?}"
            )));
        }
        let mut items = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let line = i + 2;
            if row.len() != 3 {
                return Err(Error::Format(format!("key line {line}: expected 3 fields")));
            }
            let reversed = match row[2].trim() {
                "true" | "1" => true,
                "false" | "0" => false,
                other => return Err(Error::Format(format!("key line {line}: bad reversed flag {other:?}"))),
            };
            let trait_ = row[1]
                .parse()
                .map_err(|_| Error::Format(format!("key line {line}: unknown trait {:?}", &row[1])))?;
            items.push((row[0].to_owned(), KeyEntry { trait_, reversed }));
        }
        ScoringKey::new(items)
    }

    pub fn write<W: std::io::Write>(&self, sink: W) -> Result<()> {
        let mut w = crate::csvio::csv_writer(sink);
        w.write_record(KEY_HEADER)?;
        for (item, k) in &self.items {
            w.write_record([item.as_str(), k.trait_.code(), if k.reversed { "true" } else { "false" }])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One participant's answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub user: UserId,
    pub answers: BTreeMap<String, u8>,
}

/// Groups answers by user. A repeated item must carry the same score.
pub fn responses(answers: &[SurveyAnswer]) -> Result<Vec<SurveyResponse>> {
    let mut out: BTreeMap<&UserId, BTreeMap<String, u8>> = BTreeMap::new();
    for a in answers {
        let slot = out.entry(&a.user).or_default();
        if let Some(prev) = slot.insert(a.item.clone(), a.score) {
            if prev != a.score {
                return Err(Error::invalid(format!(
                    "user {} answered item {} twice with different scores",
                    a.user, a.item
                )));
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|(u, answers)| SurveyResponse {
            user: u.clone(),
            answers,
        })
        .collect())
}

/// Mean keyed score per trait. Traits with fewer than `min_items` answered
/// items are absent.
pub fn score_big_five(resp: &SurveyResponse, key: &ScoringKey, min_items: usize) -> Result<BTreeMap<Trait, f64>> {
    if min_items == 0 {
        return Err(Error::invalid("min_items must be >= 1"));
    }
    let mut acc: BTreeMap<Trait, (u32, usize)> = BTreeMap::new();
    for (item, &score) in &resp.answers {
        let k = key
            .get(item)
            .ok_or_else(|| Error::KeyMismatch(format!("item {item:?} of user {} not in key", resp.user)))?;
        if !(SCALE_MIN..=SCALE_MAX).contains(&score) {
            return Err(Error::invalid(format!("score {score} outside 1..=5")));
        }
        let s = if k.reversed { reverse(score) } else { score };
        let e = acc.entry(k.trait_).or_default();
        e.0 += u32::from(s);
        e.1 += 1;
    }
    Ok(acc
        .into_iter()
        .filter(|(_, (_, n))| *n >= min_items)
        .map(|(t, (sum, n))| (t, f64::from(sum) / n as f64))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraitStats {
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
    pub n: usize,
}

/// Cohort mean and population standard deviation per trait.
///
/// Each trait is summarised over the users who have a score for it; every
/// trait needs at least two.
pub fn trait_summary(scores: &BTreeMap<UserId, BTreeMap<Trait, f64>>) -> Result<BTreeMap<Trait, TraitStats>> {
    let mut out = BTreeMap::new();
    for t in Trait::ALL {
        let vals: Vec<f64> = scores.values().filter_map(|s| s.get(&t).copied()).collect();
        if vals.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: vals.len(),
            });
        }
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        out.insert(
            t,
            TraitStats {
                mean,
                sd: var.sqrt(),
                n: vals.len(),
            },
        );
    }
    Ok(out)
}
