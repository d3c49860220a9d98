//! Subtoken normalization and the shared vocabulary.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::Triplet;
use crate::syntax::{lex, TokenKind};

use super::ModelError;

pub const PAD: usize = 0;
pub const UNK: usize = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";
pub const NUM_TOKEN: &str = "<num>";
pub const STR_TOKEN: &str = "<str>";

/// Splits on camelCase and acronym boundaries, underscores, digit runs and
/// any non-alphanumeric character, then lowercases.
///
/// `parseHTTPRequest` → `parse http request`, `MAX_SIZE2` → `max size 2`.
pub fn subtokenize(identifier: &str) -> Vec<String> {
    let chars: Vec<char> = identifier.chars().collect();
    let mut out = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, out: &mut Vec<String>| {
        if !current.is_empty() {
            out.push(current.to_lowercase());
            current.clear();
        }
    };
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            flush(&mut current, &mut out);
            continue;
        }
        if let Some(&prev) = i.checked_sub(1).and_then(|p| chars.get(p)) {
            let next = chars.get(i + 1).copied();
            let boundary = (prev.is_ascii_digit() != c.is_ascii_digit() && prev.is_alphanumeric())
                || (prev.is_lowercase() && c.is_uppercase())
                || (prev.is_uppercase()
                    && c.is_uppercase()
                    && next.is_some_and(|n| n.is_lowercase()));
            if boundary {
                flush(&mut current, &mut out);
            }
        }
        current.push(c);
    }
    flush(&mut current, &mut out);
    out
}

/// Lexes code and normalizes it: identifiers and keywords become subtokens,
/// numeric and string literals collapse to markers, punctuation and
/// operators are dropped. Text that does not lex falls back to plain
/// subtokenization.
pub fn code_tokens(code: &str) -> Vec<String> {
    let Ok(tokens) = lex(code) else {
        return subtokenize(code);
    };
    let mut out = Vec::new();
    for t in tokens {
        match t.kind {
            TokenKind::Identifier | TokenKind::Keyword => out.extend(subtokenize(&t.text)),
            TokenKind::Literal => match t.text.as_str() {
                "true" | "false" | "null" => out.push(t.text.clone()),
                s if s.starts_with('"') || s.starts_with('\'') => out.push(STR_TOKEN.into()),
                _ => out.push(NUM_TOKEN.into()),
            },
            TokenKind::Operator | TokenKind::Punctuation => {}
        }
    }
    out
}

pub fn query_tokens(query: &str) -> Vec<String> {
    subtokenize(query)
}

/// Dense subtoken index; 0 and 1 are reserved for padding and unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    /// Counts subtokens of codes, queries and graph node names in `train`.
    /// Ties in frequency are ordered by subtoken.
    pub fn build(train: &[Triplet], min_freq: usize) -> Result<Vocab, ModelError> {
        if train.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for t in train {
            let names = t.graph.nodes.iter().flat_map(|n| subtokenize(&n.name));
            for tok in code_tokens(&t.code_text)
                .into_iter()
                .chain(query_tokens(&t.query_text))
                .chain(names)
            {
                *counts.entry(tok).or_default() += 1;
            }
        }
        let mut kept: Vec<(String, usize)> = counts
            .into_iter()
            .filter(|(tok, c)| *c >= min_freq.max(1) && tok != PAD_TOKEN && tok != UNK_TOKEN)
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Vocab::from_tokens(
            [PAD_TOKEN.to_string(), UNK_TOKEN.to_string()]
                .into_iter()
                .chain(kept.into_iter().map(|(t, _)| t))
                .collect(),
        )
    }

    /// Rebuilds a vocabulary from its index-ordered token list.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Vocab, ModelError> {
        if tokens.first().map(String::as_str) != Some(PAD_TOKEN)
            || tokens.get(1).map(String::as_str) != Some(UNK_TOKEN)
        {
            return Err(ModelError::VocabMismatch(
                "vocabulary must start with <pad>, <unk>".into(),
            ));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(ModelError::VocabMismatch(format!("duplicate token {t:?}")));
            }
        }
        Ok(Vocab { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Maps subtokens to ids, truncated to `max`; never returns an empty list.
    pub fn encode(&self, tokens: &[String], max: usize) -> Vec<usize> {
        let ids: Vec<usize> = tokens.iter().take(max.max(1)).map(|t| self.id(t)).collect();
        if ids.is_empty() {
            vec![UNK]
        } else {
            ids
        }
    }
}
