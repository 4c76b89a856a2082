use std::collections::HashMap;

use super::LmError;

pub const BOS: u32 = 0;
pub const EOS: u32 = 1;
pub const UNK: u32 = 2;

pub const BOS_STR: &str = "<s>";
pub const EOS_STR: &str = "</s>";
pub const UNK_STR: &str = "<unk>";

/// Token interning with the three reserved symbols at fixed ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Default for Vocab {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocab {
    pub fn new() -> Self {
        let words: Vec<String> = [BOS_STR, EOS_STR, UNK_STR].map(String::from).to_vec();
        let ids = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Self { words, ids }
    }

    /// Interns a training token. Reserved symbols are rejected.
    pub fn intern(&mut self, token: &str) -> Result<u32, LmError> {
        if let Some(&id) = self.ids.get(token) {
            if id <= UNK {
                return Err(LmError::ReservedToken(token.to_owned()));
            }
            return Ok(id);
        }
        let id = self.words.len() as u32;
        self.words.push(token.to_owned());
        self.ids.insert(token.to_owned(), id);
        Ok(id)
    }

    /// Like [`Vocab::intern`] but accepts the reserved symbols; used when
    /// reading model files.
    pub(crate) fn intern_any(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(token.to_owned());
        self.ids.insert(token.to_owned(), id);
        id
    }

    pub fn lookup(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    /// Id for scoring: unknown words map to `<unk>`.
    pub fn id_or_unk(&self, token: &str) -> u32 {
        match self.ids.get(token) {
            Some(&id) if id != BOS => id,
            _ => UNK,
        }
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}
