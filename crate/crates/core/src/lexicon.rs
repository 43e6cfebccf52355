//! Scored form-meaning constructions and lateral-inhibition alignment.

use rand::seq::IndexedRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::conceptual::CategoryId;
use crate::error::ConsistencyError;

pub const DEFAULT_INITIAL_SCORE: f64 = 0.5;

/// Scores at or below this are treated as zero, so that repeated decrements
/// by 0.1 reach removal in the expected number of steps despite rounding.
pub const SCORE_EPSILON: f64 = 1e-9;

const CONSONANTS: [char; 15] = [
    'b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'w', 'z',
];
const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];
const SYLLABLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Speaker,
    Hearer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub form: String,
    pub category_id: CategoryId,
    pub score: f64,
}

impl Construction {
    fn is_pair(&self, form: &str, category_id: CategoryId) -> bool {
        self.form == form && self.category_id == category_id
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstructionInventory {
    constructions: Vec<Construction>,
}

/// Generates a random CVCVCV word form.
pub fn random_word_form(rng: &mut dyn RngCore) -> String {
    let mut form = String::with_capacity(SYLLABLES * 2);
    for _ in 0..SYLLABLES {
        form.push(*CONSONANTS.choose(rng).unwrap());
        form.push(*VOWELS.choose(rng).unwrap());
    }
    form
}

/// True for well-formed utterances: non-empty, no whitespace or control characters.
pub fn is_valid_word_form(form: &str) -> bool {
    !form.is_empty() && !form.chars().any(|c| c.is_whitespace() || c.is_control())
}

impl ConstructionInventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constructions(&self) -> &[Construction] {
        &self.constructions
    }

    pub fn len(&self) -> usize {
        self.constructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constructions.is_empty()
    }

    pub fn knows_form(&self, form: &str) -> bool {
        self.constructions.iter().any(|c| c.form == form)
    }

    pub fn get(&self, form: &str, category_id: CategoryId) -> Option<&Construction> {
        self.constructions.iter().find(|c| c.is_pair(form, category_id))
    }

    /// Draws word forms until one is not yet used in this inventory.
    pub fn invent_word_form(&self, rng: &mut dyn RngCore) -> String {
        loop {
            let form = random_word_form(rng);
            if !self.knows_form(&form) {
                return form;
            }
        }
    }

    pub fn add_construction(
        &mut self,
        form: &str,
        category_id: CategoryId,
        initial_score: f64,
    ) -> Result<&Construction, ConsistencyError> {
        if !(initial_score > 0.0 && initial_score <= 1.0) {
            return Err(ConsistencyError::InitialScore(initial_score));
        }
        if self.get(form, category_id).is_some() {
            return Err(ConsistencyError::DuplicateConstruction {
                form: form.to_owned(),
                category: category_id,
            });
        }
        self.constructions.push(Construction {
            form: form.to_owned(),
            category_id,
            score: initial_score,
        });
        Ok(self.constructions.last().unwrap())
    }

    /// Highest-scored construction expressing `category_id`; ties go to the
    /// lexicographically smallest form.
    pub fn produce(&self, category_id: CategoryId) -> Option<&Construction> {
        self.constructions
            .iter()
            .filter(|c| c.category_id == category_id)
            .min_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.form.cmp(&b.form)))
    }

    /// Highest-scored construction with `form`; ties go to the smallest category id.
    pub fn comprehend(&self, form: &str) -> Option<&Construction> {
        self.constructions.iter().filter(|c| c.form == form).min_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.category_id.cmp(&b.category_id))
        })
    }

    fn position(&self, form: &str, category_id: CategoryId) -> Result<usize, ConsistencyError> {
        self.constructions
            .iter()
            .position(|c| c.is_pair(form, category_id))
            .ok_or_else(|| ConsistencyError::MissingConstruction {
                form: form.to_owned(),
                category: category_id,
            })
    }

    /// Rewards the used construction by `inc` (capped at 1) and lowers its
    /// competitors by `inh`. A speaker's competitors share the category, a
    /// hearer's share the form. Competitors that hit zero are dropped.
    pub fn reward_and_inhibit(
        &mut self,
        form: &str,
        category_id: CategoryId,
        role: Role,
        inc: f64,
        inh: f64,
    ) -> Result<(), ConsistencyError> {
        let used = self.position(form, category_id)?;
        let used = &mut self.constructions[used];
        used.score = (used.score + inc).min(1.0);
        for c in &mut self.constructions {
            let competing = match role {
                Role::Speaker => c.category_id == category_id && c.form != form,
                Role::Hearer => c.form == form && c.category_id != category_id,
            };
            if competing {
                c.score -= inh;
            }
        }
        self.prune();
        Ok(())
    }

    /// Lowers the used construction by `dec`, removing it at zero.
    pub fn punish(&mut self, form: &str, category_id: CategoryId, dec: f64) -> Result<(), ConsistencyError> {
        let used = self.position(form, category_id)?;
        self.constructions[used].score -= dec;
        self.prune();
        Ok(())
    }

    fn prune(&mut self) {
        self.constructions.retain(|c| c.score > SCORE_EPSILON);
    }
}
