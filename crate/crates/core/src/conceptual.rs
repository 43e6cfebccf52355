//! Prototype colour categories and the single-primitive semantic network
//! (`filter-by-closest-colour`) used for conceptualisation and interpretation.
//!
//! Membership is nearest-prototype under Euclidean RGB distance. A category
//! discriminates a topic when the topic is strictly closer to its prototype
//! than every other object in the world model; ties count as failure.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConsistencyError;
use crate::world::{ColourValue, Percept, WorldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryId(pub u32);

impl fmt::Display for CategoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CATEGORY-{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColourCategory {
    #[serde(rename = "category_id")]
    pub id: CategoryId,
    pub prototype: ColourValue,
}

/// An agent's private set of colour categories.
///
/// Ids are issued from a monotone counter; an id that was ever kept is
/// never issued again.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ontology {
    categories: Vec<ColourCategory>,
    next_id: u32,
}

/// The semantic network of this game: one `filter-by-closest-colour`
/// operation bound to a category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemanticNetwork {
    pub category_id: CategoryId,
}

impl SemanticNetwork {
    pub const PRIMITIVE: &'static str = "filter-by-closest-colour";

    pub fn new(category_id: CategoryId) -> Self {
        SemanticNetwork { category_id }
    }
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn categories(&self) -> &[ColourCategory] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn get(&self, id: CategoryId) -> Option<&ColourCategory> {
        self.categories.iter().find(|c| c.id == id)
    }

    /// Adds a category with an explicit prototype and a fresh id.
    pub fn add(&mut self, prototype: ColourValue) -> &ColourCategory {
        let id = CategoryId(self.next_id);
        self.next_id += 1;
        self.categories.push(ColourCategory { id, prototype });
        self.categories.last().unwrap()
    }

    /// Nearest category to `observation` and its distance; ties go to the
    /// smallest id.
    pub fn closest_category(&self, observation: &ColourValue) -> Option<(&ColourCategory, f64)> {
        let mut best: Option<(&ColourCategory, f64)> = None;
        for category in &self.categories {
            let d = category.prototype.squared_distance(observation);
            best = match best {
                Some((b, bd)) if bd < d || (bd == d && b.id < category.id) => Some((b, bd)),
                _ => Some((category, d)),
            };
        }
        best.map(|(c, d)| (c, d.sqrt()))
    }

    /// Returns the network binding the topic's closest category if that
    /// category singles out the topic in `model`.
    pub fn conceptualise(&self, topic: &Percept, model: &WorldModel) -> Option<SemanticNetwork> {
        let (category, _) = self.closest_category(&topic.observed_colour)?;
        discriminates(&category.prototype, topic, model).then(|| SemanticNetwork::new(category.id))
    }

    /// Creates a category whose prototype is the topic's observed colour.
    pub fn invent_category(&mut self, topic: &Percept) -> ColourCategory {
        self.add(topic.observed_colour).clone()
    }

    /// Undoes the most recent invention. Only the newest category can be
    /// retracted, and its id is handed out again since nothing saw it.
    pub(crate) fn retract_latest(&mut self, id: CategoryId) {
        let last = self.categories.last().map(|c| c.id);
        assert_eq!(last, Some(id), "only the newest category can be retracted");
        self.categories.pop();
        self.next_id = id.0;
    }

    /// Executes the network against `model`: the unique percept closest to
    /// the bound prototype, or `None` when the minimum is tied.
    pub fn interpret(
        &self,
        network: &SemanticNetwork,
        model: &WorldModel,
    ) -> Result<Option<Percept>, ConsistencyError> {
        let category = self
            .get(network.category_id)
            .ok_or(ConsistencyError::UnknownCategory(network.category_id))?;
        Ok(filter_by_closest_colour(&category.prototype, model))
    }

    /// Moves a prototype `rate` of the way towards `observation`.
    pub fn shift_prototype(
        &mut self,
        id: CategoryId,
        observation: &ColourValue,
        rate: f64,
    ) -> Result<ColourValue, ConsistencyError> {
        debug_assert!((0.0..=1.0).contains(&rate));
        let category = self
            .categories
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or(ConsistencyError::UnknownCategory(id))?;
        category.prototype = category.prototype.towards(observation, rate);
        Ok(category.prototype)
    }
}

/// True when every other percept is strictly farther from `prototype` than the topic.
pub fn discriminates(prototype: &ColourValue, topic: &Percept, model: &WorldModel) -> bool {
    let own = prototype.squared_distance(&topic.observed_colour);
    model
        .percepts()
        .iter()
        .filter(|p| p.object_id != topic.object_id)
        .all(|p| prototype.squared_distance(&p.observed_colour) > own)
}

/// The `filter-by-closest-colour` primitive.
pub fn filter_by_closest_colour(prototype: &ColourValue, model: &WorldModel) -> Option<Percept> {
    let mut best: Option<(Percept, f64)> = None;
    let mut tied = false;
    for p in model.percepts() {
        let d = prototype.squared_distance(&p.observed_colour);
        match best {
            Some((_, bd)) if d > bd => {}
            Some((_, bd)) if d == bd => tied = true,
            _ => {
                best = Some((*p, d));
                tied = false;
            }
        }
    }
    if tied {
        None
    } else {
        best.map(|(p, _)| p)
    }
}
