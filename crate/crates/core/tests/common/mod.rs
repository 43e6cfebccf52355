//! Brute-force references for nearest-prototype conceptualisation and
//! interpretation. They work on integer colours with exact `i64` squared
//! distances and share no code with the crate.

#![allow(dead_code)]

use rand::Rng;

use naming_game::conceptual::{CategoryId, Ontology};
use naming_game::world::{ColourValue, ObjectId, Percept, WorldModel};

pub type Rgb = [i64; 3];

#[derive(Debug, Clone)]
pub struct Instance {
    /// Category prototypes; category `i` gets id `i`.
    pub prototypes: Vec<Rgb>,
    /// Observed colours; object `i` gets id `i`.
    pub observations: Vec<Rgb>,
}

fn d2(a: &Rgb, b: &Rgb) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Instance {
    /// Small channel range so that ties are frequent.
    pub fn random(rng: &mut impl Rng, max_categories: usize, max_objects: usize, channel_max: i64) -> Self {
        let colour = |rng: &mut dyn rand::RngCore| -> Rgb {
            [
                rng.random_range(0..=channel_max),
                rng.random_range(0..=channel_max),
                rng.random_range(0..=channel_max),
            ]
        };
        let n_categories = rng.random_range(0..=max_categories);
        let n_objects = rng.random_range(1..=max_objects);
        Instance {
            prototypes: (0..n_categories).map(|_| colour(rng)).collect(),
            observations: (0..n_objects).map(|_| colour(rng)).collect(),
        }
    }

    pub fn ontology(&self) -> Ontology {
        let mut ontology = Ontology::new();
        for p in &self.prototypes {
            ontology.add(to_colour(p));
        }
        ontology
    }

    pub fn model(&self) -> WorldModel {
        WorldModel::new(
            self.observations
                .iter()
                .enumerate()
                .map(|(i, o)| Percept {
                    object_id: ObjectId(i as u32),
                    observed_colour: to_colour(o),
                })
                .collect(),
        )
    }

    /// Index of the category with the smallest (distance, id) to `observation`.
    pub fn closest(&self, observation: &Rgb) -> Option<usize> {
        let mut all: Vec<(i64, usize)> = self
            .prototypes
            .iter()
            .enumerate()
            .map(|(i, p)| (d2(p, observation), i))
            .collect();
        all.sort();
        all.first().map(|&(_, i)| i)
    }

    /// Expected conceptualisation of object `topic`.
    pub fn conceptualise(&self, topic: usize) -> Option<CategoryId> {
        let category = self.closest(&self.observations[topic])?;
        let proto = &self.prototypes[category];
        let own = d2(proto, &self.observations[topic]);
        let unique = self
            .observations
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != topic)
            .all(|(_, o)| d2(proto, o) > own);
        unique.then_some(CategoryId(category as u32))
    }

    /// Expected interpretation of category `category`: the unique closest object.
    pub fn interpret(&self, category: usize) -> Option<ObjectId> {
        let proto = &self.prototypes[category];
        let best = self.observations.iter().map(|o| d2(proto, o)).min()?;
        let winners: Vec<usize> = (0..self.observations.len())
            .filter(|&i| d2(proto, &self.observations[i]) == best)
            .collect();
        (winners.len() == 1).then(|| ObjectId(winners[0] as u32))
    }
}

pub fn to_colour(c: &Rgb) -> ColourValue {
    ColourValue::new(c[0] as f64, c[1] as f64, c[2] as f64)
}
