//! The simulated environment: a fixed set of coloured objects, per-game
//! scenes drawn from it, and noisy per-agent perception of those scenes.

use std::fmt;

use rand::seq::index;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

pub const CHANNEL_MAX: f64 = 255.0;

/// Default minimum Euclidean distance between any two palette colours.
pub const DEFAULT_MIN_SEPARATION: f64 = 100.0;

/// A point in 3-channel RGB space. Channels are always within `[0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct ColourValue {
    r: f64,
    g: f64,
    b: f64,
}

fn clip(channel: f64) -> f64 {
    channel.clamp(0.0, CHANNEL_MAX)
}

impl ColourValue {
    /// Builds a colour, clipping every channel into `[0, 255]`.
    pub fn new(r: f64, g: f64, b: f64) -> Self {
        ColourValue {
            r: clip(r),
            g: clip(g),
            b: clip(b),
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn channels(&self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    pub fn squared_distance(&self, other: &ColourValue) -> f64 {
        let dr = self.r - other.r;
        let dg = self.g - other.g;
        let db = self.b - other.b;
        dr * dr + dg * dg + db * db
    }

    pub fn distance(&self, other: &ColourValue) -> f64 {
        self.squared_distance(other).sqrt()
    }

    /// Moves `rate` of the way towards `target`, channel by channel.
    pub fn towards(&self, target: &ColourValue, rate: f64) -> ColourValue {
        let step = |from: f64, to: f64| from + rate * (to - from);
        ColourValue::new(step(self.r, target.r), step(self.g, target.g), step(self.b, target.b))
    }

    /// Channels rounded to the nearest integer, for display.
    pub fn to_rgb8(&self) -> [u8; 3] {
        self.channels().map(|c| c.round() as u8)
    }
}

impl From<[f64; 3]> for ColourValue {
    fn from([r, g, b]: [f64; 3]) -> Self {
        ColourValue::new(r, g, b)
    }
}

impl From<[u8; 3]> for ColourValue {
    fn from([r, g, b]: [u8; 3]) -> Self {
        ColourValue::new(r.into(), g.into(), b.into())
    }
}

impl From<ColourValue> for [f64; 3] {
    fn from(c: ColourValue) -> Self {
        c.channels()
    }
}

impl fmt::Display for ColourValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r, self.g, self.b)
    }
}

/// Identifier of an object in the world; stable for a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub u32);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "object-{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldObject {
    pub id: ObjectId,
    pub true_colour: ColourValue,
}

/// Immutable set of objects plus the number shown per game.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    objects: Vec<WorldObject>,
    objects_per_scene: usize,
}

/// The six saturated corners of the RGB cube: red, green, blue, yellow,
/// magenta and cyan. Their smallest pairwise distance is 255.
pub fn default_palette() -> Vec<[u8; 3]> {
    vec![
        [255, 0, 0],
        [0, 255, 0],
        [0, 0, 255],
        [255, 255, 0],
        [255, 0, 255],
        [0, 255, 255],
    ]
}

/// Checks that every pair of colours is at least `min_separation` apart,
/// reporting the first offending pair.
pub fn check_separation(palette: &[ColourValue], min_separation: f64) -> Result<(), ConfigError> {
    for (i, a) in palette.iter().enumerate() {
        for (j, b) in palette.iter().enumerate().skip(i + 1) {
            let distance = a.distance(b);
            if distance < min_separation {
                return Err(ConfigError::SeparationViolation {
                    first: i,
                    second: j,
                    distance,
                    min_separation,
                });
            }
        }
    }
    Ok(())
}

/// Draws `size` integer colours uniformly from the RGB cube, rejecting any
/// draw closer than `min_separation` to an accepted one.
pub fn random_palette(size: usize, min_separation: f64, rng: &mut dyn RngCore) -> Result<Vec<[u8; 3]>, ConfigError> {
    const MAX_ATTEMPTS: usize = 100_000;
    let mut palette: Vec<[u8; 3]> = Vec::with_capacity(size);
    let mut attempts = 0;
    while palette.len() < size {
        if attempts == MAX_ATTEMPTS {
            return Err(ConfigError::PaletteGeneration {
                size,
                min_separation,
                attempts,
            });
        }
        attempts += 1;
        let candidate: [u8; 3] = [rng.random(), rng.random(), rng.random()];
        let colour = ColourValue::from(candidate);
        if palette
            .iter()
            .all(|&p| ColourValue::from(p).distance(&colour) >= min_separation)
        {
            palette.push(candidate);
        }
    }
    Ok(palette)
}

/// Builds a world with one object per palette entry, ids assigned in palette order.
pub fn make_world(
    palette: &[ColourValue],
    objects_per_scene: usize,
    min_separation: f64,
) -> Result<World, ConfigError> {
    if palette.is_empty() {
        return Err(ConfigError::EmptyPalette);
    }
    if objects_per_scene == 0 || objects_per_scene > palette.len() {
        return Err(ConfigError::ObjectsPerScene {
            objects_per_scene,
            palette_len: palette.len(),
        });
    }
    check_separation(palette, min_separation)?;
    let objects = palette
        .iter()
        .enumerate()
        .map(|(i, &true_colour)| WorldObject {
            id: ObjectId(i as u32),
            true_colour,
        })
        .collect();
    Ok(World {
        objects,
        objects_per_scene,
    })
}

impl World {
    pub fn objects(&self) -> &[WorldObject] {
        &self.objects
    }

    pub fn objects_per_scene(&self) -> usize {
        self.objects_per_scene
    }

    pub fn object(&self, id: ObjectId) -> Option<&WorldObject> {
        self.objects.get(id.0 as usize).filter(|o| o.id == id)
    }

    /// Chooses `objects_per_scene` distinct objects uniformly without replacement.
    pub fn sample_scene(&self, rng: &mut dyn RngCore) -> Scene {
        let mut object_ids: Vec<ObjectId> = index::sample(rng, self.objects.len(), self.objects_per_scene)
            .into_iter()
            .map(|i| self.objects[i].id)
            .collect();
        object_ids.sort();
        Scene { object_ids }
    }
}

/// The objects shown in one game, sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    object_ids: Vec<ObjectId>,
}

impl Scene {
    /// Builds a scene from explicit ids; used by tests and by callers that
    /// force particular compositions.
    pub fn from_ids(mut object_ids: Vec<ObjectId>) -> Scene {
        object_ids.sort();
        object_ids.dedup();
        Scene { object_ids }
    }

    pub fn object_ids(&self) -> &[ObjectId] {
        &self.object_ids
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        self.object_ids.binary_search(&id).is_ok()
    }

    pub fn len(&self) -> usize {
        self.object_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.object_ids.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Percept {
    pub object_id: ObjectId,
    pub observed_colour: ColourValue,
}

/// One agent's private view of a scene: exactly one percept per scene object.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WorldModel {
    percepts: Vec<Percept>,
}

impl WorldModel {
    pub fn new(percepts: Vec<Percept>) -> Self {
        WorldModel { percepts }
    }

    pub fn percepts(&self) -> &[Percept] {
        &self.percepts
    }

    pub fn get(&self, id: ObjectId) -> Option<&Percept> {
        self.percepts.iter().find(|p| p.object_id == id)
    }

    pub fn object_ids(&self) -> Vec<ObjectId> {
        self.percepts.iter().map(|p| p.object_id).collect()
    }

    pub fn len(&self) -> usize {
        self.percepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.percepts.is_empty()
    }
}

/// Observes every object in `scene` with i.i.d. Gaussian noise of standard
/// deviation `noise_std` added to each channel, then clipped to `[0, 255]`.
///
/// Panics if `noise_std` is negative or not finite; configurations are
/// validated before a run starts.
pub fn perceive(world: &World, scene: &Scene, noise_std: f64, rng: &mut dyn RngCore) -> WorldModel {
    assert!(
        noise_std.is_finite() && noise_std >= 0.0,
        "noise_std must be finite and non-negative, got {noise_std}"
    );
    let noise = Normal::new(0.0, noise_std).expect("validated standard deviation");
    let percepts = scene
        .object_ids()
        .iter()
        .map(|&id| {
            let truth = world
                .object(id)
                .expect("scene ids come from the same world")
                .true_colour;
            let observed_colour = if noise_std == 0.0 {
                truth
            } else {
                let [r, g, b] = truth.channels();
                ColourValue::new(r + noise.sample(rng), g + noise.sample(rng), b + noise.sample(rng))
            };
            Percept {
                object_id: id,
                observed_colour,
            }
        })
        .collect();
    WorldModel { percepts }
}
