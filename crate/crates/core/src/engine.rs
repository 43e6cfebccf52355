//! Population, pair selection and the interaction script.
//!
//! One game runs these steps in order:
//!
//! 1. both agents are embodied (speaker in the first body, hearer in the second)
//! 2. both observe the scene through their own body
//! 3. the speaker picks a topic
//! 4. the speaker conceptualises it, inventing a category if needed
//! 5. the speaker produces a word, inventing one if needed
//! 6. the utterance passes from speaker body to hearer body
//! 7. the hearer comprehends the word
//! 8. the hearer interprets the resulting network in its own world model
//! 9. the hearer points at its hypothesis, if it has one
//! 10. the speaker nods on success, otherwise points at the topic
//! 11. both agents align

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conceptual::{CategoryId, Ontology, SemanticNetwork};
use crate::embodiment::{make_body, EmbodimentHandle, UtteranceChannel};
use crate::error::{ConfigError, Result};
use crate::lexicon::{ConstructionInventory, Role};
use crate::monitors::{compute_series_point, take_snapshot, LexiconSnapshot, SeriesPoint};
use crate::world::{make_world, random_palette, ColourValue, ObjectId, Percept, World, WorldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agent-{}", self.0)
    }
}

/// Where the colours of the world come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PaletteSource {
    Fixed(Vec<[u8; 3]>),
    /// Rejection-sampled from the run's random stream.
    Random {
        size: usize,
    },
}

/// Which agents get lexicon snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotAgents {
    All,
    One(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameParams {
    pub population_size: usize,
    pub palette: PaletteSource,
    pub min_separation: f64,
    pub objects_per_scene: usize,
    pub num_interactions: usize,
    pub noise_std: f64,
    pub initial_score: f64,
    pub inc: f64,
    pub inh: f64,
    pub dec: f64,
    pub shift_rate: f64,
    pub window: usize,
    /// Record a series point every this many games.
    pub sample_interval: usize,
    pub snapshot_points: Vec<usize>,
    pub snapshot_agents: SnapshotAgents,
    pub backend: String,
}

impl Default for GameParams {
    fn default() -> Self {
        GameParams {
            population_size: 5,
            palette: PaletteSource::Fixed(crate::world::default_palette()),
            min_separation: crate::world::DEFAULT_MIN_SEPARATION,
            objects_per_scene: 3,
            num_interactions: 1000,
            noise_std: 3.0,
            initial_score: crate::lexicon::DEFAULT_INITIAL_SCORE,
            inc: 0.1,
            inh: 0.1,
            dec: 0.1,
            shift_rate: 0.05,
            window: 50,
            sample_interval: 1,
            snapshot_points: vec![10, 20, 40, 100, 250],
            snapshot_agents: SnapshotAgents::All,
            backend: "simulated".to_owned(),
        }
    }
}

fn out_of_range(field: &'static str, value: impl fmt::Display, expected: &'static str) -> ConfigError {
    ConfigError::OutOfRange {
        field,
        value: value.to_string(),
        expected,
    }
}

impl GameParams {
    /// Range checks that do not depend on the palette contents.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 2 {
            return Err(ConfigError::PopulationTooSmall(self.population_size));
        }
        let unit = |field, v: f64, lo_open: bool| {
            let ok = v.is_finite() && if lo_open { v > 0.0 } else { v >= 0.0 } && v <= 1.0;
            if ok {
                Ok(())
            } else if lo_open {
                Err(out_of_range(field, v, "(0, 1]"))
            } else {
                Err(out_of_range(field, v, "[0, 1]"))
            }
        };
        unit("initial_score", self.initial_score, true)?;
        unit("inc", self.inc, false)?;
        unit("inh", self.inh, false)?;
        unit("dec", self.dec, false)?;
        unit("shift_rate", self.shift_rate, false)?;
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(out_of_range("noise_std", self.noise_std, "finite and >= 0"));
        }
        if !(self.min_separation.is_finite() && self.min_separation >= 0.0) {
            return Err(out_of_range("min_separation", self.min_separation, "finite and >= 0"));
        }
        if self.window == 0 {
            return Err(out_of_range("window", 0, ">= 1"));
        }
        if self.sample_interval == 0 {
            return Err(out_of_range("sample_interval", 0, ">= 1"));
        }
        if let SnapshotAgents::One(index) = self.snapshot_agents {
            if index >= self.population_size {
                return Err(out_of_range(
                    "snapshot_agent",
                    index,
                    "an agent index below population_size",
                ));
            }
        }
        let palette_len = match &self.palette {
            PaletteSource::Fixed(p) => p.len(),
            PaletteSource::Random { size } => *size,
        };
        if palette_len == 0 {
            return Err(ConfigError::EmptyPalette);
        }
        if self.objects_per_scene == 0 || self.objects_per_scene > palette_len {
            return Err(ConfigError::ObjectsPerScene {
                objects_per_scene: self.objects_per_scene,
                palette_len,
            });
        }
        self.backend.parse::<crate::embodiment::BackendKind>()?;
        Ok(())
    }
}

/// Per-game scratch state of one agent; cleared after every interaction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GameState {
    pub body: Option<usize>,
    pub world_model: Option<WorldModel>,
    pub topic: Option<Percept>,
    pub network: Option<SemanticNetwork>,
    /// The construction this agent applied, as (form, category).
    pub applied: Option<(String, CategoryId)>,
    pub utterance: Option<String>,
    pub hypothesis: Option<Percept>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    pub ontology: Ontology,
    pub inventory: ConstructionInventory,
    pub game: GameState,
}

impl Agent {
    pub fn new(id: AgentId) -> Self {
        Agent {
            id,
            ontology: Ontology::new(),
            inventory: ConstructionInventory::new(),
            game: GameState::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    agents: Vec<Agent>,
}

impl Population {
    pub fn new(size: usize) -> Result<Self, ConfigError> {
        if size < 2 {
            return Err(ConfigError::PopulationTooSmall(size));
        }
        Ok(Population {
            agents: (0..size as u32).map(|i| Agent::new(AgentId(i))).collect(),
        })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agents_mut(&mut self) -> &mut [Agent] {
        &mut self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Mutable access to two distinct agents at once.
    pub fn pair_mut(&mut self, first: usize, second: usize) -> (&mut Agent, &mut Agent) {
        assert_ne!(first, second, "an agent cannot play against itself");
        if first < second {
            let (lo, hi) = self.agents.split_at_mut(second);
            (&mut lo[first], &mut hi[0])
        } else {
            let (lo, hi) = self.agents.split_at_mut(first);
            (&mut hi[0], &mut lo[second])
        }
    }
}

/// Draws a (speaker, hearer) pair of indices uniformly over ordered pairs.
pub fn select_pair(population_size: usize, rng: &mut dyn RngCore) -> Result<(usize, usize), ConfigError> {
    if population_size < 2 {
        return Err(ConfigError::PopulationTooSmall(population_size));
    }
    let speaker = rng.random_range(0..population_size);
    let mut hearer = rng.random_range(0..population_size - 1);
    if hearer >= speaker {
        hearer += 1;
    }
    Ok((speaker, hearer))
}

/// Uniform choice among the percepts of the speaker's world model.
pub fn choose_topic(model: &WorldModel, rng: &mut dyn RngCore) -> Option<Percept> {
    if model.is_empty() {
        return None;
    }
    Some(model.percepts()[rng.random_range(0..model.len())])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    None,
    UnknownWord,
    WrongReferent,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub interaction_number: usize,
    pub speaker_id: AgentId,
    pub hearer_id: AgentId,
    pub scene: Vec<ObjectId>,
    pub topic: ObjectId,
    pub utterance: Option<String>,
    /// What the hearer pointed at, if it formed a hypothesis.
    pub pointed: Option<ObjectId>,
    pub success: bool,
    pub failure_reason: FailureReason,
}

/// Conceptualises `topic`, inventing a category when no existing one
/// discriminates it. Returns `None` when even a new category cannot, in
/// which case the ontology is left as it was.
fn conceptualise_or_invent(ontology: &mut Ontology, topic: &Percept, model: &WorldModel) -> Option<SemanticNetwork> {
    if let Some(network) = ontology.conceptualise(topic, model) {
        return Some(network);
    }
    let invented = ontology.invent_category(topic);
    match ontology.conceptualise(topic, model) {
        Some(network) => Some(network),
        None => {
            ontology.retract_latest(invented.id);
            None
        }
    }
}

/// Post-game learning for one agent.
///
/// The agent's [`GameState`] must hold what it did during the game: its
/// world model, the construction it applied and (speaker) its topic percept
/// or (hearer) its hypothesis.
pub fn align(agent: &mut Agent, role: Role, record: &InteractionRecord, params: &GameParams) -> Result<()> {
    match record.failure_reason {
        FailureReason::Degenerate => Ok(()),
        FailureReason::None => {
            let (form, category) = agent
                .game
                .applied
                .clone()
                .expect("a successful game applies a construction on both sides");
            agent
                .inventory
                .reward_and_inhibit(&form, category, role, params.inc, params.inh)?;
            let observed = match role {
                Role::Speaker => agent.game.topic,
                Role::Hearer => agent.game.hypothesis,
            }
            .expect("a successful game has a topic and a hypothesis")
            .observed_colour;
            agent.ontology.shift_prototype(category, &observed, params.shift_rate)?;
            Ok(())
        }
        FailureReason::WrongReferent | FailureReason::UnknownWord => {
            if let Some((form, category)) = agent.game.applied.clone() {
                agent.inventory.punish(&form, category, params.dec)?;
            }
            if role == Role::Hearer && record.failure_reason == FailureReason::UnknownWord {
                adopt(agent, record, params)?;
            }
            Ok(())
        }
    }
}

/// Hearer-side adoption of an unknown word for the object the speaker pointed at.
fn adopt(agent: &mut Agent, record: &InteractionRecord, params: &GameParams) -> Result<()> {
    let form = record
        .utterance
        .as_deref()
        .expect("an unknown-word failure carries the utterance");
    let model = agent.game.world_model.as_ref().expect("the hearer observed the scene");
    let pointed = *model
        .get(record.topic)
        .expect("the speaker points inside the shared scene");
    let Some(network) = conceptualise_or_invent(&mut agent.ontology, &pointed, model) else {
        return Ok(());
    };
    if agent.inventory.get(form, network.category_id).is_none() {
        agent
            .inventory
            .add_construction(form, network.category_id, params.initial_score)?;
    }
    Ok(())
}

/// Everything produced by one experimental run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<InteractionRecord>,
    pub series: Vec<SeriesPoint>,
    pub snapshots: Vec<LexiconSnapshot>,
    pub population: Population,
    pub world: World,
}

/// A single experimental run: world, population, two bodies and one random stream.
pub struct Experiment {
    params: GameParams,
    world: World,
    population: Population,
    bodies: [EmbodimentHandle; 2],
    rng: ChaCha8Rng,
    records: Vec<InteractionRecord>,
}

impl Experiment {
    pub fn new(params: GameParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let bodies = [
            make_body(&params.backend, "body-0", params.noise_std)?,
            make_body(&params.backend, "body-1", params.noise_std)?,
        ];
        Self::with_bodies(params, seed, bodies)
    }

    /// Like [`Experiment::new`] but with caller-supplied bodies.
    pub fn with_bodies(params: GameParams, seed: u64, bodies: [EmbodimentHandle; 2]) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let palette = match &params.palette {
            PaletteSource::Fixed(p) => p.clone(),
            PaletteSource::Random { size } => random_palette(*size, params.min_separation, &mut rng)?,
        };
        let palette: Vec<ColourValue> = palette.into_iter().map(ColourValue::from).collect();
        let world = make_world(&palette, params.objects_per_scene, params.min_separation)?;
        Self::with_world(params, world, rng, bodies)
    }

    /// Runs games in an explicitly constructed world.
    pub fn with_world(
        params: GameParams,
        world: World,
        rng: ChaCha8Rng,
        bodies: [EmbodimentHandle; 2],
    ) -> Result<Self> {
        params.validate()?;
        let population = Population::new(params.population_size)?;
        Ok(Experiment {
            params,
            world,
            population,
            bodies,
            rng,
            records: Vec::new(),
        })
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn population_mut(&mut self) -> &mut Population {
        &mut self.population
    }

    pub fn records(&self) -> &[InteractionRecord] {
        &self.records
    }

    pub fn interactions_played(&self) -> usize {
        self.records.len()
    }

    /// Plays one game between a randomly drawn pair.
    pub fn run_interaction(&mut self) -> Result<InteractionRecord> {
        let (speaker, hearer) = select_pair(self.population.len(), &mut self.rng)?;
        let scene = self.world.sample_scene(&mut self.rng);
        self.play(speaker, hearer, &scene)
    }

    /// Plays one game between the given agents on the given scene.
    pub fn play(
        &mut self,
        speaker_index: usize,
        hearer_index: usize,
        scene: &crate::world::Scene,
    ) -> Result<InteractionRecord> {
        let interaction_number = self.records.len() + 1;
        let params = &self.params;
        let rng = &mut self.rng;
        let [speaker_body, hearer_body] = &mut self.bodies;
        let (speaker, hearer) = self.population.pair_mut(speaker_index, hearer_index);

        // 1
        speaker_body.embody(speaker.id);
        speaker.game.body = Some(0);
        hearer_body.embody(hearer.id);
        hearer.game.body = Some(1);

        // 2
        let speaker_model = speaker_body.observe_world(&self.world, scene, rng);
        let hearer_model = hearer_body.observe_world(&self.world, scene, rng);
        speaker.game.world_model = Some(speaker_model.clone());
        hearer.game.world_model = Some(hearer_model.clone());

        // 3
        let topic = choose_topic(&speaker_model, rng).expect("scenes are never empty");
        speaker.game.topic = Some(topic);

        let mut record = InteractionRecord {
            interaction_number,
            speaker_id: speaker.id,
            hearer_id: hearer.id,
            scene: scene.object_ids().to_vec(),
            topic: topic.object_id,
            utterance: None,
            pointed: None,
            success: false,
            failure_reason: FailureReason::Degenerate,
        };

        // 4
        let Some(network) = conceptualise_or_invent(&mut speaker.ontology, &topic, &speaker_model) else {
            speaker.game = GameState::default();
            hearer.game = GameState::default();
            self.records.push(record.clone());
            return Ok(record);
        };
        speaker.game.network = Some(network);

        // 5
        let category = network.category_id;
        let form = match speaker.inventory.produce(category) {
            Some(c) => c.form.clone(),
            None => {
                let form = speaker.inventory.invent_word_form(rng);
                speaker
                    .inventory
                    .add_construction(&form, category, params.initial_score)?;
                form
            }
        };
        speaker.game.applied = Some((form.clone(), category));
        speaker.game.utterance = Some(form.clone());
        record.utterance = Some(form.clone());

        // 6
        let mut channel = UtteranceChannel::new();
        speaker_body.speak(&mut channel, &form)?;
        let heard = hearer_body.hear(&mut channel)?;
        hearer.game.utterance = Some(heard.clone());

        // 7
        let comprehended = hearer
            .inventory
            .comprehend(&heard)
            .map(|c| (c.form.clone(), c.category_id));
        hearer.game.applied = comprehended.clone();

        // 8
        if let Some((_, category)) = &comprehended {
            let network = SemanticNetwork::new(*category);
            hearer.game.network = Some(network);
            hearer.game.hypothesis = hearer.ontology.interpret(&network, &hearer_model)?;
        }

        // 9
        if let Some(hypothesis) = hearer.game.hypothesis {
            record.pointed = Some(hearer_body.point(hypothesis.object_id)?);
        }

        // 10
        record.success = record.pointed == Some(topic.object_id);
        record.failure_reason = if record.success {
            FailureReason::None
        } else if comprehended.is_none() {
            FailureReason::UnknownWord
        } else {
            FailureReason::WrongReferent
        };
        if record.success {
            speaker_body.nod();
        } else {
            speaker_body.point(topic.object_id)?;
        }

        // 11
        align(speaker, Role::Speaker, &record, params)?;
        align(hearer, Role::Hearer, &record, params)?;

        speaker.game = GameState::default();
        hearer.game = GameState::default();
        self.records.push(record.clone());
        Ok(record)
    }

    /// Plays `params.num_interactions` games, sampling the series and
    /// snapshots as configured.
    pub fn run(mut self) -> Result<RunOutput> {
        let mut series = Vec::new();
        let mut snapshots = Vec::new();
        for _ in 0..self.params.num_interactions {
            self.run_interaction()?;
            let at = self.records.len();
            if at.is_multiple_of(self.params.sample_interval) {
                series.push(compute_series_point(
                    &self.population,
                    &self.records,
                    at,
                    self.params.window,
                ));
            }
            if self.params.snapshot_points.contains(&at) {
                match self.params.snapshot_agents {
                    SnapshotAgents::All => {
                        snapshots.extend(self.population.agents().iter().map(|a| take_snapshot(a, at)))
                    }
                    SnapshotAgents::One(i) => snapshots.push(take_snapshot(&self.population.agents()[i], at)),
                }
            }
        }
        Ok(RunOutput {
            records: self.records,
            series,
            snapshots,
            population: self.population,
            world: self.world,
        })
    }
}

/// Builds and runs one experiment from `params` and `seed`.
pub fn run_experiment(params: &GameParams, seed: u64) -> Result<RunOutput> {
    Experiment::new(params.clone(), seed)?.run()
}
