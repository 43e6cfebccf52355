use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use naming_game::conceptual::CategoryId;
use naming_game::embodiment::{Body, CallLog, Capability, EmbodimentHandle, RecordingBody, SimulatedBody};
use naming_game::engine::{
    align, choose_topic, run_experiment, select_pair, Agent, AgentId, Experiment, FailureReason, GameParams, GameState,
    InteractionRecord, PaletteSource,
};
use naming_game::error::ConfigError;
use naming_game::lexicon::Role;
use naming_game::world::{make_world, ColourValue, ObjectId, Percept, Scene, WorldModel};

fn percept(id: u32, r: f64, g: f64, b: f64) -> Percept {
    Percept {
        object_id: ObjectId(id),
        observed_colour: ColourValue::new(r, g, b),
    }
}

fn record(failure_reason: FailureReason, utterance: &str, topic: u32, pointed: Option<u32>) -> InteractionRecord {
    InteractionRecord {
        interaction_number: 1,
        speaker_id: AgentId(0),
        hearer_id: AgentId(1),
        scene: vec![ObjectId(0), ObjectId(1), ObjectId(2)],
        topic: ObjectId(topic),
        utterance: Some(utterance.to_owned()),
        pointed: pointed.map(ObjectId),
        success: failure_reason == FailureReason::None,
        failure_reason,
    }
}

#[test]
fn ordered_pairs_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = 100_000;
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for _ in 0..draws {
        let pair = select_pair(5, &mut rng).unwrap();
        assert_ne!(pair.0, pair.1);
        *counts.entry(pair).or_default() += 1;
    }
    assert_eq!(counts.len(), 20);
    for (pair, c) in counts {
        let freq = c as f64 / draws as f64;
        assert!((freq - 0.05).abs() <= 0.01, "{pair:?}: {freq}");
    }

    let mut first_speaks = 0;
    for _ in 0..10_000 {
        if select_pair(2, &mut rng).unwrap() == (0, 1) {
            first_speaks += 1;
        }
    }
    assert!((first_speaks as f64 / 10_000.0 - 0.5).abs() < 0.02);
    assert_eq!(select_pair(1, &mut rng), Err(ConfigError::PopulationTooSmall(1)));
}

#[test]
fn topics_are_uniform() {
    let model = WorldModel::new(vec![
        percept(0, 0.0, 0.0, 0.0),
        percept(3, 9.0, 9.0, 9.0),
        percept(5, 99.0, 0.0, 0.0),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut counts: HashMap<ObjectId, usize> = HashMap::new();
    for _ in 0..30_000 {
        *counts
            .entry(choose_topic(&model, &mut rng).unwrap().object_id)
            .or_default() += 1;
    }
    for c in counts.values() {
        assert!((*c as f64 / 30_000.0 - 1.0 / 3.0).abs() <= 0.02);
    }
    let single = WorldModel::new(vec![percept(4, 1.0, 2.0, 3.0)]);
    assert_eq!(choose_topic(&single, &mut rng).unwrap().object_id, ObjectId(4));
    assert!(choose_topic(&WorldModel::default(), &mut rng).is_none());

    let replay = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..100)
            .map(|_| choose_topic(&model, &mut rng).unwrap().object_id)
            .collect::<Vec<_>>()
    };
    assert_eq!(replay(5), replay(5));
}

#[test]
fn first_game_invents_then_hearer_adopts() {
    let mut experiment = Experiment::new(GameParams::default(), 17).unwrap();
    let record = experiment.run_interaction().unwrap();
    assert!(!record.success);
    assert_eq!(record.failure_reason, FailureReason::UnknownWord);
    assert_eq!(record.pointed, None);
    let form = record.utterance.clone().unwrap();

    let agents = experiment.population().agents();
    let speaker = &agents[record.speaker_id.0 as usize];
    let hearer = &agents[record.hearer_id.0 as usize];
    assert_eq!(speaker.ontology.len(), 1);
    assert_eq!(speaker.inventory.len(), 1);
    let used = &speaker.inventory.constructions()[0];
    assert_eq!(used.form, form);
    assert!((used.score - 0.4).abs() < 1e-12, "speaker punishes the failed word");

    assert_eq!(hearer.ontology.len(), 1);
    let adopted = &hearer.inventory.constructions()[0];
    assert_eq!(adopted.form, form);
    assert_eq!(adopted.score, 0.5);
    assert_eq!(adopted.category_id, hearer.ontology.categories()[0].id);

    // Both prototypes sit within sensor noise of the topic's true colour.
    let truth = experiment.world().object(record.topic).unwrap().true_colour;
    for agent in [speaker, hearer] {
        assert!(agent.ontology.categories()[0].prototype.distance(&truth) < 20.0);
    }
    for agent in agents {
        assert_eq!(agent.game, GameState::default());
    }
}

#[test]
fn converged_population_keeps_succeeding_without_inventing() {
    let params = GameParams {
        num_interactions: 0,
        ..GameParams::default()
    };
    let mut experiment = Experiment::new(params, 0).unwrap();
    for _ in 0..2000 {
        experiment.run_interaction().unwrap();
    }
    let tail = &experiment.records()[1950..];
    assert!(tail.iter().all(|r| r.success));
    let before = experiment.population().clone();
    for _ in 0..200 {
        let r = experiment.run_interaction().unwrap();
        assert!(r.success, "{r:?}");
    }
    for (a, b) in before.agents().iter().zip(experiment.population().agents()) {
        assert_eq!(a.ontology.len(), b.ontology.len());
        let forms = |x: &Agent| {
            x.inventory
                .constructions()
                .iter()
                .map(|c| c.form.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(forms(a), forms(b));
    }
}

#[test]
fn identical_colours_in_scene_abort_as_degenerate() {
    let params = GameParams {
        noise_std: 0.0,
        min_separation: 0.0,
        palette: PaletteSource::Fixed(vec![[10, 200, 30], [10, 200, 30], [0, 0, 255]]),
        objects_per_scene: 2,
        ..GameParams::default()
    };
    let colours: Vec<ColourValue> = [[10u8, 200, 30], [10, 200, 30], [0, 0, 255]]
        .map(ColourValue::from)
        .to_vec();
    let world = make_world(&colours, 2, 0.0).unwrap();
    let log = CallLog::new();
    let bodies: [EmbodimentHandle; 2] = [
        Box::new(RecordingBody::new(SimulatedBody::new("a", 0.0), log.clone())),
        Box::new(RecordingBody::new(SimulatedBody::new("b", 0.0), log.clone())),
    ];
    let mut experiment = Experiment::with_world(params, world, ChaCha8Rng::seed_from_u64(3), bodies).unwrap();
    let before = experiment.population().clone();
    let record = experiment
        .play(0, 1, &Scene::from_ids(vec![ObjectId(0), ObjectId(1)]))
        .unwrap();
    assert_eq!(record.failure_reason, FailureReason::Degenerate);
    assert!(!record.success);
    assert_eq!(record.utterance, None);
    assert_eq!(experiment.population(), &before);
    let calls: Vec<Capability> = log.drain().into_iter().map(|c| c.capability).collect();
    assert_eq!(
        calls,
        [
            Capability::Embody,
            Capability::Embody,
            Capability::ObserveWorld,
            Capability::ObserveWorld
        ]
    );

    // The same agents still play normally on a scene that can be discriminated.
    let record = experiment
        .play(0, 1, &Scene::from_ids(vec![ObjectId(0), ObjectId(2)]))
        .unwrap();
    assert_ne!(record.failure_reason, FailureReason::Degenerate);
}

#[test]
fn success_alignment_rewards_and_shifts() {
    let params = GameParams::default();
    let mut speaker = Agent::new(AgentId(0));
    let c1 = speaker.ontology.add(ColourValue::new(7.0, 246.0, 9.0)).id;
    speaker.inventory.add_construction("fusemo", c1, 0.5).unwrap();
    speaker.inventory.add_construction("ponuro", c1, 0.3).unwrap();
    let topic = percept(0, 5.0, 243.0, 2.0);
    speaker.game = GameState {
        topic: Some(topic),
        applied: Some(("fusemo".into(), c1)),
        ..GameState::default()
    };
    align(
        &mut speaker,
        Role::Speaker,
        &record(FailureReason::None, "fusemo", 0, Some(0)),
        &params,
    )
    .unwrap();
    assert!((speaker.inventory.get("fusemo", c1).unwrap().score - 0.6).abs() < 1e-12);
    assert!((speaker.inventory.get("ponuro", c1).unwrap().score - 0.2).abs() < 1e-12);
    let proto = speaker.ontology.get(c1).unwrap().prototype;
    let expected = ColourValue::new(7.0 - 0.1, 246.0 - 0.15, 9.0 - 0.35);
    assert!(proto.distance(&expected) < 1e-9, "{proto}");

    let mut hearer = Agent::new(AgentId(1));
    let h1 = hearer.ontology.add(ColourValue::new(4.0, 250.0, 0.0)).id;
    let h2 = hearer.ontology.add(ColourValue::new(250.0, 0.0, 0.0)).id;
    hearer.inventory.add_construction("fusemo", h1, 0.5).unwrap();
    hearer.inventory.add_construction("fusemo", h2, 0.2).unwrap();
    hearer.game = GameState {
        hypothesis: Some(percept(0, 6.0, 240.0, 4.0)),
        applied: Some(("fusemo".into(), h1)),
        ..GameState::default()
    };
    align(
        &mut hearer,
        Role::Hearer,
        &record(FailureReason::None, "fusemo", 0, Some(0)),
        &params,
    )
    .unwrap();
    assert!((hearer.inventory.get("fusemo", h1).unwrap().score - 0.6).abs() < 1e-12);
    assert!((hearer.inventory.get("fusemo", h2).unwrap().score - 0.1).abs() < 1e-12);
    assert!(
        hearer
            .ontology
            .get(h1)
            .unwrap()
            .prototype
            .distance(&ColourValue::new(4.1, 249.5, 0.2))
            < 1e-9
    );
    assert_eq!(
        hearer.ontology.get(h2).unwrap().prototype,
        ColourValue::new(250.0, 0.0, 0.0)
    );
}

#[test]
fn unknown_word_alignment_adopts_observed_colour() {
    let params = GameParams::default();
    let mut hearer = Agent::new(AgentId(1));
    hearer.game = GameState {
        world_model: Some(WorldModel::new(vec![
            percept(0, 5.0, 243.0, 2.0),
            percept(1, 250.0, 5.0, 5.0),
            percept(2, 10.0, 10.0, 240.0),
        ])),
        ..GameState::default()
    };
    align(
        &mut hearer,
        Role::Hearer,
        &record(FailureReason::UnknownWord, "fusemo", 0, None),
        &params,
    )
    .unwrap();
    assert_eq!(hearer.ontology.len(), 1);
    let category = &hearer.ontology.categories()[0];
    assert_eq!(category.prototype, ColourValue::new(5.0, 243.0, 2.0));
    let c = hearer.inventory.get("fusemo", category.id).unwrap();
    assert_eq!(c.score, 0.5);
}

#[test]
fn unknown_word_adoption_reuses_discriminating_category() {
    let params = GameParams::default();
    let mut hearer = Agent::new(AgentId(1));
    let green = hearer.ontology.add(ColourValue::new(0.0, 250.0, 0.0)).id;
    hearer.game = GameState {
        world_model: Some(WorldModel::new(vec![
            percept(0, 5.0, 243.0, 2.0),
            percept(1, 250.0, 5.0, 5.0),
        ])),
        ..GameState::default()
    };
    align(
        &mut hearer,
        Role::Hearer,
        &record(FailureReason::UnknownWord, "sobele", 0, None),
        &params,
    )
    .unwrap();
    assert_eq!(hearer.ontology.len(), 1);
    assert_eq!(hearer.inventory.get("sobele", green).unwrap().score, 0.5);
}

#[test]
fn wrong_referent_only_punishes() {
    let params = GameParams::default();
    let mut hearer = Agent::new(AgentId(1));
    let c = hearer.ontology.add(ColourValue::new(250.0, 0.0, 0.0)).id;
    hearer.inventory.add_construction("fusemo", c, 0.1).unwrap();
    hearer.game = GameState {
        world_model: Some(WorldModel::new(vec![
            percept(0, 5.0, 243.0, 2.0),
            percept(1, 250.0, 5.0, 5.0),
        ])),
        applied: Some(("fusemo".into(), c)),
        hypothesis: Some(percept(1, 250.0, 5.0, 5.0)),
        ..GameState::default()
    };
    align(
        &mut hearer,
        Role::Hearer,
        &record(FailureReason::WrongReferent, "fusemo", 0, Some(1)),
        &params,
    )
    .unwrap();
    assert!(hearer.inventory.is_empty());
    assert_eq!(hearer.ontology.len(), 1);
    assert_eq!(
        hearer.ontology.get(c).unwrap().prototype,
        ColourValue::new(250.0, 0.0, 0.0)
    );
}

#[test]
fn degenerate_alignment_changes_nothing() {
    let mut agent = Agent::new(AgentId(0));
    let c = agent.ontology.add(ColourValue::new(1.0, 1.0, 1.0)).id;
    agent.inventory.add_construction("fusemo", c, 0.5).unwrap();
    agent.game.applied = Some(("fusemo".into(), c));
    let before = agent.clone();
    let mut r = record(FailureReason::Degenerate, "fusemo", 0, None);
    r.utterance = None;
    align(&mut agent, Role::Speaker, &r, &GameParams::default()).unwrap();
    assert_eq!(agent, before);
    assert_eq!(agent.inventory.get("fusemo", CategoryId(0)).unwrap().score, 0.5);
}

#[test]
fn games_only_touch_the_two_players_and_records_are_consistent() {
    let mut experiment = Experiment::new(GameParams::default(), 99).unwrap();
    for _ in 0..500 {
        let before = experiment.population().clone();
        let r = experiment.run_interaction().unwrap();
        for (i, (a, b)) in before.agents().iter().zip(experiment.population().agents()).enumerate() {
            if i != r.speaker_id.0 as usize && i != r.hearer_id.0 as usize {
                assert_eq!(a, b);
            }
        }
        assert_eq!(r.success, r.pointed == Some(r.topic));
        if r.success {
            assert!(r.utterance.is_some());
            assert_eq!(r.failure_reason, FailureReason::None);
        } else {
            assert_ne!(r.failure_reason, FailureReason::None);
        }
        assert!(r.scene.contains(&r.topic));
    }
}

#[test]
fn runs_replay_from_seed() {
    let params = GameParams {
        num_interactions: 400,
        ..GameParams::default()
    };
    let a = run_experiment(&params, 5).unwrap();
    let b = run_experiment(&params, 5).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.series, b.series);
    assert_eq!(a.snapshots, b.snapshots);
    assert_eq!(a.population, b.population);
    let c = run_experiment(&params, 6).unwrap();
    assert_ne!(a.records, c.records);
}

#[test]
fn empty_run_leaves_agents_untouched() {
    let params = GameParams {
        num_interactions: 0,
        ..GameParams::default()
    };
    let out = run_experiment(&params, 1).unwrap();
    assert!(out.records.is_empty());
    assert!(out.series.is_empty());
    assert!(out.snapshots.is_empty());
    for agent in out.population.agents() {
        assert!(agent.ontology.is_empty());
        assert!(agent.inventory.is_empty());
    }
}

#[test]
fn snapshots_taken_at_configured_points() {
    let params = GameParams {
        num_interactions: 120,
        snapshot_points: vec![10, 100, 500],
        snapshot_agents: naming_game::engine::SnapshotAgents::One(2),
        ..GameParams::default()
    };
    let out = run_experiment(&params, 3).unwrap();
    let at: Vec<usize> = out.snapshots.iter().map(|s| s.interaction_number).collect();
    assert_eq!(at, vec![10, 100]);
    assert!(out.snapshots.iter().all(|s| s.agent_id == AgentId(2)));
    let last = out.snapshots.last().unwrap();
    let agent = &out.population.agents()[2];
    // Every snapshot form existed in the agent's inventory at that time; by
    // interaction 120 the snapshot at 100 can only have lost forms, not gained.
    for entry in &last.entries {
        for f in &entry.forms {
            assert!(f.score > 0.0 && f.score <= 1.0);
        }
    }
    assert!(agent.ontology.len() >= last.entries.len());
}

#[test]
fn random_palette_mode_runs() {
    let params = GameParams {
        palette: PaletteSource::Random { size: 6 },
        num_interactions: 50,
        ..GameParams::default()
    };
    let a = run_experiment(&params, 8).unwrap();
    let b = run_experiment(&params, 8).unwrap();
    assert_eq!(a.world, b.world);
    assert_eq!(a.world.objects().len(), 6);
    assert_eq!(a.records, b.records);
}

#[test]
fn invalid_params_fail_before_first_game() {
    let bad = GameParams {
        population_size: 1,
        ..GameParams::default()
    };
    assert!(run_experiment(&bad, 0).is_err());
    let bad = GameParams {
        backend: "nao-live".into(),
        ..GameParams::default()
    };
    assert!(run_experiment(&bad, 0).is_err());
    let bad = GameParams {
        palette: PaletteSource::Fixed(vec![[0, 0, 0], [5, 5, 5]]),
        objects_per_scene: 2,
        ..GameParams::default()
    };
    assert!(run_experiment(&bad, 0).is_err());
}

#[test]
fn bodies_are_swappable_behind_the_trait() {
    struct Counting {
        inner: SimulatedBody,
        calls: usize,
    }
    impl Body for Counting {
        fn identity(&self) -> &str {
            self.inner.identity()
        }
        fn backend_kind(&self) -> naming_game::embodiment::BackendKind {
            self.inner.backend_kind()
        }
        fn embody(&mut self, agent: AgentId) {
            self.calls += 1;
            self.inner.embody(agent)
        }
        fn observe_world(
            &mut self,
            world: &naming_game::world::World,
            scene: &Scene,
            rng: &mut dyn rand::RngCore,
        ) -> WorldModel {
            self.calls += 1;
            self.inner.observe_world(world, scene, rng)
        }
        fn speak(
            &mut self,
            channel: &mut naming_game::embodiment::UtteranceChannel,
            utterance: &str,
        ) -> Result<bool, naming_game::error::ProtocolError> {
            self.inner.speak(channel, utterance)
        }
        fn hear(
            &mut self,
            channel: &mut naming_game::embodiment::UtteranceChannel,
        ) -> Result<String, naming_game::error::ProtocolError> {
            self.inner.hear(channel)
        }
        fn point(&mut self, object: ObjectId) -> Result<ObjectId, naming_game::error::ProtocolError> {
            self.inner.point(object)
        }
        fn nod(&mut self) -> bool {
            self.inner.nod()
        }
    }
    let bodies: [EmbodimentHandle; 2] = [
        Box::new(Counting {
            inner: SimulatedBody::new("x", 3.0),
            calls: 0,
        }),
        Box::new(Counting {
            inner: SimulatedBody::new("y", 3.0),
            calls: 0,
        }),
    ];
    let mut custom = Experiment::with_bodies(GameParams::default(), 12, bodies).unwrap();
    let mut stock = Experiment::new(GameParams::default(), 12).unwrap();
    for _ in 0..100 {
        assert_eq!(custom.run_interaction().unwrap(), stock.run_interaction().unwrap());
    }
}
