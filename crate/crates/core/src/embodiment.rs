//! Hardware-independent body capabilities.
//!
//! Agents act in the world only through a [`Body`]: observing the scene,
//! speaking and hearing over an [`UtteranceChannel`], pointing and nodding.
//! The game engine is written against the trait, so a new backend only has
//! to implement it. The simulated backend perceives through the noisy
//! colour world; [`RecordingBody`] wraps any body and logs the calls made on it.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::engine::AgentId;
use crate::error::{ConfigError, ProtocolError};
use crate::lexicon::is_valid_word_form;
use crate::world::{perceive, ObjectId, Scene, World, WorldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Simulated,
}

impl BackendKind {
    pub const SUPPORTED: &'static [&'static str] = &["simulated"];

    pub fn name(&self) -> &'static str {
        match self {
            BackendKind::Simulated => "simulated",
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BackendKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simulated" => Ok(BackendKind::Simulated),
            other => Err(ConfigError::UnsupportedBackend {
                kind: other.to_owned(),
                supported: BackendKind::SUPPORTED.join(", "),
            }),
        }
    }
}

/// Carries one utterance from a speaking body to a hearing body.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UtteranceChannel {
    pending: Option<String>,
}

impl UtteranceChannel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pending(&self) -> Option<&str> {
        self.pending.as_deref()
    }

    fn put(&mut self, utterance: &str) -> Result<(), ProtocolError> {
        if let Some(pending) = &self.pending {
            return Err(ProtocolError::DoubleSpeak {
                pending: pending.clone(),
            });
        }
        if !is_valid_word_form(utterance) {
            return Err(ProtocolError::InvalidWordForm(utterance.to_owned()));
        }
        self.pending = Some(utterance.to_owned());
        Ok(())
    }

    fn take(&mut self) -> Result<String, ProtocolError> {
        self.pending.take().ok_or(ProtocolError::EmptyChannel)
    }
}

/// Capabilities a body offers to the agent currently embodied in it.
pub trait Body: Send {
    fn identity(&self) -> &str;

    fn backend_kind(&self) -> BackendKind;

    /// Associates `agent` with this body for the current game.
    fn embody(&mut self, agent: AgentId);

    fn observe_world(&mut self, world: &World, scene: &Scene, rng: &mut dyn RngCore) -> WorldModel;

    fn speak(&mut self, channel: &mut UtteranceChannel, utterance: &str) -> Result<bool, ProtocolError>;

    fn hear(&mut self, channel: &mut UtteranceChannel) -> Result<String, ProtocolError>;

    /// Points at an object of the last observed scene; the id is what the
    /// other agent observes.
    fn point(&mut self, object: ObjectId) -> Result<ObjectId, ProtocolError>;

    fn nod(&mut self) -> bool;

    fn shake_head(&mut self) -> bool {
        true
    }

    fn look_direction(&mut self, _direction: f64, _angle: f64) -> bool {
        true
    }
}

pub type EmbodimentHandle = Box<dyn Body>;

/// A body that perceives the simulated colour world with Gaussian sensor noise.
#[derive(Debug, Clone)]
pub struct SimulatedBody {
    identity: String,
    noise_std: f64,
    agent: Option<AgentId>,
    scene: Option<Scene>,
}

impl SimulatedBody {
    pub fn new(identity: impl Into<String>, noise_std: f64) -> Self {
        SimulatedBody {
            identity: identity.into(),
            noise_std,
            agent: None,
            scene: None,
        }
    }

    pub fn agent(&self) -> Option<AgentId> {
        self.agent
    }
}

impl Body for SimulatedBody {
    fn identity(&self) -> &str {
        &self.identity
    }

    fn backend_kind(&self) -> BackendKind {
        BackendKind::Simulated
    }

    fn embody(&mut self, agent: AgentId) {
        self.agent = Some(agent);
        self.scene = None;
    }

    fn observe_world(&mut self, world: &World, scene: &Scene, rng: &mut dyn RngCore) -> WorldModel {
        self.scene = Some(scene.clone());
        perceive(world, scene, self.noise_std, rng)
    }

    fn speak(&mut self, channel: &mut UtteranceChannel, utterance: &str) -> Result<bool, ProtocolError> {
        channel.put(utterance)?;
        Ok(true)
    }

    fn hear(&mut self, channel: &mut UtteranceChannel) -> Result<String, ProtocolError> {
        channel.take()
    }

    fn point(&mut self, object: ObjectId) -> Result<ObjectId, ProtocolError> {
        let scene = self
            .scene
            .as_ref()
            .ok_or_else(|| ProtocolError::NoScene(self.identity.clone()))?;
        if scene.contains(object) {
            Ok(object)
        } else {
            Err(ProtocolError::NotInScene(object))
        }
    }

    fn nod(&mut self) -> bool {
        true
    }
}

/// Creates a body of the named backend kind.
pub fn make_body(kind: &str, identity: &str, noise_std: f64) -> Result<EmbodimentHandle, ConfigError> {
    match kind.parse::<BackendKind>()? {
        BackendKind::Simulated => Ok(Box::new(SimulatedBody::new(identity, noise_std))),
    }
}

/// One capability invocation, as seen by a [`RecordingBody`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capability {
    Embody,
    ObserveWorld,
    Speak,
    Hear,
    Point,
    Nod,
    ShakeHead,
    LookDirection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallRecord {
    pub body: String,
    pub capability: Capability,
}

/// Shared, append-only log of capability calls across several bodies.
#[derive(Debug, Clone, Default)]
pub struct CallLog(Arc<Mutex<Vec<CallRecord>>>);

impl CallLog {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&self, body: &str, capability: Capability) {
        self.0.lock().unwrap().push(CallRecord {
            body: body.to_owned(),
            capability,
        });
    }

    /// Removes and returns everything logged so far.
    pub fn drain(&self) -> Vec<CallRecord> {
        std::mem::take(&mut *self.0.lock().unwrap())
    }

    pub fn snapshot(&self) -> Vec<CallRecord> {
        self.0.lock().unwrap().clone()
    }
}

/// Decorates a body and records every capability call into a [`CallLog`].
pub struct RecordingBody<B> {
    inner: B,
    log: CallLog,
}

impl<B: Body> RecordingBody<B> {
    pub fn new(inner: B, log: CallLog) -> Self {
        RecordingBody { inner, log }
    }

    fn record(&self, capability: Capability) {
        self.log.push(self.inner.identity(), capability);
    }
}

impl<B: Body> Body for RecordingBody<B> {
    fn identity(&self) -> &str {
        self.inner.identity()
    }

    fn backend_kind(&self) -> BackendKind {
        self.inner.backend_kind()
    }

    fn embody(&mut self, agent: AgentId) {
        self.record(Capability::Embody);
        self.inner.embody(agent)
    }

    fn observe_world(&mut self, world: &World, scene: &Scene, rng: &mut dyn RngCore) -> WorldModel {
        self.record(Capability::ObserveWorld);
        self.inner.observe_world(world, scene, rng)
    }

    fn speak(&mut self, channel: &mut UtteranceChannel, utterance: &str) -> Result<bool, ProtocolError> {
        self.record(Capability::Speak);
        self.inner.speak(channel, utterance)
    }

    fn hear(&mut self, channel: &mut UtteranceChannel) -> Result<String, ProtocolError> {
        self.record(Capability::Hear);
        self.inner.hear(channel)
    }

    fn point(&mut self, object: ObjectId) -> Result<ObjectId, ProtocolError> {
        self.record(Capability::Point);
        self.inner.point(object)
    }

    fn nod(&mut self) -> bool {
        self.record(Capability::Nod);
        self.inner.nod()
    }

    fn shake_head(&mut self) -> bool {
        self.record(Capability::ShakeHead);
        self.inner.shake_head()
    }

    fn look_direction(&mut self, direction: f64, angle: f64) -> bool {
        self.record(Capability::LookDirection);
        self.inner.look_direction(direction, angle)
    }
}

/// Message shapes for a remote body server. No client ships with this
/// crate; the types pin down the format a live backend would speak.
pub mod wire {
    use super::{Deserialize, Serialize};

    pub const SAY_ENDPOINT: &str = "/speech/say";

    /// Body of a POST to [`SAY_ENDPOINT`].
    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    pub struct SayRequest {
        pub speech: String,
    }

    /// Response of every capability endpoint.
    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    pub struct CapabilityResponse {
        pub success: bool,
    }
}
