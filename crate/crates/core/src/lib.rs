//! GUI-agent toolkit.
//!
//! The crate is organized around the life of a GUI interaction:
//!
//! - [`geometry`] — the normalized `[0, 1000]` coordinate grid, pixel
//!   conversions, and containment predicates.
//! - [`actions`] — the canonical 14-operation action space, platform
//!   subsets, function-call envelopes, and dialect unification.
//! - [`raa`] — reference-augmented annotation: inline markers binding
//!   response text to screen locations.
//! - [`protocol`] — episode state, history windows, and the
//!   reflection/reasoning/action/expectation cycle grammar.
//! - [`chat`] — the chat-completion client interface with an HTTP
//!   backend and a deterministic stub.
//! - [`synthesis`] — dataset standardization and reasoning-process
//!   construction pipelines producing SFT corpora.
//! - [`mockenv`] — a deterministic scripted GUI environment.
//! - [`harness`] — grounding-accuracy and episode-success evaluation.

pub mod actions;
pub mod chat;
pub mod fixtures;
pub mod geometry;
pub mod harness;
pub mod mockenv;
pub mod protocol;
pub mod raa;
pub mod synthesis;

pub use actions::{Action, ActionName, ActionSpaceConfig, FunctionCallEnvelope};
pub use chat::{ChatClient, ChatMessage, Role};
pub use geometry::{NormBox, NormPoint, PixelBox, PixelPoint, ScreenDims};
pub use protocol::{EpisodeState, Observation, ReasoningRecord, Scene, SceneElement, StepInput};
pub use synthesis::{RawTrajectory, SFTSample, SampleSource, TaskKind};
