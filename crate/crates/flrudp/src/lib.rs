//! Reliable NACK-based transport over unreliable datagrams, purpose-built for
//! federated-learning parameter exchange.
//!
//! A client serializes its model parameters, hex-encodes them, and bursts them
//! to the server as sequence-numbered DATA frames `(X, Np, A)`. The server
//! stores chunks per client, NACKs exactly the missing sequence numbers once
//! the declared last packet arrives, and answers a complete transfer with
//! `(0, 0, A)` before folding the received parameters into the global model by
//! pairwise federated averaging.
//!
//! The protocol core is sans-IO: [`sender::SenderSession`] and
//! [`receiver::ReceiverBuffer`] are pure state machines that translate events
//! into explicit action lists. Two drivers interpret those actions:
//!
//! - [`sim`] — a deterministic discrete-event simulator with configurable
//!   data rate, propagation delay, and drop plans;
//! - [`transport`] — the same state machines over real UDP sockets.

pub mod aggregate;
pub mod codec;
pub mod receiver;
pub mod rng;
pub mod sender;
pub mod sim;
pub mod trace;
pub mod transport;
pub mod wire;

pub use aggregate::{federated_average, pseudo_train, GlobalModelStore};
pub use codec::{ChunkSet, ModelParameters, Tensor};
pub use sim::{run_campaign, run_round, DropPlan, DropRule, SimConfig};
pub use wire::{Frame, FrameKind, NodeAddress};
