//! Labeled random streams.
//!
//! Every stochastic role in a run draws from its own ChaCha stream, keyed by
//! `(seed, label)`. Adding draws to one role never perturbs the sequences seen
//! by the others, which keeps ablation variants comparable under a shared seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The stochastic roles inside a single optimizer run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamLabel {
    Init,
    Clustering,
    Selection,
    Strategy,
    Mutation,
    Replacement,
}

/// A deterministic random stream for one `(seed, label)` pair.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, label: StreamLabel) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(label as u64 + 1);
        Self { inner }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// The full set of streams owned by one run.
#[derive(Debug, Clone)]
pub struct RunRngs {
    pub init: RngStream,
    pub clustering: RngStream,
    pub selection: RngStream,
    pub strategy: RngStream,
    pub mutation: RngStream,
    pub replacement: RngStream,
}

impl RunRngs {
    pub fn new(seed: u64) -> Self {
        Self {
            init: RngStream::new(seed, StreamLabel::Init),
            clustering: RngStream::new(seed, StreamLabel::Clustering),
            selection: RngStream::new(seed, StreamLabel::Selection),
            strategy: RngStream::new(seed, StreamLabel::Strategy),
            mutation: RngStream::new(seed, StreamLabel::Mutation),
            replacement: RngStream::new(seed, StreamLabel::Replacement),
        }
    }
}
