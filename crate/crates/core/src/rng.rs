//! Counter-based random streams.
//!
//! Every replicate draws from Philox4x32-10 streams keyed by the experiment
//! seed. The 128-bit counter is laid out as `[block_lo, block_hi, replicate,
//! role]`, so a stream is a pure function of `(seed, replicate, role)` and the
//! number of values consumed so far. Results therefore do not depend on how
//! replicates are scheduled across threads.

use rand::rand_core::{impls, RngCore};

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

#[inline(always)]
fn round(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
    let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
    [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0]
}

/// The Philox4x32 bijection with 10 rounds.
pub fn philox4x32_10(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    ctr = round(ctr, key);
    for _ in 1..10 {
        key[0] = key[0].wrapping_add(PHILOX_W0);
        key[1] = key[1].wrapping_add(PHILOX_W1);
        ctr = round(ctr, key);
    }
    ctr
}

/// What a stream is used for. Separate roles keep the reinforcement noise
/// independent of the color draws by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum StreamRole {
    Color = 0,
    Noise = 1,
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: [u32; 2],
    replicate: u32,
    role: u32,
    block: u64,
    buf: [u32; 4],
    pos: usize,
}

impl CounterRng {
    pub fn new(seed: u64, replicate: u32, role: StreamRole) -> Self {
        CounterRng {
            key: [seed as u32, (seed >> 32) as u32],
            replicate,
            role: role as u32,
            block: 0,
            buf: [0; 4],
            pos: 4,
        }
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u64 {
        if self.block == 0 {
            0
        } else {
            self.block * 4 - (4 - self.pos as u64)
        }
    }

    fn refill(&mut self) {
        let ctr = [self.block as u32, (self.block >> 32) as u32, self.replicate, self.role];
        self.buf = philox4x32_10(ctr, self.key);
        self.block += 1;
        self.pos = 0;
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        if self.pos == 4 {
            self.refill();
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        v
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let lo = self.next_u32() as u64;
        let hi = self.next_u32() as u64;
        (hi << 32) | lo
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        impls::fill_bytes_via_next(self, dst)
    }
}

/// The pair of streams owned by one replicate.
#[derive(Debug, Clone)]
pub struct ReplicateStreams {
    pub color: CounterRng,
    pub noise: CounterRng,
}

impl ReplicateStreams {
    pub fn new(seed: u64, replicate: u32) -> Self {
        ReplicateStreams {
            color: CounterRng::new(seed, replicate, StreamRole::Color),
            noise: CounterRng::new(seed, replicate, StreamRole::Noise),
        }
    }
}
