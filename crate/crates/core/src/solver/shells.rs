//! Dyadic shells around the origin and the ladder of exit times.
//!
//! Radii are split into `I_{-1} = [1, inf)`, `I_q = [2^{-q-1}, 2^{-q})` and the
//! staggered `J_{-1} = [3/4, inf)`, `J_q = [3 2^{-q-3}, 3 2^{-q-2})`. Starting
//! in `I_{q_0}`, the tracker records alternating exits: `tau_k` leaves
//! `I_{q_k}`, landing in some `J_{qhat_k}`, and `lambda_{k+1}` leaves that
//! `J`, landing in `I_{q_{k+1}}`. Exits are recorded at the first sample
//! outside the current interval.

use serde::{Deserialize, Serialize};

/// Lower and upper envelope factors: on `[lambda_k, lambda_{k+1})` the radius
/// stays in `[B1, B2] 2^{-q_k}` (no upper bound when `q_k <= 1`).
pub const B1: f64 = 3.0 / 8.0;
pub const B2: f64 = 3.0 / 2.0;

/// Index `q` of the `I`-shell containing `r > 0`.
pub fn i_shell(r: f64) -> i32 {
    debug_assert!(r > 0.0);
    if r >= 1.0 {
        return -1;
    }
    let mut q = (-r.log2()).floor() as i32 - 1;
    // guard against rounding in log2
    while r < i_lower(q) {
        q += 1;
    }
    while q >= 0 && r >= i_upper(q) {
        q -= 1;
    }
    q.max(-1)
}

/// Index `q` of the `J`-shell containing `r > 0`.
pub fn j_shell(r: f64) -> i32 {
    debug_assert!(r > 0.0);
    if r >= 0.75 {
        return -1;
    }
    let mut q = (-(r / 3.0).log2()).ceil() as i32 - 3;
    while r < j_lower(q) {
        q += 1;
    }
    while q >= 0 && r >= j_upper(q) {
        q -= 1;
    }
    q.max(-1)
}

fn i_lower(q: i32) -> f64 {
    if q < 0 {
        1.0
    } else {
        2f64.powi(-q - 1)
    }
}
fn i_upper(q: i32) -> f64 {
    if q < 0 {
        f64::INFINITY
    } else {
        2f64.powi(-q)
    }
}
fn j_lower(q: i32) -> f64 {
    if q < 0 {
        0.75
    } else {
        3.0 * 2f64.powi(-q - 3)
    }
}
fn j_upper(q: i32) -> f64 {
    if q < 0 {
        f64::INFINITY
    } else {
        3.0 * 2f64.powi(-q - 2)
    }
}

fn in_i(q: i32, r: f64) -> bool {
    r >= i_lower(q) && r < i_upper(q)
}
fn in_j(q: i32, r: f64) -> bool {
    r >= j_lower(q) && r < j_upper(q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellEntry {
    pub q: i32,
    pub lambda: f64,
    pub tau: Option<f64>,
    /// `J`-shell entered at `tau`.
    pub q_hat: Option<i32>,
    /// Positions in the sampled sequence.
    pub lambda_pos: usize,
    pub tau_pos: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellTrace {
    pub entries: Vec<ShellEntry>,
    pub zero_hit: Option<f64>,
    pub b1: f64,
    pub b2: f64,
}

impl ShellTrace {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// `lambda_{k+1} - lambda_k` together with `q_k`, for complete shells.
    pub fn gaps(&self) -> Vec<(i32, f64)> {
        self.entries
            .windows(2)
            .map(|w| (w[0].q, w[1].lambda - w[0].lambda))
            .collect()
    }

    /// Sample positions `[lambda_pos_k, lambda_pos_{k+1})` of shell `k`; the last
    /// shell runs to `end`.
    pub fn span(&self, k: usize, end: usize) -> (usize, usize) {
        let start = self.entries[k].lambda_pos;
        let stop = self.entries.get(k + 1).map(|e| e.lambda_pos).unwrap_or(end);
        (start, stop)
    }

    /// List of violated invariants given the sampled times and radii.
    pub fn check_invariants(&self, times: &[f64], radii: &[f64]) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(first) = self.entries.first() {
            if first.lambda_pos != 0 {
                out.push(format!("lambda_0 at position {} instead of 0", first.lambda_pos));
            }
        }
        let end = self
            .zero_hit
            .and_then(|z| times.iter().position(|&t| t >= z))
            .unwrap_or(times.len());
        for (k, e) in self.entries.iter().enumerate() {
            if let Some(tau) = e.tau {
                if !(e.lambda < tau) {
                    out.push(format!("shell {k}: lambda {} is not before tau {tau}", e.lambda));
                }
                if let Some(next) = self.entries.get(k + 1) {
                    if tau > next.lambda {
                        out.push(format!("shell {k}: tau {tau} after next lambda {}", next.lambda));
                    }
                }
            }
            if let Some(next) = self.entries.get(k + 1) {
                let step = next.q - e.q;
                if !(-1..=1).contains(&step) {
                    out.push(format!("shell {k}: q jumps from {} to {}", e.q, next.q));
                }
            }
            let (a, b) = self.span(k, end);
            let lo = self.b1 * 2f64.powi(-e.q);
            let hi = if e.q <= 1 { f64::INFINITY } else { self.b2 * 2f64.powi(-e.q) };
            if let Some(p) = (a..b.min(radii.len())).find(|&p| radii[p] < lo || radii[p] > hi) {
                out.push(format!(
                    "shell {k} (q = {}): radius {} at t = {} outside [{lo}, {hi}]",
                    e.q, radii[p], times[p]
                ));
            }
        }
        out
    }

    /// Whether the last shell carries the largest `q` of the trace and it
    /// exceeds every `q` seen before the final `window` shells.
    pub fn approaches_zero(&self, window: usize) -> bool {
        let n = self.entries.len();
        if n <= window {
            return false;
        }
        let last = self.entries[n - 1].q;
        let before = self.entries[..n - window].iter().map(|e| e.q).max().unwrap_or(i32::MIN);
        let overall = self.entries.iter().map(|e| e.q).max().unwrap_or(i32::MIN);
        last == overall && last > before
    }
}

#[derive(Clone, Copy, Debug)]
enum Mode {
    Inner(i32),
    Outer(i32),
}

/// Online version of the exit-time construction.
#[derive(Clone, Debug)]
pub struct ShellTracker {
    entries: Vec<ShellEntry>,
    mode: Option<Mode>,
    zero_hit: Option<f64>,
    pos: usize,
}

impl Default for ShellTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl ShellTracker {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
            mode: None,
            zero_hit: None,
            pos: 0,
        }
    }

    /// Current `I`-shell index (the `q_k` of the open shell).
    pub fn current_q(&self) -> Option<i32> {
        self.entries.last().map(|e| e.q)
    }

    /// Feed the next sample. A zero radius ends the trace.
    pub fn push(&mut self, t: f64, r: f64) {
        let pos = self.pos;
        self.pos += 1;
        if self.zero_hit.is_some() {
            return;
        }
        if r == 0.0 {
            self.zero_hit = Some(t);
            return;
        }
        match self.mode {
            None => {
                let q = i_shell(r);
                self.entries.push(ShellEntry {
                    q,
                    lambda: t,
                    tau: None,
                    q_hat: None,
                    lambda_pos: pos,
                    tau_pos: None,
                });
                self.mode = Some(Mode::Inner(q));
            }
            Some(Mode::Inner(q)) => {
                if !in_i(q, r) {
                    let qh = j_shell(r);
                    let e = self.entries.last_mut().expect("open shell");
                    e.tau = Some(t);
                    e.tau_pos = Some(pos);
                    e.q_hat = Some(qh);
                    self.mode = Some(Mode::Outer(qh));
                }
            }
            Some(Mode::Outer(qh)) => {
                if !in_j(qh, r) {
                    let q = i_shell(r);
                    self.entries.push(ShellEntry {
                        q,
                        lambda: t,
                        tau: None,
                        q_hat: None,
                        lambda_pos: pos,
                        tau_pos: None,
                    });
                    self.mode = Some(Mode::Inner(q));
                }
            }
        }
    }

    /// Record a zero hit at time `t` without advancing the sample counter.
    pub fn mark_zero(&mut self, t: f64) {
        if self.zero_hit.is_none() {
            self.zero_hit = Some(t);
        }
    }

    pub fn finish(self) -> ShellTrace {
        ShellTrace {
            entries: self.entries,
            zero_hit: self.zero_hit,
            b1: B1,
            b2: B2,
        }
    }
}

/// Shell ladder of a sampled path `(t_p, |y_p|)`.
pub fn track_radii(times: &[f64], radii: &[f64]) -> ShellTrace {
    let mut tracker = ShellTracker::new();
    for (&t, &r) in times.iter().zip(radii) {
        tracker.push(t, r);
    }
    tracker.finish()
}
