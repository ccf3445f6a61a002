//! A deterministic simulated BSP machine with a cost ledger.
//!
//! The machine models `p` virtual processors executing a sequence of BSP
//! supersteps: local computation followed by a message exchange and barrier.
//! Three counters are accumulated:
//!
//! - `supersteps`: number of barriers,
//! - `comp`: sum over supersteps of the maximum declared computation of any
//!   processor in that superstep,
//! - `comm`: sum over supersteps of the maximum number of words sent or
//!   received by any processor in that superstep.
//!
//! Collectives charge exact sizes (constant factors of one) so that charge
//! ratios between algorithms are meaningful: a gather or broadcast of `S`
//! words costs `S` communication in one superstep, an `S`-item reduction
//! costs `S` communication over two supersteps (reduce-scatter plus
//! all-gather), and an all-to-all costs the largest per-processor
//! send/receive volume in one superstep. Messages a processor addresses to
//! itself are free.
//!
//! Processors are executed sequentially in index order inside a superstep;
//! any parallel execution must preserve per-processor RNG streams and the
//! fixed index-order reduction so that replays are bit-identical.

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: usize) -> u64 {
    debug_assert!(x >= 1);
    (usize::BITS - (x - 1).leading_zeros()) as u64
}

/// Declared cost of sorting `n` local keys: `n * ceil(log2 n)`.
pub fn local_sort_cost(n: usize) -> u64 {
    if n <= 1 {
        return 0;
    }
    n as u64 * ceil_log2(n)
}

/// Declared cost of histogramming `probes` keys against a sorted local
/// sequence of length `local`: one binary search per probe.
pub fn histogram_cost(probes: usize, local: usize) -> u64 {
    probes as u64 * ceil_log2(local + 1)
}

/// Declared cost of merging `n` received keys arriving as `ways` sorted
/// runs: `n * ceil(log2 ways)`.
pub fn merge_cost(n: usize, ways: usize) -> u64 {
    if ways <= 1 {
        return 0;
    }
    n as u64 * ceil_log2(ways)
}

/// Snapshot of the cost ledger counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CostReport {
    pub supersteps: u64,
    pub comp: u64,
    pub comm: u64,
    /// Number of all-to-all exchanges (subset of `supersteps`).
    pub alltoalls: u64,
}

impl CostReport {
    /// Component-wise difference, for phase measurements.
    pub fn since(&self, earlier: &CostReport) -> CostReport {
        CostReport {
            supersteps: self.supersteps - earlier.supersteps,
            comp: self.comp - earlier.comp,
            comm: self.comm - earlier.comm,
            alltoalls: self.alltoalls - earlier.alltoalls,
        }
    }

    /// Merges the report of a phase that ran on disjoint processor groups in
    /// parallel with other such phases: the slowest group determines every
    /// counter.
    pub fn max_merge(&self, other: &CostReport) -> CostReport {
        CostReport {
            supersteps: self.supersteps.max(other.supersteps),
            comp: self.comp.max(other.comp),
            comm: self.comm.max(other.comm),
            alltoalls: self.alltoalls.max(other.alltoalls),
        }
    }
}

/// Per-processor output of one superstep: declared computation cost plus an
/// outbox of `(destination, payload)` messages.
pub struct StepOutput<T> {
    pub comp: u64,
    pub outbox: Vec<(usize, Vec<T>)>,
}

/// The simulated machine: processor count plus the cost ledger.
#[derive(Debug)]
pub struct Machine {
    p: usize,
    supersteps: u64,
    comp_total: u64,
    comm_total: u64,
    alltoalls: u64,
}

impl Machine {
    pub fn new(p: usize) -> Machine {
        assert!(p >= 1, "machine needs at least one processor");
        Machine { p, supersteps: 0, comp_total: 0, comm_total: 0, alltoalls: 0 }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Runs one superstep. `step` is invoked once per processor in index
    /// order over `states` and returns the declared computation cost and the
    /// outbox. Inboxes are delivered atomically at the end: entry `d` holds
    /// `(source, payload)` pairs in source order.
    ///
    /// Addressing a destination `>= p` is a hard fault. Self-addressed
    /// messages are delivered but charged as zero words.
    pub fn superstep<S, T>(
        &mut self,
        states: &mut [S],
        mut step: impl FnMut(usize, &mut S) -> StepOutput<T>,
    ) -> Vec<Vec<(usize, Vec<T>)>> {
        assert_eq!(states.len(), self.p, "one state slot per processor");
        let mut inboxes: Vec<Vec<(usize, Vec<T>)>> = (0..self.p).map(|_| Vec::new()).collect();
        let mut max_comp = 0u64;
        let mut sent = vec![0u64; self.p];
        let mut recv = vec![0u64; self.p];
        for (src, state) in states.iter_mut().enumerate() {
            let out = step(src, state);
            max_comp = max_comp.max(out.comp);
            for (dst, payload) in out.outbox {
                assert!(dst < self.p, "superstep: message addressed to processor {dst} of {}", self.p);
                if dst != src {
                    sent[src] += payload.len() as u64;
                    recv[dst] += payload.len() as u64;
                }
                inboxes[dst].push((src, payload));
            }
        }
        let max_comm = (0..self.p).map(|i| sent[i].max(recv[i])).max().unwrap_or(0);
        self.supersteps += 1;
        self.comp_total += max_comp;
        self.comm_total += max_comm;
        inboxes
    }

    /// Declares computation performed inside the surrounding communication
    /// phase without introducing a barrier of its own. Charged by the
    /// max-over-processors rule.
    pub fn charge_comp(&mut self, per_proc: &[u64]) {
        assert_eq!(per_proc.len(), self.p);
        self.comp_total += per_proc.iter().copied().max().unwrap_or(0);
    }

    /// Collects every processor's contribution at `root`, ordered by
    /// processor index. One superstep; the communication charge is the total
    /// gathered size (zero when there are no peers).
    pub fn gather<T>(&mut self, contributions: Vec<Vec<T>>, root: usize) -> Vec<T> {
        assert_eq!(contributions.len(), self.p);
        assert!(root < self.p, "gather: root {root} out of range");
        let total: usize = contributions.iter().map(Vec::len).sum();
        self.supersteps += 1;
        if self.p > 1 {
            self.comm_total += total as u64;
        }
        let mut out = Vec::with_capacity(total);
        for c in contributions {
            out.extend(c);
        }
        out
    }

    /// Delivers a copy of `message` to every processor. One superstep; the
    /// communication charge is the message length (zero when there are no
    /// peers).
    pub fn broadcast<T: Clone>(&mut self, message: &[T]) -> Vec<Vec<T>> {
        self.supersteps += 1;
        if self.p > 1 {
            self.comm_total += message.len() as u64;
        }
        (0..self.p).map(|_| message.to_vec()).collect()
    }

    /// Elementwise sum of equal-length vectors, summed in processor index
    /// order. Charged as two supersteps (reduce-scatter plus all-gather)
    /// with communication equal to the vector length, uniformly even for
    /// `p = 1`.
    pub fn reduce_sum(&mut self, vectors: &[Vec<u64>]) -> Vec<u64> {
        assert_eq!(vectors.len(), self.p);
        let len = vectors.first().map_or(0, Vec::len);
        for v in vectors {
            assert_eq!(v.len(), len, "reduce_sum: length mismatch");
        }
        self.supersteps += 2;
        self.comm_total += len as u64;
        let mut acc = vec![0u64; len];
        for v in vectors {
            for (a, &x) in acc.iter_mut().zip(v) {
                *a += x;
            }
        }
        acc
    }

    /// Full exchange: `outboxes[src][dst]` is delivered as
    /// `inboxes[dst][src]`. One superstep; the communication charge is the
    /// maximum over processors of words sent or received, self-messages
    /// free.
    pub fn all_to_all<T>(&mut self, outboxes: Vec<Vec<Vec<T>>>) -> Vec<Vec<Vec<T>>> {
        assert_eq!(outboxes.len(), self.p);
        let mut sent = vec![0u64; self.p];
        let mut recv = vec![0u64; self.p];
        let mut inboxes: Vec<Vec<Vec<T>>> = (0..self.p).map(|_| Vec::new()).collect();
        for (src, row) in outboxes.into_iter().enumerate() {
            assert_eq!(row.len(), self.p, "all_to_all: outbox row {src} has wrong width");
            for (dst, payload) in row.into_iter().enumerate() {
                if dst != src {
                    sent[src] += payload.len() as u64;
                    recv[dst] += payload.len() as u64;
                }
                inboxes[dst].push(payload);
            }
        }
        let max_comm = (0..self.p).map(|i| sent[i].max(recv[i])).max().unwrap_or(0);
        self.supersteps += 1;
        self.comm_total += max_comm;
        self.alltoalls += 1;
        inboxes
    }

    /// Snapshot of the ledger; does not reset.
    pub fn ledger_report(&self) -> CostReport {
        CostReport {
            supersteps: self.supersteps,
            comp: self.comp_total,
            comm: self.comm_total,
            alltoalls: self.alltoalls,
        }
    }

    /// Folds the (parallel-group) `phase` report into this ledger, then
    /// counts nothing else; used by multi-stage drivers that run each
    /// processor group on its own sub-machine.
    pub fn absorb_parallel_phase(&mut self, phase: &CostReport) {
        self.supersteps += phase.supersteps;
        self.comp_total += phase.comp;
        self.comm_total += phase.comm;
        self.alltoalls += phase.alltoalls;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_machine_reports_zero() {
        let m = Machine::new(4);
        assert_eq!(m.ledger_report(), CostReport::default());
    }

    #[test]
    fn superstep_charges_max_receiver() {
        // p=4, every proc sends 3 words to proc 0: proc 0 receives 9.
        let mut m = Machine::new(4);
        let mut states = vec![(); 4];
        m.superstep(&mut states, |i, _| StepOutput {
            comp: 0,
            outbox: vec![(0usize, vec![i as u64; 3])],
        });
        let r = m.ledger_report();
        assert_eq!(r.supersteps, 1);
        assert_eq!(r.comm, 9);
    }

    #[test]
    fn superstep_without_messages_charges_comp_only() {
        let mut m = Machine::new(3);
        let mut states = vec![(); 3];
        m.superstep::<_, u64>(&mut states, |_, _| StepOutput { comp: 5, outbox: vec![] });
        let r = m.ledger_report();
        assert_eq!((r.supersteps, r.comp, r.comm), (1, 5, 0));
    }

    #[test]
    fn superstep_all_to_all_is_an_h_relation() {
        // 1 word to each of p-1 peers at p=8 charges 7.
        let mut m = Machine::new(8);
        let mut states = vec![(); 8];
        m.superstep(&mut states, |i, _| StepOutput {
            comp: 0,
            outbox: (0..8).filter(|&d| d != i).map(|d| (d, vec![0u64])).collect(),
        });
        assert_eq!(m.ledger_report().comm, 7);
    }

    #[test]
    #[should_panic]
    fn superstep_rejects_out_of_range_destination() {
        let mut m = Machine::new(2);
        let mut states = vec![(); 2];
        m.superstep(&mut states, |_, _| StepOutput { comp: 0, outbox: vec![(5, vec![1u64])] });
    }

    #[test]
    fn gather_charges_total_size() {
        let mut m = Machine::new(4);
        let data: Vec<Vec<u32>> = (0..4).map(|i| vec![i; 3]).collect();
        let out = m.gather(data, 0);
        assert_eq!(out.len(), 12);
        let r = m.ledger_report();
        assert_eq!((r.supersteps, r.comm), (1, 12));
    }

    #[test]
    fn gather_on_single_processor_is_free() {
        let mut m = Machine::new(1);
        let out = m.gather(vec![vec![1, 2, 3]], 0);
        assert_eq!(out, vec![1, 2, 3]);
        assert_eq!(m.ledger_report().comm, 0);
    }

    #[test]
    fn gather_of_nothing_charges_nothing() {
        let mut m = Machine::new(3);
        let out: Vec<u8> = m.gather(vec![vec![], vec![], vec![]], 1);
        assert!(out.is_empty());
        assert_eq!(m.ledger_report().comm, 0);
    }

    #[test]
    fn broadcast_mirrors_gather_charges() {
        let mut m = Machine::new(4);
        let copies = m.broadcast(&[7u64; 12]);
        assert_eq!(copies.len(), 4);
        assert!(copies.iter().all(|c| c.len() == 12));
        let r = m.ledger_report();
        assert_eq!((r.supersteps, r.comm), (1, 12));

        let mut single = Machine::new(1);
        single.broadcast(&[1u8, 2, 3]);
        assert_eq!(single.ledger_report().comm, 0);

        let mut empty = Machine::new(4);
        empty.broadcast::<u8>(&[]);
        assert_eq!(empty.ledger_report().comm, 0);
    }

    #[test]
    fn reduce_sum_is_elementwise_and_two_supersteps() {
        let mut m = Machine::new(2);
        let out = m.reduce_sum(&[vec![1, 3], vec![2, 2]]);
        assert_eq!(out, vec![3, 5]);
        let r = m.ledger_report();
        assert_eq!((r.supersteps, r.comm), (2, 2));
    }

    #[test]
    fn reduce_sum_of_zeros_is_zero() {
        let mut m = Machine::new(3);
        let out = m.reduce_sum(&[vec![0; 4], vec![0; 4], vec![0; 4]]);
        assert_eq!(out, vec![0; 4]);
    }

    #[test]
    fn reduce_sum_on_single_processor_still_charged() {
        let mut m = Machine::new(1);
        let out = m.reduce_sum(&[vec![4, 5, 6, 7, 8]]);
        assert_eq!(out, vec![4, 5, 6, 7, 8]);
        let r = m.ledger_report();
        assert_eq!((r.supersteps, r.comm), (2, 5));
    }

    #[test]
    #[should_panic]
    fn reduce_sum_rejects_length_mismatch() {
        let mut m = Machine::new(2);
        m.reduce_sum(&[vec![1], vec![1, 2]]);
    }

    #[test]
    fn all_to_all_uses_max_rule() {
        // Pattern 1: everyone sends 2 words to everyone else at p=3.
        let mut m = Machine::new(3);
        let boxes: Vec<Vec<Vec<u8>>> =
            (0..3).map(|_| (0..3).map(|_| vec![0u8; 2]).collect()).collect();
        m.all_to_all(boxes);
        assert_eq!(m.ledger_report().comm, 4);

        // Pattern 2: proc 0 sends 5 words to proc 1 only.
        let mut m = Machine::new(3);
        let mut boxes: Vec<Vec<Vec<u8>>> =
            (0..3).map(|_| (0..3).map(|_| Vec::new()).collect()).collect();
        boxes[0][1] = vec![0u8; 5];
        m.all_to_all(boxes);
        assert_eq!(m.ledger_report().comm, 5);

        // Pattern 3: skewed receiver; proc 2 receives 3+4, sends nothing.
        let mut m = Machine::new(3);
        let mut boxes: Vec<Vec<Vec<u8>>> =
            (0..3).map(|_| (0..3).map(|_| Vec::new()).collect()).collect();
        boxes[0][2] = vec![0u8; 3];
        boxes[1][2] = vec![0u8; 4];
        m.all_to_all(boxes);
        let r = m.ledger_report();
        assert_eq!(r.comm, 7);
        assert_eq!(r.alltoalls, 1);
    }

    #[test]
    fn ledger_accumulates_across_collectives() {
        let mut m = Machine::new(4);
        let data: Vec<Vec<u32>> = (0..4).map(|i| vec![i; 3]).collect();
        m.gather(data, 0);
        assert_eq!(m.ledger_report(), CostReport { supersteps: 1, comp: 0, comm: 12, alltoalls: 0 });
        m.reduce_sum(&[vec![0; 5], vec![0; 5], vec![0; 5], vec![0; 5]]);
        let r = m.ledger_report();
        assert_eq!(r.supersteps, 3);
        assert_eq!(r.comm, 17);
    }

    #[test]
    fn charge_comp_applies_max_rule_without_barrier() {
        let mut m = Machine::new(3);
        m.charge_comp(&[2, 9, 4]);
        let r = m.ledger_report();
        assert_eq!((r.supersteps, r.comp), (0, 9));
    }
}
