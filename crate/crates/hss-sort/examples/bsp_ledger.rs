//! The simulated BSP machine and its cost ledger: collectives charge exact
//! sizes, supersteps count barriers, and the ledger snapshot never resets.
//!
//! Run: cargo run --release -p hss-sort --example bsp_ledger

use hss_sort::bsp::StepOutput;
use hss_sort::Machine;

fn show(label: &str, m: &Machine) {
    let r = m.ledger_report();
    println!(
        "{label:<34} supersteps={:<3} comp={:<6} comm={:<6} alltoalls={}",
        r.supersteps, r.comp, r.comm, r.alltoalls
    );
}

fn main() {
    let p = 4;
    let mut m = Machine::new(p);
    show("fresh machine", &m);

    // A compute-only superstep: max rule over declared costs.
    let mut states = vec![(); p];
    m.superstep::<_, u64>(&mut states, |i, _| StepOutput {
        comp: 10 + i as u64,
        outbox: vec![],
    });
    show("compute superstep (max comp 13)", &m);

    // Gather 3 words from each processor: comm += 12.
    let data: Vec<Vec<u64>> = (0..p).map(|i| vec![i as u64; 3]).collect();
    let gathered = m.gather(data, 0);
    show(&format!("gather of {} words", gathered.len()), &m);

    // Broadcast those 12 words back out: comm += 12.
    m.broadcast(&gathered);
    show("broadcast of 12 words", &m);

    // An elementwise reduction is two supersteps (reduce-scatter +
    // all-gather) with comm = vector length.
    let vectors: Vec<Vec<u64>> = (0..p).map(|i| vec![i as u64; 5]).collect();
    let sum = m.reduce_sum(&vectors);
    show(&format!("reduce_sum of length {}", sum.len()), &m);

    // All-to-all charges the max words sent or received by any processor;
    // self-messages are free.
    let boxes: Vec<Vec<Vec<u64>>> =
        (0..p).map(|src| (0..p).map(|dst| vec![0u64; src + dst]).collect()).collect();
    m.all_to_all(boxes);
    show("skewed all-to-all", &m);
}
