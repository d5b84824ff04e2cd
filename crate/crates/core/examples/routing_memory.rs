//! Why routing tables do not fit a microrobot: the memory a per-package
//! routing ledger needs, against a 1 KB RAM budget.

use swarmlink::codec::{
    routing_feasible, routing_memory_bytes, MemoryModel, RoutingLedger, DEFAULT_RECORD_BYTES,
};

fn main() {
    println!("{:>9}  {:>6}  fits in 1 KB", "packages", "bytes");
    for packages in [50, 100, 200, 300, 341, 342, 400, 600] {
        let model = MemoryModel::new(packages);
        println!(
            "{packages:>9}  {:>6}  {}",
            routing_memory_bytes(packages, DEFAULT_RECORD_BYTES),
            routing_feasible(&model)
        );
    }

    // a bounded ledger forgets the oldest packages first
    let mut ledger = RoutingLedger::new(3);
    for pkg in 0..5u16 {
        ledger.insert(pkg, 7);
    }
    println!(
        "ledger of capacity 3 after 5 packages: remembers 0? {} 4? {} ({} bytes)",
        ledger.contains(0, 7),
        ledger.contains(4, 7),
        ledger.memory_bytes()
    );
}
