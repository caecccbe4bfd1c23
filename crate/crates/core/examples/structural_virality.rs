//! Structural virality of a few tree shapes. Broadcast-like trees score
//! near 2, long chains score high.
//!
//!     cargo run --example structural_virality

use cascadekit::cascades::{structural_virality, CascadeTree};

fn tree(parents: Vec<Option<u32>>) -> CascadeTree {
    CascadeTree::from_parents((0..parents.len() as u32).collect(), parents).unwrap()
}

fn main() {
    let n = 50u32;
    let shapes = [
        ("star", tree((0..n).map(|i| (i > 0).then_some(0)).collect())),
        ("path", tree((0..n).map(|i| i.checked_sub(1)).collect())),
        ("binary", tree((0..n).map(|i| i.checked_sub(1).map(|p| p / 2)).collect())),
    ];
    for (name, t) in &shapes {
        println!("{name:>7} ({} nodes): {:.4}", t.size(), structural_virality(t).unwrap());
    }
}
