use std::time::Instant;
use wsm_core::chambers::{enumerate_chambers, WallKind};

fn main() {
    let max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    for n in 1..=max {
        for kind in [WallKind::Fine, WallKind::Coarse] {
            let t = Instant::now();
            let c = enumerate_chambers(n, kind).unwrap();
            println!("n={n} {kind:?}: {} chambers in {:?}", c.len(), t.elapsed());
        }
    }
}
