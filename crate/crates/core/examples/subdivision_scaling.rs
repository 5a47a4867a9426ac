//! The chain on a subdivided tree seen only at the original vertices is the
//! chain with `p' = 1 - (1-p)^k`.
//!
//!     cargo run --example subdivision_scaling

use treerep::rational::q;
use treerep::representability::scaling_check;
use treerep::tree::{path, star};

fn main() -> treerep::Result<()> {
    for (name, t) in [("path:3", path(3)?), ("star:3", star(3)?)] {
        for k in 1..=3 {
            let ok = scaling_check(&t, &q(1, 3), &q(1, 4), k)?;
            println!("{name} k = {k}: {}", if ok { "equal" } else { "DIFFERENT" });
        }
    }
    Ok(())
}
