//! Representability phase diagram of the depth-2 octopus with three arms.
//! `+` marks representable parameters, `.` a negative witness.
//!
//!     cargo run --release --example phase_scan

use treerep::rational::{q, Q};
use treerep::representability::phase_scan;
use treerep::tree::octopus;

fn main() -> treerep::Result<()> {
    let t = octopus(3, 2)?;
    let rs: Vec<Q> = (1..20).map(|k| q(k, 20)).collect();
    let ps: Vec<Q> = (1..20).map(|k| q(k, 20)).collect();
    let pts = phase_scan(&t, &rs, &ps)?;
    println!("rows: r = 0.05 .. 0.95, columns: p = 0.05 .. 0.95");
    for (i, r) in rs.iter().enumerate() {
        let row: String = pts[i * ps.len()..(i + 1) * ps.len()]
            .iter()
            .map(|pt| if pt.verdict.representable { '+' } else { '.' })
            .collect();
        println!("{:>5} {row}", treerep::rational::fmt_decimal(r));
    }
    Ok(())
}
