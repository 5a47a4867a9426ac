//! Complementary Bell numbers, polylogarithm roots and the threshold table.
//!
//!     cargo run --example threshold_table

use treerep::rational::to_f64;
use treerep::thresholds::{complementary_bell, f_poly_last_sign_change, r_star_bracket, threshold_table};

fn main() -> treerep::Result<()> {
    let bells: Vec<String> = (0..=12).map(|n| complementary_bell(n).map(|b| b.to_string())).collect::<Result<_, _>>()?;
    println!("complementary Bell: {}", bells.join(", "));
    println!("{:>2} {:>6} {:>14} {:>14} {:>14} {:>14}", "n", "bell", "r_star", "r0", "r1", "last root of f");
    for row in threshold_table(3..=10)? {
        let r0 = row.r0.map_or("undefined".to_string(), |x| format!("{x:.10}"));
        let f_root = f_poly_last_sign_change(row.n, 4000, 1e-13)?.map_or("-".into(), |x| format!("{x:.10}"));
        println!("{:>2} {:>6} {:>14.10} {:>14} {:>14.10} {:>14}", row.n, row.bell_c, row.r_star, r0, row.r1, f_root);
    }
    let (lo, hi) = r_star_bracket(4, 1e-20)?;
    println!("r_star(4) in [{:.15}, {:.15}], sqrt 3 - 2 = {:.15}", to_f64(&lo), to_f64(&hi), 3f64.sqrt() - 2.0);
    Ok(())
}
