//! Prints the fully expanded default scenario. Any subset of these keys is a
//! valid scenario file; missing keys take the values shown.
//!
//! ```text
//! cargo run --example default_scenario > my_scenario.json
//! ```

use tractor_t2fnn::sim::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{}", Scenario::default().to_json()?);
    Ok(())
}
