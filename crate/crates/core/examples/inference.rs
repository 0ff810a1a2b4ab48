//! Evaluates a fresh network and one with hand-set consequents over a grid
//! of `(e, ė)`, printing the output surface and the interval firing levels
//! at one point.
//!
//! ```text
//! cargo run --example inference
//! ```

use tractor_t2fnn::fuzzy::{NetworkConfig, T2FnnState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let floor = 1e-3;
    let mut net = T2FnnState::new(&NetworkConfig::default())?;
    // a rough PD-like surface: push against the sign of e and ė
    net.consequents = vec![0.6, 0.4, 0.2, 0.2, 0.0, -0.2, -0.2, -0.4, -0.6];

    let fs = net.fire(0.3, 2.0, floor);
    println!("firing at e = 0.3, e_dot = 2.0");
    for k in 0..9 {
        println!(
            "  rule {k}: lower {:.4} upper {:.4}  normalized {:.4} / {:.4}",
            fs.w_lower[k], fs.w_upper[k], fs.wt_lower[k], fs.wt_upper[k]
        );
    }
    println!("  output {:+.5} (ratio form {:+.5})", net.infer(&fs), net.infer_ratio_form(&fs));

    print!("\n  e \\ e_dot");
    let e_dots = [-10.0, -5.0, 0.0, 5.0, 10.0];
    for d in e_dots {
        print!("{d:>8.1}");
    }
    println!();
    for e in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        print!("{e:>10.2} ");
        for d in e_dots {
            print!("{:>8.3}", net.output(e, d, floor));
        }
        println!();
    }

    for q in [0.0, 0.5, 1.0] {
        net.q = q;
        println!("q = {q}: output at (0.3, 2.0) = {:+.5}", net.output(0.3, 2.0, floor));
    }
    Ok(())
}
