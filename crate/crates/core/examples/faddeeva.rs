//! Faddeeva function and complex erfc at a few points.
//!
//!     cargo run --example faddeeva

use pr_bounds::complex_special::{erfc_complex, faddeeva};
use pr_bounds::Complex64;

fn main() -> pr_bounds::Result<()> {
    let points = [
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 0.5),
        Complex64::new(-3.0, 0.01),
        Complex64::new(20.0, 5.0),
        Complex64::new(0.5, -0.5),
    ];
    println!("{:>16} {:>40}", "z", "w(z)");
    for z in points {
        println!("{z:>16} {:>40}", faddeeva(z)?);
    }
    // w(i) = e·erfc(1)
    let z = Complex64::new(1.0, 0.0);
    println!("erfc(1) = {}", erfc_complex(z)?);
    match faddeeva(Complex64::new(0.0, -30.0)) {
        Ok(w) => println!("w(-30i) = {w}"),
        Err(e) => println!("w(-30i): {e}"),
    }
    Ok(())
}
