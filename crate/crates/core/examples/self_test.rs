//! The self test under a few seeds.
//!
//!     cargo run --release --example self_test

use pr_bounds::report::{self_test, SelfTestOptions};

fn main() {
    for seed in [0, 1, 2] {
        let report = self_test(&SelfTestOptions {
            seed,
            ..Default::default()
        });
        print!("{}", report.summary());
    }
}
