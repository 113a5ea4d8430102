//! The full acceptance suite, one line per criterion (the same table as
//! `intertype corpus`).
//!
//! ```text
//! cargo run --release --example acceptance
//! ```

use intertype::acceptance::{render, run_all, Settings};

fn main() {
    print!("{}", render(&run_all(&Settings::default())));
}
