//! Rough timing harness for the heavy kernels. Usage:
//!   cargo run --release --example bench -- <lattice> <depth> <t>

use std::time::Instant;
use zetalat_core::catalog::catalog_lattice;
use zetalat_core::design::certify_lattice;
use zetalat_core::shells::{first_k_shell_data, shell_data, EnumConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("BW16");
    let depth: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let t: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(4);
    let cfg = EnumConfig::with_budget(500_000_000);

    let t0 = Instant::now();
    let l = catalog_lattice(name, None).unwrap();
    println!("construct: {:?}", t0.elapsed());

    let t1 = Instant::now();
    let data = first_k_shell_data(&l.gram, depth, cfg).unwrap();
    println!(
        "first {depth} shells (counts, incl. growth passes): {:?}; norms {:?}",
        t1.elapsed(),
        data.iter().map(|d| d.norm.to_string()).collect::<Vec<_>>()
    );

    let t2 = Instant::now();
    let bound = data.last().unwrap().norm.clone();
    let _ = shell_data(&l.gram, &bound, cfg).unwrap();
    println!("single count pass at bound {}: {:?}", bound, t2.elapsed());

    let t3 = Instant::now();
    let r = certify_lattice(&l, depth, t, cfg).unwrap();
    println!(
        "certify depth {depth} t<={t}: {:?}; strengths {:?}",
        t3.elapsed(),
        r.certificates.iter().map(|c| c.strength).collect::<Vec<_>>()
    );
}
