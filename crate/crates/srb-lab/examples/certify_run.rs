//! Run the full certification chain on three models and print what each
//! verdict means. The linear model closes its rate chain but honestly
//! fails the asymptotic size budget at desk scale; the identity has
//! nothing to certify; the kicked twist map lands in between, with a real
//! neutral part and a couple of loose chain links.

use srb_lab::config::Config;
use srb_lab::pipeline::run_certify;

fn main() {
    for model in ["kind = \"cat\"", "kind = \"identity\"", "kind = \"standard\"\nkick = 1.2"] {
        let config: Config = toml::from_str(&format!("[model]\n{model}\n")).unwrap();
        config.validate().unwrap();
        let report = run_certify(&config, 7, false).unwrap();
        println!("{}: {:?} (exit {})", report.model, report.verdict, report.exit_code());
        if let Some(reason) = &report.reason {
            println!("  reason: {reason}");
        }
        if let Some(pilot) = report.pilot_rate {
            println!("  pilot rate {pilot:.4}");
        }
        if let Some(dec) = &report.decomposition {
            println!("  beta {:.4}, {} neutral segments", dec.beta, dec.neutral_segments);
        }
        for link in &report.chain {
            println!("  chain {}: {:.4} <= {:.4} + {:.4} -> {}", link.name, link.lhs, link.rhs, link.tol, link.holds);
        }
        for soft in &report.soft_failures {
            println!("  soft: {soft}");
        }
        println!();
    }
}
