use hoinet_core::measures::analyze;
use hoinet_core::var::{build_star_model, StarConfig, StarVariant};

fn main() {
    for cfg in [
        StarConfig::new(StarVariant::Source),
        StarConfig::new(StarVariant::Sink),
        StarConfig::mediator(0.0),
        StarConfig::mediator(0.3),
    ] {
        let v = analyze(&build_star_model(&cfg).unwrap(), 20).unwrap();
        println!("{:?} a31={}", cfg.variant, cfg.a31);
        println!("  gradient  {:?}", v.gradient);
        for (k, (i, j)) in v.pairs().into_iter().enumerate() {
            println!("  link {}-{} mir {:.6} local {:.6}", i + 1, j + 1, v.mir[k], v.local_oir[k]);
        }
        println!("  oir {:.6}", v.oir);
    }
}
