//! Lists the registered systems and builds each one by name.

use expflow::systems::{self, registry, Fixture};

fn main() -> expflow::error::Result<()> {
    for info in registry() {
        println!("{:<40} {:<9} {}", info.name, info.kind, info.params);
    }
    // templates are instantiated by name
    for name in ["suspension(cat-map, wave(0.3))", "singular-suspension(full-2-shift, unit, const(2))"] {
        let kind = match systems::fixture(name)? {
            Fixture::Map(_) => "map",
            Fixture::Flow(_) => "flow",
        };
        println!("built {name} as a {kind}");
    }
    Ok(())
}
