//! Parse/render round-trip properties over generated platforms and the
//! bundled models.

mod common;

use common::{gen_platform, load_model, GenConfig};
use itfkit_core::dsl::{parse, render};
use itfkit_core::model::flatten;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// parse(render(p)) is structurally equal to p, and a second render is
    /// byte-identical to the first.
    #[test]
    fn render_parse_round_trip(seed in any::<u64>()) {
        let p = gen_platform(seed, &GenConfig::default());
        let text = render(&p).unwrap();
        let reparsed = parse(&text, "roundtrip.pml").unwrap();
        prop_assert!(p.structurally_eq(&reparsed));
        prop_assert_eq!(render(&reparsed).unwrap(), text);
    }

    /// Flattening preserves the atomic component count and the link set,
    /// and is idempotent.
    #[test]
    fn flatten_preserves_counts(seed in any::<u64>()) {
        let p = gen_platform(seed, &GenConfig::default());
        let flat = flatten(&p).unwrap();
        prop_assert_eq!(flat.links().count(), p.links.len());

        fn atoms(components: &[itfkit_core::model::Component]) -> usize {
            components
                .iter()
                .map(|c| {
                    if c.role == itfkit_core::model::Role::Composite {
                        atoms(&c.children)
                    } else {
                        1
                    }
                })
                .sum()
        }
        prop_assert_eq!(flat.len(), atoms(&p.components));

        let again = flatten(&flat.to_platform()).unwrap();
        prop_assert_eq!(&again, &flat);
    }

    /// Rendering is available exactly for valid platforms.
    #[test]
    fn generated_platforms_validate(seed in any::<u64>()) {
        let p = gen_platform(seed, &GenConfig::default());
        prop_assert!(itfkit_core::validate_platform(&p).is_empty());
    }
}

#[test]
fn bundled_models_are_render_fixed_points() {
    for name in [
        "keystone.pml",
        "xavier.pml",
        "xavier_cpu.pml",
        "nvdla_passive.pml",
        "nvdla_small.pml",
        "nvdla_large.pml",
        "zynq.pml",
    ] {
        let p = load_model(name);
        let once = render(&p).unwrap();
        let reparsed = parse(&once, name).unwrap();
        let twice = render(&reparsed).unwrap();
        assert_eq!(once, twice, "{name} render is not a fixed point");
        assert!(p.structurally_eq(&reparsed), "{name} round-trip changed structure");
    }
}

fn golden(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden file {}: {e}", path.display()))
}

#[test]
fn xavier_render_matches_golden_file() {
    let p = load_model("xavier.pml");
    assert_eq!(render(&p).unwrap(), golden("xavier.pml.golden"));
}

#[test]
fn xavier_dot_matches_golden_file() {
    let p = load_model("xavier.pml");
    let dot = itfkit_core::report::export_dot(&p, None).unwrap();
    assert_eq!(dot, golden("xavier.dot.golden"));
}
