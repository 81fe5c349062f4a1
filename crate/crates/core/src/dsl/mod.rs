//! Textual front end for `.pml` platform description files.
//!
//! The grammar (UTF-8, `//` comments, whitespace-insensitive):
//!
//! ```text
//! model       = "platform" IDENT "{" { item } "}"
//! item        = atomic | composite | link | symmetry | application
//! atomic      = role IDENT [ "{" { attr } "}" ] ";"
//! role        = "initiator" | "target" | "transporter"
//! composite   = "composite" IDENT "{" { atomic | composite | link } "}"
//! attr        = "service" IDENT { "," IDENT } ";"
//!             | "capacity" NUMBER "Bps" ";"
//!             | "class" ("cots"|"cots_soft_ip"|"cots_hard_ip"|"custom")
//!                       ("simple"|"complex") [ STRING ] ";"
//! link        = "link" QID "->" QID ";"
//! symmetry    = "symmetry" IDENT "{" QID { "," QID } "}"
//! application = "application" IDENT "{" { txn } "}"
//! txn         = "transaction" IDENT ":" QID { "->" QID }
//!               "uses" IDENT [ "rate" NUMBER "/s" ] [ "size" NUMBER "B" ] ";"
//! QID         = IDENT { "." IDENT }
//! ```
//!
//! The trailing `;` of an atomic declaration is optional after an
//! attribute block. Numbers are unsigned decimal integers; units are
//! fixed (`B` bytes, `/s` per second, `Bps` bytes per second).

mod lexer;
mod parser;
mod render;

pub use parser::parse;
pub use render::render;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::DiagCode;
    use crate::model::Role;

    const MINIMAL: &str = "platform P { initiator C0; target M { service load; } link C0 -> M; }";

    #[test]
    fn minimal_model_parses() {
        let p = parse(MINIMAL, "min.pml").unwrap();
        assert_eq!(p.components.len(), 2);
        assert_eq!(p.links.len(), 1);
        assert_eq!(p.components[0].role, Role::Initiator);
    }

    #[test]
    fn unknown_reference_located_at_offending_token() {
        let text = "platform P {\n  initiator C0;\n  target M { service load; }\n  link C0 -> NOPE;\n}";
        let diags = parse(text, "bad.pml").unwrap_err();
        let d = diags
            .iter()
            .find(|d| d.code == DiagCode::UnknownComponent)
            .expect("unknown component diagnostic");
        assert_eq!(d.span.line, 4);
        assert_eq!(d.span.column, 14);
    }

    #[test]
    fn syntax_error_has_span_on_offending_line() {
        let text = "platform P {\n  initiator C0\n}";
        let diags = parse(text, "bad.pml").unwrap_err();
        assert_eq!(diags[0].code, DiagCode::Parse);
        assert_eq!(diags[0].span.line, 3);
    }

    #[test]
    fn duplicate_component_rejected() {
        let text = "platform P { initiator C0; initiator C0; target M { service load; } }";
        let diags = parse(text, "dup.pml").unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::DupId));
    }

    #[test]
    fn composite_links_resolve_locally() {
        let text = "platform P {
          composite Pack {
            initiator A;
            target M { service load; }
            link A -> M;
          }
        }";
        let p = parse(text, "c.pml").unwrap();
        assert_eq!(p.links.len(), 1);
        assert_eq!(p.links[0].from.as_str(), "Pack.A");
        assert_eq!(p.links[0].to.as_str(), "Pack.M");
    }

    #[test]
    fn transactions_parse_with_rate_and_size() {
        let text = "platform P {
          initiator C0;
          transporter BUS;
          target DDR { service load, store; capacity 1000 Bps; }
          link C0 -> BUS;
          link BUS -> DDR;
          application app {
            transaction t: C0 -> BUS -> DDR uses load rate 100/s size 64B;
          }
        }";
        let p = parse(text, "t.pml").unwrap();
        let t = &p.applications[0].transactions[0];
        assert_eq!(t.rate, 100);
        assert_eq!(t.payload, 64);
        assert_eq!(t.path.len(), 3);
    }

    #[test]
    fn render_is_a_fixed_point_on_minimal_model() {
        let p = parse(MINIMAL, "min.pml").unwrap();
        let text = render(&p).unwrap();
        let p2 = parse(&text, "min2.pml").unwrap();
        assert!(p.structurally_eq(&p2));
        assert_eq!(render(&p2).unwrap(), text);
    }

    #[test]
    fn declaration_order_does_not_matter() {
        let a = "platform P { initiator C0; target M { service load; } link C0 -> M; }";
        let b = "platform P { target M { service load; } initiator C0; link C0 -> M; }";
        let pa = parse(a, "a.pml").unwrap();
        let pb = parse(b, "b.pml").unwrap();
        assert_eq!(render(&pa).unwrap(), render(&pb).unwrap());
    }

    #[test]
    fn classification_round_trips_with_escapes() {
        let text = r#"platform P {
          initiator C0;
          target NV {
            service load;
            class cots_soft_ip complex "says \"hi\" \\ there";
          }
          link C0 -> NV;
        }"#;
        let p = parse(text, "esc.pml").unwrap();
        let rendered = render(&p).unwrap();
        let p2 = parse(&rendered, "esc2.pml").unwrap();
        assert!(p.structurally_eq(&p2));
    }

    #[test]
    fn invalid_platform_fails_parse_with_validation_diags() {
        let text = "platform P { initiator C0; }";
        let diags = parse(text, "v.pml").unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::NoTarget));
    }
}
