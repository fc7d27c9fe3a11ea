//! Human-readable serialization of one edge plus its two endpoints.
//!
//! Layout, with every bracketed part omitted when empty:
//!
//! ```text
//! <SubjKind> '<name>' <PREDICATE> [(k=v, ...)] <ObjKind> '<name>' [{subject: k=v, ...}] [{object: k=v, ...}]
//! ```
//!
//! Props are printed sorted by key. Internal bookkeeping props are skipped.

use std::fmt::Write;

use super::graph::{EdgeId, Graph, GraphError, Props, UID_PROP};

const HIDDEN_PROPS: &[&str] = &[UID_PROP];

fn clean(s: &str) -> String {
    s.split(char::is_control)
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_props(props: &Props) -> Option<String> {
    let parts: Vec<String> = props
        .iter()
        .filter(|(k, _)| !HIDDEN_PROPS.contains(&k.as_str()))
        .map(|(k, v)| format!("{k}={}", clean(&v.to_string())))
        .collect();
    (!parts.is_empty()).then(|| parts.join(", "))
}

impl Graph {
    pub fn serialize_fact(&self, id: EdgeId) -> Result<String, GraphError> {
        let edge = self.edge(id)?;
        let subj = self.node(edge.src)?;
        let obj = self.node(edge.dst)?;
        let mut out = format!("{} '{}' {}", subj.kind, clean(&subj.name), edge.kind);
        if let Some(p) = render_props(&edge.props) {
            write!(out, " ({p})").unwrap();
        }
        write!(out, " {} '{}'", obj.kind, clean(&obj.name)).unwrap();
        if let Some(p) = render_props(&subj.props) {
            write!(out, " {{subject: {p}}}").unwrap();
        }
        if let Some(p) = render_props(&obj.props) {
            write!(out, " {{object: {p}}}").unwrap();
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use crate::kg::{EdgeKind, Graph, NodeKind, Props};
    use crate::props;

    #[test]
    fn contains_fact_layout() {
        let mut g = Graph::new();
        let pie = g
            .add_node(NodeKind::Recipe, "Apple Pie", Props::new())
            .unwrap();
        let apple = g
            .add_node(
                NodeKind::Ingredient,
                "apple",
                props! {"kcal_per_100g" => 52.0},
            )
            .unwrap();
        let e = g
            .add_edge(
                pie,
                EdgeKind::Contains,
                apple,
                props! {"quantity" => 3.0, "unit" => "piece"},
            )
            .unwrap();
        assert_eq!(
            g.serialize_fact(e).unwrap(),
            "Recipe 'Apple Pie' CONTAINS (quantity=3, unit=piece) Ingredient 'apple' {object: kcal_per_100g=52}"
        );
        assert_eq!(g.serialize_fact(e).unwrap(), g.serialize_fact(e).unwrap());
    }

    #[test]
    fn no_empty_prop_artifacts() {
        let mut g = Graph::new();
        let r = g
            .add_node(NodeKind::Recipe, "Rösti", props! {"uid" => "r1"})
            .unwrap();
        let c = g
            .add_node(NodeKind::Cuisine, "swiss", Props::new())
            .unwrap();
        let e = g.add_edge(r, EdgeKind::IsPartOf, c, Props::new()).unwrap();
        let fact = g.serialize_fact(e).unwrap();
        assert_eq!(fact, "Recipe 'Rösti' IS_PART_OF Cuisine 'swiss'");
        assert!(!fact.contains("{}"));
        assert!(!fact.contains("()"));
    }

    #[test]
    fn subject_props_and_control_chars() {
        let mut g = Graph::new();
        let r = g
            .add_node(
                NodeKind::Recipe,
                "Soup",
                props! {"description" => "hot\nand\tthick"},
            )
            .unwrap();
        let s = g.add_node(NodeKind::Utensil, "pot", Props::new()).unwrap();
        let e = g.add_edge(r, EdgeKind::Uses, s, Props::new()).unwrap();
        assert_eq!(
            g.serialize_fact(e).unwrap(),
            "Recipe 'Soup' USES Utensil 'pot' {subject: description=hot and thick}"
        );
    }

    #[test]
    fn unknown_edge() {
        assert!(Graph::new().serialize_fact(crate::kg::EdgeId(0)).is_err());
    }
}
