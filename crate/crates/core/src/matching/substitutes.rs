use serde::{Deserialize, Serialize};

use super::embed::Embedder;
use super::ladder::{resolve, Catalog, MatchPolicy, MatchSource};
use super::MatchError;
use crate::ingest::{Component, Substitute, SubstitutionEntry};
use crate::kg::{EdgeKind, Graph, NodeId, NodeKind, PropValue, Props, UID_PROP};
use crate::text::canonical_ingredient;

pub const SUBSTITUTE_ONLY_PROP: &str = "is_substitute_only";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionReport {
    pub entries: usize,
    /// Entries whose target is not an ingredient of the graph.
    pub targets_missing: usize,
    pub substituted_by: usize,
    pub composites: usize,
    pub has_composite: usize,
    pub composed_of: usize,
    pub substitute_only_nodes: usize,
}

impl SubstitutionReport {
    pub fn edges(&self) -> usize {
        self.substituted_by + self.has_composite + self.composed_of
    }
}

fn amount_props(c: &Component, qty_key: &str, unit_key: &str) -> Props {
    let mut p = Props::new();
    if let Some(q) = c.quantity {
        p.insert(qty_key.into(), q.into());
    }
    if let Some(u) = &c.unit {
        p.insert(unit_key.into(), u.clone().into());
    }
    p
}

struct Linker<'a> {
    graph: &'a mut Graph,
    catalog: Catalog,
    ids: Vec<NodeId>,
    embedder: &'a dyn Embedder,
    policy: MatchPolicy,
    report: SubstitutionReport,
}

impl Linker<'_> {
    /// Ingredient node for a substitute name: an existing ingredient when
    /// the name matches exactly or by embedding at or above the threshold,
    /// otherwise a new substitute-only node.
    fn substitute_node(&mut self, name: &str) -> Result<NodeId, MatchError> {
        let strict = MatchPolicy {
            floor: self.policy.threshold,
            ..self.policy
        };
        if let Some(m) = resolve(name, &[&self.catalog], self.embedder, &strict)? {
            return Ok(self.ids[m.position]);
        }
        let canon = canonical_ingredient(name);
        let existing = self.graph.find_node(NodeKind::Ingredient, &canon);
        let id = self.graph.add_node(
            NodeKind::Ingredient,
            &canon,
            Props::from([(SUBSTITUTE_ONLY_PROP.to_string(), PropValue::Bool(true))]),
        )?;
        if existing.is_none() {
            self.report.substitute_only_nodes += 1;
        }
        Ok(id)
    }

    fn link_edge(
        &mut self,
        src: NodeId,
        kind: EdgeKind,
        dst: NodeId,
        props: Props,
    ) -> Result<bool, MatchError> {
        if self.graph.find_edge(src, kind, dst).is_some() {
            return Ok(false);
        }
        self.graph.add_edge(src, kind, dst, props)?;
        Ok(true)
    }

    fn entry(&mut self, entry: &SubstitutionEntry) -> Result<(), MatchError> {
        self.report.entries += 1;
        let Some(target) = self.graph.find_node(
            NodeKind::Ingredient,
            &canonical_ingredient(&entry.target.name),
        ) else {
            self.report.targets_missing += 1;
            return Ok(());
        };
        for option in &entry.options {
            let mut props = amount_props(&entry.target, "target_quantity", "target_unit");
            if let Some(r) = option.ratio {
                props.insert("ratio".into(), r.into());
            }
            if let Some(n) = &option.notes {
                props.insert("notes".into(), n.clone().into());
            }
            match &option.substitute {
                Substitute::Single(c) => {
                    let sub = self.substitute_node(&c.name)?;
                    if sub == target {
                        continue;
                    }
                    props.extend(amount_props(c, "quantity", "unit"));
                    if self.link_edge(target, EdgeKind::SubstitutedBy, sub, props)? {
                        self.report.substituted_by += 1;
                    }
                }
                Substitute::Composite { components } => {
                    let names: Vec<String> = components
                        .iter()
                        .map(|c| canonical_ingredient(&c.name))
                        .collect();
                    let target_name = &self.graph.node(target)?.name;
                    let uid = format!("{target_name}=>{}", names.join("+"));
                    let existed = self
                        .graph
                        .find_by_uid(NodeKind::CompositeSubstitute, &uid)
                        .is_some();
                    let composite = self.graph.add_node(
                        NodeKind::CompositeSubstitute,
                        &names.join(" + "),
                        Props::from([(UID_PROP.to_string(), PropValue::Text(uid))]),
                    )?;
                    if !existed {
                        self.report.composites += 1;
                    }
                    if self.link_edge(target, EdgeKind::HasCompositeSubstitute, composite, props)? {
                        self.report.has_composite += 1;
                    }
                    for c in components {
                        let part = self.substitute_node(&c.name)?;
                        let p = amount_props(c, "quantity", "unit");
                        if self.link_edge(composite, EdgeKind::ComposedOf, part, p)? {
                            self.report.composed_of += 1;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Add substitution edges for every entry whose target is an ingredient of
/// the graph. Repeated links are not duplicated.
pub fn link_substitutes(
    entries: &[SubstitutionEntry],
    graph: &mut Graph,
    embedder: &dyn Embedder,
    policy: MatchPolicy,
) -> Result<SubstitutionReport, MatchError> {
    if entries.is_empty() {
        return Ok(SubstitutionReport::default());
    }
    let (ids, names): (Vec<NodeId>, Vec<String>) = graph
        .nodes_of_kind(NodeKind::Ingredient)
        .map(|n| (n.id, n.name.clone()))
        .unzip();
    let catalog = Catalog::build(MatchSource::Subs, names, embedder)?;
    let mut linker = Linker {
        graph,
        catalog,
        ids,
        embedder,
        policy,
        report: SubstitutionReport::default(),
    };
    for entry in entries {
        linker.entry(entry)?;
    }
    Ok(linker.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_substitutions;
    use crate::matching::MockEmbedder;
    use crate::vocab::Vocabulary;

    fn graph_with(names: &[&str]) -> Graph {
        let mut g = Graph::seeded(Vocabulary::bundled());
        for n in names {
            g.add_node(NodeKind::Ingredient, n, Props::new()).unwrap();
        }
        g
    }

    fn subs(text: &str) -> Vec<SubstitutionEntry> {
        parse_substitutions(text).unwrap().entries
    }

    #[test]
    fn single_substitute() {
        let mut g = graph_with(&["butter"]);
        let e = subs("target;substitute;ratio\nbutter;margarine;1:1\n");
        let r = link_substitutes(&e, &mut g, &MockEmbedder::new(), MatchPolicy::default()).unwrap();
        assert_eq!(r.substituted_by, 1);
        assert_eq!(r.substitute_only_nodes, 1);
        let butter = g.find_node(NodeKind::Ingredient, "butter").unwrap();
        let (edge, node) = &g
            .neighbors(
                butter,
                Some(EdgeKind::SubstitutedBy),
                crate::kg::Direction::Out,
            )
            .unwrap()[0];
        assert_eq!(node.name, "margarine");
        assert_eq!(node.props[SUBSTITUTE_ONLY_PROP], PropValue::Bool(true));
        assert_eq!(edge.props["ratio"], PropValue::Number(1.0));
        let again =
            link_substitutes(&e, &mut g, &MockEmbedder::new(), MatchPolicy::default()).unwrap();
        assert_eq!(again.edges(), 0);
    }

    #[test]
    fn composite_substitute() {
        let mut g = graph_with(&["buttermilk", "milk"]);
        let e = subs("target;substitute\n1 cup buttermilk;1 cup milk + 1 tbsp lemon juice\n");
        let r = link_substitutes(&e, &mut g, &MockEmbedder::new(), MatchPolicy::default()).unwrap();
        assert_eq!((r.composites, r.has_composite, r.composed_of), (1, 1, 2));
        assert_eq!(r.substitute_only_nodes, 1);
        let milk = g.find_node(NodeKind::Ingredient, "milk").unwrap();
        assert!(!g
            .node(milk)
            .unwrap()
            .props
            .contains_key(SUBSTITUTE_ONLY_PROP));
        assert!(g.validate().is_empty());
    }

    #[test]
    fn missing_target_and_empty_list() {
        let mut g = graph_with(&["egg"]);
        let r =
            link_substitutes(&[], &mut g, &MockEmbedder::new(), MatchPolicy::default()).unwrap();
        assert_eq!(r, SubstitutionReport::default());
        let e = subs("target;substitute\nbutter;margarine\n");
        let r = link_substitutes(&e, &mut g, &MockEmbedder::new(), MatchPolicy::default()).unwrap();
        assert_eq!((r.targets_missing, r.edges()), (1, 0));
    }
}
