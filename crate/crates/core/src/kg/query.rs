//! Recipe filtering by diet, allergen, season and cuisine.

use serde::{Deserialize, Serialize};

use super::graph::{Direction, Graph, NodeId};
use super::ontology::{EdgeKind, NodeKind};
use crate::text::normalize_name;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecipeFilter {
    pub diet: Option<String>,
    /// Allergen category code (1..=14) the recipe must not contain.
    pub exclude_allergen: Option<u8>,
    pub season: Option<String>,
    pub cuisine: Option<String>,
}

fn links_to(g: &Graph, id: NodeId, kind: EdgeKind, name: &str) -> bool {
    let want = normalize_name(name);
    g.neighbors(id, Some(kind), Direction::Out)
        .map(|v| v.iter().any(|(_, n)| normalize_name(&n.name) == want))
        .unwrap_or(false)
}

fn contains_allergen(g: &Graph, recipe: NodeId, code: u8) -> bool {
    let Ok(ingredients) = g.neighbors(recipe, Some(EdgeKind::Contains), Direction::Out) else {
        return false;
    };
    ingredients.iter().any(|(_, ing)| {
        g.neighbors(ing.id, Some(EdgeKind::AllergenOf), Direction::Out)
            .map(|cats| {
                cats.iter()
                    .any(|(_, c)| c.props.get("code").and_then(|v| v.as_f64()) == Some(code as f64))
            })
            .unwrap_or(false)
    })
}

impl Graph {
    /// Recipe ids matching every set filter, in node id order.
    pub fn filter_recipes(&self, filter: &RecipeFilter) -> Vec<NodeId> {
        self.nodes_of_kind(NodeKind::Recipe)
            .filter(|r| {
                filter
                    .diet
                    .as_deref()
                    .is_none_or(|d| links_to(self, r.id, EdgeKind::IsSuitableFor, d))
                    && filter
                        .season
                        .as_deref()
                        .is_none_or(|s| links_to(self, r.id, EdgeKind::IsForSeason, s))
                    && filter
                        .cuisine
                        .as_deref()
                        .is_none_or(|c| links_to(self, r.id, EdgeKind::IsPartOf, c))
                    && filter
                        .exclude_allergen
                        .is_none_or(|a| !contains_allergen(self, r.id, a))
            })
            .map(|r| r.id)
            .collect()
    }
}
