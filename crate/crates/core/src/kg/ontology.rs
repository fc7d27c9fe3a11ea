use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Recipe,
    Ingredient,
    Instruction,
    Utensil,
    Cuisine,
    Season,
    DietRestriction,
    AllergenCategory,
    SwissFoodPyramidCategory,
    CompositeSubstitute,
}

impl NodeKind {
    pub const ALL: [NodeKind; 10] = [
        NodeKind::Recipe,
        NodeKind::Ingredient,
        NodeKind::Instruction,
        NodeKind::Utensil,
        NodeKind::Cuisine,
        NodeKind::Season,
        NodeKind::DietRestriction,
        NodeKind::AllergenCategory,
        NodeKind::SwissFoodPyramidCategory,
        NodeKind::CompositeSubstitute,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Recipe => "Recipe",
            NodeKind::Ingredient => "Ingredient",
            NodeKind::Instruction => "Instruction",
            NodeKind::Utensil => "Utensil",
            NodeKind::Cuisine => "Cuisine",
            NodeKind::Season => "Season",
            NodeKind::DietRestriction => "DietRestriction",
            NodeKind::AllergenCategory => "AllergenCategory",
            NodeKind::SwissFoodPyramidCategory => "SwissFoodPyramidCategory",
            NodeKind::CompositeSubstitute => "CompositeSubstitute",
        }
    }

    /// Kinds whose members are fixed by the seed data once a graph is seeded.
    pub fn is_closed(self) -> bool {
        matches!(
            self,
            NodeKind::Season
                | NodeKind::DietRestriction
                | NodeKind::AllergenCategory
                | NodeKind::SwissFoodPyramidCategory
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeKind {
    Contains,
    IsSuitableFor,
    IsForSeason,
    IsPartOf,
    Uses,
    Has,
    AllergenOf,
    ClassifiedAs,
    SubstitutedBy,
    HasCompositeSubstitute,
    ComposedOf,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 11] = [
        EdgeKind::Contains,
        EdgeKind::IsSuitableFor,
        EdgeKind::IsForSeason,
        EdgeKind::IsPartOf,
        EdgeKind::Uses,
        EdgeKind::Has,
        EdgeKind::AllergenOf,
        EdgeKind::ClassifiedAs,
        EdgeKind::SubstitutedBy,
        EdgeKind::HasCompositeSubstitute,
        EdgeKind::ComposedOf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Contains => "CONTAINS",
            EdgeKind::IsSuitableFor => "IS_SUITABLE_FOR",
            EdgeKind::IsForSeason => "IS_FOR_SEASON",
            EdgeKind::IsPartOf => "IS_PART_OF",
            EdgeKind::Uses => "USES",
            EdgeKind::Has => "HAS",
            EdgeKind::AllergenOf => "ALLERGEN_OF",
            EdgeKind::ClassifiedAs => "CLASSIFIED_AS",
            EdgeKind::SubstitutedBy => "SUBSTITUTED_BY",
            EdgeKind::HasCompositeSubstitute => "HAS_COMPOSITE_SUBSTITUTE",
            EdgeKind::ComposedOf => "COMPOSED_OF",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every legal `(source kind, edge kind, target kind)` triple.
pub const ONTOLOGY: &[(NodeKind, EdgeKind, NodeKind)] = &[
    (NodeKind::Recipe, EdgeKind::Contains, NodeKind::Ingredient),
    (
        NodeKind::Recipe,
        EdgeKind::IsSuitableFor,
        NodeKind::DietRestriction,
    ),
    (
        NodeKind::Ingredient,
        EdgeKind::IsSuitableFor,
        NodeKind::DietRestriction,
    ),
    (NodeKind::Recipe, EdgeKind::IsForSeason, NodeKind::Season),
    (NodeKind::Recipe, EdgeKind::IsPartOf, NodeKind::Cuisine),
    (NodeKind::Recipe, EdgeKind::Uses, NodeKind::Utensil),
    (NodeKind::Instruction, EdgeKind::Uses, NodeKind::Ingredient),
    (NodeKind::Recipe, EdgeKind::Has, NodeKind::Instruction),
    (
        NodeKind::Ingredient,
        EdgeKind::AllergenOf,
        NodeKind::AllergenCategory,
    ),
    (
        NodeKind::Ingredient,
        EdgeKind::ClassifiedAs,
        NodeKind::SwissFoodPyramidCategory,
    ),
    (
        NodeKind::Ingredient,
        EdgeKind::SubstitutedBy,
        NodeKind::Ingredient,
    ),
    (
        NodeKind::Ingredient,
        EdgeKind::HasCompositeSubstitute,
        NodeKind::CompositeSubstitute,
    ),
    (
        NodeKind::CompositeSubstitute,
        EdgeKind::ComposedOf,
        NodeKind::Ingredient,
    ),
];

pub fn allows(src: NodeKind, kind: EdgeKind, dst: NodeKind) -> bool {
    ONTOLOGY.contains(&(src, kind, dst))
}
