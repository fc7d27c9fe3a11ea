//! Graph construction from enriched recipes, ingredient labels and matches.

use std::collections::BTreeMap;

use super::artifacts::{CanonicalRecipe, IngredientMatch};
use crate::enrich::EnrichmentLabels;
use crate::kg::{EdgeKind, Graph, GraphError, NodeId, NodeKind, PropValue, Props, UID_PROP};
use crate::text::{singularize_word, word_tokens};
use crate::vocab::Vocabulary;

fn singular_tokens(text: &str) -> Vec<String> {
    word_tokens(text)
        .iter()
        .map(|w| singularize_word(w))
        .collect()
}

/// Whether `needle` occurs as a run of whole words in `haystack`, both
/// tokenized and singularized.
pub fn mentions(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty()
        && haystack.len() >= needle.len()
        && haystack.windows(needle.len()).any(|w| w == needle)
}

fn link(
    g: &mut Graph,
    src: NodeId,
    kind: EdgeKind,
    dst: NodeId,
    props: Props,
) -> Result<bool, GraphError> {
    if g.find_edge(src, kind, dst).is_some() {
        return Ok(false);
    }
    g.add_edge(src, kind, dst, props)?;
    Ok(true)
}

fn recipe_props(r: &CanonicalRecipe) -> Props {
    let mut p = Props::new();
    p.insert(UID_PROP.into(), r.id.clone().into());
    p.insert("language".into(), r.source_language.name().into());
    if !r.description.trim().is_empty() {
        p.insert("description".into(), r.description.trim().into());
    }
    if !r.keywords.is_empty() {
        p.insert("keywords".into(), PropValue::List(r.keywords.clone()));
    }
    for (k, v) in &r.nutrition {
        p.insert(format!("nutrition_{k}"), (*v).into());
    }
    p
}

/// Add one recipe with its instructions, ingredients, utensils and tags.
/// Returns the number of instruction-to-ingredient links.
pub fn add_recipe(
    g: &mut Graph,
    r: &CanonicalRecipe,
    vocab: &Vocabulary,
) -> Result<usize, GraphError> {
    let recipe = g.add_node(NodeKind::Recipe, &r.name, recipe_props(r))?;
    let mut steps = Vec::new();
    for (i, text) in r.instructions.iter().enumerate() {
        let step = (i + 1) as f64;
        let props = Props::from([
            (
                UID_PROP.to_string(),
                PropValue::Text(format!("{}#{}", r.id, i + 1)),
            ),
            ("step".to_string(), PropValue::Number(step)),
        ]);
        let id = g.add_node(NodeKind::Instruction, text, props)?;
        g.add_edge(
            recipe,
            EdgeKind::Has,
            id,
            Props::from([("step".to_string(), PropValue::Number(step))]),
        )?;
        steps.push((id, singular_tokens(text)));
    }
    let mut ingredients = Vec::new();
    let mut utensils: Vec<String> = r.utensils.clone();
    for line in &r.lines {
        utensils.extend(line.split.utensils.iter().cloned());
        let Some(name) = &line.split.name else {
            continue;
        };
        let ing = g.add_node(NodeKind::Ingredient, name, Props::new())?;
        let mut props = Props::new();
        if let Some(q) = line.split.quantity {
            props.insert("quantity".into(), q.into());
        }
        if let Some(u) = &line.split.unit {
            props.insert("unit".into(), u.clone().into());
        }
        if let Some(n) = &line.split.notes {
            props.insert("notes".into(), n.clone().into());
        }
        if link(g, recipe, EdgeKind::Contains, ing, props)? {
            ingredients.push((ing, singular_tokens(name)));
        }
    }
    for u in utensils {
        let u = u.trim().to_lowercase();
        if u.is_empty() {
            continue;
        }
        let id = g.add_node(NodeKind::Utensil, &u, Props::new())?;
        link(g, recipe, EdgeKind::Uses, id, Props::new())?;
    }
    let mut uses = 0;
    for (step, tokens) in &steps {
        for (ing, name) in &ingredients {
            if mentions(tokens, name) && link(g, *step, EdgeKind::Uses, *ing, Props::new())? {
                uses += 1;
            }
        }
    }
    if let Some(c) = &r.tags.cuisine {
        let id = g.add_node(NodeKind::Cuisine, c, Props::new())?;
        link(g, recipe, EdgeKind::IsPartOf, id, Props::new())?;
    }
    for s in &r.tags.seasons {
        if let Some(id) = g.find_node(NodeKind::Season, s) {
            link(g, recipe, EdgeKind::IsForSeason, id, Props::new())?;
        }
    }
    for d in vocab.diet_labels() {
        if r.diets.holds(d) {
            if let Some(id) = g.find_node(NodeKind::DietRestriction, d) {
                link(g, recipe, EdgeKind::IsSuitableFor, id, Props::new())?;
            }
        }
    }
    Ok(uses)
}

/// Attach allergen, food-pyramid and diet edges to an ingredient node.
/// `unrestricted` is a recipe-level label and is not linked here.
pub fn add_labels(
    g: &mut Graph,
    ing: NodeId,
    labels: &EnrichmentLabels,
    vocab: &Vocabulary,
) -> Result<(), GraphError> {
    for code in &labels.allergens {
        if let Some(cat) = vocab.allergen(*code) {
            if let Some(id) = g.find_node(NodeKind::AllergenCategory, &cat.name) {
                link(g, ing, EdgeKind::AllergenOf, id, Props::new())?;
            }
        }
    }
    if let Some(cat) = labels.sfp.and_then(|c| vocab.sfp_category(c)) {
        if let Some(id) = g.find_node(NodeKind::SwissFoodPyramidCategory, &cat.name) {
            link(g, ing, EdgeKind::ClassifiedAs, id, Props::new())?;
        }
    }
    for d in labels.diets.restrictions(vocab) {
        if let Some(id) = g.find_node(NodeKind::DietRestriction, d) {
            link(g, ing, EdgeKind::IsSuitableFor, id, Props::new())?;
        }
    }
    Ok(())
}

/// Seeded graph with every recipe, then ingredient labels and matched
/// props in ingredient-name order. Returns the instruction link count.
pub fn assemble(
    recipes: &[CanonicalRecipe],
    labels: &BTreeMap<String, EnrichmentLabels>,
    matches: &[IngredientMatch],
    vocab: &Vocabulary,
) -> Result<(Graph, usize), GraphError> {
    let mut g = Graph::seeded(vocab);
    let mut uses = 0;
    for r in recipes {
        uses += add_recipe(&mut g, r, vocab)?;
    }
    for (name, l) in labels {
        if let Some(id) = g.find_node(NodeKind::Ingredient, name) {
            add_labels(&mut g, id, l, vocab)?;
        }
    }
    for m in matches {
        let Some(id) = g.find_node(NodeKind::Ingredient, &m.name) else {
            continue;
        };
        for matched in m.nutrients.iter().chain(&m.gi) {
            for (k, v) in &matched.props {
                g.set_prop(id, k.clone(), v.clone())?;
            }
        }
    }
    Ok((g, uses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enrich::{DietFlags, RecipeTags, SplitIngredient};
    use crate::ingest::Language;
    use crate::kg::Direction;
    use crate::pipeline::artifacts::EnrichedLine;

    fn line(name: Option<&str>, qty: Option<f64>, utensils: &[&str]) -> EnrichedLine {
        EnrichedLine {
            line: String::new(),
            split: SplitIngredient {
                name: name.map(str::to_string),
                quantity: qty,
                unit: None,
                notes: None,
                utensils: utensils.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    fn recipe(id: &str, name: &str) -> CanonicalRecipe {
        let v = Vocabulary::bundled();
        CanonicalRecipe {
            id: id.into(),
            name: name.into(),
            source_language: Language::En,
            description: String::new(),
            keywords: vec![],
            instructions: vec!["Boil the potatoes.".into(), "Add oil and serve.".into()],
            lines: vec![
                line(Some("potato"), Some(4.0), &[]),
                line(Some("oil"), None, &[]),
                line(None, None, &["pan"]),
            ],
            utensils: vec![],
            nutrition: BTreeMap::new(),
            tags: RecipeTags {
                cuisine: Some("swiss".into()),
                seasons: ["winter".to_string()].into(),
                diets: DietFlags::closed(vec![], v),
            },
            diets: DietFlags::closed(vec!["vegan".to_string()], v),
            warnings: vec![],
        }
    }

    #[test]
    fn whole_word_mentions() {
        let hay = singular_tokens("Boil the potatoes.");
        assert!(mentions(&hay, &singular_tokens("potato")));
        assert!(!mentions(&hay, &singular_tokens("oil")));
        assert!(!mentions(&hay, &[]));
    }

    #[test]
    fn recipe_structure() {
        let v = Vocabulary::bundled();
        let mut g = Graph::seeded(v);
        let uses = add_recipe(&mut g, &recipe("r1", "Rösti"), v).unwrap();
        add_recipe(&mut g, &recipe("r2", "Rösti"), v).unwrap();
        assert_eq!(uses, 2);
        assert_eq!(g.nodes_of_kind(NodeKind::Recipe).count(), 2);
        assert_eq!(g.nodes_of_kind(NodeKind::Instruction).count(), 4);
        let r1 = g.find_by_uid(NodeKind::Recipe, "r1").unwrap();
        let out = |k| g.neighbors(r1, Some(k), Direction::Out).unwrap().len();
        assert_eq!(out(EdgeKind::Contains), 2);
        assert_eq!(out(EdgeKind::Uses), 1);
        assert_eq!(out(EdgeKind::IsPartOf), 1);
        assert_eq!(out(EdgeKind::IsForSeason), 1);
        assert!(out(EdgeKind::IsSuitableFor) >= 3);
        assert!(g.validate().is_empty());
    }
}
