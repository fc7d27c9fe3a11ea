use std::sync::Arc;

use foodkg_core::enrich::{Enricher, GenerationConfig, PromptPack, ScriptedBackend};
use foodkg_core::ingest::{
    dedupe, parse_gi_table, parse_nutrient_table, parse_recipe_json, parse_substitutions, Language,
    NutrientSource, RawRecipe,
};
use foodkg_core::Vocabulary;
use proptest::prelude::*;
use serde_json::{json, Value};

fn json_leaf() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        (-5i64..50).prop_map(Value::from),
        "[a-z0-9 ,.]{0,8}".prop_map(Value::from),
        prop::collection::vec("[a-z0-9 ,]{0,8}", 0..4).prop_map(|v| json!(v)),
    ]
}

/// Objects drawn from the recipe field names, so a fair share parse.
fn recipe_like() -> impl Strategy<Value = Value> {
    let fields = prop::sample::subsequence(
        vec![
            "id",
            "name",
            "language",
            "ingredient_lines",
            "instructions",
            "cuisine",
            "season",
            "extra",
        ],
        0..=8,
    );
    (fields, prop::collection::vec(json_leaf(), 8), any::<bool>()).prop_map(
        |(names, leaves, sane)| {
            let mut obj = serde_json::Map::new();
            for (name, leaf) in names.into_iter().zip(leaves) {
                let value = match (sane, name) {
                    (true, "language") => json!("en"),
                    (true, "ingredient_lines" | "instructions") => json!(["1 cup flour", "mix"]),
                    _ => leaf,
                };
                obj.insert(name.to_string(), value);
            }
            Value::Object(obj)
        },
    )
}

fn recipe() -> impl Strategy<Value = RawRecipe> {
    (
        prop::sample::select(vec!["Soup", "soup ", "Stew", "SOUP"]),
        prop::collection::vec(prop::sample::select(vec!["1 egg", "1  Egg", "salt"]), 1..3),
        prop::collection::vec(prop::sample::select(vec!["Boil.", "boil.", "Serve"]), 1..3),
    )
        .prop_map(|(name, lines, steps)| RawRecipe {
            id: None,
            name: name.to_string(),
            description: String::new(),
            keywords: Vec::new(),
            language: Language::En,
            ingredient_lines: lines.into_iter().map(String::from).collect(),
            instructions: steps.into_iter().map(String::from).collect(),
            utensils: Vec::new(),
            nutrition: Default::default(),
            cuisine: None,
            season: None,
        })
}

fn table_rows() -> impl Strategy<Value = Vec<Vec<String>>> {
    let cell = prop_oneof![
        "[a-z ]{0,6}",
        "-?[0-9]{1,3}(\\.[0-9])?",
        Just(String::new())
    ];
    prop::collection::vec(prop::collection::vec(cell, 1..5), 0..20)
}

fn enricher(reply: String) -> Enricher {
    Enricher::new(
        Arc::new(ScriptedBackend::fixed(reply)),
        PromptPack::bundled(),
        Arc::new(Vocabulary::bundled().clone()),
        GenerationConfig::default(),
    )
}

fn label_reply() -> impl Strategy<Value = String> {
    let vocab = Vocabulary::bundled();
    let mut labels: Vec<String> = vocab.diet_labels().map(String::from).collect();
    labels.extend(vocab.seasons.iter().cloned());
    labels.extend(vocab.cuisines.iter().cloned());
    labels.extend(["martian", "keto-ish", "", "SUMMER", "winterish"].map(String::from));
    let names = prop::collection::vec(prop::sample::select(labels.clone()), 0..5);
    prop_oneof![
        (
            prop::collection::vec(-3i64..20, 0..5),
            -3i64..12,
            names.clone(),
            prop::sample::select(labels),
            names
        )
            .prop_map(|(codes, sfp, diets, cuisine, seasons)| {
                json!({
                    "allergens": codes,
                    "sfp": sfp,
                    "suitable_for": diets,
                    "cuisine": cuisine,
                    "seasons": seasons,
                    "diets": diets,
                })
                .to_string()
            }),
        "[a-z{}\\[\\]\": ,0-9]{0,30}",
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn recipe_parsing_is_total(text in "\\PC{0,64}") {
        let _ = parse_recipe_json(&text);
    }

    #[test]
    fn every_record_is_parsed_or_rejected(items in prop::collection::vec(recipe_like(), 0..12)) {
        let n = items.len();
        let parsed = parse_recipe_json(&Value::Array(items).to_string()).unwrap();
        prop_assert_eq!(parsed.recipes.len() + parsed.rejected.len(), n);
        let ids: std::collections::BTreeSet<_> = parsed.recipes.iter().map(|r| r.id()).collect();
        prop_assert_eq!(ids.len(), parsed.recipes.len());
    }

    #[test]
    fn dedupe_is_idempotent(recipes in prop::collection::vec(recipe(), 0..10)) {
        let once = dedupe(recipes);
        prop_assert_eq!(dedupe(once.clone()), once);
    }

    #[test]
    fn table_parsing_is_total(text in "\\PC{0,80}") {
        let _ = parse_nutrient_table(&text, NutrientSource::Swiss);
        let _ = parse_gi_table(&text);
        let _ = parse_substitutions(&text);
    }

    #[test]
    fn every_table_row_is_kept_or_skipped(rows in table_rows()) {
        let body: Vec<String> = rows.iter().map(|r| r.join(";")).collect();
        let text = format!("name;kcal;protein\n{}", body.join("\n"));
        let load = parse_nutrient_table(&text, NutrientSource::Swiss).unwrap();
        let data_rows = rows.iter().filter(|r| r.iter().any(|c| !c.trim().is_empty())).count();
        prop_assert_eq!(load.entries.len() + load.skipped.len(), data_rows);
        for e in &load.entries {
            prop_assert!(e.nutrients.values().all(|v| v.is_finite() && *v >= 0.0));
        }
    }

    #[test]
    fn labels_never_leave_the_vocabulary(reply in label_reply()) {
        let vocab = Vocabulary::bundled();
        let enricher = enricher(reply);
        if let Ok(codes) = enricher.map_allergens("walnut") {
            prop_assert!(codes.iter().all(|&c| vocab.allergen(c).is_some()));
        }
        if let Ok(Some(code)) = enricher.map_sfp("walnut") {
            prop_assert!(vocab.sfp_category(code).is_some());
        }
        if let Ok((flags, _)) = enricher.map_diets("walnut") {
            prop_assert!(flags.restrictions(vocab).all(|d| vocab.is_restriction(d)));
        }
        let recipe = RawRecipe {
            id: Some("r1".into()),
            name: "Walnut Cake".into(),
            description: String::new(),
            keywords: Vec::new(),
            language: Language::En,
            ingredient_lines: vec!["walnuts".into()],
            instructions: vec!["bake".into()],
            utensils: Vec::new(),
            nutrition: Default::default(),
            cuisine: None,
            season: None,
        };
        if let Ok(tags) = enricher.tag_recipe(&recipe, &["walnut".to_string()]) {
            prop_assert!(tags.cuisine.iter().all(|c| vocab.is_cuisine(c)));
            prop_assert!(tags.seasons.iter().all(|s| vocab.is_season(s)));
            prop_assert!(tags.diets.restrictions(vocab).all(|d| vocab.is_restriction(d)));
        }
    }

    #[test]
    fn translation_keeps_item_counts(
        lines in prop::collection::vec("[a-z ]{1,8}", 1..5),
        steps in prop::collection::vec("[a-z ]{1,8}", 1..5),
        reply_lines in 0usize..6,
        reply_steps in 0usize..6,
    ) {
        let recipe = RawRecipe {
            id: Some("r1".into()),
            name: "Tarte".into(),
            description: String::new(),
            keywords: Vec::new(),
            language: Language::Fr,
            ingredient_lines: lines.clone(),
            instructions: steps.clone(),
            utensils: Vec::new(),
            nutrition: Default::default(),
            cuisine: None,
            season: None,
        };
        let reply = json!({
            "name": "Tart",
            "ingredients": (0..reply_lines).map(|i| format!("line {i}")).collect::<Vec<_>>(),
            "instructions": (0..reply_steps).map(|i| format!("step {i}")).collect::<Vec<_>>(),
        });
        match enricher(reply.to_string()).translate_recipe(&recipe) {
            Ok(t) => {
                prop_assert_eq!(t.ingredient_lines.len(), lines.len());
                prop_assert_eq!(t.instructions.len(), steps.len());
                prop_assert_eq!(t.language, Language::En);
            }
            Err(_) => prop_assert!(reply_lines != lines.len() || reply_steps != steps.len()),
        }
    }
}
