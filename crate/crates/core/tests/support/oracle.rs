//! Deterministic stand-in for the chat model, used only to regenerate the
//! replay transcripts. Answers come from hand-written tables.

use std::collections::HashMap;
use std::sync::Arc;

use foodkg_core::enrich::{ChatMessage, PromptPack, ScriptedBackend, Task};
use foodkg_core::graphrag::QaItem;
use foodkg_core::ingest::split_amount;
use foodkg_core::text::{canonical_ingredient, word_tokens};
use foodkg_core::Vocabulary;
use serde_json::{json, Value};

const TRANSLATIONS: &[(&str, &str)] = &[
    ("Tarte aux pommes", "Apple Tart"),
    ("3 pommes, en tranches", "3 apples, sliced"),
    ("200 g de farine", "200 g flour"),
    ("100 g de beurre", "100 g butter"),
    ("80 g de sucre", "80 g sugar"),
    (
        "Préchauffer le four à 200 degrés.",
        "Preheat the oven to 200 degrees.",
    ),
    (
        "Étaler la pâte et disposer les pommes.",
        "Roll out the pastry and arrange the apples.",
    ),
    ("Cuire pendant 40 minutes.", "Bake for 40 minutes."),
    ("Ratatouille", "Ratatouille"),
    ("2 courgettes, en dés", "2 zucchini, diced"),
    ("1 aubergine, en dés", "1 eggplant, diced"),
    ("3 tomates", "3 tomatoes"),
    ("1 oignon", "1 onion"),
    ("3 c. à soupe d'huile d'olive", "3 tbsp olive oil"),
    (
        "Faire revenir l'oignon dans l'huile d'olive.",
        "Fry the onion in the olive oil.",
    ),
    (
        "Ajouter les courgettes, l'aubergine et les tomates.",
        "Add the zucchini, eggplant and tomatoes.",
    ),
    ("Laisser mijoter 40 minutes.", "Simmer for 40 minutes."),
    ("Soupe à l'oignon", "French Onion Soup"),
    ("4 oignons, émincés", "4 onions, sliced"),
    ("50 g de beurre", "50 g butter"),
    ("1 l de bouillon de bœuf", "1 l beef stock"),
    ("4 tranches de pain", "4 slices bread"),
    ("100 g de gruyère râpé", "100 g gruyere, grated"),
    (
        "Faire fondre les oignons dans le beurre.",
        "Soften the onions in the butter.",
    ),
    (
        "Ajouter le bouillon et cuire 30 minutes.",
        "Add the beef stock and cook for 30 minutes.",
    ),
    (
        "Couvrir de pain et de gruyère et gratiner.",
        "Cover with bread and gruyere and grill.",
    ),
    ("Gratin dauphinois", "Potato Gratin"),
    (
        "1 kg de pommes de terre, en fines tranches",
        "1 kg potatoes, thinly sliced",
    ),
    ("500 ml de lait", "500 ml milk"),
    ("200 ml de crème", "200 ml cream"),
    ("1 gousse d'ail", "1 clove garlic"),
    ("1 pincée de muscade", "1 pinch nutmeg"),
    (
        "Disposer les pommes de terre dans un plat.",
        "Layer the potatoes in a dish.",
    ),
    (
        "Verser le lait et la crème avec l'ail et la muscade.",
        "Pour over the milk and cream with the garlic and nutmeg.",
    ),
    ("Cuire 90 minutes.", "Bake for 90 minutes."),
];

const UTENSILS: &[&str] = &["bowl", "wok", "whisk", "fondue pot"];

/// Diet groups before the implication closure.
const PLANT: &[&str] = &[
    "vegan",
    "gluten-free",
    "nut-free",
    "low-fat",
    "low-sodium",
    "diabetic",
    "halal",
    "kosher",
    "hindu",
    "jain",
];
const DAIRY: &[&str] = &[
    "vegetarian",
    "lacto-vegetarian",
    "gluten-free",
    "nut-free",
    "egg-free",
    "halal",
    "kosher",
    "hindu",
    "jain",
];
const EGG: &[&str] = &[
    "vegetarian",
    "ovo-vegetarian",
    "gluten-free",
    "nut-free",
    "dairy-free",
    "low-sodium",
    "diabetic",
    "halal",
    "kosher",
];
const MEAT: &[&str] = &[
    "gluten-free",
    "nut-free",
    "dairy-free",
    "egg-free",
    "shellfish-free",
    "diabetic",
    "halal",
    "kosher",
];
const FISH: &[&str] = &[
    "pescatarian",
    "gluten-free",
    "nut-free",
    "dairy-free",
    "egg-free",
    "shellfish-free",
    "diabetic",
    "halal",
    "kosher",
];

fn without(base: &[&'static str], drop: &[&str]) -> Vec<&'static str> {
    base.iter().copied().filter(|d| !drop.contains(d)).collect()
}

/// Allergen codes, pyramid code and diet labels per canonical ingredient.
fn labels(name: &str) -> (Vec<u8>, Option<u8>, Vec<&'static str>) {
    let plant = PLANT.to_vec();
    let root = without(PLANT, &["jain"]);
    let oil = without(PLANT, &["low-fat"]);
    let grain = without(PLANT, &["gluten-free"]);
    let salty = without(PLANT, &["low-sodium"]);
    let sweet = without(PLANT, &["diabetic"]);
    let nut = without(PLANT, &["nut-free"]);
    let rich_dairy = DAIRY.to_vec();
    let lean_dairy = [DAIRY, &["low-fat"]].concat();
    match name {
        "potato" => (vec![], Some(4), root),
        "butter" => (vec![7], Some(8), rich_dairy),
        "salt" => (vec![], None, salty),
        "onion" | "garlic" | "carrot" => (vec![], Some(2), root),
        "sunflower oil" | "olive oil" => (vec![], Some(8), oil),
        "sesame oil" => (vec![11], Some(8), oil),
        "flour" | "pasta" | "bread" => (vec![1], Some(4), grain),
        "oats" => (vec![1], Some(4), grain),
        "water" => (vec![], Some(1), plant),
        "yeast" | "nutmeg" | "rice vinegar" => (vec![], None, plant),
        "tofu" => (vec![6], Some(6), plant),
        "soy sauce" => (vec![1, 6], Some(9), without(&grain, &["low-sodium"])),
        "red pepper" | "nori" | "cucumber" | "mushroom" | "tomato" | "basil" | "zucchini"
        | "eggplant" => (vec![], Some(2), plant),
        "apple" | "lemon" | "lemon juice" => (vec![], Some(3), plant),
        "sugar" | "dark chocolate" => (vec![], Some(9), sweet),
        "egg" => (vec![3], Some(6), EGG.to_vec()),
        "buttermilk" | "milk" => (vec![7], Some(5), lean_dairy),
        "cream" | "gruyere" | "parmesan" => (vec![7], Some(5), rich_dairy),
        "veal" => (vec![], Some(6), MEAT.to_vec()),
        "beef stock" => (vec![9], Some(1), without(MEAT, &["diabetic"])),
        "white wine" => (
            vec![12],
            Some(9),
            without(PLANT, &["halal", "diabetic", "jain", "hindu"]),
        ),
        "hazelnut" | "pine nut" => (vec![8], Some(7), nut),
        "rice" | "cornstarch" | "lentil" | "chickpea" => (vec![], Some(4), plant),
        "vegetable stock" => (vec![9], Some(1), salty),
        "salmon" => (vec![4], Some(6), FISH.to_vec()),
        "tahini" => (vec![11], Some(7), plant),
        other => panic!("no oracle labels for ingredient `{other}`"),
    }
}

pub struct Oracle {
    systems: Vec<(Task, String)>,
    answers: HashMap<String, String>,
    known_terms: Vec<String>,
}

impl Oracle {
    pub fn new(qa: &[QaItem]) -> Self {
        let vocab = Vocabulary::bundled();
        let pack = PromptPack::bundled();
        let systems = Task::ALL
            .iter()
            .map(|&t| (t, pack.render(t, vocab)))
            .collect();
        let answers = qa
            .iter()
            .map(|q| (q.question.clone(), q.expected.clone()))
            .collect();
        let mut known_terms: Vec<String> = vocab.diet_labels().map(str::to_string).collect();
        known_terms.extend(
            [
                "potato", "butter", "tofu", "gruyere", "salmon", "tahini", "veal", "bread",
                "hazelnut", "nori", "chickpea",
            ]
            .map(String::from),
        );
        Oracle {
            systems,
            answers,
            known_terms,
        }
    }

    pub fn into_backend(self) -> ScriptedBackend {
        let this = Arc::new(self);
        ScriptedBackend::new("oracle", move |m: &[ChatMessage]| Ok(this.reply(m)))
    }

    fn reply(&self, messages: &[ChatMessage]) -> String {
        let system = &messages[0].content;
        let user = &messages.last().unwrap().content;
        let task = self
            .systems
            .iter()
            .find(|(_, s)| s == system)
            .map(|(t, _)| *t)
            .expect("unknown system prompt");
        let reply = match task {
            Task::Translation => translate(user),
            Task::Splitting => split(user),
            Task::Allergen => json!({"allergens": labels(user).0}),
            Task::Sfp => json!({"sfp": labels(user).1}),
            Task::Diets => json!({"suitable_for": labels(user).2}),
            Task::Tagging => tag(user),
            Task::QueryPlan => self.plan(user),
            Task::Synthesis => return self.synthesize(user),
        };
        reply.to_string()
    }

    fn plan(&self, question: &str) -> Value {
        let concepts: Vec<&str> = question.split('\'').skip(1).step_by(2).collect();
        let words = word_tokens(question).join(" ");
        let keywords: Vec<&String> = self
            .known_terms
            .iter()
            .filter(|t| format!(" {words} ").contains(&format!(" {t} ")))
            .collect();
        json!({"concepts": concepts, "keywords": keywords, "synonyms": []})
    }

    fn synthesize(&self, prompt: &str) -> String {
        let (facts, question) = prompt.rsplit_once("\nQuestion: ").unwrap();
        let expected = &self.answers[question];
        if facts.to_lowercase().contains(&expected.to_lowercase()) {
            format!("According to the knowledge graph, the answer is {expected}.")
        } else {
            "The retrieved facts do not contain the answer.".into()
        }
    }
}

fn lookup(fr: &str) -> &'static str {
    TRANSLATIONS
        .iter()
        .find(|(f, _)| *f == fr)
        .map(|(_, e)| *e)
        .unwrap_or_else(|| panic!("no translation for `{fr}`"))
}

fn translate(user: &str) -> Value {
    let input: Value = serde_json::from_str(user).unwrap();
    let list = |key: &str| -> Vec<&str> {
        input[key]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| lookup(s.as_str().unwrap()))
            .collect()
    };
    json!({
        "name": lookup(input["name"].as_str().unwrap()),
        "ingredients": list("ingredients"),
        "instructions": list("instructions"),
    })
}

fn split(line: &str) -> Value {
    let (quantity, unit, rest) = split_amount(line);
    let (head, notes) = match rest.split_once(',') {
        Some((h, n)) => (h.trim(), Some(n.trim().to_string())),
        None => (rest.trim(), None),
    };
    if UTENSILS.contains(&head) {
        return json!({"name": null, "quantity": null, "unit": null, "notes": notes,
            "utensils": [head]});
    }
    json!({
        "name": head,
        "quantity": quantity,
        "unit": unit,
        "notes": notes,
        "utensils": [],
    })
}

fn tag(user: &str) -> Value {
    let input: Value = serde_json::from_str(user).unwrap();
    for name in input["ingredients"].as_array().unwrap() {
        labels(&canonical_ingredient(name.as_str().unwrap()));
    }
    let seasons: Vec<&Value> = input.get("season_hint").into_iter().collect();
    json!({
        "cuisine": input.get("cuisine_hint"),
        "seasons": seasons,
        "diets": [],
    })
}
