//! Quantity and unit extraction for short amount phrases such as
//! `"1 1/2 cups"` or `"½ tsp"`.

const UNITS: &[(&str, &[&str])] = &[
    ("cup", &["cup", "cups", "c"]),
    (
        "tbsp",
        &["tbsp", "tbsps", "tablespoon", "tablespoons", "tbs", "el"],
    ),
    ("tsp", &["tsp", "tsps", "teaspoon", "teaspoons", "tl"]),
    ("g", &["g", "gr", "gram", "grams", "gramme", "grammes"]),
    ("kg", &["kg", "kilogram", "kilograms"]),
    ("mg", &["mg", "milligram", "milligrams"]),
    (
        "ml",
        &[
            "ml",
            "milliliter",
            "milliliters",
            "millilitre",
            "millilitres",
        ],
    ),
    ("cl", &["cl", "centiliter", "centiliters"]),
    (
        "dl",
        &["dl", "deciliter", "deciliters", "decilitre", "decilitres"],
    ),
    ("l", &["l", "liter", "liters", "litre", "litres"]),
    ("oz", &["oz", "ounce", "ounces"]),
    ("lb", &["lb", "lbs", "pound", "pounds"]),
    ("pinch", &["pinch", "pinches"]),
    ("clove", &["clove", "cloves"]),
    ("piece", &["piece", "pieces", "pc", "pcs"]),
    ("slice", &["slice", "slices"]),
    ("can", &["can", "cans", "tin", "tins"]),
    ("bunch", &["bunch", "bunches"]),
    ("handful", &["handful", "handfuls"]),
    ("sprig", &["sprig", "sprigs"]),
    ("stick", &["stick", "sticks"]),
    ("dash", &["dash", "dashes"]),
    ("drop", &["drop", "drops"]),
];

/// Canonical singular unit for a spelling, if it is a known unit.
pub fn canonical_unit(word: &str) -> Option<&'static str> {
    let w = word.trim().trim_end_matches('.').to_lowercase();
    UNITS
        .iter()
        .find(|(_, spellings)| spellings.contains(&w.as_str()))
        .map(|(canon, _)| *canon)
}

fn vulgar_fraction(c: char) -> Option<f64> {
    Some(match c {
        '½' => 0.5,
        '⅓' => 1.0 / 3.0,
        '⅔' => 2.0 / 3.0,
        '¼' => 0.25,
        '¾' => 0.75,
        '⅛' => 0.125,
        _ => return None,
    })
}

/// Parse one numeric token: `2`, `0.5`, `1/2`, `½`, `1½`.
pub fn parse_number(token: &str) -> Option<f64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: f64 = num.trim().parse().ok()?;
        let d: f64 = den.trim().parse().ok()?;
        return (d != 0.0).then(|| n / d);
    }
    let last = t.chars().last()?;
    if let Some(frac) = vulgar_fraction(last) {
        let head = &t[..t.len() - last.len_utf8()];
        let whole = if head.is_empty() {
            0.0
        } else {
            head.parse().ok()?
        };
        return Some(whole + frac);
    }
    let v: f64 = t.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Leading amount of a phrase: `(quantity, unit, remaining text)`.
///
/// Mixed numbers (`1 1/2`) are summed; `a` / `an` count as one.
pub fn split_amount(phrase: &str) -> (Option<f64>, Option<String>, String) {
    let words: Vec<&str> = phrase.split_whitespace().collect();
    let mut idx = 0;
    let mut quantity: Option<f64> = None;
    while idx < words.len() {
        match parse_number(words[idx]) {
            Some(v) => {
                quantity = Some(quantity.unwrap_or(0.0) + v);
                idx += 1;
            }
            None => break,
        }
    }
    if quantity.is_none() && idx < words.len() {
        let w = words[idx].to_lowercase();
        if w == "a" || w == "an" {
            quantity = Some(1.0);
            idx += 1;
        }
    }
    let mut unit = None;
    if idx < words.len() && words.len() - idx > 1 {
        if let Some(u) = canonical_unit(words[idx]) {
            unit = Some(u.to_string());
            idx += 1;
            if idx < words.len() && words[idx].eq_ignore_ascii_case("of") {
                idx += 1;
            }
        }
    }
    (quantity, unit, words[idx..].join(" "))
}
