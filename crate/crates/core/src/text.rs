//! Small string normalisation helpers shared by the graph, matcher and metrics.

use unicode_normalization::UnicodeNormalization;

/// Trim, lowercase and collapse inner whitespace runs to a single space.
pub fn normalize_name(s: &str) -> String {
    collapse_whitespace(&s.to_lowercase())
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// NFC, lowercase, whitespace collapsed. Used for containment checks.
pub fn normalize_for_containment(s: &str) -> String {
    let nfc: String = s.nfc().collect();
    collapse_whitespace(&nfc.to_lowercase())
}

const INVARIANT_PLURALS: &[&str] = &[
    "asparagus",
    "couscous",
    "hummus",
    "molasses",
    "swiss",
    "species",
    "series",
    "grits",
    "oats",
    "greens",
];

const IRREGULAR: &[(&str, &str)] = &[
    ("leaves", "leaf"),
    ("loaves", "loaf"),
    ("halves", "half"),
    ("knives", "knife"),
    ("teeth", "tooth"),
    ("geese", "goose"),
    ("children", "child"),
];

/// Rule-based English singular of a single word.
pub fn singularize_word(word: &str) -> String {
    if INVARIANT_PLURALS.contains(&word) {
        return word.to_string();
    }
    if let Some((_, single)) = IRREGULAR.iter().find(|(plural, _)| *plural == word) {
        return (*single).to_string();
    }
    let n = word.chars().count();
    if n <= 3 {
        return word.to_string();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if n > 4 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("oes") {
        return format!("{stem}o");
    }
    for suffix in ["ches", "shes", "sses", "xes", "zes"] {
        if word.ends_with(suffix) {
            return word[..word.len() - 2].to_string();
        }
    }
    if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        return word.to_string();
    }
    match word.strip_suffix('s') {
        Some(stem) => stem.to_string(),
        None => word.to_string(),
    }
}

/// Canonical ingredient form: normalized, last word singularized.
pub fn canonical_ingredient(name: &str) -> String {
    let norm = normalize_name(name);
    match norm.rsplit_once(' ') {
        Some((head, last)) => format!("{head} {}", singularize_word(last)),
        None => singularize_word(&norm),
    }
}

/// Lowercase alphanumeric word tokens.
pub fn word_tokens(s: &str) -> Vec<String> {
    s.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_forms() {
        assert_eq!(singularize_word("cups"), "cup");
        assert_eq!(singularize_word("berries"), "berry");
        assert_eq!(singularize_word("tomatoes"), "tomato");
        assert_eq!(singularize_word("peaches"), "peach");
        assert_eq!(singularize_word("leaves"), "leaf");
        assert_eq!(singularize_word("asparagus"), "asparagus");
        assert_eq!(singularize_word("glass"), "glass");
        assert_eq!(singularize_word("egg"), "egg");
        assert_eq!(canonical_ingredient("  Green  Beans "), "green bean");
    }

    #[test]
    fn containment_normalization() {
        assert_eq!(normalize_for_containment("  584\n"), "584");
        // decomposed o + combining diaeresis composes to ö
        assert_eq!(normalize_for_containment("Ro\u{0308}sti"), "rösti");
    }
}
