//! Text normalization shared by duplicate detection, classification and
//! similarity.

/// Lowercase, trim and collapse internal whitespace.
pub fn normalize(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Lowercased alphanumeric tokens. Dots are dropped so that "B.Sc." and
/// "Ph.D." read as single tokens; every other non-alphanumeric character
/// separates tokens.
pub fn tokens(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .filter(|c| *c != '.' && *c != '\'' && *c != '’')
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned.split_whitespace().map(str::to_lowercase).collect()
}

/// True when `needle` occurs in `haystack` as a contiguous token run.
pub fn contains_phrase(haystack: &[String], needle: &[&str]) -> bool {
    if needle.is_empty() || needle.len() > haystack.len() {
        return false;
    }
    haystack
        .windows(needle.len())
        .any(|w| w.iter().zip(needle).all(|(a, b)| a == b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_collapses_whitespace_and_case() {
        assert_eq!(normalize("  Python   Developer "), "python developer");
    }

    #[test]
    fn tokens_drop_dots() {
        assert_eq!(tokens("BSc. Computer Science"), vec!["bsc", "computer", "science"]);
        assert_eq!(tokens("Ph.D. in Law"), vec!["phd", "in", "law"]);
        assert_eq!(tokens("Master's degree"), vec!["masters", "degree"]);
    }

    #[test]
    fn phrase_match() {
        let t = tokens("Degree In Law");
        assert!(contains_phrase(&t, &["degree", "in"]));
        assert!(!contains_phrase(&t, &["in", "degree"]));
    }
}
