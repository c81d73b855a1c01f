//! Tokenization and n-gram extraction.

use crate::error::{Error, Result};

/// Separator used when joining the tokens of an n-gram into one term.
/// Tokens never contain whitespace, so a space is unambiguous.
pub const NGRAM_JOINER: &str = " ";

/// Case-fold and split on anything that is not a letter or digit.
/// Runs of separators collapse; empty input yields an empty list.
pub fn preprocess_text(raw: &str) -> Vec<String> {
    raw.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|token| !token.is_empty())
        .map(str::to_string)
        .collect()
}

/// All contiguous n-grams for each n in `min..=max`, in document order.
pub fn extract_ngrams(tokens: &[String], range: (usize, usize)) -> Result<Vec<String>> {
    let (min, max) = range;
    if min < 1 || min > max {
        return Err(Error::Config(format!(
            "invalid n-gram range ({min}, {max}): need 1 <= min <= max"
        )));
    }
    let mut grams = Vec::new();
    for n in min..=max {
        if n > tokens.len() {
            break;
        }
        for window in tokens.windows(n) {
            grams.push(window.join(NGRAM_JOINER));
        }
    }
    Ok(grams)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn tokenizes_plain_text() {
        assert_eq!(
            preprocess_text("Typo in error message"),
            tokens(&["typo", "in", "error", "message"])
        );
    }

    #[test]
    fn empty_input_yields_empty_list() {
        assert_eq!(preprocess_text(""), Vec::<String>::new());
        assert_eq!(preprocess_text("  --  "), Vec::<String>::new());
    }

    #[test]
    fn punctuation_separates_and_collapses() {
        assert_eq!(
            preprocess_text("NPE: error-code 42"),
            tokens(&["npe", "error", "code", "42"])
        );
    }

    #[test]
    fn unigrams_and_bigrams_in_document_order() {
        let grams = extract_ngrams(&tokens(&["a", "b", "c"]), (1, 2)).unwrap();
        assert_eq!(grams, vec!["a", "b", "c", "a b", "b c"]);
    }

    #[test]
    fn single_token_has_no_bigrams() {
        let grams = extract_ngrams(&tokens(&["a"]), (1, 2)).unwrap();
        assert_eq!(grams, vec!["a"]);
    }

    #[test]
    fn unigram_only_range() {
        let grams = extract_ngrams(&tokens(&["a", "b"]), (1, 1)).unwrap();
        assert_eq!(grams, vec!["a", "b"]);
    }

    #[test]
    fn invalid_range_is_a_config_error() {
        assert!(extract_ngrams(&tokens(&["a"]), (0, 1)).is_err());
        assert!(extract_ngrams(&tokens(&["a"]), (2, 1)).is_err());
    }
}
