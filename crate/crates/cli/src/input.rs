//! Parsers for command-line values.

use raag::{Automorphism, Generator, Graph, RaagError, Result, VertexSet, Word};

/// A word; `1` (or nothing) is the identity.
pub fn word(g: &Graph, text: &str) -> Result<Word> {
    match text.trim() {
        "" | "1" => Ok(Word::identity()),
        t => g.parse_word(t),
    }
}

/// Comma-separated words.
pub fn words(g: &Graph, text: &str) -> Result<Vec<Word>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| word(g, t)).collect()
}

/// `{a},{b,c}`: any number of braced vertex sets.
pub fn vertex_sets(g: &Graph, text: &str) -> Result<Vec<VertexSet>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let rest_open = rest
            .strip_prefix('{')
            .ok_or_else(|| RaagError::Parse(format!("expected `{{` in `{text}`")))?;
        let end = rest_open
            .find('}')
            .ok_or_else(|| RaagError::Parse(format!("unclosed `{{` in `{text}`")))?;
        out.push(g.parse_vertex_set(&rest[..end + 2])?);
        rest = rest_open[end + 1..].trim_start().trim_start_matches(',').trim_start();
    }
    Ok(out)
}

/// `4,4` style bounds.
pub fn numbers(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| RaagError::Parse(format!("`{}` is not a nonnegative integer", t.trim())))
        })
        .collect()
}

/// Generator descriptors separated by `;`, composed left to right as
/// maps (`f; g` is `f ∘ g`). Empty means the identity.
pub fn product(g: &Graph, text: &str) -> Result<Automorphism> {
    let gens: Vec<Generator> = text
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty() && *t != "id")
        .map(|t| Generator::parse(g, t))
        .collect::<Result<_>>()?;
    Automorphism::product(g, &gens)
}

pub fn fmt_word(g: &Graph, w: &[raag::Letter]) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        g.fmt_word(w)
    }
}

pub fn fmt_words(g: &Graph, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| fmt_word(g, w)).collect()
}

/// `v -> image` for each generator.
pub fn fmt_images(g: &Graph, a: &Automorphism) -> Vec<String> {
    g.vertices()
        .map(|v| format!("{} -> {}", g.name(v), fmt_word(g, a.image(v))))
        .collect()
}
