/// Number of leading words of a metadata abstract used as the search key.
pub const PREFIX_WORDS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    /// Byte offset into the original text.
    pub byte: usize,
    /// Offset in characters (Unicode scalar values).
    pub char: usize,
}

fn push_lower(out: &mut String, c: char) {
    out.extend(c.to_lowercase());
}

/// Lowercase and collapse every whitespace run to one space.
pub fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_ws = false;
    for c in s.chars() {
        if c.is_whitespace() {
            if !in_ws {
                out.push(' ');
            }
            in_ws = true;
        } else {
            push_lower(&mut out, c);
            in_ws = false;
        }
    }
    out
}

/// Normalized search key: the first six whitespace-separated words,
/// lowercased and joined by single spaces.
pub fn prefix_key(partial_abstract: &str) -> Option<String> {
    let words: Vec<&str> = partial_abstract.split_whitespace().take(PREFIX_WORDS).collect();
    if words.is_empty() {
        None
    } else {
        Some(normalize(&words.join(" ")))
    }
}

/// Find where a metadata abstract starts inside the full text. Whitespace
/// differences (line wrapping, double spaces) and case are ignored; the
/// match must begin at a word start.
pub fn locate_by_prefix(fulltext: &str, partial_abstract: &str) -> Option<Location> {
    let key = prefix_key(partial_abstract)?;

    // normalized text plus, per normalized char, its origin
    let mut norm = String::with_capacity(fulltext.len());
    let mut origin: Vec<(usize, usize, usize)> = Vec::with_capacity(fulltext.len());
    let mut in_ws = false;
    for (ci, (bi, c)) in fulltext.char_indices().enumerate() {
        if c.is_whitespace() {
            if !in_ws {
                origin.push((norm.len(), bi, ci));
                norm.push(' ');
            }
            in_ws = true;
        } else {
            for lc in c.to_lowercase() {
                origin.push((norm.len(), bi, ci));
                norm.push(lc);
            }
            in_ws = false;
        }
    }

    for (m, _) in norm.match_indices(key.as_str()) {
        let at_word_start = norm[..m].chars().next_back().map_or(true, |p| !p.is_alphanumeric());
        if !at_word_start {
            continue;
        }
        let k = origin.partition_point(|o| o.0 < m);
        let (_, byte, ch) = origin[k];
        return Some(Location { byte, char: ch });
    }
    None
}
