//! Text canonicalization shared by name matching, phrase matching and the
//! query cache.
//!
//! The canonical form is NFC, lower-cased, with every whitespace run collapsed
//! to a single space and the ends trimmed. [`NormalizedText`] keeps a map back
//! to byte offsets of the original string so that matches found in the
//! canonical form can be reported as spans of the input.

use unicode_normalization::char::canonical_combining_class;
use unicode_normalization::UnicodeNormalization;

/// Canonical form of `s`.
pub fn normalize(s: &str) -> String {
    NormalizedText::new(s).as_str().trim_matches(' ').to_string()
}

/// Letters and digits; matches must not be flanked by these.
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    /// Byte range in the normalized string.
    norm: (usize, usize),
    /// Byte range in the original string.
    orig: (usize, usize),
}

/// A normalized view of a string with an offset map back to the original.
#[derive(Debug, Clone)]
pub struct NormalizedText {
    norm: String,
    segments: Vec<Segment>,
}

impl NormalizedText {
    pub fn new(original: &str) -> Self {
        let mut norm = String::with_capacity(original.len());
        let mut segments: Vec<Segment> = Vec::new();
        let mut iter = original.char_indices().peekable();
        while let Some((start, c)) = iter.next() {
            let mut end = start + c.len_utf8();
            if c.is_whitespace() {
                while let Some(&(i, n)) = iter.peek() {
                    if !n.is_whitespace() {
                        break;
                    }
                    end = i + n.len_utf8();
                    iter.next();
                }
                let at = norm.len();
                norm.push(' ');
                segments.push(Segment {
                    norm: (at, at + 1),
                    orig: (start, end),
                });
                continue;
            }
            // A cluster is a starter plus any trailing combining marks; NFC
            // composition happens within clusters.
            while let Some(&(i, n)) = iter.peek() {
                if n.is_whitespace() || canonical_combining_class(n) == 0 {
                    break;
                }
                end = i + n.len_utf8();
                iter.next();
            }
            let at = norm.len();
            for composed in original[start..end].nfc() {
                norm.extend(composed.to_lowercase());
            }
            segments.push(Segment {
                norm: (at, norm.len()),
                orig: (start, end),
            });
        }
        Self { norm, segments }
    }

    pub fn as_str(&self) -> &str {
        &self.norm
    }

    /// Maps a normalized byte range whose ends fall on segment boundaries to
    /// the corresponding original byte range.
    pub fn original_span(&self, start: usize, end: usize) -> Option<(usize, usize)> {
        let first = self
            .segments
            .binary_search_by_key(&start, |s| s.norm.0)
            .ok()?;
        let last = self
            .segments
            .binary_search_by_key(&end, |s| s.norm.1)
            .ok()?;
        (first <= last).then(|| (self.segments[first].orig.0, self.segments[last].orig.1))
    }

    /// Normalized byte ranges of the segments, in order. Whitespace runs are
    /// single one-byte segments.
    pub(crate) fn segment_ranges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.segments.iter().map(|s| s.norm)
    }

    /// True if `pos` in the normalized string starts a segment.
    pub fn is_segment_start(&self, pos: usize) -> bool {
        self.segments
            .binary_search_by_key(&pos, |s| s.norm.0)
            .is_ok()
    }

    /// True if `pos` in the normalized string ends a segment.
    pub fn is_segment_end(&self, pos: usize) -> bool {
        self.segments
            .binary_search_by_key(&pos, |s| s.norm.1)
            .is_ok()
    }
}

/// True if `needle` occurs in `hay` with no letter or digit directly on
/// either side. Both arguments must already be normalized.
pub fn contains_phrase(hay: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    let mut from = 0;
    while let Some(rel) = hay[from..].find(needle) {
        let start = from + rel;
        let end = start + needle.len();
        let before_ok = hay[..start].chars().next_back().is_none_or(|c| !is_word_char(c));
        let after_ok = hay[end..].chars().next().is_none_or(|c| !is_word_char(c));
        if before_ok && after_ok {
            return true;
        }
        from = start + hay[start..].chars().next().map_or(1, char::len_utf8);
    }
    false
}
