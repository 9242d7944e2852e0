/// A token with character offsets into the sentence it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

const DETACHED: &[char] = &['.', ',', ':', ';', '!', '?', '(', ')'];

/// Split on whitespace, detaching the punctuation marks in `DETACHED`.
/// Offsets are in characters, not bytes.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let chars: Vec<char> = sentence.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        split_word(&chars, start, i, &mut out);
    }
    out
}

fn split_word(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let mut seg = start;
    for i in start..end {
        let c = chars[i];
        if !DETACHED.contains(&c) {
            continue;
        }
        // keep decimal points and thousands separators inside numbers
        if (c == '.' || c == ',')
            && i > start
            && i + 1 < end
            && chars[i - 1].is_ascii_digit()
            && chars[i + 1].is_ascii_digit()
        {
            continue;
        }
        if seg < i {
            out.push(make(chars, seg, i));
        }
        out.push(make(chars, i, i + 1));
        seg = i + 1;
    }
    if seg < end {
        out.push(make(chars, seg, end));
    }
}

fn make(chars: &[char], start: usize, end: usize) -> Token {
    Token {
        surface: chars[start..end].iter().collect(),
        start,
        end,
    }
}

/// Sentence boundaries: `.`, `!` or `?` followed by whitespace and an
/// uppercase letter or digit, and any line break. A period after a single
/// capital letter ("J. Smith") is not a boundary.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' || c == '\r' {
            push_trimmed(&chars, start, i, &mut out);
            start = i + 1;
        } else if matches!(c, '.' | '!' | '?') && is_boundary(&chars, i) {
            push_trimmed(&chars, start, i + 1, &mut out);
            start = i + 1;
        }
        i += 1;
    }
    push_trimmed(&chars, start, chars.len(), &mut out);
    out
}

fn is_boundary(chars: &[char], i: usize) -> bool {
    let mut j = i + 1;
    if j >= chars.len() {
        return true;
    }
    if !chars[j].is_whitespace() {
        return false;
    }
    while j < chars.len() && chars[j].is_whitespace() {
        if chars[j] == '\n' {
            return true;
        }
        j += 1;
    }
    if j >= chars.len() {
        return true;
    }
    if !(chars[j].is_uppercase() || chars[j].is_ascii_digit()) {
        return false;
    }
    if chars[i] == '.' {
        let initial = i >= 1
            && chars[i - 1].is_uppercase()
            && (i == 1 || !chars[i - 2].is_alphanumeric());
        if initial {
            return false;
        }
    }
    true
}

fn push_trimmed(chars: &[char], mut start: usize, mut end: usize, out: &mut Vec<Sentence>) {
    while start < end && chars[start].is_whitespace() {
        start += 1;
    }
    while end > start && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    if start < end {
        out.push(Sentence {
            text: chars[start..end].iter().collect(),
            start,
            end,
        });
    }
}
