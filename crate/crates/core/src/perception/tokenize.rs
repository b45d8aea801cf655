use crate::lexicon::ModifierTables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Punct,
    Emoticon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    /// At least two letters, every letter uppercase.
    pub is_all_caps: bool,
    pub position: usize,
    pub kind: TokenKind,
    /// Character offsets `[start, end)` into the source text.
    pub span: (usize, usize),
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    pub fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punct && self.surface.starts_with(c)
    }
}

pub fn is_all_caps(surface: &str) -> bool {
    let mut letters = 0;
    for c in surface.chars().filter(|c| c.is_alphabetic()) {
        if !c.is_uppercase() {
            return false;
        }
        letters += 1;
    }
    letters >= 2
}

/// Splits on whitespace, peels leading and trailing punctuation into
/// single-character tokens, and keeps emoticons from `modifiers` whole.
pub fn tokenize(text: &str, modifiers: &ModifierTables) -> Vec<Token> {
    let mut faces: Vec<&str> = modifiers.emoticons.keys().map(String::as_str).collect();
    faces.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    Tokenizer {
        text,
        faces,
        char_of_byte: char_offsets(text),
        out: Vec::new(),
    }
    .run()
}

/// Word tokens only, in order.
pub fn words(tokens: &[Token]) -> impl Iterator<Item = &Token> {
    tokens.iter().filter(|t| t.is_word())
}

fn char_offsets(text: &str) -> Vec<usize> {
    let mut map = vec![0; text.len() + 1];
    let mut chars = 0;
    for (b, _) in text.char_indices() {
        map[b] = chars;
        chars += 1;
    }
    map[text.len()] = chars;
    map
}

struct Tokenizer<'a> {
    text: &'a str,
    faces: Vec<&'a str>,
    char_of_byte: Vec<usize>,
    out: Vec<Token>,
}

fn edge_is_alnum(c: Option<char>) -> bool {
    c.is_some_and(char::is_alphanumeric)
}

impl<'a> Tokenizer<'a> {
    fn run(mut self) -> Vec<Token> {
        let text = self.text;
        let mut start = None;
        for (b, c) in text.char_indices() {
            match (c.is_whitespace(), start) {
                (true, Some(s)) => {
                    self.chunk(s, b);
                    start = None;
                }
                (false, None) => start = Some(b),
                _ => {}
            }
        }
        if let Some(s) = start {
            self.chunk(s, text.len());
        }
        self.out
    }

    fn push(&mut self, lo: usize, hi: usize, kind: TokenKind) {
        let surface = &self.text[lo..hi];
        self.out.push(Token {
            surface: surface.to_string(),
            lower: if kind == TokenKind::Emoticon {
                surface.to_string()
            } else {
                surface.to_lowercase()
            },
            is_all_caps: is_all_caps(surface),
            position: self.out.len(),
            kind,
            span: (self.char_of_byte[lo], self.char_of_byte[hi]),
        });
    }

    /// Emoticon starting at `lo` that does not run into a following letter.
    fn face_prefix(&self, lo: usize, hi: usize) -> Option<usize> {
        let s = &self.text[lo..hi];
        self.faces.iter().find_map(|f| {
            let rest = s.strip_prefix(f)?;
            let joins = edge_is_alnum(f.chars().last()) && edge_is_alnum(rest.chars().next());
            (!joins).then_some(f.len())
        })
    }

    fn face_suffix(&self, lo: usize, hi: usize) -> Option<usize> {
        let s = &self.text[lo..hi];
        self.faces.iter().find_map(|f| {
            let rest = s.strip_suffix(f)?;
            let joins = edge_is_alnum(f.chars().next()) && edge_is_alnum(rest.chars().last());
            (!joins).then_some(f.len())
        })
    }

    fn chunk(&mut self, mut lo: usize, mut hi: usize) {
        let text = self.text;
        while lo < hi {
            if let Some(len) = self.face_prefix(lo, hi) {
                self.push(lo, lo + len, TokenKind::Emoticon);
                lo += len;
                continue;
            }
            let c = text[lo..hi].chars().next().expect("nonempty");
            if c.is_alphanumeric() {
                break;
            }
            self.push(lo, lo + c.len_utf8(), TokenKind::Punct);
            lo += c.len_utf8();
        }

        let mut tail = Vec::new();
        while hi > lo {
            if let Some(len) = self.face_suffix(lo, hi) {
                tail.push((hi - len, hi, TokenKind::Emoticon));
                hi -= len;
                continue;
            }
            let c = text[lo..hi].chars().next_back().expect("nonempty");
            if c.is_alphanumeric() {
                break;
            }
            tail.push((hi - c.len_utf8(), hi, TokenKind::Punct));
            hi -= c.len_utf8();
        }

        if lo < hi {
            self.push(lo, hi, TokenKind::Word);
        }
        for (a, b, kind) in tail.into_iter().rev() {
            self.push(a, b, kind);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Polarity;

    fn tables() -> ModifierTables {
        let mut m = ModifierTables::default();
        for (f, p) in [
            (":D", Polarity::Positive),
            (":)", Polarity::Positive),
            (":-)", Polarity::Positive),
            ("D:", Polarity::Negative),
            ("xD", Polarity::Positive),
            ("<3", Polarity::Positive),
            ("</3", Polarity::Negative),
        ] {
            m.emoticons.insert(f.to_string(), p);
        }
        m
    }

    fn surfaces(text: &str) -> Vec<(String, TokenKind)> {
        tokenize(text, &tables())
            .into_iter()
            .map(|t| (t.surface, t.kind))
            .collect()
    }

    use TokenKind::*;

    #[test]
    fn empty() {
        assert!(tokenize("", &tables()).is_empty());
        assert!(tokenize("   \t ", &tables()).is_empty());
    }

    #[test]
    fn punctuation_is_split_off() {
        assert_eq!(
            surfaces("not happy!"),
            vec![("not".into(), Word), ("happy".into(), Word), ("!".into(), Punct)]
        );
    }

    #[test]
    fn emoticon_preserved_whole() {
        assert_eq!(
            surfaces("here you are! :D"),
            vec![
                ("here".into(), Word),
                ("you".into(), Word),
                ("are".into(), Word),
                ("!".into(), Punct),
                (":D".into(), Emoticon)
            ]
        );
    }

    #[test]
    fn emoticon_adjacent_to_punctuation_and_words() {
        assert_eq!(
            surfaces("it!:D"),
            vec![("it".into(), Word), ("!".into(), Punct), (":D".into(), Emoticon)]
        );
        assert_eq!(
            surfaces("you:)"),
            vec![("you".into(), Word), (":)".into(), Emoticon)]
        );
        assert_eq!(surfaces("</3"), vec![("</3".into(), Emoticon)]);
        assert_eq!(surfaces("xD"), vec![("xD".into(), Emoticon)]);
    }

    #[test]
    fn letter_emoticons_do_not_eat_words() {
        assert_eq!(surfaces("Dad:"), vec![("Dad".into(), Word), (":".into(), Punct)]);
        assert_eq!(surfaces("haxD"), vec![("haxD".into(), Word)]);
    }

    #[test]
    fn internal_punctuation_stays() {
        assert_eq!(
            surfaces("don't [order served]"),
            vec![
                ("don't".into(), Word),
                ("[".into(), Punct),
                ("order".into(), Word),
                ("served".into(), Word),
                ("]".into(), Punct)
            ]
        );
    }

    #[test]
    fn caps_and_positions() {
        let toks = tokenize("BAD a OK I", &tables());
        assert!(toks[0].is_all_caps);
        assert!(!toks[1].is_all_caps);
        assert!(toks[2].is_all_caps);
        assert!(!toks[3].is_all_caps, "single letter is not all caps");
        assert_eq!(toks[0].lower, "bad");
        assert!(toks.iter().enumerate().all(|(i, t)| t.position == i));
    }

    #[test]
    fn spans_are_char_offsets() {
        let text = "café, naïve!";
        let toks = tokenize(text, &tables());
        let chars: Vec<char> = text.chars().collect();
        for t in &toks {
            let slice: String = chars[t.span.0..t.span.1].iter().collect();
            assert_eq!(slice, t.surface);
        }
        assert_eq!(toks[0].span, (0, 4));
    }
}
