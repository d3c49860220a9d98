/// Derives a search query from a docstring: its first sentence, with doc
/// tags, HTML-like markup and surplus whitespace removed. An empty result
/// means the record has no usable query.
pub fn derive_query(docstring: &str) -> String {
    let text = unwrap_inline_tags(docstring);

    let mut kept: Vec<&str> = Vec::new();
    for line in text.lines() {
        let line = line.trim().trim_start_matches('*').trim();
        if line.is_empty() {
            if kept.is_empty() {
                continue;
            }
            break;
        }
        if line.starts_with('@') {
            break;
        }
        match block_tag_start(line) {
            Some(cut) => {
                kept.push(&line[..cut]);
                break;
            }
            None => kept.push(line),
        }
    }

    let plain = strip_markup(&kept.join(" "));
    let collapsed = plain.split_whitespace().collect::<Vec<_>>().join(" ");
    first_sentence(&collapsed).to_string()
}

/// `{@code x}` and `{@link Foo}` become their argument text.
fn unwrap_inline_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("{@") {
        out.push_str(&rest[..start]);
        let tail = &rest[start + 2..];
        match tail.find('}') {
            Some(end) => {
                let inner = &tail[..end];
                let arg = inner.split_once(char::is_whitespace).map_or("", |(_, a)| a);
                out.push_str(arg.trim());
                rest = &tail[end + 1..];
            }
            None => {
                rest = tail;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Byte offset of a trailing `@tag` segment that starts a word.
fn block_tag_start(line: &str) -> Option<usize> {
    line.char_indices()
        .find(|&(i, c)| c == '@' && line[..i].chars().last().is_some_and(char::is_whitespace))
        .map(|(i, _)| i)
}

fn strip_markup(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let opens_tag = c == '<'
            && text[i + 1..]
                .chars()
                .next()
                .is_some_and(|n| n.is_ascii_alphabetic() || n == '/' || n == '!');
        if opens_tag {
            if let Some(len) = text[i..].find('>') {
                let end = i + len;
                while chars.peek().is_some_and(|&(j, _)| j <= end) {
                    chars.next();
                }
                out.push(' ');
                continue;
            }
        }
        out.push(c);
    }
    out
}

fn first_sentence(text: &str) -> &str {
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'.' && bytes.get(i + 1).is_none_or(|n| n.is_ascii_whitespace()) {
            return &text[..=i];
        }
    }
    text
}
