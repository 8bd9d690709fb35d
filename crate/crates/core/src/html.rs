//! Lenient HTML parsing and visible-text extraction.

use chrono::NaiveDate;
use ego_tree::NodeRef;
use scraper::{Html, Node};

use crate::index::DocMeta;

/// Elements whose content is never visible.
const HIDDEN: &[&str] = &[
    "script", "style", "noscript", "template", "head", "title", "iframe", "object", "embed",
];

/// Elements that separate words even without surrounding whitespace.
const BREAKING: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "body",
    "br",
    "caption",
    "dd",
    "details",
    "dialog",
    "div",
    "dl",
    "dt",
    "fieldset",
    "figcaption",
    "figure",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "header",
    "hr",
    "li",
    "main",
    "nav",
    "ol",
    "option",
    "p",
    "pre",
    "section",
    "summary",
    "table",
    "tbody",
    "td",
    "tfoot",
    "th",
    "thead",
    "tr",
    "ul",
];

pub fn is_hidden(tag: &str) -> bool {
    HIDDEN.contains(&tag)
}

pub fn is_breaking(tag: &str) -> bool {
    BREAKING.contains(&tag)
}

pub fn heading_level(tag: &str) -> Option<u8> {
    match tag {
        "h1" => Some(1),
        "h2" => Some(2),
        "h3" => Some(3),
        "h4" => Some(4),
        "h5" => Some(5),
        "h6" => Some(6),
        _ => None,
    }
}

/// Parses arbitrary bytes as an HTML document. Invalid UTF-8 is replaced and
/// malformed markup is repaired by the HTML5 tree builder, so this never fails.
pub fn parse_html(raw: &[u8]) -> Html {
    Html::parse_document(&String::from_utf8_lossy(raw))
}

/// The `<body>` element, or the document root when the tree has none.
pub(crate) fn body(tree: &Html) -> NodeRef<'_, Node> {
    tree.root_element()
        .children()
        .find(|n| n.value().as_element().is_some_and(|e| e.name() == "body"))
        .unwrap_or_else(|| *tree.root_element())
}

/// Flattened content in reading order.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Atom {
    Text { text: String, anchor: bool },
    Break,
    Image { alt: String },
    Heading(u8),
}

pub(crate) fn collect_atoms(node: NodeRef<'_, Node>, out: &mut Vec<Atom>) {
    walk(node, false, out);
}

fn walk(node: NodeRef<'_, Node>, anchor: bool, out: &mut Vec<Atom>) {
    match node.value() {
        Node::Text(t) => out.push(Atom::Text {
            text: t.to_string(),
            anchor,
        }),
        Node::Element(el) => {
            let tag = el.name();
            if is_hidden(tag) {
                return;
            }
            if tag == "img" {
                out.push(Atom::Image {
                    alt: el.attr("alt").unwrap_or_default().to_string(),
                });
                return;
            }
            let breaking = is_breaking(tag);
            if breaking {
                out.push(Atom::Break);
            }
            if let Some(level) = heading_level(tag) {
                out.push(Atom::Heading(level));
            }
            let anchor = anchor || tag == "a";
            for child in node.children() {
                walk(child, anchor, out);
            }
            if breaking {
                out.push(Atom::Break);
            }
        }
        Node::Document | Node::Fragment => {
            for child in node.children() {
                walk(child, anchor, out);
            }
        }
        // comments, doctypes, processing instructions
        _ => {}
    }
}

/// Whitespace-normalized text of a run of atoms plus what was seen along the way.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Rendered {
    pub text: String,
    pub chars: usize,
    pub anchor_chars: usize,
    pub images: Vec<String>,
    pub heading_depth: Option<u8>,
}

pub(crate) fn render(atoms: &[Atom]) -> Rendered {
    let mut r = Rendered::default();
    // Some(true) when the pending space came from inside an anchor
    let mut pending: Option<bool> = None;
    for atom in atoms {
        match atom {
            Atom::Text { text, anchor } => {
                for c in text.chars() {
                    if c.is_whitespace() {
                        pending = Some(pending.map_or(*anchor, |p| p && *anchor));
                        continue;
                    }
                    if let Some(space_in_anchor) = pending.take() {
                        if r.chars > 0 {
                            r.text.push(' ');
                            r.chars += 1;
                            if space_in_anchor && *anchor {
                                r.anchor_chars += 1;
                            }
                        }
                    }
                    r.text.push(c);
                    r.chars += 1;
                    if *anchor {
                        r.anchor_chars += 1;
                    }
                }
            }
            Atom::Break => pending = Some(false),
            Atom::Image { alt } => r.images.push(alt.clone()),
            Atom::Heading(level) => {
                r.heading_depth = Some(r.heading_depth.map_or(*level, |d| d.min(*level)));
            }
        }
    }
    r
}

/// Normalized visible text of a subtree.
pub(crate) fn visible_text_of(node: NodeRef<'_, Node>) -> String {
    let mut atoms = Vec::new();
    collect_atoms(node, &mut atoms);
    render(&atoms).text
}

/// One corpus page.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub raw_html: Vec<u8>,
    /// Whitespace-normalized text of everything a reader would see.
    pub visible_text: String,
    pub title: String,
    /// Text of the page's `<h1>` and `<h2>` elements, in order.
    pub top_headings: Vec<String>,
    pub url: Option<String>,
    pub fetch_date: Option<NaiveDate>,
}

impl Document {
    pub fn from_html(id: impl Into<String>, raw_html: impl Into<Vec<u8>>, meta: DocMeta) -> Self {
        let raw_html = raw_html.into();
        let tree = parse_html(&raw_html);
        let visible_text = visible_text_of(body(&tree));
        let title = tree
            .root_element()
            .descendants()
            .find(|n| n.value().as_element().is_some_and(|e| e.name() == "title"))
            .map(|n| {
                let text: String = n
                    .descendants()
                    .filter_map(|d| d.value().as_text().map(|t| t.to_string()))
                    .collect();
                crate::text::normalize_whitespace(&text)
            })
            .unwrap_or_default();
        let top_headings = body(&tree)
            .descendants()
            .filter(|n| {
                n.value()
                    .as_element()
                    .is_some_and(|e| matches!(e.name(), "h1" | "h2"))
            })
            .map(visible_text_of)
            .filter(|t| !t.is_empty())
            .collect();
        Self {
            id: id.into(),
            raw_html,
            visible_text,
            title,
            top_headings,
            url: meta.url,
            fetch_date: meta.fetch_date,
        }
    }

    pub fn meta(&self) -> DocMeta {
        DocMeta {
            url: self.url.clone(),
            fetch_date: self.fetch_date,
        }
    }
}
