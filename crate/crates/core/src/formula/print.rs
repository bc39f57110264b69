use super::{FormulaStore, Literal, Node, NodeId};

/// Output notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    /// The parseable `(or …)` / `(and …)` / `~X` grammar.
    #[default]
    Ascii,
    /// Typographic notation: `(∨ …)`, `{∧ …}`, `¬φ`, and `X̄` for negative
    /// literals. Display only.
    Unicode,
}

enum Item {
    Node(NodeId),
    Text(&'static str),
}

impl FormulaStore {
    /// Renders `id` in the parseable grammar.
    pub fn print(&self, id: NodeId) -> String {
        self.print_with(id, Style::Ascii)
    }

    /// `A` or `~A`.
    pub fn literal_text(&self, lit: Literal) -> String {
        let name = self.var_name(lit.var());
        if lit.is_positive() {
            name.to_string()
        } else {
            format!("~{name}")
        }
    }

    pub fn print_with(&self, id: NodeId, style: Style) -> String {
        let mut out = String::new();
        let mut stack = vec![Item::Node(id)];
        while let Some(item) = stack.pop() {
            match item {
                Item::Text(t) => {
                    if t != ")" && t != "}" {
                        space(&mut out);
                    }
                    out.push_str(t);
                }
                Item::Node(id) => {
                    let (open, close) = match (self.node(id), style) {
                        (Node::Lit(l), _) => {
                            space(&mut out);
                            let name = self.var_name(l.var());
                            match (l.is_positive(), style) {
                                (true, _) => out.push_str(name),
                                (false, Style::Ascii) => {
                                    out.push('~');
                                    out.push_str(name);
                                }
                                (false, Style::Unicode) => {
                                    out.push_str(name);
                                    out.push('\u{0305}');
                                }
                            }
                            continue;
                        }
                        (Node::True, _) => {
                            space(&mut out);
                            out.push('T');
                            continue;
                        }
                        (Node::False, _) => {
                            space(&mut out);
                            out.push('F');
                            continue;
                        }
                        (Node::Conj(_), Style::Ascii) => ("(and", ")"),
                        (Node::Disj(_), Style::Ascii) => ("(or", ")"),
                        (Node::Neg(_), Style::Ascii) => ("(not", ")"),
                        (Node::Conj(_), Style::Unicode) => ("{\u{2227}", "}"),
                        (Node::Disj(_), Style::Unicode) => ("(\u{2228}", ")"),
                        (Node::Neg(c), Style::Unicode) => {
                            space(&mut out);
                            out.push('\u{00ac}');
                            stack.push(Item::Node(*c));
                            continue;
                        }
                    };
                    stack.push(Item::Text(close));
                    for &c in self.children(id).iter().rev() {
                        stack.push(Item::Node(c));
                    }
                    stack.push(Item::Text(open));
                }
            }
        }
        out
    }
}

fn space(out: &mut String) {
    if let Some(last) = out.chars().next_back() {
        if !matches!(last, '(' | '{' | '\u{00ac}') {
            out.push(' ');
        }
    }
}
