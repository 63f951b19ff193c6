use std::fmt::Write;

use super::{Dendrogram, NodeRef};
use crate::round2;

/// Newick text where every node is annotated with its merge height (leaves
/// at 0), rounded to two decimals, e.g.
/// `((bank:0.0,robbery:0.0):1.0,child:0.0);`.
pub fn to_newick(dendro: &Dendrogram) -> String {
    let mut out = String::new();
    write_node(dendro, dendro.root(), &mut out);
    out.push(';');
    out
}

fn write_node(dendro: &Dendrogram, node: NodeRef, out: &mut String) {
    match node {
        NodeRef::Leaf(i) => out.push_str(&quote(&dendro.leaves[i])),
        NodeRef::Merge(m) => {
            let merge = &dendro.merges[m];
            out.push('(');
            write_child(dendro, merge.left, out);
            out.push(',');
            write_child(dendro, merge.right, out);
            out.push(')');
        }
    }
}

fn write_child(dendro: &Dendrogram, node: NodeRef, out: &mut String) {
    write_node(dendro, node, out);
    let _ = write!(out, ":{:?}", round2(dendro.height(node)));
}

fn quote(label: &str) -> String {
    let needs_quotes = label.is_empty() || label.chars().any(|c| c.is_whitespace() || "()[]':;,".contains(c));
    if needs_quotes {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}
