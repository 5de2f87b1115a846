//! Canonical encodings of unlabelled genealogies.
//!
//! Every vertex's generation equals its depth below its root, so two
//! genealogies differ by a per-generation relabelling exactly when their
//! forests of rooted trees are isomorphic. Rooted trees get the usual
//! parenthesis encoding with sorted children.

use std::fmt;

use crate::genealogy::Genealogy;

/// Sorted multiset of canonical root-tree strings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForest {
    trees: Vec<String>,
}

impl CanonicalForest {
    pub fn trees(&self) -> &[String] {
        &self.trees
    }
}

impl fmt::Display for CanonicalForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.trees {
            f.write_str(t)?;
        }
        Ok(())
    }
}

/// Encodings of the descendant subtrees `T(v)` of every vertex of
/// generation `n`, in vertex order.
pub fn subtree_codes(g: &Genealogy, n: usize) -> Vec<String> {
    let tau = g.tau();
    let mut codes: Vec<String> = vec!["()".to_string(); g.spec().size(tau - 1)];
    for m in (n..tau - 1).rev() {
        let mut kids: Vec<Vec<String>> = vec![Vec::new(); g.spec().size(m)];
        for (j, code) in codes.into_iter().enumerate() {
            kids[g.parents_of_generation(m + 1)[j] as usize].push(code);
        }
        codes = kids
            .into_iter()
            .map(|mut k| {
                k.sort_unstable();
                let mut s = String::with_capacity(2 + k.iter().map(String::len).sum::<usize>());
                s.push('(');
                for c in k {
                    s.push_str(&c);
                }
                s.push(')');
                s
            })
            .collect();
    }
    codes
}

pub fn canonical_form(g: &Genealogy) -> CanonicalForest {
    let mut trees = subtree_codes(g, 0);
    trees.sort_unstable();
    CanonicalForest { trees }
}
