use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use crate::{Error, Result};

/// Domain label for tasks that cannot reach any top-level class.
pub const UNCLASSIFIED: &str = "unclassified";

/// Task class hierarchy as a child → parents graph.
///
/// Top-level classes (for example "Natural Language Processing") are the
/// roots used as domain labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaskHierarchy {
    pub nodes: BTreeSet<String>,
    pub parents: BTreeMap<String, BTreeSet<String>>,
    /// Resolved top-level class of every classified node.
    pub toplevel: BTreeMap<String, String>,
    pub toplevel_classes: BTreeSet<String>,
}

fn truthy(text: &str) -> bool {
    matches!(text.trim().to_ascii_lowercase().as_str(), "1" | "true" | "yes" | "y" | "toplevel")
}

impl TaskHierarchy {
    /// Builds a hierarchy from `(child, parent)` edges and a set of top-level classes.
    pub fn from_edges<I>(edges: I, toplevel_classes: BTreeSet<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut hierarchy = TaskHierarchy {
            toplevel_classes,
            ..Default::default()
        };
        for class in &hierarchy.toplevel_classes {
            hierarchy.nodes.insert(class.clone());
        }
        for (child, parent) in edges {
            hierarchy.nodes.insert(child.clone());
            hierarchy.nodes.insert(parent.clone());
            hierarchy.parents.entry(child).or_default().insert(parent);
        }
        hierarchy.check_acyclic()?;
        hierarchy.resolve_toplevel();
        Ok(hierarchy)
    }

    fn check_acyclic(&self) -> Result<()> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
        for start in &self.nodes {
            if marks.contains_key(start.as_str()) {
                continue;
            }
            // Iterative DFS: (node, parent iterator).
            let mut stack: Vec<(&str, std::collections::btree_set::Iter<'_, String>)> = Vec::new();
            marks.insert(start, Mark::Active);
            stack.push((start, self.parents_of(start)));
            while let Some((node, iter)) = stack.last_mut() {
                let node = *node;
                match iter.next() {
                    Some(parent) => match marks.get(parent.as_str()) {
                        Some(Mark::Active) => {
                            return Err(Error::HierarchyCycle {
                                child: node.to_string(),
                                parent: parent.clone(),
                            })
                        }
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(parent, Mark::Active);
                            stack.push((parent, self.parents_of(parent)));
                        }
                    },
                    None => {
                        marks.insert(node, Mark::Done);
                        stack.pop();
                    }
                }
            }
        }
        Ok(())
    }

    fn parents_of(&self, node: &str) -> std::collections::btree_set::Iter<'_, String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.parents.get(node).unwrap_or(&EMPTY).iter()
    }

    fn resolve_toplevel(&mut self) {
        let mut resolved = BTreeMap::new();
        for node in &self.nodes {
            // Breadth-first walk upwards; smallest reachable class name wins.
            let mut seen = BTreeSet::new();
            let mut frontier = vec![node.as_str()];
            let mut found: Option<&str> = None;
            while let Some(current) = frontier.pop() {
                if !seen.insert(current) {
                    continue;
                }
                if self.toplevel_classes.contains(current) && found.is_none_or(|f| current < f) {
                    found = Some(current);
                }
                frontier.extend(self.parents_of(current).map(String::as_str));
            }
            if let Some(class) = found {
                resolved.insert(node.clone(), class.to_string());
            }
        }
        self.toplevel = resolved;
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Top-level class of a task, or [`UNCLASSIFIED`].
    pub fn domain_of(&self, task: &str) -> &str {
        self.toplevel.get(task).map(String::as_str).unwrap_or(UNCLASSIFIED)
    }

    /// Nodes that cannot reach any top-level class.
    pub fn unclassified(&self) -> Vec<&str> {
        self.nodes
            .iter()
            .filter(|n| !self.toplevel.contains_key(*n))
            .map(String::as_str)
            .collect()
    }

    /// Stable depth-first pre-order placing tasks that share a superclass next
    /// to each other. Children are visited alphabetically; roots are the
    /// top-level classes followed by any other parentless nodes.
    pub fn adjacency_order(&self) -> Vec<String> {
        let mut children: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (child, parents) in &self.parents {
            for parent in parents {
                children.entry(parent.as_str()).or_default().insert(child.as_str());
            }
        }
        let mut roots: Vec<&str> = self.toplevel_classes.iter().map(String::as_str).collect();
        roots.extend(
            self.nodes
                .iter()
                .map(String::as_str)
                .filter(|n| !self.toplevel_classes.contains(*n) && self.parents_of(n).len() == 0),
        );

        let mut order = Vec::with_capacity(self.nodes.len());
        let mut visited = BTreeSet::new();
        for root in roots {
            let mut stack = vec![root];
            while let Some(node) = stack.pop() {
                if !visited.insert(node) {
                    continue;
                }
                order.push(node.to_string());
                if let Some(kids) = children.get(node) {
                    stack.extend(kids.iter().rev());
                }
            }
        }
        order
    }
}

/// Parses a CSV edge list with header `child,parent,toplevel`.
///
/// A truthy `toplevel` marks the parent as a top-level class. A row with an
/// empty parent and a truthy marker declares the child itself as top-level.
pub fn parse_task_hierarchy<R: Read>(reader: R) -> Result<TaskHierarchy> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut edges = Vec::new();
    let mut toplevel = BTreeSet::new();
    for (idx, row) in csv.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let child = row.get(0).unwrap_or("").to_string();
        let parent = row.get(1).unwrap_or("").to_string();
        let marker = row.get(2).map(truthy).unwrap_or(false);
        if child.is_empty() {
            return Err(Error::Parse { line, message: "empty child task".into() });
        }
        match (parent.is_empty(), marker) {
            (true, true) => {
                toplevel.insert(child);
            }
            (true, false) => {
                return Err(Error::Parse {
                    line,
                    message: format!("task {child:?} has no parent and is not marked top-level"),
                })
            }
            (false, is_top) => {
                if is_top {
                    toplevel.insert(parent.clone());
                }
                edges.push((child, parent));
            }
        }
    }
    TaskHierarchy::from_edges(edges, toplevel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<TaskHierarchy> {
        parse_task_hierarchy(text.as_bytes())
    }

    #[test]
    fn resolves_parent_edge() {
        let h = parse("child,parent,toplevel\nSemantic textual similarity,Semantic analysis,0\n").unwrap();
        let parents = &h.parents["Semantic textual similarity"];
        assert!(parents.contains("Semantic analysis"));
        assert_eq!(h.unclassified().len(), 2);
    }

    #[test]
    fn empty_edge_list() {
        let h = parse("child,parent,toplevel\n").unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = parse("child,parent,toplevel\nA,B,0\nB,A,0\n").unwrap_err();
        match err {
            Error::HierarchyCycle { child, parent } => {
                assert!(matches!((child.as_str(), parent.as_str()), ("A", "B") | ("B", "A")));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn longer_cycle_is_rejected() {
        assert!(parse("child,parent,toplevel\nA,B,0\nB,C,0\nC,A,0\nD,A,0\n").is_err());
    }

    #[test]
    fn toplevel_resolution_and_order() {
        let h = parse(
            "child,parent,toplevel\n\
             Semantic analysis,Natural Language Processing,1\n\
             Semantic textual similarity,Semantic analysis,0\n\
             Word sense disambiguation,Semantic analysis,0\n\
             Question answering,Natural Language Processing,1\n\
             Image classification,Computer Vision,1\n\
             Orphan,Nowhere,0\n",
        )
        .unwrap();
        assert_eq!(h.domain_of("Word sense disambiguation"), "Natural Language Processing");
        assert_eq!(h.domain_of("Image classification"), "Computer Vision");
        assert_eq!(h.domain_of("Orphan"), UNCLASSIFIED);
        assert_eq!(h.unclassified(), vec!["Nowhere", "Orphan"]);
        assert_eq!(
            h.adjacency_order(),
            vec![
                "Computer Vision",
                "Image classification",
                "Natural Language Processing",
                "Question answering",
                "Semantic analysis",
                "Semantic textual similarity",
                "Word sense disambiguation",
                "Nowhere",
                "Orphan",
            ]
        );
    }

    #[test]
    fn standalone_toplevel_row() {
        let h = parse("child,parent,toplevel\nComputer Vision,,1\n").unwrap();
        assert!(h.toplevel_classes.contains("Computer Vision"));
        assert_eq!(h.domain_of("Computer Vision"), "Computer Vision");
    }
}
