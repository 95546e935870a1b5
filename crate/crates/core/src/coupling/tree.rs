//! Binary coupling trees over particle indices.

use std::fmt;

use crate::error::{Error, Result};
use crate::spin_core::{Species, SpinSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(usize),
    Pair(Box<Node>, Box<Node>),
}

impl Node {
    pub fn pair(left: Node, right: Node) -> Node {
        Node::Pair(Box::new(left), Box::new(right))
    }

    /// Leaves from left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Node::Leaf(i) => out.push(*i),
            Node::Pair(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    fn render(&self, system: &SpinSystem, out: &mut String) {
        match self {
            Node::Leaf(i) => out.push_str(system.name(*i)),
            Node::Pair(l, r) => {
                out.push('(');
                l.render(system, out);
                out.push(',');
                r.render(system, out);
                out.push(')');
            }
        }
    }
}

/// The two dipositronium coupling schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `((e1,e2),(p1,p2))`: electron pair and positron pair coupled first.
    LikePairs,
    /// `((e1,p1),(e2,p2))`: two positronium atoms coupled.
    PositroniumPairs,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::LikePairs => "like-pairs",
            Preset::PositroniumPairs => "positronium-pairs",
        }
    }
}

/// How coupled-state labels show intermediate spins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelStyle {
    /// `|S,M(s1,s2,…)⟩` listing every non-root internal node in pre-order.
    Paren,
    /// `|S,M[J,K]⟩` from the two pair spins, with the triplet–triplet pair
    /// written `[2,2]`.
    So4Bracket,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingTree {
    root: Node,
    style: LabelStyle,
    preset: Option<Preset>,
}

impl CouplingTree {
    /// Builds a tree after checking that its leaves are a permutation of
    /// `0..n`.
    pub fn new(root: Node, n: usize) -> Result<Self> {
        let mut leaves = root.leaves();
        if leaves.len() != n {
            return Err(Error::Tree(format!(
                "tree has {} leaves but the system has {n} particles",
                leaves.len()
            )));
        }
        leaves.sort_unstable();
        if leaves.iter().enumerate().any(|(k, &i)| k != i) {
            return Err(Error::Tree("leaves must name every particle exactly once".into()));
        }
        Ok(CouplingTree { root, style: LabelStyle::Paren, preset: None })
    }

    pub fn like_pairs() -> Self {
        let root = Node::pair(
            Node::pair(Node::Leaf(0), Node::Leaf(2)),
            Node::pair(Node::Leaf(1), Node::Leaf(3)),
        );
        CouplingTree { root, style: LabelStyle::So4Bracket, preset: Some(Preset::LikePairs) }
    }

    pub fn positronium_pairs() -> Self {
        let root = Node::pair(
            Node::pair(Node::Leaf(0), Node::Leaf(1)),
            Node::pair(Node::Leaf(2), Node::Leaf(3)),
        );
        CouplingTree { root, style: LabelStyle::Paren, preset: Some(Preset::PositroniumPairs) }
    }

    pub fn preset(which: Preset) -> Self {
        match which {
            Preset::LikePairs => Self::like_pairs(),
            Preset::PositroniumPairs => Self::positronium_pairs(),
        }
    }

    /// Left-leaning chain `((0,1),2)…` in particle order.
    pub fn sequential(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Tree("empty system".into()));
        }
        let root = (1..n).fold(Node::Leaf(0), |acc, i| Node::pair(acc, Node::Leaf(i)));
        Self::new(root, n)
    }

    /// Parses a nested expression such as `((e1,e2),(p1,p2))`. Leaves are
    /// particle names of `system` or bare indices.
    pub fn parse(expr: &str, system: &SpinSystem) -> Result<Self> {
        let mut parser = Parser { src: expr.as_bytes(), pos: 0, system };
        let root = parser.node()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(Error::Tree(format!(
                "unexpected trailing input at byte {} of '{expr}'",
                parser.pos
            )));
        }
        let mut tree = Self::new(root, system.len())?;
        if is_dipositronium(system) {
            for preset in [Preset::LikePairs, Preset::PositroniumPairs] {
                if tree.root == Self::preset(preset).root {
                    tree = Self::preset(preset);
                }
            }
        }
        Ok(tree)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn style(&self) -> LabelStyle {
        self.style
    }

    pub fn preset_kind(&self) -> Option<Preset> {
        self.preset
    }

    pub fn check_system(&self, system: &SpinSystem) -> Result<()> {
        let n = self.root.leaves().len();
        if n != system.len() {
            return Err(Error::Tree(format!(
                "tree covers {n} particles but the system has {}",
                system.len()
            )));
        }
        if self.preset.is_some() && !is_dipositronium(system) {
            return Err(Error::Tree(
                "the like-pairs and positronium-pairs presets need the (e1,p1,e2,p2) system".into(),
            ));
        }
        Ok(())
    }

    pub fn render(&self, system: &SpinSystem) -> String {
        let mut s = String::new();
        self.root.render(system, &mut s);
        s
    }
}

impl fmt::Display for CouplingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match n {
                Node::Leaf(i) => write!(f, "{i}"),
                Node::Pair(l, r) => {
                    f.write_str("(")?;
                    go(l, f)?;
                    f.write_str(",")?;
                    go(r, f)?;
                    f.write_str(")")
                }
            }
        }
        go(&self.root, f)
    }
}

fn is_dipositronium(system: &SpinSystem) -> bool {
    use Species::*;
    let species: Vec<Species> = system.particles().iter().map(|p| p.species).collect();
    species == [Electron, Positron, Electron, Positron]
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    system: &'a SpinSystem,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Tree(format!("expected '{}' at byte {}", c as char, self.pos)))
        }
    }

    fn node(&mut self) -> Result<Node> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let left = self.node()?;
                self.skip_ws();
                // a parenthesized single leaf is allowed: "(e1)"
                if self.src.get(self.pos) == Some(&b')') {
                    self.pos += 1;
                    return Ok(left);
                }
                self.expect(b',')?;
                let right = self.node()?;
                self.skip_ws();
                if self.src.get(self.pos) == Some(&b',') {
                    return Err(Error::Tree(format!(
                        "node at byte {} has more than two children",
                        self.pos
                    )));
                }
                self.expect(b')')?;
                Ok(Node::pair(left, right))
            }
            Some(_) => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(Error::Tree(format!("expected a particle name at byte {start}")));
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let index = match name.parse::<usize>() {
                    Ok(i) if i < self.system.len() => i,
                    Ok(i) => return Err(Error::Tree(format!("particle index {i} out of range"))),
                    Err(_) => self
                        .system
                        .index_of(name)
                        .ok_or_else(|| Error::Tree(format!("unknown particle '{name}'")))?,
                };
                Ok(Node::Leaf(index))
            }
            None => Err(Error::Tree("unexpected end of tree expression".into())),
        }
    }
}
