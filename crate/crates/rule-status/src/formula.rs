//! Formula syntax: abstract syntax trees for LTL rules over finite traces,
//! a text parser, a precedence-aware printer, and dotted node addresses.
//!
//! # Syntax
//!
//! ```text
//! formula  := disjunct ( "->" formula )?            right-associative
//! disjunct := temporal ( ("&" | "|") temporal )*    one connective per chain
//! temporal := unary ( ("U"|"W"|"R"|"M") temporal )? right-associative
//! unary    := ("!"|"X"|"F"|"G") unary | primary
//! primary  := "(" formula ")" | label
//! label    := [A-Za-z_][A-Za-z0-9_-]*
//! ```
//!
//! Unary operators bind to the smallest formula that follows them, so
//! `F a U b` parses as `(F a) U b`. The binary temporal operators share one
//! precedence tier and associate to the right. `&` and `|` also share a
//! tier; a chain must stick to a single connective, so `a & b | c` is a
//! parse error rather than a silent precedence guess. `->` binds weakest.
//!
//! Hyphens may appear inside a label but not at its edge, and the seven
//! single-letter operator names (`X F G U W R M`) are reserved, so `G` can
//! never be a label. Labels are shared with trace files, which enforce the
//! same token rule.
//!
//! # Node addresses
//!
//! Every subformula has an address: the root is the empty path, printed as
//! an empty string, and the i-th child of a node at address `p` is `p.i`
//! with 1-based `i`. For `a1 U (G a2)` the root `U` is at ``, `a1` at `1`,
//! `G a2` at `2`, and `a2` at `2.1`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// The twelve operator kinds a formula node can carry.
///
/// `Atom` is the leaf kind and the only one with a label. `WeakUntil` is
/// `U` with the obligation waived when the right side never arrives;
/// `StrongRelease` (`M`) is `R` with the release step required to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Atom,
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Globally,
    Until,
    WeakUntil,
    Release,
    StrongRelease,
}

impl OperatorKind {
    /// Number of children a node of this kind has.
    pub fn arity(self) -> usize {
        match self {
            OperatorKind::Atom => 0,
            OperatorKind::Not
            | OperatorKind::Next
            | OperatorKind::Eventually
            | OperatorKind::Globally => 1,
            _ => 2,
        }
    }

    /// Concrete syntax for this operator, empty for atoms.
    pub fn symbol(self) -> &'static str {
        match self {
            OperatorKind::Atom => "",
            OperatorKind::Not => "!",
            OperatorKind::And => "&",
            OperatorKind::Or => "|",
            OperatorKind::Implies => "->",
            OperatorKind::Next => "X",
            OperatorKind::Eventually => "F",
            OperatorKind::Globally => "G",
            OperatorKind::Until => "U",
            OperatorKind::WeakUntil => "W",
            OperatorKind::Release => "R",
            OperatorKind::StrongRelease => "M",
        }
    }
}

/// Identifier of a node inside its [`FormulaTree`] arena.
pub type NodeId = usize;

/// Path from the root to a node: 1-based child indices, empty for the root.
///
/// Prints as the dotted form used in queries (`1.2`), with the root printing
/// as the empty string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeAddress(Vec<u32>);

impl NodeAddress {
    /// The root address (empty path).
    pub fn root() -> Self {
        NodeAddress(Vec::new())
    }

    /// Address of this node's `index`-th child (1-based).
    pub fn child(&self, index: usize) -> Self {
        let mut path = self.0.clone();
        path.push(index as u32);
        NodeAddress(path)
    }

    /// True for the root address.
    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// Parse a dotted address. The empty string denotes the root; each
    /// component must be a positive integer.
    pub fn parse(text: &str) -> Result<Self, AddressError> {
        if text.is_empty() {
            return Ok(NodeAddress::root());
        }
        let mut path = Vec::new();
        for part in text.split('.') {
            let index: u32 = part
                .parse()
                .map_err(|_| AddressError::Malformed(text.to_string()))?;
            if index == 0 {
                return Err(AddressError::Malformed(text.to_string()));
            }
            path.push(index);
        }
        Ok(NodeAddress(path))
    }

    /// The path components (1-based child indices).
    pub fn components(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for part in &self.0 {
            if !first {
                f.write_str(".")?;
            }
            write!(f, "{part}")?;
            first = false;
        }
        Ok(())
    }
}

/// Errors from parsing or resolving a node address.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressError {
    #[error("malformed node address {0:?}: expected dot-separated positive integers or \"\" for the root")]
    Malformed(String),
    #[error("no node at address {0:?}")]
    NotFound(String),
}

/// One node of a formula tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaNode {
    kind: OperatorKind,
    label: Option<String>,
    children: Vec<NodeId>,
    address: NodeAddress,
}

impl FormulaNode {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// The atom's label; `None` for every other kind.
    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Children in syntactic order (left before right).
    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn address(&self) -> &NodeAddress {
        &self.address
    }
}

/// A parsed formula: an arena of nodes plus the source text and an address
/// index.
///
/// Nodes are stored in post order, so iterating ids from 0 upward visits
/// every child before its parent; the root is the last node. This is the
/// evaluation order the status engine wants, and it makes child lookups
/// plain index reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaTree {
    nodes: Vec<FormulaNode>,
    source: String,
    index: BTreeMap<NodeAddress, NodeId>,
}

impl FormulaTree {
    /// Parse `input` into a tree, keeping the original text as the source.
    pub fn parse(input: &str) -> Result<Self, ParseError> {
        let tokens = lex(input)?;
        let mut parser = Parser { tokens, pos: 0 };
        let ast = parser.parse_implication()?;
        parser.expect_end()?;
        Ok(FormulaTree::from_ast(&ast, input.to_string()))
    }

    fn from_ast(ast: &Ast, source: String) -> Self {
        let mut tree = FormulaTree {
            nodes: Vec::new(),
            source,
            index: BTreeMap::new(),
        };
        tree.push_ast(ast, NodeAddress::root());
        tree
    }

    fn push_ast(&mut self, ast: &Ast, address: NodeAddress) -> NodeId {
        let (kind, label, child_asts): (OperatorKind, Option<String>, Vec<&Ast>) = match ast {
            Ast::Atom(name) => (OperatorKind::Atom, Some(name.clone()), Vec::new()),
            Ast::Unary(kind, child) => (*kind, None, vec![child]),
            Ast::Binary(kind, left, right) => (*kind, None, vec![left, right]),
        };
        let children: Vec<NodeId> = child_asts
            .iter()
            .enumerate()
            .map(|(i, child)| self.push_ast(child, address.child(i + 1)))
            .collect();
        let id = self.nodes.len();
        self.nodes.push(FormulaNode {
            kind,
            label,
            children,
            address: address.clone(),
        });
        self.index.insert(address, id);
        id
    }

    /// The text this tree was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Id of the root node.
    pub fn root(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &FormulaNode {
        &self.nodes[id]
    }

    /// Total number of nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Node ids in post order: every child before its parent.
    pub fn post_order(&self) -> impl Iterator<Item = NodeId> {
        0..self.nodes.len()
    }

    /// Resolve a dotted address string to a node.
    pub fn node_at(&self, address: &str) -> Result<NodeId, AddressError> {
        let parsed = NodeAddress::parse(address)?;
        self.index
            .get(&parsed)
            .copied()
            .ok_or_else(|| AddressError::NotFound(address.to_string()))
    }

    /// Resolve an already-parsed address to a node.
    pub fn resolve(&self, address: &NodeAddress) -> Option<NodeId> {
        self.index.get(address).copied()
    }

    /// All addresses in the tree, root first, in path order.
    pub fn addresses(&self) -> impl Iterator<Item = (&NodeAddress, NodeId)> {
        self.index.iter().map(|(a, &id)| (a, id))
    }

    /// Depth in levels: a lone atom has depth 1.
    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.address.components().len() + 1)
            .max()
            .unwrap_or(1)
    }

    /// The distinct atom labels, sorted.
    pub fn distinct_labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = self.nodes.iter().filter_map(|n| n.label()).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Render the subtree rooted at `id` with minimal parentheses; parsing
    /// the result reproduces the subtree.
    pub fn render(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.render_into(id, &mut out);
        out
    }

    fn render_into(&self, id: NodeId, out: &mut String) {
        let node = &self.nodes[id];
        match node.kind {
            OperatorKind::Atom => out.push_str(node.label().unwrap()),
            OperatorKind::Not
            | OperatorKind::Next
            | OperatorKind::Eventually
            | OperatorKind::Globally => {
                out.push_str(node.kind.symbol());
                let child = node.children[0];
                let tight = precedence(self.nodes[child].kind) >= PREC_UNARY;
                if node.kind != OperatorKind::Not {
                    out.push(' ');
                }
                self.render_child(child, !tight, out);
            }
            _ => {
                let (left, right) = (node.children[0], node.children[1]);
                let prec = precedence(node.kind);
                // Binary tiers are right-associative (and &/| chains reparse
                // right-nested), so a left child at the same tier needs
                // parentheses while a right child only does below the tier.
                // A right sibling at the same logical tier with a different
                // connective would re-lex as an illegal mixed chain, so it
                // keeps its parentheses too.
                let left_parens = precedence(self.nodes[left].kind) <= prec;
                let right_prec = precedence(self.nodes[right].kind);
                let right_parens = right_prec < prec
                    || (prec == PREC_LOGIC
                        && right_prec == PREC_LOGIC
                        && self.nodes[right].kind != node.kind);
                self.render_child(left, left_parens, out);
                out.push(' ');
                out.push_str(node.kind.symbol());
                out.push(' ');
                self.render_child(right, right_parens, out);
            }
        }
    }

    fn render_child(&self, id: NodeId, parens: bool, out: &mut String) {
        if parens {
            out.push('(');
            self.render_into(id, out);
            out.push(')');
        } else {
            self.render_into(id, out);
        }
    }
}

impl fmt::Display for FormulaTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(self.root()))
    }
}

const PREC_IMPLIES: u8 = 1;
const PREC_LOGIC: u8 = 2;
const PREC_TEMPORAL: u8 = 3;
const PREC_UNARY: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(kind: OperatorKind) -> u8 {
    match kind {
        OperatorKind::Implies => PREC_IMPLIES,
        OperatorKind::And | OperatorKind::Or => PREC_LOGIC,
        OperatorKind::Until
        | OperatorKind::WeakUntil
        | OperatorKind::Release
        | OperatorKind::StrongRelease => PREC_TEMPORAL,
        OperatorKind::Not
        | OperatorKind::Next
        | OperatorKind::Eventually
        | OperatorKind::Globally => PREC_UNARY,
        OperatorKind::Atom => PREC_ATOM,
    }
}

/// True if `text` is a usable label: matches the token rule and is not a
/// reserved operator letter. Trace files share this rule so every stored
/// label can appear in a formula.
pub fn is_valid_label(text: &str) -> bool {
    let mut chars = text.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !(first.is_ascii_alphabetic() || first == '_') {
        return false;
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return false;
    }
    if text.ends_with('-') {
        return false;
    }
    !matches!(text, "X" | "F" | "G" | "U" | "W" | "R" | "M")
}

/// A parse failure, with `position` as a character offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub message: String,
    pub position: usize,
}

impl ParseError {
    fn new(message: impl Into<String>, position: usize) -> Self {
        ParseError {
            message: message.into(),
            position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Label(String),
    Unary(OperatorKind),    // ! X F G
    Temporal(OperatorKind), // U W R M
    And,
    Or,
    Implies,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Label(name) => format!("label {name:?}"),
            Token::Unary(kind) | Token::Temporal(kind) => format!("'{}'", kind.symbol()),
            Token::And => "'&'".to_string(),
            Token::Or => "'|'".to_string(),
            Token::Implies => "'->'".to_string(),
            Token::LParen => "'('".to_string(),
            Token::RParen => "')'".to_string(),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let start = pos;
        let c = chars[pos];
        match c {
            ' ' | '\t' => {
                pos += 1;
            }
            '(' => {
                tokens.push((Token::LParen, start));
                pos += 1;
            }
            ')' => {
                tokens.push((Token::RParen, start));
                pos += 1;
            }
            '!' => {
                tokens.push((Token::Unary(OperatorKind::Not), start));
                pos += 1;
            }
            '&' => {
                tokens.push((Token::And, start));
                pos += 1;
            }
            '|' => {
                tokens.push((Token::Or, start));
                pos += 1;
            }
            '-' => {
                if chars.get(pos + 1) == Some(&'>') {
                    tokens.push((Token::Implies, start));
                    pos += 2;
                } else {
                    return Err(ParseError::new("expected '->' after '-'", start));
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = pos + 1;
                while end < chars.len()
                    && (chars[end].is_ascii_alphanumeric() || chars[end] == '_' || chars[end] == '-')
                {
                    end += 1;
                }
                let word: String = chars[pos..end].iter().collect();
                pos = end;
                let token = match word.as_str() {
                    "X" => Token::Unary(OperatorKind::Next),
                    "F" => Token::Unary(OperatorKind::Eventually),
                    "G" => Token::Unary(OperatorKind::Globally),
                    "U" => Token::Temporal(OperatorKind::Until),
                    "W" => Token::Temporal(OperatorKind::WeakUntil),
                    "R" => Token::Temporal(OperatorKind::Release),
                    "M" => Token::Temporal(OperatorKind::StrongRelease),
                    _ if word.ends_with('-') => {
                        return Err(ParseError::new(
                            format!("label {word:?} may not end with '-'"),
                            start,
                        ));
                    }
                    _ => Token::Label(word),
                };
                tokens.push((token, start));
            }
            _ => {
                return Err(ParseError::new(format!("unexpected character {c:?}"), start));
            }
        }
    }
    Ok(tokens)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ast {
    Atom(String),
    Unary(OperatorKind, Box<Ast>),
    Binary(OperatorKind, Box<Ast>, Box<Ast>),
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, p)| p)
            .or_else(|| self.tokens.last().map(|&(_, p)| p + 1))
            .unwrap_or(0)
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.pos].0.clone();
        self.pos += 1;
        token
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(token) => Err(ParseError::new(
                format!("unexpected {} after the formula", token.describe()),
                self.position(),
            )),
        }
    }

    /// Weakest tier: `a -> b -> c` is `a -> (b -> c)`.
    fn parse_implication(&mut self) -> Result<Ast, ParseError> {
        let left = self.parse_connective_chain()?;
        if self.peek() == Some(&Token::Implies) {
            self.advance();
            let right = self.parse_implication()?;
            return Ok(Ast::Binary(
                OperatorKind::Implies,
                Box::new(left),
                Box::new(right),
            ));
        }
        Ok(left)
    }

    /// One `&` or `|` chain. Both connectives sit on the same tier, so a
    /// chain that mixes them without parentheses is rejected instead of
    /// being resolved by an arbitrary precedence choice.
    fn parse_connective_chain(&mut self) -> Result<Ast, ParseError> {
        let first = self.parse_temporal()?;
        let chain_kind = match self.peek() {
            Some(Token::And) => OperatorKind::And,
            Some(Token::Or) => OperatorKind::Or,
            _ => return Ok(first),
        };
        let mut operands = vec![first];
        while let Some(token) = self.peek() {
            let kind = match token {
                Token::And => OperatorKind::And,
                Token::Or => OperatorKind::Or,
                _ => break,
            };
            if kind != chain_kind {
                return Err(ParseError::new(
                    format!(
                        "cannot mix '&' and '|' without parentheses; this chain started with '{}'",
                        chain_kind.symbol()
                    ),
                    self.position(),
                ));
            }
            self.advance();
            operands.push(self.parse_temporal()?);
        }
        let mut result = operands.pop().unwrap();
        while let Some(operand) = operands.pop() {
            result = Ast::Binary(chain_kind, Box::new(operand), Box::new(result));
        }
        Ok(result)
    }

    /// Binary temporal tier: `a U b W c` is `a U (b W c)`.
    fn parse_temporal(&mut self) -> Result<Ast, ParseError> {
        let left = self.parse_unary()?;
        if let Some(&Token::Temporal(kind)) = self.peek() {
            self.advance();
            let right = self.parse_temporal()?;
            return Ok(Ast::Binary(kind, Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    /// Unary prefixes bind to the smallest following formula.
    fn parse_unary(&mut self) -> Result<Ast, ParseError> {
        if let Some(&Token::Unary(kind)) = self.peek() {
            self.advance();
            let child = self.parse_unary()?;
            return Ok(Ast::Unary(kind, Box::new(child)));
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<Ast, ParseError> {
        match self.peek() {
            Some(Token::LParen) => {
                self.advance();
                let inner = self.parse_implication()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.advance();
                        Ok(inner)
                    }
                    other => Err(ParseError::new(
                        match other {
                            Some(token) => format!("expected ')', found {}", token.describe()),
                            None => "expected ')', found end of input".to_string(),
                        },
                        self.position(),
                    )),
                }
            }
            Some(Token::Label(_)) => {
                let Token::Label(name) = self.advance() else {
                    unreachable!()
                };
                Ok(Ast::Atom(name))
            }
            other => Err(ParseError::new(
                match other {
                    Some(token) => format!("expected a label or '(', found {}", token.describe()),
                    None => "expected a label or '(', found end of input".to_string(),
                },
                self.position(),
            )),
        }
    }
}
