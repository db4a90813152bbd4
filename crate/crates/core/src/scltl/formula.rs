use std::collections::BTreeSet;
use std::fmt;

use super::{Atom, ObservationSet};

/// Abstract syntax of Next-free syntactically co-safe LTL.
///
/// Negation only ever wraps an observation. `False` is never produced by the parser;
/// it shows up as the result of simplification (a violated obligation).
///
/// Conjunction and disjunction are n-ary so that canonical forms can flatten and sort
/// their operands; the parser emits them with exactly two operands.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Obs(Atom),
    NegObs(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
}

impl Formula {
    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::And(vec![lhs, rhs])
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Or(vec![lhs, rhs])
    }

    pub fn until(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Until(Box::new(lhs), Box::new(rhs))
    }

    pub fn eventually(sub: Formula) -> Formula {
        Formula::Eventually(Box::new(sub))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// Syntactic nesting depth; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Obs(_) | Formula::NegObs(_) => 0,
            Formula::And(xs) | Formula::Or(xs) => 1 + xs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Until(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Eventually(a) => 1 + a.depth(),
        }
    }

    /// Every atom mentioned anywhere in the formula.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Obs(a) | Formula::NegObs(a) => {
                out.insert(*a);
            }
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
            Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Eventually(a) => a.collect_atoms(out),
        }
    }

    /// Renders the formula in the concrete syntax accepted by the parser.
    pub fn display<'a>(&'a self, alphabet: &'a ObservationSet) -> impl fmt::Display + 'a {
        Rendered { formula: self, alphabet }
    }

    /// Canonical form: temporal arguments are canonicalized recursively and the Boolean
    /// skeleton is rewritten into a sorted, absorbed disjunctive normal form.
    pub fn canonical(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Obs(_) | Formula::NegObs(_) => self.clone(),
            Formula::Until(a, b) => make_until(a.canonical(), b.canonical()),
            Formula::Eventually(a) => make_eventually(a.canonical()),
            Formula::And(xs) => simplify(&Formula::And(xs.iter().map(Formula::canonical).collect())),
            Formula::Or(xs) => simplify(&Formula::Or(xs.iter().map(Formula::canonical).collect())),
        }
    }
}

fn make_until(lhs: Formula, rhs: Formula) -> Formula {
    match (&lhs, &rhs) {
        (_, Formula::True) => Formula::True,
        (_, Formula::False) => Formula::False,
        (Formula::False, _) => rhs,
        (Formula::True, _) => make_eventually(rhs),
        _ if lhs == rhs => rhs,
        _ => Formula::until(lhs, rhs),
    }
}

fn make_eventually(sub: Formula) -> Formula {
    match sub {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        f @ Formula::Eventually(_) => f,
        f => Formula::eventually(f),
    }
}

type Clause = BTreeSet<Formula>;
type Dnf = BTreeSet<Clause>;

fn dnf(f: &Formula) -> Dnf {
    match f {
        Formula::True => BTreeSet::from([Clause::new()]),
        Formula::False => Dnf::new(),
        Formula::Or(xs) => xs.iter().flat_map(dnf).collect(),
        Formula::And(xs) => {
            let mut acc: Dnf = BTreeSet::from([Clause::new()]);
            for x in xs {
                let rhs = dnf(x);
                let mut next = Dnf::new();
                for l in &acc {
                    for r in &rhs {
                        let mut c = l.clone();
                        c.extend(r.iter().cloned());
                        next.insert(c);
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        leaf => BTreeSet::from([BTreeSet::from([leaf.clone()])]),
    }
}

fn complement(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Obs(a) => Some(Formula::NegObs(*a)),
        Formula::NegObs(a) => Some(Formula::Obs(*a)),
        _ => None,
    }
}

fn reduce(dnf: Dnf) -> Dnf {
    // o & !o
    let clauses: Vec<Clause> =
        dnf.into_iter().filter(|c| !c.iter().any(|l| complement(l).is_some_and(|n| c.contains(&n)))).collect();
    // {o} | {!o}
    let tautology = clauses.iter().any(|c| {
        c.len() == 1
            && complement(c.first().unwrap()).is_some_and(|n| clauses.iter().any(|d| d.len() == 1 && d.contains(&n)))
    });
    if tautology {
        return BTreeSet::from([Clause::new()]);
    }
    // absorption: drop every clause that strictly contains another one
    clauses.iter().filter(|c| !clauses.iter().any(|d| d.len() < c.len() && d.is_subset(c))).cloned().collect()
}

fn from_dnf(dnf: Dnf) -> Formula {
    if dnf.is_empty() {
        return Formula::False;
    }
    let mut disjuncts: Vec<Formula> = dnf
        .into_iter()
        .map(|clause| {
            let mut leaves: Vec<Formula> = clause.into_iter().collect();
            match leaves.len() {
                0 => Formula::True,
                1 => leaves.pop().unwrap(),
                _ => Formula::And(leaves),
            }
        })
        .collect();
    if disjuncts.len() == 1 {
        disjuncts.pop().unwrap()
    } else {
        Formula::Or(disjuncts)
    }
}

/// Simplifies the Boolean skeleton of `f`, treating every temporal subformula as an
/// opaque leaf. Leaves are expected to be canonical already.
pub(crate) fn simplify(f: &Formula) -> Formula {
    from_dnf(reduce(dnf(f)))
}

struct Rendered<'a> {
    formula: &'a Formula,
    alphabet: &'a ObservationSet,
}

impl Rendered<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Formula, parent_prec: u8) -> fmt::Result {
        // precedence: | = 1, & = 2, U = 3, unary = 4
        let prec = match node {
            Formula::Or(_) => 1,
            Formula::And(_) => 2,
            Formula::Until(..) => 3,
            _ => 4,
        };
        let paren = prec < parent_prec;
        if paren {
            f.write_str("(")?;
        }
        match node {
            Formula::True => f.write_str("true")?,
            Formula::False => f.write_str("false")?,
            Formula::Obs(a) => f.write_str(self.alphabet.name(*a))?,
            Formula::NegObs(a) => write!(f, "!{}", self.alphabet.name(*a))?,
            Formula::And(xs) | Formula::Or(xs) => {
                let sep = if prec == 1 { " | " } else { " & " };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    self.write(f, x, prec + 1)?;
                }
            }
            Formula::Until(a, b) => {
                self.write(f, a, 4)?;
                f.write_str(" U ")?;
                // right-associative: the right operand may itself be an Until
                self.write(f, b, 3)?;
            }
            Formula::Eventually(a) => {
                f.write_str("F ")?;
                self.write(f, a, 4)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula, 0)
    }
}
