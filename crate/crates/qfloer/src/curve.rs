//! Curves and arcs as itineraries through scaffold cells.
//!
//! A token `(dart, pos)` says: cross the 1-cell under `dart`, entering
//! `cell(dart)` at parameter `pos` along that dart. The same surface point
//! seen from the reverse dart is at parameter `1 - pos`. Positions are part
//! of the data, not an afterthought: operations like admissibility winding
//! deliberately produce non-taut representatives, so nothing here ever
//! canonicalizes a curve.

use crate::error::{QfError, Result};
use crate::geom::{qr, Q};
use crate::scaffold::{CellId, DartId, Scaffold};
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub dart: DartId,
    pub pos: Q,
}

impl Token {
    pub fn new(dart: DartId, pos: Q) -> Self {
        Token { dart, pos }
    }
}

#[derive(Clone, Debug)]
pub struct Curve {
    pub name: String,
    pub tokens: Vec<Token>,
    pub closed: bool,
}

/// A point on a side of a specific cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotPoint {
    pub dart: DartId,
    pub pos: Q,
}

/// One pass of a curve through one cell: enter at `entry`, leave at `exit`,
/// both on sides of `cell`. `entry.dart == exit.dart` is a u-turn.
#[derive(Clone, Debug)]
pub struct Visit {
    pub cell: CellId,
    pub entry: SlotPoint,
    pub exit: SlotPoint,
}

impl Curve {
    pub fn closed(name: impl Into<String>, tokens: Vec<Token>) -> Self {
        Curve { name: name.into(), tokens, closed: true }
    }

    pub fn arc(name: impl Into<String>, tokens: Vec<Token>) -> Self {
        Curve { name: name.into(), tokens, closed: false }
    }

    pub fn validate(&self, sc: &Scaffold) -> Result<()> {
        let n = self.tokens.len();
        let fail = |msg: String| {
            Err(QfError::NotEmbedded { name: self.name.clone(), msg })
        };
        if self.closed {
            if n == 0 {
                return fail("closed curve with no tokens".into());
            }
        } else if n < 2 {
            return fail("an arc needs at least its two endpoint tokens".into());
        }
        for (i, t) in self.tokens.iter().enumerate() {
            if t.dart >= sc.darts.len() {
                return fail(format!("token {} references a missing dart", i));
            }
            if t.pos <= Q::zero() || t.pos >= Q::one() {
                return fail(format!("token {} position {} is not interior", i, t.pos));
            }
            let endpoint = !self.closed && (i == 0 || i == n - 1);
            if endpoint {
                if !sc.is_boundary(t.dart) {
                    return fail(format!(
                        "arc endpoint {} must sit on a boundary side, got {}",
                        i, sc.darts[t.dart].label
                    ));
                }
            } else if sc.is_boundary(t.dart) {
                return fail(format!(
                    "token {} crosses boundary side {}",
                    i, sc.darts[t.dart].label
                ));
            }
        }
        // chaining: each visit's exit side must lie in the visit's cell
        for v in 0..self.visit_count() {
            let (entry, exit) = self.visit_sides(sc, v);
            let cell = sc.darts[entry].cell;
            if sc.darts[exit].cell != cell {
                return fail(format!(
                    "visit {} enters {} through {} but exits through {} which is in {}",
                    v,
                    sc.cells[cell].label,
                    sc.darts[entry].label,
                    sc.darts[exit].label,
                    sc.cells[sc.darts[exit].cell].label
                ));
            }
        }
        Ok(())
    }

    pub fn visit_count(&self) -> usize {
        if self.closed {
            self.tokens.len()
        } else {
            self.tokens.len() - 1
        }
    }

    /// Endpoints of an arc as `(dart, position)` pairs, `None` for closed
    /// curves. Boundary sides carry a single coorientation, so the pairs
    /// identify the boundary points without normalization.
    pub fn endpoints(&self) -> Option<((DartId, Q), (DartId, Q))> {
        if self.closed {
            return None;
        }
        let first = self.tokens.first()?;
        let last = self.tokens.last()?;
        Some(((first.dart, first.pos.clone()), (last.dart, last.pos.clone())))
    }

    /// Entry and exit darts of visit `v`, both in the visit's cell.
    fn visit_sides(&self, sc: &Scaffold, v: usize) -> (DartId, DartId) {
        let n = self.tokens.len();
        let entry = self.tokens[v].dart;
        let exit = if self.closed {
            let next = &self.tokens[(v + 1) % n];
            sc.rev(next.dart).expect("validated closed token")
        } else if v + 1 == n - 1 {
            self.tokens[n - 1].dart
        } else {
            sc.rev(self.tokens[v + 1].dart).expect("validated interior token")
        };
        (entry, exit)
    }

    pub fn visits(&self, sc: &Scaffold) -> Vec<Visit> {
        let n = self.tokens.len();
        (0..self.visit_count())
            .map(|v| {
                let (entry_dart, exit_dart) = self.visit_sides(sc, v);
                let entry = SlotPoint { dart: entry_dart, pos: self.tokens[v].pos.clone() };
                let exit_pos = if self.closed {
                    Q::one() - &self.tokens[(v + 1) % n].pos
                } else if v + 1 == n - 1 {
                    self.tokens[n - 1].pos.clone()
                } else {
                    Q::one() - &self.tokens[v + 1].pos
                };
                let exit = SlotPoint { dart: exit_dart, pos: exit_pos };
                Visit { cell: sc.darts[entry_dart].cell, entry, exit }
            })
            .collect()
    }

    /// The same curve traversed the other way. An involution on valid
    /// curves; visits come back in reverse order with entry and exit swapped.
    pub fn reversed(&self, sc: &Scaffold) -> Curve {
        let n = self.tokens.len();
        let tokens = if self.closed {
            // reversed token i enters where old token came from: the exit of
            // the visit before it, seen from the far side
            (0..n)
                .map(|i| {
                    let old = &self.tokens[(n - i) % n];
                    Token::new(sc.rev(old.dart).expect("closed"), Q::one() - &old.pos)
                })
                .collect()
        } else {
            (0..n)
                .map(|i| {
                    let old = &self.tokens[n - 1 - i];
                    if i == 0 || i == n - 1 {
                        Token::new(old.dart, old.pos.clone())
                    } else {
                        Token::new(sc.rev(old.dart).expect("interior"), Q::one() - &old.pos)
                    }
                })
                .collect()
        };
        Curve { name: self.name.clone(), tokens, closed: self.closed }
    }

    /// Number of times the curve crosses the 1-cell containing `dart`.
    pub fn crossings_of_edge(&self, sc: &Scaffold, dart: DartId) -> usize {
        let key = one_cell_key(sc, dart);
        self.tokens
            .iter()
            .enumerate()
            .filter(|(i, t)| {
                let endpoint = !self.closed && (*i == 0 || *i == self.tokens.len() - 1);
                !endpoint && one_cell_key(sc, t.dart) == key
            })
            .count()
    }
}

/// Canonical representative for the unordered 1-cell behind a dart.
pub fn one_cell_key(sc: &Scaffold, d: DartId) -> DartId {
    match sc.rev(d) {
        Some(r) => d.min(r),
        None => d,
    }
}

/// Position of a token normalized to the canonical side of its 1-cell.
pub fn normalized_pos(sc: &Scaffold, t: &Token) -> (DartId, Q) {
    let key = one_cell_key(sc, t.dart);
    if key == t.dart {
        (key, t.pos.clone())
    } else {
        (key, Q::one() - &t.pos)
    }
}

/// Every 1-cell must be crossed at pairwise distinct positions across the
/// whole family, arc endpoints included. This is what makes the per-cell
/// chord pictures well defined.
pub fn check_positions(sc: &Scaffold, curves: &[&Curve]) -> Result<()> {
    let mut seen: std::collections::BTreeMap<DartId, Vec<(Q, String)>> = Default::default();
    for c in curves {
        for t in &c.tokens {
            let (key, pos) = normalized_pos(sc, t);
            let entries = seen.entry(key).or_default();
            if let Some((_, other)) = entries.iter().find(|(p, _)| *p == pos) {
                return Err(QfError::Degenerate(format!(
                    "curves {} and {} cross side {} at the same position {}",
                    c.name, other, sc.darts[key].label, pos
                )));
            }
            entries.push((pos, c.name.clone()));
        }
    }
    Ok(())
}

/// Small primes used as position denominators, one per curve, so distinct
/// curves can never collide on a 1-cell.
pub fn nth_prime(i: usize) -> i64 {
    let mut primes: Vec<i64> = Vec::with_capacity(i + 1);
    let mut n: i64 = 2;
    while primes.len() <= i {
        if primes.iter().all(|p| n % p != 0) {
            primes.push(n);
        }
        n += 1;
    }
    primes[i]
}

/// Evenly spread token positions `1/den .. count/den`; `den` must exceed
/// `count` so everything stays interior.
pub fn spread_positions(den: i64, count: usize) -> Vec<Q> {
    assert!(den > count as i64);
    (0..count).map(|k| qr(k as i64 + 1, den)).collect()
}

pub mod standard {
    //! The standard curve and arc families on the stock layouts.

    use super::*;
    use crate::scaffold::{e_partner, ClosedIds, RingIds};

    /// On the one-polygon closed surface, the loop running along handle edge
    /// `a_i`: it crosses the 1-cell `b_i` once and nothing else.
    pub fn polygon_a(ids: &ClosedIds, i: usize, den: i64) -> Curve {
        Curve::closed(format!("a{}", i + 1), vec![Token::new(ids.b[i], qr(1, den))])
    }

    pub fn polygon_b(ids: &ClosedIds, i: usize, den: i64) -> Curve {
        Curve::closed(format!("b{}", i + 1), vec![Token::new(ids.a[i], qr(1, den))])
    }

    /// Host cell of the `p`-th handle pair (0-based): pairs live two per
    /// group of four ring cells.
    pub fn pair_host(p: usize) -> usize {
        4 * (p / 2) + p % 2
    }

    /// Boundary-to-boundary arc over handle pair `p`: a single chord in the
    /// host cell from its `c+` side to its `c-` side, both on the vertex
    /// circle.
    pub fn ring_xi_arc(ids: &RingIds, p: usize, den: i64) -> Curve {
        let j = pair_host(p);
        let pos = spread_positions(den, 2);
        Curve::arc(
            format!("xi{}", p + 1),
            vec![
                Token::new(ids.c_plus[j], pos[0].clone()),
                Token::new(ids.c_minus[j], pos[1].clone()),
            ],
        )
    }

    /// Inner-to-inner arc over handle pair `p`: crosses the glued `E` pair
    /// once, one chord in each cell of the pair.
    pub fn ring_eta_arc(ids: &RingIds, p: usize, den: i64) -> Curve {
        let j = pair_host(p);
        let k = e_partner(j);
        let pos = spread_positions(den, 3);
        Curve::arc(
            format!("eta{}", p + 1),
            vec![
                Token::new(ids.inner[j], pos[0].clone()),
                Token::new(ids.e[k], pos[1].clone()),
                Token::new(ids.inner[k], pos[2].clone()),
            ],
        )
    }

    /// Closed dual circle of handle pair `p`: crosses the `E` pair once and
    /// the two radial cuts after the host cell. Meets its own arc `xi_p`
    /// exactly once and the dual of the other pair in the same four-cell
    /// group exactly once (that crossing is forced: the two loops are a
    /// genus handle pair). All positions sit near the end of their sides:
    /// the loop then passes on the far side of the `eta` chords, and its
    /// chord endpoints stay away from the dart heads where basepoints live.
    pub fn ring_dual(ids: &RingIds, p: usize, den: i64) -> Curve {
        let j = pair_host(p);
        let n = ids.cells.len();
        Curve::closed(
            format!("dual{}", p + 1),
            vec![
                Token::new(ids.e[j], qr(den - 1, den)),
                Token::new(ids.r_up[(j + 1) % n], qr(den - 2, den)),
                Token::new(ids.r_up[(j + 2) % n], qr(den - 3, den)),
            ],
        )
    }
}
