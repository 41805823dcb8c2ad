//! Integer linear algebra over arbitrary precision integers.
//!
//! Everything downstream (periodic domain lattices, connecting domains,
//! spin-c cosets) reduces to a column echelon form of an integer matrix
//! together with the unimodular column transformation that produced it.
//! Infeasibility answers are never bare booleans: they come with a rational
//! certificate that is re-verified against the original matrix before being
//! returned.

use crate::geom::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IVec = Vec<BigInt>;

pub fn bi(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn zeros(n: usize) -> IVec {
    vec![BigInt::zero(); n]
}

pub fn dot_i(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_qi(a: &[Q], b: &[BigInt]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * Q::from_integer(y.clone())).sum()
}

/// `m` is row major with `cols` columns; result has length `rows`.
pub fn mat_vec(m: &[IVec], x: &[BigInt]) -> IVec {
    m.iter().map(|row| dot_i(row, x)).collect()
}

/// Column echelon form `h = m * u` with `u` unimodular.
///
/// Pivot rows strictly increase with the column index, every column past the
/// last pivot is zero, and pivots are positive. Entries are not reduced above
/// the pivot; nothing downstream needs the fully reduced Hermite form.
pub struct ColEchelon {
    pub rows: usize,
    pub cols: usize,
    pub h: Vec<IVec>,
    pub u: Vec<IVec>,
    /// (row, col) positions of the pivots, in order.
    pub pivots: Vec<(usize, usize)>,
}

pub fn col_echelon(m: &[IVec], cols: usize) -> ColEchelon {
    let rows = m.len();
    let mut h: Vec<IVec> = m.to_vec();
    for row in &h {
        assert_eq!(row.len(), cols, "ragged matrix");
    }
    let mut u: Vec<IVec> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut col = 0usize;

    for row in 0..rows {
        if col >= cols {
            break;
        }
        // Euclidean sweep: leave gcd of this row's tail in position `col`.
        loop {
            let mut best: Option<usize> = None;
            for j in col..cols {
                if !h[row][j].is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => h[row][j].abs() < h[row][b].abs(),
                    };
                    if better {
                        best = Some(j);
                    }
                }
            }
            let Some(b) = best else { break };
            if b != col {
                swap_cols(&mut h, &mut u, b, col);
            }
            let mut done = true;
            for j in col + 1..cols {
                if h[row][j].is_zero() {
                    continue;
                }
                let q = div_round(&h[row][j], &h[row][col]);
                if !q.is_zero() {
                    addmul_col(&mut h, &mut u, col, j, &-q);
                }
                if !h[row][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !h[row][col].is_zero() {
            if h[row][col].is_negative() {
                neg_col(&mut h, &mut u, col);
            }
            pivots.push((row, col));
            col += 1;
        }
    }

    ColEchelon { rows, cols, h, u, pivots }
}

/// Rounded division so the Euclidean sweep shrinks remainders fast.
fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_rem(d);
    // bias toward |r| <= |d|/2
    if &r.abs() * 2 > d.abs() {
        if (r.is_negative()) == (d.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn swap_cols(h: &mut [IVec], u: &mut [IVec], a: usize, b: usize) {
    for row in h.iter_mut() {
        row.swap(a, b);
    }
    for row in u.iter_mut() {
        row.swap(a, b);
    }
}

/// col_j += lambda * col_i
fn addmul_col(h: &mut [IVec], u: &mut [IVec], i: usize, j: usize, lambda: &BigInt) {
    for row in h.iter_mut() {
        let t = &row[i] * lambda;
        row[j] += t;
    }
    for row in u.iter_mut() {
        let t = &row[i] * lambda;
        row[j] += t;
    }
}

fn neg_col(h: &mut [IVec], u: &mut [IVec], j: usize) {
    for row in h.iter_mut() {
        let v = -row[j].clone();
        row[j] = v;
    }
    for row in u.iter_mut() {
        let v = -row[j].clone();
        row[j] = v;
    }
}

pub fn rank(m: &[IVec], cols: usize) -> usize {
    col_echelon(m, cols).pivots.len()
}

/// Basis of the full kernel lattice `{x integral : m x = 0}`.
///
/// Because the transformation is unimodular the basis is saturated: every
/// integral kernel vector is an integral combination of the result.
pub fn kernel_basis(m: &[IVec], cols: usize) -> Vec<IVec> {
    let ech = col_echelon(m, cols);
    let r = ech.pivots.len();
    (r..cols)
        .map(|j| (0..cols).map(|i| ech.u[i][j].clone()).collect())
        .collect()
}

pub enum LinSolve {
    /// An integral solution of `m x = b`.
    Integral(IVec),
    /// `witness * m = 0` but `witness * b != 0`: no rational solution.
    RatInfeasible { witness: Vec<Q> },
    /// `witness * m` is integral but `witness * b` is not: rational solutions
    /// exist but no integral one.
    IntInfeasible { witness: Vec<Q> },
}

/// Solve `m x = b` over the integers, or certify why it cannot be done.
///
/// The forward substitution tracks, for every produced value, the rational
/// functional of `b` that computed it; those functionals are exactly the
/// certificates, and they are re-checked against `m` and `b` before being
/// handed out.
pub fn solve_integral(m: &[IVec], cols: usize, b: &[BigInt]) -> LinSolve {
    let rows = m.len();
    assert_eq!(b.len(), rows);
    let ech = col_echelon(m, cols);
    let npiv = ech.pivots.len();

    let mut bp: Vec<Q> = b.iter().map(|v| Q::from_integer(v.clone())).collect();
    // g[r] is the functional with bp[r] = g[r] . b throughout.
    let mut g: Vec<Vec<Q>> = (0..rows)
        .map(|r| (0..rows).map(|i| if i == r { Q::one() } else { Q::zero() }).collect())
        .collect();
    let mut z: Vec<Q> = Vec::with_capacity(npiv);
    let mut f: Vec<Vec<Q>> = Vec::with_capacity(npiv);

    for &(pr, pc) in &ech.pivots {
        let piv = Q::from_integer(ech.h[pr][pc].clone());
        let zj = &bp[pr] / &piv;
        let fj: Vec<Q> = g[pr].iter().map(|v| v / &piv).collect();
        for r in 0..rows {
            if r == pr {
                continue;
            }
            let coeff = Q::from_integer(ech.h[r][pc].clone());
            if coeff.is_zero() {
                continue;
            }
            bp[r] = &bp[r] - &coeff * &zj;
            for i in 0..rows {
                let t = &coeff * &fj[i];
                g[r][i] = &g[r][i] - t;
            }
        }
        bp[pr] = Q::zero();
        for v in g[pr].iter_mut() {
            *v = Q::zero();
        }
        z.push(zj);
        f.push(fj);
    }

    // Rows never consumed by a pivot must have been annihilated.
    for r in 0..rows {
        if !bp[r].is_zero() {
            let witness = g[r].clone();
            for j in 0..cols {
                let col_dot: Q = (0..rows)
                    .map(|i| &witness[i] * Q::from_integer(m[i][j].clone()))
                    .sum();
                assert!(col_dot.is_zero(), "bad rational certificate");
            }
            let wb: Q = (0..rows).map(|i| &witness[i] * Q::from_integer(b[i].clone())).sum();
            assert!(!wb.is_zero(), "bad rational certificate");
            return LinSolve::RatInfeasible { witness };
        }
    }

    for (j, zj) in z.iter().enumerate() {
        if !zj.is_integer() {
            let witness = f[j].clone();
            for jj in 0..cols {
                let col_dot: Q = (0..rows)
                    .map(|i| &witness[i] * Q::from_integer(m[i][jj].clone()))
                    .sum();
                assert!(col_dot.is_integer(), "bad integral certificate");
            }
            let wb: Q = (0..rows).map(|i| &witness[i] * Q::from_integer(b[i].clone())).sum();
            assert!(!wb.is_integer(), "bad integral certificate");
            return LinSolve::IntInfeasible { witness };
        }
    }

    // x = u[.., 0..npiv] z
    let mut x = zeros(cols);
    for (j, zj) in z.iter().enumerate() {
        let (_, pc) = ech.pivots[j];
        let zi = zj.to_integer();
        for i in 0..cols {
            x[i] += &ech.u[i][pc] * &zi;
        }
    }
    debug_assert_eq!(mat_vec(m, &x), b.to_vec());
    LinSolve::Integral(x)
}

/// Canonical representative of `b` modulo the column lattice of the matrix
/// behind `ech`. Two vectors reduce to the same representative iff they
/// differ by an integral combination of the columns.
pub fn residue_mod_cols(ech: &ColEchelon, b: &[BigInt]) -> IVec {
    assert_eq!(b.len(), ech.rows);
    let mut r: IVec = b.to_vec();
    for &(pr, pc) in &ech.pivots {
        let q = r[pr].div_floor(&ech.h[pr][pc]);
        if q.is_zero() {
            continue;
        }
        for i in 0..ech.rows {
            let t = &q * &ech.h[i][pc];
            r[i] -= t;
        }
    }
    r
}

/// Extend a primitive integer vector to a basis of the full lattice: the
/// result is a square unimodular matrix (as columns) whose first column is
/// `c`. Returns `None` when the gcd of the entries is not one.
pub fn complete_primitive(c: &[BigInt]) -> Option<Vec<IVec>> {
    let n = c.len();
    assert!(n > 0);
    // Column-reduce the single row [c] to [1, 0, .., 0], tracking the inverse
    // of the transformation; its first row is then c itself, so its transpose
    // is the basis we want.
    let row = vec![c.to_vec()];
    let ech = col_echelon(&row, n);
    if ech.pivots.len() != 1 || ech.h[0][ech.pivots[0].1] != BigInt::one() {
        return None; // zero vector or non-primitive
    }
    // Invert u by solving u * inv = I column by column; u is unimodular so
    // every solve succeeds integrally.
    let mut inv_cols: Vec<IVec> = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = zeros(n);
        e[j] = BigInt::one();
        match solve_integral(&ech.u, n, &e) {
            LinSolve::Integral(x) => inv_cols.push(x),
            _ => unreachable!("unimodular matrix failed to invert"),
        }
    }
    // inv_cols[j][i] = (u^-1)[i][j]; first row of u^-1 must be c.
    for j in 0..n {
        assert_eq!(inv_cols[j][0], c[j], "completion lost the input vector");
    }
    // Columns of the answer are the rows of u^-1.
    let basis: Vec<IVec> = (0..n)
        .map(|i| (0..n).map(|j| inv_cols[j][i].clone()).collect())
        .collect();
    Some(basis)
}
