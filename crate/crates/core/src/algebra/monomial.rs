use std::cmp::Ordering;

/// Exponent vector `(a_1, ..., a_n)`.
///
/// Ordered graded-lexicographically: by total degree first, then by the
/// first differing exponent (larger exponent on an earlier variable is
/// greater). Iterating a `BTreeMap<Monomial, _>` backwards therefore yields
/// the canonical printing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// The basis multi-index `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All monomials in `n` variables of total degree at most `d`, in
    /// ascending graded-lex order.
    pub fn all_up_to(n: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for deg in 0..=d {
            let mut layer = Vec::new();
            let mut cur = vec![0u32; n];
            compositions(n, deg, 0, &mut cur, &mut layer);
            // compositions are produced in descending lex order
            layer.reverse();
            out.extend(layer);
        }
        out
    }
}

fn compositions(n: usize, remaining: u32, idx: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if n == 0 {
        if remaining == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if idx == n - 1 {
        cur[idx] = remaining;
        out.push(Monomial(cur.clone()));
        cur[idx] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        cur[idx] = a;
        compositions(n, remaining - a, idx + 1, cur, out);
    }
    cur[idx] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
