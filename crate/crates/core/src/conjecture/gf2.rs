//! Incremental linear systems over GF(2) with undo.

/// Equations `⊕_{i ∈ row} v_i = rhs`, kept as an XOR basis indexed by the
/// lowest set bit of each row.
#[derive(Debug, Clone)]
pub(crate) struct Gf2System {
    words: usize,
    pivots: Vec<Option<(Vec<u64>, bool)>>,
    added: Vec<usize>,
}

/// Outcome of pushing an equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Push {
    /// New pivot installed; undo with [`Gf2System::pop`].
    Added,
    /// Implied by the existing equations; nothing to undo.
    Redundant,
    Inconsistent,
}

impl Gf2System {
    pub(crate) fn new(vars: usize) -> Self {
        Gf2System {
            words: vars.div_ceil(64).max(1),
            pivots: vec![None; vars],
            added: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, vars: &[usize], rhs: bool) -> Push {
        let mut row = vec![0u64; self.words];
        for &v in vars {
            row[v / 64] ^= 1 << (v % 64);
        }
        let mut rhs = rhs;
        while let Some(p) = lowest_bit(&row) {
            match &self.pivots[p] {
                Some((r, b)) => {
                    for (x, y) in row.iter_mut().zip(r) {
                        *x ^= y;
                    }
                    rhs ^= b;
                }
                None => {
                    self.pivots[p] = Some((row, rhs));
                    self.added.push(p);
                    return Push::Added;
                }
            }
        }
        if rhs {
            Push::Inconsistent
        } else {
            Push::Redundant
        }
    }

    /// Removes the most recently added equation.
    pub(crate) fn pop(&mut self) {
        if let Some(p) = self.added.pop() {
            self.pivots[p] = None;
        }
    }

    /// One solution, free variables set to `false`.
    pub(crate) fn solve(&self) -> Vec<bool> {
        let n = self.pivots.len();
        let mut value = vec![false; n];
        for p in (0..n).rev() {
            if let Some((row, rhs)) = &self.pivots[p] {
                let mut acc = *rhs;
                for q in p + 1..n {
                    if row[q / 64] >> (q % 64) & 1 == 1 {
                        acc ^= value[q];
                    }
                }
                value[p] = acc;
            }
        }
        value
    }
}

fn lowest_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_odd_cycle_of_parities() {
        let mut s = Gf2System::new(3);
        assert_eq!(s.push(&[0, 1], true), Push::Added);
        assert_eq!(s.push(&[1, 2], true), Push::Added);
        assert_eq!(s.push(&[0, 2], true), Push::Inconsistent);
        assert_eq!(s.push(&[0, 2], false), Push::Redundant);
        s.pop();
        assert_eq!(s.push(&[0, 2], true), Push::Added);
    }

    #[test]
    fn solution_satisfies_rows() {
        let rows: Vec<(Vec<usize>, bool)> = vec![
            (vec![0, 3, 70], true),
            (vec![3], false),
            (vec![70, 5], true),
            (vec![0, 5], false),
        ];
        let mut s = Gf2System::new(80);
        for (r, b) in &rows {
            assert_ne!(s.push(r, *b), Push::Inconsistent);
        }
        let v = s.solve();
        for (r, b) in &rows {
            assert_eq!(r.iter().fold(false, |a, &i| a ^ v[i]), *b);
        }
    }
}
