//! Ultimately periodic words `stem · period^ω`.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoWord<T> {
    pub stem: Vec<T>,
    pub period: Vec<T>,
}

impl<T> LassoWord<T> {
    /// Panics on an empty period; every caller builds periods from nonempty data.
    pub fn new(stem: Vec<T>, period: Vec<T>) -> Self {
        assert!(!period.is_empty(), "lasso period must be nonempty");
        LassoWord { stem, period }
    }

    /// Number of distinct positions: stem plus one unrolling of the period.
    pub fn len(&self) -> usize {
        self.stem.len() + self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter at an absolute position.
    pub fn at(&self, pos: usize) -> &T {
        self.letters_at(self.normalize(pos))
    }

    fn letters_at(&self, p: usize) -> &T {
        if p < self.stem.len() {
            &self.stem[p]
        } else {
            &self.period[p - self.stem.len()]
        }
    }

    /// Maps an absolute position to its representative in `0..len()`.
    pub fn normalize(&self, pos: usize) -> usize {
        if pos < self.stem.len() {
            pos
        } else {
            self.stem.len() + (pos - self.stem.len()) % self.period.len()
        }
    }

    /// Successor of a normalized position.
    pub fn next(&self, p: usize) -> usize {
        if p + 1 < self.len() {
            p + 1
        } else {
            self.stem.len()
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = (usize, &T)> {
        self.stem.iter().chain(self.period.iter()).enumerate()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> LassoWord<U> {
        let mut f = f;
        LassoWord {
            stem: self.stem.iter().map(&mut f).collect(),
            period: self.period.iter().map(&mut f).collect(),
        }
    }

    /// The suffix starting at normalized position `p`, again as a lasso.
    pub fn suffix(&self, p: usize) -> LassoWord<T>
    where
        T: Clone,
    {
        let s = self.stem.len();
        if p < s {
            LassoWord { stem: self.stem[p..].to_vec(), period: self.period.clone() }
        } else {
            let k = p - s;
            let mut period = self.period[k..].to_vec();
            period.extend_from_slice(&self.period[..k]);
            LassoWord { stem: Vec::new(), period }
        }
    }

    /// Unrolls to a stem of length `stem` and a period of length `period`.
    /// `stem >= self.stem.len()` and `period` a multiple of `self.period.len()`.
    pub fn unroll(&self, stem: usize, period: usize) -> LassoWord<T>
    where
        T: Clone,
    {
        debug_assert!(stem >= self.stem.len() && period.is_multiple_of(self.period.len()));
        LassoWord {
            stem: (0..stem).map(|i| self.at(i).clone()).collect(),
            period: (stem..stem + period).map(|i| self.at(i).clone()).collect(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for LassoWord<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.stem {
            write!(f, "{x} ")?;
        }
        write!(f, "|")?;
        for x in &self.period {
            write!(f, " {x}")?;
        }
        Ok(())
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
