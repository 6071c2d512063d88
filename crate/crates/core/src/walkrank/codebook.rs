use crate::error::{Error, Result};
use crate::model::DiscreteAlphabet;

/// Largest alphabet power `N^r` a greedy move may enumerate.
pub const MAX_CODEWORDS: usize = 1_000_000;
const MAX_DOT_TABLE: usize = 1 << 22;

/// All vectors of `(A_N)^r`, indexed in mixed radix (first component fastest).
#[derive(Debug, Clone)]
pub(crate) struct Codebook {
    r: usize,
    len: usize,
    vectors: Vec<f64>,
    dots: Option<Vec<f64>>,
}

impl Codebook {
    pub(crate) fn new(alphabet: &DiscreteAlphabet, r: usize) -> Result<Self> {
        let n = alphabet.len();
        let len = (0..r).try_fold(1usize, |acc, _| acc.checked_mul(n).filter(|&v| v <= MAX_CODEWORDS));
        let len = len.ok_or_else(|| {
            Error::Config(format!(
                "alphabet power {n}^{r} exceeds the enumeration limit of {MAX_CODEWORDS}"
            ))
        })?;
        let mut vectors = Vec::with_capacity(len * r);
        for code in 0..len {
            let mut c = code;
            for _ in 0..r {
                vectors.push(alphabet.points()[c % n]);
                c /= n;
            }
        }
        let dots = (len * len <= MAX_DOT_TABLE).then(|| {
            let mut t = Vec::with_capacity(len * len);
            for x in vectors.chunks_exact(r) {
                for y in vectors.chunks_exact(r) {
                    t.push(x.iter().zip(y).map(|(p, q)| p * q).sum());
                }
            }
            t
        });
        Ok(Codebook {
            r,
            len,
            vectors,
            dots,
        })
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub(crate) fn vector(&self, code: u32) -> &[f64] {
        let c = code as usize;
        &self.vectors[c * self.r..(c + 1) * self.r]
    }

    #[inline]
    pub(crate) fn dot(&self, x: u32, y: u32) -> f64 {
        match &self.dots {
            Some(t) => t[x as usize * self.len + y as usize],
            None => self.vector(x).iter().zip(self.vector(y)).map(|(p, q)| p * q).sum(),
        }
    }

    /// Code of an exact alphabet vector.
    pub(crate) fn encode(&self, alphabet: &DiscreteAlphabet, v: &[f64]) -> Option<u32> {
        let n = alphabet.len();
        let mut code = 0usize;
        for x in v.iter().rev() {
            code = code * n + alphabet.index_of(*x)?;
        }
        Some(code as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_the_alphabet_power() {
        let a = DiscreteAlphabet::ternary();
        let b = Codebook::new(&a, 2).unwrap();
        assert_eq!(b.len(), 9);
        for code in 0..9 {
            assert_eq!(b.encode(&a, b.vector(code)), Some(code));
        }
        assert_eq!(b.dot(8, 8), 2.0);
        assert!(Codebook::new(&DiscreteAlphabet::uniform(11).unwrap(), 6).is_err());
    }
}
