//! `sum_k (log z)^k / k! * S_k(z)` with all blocks on a common exponent
//! lattice.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::ratseries::RatSeries;
use crate::error::{Error, Result};
use crate::numerics::rational::factorial;
use crate::numerics::{QPoly, Q};
use crate::opalg::Operand;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LogBlock>", into = "Vec<LogBlock>")]
pub struct LogSeries {
    blocks: Vec<RatSeries>,
}

#[derive(Serialize, Deserialize)]
struct LogBlock {
    log_degree: usize,
    series: RatSeries,
}

impl TryFrom<Vec<LogBlock>> for LogSeries {
    type Error = Error;
    fn try_from(v: Vec<LogBlock>) -> Result<Self> {
        if v.iter().enumerate().any(|(i, b)| b.log_degree != i) {
            return Err(Error::Precondition("log blocks must be listed by degree".into()));
        }
        LogSeries::new(v.into_iter().map(|b| b.series).collect())
    }
}

impl From<LogSeries> for Vec<LogBlock> {
    fn from(s: LogSeries) -> Self {
        s.blocks.into_iter().enumerate().map(|(log_degree, series)| LogBlock { log_degree, series }).collect()
    }
}

impl LogSeries {
    /// Blocks must share offset and order. Trailing zero blocks are dropped
    /// (one block is always kept).
    pub fn new(mut blocks: Vec<RatSeries>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Precondition("log series needs a block".into()));
        };
        let (o, n) = (first.offset().clone(), first.order());
        if blocks.iter().any(|b| b.offset() != &o || b.order() != n) {
            return Err(Error::Precondition("log blocks must share offset and order".into()));
        }
        while blocks.len() > 1 && blocks.last().is_some_and(RatSeries::is_zero) {
            blocks.pop();
        }
        Ok(LogSeries { blocks })
    }

    pub fn log_free(s: RatSeries) -> Self {
        LogSeries { blocks: vec![s] }
    }

    pub fn blocks(&self) -> &[RatSeries] {
        &self.blocks
    }

    pub fn log_degree(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(RatSeries::is_zero)
    }
}

impl Operand for LogSeries {
    fn shift(&self, k: i64) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| b.shift(k)).collect::<Result<_>>()?;
        Ok(LogSeries { blocks })
    }

    /// `D` acts on `z^e (log z)^k / k!` as `e` plus the lowering map
    /// `k -> k - 1`, so `p(D)` sends block `k + i` to block `k` with weight
    /// `p^(i)(e) / i!`.
    fn apply_dpoly(&self, p: &QPoly) -> Self {
        let g = self.blocks.len();
        let mut derivs = vec![p.clone()];
        for i in 1..g {
            let next = derivs[i - 1].derivative();
            derivs.push(next);
        }
        let weights: Vec<QPoly> = derivs
            .iter()
            .enumerate()
            .map(|(i, d)| d.scale(&Q::from_integer(factorial(i as u64)).recip()))
            .collect();
        let offset = self.blocks[0].offset().clone();
        let n = self.blocks[0].order();
        let blocks = (0..g)
            .map(|k| {
                let coeffs = (0..n)
                    .map(|m| {
                        let e = &offset + Q::from_integer(BigInt::from(m));
                        (0..g - k).fold(Q::zero(), |acc, i| {
                            let c = &self.blocks[k + i].coeffs()[m];
                            if c.is_zero() || weights[i].is_zero() {
                                acc
                            } else {
                                acc + c * weights[i].eval(&e)
                            }
                        })
                    })
                    .collect();
                RatSeries::new(offset.clone(), coeffs)
            })
            .collect();
        LogSeries::new(blocks).expect("blocks share offset and order")
    }

    fn add(&self, other: &Self) -> Result<Self> {
        let g = self.blocks.len().max(other.blocks.len());
        let pad = |s: &Self, k: usize| -> RatSeries {
            s.blocks.get(k).cloned().unwrap_or_else(|| RatSeries::zeros(s.blocks[0].offset().clone(), s.blocks[0].order()))
        };
        let blocks = (0..g).map(|k| pad(self, k).add(&pad(other, k))).collect::<Result<Vec<_>>>()?;
        LogSeries::new(blocks)
    }
}
