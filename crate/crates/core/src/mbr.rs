//! Product-matrix exact-repair regenerating code at the minimum-bandwidth
//! point, with one symbol per helper (`beta = 1`).
//!
//! The `block = kd - k(k-1)/2` message symbols fill a symmetric `d x d`
//! matrix
//!
//! ```text
//!     M = | S   T |        S: k x k symmetric, T: k x (d-k)
//!         | T'  0 |
//! ```
//!
//! `S` takes the first `k(k+1)/2` symbols (upper triangle, row-major) and `T`
//! the rest (row-major). Node `i` stores `psi_i' M` where `psi_i` is the
//! Vandermonde row at evaluation point `i`. A helper `j` repairing node `f`
//! sends the single symbol `psi_j' M psi_f`.

use crate::bounds::{RatePoint, Rational};
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::matrix::{vandermonde, Matrix};
use alloc::format;
use alloc::vec::Vec;

/// Shape of one `(n, k, d)` MBR code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MbrParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Symbols stored per node, equal to `d`.
    pub alpha: usize,
    /// Symbols sent per helper, always 1.
    pub beta: usize,
    /// Message symbols per codeword, `kd - k(k-1)/2`.
    pub block: usize,
}

impl MbrParams {
    pub fn new(n: usize, k: usize, d: usize) -> Result<Self> {
        if k == 0 || k > d || d + 1 > n {
            return Err(Error::InvalidParams(format!(
                "need 1 <= k <= d <= n-1, got (n,k,d)=({n},{k},{d})"
            )));
        }
        Ok(MbrParams {
            n,
            k,
            d,
            alpha: d,
            beta: 1,
            block: k * d - k * (k - 1) / 2,
        })
    }

    /// `(alpha/block, beta/block)`, which equals `(d T_{d,k}, T_{d,k})`.
    pub fn normalized_point(&self) -> RatePoint {
        let block = Rational::from_integer(self.block.into());
        RatePoint {
            alpha_bar: Rational::from_integer(self.alpha.into()) / &block,
            beta_bar: Rational::from_integer(self.beta.into()) / block,
        }
    }
}

/// Content of one storage node for one codeword.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeShare {
    /// 1-based node index.
    pub node: usize,
    pub symbols: Vec<Fe>,
}

/// The single symbol helper `helper` sends toward failed node `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RepairSymbol {
    pub helper: usize,
    pub target: usize,
    pub symbol: Fe,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbrCode {
    params: MbrParams,
    field: Field,
    /// `n x d` encoding matrix `[Phi | Delta]`.
    psi: Matrix,
}

impl MbrCode {
    pub fn new(n: usize, k: usize, d: usize, field: Field) -> Result<Self> {
        let params = MbrParams::new(n, k, d)?;
        if field.modulus() as usize <= n {
            return Err(Error::InvalidParams(format!(
                "GF({}) has too few nonzero points for {n} nodes",
                field.modulus()
            )));
        }
        let points: Vec<Fe> = (1..=n as u32).map(Fe).collect();
        let psi = vandermonde(&field, &points, d)?;
        Ok(MbrCode { params, field, psi })
    }

    pub fn params(&self) -> &MbrParams {
        &self.params
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn psi(&self) -> &Matrix {
        &self.psi
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node == 0 || node > self.params.n {
            return Err(Error::NodeOutOfRange(node));
        }
        Ok(())
    }

    fn message_matrix(&self, message: &[Fe]) -> Result<Matrix> {
        let MbrParams { k, d, block, .. } = self.params;
        if message.len() != block {
            return Err(Error::SizeMismatch {
                expected: block,
                got: message.len(),
            });
        }
        let mut m = Matrix::zeros(d, d);
        let mut it = message.iter().copied();
        for r in 0..k {
            for c in r..k {
                let v = it.next().expect("length checked");
                m.set(r, c, v);
                m.set(c, r, v);
            }
        }
        for r in 0..k {
            for c in k..d {
                let v = it.next().expect("length checked");
                m.set(r, c, v);
                m.set(c, r, v);
            }
        }
        Ok(m)
    }

    /// Encodes one codeword into `n` node shares.
    pub fn encode(&self, message: &[Fe]) -> Result<Vec<NodeShare>> {
        let m = self.message_matrix(message)?;
        let coded = self.psi.mul(&self.field, &m)?;
        Ok((0..self.params.n)
            .map(|i| NodeShare {
                node: i + 1,
                symbols: coded.row(i).to_vec(),
            })
            .collect())
    }

    fn check_share(&self, share: &NodeShare) -> Result<()> {
        self.check_node(share.node)?;
        if share.symbols.len() != self.params.alpha {
            return Err(Error::SizeMismatch {
                expected: self.params.alpha,
                got: share.symbols.len(),
            });
        }
        Ok(())
    }

    /// Recovers the message from exactly `k` shares with distinct indices.
    pub fn reconstruct(&self, shares: &[NodeShare]) -> Result<Vec<Fe>> {
        let MbrParams { k, d, block, .. } = self.params;
        if shares.len() != k {
            return Err(Error::WrongShareCount {
                expected: k,
                got: shares.len(),
            });
        }
        for (i, s) in shares.iter().enumerate() {
            self.check_share(s)?;
            if shares[..i].iter().any(|o| o.node == s.node) {
                return Err(Error::DuplicateNode(s.node));
            }
        }
        let f = &self.field;
        let idx: Vec<usize> = shares.iter().map(|s| s.node - 1).collect();
        let rows: Vec<Vec<Fe>> = shares.iter().map(|s| s.symbols.clone()).collect();
        let y = Matrix::from_rows(&rows)?;
        let psi_dc = self.psi.select_rows(&idx);
        let phi_dc = psi_dc.col_range(0, k);
        let singular = |e: Error| match e {
            Error::SingularMatrix => Error::InternalError("data-collector system is singular".into()),
            other => other,
        };

        // Phi_DC T = Y[:, k..d]
        let t = phi_dc.solve(f, &y.col_range(k, d)).map_err(singular)?;
        // Phi_DC S = Y[:, 0..k] - Delta_DC T'
        let mut lhs = y.col_range(0, k);
        if d > k {
            let delta_dc = psi_dc.col_range(k, d);
            let corr = delta_dc.mul(f, &t.transpose())?;
            lhs = lhs.sub(f, &corr)?;
        }
        let s = phi_dc.solve(f, &lhs).map_err(singular)?;

        let mut message = Vec::with_capacity(block);
        for r in 0..k {
            for c in r..k {
                message.push(s.get(r, c));
            }
        }
        for r in 0..k {
            for c in 0..d - k {
                message.push(t.get(r, c));
            }
        }
        Ok(message)
    }

    /// The symbol a helper sends toward `target`; computed from the helper's
    /// own share alone.
    pub fn helper_symbol(&self, helper: &NodeShare, target: usize) -> Result<RepairSymbol> {
        self.check_share(helper)?;
        self.check_node(target)?;
        if helper.node == target {
            return Err(Error::SelfRepair(target));
        }
        let psi_f = self.psi.row(target - 1);
        Ok(RepairSymbol {
            helper: helper.node,
            target,
            symbol: self.field.dot(&helper.symbols, psi_f),
        })
    }

    /// Rebuilds the share of `target` from `d` repair symbols.
    pub fn regenerate(&self, target: usize, symbols: &[RepairSymbol]) -> Result<NodeShare> {
        self.check_node(target)?;
        let d = self.params.d;
        if symbols.len() != d {
            return Err(Error::InvalidRepairSet(format!(
                "need {d} helper symbols, got {}",
                symbols.len()
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.target != target {
                return Err(Error::InvalidRepairSet(format!(
                    "symbol from node {} targets node {}, not {target}",
                    s.helper, s.target
                )));
            }
            if s.helper == target {
                return Err(Error::InvalidRepairSet(format!("node {target} listed as its own helper")));
            }
            if s.helper == 0 || s.helper > self.params.n {
                return Err(Error::InvalidRepairSet(format!("helper {} out of range", s.helper)));
            }
            if symbols[..i].iter().any(|o| o.helper == s.helper) {
                return Err(Error::InvalidRepairSet(format!("duplicate helper {}", s.helper)));
            }
        }
        let idx: Vec<usize> = symbols.iter().map(|s| s.helper - 1).collect();
        let psi_rep = self.psi.select_rows(&idx);
        let rhs = Matrix::from_vec(d, 1, symbols.iter().map(|s| s.symbol).collect())?;
        // Psi_rep (M psi_f) = symbols; M symmetric so the stored row is its transpose.
        let m_psi_f = psi_rep
            .solve(&self.field, &rhs)
            .map_err(|_| Error::InternalError("repair system is singular".into()))?;
        Ok(NodeShare {
            node: target,
            symbols: m_psi_f.col(0),
        })
    }
}
