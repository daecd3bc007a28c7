use serde::Serialize;

use super::tol;
use crate::error::{Error, Result};

/// Which party holds a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Owner {
    Alice,
    Bob,
    /// Bob's private ancillas; never surrendered to Alice.
    BobAncilla,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Register {
    pub name: String,
    pub dim: usize,
    pub owner: Owner,
}

impl Register {
    pub fn new(name: impl Into<String>, dim: usize, owner: Owner) -> Self {
        Register {
            name: name.into(),
            dim,
            owner,
        }
    }
}

/// Ordered list of uniquely named registers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        let mut total: usize = 1;
        for (i, r) in registers.iter().enumerate() {
            if r.dim == 0 {
                return Err(Error::ZeroDimension(r.name.clone()));
            }
            if registers[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::DuplicateRegister(r.name.clone()));
            }
            total = total.saturating_mul(r.dim);
        }
        if total > tol::MAX_JOINT_DIM {
            return Err(Error::DimensionCap {
                dim: total,
                cap: tol::MAX_JOINT_DIM,
            });
        }
        Ok(RegisterLayout { registers })
    }

    /// Single-register layout.
    pub fn single(name: impl Into<String>, dim: usize, owner: Owner) -> Result<Self> {
        Self::new(vec![Register::new(name, dim, owner)])
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.dim).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.registers.iter().map(|r| r.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Result<&Register> {
        self.index_of(name).map(|i| &self.registers[i])
    }

    /// Names of all registers held by `owner`, in layout order.
    pub fn owned_by(&self, owner: Owner) -> Vec<&str> {
        self.registers
            .iter()
            .filter(|r| r.owner == owner)
            .map(|r| r.name.as_str())
            .collect()
    }

    /// Concatenation `self ⊗ other`; names must be disjoint.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        Self::new(regs)
    }

    /// Layout restricted to `names`, preserving this layout's order.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let idx = self.resolve(names)?;
        let mut sorted = idx;
        sorted.sort_unstable();
        Self::new(sorted.iter().map(|&i| self.registers[i].clone()).collect())
    }

    /// Layout made of the registers *not* named in `names`.
    pub fn complement<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let idx = self.resolve(names)?;
        Self::new(
            (0..self.len())
                .filter(|i| !idx.contains(i))
                .map(|i| self.registers[i].clone())
                .collect(),
        )
    }

    /// Resolves names to register indices, keeping the caller's order.
    pub(crate) fn resolve<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.index_of(n.as_ref())?;
            if out.contains(&i) {
                return Err(Error::DuplicateRegister(n.as_ref().to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Maps every flat index to `(row, col)` of the bipartition in which the
    /// registers `rows` (in the given order) form the row index and the
    /// remaining registers (in layout order) form the column index.
    pub(crate) fn bipartition(&self, rows: &[usize]) -> (usize, usize, Vec<(usize, usize)>) {
        let dims = self.dims();
        let cols: Vec<usize> = (0..dims.len()).filter(|i| !rows.contains(i)).collect();
        let row_dim: usize = rows.iter().map(|&i| dims[i]).product();
        let col_dim: usize = cols.iter().map(|&i| dims[i]).product();

        // Stride of each register inside the row / column multi-index.
        let mut row_stride = vec![0usize; dims.len()];
        let mut s = 1;
        for &i in rows.iter().rev() {
            row_stride[i] = s;
            s *= dims[i];
        }
        let mut col_stride = vec![0usize; dims.len()];
        s = 1;
        for &i in cols.iter().rev() {
            col_stride[i] = s;
            s *= dims[i];
        }

        let total = self.total_dim();
        let mut map = Vec::with_capacity(total);
        let mut digits = vec![0usize; dims.len()];
        for _ in 0..total {
            let (mut r, mut c) = (0, 0);
            for (k, &d) in digits.iter().enumerate() {
                r += d * row_stride[k];
                c += d * col_stride[k];
            }
            map.push((r, c));
            // odometer increment, last register fastest
            for k in (0..dims.len()).rev() {
                digits[k] += 1;
                if digits[k] < dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        (row_dim, col_dim, map)
    }
}
