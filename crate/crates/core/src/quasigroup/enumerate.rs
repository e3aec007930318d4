//! Exhaustive enumeration of multary quasigroups by backtracking.
//!
//! Cells are filled in row-major order with candidate values ascending, so
//! the stream of tables is deterministic. A value is admissible in a cell
//! when it is unused on each of the `m` lines through that cell.

use rayon::prelude::*;

use super::MultaryQuasigroup;
use crate::error::{Error, Result};

pub struct QuasigroupStream {
    arity: usize,
    order: u32,
    cells: usize,
    // cell_lines[c * arity + j] = id of the line through c along position j
    cell_lines: Vec<u32>,
    used: Vec<u64>,
    values: Vec<u8>,
    // first cell the search may change; cells before it are a fixed prefix
    floor: usize,
    pos: usize,
    next: u8,
    done: bool,
}

impl QuasigroupStream {
    pub fn new(arity: usize, order: u32) -> Result<Self> {
        QuasigroupStream::with_prefix(arity, order, &[])
    }

    /// Streams the quasigroups whose first cells equal `prefix`.
    pub fn with_prefix(arity: usize, order: u32, prefix: &[u8]) -> Result<Self> {
        if arity == 0 || order == 0 || order > 64 {
            return Err(Error::BadShape(format!("arity {arity}, order {order}")));
        }
        let k = order as usize;
        let cells = u32::try_from(arity)
            .ok()
            .and_then(|a| k.checked_pow(a))
            .filter(|&c| c <= 1 << 24)
            .ok_or_else(|| Error::too_large(format!("{arity}-ary table of order {order}")))?;
        let lines_per_dir = cells / k;
        let mut cell_lines = Vec::with_capacity(cells * arity);
        for c in 0..cells {
            for j in 0..arity {
                let stride = k.pow((arity - 1 - j) as u32);
                let high = c / (stride * k);
                let low = c % stride;
                cell_lines.push((j * lines_per_dir + high * stride + low) as u32);
            }
        }
        let mut s = QuasigroupStream {
            arity,
            order,
            cells,
            cell_lines,
            used: vec![0; arity * lines_per_dir],
            values: vec![0; cells],
            floor: prefix.len(),
            pos: 0,
            next: 0,
            done: false,
        };
        if prefix.len() > cells {
            s.done = true;
        }
        for &v in prefix.iter().take(cells) {
            if u32::from(v) >= order || !s.fits(s.pos, v) {
                s.done = true;
                break;
            }
            s.place(s.pos, v);
            s.pos += 1;
        }
        Ok(s)
    }

    #[inline]
    fn lines(&self, cell: usize) -> &[u32] {
        &self.cell_lines[cell * self.arity..(cell + 1) * self.arity]
    }

    #[inline]
    fn fits(&self, cell: usize, v: u8) -> bool {
        self.lines(cell).iter().all(|&l| self.used[l as usize] >> v & 1 == 0)
    }

    #[inline]
    fn toggle(&mut self, cell: usize, v: u8) {
        for j in 0..self.arity {
            let l = self.cell_lines[cell * self.arity + j] as usize;
            self.used[l] ^= 1 << v;
        }
    }

    fn place(&mut self, cell: usize, v: u8) {
        self.values[cell] = v;
        self.toggle(cell, v);
    }

    /// Undoes the last placement; false when the search space is exhausted.
    fn retreat(&mut self) -> bool {
        if self.pos == self.floor {
            return false;
        }
        self.pos -= 1;
        let v = self.values[self.pos];
        self.toggle(self.pos, v);
        self.next = v + 1;
        true
    }
}

impl Iterator for QuasigroupStream {
    type Item = MultaryQuasigroup;

    fn next(&mut self) -> Option<MultaryQuasigroup> {
        if self.done {
            return None;
        }
        let k = self.order as u8;
        loop {
            if self.pos == self.cells {
                let out = MultaryQuasigroup::from_table_unchecked(self.arity, self.order, self.values.clone());
                if !self.retreat() {
                    self.done = true;
                }
                return Some(out);
            }
            match (self.next..k).find(|&v| self.fits(self.pos, v)) {
                Some(v) => {
                    self.place(self.pos, v);
                    self.pos += 1;
                    self.next = 0;
                }
                None => {
                    if !self.retreat() {
                        self.done = true;
                        return None;
                    }
                }
            }
        }
    }
}

fn feasible(arity: usize, order: u32) -> bool {
    match order {
        1 | 2 => arity <= 6,
        3 => arity <= 3,
        4 => arity <= 2,
        5 | 6 => arity == 1,
        _ => false,
    }
}

/// Exact number of `arity`-ary quasigroups of the given order.
///
/// The search tree is split by the value of the first cell; the branches
/// are counted in parallel.
pub fn qg_count(arity: usize, order: u32) -> Result<u64> {
    if arity == 0 || order == 0 {
        return Err(Error::BadShape(format!("arity {arity}, order {order}")));
    }
    if !feasible(arity, order) {
        return Err(Error::too_large(format!("counting {arity}-ary quasigroups of order {order}")));
    }
    (0..order as u8)
        .into_par_iter()
        .map(|first| QuasigroupStream::with_prefix(arity, order, &[first]).map(|s| s.count() as u64))
        .sum()
}
