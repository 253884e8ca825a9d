//! Reusable transposition tables for one worker thread.

use std::cell::RefCell;
use std::ops::{Deref, DerefMut};

use mtd_core::{TranspositionTable, TtConfig};

/// Hands out empty tables, recycling returned ones instead of allocating.
///
/// Fresh tables are expensive mostly because of page faults; a cleared table
/// costs nothing.
#[derive(Default)]
pub struct TablePool {
    free: RefCell<Vec<TranspositionTable>>,
}

const KEEP: usize = 4;

/// An empty table borrowed from a [`TablePool`], returned on drop.
pub struct Lease<'a> {
    pool: &'a TablePool,
    table: Option<TranspositionTable>,
}

impl TablePool {
    pub fn lease(&self, config: TtConfig) -> Lease<'_> {
        let mut free = self.free.borrow_mut();
        let table = match free.iter().rposition(|t| *t.config() == config) {
            Some(i) => {
                let mut t = free.remove(i);
                t.clear();
                t
            }
            None => TranspositionTable::new(config),
        };
        Lease {
            pool: self,
            table: Some(table),
        }
    }
}

impl Deref for Lease<'_> {
    type Target = TranspositionTable;

    fn deref(&self) -> &TranspositionTable {
        self.table.as_ref().expect("held until drop")
    }
}

impl DerefMut for Lease<'_> {
    fn deref_mut(&mut self) -> &mut TranspositionTable {
        self.table.as_mut().expect("held until drop")
    }
}

impl Drop for Lease<'_> {
    fn drop(&mut self) {
        let mut free = self.pool.free.borrow_mut();
        // keep the most recently used few; sizes change between instances
        if free.len() == KEEP {
            free.remove(0);
        }
        free.extend(self.table.take());
    }
}
