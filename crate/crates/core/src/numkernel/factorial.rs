use std::sync::{OnceLock, RwLock};

use rug::{Float, Integer};

use super::PrecisionContext;
use crate::error::{domain, Result};

fn table() -> &'static RwLock<Vec<Integer>> {
    static TABLE: OnceLock<RwLock<Vec<Integer>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![Integer::from(1)]))
}

/// Exact `n!`. The table of factorials grows lazily and is shared.
pub fn factorial(n: i64) -> Result<Integer> {
    if n < 0 {
        return domain(format!("factorial of negative integer {n}"));
    }
    let n = n as usize;
    {
        let t = table().read().expect("factorial table poisoned");
        if let Some(v) = t.get(n) {
            return Ok(v.clone());
        }
    }
    let mut t = table().write().expect("factorial table poisoned");
    while t.len() <= n {
        let k = t.len();
        let next = Integer::from(&t[k - 1] * k as u64);
        t.push(next);
    }
    Ok(t[n].clone())
}

/// `n!` rounded to the working precision of `ctx`.
pub fn factorial_f(n: u32, ctx: &PrecisionContext) -> Float {
    let f = factorial(n as i64).expect("non-negative by type");
    Float::with_val(ctx.bits(), &f)
}
