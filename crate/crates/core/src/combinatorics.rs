//! Exact binomial coefficients and the coefficients `D_k^{mn}` of the
//! expansion `(p + q)^m (p - q)^n = sum_k D_k^{mn} p^{m+n-k} q^k`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rug::Integer;

use crate::error::{domain, Result};

/// `C(n, s)`, zero when `s < 0` or `s > n`.
pub fn binom(n: u32, s: i64) -> Integer {
    if s < 0 || s > n as i64 {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, s as u32))
}

type DTable = RwLock<HashMap<(u32, u32), Arc<Vec<Integer>>>>;

fn d_table() -> &'static DTable {
    static TABLE: OnceLock<DTable> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// All of `D_0^{mn} ..= D_{m+n}^{mn}`, memoized.
pub fn d_coeffs(m: u32, n: u32) -> Arc<Vec<Integer>> {
    if let Some(v) = d_table().read().expect("D table poisoned").get(&(m, n)) {
        return Arc::clone(v);
    }
    // (1 - x^2) f' = ((m - n) - (m + n) x) f for f = (1 + x)^m (1 - x)^n gives
    // (k + 1) D_{k+1} = (m - n) D_k - (m + n - k + 1) D_{k-1}.
    let top = (m + n) as usize;
    let mut row: Vec<Integer> = Vec::with_capacity(top + 1);
    row.push(Integer::from(1));
    if top >= 1 {
        row.push(Integer::from(m as i64 - n as i64));
    }
    for k in 1..top {
        let next = Integer::from(&row[k] * (m as i64 - n as i64)) - Integer::from(&row[k - 1] * (top - k + 1) as u64);
        row.push(next.div_exact_u((k + 1) as u32));
    }
    let row = Arc::new(row);
    d_table().write().expect("D table poisoned").entry((m, n)).or_insert_with(|| Arc::clone(&row)).clone()
}

/// `D_k^{mn} = sum_sigma (-1)^sigma C(m, k - sigma) C(n, sigma)`.
pub fn d_coeff(m: u32, n: u32, k: i64) -> Result<Integer> {
    if k < 0 || k > (m + n) as i64 {
        return domain(format!("D_k^{{{m}{n}}} needs 0 <= k <= {}, got k = {k}", m + n));
    }
    Ok(d_coeffs(m, n)[k as usize].clone())
}
