//! Small exact-integer helpers. Everything works in `i128` so that the
//! intermediate products of `i64` coefficients cannot overflow.

pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple, saturating at `cap`.
pub(crate) fn lcm_capped(a: i128, b: i128, cap: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    let l = (a / gcd(a, b)).saturating_mul(b).abs();
    l.min(cap)
}

pub(crate) fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

/// Extended Euclid: `(g, x, y)` with `a*x + b*y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Inverse of `a` modulo `m` (requires `gcd(a, m) = 1`, `m ≥ 1`).
pub(crate) fn mod_inverse(a: i128, m: i128) -> i128 {
    let (_, x, _) = ext_gcd(a.rem_euclid(m), m);
    x.rem_euclid(m)
}

pub(crate) fn to_i64(v: i128) -> Option<i64> {
    i64::try_from(v).ok()
}
