//! Boundary closures of the classical diagonal-norm SBP operators.
//!
//! All values are for unit spacing. `upper` lists the strictly upper
//! triangle of the boundary block of Q row by row; the block diagonal is zero
//! except Q[0][0] = -1/2.

pub(crate) struct Closure {
    pub block: usize,
    pub weights: &'static [(i64, i64)],
    pub upper: &'static [&'static [(i64, i64)]],
    /// Interior stencil c_1..c_w with Q[i][i+k] = c_k, Q[i][i-k] = -c_k.
    pub interior: &'static [(i64, i64)],
}

pub(crate) const SBP_21: Closure = Closure {
    block: 1,
    weights: &[(1, 2)],
    upper: &[&[]],
    interior: &[(1, 2)],
};

pub(crate) const SBP_42: Closure = Closure {
    block: 4,
    weights: &[(17, 48), (59, 48), (43, 48), (49, 48)],
    upper: &[
        &[(59, 96), (-1, 12), (-1, 32)],
        &[(59, 96), (0, 1)],
        &[(59, 96)],
        &[],
    ],
    interior: &[(2, 3), (-1, 12)],
};

pub(crate) const SBP_63: Closure = Closure {
    block: 6,
    weights: &[
        (13649, 43200),
        (12013, 8640),
        (2711, 4320),
        (5359, 4320),
        (7877, 8640),
        (43801, 43200),
    ],
    upper: &[
        &[
            (104009, 172800),
            (30443, 259200),
            (-33311, 86400),
            (5621, 28800),
            (-601, 20736),
        ],
        &[(-311, 51840), (6743, 5760), (-24337, 34560), (36661, 259200)],
        &[(-2231, 5184), (41287, 51840), (-7333, 28800)],
        &[(4147, 17280), (25427, 259200)],
        &[(342523, 518400)],
        &[],
    ],
    interior: &[(3, 4), (-3, 20), (1, 60)],
};

pub(crate) fn closure(order: u32) -> Option<&'static Closure> {
    match order {
        2 => Some(&SBP_21),
        4 => Some(&SBP_42),
        6 => Some(&SBP_63),
        _ => None,
    }
}
