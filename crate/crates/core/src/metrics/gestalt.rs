//! Gestalt (Ratcliff/Obershelp) pattern-matching similarity.
//!
//! `similarity = 2M / (|a| + |b|)` where `M` counts the characters matched by
//! taking the longest common substring, then recursing on the unmatched
//! pieces to its left and to its right.
//!
//! Equal-length candidates are resolved leftmost in `a`, then leftmost in `b`.
//! With that rule the recursion is order sensitive in rare tie cases, so `M`
//! is taken as the larger of the two directed counts, which keeps the
//! similarity symmetric.

/// Similarity over Unicode scalar values. Two empty strings score 1.
pub fn gestalt_similarity(a: &str, b: &str) -> f64 {
    if a.is_ascii() && b.is_ascii() {
        let (a, b) = (a.as_bytes(), b.as_bytes());
        if a.len() <= WORD_BITS && b.len() <= WORD_BITS {
            let total = a.len() + b.len();
            if total == 0 {
                return 1.0;
            }
            return 2.0 * ascii_matches(a, b) as f64 / total as f64;
        }
        return sequence_similarity(a, b);
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    sequence_similarity(&a, &b)
}

pub fn sequence_similarity<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * matching_characters(a, b) as f64 / total as f64
}

/// Similarity of two records compared whole: fields are joined in their
/// given order with ` | `, so both sides must list fields in the same order.
pub fn record_similarity<S: AsRef<str>>(truth: &[S], predicted: &[S]) -> f64 {
    let join = |fields: &[S]| {
        fields
            .iter()
            .map(AsRef::as_ref)
            .collect::<Vec<_>>()
            .join(" | ")
    };
    gestalt_similarity(&join(truth), &join(predicted))
}

/// Symmetric match count: `max(M(a, b), M(b, a))`.
pub fn matching_characters<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.len() <= WORD_BITS && b.len() <= WORD_BITS {
        return bit_matches(a, b);
    }
    let mut row = Vec::with_capacity(a.len().max(b.len()) + 1);
    let ab = directed_matches(a, b, &mut row);
    let ba = directed_matches(b, a, &mut row);
    ab.max(ba)
}

/// Match count of the recursive decomposition anchored on `a`.
pub fn directed_matches<T: PartialEq>(a: &[T], b: &[T], row: &mut Vec<usize>) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (i, j, len) = longest_common_substring(a, b, row);
    if len == 0 {
        return 0;
    }
    len + directed_matches(&a[..i], &b[..j], row)
        + directed_matches(&a[i + len..], &b[j + len..], row)
}

/// `(start in a, start in b, length)` of the longest common substring.
/// The first maximum in row-major order over end positions wins, which is
/// leftmost in `a`, then leftmost in `b`.
fn longest_common_substring<T: PartialEq>(
    a: &[T],
    b: &[T],
    row: &mut Vec<usize>,
) -> (usize, usize, usize) {
    row.clear();
    row.resize(b.len() + 1, 0);
    let (mut best_len, mut best_i, mut best_j) = (0, 0, 0);
    for (i, x) in a.iter().enumerate() {
        // `diag` holds the previous row's value at j - 1
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let above = row[j + 1];
            let len = if x == y { diag + 1 } else { 0 };
            row[j + 1] = len;
            diag = above;
            if len > best_len {
                best_len = len;
                best_i = i;
                best_j = j;
            }
        }
    }
    if best_len == 0 {
        (0, 0, 0)
    } else {
        (best_i + 1 - best_len, best_j + 1 - best_len, best_len)
    }
}

const WORD_BITS: usize = u64::BITS as usize;

// The bit-parallel path keeps bit `j` of `rows[i]` and bit `i` of `cols[j]`
// set exactly when `a[i] == b[j]`. Inputs are at most 64 items long.

fn bit_matches<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut rows = [0u64; WORD_BITS];
    let mut cols = [0u64; WORD_BITS];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let eq = (x == y) as u64;
            rows[i] |= eq << j;
            cols[j] |= eq << i;
        }
    }
    symmetric_bits(&rows, &cols, a.len(), b.len())
}

/// Byte inputs below 128: each row is the position set of its byte.
fn ascii_matches(a: &[u8], b: &[u8]) -> usize {
    let mut rows = [0u64; WORD_BITS];
    let mut cols = [0u64; WORD_BITS];
    let mut positions = [0u64; 128];
    for (j, &y) in b.iter().enumerate() {
        positions[y as usize] |= 1 << j;
    }
    for (row, &x) in rows.iter_mut().zip(a) {
        *row = positions[x as usize];
    }
    for &y in b {
        positions[y as usize] = 0;
    }
    for (i, &x) in a.iter().enumerate() {
        positions[x as usize] |= 1 << i;
    }
    for (col, &y) in cols.iter_mut().zip(b) {
        *col = positions[y as usize];
    }
    symmetric_bits(&rows, &cols, a.len(), b.len())
}

/// When every block the forward recursion picks is the only longest one in
/// its range, the reverse recursion picks the same blocks, so it is skipped.
fn symmetric_bits(rows: &[u64], cols: &[u64], len_a: usize, len_b: usize) -> usize {
    let (ab, unique) = directed_bits(rows, 0, len_a, 0, len_b);
    if unique {
        return ab;
    }
    ab.max(directed_bits(cols, 0, len_b, 0, len_a).0)
}

fn low_bits(width: usize) -> u64 {
    if width == WORD_BITS {
        u64::MAX
    } else {
        (1 << width) - 1
    }
}

/// Directed match count of the block `masks[lo..hi]`, bits `clo..chi`, and
/// whether every chosen block was the unique longest one.
fn directed_bits(masks: &[u64], lo: usize, hi: usize, clo: usize, chi: usize) -> (usize, bool) {
    if lo >= hi || clo >= chi {
        return (0, true);
    }
    let found = longest_bits(masks, lo, hi, clo, chi);
    if found.len == 0 {
        return (0, true);
    }
    let (i, j, len) = (found.i, found.j, found.len);
    let (left, left_unique) = directed_bits(masks, lo, lo + i, clo, clo + j);
    let (right, right_unique) = directed_bits(masks, lo + i + len, hi, clo + j + len, chi);
    (
        len + left + right,
        found.unique && left_unique && right_unique,
    )
}

struct Block {
    i: usize,
    j: usize,
    len: usize,
    unique: bool,
}

/// Same contract as `longest_common_substring` on the block. For a start
/// row `i`, `run` holds bit `j` while the items from `(i, j)` on still
/// match, so the first start row reaching a length wins.
fn longest_bits(masks: &[u64], lo: usize, hi: usize, clo: usize, chi: usize) -> Block {
    if (hi - lo) * (chi - clo) <= WORD_BITS {
        return longest_packed(masks, lo, hi, clo, chi);
    }
    let window = low_bits(chi - clo);
    let row = |i: usize| (masks[lo + i] >> clo) & window;
    let height = hi - lo;
    let mut best = Block {
        i: 0,
        j: 0,
        len: 0,
        unique: true,
    };
    for i in 0..height {
        if height - i < best.len {
            break;
        }
        let mut run = row(i);
        let mut len = 0;
        let mut start = 0;
        while run != 0 {
            start = run;
            len += 1;
            if i + len == height {
                break;
            }
            run &= row(i + len) >> len;
        }
        if len > best.len {
            best = Block {
                i,
                j: start.trailing_zeros() as usize,
                len,
                unique: start.count_ones() == 1,
            };
        } else if len == best.len {
            best.unique = false;
        }
    }
    best
}

/// Small blocks as one word, bit `i * width + j` for cell `(i, j)`. After
/// `len` steps `run` holds the starts of all common runs of that length; a
/// shift by `width + 1` moves one cell down the diagonal and `columns`
/// drops starts whose run would wrap past the last column.
fn longest_packed(masks: &[u64], lo: usize, hi: usize, clo: usize, chi: usize) -> Block {
    let (height, width) = (hi - lo, chi - clo);
    let window = low_bits(width);
    let (mut cells, mut row_starts) = (0u64, 0u64);
    for i in 0..height {
        cells |= ((masks[lo + i] >> clo) & window) << (i * width);
        row_starts |= 1 << (i * width);
    }
    if cells == 0 {
        return Block {
            i: 0,
            j: 0,
            len: 0,
            unique: true,
        };
    }
    let mut run = cells;
    let mut len = 1;
    while len < height.min(width) {
        let shift = len * (width + 1);
        if shift >= WORD_BITS {
            break;
        }
        let columns = low_bits(width - len) * row_starts;
        let next = run & (cells >> shift) & columns;
        if next == 0 {
            break;
        }
        run = next;
        len += 1;
    }
    let first = run.trailing_zeros() as usize;
    Block {
        i: first / width,
        j: first % width,
        len,
        unique: run.count_ones() == 1,
    }
}
