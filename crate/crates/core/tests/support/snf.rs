//! Smith normal form against two oracles: a plain elementary-operation
//! reduction in machine integers, and determinantal divisors. The k-th
//! invariant factor is `d_k / d_(k-1)`, where `d_k` is the gcd of all k×k
//! minors; that characterisation shares nothing with elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tiltcert::algebra::{smith_normal_form, IntegerMatrix};

/// Laplace expansion along the first row.
fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .filter(|&j| m[0][j] != 0)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect()).collect()
}

/// Invariant factors, zeros included, of length `min(rows, cols)`.
pub fn invariant_factors(m: &[Vec<i64>]) -> Vec<i128> {
    let (rows, cols) = (m.len(), m[0].len());
    let mut divisors = vec![1i128];
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for r in subsets(rows, k) {
            for c in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = r.iter().map(|&i| c.iter().map(|&j| m[i][j] as i128).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        divisors.push(g);
    }
    (1..divisors.len()).map(|k| if divisors[k] == 0 { 0 } else { divisors[k] / divisors[k - 1] }).collect()
}

/// Diagonal reached by repeatedly moving a smallest entry to the pivot and
/// clearing its row and column with truncated quotients.
pub fn elementary_diagonal(m: &[Vec<i64>]) -> Vec<i128> {
    let (rows, cols) = (m.len(), m[0].len());
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) =
                (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j))).filter(|&(i, j)| a[i][j] != 0).min_by_key(|&(i, j)| a[i][j].abs())
            else {
                break;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for i in t + 1..rows {
                let q = a[i][t] / a[t][t];
                for j in t..cols {
                    a[i][j] -= q * a[t][j];
                }
            }
            for j in t + 1..cols {
                let q = a[t][j] / a[t][t];
                for row in a.iter_mut() {
                    row[j] -= q * row[t];
                }
            }
            if (t + 1..rows).any(|i| a[i][t] != 0) || (t + 1..cols).any(|j| a[t][j] != 0) {
                continue;
            }
            match (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % a[t][t] != 0)) {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        a[t][t] = a[t][t].abs();
    }
    (0..rows.min(cols)).map(|i| a[i][i]).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
    // Sparse and low-rank matrices exercise the zero and divisibility cases.
    let density = rng.gen_range(0.2..=1.0);
    let mut m: Vec<Vec<i64>> =
        (0..rows).map(|_| (0..cols).map(|_| if rng.gen_bool(density) { rng.gen_range(-9..=9) } else { 0 }).collect()).collect();
    if rows > 1 && rng.gen_bool(0.2) {
        let (a, b) = (rng.gen_range(0..rows), rng.gen_range(0..rows));
        let k = rng.gen_range(-2..=2);
        m[a] = m[b].iter().map(|x| k * x).collect();
    }
    m
}

/// Why `m` fails, if it does.
pub fn check(m: &[Vec<i64>]) -> Result<(), String> {
    let im = IntegerMatrix::from_rows(m);
    let snf = smith_normal_form(&im);
    if snf.u.mul(&im).mul(&snf.v) != snf.d {
        return Err("d != u·m·v".into());
    }
    if !snf.u.is_unimodular() || !snf.v.is_unimodular() {
        return Err("transform not unimodular".into());
    }
    if !snf.d.is_diagonal() {
        return Err("not diagonal".into());
    }
    let got: Vec<BigInt> = snf.diagonal();
    let elementary: Vec<BigInt> = elementary_diagonal(m).into_iter().map(BigInt::from).collect();
    if got != elementary {
        return Err(format!("diagonal {got:?}, elementary operations give {elementary:?}"));
    }
    let minors: Vec<BigInt> = invariant_factors(m).into_iter().map(BigInt::from).collect();
    if got != minors {
        return Err(format!("diagonal {got:?}, determinantal divisors give {minors:?}"));
    }
    Ok(())
}

/// Failing matrices among `trials` random ones.
pub fn failures(trials: usize, seed: u64) -> Vec<(Vec<Vec<i64>>, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .filter_map(|_| {
            let m = random_matrix(&mut rng);
            check(&m).err().map(|e| (m, e))
        })
        .collect()
}
