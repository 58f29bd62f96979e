use std::io::Write;

use dtf_core::data::{
    copula_total_correlation, gen_copula, gen_eight_gaussian, load_csv, solve_gap, CopulaSpec,
    EightGaussianSpec,
};

/// `−½ ln det R` from the dense cycle precision `I − wA`, by Gauss-Jordan
/// inversion.
fn dense_total_correlation(d: usize, w: f64) -> f64 {
    let mut m = vec![vec![0.0; 2 * d]; d];
    for i in 0..d {
        m[i][i] = 1.0;
        m[i][(i + 1) % d] -= w;
        m[i][(i + d - 1) % d] -= w;
        m[i][d + i] = 1.0;
    }
    let mut log_det_precision = 0.0;
    for c in 0..d {
        let pivot = (c..d).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, pivot);
        let p = m[c][c];
        log_det_precision += p.abs().ln();
        for v in m[c].iter_mut() {
            *v /= p;
        }
        for r in 0..d {
            if r != c {
                let f = m[r][c];
                let row_c = m[c].clone();
                for (v, rc) in m[r].iter_mut().zip(row_c) {
                    *v -= f * rc;
                }
            }
        }
    }
    // ln det R = ln det Σ − Σ ln Σ_ii
    let log_diag: f64 = (0..d).map(|i| m[i][d + i].ln()).sum();
    -0.5 * (-log_det_precision - log_diag)
}

#[test]
fn closed_form_matches_dense_algebra() {
    for d in [3, 4, 5, 6] {
        for w in [0.0, 0.1, 0.3, 0.45, 0.49] {
            let gap = 1.0 - 2.0 * w;
            let closed = copula_total_correlation(d, gap);
            let dense = dense_total_correlation(d, w);
            assert!((closed - dense).abs() < 1e-9, "d={d} w={w}: {closed} vs {dense}");
        }
    }
}

#[test]
fn bisection_reaches_each_level() {
    for tc in [1.0, 10.0, 100.0] {
        let gap = solve_gap(4, tc).unwrap();
        assert!((copula_total_correlation(4, gap) - tc).abs() < 1e-6);
    }
}

fn column(data: &dtf_core::CategoricalDataset, j: usize) -> Vec<f64> {
    data.rows().map(|r| r[j] as f64).collect()
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / n;
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>() / n;
    cov / (va * vb).sqrt()
}

#[test]
fn marginals_follow_the_bernoulli_parameters() {
    for tc in [0.0, 1.0, 100.0] {
        let spec = CopulaSpec {
            target_total_correlation: tc,
            seed: 12,
            ..Default::default()
        };
        let (train, test) = gen_copula(&spec).unwrap();
        assert_eq!(train.cardinalities(), &[2, 2, 2, 2]);
        assert_eq!((train.n_rows(), test.n_rows()), (8000, 2000));
        let n = train.n_rows() as f64;
        for (j, &p) in spec.bernoulli_p.iter().enumerate() {
            let freq = column(&train, j).iter().sum::<f64>() / n;
            let se = (p * (1.0 - p) / n).sqrt();
            assert!((freq - p).abs() <= 3.0 * se, "tc={tc} feature {j}: {freq} vs {p}");
        }
    }
}

#[test]
fn zero_correlation_gives_independent_columns() {
    let spec = CopulaSpec {
        target_total_correlation: 0.0,
        seed: 1,
        ..Default::default()
    };
    let (train, _) = gen_copula(&spec).unwrap();
    for a in 0..4 {
        for b in (a + 1)..4 {
            assert!(correlation(&column(&train, a), &column(&train, b)).abs() < 0.05);
        }
    }
}

#[test]
fn strong_correlation_nearly_determines_each_column() {
    let spec = CopulaSpec {
        target_total_correlation: 100.0,
        seed: 2,
        ..Default::default()
    };
    let (train, _) = gen_copula(&spec).unwrap();
    // columns 0 and 2 share p = 0.5, so they should agree almost always
    let agree = train.rows().filter(|r| r[0] == r[2]).count() as f64 / train.n_rows() as f64;
    assert!(agree > 0.999, "{agree}");
    // mutual information of the pair is close to its entropy, ln 2
    let n = train.n_rows() as f64;
    let mut joint = [[0.0f64; 2]; 2];
    for r in train.rows() {
        joint[r[0]][r[2]] += 1.0 / n;
    }
    let pa = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let pb = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let mut mi = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            if joint[a][b] > 0.0 {
                mi += joint[a][b] * (joint[a][b] / (pa[a] * pb[b])).ln();
            }
        }
    }
    assert!(mi > 0.95 * std::f64::consts::LN_2, "{mi}");
}

#[test]
fn copula_is_reproducible() {
    let spec = CopulaSpec {
        target_total_correlation: 10.0,
        seed: 77,
        ..Default::default()
    };
    assert_eq!(gen_copula(&spec).unwrap(), gen_copula(&spec).unwrap());
    let bad = CopulaSpec {
        bernoulli_p: vec![0.5, 1.0, 0.5, 0.2],
        ..Default::default()
    };
    assert!(gen_copula(&bad).is_err());
}

#[test]
fn eight_gaussian_has_eight_modes() {
    let spec = EightGaussianSpec::default();
    let (train, test) = gen_eight_gaussian(&spec).unwrap();
    assert_eq!(train.cardinalities(), &[91, 91]);
    assert_eq!((train.n_rows(), test.n_rows()), (10_240, 2_560));
    let k = 91;
    let mut grid = vec![0usize; k * k];
    for r in train.rows().chain(test.rows()) {
        grid[r[0] * k + r[1]] += 1;
    }
    // connected components of well-populated cells
    let dense: Vec<bool> = grid.iter().map(|&c| c >= 4).collect();
    let mut label = vec![usize::MAX; k * k];
    let mut components = 0;
    let mut sizes = Vec::new();
    for start in 0..k * k {
        if !dense[start] || label[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        label[start] = components;
        let mut size = 0;
        while let Some(c) = stack.pop() {
            size += 1;
            let (i, j) = ((c / k) as i64, (c % k) as i64);
            for (di, dj) in [(0, 1), (1, 0), (0, -1), (-1, 0)] {
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 || ni >= k as i64 || nj >= k as i64 {
                    continue;
                }
                let nc = ni as usize * k + nj as usize;
                if dense[nc] && label[nc] == usize::MAX {
                    label[nc] = components;
                    stack.push(nc);
                }
            }
        }
        components += 1;
        sizes.push(size);
    }
    // stray tail cells form tiny islands; the modes are large blobs
    let modes = sizes.iter().filter(|&&s| s >= 20).count();
    assert_eq!(modes, 8, "{sizes:?}");
    // each component holds one mixture mean
    for (mx, my) in spec.means() {
        assert!(dense[spec.bin_of(mx) * k + spec.bin_of(my)]);
    }
}

#[test]
fn twenty_two_string_columns() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    let header: Vec<String> = (0..22).map(|j| format!("attr{j}")).collect();
    writeln!(f, "{}", header.join(",")).unwrap();
    for i in 0..200 {
        let row: Vec<String> = (0..22)
            .map(|j| {
                let k = 2 + (j * 5) % 11; // 2..=12 categories
                let code = (i + j) % k;
                ((b'a' + code as u8) as char).to_string()
            })
            .collect();
        writeln!(f, "{}", row.join(",")).unwrap();
    }
    let (data, enc) = load_csv(f.path(), None).unwrap();
    assert_eq!(data.n_features(), 22);
    assert_eq!(data.n_rows(), 200);
    assert_eq!(data.cardinalities().iter().max(), Some(&12));
    assert_eq!(enc.column_names.unwrap()[3], "attr3");
}
