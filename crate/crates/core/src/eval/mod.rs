//! Performance measurement: NMSE of reconstructed channels, sparsity sweeps,
//! the coded 16-PSK BER link and the experiment drivers.

pub mod ber;
pub mod coding;
pub mod experiments;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{CVector, Real};
use crate::sparsify::{reconstruct, Dictionary, FeedbackTag, MeasurementMatrix};

/// Mean normalized squared error with the count of skipped zero truths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nmse {
    pub value: f64,
    pub used: usize,
    /// Truth vectors of zero norm, left out of the mean.
    pub skipped: usize,
}

/// `(1/P)·Σ ‖ĥ − h‖² / ‖h‖²`.
pub fn nmse<T: Real>(estimates: &[CVector<T>], truths: &[CVector<T>]) -> Result<Nmse> {
    if estimates.len() != truths.len() || truths.is_empty() {
        return Err(Error::shape(format!(
            "nmse needs equally many estimates and truths (>= 1), got {} and {}",
            estimates.len(),
            truths.len()
        )));
    }
    let mut sum = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for (e, h) in estimates.iter().zip(truths) {
        if e.len() != h.len() {
            return Err(Error::shape("estimate and truth differ in length"));
        }
        let den = h.norm_squared().as_f64();
        if den == 0.0 {
            skipped += 1;
            continue;
        }
        sum += (e - h).norm_squared().as_f64() / den;
        used += 1;
    }
    if used == 0 {
        return Err(Error::param("every truth vector has zero norm"));
    }
    Ok(Nmse { value: sum / used as f64, used, skipped })
}

/// Channel vectors indexed `[user][subcarrier][frame]`.
#[derive(Debug, Clone)]
pub struct VectorSet<T: Real> {
    pub vectors: Vec<Vec<Vec<CVector<T>>>>,
}

impl<T: Real> VectorSet<T> {
    pub fn users(&self) -> usize {
        self.vectors.len()
    }

    pub fn subcarriers(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn frames(&self) -> usize {
        self.vectors.first().and_then(|u| u.first()).map_or(0, Vec::len)
    }

    pub fn get(&self, user: usize, subcarrier: usize) -> &[CVector<T>] {
        &self.vectors[user][subcarrier]
    }
}

/// A dictionary for every `(user, subcarrier)`: one shared or one each.
#[derive(Debug, Clone)]
pub enum DictionarySet<T: Real> {
    Shared(Dictionary<T>),
    PerSubcarrier(BTreeMap<(usize, usize), Dictionary<T>>),
}

impl<T: Real> DictionarySet<T> {
    pub fn get(&self, user: usize, subcarrier: usize) -> Result<&Dictionary<T>> {
        match self {
            DictionarySet::Shared(d) => Ok(d),
            DictionarySet::PerSubcarrier(m) => m
                .get(&(user, subcarrier))
                .ok_or_else(|| Error::Protocol(format!("no dictionary for user {user}, subcarrier {subcarrier}"))),
        }
    }
}

/// Per-`(user, subcarrier)` and overall NMSE of one dictionary set.
#[derive(Debug, Clone, PartialEq)]
pub struct NmseBreakdown {
    pub per_link: BTreeMap<(usize, usize), f64>,
    /// Mean over every test vector of every user and subcarrier.
    pub overall: f64,
    pub skipped: usize,
}

/// Compresses and reconstructs every test vector.
pub fn evaluate_dictionary<T: Real>(
    dicts: &DictionarySet<T>,
    test: &VectorSet<T>,
    phi: &MeasurementMatrix<T>,
    sparsity: usize,
) -> Result<NmseBreakdown> {
    let links: Vec<(usize, usize)> =
        (0..test.users()).flat_map(|k| (0..test.subcarriers()).map(move |l| (k, l))).collect();
    let results = links
        .par_iter()
        .map(|&(k, l)| {
            let dict = dicts.get(k, l)?;
            let truths = test.get(k, l);
            let estimates = truths
                .iter()
                .enumerate()
                .map(|(f, h)| {
                    let fb = phi.compress(h, dict, FeedbackTag { user: k, subcarrier: l, frame: f })?;
                    Ok(reconstruct(&fb, phi, dict, sparsity)?.estimate)
                })
                .collect::<Result<Vec<_>>>()?;
            let per = nmse(&estimates, truths)?;
            Ok(((k, l), per))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut per_link = BTreeMap::new();
    let (mut sum, mut used, mut skipped) = (0.0, 0usize, 0usize);
    for (key, v) in results {
        per_link.insert(key, v.value);
        sum += v.value * v.used as f64;
        used += v.used;
        skipped += v.skipped;
    }
    Ok(NmseBreakdown { per_link, overall: sum / used as f64, skipped })
}

/// One line of an NMSE table. `None` subcarrier/user means the mean over all.
#[derive(Debug, Clone, PartialEq)]
pub struct NmseRow {
    pub experiment: String,
    pub dictionary: String,
    pub sparsity: usize,
    pub subcarrier: Option<usize>,
    pub user: Option<usize>,
    pub nmse: f64,
}

/// A dictionary set to evaluate at one sparsity.
#[derive(Debug, Clone)]
pub struct SweepEntry<T: Real> {
    pub label: String,
    pub sparsity: usize,
    pub dictionaries: DictionarySet<T>,
}

/// Evaluates every entry; emits one overall row per entry followed by the
/// per-link rows.
pub fn nmse_sweep<T: Real>(
    experiment: &str,
    entries: &[SweepEntry<T>],
    test: &VectorSet<T>,
    phi: &MeasurementMatrix<T>,
) -> Result<Vec<NmseRow>> {
    let mut rows = Vec::new();
    for e in entries {
        let b = evaluate_dictionary(&e.dictionaries, test, phi, e.sparsity)?;
        rows.push(NmseRow {
            experiment: experiment.to_string(),
            dictionary: e.label.clone(),
            sparsity: e.sparsity,
            subcarrier: None,
            user: None,
            nmse: b.overall,
        });
        for (&(k, l), &v) in &b.per_link {
            rows.push(NmseRow {
                experiment: experiment.to_string(),
                dictionary: e.label.clone(),
                sparsity: e.sparsity,
                subcarrier: Some(l),
                user: Some(k),
                nmse: v,
            });
        }
    }
    Ok(rows)
}

/// CSV `experiment,dictionary,sparsity,subcarrier,user,nmse` with one-based
/// indices and `all` for aggregates.
pub fn write_nmse_csv<W: Write>(w: &mut W, rows: &[NmseRow]) -> Result<()> {
    writeln!(w, "experiment,dictionary,sparsity,subcarrier,user,nmse")?;
    let idx = |v: Option<usize>| v.map_or_else(|| "all".to_string(), |i| (i + 1).to_string());
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{:.12e}",
            r.experiment,
            r.dictionary,
            r.sparsity,
            idx(r.subcarrier),
            idx(r.user),
            r.nmse
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_normal, stream};
    use num_complex::Complex;
    use proptest::prelude::*;

    fn random_vectors(seed: u64, count: usize, n: usize) -> Vec<CVector<f64>> {
        let mut rng = stream(seed, "nmse", &[]);
        (0..count).map(|_| CVector::from_fn(n, |_, _| complex_normal(&mut rng))).collect()
    }

    #[test]
    fn nmse_examples() {
        let h = random_vectors(1, 5, 4);
        assert_eq!(nmse(&h, &h).unwrap().value, 0.0);
        let zeros: Vec<_> = h.iter().map(|v| v.map(|_| Complex::new(0.0, 0.0))).collect();
        assert!((nmse(&zeros, &h).unwrap().value - 1.0).abs() < 1e-15);
        let doubled: Vec<_> = h.iter().map(|v| v * Complex::new(2.0, 0.0)).collect();
        assert!((nmse(&doubled, &h).unwrap().value - 1.0).abs() < 1e-14);
        assert!(nmse(&h[..2], &h).is_err());
    }

    #[test]
    fn zero_truths_are_skipped_and_flagged() {
        let mut h = random_vectors(2, 3, 4);
        h[1] = CVector::zeros(4);
        let est = random_vectors(3, 3, 4);
        let r = nmse(&est, &h).unwrap();
        assert_eq!((r.used, r.skipped), (2, 1));
        assert!(nmse(&est[..1], &h[1..2]).is_err());
    }

    #[test]
    fn lossless_regime() {
        let n = 6;
        let test = VectorSet { vectors: vec![vec![random_vectors(4, 10, n)]] };
        let phi = MeasurementMatrix::from_matrix(
            crate::CMatrix::<f64>::from_fn(n, n, |i, j| {
                let mut rng = stream(5, "phi", &[i as u64, j as u64]);
                complex_normal(&mut rng)
            }),
            5,
        );
        let dft = DictionarySet::Shared(Dictionary::dft(n).unwrap());
        let b = evaluate_dictionary(&dft, &test, &phi, n).unwrap();
        assert!(b.overall <= 1e-10, "{}", b.overall);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            NmseRow { experiment: "e".into(), dictionary: "dft".into(), sparsity: 2, subcarrier: None, user: None, nmse: 0.5 },
            NmseRow { experiment: "e".into(), dictionary: "dft".into(), sparsity: 2, subcarrier: Some(0), user: Some(1), nmse: 0.25 },
        ];
        let mut buf = Vec::new();
        write_nmse_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "experiment,dictionary,sparsity,subcarrier,user,nmse\ne,dft,2,all,all,5.000000000000e-1\ne,dft,2,1,2,2.500000000000e-1\n"
        );
    }

    proptest! {
        #[test]
        fn nmse_is_scale_invariant(seed in 0u64..1000, re in 0.1f64..10.0, im in -10.0f64..10.0) {
            let h = random_vectors(seed, 4, 5);
            let e = random_vectors(seed + 7, 4, 5);
            let a = Complex::new(re, im);
            let hs: Vec<_> = h.iter().map(|v| v * a).collect();
            let es: Vec<_> = e.iter().map(|v| v * a).collect();
            let x = nmse(&e, &h).unwrap().value;
            let y = nmse(&es, &hs).unwrap().value;
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
    }
}
