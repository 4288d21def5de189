//! Drivers for the four experiments: single-UE dictionary comparison,
//! per-subcarrier comparison, multi-UE comparison and the coded BER link.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::ber::{ber_link_sim, BerCurve, BerOptions, PrecoderSource};
use super::{nmse_sweep, DictionarySet, NmseRow, SweepEntry, VectorSet};
use crate::channel::{ChannelSource, KroneckerChannel};
use crate::config::SystemConfig;
use crate::dictlearn::{self, KsvdOptions, Provenance, TrainingSet};
use crate::error::{Error, Result};
use crate::protocol::{run_cdl_framework, LearningMethod, ProtocolOptions, ProtocolTrace};
use crate::scalar::Real;
use crate::sparsify::{reconstruct, Dictionary, FeedbackTag, MeasurementMatrix, SparseVector};

/// Dictionary labels used in the NMSE tables.
pub const DFT: &str = "dft";
pub const KSVD: &str = "ksvd";
pub const CDL_OP: &str = "cdl-op";
pub const CDL_KSVD: &str = "cdl-ksvd";
pub const EXTERNAL: &str = "external";

/// Dictionaries learned from one training set at one sparsity.
#[derive(Debug, Clone)]
pub struct Learned<T: Real> {
    pub sparsity: usize,
    pub ksvd: BTreeMap<(usize, usize), Dictionary<T>>,
    pub cdl_op: Dictionary<T>,
    pub cdl_ksvd: Dictionary<T>,
}

/// Per-subcarrier K-SVD on each link's training frames, in parallel.
fn learn_per_link<T: Real>(
    training: &VectorSet<T>,
    opts: KsvdOptions,
) -> Result<Vec<((usize, usize), Dictionary<T>, Vec<SparseVector<T>>)>> {
    let links: Vec<(usize, usize)> =
        (0..training.users()).flat_map(|k| (0..training.subcarriers()).map(move |l| (k, l))).collect();
    links
        .par_iter()
        .map(|&(k, l)| {
            let vecs = training.get(k, l);
            let n = vecs[0].len();
            let signals = crate::CMatrix::from_fn(n, vecs.len(), |i, j| vecs[j][i]);
            let (dict, out) = dictlearn::learn_subcarrier_dictionary(&signals, k, l, opts)?;
            Ok(((k, l), dict, out.codes))
        })
        .collect()
}

fn common_from<T: Real>(
    set: TrainingSet<T>,
    sparsity: usize,
    ksvd: BTreeMap<(usize, usize), Dictionary<T>>,
    opts: KsvdOptions,
) -> Result<Learned<T>> {
    let cdl_op = dictlearn::cdl_op_training(&set)?.dictionary;
    let (cdl_ksvd, _) = dictlearn::cdl_ksvd(&set, opts, None)?;
    Ok(Learned { sparsity, ksvd, cdl_op, cdl_ksvd })
}

/// Learning at the UE from true channels: per-subcarrier K-SVD, then the
/// common dictionaries from the pooled vectors and their K-SVD codes.
pub fn learn_at_ue<T: Real>(training: &VectorSet<T>, opts: KsvdOptions) -> Result<Learned<T>> {
    let per_link = learn_per_link(training, opts)?;
    let mut codes = vec![vec![Vec::new(); training.subcarriers()]; training.users()];
    let mut ksvd = BTreeMap::new();
    for ((k, l), dict, c) in per_link {
        codes[k][l] = c;
        ksvd.insert((k, l), dict);
    }
    let set = TrainingSet::from_blocks(&training.vectors, Some(&codes), Provenance::TrueChannels)?;
    common_from(set, opts.sparsity, ksvd, opts)
}

/// Learning at the BS: UEs learn per-subcarrier K-SVD from `training`, then
/// the BS reconstructs `feedback_frames` with them and learns the common
/// dictionaries from its reconstructions.
pub fn learn_at_bs<T: Real>(
    training: &VectorSet<T>,
    feedback_frames: &VectorSet<T>,
    phi: &MeasurementMatrix<T>,
    opts: KsvdOptions,
) -> Result<Learned<T>> {
    let per_link = learn_per_link(training, opts)?;
    let ksvd: BTreeMap<_, _> = per_link.into_iter().map(|(key, d, _)| (key, d)).collect();
    let links: Vec<(usize, usize)> = ksvd.keys().copied().collect();
    let recon = links
        .par_iter()
        .map(|&(k, l)| {
            let dict = &ksvd[&(k, l)];
            feedback_frames
                .get(k, l)
                .iter()
                .enumerate()
                .map(|(f, h)| {
                    let fb = phi.compress(h, dict, FeedbackTag { user: k, subcarrier: l, frame: f })?;
                    let r = reconstruct(&fb, phi, dict, opts.sparsity)?;
                    Ok((r.estimate, r.code))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut est = vec![vec![Vec::new(); training.subcarriers()]; training.users()];
    let mut codes = vec![vec![Vec::new(); training.subcarriers()]; training.users()];
    for (&(k, l), pairs) in links.iter().zip(recon) {
        for (e, c) in pairs {
            est[k][l].push(e);
            codes[k][l].push(c);
        }
    }
    let set = TrainingSet::from_blocks(&est, Some(&codes), Provenance::ReconstructedAtBs)?;
    common_from(set, opts.sparsity, ksvd, opts)
}

/// Draws consecutive frame blocks of the given lengths from the config's
/// channel.
pub fn draw_blocks<T: Real>(config: &SystemConfig, lengths: &[usize]) -> Result<Vec<VectorSet<T>>> {
    let mut src = KroneckerChannel::<T>::from_config(config)?;
    let (users, subcarriers) = (src.users(), src.subcarriers());
    let mut out = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let mut vectors = vec![vec![Vec::with_capacity(len); subcarriers]; users];
        for _ in 0..len {
            for r in src.next_frame()? {
                for (l, v) in r.vectors.into_iter().enumerate() {
                    vectors[r.user][l].push(v);
                }
            }
        }
        out.push(VectorSet { vectors });
    }
    Ok(out)
}

/// `{2, 4, …, N_g/2}` when that has at least four points, else
/// `{1, …, N_g/2}`.
pub fn default_sparsity_grid(measurement_rows: usize) -> Vec<usize> {
    let top = measurement_rows / 2;
    if top >= 8 {
        (2..=top).step_by(2).collect()
    } else {
        (1..=top.max(1)).collect()
    }
}

/// Measurement matrix of an NMSE sweep. Sweeps reach `S = N_g/2`, so the
/// strict `N_g > 2S` check is not applied here.
pub fn sweep_measurement<T: Real>(config: &SystemConfig) -> Result<MeasurementMatrix<T>> {
    MeasurementMatrix::gaussian(config.rng_seed, config.measurement_rows, config.vector_len())
}

#[derive(Debug, Clone)]
pub struct SweepOptions<T: Real> {
    pub sparsities: Vec<usize>,
    /// Evaluated alongside the learned dictionaries.
    pub external: Option<Dictionary<T>>,
    pub ksvd_max_iters: usize,
}

impl<T: Real> SweepOptions<T> {
    pub fn for_config(config: &SystemConfig) -> Self {
        SweepOptions {
            sparsities: default_sparsity_grid(config.measurement_rows),
            external: None,
            ksvd_max_iters: KsvdOptions::new(1).max_iters,
        }
    }

    fn ksvd(&self, sparsity: usize) -> KsvdOptions {
        KsvdOptions { max_iters: self.ksvd_max_iters, ..KsvdOptions::new(sparsity) }
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone)]
pub struct ExperimentOutput<T: Real> {
    pub nmse: Vec<NmseRow>,
    pub ber: Vec<BerCurve>,
    /// Learned common dictionaries by file stem.
    pub dictionaries: Vec<(String, Dictionary<T>)>,
    pub trace: Option<ProtocolTrace<T>>,
}

impl<T: Real> Default for ExperimentOutput<T> {
    fn default() -> Self {
        ExperimentOutput { nmse: Vec::new(), ber: Vec::new(), dictionaries: Vec::new(), trace: None }
    }
}

fn check_sparsities(grid: &[usize], config: &SystemConfig) -> Result<()> {
    let n = config.vector_len();
    if grid.is_empty() {
        return Err(Error::param("sparsity grid is empty"));
    }
    for &s in grid {
        if s == 0 || s >= n || s > config.measurement_rows {
            return Err(Error::param(format!(
                "sparsity {s} outside 1..=min(N_g, n-1) = 1..={}",
                config.measurement_rows.min(n - 1)
            )));
        }
    }
    Ok(())
}

fn entries<T: Real>(learned: &Learned<T>, external: Option<&Dictionary<T>>) -> Result<Vec<SweepEntry<T>>> {
    let s = learned.sparsity;
    let mut out = vec![
        SweepEntry { label: DFT.into(), sparsity: s, dictionaries: DictionarySet::Shared(Dictionary::dft(learned.cdl_op.dim())?) },
        SweepEntry { label: KSVD.into(), sparsity: s, dictionaries: DictionarySet::PerSubcarrier(learned.ksvd.clone()) },
        SweepEntry { label: CDL_OP.into(), sparsity: s, dictionaries: DictionarySet::Shared(learned.cdl_op.clone()) },
        SweepEntry { label: CDL_KSVD.into(), sparsity: s, dictionaries: DictionarySet::Shared(learned.cdl_ksvd.clone()) },
    ];
    if let Some(d) = external {
        out.push(SweepEntry { label: EXTERNAL.into(), sparsity: s, dictionaries: DictionarySet::Shared(d.clone()) });
    }
    Ok(out)
}

fn keep_dicts<T: Real>(out: &mut ExperimentOutput<T>, learned: &Learned<T>) {
    let s = learned.sparsity;
    out.dictionaries.push((format!("cdl_op_s{s}"), learned.cdl_op.clone()));
    out.dictionaries.push((format!("cdl_ksvd_s{s}"), learned.cdl_ksvd.clone()));
}

/// UE-side learning and sweep over the grid on `P` test frames after the
/// `N` training frames. Returns every row.
fn single_ue_sweep<T: Real>(
    name: &str,
    config: &SystemConfig,
    opts: &SweepOptions<T>,
) -> Result<ExperimentOutput<T>> {
    if config.users != 1 {
        return Err(Error::param(format!("{name} is a single-UE experiment, got K = {}", config.users)));
    }
    check_sparsities(&opts.sparsities, config)?;
    let blocks = draw_blocks::<T>(config, &[config.training_frames, config.test_vectors])?;
    let phi = sweep_measurement::<T>(config)?;
    let mut out = ExperimentOutput::default();
    for &s in &opts.sparsities {
        let learned = learn_at_ue(&blocks[0], opts.ksvd(s))?;
        out.nmse.extend(nmse_sweep(name, &entries(&learned, opts.external.as_ref())?, &blocks[1], &phi)?);
        keep_dicts(&mut out, &learned);
    }
    Ok(out)
}

/// Single UE: all dictionaries against sparsity; overall mean and
/// subcarrier 1.
pub fn exp1_single_ue_compare<T: Real>(config: &SystemConfig, opts: &SweepOptions<T>) -> Result<ExperimentOutput<T>> {
    let mut out = single_ue_sweep("exp1_single_ue_compare", config, opts)?;
    out.nmse.retain(|r| r.subcarrier.is_none() || r.subcarrier == Some(0));
    Ok(out)
}

/// Single UE: per-subcarrier K-SVD against the common dictionaries on
/// subcarriers 1 and 8.
pub fn exp2_subcarrier_compare<T: Real>(config: &SystemConfig, opts: &SweepOptions<T>) -> Result<ExperimentOutput<T>> {
    let mut out = single_ue_sweep("exp2_subcarrier_compare", config, opts)?;
    let eighth = 7.min(config.subcarriers - 1);
    out.nmse.retain(|r| matches!(r.subcarrier, Some(l) if l == 0 || l == eighth) && r.dictionary != DFT);
    Ok(out)
}

/// `K` users: BS-side learning from reconstructions of frames `N+1..2N`,
/// tested on `P` frames after `2N`; overall mean and subcarrier 1 of every
/// user. Also runs the protocol once at `config.sparsity` (CDL-OP) and
/// returns its trace.
pub fn exp3_multi_ue<T: Real>(config: &SystemConfig, opts: &SweepOptions<T>) -> Result<ExperimentOutput<T>> {
    check_sparsities(&opts.sparsities, config)?;
    let n = config.training_frames;
    let blocks = draw_blocks::<T>(config, &[n, n, config.test_vectors])?;
    let phi = sweep_measurement::<T>(config)?;
    let mut out = ExperimentOutput::default();
    for &s in &opts.sparsities {
        let learned = learn_at_bs(&blocks[0], &blocks[1], &phi, opts.ksvd(s))?;
        let rows = nmse_sweep("exp3_multi_ue", &entries(&learned, opts.external.as_ref())?, &blocks[2], &phi)?;
        out.nmse.extend(rows.into_iter().filter(|r| r.subcarrier.is_none() || r.subcarrier == Some(0)));
        keep_dicts(&mut out, &learned);
    }
    let mut proto_cfg = config.clone();
    proto_cfg.total_frames = 2 * n + config.test_vectors;
    let mut src = KroneckerChannel::<T>::from_config(&proto_cfg)?;
    let mut popts = ProtocolOptions::new(LearningMethod::CdlOp, config.sparsity);
    popts.ksvd.max_iters = opts.ksvd_max_iters;
    out.trace = Some(run_cdl_framework(&proto_cfg, &mut src, &popts)?.trace);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BerExperimentOptions<T: Real> {
    pub compression_factors: Vec<u64>,
    pub ber: BerOptions,
    /// Used instead of the learned CDL-OP dictionary when set.
    pub external: Option<Dictionary<T>>,
    pub ksvd_max_iters: usize,
}

/// Coded BER on subcarrier 1 of a single-antenna UE: true-channel precoder
/// and CDL-OP estimates at each `g` (`N_g = n/g`, learned at `S = N_g/2`).
pub fn exp4_ber<T: Real>(config: &SystemConfig, opts: &BerExperimentOptions<T>) -> Result<ExperimentOutput<T>> {
    if config.users != 1 || config.rx_antennas != 1 {
        return Err(Error::param("the BER experiment needs K = 1 and N_r = 1"));
    }
    let n = config.vector_len();
    let blocks = draw_blocks::<T>(config, &[config.training_frames, config.test_vectors])?;
    let channels: Vec<_> = blocks[1].get(0, 0).to_vec();
    let mut sources = vec![PrecoderSource { label: "true".into(), g: 1, estimates: channels.clone() }];
    let mut out = ExperimentOutput::default();
    for &g in &opts.compression_factors {
        if g < 2 || n % g as usize != 0 {
            return Err(Error::param(format!("compression factor g = {g} must be >= 2 and divide n = {n}")));
        }
        let rows = n / g as usize;
        let s = (rows / 2).max(1);
        let phi = MeasurementMatrix::<T>::gaussian(config.rng_seed, rows, n)?;
        let dict = match &opts.external {
            Some(d) => d.clone(),
            None => {
                let ks = KsvdOptions { max_iters: opts.ksvd_max_iters, ..KsvdOptions::new(s) };
                let learned = learn_at_ue(&blocks[0], ks)?;
                out.dictionaries.push((format!("cdl_op_g{g}_s{s}"), learned.cdl_op.clone()));
                learned.cdl_op
            }
        };
        let estimates = channels
            .iter()
            .enumerate()
            .map(|(f, h)| {
                let fb = phi.compress(h, &dict, FeedbackTag { user: 0, subcarrier: 0, frame: f })?;
                Ok(reconstruct(&fb, &phi, &dict, s)?.estimate)
            })
            .collect::<Result<Vec<_>>>()?;
        sources.push(PrecoderSource { label: "cdl_op".into(), g, estimates });
    }
    out.ber = ber_link_sim(&channels, &sources, &opts.ber)?;
    Ok(out)
}
