//! The three-phase common-dictionary feedback protocol as a frame-driven
//! state machine, and the closed-form overhead accounting.

pub mod accounting;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::channel::{ChannelRealization, ChannelSource};
use crate::config::SystemConfig;
use crate::dictlearn::{self, KsvdOptions, Provenance, TrainingLayout, TrainingSet};
use crate::error::{Error, Result};
use crate::scalar::{CMatrix, CVector, Real};
use crate::sparsify::{
    gaussian_measurement, reconstruct, CompressedFeedback, DictId, Dictionary, FeedbackTag, MeasurementMatrix,
    SparseVector,
};

/// Which dictionary family is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    /// Frames `1..=N`.
    Dft,
    /// Frames `N+1..=2N`.
    Ksvd,
    /// Frames after `2N`.
    Common,
}

impl Phase {
    /// Phase of one-based `frame` for `N = training_frames`.
    pub fn of_frame(frame: usize, training_frames: usize) -> Phase {
        if frame <= training_frames {
            Phase::Dft
        } else if frame <= 2 * training_frames {
            Phase::Ksvd
        } else {
            Phase::Common
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::Dft => "dft",
            Phase::Ksvd => "ksvd",
            Phase::Common => "common",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// How the BS learns the common dictionary at frame `2N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearningMethod {
    CdlKsvd,
    CdlOp,
}

impl fmt::Display for LearningMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LearningMethod::CdlKsvd => "cdl-ksvd",
            LearningMethod::CdlOp => "cdl-op",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// UE to BS.
    Uplink,
    /// BS to UE.
    Downlink,
}

/// A dictionary crossing the (ideal) feedback link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferEvent {
    pub frame: usize,
    pub direction: Direction,
    pub user: usize,
    /// Set for per-subcarrier dictionaries.
    pub subcarrier: Option<usize>,
    pub dictionary: DictId,
    /// Complex entries carried, `n²`.
    pub payload_elements: u64,
}

/// The BS computing the common dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputationEvent {
    pub frame: usize,
    pub method: LearningMethod,
    pub dictionary: DictId,
    pub training_columns: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseBoundary {
    /// Last frame of `from`.
    pub frame: usize,
    pub from: Phase,
    pub to: Phase,
}

/// One compressed channel vector and its reconstruction error.
#[derive(Debug, Clone)]
pub struct FrameRecord<T: Real> {
    pub frame: usize,
    pub user: usize,
    pub subcarrier: usize,
    pub phase: Phase,
    pub feedback: CompressedFeedback<T>,
    /// `‖ĥ − h‖²`.
    pub nmse_num: f64,
    /// `‖h‖²`.
    pub nmse_den: f64,
    /// The precoder built from `ĥ` had zero entries replaced.
    pub precoder_flagged: bool,
}

impl<T: Real> FrameRecord<T> {
    pub fn dict_id(&self) -> DictId {
        self.feedback.dictionary
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolTrace<T: Real> {
    pub records: Vec<FrameRecord<T>>,
    pub transfers: Vec<TransferEvent>,
    pub computations: Vec<ComputationEvent>,
    pub boundaries: Vec<PhaseBoundary>,
}

impl<T: Real> ProtocolTrace<T> {
    /// Mean per-vector NMSE over the records of `phase` (zero-norm truths
    /// skipped). `None` if no record qualifies.
    pub fn mean_nmse(&self, phase: Phase) -> Option<f64> {
        let vals: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.phase == phase && r.nmse_den > 0.0)
            .map(|r| r.nmse_num / r.nmse_den)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    pub fn transfers_at(&self, frame: usize, direction: Direction) -> usize {
        self.transfers.iter().filter(|t| t.frame == frame && t.direction == direction).count()
    }

    /// CSV with header `frame,user,subcarrier,phase,dict_id,nmse_num,nmse_den`.
    /// User and subcarrier indices are one-based.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "frame,user,subcarrier,phase,dict_id,nmse_num,nmse_den")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{:.12e},{:.12e}",
                r.frame,
                r.user + 1,
                r.subcarrier + 1,
                r.phase,
                r.dict_id(),
                r.nmse_num,
                r.nmse_den
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolOptions<T: Real> {
    pub method: LearningMethod,
    /// Options of both the UE per-subcarrier K-SVD and the BS CDL-KSVD.
    pub ksvd: KsvdOptions,
    /// Initial dictionary of the BS-side CDL-KSVD (DFT when `None`).
    pub common_ksvd_init: Option<Dictionary<T>>,
}

impl<T: Real> ProtocolOptions<T> {
    pub fn new(method: LearningMethod, sparsity: usize) -> Self {
        ProtocolOptions { method, ksvd: KsvdOptions::new(sparsity), common_ksvd_init: None }
    }
}

/// Driver state between frames.
#[derive(Debug)]
pub struct ProtocolState<T: Real> {
    pub phase: Phase,
    dft: Dictionary<T>,
    /// `(user, subcarrier)` → per-subcarrier K-SVD dictionary held at the BS.
    pub registry: BTreeMap<(usize, usize), Dictionary<T>>,
    pub common: Option<Dictionary<T>>,
    /// `[user][subcarrier][frame]` true vectors at the UEs.
    ue_training: Vec<Vec<Vec<CVector<T>>>>,
    /// `[user][subcarrier][frame]` BS reconstructions and their codes.
    bs_estimates: Vec<Vec<Vec<CVector<T>>>>,
    bs_codes: Vec<Vec<Vec<SparseVector<T>>>>,
}

impl<T: Real> ProtocolState<T> {
    fn new(n: usize, users: usize, subcarriers: usize) -> Result<Self> {
        Ok(ProtocolState {
            phase: Phase::Dft,
            dft: Dictionary::dft(n)?,
            registry: BTreeMap::new(),
            common: None,
            ue_training: vec![vec![Vec::new(); subcarriers]; users],
            bs_estimates: vec![vec![Vec::new(); subcarriers]; users],
            bs_codes: vec![vec![Vec::new(); subcarriers]; users],
        })
    }

    /// Dictionary in force for `(user, subcarrier)`.
    pub fn dictionary(&self, user: usize, subcarrier: usize) -> Result<&Dictionary<T>> {
        match self.phase {
            Phase::Dft => Ok(&self.dft),
            Phase::Ksvd => self
                .registry
                .get(&(user, subcarrier))
                .ok_or_else(|| Error::Protocol(format!("no K-SVD dictionary for user {user}, subcarrier {subcarrier}"))),
            Phase::Common => self.common.as_ref().ok_or_else(|| Error::Protocol("no common dictionary".into())),
        }
    }
}

/// Everything a protocol run produces.
#[derive(Debug)]
pub struct ProtocolOutcome<T: Real> {
    pub trace: ProtocolTrace<T>,
    pub state: ProtocolState<T>,
}

/// Runs the protocol for `config.total_frames` frames drawn from `source`.
pub fn run_cdl_framework<T: Real, S: ChannelSource<T> + ?Sized>(
    config: &SystemConfig,
    source: &mut S,
    options: &ProtocolOptions<T>,
) -> Result<ProtocolOutcome<T>> {
    config.check()?;
    let n_train = config.training_frames;
    let (users, subcarriers) = (config.users, config.subcarriers);
    if source.users() != users || source.subcarriers() != subcarriers {
        return Err(Error::param(format!(
            "channel source has {} users and {} subcarriers, config has {} and {}",
            source.users(),
            source.subcarriers(),
            users,
            subcarriers
        )));
    }
    let n = config.vector_len();
    let phi: MeasurementMatrix<T> =
        gaussian_measurement(config.rng_seed, config.measurement_rows, n, config.sparsity)?;
    let mut state = ProtocolState::new(n, users, subcarriers)?;
    let mut trace = ProtocolTrace { records: Vec::new(), transfers: Vec::new(), computations: Vec::new(), boundaries: Vec::new() };
    let payload = (n as u64) * (n as u64);

    for frame in 1..=config.total_frames {
        state.phase = Phase::of_frame(frame, n_train);
        let realizations = source.next_frame()?;
        if realizations.len() != users {
            return Err(Error::param("channel source returned the wrong number of users"));
        }
        let outputs = codec_frame(&state, &phi, &realizations, frame, config.sparsity)?;
        for (rec, estimate, code, truth) in outputs {
            match state.phase {
                Phase::Dft => state.ue_training[rec.user][rec.subcarrier].push(truth),
                Phase::Ksvd => {
                    state.bs_estimates[rec.user][rec.subcarrier].push(estimate);
                    state.bs_codes[rec.user][rec.subcarrier].push(code);
                }
                Phase::Common => {}
            }
            trace.records.push(rec);
        }

        if frame == n_train {
            let jobs: Vec<(usize, usize)> =
                (0..users).flat_map(|k| (0..subcarriers).map(move |l| (k, l))).collect();
            let learned = jobs
                .par_iter()
                .map(|&(k, l)| {
                    let signals = columns(&state.ue_training[k][l]);
                    dictlearn::learn_subcarrier_dictionary(&signals, k, l, options.ksvd).map(|(d, _)| d)
                })
                .collect::<Result<Vec<_>>>()?;
            for (&(k, l), dict) in jobs.iter().zip(learned) {
                trace.transfers.push(TransferEvent {
                    frame,
                    direction: Direction::Uplink,
                    user: k,
                    subcarrier: Some(l),
                    dictionary: dict.id(),
                    payload_elements: payload,
                });
                state.registry.insert((k, l), dict);
            }
            trace.boundaries.push(PhaseBoundary { frame, from: Phase::Dft, to: Phase::Ksvd });
        }

        if frame == 2 * n_train {
            let training = TrainingSet::from_blocks(
                &state.bs_estimates,
                Some(&state.bs_codes),
                Provenance::ReconstructedAtBs,
            )?;
            let common = match options.method {
                LearningMethod::CdlOp => dictlearn::cdl_op_training(&training)?.dictionary,
                LearningMethod::CdlKsvd => {
                    dictlearn::cdl_ksvd(&training, options.ksvd, options.common_ksvd_init.as_ref())?.0
                }
            };
            trace.computations.push(ComputationEvent {
                frame,
                method: options.method,
                dictionary: common.id(),
                training_columns: training.layout.columns(),
            });
            for k in 0..users {
                trace.transfers.push(TransferEvent {
                    frame,
                    direction: Direction::Downlink,
                    user: k,
                    subcarrier: None,
                    dictionary: common.id(),
                    payload_elements: payload,
                });
            }
            state.common = Some(common);
            trace.boundaries.push(PhaseBoundary { frame, from: Phase::Ksvd, to: Phase::Common });
        }
    }
    Ok(ProtocolOutcome { trace, state })
}

type CodecOutput<T> = (FrameRecord<T>, CVector<T>, SparseVector<T>, CVector<T>);

/// UE compression and BS reconstruction for every `(user, subcarrier)` of
/// one frame.
fn codec_frame<T: Real>(
    state: &ProtocolState<T>,
    phi: &MeasurementMatrix<T>,
    realizations: &[ChannelRealization<T>],
    frame: usize,
    sparsity: usize,
) -> Result<Vec<CodecOutput<T>>> {
    let jobs: Vec<(usize, usize)> = realizations
        .iter()
        .enumerate()
        .flat_map(|(k, r)| (0..r.vectors.len()).map(move |l| (k, l)))
        .collect();
    jobs.par_iter()
        .map(|&(k, l)| {
            let h = &realizations[k].vectors[l];
            let dict = state.dictionary(k, l)?;
            let tag = FeedbackTag { user: k, subcarrier: l, frame };
            let fb = phi.compress(h, dict, tag)?;
            let rec = reconstruct(&fb, phi, dict, sparsity)?;
            let nmse_num = (&rec.estimate - h).norm_squared().as_f64();
            let nmse_den = h.norm_squared().as_f64();
            let precoder_flagged = rec.estimate.iter().any(|z| z.re == T::zero() && z.im == T::zero());
            let record = FrameRecord {
                frame,
                user: k,
                subcarrier: l,
                phase: state.phase,
                feedback: fb,
                nmse_num,
                nmse_den,
                precoder_flagged,
            };
            Ok((record, rec.estimate, rec.code, h.clone()))
        })
        .collect()
}

fn columns<T: Real>(vectors: &[CVector<T>]) -> CMatrix<T> {
    let n = vectors.first().map_or(0, |v| v.len());
    CMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i])
}

/// Column layout of the BS training set built at frame `2N`.
pub fn bs_training_layout(config: &SystemConfig) -> TrainingLayout {
    TrainingLayout { users: config.users, subcarriers: config.subcarriers, frames: config.training_frames }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::KroneckerChannel;

    fn small(users: usize, n_train: usize, subcarriers: usize, total: usize) -> SystemConfig {
        let mut c = SystemConfig::desk();
        c.tx_antennas = 8;
        c.measurement_rows = 5;
        c.sparsity = 2;
        c.subcarriers = subcarriers;
        c.taps = subcarriers.min(2);
        c.users = users;
        c.velocities_kmh = vec![20.0; users];
        c.training_frames = n_train;
        c.total_frames = total;
        c
    }

    #[test]
    fn phase_boundaries() {
        assert_eq!(Phase::of_frame(1, 2), Phase::Dft);
        assert_eq!(Phase::of_frame(2, 2), Phase::Dft);
        assert_eq!(Phase::of_frame(3, 2), Phase::Ksvd);
        assert_eq!(Phase::of_frame(4, 2), Phase::Ksvd);
        assert_eq!(Phase::of_frame(5, 2), Phase::Common);
    }

    #[test]
    fn tiny_run_bookkeeping() {
        let cfg = small(1, 2, 2, 6);
        let mut src = KroneckerChannel::<f64>::from_config(&cfg).unwrap();
        let out = run_cdl_framework(&cfg, &mut src, &ProtocolOptions::new(LearningMethod::CdlOp, 2)).unwrap();
        let t = &out.trace;
        assert_eq!(t.transfers_at(2, Direction::Uplink), 2);
        assert_eq!(t.transfers_at(4, Direction::Downlink), 1);
        assert_eq!(t.transfers.len(), 3);
        assert_eq!(t.computations.len(), 1);
        assert_eq!(t.computations[0].frame, 4);
        assert_eq!(t.records.len(), 6 * 2);
        let frames = |p: Phase| {
            let mut f: Vec<usize> = t.records.iter().filter(|r| r.phase == p).map(|r| r.frame).collect();
            f.dedup();
            f
        };
        assert_eq!(frames(Phase::Dft), vec![1, 2]);
        assert_eq!(frames(Phase::Ksvd), vec![3, 4]);
        assert_eq!(frames(Phase::Common), vec![5, 6]);
        assert_eq!(t.boundaries.len(), 2);
    }

    #[test]
    fn records_use_the_dictionary_of_their_phase() {
        let cfg = small(2, 3, 3, 8);
        let mut src = KroneckerChannel::<f64>::from_config(&cfg).unwrap();
        let out = run_cdl_framework(&cfg, &mut src, &ProtocolOptions::new(LearningMethod::CdlKsvd, 2)).unwrap();
        let dft = Dictionary::<f64>::dft(8).unwrap().id();
        let common = out.state.common.as_ref().unwrap().id();
        for r in &out.trace.records {
            let want = match r.phase {
                Phase::Dft => dft,
                Phase::Ksvd => out.state.registry[&(r.user, r.subcarrier)].id(),
                Phase::Common => common,
            };
            assert_eq!(r.dict_id(), want);
        }
        assert_eq!(out.trace.computations[0].training_columns, 2 * 3 * 3);
    }

    #[test]
    fn rejects_short_runs() {
        let cfg = small(1, 2, 2, 4);
        let mut src = KroneckerChannel::<f64>::from_config(&cfg).unwrap();
        let err = run_cdl_framework(&cfg, &mut src, &ProtocolOptions::new(LearningMethod::CdlOp, 2)).unwrap_err();
        assert!(err.to_string().contains("frame_budget"), "{err}");
    }

    #[test]
    fn csv_header_and_rows() {
        let cfg = small(1, 2, 2, 5);
        let mut src = KroneckerChannel::<f64>::from_config(&cfg).unwrap();
        let out = run_cdl_framework(&cfg, &mut src, &ProtocolOptions::new(LearningMethod::CdlOp, 2)).unwrap();
        let mut buf = Vec::new();
        out.trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("frame,user,subcarrier,phase,dict_id,nmse_num,nmse_den"));
        assert_eq!(lines.count(), 10);
        assert!(text.contains(",common,"));
    }
}
