//! Executes a resolved spec and writes its artifacts.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use cdl_core::eval::ber::{write_ber_csv, BerOptions};
use cdl_core::eval::experiments::{
    exp1_single_ue_compare, exp2_subcarrier_compare, exp3_multi_ue, exp4_ber, BerExperimentOptions, ExperimentOutput,
    SweepOptions,
};
use cdl_core::eval::write_nmse_csv;
use cdl_core::protocol::accounting::{paper_tables, AccountingReport};
use cdl_core::Dictionary64;

use crate::spec::{Experiment, Resolved};

pub struct RunArgs<'a> {
    pub spec_path: Option<&'a Path>,
    pub dict_in: Option<&'a Path>,
    pub dict_out: Option<&'a Path>,
}

/// Written files, relative to the output directory.
pub struct Artifacts {
    pub files: Vec<String>,
    pub dictionaries: Vec<PathBuf>,
}

fn write_file(dir: &Path, name: &str, files: &mut Vec<String>, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    body(&mut w)?;
    w.flush()?;
    files.push(name.to_string());
    Ok(())
}

pub fn load_dictionary(path: &Path) -> Result<Dictionary64> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Dictionary64::read_from(&mut BufReader::new(f)).with_context(|| format!("reading dictionary {}", path.display()))
}

pub fn write_tables(report: &AccountingReport, dir: &Path, files: &mut Vec<String>) -> Result<()> {
    write_file(dir, "table3_flops.csv", files, |w| Ok(report.write_flops_csv(w)?))?;
    write_file(dir, "table4_dictionary_feedback.csv", files, |w| Ok(report.write_dictionary_feedback_csv(w)?))?;
    write_file(dir, "table5_csi_feedback.csv", files, |w| Ok(report.write_csi_feedback_csv(w)?))?;
    write_file(dir, "memory_savings.csv", files, |w| Ok(report.write_memory_csv(w)?))?;
    Ok(())
}

fn run_experiment(r: &Resolved, experiment: Experiment, external: Option<Dictionary64>) -> Result<ExperimentOutput<f64>> {
    let sweep = SweepOptions { sparsities: r.sparsities.clone(), external, ksvd_max_iters: r.ksvd_max_iters };
    let c = &r.config;
    Ok(match experiment {
        Experiment::Exp1SingleUeCompare => exp1_single_ue_compare(c, &sweep)?,
        Experiment::Exp2SubcarrierCompare => exp2_subcarrier_compare(c, &sweep)?,
        Experiment::Exp3MultiUe => exp3_multi_ue(c, &sweep)?,
        Experiment::Exp4Ber => {
            let ber = BerOptions {
                min_bits: r.min_bits,
                target_errors: r.target_errors,
                ..BerOptions::new(r.snr_db.clone(), c.rng_seed)
            };
            let opts = BerExperimentOptions {
                compression_factors: r.compression_factors.clone(),
                ber,
                external: sweep.external,
                ksvd_max_iters: r.ksvd_max_iters,
            };
            exp4_ber(c, &opts)?
        }
        Experiment::AccountingTables => ExperimentOutput::default(),
    })
}

pub fn run(r: &Resolved, experiment: Experiment, args: &RunArgs) -> Result<Artifacts> {
    let start = Instant::now();
    let external = args.dict_in.map(load_dictionary).transpose()?;
    let external_id = external.as_ref().map(|d| d.id());
    fs::create_dir_all(&r.out).with_context(|| format!("creating {}", r.out.display()))?;
    let mut files = Vec::new();
    let output = run_experiment(r, experiment, external)?;
    if experiment == Experiment::AccountingTables {
        write_tables(&paper_tables(), &r.out, &mut files)?;
    }
    if !output.nmse.is_empty() {
        write_file(&r.out, "nmse.csv", &mut files, |w| Ok(write_nmse_csv(w, &output.nmse)?))?;
    }
    if !output.ber.is_empty() {
        write_file(&r.out, "ber.csv", &mut files, |w| Ok(write_ber_csv(w, &output.ber)?))?;
    }
    if let Some(trace) = &output.trace {
        write_file(&r.out, "protocol_trace.csv", &mut files, |w| Ok(trace.write_csv(w)?))?;
    }
    let mut dictionaries = Vec::new();
    if let Some(dir) = args.dict_out.filter(|_| !output.dictionaries.is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (stem, dict) in &output.dictionaries {
            let path = dir.join(format!("{stem}.dict"));
            let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
            dict.write_to(&mut w)?;
            w.flush()?;
            dictionaries.push(path);
        }
    }

    let mut manifest = r.manifest_lines();
    manifest.push(("spec".into(), args.spec_path.map_or("none".into(), |p| p.display().to_string())));
    manifest.push(("dict_in".into(), args.dict_in.map_or("none".into(), |p| p.display().to_string())));
    manifest.push(("dict_in_id".into(), external_id.map_or("none".into(), |id| id.to_string())));
    manifest.push(("dict_out".into(), args.dict_out.map_or("none".into(), |p| p.display().to_string())));
    let stems: Vec<String> = output.dictionaries.iter().map(|(s, d)| format!("{s}:{}", d.id())).collect();
    manifest.push(("dictionaries".into(), format!("[{}]", stems.join(","))));
    manifest.push(("files".into(), format!("[{}]", files.join(","))));
    manifest.push(("cdl_version".into(), env!("CARGO_PKG_VERSION").into()));
    manifest.push(("scalar".into(), "f64".into()));
    manifest.push(("wall_time_s".into(), format!("{:.3}", start.elapsed().as_secs_f64())));
    write_file(&r.out, "manifest.txt", &mut Vec::new(), |w| {
        for (k, v) in &manifest {
            writeln!(w, "{k}={v}")?;
        }
        Ok(())
    })?;
    files.push("manifest.txt".into());
    Ok(Artifacts { files, dictionaries })
}
