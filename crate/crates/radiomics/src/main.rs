//! Command-line front end: feature extraction, diagnostics, worked-example
//! checks, the feature catalogue and synthetic sample data.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use radiomics::io::{load_mask, load_volume, write_nifti, NiftiDatatype};
use radiomics::pipeline::{
    nomenclature, preset, process_roi, run_pipeline, DiagnosticSet, ProcessingConfig, ReportFormat, RoiSource,
    PRESET_NAMES,
};
use radiomics::synthetic::synthetic_ct;
use radiomics::texture::Aggregation;
use radiomics::volume::{parse_contours, ImageVolume};
use radiomics::{phantom, Error, Family, Result};

#[derive(Parser)]
#[command(name = "radiomics", version, about = "Image biomarker extraction from a volume and a region of interest")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "RADIOMICS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every configured feature and write a report.
    Extract(ExtractArgs),
    /// Write image and ROI descriptors at the initial, interpolated and re-segmented stages.
    Diagnostics(RunArgs),
    /// Check the bundled worked examples against their reference tables.
    Phantom,
    /// Print the feature catalogue with identifiers and names under a configuration.
    Nomenclature {
        /// Preset whose settings label the names.
        #[arg(long, default_value = "C")]
        config: String,
    },
    /// Write a seeded synthetic CT-like image and lesion mask as NIfTI.
    Synthetic {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Voxels per axis.
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("roi").required(true).args(["mask", "contours"]))]
#[command(group = clap::ArgGroup::new("cfg").required(true).args(["config", "config_file"]))]
struct RunArgs {
    /// Image volume (.nii, .nii.gz, or a raw header).
    #[arg(long)]
    image: PathBuf,
    /// ROI mask on the image grid; non-zero voxels are inside.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// ROI contours in world coordinates.
    #[arg(long)]
    contours: Option<PathBuf>,
    /// Preset configuration (A to E).
    #[arg(long)]
    config: Option<String>,
    /// TOML configuration; a `preset` key selects the base it overrides.
    #[arg(long)]
    config_file: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from the output extension when absent.
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Seed for subsampled estimates; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write diagnostics to this file.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

impl RunArgs {
    fn load_config(&self) -> Result<ProcessingConfig> {
        match (&self.config, &self.config_file) {
            (Some(name), _) => preset(name),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                ProcessingConfig::from_toml(&text)
            }
            (None, None) => Err(Error::Config("a preset or a configuration file is required".into())),
        }
    }

    fn load_inputs(&self) -> Result<(ImageVolume, RoiSource)> {
        let image = load_volume(&self.image)?.image;
        let roi = match (&self.mask, &self.contours) {
            (Some(m), _) => RoiSource::Mask(load_mask(m, &image)?),
            (None, Some(c)) => {
                let text = std::fs::read_to_string(c).map_err(|e| Error::io(c, e))?;
                RoiSource::Contours(parse_contours(&text)?)
            }
            (None, None) => return Err(Error::Config("a mask or contours are required".into())),
        };
        Ok((image, roi))
    }

    fn format(&self) -> ReportFormat {
        self.format.unwrap_or_else(|| self.out.as_deref().map_or(ReportFormat::Csv, ReportFormat::from_path))
    }
}

fn write_output(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = std::io::BufWriter::new(file);
            body(&mut w)?;
            w.flush().map_err(|e| Error::io(path, e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush().map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn extract(args: &ExtractArgs) -> Result<()> {
    let mut cfg = args.run.load_config()?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let (image, roi) = args.run.load_inputs()?;
    let (report, diagnostics) = run_pipeline(&image, &roi, &cfg)?;
    let format = args.run.format();
    write_output(args.run.out.as_deref(), |w| report.write(format, w))?;
    if let Some(path) = &args.diagnostics {
        let f = ReportFormat::from_path(path);
        write_output(Some(path), |w| diagnostics.write(f, w))?;
    }
    Ok(())
}

fn diagnostics(args: &RunArgs) -> Result<()> {
    let cfg = args.load_config()?;
    let (image, roi) = args.load_inputs()?;
    let set: DiagnosticSet = process_roi(&image, &roi, &cfg)?.diagnostics;
    write_output(args.out.as_deref(), |w| set.write(args.format(), w))
}

fn run_phantom() -> ExitCode {
    let checks = phantom::run_checks();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{} of {} worked examples match", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn catalogue(config: &str) -> Result<()> {
    let cfg = preset(config)?;
    let aggregations = cfg.effective_aggregations();
    let mut out = std::io::stdout().lock();
    let io_err = |e| Error::io("<stdout>", e);
    writeln!(out, "ibsi_id\taggregation\tname").map_err(io_err)?;
    for family in Family::ALL {
        let aggs: Vec<Option<Aggregation>> = if family.is_texture() {
            aggregations.iter().copied().filter(|a| a.applies_to(family)).map(Some).collect()
        } else {
            vec![None]
        };
        for def in family.features() {
            for &agg in &aggs {
                let id = agg.map_or(radiomics::pipeline::VOLUME_AGGREGATION_ID, |a| a.id());
                writeln!(out, "{}\t{}\t{}", def.id, id, nomenclature(def, family, agg, &cfg)).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn synthetic(out_dir: &Path, size: usize, seed: u64) -> Result<()> {
    if size < 4 {
        return Err(Error::Config("synthetic volumes need at least 4 voxels per axis".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let (image, mask) = synthetic_ct([size; 3], [1.0; 3], seed);
    let mask_volume = ImageVolume::new(mask.geometry, mask.labels.iter().map(|&l| f64::from(l)).collect())?;
    let (ip, mp) = (out_dir.join("synthetic_image.nii.gz"), out_dir.join("synthetic_mask.nii.gz"));
    write_nifti(&ip, &image, NiftiDatatype::Int16)?;
    write_nifti(&mp, &mask_volume, NiftiDatatype::Uint8)?;
    println!("{}\n{}", ip.display(), mp.display());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Extract(a) => extract(a)?,
        Command::Diagnostics(a) => diagnostics(a)?,
        Command::Phantom => return Ok(run_phantom()),
        Command::Nomenclature { config } => catalogue(config)?,
        Command::Synthetic { out_dir, size, seed } => synthetic(out_dir, *size, *seed)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => code,
        Ok(Err(Error::Io { source, .. })) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Config(_)) {
                eprintln!("presets: {}", PRESET_NAMES.join(", "));
            }
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
