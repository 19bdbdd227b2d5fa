use std::path::PathBuf;

use serde::Serialize;

use nicf::cylinders::{
    conjugate_mixing_series, mixing_series, odd_mixing_series, CylinderSpec, MixingPoint,
};
use nicf::gkl::{decay_experiment, DecayReport};
use nicf::maps::{conjugate_j_inverse_set, expand as expand_digits, reconstruct, DigitSequence};
use nicf::montecarlo::{estimate, invariant, orbit_point, McEstimate};
use nicf::transfer::conjugate::certify_conjugate;
use nicf::transfer::folded::certify_folded;
use nicf::transfer::{BoundCertificate, DEFAULT_DEGREE, DEFAULT_TRUNCATION};
use nicf::{Interval, IntervalUnion, MapKind, NicfDigit, TransferOperator, WeightFamily};

use crate::config::{pick, pick_or, ConfigFile};
use crate::output::{self, Format};
use crate::CliError;

pub struct Common {
    pub format: Format,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl Common {
    fn write<C: Serialize, R: Serialize, W: Serialize>(
        &self,
        command: &str,
        config: &C,
        result: &R,
        rows: &[W],
    ) -> Result<(), CliError> {
        let bytes = match self.format {
            Format::Json => output::json(command, config, result)?,
            Format::Csv => output::csv(rows)?,
        };
        output::emit(&bytes, self.output.as_deref())
    }
}

fn required<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("--{name} is required (flag or config key)")))
}

fn map_kind(s: &str) -> Result<MapKind, CliError> {
    Ok(s.parse::<MapKind>()?)
}

fn family(s: &str) -> Result<WeightFamily, CliError> {
    match map_kind(s)? {
        MapKind::Folded => Ok(WeightFamily::FoldedU),
        MapKind::EvenConjugate => Ok(WeightFamily::ConjugateU),
        other => Err(CliError::Input(format!(
            "{other} has no transfer operator here; use folded or conjugate"
        ))),
    }
}

// ---- expand

#[derive(Serialize)]
struct ExpandConfig {
    kind: MapKind,
    x: f64,
    n: usize,
    format: Format,
}

#[derive(Serialize)]
struct ExpandResult {
    #[serde(flatten)]
    sequence: DigitSequence,
    reconstruction: f64,
}

#[derive(Serialize)]
struct PairRow {
    index: usize,
    a: u64,
    e: i8,
}

#[derive(Serialize)]
struct SignedRow {
    index: usize,
    b: i64,
}

pub fn expand(
    common: &Common,
    file: &ConfigFile,
    kind: Option<String>,
    x: Option<f64>,
    n: Option<usize>,
) -> Result<bool, CliError> {
    let kind = map_kind(&required(pick(kind, file, "kind")?, "kind")?)?;
    let x = required(pick(x, file, "x")?, "x")?;
    let n = pick_or(n, file, "n", 10)?;
    let sequence = expand_digits(kind, x, n)?;
    let reconstruction = if sequence.is_empty() {
        x
    } else {
        reconstruct(&sequence)?
    };
    let config = ExpandConfig {
        kind,
        x,
        n,
        format: common.format,
    };
    let digits = sequence.digits.clone();
    let result = ExpandResult {
        sequence,
        reconstruction,
    };
    if kind == MapKind::Odd {
        let rows: Vec<SignedRow> = digits
            .iter()
            .enumerate()
            .filter_map(|(i, d)| match *d {
                NicfDigit::Signed(b) => Some(SignedRow { index: i + 1, b }),
                NicfDigit::Pair { .. } => None,
            })
            .collect();
        common.write("expand", &config, &result, &rows)?;
    } else {
        let rows: Vec<PairRow> = digits
            .iter()
            .enumerate()
            .filter_map(|(i, d)| match *d {
                NicfDigit::Pair { a, e } => Some(PairRow { index: i + 1, a, e }),
                NicfDigit::Signed(_) => None,
            })
            .collect();
        common.write("expand", &config, &result, &rows)?;
    }
    Ok(true)
}

// ---- certify

#[derive(Serialize)]
struct CertifyConfig {
    family: &'static str,
    spacing: f64,
    report_components: bool,
    format: Format,
}

#[derive(Serialize)]
struct CertifySummary<D: Serialize> {
    family: &'static str,
    target: f64,
    certified_sup: f64,
    grid_spacing: f64,
    padding: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<D>,
}

#[derive(Serialize)]
struct CertificateRow {
    name: String,
    target: f64,
    grid_sup: f64,
    /// Empty for the combined row.
    argmax: Option<f64>,
    grid_spacing: f64,
    padding: f64,
    certified_sup: f64,
    pass: bool,
}

impl From<&BoundCertificate> for CertificateRow {
    fn from(c: &BoundCertificate) -> Self {
        Self {
            name: c.name.clone(),
            target: c.target,
            grid_sup: c.grid_sup,
            argmax: Some(c.argmax),
            grid_spacing: c.grid_spacing,
            padding: c.padding,
            certified_sup: c.certified_sup,
            pass: c.pass,
        }
    }
}

fn print_table(rows: &[CertificateRow]) {
    eprintln!(
        "{:<16} {:>10} {:>12} {:>10} {:>12}  pass",
        "bound", "constant", "grid sup", "padding", "certified"
    );
    for r in rows {
        eprintln!(
            "{:<16} {:>10} {:>12.7} {:>10.1e} {:>12.7}  {}",
            r.name, r.target, r.grid_sup, r.padding, r.certified_sup, r.pass
        );
    }
}

pub fn certify(
    common: &Common,
    file: &ConfigFile,
    family_name: Option<String>,
    spacing: Option<f64>,
    report_components: bool,
) -> Result<bool, CliError> {
    let fam = family(&required(pick(family_name, file, "family")?, "family")?)?;
    let spacing = pick_or(spacing, file, "spacing", 1e-4)?;
    if !(spacing > 0.0 && spacing <= 1e-2) {
        return Err(CliError::Input(format!(
            "--spacing {spacing} must lie in (0, 0.01]"
        )));
    }
    let report_components =
        report_components || pick(None::<bool>, file, "report-components")?.unwrap_or(false);
    let config = CertifyConfig {
        family: fam.name(),
        spacing,
        report_components,
        format: common.format,
    };
    let pass = match fam {
        WeightFamily::FoldedU => {
            let r = certify_folded(spacing);
            let certs = [&r.s_i, &r.s_ii];
            let mut rows: Vec<CertificateRow> = certs.iter().map(|c| (*c).into()).collect();
            rows.push(combined_row(r.target, spacing, &certs, r.combined, r.pass));
            print_table(&rows);
            let summary = CertifySummary {
                family: fam.name(),
                target: r.target,
                certified_sup: r.combined,
                grid_spacing: spacing,
                padding: r.s_i.padding + r.s_ii.padding,
                pass: r.pass,
                details: report_components.then_some(&r),
            };
            common.write("certify", &config, &summary, &rows)?;
            r.pass
        }
        WeightFamily::ConjugateU => {
            let r = certify_conjugate(spacing);
            let mut certs = vec![&r.phi.certificate];
            certs.extend(r.psi.components.iter());
            certs.push(&r.psi.total);
            let mut rows: Vec<CertificateRow> = certs.iter().map(|c| (*c).into()).collect();
            rows.push(combined_row(
                r.target,
                spacing,
                &[&r.phi.certificate, &r.psi.total],
                r.combined,
                r.pass,
            ));
            print_table(&rows);
            if report_components {
                eprintln!("{}", r.psi.note);
            }
            let summary = CertifySummary {
                family: fam.name(),
                target: r.target,
                certified_sup: r.combined,
                grid_spacing: spacing,
                padding: r.phi.certificate.padding + r.psi.total.padding,
                pass: r.pass,
                details: report_components.then_some(&r),
            };
            common.write("certify", &config, &summary, &rows)?;
            r.pass
        }
    };
    Ok(pass)
}

fn combined_row(
    constant: f64,
    spacing: f64,
    parts: &[&BoundCertificate],
    combined: f64,
    pass: bool,
) -> CertificateRow {
    CertificateRow {
        name: "combined".into(),
        target: constant,
        grid_sup: parts.iter().map(|c| c.grid_sup).sum(),
        argmax: None,
        grid_spacing: spacing,
        padding: parts.iter().map(|c| c.padding).sum(),
        certified_sup: combined,
        pass,
    }
}

// ---- decay

#[derive(Serialize)]
struct DecayConfig {
    kind: MapKind,
    n_max: usize,
    degree: usize,
    truncation: usize,
    format: Format,
}

#[derive(Serialize)]
struct DecayRow {
    n: usize,
    error: f64,
    centered_error: f64,
    derivative_norm: f64,
}

pub fn decay(
    common: &Common,
    file: &ConfigFile,
    kind: Option<String>,
    n_max: Option<usize>,
    degree: Option<usize>,
    truncation: Option<usize>,
) -> Result<bool, CliError> {
    let kind = family(&required(pick(kind, file, "kind")?, "kind")?)?.map_kind();
    let n_max = pick_or(n_max, file, "n-max", 20)?;
    let degree = pick_or(degree, file, "degree", DEFAULT_DEGREE)?;
    let truncation = pick_or(truncation, file, "truncation", DEFAULT_TRUNCATION)?;
    let report: DecayReport = decay_experiment(kind, n_max, degree, truncation)?;
    let rows: Vec<DecayRow> = (1..=n_max)
        .map(|n| DecayRow {
            n,
            error: report.errors[n],
            centered_error: report.centered_errors[n],
            derivative_norm: report.derivative_norms[n],
        })
        .collect();
    let config = DecayConfig {
        kind,
        n_max,
        degree,
        truncation,
        format: common.format,
    };
    common.write("decay", &config, &report, &rows)?;
    Ok(true)
}

// ---- mixing

pub struct MixingArgs {
    pub kind: Option<String>,
    pub e: Option<String>,
    pub f: Option<String>,
    pub n: Option<String>,
    pub degree: Option<usize>,
    pub truncation: Option<usize>,
    pub mc_samples: Option<u64>,
}

#[derive(Serialize)]
struct MixingConfig {
    kind: MapKind,
    e: IntervalUnion,
    f: String,
    n: Vec<usize>,
    degree: usize,
    truncation: usize,
    mc_samples: u64,
    seed: u64,
    format: Format,
}

#[derive(Serialize)]
struct MixingRow {
    n: usize,
    gap: f64,
    joint: f64,
    product: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_joint: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_stderr: Option<f64>,
}

#[derive(Serialize)]
struct MixingResult<'a> {
    cylinder: &'a CylinderSpec,
    cylinder_measure: f64,
    points: Vec<MixingEntry>,
}

#[derive(Serialize)]
struct MixingEntry {
    #[serde(flatten)]
    point: MixingPoint,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<McEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_score: Option<f64>,
}

fn parse_set(s: &str) -> Result<IntervalUnion, CliError> {
    let mut parts = Vec::new();
    for piece in s.split(';').filter(|p| !p.trim().is_empty()) {
        let (lo, hi) = piece
            .split_once(',')
            .ok_or_else(|| CliError::Input(format!("interval {piece:?} must be lo,hi")))?;
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Input(format!("{v:?} in {piece:?}: {e}")))
        };
        parts.push(Interval::new(num(lo)?, num(hi)?)?);
    }
    if parts.is_empty() {
        return Err(CliError::Input("--e is empty".into()));
    }
    Ok(IntervalUnion::new(parts))
}

fn parse_word(kind: MapKind, s: &str) -> Result<Vec<NicfDigit>, CliError> {
    let bad = |piece: &str, why: String| CliError::Input(format!("digit {piece:?}: {why}"));
    if kind == MapKind::Odd {
        return s
            .split([',', ';'])
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map(NicfDigit::Signed)
                    .map_err(|e| bad(p, e.to_string()))
            })
            .collect();
    }
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, e) = p
                .split_once(',')
                .ok_or_else(|| bad(p, "expected a,e".into()))?;
            let a = a.trim().parse::<u64>().map_err(|e| bad(p, e.to_string()))?;
            let e = e.trim().parse::<i8>().map_err(|e| bad(p, e.to_string()))?;
            Ok(NicfDigit::pair(a, e))
        })
        .collect()
}

fn parse_ns(s: &str) -> Result<Vec<usize>, CliError> {
    let ns = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Input(format!("n = {p:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if ns.is_empty() {
        return Err(CliError::Input("--n is empty".into()));
    }
    Ok(ns)
}

pub fn mixing(common: &Common, file: &ConfigFile, args: MixingArgs) -> Result<bool, CliError> {
    let kind = map_kind(&required(pick(args.kind, file, "kind")?, "kind")?)?;
    let (word_kind, fam) = match kind {
        MapKind::Folded => (MapKind::Folded, WeightFamily::FoldedU),
        MapKind::Odd => (MapKind::Odd, WeightFamily::FoldedU),
        MapKind::EvenConjugate | MapKind::Even => {
            (MapKind::EvenConjugate, WeightFamily::ConjugateU)
        }
        MapKind::HurwitzDual => {
            return Err(CliError::Input(
                "mixing supports folded, odd and conjugate".into(),
            ))
        }
    };
    let e = parse_set(&required(pick(args.e, file, "e")?, "e")?)?;
    let f_text = required(pick(args.f, file, "f")?, "f")?;
    let f = CylinderSpec::new(word_kind, parse_word(word_kind, &f_text)?)?;
    let ns = parse_ns(&required(pick(args.n, file, "n")?, "n")?)?;
    let degree = pick_or(args.degree, file, "degree", DEFAULT_DEGREE)?;
    let truncation = pick_or(args.truncation, file, "truncation", DEFAULT_TRUNCATION)?;
    let mc_samples = pick_or(args.mc_samples, file, "mc-samples", 0)?;

    let op = TransferOperator::new(fam, degree, truncation)?;
    let points = match kind {
        MapKind::Folded => mixing_series(&e, &f, &ns, &op)?,
        MapKind::Odd => odd_mixing_series(&e, &f, &ns, &op)?,
        _ => conjugate_mixing_series(&e, &f, &ns, &op)?,
    };

    // orbits of the map the sets live on: T̃_e-cylinders are pulled back by J
    let (orbit_kind, f_set) = match kind {
        MapKind::Folded | MapKind::Odd => (kind, IntervalUnion::from(f.interval)),
        _ => (
            MapKind::Even,
            conjugate_j_inverse_set(&IntervalUnion::from(f.interval))?,
        ),
    };
    let entries: Vec<MixingEntry> = points
        .into_iter()
        .map(|point| {
            let monte_carlo = (mc_samples > 0).then(|| {
                estimate(
                    mc_samples,
                    common.seed ^ point.n as u64,
                    invariant(orbit_kind),
                    |x| f_set.contains(x) && e.contains(orbit_point(orbit_kind, x, point.n)),
                )
            });
            MixingEntry {
                z_score: monte_carlo.map(|m| m.z_score(point.joint)),
                point,
                monte_carlo,
            }
        })
        .collect();
    let rows: Vec<MixingRow> = entries
        .iter()
        .map(|m| MixingRow {
            n: m.point.n,
            gap: m.point.gap,
            joint: m.point.joint,
            product: m.point.product,
            mc_joint: m.monte_carlo.map(|x| x.p),
            mc_stderr: m.monte_carlo.map(|x| x.stderr),
        })
        .collect();
    let config = MixingConfig {
        kind,
        e: e.clone(),
        f: f_text,
        n: ns,
        degree,
        truncation,
        mc_samples,
        seed: common.seed,
        format: common.format,
    };
    let result = MixingResult {
        cylinder_measure: f.measure(),
        cylinder: &f,
        points: entries,
    };
    common.write("mixing", &config, &result, &rows)?;
    Ok(true)
}
