use resonance_core::atoms::{BUNDLED_SPECIES_JSON, BUNDLED_SPECIES_NAME};
use resonance_core::dynamics::vacuum_momentum_rotating_wave;
use resonance_core::emission::{forward_backward, sphere_integral};
use resonance_core::{
    budget as probability_budget, dpdomega, emitted_momentum, make_pair, scan_separation, AtomPair,
    RealVec3, SpeciesRegistry,
};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, Cell, Report};
use crate::verify;

/// The pair axis is fixed along lab `x̂`; dipole directions are given in the
/// same frame.
pub const PAIR_AXIS: RealVec3 = RealVec3::X;

/// Registry plus the label and SHA-256 of its source.
pub struct LoadedSpecies {
    pub registry: SpeciesRegistry,
    pub source: String,
    pub sha256: String,
}

pub fn load_registry(config: &RunConfig) -> CliResult<LoadedSpecies> {
    let (text, source) = match &config.species_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            (text, path.display().to_string())
        }
        None => (
            BUNDLED_SPECIES_JSON.to_owned(),
            format!("bundled:{BUNDLED_SPECIES_NAME}"),
        ),
    };
    let registry = SpeciesRegistry::from_json(&text)?;
    Ok(LoadedSpecies {
        registry,
        source,
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
    })
}

/// Pair at `x = k_A R` along [`PAIR_AXIS`].
pub fn build_pair(registry: &SpeciesRegistry, config: &RunConfig, x: f64) -> CliResult<AtomPair> {
    let mut excited = registry.get(&config.excited)?.clone();
    let mut ground = registry.get(&config.ground)?.clone();
    if let Some(axis) = config.dipole_axis {
        excited = excited.with_dipole_axis(axis)?;
        ground = ground.with_dipole_axis(axis)?;
    }
    let pair = make_pair(&excited, &ground, x / excited.k, PAIR_AXIS)?;
    Ok(pair.with_orientation(config.orientation))
}

fn vector(v: RealVec3) -> String {
    format!("{:e},{:e},{:e}", v.x, v.y, v.z)
}

fn metadata(command: &str, config: &RunConfig, species: &LoadedSpecies) -> Vec<(String, String)> {
    let mut m = vec![
        (
            "tool".into(),
            format!("resonance-recoil {}", env!("CARGO_PKG_VERSION")),
        ),
        ("command".into(), command.into()),
        ("species_file".into(), species.source.clone()),
        ("species_sha256".into(), species.sha256.clone()),
        ("excited".into(), config.excited.clone()),
        ("ground".into(), config.ground.clone()),
        ("orientation".into(), config.orientation.to_string()),
        (
            "dipole_axis".into(),
            config.dipole_axis.map_or_else(|| "species".into(), vector),
        ),
        ("pair_axis".into(), vector(PAIR_AXIS)),
    ];
    let mut push = |k: &str, v: String| m.push((k.into(), v));
    match command {
        "scan" => {
            push("xmin", format!("{:e}", config.xmin));
            push("xmax", format!("{:e}", config.xmax));
            push("samples", config.samples.to_string());
            push("time_s", "0e0".into());
        }
        "budget" => push("x", format!("{:e}", config.x)),
        "emission" => {
            push("x", format!("{:e}", config.x));
            push("ntheta", config.ntheta.to_string());
            push("quad_order", config.quad_order.to_string());
            push("phi_zero", "z".into());
        }
        _ => {}
    }
    m
}

fn write(report: &Report, config: &RunConfig) -> CliResult<()> {
    emit(&report.render(config.format), config.out.as_deref())
}

pub fn scan(config: &RunConfig) -> CliResult<()> {
    let species = load_registry(config)?;
    let template = build_pair(&species.registry, config, config.xmin)?;
    let results = scan_separation(&template, config.xmin, config.xmax, config.samples)?;
    let mut report = Report::new(
        metadata("scan", config, &species),
        vec![
            "x",
            "separation_m",
            "f0_x_n",
            "f0_y_n",
            "f0_z_n",
            "p_inf_x_kg_m_s",
            "p_inf_y_kg_m_s",
            "p_inf_z_kg_m_s",
            "directionality_hz",
            "directionality_ratio",
            "decay_rate_rad_s",
            "forward_minus_backward_per_sr",
        ],
    );
    for r in &results {
        let pair = template.at_scaled_separation(r.x)?;
        report.push_row(vec![
            r.x.into(),
            pair.separation().into(),
            r.f0.x.into(),
            r.f0.y.into(),
            r.f0.z.into(),
            r.p_inf.x.into(),
            r.p_inf.y.into(),
            r.p_inf.z.into(),
            r.directionality.into(),
            r.directionality_ratio().into(),
            r.decay_rate.into(),
            forward_backward(&pair).into(),
        ]);
    }
    if let Some(peak) = results
        .iter()
        .max_by(|a, b| a.directionality.abs().total_cmp(&b.directionality.abs()))
    {
        report.summary.push(("peak_x", peak.x));
        report
            .summary
            .push(("peak_directionality_hz", peak.directionality));
        report
            .summary
            .push(("peak_directionality_ratio", peak.directionality_ratio()));
    }
    write(&report, config)
}

pub fn budget(config: &RunConfig) -> CliResult<()> {
    let species = load_registry(config)?;
    let pair = build_pair(&species.registry, config, config.x)?;
    let b = probability_budget(&pair);
    let mut report = Report::new(
        metadata("budget", config, &species),
        vec![
            "x",
            "p_a",
            "p_b",
            "p_c",
            "p_de",
            "p_fg",
            "residual_theorem",
            "order_check",
        ],
    );
    report.push_row(
        [
            config.x,
            b.p_a,
            b.p_b,
            b.p_c,
            b.p_de,
            b.p_fg,
            b.residual_theorem,
            b.order_check,
        ]
        .into_iter()
        .map(Cell::from)
        .collect(),
    );
    write(&report, config)
}

pub fn emission(config: &RunConfig) -> CliResult<()> {
    let species = load_registry(config)?;
    let pair = build_pair(&species.registry, config, config.x)?;
    let axis = pair.axis();
    let (e1, _) = axis.transverse_frame(RealVec3::Z);
    let mut report = Report::new(
        metadata("emission", config, &species),
        vec!["theta_rad", "dpdomega_per_sr"],
    );
    let step = std::f64::consts::PI / (config.ntheta - 1) as f64;
    for i in 0..config.ntheta {
        let theta = if i == config.ntheta - 1 {
            std::f64::consts::PI
        } else {
            i as f64 * step
        };
        let khat = axis * theta.cos() + e1 * theta.sin();
        let khat = khat.normalized().expect("unit by construction");
        report.push_row(vec![theta.into(), dpdomega(&pair, khat)?.into()]);
    }
    let momentum = emitted_momentum(&pair, config.quad_order)?.total_momentum;
    let reduced = vacuum_momentum_rotating_wave(&pair)?;
    report.summary = vec![
        (
            "sphere_integral",
            sphere_integral(&pair, config.quad_order)?,
        ),
        ("p_fg", probability_budget(&pair).p_fg),
        ("forward_minus_backward_per_sr", forward_backward(&pair)),
        ("emitted_momentum_x_kg_m_s", momentum.x),
        ("emitted_momentum_y_kg_m_s", momentum.y),
        ("emitted_momentum_z_kg_m_s", momentum.z),
        ("p_inf_rotating_wave_x_kg_m_s", reduced.x),
        ("p_inf_rotating_wave_y_kg_m_s", reduced.y),
        ("p_inf_rotating_wave_z_kg_m_s", reduced.z),
    ];
    write(&report, config)
}

pub fn species_list(config: &RunConfig) -> CliResult<()> {
    let species = load_registry(config)?;
    let mut report = Report::new(
        vec![
            (
                "tool".into(),
                format!("resonance-recoil {}", env!("CARGO_PKG_VERSION")),
            ),
            ("command".into(), "species list".into()),
            ("species_file".into(), species.source.clone()),
            ("species_sha256".into(), species.sha256.clone()),
        ],
        vec![
            "label",
            "wavelength_nm",
            "omega_rad_s",
            "gamma_rad_s",
            "dipole_c_m",
            "dipole_axis_x",
            "dipole_axis_y",
            "dipole_axis_z",
        ],
    );
    for s in species.registry.iter() {
        let axis = s.dipole_axis();
        report.push_row(vec![
            s.label.clone().into(),
            (s.wavelength() * 1e9).into(),
            s.omega.into(),
            s.gamma.into(),
            s.mu.norm().into(),
            axis.x.into(),
            axis.y.into(),
            axis.z.into(),
        ]);
    }
    write(&report, config)
}

pub fn verify(config: &RunConfig, oracle: bool) -> CliResult<()> {
    let species = load_registry(config)?;
    let template = build_pair(&species.registry, config, config.x)?;
    let mut checks = verify::fast_suite(&species.registry, &template, config.seed);
    if oracle {
        checks.extend(verify::oracle_suite(&template, config.seed)?);
    }
    let mut text = format!("# seed={}\n", config.seed);
    for c in &checks {
        text.push_str(&c.to_string());
        text.push('\n');
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    text.push_str(&format!(
        "{} {}/{} checks passed\n",
        if failed == 0 { "OK" } else { "FAILED" },
        checks.len() - failed,
        checks.len()
    ));
    emit(&text, config.out.as_deref())?;
    if failed > 0 {
        return Err(CliError::Verification {
            failed,
            total: checks.len(),
        });
    }
    Ok(())
}
