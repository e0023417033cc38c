use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("axis must be a unit vector, got norm {norm}")]
    NonUnitAxis { norm: f64 },

    #[error("separation {separation} m is below the singular limit {limit} m; use the r→0 limit instead")]
    Singular { separation: f64, limit: f64 },

    #[error("atoms must be separated, got R = {0} m")]
    ZeroSeparation(f64),

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("species `{excited}` and `{ground}` are indistinguishable: |Δ| = {detuning:e} rad/s is below {floor:e} rad/s")]
    Indistinguishable {
        excited: String,
        ground: String,
        detuning: f64,
        floor: f64,
    },

    #[error("unknown species label `{0}`")]
    UnknownSpecies(String),

    #[error("species file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("species data does not parse: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("species `{label}`: field `{field}` {reason}")]
    Schema {
        label: String,
        field: &'static str,
        reason: String,
    },

    #[error(
        "species `{label}`: linewidth/dipole consistency residual {residual:e} exceeds {limit:e}"
    )]
    Consistency {
        label: String,
        residual: f64,
        limit: f64,
    },

    #[error("{0} requires oriented dipoles; isotropic averaging is only defined for contractions")]
    RequiresOrientedDipoles(&'static str),
}
