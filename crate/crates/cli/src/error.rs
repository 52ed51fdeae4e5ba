use thiserror::Error;

/// Failures that stop a run; all map to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: gevrey_core::Error,
    },
}

impl CliError {
    /// A core error raised while validating the config block `field`.
    pub fn field(field: &str, e: gevrey_core::Error) -> Self {
        Self::Config {
            field: field.into(),
            message: e.to_string(),
        }
    }

    pub fn core(context: impl Into<String>, source: gevrey_core::Error) -> Self {
        Self::Core {
            context: context.into(),
            source,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
