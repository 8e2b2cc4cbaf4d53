use thiserror::Error;

/// Failure to read a model file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unsupported MPS section {section}")]
    Unsupported { line: usize, section: String },
    #[error("line {line}: {source}")]
    Model {
        line: usize,
        #[source]
        source: conbranch_core::Error,
    },
    #[error("empty input")]
    Empty,
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Self::Syntax {
            line,
            message: message.into(),
        }
    }
}
