//! Marker grammars: which identifier forms introduce a reference, and how
//! comments and strings look in the scanned language.

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::lexer::CommentSyntax;
use super::ScanError;

/// Which marker form produced a reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkerForm {
    TraceCall,
    VerifyCall,
    ImplementationMarker,
    TestMarker,
    /// A constant mentioned outside any marker.
    Bare,
}

impl MarkerForm {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TraceCall => "trace-call",
            Self::VerifyCall => "verify-call",
            Self::ImplementationMarker => "implementation-marker",
            Self::TestMarker => "test-marker",
            Self::Bare => "bare",
        }
    }

    pub fn is_verify(self) -> bool {
        matches!(self, Self::VerifyCall | Self::TestMarker)
    }
}

impl std::fmt::Display for MarkerForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MarkerForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Self::TraceCall,
            Self::VerifyCall,
            Self::ImplementationMarker,
            Self::TestMarker,
            Self::Bare,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or_else(|| format!("unknown marker form {s:?}"))
    }
}

/// Grammar settings as written in configuration. Every field left out falls
/// back to the named preset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarConfig {
    /// `c_like` (default) or `hash`.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub trace_calls: Option<Vec<String>>,
    #[serde(default)]
    pub verify_calls: Option<Vec<String>>,
    /// Regex for per-set implementation marker names, whole-identifier.
    #[serde(default)]
    pub implementation_marker: Option<String>,
    #[serde(default)]
    pub test_marker: Option<String>,
    /// Regex every marker argument must match.
    #[serde(default)]
    pub argument: Option<String>,
    /// Bracket pairs that may wrap a multi-value marker list.
    #[serde(default)]
    pub list_delimiters: Option<Vec<(char, char)>>,
    #[serde(default)]
    pub comments: Option<CommentSyntax>,
    /// Count constant names outside markers as implementation references.
    #[serde(default)]
    pub bare_references: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct MarkerGrammar {
    pub trace_calls: Vec<String>,
    pub verify_calls: Vec<String>,
    pub implementation_marker: Regex,
    pub test_marker: Regex,
    pub argument: Regex,
    pub list_delimiters: Vec<(char, char)>,
    pub syntax: CommentSyntax,
    pub bare_references: bool,
}

fn anchored(pattern: &str) -> Result<Regex, ScanError> {
    Regex::new(&format!("^(?:{pattern})$")).map_err(|e| ScanError::Grammar(format!("{pattern:?}: {e}")))
}

impl MarkerGrammar {
    pub fn preset(name: &str) -> Result<Self, ScanError> {
        let syntax = match name {
            "c_like" => CommentSyntax::c_like(),
            "hash" => CommentSyntax::hash(),
            other => return Err(ScanError::Grammar(format!("unknown grammar preset {other:?}"))),
        };
        Ok(Self {
            trace_calls: vec!["trace".into()],
            verify_calls: vec!["verifiesRequirement".into()],
            implementation_marker: anchored(r"@?Traces[A-Z][A-Za-z0-9_]*|TRACES_[A-Z0-9_]+")?,
            test_marker: anchored(r"@?Verifies[A-Z][A-Za-z0-9_]*|VERIFIES_[A-Z0-9_]+")?,
            argument: anchored("[A-Z][A-Z0-9_]*")?,
            list_delimiters: vec![('{', '}'), ('[', ']')],
            syntax,
            bare_references: true,
        })
    }

    pub fn from_config(config: &GrammarConfig) -> Result<Self, ScanError> {
        let mut g = Self::preset(config.preset.as_deref().unwrap_or("c_like"))?;
        if let Some(v) = &config.trace_calls {
            g.trace_calls = v.clone();
        }
        if let Some(v) = &config.verify_calls {
            g.verify_calls = v.clone();
        }
        if let Some(p) = &config.implementation_marker {
            g.implementation_marker = anchored(p)?;
        }
        if let Some(p) = &config.test_marker {
            g.test_marker = anchored(p)?;
        }
        if let Some(p) = &config.argument {
            g.argument = anchored(p)?;
        }
        if let Some(v) = &config.list_delimiters {
            g.list_delimiters = v.clone();
        }
        if let Some(s) = &config.comments {
            g.syntax = s.clone();
        }
        if let Some(b) = config.bare_references {
            g.bare_references = b;
        }
        Ok(g)
    }

    /// Classifies an identifier (with a leading `@` already joined) as the
    /// head of a marker form.
    pub fn marker_form(&self, ident: &str) -> Option<MarkerForm> {
        if self.trace_calls.iter().any(|c| c == ident) {
            Some(MarkerForm::TraceCall)
        } else if self.verify_calls.iter().any(|c| c == ident) {
            Some(MarkerForm::VerifyCall)
        } else if self.test_marker.is_match(ident) {
            Some(MarkerForm::TestMarker)
        } else if self.implementation_marker.is_match(ident) {
            Some(MarkerForm::ImplementationMarker)
        } else {
            None
        }
    }
}

impl Default for MarkerGrammar {
    fn default() -> Self {
        Self::preset("c_like").expect("built-in preset compiles")
    }
}

/// Regex for bare constant mentions: identifiers that start with one of the
/// known id prefixes followed by a numeric segment (`SWR_101`, `SWR_101_X`).
pub fn bare_pattern(prefixes: &[String]) -> Option<Regex> {
    if prefixes.is_empty() {
        return None;
    }
    let alternatives: Vec<String> = prefixes.iter().map(|p| regex::escape(p)).collect();
    let pattern = format!("^(?:{})_[0-9]+(?:_[A-Z0-9]+)*$", alternatives.join("|"));
    Some(Regex::new(&pattern).expect("escaped alternatives compile"))
}
