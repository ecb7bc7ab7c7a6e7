//! Rewrite rules: templates, soundness checking by evaluation, and a small
//! directed rewriting engine.

mod rewrite;
mod soundness;
mod templates;

pub use rewrite::{apply_fusion, simplify_basic, RewriteStep, Simplified};
pub use soundness::{check_instance, check_soundness, sample_params, summarize, RuleSummary, SoundnessReport, Verdict};
pub use templates::{instantiate, template, templates, ParamKind, RuleParams, RuleTemplate};
