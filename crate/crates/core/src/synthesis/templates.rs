//! Versioned prompt and standardization templates.
//!
//! The exact wording lives in a data file so it can evolve without code
//! changes; templates are plain `{placeholder}` substitution.

use super::SynthesisError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

const BUILTIN_TEMPLATES: &str = include_str!("../../data/prompt_templates.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TemplateSet {
    version: String,
    system: BTreeMap<String, String>,
    user: BTreeMap<String, String>,
    #[serde(default)]
    instruction_templates: BTreeMap<String, String>,
    #[serde(default)]
    response_templates: BTreeMap<String, String>,
}

impl std::str::FromStr for TemplateSet {
    type Err = SynthesisError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let set: TemplateSet =
            serde_json::from_str(text).map_err(|e| SynthesisError::Template(e.to_string()))?;
        if !set.system.contains_key("default") {
            return Err(SynthesisError::Template("missing system.default template".into()));
        }
        Ok(set)
    }
}

impl TemplateSet {
    pub fn builtin() -> Self {
        BUILTIN_TEMPLATES.parse().expect("builtin templates are valid")
    }

    pub fn from_path(path: &Path) -> Result<Self, SynthesisError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SynthesisError::Template(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn system_prompt(&self, task: &str) -> &str {
        self.system
            .get(task)
            .or_else(|| self.system.get("default"))
            .expect("default system template validated at load")
    }

    pub fn render_user(
        &self,
        task: &str,
        vars: &BTreeMap<&str, String>,
    ) -> Result<String, SynthesisError> {
        let template = self
            .user
            .get(task)
            .ok_or_else(|| SynthesisError::Template(format!("no user template '{task}'")))?;
        Ok(render(template, vars))
    }

    pub fn instruction_template(&self, kind: &str) -> Option<&str> {
        self.instruction_templates.get(kind).map(String::as_str)
    }

    pub fn response_template(&self, kind: &str) -> Option<&str> {
        self.response_templates.get(kind).map(String::as_str)
    }
}

/// `{name}` substitution; unknown placeholders are left verbatim.
pub fn render(template: &str, vars: &BTreeMap<&str, String>) -> String {
    let mut out = template.to_string();
    for (key, value) in vars {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads_with_all_task_templates() {
        let set = TemplateSet::builtin();
        assert_eq!(set.version(), "v1");
        for task in
            ["describe_screen", "reflection", "summary", "planning", "tactical", "expectation", "refine"]
        {
            let vars = BTreeMap::new();
            let rendered = set.render_user(task, &vars).unwrap();
            assert!(rendered.starts_with(&format!("TASK: {task}")), "{task} marker missing");
        }
        assert!(set.instruction_template("grounding").unwrap().contains("{label}"));
    }

    #[test]
    fn render_substitutes_and_keeps_unknown() {
        let mut vars = BTreeMap::new();
        vars.insert("goal", "create a contact".to_string());
        assert_eq!(
            render("do {goal} and {mystery}", &vars),
            "do create a contact and {mystery}"
        );
    }

    #[test]
    fn summary_template_has_no_action_slot() {
        // The summary prompt must not receive the step action.
        let set = TemplateSet::builtin();
        let raw = set.user.get("summary").unwrap();
        assert!(!raw.contains("{action}"));
        assert!(set.user.get("planning").unwrap().contains("{action}"));
    }
}
