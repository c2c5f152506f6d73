//! Markdown rendering of CVs with a fixed template.

use std::fmt::Write as _;
use std::path::Path;

use crate::contentgen::SyntheticCv;
use crate::corpus::{format_duration, ParsedCV};
use crate::error::Result;

fn item(out: &mut String, title: &str, institution: Option<&str>, period: &str) {
    match institution {
        Some(inst) => writeln!(out, "- **{title}**, {inst} ({period})"),
        None => writeln!(out, "- **{title}** ({period})"),
    }
    .expect("writing to a String");
}

/// Render a CV as Markdown: one heading per section, one bullet per item.
pub fn render_markdown(cv: &ParsedCV) -> String {
    let mut out = String::from("# Curriculum Vitae\n\n## Education\n\n");
    for e in &cv.education_background {
        let period = format!("{} - {}", e.start_date.long_form(), e.end_date.long_form());
        item(&mut out, &e.degree, e.institution.as_deref(), &period);
    }
    out.push_str("\n## Professional Experience\n\n");
    for e in &cv.professional_experience {
        let period = format!(
            "{} - {}, {}",
            e.start_date.long_form(),
            e.end_date.long_form(),
            format_duration(e.duration_months)
        );
        item(&mut out, &e.role, e.institution.as_deref(), &period);
        if let Some(d) = e.description.as_deref().filter(|d| !d.trim().is_empty()) {
            writeln!(out, "  {}", d.trim()).expect("writing to a String");
        }
    }
    out.push_str("\n## Skills\n");
    let s = &cv.skills;
    let groups = [
        ("Hard skills", &s.hard),
        ("Soft skills", &s.soft),
        ("Languages", &s.languages),
        ("Other skills", &s.others),
    ];
    let used = groups.iter().filter(|(_, v)| !v.is_empty()).count();
    for (title, list) in groups {
        if list.is_empty() {
            continue;
        }
        // a lone list needs no subheading
        if used > 1 {
            write!(out, "\n### {title}\n").expect("writing to a String");
        }
        out.push('\n');
        for skill in list {
            writeln!(out, "- {skill}").expect("writing to a String");
        }
    }
    out
}

/// Write `<id>.md` for every CV into `dir`.
pub fn render_dataset(cvs: &[SyntheticCv], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for s in cvs {
        std::fs::write(dir.join(format!("{}.md", s.id)), render_markdown(&s.cv))?;
    }
    Ok(())
}
