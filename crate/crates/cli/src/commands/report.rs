use std::path::Path;

use orthoprobe::analysis::{bin_records, svg, write_report_csv, SimilarityRecord};
use orthoprobe::error::Result;

use crate::config::RunConfig;
use crate::stage_io::{meta_comment, read_jsonl, write_text};

pub fn run(config: &RunConfig, records_path: &Path, out: &Path, render: bool) -> Result<()> {
    let records: Vec<SimilarityRecord> = read_jsonl(records_path)?;
    if records.is_empty() {
        log::warn!("no similarity records in {}", records_path.display());
    }
    let report = bin_records(&records, config.max_bin)?;
    write_text(out, &write_report_csv(&report, &meta_comment(config)))?;
    if render {
        let dir = out.parent().unwrap_or_else(|| Path::new("."));
        for group in &report.groups {
            let name = format!(
                "report_{}_{}.svg",
                group.measure,
                if group.with_context { "context" } else { "nocontext" }
            );
            write_text(&dir.join(name), &svg::render_group_chart(&report, group))?;
        }
    }
    eprintln!(
        "report over {} records -> {} groups",
        records.len(),
        report.groups.len()
    );
    Ok(())
}
