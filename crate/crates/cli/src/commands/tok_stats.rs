use std::path::Path;

use orthoprobe::analysis::{
    compare_distributions, length_distribution, svg, LengthHistogram,
};
use orthoprobe::error::Result;
use orthoprobe::noiser::NoisePair;

use crate::config::RunConfig;
use crate::stage_io::{meta_comment, read_jsonl, write_text};

/// Writes `lengths.csv`, `length_summary.json`, and optionally
/// `lengths.svg` under the output directory.
pub fn run(config: &RunConfig, pairs_path: &Path, out_dir: &Path, render: bool) -> Result<()> {
    let pairs: Vec<NoisePair> = read_jsonl(pairs_path)?;
    let tokenizer = config.load_tokenizer()?;

    let original: LengthHistogram = length_distribution(
        pairs.iter().map(|p| p.original.as_str()),
        &tokenizer,
        config.word_initial,
        false,
    );
    let noised: LengthHistogram = length_distribution(
        pairs.iter().map(|p| p.edited.as_str()),
        &tokenizer,
        config.word_initial,
        true,
    );
    let summary = compare_distributions(&original, &noised)?;

    let meta = meta_comment(config);
    write_text(
        &out_dir.join("lengths.csv"),
        &orthoprobe::analysis::write_histogram_csv(&[&original, &noised], &meta),
    )?;
    write_text(
        &out_dir.join("length_summary.json"),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&summary).expect("summary serializes")
        ),
    )?;
    if render {
        write_text(
            &out_dir.join("lengths.svg"),
            &svg::render_histogram_chart(&original, &noised, "Token lengths, original vs noised"),
        )?;
    }
    eprintln!(
        "token lengths over {} pairs: mean {:.4} -> {:.4}, share>=3 {:.4} -> {:.4}",
        original.total,
        summary.original.mean,
        summary.noised.mean,
        summary.original.share_ge3,
        summary.noised.share_ge3,
    );
    Ok(())
}
