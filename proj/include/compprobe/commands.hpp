#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include "compprobe/analytics.hpp"
#include "compprobe/config.hpp"
#include "compprobe/report.hpp"
#include "compprobe/synthetic.hpp"

namespace compprobe {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitMissingInput = 2 };

// Runs `fn`, logs any error to `log`, and maps it to an exit code:
// missing inputs -> 2, everything else -> 1.
int run_command(std::ostream& log, const std::function<void()>& fn);

// scan -> split -> sample; writes manifest.jsonl and coverage.tsv into cfg.out.
void cmd_prepare(const RunConfig& cfg, std::ostream& log);

// Embeddings -> predictions.tsv, sweep.tsv and every analysis into cfg.out.
void cmd_sweep(const RunConfig& cfg, std::ostream& log);

// Re-renders the analyses from an earlier sweep directory into cfg.out.
void cmd_report(const RunConfig& cfg, const std::filesystem::path& sweep_dir, std::ostream& log);

// Writes a planted-signal fixture (gold.tsv + embeddings/) into `dir`.
void cmd_synth(const SyntheticOptions& options, const std::filesystem::path& dir,
               std::ostream& log);

// Best configs, estimate matrices, heatmaps, casing deltas, cross-model
// correlations, summary statistics.
void write_analyses(const std::filesystem::path& dir, const SweepTable& table,
                    const PredictionTable& predictions, std::size_t top_k,
                    const OutputStamp& stamp);

}  // namespace compprobe
