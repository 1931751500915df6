#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "compprobe/analytics.hpp"

namespace compprobe {

// Written as the first line of every output: "# compprobe <kind> config_hash=<hex> seed=<n>".
struct OutputStamp {
  std::string config_hash;
  std::uint64_t seed = 0;

  std::string line(std::string_view kind) const;
};

// Reads a stamp back from the first line of an output file.
std::optional<OutputStamp> parse_stamp(std::string_view line);

// Shortest decimal that round-trips; "NA" for NaN.
std::string format_real(double v);

void write_predictions_tsv(std::ostream& out, const PredictionTable& p, const OutputStamp& stamp);
PredictionTable read_predictions_tsv(std::istream& in, const GoldDataset& gold);

void write_sweep_tsv(std::ostream& out, const SweepTable& t, const OutputStamp& stamp);
SweepTable read_sweep_tsv(std::istream& in);

void write_best_configs_tsv(std::ostream& out, const std::vector<SweepResult>& rows,
                            GoldColumn column, const OutputStamp& stamp);
void write_estimate_matrix_tsv(std::ostream& out, const TargetMatrix& m, GoldColumn column,
                               const OutputStamp& stamp);

// Rows are end layers, columns start layers; undefined cells are "NA".
void write_span_matrix_tsv(std::ostream& out, const SpanMatrix& m, std::string_view kind,
                           const OutputStamp& stamp);

struct CrossModelReport {
  GoldColumn column;
  GroupBy group_by;
  Pairing pairing;
  CrossModelResult result;
};
void write_cross_model_tsv(std::ostream& out, const std::vector<CrossModelReport>& reports,
                           const OutputStamp& stamp);

// Lower-triangular grid: start layer on x, end layer on y, diverging
// blue-white-red scale centred at 0, values printed in each cell. NaN cells
// are drawn blank. Throws PreconditionError on an empty matrix.
std::string render_heatmap(const SpanMatrix& m, std::string_view title, const OutputStamp& stamp);

}  // namespace compprobe
