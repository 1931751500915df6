// compprobe: compositionality prediction sweep over contextual embeddings.
//
//   compprobe prepare --gold gold.tsv --corpus 'corpus/*.txt' --out prep/
//   compprobe sweep   --gold gold.tsv --embeddings emb/ --out results/
//   compprobe report  --gold gold.tsv --from results/ --out report/
//   compprobe synth   --out fixture/

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "compprobe/commands.hpp"
#include "compprobe/errors.hpp"

namespace {

using compprobe::RunConfig;

// Flag values are kept as strings and applied over the config file, so a
// flag always wins regardless of where --config appears.
struct Overrides {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<std::string> corpus;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_file.empty()) compprobe::load_config_file(config_file, cfg);
    for (const auto& [k, v] : values) compprobe::set_config_value(cfg, k, v);
    if (!corpus.empty()) cfg.corpus = corpus;
    return cfg;
  }
};

void common_options(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config_file, "key = value config file");
  o.add(app, "--gold", "gold", "gold-standard TSV");
  o.add(app, "--gold-columns", "gold_columns",
        "header names for compound,modifier,head,rating_modifier,rating_head");
  o.add(app, "--out", "out", "output directory");
  o.add(app, "--seed", "seed", "sampling seed");
  o.add(app, "--threads", "threads", "worker threads (0 = OpenMP default)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noun compound compositionality from contextual embedding geometry"};
  app.require_subcommand(1);

  Overrides prepare_o, sweep_o, report_o;
  std::string report_from;

  auto* prepare = app.add_subcommand("prepare", "scan corpus, split compounds, sample sentences");
  common_options(prepare, prepare_o);
  prepare->add_option("--corpus", prepare_o.corpus, "corpus files or glob patterns");
  prepare_o.add(prepare, "--cap", "cap", "sentences per compound (default 100)");
  prepare_o.add(prepare, "--max-tokens", "max_tokens", "token limit recorded for extraction");

  auto* sweep = app.add_subcommand("sweep", "evaluate every variant x span x estimate");
  common_options(sweep, sweep_o);
  sweep_o.add(sweep, "--embeddings", "embeddings", "directory of <compound>.<variant>.cemb files");
  sweep_o.add(sweep, "--manifest", "manifest", "manifest whose compounds must have embeddings");
  sweep_o.add(sweep, "--variants", "variants", "comma-separated: cased,uncased");
  sweep_o.add(sweep, "--top-k", "top_k", "rows in the best-config tables (default 5)");

  auto* report = app.add_subcommand("report", "re-render analyses from a sweep directory");
  common_options(report, report_o);
  report->add_option("--from", report_from, "directory holding sweep.tsv and predictions.tsv")
      ->required();
  report_o.add(report, "--top-k", "top_k", "rows in the best-config tables (default 5)");

  compprobe::SyntheticOptions synth_o;
  std::string synth_out = "fixture";
  bool synth_identical = false;
  auto* synth = app.add_subcommand("synth", "write a planted-signal fixture");
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--compounds", synth_o.n_compounds, "number of compounds");
  synth->add_option("--sentences", synth_o.sentences_per_compound, "sentences per compound");
  synth->add_option("--dim", synth_o.dim, "vector dimension");
  synth->add_option("--layers", synth_o.n_layers, "layers");
  synth->add_option("--seed", synth_o.seed, "generator seed");
  synth->add_flag("--identical-variants", synth_identical, "cased embeddings copy uncased");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : compprobe::kExitValidation;
  }

  return compprobe::run_command(std::cerr, [&] {
    if (*prepare) {
      compprobe::cmd_prepare(prepare_o.resolve(), std::cerr);
    } else if (*sweep) {
      compprobe::cmd_sweep(sweep_o.resolve(), std::cerr);
    } else if (*report) {
      compprobe::cmd_report(report_o.resolve(), report_from, std::cerr);
    } else if (*synth) {
      synth_o.identical_variants = synth_identical;
      compprobe::cmd_synth(synth_o, synth_out, std::cerr);
    }
  });
}
