#include "compprobe/commands.hpp"

#include <fstream>
#include <ostream>
#include <set>

#include "compprobe/corpus_prep.hpp"
#include "compprobe/errors.hpp"
#include "compprobe/gold_standard.hpp"
#include "compprobe/sweep_kernels.hpp"

namespace compprobe {

namespace {

namespace fs = std::filesystem;

GoldDataset load_gold_for(const RunConfig& cfg) {
  if (cfg.gold.empty()) throw MissingInputError("no gold file given");
  const GoldColumns columns = cfg.gold_columns.empty() ? GoldColumns{}
                                                       : GoldColumns::parse(cfg.gold_columns);
  return load_gold(cfg.gold, columns);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MissingInputError("cannot write " + path.string());
  return out;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  auto out = open_out(path);
  fn(out);
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

OutputStamp stamp_for(const RunConfig& cfg) { return {config_hash(cfg), cfg.seed}; }

}  // namespace

int run_command(std::ostream& log, const std::function<void()>& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const MissingInputError& e) {
    log << "error: " << e.what() << '\n';
    return kExitMissingInput;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

void cmd_prepare(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  const GoldDataset gold = load_gold_for(cfg);
  if (cfg.corpus.empty()) throw MissingInputError("no corpus given");
  const auto shards = expand_shards(cfg.corpus);
  if (shards.empty()) throw MissingInputError("corpus pattern matched no files");
  for (const auto& s : shards) {
    if (!fs::is_regular_file(s)) throw MissingInputError("cannot read corpus shard " + s.string());
  }

  auto prepared = prepare_corpus(shards, gold, cfg.cap, cfg.seed, cfg.threads);
  prepared.manifest.config_hash = config_hash(cfg);
  prepared.manifest.max_tokens = cfg.max_tokens;

  fs::create_directories(cfg.out);
  write_file(cfg.out / "manifest.jsonl",
             [&](std::ostream& out) { write_manifest(out, prepared.manifest); });
  const auto stamp = stamp_for(cfg);
  std::size_t uncovered = 0;
  write_file(cfg.out / "coverage.tsv", [&](std::ostream& out) {
    out << stamp.line("coverage") << '\n';
    out << "compound\tmatched\texcluded_multiple\texcluded_no_context\tsampled\n";
    for (const auto& c : prepared.coverage) {
      out << c.compound << '\t' << c.matched << '\t' << c.excluded_multiple << '\t'
          << c.excluded_no_context << '\t' << c.sampled << '\n';
      if (c.sampled == 0) ++uncovered;
    }
  });
  log << "prepare: " << prepared.manifest.groups.size() << " of " << gold.size()
      << " compounds have sentences; " << uncovered << " without corpus occurrences\n";
}

void write_analyses(const fs::path& dir, const SweepTable& table,
                    const PredictionTable& predictions, std::size_t top_k,
                    const OutputStamp& stamp) {
  fs::create_directories(dir);
  for (GoldColumn col : kAllColumns) {
    const std::string c(to_string(col));
    write_file(dir / ("best_" + c + ".tsv"), [&](std::ostream& out) {
      write_best_configs_tsv(out, best_configs(table, col, top_k), col, stamp);
    });
    write_file(dir / ("estimate_matrix_" + c + ".tsv"), [&](std::ostream& out) {
      write_estimate_matrix_tsv(out, estimate_matrix(table, col), col, stamp);
    });
    for (ModelVariant v : table.variants) {
      const std::string name = "heatmap_" + std::string(to_string(v)) + "_" + c;
      const auto m = span_heatmap(table, col, v);
      write_file(dir / (name + ".tsv"),
                 [&](std::ostream& out) { write_span_matrix_tsv(out, m, name, stamp); });
      write_file(dir / (name + ".svg"), [&](std::ostream& out) {
        out << render_heatmap(m, "Mean rho per layer span: " + std::string(to_string(v)) + ", " + c,
                              stamp);
      });
    }
  }

  const bool both = table.has_variant(ModelVariant::kCased) &&
                    table.has_variant(ModelVariant::kUncased);
  if (both) {
    std::vector<CrossModelReport> reports;
    for (GoldColumn col : kAllColumns) {
      const std::string name = "casing_delta_" + std::string(to_string(col));
      const auto d = casing_delta(table, col);
      write_file(dir / (name + ".tsv"),
                 [&](std::ostream& out) { write_span_matrix_tsv(out, d, name, stamp); });
      write_file(dir / (name + ".svg"), [&](std::ostream& out) {
        out << render_heatmap(d, "Cased minus uncased mean rho: " + std::string(to_string(col)),
                              stamp);
      });
      for (Pairing pairing : {Pairing::kValue, Pairing::kRho}) {
        for (GroupBy g : {GroupBy::kNone, GroupBy::kSpan, GroupBy::kEstimate}) {
          reports.push_back(
              {col, g, pairing, cross_model_correlation(table, predictions, g, pairing, col)});
        }
      }
    }
    write_file(dir / "cross_model.tsv",
               [&](std::ostream& out) { write_cross_model_tsv(out, reports, stamp); });
  }

  write_file(dir / "summary.tsv", [&](std::ostream& out) {
    out << stamp.line("summary") << '\n';
    out << "model_variant\tcolumn\tmedian\tmin\tmax\n";
    for (ModelVariant v : table.variants) {
      for (GoldColumn col : kAllColumns) {
        const auto s = summary_stats(table, v, col);
        out << to_string(v) << '\t' << to_string(col) << '\t' << format_real(s.median) << '\t'
            << format_real(s.min) << '\t' << format_real(s.max) << '\n';
      }
    }
  });

  // agreement between the best modifier and best head configurations
  const auto best_mod = best_configs(table, GoldColumn::kModifier, 1);
  const auto best_head = best_configs(table, GoldColumn::kHead, 1);
  if (!best_mod.empty() && !best_head.empty()) {
    const ConfigKey a{best_mod[0].variant, best_mod[0].span, best_mod[0].estimate};
    const ConfigKey b{best_head[0].variant, best_head[0].span, best_head[0].estimate};
    write_file(dir / "prediction_correlation.tsv", [&](std::ostream& out) {
      out << stamp.line("prediction_correlation") << '\n';
      out << "config_a\tconfig_b\trho\n";
      out << to_string(a.variant) << ' ' << to_string(a.span) << ' ' << to_string(a.estimate)
          << '\t' << to_string(b.variant) << ' ' << to_string(b.span) << ' '
          << to_string(b.estimate) << '\t'
          << format_real(prediction_cross_correlation(predictions, a, b)) << '\n';
    });
  }
}

void cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  const GoldDataset gold = load_gold_for(cfg);
  if (cfg.embeddings.empty() || !fs::is_directory(cfg.embeddings)) {
    throw MissingInputError("embeddings directory not found: " + cfg.embeddings.string());
  }

  // With a manifest, its compounds must have files; other compounds may be
  // absent (no corpus occurrences) and are only counted.
  std::set<std::string> expected;
  const bool strict = !cfg.manifest.empty();
  if (strict) {
    std::ifstream in(cfg.manifest, std::ios::binary);
    if (!in) throw MissingInputError("cannot open manifest " + cfg.manifest.string());
    for (const auto& g : read_manifest(in).groups) expected.insert(g.compound);
  }

  std::vector<PredictionTask> tasks;
  std::vector<std::string> missing;
  std::size_t skipped = 0;
  for (ModelVariant v : cfg.variants) {
    for (const auto& e : gold.entries()) {
      const fs::path path = cfg.embeddings / embedding_file_name(e.compound, v);
      if (fs::is_regular_file(path)) {
        tasks.push_back({e.compound, v, path});
      } else if (strict && expected.contains(e.compound)) {
        missing.push_back(path.string());
      } else {
        ++skipped;
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " embedding file(s) missing:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw MissingInputError(msg);
  }
  if (tasks.empty()) throw MissingInputError("no embedding files in " + cfg.embeddings.string());
  if (skipped > 0) {
    log << "sweep: warning: " << skipped
        << " (compound, variant) pairs have no embedding file and are excluded\n";
  }

  auto table = PredictionTable::build(gold, predict_all(tasks, cfg.threads));
  for (ModelVariant v : cfg.variants) {
    log << "sweep: " << to_string(v) << ": " << table.count(v) << " of " << gold.size()
        << " compounds evaluable\n";
  }
  const auto sweep = run_sweep(gold, table, cfg.variants);
  const auto stamp = stamp_for(cfg);

  fs::create_directories(cfg.out);
  write_file(cfg.out / "predictions.tsv",
             [&](std::ostream& out) { write_predictions_tsv(out, table, stamp); });
  write_file(cfg.out / "sweep.tsv", [&](std::ostream& out) { write_sweep_tsv(out, sweep, stamp); });
  write_analyses(cfg.out, sweep, table, cfg.top_k, stamp);
  log << "sweep: wrote " << sweep.rows.size() << " rows to " << (cfg.out / "sweep.tsv").string()
      << '\n';
}

void cmd_report(const RunConfig& cfg, const fs::path& sweep_dir, std::ostream& log) {
  const GoldDataset gold = load_gold_for(cfg);
  std::ifstream sweep_in(sweep_dir / "sweep.tsv", std::ios::binary);
  if (!sweep_in) throw MissingInputError("cannot open " + (sweep_dir / "sweep.tsv").string());
  std::ifstream pred_in(sweep_dir / "predictions.tsv", std::ios::binary);
  if (!pred_in) throw MissingInputError("cannot open " + (sweep_dir / "predictions.tsv").string());

  // keep the stamp of the run that produced the sweep
  std::string first;
  std::getline(sweep_in, first);
  const auto stamp = parse_stamp(first).value_or(stamp_for(cfg));
  sweep_in.seekg(0);

  const auto table = read_sweep_tsv(sweep_in);
  const auto predictions = read_predictions_tsv(pred_in, gold);
  write_analyses(cfg.out, table, predictions, cfg.top_k, stamp);
  log << "report: wrote analyses for " << table.rows.size() << " sweep rows to "
      << cfg.out.string() << '\n';
}

void cmd_synth(const SyntheticOptions& options, const fs::path& dir, std::ostream& log) {
  const auto fx = make_synthetic_fixture(options);
  write_synthetic_fixture(fx, dir);
  log << "synth: wrote " << fx.gold.size() << " compounds and " << fx.tensors.size()
      << " embedding files to " << dir.string() << '\n';
}

}  // namespace compprobe
