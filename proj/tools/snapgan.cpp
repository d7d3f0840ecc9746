// snapgan command-line entry point.
//
// Exit codes: 0 success, 1 usage error, 2 data validation error,
// 3 numeric failure (NaN/Inf, or a failed gradient check).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "snapgan/autodiff/gradcheck.hpp"
#include "snapgan/bench/corpus.hpp"
#include "snapgan/bench/synthetic.hpp"
#include "snapgan/common/errors.hpp"
#include "snapgan/eval/evaluate.hpp"
#include "snapgan/graph/io.hpp"
#include "snapgan/model/gradcheck_cases.hpp"
#include "snapgan/model/serialization.hpp"
#include "snapgan/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace snapgan;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumeric = 3;

struct Global {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out;
};

struct CorpusArgs {
  std::string corpus_dir;
  std::string edges, attrs, snapshots;
  bool attrs_header = false;
  bool directed = false;
};

struct Settings {
  train::TrainConfig train;
  model::ArchitectureConfig arch;
  bench::InjectionSpec injection;
  bench::SyntheticGraphSpec synthetic;
  nlohmann::json eval = nlohmann::json::object();
};

Settings load_settings(const Global& g) {
  Settings s;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    if (!in) throw DataError("cannot open config " + g.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("config " + g.config_path + ": " + e.what());
    }
    if (!j.is_object()) throw DataError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "train") s.train = train::train_config_from_json(value);
      else if (key == "architecture") s.arch = model::architecture_from_json(value);
      else if (key == "injection") s.injection = bench::injection_spec_from_json(value);
      else if (key == "synthetic") s.synthetic = bench::synthetic_spec_from_json(value);
      else if (key == "eval") s.eval = value;
      else throw DataError("unknown config section '" + key + "'");
    }
  }
  if (g.seed) {
    s.train.seed = *g.seed;
    s.injection.seed = *g.seed;
    s.synthetic.seed = *g.seed;
  }
  return s;
}

void add_corpus_options(CLI::App* cmd, CorpusArgs& args) {
  cmd->add_option("--corpus", args.corpus_dir, "Corpus directory (edges.tsv, attributes.csv, snapshots.jsonl)");
  cmd->add_option("--edges", args.edges, "Edge list TSV");
  cmd->add_option("--attrs", args.attrs, "Attribute CSV");
  cmd->add_option("--snapshots", args.snapshots, "Snapshot manifest JSONL");
  cmd->add_flag("--attrs-header", args.attrs_header, "Attribute CSV has a header line");
  cmd->add_flag("--directed", args.directed, "Treat edges as directed");
}

bench::LoadedCorpus load_corpus(const CorpusArgs& args) {
  if (!args.corpus_dir.empty()) {
    if (!args.edges.empty() || !args.attrs.empty() || !args.snapshots.empty()) {
      throw CLI::ValidationError("--corpus cannot be combined with --edges/--attrs/--snapshots");
    }
    return bench::read_corpus(args.corpus_dir, args.directed);
  }
  if (args.edges.empty() || args.attrs.empty() || args.snapshots.empty()) {
    throw CLI::ValidationError("need --corpus or all of --edges, --attrs, --snapshots");
  }
  auto edges = graph::io::read_edge_list(args.edges);
  auto attrs = graph::io::read_attributes(args.attrs, args.attrs_header);
  graph::Graph g = graph::Graph::build(std::move(edges), std::move(attrs), args.directed);
  const auto entries = graph::io::read_manifest(args.snapshots);
  auto snapshots = graph::io::materialize(g, entries);
  return {std::move(g), {std::move(snapshots), {}}};
}

fs::path require_out(const Global& g) {
  if (g.out.empty()) throw CLI::ValidationError("--out is required");
  return g.out;
}

std::size_t count_label(const std::vector<graph::Snapshot>& xs, graph::Label label) {
  std::size_t n = 0;
  for (const auto& s : xs) n += s.label == label;
  return n;
}

void print_corpus_summary(const bench::LoadedCorpus& c) {
  const auto& xs = c.corpus.snapshots;
  std::cout << "vertices " << c.graph.vertex_count() << " edges " << c.graph.edges().size()
            << " attribute_dim " << c.graph.attribute_dim() << " snapshots " << xs.size()
            << " anomalous " << count_label(xs, graph::Label::kAnomalous) << " normal "
            << count_label(xs, graph::Label::kNormal) << '\n';
}

int run_ingest(const Global& g, const CorpusArgs& args) {
  const auto loaded = load_corpus(args);
  for (const auto& s : loaded.corpus.snapshots) graph::validate(s);
  const fs::path out = require_out(g);
  bench::write_corpus(out, loaded.graph, loaded.corpus);
  print_corpus_summary(loaded);
  return 0;
}

int run_forge(const Global& g, const CorpusArgs& args) {
  const Settings settings = load_settings(g);
  graph::Graph base = [&] {
    if (!args.corpus_dir.empty() || !args.edges.empty()) {
      if (!args.edges.empty() && !args.attrs.empty() && args.snapshots.empty()) {
        auto edges = graph::io::read_edge_list(args.edges);
        auto attrs = graph::io::read_attributes(args.attrs, args.attrs_header);
        return graph::Graph::build(std::move(edges), std::move(attrs), args.directed);
      }
      return load_corpus(args).graph;
    }
    return bench::community_graph(settings.synthetic);
  }();
  auto forged = bench::build_injected_corpus(base, settings.injection);
  const fs::path out = require_out(g);
  bench::write_corpus(out, forged.graph, forged.corpus);
  nlohmann::json spec{{"injection", bench::to_json(settings.injection)}};
  if (args.corpus_dir.empty() && args.edges.empty()) spec["synthetic"] = bench::to_json(settings.synthetic);
  std::ofstream(out / "forge.json") << spec.dump(2) << '\n';
  print_corpus_summary({std::move(forged.graph), std::move(forged.corpus)});
  return 0;
}

int run_train(const Global& g, const CorpusArgs& args) {
  const Settings settings = load_settings(g);
  const auto loaded = load_corpus(args);
  const fs::path out = require_out(g);
  const auto state = train::train_to_directory(loaded.corpus.snapshots, loaded.graph,
                                               settings.train, settings.arch, out);
  std::cout << "generator_epochs " << state.generator_epochs << " discriminator_epochs "
            << state.discriminator_epochs;
  if (!state.discriminator_loss_history.empty())
    std::cout << " final_discriminator_loss " << state.discriminator_loss_history.back();
  if (!state.mean_reward_history.empty())
    std::cout << " final_mean_reward " << state.mean_reward_history.back();
  std::cout << "\nwrote " << out.string() << '\n';
  return 0;
}

std::string ranking_csv(const eval::RankedResult& r) {
  std::ostringstream out;
  out << std::setprecision(17) << "rank,snapshot_id,score\n";
  for (std::size_t i = 0; i < r.ids.size(); ++i)
    out << i + 1 << ',' << r.ids[i] << ',' << r.scores[i] << '\n';
  return out.str();
}

int run_rank(const Global& g, const CorpusArgs& args, const std::string& run_dir,
             const std::string& ranker_name) {
  const Settings settings = load_settings(g);
  const auto ranker = eval::ranker_from_string(ranker_name);
  const auto loaded = load_corpus(args);
  std::optional<train::TrainState> state;
  if (ranker == eval::RankerKind::kGan || ranker == eval::RankerKind::kDiscOnly) {
    if (run_dir.empty()) throw CLI::ValidationError("--run is required for ranker " + ranker_name);
    state = train::TrainState{model::load_model(fs::path(run_dir) / "generator.ckpt"),
                              model::load_model(fs::path(run_dir) / "discriminator.ckpt")};
  }
  Rng rng(settings.train.seed, 1000);
  const auto ranked = eval::rank_pool(ranker, loaded.corpus.snapshots, loaded.graph,
                                      state ? &*state : nullptr, rng);
  for (double s : ranked.scores)
    if (!std::isfinite(s)) throw NumericError("ranking produced a non-finite score");
  const std::string csv = ranking_csv(ranked);
  if (g.out.empty()) {
    std::cout << csv;
  } else {
    fs::create_directories(g.out);
    std::ofstream(fs::path(g.out) / "ranking.csv") << csv;
    std::cout << "wrote " << (fs::path(g.out) / "ranking.csv").string() << '\n';
  }
  return 0;
}

struct EvalArgs {
  std::vector<std::size_t> ks;
  std::optional<std::size_t> folds;
  std::string protocol, ranker;
  bool disc_only = false;
};

int run_eval(const Global& g, const CorpusArgs& args, const EvalArgs& e) {
  const Settings settings = load_settings(g);
  eval::EvalConfig config;
  config.train = settings.train;
  config.arch = settings.arch;
  const auto& j = settings.eval;
  if (!j.is_object()) throw DataError("eval config must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "ks") config.ks = value.get<std::vector<std::size_t>>();
      else if (key == "folds") config.folds = value.get<std::size_t>();
      else if (key == "protocol") config.protocol = eval::protocol_from_string(value.get<std::string>());
      else if (key == "ranker") config.ranker = eval::ranker_from_string(value.get<std::string>());
      else if (key == "seed") config.seed = value.get<std::uint64_t>();
      else throw DataError("unknown eval config key '" + key + "'");
    } catch (const nlohmann::json::exception& ex) {
      throw DataError("eval config '" + key + "': " + ex.what());
    } catch (const std::invalid_argument& ex) {
      throw DataError("eval config '" + key + "': " + ex.what());
    }
  }
  if (g.seed) config.seed = *g.seed;
  if (!e.ks.empty()) config.ks = e.ks;
  if (e.folds) config.folds = *e.folds;
  if (!e.protocol.empty()) config.protocol = eval::protocol_from_string(e.protocol);
  if (!e.ranker.empty()) config.ranker = eval::ranker_from_string(e.ranker);
  if (e.disc_only) config.ranker = eval::RankerKind::kDiscOnly;

  const auto loaded = load_corpus(args);
  const auto report = eval::evaluate(loaded.graph, loaded.corpus.snapshots, config);
  if (!g.out.empty()) {
    eval::write_report(g.out, report);
    for (const auto& r : report.rankings) {
      std::ofstream(fs::path(g.out) / ("ranking_fold" + std::to_string(r.fold) + ".csv"))
          << ranking_csv(r);
    }
  }
  std::cout << "ranker " << eval::to_string(report.ranker) << " protocol "
            << eval::to_string(report.protocol) << '\n';
  for (const auto& s : report.summary) {
    std::cout << "K " << s.k << " precision " << s.precision_mean << " +- " << s.precision_std
              << " recall " << s.recall_mean << " +- " << s.recall_std << " folds " << s.folds
              << '\n';
  }
  return 0;
}

int run_grad_check(const Global& g, std::size_t instances) {
  auto cases = ad::primitive_gradcheck_cases();
  ad::GradCheckOptions options;
  auto reports = ad::run_gradcheck_cases(cases, instances, g.seed.value_or(0), options);
  const auto scorer_cases = model::scorer_gradcheck_cases();
  ad::GradCheckOptions scorer_options;
  scorer_options.skip_nonsmooth = true;
  const auto more = ad::run_gradcheck_cases(scorer_cases, instances, g.seed.value_or(0), scorer_options);
  reports.insert(reports.end(), more.begin(), more.end());
  bool ok = true;
  for (const auto& r : reports) {
    std::cout << (r.passed ? "ok   " : "FAIL ") << std::left << std::setw(24) << r.name
              << " instances " << r.instances << " entries " << r.entries_checked << " skipped "
              << r.entries_skipped << " worst_rel_error " << std::scientific
              << std::setprecision(3) << r.worst_rel_error << std::defaultfloat << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial ranking of anomalous snapshots in attributed graphs"};
  app.require_subcommand(1);
  Global global;
  app.add_option("--seed", global.seed, "Seed for training, injection and evaluation");
  app.add_option("--config", global.config_path,
                 "JSON config with optional sections train, architecture, injection, synthetic, eval")
      ->check(CLI::ExistingFile);
  app.add_option("--out", global.out, "Output directory");

  CorpusArgs corpus;
  auto* ingest = app.add_subcommand("ingest", "Validate TSV/CSV/JSONL inputs and write a corpus directory");
  add_corpus_options(ingest, corpus);

  auto* forge = app.add_subcommand(
      "forge", "Inject planted anomalies into a graph (synthetic when no input is given)");
  add_corpus_options(forge, corpus);

  auto* train_cmd = app.add_subcommand("train", "Adversarial training; writes a run directory");
  add_corpus_options(train_cmd, corpus);

  std::string run_dir, ranker = "gan";
  auto* rank = app.add_subcommand("rank", "Rank a corpus with a trained run or a baseline");
  add_corpus_options(rank, corpus);
  rank->add_option("--run", run_dir, "Run directory written by train");
  rank->add_option("--ranker", ranker, "gan, disc-only, degree-sum, random or oracle");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Train and evaluate precision@K / recall@K");
  add_corpus_options(eval_cmd, corpus);
  eval_cmd->add_option("--k", eval_args.ks, "Cutoffs K")->delimiter(',');
  eval_cmd->add_option("--folds", eval_args.folds, "Cross-validation folds");
  eval_cmd->add_option("--protocol", eval_args.protocol, "cross-validation (cv) or transductive");
  eval_cmd->add_option("--ranker", eval_args.ranker, "gan, disc-only, degree-sum, random or oracle");
  eval_cmd->add_flag("--disc-only", eval_args.disc_only, "Rank with discriminator probabilities");

  std::size_t instances = 100;
  auto* grad = app.add_subcommand("grad-check", "Finite-difference gradient suite");
  grad->add_option("--instances", instances, "Random instances per case");

  // Global flags are accepted after the subcommand too.
  for (auto* sub : {ingest, forge, train_cmd, rank, eval_cmd, grad}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*ingest) return run_ingest(global, corpus);
    if (*forge) return run_forge(global, corpus);
    if (*train_cmd) return run_train(global, corpus);
    if (*rank) return run_rank(global, corpus, run_dir, ranker);
    if (*eval_cmd) return run_eval(global, corpus, eval_args);
    if (*grad) return run_grad_check(global, instances);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
