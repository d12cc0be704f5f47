#include "polyfs/cli.h"

#include <charconv>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "polyfs/error.h"
#include "polyfs/objective.h"
#include "polyfs/polygon.h"
#include "polyfs/random.h"
#include "polyfs/report.h"
#include "polyfs/sweep.h"

namespace polyfs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

LabelColumn parse_label_column(const std::string &text) {
  int index = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), index);
  if (ec == std::errc() && ptr == text.data() + text.size()) return index;
  return text;
}

void ensure_dir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

json data_json(const DataInput &in, const Dataset &ds) {
  return {{"path", in.path.string()},
          {"sha256", fingerprint(in.path)},
          {"label_col", in.label_col},
          {"delimiter", std::string(1, in.delimiter)},
          {"has_header", in.has_header},
          {"n_samples", ds.n_samples()},
          {"n_features", ds.n_features()},
          {"n_classes", ds.n_classes}};
}

json search_json(const SearchConfig &cfg, const Dataset &ds) {
  return {{"eps_grad", cfg.resolved_eps_grad(ds.n_features(), ds.n_classes)},
          {"dt_init", cfg.dt_init},
          {"dt_min", cfg.dt_min},
          {"dt_max", cfg.dt_max},
          {"rho", cfg.rho},
          {"delta", cfg.delta},
          {"mu", cfg.mu},
          {"max_iters", cfg.max_iters},
          {"init_seed", cfg.seed}};
}

fs::path write_manifest(const fs::path &out, const std::string &command,
                        std::uint64_t seed, json config, json dataset,
                        const std::string &started,
                        const std::vector<fs::path> &outputs) {
  json files = json::array();
  for (const auto &f : outputs) files.push_back(f.filename().string());
  const json manifest = {{"command", command},
                         {"tool_version", kVersion},
                         {"seed", seed},
                         {"config", std::move(config)},
                         {"dataset", std::move(dataset)},
                         {"outputs", files},
                         {"started_at", started},
                         {"finished_at", utc_now()}};
  const fs::path path = out / (command + ".manifest.json");
  write_file_atomic(path, manifest.dump(2) + "\n");
  return path;
}

const char *mode_name(SearchMode mode) {
  return mode == SearchMode::Hybrid ? "hybrid" : "plain";
}

}  // namespace

std::string fingerprint(const fs::path &path) {
  const std::string bytes = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw IoError("cannot hash " + path.string());
  }
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) {
    ss << std::hex << std::setw(2) << std::setfill('0')
       << static_cast<int>(digest[i]);
  }
  return ss.str();
}

Dataset load_input(const DataInput &in) {
  CsvOptions opts;
  opts.delimiter = in.delimiter;
  opts.has_header = in.has_header;
  return standardize(load_csv(in.path, parse_label_column(in.label_col), opts));
}

SearchConfig search_config(const SearchOverrides &overrides,
                           std::uint64_t seed) {
  SearchConfig cfg;
  cfg.eps_grad = overrides.eps_grad;
  if (overrides.max_iters) cfg.max_iters = *overrides.max_iters;
  if (overrides.dt_init) cfg.dt_init = *overrides.dt_init;
  cfg.seed = derive_seed(seed, kStreamInit, 0);
  cfg.validate();
  return cfg;
}

std::vector<fs::path> cmd_rank(const RankOptions &opts) {
  const std::string started = utc_now();
  const SimplexGrid grid = build_grid(opts.grid_step);
  const SearchConfig cfg = search_config(opts.search, opts.seed);
  const Dataset ds = load_input(opts.data);
  const CenteredProblem problem = build_problem(ds.features, one_hot(ds));

  SweepOptions sweep_opts;
  sweep_opts.normalize_curve = opts.normalize_curve;
  sweep_opts.threads = opts.threads;
  const SweepResult result = sweep(problem, grid, cfg, sweep_opts);
  const QuadrantWeights wq = quadrant_process(result.best_W);
  const FeatureRanking ranking = rank_features(wq);

  ensure_dir(opts.out);
  std::vector<fs::path> written;
  auto emit = [&](const std::string &name, const std::string &contents) {
    written.push_back(opts.out / name);
    write_file_atomic(written.back(), contents);
  };
  emit("ranking.csv", ranking_csv(ranking, ds));
  emit("ranking.json", ranking_json(ranking, ds));
  emit("sweep.csv", sweep_csv(result));
  emit("trace.csv", trace_csv(result.best_trace));
  emit("polygons.json", polygons_json(wq, ds));
  emit("dataset_meta.json", metadata_json(ds) + "\n");

  const SweepPoint &best = result.per_point[result.best];
  json config = {{"grid_step", opts.grid_step},
                 {"grid_points", grid.points.size()},
                 {"normalize_curve", opts.normalize_curve},
                 {"threads", opts.threads},
                 {"search", search_json(cfg, ds)},
                 {"best",
                  {{"alpha", best.weights.alpha()},
                   {"beta", best.weights.beta()},
                   {"gamma", best.weights.gamma()},
                   {"S", best.area},
                   {"iterations", best.iterations},
                   {"converged", best.converged}}}};
  written.push_back(write_manifest(opts.out, "rank", opts.seed,
                                   std::move(config),
                                   data_json(opts.data, ds), started, written));
  return written;
}

std::vector<fs::path> cmd_eval(const EvalOptions &opts) {
  const std::string started = utc_now();
  const Dataset ds = load_input(opts.data);
  const FeatureRanking ranking = parse_ranking_csv(read_file(opts.ranking));
  if (static_cast<Eigen::Index>(ranking.entries.size()) != ds.n_features()) {
    throw DataError("ranking covers " + std::to_string(ranking.entries.size()) +
                    " features but the dataset has " +
                    std::to_string(ds.n_features()));
  }

  EvalConfig cfg;
  cfg.n_trials = opts.trials;
  cfg.classifier = opts.classifier;
  cfg.knn_k = opts.knn_k;
  cfg.elimination_schedule = opts.sizes;
  cfg.base_seed = opts.seed;
  cfg.paired = opts.paired;
  cfg.threads = opts.threads;
  const EvalCurve curve = backward_eliminate(ds, ranking, cfg);

  ensure_dir(opts.out);
  std::vector<fs::path> written;
  written.push_back(opts.out / "curve.csv");
  write_file_atomic(written.back(), curve_csv(curve));

  const CurvePoint &full = curve.points.front();
  const json summary = {{"best_size", curve.best_size},
                        {"best_accuracy", curve.best_accuracy},
                        {"first_size", full.subset_size},
                        {"first_size_accuracy", full.mean_accuracy}};
  written.push_back(opts.out / "summary.json");
  write_file_atomic(written.back(), summary.dump(2) + "\n");

  json sizes = json::array();
  for (const auto &pt : curve.points) sizes.push_back(pt.subset_size);
  json config = {{"ranking", opts.ranking.string()},
                 {"ranking_sha256", fingerprint(opts.ranking)},
                 {"trials", opts.trials},
                 {"classifier",
                  opts.classifier == Classifier::Linear ? "linear" : "knn"},
                 {"knn_k", opts.knn_k},
                 {"ridge", cfg.ridge},
                 {"sizes", sizes},
                 {"paired", opts.paired},
                 {"split", "stratified 70/30"},
                 {"threads", opts.threads}};
  written.push_back(write_manifest(opts.out, "eval", opts.seed,
                                   std::move(config),
                                   data_json(opts.data, ds), started, written));
  return written;
}

std::vector<fs::path> cmd_trace(const TraceOptions &opts) {
  const std::string started = utc_now();
  const SimplexWeights weights(opts.alpha, opts.beta, opts.gamma);
  SearchConfig cfg = search_config(opts.search, opts.seed);
  cfg.mode = opts.mode;
  const Dataset ds = load_input(opts.data);
  const CenteredProblem problem = build_problem(ds.features, one_hot(ds));
  const MinimizeResult run = minimize(problem, weights, cfg);
  const double area = curve_area(run.trace, opts.normalize_curve);

  ensure_dir(opts.out);
  const std::string stem = std::string("trace_") + mode_name(opts.mode);
  std::vector<fs::path> written;
  written.push_back(opts.out / (stem + ".csv"));
  write_file_atomic(written.back(), trace_csv(run.trace));

  const json direction =
      opts.mode == SearchMode::Hybrid
          ? json("alpha*F1 + beta*F2 + gamma*F3, averaged step length")
          : json("F1 only (G - W G^T W), no step averaging");
  const json info = {{"mode", mode_name(opts.mode)},
                     {"direction", direction},
                     {"alpha", weights.alpha()},
                     {"beta", weights.beta()},
                     {"gamma", weights.gamma()},
                     {"curve_area", area},
                     {"normalized", opts.normalize_curve},
                     {"iterations", run.trace.iterations},
                     {"converged", run.trace.converged},
                     {"final_objective", run.trace.f_values.back()}};
  written.push_back(opts.out / (stem + ".json"));
  write_file_atomic(written.back(), info.dump(2) + "\n");

  json config = info;
  config["search"] = search_json(cfg, ds);
  written.push_back(write_manifest(opts.out, "trace", opts.seed,
                                   std::move(config),
                                   data_json(opts.data, ds), started, written));
  return written;
}

namespace {

void add_data_flags(CLI::App &cmd, DataInput &data, std::uint64_t &seed,
                    fs::path &out) {
  cmd.add_option("--data", data.path, "Input CSV, one sample per row")
      ->required();
  cmd.add_option("--label-col", data.label_col,
                 "Label column: header name or index (negative counts from "
                 "the end)")
      ->capture_default_str();
  cmd.add_option("--delimiter", data.delimiter, "Field delimiter");
  cmd.add_flag("!--no-header", data.has_header, "Input has no header row");
  cmd.add_option("--seed", seed, "Master seed")->capture_default_str();
  cmd.add_option("--out", out, "Output directory")->capture_default_str();
}

void add_search_flags(CLI::App &cmd, SearchOverrides &search) {
  cmd.add_option("--max-iters", search.max_iters, "Iteration cap per run");
  cmd.add_option("--eps-grad", search.eps_grad,
                 "Riemannian gradient-norm tolerance");
  cmd.add_option("--dt-init", search.dt_init, "Initial step length");
}

const std::map<std::string, bool> kOnOff{{"on", true}, {"off", false}};

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Polygon-area feature selection on the Stiefel manifold",
               "polyfs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RankOptions rank;
  EvalOptions eval;
  TraceOptions trace;

  auto *rank_cmd =
      app.add_subcommand("rank", "Sweep direction weights and rank features");
  add_data_flags(*rank_cmd, rank.data, rank.seed, rank.out);
  add_search_flags(*rank_cmd, rank.search);
  rank_cmd->add_option("--grid-step", rank.grid_step, "Simplex grid step")
      ->capture_default_str();
  rank_cmd->add_option("--normalize-curve", rank.normalize_curve,
                       "Divide descent curves by f_0 before integrating")
      ->transform(CLI::CheckedTransformer(kOnOff));
  rank_cmd->add_option("--threads", rank.threads,
                       "Worker threads (0 = all cores)")
      ->capture_default_str();

  auto *eval_cmd = app.add_subcommand(
      "eval", "Backward elimination accuracy curve for a ranking");
  add_data_flags(*eval_cmd, eval.data, eval.seed, eval.out);
  eval_cmd->add_option("--ranking", eval.ranking, "ranking.csv from rank")
      ->required();
  eval_cmd->add_option("--trials", eval.trials, "Holdout splits per size")
      ->capture_default_str();
  eval_cmd->add_option("--classifier", eval.classifier, "linear or knn")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Classifier>{{"linear", Classifier::Linear},
                                            {"knn", Classifier::Knn}}));
  eval_cmd->add_option("--knn-k", eval.knn_k, "Neighbours for knn")
      ->capture_default_str();
  eval_cmd->add_option("--sizes", eval.sizes,
                       "Comma-separated subset sizes, strictly decreasing")
      ->delimiter(',');
  eval_cmd->add_flag("!--unpaired", eval.paired,
                     "Draw fresh splits for every subset size");
  eval_cmd->add_option("--threads", eval.threads,
                       "Worker threads (0 = all cores)")
      ->capture_default_str();

  auto *trace_cmd =
      app.add_subcommand("trace", "Single run; writes its descent trace");
  add_data_flags(*trace_cmd, trace.data, trace.seed, trace.out);
  add_search_flags(*trace_cmd, trace.search);
  trace_cmd->add_option("--alpha", trace.alpha, "Weight of G - W G^T W");
  trace_cmd->add_option("--beta", trace.beta, "Weight of (I - W W^T) G");
  trace_cmd->add_option("--gamma", trace.gamma, "Weight of (I/2 - W W^T/2) G");
  trace_cmd->add_option("--mode", trace.mode, "hybrid or plain")
      ->transform(CLI::CheckedTransformer(std::map<std::string, SearchMode>{
          {"hybrid", SearchMode::Hybrid}, {"plain", SearchMode::Plain}}));
  trace_cmd->add_option("--normalize-curve", trace.normalize_curve,
                        "Divide the descent curve by f_0 before integrating")
      ->transform(CLI::CheckedTransformer(kOnOff));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code(ErrorKind::Config);
  }

  try {
    std::vector<fs::path> written;
    if (*rank_cmd) {
      written = cmd_rank(rank);
    } else if (*eval_cmd) {
      written = cmd_eval(eval);
    } else {
      written = cmd_trace(trace);
    }
    for (const auto &f : written) out << f.string() << "\n";
    return 0;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace polyfs::cli
