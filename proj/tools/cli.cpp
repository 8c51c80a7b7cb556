#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "plc/augmentation.hpp"
#include "plc/config.hpp"
#include "plc/error.hpp"
#include "plc/evaluation.hpp"
#include "plc/io.hpp"
#include "plc/optimizer.hpp"
#include "plc/pseudo_graph.hpp"
#include "plc/stft.hpp"
#include "plc/synthetic.hpp"

namespace plc::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

RunConfig load_config(const std::string& path) {
  RunConfig cfg = path.empty() ? RunConfig{} : load_run_config(path);
  apply_env_overrides(cfg);
  return cfg;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

json loss_json(const LossReport& r) {
  return {{"cp", r.cp},   {"reg", r.reg}, {"trans_inv", r.trans_inv}, {"cross_view", r.cross_view},
          {"plc", r.plc}, {"total", r.total}};
}

json read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return json::object();
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw FormatError("metrics file " + path.string() + " is not a JSON object");
  }
  return j;
}

void write_metrics(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

// Arbitrary integer class ids -> 0..C-1 in increasing order of the original id.
Labels dense_labels(const Labels& raw) {
  std::map<int, int> ids;
  for (int v : raw) ids.emplace(v, 0);
  int next = 0;
  for (auto& [k, v] : ids) v = next++;
  Labels out;
  out.reserve(raw.size());
  for (int v : raw) out.push_back(ids.at(v));
  return out;
}

void check_label_count(const Labels& labels, const Matrix& w, const std::string& what) {
  if (labels.size() != w.rows()) {
    throw InputError(what + " has " + std::to_string(labels.size()) + " labels but the model has " +
                     std::to_string(w.rows()) + " samples");
  }
}

std::size_t distinct(const Labels& labels) {
  Labels s = labels;
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

int cmd_synth(const std::string& config, const fs::path& out_dir) {
  const RunConfig cfg = load_config(config);
  const SynthData d = generate(cfg.synth);
  fs::create_directories(out_dir);
  write_tensor_file(out_dir / "x.plct", d.tensor);
  write_labels_file(out_dir / "labels.csv", d.labels);
  std::cout << "wrote " << (out_dir / "x.plct").string() << " and "
            << (out_dir / "labels.csv").string() << '\n';
  return kOk;
}

int cmd_preprocess(const std::string& config, const fs::path& in, const fs::path& out) {
  const RunConfig cfg = load_config(config);
  const DenseTensor raw = read_tensor_file(in);
  if (raw.order() != 3) {
    throw InputError("preprocess expects raw time series [samples, channels, timesteps]; " +
                     in.string() + " has order " + std::to_string(raw.order()) +
                     ". Synthetic tensors are already tensorized: pass them to augment/fit directly");
  }
  const TimeSeriesBatch b = batch_from_tensor(raw, cfg.sample_rate_hz);
  write_tensor_file(out, stft_tensorize(b, cfg.stft));
  return kOk;
}

int cmd_augment(const std::string& config, const fs::path& in, const fs::path& out) {
  const RunConfig cfg = load_config(config);
  const DenseTensor x = read_tensor_file(in);
  const TimeSeriesBatch b = batch_from_tensor(x, cfg.sample_rate_hz);
  write_tensor_file(out, tensor_from_batch(augment_pipeline(b, cfg.augment), x.dims()));
  return kOk;
}

int cmd_fit(const std::string& config, const fs::path& x_path, const fs::path& xt_path,
            const fs::path& out, const fs::path& metrics, std::optional<std::size_t> threads,
            bool timing, bool verbose) {
  RunConfig cfg = load_config(config);
  if (threads) cfg.hyperparams.threads = *threads;
  cfg.hyperparams.validate();
  const DenseTensor x = read_tensor_file(x_path);
  const DenseTensor xt = read_tensor_file(xt_path);
  if (x.dims() != xt.dims()) throw DimensionError("--x and --xt tensors differ in shape");

  IterationObserver observer;
  if (verbose) {
    observer = [](const FitState& s) {
      const auto& r = s.loss_history.back();
      std::cerr << "iter " << s.outer_iter << "  total " << format_double(r.total) << "  cp "
                << format_double(r.cp) << "  plc " << format_double(r.plc) << '\n';
    };
  }
  const FitResult res = fit(x, xt, cfg.hyperparams, cfg.clusters, observer);
  write_model_file(out, make_model_file(res.state.model, res.state.w_tilde));

  json j;
  j["initial"] = loss_json(res.initial_loss);
  j["iterations"] = json::array();
  for (const auto& r : res.state.loss_history) j["iterations"].push_back(loss_json(r));
  j["converged"] = res.converged;
  j["outer_iters"] = res.state.outer_iter;
  j["clusters"] = cfg.clusters;
  j["gamma"] = cfg.hyperparams.resolved_gamma(x.dims().front());
  // Wall time is opt-in so that repeated runs produce identical files.
  j["seconds_per_iter"] = timing ? json(res.state.iteration_seconds) : json(nullptr);
  write_metrics(metrics, j);
  return kOk;
}

int cmd_classify(const std::string& config, const fs::path& model, const fs::path& labels_path,
                 const std::vector<double>& split, const fs::path& metrics) {
  RunConfig cfg = load_config(config);
  if (!split.empty()) {
    if (split.size() != 3) throw ConfigError("--split needs three fractions: unlabeled,train,test");
    cfg.split.unlabeled = split[0];
    cfg.split.train = split[1];
    cfg.split.test = split[2];
    cfg.split.validate();
  }
  const Matrix w = read_model_file(model).get("W");
  const Labels labels = dense_labels(read_labels_file(labels_path));
  check_label_count(labels, w, labels_path.string());
  const auto idx = split_indices(w.rows(), cfg.split);
  const DownstreamResult r = downstream_accuracy(w, labels, idx, cfg.classifier);

  json j = read_metrics(metrics);
  j["accuracy"] = r.test_accuracy;
  j["train_accuracy"] = r.train_accuracy;
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  write_metrics(metrics, j);
  std::cout << "test accuracy " << format_double(r.test_accuracy) << " (" << r.n_test
            << " samples)\n";
  return kOk;
}

int cmd_eval(const std::string& config, const fs::path& model, const fs::path& labels_path,
             const fs::path& metrics) {
  const RunConfig cfg = load_config(config);
  const Matrix w = read_model_file(model).get("W");
  const Labels truth = read_labels_file(labels_path);
  check_label_count(truth, w, labels_path.string());
  const KMeansResult km = kmeans(w, distinct(truth), cfg.hyperparams.seed);

  json j = read_metrics(metrics);
  j["graph_agreement"] = graph_agreement(build_signed_graph(km.labels), build_signed_graph(truth));
  j["clustering_accuracy"] = clustering_accuracy(km.labels, truth);
  write_metrics(metrics, j);
  std::cout << "graph agreement " << format_double(j["graph_agreement"].get<double>())
            << ", clustering accuracy " << format_double(j["clustering_accuracy"].get<double>())
            << '\n';
  return kOk;
}

int cmd_export(const std::string& config, const fs::path& model, const std::string& labels_path,
               const fs::path& out) {
  const RunConfig cfg = load_config(config);
  const Matrix w = read_model_file(model).get("W");
  Labels labels;
  if (!labels_path.empty()) {
    labels = read_labels_file(labels_path);
    check_label_count(labels, w, labels_path);
  } else {
    labels = kmeans(w, cfg.clusters, cfg.hyperparams.seed).labels;
  }
  const Matrix p = pca2d(w);
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + out.string() + " for writing");
  os << "x,y,label\n";
  for (std::size_t i = 0; i < p.rows(); ++i) {
    os << format_double(p(i, 0)) << ',' << format_double(p(i, 1)) << ',' << labels[i] << '\n';
  }
  if (!os) throw Error("failed writing " + out.string());
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Pseudo Laplacian Contrast tensor decomposition"};
  app.require_subcommand(1);
  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "worker threads for the feature updates")
      ->check(CLI::PositiveNumber);

  std::string config, in, out, x, xt, model, labels, metrics;
  std::vector<double> split;
  bool timing = false, verbose = false;

  auto* synth = app.add_subcommand("synth", "generate a labelled synthetic tensor");
  synth->add_option("--config", config)->check(CLI::ExistingFile);
  synth->add_option("--out", out, "output directory")->required();

  auto* pre = app.add_subcommand("preprocess", "STFT magnitudes of raw [N, C, T] series");
  pre->add_option("--in", in)->required()->check(CLI::ExistingFile);
  pre->add_option("--config", config)->check(CLI::ExistingFile);
  pre->add_option("--out", out)->required();

  auto* aug = app.add_subcommand("augment", "jitter, bandpass and rotate a tensor");
  aug->add_option("--in", in)->required()->check(CLI::ExistingFile);
  aug->add_option("--config", config)->check(CLI::ExistingFile);
  aug->add_option("--out", out)->required();

  auto* fit_cmd = app.add_subcommand("fit", "fit the PLC decomposition");
  fit_cmd->add_option("--x", x)->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--xt", xt)->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--config", config)->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", out)->required();
  fit_cmd->add_option("--metrics", metrics)->required();
  fit_cmd->add_flag("--timing", timing, "record per-iteration wall time in the metrics");
  fit_cmd->add_flag("-v,--verbose", verbose, "print the loss after every outer iteration");

  auto* cls = app.add_subcommand("classify", "train and score a logistic head on W");
  cls->add_option("--model", model)->required()->check(CLI::ExistingFile);
  cls->add_option("--labels", labels)->required()->check(CLI::ExistingFile);
  cls->add_option("--split", split, "unlabeled,train,test fractions")->delimiter(',');
  cls->add_option("--config", config)->check(CLI::ExistingFile);
  cls->add_option("--metrics", metrics)->required();

  auto* ev = app.add_subcommand("eval", "compare k-means pseudo labels of W with the truth");
  ev->add_option("--model", model)->required()->check(CLI::ExistingFile);
  ev->add_option("--true-labels", labels)->required()->check(CLI::ExistingFile);
  ev->add_option("--config", config)->check(CLI::ExistingFile);
  ev->add_option("--metrics", metrics)->required();

  auto* exp = app.add_subcommand("export", "2-D PCA of W as x,y,label CSV");
  exp->add_option("--model", model)->required()->check(CLI::ExistingFile);
  exp->add_option("--labels", labels, "labels for the third column (default: k-means of W)")
      ->check(CLI::ExistingFile);
  exp->add_option("--config", config)->check(CLI::ExistingFile);
  exp->add_option("--out", out)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*synth) return cmd_synth(config, out);
    if (*pre) return cmd_preprocess(config, in, out);
    if (*aug) return cmd_augment(config, in, out);
    if (*fit_cmd) return cmd_fit(config, x, xt, out, metrics, threads, timing, verbose);
    if (*cls) return cmd_classify(config, model, labels, split, metrics);
    if (*ev) return cmd_eval(config, model, labels, metrics);
    if (*exp) return cmd_export(config, model, labels, out);
  } catch (const FormatError& e) {
    std::cerr << "plc: format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ConfigError& e) {
    std::cerr << "plc: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "plc: numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "plc: error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace plc::cli
