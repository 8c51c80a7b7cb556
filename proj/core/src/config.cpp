#include "plc/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "plc/error.hpp"

namespace plc {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ConfigError("");
      }
    }
    out = v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError(where + "." + key + ": wrong type or value");
  }
}

void parse_hyperparams(const json& j, Hyperparams& hp) {
  const std::string w = "hyperparams";
  reject_unknown(j, {"alpha", "beta", "gamma", "rank", "init_iters", "outer_max_iters", "inner_max_iters",
                     "outer_tol", "inner_tol", "seed", "threads"},
                 w);
  read(j, "alpha", hp.alpha, w);
  read(j, "beta", hp.beta, w);
  if (j.contains("gamma")) {
    if (j.at("gamma").is_null()) {
      hp.gamma.reset();
    } else {
      double g = 0.0;
      read(j, "gamma", g, w);
      hp.gamma = g;
    }
  }
  read(j, "rank", hp.rank, w);
  read(j, "init_iters", hp.init_iters, w);
  read(j, "outer_max_iters", hp.outer_max_iters, w);
  read(j, "inner_max_iters", hp.inner_max_iters, w);
  read(j, "outer_tol", hp.outer_tol, w);
  read(j, "inner_tol", hp.inner_tol, w);
  read(j, "seed", hp.seed, w);
  read(j, "threads", hp.threads, w);
}

void parse_augment(const json& j, AugmentConfig& a) {
  const std::string w = "augment";
  reject_unknown(j, {"jitter_sigma", "bandpass", "band_low_hz", "band_high_hz", "rotation_max_deg",
                     "axis_triplets", "seed"},
                 w);
  read(j, "jitter_sigma", a.jitter_sigma, w);
  read(j, "bandpass", a.bandpass_enabled, w);
  read(j, "band_low_hz", a.band_low_hz, w);
  if (j.contains("band_high_hz")) {
    if (j.at("band_high_hz").is_null()) a.band_high_hz = 0.0;
    else read(j, "band_high_hz", a.band_high_hz, w);
  }
  read(j, "rotation_max_deg", a.rotation_max_deg, w);
  read(j, "seed", a.seed, w);
  if (j.contains("axis_triplets")) {
    const auto& t = j.at("axis_triplets");
    if (!t.is_array()) throw ConfigError("augment.axis_triplets: expected an array of [x, y, z]");
    a.axis_triplets.clear();
    for (const auto& triple : t) {
      if (!triple.is_array() || triple.size() != 3) throw ConfigError("augment.axis_triplets: each entry needs 3 channels");
      AxisTriplet at{};
      for (std::size_t k = 0; k < 3; ++k) {
        if (!triple[k].is_number_unsigned()) throw ConfigError("augment.axis_triplets: channels must be non-negative integers");
        at[k] = triple[k].get<std::size_t>();
      }
      a.axis_triplets.push_back(at);
    }
  }
  if (a.jitter_sigma < 0.0 || a.rotation_max_deg < 0.0) throw ConfigError("augment: sigma and angle must be >= 0");
}

void parse_stft(const json& j, StftConfig& s) {
  const std::string w = "stft";
  reject_unknown(j, {"window_len", "hop", "window"}, w);
  read(j, "window_len", s.window_len, w);
  read(j, "hop", s.hop, w);
  if (j.contains("window")) {
    const auto& v = j.at("window");
    if (v == "hann") s.window = Window::kHann;
    else if (v == "rect") s.window = Window::kRect;
    else throw ConfigError("stft.window: expected \"hann\" or \"rect\"");
  }
  if (s.window_len == 0 || s.hop == 0 || s.hop > s.window_len) {
    throw ConfigError("stft: need 0 < hop <= window_len");
  }
}

void parse_split(const json& j, SplitSpec& s) {
  const std::string w = "split";
  reject_unknown(j, {"unlabeled", "train", "test", "seed"}, w);
  read(j, "unlabeled", s.unlabeled, w);
  read(j, "train", s.train, w);
  read(j, "test", s.test, w);
  read(j, "seed", s.seed, w);
  s.validate();
}

void parse_classifier(const json& j, LogisticOptions& c) {
  const std::string w = "classifier";
  reject_unknown(j, {"lr", "epochs", "l2", "seed"}, w);
  read(j, "lr", c.lr, w);
  read(j, "epochs", c.epochs, w);
  read(j, "l2", c.l2, w);
  read(j, "seed", c.seed, w);
  if (!(c.lr > 0.0) || !(c.l2 >= 0.0)) throw ConfigError("classifier: need lr > 0 and l2 >= 0");
}

void parse_synth(const json& j, SynthConfig& s) {
  const std::string w = "synth";
  reject_unknown(j, {"n_per_class", "n_classes", "rank", "dims", "centroid_scale", "within_class_sigma",
                     "tensor_noise_sigma", "seed"},
                 w);
  read(j, "n_per_class", s.n_per_class, w);
  read(j, "n_classes", s.n_classes, w);
  read(j, "rank", s.rank, w);
  read(j, "centroid_scale", s.centroid_scale, w);
  read(j, "within_class_sigma", s.within_class_sigma, w);
  read(j, "tensor_noise_sigma", s.tensor_noise_sigma, w);
  read(j, "seed", s.seed, w);
  if (j.contains("dims")) {
    const auto& d = j.at("dims");
    if (!d.is_array()) throw ConfigError("synth.dims: expected an array");
    s.dims.clear();
    for (const auto& v : d) {
      if (!v.is_number_unsigned()) throw ConfigError("synth.dims: extents must be positive integers");
      s.dims.push_back(v.get<std::size_t>());
    }
  }
  s.validate();
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  reject_unknown(j, {"hyperparams", "clusters", "sample_rate_hz", "augment", "stft", "split", "classifier", "synth"},
                 "config");
  read(j, "clusters", cfg.clusters, "config");
  read(j, "sample_rate_hz", cfg.sample_rate_hz, "config");
  if (j.contains("hyperparams")) parse_hyperparams(j.at("hyperparams"), cfg.hyperparams);
  if (j.contains("augment")) parse_augment(j.at("augment"), cfg.augment);
  if (j.contains("stft")) parse_stft(j.at("stft"), cfg.stft);
  if (j.contains("split")) parse_split(j.at("split"), cfg.split);
  if (j.contains("classifier")) parse_classifier(j.at("classifier"), cfg.classifier);
  if (j.contains("synth")) parse_synth(j.at("synth"), cfg.synth);
  cfg.hyperparams.validate();
  if (cfg.clusters < 2) throw ConfigError("config.clusters: must be >= 2");
  if (!(cfg.sample_rate_hz > 0.0)) throw ConfigError("config.sample_rate_hz: must be positive");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

void apply_seed_override(RunConfig& cfg, std::string_view value) {
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("PLC_SEED: expected an unsigned integer, got \"" + std::string(value) + "\"");
  }
  cfg.hyperparams.seed = seed;
  cfg.augment.seed = seed;
  cfg.split.seed = seed;
  cfg.classifier.seed = seed;
  cfg.synth.seed = seed;
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* s = std::getenv("PLC_SEED")) apply_seed_override(cfg, s);
}

std::string to_json(const RunConfig& cfg) {
  const auto& hp = cfg.hyperparams;
  json triplets = json::array();
  for (const auto& t : cfg.augment.axis_triplets) triplets.push_back({t[0], t[1], t[2]});
  json j = {
      {"clusters", cfg.clusters},
      {"sample_rate_hz", cfg.sample_rate_hz},
      {"hyperparams",
       {{"alpha", hp.alpha}, {"beta", hp.beta}, {"gamma", hp.gamma ? json(*hp.gamma) : json(nullptr)},
        {"rank", hp.rank}, {"init_iters", hp.init_iters}, {"outer_max_iters", hp.outer_max_iters},
        {"inner_max_iters", hp.inner_max_iters}, {"outer_tol", hp.outer_tol}, {"inner_tol", hp.inner_tol},
        {"seed", hp.seed}, {"threads", hp.threads}}},
      {"augment",
       {{"jitter_sigma", cfg.augment.jitter_sigma}, {"bandpass", cfg.augment.bandpass_enabled},
        {"band_low_hz", cfg.augment.band_low_hz},
        {"band_high_hz", cfg.augment.band_high_hz > 0.0 ? json(cfg.augment.band_high_hz) : json(nullptr)},
        {"rotation_max_deg", cfg.augment.rotation_max_deg}, {"axis_triplets", triplets},
        {"seed", cfg.augment.seed}}},
      {"stft",
       {{"window_len", cfg.stft.window_len}, {"hop", cfg.stft.hop},
        {"window", cfg.stft.window == Window::kHann ? "hann" : "rect"}}},
      {"split",
       {{"unlabeled", cfg.split.unlabeled}, {"train", cfg.split.train}, {"test", cfg.split.test},
        {"seed", cfg.split.seed}}},
      {"classifier",
       {{"lr", cfg.classifier.lr}, {"epochs", cfg.classifier.epochs}, {"l2", cfg.classifier.l2},
        {"seed", cfg.classifier.seed}}},
      {"synth",
       {{"n_per_class", cfg.synth.n_per_class}, {"n_classes", cfg.synth.n_classes}, {"rank", cfg.synth.rank},
        {"dims", cfg.synth.dims}, {"centroid_scale", cfg.synth.centroid_scale},
        {"within_class_sigma", cfg.synth.within_class_sigma},
        {"tensor_noise_sigma", cfg.synth.tensor_noise_sigma}, {"seed", cfg.synth.seed}}},
  };
  return j.dump(2);
}

}  // namespace plc
