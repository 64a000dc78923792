#include "affgraph/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "affgraph/error.hpp"

namespace affgraph {

std::string_view to_string(ClusterMode m) { return m == ClusterMode::Sed ? "sed" : "embedding"; }

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw UsageError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw UsageError("config key '" + std::string(key) + "': expected a boolean, got '" + std::string(value) + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<std::string> profile_names() { return {"cad-like", "wnp-like", "load-like", "rcc5-on", "sed"}; }

void apply_profile(PipelineConfig& cfg, std::string_view name) {
  PipelineConfig fresh;
  fresh.inputs = cfg.inputs;
  fresh.groundtruth = cfg.groundtruth;
  fresh.output = cfg.output;
  if (name == "cad-like") {
    fresh.convexity.thresh_convex = 4.0;
  } else if (name == "wnp-like") {
    fresh.convexity.thresh_convex = 0.3;
  } else if (name == "load-like") {
    fresh.convexity.thresh_convex = 10.0;
  } else if (name == "rcc5-on") {
    fresh.calculus = Calculus::RCC5On;
    fresh.threshold = 0.03;
  } else if (name == "sed") {
    fresh.mode = ClusterMode::Sed;
    fresh.threshold = 1.0;
  } else {
    throw UsageError("unknown profile '" + std::string(name) + "'");
  }
  fresh.profile = std::string(name);
  cfg = std::move(fresh);
}

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  const std::string v(value);
  if (key == "profile") apply_profile(cfg, value);
  else if (key == "thresh_convex") cfg.convexity.thresh_convex = parse_number<double>(key, value);
  else if (key == "h") cfg.convexity.sections = parse_number<int>(key, value);
  else if (key == "n") cfg.convexity.deep_sections = parse_number<int>(key, value);
  else if (key == "noise_ratio") cfg.convexity.noise_ratio = parse_number<double>(key, value);
  else if (key == "alg1_literal") cfg.convexity.alg1_literal = parse_bool(key, value);
  else if (key == "per_frame_convexity") cfg.convexity.per_frame = parse_bool(key, value);
  else if (key == "calculus") {
    const Calculus c = calculus_from_string(value);
    if (c == Calculus::RCC2) throw UsageError("config key 'calculus': object relations use disr or rcc5_on");
    cfg.calculus = c;
  } else if (key == "rcc5_with_on") cfg.rcc5_with_on = parse_bool(key, value);
  else if (key == "smoothing") cfg.episodes.smoothing = parse_number<int>(key, value);
  else if (key == "gap_bridge") cfg.episodes.gap_bridge = parse_number<int>(key, value);
  else if (key == "temporal_cap") cfg.graphlets.temporal_cap = parse_number<std::size_t>(key, value);
  else if (key == "human_part") cfg.graphlets.human_part = v;
  else if (key == "embedding_dim") cfg.train.embedding_dim = parse_number<int>(key, value);
  else if (key == "learning_rate") cfg.train.learning_rate = parse_number<double>(key, value);
  else if (key == "batch_size") cfg.train.batch_size = parse_number<int>(key, value);
  else if (key == "wl_depth") cfg.train.wl_depth = parse_number<int>(key, value);
  else if (key == "negatives") cfg.train.negatives = parse_number<int>(key, value);
  else if (key == "epochs") cfg.train.epochs = parse_number<int>(key, value);
  else if (key == "objective") {
    if (value == "negative_sampling") cfg.train.objective = Objective::NegativeSampling;
    else if (value == "softmax") cfg.train.objective = Objective::FullSoftmax;
    else throw UsageError("config key 'objective': expected negative_sampling or softmax");
  } else if (key == "mode") {
    if (value == "embedding") cfg.mode = ClusterMode::Embedding;
    else if (value == "sed") cfg.mode = ClusterMode::Sed;
    else throw UsageError("config key 'mode': expected embedding or sed");
  } else if (key == "linkage") cfg.linkage = linkage_from_string(value);
  else if (key == "threshold") {
    if (value == "bic") cfg.auto_threshold = Criterion::BIC;
    else if (value == "aic") cfg.auto_threshold = Criterion::AIC;
    else {
      cfg.threshold = parse_number<double>(key, value);
      cfg.auto_threshold.reset();
    }
  } else if (key == "c_spat") cfg.sed.c_spat = parse_number<double>(key, value);
  else if (key == "k_spat") cfg.sed.k_spat = parse_number<double>(key, value);
  else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
    cfg.train.seed = cfg.seed;
  } else if (key == "input") {
    cfg.inputs.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
      if (auto t = trim(item); !t.empty()) cfg.inputs.emplace_back(t);
  } else if (key == "groundtruth") cfg.groundtruth = v;
  else if (key == "output") cfg.output = v;
  else throw UsageError("unknown config key '" + std::string(key) + "'");
}

void PipelineConfig::validate(bool check_paths) const {
  if (!(convexity.thresh_convex > 0)) throw UsageError("thresh_convex must be positive");
  if (convexity.sections < 2) throw UsageError("h must be at least 2");
  if (convexity.deep_sections < 1 || convexity.deep_sections >= convexity.sections)
    throw UsageError("n must lie in [1, h-1]");
  if (convexity.noise_ratio < 0 || convexity.noise_ratio >= 1) throw UsageError("noise_ratio must lie in [0, 1)");
  if (episodes.smoothing < 0 || episodes.gap_bridge < 0) throw UsageError("smoothing and gap_bridge must be >= 0");
  if (graphlets.temporal_cap == 0) throw UsageError("temporal_cap must be positive");
  if (!(threshold > 0)) throw UsageError("threshold must be positive");
  if (sed.c_spat < 0 || sed.c_spat > 1 || sed.k_spat < 0 || sed.k_spat > 1)
    throw UsageError("c_spat and k_spat must lie in [0, 1]");
  train.validate();
  if (check_paths) {
    if (inputs.empty()) throw UsageError("no input scenes given");
    for (const auto& in : inputs)
      if (!std::filesystem::exists(in)) throw UsageError("input '" + in + "' does not exist");
    if (!groundtruth.empty() && !std::filesystem::exists(groundtruth))
      throw UsageError("groundtruth '" + groundtruth + "' does not exist");
  }
}

PipelineConfig parse_config(std::string_view text, std::string_view source) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos)
      throw UsageError(std::string(source) + ":" + std::to_string(lineno) + ": expected key = value");
    entries.emplace_back(std::string(trim(l.substr(0, eq))), std::string(trim(l.substr(eq + 1))));
  }
  PipelineConfig cfg;
  auto apply = [&](const std::pair<std::string, std::string>& kv) {
    try {
      set_config_value(cfg, kv.first, kv.second);
    } catch (const UsageError& e) {
      throw UsageError(std::string(source) + ": " + e.what());
    }
  };
  for (const auto& kv : entries)
    if (kv.first == "profile") apply(kv);
  for (const auto& kv : entries)
    if (kv.first != "profile") apply(kv);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

PipelineConfig default_config() {
  if (const char* path = std::getenv("AFFGRAPH_CONFIG"); path && *path) return load_config(path);
  return {};
}

std::string format_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  auto b = [](bool v) { return v ? "true" : "false"; };
  out << "profile = " << cfg.profile << '\n'
      << "thresh_convex = " << format_double(cfg.convexity.thresh_convex) << '\n'
      << "h = " << cfg.convexity.sections << '\n'
      << "n = " << cfg.convexity.deep_sections << '\n'
      << "noise_ratio = " << format_double(cfg.convexity.noise_ratio) << '\n'
      << "alg1_literal = " << b(cfg.convexity.alg1_literal) << '\n'
      << "per_frame_convexity = " << b(cfg.convexity.per_frame) << '\n'
      << "calculus = " << to_string(cfg.calculus) << '\n'
      << "rcc5_with_on = " << b(cfg.rcc5_with_on) << '\n'
      << "smoothing = " << cfg.episodes.smoothing << '\n'
      << "gap_bridge = " << cfg.episodes.gap_bridge << '\n'
      << "temporal_cap = " << cfg.graphlets.temporal_cap << '\n';
  if (!cfg.graphlets.human_part.empty()) out << "human_part = " << cfg.graphlets.human_part << '\n';
  out << "embedding_dim = " << cfg.train.embedding_dim << '\n'
      << "learning_rate = " << format_double(cfg.train.learning_rate) << '\n'
      << "batch_size = " << cfg.train.batch_size << '\n'
      << "wl_depth = " << cfg.train.wl_depth << '\n'
      << "negatives = " << cfg.train.negatives << '\n'
      << "epochs = " << cfg.train.epochs << '\n'
      << "objective = " << (cfg.train.objective == Objective::FullSoftmax ? "softmax" : "negative_sampling") << '\n'
      << "mode = " << to_string(cfg.mode) << '\n'
      << "linkage = " << to_string(cfg.linkage) << '\n'
      << "threshold = "
      << (cfg.auto_threshold ? (*cfg.auto_threshold == Criterion::BIC ? "bic" : "aic") : format_double(cfg.threshold))
      << '\n'
      << "c_spat = " << format_double(cfg.sed.c_spat) << '\n'
      << "k_spat = " << format_double(cfg.sed.k_spat) << '\n'
      << "seed = " << cfg.seed << '\n';
  if (!cfg.inputs.empty()) {
    out << "input = ";
    for (std::size_t i = 0; i < cfg.inputs.size(); ++i) out << (i ? "," : "") << cfg.inputs[i];
    out << '\n';
  }
  if (!cfg.groundtruth.empty()) out << "groundtruth = " << cfg.groundtruth << '\n';
  out << "output = " << cfg.output << '\n';
  return out.str();
}

}  // namespace affgraph
