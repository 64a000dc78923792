#include "affgraph/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "affgraph/error.hpp"

namespace affgraph {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string compress(std::string token) {
  if (token.size() <= kMaxTokenLength) return token;
  char buf[40];
  std::snprintf(buf, sizeof buf, "#%016llx%016llx",
                static_cast<unsigned long long>(fnv1a(token, 0xcbf29ce484222325ULL)),
                static_cast<unsigned long long>(fnv1a(token, 0x84222325cbf29ce4ULL)));
  return buf;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

}  // namespace

std::vector<std::string> wl_tokens(const LabeledGraph& g, int depth) {
  if (depth < 0) throw UsageError("wl_tokens: depth must be non-negative");
  const auto adj = g.adjacency();
  std::vector<std::string> current = g.labels;
  std::vector<std::string> out = current;
  out.reserve(current.size() * static_cast<std::size_t>(depth + 1));
  for (int it = 0; it < depth; ++it) {
    std::vector<std::string> next(current.size());
    for (std::size_t v = 0; v < current.size(); ++v) {
      std::vector<const std::string*> nb;
      for (int u : adj[v]) nb.push_back(&current[static_cast<std::size_t>(u)]);
      std::sort(nb.begin(), nb.end(), [](const std::string* a, const std::string* b) { return *a < *b; });
      std::string t = current[v];
      t += '(';
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (k) t += ',';
        t += *nb[k];
      }
      t += ')';
      next[v] = compress(std::move(t));
    }
    current = std::move(next);
    out.insert(out.end(), current.begin(), current.end());
  }
  return out;
}

std::vector<std::string> wl_tokens(std::string_view canonical, int depth) {
  return wl_tokens(parse_canonical_form(canonical), depth);
}

int Vocabulary::find(const std::string& token) const {
  auto it = index.find(token);
  return it == index.end() ? -1 : it->second;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus) {
  Vocabulary v;
  for (const auto& doc : corpus)
    for (const auto& t : doc) {
      auto [it, inserted] = v.index.emplace(t, static_cast<int>(v.tokens.size()));
      if (inserted) {
        v.tokens.push_back(t);
        v.counts.push_back(0);
      }
      ++v.counts[static_cast<std::size_t>(it->second)];
    }
  if (v.tokens.empty()) throw DataError("build_vocabulary: empty corpus");
  return v;
}

std::vector<std::vector<int>> encode_corpus(const std::vector<std::vector<std::string>>& corpus,
                                            const Vocabulary& vocab) {
  std::vector<std::vector<int>> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) {
    std::vector<int> ids;
    ids.reserve(doc.size());
    for (const auto& t : doc)
      if (int i = vocab.find(t); i >= 0) ids.push_back(i);
    out.push_back(std::move(ids));
  }
  return out;
}

void TrainConfig::validate() const {
  if (embedding_dim <= 0 || !(learning_rate > 0) || batch_size <= 0 || epochs <= 0 || wl_depth < 0)
    throw UsageError("train config: dimensions, rate, batch size and epochs must be positive");
  if (objective == Objective::NegativeSampling && negatives <= 0)
    throw UsageError("train config: negative sampling needs negatives > 0");
}

TrainResult train(const std::vector<std::vector<int>>& docs, const Vocabulary& vocab, const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t G = docs.size();
  const std::size_t V = vocab.size();
  const std::size_t d = static_cast<std::size_t>(cfg.embedding_dim);
  if (G == 0 || V == 0) throw DataError("train: empty corpus");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> init(-0.5 / static_cast<double>(d), 0.5 / static_cast<double>(d));

  TrainResult res;
  res.graph_vectors.assign(G, std::vector<double>(d));
  for (auto& row : res.graph_vectors)
    for (auto& x : row) x = init(rng);
  // Output weights start from a scaled normal, as in the reference graph2vec
  // network; all-zero weights leave the tiny graph vectors without gradient.
  std::normal_distribution<double> weight_init(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  res.token_vectors.assign(V, std::vector<double>(d));
  for (auto& row : res.token_vectors)
    for (auto& x : row) x = weight_init(rng);

  // Unigram^0.75 sampling table as a cumulative distribution.
  std::vector<double> cdf(V);
  double acc = 0;
  for (std::size_t i = 0; i < V; ++i) {
    acc += std::pow(static_cast<double>(vocab.counts[i]), 0.75);
    cdf[i] = acc;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_negative = [&] {
    const double r = unit(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), V - 1));
  };

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t g = 0; g < G; ++g)
    for (int t : docs[g]) {
      if (t < 0 || static_cast<std::size_t>(t) >= V) throw DataError("train: token index out of range");
      pairs.emplace_back(static_cast<std::uint32_t>(g), static_cast<std::uint32_t>(t));
    }
  if (pairs.empty()) throw DataError("train: corpus has no tokens");

  const double total_steps = static_cast<double>(pairs.size()) * cfg.epochs;
  double done = 0;

  std::vector<std::vector<double>> grad_g(G, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> grad_w(V, std::vector<double>(d, 0.0));
  std::vector<std::uint8_t> touched_g(G, 0), touched_w(V, 0);
  std::vector<std::uint32_t> list_g, list_w;
  std::vector<double> scores;
  std::vector<int> targets;

  double initial_loss = -1;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    double epoch_loss = 0;
    for (std::size_t begin = 0; begin < pairs.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(pairs.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const double progress = done / total_steps;
      const double lr = cfg.learning_rate * ((1.0 - progress) + 1e-4 * progress);
      double batch_loss = 0;

      auto touch_g = [&](std::uint32_t g) {
        if (!touched_g[g]) {
          touched_g[g] = 1;
          list_g.push_back(g);
        }
      };
      auto touch_w = [&](std::uint32_t w) {
        if (!touched_w[w]) {
          touched_w[w] = 1;
          list_w.push_back(w);
        }
      };

      for (std::size_t p = begin; p < end; ++p) {
        const auto [g, t] = pairs[p];
        const auto& eg = res.graph_vectors[g];
        touch_g(g);
        if (cfg.objective == Objective::NegativeSampling) {
          targets.assign(1, static_cast<int>(t));
          for (int k = 0; k < cfg.negatives; ++k) {
            const int n = draw_negative();
            if (n != static_cast<int>(t)) targets.push_back(n);
          }
          for (std::size_t k = 0; k < targets.size(); ++k) {
            const auto w = static_cast<std::uint32_t>(targets[k]);
            const auto& ew = res.token_vectors[w];
            double dot = 0;
            for (std::size_t i = 0; i < d; ++i) dot += eg[i] * ew[i];
            const double label = k == 0 ? 1.0 : 0.0;
            batch_loss += k == 0 ? neg_log_sigmoid(dot) : neg_log_sigmoid(-dot);
            const double coeff = sigmoid(dot) - label;
            touch_w(w);
            auto& gg = grad_g[g];
            auto& gw = grad_w[w];
            for (std::size_t i = 0; i < d; ++i) {
              gg[i] += coeff * ew[i];
              gw[i] += coeff * eg[i];
            }
          }
        } else {
          scores.assign(V, 0.0);
          double mx = -1e300;
          for (std::size_t w = 0; w < V; ++w) {
            double dot = 0;
            for (std::size_t i = 0; i < d; ++i) dot += eg[i] * res.token_vectors[w][i];
            scores[w] = dot;
            mx = std::max(mx, dot);
          }
          double z = 0;
          for (double s : scores) z += std::exp(s - mx);
          batch_loss += -(scores[t] - mx - std::log(z));
          auto& gg = grad_g[g];
          for (std::size_t w = 0; w < V; ++w) {
            const double coeff = std::exp(scores[w] - mx) / z - (w == t ? 1.0 : 0.0);
            touch_w(static_cast<std::uint32_t>(w));
            const auto& ew = res.token_vectors[w];
            auto& gw = grad_w[w];
            for (std::size_t i = 0; i < d; ++i) {
              gg[i] += coeff * ew[i];
              gw[i] += coeff * eg[i];
            }
          }
        }
      }

      const double count = static_cast<double>(end - begin);
      const double mean_loss = batch_loss / count;
      if (initial_loss < 0) initial_loss = mean_loss;
      if (!std::isfinite(mean_loss) || mean_loss > 10.0 * initial_loss) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch + 1 << ", pair " << begin << ": batch loss " << mean_loss
            << " vs initial " << initial_loss << " (lr " << lr << ")";
        throw NumericError(msg.str());
      }
      epoch_loss += batch_loss;

      const double step = lr / count;
      for (auto g : list_g) {
        auto& row = res.graph_vectors[g];
        auto& gr = grad_g[g];
        for (std::size_t i = 0; i < d; ++i) {
          row[i] -= step * gr[i];
          gr[i] = 0;
        }
        touched_g[g] = 0;
      }
      for (auto w : list_w) {
        auto& row = res.token_vectors[w];
        auto& gr = grad_w[w];
        for (std::size_t i = 0; i < d; ++i) {
          row[i] -= step * gr[i];
          gr[i] = 0;
        }
        touched_w[w] = 0;
      }
      list_g.clear();
      list_w.clear();
      done += count;
    }
    res.epoch_loss.push_back(epoch_loss / static_cast<double>(pairs.size()));
  }
  return res;
}

// --- files ---------------------------------------------------------------------

void write_embeddings(const std::string& path, const std::vector<std::string>& ids, const EmbeddingTable& table) {
  if (ids.size() != table.size()) throw UsageError("write_embeddings: id/row count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embeddings " + path);
  char buf[32];
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << ids[r] << ' ' << table[r].size();
    for (double x : table[r]) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

void read_embeddings(const std::string& path, std::vector<std::string>& ids, EmbeddingTable& table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embeddings " + path);
  ids.clear();
  table.clear();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id;
    std::size_t dim = 0;
    if (!(ls >> id >> dim)) throw DataError(path + ":" + std::to_string(lineno) + ": expected '<id> <dim> ...'");
    std::vector<double> row(dim);
    for (auto& x : row) {
      std::string tok;
      if (!(ls >> tok)) throw DataError(path + ":" + std::to_string(lineno) + ": too few values");
      x = std::strtod(tok.c_str(), nullptr);
    }
    if (!table.empty() && table.front().size() != dim)
      throw DataError(path + ":" + std::to_string(lineno) + ": inconsistent dimension");
    ids.push_back(std::move(id));
    table.push_back(std::move(row));
  }
}

void write_vocabulary(const std::string& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary " + path);
  for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab.counts[i] << '\t' << vocab.tokens[i] << '\n';
}

Vocabulary read_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary " + path);
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(path + ": malformed vocabulary line");
    const std::string token = line.substr(tab + 1);
    v.index.emplace(token, static_cast<int>(v.tokens.size()));
    v.tokens.push_back(token);
    v.counts.push_back(std::stoull(line.substr(0, tab)));
  }
  return v;
}

}  // namespace affgraph
