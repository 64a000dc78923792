#include "affgraph/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <tuple>

#include "affgraph/error.hpp"
#include "affgraph/export.hpp"
#include "affgraph/qsr.hpp"

namespace affgraph {

namespace fs = std::filesystem;

namespace {

// Re-throws with the stage name and context prefixed, keeping the exit code.
template <class F>
auto in_stage(const std::string& stage, const std::string& context, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    // Keep the error class so callers can still tell usage from data errors.
    const std::string msg = stage + (context.empty() ? "" : " [" + context + "]") + ": " + e.what();
    switch (e.code()) {
      case ExitCode::Usage: throw UsageError(msg);
      case ExitCode::Data: throw DataError(msg);
      case ExitCode::Numeric: throw NumericError(msg);
      default: throw Error(e.code(), msg);
    }
  }
}

struct ObjectFrame {
  bool present = false;
  std::optional<DepthSummary> depth;
  ConvexityType type = ConvexityType::Convex;
};

}  // namespace

SceneRelations compute_relations(const SceneSequence& scene, const PipelineConfig& cfg) {
  SceneRelations out;
  out.scene_id = scene.id;
  std::vector<std::size_t> objects, humans;
  for (std::size_t i = 0; i < scene.entities.size(); ++i)
    (scene.entities[i].kind == EntityKind::Object ? objects : humans).push_back(i);

  // Per-frame convexity of every object, then the per-track vote.
  const auto frames = static_cast<std::size_t>(scene.frame_count);
  std::vector<std::vector<ObjectFrame>> state(objects.size(), std::vector<ObjectFrame>(frames));
  for (std::size_t t = 0; t < frames; ++t) {
    const int frame = static_cast<int>(t);
    bool any = false;
    for (std::size_t o : objects) any = any || scene.entities[o].at(frame);
    if (!any) continue;
    const SemanticDepthMap map = build_semantic_depth_map(scene, frame);
    for (std::size_t k = 0; k < objects.size(); ++k) {
      const Entity& e = scene.entities[objects[k]];
      if (!e.at(frame)) continue;
      ObjectFrame& s = state[k][t];
      s.present = true;
      try {
        FrameConvexity fc = classify_object_frame(map, e.id, cfg.convexity);
        s.type = fc.type;
        s.depth = std::move(fc.depth);
      } catch (const FullyOccludedError&) {
        out.warnings.push_back("frame " + std::to_string(frame) + ": '" + e.id + "' has no visible depth");
      }
    }
  }
  for (std::size_t k = 0; k < objects.size(); ++k) {
    std::vector<ConvexityType> types;
    for (const auto& s : state[k])
      if (s.depth) types.push_back(s.type);
    const ConvexityType track = types.empty() ? ConvexityType::Convex : track_convexity(types);
    out.convexity[scene.entities[objects[k]].id] = track;
    if (!cfg.convexity.per_frame)
      for (auto& s : state[k]) s.type = track;
  }

  auto object_state = [&](std::size_t k, std::size_t t) {
    const ObjectFrame& s = state[k][t];
    ObjectFrameState st;
    st.bbox = scene.entities[objects[k]].at(static_cast<int>(t))->bbox;
    st.type = s.type;
    if (s.depth) {
      st.depth = DepthRange{s.depth->dmin, s.depth->dmax};
      st.bounds = convexity_depth(s.depth->values, s.type, cfg.convexity.sections, cfg.convexity.deep_sections);
    }
    return st;
  };

  for (std::size_t t = 0; t < frames; ++t) {
    const int frame = static_cast<int>(t);
    for (std::size_t a = 0; a < objects.size(); ++a) {
      if (!state[a][t].present) continue;
      const std::string& ida = scene.entities[objects[a]].id;
      for (std::size_t b = a + 1; b < objects.size(); ++b) {
        if (!state[b][t].present) continue;
        const std::string& idb = scene.entities[objects[b]].id;
        if (cfg.calculus == Calculus::DiSR) {
          const DisrResult r = disr({object_state(a, t), object_state(b, t)});
          out.relations.push_back({frame, ida, idb, Calculus::DiSR, std::string(to_string(r.forward)), r.approximate});
          out.relations.push_back({frame, idb, ida, Calculus::DiSR, std::string(to_string(r.backward)), r.approximate});
        } else {
          const Rcc5OnOptions opts{cfg.rcc5_with_on, true};
          const auto& ba = scene.entities[objects[a]].at(frame)->bbox;
          const auto& bb = scene.entities[objects[b]].at(frame)->bbox;
          const Rcc5OnRelation r = rcc5_on(ba, bb, opts);
          out.relations.push_back({frame, ida, idb, Calculus::RCC5On, std::string(to_string(r)), false});
          out.relations.push_back({frame, idb, ida, Calculus::RCC5On, std::string(to_string(converse(r))), false});
        }
      }
      for (std::size_t h : humans) {
        const EntityObservation* oh = scene.entities[h].at(frame);
        if (!oh) continue;
        const Rcc2Result r = rcc2(*scene.entities[objects[a]].at(frame), *oh);
        out.relations.push_back(
            {frame, ida, scene.entities[h].id, Calculus::RCC2, std::string(to_string(r.relation)), r.approximate});
      }
    }
  }
  std::stable_sort(out.relations.begin(), out.relations.end(), [](const FrameRelation& x, const FrameRelation& y) {
    return std::tie(x.frame, x.first, x.second) < std::tie(y.frame, y.first, y.second);
  });
  return out;
}

SceneEpisodes episodes_from_relations(const SceneRelations& rel, const EpisodeOptions& opts) {
  std::map<std::tuple<std::string, std::string, Calculus>, std::vector<FrameToken>> streams;
  for (const auto& r : rel.relations) streams[{r.first, r.second, r.calculus}].push_back({r.frame, r.relation});
  SceneEpisodes out;
  out.scene_id = rel.scene_id;
  for (const auto& [key, tokens] : streams) {
    const auto& [first, second, calculus] = key;
    auto eps = extract_episodes(tokens, first, second, calculus, opts);
    auto& dst = calculus == Calculus::RCC2 ? out.human_episodes : out.object_episodes;
    dst.insert(dst.end(), eps.begin(), eps.end());
  }
  return out;
}

std::string format_relations(const SceneRelations& rel) {
  std::ostringstream out;
  out << "#scene\t" << rel.scene_id << '\n';
  for (const auto& [id, type] : rel.convexity) out << "#convexity\t" << id << '\t' << to_string(type) << '\n';
  for (const auto& r : rel.relations)
    out << r.frame << '\t' << r.first << '\t' << r.second << '\t' << to_string(r.calculus) << '\t' << r.relation
        << '\t' << (r.approximate ? 1 : 0) << '\n';
  return out.str();
}

void write_relations(const std::string& path, const SceneRelations& rel) { write_text(path, format_relations(rel)); }

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, '\t')) cols.push_back(c);
  return cols;
}

int parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": expected an integer, got '" + s + "'");
  }
}

ConvexityType convexity_from_string(const std::string& s, const std::string& where) {
  for (auto t : {ConvexityType::Concave, ConvexityType::Surface, ConvexityType::Convex})
    if (to_string(t) == s) return t;
  throw DataError(where + ": unknown convexity type '" + s + "'");
}

}  // namespace

SceneRelations read_relations(const std::string& path) {
  std::istringstream in(read_text(path));
  SceneRelations out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto cols = split_tabs(line);
    if (cols[0] == "#scene" && cols.size() == 2) {
      out.scene_id = cols[1];
    } else if (cols[0] == "#convexity" && cols.size() == 3) {
      out.convexity[cols[1]] = convexity_from_string(cols[2], where);
    } else if (cols.size() == 6) {
      try {
        out.relations.push_back({parse_int(cols[0], where), cols[1], cols[2], calculus_from_string(cols[3]), cols[4],
                                 cols[5] == "1"});
      } catch (const UsageError& e) {
        throw DataError(where + ": " + e.what());
      }
    } else {
      throw DataError(where + ": malformed relation record");
    }
  }
  return out;
}

std::string format_episodes(const SceneEpisodes& eps) {
  std::ostringstream out;
  out << "#scene\t" << eps.scene_id << '\n';
  for (const auto* list : {&eps.object_episodes, &eps.human_episodes})
    for (const auto& e : *list)
      out << e.first << '\t' << e.second << '\t' << to_string(e.calculus) << '\t' << e.relation << '\t'
          << e.interval.start << '\t' << e.interval.end << '\n';
  return out.str();
}

void write_episodes(const std::string& path, const SceneEpisodes& eps) { write_text(path, format_episodes(eps)); }

SceneEpisodes read_episodes(const std::string& path) {
  std::istringstream in(read_text(path));
  SceneEpisodes out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto cols = split_tabs(line);
    if (cols[0] == "#scene" && cols.size() == 2) {
      out.scene_id = cols[1];
      continue;
    }
    if (cols.size() != 6) throw DataError(where + ": malformed episode record");
    Episode e;
    e.first = cols[0];
    e.second = cols[1];
    try {
      e.calculus = calculus_from_string(cols[2]);
    } catch (const UsageError& err) {
      throw DataError(where + ": " + err.what());
    }
    e.relation = cols[3];
    e.interval = {parse_int(cols[4], where), parse_int(cols[5], where)};
    if (e.interval.end < e.interval.start) throw DataError(where + ": episode ends before it starts");
    (e.calculus == Calculus::RCC2 ? out.human_episodes : out.object_episodes).push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> files;
      for (const auto& entry : fs::directory_iterator(in))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path().string());
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else if (fs::exists(in)) {
      out.push_back(in);
    } else {
      throw UsageError("input '" + in + "' does not exist");
    }
  }
  return out;
}

EmbeddingRun embed_corpus(const std::vector<GraphletRecord>& corpus, const TrainConfig& cfg) {
  cfg.validate();
  EmbeddingRun run;
  std::vector<std::vector<std::string>> docs;
  for (const auto& r : corpus) {
    run.ids.push_back(r.id);
    docs.push_back(wl_tokens(r.canonical, cfg.wl_depth));
  }
  run.vocabulary = build_vocabulary(docs);
  run.result = train(encode_corpus(docs, run.vocabulary), run.vocabulary, cfg);
  return run;
}

CostMatrix sed_cost_matrix(const std::vector<GraphletRecord>& corpus, const SedWeights& w) {
  std::vector<LabeledGraph> graphs;
  for (const auto& r : corpus) graphs.push_back(parse_canonical_form(r.canonical));
  CostMatrix m(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i)
    for (std::size_t j = i + 1; j < graphs.size(); ++j) m.set(i, j, sed_distance(graphs[i], graphs[j], w));
  return m;
}

double choose_threshold(const Dendrogram& d, const EmbeddingTable* points, const PipelineConfig& cfg) {
  if (!cfg.auto_threshold) return cfg.threshold;
  if (!points) throw UsageError("automatic threshold selection needs embeddings (not available in sed mode)");
  return select_threshold(d, *points, *cfg.auto_threshold).threshold;
}

std::vector<std::vector<std::string>> align_groundtruth(const std::vector<std::string>& ids,
                                                        const std::vector<GroundTruthRecord>& gt) {
  std::map<std::string, std::vector<std::string>> labels;
  for (const auto& r : gt) {
    auto& l = labels[r.graph_id()];
    l.insert(l.end(), r.labels.begin(), r.labels.end());
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& id : ids) {
    auto it = labels.find(id);
    out.push_back(it == labels.end() ? std::vector<std::string>{} : it->second);
  }
  return out;
}

VMeasure evaluate_clusters(const std::vector<std::string>& ids, const FlatClustering& fc,
                           const std::vector<GroundTruthRecord>& gt) {
  if (ids.size() != fc.labels.size()) throw UsageError("evaluate: id and cluster counts differ");
  const auto truth = align_groundtruth(ids, gt);
  std::vector<std::vector<std::string>> kept_truth;
  std::vector<int> kept_clusters;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!truth[i].empty()) {
      kept_truth.push_back(truth[i]);
      kept_clusters.push_back(fc.labels[i]);
    }
  return v_measure(kept_truth, kept_clusters);
}

std::vector<GraphletRecord> graphlet_corpus(const std::vector<SceneSequence>& scenes, const PipelineConfig& cfg,
                                            std::vector<std::string>* warnings) {
  std::vector<GraphletRecord> corpus;
  for (const auto& scene : scenes) {
    const SceneRelations rel = in_stage("relations", scene.id, [&] { return compute_relations(scene, cfg); });
    if (warnings)
      for (const auto& w : rel.warnings) warnings->push_back(scene.id + ": " + w);
    const SceneEpisodes eps = in_stage("episodes", scene.id, [&] { return episodes_from_relations(rel, cfg.episodes); });
    const auto graphlets = in_stage("graphlets", scene.id, [&] { return build_agraphlets(eps, cfg.graphlets); });
    for (const auto& g : graphlets) corpus.push_back(to_record(g));
  }
  return corpus;
}

RunReport cluster_corpus(const std::vector<GraphletRecord>& corpus, const PipelineConfig& cfg,
                         const std::vector<GroundTruthRecord>& gt) {
  if (corpus.size() < 2) throw DataError("cluster: need at least 2 graphlets, got " + std::to_string(corpus.size()));
  RunReport report;
  for (const auto& r : corpus) report.graph_ids.push_back(r.id);
  EmbeddingTable points;
  if (cfg.mode == ClusterMode::Embedding) {
    EmbeddingRun run = in_stage("embed", "", [&] { return embed_corpus(corpus, cfg.train); });
    points = std::move(run.result.graph_vectors);
    report.epoch_loss = std::move(run.result.epoch_loss);
    report.dendrogram = in_stage("cluster", "", [&] { return hierarchical_cluster(points, cfg.linkage); });
  } else {
    report.dendrogram =
        in_stage("cluster", "", [&] { return hierarchical_cluster(sed_cost_matrix(corpus, cfg.sed), cfg.linkage); });
  }
  report.threshold = in_stage("cluster", "", [&] {
    return choose_threshold(report.dendrogram, points.empty() ? nullptr : &points, cfg);
  });
  report.clustering = cut(report.dendrogram, report.threshold);
  if (!gt.empty())
    report.metrics = in_stage("evaluate", "", [&] { return evaluate_clusters(report.graph_ids, report.clustering, gt); });
  return report;
}

RunReport run_pipeline(const PipelineConfig& cfg) {
  in_stage("config", "", [&] {
    cfg.validate(true);
    return 0;
  });
  const fs::path out = cfg.output;
  fs::create_directories(out / "relations");
  fs::create_directories(out / "episodes");

  const auto files = in_stage("config", "", [&] { return expand_inputs(cfg.inputs); });
  if (files.empty()) throw UsageError("config: no scene files found in the inputs");

  std::vector<GraphletRecord> corpus;
  std::vector<std::string> warnings;
  for (const auto& file : files) {
    const SceneSequence scene = in_stage("validate", file, [&] { return load_scene(file); });
    const SceneRelations rel = in_stage("relations", scene.id, [&] { return compute_relations(scene, cfg); });
    for (const auto& w : rel.warnings) warnings.push_back(scene.id + ": " + w);
    write_relations((out / "relations" / (scene.id + ".tsv")).string(), rel);
    const SceneEpisodes eps = in_stage("episodes", scene.id, [&] { return episodes_from_relations(rel, cfg.episodes); });
    write_episodes((out / "episodes" / (scene.id + ".tsv")).string(), eps);
    const auto graphlets = in_stage("graphlets", scene.id, [&] { return build_agraphlets(eps, cfg.graphlets); });
    for (const auto& g : graphlets) corpus.push_back(to_record(g));
  }
  const std::string corpus_path = (out / "graphlets.jsonl").string();
  write_corpus(corpus, corpus_path);

  std::vector<GroundTruthRecord> gt;
  if (!cfg.groundtruth.empty()) gt = in_stage("evaluate", cfg.groundtruth, [&] { return read_groundtruth(cfg.groundtruth); });

  RunReport report;
  report.warnings = warnings;
  report.artifacts["relations"] = (out / "relations").string();
  report.artifacts["episodes"] = (out / "episodes").string();
  report.artifacts["graphlets"] = corpus_path;

  if (corpus.size() < 2) throw DataError("cluster: need at least 2 graphlets, got " + std::to_string(corpus.size()));
  for (const auto& r : corpus) report.graph_ids.push_back(r.id);
  EmbeddingTable points;
  if (cfg.mode == ClusterMode::Embedding) {
    EmbeddingRun run = in_stage("embed", "", [&] { return embed_corpus(corpus, cfg.train); });
    points = std::move(run.result.graph_vectors);
    report.epoch_loss = run.result.epoch_loss;
    const std::string vocab_path = (out / "vocabulary.tsv").string();
    const std::string emb_path = (out / "embeddings.txt").string();
    const std::string loss_path = (out / "loss.tsv").string();
    write_vocabulary(vocab_path, run.vocabulary);
    write_embeddings(emb_path, run.ids, points);
    std::ostringstream loss;
    char buf[64];
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%zu\t%.17g\n", e + 1, report.epoch_loss[e]);
      loss << buf;
    }
    write_text(loss_path, loss.str());
    report.artifacts["vocabulary"] = vocab_path;
    report.artifacts["embeddings"] = emb_path;
    report.artifacts["loss"] = loss_path;
    report.dendrogram = in_stage("cluster", "", [&] { return hierarchical_cluster(points, cfg.linkage); });
  } else {
    report.dendrogram =
        in_stage("cluster", "", [&] { return hierarchical_cluster(sed_cost_matrix(corpus, cfg.sed), cfg.linkage); });
  }
  report.threshold = in_stage("cluster", "", [&] {
    return choose_threshold(report.dendrogram, points.empty() ? nullptr : &points, cfg);
  });
  report.clustering = cut(report.dendrogram, report.threshold);

  const std::string dendro_json = (out / "dendrogram.json").string();
  const std::string dendro_dot = (out / "dendrogram.dot").string();
  const std::string clusters_path = (out / "clusters.tsv").string();
  write_text(dendro_json, dendrogram_to_json(report.dendrogram, report.graph_ids, &report.clustering));
  write_text(dendro_dot, dendrogram_to_dot(report.dendrogram, report.graph_ids, report.clustering));
  write_clusters(clusters_path, report.graph_ids, report.clustering);
  report.artifacts["dendrogram"] = dendro_json;
  report.artifacts["dendrogram_dot"] = dendro_dot;
  report.artifacts["clusters"] = clusters_path;

  if (!points.empty() && points.size() >= 3 && !points.front().empty()) {
    const PcaResult pca = pca_project(points, std::min<int>(2, static_cast<int>(points.front().size())));
    const std::string pca_path = (out / "pca.csv").string();
    write_pca_csv(pca_path, report.graph_ids, report.clustering, pca);
    report.artifacts["pca"] = pca_path;
    for (const auto& w : pca.warnings) report.warnings.push_back("pca: " + w);
  }

  if (!gt.empty()) {
    report.metrics = in_stage("evaluate", "", [&] { return evaluate_clusters(report.graph_ids, report.clustering, gt); });
    const std::string metrics_path = (out / "metrics.txt").string();
    write_text(metrics_path, format_metrics(*report.metrics, report.graph_ids.size(), report.clustering.cluster_count,
                                            report.threshold));
    report.artifacts["metrics"] = metrics_path;
  }

  std::ostringstream rep;
  rep << "graphlets: " << report.graph_ids.size() << "\nclusters: " << report.clustering.cluster_count
      << "\nthreshold: " << report.threshold << '\n';
  for (const auto& [name, path] : report.artifacts) rep << name << ": " << path << '\n';
  for (const auto& w : report.warnings) rep << "warning: " << w << '\n';
  const std::string report_path = (out / "report.txt").string();
  write_text(report_path, rep.str());
  report.artifacts["report"] = report_path;
  return report;
}

}  // namespace affgraph
