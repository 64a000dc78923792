// Command line front end: one subcommand per pipeline stage plus `run`,
// `synth` and `export`.
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "affgraph/config.hpp"
#include "affgraph/error.hpp"
#include "affgraph/export.hpp"
#include "affgraph/pipeline.hpp"
#include "affgraph/synthetic.hpp"

using namespace affgraph;
namespace fs = std::filesystem;

namespace {

const char* const kConfigKeys[] = {
    "profile",     "thresh_convex", "h",          "n",         "noise_ratio", "alg1_literal", "per_frame_convexity",
    "calculus",    "rcc5_with_on",  "smoothing",  "gap_bridge", "temporal_cap", "human_part", "embedding_dim",
    "learning_rate", "batch_size",  "wl_depth",   "negatives", "epochs",      "objective",    "mode",
    "linkage",     "threshold",     "c_spat",     "k_spat",    "seed",        "groundtruth",  "output",
};

// Config flags shared by every stage: --config FILE and one --<key> per key.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file (default: $AFFGRAPH_CONFIG)");
    for (const char* key : kConfigKeys) {
      // Single-letter keys collide with short flags, so h and n get long names.
      const std::string k = key;
      const std::string flag = k == "h" ? "sections" : k == "n" ? "deep_sections" : k;
      app->add_option("--" + flag, values[k], "config key " + k);
    }
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (auto it = values.find("profile"); it != values.end() && !it->second.empty()) apply_profile(cfg, it->second);
    for (const auto& [key, value] : values)
      if (key != "profile" && !value.empty()) set_config_value(cfg, key, value);
    cfg.validate();
    return cfg;
  }
};

int run_cli(int argc, char** argv) {
  CLI::App app{"Affordance learning from qualitative spatio-temporal interaction graphs"};
  app.require_subcommand(1);

  ConfigFlags flags;

  auto* validate = app.add_subcommand("validate", "Check scene files against the schema");
  std::vector<std::string> validate_files;
  validate->add_option("scenes", validate_files, "scene JSON files")->required();

  auto* relations = app.add_subcommand("relations", "Per-frame qualitative relations of one scene");
  std::string rel_scene, rel_out;
  relations->add_option("scene", rel_scene, "scene JSON file")->required();
  relations->add_option("-o,--out", rel_out, "relations TSV (default: stdout)");

  auto* episodes = app.add_subcommand("episodes", "Segment relations into episodes");
  std::string ep_in, ep_out;
  episodes->add_option("relations", ep_in, "relations TSV")->required();
  episodes->add_option("-o,--out", ep_out, "episodes TSV (default: stdout)");

  auto* graphlets = app.add_subcommand("graphlets", "Build interaction graphlets from episode files");
  std::vector<std::string> gr_in;
  std::string gr_out;
  graphlets->add_option("episodes", gr_in, "episode TSV files")->required();
  graphlets->add_option("-o,--out", gr_out, "graphlet corpus (JSON lines)")->required();

  auto* embed = app.add_subcommand("embed", "Train graph embeddings on a graphlet corpus");
  std::string em_in, em_out, em_vocab, em_loss;
  embed->add_option("corpus", em_in, "graphlet corpus")->required();
  embed->add_option("-o,--out", em_out, "embedding table")->required();
  embed->add_option("--vocab", em_vocab, "vocabulary TSV");
  embed->add_option("--loss", em_loss, "per-epoch loss TSV");

  auto* cluster = app.add_subcommand("cluster", "Hierarchical clustering and flat cut");
  std::string cl_in, cl_out, cl_dendro;
  cluster->add_option("input", cl_in, "embedding table, or graphlet corpus in sed mode")->required();
  cluster->add_option("-o,--out", cl_out, "clusters TSV")->required();
  cluster->add_option("--dendrogram", cl_dendro, "dendrogram JSON");

  auto* evaluate = app.add_subcommand("evaluate", "Homogeneity, completeness and V-measure");
  std::string ev_clusters, ev_gt;
  evaluate->add_option("clusters", ev_clusters, "clusters TSV")->required();
  evaluate->add_option("--truth", ev_gt, "groundtruth TSV")->required();

  auto* run = app.add_subcommand("run", "Full pipeline from scenes to metrics");
  std::vector<std::string> run_inputs;
  run->add_option("inputs", run_inputs, "scene files or directories");

  auto* synth = app.add_subcommand("synth", "Generate scripted synthetic scenes");
  std::string sy_out, sy_script;
  int sy_per_class = 20;
  std::uint64_t sy_seed = 7;
  double sy_jitter = 0;
  bool sy_regrasp = false, sy_early = false;
  synth->add_option("-o,--out", sy_out, "output directory")->required();
  synth->add_option("--per-class", sy_per_class, "scenes per interaction class (corpus mode)");
  synth->add_option("--script", sy_script, "comma-separated events for a single scene");
  synth->add_option("--synth-seed", sy_seed, "generator seed");
  synth->add_option("--jitter", sy_jitter, "depth jitter (single-scene mode)");
  synth->add_flag("--regrasp", sy_regrasp, "touch the object again after release (single-scene mode)");
  synth->add_flag("--early-release", sy_early, "release before the target relation (single-scene mode)");

  auto* exporter = app.add_subcommand("export", "Render a dendrogram or PCA projection");
  std::string ex_dendro, ex_clusters, ex_format = "dot", ex_out, ex_embeddings;
  exporter->add_option("dendrogram", ex_dendro, "dendrogram JSON")->required();
  exporter->add_option("--clusters", ex_clusters, "clusters TSV for coloring");
  exporter->add_option("--format", ex_format, "dot, json or pca")->check(CLI::IsMember({"dot", "json", "pca"}));
  exporter->add_option("--embeddings", ex_embeddings, "embedding table (pca format)");
  exporter->add_option("-o,--out", ex_out, "output file")->required();

  for (auto* sub : {relations, episodes, graphlets, embed, cluster, run, synth}) flags.attach(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::Usage);
  }

  if (validate->parsed()) {
    for (const auto& f : validate_files) {
      const SceneSequence s = load_scene(f);
      std::cout << f << ": ok (" << s.entities.size() << " entities, " << s.frame_count << " frames)\n";
    }
    return 0;
  }
  if (relations->parsed()) {
    const PipelineConfig cfg = flags.resolve();
    const SceneRelations rel = compute_relations(load_scene(rel_scene), cfg);
    for (const auto& w : rel.warnings) std::cerr << "warning: " << w << '\n';
    if (rel_out.empty()) std::cout << format_relations(rel);
    else write_relations(rel_out, rel);
    return 0;
  }
  if (episodes->parsed()) {
    const PipelineConfig cfg = flags.resolve();
    const SceneEpisodes eps = episodes_from_relations(read_relations(ep_in), cfg.episodes);
    if (ep_out.empty()) std::cout << format_episodes(eps);
    else write_episodes(ep_out, eps);
    return 0;
  }
  if (graphlets->parsed()) {
    const PipelineConfig cfg = flags.resolve();
    std::vector<GraphletRecord> corpus;
    for (const auto& f : gr_in)
      for (const auto& g : build_agraphlets(read_episodes(f), cfg.graphlets)) corpus.push_back(to_record(g));
    write_corpus(corpus, gr_out);
    std::cout << corpus.size() << " graphlets\n";
    return 0;
  }
  if (embed->parsed()) {
    const PipelineConfig cfg = flags.resolve();
    const EmbeddingRun r = embed_corpus(read_corpus(em_in), cfg.train);
    write_embeddings(em_out, r.ids, r.result.graph_vectors);
    if (!em_vocab.empty()) write_vocabulary(em_vocab, r.vocabulary);
    if (!em_loss.empty()) {
      std::ostringstream loss;
      for (std::size_t e = 0; e < r.result.epoch_loss.size(); ++e) loss << e + 1 << '\t' << r.result.epoch_loss[e] << '\n';
      write_text(em_loss, loss.str());
    }
    std::cout << r.ids.size() << " graphs, vocabulary " << r.vocabulary.size() << ", final loss "
              << r.result.epoch_loss.back() << '\n';
    return 0;
  }
  if (cluster->parsed()) {
    const PipelineConfig cfg = flags.resolve();
    std::vector<std::string> ids;
    EmbeddingTable points;
    Dendrogram d;
    if (cfg.mode == ClusterMode::Sed) {
      const auto corpus = read_corpus(cl_in);
      for (const auto& r : corpus) ids.push_back(r.id);
      if (corpus.size() < 2) throw DataError("cluster: need at least 2 graphlets");
      d = hierarchical_cluster(sed_cost_matrix(corpus, cfg.sed), cfg.linkage);
    } else {
      read_embeddings(cl_in, ids, points);
      if (points.size() < 2) throw DataError("cluster: need at least 2 embeddings");
      d = hierarchical_cluster(points, cfg.linkage);
    }
    const double threshold = choose_threshold(d, points.empty() ? nullptr : &points, cfg);
    const FlatClustering fc = cut(d, threshold);
    write_clusters(cl_out, ids, fc);
    if (!cl_dendro.empty()) write_text(cl_dendro, dendrogram_to_json(d, ids, &fc));
    std::cout << fc.cluster_count << " clusters at threshold " << threshold << '\n';
    return 0;
  }
  if (evaluate->parsed()) {
    std::vector<std::string> ids;
    FlatClustering fc;
    read_clusters(ev_clusters, ids, fc);
    const VMeasure m = evaluate_clusters(ids, fc, read_groundtruth(ev_gt));
    std::cout << format_metrics(m, ids.size(), fc.cluster_count, 0.0);
    return 0;
  }
  if (run->parsed()) {
    PipelineConfig cfg = flags.resolve();
    if (!run_inputs.empty()) cfg.inputs = run_inputs;
    const RunReport r = run_pipeline(cfg);
    std::cout << read_text(r.artifacts.at("report"));
    if (r.metrics) std::cout << read_text(r.artifacts.at("metrics"));
    return 0;
  }
  if (synth->parsed()) {
    const PipelineConfig cfg = flags.resolve();
    fs::create_directories(sy_out);
    std::vector<SyntheticScene> scenes;
    if (!sy_script.empty()) {
      SyntheticScript script;
      std::stringstream ss(sy_script);
      std::string ev;
      while (std::getline(ss, ev, ',')) script.events.push_back(script_event_from_string(ev));
      script.regrasp = sy_regrasp;
      script.early_release = sy_early;
      script.depth_jitter = sy_jitter;
      script.params = cfg.convexity;
      scenes.push_back(generate_synthetic(script, sy_seed, "scene_00"));
    } else {
      if (sy_per_class < 1) throw UsageError("--per-class must be positive");
      scenes = generate_corpus(sy_per_class, sy_seed, cfg.convexity);
    }
    std::vector<GroundTruthRecord> gt;
    for (const auto& s : scenes) {
      save_scene(s.scene, fs::path(sy_out) / (s.scene.id + ".json"));
      gt.insert(gt.end(), s.groundtruth.begin(), s.groundtruth.end());
    }
    write_groundtruth((fs::path(sy_out) / "groundtruth.tsv").string(), gt);
    std::cout << scenes.size() << " scenes written to " << sy_out << '\n';
    return 0;
  }
  if (exporter->parsed()) {
    Dendrogram d;
    std::vector<std::string> ids;
    dendrogram_from_json(read_text(ex_dendro), d, ids);
    FlatClustering fc;
    if (!ex_clusters.empty()) {
      std::vector<std::string> cids;
      read_clusters(ex_clusters, cids, fc);
      if (cids != ids) throw DataError("export: clusters file does not match the dendrogram leaves");
    } else {
      fc.labels.assign(d.leaf_count, 0);
      fc.cluster_count = 1;
    }
    if (ex_format == "dot") {
      write_text(ex_out, dendrogram_to_dot(d, ids, fc));
    } else if (ex_format == "json") {
      write_text(ex_out, dendrogram_to_json(d, ids, &fc));
    } else {
      if (ex_embeddings.empty()) throw UsageError("export: pca format needs --embeddings");
      std::vector<std::string> eids;
      EmbeddingTable points;
      read_embeddings(ex_embeddings, eids, points);
      if (eids != ids) throw DataError("export: embeddings do not match the dendrogram leaves");
      const PcaResult pca = pca_project(points, 2);
      for (const auto& w : pca.warnings) std::cerr << "warning: " << w << '\n';
      write_pca_csv(ex_out, ids, fc, pca);
    }
    return 0;
  }
  return static_cast<int>(ExitCode::Usage);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Data);
  }
}
