// Copyright 2026 The s2screen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "s2screen/cli.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "s2screen/binary_io.hpp"
#include "s2screen/datamodel.hpp"
#include "s2screen/metrics.hpp"
#include "s2screen/retrieval.hpp"
#include "s2screen/sampling.hpp"
#include "s2screen/splits.hpp"
#include "s2screen/training.hpp"

namespace s2::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags that override keys of the JSON config file.
class Overrides {
 public:
  template <typename T>
  void option(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply_.push_back([opt, value, key](json& j) {
      if (opt->count() > 0) j[key] = *value;
    });
  }
  void flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app->add_flag(flag, *value, help);
    apply_.push_back([opt, value, key](json& j) {
      if (opt->count() > 0) j[key] = *value;
    });
  }
  void apply(json& j) const {
    for (const auto& f : apply_) f(j);
  }

 private:
  std::vector<std::function<void(json&)>> apply_;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  int threads = 1;
  bool quiet = false;

  void log(const json& j) const { err << j.dump() << '\n'; }
  void event(const std::string& name, json j) const {
    if (quiet) return;
    j["event"] = name;
    log(j);
  }
  void resolved(const std::string& command, json config) const {
    log({{"event", "config"}, {"command", command}, {"threads", threads}, {"config", std::move(config)}});
  }
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config " + path + ": expected a JSON object");
  return j;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void write_json_file(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Dataset load_dataset(const std::string& dir) { return read_dataset_dir(dir); }

std::vector<const ProteinRecord*> protein_ptrs(const std::vector<ProteinRecord>& v) {
  std::vector<const ProteinRecord*> out;
  for (const auto& p : v) out.push_back(&p);
  return out;
}

std::vector<const LigandRecord*> ligand_ptrs(const std::vector<LigandRecord>& v) {
  std::vector<const LigandRecord*> out;
  for (const auto& l : v) out.push_back(&l);
  return out;
}

train::Model load_model(const std::string& path) {
  return train::Model::from_parameters(ad::load_checkpoint(path));
}

sampling::PipelineConfig pipeline_from_json(const json& j) {
  static const std::set<std::string> kKnown = {"alpha",      "delta",          "hitter_cutoff",
                                               "strong_cut", "identity_threshold", "target_size",
                                               "seed",       "pains_denylist", "scale"};
  for (const auto& [k, v] : j.items()) {
    if (!kKnown.count(k)) throw UsageError("unknown sampling config key: " + k);
  }
  sampling::PipelineConfig c;
  try {
    c.alpha = j.value("alpha", c.alpha);
    c.delta = j.value("delta", c.delta);
    c.hitter_cutoff = j.value("hitter_cutoff", c.hitter_cutoff);
    c.strong_cut = j.value("strong_cut", c.strong_cut);
    c.identity_threshold = j.value("identity_threshold", c.identity_threshold);
    c.seed = j.value("seed", c.seed);
    c.pains_denylist = j.value("pains_denylist", c.pains_denylist);
    if (j.contains("target_size")) c.target_size = j.at("target_size").get<std::size_t>();
    const std::string scale = j.value("scale", std::string("nM"));
    if (scale == "nM") {
      c.scale = sampling::AffinityScale::kNanomolar;
    } else if (scale == "p") {
      c.scale = sampling::AffinityScale::kPValue;
    } else {
      throw UsageError("scale must be nM or p");
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("sampling config: ") + e.what());
  }
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw UsageError("alpha must be in (0, 1]");
  return c;
}

json pipeline_to_json(const sampling::PipelineConfig& c) {
  json j = {{"alpha", c.alpha},
            {"delta", c.delta},
            {"hitter_cutoff", c.hitter_cutoff},
            {"strong_cut", c.strong_cut},
            {"identity_threshold", c.identity_threshold},
            {"seed", c.seed},
            {"pains_denylist", c.pains_denylist},
            {"scale", c.scale == sampling::AffinityScale::kNanomolar ? "nM" : "p"}};
  if (c.target_size) j["target_size"] = *c.target_size;
  return j;
}

train::TrainConfig train_config(const json& file, const Overrides& o, train::Stage stage) {
  json j = file;
  o.apply(j);
  try {
    return train::TrainConfig::from_json(j, stage);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void add_training_overrides(CLI::App* app, Overrides& o, bool finetune) {
  o.option<int>(app, "--epochs", "epochs", "Training epochs");
  o.option<int>(app, "--batch-size", "batch_size", "Pairs per batch");
  o.option<double>(app, "--lr", "learning_rate", "Adam learning rate");
  o.option<double>(app, "--tau", "tau", "Contrastive temperature");
  o.option<std::uint64_t>(app, "--seed", "seed", "Random seed");
  o.option<int>(app, "--residue-dim", "residue_dim", "Sequence encoder width");
  o.option<int>(app, "--atom-dim", "atom_dim", "Molecule encoder width");
  o.option<int>(app, "--shared-dim", "shared_dim", "Shared embedding width");
  o.flag(app, "--curate", "curate", "Curate training pairs with the bilateral pipeline");
  o.flag(app, "--disable-bds", "disable_bds", "Skip curation even if configured");
  if (finetune) {
    o.option<double>(app, "--lambda", "lambda", "Binding-site loss weight");
    o.option<int>(app, "--probes", "probes", "Ligand probes per protein");
    o.option<double>(app, "--site-threshold", "site_threshold", "Binding residue distance (A)");
    o.flag(app, "--disable-ssf", "disable_ssf", "Sequence-only pocket embedding");
    o.flag(app, "--disable-bsp", "disable_bsp", "Drop the binding-site loss");
  }
}

// ---- subcommands ------------------------------------------------------------------

struct SynthArgs {
  std::size_t n = 64;
  std::size_t seq_len = 40;
  std::size_t atoms = 8;
  int classes = 8;
  int variants = 8;
  int motif_length = 5;
  int residue_atoms = 4;
  std::uint64_t seed = 0;
  std::uint64_t world_seed = 0;
  std::string prefix;
  bool noise = false;
  std::string out;
};

int run_synth(const Context& ctx, const SynthArgs& a) {
  MotifConfig mc;
  mc.n_classes = a.classes;
  mc.n_variants = a.variants;
  mc.motif_length = a.motif_length;
  mc.atoms_per_residue = a.residue_atoms;
  mc.world_seed = a.world_seed;
  mc.id_prefix = a.prefix;
  ctx.resolved("synth", {{"n", a.n},
                         {"seq_len", a.seq_len},
                         {"atoms", a.atoms},
                         {"classes", a.classes},
                         {"variants", a.variants},
                         {"motif_length", a.motif_length},
                         {"residue_atoms", a.residue_atoms},
                         {"seed", a.seed},
                         {"world_seed", a.world_seed},
                         {"prefix", a.prefix},
                         {"noise", a.noise},
                         {"out", a.out}});
  Dataset d;
  try {
    d = generate_synthetic_dataset(a.n, a.seq_len, a.atoms, mc, a.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<BindingSiteLabels> labels;
  for (const auto& t : d.triplets) {
    labels.push_back(derive_binding_labels(d.proteins.at(t.protein_id), d.ligands.at(t.ligand_id)));
  }
  if (a.noise) d = inject_noise(d, NoiseConfig{}, mc, mix_seed(a.seed, 99));
  write_dataset(a.out, d);
  auto lout = open_out(fs::path(a.out) / "labels.jsonl");
  write_labels(lout, labels);
  ctx.event("synth", {{"proteins", d.proteins.size()}, {"ligands", d.ligands.size()},
                      {"triplets", d.triplets.size()}});
  return kExitOk;
}

int run_sample(const Context& ctx, const std::string& data, const std::string& out,
               const std::string& config, const Overrides& o) {
  json j = load_config(config);
  o.apply(j);
  const sampling::PipelineConfig pc = pipeline_from_json(j);
  ctx.resolved("sample", {{"data", data}, {"out", out}, {"pipeline", pipeline_to_json(pc)}});
  const Dataset d = load_dataset(data);
  auto [curated, report] = sampling::run_bilateral_pipeline(d, pc);
  write_dataset(out, curated);
  write_json_file(fs::path(out) / "report.json", report.to_json());
  ctx.event("sample", report.to_json());
  return kExitOk;
}

int run_train(const Context& ctx, train::Stage stage, const std::string& data, const std::string& init,
              const std::string& out, const std::string& log_path, const std::string& config,
              const Overrides& o) {
  const train::TrainConfig tc = train_config(load_config(config), o, stage);
  const std::string log_file = log_path.empty() ? out + ".log.jsonl" : log_path;
  const char* name = stage == train::Stage::kPretrain ? "pretrain" : "finetune";
  json resolved = {{"data", data}, {"out", out}, {"log", log_file}, {"train", tc.to_json()}};
  if (stage == train::Stage::kFinetune) resolved["init"] = init;
  ctx.resolved(name, resolved);

  const Dataset d = load_dataset(data);
  auto log = open_out(log_file);
  auto on_epoch = [&](const train::EpochLog& e, const train::Model& m) {
    log << e.to_json().dump() << '\n';
    log.flush();
    ad::save_checkpoint(out, m.params);
    ctx.event("epoch", e.to_json());
  };
  train::TrainResult result;
  if (stage == train::Stage::kPretrain) {
    result = train::pretrain(d, tc, on_epoch);
  } else {
    if (init.empty()) throw UsageError("finetune needs --init");
    result = train::finetune(d, tc, ad::load_checkpoint(init), on_epoch);
  }
  if (result.curation) ctx.event("curation", result.curation->to_json());
  ad::save_checkpoint(out, result.model.params);
  return kExitOk;
}

struct EmbedArgs {
  std::string ckpt;
  std::string data;
  std::string proteins;
  std::string ligands;
  std::string mode;
  std::string out;
};

int run_embed(const Context& ctx, const EmbedArgs& a) {
  train::EmbedMode mode;
  try {
    mode = train::parse_embed_mode(a.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const int sources = !a.data.empty() + !a.proteins.empty() + !a.ligands.empty();
  if (sources != 1) throw UsageError("embed needs exactly one of --data, --proteins, --ligands");
  ctx.resolved("embed", {{"ckpt", a.ckpt}, {"data", a.data}, {"proteins", a.proteins},
                         {"ligands", a.ligands}, {"mode", a.mode}, {"out", a.out}});
  train::Model model = load_model(a.ckpt);
  retrieval::EmbeddingStore store;
  if (!a.data.empty()) {
    store = train::embed_corpus(model, load_dataset(a.data), mode, ctx.threads);
  } else if (!a.ligands.empty()) {
    if (mode != train::EmbedMode::kLigand) throw DataError("--ligands input needs --mode ligand");
    const auto ligands = read_ligands_file(a.ligands);
    store = train::embed_ligands(model, ligand_ptrs(ligands), ctx.threads);
  } else {
    if (mode == train::EmbedMode::kLigand) throw DataError("--proteins input cannot use --mode ligand");
    const auto proteins = read_proteins_file(a.proteins);
    store = train::embed_proteins(model, protein_ptrs(proteins), mode, ctx.threads);
  }
  retrieval::store_write(a.out, store);
  ctx.event("embed", {{"rows", store.size()}, {"dim", store.dim}});
  return kExitOk;
}

struct ScreenArgs {
  std::string ckpt;
  std::string proteins;
  std::string library;
  std::size_t top_k = 100;
  std::string out;
  std::string affinities;
  std::string ranks_out;
};

int run_screen(const Context& ctx, const ScreenArgs& a) {
  if (a.top_k < 1) throw UsageError("--top-k must be >= 1");
  if (a.ranks_out.empty() != a.affinities.empty()) {
    throw UsageError("--ranks-out and --affinities go together");
  }
  ctx.resolved("screen", {{"pocket_ckpt", a.ckpt}, {"proteins", a.proteins}, {"library", a.library},
                          {"top_k", a.top_k}, {"out", a.out}, {"affinities", a.affinities},
                          {"ranks_out", a.ranks_out}});
  train::Model model = load_model(a.ckpt);
  const auto proteins = read_proteins_file(a.proteins);
  const retrieval::EmbeddingStore library = retrieval::store_read(a.library);
  if (library.size() == 0) throw DataError("library store is empty");
  const retrieval::EmbeddingStore queries =
      train::embed_proteins(model, protein_ptrs(proteins), train::EmbedMode::kPocket, ctx.threads);
  if (queries.dim != library.dim) {
    throw DataError("library dim " + std::to_string(library.dim) + " differs from model dim " +
                    std::to_string(queries.dim));
  }
  const auto hits = retrieval::screen_batch(queries.vectors, library, a.top_k, ctx.threads);
  std::ostringstream buf;
  for (std::size_t q = 0; q < hits.size(); ++q) {
    json rows = json::array();
    for (const auto& h : hits[q]) rows.push_back({{"ligand_id", h.id}, {"score", h.score}});
    buf << json{{"protein_id", queries.ids[q]}, {"hits", rows}}.dump() << '\n';
  }
  if (a.out.empty()) {
    ctx.out << buf.str();
  } else {
    auto out = open_out(a.out);
    out << buf.str();
  }

  if (!a.ranks_out.empty()) {
    auto in = open_in(a.affinities);
    std::set<std::pair<std::string, std::string>> actives;
    for (const auto& t : read_affinities(in, fs::path(a.affinities).filename().string())) {
      actives.insert({t.protein_id, t.ligand_id});
    }
    std::vector<metrics::NamedList> lists;
    std::size_t skipped = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      metrics::RankedList list;
      list.scores = retrieval::cosine_scores(queries.vectors.row(static_cast<Eigen::Index>(q)), library);
      for (const auto& id : library.ids) list.labels.push_back(actives.count({queries.ids[q], id}) ? 1 : 0);
      const std::size_t pos = list.positives();
      if (pos == 0 || pos == list.size()) {
        ++skipped;
        continue;
      }
      lists.emplace_back(queries.ids[q], std::move(list));
    }
    auto out = open_out(a.ranks_out);
    metrics::write_ranks(out, lists);
    ctx.event("ranks", {{"targets", lists.size()}, {"skipped_single_class", skipped}});
  }
  return kExitOk;
}

int run_predict_sites(const Context& ctx, const std::string& ckpt, const std::string& data,
                      int probes, const std::string& out_path) {
  if (probes < 1) throw UsageError("--probes must be >= 1");
  ctx.resolved("predict-sites", {{"ckpt", ckpt}, {"data", data}, {"probes", probes}, {"out", out_path}});
  train::Model model = load_model(ckpt);
  const Dataset d = load_dataset(data);
  // Probes: the protein's own ligands from the affinity table, by ligand id.
  std::map<std::string, std::set<std::string>> paired;
  for (const auto& t : d.triplets) paired[t.protein_id].insert(t.ligand_id);
  auto out = open_out(out_path);
  std::size_t written = 0;
  for (const auto& [id, protein] : d.proteins) {
    auto it = paired.find(id);
    if (it == paired.end()) continue;
    std::vector<const LigandRecord*> ligands;
    for (const auto& lid : it->second) {
      if (static_cast<int>(ligands.size()) == probes) break;
      ligands.push_back(&d.ligands.at(lid));
    }
    out << json{{"protein_id", id}, {"scores", train::predict_sites(model, protein, ligands)}}.dump() << '\n';
    ++written;
  }
  ctx.event("predict-sites", {{"proteins", written}});
  return kExitOk;
}

int run_eval_vs(const Context& ctx, const std::string& ranks, const std::string& out_path) {
  ctx.resolved("eval-vs", {{"ranks", ranks}, {"out", out_path}});
  auto in = open_in(ranks);
  const auto lists = metrics::read_ranks(in, fs::path(ranks).filename().string());
  if (lists.empty()) throw DataError(ranks + ": no targets");
  metrics::ScreeningReport report;
  try {
    report = metrics::evaluate_screening(lists);
  } catch (const std::invalid_argument& e) {
    throw DataError(ranks + ": " + e.what());
  }
  const json j = report.to_json();
  if (out_path.empty()) {
    ctx.out << j.dump(2) << '\n';
  } else {
    write_json_file(out_path, j);
  }
  ctx.event("eval-vs", j.at("macro"));
  return kExitOk;
}

int run_eval_sites(const Context& ctx, const std::string& predictions, const std::string& labels_path,
                   const std::string& out_path) {
  ctx.resolved("eval-sites", {{"predictions", predictions}, {"labels", labels_path}, {"out", out_path}});
  auto lin = open_in(labels_path);
  std::map<std::string, std::vector<std::uint8_t>> labels;
  for (auto& b : read_labels(lin, fs::path(labels_path).filename().string())) {
    labels.emplace(b.protein_id, std::move(b.labels));
  }
  auto pin = open_in(predictions);
  const std::string source = fs::path(predictions).filename().string();
  std::vector<metrics::NamedList> lists;
  std::string line;
  std::size_t n = 0;
  while (std::getline(pin, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) {
      return DataError(source + ":" + std::to_string(n) + ": " + why);
    };
    metrics::RankedList list;
    std::string id;
    try {
      const json j = json::parse(line);
      id = j.at("protein_id").get<std::string>();
      list.scores = j.at("scores").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
    auto it = labels.find(id);
    if (it == labels.end()) throw fail("no labels for protein " + id);
    list.labels = it->second;
    if (list.labels.size() != list.scores.size()) throw fail("score/label length mismatch for " + id);
    lists.emplace_back(id, std::move(list));
  }
  metrics::SiteReport report;
  try {
    report = metrics::evaluate_sites(lists);
  } catch (const std::invalid_argument& e) {
    throw DataError(predictions + ": " + e.what());
  }
  const json j = report.to_json();
  if (out_path.empty()) {
    ctx.out << j.dump(2) << '\n';
  } else {
    write_json_file(out_path, j);
  }
  ctx.event("eval-sites", j.at("macro"));
  return kExitOk;
}

int run_split(const Context& ctx, const std::string& train_path, const std::string& test_path,
              double cutoff, const std::string& out) {
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw UsageError("--cutoff must be in (0, 1]");
  ctx.resolved("split", {{"train", train_path}, {"test", test_path}, {"cutoff", cutoff}, {"out", out}});
  const auto train = read_proteins_file(train_path);
  const auto test = read_proteins_file(test_path);
  if (train.empty() || test.empty()) throw DataError("split needs nonempty train and test sets");
  const auto result = splits::homology_exclusion_split(train, test, cutoff, ctx.threads);
  auto pout = open_out(fs::path(out) / "proteins.jsonl");
  write_proteins(pout, protein_ptrs(result.kept));
  write_json_file(fs::path(out) / "audit.json", result.audit_json());
  ctx.event("split", {{"kept", result.kept.size()}, {"removed", result.removed.size()}});
  return kExitOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"s2screen: sequence-structure virtual screening", "s2screen"};
  app.require_subcommand(1);
  Context ctx{out, err};
  app.add_option("--threads", ctx.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", ctx.quiet, "Only log the resolved config");

  std::function<int()> run;

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a planted synthetic corpus");
  s_synth->add_option("--n", synth.n, "Pairs")->required();
  s_synth->add_option("--seq-len", synth.seq_len, "Residues per protein");
  s_synth->add_option("--atoms", synth.atoms, "Atoms per ligand");
  s_synth->add_option("--classes", synth.classes, "Latent classes");
  s_synth->add_option("--variants", synth.variants, "Geometric variants");
  s_synth->add_option("--motif-length", synth.motif_length, "Pocket motif length");
  s_synth->add_option("--residue-atoms", synth.residue_atoms, "Atoms per residue");
  s_synth->add_option("--seed", synth.seed, "Sample seed");
  s_synth->add_option("--world-seed", synth.world_seed, "Motif seed");
  s_synth->add_option("--prefix", synth.prefix, "Id prefix");
  s_synth->add_flag("--noise", synth.noise, "Inject mismatched and promiscuous pairs");
  s_synth->add_option("--out", synth.out, "Output directory")->required();
  s_synth->callback([&] { run = [&] { return run_synth(ctx, synth); }; });

  std::string data, out_path, config, init, log_path, ckpt;
  Overrides sample_o;
  auto* s_sample = app.add_subcommand("sample", "Bilateral curation of a dataset directory");
  s_sample->add_option("--data,--in", data, "Dataset directory")->required();
  s_sample->add_option("--out", out_path, "Output directory")->required();
  s_sample->add_option("--config", config, "JSON config");
  sample_o.option<double>(s_sample, "--alpha", "alpha", "Homology weight exponent");
  sample_o.option<double>(s_sample, "--delta", "delta", "Affinity log10 std cutoff");
  sample_o.option<int>(s_sample, "--hitter-cutoff", "hitter_cutoff", "Frequent-hitter target count");
  sample_o.option<double>(s_sample, "--strong-cut", "strong_cut", "Strong pAffinity");
  sample_o.option<double>(s_sample, "--identity", "identity_threshold", "Clustering identity");
  sample_o.option<std::size_t>(s_sample, "--target-size,--target", "target_size", "Triplets to keep");
  sample_o.option<std::uint64_t>(s_sample, "--seed", "seed", "Sampling seed");
  sample_o.option<std::string>(s_sample, "--scale", "scale", "Affinity scale: nM or p");
  s_sample->callback([&] { run = [&] { return run_sample(ctx, data, out_path, config, sample_o); }; });

  Overrides pre_o;
  auto* s_pre = app.add_subcommand("pretrain", "Stage-1 sequence pretraining");
  s_pre->add_option("--data", data, "Dataset directory")->required();
  s_pre->add_option("--out", out_path, "Checkpoint path")->required();
  s_pre->add_option("--config", config, "JSON config");
  s_pre->add_option("--log", log_path, "Training log (JSONL)");
  add_training_overrides(s_pre, pre_o, false);
  s_pre->callback([&] {
    run = [&] {
      return run_train(ctx, train::Stage::kPretrain, data, "", out_path, log_path, config, pre_o);
    };
  });

  Overrides fine_o;
  auto* s_fine = app.add_subcommand("finetune", "Stage-2 fusion finetuning");
  s_fine->add_option("--data", data, "Dataset directory with pockets")->required();
  s_fine->add_option("--init", init, "Stage-1 checkpoint")->required();
  s_fine->add_option("--out", out_path, "Checkpoint path")->required();
  s_fine->add_option("--config", config, "JSON config");
  s_fine->add_option("--log", log_path, "Training log (JSONL)");
  add_training_overrides(s_fine, fine_o, true);
  s_fine->callback([&] {
    run = [&] {
      return run_train(ctx, train::Stage::kFinetune, data, init, out_path, log_path, config, fine_o);
    };
  });

  EmbedArgs embed;
  auto* s_embed = app.add_subcommand("embed", "Write an embedding store");
  s_embed->add_option("--ckpt", embed.ckpt, "Checkpoint")->required();
  s_embed->add_option("--data", embed.data, "Dataset directory");
  s_embed->add_option("--proteins", embed.proteins, "proteins.jsonl");
  s_embed->add_option("--ligands", embed.ligands, "ligands.jsonl");
  s_embed->add_option("--mode", embed.mode, "pocket | ligand | sequence")->required();
  s_embed->add_option("--out", embed.out, "Store path")->required();
  s_embed->callback([&] { run = [&] { return run_embed(ctx, embed); }; });

  ScreenArgs screen;
  auto* s_screen = app.add_subcommand("screen", "Rank a ligand library for each pocket");
  s_screen->add_option("--pocket-ckpt", screen.ckpt, "Finetuned checkpoint")->required();
  s_screen->add_option("--proteins", screen.proteins, "proteins.jsonl with pockets")->required();
  s_screen->add_option("--library", screen.library, "Ligand embedding store")->required();
  s_screen->add_option("--top-k", screen.top_k, "Hits per protein");
  s_screen->add_option("--out", screen.out, "Hits JSONL (default stdout)");
  s_screen->add_option("--affinities", screen.affinities, "Known actives for --ranks-out");
  s_screen->add_option("--ranks-out", screen.ranks_out, "Full ranked lists for eval-vs");
  s_screen->callback([&] { run = [&] { return run_screen(ctx, screen); }; });

  int probes = 4;
  auto* s_sites = app.add_subcommand("predict-sites", "Per-residue binding scores");
  s_sites->add_option("--ckpt", ckpt, "Finetuned checkpoint")->required();
  s_sites->add_option("--data", data, "Dataset directory")->required();
  s_sites->add_option("--probes", probes, "Maximum ligand probes per protein");
  s_sites->add_option("--out", out_path, "Scores JSONL")->required();
  s_sites->callback([&] { run = [&] { return run_predict_sites(ctx, ckpt, data, probes, out_path); }; });

  std::string ranks;
  auto* s_evs = app.add_subcommand("eval-vs", "Screening metrics from ranked lists");
  s_evs->add_option("--ranks", ranks, "ranks.jsonl")->required();
  s_evs->add_option("--out", out_path, "Report JSON (default stdout)");
  s_evs->callback([&] { run = [&] { return run_eval_vs(ctx, ranks, out_path); }; });

  std::string predictions, labels;
  auto* s_esites = app.add_subcommand("eval-sites", "Binding-site metrics");
  s_esites->add_option("--predictions", predictions, "Scores JSONL")->required();
  s_esites->add_option("--labels", labels, "labels.jsonl")->required();
  s_esites->add_option("--out", out_path, "Report JSON (default stdout)");
  s_esites->callback([&] { run = [&] { return run_eval_sites(ctx, predictions, labels, out_path); }; });

  std::string train_path, test_path;
  double cutoff = 0.6;
  auto* s_split = app.add_subcommand("split", "Homology-exclusion filtering of training proteins");
  s_split->add_option("--train", train_path, "Training proteins.jsonl")->required();
  s_split->add_option("--test", test_path, "Test proteins.jsonl")->required();
  s_split->add_option("--cutoff", cutoff, "Identity cutoff");
  s_split->add_option("--out", out_path, "Output directory")->required();
  s_split->callback([&] { run = [&] { return run_split(ctx, train_path, test_path, cutoff, out_path); }; });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (argc <= 1) {
      err << app.help();
    } else {
      err << json{{"event", "error"}, {"kind", "usage"}, {"message", e.what()}}.dump() << '\n';
    }
    return kExitUsage;
  }

  try {
    return run();
  } catch (const UsageError& e) {
    err << json{{"event", "error"}, {"kind", "usage"}, {"message", e.what()}}.dump() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << json{{"event", "error"}, {"kind", "data"}, {"message", e.what()}}.dump() << '\n';
    return kExitData;
  }
}

}  // namespace s2::cli
