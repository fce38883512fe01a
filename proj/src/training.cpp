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

#include "s2screen/training.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <thread>

#include "s2screen/losses.hpp"

namespace s2::train {

namespace {

constexpr const char* kSsfFlag = "config.disable_ssf";

void require_param(const ad::ParameterSet& params, const std::string& name, Eigen::Index rows,
                   Eigen::Index cols) {
  if (!params.contains(name)) throw DataError("checkpoint is missing parameter " + name);
  const Matrix& v = params.at(name).value;
  if ((rows >= 0 && v.rows() != rows) || (cols >= 0 && v.cols() != cols)) {
    throw DataError("checkpoint parameter " + name + " has shape " + std::to_string(v.rows()) +
                    "x" + std::to_string(v.cols()));
  }
  if (!v.allFinite()) throw DataError("checkpoint parameter " + name + " is not finite");
}

std::vector<ad::Parameter*> with_gradients(ad::ParameterSet& params) {
  std::vector<ad::Parameter*> out;
  for (auto& p : params) {
    if (p.grad) out.push_back(&p);
  }
  return out;
}

struct Pair {
  std::size_t protein;
  std::size_t ligand;
};

// Unique (protein, ligand) pairs in first-appearance order, with prepared
// records indexed by position.
struct PairTable {
  std::vector<PreparedProtein> proteins;
  std::vector<enc::MoleculeGeometry> ligands;
  std::vector<const ProteinRecord*> protein_records;
  std::vector<const LigandRecord*> ligand_records;
  std::vector<Pair> pairs;
};

PairTable build_pairs(const Dataset& d, bool need_pocket) {
  PairTable t;
  std::map<std::string, std::size_t> pidx;
  std::map<std::string, std::size_t> lidx;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& trip : d.triplets) {
    auto pit = d.proteins.find(trip.protein_id);
    auto lit = d.ligands.find(trip.ligand_id);
    if (pit == d.proteins.end() || lit == d.ligands.end()) {
      throw DataError("affinity row references unknown record " + trip.protein_id + "/" + trip.ligand_id);
    }
    auto [pi, pnew] = pidx.try_emplace(trip.protein_id, t.proteins.size());
    if (pnew) {
      t.proteins.push_back(prepare_protein(pit->second, need_pocket));
      t.protein_records.push_back(&pit->second);
    }
    auto [li, lnew] = lidx.try_emplace(trip.ligand_id, t.ligands.size());
    if (lnew) {
      t.ligands.push_back(enc::make_geometry(lit->second));
      t.ligand_records.push_back(&lit->second);
    }
    if (seen.insert({pi->second, li->second}).second) t.pairs.push_back({pi->second, li->second});
  }
  if (t.pairs.empty()) throw DataError("training dataset has no affinity pairs");
  return t;
}

Dataset maybe_curate(const Dataset& dataset, const TrainConfig& config,
                     std::optional<sampling::CurationReport>& report) {
  if (!config.curation || config.ablations.disable_bds) return dataset;
  auto [curated, rep] = sampling::run_bilateral_pipeline(dataset, *config.curation);
  report = rep;
  return std::move(curated);
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, int batch_size, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  const auto b = static_cast<std::size_t>(batch_size);
  for (std::size_t start = 0; start < n; start += b) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + b)));
  }
  return batches;
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

// ---- model ------------------------------------------------------------------------

Model Model::create(const ModelConfig& config, std::uint64_t seed) {
  if (config.residue_dim < 8 || config.atom_dim < 1 || config.shared_dim < 1) {
    throw std::invalid_argument("ModelConfig: dimensions too small");
  }
  Model m;
  Rng rng(mix_seed(seed, 11));
  enc::SequenceEncoder::create(m.params, "seq", config.residue_dim, rng);
  enc::MoleculeEncoder::create(m.params, "lig", config.atom_dim, enc::RbfConfig{}, rng);
  enc::ProjectionHead::create(m.params, "proj_p", config.residue_dim, config.shared_dim, rng);
  enc::ProjectionHead::create(m.params, "proj_l", config.atom_dim, config.shared_dim, rng);
  return m;
}

Model Model::from_parameters(ad::ParameterSet params) {
  require_param(params, "seq.embed", kResidueVocab, -1);
  require_param(params, "lig.embed", kElementVocab, -1);
  const Eigen::Index ds = params.at("seq.embed").value.cols();
  const Eigen::Index dg = params.at("lig.embed").value.cols();
  require_param(params, "proj_l.w1", dg, -1);
  const Eigen::Index d = params.at("proj_l.w1").value.cols();
  for (const char* n : {"seq.w1", "seq.w2"}) require_param(params, n, ds, ds);
  for (const char* n : {"seq.b1", "seq.b2"}) require_param(params, n, 1, ds);
  require_param(params, "lig.filter_w", enc::RbfConfig{}.centers, dg);
  require_param(params, "lig.filter_b", 1, dg);
  require_param(params, "lig.out_w", 2 * dg, dg);
  require_param(params, "lig.out_b", 1, dg);
  require_param(params, "proj_p.w1", ds, d);
  for (const char* n : {"proj_p.w2", "proj_l.w2"}) require_param(params, n, d, d);
  for (const char* n : {"proj_p.b1", "proj_p.b2", "proj_l.b1", "proj_l.b2"}) require_param(params, n, 1, d);
  if (params.contains("fusion.w_s")) {
    require_param(params, "fusion.w_s", ds, d);
    require_param(params, "fusion.w_g", dg, d);
    require_param(params, "fusion.w_beta", 2 * d, 1);
    require_param(params, "fusion.b_beta", 1, 1);
    require_param(params, "pocket.embed", kElementVocab, dg);
    require_param(params, "probe.w_r", ds, d);
    require_param(params, "probe.w_l", d, d);
  }
  Model m;
  m.params = std::move(params);
  return m;
}

void Model::add_stage2(std::uint64_t seed, bool disable_ssf) {
  const ModelConfig c = config();
  Rng rng(mix_seed(seed, 12));
  if (!params.contains("pocket.embed")) {
    enc::MoleculeEncoder::create(params, "pocket", c.atom_dim, enc::RbfConfig{}, rng);
  }
  if (!params.contains("fusion.w_s")) {
    fusion::FusionModule::create(params, "fusion", c.residue_dim, c.atom_dim, c.shared_dim, rng);
  }
  if (!params.contains("probe.w_r")) {
    bsp::ProbeHead::create(params, "probe", c.residue_dim, c.shared_dim, rng);
  }
  if (!params.contains(kSsfFlag)) params.add(kSsfFlag, Matrix::Zero(1, 1));
  params.at(kSsfFlag).value(0, 0) = disable_ssf ? 1.0 : 0.0;
}

ModelConfig Model::config() const {
  ModelConfig c;
  c.residue_dim = static_cast<int>(params.at("seq.embed").value.cols());
  c.atom_dim = static_cast<int>(params.at("lig.embed").value.cols());
  c.shared_dim = static_cast<int>(params.at("proj_l.w1").value.cols());
  return c;
}

bool Model::has_stage2() const { return params.contains("fusion.w_s"); }

bool Model::ssf_disabled() const {
  return params.contains(kSsfFlag) && params.at(kSsfFlag).value(0, 0) != 0.0;
}

enc::SequenceEncoder Model::sequence() { return enc::SequenceEncoder::bind(params, "seq"); }
enc::MoleculeEncoder Model::ligand_encoder() { return enc::MoleculeEncoder::bind(params, "lig"); }
enc::MoleculeEncoder Model::pocket_encoder() { return enc::MoleculeEncoder::bind(params, "pocket"); }
enc::ProjectionHead Model::protein_projection() { return enc::ProjectionHead::bind(params, "proj_p"); }
enc::ProjectionHead Model::ligand_projection() { return enc::ProjectionHead::bind(params, "proj_l"); }
fusion::FusionModule Model::fusion_module() { return fusion::FusionModule::bind(params, "fusion"); }
bsp::ProbeHead Model::probe_head() { return bsp::ProbeHead::bind(params, "probe"); }

// ---- forward paths ----------------------------------------------------------------

PreparedProtein prepare_protein(const ProteinRecord& protein, bool need_pocket) {
  if (protein.sequence.empty()) throw DataError("protein " + protein.id + " has an empty sequence");
  PreparedProtein p;
  p.id = protein.id;
  p.codes = encode_sequence(protein.sequence);
  if (!need_pocket) return p;
  if (protein.pocket_residues.empty()) throw DataError("protein " + protein.id + " has no pocket residues");
  p.pocket_residues = protein.pocket_residues;
  std::sort(p.pocket_residues.begin(), p.pocket_residues.end());
  std::vector<int> types;
  std::vector<Vec3> positions;
  for (const auto& atom : protein.atoms) {
    if (std::binary_search(p.pocket_residues.begin(), p.pocket_residues.end(), atom.residue_index)) {
      types.push_back(element_code(atom.element));
      positions.push_back(atom.position);
      p.pocket_atom_residue.push_back(atom.residue_index);
    }
  }
  if (types.empty()) throw DataError("protein " + protein.id + " has no pocket atoms");
  try {
    p.pocket_mask = fusion::residue_mask(p.pocket_atom_residue, p.pocket_residues);
  } catch (const DataError& e) {
    throw DataError("protein " + protein.id + ": " + e.what());
  }
  p.pocket_geometry = enc::make_geometry(types, positions);
  p.has_pocket = true;
  return p;
}

ad::Var sequence_embedding(ad::Tape& tape, Model& model, const PreparedProtein& protein) {
  return enc::encode_protein_sequence(tape, model.sequence(), model.protein_projection(), protein.codes);
}

ad::Var ligand_embedding(ad::Tape& tape, Model& model, const enc::MoleculeGeometry& ligand) {
  return enc::encode_ligand(tape, model.ligand_encoder(), model.ligand_projection(), ligand);
}

PocketForward pocket_forward(ad::Tape& tape, Model& model, const PreparedProtein& protein) {
  if (!model.has_stage2()) throw DataError("model has no fusion stage; run finetune first");
  if (!protein.has_pocket) throw DataError("protein " + protein.id + " has no prepared pocket");
  const fusion::FusionModule f = model.fusion_module();
  ad::Var x_s = enc::encode_residues(tape, model.sequence(), protein.codes);
  ad::Var x_s_pocket = ad::gather_rows(x_s, protein.pocket_residues);
  if (model.ssf_disabled()) return {fusion::sequence_only_pocket(tape, f, x_s_pocket), x_s};
  ad::Var z = enc::encode_molecule_atoms(tape, model.pocket_encoder(), protein.pocket_geometry);
  ad::Var x_g = ad::masked_mean_rows(z, protein.pocket_mask);
  fusion::GateOutput gate = fusion::gate_fuse(tape, f, x_s_pocket, x_g);
  ad::Var ctx = fusion::contextualize_pocket(tape, f, gate.fused);
  return {fusion::pool_fused_pocket(ctx), x_s};
}

// ---- config -----------------------------------------------------------------------

TrainConfig TrainConfig::defaults(Stage stage) {
  TrainConfig c;
  c.stage = stage;
  c.epochs = stage == Stage::kPretrain ? 30 : 60;
  c.batch_size = stage == Stage::kPretrain ? 32 : 16;
  return c;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (probes < 1) throw std::invalid_argument("probes must be >= 1");
  if (!(site_threshold > 0.0)) throw std::invalid_argument("site_threshold must be > 0");
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j = {{"stage", stage == Stage::kPretrain ? "pretrain" : "finetune"},
                      {"epochs", epochs},
                      {"batch_size", batch_size},
                      {"learning_rate", learning_rate},
                      {"tau", tau},
                      {"lambda", lambda},
                      {"probes", probes},
                      {"seed", seed},
                      {"disable_bds", ablations.disable_bds},
                      {"disable_ssf", ablations.disable_ssf},
                      {"disable_bsp", ablations.disable_bsp},
                      {"residue_dim", model.residue_dim},
                      {"atom_dim", model.atom_dim},
                      {"shared_dim", model.shared_dim},
                      {"site_threshold", site_threshold},
                      {"curate", curation.has_value()}};
  if (curation) {
    j["alpha"] = curation->alpha;
    j["delta"] = curation->delta;
    j["hitter_cutoff"] = curation->hitter_cutoff;
    j["strong_cut"] = curation->strong_cut;
    j["identity_threshold"] = curation->identity_threshold;
    j["sample_seed"] = curation->seed;
    j["pains_denylist"] = curation->pains_denylist;
    if (curation->target_size) j["target_size"] = *curation->target_size;
  }
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j, Stage stage) {
  if (!j.is_object()) throw std::invalid_argument("training config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "stage",      "epochs",         "batch_size",  "learning_rate", "tau",
      "lambda",     "probes",         "seed",        "disable_bds",   "disable_ssf",
      "disable_bsp", "residue_dim",   "atom_dim",    "shared_dim",    "site_threshold",
      "curate",     "alpha",          "delta",       "hitter_cutoff", "strong_cut",
      "identity_threshold", "sample_seed", "pains_denylist", "target_size"};
  for (const auto& [k, v] : j.items()) {
    if (!kKnown.count(k)) throw std::invalid_argument("unknown training config key: " + k);
  }
  TrainConfig c = defaults(stage);
  try {
    if (j.contains("stage")) {
      const auto s = j.at("stage").get<std::string>();
      if (s != (stage == Stage::kPretrain ? "pretrain" : "finetune")) {
        throw std::invalid_argument("config stage '" + s + "' does not match the command");
      }
    }
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("epochs", c.epochs);
    get("batch_size", c.batch_size);
    get("learning_rate", c.learning_rate);
    get("tau", c.tau);
    get("lambda", c.lambda);
    get("probes", c.probes);
    get("seed", c.seed);
    get("disable_bds", c.ablations.disable_bds);
    get("disable_ssf", c.ablations.disable_ssf);
    get("disable_bsp", c.ablations.disable_bsp);
    get("residue_dim", c.model.residue_dim);
    get("atom_dim", c.model.atom_dim);
    get("shared_dim", c.model.shared_dim);
    get("site_threshold", c.site_threshold);
    bool curate = false;
    get("curate", curate);
    if (curate) {
      sampling::PipelineConfig p;
      get("alpha", p.alpha);
      get("delta", p.delta);
      get("hitter_cutoff", p.hitter_cutoff);
      get("strong_cut", p.strong_cut);
      get("identity_threshold", p.identity_threshold);
      get("sample_seed", p.seed);
      get("pains_denylist", p.pains_denylist);
      if (j.contains("target_size")) p.target_size = j.at("target_size").get<std::size_t>();
      c.curation = p;
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("training config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json EpochLog::to_json() const {
  return {{"epoch", epoch}, {"loss_fc", loss_fc}, {"loss_bsp", loss_bsp}, {"loss_total", loss_total}};
}

// ---- loops ------------------------------------------------------------------------

TrainResult pretrain(const Dataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (dataset.triplets.empty()) throw DataError("pretrain: empty dataset");
  TrainResult result{Model::create(config.model, config.seed), {}, std::nullopt};
  const Dataset data = maybe_curate(dataset, config, result.curation);
  const PairTable table = build_pairs(data, false);

  Model& model = result.model;
  ad::AdamState adam(ad::AdamConfig{config.learning_rate});
  Rng batch_rng(mix_seed(config.seed, 1));
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double sum = 0.0;
    const auto batches = epoch_batches(table.pairs.size(), config.batch_size, batch_rng);
    for (const auto& batch : batches) {
      ad::Tape tape;
      std::vector<ad::Var> hp;
      std::vector<ad::Var> hl;
      for (std::size_t i : batch) {
        const Pair& pr = table.pairs[i];
        hp.push_back(sequence_embedding(tape, model, table.proteins[pr.protein]));
        hl.push_back(ligand_embedding(tape, model, table.ligands[pr.ligand]));
      }
      ad::Var loss = loss::infonce_symmetric(ad::concat_rows(hp), ad::concat_rows(hl), config.tau);
      tape.backward(loss);
      auto trainable = with_gradients(model.params);
      ad::adam_step(std::span<ad::Parameter* const>(trainable), adam);
      sum += loss.scalar();
    }
    EpochLog log{epoch, sum / static_cast<double>(batches.size()), 0.0, 0.0};
    log.loss_total = log.loss_fc;
    result.log.push_back(log);
    if (on_epoch) on_epoch(log, model);
  }
  return result;
}

TrainResult finetune(const Dataset& dataset, const TrainConfig& config, const ad::ParameterSet& init,
                     const EpochCallback& on_epoch) {
  config.validate();
  if (dataset.triplets.empty()) throw DataError("finetune: empty dataset");
  TrainResult result{Model::from_parameters(init), {}, std::nullopt};
  Model& model = result.model;
  model.add_stage2(config.seed, config.ablations.disable_ssf);
  const Dataset data = maybe_curate(dataset, config, result.curation);
  const PairTable table = build_pairs(data, true);

  std::vector<std::vector<std::uint8_t>> labels;
  labels.reserve(table.pairs.size());
  for (const Pair& pr : table.pairs) {
    labels.push_back(derive_binding_labels(*table.protein_records[pr.protein],
                                           *table.ligand_records[pr.ligand], config.site_threshold)
                         .labels);
  }

  const double lambda = config.effective_lambda();
  ad::AdamState adam(ad::AdamConfig{config.learning_rate});
  Rng batch_rng(mix_seed(config.seed, 1));
  Rng probe_rng(mix_seed(config.seed, 2));
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double sum_fc = 0.0;
    double sum_bsp = 0.0;
    double sum_total = 0.0;
    const auto batches = epoch_batches(table.pairs.size(), config.batch_size, batch_rng);
    for (const auto& batch : batches) {
      ad::Tape tape;
      std::vector<ad::Var> hp;
      std::vector<ad::Var> hl;
      std::vector<ad::Var> residues;
      std::vector<std::vector<std::uint8_t>> batch_labels;
      for (std::size_t i : batch) {
        const Pair& pr = table.pairs[i];
        PocketForward pf = pocket_forward(tape, model, table.proteins[pr.protein]);
        hp.push_back(pf.embedding);
        residues.push_back(pf.residues);
        hl.push_back(ligand_embedding(tape, model, table.ligands[pr.ligand]));
        batch_labels.push_back(labels[i]);
      }
      ad::Var h_l = ad::concat_rows(hl);
      ad::Var l_fc = loss::infonce_symmetric(ad::concat_rows(hp), h_l, config.tau);

      const auto probes = bsp::sample_probes(batch.size(), config.probes, probe_rng.next());
      const bsp::ProbeHead head = model.probe_head();
      std::vector<ad::Var> y_hat;
      for (std::size_t n = 0; n < batch.size(); ++n) {
        std::vector<int> rows(probes[n].begin(), probes[n].end());
        ad::Var alpha = bsp::probe_attention(tape, head, residues[n], ad::gather_rows(h_l, rows));
        y_hat.push_back(bsp::residue_binding_prob(alpha));
      }
      ad::Var l_bsp = bsp::bsp_loss(tape, y_hat, batch_labels);
      ad::Var total = loss::total_loss(l_fc, l_bsp, lambda);
      tape.backward(total);
      auto trainable = with_gradients(model.params);
      ad::adam_step(std::span<ad::Parameter* const>(trainable), adam);
      sum_fc += l_fc.scalar();
      sum_bsp += l_bsp.scalar();
      sum_total += total.scalar();
    }
    const double nb = static_cast<double>(batches.size());
    EpochLog log{epoch, sum_fc / nb, sum_bsp / nb, sum_total / nb};
    result.log.push_back(log);
    if (on_epoch) on_epoch(log, model);
  }
  return result;
}

// ---- embedding ----------------------------------------------------------------------

EmbedMode parse_embed_mode(const std::string& name) {
  if (name == "pocket") return EmbedMode::kPocket;
  if (name == "ligand") return EmbedMode::kLigand;
  if (name == "sequence") return EmbedMode::kSequence;
  throw std::invalid_argument("unknown embedding mode '" + name + "' (pocket|ligand|sequence)");
}

retrieval::EmbeddingStore embed_ligands(Model& model, const std::vector<const LigandRecord*>& ligands,
                                        int threads) {
  retrieval::EmbeddingStore store;
  store.dim = static_cast<std::size_t>(model.config().shared_dim);
  store.vectors.resize(static_cast<Eigen::Index>(ligands.size()), static_cast<Eigen::Index>(store.dim));
  for (const auto* l : ligands) store.ids.push_back(l->id);
  parallel_for(ligands.size(), threads, [&](std::size_t i) {
    ad::Tape tape;
    const enc::MoleculeGeometry g = enc::make_geometry(*ligands[i]);
    store.vectors.row(static_cast<Eigen::Index>(i)) = ligand_embedding(tape, model, g).value();
  });
  store.validate();
  return store;
}

retrieval::EmbeddingStore embed_proteins(Model& model, const std::vector<const ProteinRecord*>& proteins,
                                         EmbedMode mode, int threads) {
  if (mode == EmbedMode::kLigand) throw DataError("ligand mode needs ligand records");
  if (mode == EmbedMode::kPocket && !model.has_stage2()) {
    throw DataError("pocket mode needs a finetuned checkpoint");
  }
  retrieval::EmbeddingStore store;
  store.dim = static_cast<std::size_t>(model.config().shared_dim);
  store.vectors.resize(static_cast<Eigen::Index>(proteins.size()), static_cast<Eigen::Index>(store.dim));
  for (const auto* p : proteins) store.ids.push_back(p->id);
  parallel_for(proteins.size(), threads, [&](std::size_t i) {
    ad::Tape tape;
    const PreparedProtein prepared = prepare_protein(*proteins[i], mode == EmbedMode::kPocket);
    const ad::Var h = mode == EmbedMode::kPocket ? pocket_forward(tape, model, prepared).embedding
                                                 : sequence_embedding(tape, model, prepared);
    store.vectors.row(static_cast<Eigen::Index>(i)) = h.value();
  });
  store.validate();
  return store;
}

retrieval::EmbeddingStore embed_corpus(Model& model, const Dataset& dataset, EmbedMode mode,
                                       int threads) {
  if (mode == EmbedMode::kLigand) {
    std::vector<const LigandRecord*> ligands;
    for (const auto& [id, l] : dataset.ligands) ligands.push_back(&l);
    return embed_ligands(model, ligands, threads);
  }
  std::vector<const ProteinRecord*> proteins;
  for (const auto& [id, p] : dataset.proteins) proteins.push_back(&p);
  return embed_proteins(model, proteins, mode, threads);
}

std::vector<double> predict_sites(Model& model, const ProteinRecord& protein,
                                  const std::vector<const LigandRecord*>& probes) {
  if (!model.has_stage2()) throw DataError("site prediction needs a finetuned checkpoint");
  if (probes.empty()) throw DataError("protein " + protein.id + " has no ligand to use as probe");
  ad::Tape tape;
  const PreparedProtein prepared = prepare_protein(protein, false);
  ad::Var x_s = enc::encode_residues(tape, model.sequence(), prepared.codes);
  std::vector<ad::Var> hl;
  for (const auto* l : probes) hl.push_back(ligand_embedding(tape, model, enc::make_geometry(*l)));
  ad::Var y = bsp::residue_binding_prob(bsp::probe_attention(tape, model.probe_head(), x_s, ad::concat_rows(hl)));
  const Matrix& v = y.value();
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace s2::train
