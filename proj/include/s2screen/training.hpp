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

// Two-stage training.
//
// Stage 1 aligns the pooled sequence embedding of each protein with its
// ligand embedding under the symmetric contrastive loss. Stage 2 replaces the
// protein side by the fused pocket embedding and adds the binding-site loss.
//
// Parameter name prefixes:
//   seq.*     sequence encoder          proj_p.*  protein projection (stage 1)
//   lig.*     ligand encoder            proj_l.*  ligand projection
//   pocket.*  pocket-atom encoder       fusion.*  gate and attention blocks
//   probe.*   binding-site head         config.*  1x1 flags, never trained

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "s2screen/autograd.hpp"
#include "s2screen/bindingsite.hpp"
#include "s2screen/datamodel.hpp"
#include "s2screen/encoders.hpp"
#include "s2screen/fusion.hpp"
#include "s2screen/retrieval.hpp"
#include "s2screen/sampling.hpp"

namespace s2::train {

struct ModelConfig {
  int residue_dim = 64;
  int atom_dim = 64;
  int shared_dim = 64;
};

class Model {
 public:
  ad::ParameterSet params;

  // Sequence encoder, ligand encoder and both projections.
  static Model create(const ModelConfig& config, std::uint64_t seed);
  // Throws DataError if a stage-1 parameter is missing or misshapen.
  static Model from_parameters(ad::ParameterSet params);

  // Adds pocket encoder, fusion and binding-site head unless present.
  void add_stage2(std::uint64_t seed, bool disable_ssf);

  ModelConfig config() const;
  bool has_stage2() const;
  bool ssf_disabled() const;

  enc::SequenceEncoder sequence();
  enc::MoleculeEncoder ligand_encoder();
  enc::MoleculeEncoder pocket_encoder();
  enc::ProjectionHead protein_projection();
  enc::ProjectionHead ligand_projection();
  fusion::FusionModule fusion_module();
  bsp::ProbeHead probe_head();
};

// Per-protein constants reused across epochs.
struct PreparedProtein {
  std::string id;
  std::vector<int> codes;
  bool has_pocket = false;
  std::vector<int> pocket_residues;
  std::vector<int> pocket_atom_residue;
  enc::MoleculeGeometry pocket_geometry;
  Matrix pocket_mask;  // R x pocket atoms
};

// Throws DataError if |need_pocket| and the protein lacks a usable pocket.
PreparedProtein prepare_protein(const ProteinRecord& protein, bool need_pocket);

ad::Var sequence_embedding(ad::Tape& tape, Model& model, const PreparedProtein& protein);
ad::Var ligand_embedding(ad::Tape& tape, Model& model, const enc::MoleculeGeometry& ligand);

struct PocketForward {
  ad::Var embedding;  // 1 x d fused pocket embedding
  ad::Var residues;   // I x d_s sequence representation of the whole chain
};

PocketForward pocket_forward(ad::Tape& tape, Model& model, const PreparedProtein& protein);

enum class Stage { kPretrain, kFinetune };

struct Ablations {
  bool disable_bds = false;
  bool disable_ssf = false;
  bool disable_bsp = false;
};

struct TrainConfig {
  Stage stage = Stage::kPretrain;
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double tau = 0.1;
  double lambda = 0.5;
  int probes = 4;
  std::uint64_t seed = 0;
  Ablations ablations;
  ModelConfig model;
  double site_threshold = 8.0;
  // Bilateral curation applied to the training pairs unless disable_bds.
  std::optional<sampling::PipelineConfig> curation;

  static TrainConfig defaults(Stage stage);
  // Throws std::invalid_argument on non-positive epochs/batch/tau/probes or
  // negative lambda.
  void validate() const;
  double effective_lambda() const { return ablations.disable_bsp ? 0.0 : lambda; }

  nlohmann::json to_json() const;
  // Flat keys; absent keys keep the stage defaults. Unknown keys throw.
  static TrainConfig from_json(const nlohmann::json& j, Stage stage);
};

struct EpochLog {
  int epoch = 0;
  double loss_fc = 0.0;
  double loss_bsp = 0.0;
  double loss_total = 0.0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
  std::optional<sampling::CurationReport> curation;
};

using EpochCallback = std::function<void(const EpochLog&, const Model&)>;

// Throws DataError on an empty dataset.
TrainResult pretrain(const Dataset& dataset, const TrainConfig& config,
                     const EpochCallback& on_epoch = {});

// Throws DataError on a missing pocket or an incompatible initial model.
TrainResult finetune(const Dataset& dataset, const TrainConfig& config,
                     const ad::ParameterSet& init, const EpochCallback& on_epoch = {});

enum class EmbedMode { kPocket, kLigand, kSequence };

EmbedMode parse_embed_mode(const std::string& name);

retrieval::EmbeddingStore embed_ligands(Model& model, const std::vector<const LigandRecord*>& ligands,
                                        int threads = 1);
// kPocket needs a stage-2 model and pocket atoms; kLigand is rejected.
retrieval::EmbeddingStore embed_proteins(Model& model,
                                         const std::vector<const ProteinRecord*>& proteins,
                                         EmbedMode mode, int threads = 1);
// Ligand mode embeds dataset.ligands, the other modes dataset.proteins.
retrieval::EmbeddingStore embed_corpus(Model& model, const Dataset& dataset, EmbedMode mode,
                                       int threads = 1);

// Probe-averaged residue attention using |probes| as ligand probes.
std::vector<double> predict_sites(Model& model, const ProteinRecord& protein,
                                  const std::vector<const LigandRecord*>& probes);

}  // namespace s2::train
