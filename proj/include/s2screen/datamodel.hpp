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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "s2screen/core.hpp"

namespace s2 {

// 20 amino acids; anything else maps to the unknown code 20 ('X').
inline constexpr std::string_view kAminoAcids = "ACDEFGHIKLMNPQRSTVWY";
inline constexpr int kResidueVocab = 21;
inline constexpr int kUnknownResidue = 20;

int residue_code(char letter);
std::vector<int> encode_sequence(std::string_view sequence);
// Upper-cases and replaces letters outside the alphabet with 'X'.
std::string canonical_sequence(std::string_view sequence);

// 16 common elements; anything else maps to the unknown code 16.
inline constexpr std::array<std::string_view, 16> kElements = {
    "C", "N", "O", "S", "P", "F", "Cl", "Br", "I", "B", "Si", "Se", "Fe", "Zn", "Mg", "Ca"};
inline constexpr int kElementVocab = 17;
inline constexpr int kUnknownElement = 16;

int element_code(std::string_view element);

struct ProteinAtom {
  std::string element;
  Vec3 position = Vec3::Zero();
  int residue_index = 0;
};

struct ProteinRecord {
  std::string id;
  std::string sequence;
  // Heavy atoms only; every atom record is treated as heavy.
  std::vector<ProteinAtom> atoms;
  // Sorted, unique, within [0, length()).
  std::vector<int> pocket_residues;
  std::optional<std::string> annotation;

  std::size_t length() const { return sequence.size(); }
};

struct LigandAtom {
  std::string element;
  Vec3 position = Vec3::Zero();
};

struct LigandRecord {
  std::string id;
  std::vector<LigandAtom> atoms;
  std::optional<std::string> smiles;
  // Number of distinct proteins this ligand binds in the owning dataset.
  int target_count = 0;
};

struct AffinityTriplet {
  std::string protein_id;
  std::string ligand_id;
  // Linear-scale positive assay value (nM unless configured otherwise).
  double affinity = 0.0;
  std::string assay_id;
};

struct BindingSiteLabels {
  std::string protein_id;
  std::vector<std::uint8_t> labels;
};

struct Dataset {
  std::map<std::string, ProteinRecord> proteins;
  std::map<std::string, LigandRecord> ligands;
  std::vector<AffinityTriplet> triplets;

  // Recomputes LigandRecord::target_count from the triplets.
  void count_targets();
  // Throws DataError on dangling ids, duplicate rows, or bad records.
  void validate() const;
};

void validate_protein(const ProteinRecord& protein);
void validate_ligand(const LigandRecord& ligand);

// ---- file formats -------------------------------------------------------------
// Readers report "<source>:<line>: <reason>" in DataError messages.

std::vector<ProteinRecord> read_proteins(std::istream& in, std::string_view source = "proteins");
std::vector<LigandRecord> read_ligands(std::istream& in, std::string_view source = "ligands");
std::vector<AffinityTriplet> read_affinities(std::istream& in,
                                             std::string_view source = "affinities");
std::vector<BindingSiteLabels> read_labels(std::istream& in, std::string_view source = "labels");

void write_proteins(std::ostream& out, const std::vector<const ProteinRecord*>& proteins);
void write_ligands(std::ostream& out, const std::vector<const LigandRecord*>& ligands);
void write_affinities(std::ostream& out, const std::vector<AffinityTriplet>& triplets);
void write_labels(std::ostream& out, const std::vector<BindingSiteLabels>& labels);

std::vector<ProteinRecord> read_proteins_file(const std::filesystem::path& path);
std::vector<LigandRecord> read_ligands_file(const std::filesystem::path& path);

Dataset parse_dataset(const std::filesystem::path& protein_path,
                      const std::filesystem::path& ligand_path,
                      const std::filesystem::path& affinity_path);

// Writes proteins.jsonl, ligands.jsonl and affinities.tsv into |dir|.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset read_dataset_dir(const std::filesystem::path& dir);

// ---- labels --------------------------------------------------------------------

// Residue i is positive iff any of its atoms lies within |threshold| Angstrom
// of any ligand atom.
BindingSiteLabels derive_binding_labels(const ProteinRecord& protein, const LigandRecord& ligand,
                                        double threshold = 8.0);

// ---- synthetic corpus ------------------------------------------------------------
//
// Pair n carries latent class n % n_classes and variant
// (n / n_classes) % n_variants. The class is planted as a k-mer motif drawn
// from the first half of the residue alphabet (background residues use the
// other half) and as a two-element signature in the ligand. The variant sets
// the bond spacing of the ligand chain and of the pocket side chains, so only
// geometry carries it. Motif residues sit 3.5 A from a ligand atom; all other
// residues are placed far from the ligand.

struct MotifConfig {
  int n_classes = 8;
  int motif_length = 5;
  int n_variants = 8;
  int atoms_per_residue = 4;
  // Fixes the class motifs and signatures independently of the sample seed,
  // so separately generated train and test corpora share the same classes.
  std::uint64_t world_seed = 0;
  std::string id_prefix;
};

struct SyntheticLatent {
  int latent_class = 0;
  int variant = 0;
};

SyntheticLatent synthetic_latent(std::size_t pair_index, const MotifConfig& config);
double synthetic_spacing(int variant, const MotifConfig& config);
std::string synthetic_protein_id(std::size_t pair_index, const MotifConfig& config);
std::string synthetic_ligand_id(std::size_t pair_index, const MotifConfig& config);

Dataset generate_synthetic_dataset(std::size_t n_pairs, std::size_t seq_len, std::size_t n_atoms,
                                   const MotifConfig& config, std::uint64_t seed);

struct NoiseConfig {
  // Fraction of pairs that gain a mismatched (protein, wrong ligand) pair
  // measured twice with log10 readings 2.5 apart.
  double mismatched_fraction = 0.2;
  // Extra ligands each bound weakly to |promiscuous_degree| proteins.
  int promiscuous_ligands = 4;
  int promiscuous_degree = 25;
};

Dataset inject_noise(const Dataset& dataset, const NoiseConfig& noise, const MotifConfig& config,
                     std::uint64_t seed);

}  // namespace s2
