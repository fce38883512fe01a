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

#include "s2screen/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

namespace s2 {

using nlohmann::json;

int residue_code(char letter) {
  const char up = (letter >= 'a' && letter <= 'z') ? static_cast<char>(letter - 'a' + 'A') : letter;
  const auto pos = kAminoAcids.find(up);
  return pos == std::string_view::npos ? kUnknownResidue : static_cast<int>(pos);
}

std::vector<int> encode_sequence(std::string_view sequence) {
  std::vector<int> codes;
  codes.reserve(sequence.size());
  for (char c : sequence) codes.push_back(residue_code(c));
  return codes;
}

std::string canonical_sequence(std::string_view sequence) {
  std::string out;
  out.reserve(sequence.size());
  for (char c : sequence) {
    const int code = residue_code(c);
    out.push_back(code == kUnknownResidue ? 'X' : kAminoAcids[static_cast<std::size_t>(code)]);
  }
  return out;
}

int element_code(std::string_view element) {
  std::string norm(element);
  for (std::size_t i = 0; i < norm.size(); ++i) {
    const char c = norm[i];
    if (i == 0 && c >= 'a' && c <= 'z') norm[i] = static_cast<char>(c - 'a' + 'A');
    if (i > 0 && c >= 'A' && c <= 'Z') norm[i] = static_cast<char>(c - 'A' + 'a');
  }
  for (std::size_t i = 0; i < kElements.size(); ++i) {
    if (kElements[i] == norm) return static_cast<int>(i);
  }
  return kUnknownElement;
}

// ---- validation ----------------------------------------------------------

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

void validate_protein(const ProteinRecord& p) {
  if (p.id.empty()) throw DataError("protein with empty id");
  if (p.sequence.empty()) throw DataError("protein " + p.id + ": empty sequence");
  const int n = static_cast<int>(p.length());
  for (const auto& a : p.atoms) {
    if (a.residue_index < 0 || a.residue_index >= n) {
      throw DataError("protein " + p.id + ": atom residue_index " + std::to_string(a.residue_index) +
                      " outside sequence of length " + std::to_string(n));
    }
    if (!finite(a.position)) throw DataError("protein " + p.id + ": non-finite coordinate");
  }
  for (std::size_t i = 0; i < p.pocket_residues.size(); ++i) {
    const int r = p.pocket_residues[i];
    if (r < 0 || r >= n) {
      throw DataError("protein " + p.id + ": pocket residue " + std::to_string(r) + " out of range");
    }
    if (i > 0 && p.pocket_residues[i - 1] >= r) {
      throw DataError("protein " + p.id + ": pocket residues not strictly increasing");
    }
  }
}

void validate_ligand(const LigandRecord& l) {
  if (l.id.empty()) throw DataError("ligand with empty id");
  if (l.atoms.empty()) throw DataError("ligand " + l.id + ": no atoms");
  for (const auto& a : l.atoms) {
    if (!finite(a.position)) throw DataError("ligand " + l.id + ": non-finite coordinate");
  }
  if (l.target_count < 0) throw DataError("ligand " + l.id + ": negative target count");
}

void Dataset::count_targets() {
  std::map<std::string, std::set<std::string>> partners;
  for (const auto& t : triplets) partners[t.ligand_id].insert(t.protein_id);
  for (auto& [id, lig] : ligands) {
    auto it = partners.find(id);
    lig.target_count = it == partners.end() ? 0 : static_cast<int>(it->second.size());
  }
}

void Dataset::validate() const {
  for (const auto& [id, p] : proteins) {
    if (id != p.id) throw DataError("protein key mismatch: " + id);
    validate_protein(p);
  }
  for (const auto& [id, l] : ligands) {
    if (id != l.id) throw DataError("ligand key mismatch: " + id);
    validate_ligand(l);
  }
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& t : triplets) {
    if (!proteins.count(t.protein_id)) throw DataError("triplet references unknown protein " + t.protein_id);
    if (!ligands.count(t.ligand_id)) throw DataError("triplet references unknown ligand " + t.ligand_id);
    if (!(t.affinity > 0.0) || !std::isfinite(t.affinity)) {
      throw DataError("triplet " + t.protein_id + "/" + t.ligand_id + ": non-positive affinity");
    }
    if (!seen.emplace(t.protein_id, t.ligand_id, t.assay_id).second) {
      throw DataError("duplicate triplet " + t.protein_id + "/" + t.ligand_id + "/" + t.assay_id);
    }
  }
}

// ---- readers -------------------------------------------------------------------

namespace {

[[noreturn]] void fail_at(std::string_view source, std::size_t line, const std::string& why) {
  throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + why);
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, number);
  }
}

Vec3 read_xyz(const json& a) {
  return Vec3(a.at("x").get<double>(), a.at("y").get<double>(), a.at("z").get<double>());
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

json xyz_fields(json obj, const Vec3& p) {
  obj["x"] = p.x();
  obj["y"] = p.y();
  obj["z"] = p.z();
  return obj;
}

}  // namespace

std::vector<ProteinRecord> read_proteins(std::istream& in, std::string_view source) {
  std::vector<ProteinRecord> out;
  for_each_line(in, [&](const std::string& line, std::size_t n) {
    ProteinRecord p;
    try {
      const json obj = json::parse(line);
      p.id = obj.at("id").get<std::string>();
      p.sequence = canonical_sequence(obj.at("sequence").get<std::string>());
      for (const auto& a : obj.value("atoms", json::array())) {
        p.atoms.push_back({a.at("element").get<std::string>(), read_xyz(a),
                           a.at("residue_index").get<int>()});
      }
      for (const auto& r : obj.value("pocket_residues", json::array())) {
        p.pocket_residues.push_back(r.get<int>());
      }
      std::sort(p.pocket_residues.begin(), p.pocket_residues.end());
      p.pocket_residues.erase(std::unique(p.pocket_residues.begin(), p.pocket_residues.end()),
                              p.pocket_residues.end());
      p.annotation = optional_string(obj, "annotation");
      validate_protein(p);
    } catch (const json::exception& e) {
      fail_at(source, n, e.what());
    } catch (const DataError& e) {
      fail_at(source, n, e.what());
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<LigandRecord> read_ligands(std::istream& in, std::string_view source) {
  std::vector<LigandRecord> out;
  for_each_line(in, [&](const std::string& line, std::size_t n) {
    LigandRecord l;
    try {
      const json obj = json::parse(line);
      l.id = obj.at("id").get<std::string>();
      for (const auto& a : obj.at("atoms")) {
        l.atoms.push_back({a.at("element").get<std::string>(), read_xyz(a)});
      }
      l.smiles = optional_string(obj, "smiles");
      validate_ligand(l);
    } catch (const json::exception& e) {
      fail_at(source, n, e.what());
    } catch (const DataError& e) {
      fail_at(source, n, e.what());
    }
    out.push_back(std::move(l));
  });
  return out;
}

std::vector<AffinityTriplet> read_affinities(std::istream& in, std::string_view source) {
  std::vector<AffinityTriplet> out;
  for_each_line(in, [&](const std::string& line, std::size_t n) {
    if (line.front() == '#') return;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 3 || fields.size() > 4) {
      fail_at(source, n, "expected 3 or 4 tab-separated fields, got " + std::to_string(fields.size()));
    }
    AffinityTriplet t;
    t.protein_id = fields[0];
    t.ligand_id = fields[1];
    const std::string& value = fields[2];
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), t.affinity);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      fail_at(source, n, "unparseable affinity '" + value + "'");
    }
    if (!(t.affinity > 0.0) || !std::isfinite(t.affinity)) {
      fail_at(source, n, "affinity must be positive, got " + value);
    }
    if (t.protein_id.empty() || t.ligand_id.empty()) fail_at(source, n, "empty id");
    if (fields.size() == 4) t.assay_id = fields[3];
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<BindingSiteLabels> read_labels(std::istream& in, std::string_view source) {
  std::vector<BindingSiteLabels> out;
  for_each_line(in, [&](const std::string& line, std::size_t n) {
    BindingSiteLabels b;
    try {
      const json obj = json::parse(line);
      b.protein_id = obj.at("protein_id").get<std::string>();
      for (const auto& v : obj.at("labels")) {
        const int x = v.get<int>();
        if (x != 0 && x != 1) fail_at(source, n, "labels must be 0 or 1");
        b.labels.push_back(static_cast<std::uint8_t>(x));
      }
    } catch (const json::exception& e) {
      fail_at(source, n, e.what());
    }
    out.push_back(std::move(b));
  });
  return out;
}

// ---- writers -------------------------------------------------------------------

void write_proteins(std::ostream& out, const std::vector<const ProteinRecord*>& proteins) {
  for (const ProteinRecord* p : proteins) {
    json atoms = json::array();
    for (const auto& a : p->atoms) {
      atoms.push_back(xyz_fields({{"element", a.element}, {"residue_index", a.residue_index}}, a.position));
    }
    json obj = {{"id", p->id},
                {"sequence", p->sequence},
                {"atoms", atoms},
                {"pocket_residues", p->pocket_residues},
                {"annotation", p->annotation ? json(*p->annotation) : json(nullptr)}};
    out << obj.dump() << '\n';
  }
}

void write_ligands(std::ostream& out, const std::vector<const LigandRecord*>& ligands) {
  for (const LigandRecord* l : ligands) {
    json atoms = json::array();
    for (const auto& a : l->atoms) atoms.push_back(xyz_fields({{"element", a.element}}, a.position));
    json obj = {{"id", l->id},
                {"atoms", atoms},
                {"smiles", l->smiles ? json(*l->smiles) : json(nullptr)}};
    out << obj.dump() << '\n';
  }
}

void write_affinities(std::ostream& out, const std::vector<AffinityTriplet>& triplets) {
  out << "# protein_id\tligand_id\taffinity\tassay_id\n";
  char buf[64];
  for (const auto& t : triplets) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), t.affinity);
    out << t.protein_id << '\t' << t.ligand_id << '\t' << std::string_view(buf, res.ptr - buf) << '\t'
        << t.assay_id << '\n';
  }
}

void write_labels(std::ostream& out, const std::vector<BindingSiteLabels>& labels) {
  for (const auto& b : labels) {
    std::vector<int> v(b.labels.begin(), b.labels.end());
    out << json{{"protein_id", b.protein_id}, {"labels", v}}.dump() << '\n';
  }
}

// ---- files -------------------------------------------------------------------

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<ProteinRecord> read_proteins_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_proteins(in, path.filename().string());
}

std::vector<LigandRecord> read_ligands_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_ligands(in, path.filename().string());
}

Dataset parse_dataset(const std::filesystem::path& protein_path,
                      const std::filesystem::path& ligand_path,
                      const std::filesystem::path& affinity_path) {
  Dataset d;
  for (auto& p : read_proteins_file(protein_path)) {
    const std::string id = p.id;
    if (!d.proteins.emplace(id, std::move(p)).second) throw DataError("duplicate protein id " + id);
  }
  for (auto& l : read_ligands_file(ligand_path)) {
    const std::string id = l.id;
    if (!d.ligands.emplace(id, std::move(l)).second) throw DataError("duplicate ligand id " + id);
  }
  auto in = open_input(affinity_path);
  d.triplets = read_affinities(in, affinity_path.filename().string());
  d.validate();
  d.count_targets();
  return d;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::vector<const ProteinRecord*> proteins;
  for (const auto& [id, p] : dataset.proteins) proteins.push_back(&p);
  std::vector<const LigandRecord*> ligands;
  for (const auto& [id, l] : dataset.ligands) ligands.push_back(&l);
  auto pout = open_output(dir / "proteins.jsonl");
  write_proteins(pout, proteins);
  auto lout = open_output(dir / "ligands.jsonl");
  write_ligands(lout, ligands);
  auto aout = open_output(dir / "affinities.tsv");
  write_affinities(aout, dataset.triplets);
}

Dataset read_dataset_dir(const std::filesystem::path& dir) {
  return parse_dataset(dir / "proteins.jsonl", dir / "ligands.jsonl", dir / "affinities.tsv");
}

// ---- labels ----------------------------------------------------------------------

BindingSiteLabels derive_binding_labels(const ProteinRecord& protein, const LigandRecord& ligand,
                                        double threshold) {
  if (protein.atoms.empty()) throw DataError("protein " + protein.id + " has no atoms");
  if (ligand.atoms.empty()) throw DataError("ligand " + ligand.id + " has no atoms");
  BindingSiteLabels out{protein.id, std::vector<std::uint8_t>(protein.length(), 0)};
  const double t2 = threshold * threshold;
  for (const auto& a : protein.atoms) {
    auto& label = out.labels[static_cast<std::size_t>(a.residue_index)];
    if (label) continue;
    for (const auto& b : ligand.atoms) {
      if ((a.position - b.position).squaredNorm() <= t2) {
        label = 1;
        break;
      }
    }
  }
  return out;
}

// ---- synthetic corpus ------------------------------------------------------------

namespace {

constexpr std::string_view kMotifAlphabet = "ACDEFGHIKL";
constexpr std::string_view kBackgroundAlphabet = "MNPQRSTVWY";
constexpr std::array<std::string_view, 3> kBackboneElements = {"N", "C", "O"};

Vec3 random_unit(Rng& rng) {
  while (true) {
    Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v / n;
  }
}

// Chain with fixed bond length and tetrahedral bond angle; torsions are
// random, resampled when an atom would land near an earlier one.
std::vector<Vec3> chain_positions(std::size_t n, double spacing, Rng& rng) {
  constexpr double kTurn = (180.0 - 109.5) * M_PI / 180.0;
  std::vector<Vec3> out;
  for (std::size_t a = 0; a < n; ++a) {
    if (a == 0) {
      out.push_back(Vec3::Zero());
      continue;
    }
    if (a == 1) {
      out.push_back(spacing * random_unit(rng));
      continue;
    }
    const Vec3 u = (out[a - 1] - out[a - 2]).normalized();
    Vec3 next;
    for (int attempt = 0; attempt < 32; ++attempt) {
      Vec3 w = random_unit(rng);
      w -= w.dot(u) * u;
      if (w.norm() < 1e-3) continue;
      w.normalize();
      next = out[a - 1] + spacing * (std::cos(kTurn) * u + std::sin(kTurn) * w);
      bool clash = false;
      for (std::size_t b = 0; b + 2 < a; ++b) {
        if ((out[b] - next).norm() < 1.5 * spacing) clash = true;
      }
      if (!clash) break;
    }
    out.push_back(next);
  }
  return out;
}

std::string pad_index(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04zu", n);
  return buf;
}

// Class motifs: distinct letter sets (while possible) in a world-seeded order.
std::vector<std::string> class_motifs(const MotifConfig& config) {
  Rng rng(mix_seed(config.world_seed, 1));
  std::vector<std::string> motifs;
  std::set<std::string> used_sets;
  for (int c = 0; c < config.n_classes; ++c) {
    std::string motif;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::vector<char> letters(kMotifAlphabet.begin(), kMotifAlphabet.end());
      rng.shuffle(letters);
      motif.clear();
      for (int k = 0; k < config.motif_length; ++k) {
        motif.push_back(letters[static_cast<std::size_t>(k) % letters.size()]);
      }
      std::string key = motif;
      std::sort(key.begin(), key.end());
      if (used_sets.insert(key).second) break;
    }
    motifs.push_back(motif);
  }
  return motifs;
}

std::array<std::string_view, 2> class_signature(int latent_class) {
  const std::size_t base = static_cast<std::size_t>(2 * latent_class) % kElements.size();
  return {kElements[base], kElements[(base + 1) % kElements.size()]};
}

}  // namespace

SyntheticLatent synthetic_latent(std::size_t pair_index, const MotifConfig& config) {
  const auto c = static_cast<std::size_t>(config.n_classes);
  const auto v = static_cast<std::size_t>(config.n_variants);
  return {static_cast<int>(pair_index % c), static_cast<int>((pair_index / c) % v)};
}

double synthetic_spacing(int variant, const MotifConfig& config) {
  const int span = std::max(config.n_variants - 1, 1);
  return 1.2 + 3.0 * static_cast<double>(variant) / span;
}

std::string synthetic_protein_id(std::size_t pair_index, const MotifConfig& config) {
  return config.id_prefix + "P" + pad_index(pair_index);
}

std::string synthetic_ligand_id(std::size_t pair_index, const MotifConfig& config) {
  return config.id_prefix + "L" + pad_index(pair_index);
}

Dataset generate_synthetic_dataset(std::size_t n_pairs, std::size_t seq_len, std::size_t n_atoms,
                                   const MotifConfig& config, std::uint64_t seed) {
  if (n_pairs < 1) throw std::invalid_argument("generate_synthetic_dataset: n_pairs must be >= 1");
  if (n_atoms < 1) throw std::invalid_argument("generate_synthetic_dataset: n_atoms must be >= 1");
  if (config.n_classes < 1 || config.n_variants < 1 || config.atoms_per_residue < 1 ||
      config.motif_length < 1) {
    throw std::invalid_argument("generate_synthetic_dataset: motif config counts must be >= 1");
  }
  if (static_cast<std::size_t>(config.motif_length) > seq_len) {
    throw std::invalid_argument("generate_synthetic_dataset: motif longer than sequence");
  }

  const auto motifs = class_motifs(config);
  const double max_spacing = synthetic_spacing(config.n_variants - 1, config);
  const double far_x = 40.0 + static_cast<double>(n_atoms) * max_spacing +
                       3.5 + config.atoms_per_residue * max_spacing;

  Rng rng(seed);
  Dataset d;
  for (std::size_t n = 0; n < n_pairs; ++n) {
    const SyntheticLatent latent = synthetic_latent(n, config);
    const double spacing = synthetic_spacing(latent.variant, config);

    LigandRecord lig;
    lig.id = synthetic_ligand_id(n, config);
    const auto signature = class_signature(latent.latent_class);
    for (const Vec3& pos : chain_positions(n_atoms, spacing, rng)) {
      lig.atoms.push_back({std::string(signature[rng.index(2)]), pos});
    }

    ProteinRecord prot;
    prot.id = synthetic_protein_id(n, config);
    prot.sequence.resize(seq_len);
    for (auto& ch : prot.sequence) ch = kBackgroundAlphabet[rng.index(kBackgroundAlphabet.size())];
    const std::size_t start = rng.index(seq_len - static_cast<std::size_t>(config.motif_length) + 1);
    const std::string& motif = motifs[static_cast<std::size_t>(latent.latent_class)];
    for (int k = 0; k < config.motif_length; ++k) {
      prot.sequence[start + static_cast<std::size_t>(k)] = motif[static_cast<std::size_t>(k)];
      prot.pocket_residues.push_back(static_cast<int>(start) + k);
    }
    for (std::size_t i = 0; i < seq_len; ++i) {
      const bool in_motif = i >= start && i < start + static_cast<std::size_t>(config.motif_length);
      Vec3 anchor;
      Vec3 dir;
      double offset;
      if (in_motif) {
        anchor = lig.atoms[rng.index(lig.atoms.size())].position;
        dir = random_unit(rng);
        offset = 3.5;
      } else {
        anchor = Vec3(far_x + 3.8 * static_cast<double>(i), 0.0, 0.0);
        dir = Vec3(0.0, 1.0, 0.0);
        offset = 0.0;
      }
      for (int m = 0; m < config.atoms_per_residue; ++m) {
        const double step = in_motif ? spacing : 1.4;
        prot.atoms.push_back({std::string(kBackboneElements[static_cast<std::size_t>(m) % 3]),
                              anchor + dir * (offset + step * m), static_cast<int>(i)});
      }
    }

    AffinityTriplet t;
    t.protein_id = prot.id;
    t.ligand_id = lig.id;
    t.affinity = std::pow(10.0, 0.5 + 0.25 * latent.latent_class + 0.15 * rng.normal());
    t.assay_id = config.id_prefix + "A" + pad_index(n);

    d.triplets.push_back(std::move(t));
    d.proteins.emplace(prot.id, std::move(prot));
    d.ligands.emplace(lig.id, std::move(lig));
  }
  d.count_targets();
  return d;
}

Dataset inject_noise(const Dataset& dataset, const NoiseConfig& noise, const MotifConfig& config,
                     std::uint64_t seed) {
  Dataset d = dataset;
  Rng rng(seed);
  std::vector<std::string> protein_ids;
  for (const auto& [id, p] : d.proteins) protein_ids.push_back(id);
  std::vector<AffinityTriplet> clean = d.triplets;

  const auto n_mismatched =
      static_cast<std::size_t>(std::llround(noise.mismatched_fraction * static_cast<double>(clean.size())));
  std::vector<std::size_t> order(clean.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t k = 0; k < n_mismatched && k < order.size() && clean.size() > 1; ++k) {
    const AffinityTriplet& src = clean[order[k]];
    std::size_t other = rng.index(clean.size() - 1);
    if (other >= order[k]) ++other;
    const std::string& wrong_ligand = clean[other].ligand_id;
    const double base = std::pow(10.0, 1.0 + rng.uniform());
    d.triplets.push_back({src.protein_id, wrong_ligand, base, "noise" + pad_index(k) + "a"});
    d.triplets.push_back({src.protein_id, wrong_ligand, base * std::pow(10.0, 2.5),
                          "noise" + pad_index(k) + "b"});
  }

  const std::size_t n_atoms = d.ligands.empty() ? 8 : d.ligands.begin()->second.atoms.size();
  for (int k = 0; k < noise.promiscuous_ligands; ++k) {
    LigandRecord lig;
    lig.id = config.id_prefix + "X" + pad_index(static_cast<std::size_t>(k));
    const auto signature = class_signature(static_cast<int>(rng.index(static_cast<std::size_t>(config.n_classes))));
    const double spacing = synthetic_spacing(static_cast<int>(rng.index(static_cast<std::size_t>(config.n_variants))), config);
    for (const Vec3& pos : chain_positions(n_atoms, spacing, rng)) {
      lig.atoms.push_back({std::string(signature[rng.index(2)]), pos});
    }
    std::vector<std::string> targets = protein_ids;
    rng.shuffle(targets);
    targets.resize(std::min<std::size_t>(targets.size(), static_cast<std::size_t>(noise.promiscuous_degree)));
    std::sort(targets.begin(), targets.end());
    for (const auto& pid : targets) {
      d.triplets.push_back({pid, lig.id, std::pow(10.0, 4.5 + 0.2 * rng.uniform()),
                            "hit" + pad_index(static_cast<std::size_t>(k))});
    }
    d.ligands.emplace(lig.id, std::move(lig));
  }
  d.count_targets();
  return d;
}

}  // namespace s2
