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

// Acceptance driver: one PASS/FAIL line per acceptance criterion, followed by
// indented diagnostics. Exits 0 only if every criterion passes.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "gradient_suite.hpp"
#include "oracles.hpp"
#include "s2screen/binary_io.hpp"
#include "s2screen/encoders.hpp"
#include "s2screen/metrics.hpp"
#include "s2screen/splits.hpp"
#include "s2screen/training.hpp"
#include "sampling_fixtures.hpp"

namespace s2::acceptance {
namespace {

namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool passed = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

// ---- gradient suite --------------------------------------------------------

Verdict gradient_suite() {
  const gradsuite::SuiteResult r = gradsuite::run(100, 1e-3, 1000);
  Verdict v;
  v.passed = r.passed && r.seconds < 60.0;
  v.summary = std::to_string(r.checked) + " coordinates, worst rel err " + sci(r.worst_rel_error) + ", " +
              fmt(r.seconds, 1) + " s (limit 60 s)";
  v.details.push_back("worst: " + r.worst);
  v.details.push_back("kink-straddling coordinates skipped: " + std::to_string(r.skipped));
  v.details.push_back("coordinates above tolerance but within central-difference rounding error: " +
                      std::to_string(r.roundoff_limited));
  return v;
}

// ---- metric oracles --------------------------------------------------------

Verdict metric_oracles() {
  Rng rng(2026);
  double worst = 0.0;
  std::string worst_name;
  auto note = [&](const char* name, double got, double want) {
    const double e = std::abs(got - want);
    if (e > worst) {
      worst = e;
      worst_name = name;
    }
  };
  for (int i = 0; i < 1000; ++i) {
    const metrics::RankedList l = oracle::random_list(rng, 500, i % 2 == 0);
    note("auroc", metrics::auroc(l), oracle::auroc(l));
    note("bedroc", metrics::bedroc(l), oracle::bedroc(l));
    for (const auto& [num, den] : {std::pair{1u, 200u}, std::pair{1u, 100u}, std::pair{1u, 20u}}) {
      note("ef", metrics::enrichment_factor(l, static_cast<double>(num) / den), oracle::enrichment(l, num, den));
    }
    note("pr_auc", metrics::pr_auc(l), oracle::average_precision(l));
    const auto f = metrics::f1_best(l.scores, l.labels);
    const auto g = oracle::best_f1(l.scores, l.labels);
    note("f1", f.f1, g.f1);
    note("f1_threshold", f.threshold, g.threshold);
  }

  metrics::RankedList perfect;
  metrics::RankedList worst_list;
  for (int i = 0; i < 100; ++i) {
    perfect.scores.push_back(100.0 - i);
    perfect.labels.push_back(i < 10 ? 1 : 0);
    worst_list.scores.push_back(100.0 - i);
    worst_list.labels.push_back(i >= 90 ? 1 : 0);
  }
  const double b_perfect = metrics::bedroc(perfect);
  const double b_worst = metrics::bedroc(worst_list);

  Rng mc(77);
  metrics::RankedList shuffled;
  for (int i = 0; i < 1000; ++i) {
    shuffled.scores.push_back(1000.0 - i);
    shuffled.labels.push_back(i < 50 ? 1 : 0);
  }
  double ef_sum = 0.0;
  const int shuffles = 10000;
  for (int s = 0; s < shuffles; ++s) {
    mc.shuffle(shuffled.labels);
    ef_sum += metrics::enrichment_factor(shuffled, 0.01);
  }
  const double ef_mean = ef_sum / shuffles;

  Verdict v;
  v.passed = worst <= 1e-12 && b_perfect == 1.0 && b_worst == 0.0 && std::abs(ef_mean - 1.0) <= 0.05;
  v.summary = "1000 instances max |err| " + sci(worst) + (worst_name.empty() ? "" : " (" + worst_name + ")") +
              ", bedroc perfect " + fmt(b_perfect, 12) + " worst " + fmt(b_worst, 12) + ", MC EF(1%) " +
              fmt(ef_mean, 4) + " (1.00 +/- 0.05)";
  return v;
}

// ---- sampling distribution ---------------------------------------------------

Verdict sampling_distribution() {
  const double freq = fixtures::singleton_frequency(fixtures::two_cluster_instance(), 20000);
  int idempotent = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    if (fixtures::pipeline_idempotent(fixtures::noisy_corpus(seed), seed)) ++idempotent;
  }
  Verdict v;
  v.passed = std::abs(freq - 2.0 / 3.0) <= 0.02 && idempotent == 50;
  v.summary = "singleton inclusion " + fmt(freq, 4) + " (0.667 +/- 0.02), idempotent on " +
              std::to_string(idempotent) + "/50 datasets";
  return v;
}

// ---- structural invariances -----------------------------------------------

Verdict structural_invariances() {
  Rng rng(99);
  ad::ParameterSet params;
  const auto mol = enc::MoleculeEncoder::create(params, "mol", 32, enc::RbfConfig{}, rng);
  double rigid = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.index(12);
    std::vector<int> types;
    std::vector<Vec3> pos;
    for (std::size_t a = 0; a < n; ++a) {
      types.push_back(static_cast<int>(rng.index(kElementVocab)));
      pos.emplace_back(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    }
    const Eigen::Matrix3d r = oracle::random_rotation(rng);
    const Vec3 shift(rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-30, 30));
    std::vector<Vec3> moved;
    for (const auto& p : pos) moved.push_back(r * p + shift);
    ad::Tape t;
    const Matrix a = enc::encode_molecule_atoms(t, mol, enc::make_geometry(types, pos)).value();
    const Matrix b = enc::encode_molecule_atoms(t, mol, enc::make_geometry(types, moved)).value();
    rigid = std::max(rigid, (a - b).cwiseAbs().maxCoeff());
  }

  double attn_err = 0.0;
  double yhat_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    train::Model m = train::Model::create({16, 16, 16}, static_cast<std::uint64_t>(trial));
    m.add_stage2(static_cast<std::uint64_t>(trial) + 1, false);
    const auto f = m.fusion_module();
    const auto head = m.probe_head();
    ad::Tape t;
    std::vector<Matrix> attn;
    fusion::contextualize_pocket(t, f, t.constant(3.0 * gradsuite::randn(1 + rng.index(12), 16, rng)), &attn);
    for (const auto& a : attn) attn_err = std::max(attn_err, (a.rowwise().sum().array() - 1.0).abs().maxCoeff());
    ad::Var alpha = bsp::probe_attention(t, head, t.constant(gradsuite::randn(2 + rng.index(40), 16, rng)),
                                         t.constant(gradsuite::randn(1 + rng.index(6), 16, rng)));
    yhat_err = std::max(yhat_err, std::abs(bsp::residue_binding_prob(alpha).value().sum() - 1.0));
  }

  double beta_min = 1.0;
  double beta_max = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    ad::ParameterSet ps;
    Rng init(static_cast<std::uint64_t>(trial));
    const auto f = fusion::FusionModule::create(ps, "fusion", 8, 8, 8, init);
    f.b_beta->value(0, 0) = 2.0 * rng.normal();
    ad::Tape t;
    const auto g = fusion::gate_fuse(t, f, t.constant(2.0 * gradsuite::randn(1, 8, rng)),
                                     t.constant(2.0 * gradsuite::randn(1, 8, rng)));
    beta_min = std::min(beta_min, g.beta.value()(0, 0));
    beta_max = std::max(beta_max, g.beta.value()(0, 0));
  }

  Verdict v;
  v.passed = rigid < 1e-9 && attn_err <= 1e-9 && yhat_err <= 1e-9 && beta_min > 0.0 && beta_max < 1.0;
  v.summary = "rigid-motion max diff " + sci(rigid) + ", attention row-sum err " + sci(attn_err) +
              ", yhat sum err " + sci(yhat_err) + ", beta in [" + fmt(beta_min, 6) + ", " + fmt(beta_max, 6) +
              "] over 10^4 inputs";
  return v;
}

// ---- planted-correspondence experiments -----------------------------------

struct PlantedOutcome {
  double recall_at_1 = 0.0;
  double macro_auroc = 0.0;
  double site_pr_auc = 0.0;
  double site_prevalence = 0.0;
  double train_seconds = 0.0;
  double total_seconds = 0.0;
};

std::string describe(const PlantedOutcome& o) {
  return "recall@1 " + fmt(o.recall_at_1, 3) + ", macro AUROC " + fmt(o.macro_auroc, 4) + ", site PR-AUC " +
         fmt(o.site_pr_auc, 3) + " (prevalence " + fmt(o.site_prevalence, 3) + "), train " +
         fmt(o.train_seconds, 0) + " s, total " + fmt(o.total_seconds, 0) + " s";
}

PlantedOutcome planted_run(std::uint64_t seed, const train::Ablations& ablations, bool noisy) {
  const auto start = Clock::now();
  MotifConfig mc;
  mc.id_prefix = "tr";
  Dataset train_set = generate_synthetic_dataset(256, 40, 8, mc, seed * 10 + 1);
  if (noisy) train_set = inject_noise(train_set, NoiseConfig{}, mc, mix_seed(seed * 10 + 1, 99));
  mc.id_prefix = "te";
  const Dataset test_set = generate_synthetic_dataset(64, 40, 8, mc, seed * 10 + 2);

  auto configure = [&](train::Stage stage) {
    train::TrainConfig c = train::TrainConfig::defaults(stage);
    c.seed = seed;
    c.ablations = ablations;
    if (noisy) {
      sampling::PipelineConfig p;
      p.seed = seed;
      c.curation = p;
    }
    return c;
  };
  const train::TrainResult pre = train::pretrain(train_set, configure(train::Stage::kPretrain));
  train::TrainResult fine = train::finetune(train_set, configure(train::Stage::kFinetune), pre.model.params);
  PlantedOutcome out;
  out.train_seconds = seconds_since(start);

  train::Model& model = fine.model;
  const auto library = train::embed_corpus(model, test_set, train::EmbedMode::kLigand);
  const auto queries = train::embed_corpus(model, test_set, train::EmbedMode::kPocket);
  std::map<std::string, std::string> paired;
  for (const auto& t : test_set.triplets) paired[t.protein_id] = t.ligand_id;

  std::vector<metrics::NamedList> lists;
  std::size_t correct = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const RowVector query = queries.vectors.row(static_cast<Eigen::Index>(q));
    const std::string& want = paired.at(queries.ids[q]);
    if (retrieval::screen(query, library, 1).front().id == want) ++correct;
    metrics::RankedList l;
    l.scores = retrieval::cosine_scores(query, library);
    for (const auto& id : library.ids) l.labels.push_back(id == want ? 1 : 0);
    lists.emplace_back(queries.ids[q], std::move(l));
  }
  out.recall_at_1 = static_cast<double>(correct) / static_cast<double>(queries.size());
  out.macro_auroc = metrics::evaluate_screening(lists).macro.auroc;

  std::vector<metrics::NamedList> sites;
  for (const auto& t : test_set.triplets) {
    const ProteinRecord& p = test_set.proteins.at(t.protein_id);
    const LigandRecord& l = test_set.ligands.at(t.ligand_id);
    metrics::RankedList r;
    r.scores = train::predict_sites(model, p, {&l});
    r.labels = derive_binding_labels(p, l).labels;
    sites.emplace_back(t.protein_id, std::move(r));
  }
  const metrics::SiteReport site_report = metrics::evaluate_sites(sites);
  out.site_pr_auc = site_report.macro.pr_auc;
  out.site_prevalence = site_report.macro.prevalence;
  out.total_seconds = seconds_since(start);
  return out;
}

Verdict planted_correspondence() {
  Verdict v;
  double recall = 0.0;
  double auroc = 0.0;
  double pr = 0.0;
  double prevalence = 0.0;
  bool in_time = true;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const PlantedOutcome o = planted_run(seed, {}, false);
    recall += o.recall_at_1 / 3.0;
    auroc += o.macro_auroc / 3.0;
    pr += o.site_pr_auc / 3.0;
    prevalence += o.site_prevalence / 3.0;
    in_time = in_time && o.total_seconds <= 300.0;
    v.details.push_back("seed " + std::to_string(seed) + ": " + describe(o));
  }
  v.passed = recall >= 0.60 && auroc >= 0.90 && pr >= 2.0 * prevalence && in_time;
  v.summary = "3-seed mean recall@1 " + fmt(recall, 3) + " (>= 0.60, random 1/64), macro AUROC " + fmt(auroc, 4) +
              " (>= 0.90, random 0.50), site PR-AUC " + fmt(pr, 3) + " (>= 2 x " + fmt(prevalence, 3) + ")" +
              (in_time ? ", every run <= 300 s" : ", a run exceeded 300 s");
  return v;
}

Verdict ablation_direction() {
  struct Arm {
    const char* name;
    train::Ablations ablations;
    bool gated;
  };
  const std::vector<Arm> arms = {{"-BDS", {true, false, false}, true},
                                 {"-SSF", {false, true, false}, true},
                                 {"-BSP", {false, false, true}, false}};
  std::map<std::string, int> wins;
  Verdict v;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const PlantedOutcome full = planted_run(seed, {}, true);
    std::string line = "seed " + std::to_string(seed) + ": full AUROC " + fmt(full.macro_auroc, 4) + " recall@1 " +
                       fmt(full.recall_at_1, 3);
    for (const Arm& arm : arms) {
      const PlantedOutcome o = planted_run(seed, arm.ablations, true);
      if (full.macro_auroc >= o.macro_auroc) ++wins[arm.name];
      line += "; " + std::string(arm.name) + " AUROC " + fmt(o.macro_auroc, 4) + " recall@1 " + fmt(o.recall_at_1, 3);
    }
    v.details.push_back(line);
  }
  v.passed = true;
  v.summary = "full >= ablation:";
  for (const Arm& arm : arms) {
    const int w = wins[arm.name];
    if (arm.gated && w < 2) v.passed = false;
    v.summary += " " + std::string(arm.name) + " " + std::to_string(w) + "/3" + (arm.gated ? "" : " (diagnostic)");
  }
  return v;
}

// ---- homology exclusion ------------------------------------------------------

Verdict homology_monotonicity() {
  Rng rng(314);
  std::vector<ProteinRecord> train;
  std::vector<ProteinRecord> test;
  for (int family = 0; family < 6; ++family) {
    std::string root(80, 'A');
    for (auto& c : root) c = kAminoAcids[rng.index(20)];
    test.push_back(fixtures::protein("Q" + std::to_string(family), root));
    // Graded divergence: 0% to 95% of positions resampled.
    for (int grade = 0; grade < 20; ++grade) {
      std::string s = root;
      const std::size_t mutations = static_cast<std::size_t>(grade) * s.size() / 20;
      std::vector<std::size_t> positions(s.size());
      for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
      rng.shuffle(positions);
      for (std::size_t m = 0; m < mutations; ++m) {
        char& c = s[positions[m]];
        char next = c;
        while (next == c) next = kAminoAcids[rng.index(20)];
        c = next;
      }
      train.push_back(fixtures::protein("F" + std::to_string(family) + "_" + std::to_string(grade), s));
    }
  }
  std::vector<std::size_t> removed;
  Verdict v;
  std::string counts;
  for (double cutoff : {0.90, 0.60, 0.30}) {
    const auto r = splits::homology_exclusion_split(train, test, cutoff);
    removed.push_back(r.removed.size());
    counts += (counts.empty() ? "" : ", ") + fmt(cutoff, 2) + " -> " + std::to_string(r.removed.size());
    for (const auto& w : r.removed) {
      if (w.identity < cutoff) v.details.push_back("witness below cutoff for " + w.train_id);
    }
  }
  v.passed = removed[0] <= removed[1] && removed[1] <= removed[2] && v.details.empty();
  v.summary = "removed of " + std::to_string(train.size()) + " graded homologs: " + counts;
  return v;
}

// ---- CLI determinism ---------------------------------------------------------

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict cli_determinism() {
  const std::string cli = S2SCREEN_CLI_PATH;
  const std::vector<std::string> outputs = {
      "curated/affinities.tsv", "curated/report.json", "pre.ckpt",          "pre.ckpt.log.jsonl",
      "ft.ckpt",                "ft.ckpt.log.jsonl",   "lib.s2emb",         "pockets.s2emb",
      "hits.jsonl",             "ranks.jsonl",         "report.json",       "sites.jsonl",
      "site_report.json",       "split/proteins.jsonl", "split/audit.json"};
  auto pipeline = [&](const fs::path& dir) {
    const std::string d = dir.string();
    const std::string q = " --quiet ";
    const std::string small = " --epochs 4 --residue-dim 16 --atom-dim 16 --shared-dim 16 --seed 5";
    const std::vector<std::string> steps = {
        q + "synth --n 48 --seed 3 --noise --prefix tr --out " + d + "/train",
        q + "synth --n 16 --seed 4 --prefix te --out " + d + "/test",
        q + "sample --data " + d + "/train --out " + d + "/curated --seed 5",
        q + "pretrain --data " + d + "/curated --out " + d + "/pre.ckpt" + small,
        q + "finetune --data " + d + "/curated --init " + d + "/pre.ckpt --out " + d + "/ft.ckpt" + small,
        q + "embed --ckpt " + d + "/ft.ckpt --data " + d + "/test --mode ligand --out " + d + "/lib.s2emb",
        q + "embed --ckpt " + d + "/ft.ckpt --data " + d + "/test --mode pocket --out " + d + "/pockets.s2emb",
        q + "screen --pocket-ckpt " + d + "/ft.ckpt --proteins " + d + "/test/proteins.jsonl --library " + d +
            "/lib.s2emb --top-k 5 --out " + d + "/hits.jsonl --affinities " + d + "/test/affinities.tsv --ranks-out " +
            d + "/ranks.jsonl",
        q + "eval-vs --ranks " + d + "/ranks.jsonl --out " + d + "/report.json",
        q + "predict-sites --ckpt " + d + "/ft.ckpt --data " + d + "/test --out " + d + "/sites.jsonl",
        q + "eval-sites --predictions " + d + "/sites.jsonl --labels " + d + "/test/labels.jsonl --out " + d +
            "/site_report.json",
        q + "split --train " + d + "/train/proteins.jsonl --test " + d + "/test/proteins.jsonl --cutoff 0.6 --out " +
            d + "/split",
    };
    for (const auto& s : steps) {
      if (shell(cli + s + " >/dev/null 2>>" + d + "/stderr.log") != 0) return "failed: s2screen" + s;
    }
    return std::string();
  };
  const auto start = Clock::now();
  const fs::path a = oracle::temp_dir("accept_run_a");
  const fs::path b = oracle::temp_dir("accept_run_b");
  Verdict v;
  for (const fs::path& dir : {a, b}) {
    const std::string err = pipeline(dir);
    if (!err.empty()) {
      v.summary = err;
      return v;
    }
  }
  std::size_t identical = 0;
  for (const auto& f : outputs) {
    if (fs::exists(a / f) && io::read_file(a / f) == io::read_file(b / f)) {
      ++identical;
    } else {
      v.details.push_back("differs or missing: " + f);
    }
  }
  v.passed = identical == outputs.size();
  v.summary = std::to_string(identical) + "/" + std::to_string(outputs.size()) +
              " pipeline artifacts byte-identical across two runs (" + fmt(seconds_since(start), 0) + " s)";
  return v;
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

int run_all(const std::string& filter) {
  const std::vector<Criterion> criteria = {
      {"gradient-suite", gradient_suite},
      {"metric-oracles", metric_oracles},
      {"sampling-distribution", sampling_distribution},
      {"structural-invariances", structural_invariances},
      {"planted-correspondence", planted_correspondence},
      {"ablation-direction", ablation_direction},
      {"homology-exclusion-monotonicity", homology_monotonicity},
      {"cli-determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!filter.empty() && std::string(c.name).find(filter) == std::string::npos) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.passed = false;
      v.summary = std::string("exception: ") + e.what();
    }
    if (!v.passed) ++failures;
    std::cout << (v.passed ? "PASS " : "FAIL ") << c.name << ": " << v.summary << std::endl;
    for (const auto& d : v.details) std::cout << "    " << d << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace s2::acceptance

int main(int argc, char** argv) {
  return s2::acceptance::run_all(argc > 1 ? argv[1] : "");
}
