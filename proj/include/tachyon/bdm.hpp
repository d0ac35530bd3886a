#pragma once

// Basic Drive Module case study: metrics, bundled assets and experiment
// harnesses.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tachyon/checker.hpp"
#include "tachyon/learner.hpp"
#include "tachyon/sim.hpp"

namespace tachyon::bdm {

struct FailureCounts {
  int64_t safe = 0;         // detected safe failures
  int64_t detected = 0;     // detected dangerous failures
  int64_t undetected = 0;   // undetected dangerous failures
};

/// (safe + detected) / (safe + detected + undetected). Throws
/// std::domain_error "no failures recorded" when all counts are zero.
double sff(const FailureCounts& c);
/// Same ratio as a reduced fraction (numerator, denominator).
std::pair<int64_t, int64_t> sff_rational(const FailureCounts& c);
/// detected / (detected + undetected); equals sff when safe == 0.
double diagnostic_coverage(const FailureCounts& c);

/// |sff_now - sff_target| * dt. Throws std::invalid_argument when dt < 0.
double fitness_increment(double sff_now, double sff_target, double dt);

enum class Variant { Verification, Learning };

std::string_view model_text(Variant v);
std::string_view table1_text();
std::string_view sff_queries_text();

/// Compiles the bundled asset. Throws CompileError (never for the shipped
/// assets).
TANetwork build_bdm_model(Variant v);
std::vector<Query> table1_queries();
std::vector<Query> sff_queries();

/// Reads final counters of a run.
FailureCounts counts_of(const TANetwork& n, const ConcreteState& s);

// ---------------------------------------------------------------------------
// Verification verdict table

/// Rows 1-5 Valid, 6-10 Invalid, 11-12 Valid.
std::vector<bool> table1_expected();

struct Table1Row {
  int row = 0;
  bool expected = false;
  Verdict verdict;
  /// "match", "mismatch", "bound exceeded" or "error".
  std::string status;
};

struct Table1Report {
  std::vector<Table1Row> rows;
  bool all_match = false;
  bool bound_exceeded = false;
  double millis = 0.0;
};

/// Checks every query and compares it with `expected` (satisfied or not).
/// Throws std::invalid_argument when the sizes differ.
Table1Report run_table1(const TANetwork& n, const std::vector<Query>& qs, const CheckOptions& opts = {},
                        const std::vector<bool>& expected = table1_expected());
std::string to_json(const Table1Report& r);

// ---------------------------------------------------------------------------
// SFF experiment

struct SffConfig {
  uint64_t seed = 1;
  int baseline_seeds = 20;
  int eval_runs = 20;
  int threads = 1;
  double horizon_ms = 0.0;     // 0: take the strategy query's horizon
  double target = 0.90;
  LearnConfig learn;
};

struct SffSide {
  std::vector<FailureCounts> runs;
  double detected_mean = 0.0;
  double undetected_mean = 0.0;
  double sff = 0.0;            // mean of per-run ratios
  double sff_ci95 = 0.0;
  double pooled_sff = 0.0;     // total detected over total faults
};

struct SffReport {
  SffSide baseline;
  SffSide learned;
  double target = 0.90;
  uint64_t learn_seed = 0;
  std::vector<uint64_t> baseline_seeds;
  std::vector<double> curve;
  uint64_t decisions = 0;
  uint64_t fallbacks = 0;
  bool target_met = false;
  double millis = 0.0;
};

/// Per-run failure counts of `runs` simulations; run k uses seed + k.
std::vector<FailureCounts> sample_counts(const TANetwork& n, double horizon_ms, uint64_t seed, int runs,
                                         const Strategy* strategy = nullptr, int threads = 1);
SffSide summarize_side(std::vector<FailureCounts> runs);

/// Baseline, learning and evaluation. Throws std::domain_error "no failures
/// recorded" when no run records a failure.
SffReport run_sff_experiment(const TANetwork& learn_model, const std::vector<Query>& qs, const SffConfig& cfg,
                             Strategy* learned = nullptr);
std::string to_json(const SffReport& r);
std::string learning_curve_csv(const SffReport& r);
std::string detection_bars_csv(const SffReport& r);

}  // namespace tachyon::bdm
