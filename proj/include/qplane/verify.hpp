#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "qplane/lattice.hpp"
#include "qplane/table_io.hpp"

namespace qplane {

struct VerifyConfig {
  double q = 0.5;
  int L = 40;
  double series_tol = 1e-14;
  double assert_tol = 1e-8;
  double epsilon = 0.0;
  PrecisionMode mode = PrecisionMode::Double;
  std::uint64_t seed = 20260809;

  QContext context() const {
    return QContext(q, mode, series_tol, 2000);
  }
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string note;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  //! Table with the effective config echoed; wall times only when timings.
  Table to_table(const VerifyConfig &cfg, bool timings) const;
};

std::vector<std::string> suite_names();

//! suite in {algebra, calculus, bessel, delta, green, plane, all}.
VerificationReport run_suite(const std::string &suite,
                             const VerifyConfig &cfg);

//! The named test-function corpus (decaying + compactly supported, with
//! known f(0)); shared by the delta and Green identity suites.
struct CorpusEntry {
  std::string name;
  RadialFunction f;
};
std::vector<CorpusEntry> test_corpus(const QContext &ctx, const QLattice &lat);

//! Acceptance criteria 1..9 (10, the CLI contract, runs as a CTest script
//! around the built binary).  Each entry prints one pass/fail line.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};
std::vector<CriterionResult> run_acceptance();

} // namespace qplane
