#ifndef FIXENRICH_ACCEPTANCE_HPP
#define FIXENRICH_ACCEPTANCE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "fixenrich/space.hpp"

namespace fixenrich {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  /// Directory holding the bundled experiment configs.
  std::filesystem::path suite_dir = "suite";
  /// Where experiment traces and summaries are written.
  std::filesystem::path out_dir = "out";
  double check_tol = kDefaultCheckTol;
};

/// Runs every acceptance criterion deterministically and returns one result
/// per criterion, ordered by id. Criteria never throw; a failing setup turns
/// into a failed result carrying the exception text.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

}  // namespace fixenrich

#endif  // FIXENRICH_ACCEPTANCE_HPP
