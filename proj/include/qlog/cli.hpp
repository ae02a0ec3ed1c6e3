#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qlog::cli {

// Exit codes: 0 success, 1 internal failure (or failed verification rows),
// 2 usage or domain error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct VerifyRow {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

// Suites: "paper-fixtures", "invariants", "all".
std::vector<VerifyRow> verify_suite(const std::string& suite);

}  // namespace qlog::cli
