// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every verification criterion at its stated
// tolerance and prints one pass/fail line per criterion.
#include <cstdio>

#include "qmetro/verify.hpp"

int main() {
  using namespace qmetro;
  verify::VerifyOptions opt;
  auto reports = verify::run(opt);
  bool all_pass = true;
  for (const auto& rep : reports) {
    std::printf("%s criterion %d: %s (%zu checks, %.1f s)\n", rep.pass ? "PASS" : "FAIL", rep.id,
                rep.name.c_str(), rep.lines.size(), rep.seconds);
    if (!rep.pass) {
      for (const auto& line : rep.lines)
        if (!line.pass)
          std::printf("    failed: %s  [%s]\n", line.label.c_str(), line.detail.c_str());
    }
    all_pass = all_pass && rep.pass;
  }
  std::printf("%s\n", all_pass ? "ALL CRITERIA PASSED" : "CRITERIA FAILED");
  return all_pass ? 0 : 1;
}
