// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qmetro {

enum class errc {
  non_hermitian_input,
  negative_eigenvalue,
  dimension_mismatch,
  parameter_mismatch,
  bad_parameter,
  singular_distribution,
  support_violation,
  beta_zero_infeasible,
  solver_failure,
  domain_error,
  dimension_guard,
  parse_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::non_hermitian_input: return "non-hermitian-input";
    case errc::negative_eigenvalue: return "negative-eigenvalue";
    case errc::dimension_mismatch: return "dimension-mismatch";
    case errc::parameter_mismatch: return "parameter-mismatch";
    case errc::bad_parameter: return "bad-parameter";
    case errc::singular_distribution: return "singular-distribution";
    case errc::support_violation: return "support-violation";
    case errc::beta_zero_infeasible: return "beta-zero-infeasible";
    case errc::solver_failure: return "solver-failure";
    case errc::domain_error: return "domain-error";
    case errc::dimension_guard: return "dimension-guard";
    case errc::parse_error: return "parse-error";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace qmetro
