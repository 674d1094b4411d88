#pragma once

#include <cstddef>
#include <string>

#include "json.hpp"

namespace memnet {

struct OracleResult {
  std::string suite;
  std::size_t n_max = 0;
  std::size_t checks = 0;
  std::size_t mismatches = 0;
  nlohmann::json witness;  // first mismatch, null when none

  bool pass() const { return mismatches == 0; }
};

inline constexpr std::size_t kOracleMaxN = 14;

// Suites: triangle, indicator, distance, bits, stage3. `exponent_shift`
// perturbs the bit-extraction power of two (bits and stage3 suites).
OracleResult run_oracle(const std::string& suite, std::size_t n_max, int exponent_shift = 0);

nlohmann::json to_json(const OracleResult& r);

}  // namespace memnet
