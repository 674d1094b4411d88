#pragma once

#include <cstddef>

#include "memnet/dataset.hpp"
#include "memnet/pipeline.hpp"

namespace memnet {

// ceil(sqrt(n)); the upper end of the legal L and B ranges.
std::size_t ceil_sqrt(std::size_t n);

// Contiguous runs of `subset` points in projected order, the last run possibly
// shorter. Returns (first, count) pairs.
std::vector<std::pair<std::size_t, std::size_t>> partition_sorted(std::size_t n, std::size_t subset);

// One shared projection, ceil(N/L^2) cores side by side, summed by the output
// layer.
Memorizer assemble_bounded_depth(const Dataset& ds, std::size_t L, const BuildConfig& cfg);

// One shared projection, then a chain of blocks (x, y) -> (x, y + core_k(x)),
// one per run of B^2 points.
Memorizer assemble_bounded_bits(const Dataset& ds, std::size_t B, const BuildConfig& cfg);

}  // namespace memnet
