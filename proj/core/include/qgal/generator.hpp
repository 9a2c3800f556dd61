#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qgal/pcnf.hpp"

namespace qgal {

struct RandomPcnfOptions {
  Var max_vars = 8;
  std::size_t max_clauses = 20;
  std::size_t max_blocks = 4;
  std::size_t min_clause_len = 2;
  std::size_t max_clause_len = 4;
};

/// Random PCNF with 1..max_vars variables spread over 1..max_blocks
/// alternating blocks and 1..max_clauses clauses of distinct variables.
Pcnf random_pcnf(std::mt19937_64& rng, const RandomPcnfOptions& options = {});

/// The fixed suite used by the property and acceptance checks.
std::vector<Pcnf> random_suite(std::uint64_t seed, std::size_t count,
                               const RandomPcnfOptions& options = {});

}  // namespace qgal
