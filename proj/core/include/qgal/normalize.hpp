#pragma once

#include <cstdint>
#include <string>

#include "qgal/pcnf.hpp"

namespace qgal {

/// Drops tautological and duplicate clauses, removes duplicate literals,
/// sorts literals by (variable, polarity) and clauses lexicographically.
/// The prefix is left untouched, including variables that no longer occur.
Pcnf normalize(const Pcnf& f);

/// Byte-exact serialization hashed by canonical_digest:
///   <q><v,v,...>|<q><v,...>||<clause>\n<clause>\n...
/// Blocks are merged and their variables sorted; clause lines hold
/// comma-separated decimal literals of the normalized clauses and are sorted
/// bytewise. An empty clause is an empty line.
std::string canonical_serialization(const Pcnf& f);

struct CanonicalDigest {
  std::string algorithm;  // e.g. "md5"
  std::string bytes;      // raw digest bytes

  std::string hex() const;
  /// "<algorithm>:<hex>"
  std::string tagged() const { return algorithm + ":" + hex(); }
  static CanonicalDigest from_tagged(const std::string& text);

  bool operator==(const CanonicalDigest&) const = default;
};

CanonicalDigest canonical_digest(const Pcnf& f);

/// Hash of an arbitrary byte string with the same algorithm.
CanonicalDigest digest_bytes(const std::string& data);

struct FormulaStats {
  std::uint64_t num_vars = 0;
  std::uint64_t num_clauses = 0;
  std::uint64_t num_blocks = 0;
  std::uint64_t num_existential = 0;
  std::uint64_t num_universal = 0;
  std::uint64_t num_literals = 0;
};

/// Syntactic counts; num_blocks counts blocks after merging neighbours with
/// the same quantifier.
FormulaStats compute_stats(const Pcnf& f);

}  // namespace qgal
