#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgal {

using Var = std::uint32_t;

/// A signed variable reference in DIMACS convention: +v is v, -v is not v.
class Literal {
 public:
  constexpr Literal() = default;
  constexpr explicit Literal(std::int32_t dimacs) : value_(dimacs) {}
  static constexpr Literal positive(Var v) { return Literal(static_cast<std::int32_t>(v)); }
  static constexpr Literal negative(Var v) { return Literal(-static_cast<std::int32_t>(v)); }
  static constexpr Literal of(Var v, bool positive_polarity) {
    return positive_polarity ? positive(v) : negative(v);
  }

  constexpr Var var() const { return static_cast<Var>(value_ < 0 ? -value_ : value_); }
  constexpr bool is_positive() const { return value_ > 0; }
  constexpr bool is_negative() const { return value_ < 0; }
  constexpr std::int32_t dimacs() const { return value_; }
  constexpr Literal operator-() const { return Literal(-value_); }

  constexpr bool operator==(const Literal&) const = default;

  // Orders by variable first, negative before positive.
  constexpr std::strong_ordering operator<=>(const Literal& other) const {
    if (auto c = var() <=> other.var(); c != 0) return c;
    return is_positive() <=> other.is_positive();
  }

 private:
  std::int32_t value_ = 0;
};

/// A disjunction of literals. Cubes (conjunctions) reuse the same representation.
using Clause = std::vector<Literal>;
using Cube = std::vector<Literal>;

enum class Quantifier : std::uint8_t { Exists, Forall };

constexpr char quantifier_char(Quantifier q) { return q == Quantifier::Exists ? 'e' : 'a'; }
constexpr Quantifier dual(Quantifier q) {
  return q == Quantifier::Exists ? Quantifier::Forall : Quantifier::Exists;
}

struct QuantifierBlock {
  Quantifier quantifier = Quantifier::Exists;
  std::vector<Var> variables;

  bool operator==(const QuantifierBlock&) const = default;
};

using Prefix = std::vector<QuantifierBlock>;

/// Prenex CNF: ordered quantifier blocks followed by a clause matrix.
struct Pcnf {
  Prefix prefix;
  std::vector<Clause> matrix;
  Var max_var = 0;

  bool operator==(const Pcnf&) const = default;

  /// Largest variable id appearing anywhere, never smaller than max_var.
  Var effective_max_var() const;
};

/// Merges adjacent blocks with equal quantifiers and drops empty blocks.
Prefix merge_adjacent_blocks(const Prefix& prefix);

/// True when the clause contains a literal and its negation.
bool is_tautology(const Clause& clause);

std::string to_string(const Clause& clause);

class FormulaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qgal
