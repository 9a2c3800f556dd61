#include "qgal/normalize.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace qgal {

Pcnf normalize(const Pcnf& f) {
  Pcnf out;
  out.prefix = f.prefix;
  out.max_var = f.max_var;
  out.matrix.reserve(f.matrix.size());
  for (const auto& clause : f.matrix) {
    Clause c = clause;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    bool tautology = false;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (c[i].var() == c[i - 1].var()) tautology = true;
    if (!tautology) out.matrix.push_back(std::move(c));
  }
  std::sort(out.matrix.begin(), out.matrix.end());
  out.matrix.erase(std::unique(out.matrix.begin(), out.matrix.end()), out.matrix.end());
  return out;
}

std::string canonical_serialization(const Pcnf& f) {
  std::string out;
  bool first = true;
  for (auto block : merge_adjacent_blocks(f.prefix)) {
    std::sort(block.variables.begin(), block.variables.end());
    if (!first) out += '|';
    first = false;
    out += quantifier_char(block.quantifier);
    for (std::size_t i = 0; i < block.variables.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(block.variables[i]);
    }
  }
  out += "||";

  const Pcnf n = normalize(f);
  std::vector<std::string> lines;
  lines.reserve(n.matrix.size());
  for (const auto& clause : n.matrix) {
    std::string line;
    for (std::size_t i = 0; i < clause.size(); ++i) {
      if (i) line += ',';
      line += std::to_string(clause[i].dimacs());
    }
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

CanonicalDigest digest_bytes(const std::string& data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_md5(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("md5 digest failed");
  return CanonicalDigest{"md5", std::string(reinterpret_cast<const char*>(md), len)};
}

CanonicalDigest canonical_digest(const Pcnf& f) { return digest_bytes(canonical_serialization(f)); }

std::string CanonicalDigest::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out += kHex[c >> 4];
    out += kHex[c & 15];
  }
  return out;
}

CanonicalDigest CanonicalDigest::from_tagged(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("digest without algorithm tag: " + text);
  std::string hex = text.substr(colon + 1);
  if (hex.size() % 2) throw std::invalid_argument("odd-length digest: " + text);
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit in digest: " + text);
  };
  std::string bytes;
  for (std::size_t i = 0; i < hex.size(); i += 2)
    bytes += static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1]));
  return CanonicalDigest{text.substr(0, colon), bytes};
}

FormulaStats compute_stats(const Pcnf& f) {
  FormulaStats s;
  for (const auto& block : merge_adjacent_blocks(f.prefix)) {
    ++s.num_blocks;
    s.num_vars += block.variables.size();
    (block.quantifier == Quantifier::Exists ? s.num_existential : s.num_universal) +=
        block.variables.size();
  }
  s.num_clauses = f.matrix.size();
  for (const auto& c : f.matrix) s.num_literals += c.size();
  return s;
}

}  // namespace qgal
