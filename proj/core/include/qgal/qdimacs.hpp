#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qgal/pcnf.hpp"

namespace qgal {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ParseOptions {
  // Strict mode rejects literals above the declared bound and clause counts
  // that disagree with the header. Lenient mode widens max_var instead.
  bool strict = true;
};

/// Parses QDIMACS. Free variables are bound in an outermost existential block,
/// merged with the first block when that block is existential. Clause and
/// literal order are preserved.
Pcnf parse_qdimacs(std::string_view text, const ParseOptions& options = {});
Pcnf parse_qdimacs(std::istream& in, const ParseOptions& options = {});
Pcnf read_qdimacs_file(const std::filesystem::path& path, const ParseOptions& options = {});

std::string write_qdimacs(const Pcnf& f);
void write_qdimacs(std::ostream& out, const Pcnf& f);
void write_qdimacs_file(const std::filesystem::path& path, const Pcnf& f);

}  // namespace qgal
