#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgal/normalize.hpp"
#include "qgal/solver/outcome.hpp"

namespace qgal {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchmarkInstance {
  std::string id;  // path relative to the registry root, '/' separated
  std::filesystem::path path;
  std::string family;
  CanonicalDigest digest;
  std::optional<Status> expected;
  FormulaStats stats;
};

struct RejectedFile {
  std::filesystem::path path;
  std::string reason;
};

struct Registry {
  std::filesystem::path root;
  std::vector<BenchmarkInstance> instances;  // sorted by id
  std::vector<RejectedFile> rejected;
  std::vector<std::vector<std::string>> duplicates;  // ids sharing a digest
  std::vector<std::string> warnings;

  const BenchmarkInstance* find(const std::string& id) const;
  /// Family name -> instance ids (sorted).
  std::map<std::string, std::vector<std::string>> families() const;
};

struct RegisterOptions {
  /// Optional TSV with lines "<relative path>\t<family>[\t<SAT|UNSAT>]".
  std::optional<std::filesystem::path> manifest;
};

/// One instance per regular file below root (hidden files and the manifest
/// skipped). The family is the first directory component of the relative
/// path, or "default" for files directly in root, unless the manifest says
/// otherwise. Unreadable or unparseable files go to `rejected`.
Registry register_benchmarks(const std::filesystem::path& root, const RegisterOptions& options = {});

void save_registry(const Registry& registry, const std::filesystem::path& path);
Registry load_registry(const std::filesystem::path& path);

struct BenchmarkSet {
  std::uint64_t seed = 0;
  std::size_t per_family = 0;
  std::vector<std::string> instance_ids;  // sorted by (family, id)
};

/// Draws min(k, |family|) instances from each family without replacement.
/// Families are visited in name order with one generator seeded by `seed`.
/// Throws HarnessError when k is 0.
BenchmarkSet stratified_sample(const Registry& registry, std::size_t k, std::uint64_t seed);

/// `trials` samples with seeds seed, seed+1, ...
std::vector<BenchmarkSet> sample_trials(const Registry& registry, std::size_t k, std::uint64_t seed,
                                        std::size_t trials);

void save_sets(const std::vector<BenchmarkSet>& sets, const std::filesystem::path& path);
std::vector<BenchmarkSet> load_sets(const std::filesystem::path& path);

}  // namespace qgal
