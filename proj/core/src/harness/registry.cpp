#include "qgal/harness/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qgal/qdimacs.hpp"
#include "qgal/util/random.hpp"

namespace qgal {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ManifestEntry {
  std::string family;
  std::optional<Status> expected;
};

std::map<std::string, ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot open manifest " + path.string());
  std::map<std::string, ManifestEntry> entries;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, '\t');) cols.push_back(col);
    if (cols.size() < 2 || cols[0].empty() || cols[1].empty())
      throw HarnessError(path.string() + ":" + std::to_string(number) + ": expected path<TAB>family");
    ManifestEntry e{cols[1], std::nullopt};
    if (cols.size() > 2 && !cols[2].empty()) {
      try {
        e.expected = parse_status(cols[2]);
      } catch (const std::exception&) {
        throw HarnessError(path.string() + ":" + std::to_string(number) + ": bad status '" + cols[2] + "'");
      }
      if (e.expected == Status::Unknown) e.expected.reset();
    }
    entries[fs::path(cols[0]).lexically_normal().generic_string()] = std::move(e);
  }
  return entries;
}

json stats_json(const FormulaStats& s) {
  return {{"vars", s.num_vars},         {"clauses", s.num_clauses},
          {"blocks", s.num_blocks},     {"existential", s.num_existential},
          {"universal", s.num_universal}, {"literals", s.num_literals}};
}

FormulaStats stats_from(const json& j) {
  FormulaStats s;
  s.num_vars = j.at("vars");
  s.num_clauses = j.at("clauses");
  s.num_blocks = j.at("blocks");
  s.num_existential = j.at("existential");
  s.num_universal = j.at("universal");
  s.num_literals = j.at("literals");
  return s;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw HarnessError(path.string() + ": " + e.what());
  }
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw HarnessError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw HarnessError("cannot write " + path.string());
}

}  // namespace

const BenchmarkInstance* Registry::find(const std::string& id) const {
  auto it = std::lower_bound(instances.begin(), instances.end(), id,
                             [](const BenchmarkInstance& b, const std::string& key) { return b.id < key; });
  return it != instances.end() && it->id == id ? &*it : nullptr;
}

std::map<std::string, std::vector<std::string>> Registry::families() const {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& b : instances) out[b.family].push_back(b.id);
  for (auto& [name, ids] : out) std::sort(ids.begin(), ids.end());
  return out;
}

Registry register_benchmarks(const fs::path& root, const RegisterOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw HarnessError("not a directory: " + root.string());
  Registry reg;
  reg.root = root;
  std::map<std::string, ManifestEntry> manifest;
  std::optional<fs::path> manifest_path;
  if (options.manifest) {
    manifest = read_manifest(*options.manifest);
    manifest_path = fs::weakly_canonical(*options.manifest);
  }

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    const auto name = it->path().filename().string();
    if (!name.empty() && name[0] == '.') {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    if (manifest_path && fs::weakly_canonical(it->path()) == *manifest_path) continue;
    files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, bool> manifest_used;
  for (const auto& file : files) {
    const auto rel = file.lexically_relative(root).generic_string();
    BenchmarkInstance b;
    b.id = rel;
    b.path = file;
    auto slash = rel.find('/');
    b.family = slash == std::string::npos ? "default" : rel.substr(0, slash);
    if (auto m = manifest.find(rel); m != manifest.end()) {
      b.family = m->second.family;
      b.expected = m->second.expected;
      manifest_used[rel] = true;
    }
    try {
      Pcnf f = read_qdimacs_file(file, ParseOptions{false});
      b.digest = canonical_digest(f);
      b.stats = compute_stats(f);
    } catch (const std::exception& e) {
      reg.rejected.push_back({file, e.what()});
      continue;
    }
    reg.instances.push_back(std::move(b));
  }
  for (const auto& [rel, entry] : manifest)
    if (!manifest_used.count(rel)) reg.warnings.push_back("manifest entry without file: " + rel);
  if (files.empty()) reg.warnings.push_back("no benchmark files under " + root.string());

  std::map<std::string, std::vector<std::string>> by_digest;
  for (const auto& b : reg.instances) by_digest[b.digest.tagged()].push_back(b.id);
  for (auto& [digest, ids] : by_digest)
    if (ids.size() > 1) {
      reg.warnings.push_back("duplicate digest " + digest + " shared by " + std::to_string(ids.size()) + " files");
      reg.duplicates.push_back(ids);
    }
  return reg;
}

void save_registry(const Registry& reg, const fs::path& path) {
  json j;
  j["root"] = reg.root.string();
  j["instances"] = json::array();
  for (const auto& b : reg.instances) {
    json e = {{"id", b.id},
              {"path", b.path.string()},
              {"family", b.family},
              {"digest", b.digest.tagged()},
              {"stats", stats_json(b.stats)}};
    e["expected"] = b.expected ? json(std::string(to_string(*b.expected))) : json(nullptr);
    j["instances"].push_back(std::move(e));
  }
  j["rejected"] = json::array();
  for (const auto& r : reg.rejected) j["rejected"].push_back({{"path", r.path.string()}, {"reason", r.reason}});
  j["duplicates"] = reg.duplicates;
  j["warnings"] = reg.warnings;
  write_json(j, path);
}

Registry load_registry(const fs::path& path) {
  json j = read_json(path);
  Registry reg;
  try {
    reg.root = j.at("root").get<std::string>();
    for (const auto& e : j.at("instances")) {
      BenchmarkInstance b;
      b.id = e.at("id");
      b.path = e.at("path").get<std::string>();
      b.family = e.at("family");
      b.digest = CanonicalDigest::from_tagged(e.at("digest"));
      b.stats = stats_from(e.at("stats"));
      if (!e.at("expected").is_null()) b.expected = parse_status(e.at("expected").get<std::string>());
      reg.instances.push_back(std::move(b));
    }
    for (const auto& r : j.at("rejected")) reg.rejected.push_back({r.at("path").get<std::string>(), r.at("reason")});
    reg.duplicates = j.at("duplicates").get<std::vector<std::vector<std::string>>>();
    reg.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw HarnessError(path.string() + ": " + e.what());
  }
  std::sort(reg.instances.begin(), reg.instances.end(),
            [](const BenchmarkInstance& a, const BenchmarkInstance& b) { return a.id < b.id; });
  return reg;
}

BenchmarkSet stratified_sample(const Registry& registry, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw HarnessError("per-family sample size must be at least 1");
  BenchmarkSet set;
  set.seed = seed;
  set.per_family = k;
  std::mt19937_64 rng(seed);
  for (auto& [family, ids] : registry.families()) {
    const std::size_t take = std::min(k, ids.size());
    // Partial Fisher-Yates: the first `take` slots become the sample.
    for (std::size_t i = 0; i < take; ++i) {
      auto j = i + static_cast<std::size_t>(uniform_below(rng, ids.size() - i));
      std::swap(ids[i], ids[j]);
    }
    std::vector<std::string> chosen(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(chosen.begin(), chosen.end());
    set.instance_ids.insert(set.instance_ids.end(), chosen.begin(), chosen.end());
  }
  return set;
}

std::vector<BenchmarkSet> sample_trials(const Registry& registry, std::size_t k, std::uint64_t seed,
                                        std::size_t trials) {
  std::vector<BenchmarkSet> sets;
  for (std::size_t t = 0; t < trials; ++t) sets.push_back(stratified_sample(registry, k, seed + t));
  return sets;
}

void save_sets(const std::vector<BenchmarkSet>& sets, const fs::path& path) {
  json j = json::array();
  for (const auto& s : sets) j.push_back({{"seed", s.seed}, {"per_family", s.per_family}, {"instances", s.instance_ids}});
  write_json(j, path);
}

std::vector<BenchmarkSet> load_sets(const fs::path& path) {
  json j = read_json(path);
  std::vector<BenchmarkSet> sets;
  try {
    for (const auto& e : j) {
      BenchmarkSet s;
      s.seed = e.at("seed");
      s.per_family = e.at("per_family");
      s.instance_ids = e.at("instances").get<std::vector<std::string>>();
      sets.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw HarnessError(path.string() + ": " + e.what());
  }
  return sets;
}

}  // namespace qgal
