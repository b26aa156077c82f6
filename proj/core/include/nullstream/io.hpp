#pragma once

// JSON and CSV serialization for subspaces, instances and lemma reports.
// JSON numbers use the shortest representation that parses back to the same
// double, so every file round-trips bit-exactly.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "nullstream/instances.hpp"
#include "nullstream/linalg.hpp"
#include "nullstream/verification.hpp"

namespace nullstream {

using Json = nlohmann::json;

/// %.17g; used for every CSV float.
std::string format_double(double x);

Json to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j);

Json to_json(const Matrix& m);  ///< Row-major flat array.
Matrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols);
Json to_json(const Vector& v);
Vector vector_from_json(const Json& j, std::size_t size);

enum class InstanceKind { kAnv, kLsp, kLspHard, kLr };

/// An instance together with its generation record. `type` is the generator
/// name (anv-gaussian, anv-conditioned, lsp, lsp-hard, margin, lr) and exactly
/// one of the payloads matching `kind` is set.
struct InstanceFile {
  std::string type;
  InstanceKind kind = InstanceKind::kAnv;
  std::size_t d = 0;
  Json params = Json::object();
  std::uint64_t seed = 0;
  std::optional<AnvInstance> anv;
  std::optional<LspDataset> lsp;
  std::optional<LspHardInstance> lsp_hard;
  std::optional<LrInstance> lr;

  /// The separator dataset for kLsp and kLspHard.
  const LspDataset& dataset() const;
};

InstanceKind kind_of_type(const std::string& type);

Json to_json(const InstanceFile& f);
/// Throws InvalidArgument on a malformed document or one whose payload fails
/// validation.
InstanceFile instance_from_json(const Json& j);

void save_instance(const std::string& path, const InstanceFile& f);
InstanceFile load_instance(const std::string& path);

Json to_json(const LemmaReport& r);

/// One row per trial: lemma_id, d, seed, trial, trial_seed, passed, then the
/// union of the per-trial value names in sorted order.
void write_report_csv(std::ostream& out, const LemmaReport& r);

}  // namespace nullstream
