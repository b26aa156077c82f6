#include "nullstream/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "nullstream/errors.hpp"

namespace nullstream {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("field '") + key + "': " + e.what());
  }
}

const char* variant_name(AnvVariant v) {
  return v == AnvVariant::kGaussianRaw ? "gaussian" : "conditioned";
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

Matrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows * cols) {
    throw InvalidArgument("expected a flat array of " + std::to_string(rows * cols) + " numbers");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols; ++c, ++k) {
      if (!j[k].is_number()) throw InvalidArgument("non-numeric matrix entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[k].get<double>();
    }
  }
  return m;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j, std::size_t size) {
  return matrix_from_json(j, size, 1).col(0);
}

Json to_json(const Subspace& s) {
  return {{"ambient_dim", s.ambient_dim()}, {"dim", s.dim()}, {"basis", to_json(s.basis())}};
}

Subspace subspace_from_json(const Json& j) {
  const auto d = field<std::size_t>(j, "ambient_dim");
  const auto k = field<std::size_t>(j, "dim");
  if (!j.contains("basis")) throw InvalidArgument("missing field 'basis'");
  return Subspace::from_orthonormal_rows(matrix_from_json(j.at("basis"), k, d), d);
}

const LspDataset& InstanceFile::dataset() const {
  if (lsp) return *lsp;
  if (lsp_hard) return lsp_hard->data;
  throw InvalidArgument("instance of type '" + type + "' is not a separation instance");
}

InstanceKind kind_of_type(const std::string& type) {
  if (type == "anv-gaussian" || type == "anv-conditioned") return InstanceKind::kAnv;
  if (type == "lsp" || type == "margin") return InstanceKind::kLsp;
  if (type == "lsp-hard") return InstanceKind::kLspHard;
  if (type == "lr") return InstanceKind::kLr;
  throw InvalidArgument("unknown instance type '" + type + "'");
}

Json to_json(const InstanceFile& f) {
  Json j{{"type", f.type}, {"d", f.d}, {"params", f.params}, {"seed", f.seed}};
  const auto put_dataset = [&](const LspDataset& ds) {
    j["n"] = ds.size();
    j["points"] = to_json(ds.points);
    j["labels"] = ds.labels;
    j["witness"] = to_json(ds.witness);
    j["margin"] = ds.margin;
  };
  switch (f.kind) {
    case InstanceKind::kAnv: {
      const AnvInstance& a = f.anv.value();
      j["variant"] = variant_name(a.variant);
      j["c_f"] = a.c_f;
      j["attempts"] = a.attempts;
      j["vectors"] = to_json(a.vectors);
      j["witness"] = to_json(a.witness);
      break;
    }
    case InstanceKind::kLsp:
      put_dataset(f.lsp.value());
      break;
    case InstanceKind::kLspHard: {
      const LspHardInstance& h = f.lsp_hard.value();
      put_dataset(h.data);
      j["attempts"] = h.attempts;
      j["V"] = to_json(h.v);
      j["U"] = to_json(h.u);
      break;
    }
    case InstanceKind::kLr: {
      const LrInstance& r = f.lr.value();
      j["n"] = r.a.rows();
      j["A"] = to_json(r.a);
      j["b"] = to_json(r.b);
      j["witness"] = to_json(r.witness);
      j["inserted_row"] = r.inserted_row;
      break;
    }
  }
  return j;
}

InstanceFile instance_from_json(const Json& j) {
  InstanceFile f;
  f.type = field<std::string>(j, "type");
  f.kind = kind_of_type(f.type);
  f.d = field<std::size_t>(j, "d");
  f.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("params")) f.params = j.at("params");
  if (f.d < 2) throw InvalidArgument("d must be at least 2");
  const std::size_t d = f.d;

  const auto read_dataset = [&]() {
    LspDataset ds;
    const auto n = field<std::size_t>(j, "n");
    ds.points = matrix_from_json(j.at("points"), n, d);
    ds.labels = field<std::vector<int>>(j, "labels");
    ds.witness = vector_from_json(j.at("witness"), d);
    ds.margin = field<double>(j, "margin");
    validate(ds);
    return ds;
  };
  switch (f.kind) {
    case InstanceKind::kAnv: {
      AnvInstance a;
      const auto variant = field<std::string>(j, "variant");
      if (variant == "gaussian") {
        a.variant = AnvVariant::kGaussianRaw;
      } else if (variant == "conditioned") {
        a.variant = AnvVariant::kSphereConditioned;
      } else {
        throw InvalidArgument("unknown ANV variant '" + variant + "'");
      }
      a.d = d;
      a.c_f = field<double>(j, "c_f");
      a.seed = f.seed;
      a.attempts = field<std::size_t>(j, "attempts");
      if (!j.contains("vectors") || !j.contains("witness")) {
        throw InvalidArgument("ANV instance needs 'vectors' and 'witness'");
      }
      a.vectors = matrix_from_json(j.at("vectors"), d - 1, d);
      a.witness = vector_from_json(j.at("witness"), d);
      validate(a);
      f.anv = std::move(a);
      break;
    }
    case InstanceKind::kLsp:
      f.lsp = read_dataset();
      break;
    case InstanceKind::kLspHard: {
      LspHardInstance h;
      h.data = read_dataset();
      h.attempts = field<std::size_t>(j, "attempts");
      h.v = subspace_from_json(j.at("V"));
      h.u = subspace_from_json(j.at("U"));
      f.lsp_hard = std::move(h);
      break;
    }
    case InstanceKind::kLr: {
      LrInstance r;
      const auto n = field<std::size_t>(j, "n");
      r.a = matrix_from_json(j.at("A"), n, d);
      r.b = vector_from_json(j.at("b"), n);
      r.witness = vector_from_json(j.at("witness"), d);
      r.inserted_row = field<std::size_t>(j, "inserted_row");
      validate(r);
      f.lr = std::move(r);
      break;
    }
  }
  return f;
}

void save_instance(const std::string& path, const InstanceFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << to_json(f).dump() << '\n';
  if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
  return instance_from_json(j);
}

Json to_json(const LemmaReport& r) {
  Json trials = Json::array();
  for (const auto& t : r.per_trial) {
    trials.push_back(
        {{"index", t.index}, {"seed", t.seed}, {"passed", t.passed}, {"values", t.values}});
  }
  return {{"lemma_id", r.lemma_id},
          {"d", r.d},
          {"trials", r.trials},
          {"pass_fraction", r.pass_fraction},
          {"passed", r.passed},
          {"seed", r.seed},
          {"statistics", r.statistics},
          {"per_trial", trials}};
}

void write_report_csv(std::ostream& out, const LemmaReport& r) {
  std::set<std::string> names;
  for (const auto& t : r.per_trial) {
    for (const auto& [k, v] : t.values) names.insert(k);
  }
  out << "lemma_id,d,seed,trial,trial_seed,passed";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (const auto& t : r.per_trial) {
    out << r.lemma_id << ',' << r.d << ',' << r.seed << ',' << t.index << ',' << t.seed << ','
        << (t.passed ? 1 : 0);
    for (const auto& n : names) {
      out << ',';
      const auto it = t.values.find(n);
      if (it != t.values.end()) out << format_double(it->second);
    }
    out << '\n';
  }
}

}  // namespace nullstream
