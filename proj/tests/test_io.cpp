#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "nullstream/errors.hpp"
#include "nullstream/io.hpp"
#include "nullstream/verification.hpp"

using namespace nullstream;

namespace {

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

InstanceFile reparse(const InstanceFile& f) { return instance_from_json(Json::parse(to_json(f).dump())); }

cli::GenOptions small(std::size_t d) {
  cli::GenOptions g;
  g.d = d;
  g.seed = 11;
  return g;
}

}  // namespace

TEST(Io, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Io, MatrixAndSubspace) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  const Json j = to_json(m);
  EXPECT_EQ(j.dump(), "[1.0,2.0,3.0,4.0,5.0,6.5]");
  EXPECT_TRUE(bitwise_equal(matrix_from_json(j, 2, 3), m));
  EXPECT_THROW(matrix_from_json(j, 3, 3), InvalidArgument);
  EXPECT_THROW(matrix_from_json(Json("x"), 1, 1), InvalidArgument);

  Rng rng(1);
  const Subspace s = sample_grassmannian(3, 7, rng);
  const Subspace back = subspace_from_json(Json::parse(to_json(s).dump()));
  EXPECT_EQ(back.ambient_dim(), 7u);
  EXPECT_TRUE(bitwise_equal(back.basis(), s.basis()));
}

TEST(Io, InstancesRoundTripExactly) {
  for (const char* type : {"anv-gaussian", "anv-conditioned", "lsp", "lsp-hard", "lr", "margin"}) {
    cli::GenOptions g = small(8);
    if (std::string(type) == "margin") g.m = 30;
    const InstanceFile f = cli::generate(type, g);
    const InstanceFile b = reparse(f);
    EXPECT_EQ(b.type, type);
    EXPECT_EQ(b.kind, f.kind);
    EXPECT_EQ(b.d, f.d);
    EXPECT_EQ(b.seed, f.seed);
    EXPECT_EQ(b.params, f.params);
    switch (f.kind) {
      case InstanceKind::kAnv:
        EXPECT_TRUE(bitwise_equal(b.anv->vectors, f.anv->vectors)) << type;
        EXPECT_TRUE(bitwise_equal(b.anv->witness, f.anv->witness)) << type;
        EXPECT_EQ(b.anv->variant, f.anv->variant);
        break;
      case InstanceKind::kLsp:
      case InstanceKind::kLspHard:
        EXPECT_TRUE(bitwise_equal(b.dataset().points, f.dataset().points)) << type;
        EXPECT_EQ(b.dataset().labels, f.dataset().labels);
        EXPECT_EQ(b.dataset().margin, f.dataset().margin);
        if (f.kind == InstanceKind::kLspHard) {
          EXPECT_TRUE(bitwise_equal(b.lsp_hard->v.basis(), f.lsp_hard->v.basis()));
          EXPECT_TRUE(bitwise_equal(b.lsp_hard->u.basis(), f.lsp_hard->u.basis()));
        }
        break;
      case InstanceKind::kLr:
        EXPECT_TRUE(bitwise_equal(b.lr->a, f.lr->a));
        EXPECT_TRUE(bitwise_equal(b.lr->b, f.lr->b));
        EXPECT_EQ(b.lr->inserted_row, f.lr->inserted_row);
        break;
    }
  }
}

TEST(Io, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "nullstream_io_roundtrip.json";
  const InstanceFile f = cli::generate("anv-gaussian", small(6));
  save_instance(path.string(), f);
  const InstanceFile b = load_instance(path.string());
  EXPECT_TRUE(bitwise_equal(b.anv->vectors, f.anv->vectors));
  std::filesystem::remove(path);
  EXPECT_THROW(load_instance(path.string()), InvalidArgument);
}

TEST(Io, MalformedDocumentsAreRejected) {
  const Json good = to_json(cli::generate("anv-gaussian", small(6)));
  EXPECT_NO_THROW(instance_from_json(good));
  EXPECT_THROW(instance_from_json(Json::array()), InvalidArgument);

  Json no_type = good;
  no_type.erase("type");
  EXPECT_THROW(instance_from_json(no_type), InvalidArgument);

  Json bad_type = good;
  bad_type["type"] = "mystery";
  EXPECT_THROW(instance_from_json(bad_type), InvalidArgument);

  Json short_d = good;
  short_d["d"] = 5;
  EXPECT_THROW(instance_from_json(short_d), InvalidArgument);

  // A witness that is no longer a kernel vector fails validation.
  const Json lr = to_json(cli::generate("lr", small(6)));
  Json bad_lr = lr;
  bad_lr["b"][0] = 5.0;
  EXPECT_NO_THROW(instance_from_json(lr));
  EXPECT_THROW(instance_from_json(bad_lr), InvalidArgument);
}

TEST(Io, ReportJsonAndCsv) {
  const LemmaReport r = certify_comorth(8, 3, 2);
  const Json j = to_json(r);
  EXPECT_EQ(j.at("lemma_id"), "comorth");
  EXPECT_EQ(j.at("trials"), 3);
  EXPECT_EQ(j.at("per_trial").size(), 3u);
  EXPECT_TRUE(j.at("passed").get<bool>());

  std::ostringstream csv;
  write_report_csv(csv, r);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "lemma_id,d,seed,trial,trial_seed,passed,complement_distance,deviation,distance");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("comorth,8,2," + std::to_string(rows) + ",", 0), 0u) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}
