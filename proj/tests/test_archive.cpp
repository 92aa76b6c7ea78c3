#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mor/archive.hpp"
#include "mor/thermalblock.hpp"
#include "test_util.hpp"

using namespace mor;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mor_archive_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void check_same(const LtiModel& x, const LtiModel& y) {
  CHECK(x.order() == y.order());
  CHECK(x.num_parameters() == y.num_parameters());
  CHECK(x.e().to_dense() == y.e().to_dense());
  CHECK(x.a().constant_term().to_dense() == y.a().constant_term().to_dense());
  for (Index i = 0; i < x.num_parameters(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    CHECK(x.a().parametric_terms()[k].to_dense() == y.a().parametric_terms()[k].to_dense());
  }
  CHECK(x.b() == y.b());
  CHECK(x.c() == y.c());
  CHECK(x.energy_product().is_identity() == y.energy_product().is_identity());
  if (!x.energy_product().is_identity()) {
    CHECK(x.energy_product().matrix().to_dense() == y.energy_product().matrix().to_dense());
  }
}

}  // namespace

TEST_CASE("archive round trip is exact") {
  const LtiModel fom = thermalblock::build({2, 6, thermalblock::OutputMode::kBlockAverages});
  const auto path = temp_file("tb.mor");
  const std::string sum = save_model(path, fom, {{"g", "6"}, {"note", "two words"}});
  const ArchivedModel loaded = load_model(path);
  CHECK(loaded.checksum == sum);
  CHECK(loaded.metadata.at("g") == "6");
  CHECK(loaded.metadata.at("note") == "two words");
  check_same(fom, loaded.model);

  std::mt19937_64 rng(3);
  const DenseMatrix a = test::random_stable(5, rng) / 3.0;
  const LtiModel dense = test::dense_model(a, DenseMatrix::Identity(5, 5), test::random_matrix(5, 2, rng),
                                           test::random_matrix(1, 5, rng));
  save_model(path, dense);
  check_same(dense, load_model(path).model);
}

TEST_CASE("archive corruption is detected") {
  const LtiModel fom = thermalblock::build({1, 3, thermalblock::OutputMode::kDomainAverage});
  const auto path = temp_file("corrupt.mor");
  save_model(path, fom);
  std::string text;
  {
    std::ifstream in(path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = text.find("-4");
  REQUIRE(pos != std::string::npos);
  text[pos + 1] = '5';
  {
    std::ofstream out(path, std::ios::trunc);
    out << text;
  }
  try {
    load_model(path);
    FAIL("expected checksum failure");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kIo);
  }
  CHECK_THROWS_AS(load_model(temp_file("missing.mor")), Error);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
