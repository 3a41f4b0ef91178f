#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "bopp/io.hpp"
#include "test_util.hpp"

using namespace bopp;
using namespace testutil;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bopp_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

bool bit_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

}  // namespace

TEST_CASE("PSWC round trip is bit-exact") {
  TempDir tmp;
  const GridSpec g = GridSpec::make(2, 16, 4.5);
  std::mt19937_64 rng(31);
  SampledField U = random_field(g, rng);
  U[3] = cplx(-0.0, 1e-310);  // sign of zero and a subnormal survive
  const std::string p = tmp.file("u.pswc");
  write_pswc(p, to_record(U));
  const ArrayRecord rec = read_pswc(p);
  CHECK(rec.dims == std::vector<std::uint64_t>{16, 16});
  CHECK(rec.extent == std::vector<double>{4.5, 4.5});
  const SampledField V = field_from_record(rec);
  CHECK(V.grid.matches(g, 0.0));
  CHECK(bit_equal(U.values, V.values));

  // Re-writing what was read reproduces the file byte for byte.
  const std::string p2 = tmp.file("u2.pswc");
  write_pswc(p2, rec);
  CHECK(slurp(p) == slurp(p2));

  // Header layout.
  const std::string bytes = slurp(p);
  REQUIRE(bytes.size() == 4 + 2 + 2 + 2 * 8 + 2 * 8 + 256 * 16);
  CHECK(bytes.substr(0, 4) == "PSWC");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[6]) == 2);
}

TEST_CASE("PSWC matrices") {
  TempDir tmp;
  CMat A(3, 5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) A(i, j) = cplx(i + 0.1 * j, -1.0 / (1 + i + j));
  const std::string p = tmp.file("a.pswc");
  write_pswc(p, to_record(A));
  const CMat B = matrix_from_record(read_pswc(p));
  REQUIRE(B.rows() == 3);
  REQUIRE(B.cols() == 5);
  CHECK(B == A);
}

TEST_CASE("malformed PSWC files") {
  TempDir tmp;
  const GridSpec g = GridSpec::make(1, 8, 2.0);
  const std::string p = tmp.file("ok.pswc");
  write_pswc(p, to_record(gaussian(g)));
  const std::string good = slurp(p);

  const std::string bad = tmp.file("bad.pswc");
  spit(bad, good.substr(0, good.size() - 5));
  CHECK(error_of([&] { read_pswc(bad); }) == Errc::IoError);
  spit(bad, good.substr(0, 6));
  CHECK(error_of([&] { read_pswc(bad); }) == Errc::IoError);
  spit(bad, good + "x");
  CHECK(error_of([&] { read_pswc(bad); }) == Errc::IoError);
  std::string magic = good;
  magic[0] = 'Q';
  spit(bad, magic);
  CHECK(error_of([&] { read_pswc(bad); }) == Errc::IoError);
  std::string version = good;
  version[4] = 9;
  spit(bad, version);
  CHECK(error_of([&] { read_pswc(bad); }) == Errc::IoError);
  CHECK(error_of([&] { read_pswc(tmp.file("missing.pswc")); }) == Errc::IoError);
}

TEST_CASE("CSV output") {
  TempDir tmp;
  CMat A(2, 3);
  A << cplx(1.0 / 3, -2.5e-17), cplx(0.1, 0.2), cplx(-7, 0), cplx(1e300, -4e-320), cplx(0, 0), cplx(kPi, kPi / 7);
  const std::string p = tmp.file("m.csv");
  write_matrix_csv(p, A);
  CHECK(read_matrix_csv(p) == A);

  write_csv(tmp.file("t.csv"), {"k", "value"}, {{"0", fmt_double(0.5)}, {"1", fmt_double(1.5)}});
  CHECK(slurp(tmp.file("t.csv")) == "k,value\n0,0.5\n1,1.5\n");

  for (double v : {0.1, 1.0 / 3, -2.0, 6.02214076e23, 5e-324}) {
    double back = 0.0;
    CHECK(parse_double(fmt_double(v), back));
    CHECK(back == v);
  }
  double x = 0.0;
  CHECK_FALSE(parse_double("1e999", x));
  CHECK_FALSE(parse_double("1.5x", x));
  CHECK_FALSE(parse_double("", x));
  CHECK_FALSE(parse_double(" 2", x));
  CHECK(fmt_double(0.5) == "0.5");

  spit(tmp.file("bad.csv"), "1,2,3\n");
  CHECK(error_of([&] { read_matrix_csv(tmp.file("bad.csv")); }) == Errc::IoError);
}
