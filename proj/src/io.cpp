#include "bopp/io.hpp"

#include <bit>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bopp {

namespace {

constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) { put_le(buf, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) fail(Errc::IoError, "truncated PSWC file");
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 4;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_pswc(const std::string& path, const ArrayRecord& rec) {
  std::uint64_t count = 1;
  for (auto d : rec.dims) count *= d;
  if (count != rec.data.size()) fail(Errc::DimensionMismatch, "PSWC dims do not match the data length");
  if (rec.extent.size() != rec.dims.size()) fail(Errc::DimensionMismatch, "PSWC extent needs one entry per axis");
  std::string buf = "PSWC";
  put_le<std::uint16_t>(buf, kVersion);
  put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(rec.dims.size()));
  for (auto d : rec.dims) put_le<std::uint64_t>(buf, d);
  for (double e : rec.extent) put_f64(buf, e);
  for (const cplx& v : rec.data) {
    put_f64(buf, v.real());
    put_f64(buf, v.imag());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(Errc::IoError, "write failed for " + path);
}

ArrayRecord read_pswc(const std::string& path) {
  std::string raw = slurp(path);
  if (raw.size() < 8 || raw.compare(0, 4, "PSWC") != 0) fail(Errc::IoError, path + " is not a PSWC file");
  Reader r(std::move(raw));
  if (r.get<std::uint16_t>() != kVersion) fail(Errc::IoError, "unsupported PSWC version");
  const int rank = r.get<std::uint16_t>();
  ArrayRecord rec;
  std::uint64_t count = 1;
  for (int i = 0; i < rank; ++i) {
    rec.dims.push_back(r.get<std::uint64_t>());
    count *= rec.dims.back();
  }
  for (int i = 0; i < rank; ++i) rec.extent.push_back(r.f64());
  rec.data.resize(count);
  for (auto& v : rec.data) {
    const double re = r.f64();
    v = cplx(re, r.f64());
  }
  if (!r.done()) fail(Errc::IoError, "trailing bytes in PSWC file");
  return rec;
}

ArrayRecord to_record(const SampledField& U) {
  ArrayRecord rec;
  rec.dims.assign(U.grid.dim, static_cast<std::uint64_t>(U.grid.points));
  rec.extent = U.grid.halfwidth;
  rec.data = U.values;
  return rec;
}

ArrayRecord to_record(const CMat& A) {
  ArrayRecord rec;
  rec.dims = {static_cast<std::uint64_t>(A.rows()), static_cast<std::uint64_t>(A.cols())};
  rec.extent = {0.0, 0.0};
  rec.data.resize(A.size());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) rec.data[i * A.cols() + j] = A(i, j);
  return rec;
}

SampledField field_from_record(const ArrayRecord& rec) {
  if (rec.dims.empty()) fail(Errc::InvalidArgument, "record has rank 0");
  for (std::size_t a = 0; a < rec.dims.size(); ++a)
    if (rec.dims[a] != rec.dims[0] || !(rec.extent[a] > 0.0))
      fail(Errc::InvalidArgument, "record is not a sampled field on a square grid");
  const GridSpec g = GridSpec::make(static_cast<int>(rec.dims[0]), rec.extent);
  SampledField U(g);
  U.values = rec.data;
  return U;
}

CMat matrix_from_record(const ArrayRecord& rec) {
  if (rec.dims.size() != 2) fail(Errc::InvalidArgument, "matrix record must have rank 2");
  CMat A(rec.dims[0], rec.dims[1]);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = rec.data[i * A.cols() + j];
  return A;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  if (!header.empty()) line(header);
  for (const auto& r : rows) line(r);
}

void write_matrix_csv(const std::string& path, const CMat& A) {
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    std::vector<std::string> r;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      r.push_back(fmt_double(A(i, j).real()));
      r.push_back(fmt_double(A(i, j).imag()));
    }
    rows.push_back(std::move(r));
  }
  write_csv(path, {}, rows);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty() || std::isspace(static_cast<unsigned char>(s.front()))) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  return !(errno == ERANGE && std::isinf(out));
}

CMat read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  std::vector<std::vector<double>> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      if (!parse_double(cell, v)) fail(Errc::IoError, "bad number '" + cell + "' in " + path);
      r.push_back(v);
    }
    if (r.size() % 2 || (!vals.empty() && r.size() != vals[0].size()))
      fail(Errc::IoError, "ragged matrix CSV " + path);
    vals.push_back(std::move(r));
  }
  if (vals.empty()) return CMat();
  CMat A(vals.size(), vals[0].size() / 2);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = cplx(vals[i][2 * j], vals[i][2 * j + 1]);
  return A;
}

}  // namespace bopp
