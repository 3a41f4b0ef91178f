#pragma once
// PSWC binary arrays and CSV tables.
//
// PSWC layout, all little-endian: "PSWC", u16 version (1), u16 rank,
// u64 dims[rank], f64 extent[rank] (grid half-widths, 0 for plain arrays),
// then prod(dims) complex values as f64 (re, im) pairs, last index fastest.

#include <cstdint>
#include <string>
#include <vector>

#include "bopp/grid.hpp"

namespace bopp {

struct ArrayRecord {
  std::vector<std::uint64_t> dims;
  std::vector<double> extent;
  std::vector<cplx> data;
};

void write_pswc(const std::string& path, const ArrayRecord& rec);
ArrayRecord read_pswc(const std::string& path);

ArrayRecord to_record(const SampledField& U);
ArrayRecord to_record(const CMat& A);
SampledField field_from_record(const ArrayRecord& rec);
CMat matrix_from_record(const ArrayRecord& rec);

// Rows of already formatted cells; the header is written first when non-empty.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
// Complex matrix as "re,im" column pairs per entry.
void write_matrix_csv(const std::string& path, const CMat& A);
CMat read_matrix_csv(const std::string& path);

// %.17g, so doubles survive a text round trip.
std::string fmt_double(double v);
// Whole-string decimal parse; subnormal results are kept, overflow is rejected.
bool parse_double(const std::string& s, double& out);

}  // namespace bopp
