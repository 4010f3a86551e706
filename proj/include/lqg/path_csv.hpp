#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "lqg/path.hpp"

namespace lqg {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Path CSV format (`# lqg-lab path v1`):
//   # lqg-lab path v1
//   t0,dt,alpha,len[,terminal]
//   i,value            (len rows)
//   --- jumps
//   time,size          (one row per ledger jump)
// Floats are written as shortest round-trip decimals.
void write_path_csv(const CadlagPath& path, std::ostream& out);
CadlagPath read_path_csv(std::istream& in);

void write_path_csv_file(const CadlagPath& path, const std::string& filename);
CadlagPath read_path_csv_file(const std::string& filename);

// shortest decimal that round-trips to the same binary64
std::string format_double(double x);

}  // namespace lqg
