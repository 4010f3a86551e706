#include "lqg/path_csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

namespace lqg {

std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok, int line_no, const char* what) {
  double x = 0.0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto res = std::from_chars(b, e, x);
  if (res.ec != std::errc{} || res.ptr != e) {
    throw ParseError("row " + std::to_string(line_no) + ": bad " + std::string(what) + " '" +
                     tok + "'");
  }
  return x;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_path_csv(const CadlagPath& path, std::ostream& out) {
  out << "# lqg-lab path v1\n";
  out << format_double(path.t0) << ',' << format_double(path.dt) << ','
      << format_double(path.alpha) << ',' << path.values.size();
  if (path.terminal) out << ',' << format_double(*path.terminal);
  out << '\n';
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    out << i << ',' << format_double(path.values[i]) << '\n';
  }
  out << "--- jumps\n";
  for (const auto& j : path.jumps) {
    out << format_double(j.time) << ',' << format_double(j.size) << '\n';
  }
}

CadlagPath read_path_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&](const char* ctx) {
    if (!std::getline(in, line)) {
      throw ParseError("row " + std::to_string(line_no + 1) + ": truncated file (expected " +
                       std::string(ctx) + ")");
    }
    ++line_no;
  };

  next_line("magic header");
  if (line.rfind("# lqg-lab path v1", 0) != 0) {
    throw ParseError("row 1: malformed header (expected '# lqg-lab path v1')");
  }
  next_line("t0,dt,alpha,len header");
  auto head = split_csv(line);
  if (head.size() != 4 && head.size() != 5) {
    throw ParseError("row 2: malformed header (expected t0,dt,alpha,len[,terminal])");
  }
  CadlagPath p;
  p.t0 = parse_double(head[0], 2, "t0");
  p.dt = parse_double(head[1], 2, "dt");
  p.alpha = parse_double(head[2], 2, "alpha");
  const double len_d = parse_double(head[3], 2, "len");
  if (!(len_d >= 0) || len_d != std::floor(len_d)) throw ParseError("row 2: bad len");
  const auto len = static_cast<std::size_t>(len_d);
  if (head.size() == 5) p.terminal = parse_double(head[4], 2, "terminal");
  if (!(p.dt > 0)) throw ParseError("row 2: dt must be positive");

  p.values.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    next_line("sample row");
    auto cols = split_csv(line);
    if (cols.size() != 2) throw ParseError("row " + std::to_string(line_no) + ": expected i,value");
    const double idx = parse_double(cols[0], line_no, "index");
    if (idx != static_cast<double>(i)) {
      throw ParseError("row " + std::to_string(line_no) + ": sample index out of order");
    }
    p.values[i] = parse_double(cols[1], line_no, "value");
  }
  next_line("'--- jumps' separator");
  if (line.rfind("--- jumps", 0) != 0) {
    throw ParseError("row " + std::to_string(line_no) + ": expected '--- jumps'");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cols = split_csv(line);
    if (cols.size() != 2) throw ParseError("row " + std::to_string(line_no) + ": expected time,size");
    Jump j;
    j.time = parse_double(cols[0], line_no, "jump time");
    j.size = parse_double(cols[1], line_no, "jump size");
    if (!p.jumps.empty() && !(p.jumps.back().time < j.time)) {
      throw ParseError("row " + std::to_string(line_no) + ": non-monotone jump times");
    }
    p.jumps.push_back(j);
  }
  return p;
}

void write_path_csv_file(const CadlagPath& path, const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open for writing: " + filename);
  write_path_csv(path, out);
}

CadlagPath read_path_csv_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open for reading: " + filename);
  return read_path_csv(in);
}

}  // namespace lqg
