#include "contlim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "contlim/config.hpp"
#include "contlim/errors.hpp"

namespace contlim {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {}

CsvWriter::~CsvWriter() { flush_on_close(); }

void CsvWriter::flush_on_close() {
  std::ofstream out(path_, std::ios::binary);
  if (!out) return;
  out << buf_;
}

void CsvWriter::header(std::initializer_list<const char*> columns) {
  bool first = true;
  for (const char* c : columns) {
    if (!first) buf_ += ',';
    buf_ += c;
    first = false;
  }
  buf_ += '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) buf_ += ',';
    buf_ += format_double(v);
    first = false;
  }
  buf_ += '\n';
}

void CsvWriter::raw_line(const std::string& line) {
  buf_ += line;
  buf_ += '\n';
}

void write_field_csv(const std::string& path, const Field& f) {
  CsvWriter w(path);
  w.header({"cell_left", "cell_right", "coeff0", "coeff1"});
  for (std::size_t i = 0; i < f.cells(); ++i) {
    w.row({f.edge(i), f.edge(i + 1), f.value0(i), f.slope(i)});
  }
}

void append_snapshot_rows(CsvWriter& w, const LatticeState& s) {
  for (int i = 0; i < s.n; ++i) {
    w.row({s.t, static_cast<double>(i), s.disp[static_cast<std::size_t>(i)],
           s.vel[static_cast<std::size_t>(i)]});
  }
}

void write_checkpoint(const std::string& path, const LatticeState& s) {
  std::string line = format_double(s.t);
  line += ',';
  line += std::to_string(s.n);
  line += ',';
  line += format_double(s.rho);
  for (double d : s.disp) {
    line += ',';
    line += format_double(d);
  }
  for (double v : s.vel) {
    line += ',';
    line += format_double(v);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << line << '\n';
}

LatticeState read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string line;
  std::getline(in, line);
  std::istringstream iss(line);
  std::string tok;
  std::vector<double> vals;
  while (std::getline(iss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.size() < 3) throw std::runtime_error("malformed checkpoint");
  const int n = static_cast<int>(vals[1]);
  if (static_cast<int>(vals.size()) != 3 + 2 * n) {
    throw std::runtime_error("checkpoint length mismatch");
  }
  LatticeState s = make_rest_lattice(n, vals[2]);
  s.t = vals[0];
  for (int i = 0; i < n; ++i) {
    s.disp[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(3 + i)];
    s.vel[static_cast<std::size_t>(i)] =
        vals[static_cast<std::size_t>(3 + n + i)];
  }
  return s;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a(buf.str());
}

}  // namespace contlim
