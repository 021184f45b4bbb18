#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "contlim/fields.hpp"
#include "contlim/lattice.hpp"

namespace contlim {

// Deterministic CSV emission: every double is rendered with "%.17g", so
// identical runs produce byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void header(std::initializer_list<const char*> columns);
  void row(std::initializer_list<double> values);
  void raw_line(const std::string& line);

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string buf_;
  void flush_on_close();
  friend class CsvScope;

 public:
  ~CsvWriter();
};

std::string format_double(double v);

// Field dump: one row per cell, (cell_left, cell_right, coeff0, coeff1).
void write_field_csv(const std::string& path, const Field& f);

// Snapshot rows (t, i, disp, vel) appended for every particle.
void append_snapshot_rows(CsvWriter& w, const LatticeState& s);

// Compact whole-state record: single line `t,n,rho,disp...,vel...`.
void write_checkpoint(const std::string& path, const LatticeState& s);
LatticeState read_checkpoint(const std::string& path);

std::uint64_t fnv1a_file(const std::string& path);

}  // namespace contlim
