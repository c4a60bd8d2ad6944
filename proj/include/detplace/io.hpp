#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "detplace/instance.hpp"

namespace detplace {

/// Malformed map or placement text. Line and column are 1-based; column is 0
/// when the problem concerns a whole line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/*
 * Map file layout:
 *
 *   DETPLACE 1
 *   rows <m> cols <n> cell_size <s>
 *   tau <t> eta <e> theta <th> v <v> tn <tn> delta <d>
 *   <m lines of n glyphs: '#' blocked, '.' open, 'E' entrance, 'O' objective>
 *   OBJECTIVES
 *   <"r c value" per 'O' glyph, row-major>
 */
Instance read_instance(std::istream& in);
void write_instance(std::ostream& out, const Instance& inst);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

/// "PLACEMENT <k>" followed by k lines of "r c".
Placement read_placement(std::istream& in);
void write_placement(std::ostream& out, const Placement& placement);
Placement load_placement(const std::filesystem::path& path);
void save_placement(const Placement& placement, const std::filesystem::path& path);

}  // namespace detplace
