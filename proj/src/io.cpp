#include "detplace/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace detplace {

ParseError::ParseError(int line, int column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) +
                         (column > 0 ? ", column " + std::to_string(column) : std::string()) +
                         ": " + what),
      line_(line),
      column_(column) {}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

struct Token {
  std::string text;
  int column = 0;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line with trailing CR stripped; throws at end of input.
  std::string next(const char* expecting) {
    std::string line;
    if (!std::getline(in_, line))
      throw ParseError(number_ + 1, 0, std::string("unexpected end of file, expected ") + expecting);
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  bool next_nonempty(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  int number() const { return number_; }

 private:
  std::istream& in_;
  int number_ = 0;
};

double parse_double(const Token& tok, int line) {
  double value = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(line, tok.column, "expected a number, got '" + tok.text + "'");
  return value;
}

long parse_int(const Token& tok, int line) {
  long value = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(line, tok.column, "expected an integer, got '" + tok.text + "'");
  return value;
}

// Reads "key value key value ..." in the fixed key order given.
std::vector<Token> keyed_values(const std::string& text, int line,
                                std::initializer_list<const char*> keys) {
  const auto toks = tokenize(text);
  if (toks.size() != 2 * keys.size())
    throw ParseError(line, 0, "expected " + std::to_string(2 * keys.size()) + " fields, got " +
                                  std::to_string(toks.size()));
  std::vector<Token> values;
  std::size_t k = 0;
  for (const char* key : keys) {
    if (toks[2 * k].text != key)
      throw ParseError(line, toks[2 * k].column,
                       std::string("expected '") + key + "', got '" + toks[2 * k].text + "'");
    values.push_back(toks[2 * k + 1]);
    ++k;
  }
  return values;
}

}  // namespace

Instance read_instance(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next_nonempty(line)) throw ParseError(1, 0, "empty file");
  {
    const auto toks = tokenize(line);
    if (toks.size() != 2 || toks[0].text != "DETPLACE")
      throw ParseError(reader.number(), 1, "missing 'DETPLACE <version>' header");
    if (toks[1].text != "1")
      throw ParseError(reader.number(), toks[1].column, "unsupported version '" + toks[1].text + "'");
  }

  line = reader.next("dimensions line");
  auto dims = keyed_values(line, reader.number(), {"rows", "cols", "cell_size"});
  const long rows = parse_int(dims[0], reader.number());
  const long cols = parse_int(dims[1], reader.number());
  const double cell_size = parse_double(dims[2], reader.number());
  if (rows < 1 || cols < 1 || rows > 100000 || cols > 100000)
    throw ParseError(reader.number(), dims[0].column, "map dimensions out of range");
  if (!(cell_size > 0.0)) throw ParseError(reader.number(), dims[2].column, "cell_size must be positive");

  line = reader.next("parameter line");
  auto params = keyed_values(line, reader.number(), {"tau", "eta", "theta", "v", "tn", "delta"});
  Instance inst;
  inst.map = GridMap(static_cast<int>(rows), static_cast<int>(cols), cell_size);
  inst.physics.detection_radius = parse_double(params[0], reader.number());
  inst.physics.detection_rate = parse_double(params[1], reader.number());
  inst.physics.neutralization_prob = parse_double(params[2], reader.number());
  inst.physics.attacker_speed = parse_double(params[3], reader.number());
  inst.physics.neutralization_time = parse_double(params[4], reader.number());
  inst.detectors = static_cast<int>(parse_int(params[5], reader.number()));

  std::vector<CellIndex> objective_cells;
  for (int r = 0; r < rows; ++r) {
    line = reader.next("map row");
    if (static_cast<long>(line.size()) != cols)
      throw ParseError(reader.number(), 0,
                       "map row has " + std::to_string(line.size()) + " glyphs, expected " +
                           std::to_string(cols));
    for (int c = 0; c < cols; ++c) {
      const CellIndex cell{r, c};
      switch (line[c]) {
        case '#': inst.map.set_blocked(cell, true); break;
        case '.': break;
        case 'E': inst.entrances.push_back(cell); break;
        case 'O': objective_cells.push_back(cell); break;
        default:
          throw ParseError(reader.number(), c + 1, std::string("unknown glyph '") + line[c] + "'");
      }
    }
  }

  line = reader.next("OBJECTIVES");
  if (tokenize(line).size() != 1 || tokenize(line)[0].text != "OBJECTIVES")
    throw ParseError(reader.number(), 1, "expected 'OBJECTIVES'");

  for (const CellIndex& expected : objective_cells) {
    line = reader.next("objective row");
    const auto toks = tokenize(line);
    if (toks.size() != 3)
      throw ParseError(reader.number(), 0, "objective row must be 'r c value'");
    const CellIndex cell{static_cast<int>(parse_int(toks[0], reader.number())),
                         static_cast<int>(parse_int(toks[1], reader.number()))};
    if (cell != expected)
      throw ParseError(reader.number(), toks[0].column,
                       "objective rows must follow the 'O' glyphs in row-major order");
    inst.objectives.push_back({cell, parse_double(toks[2], reader.number())});
  }
  if (reader.next_nonempty(line))
    throw ParseError(reader.number(), 1,
                     "more objective rows than 'O' glyphs (" + std::to_string(objective_cells.size()) + ")");
  return inst;
}

void write_instance(std::ostream& out, const Instance& source) {
  Instance inst = source;
  canonicalize(inst);
  const GridMap& map = inst.map;
  const Physics& ph = inst.physics;
  out << "DETPLACE 1\n";
  out << "rows " << map.rows() << " cols " << map.cols() << " cell_size "
      << format_double(map.cell_size()) << '\n';
  out << "tau " << format_double(ph.detection_radius) << " eta " << format_double(ph.detection_rate)
      << " theta " << format_double(ph.neutralization_prob) << " v "
      << format_double(ph.attacker_speed) << " tn " << format_double(ph.neutralization_time)
      << " delta " << inst.detectors << '\n';

  std::vector<char> glyph(map.cell_count(), '.');
  for (int i = 0; i < map.cell_count(); ++i)
    if (map.blocked(map.unflat(i))) glyph[i] = '#';
  for (const auto& e : inst.entrances) glyph[map.flat(e)] = 'E';
  for (const auto& o : inst.objectives) glyph[map.flat(o.cell)] = 'O';
  for (int r = 0; r < map.rows(); ++r) {
    out.write(glyph.data() + static_cast<std::size_t>(r) * map.cols(), map.cols());
    out << '\n';
  }
  out << "OBJECTIVES\n";
  for (const auto& o : inst.objectives)
    out << o.cell.row << ' ' << o.cell.col << ' ' << format_double(o.value) << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file " + path.string());
  return read_instance(in);
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write instance file " + path.string());
  write_instance(out, inst);
  if (!out) throw IoError("write failed for " + path.string());
}

Placement read_placement(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next_nonempty(line)) throw ParseError(1, 0, "empty placement file");
  const auto head = tokenize(line);
  if (head.size() != 2 || head[0].text != "PLACEMENT")
    throw ParseError(reader.number(), 1, "missing 'PLACEMENT <count>' header");
  const long count = parse_int(head[1], reader.number());
  if (count < 0) throw ParseError(reader.number(), head[1].column, "negative detector count");
  Placement p;
  for (long k = 0; k < count; ++k) {
    line = reader.next("placement row");
    const auto toks = tokenize(line);
    if (toks.size() != 2) throw ParseError(reader.number(), 0, "placement row must be 'r c'");
    p.cells.push_back({static_cast<int>(parse_int(toks[0], reader.number())),
                       static_cast<int>(parse_int(toks[1], reader.number()))});
  }
  if (reader.next_nonempty(line)) throw ParseError(reader.number(), 1, "trailing data after placement");
  std::sort(p.cells.begin(), p.cells.end());
  if (std::adjacent_find(p.cells.begin(), p.cells.end()) != p.cells.end())
    throw ParseError(reader.number(), 0, "placement repeats a cell");
  return p;
}

void write_placement(std::ostream& out, const Placement& placement) {
  std::vector<CellIndex> cells = placement.cells;
  std::sort(cells.begin(), cells.end());
  out << "PLACEMENT " << cells.size() << '\n';
  for (const auto& c : cells) out << c.row << ' ' << c.col << '\n';
}

Placement load_placement(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open placement file " + path.string());
  return read_placement(in);
}

void save_placement(const Placement& placement, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write placement file " + path.string());
  write_placement(out, placement);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detplace
