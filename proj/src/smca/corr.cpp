#include "corr.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include "error.hpp"
#include "numfmt.hpp"

namespace smca {

PearsonResult pearson(std::span<const double> a, std::span<const std::uint8_t> mask_a,
                      std::span<const double> b, std::span<const std::uint8_t> mask_b,
                      const CorrParams& params) {
  if (a.size() != b.size() || mask_a.size() != a.size() || mask_b.size() != b.size()) {
    throw UsageError("pearson: series lengths differ");
  }
  const std::size_t len = a.size();
  std::size_t n = 0;
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (mask_a[i] && mask_b[i]) {
      ++n;
      sum_a += a[i];
      sum_b += b[i];
    }
  }
  PearsonResult out;
  out.n = n;
  if (n == 0 || n < params.min_samples) return out;

  const double mean_a = sum_a / static_cast<double>(n);
  const double mean_b = sum_b / static_cast<double>(n);
  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (mask_a[i] && mask_b[i]) {
      const double da = a[i] - mean_a;
      const double db = b[i] - mean_b;
      saa += da * da;
      sbb += db * db;
      sab += da * db;
    }
  }
  const double nn = static_cast<double>(n);
  if (saa / nn <= params.var_epsilon || sbb / nn <= params.var_epsilon) return out;
  out.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  return out;
}

char panel_letter(PanelTag tag) { return "ABCD"[static_cast<int>(tag)]; }

PanelTag panel_from_letter(char letter) {
  switch (letter) {
    case 'A': return PanelTag::A;
    case 'B': return PanelTag::B;
    case 'C': return PanelTag::C;
    case 'D': return PanelTag::D;
    default: break;
  }
  throw DataError(DataErrorKind::unknown_panel, std::string("unknown panel tag '") + letter + "'");
}

CorrelationMatrix::CorrelationMatrix(PanelTag tag, std::vector<std::string> rows, std::vector<std::string> cols)
    : tag_(tag),
      rows_(std::move(rows)),
      cols_(std::move(cols)),
      values_(rows_.size() * cols_.size()),
      counts_(rows_.size() * cols_.size(), 0) {}

void CorrelationMatrix::set(std::size_t r, std::size_t c, std::optional<double> v, std::size_t n) {
  values_[r * cols_.size() + c] = v;
  counts_[r * cols_.size() + c] = n;
}

std::optional<std::size_t> CorrelationMatrix::row_index(const std::string& label) const {
  auto it = std::find(rows_.begin(), rows_.end(), label);
  if (it == rows_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - rows_.begin());
}

std::optional<std::size_t> CorrelationMatrix::col_index(const std::string& label) const {
  auto it = std::find(cols_.begin(), cols_.end(), label);
  if (it == cols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cols_.begin());
}

std::optional<double> CorrelationMatrix::at(const std::string& row, const std::string& col) const {
  auto r = row_index(row);
  auto c = col_index(col);
  if (!r || !c) return std::nullopt;
  return value(*r, *c);
}

CorrelationMatrix correlate_square(PanelTag tag, const std::vector<std::string>& labels,
                                   const std::vector<const Channel*>& channels, const CorrParams& params) {
  CorrelationMatrix m(tag, labels, labels);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    for (std::size_t j = i; j < channels.size(); ++j) {
      auto res = pearson(*channels[i], *channels[j], params);
      if (i == j && res.r) res.r = 1.0;
      m.set(i, j, res.r, res.n);
      m.set(j, i, res.r, res.n);
    }
  }
  return m;
}

CorrelationMatrix correlate_cross(PanelTag tag, const std::vector<std::string>& row_labels,
                                  const std::vector<const Channel*>& rows, const std::vector<std::string>& col_labels,
                                  const std::vector<const Channel*>& cols, const CorrParams& params) {
  CorrelationMatrix m(tag, row_labels, col_labels);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto res = pearson(*rows[i], *cols[j], params);
      m.set(i, j, res.r, res.n);
    }
  }
  return m;
}

namespace {

std::vector<std::string> indexed(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::vector<std::string> panel_row_labels(PanelTag tag) {
  switch (tag) {
    case PanelTag::A: return concat(indexed("x", kPointCount), indexed("y", kPointCount));
    case PanelTag::B: return concat(indexed("vx", kPointCount), indexed("vy", kPointCount));
    case PanelTag::C: return indexed("m", kMotorCount);
    case PanelTag::D: return indexed("b", kPointCount);
  }
  return {};
}

std::vector<std::string> panel_col_labels(PanelTag tag) {
  return tag == PanelTag::C ? panel_row_labels(PanelTag::B) : panel_row_labels(tag);
}

CorrelationMatrix build_panel(const DerivedChannels& derived, const TraceLog& log, PanelTag tag,
                              const CorrParams& params) {
  std::vector<const Channel*> velocity;
  for (const auto& c : derived.vx) velocity.push_back(&c);
  for (const auto& c : derived.vy) velocity.push_back(&c);

  switch (tag) {
    case PanelTag::A: {
      std::vector<Channel> pos;
      for (int i = 0; i < kPointCount; ++i) pos.push_back(position_channel(log, i, false));
      for (int i = 0; i < kPointCount; ++i) pos.push_back(position_channel(log, i, true));
      std::vector<const Channel*> ptrs;
      for (const auto& c : pos) ptrs.push_back(&c);
      return correlate_square(tag, panel_row_labels(tag), ptrs, params);
    }
    case PanelTag::B:
      return correlate_square(tag, panel_row_labels(tag), velocity, params);
    case PanelTag::C: {
      std::vector<Channel> motors;
      for (int j = 0; j < kMotorCount; ++j) motors.push_back(motor_channel(log, j));
      std::vector<const Channel*> ptrs;
      for (const auto& c : motors) ptrs.push_back(&c);
      return correlate_cross(tag, panel_row_labels(tag), ptrs, panel_col_labels(tag), velocity, params);
    }
    case PanelTag::D: {
      std::vector<const Channel*> ptrs;
      for (const auto& c : derived.angle) ptrs.push_back(&c);
      return correlate_square(tag, panel_row_labels(tag), ptrs, params);
    }
  }
  throw DataError(DataErrorKind::unknown_panel, "unknown panel tag");
}

const CorrelationMatrix& PanelSet::get(PanelTag tag) const {
  switch (tag) {
    case PanelTag::A: return a;
    case PanelTag::B: return b;
    case PanelTag::C: return c;
    case PanelTag::D: return d;
  }
  return a;
}

PanelSet build_panels(const DerivedChannels& derived, const TraceLog& log, const CorrParams& params) {
  return {build_panel(derived, log, PanelTag::A, params), build_panel(derived, log, PanelTag::B, params),
          build_panel(derived, log, PanelTag::C, params), build_panel(derived, log, PanelTag::D, params)};
}

std::string panel_file_name(PanelTag tag) { return std::string("panel_") + panel_letter(tag) + ".csv"; }
std::string panel_count_file_name(PanelTag tag) { return std::string("panel_") + panel_letter(tag) + "_n.csv"; }

namespace {

template <typename CellFn>
std::string serialize_grid(const CorrelationMatrix& m, CellFn&& cell) {
  std::string out;
  for (const auto& c : m.col_labels()) out += "," + c;
  out += '\n';
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    out += m.row_labels()[r];
    for (std::size_t c = 0; c < m.n_cols(); ++c) {
      out += ',';
      out += cell(r, c);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<std::string>> parse_grid(const std::string& text, const std::string& file) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      cells.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw DataError(DataErrorKind::parse, file + ": empty panel file");
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::io, "missing panel file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::io, "cannot write " + path);
  out << text;
  if (!out) throw DataError(DataErrorKind::io, "write failed for " + path);
}

}  // namespace

std::string serialize_panel_values(const CorrelationMatrix& m) {
  return serialize_grid(m, [&](std::size_t r, std::size_t c) {
    const auto& v = m.value(r, c);
    return v ? format_exact(*v) : std::string{};
  });
}

std::string serialize_panel_counts(const CorrelationMatrix& m) {
  return serialize_grid(m, [&](std::size_t r, std::size_t c) { return std::to_string(m.n_effective(r, c)); });
}

CorrelationMatrix parse_panel(PanelTag tag, const std::string& values_csv, const std::string& counts_csv) {
  const auto vfile = panel_file_name(tag);
  const auto nfile = panel_count_file_name(tag);
  const auto vgrid = parse_grid(values_csv, vfile);
  const auto ngrid = parse_grid(counts_csv, nfile);
  const auto rows = panel_row_labels(tag);
  const auto cols = panel_col_labels(tag);

  auto check_shape = [&](const std::vector<std::vector<std::string>>& g, const std::string& file) {
    if (g.size() != rows.size() + 1) {
      throw DataError(DataErrorKind::column_count, file + ": expected " + std::to_string(rows.size()) + " rows");
    }
    if (g[0].size() != cols.size() + 1 || !g[0][0].empty()) {
      throw DataError(DataErrorKind::header, file + ": unexpected label row");
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (g[0][c + 1] != cols[c]) throw DataError(DataErrorKind::header, file + ": unexpected column label " + g[0][c + 1]);
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (g[r + 1].size() != cols.size() + 1) {
        throw DataError(DataErrorKind::column_count, file + ": row " + rows[r] + " has wrong field count");
      }
      if (g[r + 1][0] != rows[r]) throw DataError(DataErrorKind::header, file + ": unexpected row label " + g[r + 1][0]);
    }
  };
  check_shape(vgrid, vfile);
  check_shape(ngrid, nfile);

  CorrelationMatrix m(tag, rows, cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& vs = vgrid[r + 1][c + 1];
      std::optional<double> v;
      if (!vs.empty()) {
        v = parse_double(vs);
        if (!v || *v < -1.0 || *v > 1.0) {
          throw DataError(DataErrorKind::parse, vfile + ": bad value at " + rows[r] + "," + cols[c]);
        }
      }
      const auto n = parse_int(ngrid[r + 1][c + 1]);
      if (!n || *n < 0) throw DataError(DataErrorKind::parse, nfile + ": bad count at " + rows[r] + "," + cols[c]);
      m.set(r, c, v, static_cast<std::size_t>(*n));
    }
  }
  return m;
}

void write_panel(const CorrelationMatrix& m, const std::string& dir) {
  const std::filesystem::path d(dir);
  write_file((d / panel_file_name(m.tag())).string(), serialize_panel_values(m));
  write_file((d / panel_count_file_name(m.tag())).string(), serialize_panel_counts(m));
}

CorrelationMatrix read_panel(PanelTag tag, const std::string& dir) {
  const std::filesystem::path d(dir);
  const auto values = read_file((d / panel_file_name(tag)).string());
  const auto counts = read_file((d / panel_count_file_name(tag)).string());
  return parse_panel(tag, values, counts);
}

}  // namespace smca
