#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trace.hpp"

namespace smca {

struct CorrParams {
  std::size_t min_samples = 100;
  double var_epsilon = 1e-12;
};

struct PearsonResult {
  std::optional<double> r;
  std::size_t n = 0;  // pairwise-complete samples
};

// Two-pass Pearson coefficient over the indices where both series are
// present. Missing when fewer than min_samples pairs remain or either
// restricted series has (near) zero variance. Throws UsageError on length
// mismatch.
PearsonResult pearson(std::span<const double> a, std::span<const std::uint8_t> mask_a,
                      std::span<const double> b, std::span<const std::uint8_t> mask_b,
                      const CorrParams& params = {});

inline PearsonResult pearson(const Channel& a, const Channel& b, const CorrParams& params = {}) {
  return pearson(a.values, a.present, b.values, b.present, params);
}

enum class PanelTag { A, B, C, D };

char panel_letter(PanelTag tag);
PanelTag panel_from_letter(char letter);  // throws DataError(unknown_panel)

class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  CorrelationMatrix(PanelTag tag, std::vector<std::string> rows, std::vector<std::string> cols);

  PanelTag tag() const { return tag_; }
  const std::vector<std::string>& row_labels() const { return rows_; }
  const std::vector<std::string>& col_labels() const { return cols_; }
  std::size_t n_rows() const { return rows_.size(); }
  std::size_t n_cols() const { return cols_.size(); }

  const std::optional<double>& value(std::size_t r, std::size_t c) const { return values_[r * cols_.size() + c]; }
  std::size_t n_effective(std::size_t r, std::size_t c) const { return counts_[r * cols_.size() + c]; }
  void set(std::size_t r, std::size_t c, std::optional<double> v, std::size_t n);

  std::optional<std::size_t> row_index(const std::string& label) const;
  std::optional<std::size_t> col_index(const std::string& label) const;
  // Missing when either label is absent or the cell is undefined.
  std::optional<double> at(const std::string& row, const std::string& col) const;

  friend bool operator==(const CorrelationMatrix&, const CorrelationMatrix&) = default;

 private:
  PanelTag tag_ = PanelTag::A;
  std::vector<std::string> rows_, cols_;
  std::vector<std::optional<double>> values_;
  std::vector<std::size_t> counts_;
};

// Symmetric panel over arbitrary labeled channels; diagonal is 1 wherever
// the channel has enough non-degenerate samples.
CorrelationMatrix correlate_square(PanelTag tag, const std::vector<std::string>& labels,
                                   const std::vector<const Channel*>& channels, const CorrParams& params);
CorrelationMatrix correlate_cross(PanelTag tag, const std::vector<std::string>& row_labels,
                                  const std::vector<const Channel*>& rows, const std::vector<std::string>& col_labels,
                                  const std::vector<const Channel*>& cols, const CorrParams& params);

std::vector<std::string> panel_row_labels(PanelTag tag);
std::vector<std::string> panel_col_labels(PanelTag tag);

// A: positions, B: velocities, C: motors x velocities, D: movement angles.
CorrelationMatrix build_panel(const DerivedChannels& derived, const TraceLog& log, PanelTag tag,
                              const CorrParams& params = {});

struct PanelSet {
  CorrelationMatrix a, b, c, d;
  const CorrelationMatrix& get(PanelTag tag) const;
};

PanelSet build_panels(const DerivedChannels& derived, const TraceLog& log, const CorrParams& params = {});

std::string panel_file_name(PanelTag tag);    // panel_A.csv
std::string panel_count_file_name(PanelTag tag);  // panel_A_n.csv
std::string serialize_panel_values(const CorrelationMatrix& m);
std::string serialize_panel_counts(const CorrelationMatrix& m);
CorrelationMatrix parse_panel(PanelTag tag, const std::string& values_csv, const std::string& counts_csv);

void write_panel(const CorrelationMatrix& m, const std::string& dir);
CorrelationMatrix read_panel(PanelTag tag, const std::string& dir);

}  // namespace smca
