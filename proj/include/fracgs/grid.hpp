#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fracgs {

/// Uniform periodic collocation grid on [-L, L)^N with its DFT frequency table.
///
/// Nodes are x_j = -L + j h with h = 2L/M; frequencies are pi k / L in standard
/// DFT order (0, 1, ..., M/2-1, -M/2, ..., -1). Copies share the tables.
class Grid {
 public:
  Grid() = default;

  int dim() const;
  double half_width() const;
  int points_per_axis() const;
  double spacing() const;
  /// Total node count M^N.
  std::size_t size() const;
  /// Quadrature weight h^N of the rectangle rule.
  double weight() const;

  std::span<const double> axis_nodes() const;
  std::span<const double> axis_frequencies() const;
  /// |x|^2 at every node, row-major.
  std::span<const double> radius_squared() const;
  /// |xi|^2 at every spectral index, row-major, DFT order.
  std::span<const double> frequency_squared() const;
  /// Index of the node closest to the origin.
  std::size_t origin_index() const;

  bool valid() const { return data_ != nullptr; }

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  struct Data;
  std::shared_ptr<const Data> data_;

  friend Grid make_grid(int dim, double half_width, int points);
};

/// Throws Error with kInvalidDimension, kOddPoints, kSizeLimit or kInvalidArgument.
Grid make_grid(int dim, double half_width, int points);

enum class FieldKind { kReal, kComplex };

/// Grid-sampled values, immutable once built. Complex values are stored as
/// interleaved re/im pairs.
class Field {
 public:
  Field() = default;

  static Field real(const Grid& grid, std::vector<double> values);
  static Field complex(const Grid& grid, std::span<const std::complex<double>> values);
  static Field zeros(const Grid& grid, FieldKind kind = FieldKind::kReal);

  const Grid& grid() const { return grid_; }
  FieldKind kind() const { return kind_; }
  bool is_real() const { return kind_ == FieldKind::kReal; }
  /// Number of grid nodes (not the number of stored doubles).
  std::size_t size() const { return grid_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<const std::complex<double>> complex_values() const;
  std::vector<std::complex<double>> to_complex() const;

 private:
  Field(Grid grid, FieldKind kind, std::vector<double> values);

  Grid grid_;
  FieldKind kind_ = FieldKind::kReal;
  std::vector<double> values_;
};

/// max |value| over the outermost node layer divided by max |value| overall.
double boundary_ratio(const Field& f);

/// Truncation sanity for state candidates: boundary_ratio <= 1e-8.
bool boundary_small(const Field& f, double threshold = 1e-8);

}  // namespace fracgs
