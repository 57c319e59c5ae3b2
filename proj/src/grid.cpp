#include "fracgs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracgs/error.hpp"

namespace fracgs {

struct Grid::Data {
  int dim = 1;
  double half_width = 0.0;
  int points = 0;
  double spacing = 0.0;
  std::size_t size = 0;
  std::vector<double> nodes;
  std::vector<double> frequencies;
  std::vector<double> radius_sq;
  std::vector<double> freq_sq;
  std::size_t origin = 0;
};

Grid make_grid(int dim, double half_width, int points) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorCode::kInvalidDimension,
                "grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (points % 2 != 0) {
    throw Error(ErrorCode::kOddPoints, "points per axis must be even, got " + std::to_string(points));
  }
  const int cap = dim == 1 ? 4096 : 512;
  if (points < 8 || points > cap) {
    throw Error(ErrorCode::kSizeLimit, "points per axis must lie in [8, " + std::to_string(cap) +
                                           "], got " + std::to_string(points));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error(ErrorCode::kInvalidArgument, "half-width must be positive and finite");
  }

  auto data = std::make_shared<Grid::Data>();
  data->dim = dim;
  data->half_width = half_width;
  data->points = points;
  data->spacing = 2.0 * half_width / points;
  data->size = dim == 1 ? static_cast<std::size_t>(points)
                        : static_cast<std::size_t>(points) * static_cast<std::size_t>(points);

  data->nodes.resize(points);
  data->frequencies.resize(points);
  for (int j = 0; j < points; ++j) {
    data->nodes[j] = -half_width + j * data->spacing;
    const int k = j < points / 2 ? j : j - points;
    data->frequencies[j] = std::numbers::pi * k / half_width;
  }

  data->radius_sq.resize(data->size);
  data->freq_sq.resize(data->size);
  if (dim == 1) {
    for (int j = 0; j < points; ++j) {
      data->radius_sq[j] = data->nodes[j] * data->nodes[j];
      data->freq_sq[j] = data->frequencies[j] * data->frequencies[j];
    }
  } else {
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < points; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * points + j;
        data->radius_sq[idx] = data->nodes[i] * data->nodes[i] + data->nodes[j] * data->nodes[j];
        data->freq_sq[idx] =
            data->frequencies[i] * data->frequencies[i] + data->frequencies[j] * data->frequencies[j];
      }
    }
  }
  data->origin = static_cast<std::size_t>(
      std::min_element(data->radius_sq.begin(), data->radius_sq.end()) - data->radius_sq.begin());

  Grid grid;
  grid.data_ = std::move(data);
  return grid;
}

int Grid::dim() const { return data_->dim; }
double Grid::half_width() const { return data_->half_width; }
int Grid::points_per_axis() const { return data_->points; }
double Grid::spacing() const { return data_->spacing; }
std::size_t Grid::size() const { return data_ ? data_->size : 0; }
double Grid::weight() const { return data_->dim == 1 ? data_->spacing : data_->spacing * data_->spacing; }
std::span<const double> Grid::axis_nodes() const { return data_->nodes; }
std::span<const double> Grid::axis_frequencies() const { return data_->frequencies; }
std::span<const double> Grid::radius_squared() const { return data_->radius_sq; }
std::span<const double> Grid::frequency_squared() const { return data_->freq_sq; }
std::size_t Grid::origin_index() const { return data_->origin; }

bool operator==(const Grid& a, const Grid& b) {
  if (a.data_ == b.data_) return true;
  if (!a.data_ || !b.data_) return false;
  return a.data_->dim == b.data_->dim && a.data_->points == b.data_->points &&
         a.data_->half_width == b.data_->half_width;
}

Field::Field(Grid grid, FieldKind kind, std::vector<double> values)
    : grid_(std::move(grid)), kind_(kind), values_(std::move(values)) {}

Field Field::real(const Grid& grid, std::vector<double> values) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::kLengthMismatch, "real field needs " + std::to_string(grid.size()) +
                                                " values, got " + std::to_string(values.size()));
  }
  return Field(grid, FieldKind::kReal, std::move(values));
}

Field Field::complex(const Grid& grid, std::span<const std::complex<double>> values) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::kLengthMismatch, "complex field needs " + std::to_string(grid.size()) +
                                                " values, got " + std::to_string(values.size()));
  }
  std::vector<double> raw(2 * values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    raw[2 * i] = values[i].real();
    raw[2 * i + 1] = values[i].imag();
  }
  return Field(grid, FieldKind::kComplex, std::move(raw));
}

Field Field::zeros(const Grid& grid, FieldKind kind) {
  const std::size_t n = kind == FieldKind::kReal ? grid.size() : 2 * grid.size();
  return Field(grid, kind, std::vector<double>(n, 0.0));
}

std::span<const std::complex<double>> Field::complex_values() const {
  if (kind_ != FieldKind::kComplex) {
    throw Error(ErrorCode::kTypeMismatch, "complex view requested on a real field");
  }
  // std::complex<double> is layout-compatible with double[2].
  return {reinterpret_cast<const std::complex<double>*>(values_.data()), grid_.size()};
}

std::vector<std::complex<double>> Field::to_complex() const {
  if (kind_ == FieldKind::kComplex) {
    auto view = complex_values();
    return {view.begin(), view.end()};
  }
  return {values_.begin(), values_.end()};
}

double boundary_ratio(const Field& f) {
  const Grid& g = f.grid();
  const int m = g.points_per_axis();
  auto magnitude = [&](std::size_t idx) {
    if (f.is_real()) return std::abs(f.values()[idx]);
    return std::abs(f.complex_values()[idx]);
  };
  double overall = 0.0;
  double outer = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double v = magnitude(idx);
    overall = std::max(overall, v);
    bool on_edge = false;
    if (g.dim() == 1) {
      on_edge = idx == 0 || idx + 1 == static_cast<std::size_t>(m);
    } else {
      const std::size_t i = idx / m;
      const std::size_t j = idx % m;
      on_edge = i == 0 || j == 0 || i + 1 == static_cast<std::size_t>(m) ||
                j + 1 == static_cast<std::size_t>(m);
    }
    if (on_edge) outer = std::max(outer, v);
  }
  return overall > 0.0 ? outer / overall : 0.0;
}

bool boundary_small(const Field& f, double threshold) { return boundary_ratio(f) <= threshold; }

}  // namespace fracgs
