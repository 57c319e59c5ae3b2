#include "fracgs/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "fracgs/error.hpp"

namespace fracgs {
namespace {

// The FFTW planner is not reentrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FourierPlan {
 public:
  FourierPlan(int dim, int points) {
    const std::size_t n = dim == 1 ? points : static_cast<std::size_t>(points) * points;
    size_ = n;
    buffer_ = fftw_alloc_complex(n);
    std::lock_guard lock(planner_mutex());
    if (dim == 1) {
      forward_ = fftw_plan_dft_1d(points, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_1d(points, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      forward_ = fftw_plan_dft_2d(points, points, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_2d(points, points, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }
  ~FourierPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }
  FourierPlan(const FourierPlan&) = delete;
  FourierPlan& operator=(const FourierPlan&) = delete;

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buffer_); }
  std::size_t size() const { return size_; }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

 private:
  std::size_t size_ = 0;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// Scratch buffers are per thread.
FourierPlan& plan_for(const Grid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FourierPlan>> cache;
  const auto key = std::make_pair(grid.dim(), grid.points_per_axis());
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<FourierPlan>(grid.dim(), grid.points_per_axis())).first;
  }
  return *it->second;
}

void check_size(const Grid& grid, std::size_t n) {
  if (n != grid.size()) {
    throw Error(ErrorCode::kLengthMismatch, "sample count does not match the grid");
  }
}

}  // namespace

std::vector<double> fractional_symbol(const Grid& grid, double sigma) {
  auto xi2 = grid.frequency_squared();
  std::vector<double> symbol(xi2.size());
  for (std::size_t k = 0; k < xi2.size(); ++k) {
    symbol[k] = xi2[k] == 0.0 ? 0.0 : (sigma == 1.0 ? xi2[k] : std::pow(xi2[k], sigma));
  }
  return symbol;
}

void apply_symbol(const Grid& grid, std::span<const double> symbol, std::span<const double> in,
                  std::span<double> out) {
  check_size(grid, in.size());
  check_size(grid, out.size());
  FourierPlan& plan = plan_for(grid);
  std::complex<double>* buf = plan.data();
  const std::size_t n = plan.size();
  for (std::size_t i = 0; i < n; ++i) buf[i] = in[i];
  plan.forward();
  const double scale = 1.0 / static_cast<double>(n);
  double max_symbol = 0.0;
  double max_in = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    buf[k] *= symbol[k] * scale;
    max_symbol = std::max(max_symbol, std::abs(symbol[k]));
    max_in = std::max(max_in, std::abs(in[k]));
  }
  plan.backward();
  double max_im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = buf[i].real();
    max_im = std::max(max_im, std::abs(buf[i].imag()));
  }
  // Relative to the operator scale max|symbol| max|in|, which bounds the output.
  if (max_im > 1e-12 * max_symbol * max_in) {
    throw Error(ErrorCode::kTypeMismatch, "spectral multiplier produced a non-real result");
  }
}

void apply_symbol(const Grid& grid, std::span<const double> symbol,
                  std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  check_size(grid, in.size());
  check_size(grid, out.size());
  FourierPlan& plan = plan_for(grid);
  std::complex<double>* buf = plan.data();
  const std::size_t n = plan.size();
  std::copy(in.begin(), in.end(), buf);
  plan.forward();
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) buf[k] *= symbol[k] * scale;
  plan.backward();
  std::copy(buf, buf + n, out.begin());
}

void apply_symbol(const Grid& grid, std::span<const std::complex<double>> symbol,
                  std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  check_size(grid, in.size());
  check_size(grid, out.size());
  FourierPlan& plan = plan_for(grid);
  std::complex<double>* buf = plan.data();
  const std::size_t n = plan.size();
  std::copy(in.begin(), in.end(), buf);
  plan.forward();
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) buf[k] *= symbol[k] * scale;
  plan.backward();
  std::copy(buf, buf + n, out.begin());
}

double spectral_quadratic_form(const Grid& grid, std::span<const double> symbol,
                               std::span<const double> u) {
  check_size(grid, u.size());
  FourierPlan& plan = plan_for(grid);
  std::complex<double>* buf = plan.data();
  const std::size_t n = plan.size();
  for (std::size_t i = 0; i < n; ++i) buf[i] = u[i];
  plan.forward();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += symbol[k] * std::norm(buf[k]);
  return sum * grid.weight() / static_cast<double>(n);
}

double spectral_quadratic_form(const Grid& grid, std::span<const double> symbol,
                               std::span<const std::complex<double>> u) {
  check_size(grid, u.size());
  FourierPlan& plan = plan_for(grid);
  std::complex<double>* buf = plan.data();
  const std::size_t n = plan.size();
  std::copy(u.begin(), u.end(), buf);
  plan.forward();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += symbol[k] * std::norm(buf[k]);
  return sum * grid.weight() / static_cast<double>(n);
}

Field apply_fractional_power(const Field& f, double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fractional exponent must lie in (0, 1]");
  }
  const Grid& grid = f.grid();
  const auto symbol = fractional_symbol(grid, sigma);
  if (f.is_real()) {
    std::vector<double> out(grid.size());
    apply_symbol(grid, symbol, f.values(), out);
    return Field::real(grid, std::move(out));
  }
  std::vector<std::complex<double>> out(grid.size());
  apply_symbol(grid, symbol, f.complex_values(), out);
  return Field::complex(grid, out);
}

double inner(const Grid& grid, std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum * grid.weight();
}

double l2_norm(const Grid& grid, std::span<const double> a) { return std::sqrt(inner(grid, a, a)); }

double l2_norm(const Field& f) {
  // Interleaved storage makes the complex case the same sum.
  double sum = 0.0;
  for (double v : f.values()) sum += v * v;
  return std::sqrt(sum * f.grid().weight());
}

double spectral_l2_norm(const Field& f) {
  const Grid& grid = f.grid();
  const std::vector<double> ones(grid.size(), 1.0);
  if (f.is_real()) return std::sqrt(spectral_quadratic_form(grid, ones, f.values()));
  return std::sqrt(spectral_quadratic_form(grid, ones, f.complex_values()));
}

Observables observables(const Grid& grid, std::span<const double> symbol_s, double q,
                        std::span<const double> u) {
  check_size(grid, u.size());
  auto r2 = grid.radius_squared();
  Observables obs;
  double mass = 0.0;
  double potential = 0.0;
  double power = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v2 = u[i] * u[i];
    mass += v2;
    potential += r2[i] * v2;
    power += std::pow(std::abs(u[i]), q);
  }
  const double w = grid.weight();
  obs.mass = mass * w;
  obs.potential = potential * w;
  obs.power_q = power * w;
  obs.kinetic_s = spectral_quadratic_form(grid, symbol_s, u);
  return obs;
}

Observables observables(const Field& u, const ModelParams& params) {
  if (!u.is_real()) throw Error(ErrorCode::kTypeMismatch, "observables need a real field");
  return observables(u.grid(), fractional_symbol(u.grid(), params.s), params.q, u.values());
}

double spectral_tail_fraction(const Field& f) {
  const Grid& grid = f.grid();
  const int m = grid.points_per_axis();
  const double cutoff = 0.9 * (m / 2);
  auto freq_index = [m](std::size_t j) {
    const int k = static_cast<int>(j) < m / 2 ? static_cast<int>(j) : static_cast<int>(j) - m;
    return std::abs(k);
  };
  std::vector<double> tail_mask(grid.size(), 0.0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    int top = 0;
    if (grid.dim() == 1) {
      top = freq_index(idx);
    } else {
      top = std::max(freq_index(idx / m), freq_index(idx % m));
    }
    tail_mask[idx] = top >= cutoff ? 1.0 : 0.0;
  }
  const std::vector<double> ones(grid.size(), 1.0);
  double total = 0.0;
  double tail = 0.0;
  if (f.is_real()) {
    total = spectral_quadratic_form(grid, ones, f.values());
    tail = spectral_quadratic_form(grid, tail_mask, f.values());
  } else {
    total = spectral_quadratic_form(grid, ones, f.complex_values());
    tail = spectral_quadratic_form(grid, tail_mask, f.complex_values());
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace fracgs
