#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracgs/error.hpp"
#include "fracgs/grid.hpp"
#include "fracgs/spectral.hpp"

using namespace fracgs;

namespace {

std::vector<double> gaussian(const Grid& g, double width = 1.0) {
  std::vector<double> v(g.size());
  const auto r2 = g.radius_squared();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-r2[i] / (2.0 * width * width));
  return v;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kUsage;
}

}  // namespace

TEST_CASE("grid construction rejects bad shapes") {
  CHECK(code_of([] { make_grid(3, 10.0, 64); }) == ErrorCode::kInvalidDimension);
  CHECK(code_of([] { make_grid(1, 10.0, 65); }) == ErrorCode::kOddPoints);
  CHECK(code_of([] { make_grid(1, 10.0, 8192); }) == ErrorCode::kSizeLimit);
  CHECK(code_of([] { make_grid(2, 10.0, 1024); }) == ErrorCode::kSizeLimit);
  CHECK(code_of([] { make_grid(1, -1.0, 64); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("grid nodes and frequencies") {
  const Grid g = make_grid(1, 5.0, 16);
  CHECK(g.spacing() == doctest::Approx(10.0 / 16));
  CHECK(g.axis_nodes()[0] == -5.0);
  CHECK(g.axis_nodes()[g.origin_index()] == 0.0);
  const auto k = g.axis_frequencies();
  CHECK(k[0] == 0.0);
  CHECK(k[1] == doctest::Approx(std::numbers::pi / 5.0));
  CHECK(k[8] == doctest::Approx(-8.0 * std::numbers::pi / 5.0));
  CHECK(k[15] == doctest::Approx(-std::numbers::pi / 5.0));

  const Grid g2 = make_grid(2, 5.0, 16);
  CHECK(g2.size() == 256);
  CHECK(g2.weight() == doctest::Approx(g.spacing() * g.spacing()));
  // Row-major with i along the first axis.
  const auto x = g2.axis_nodes();
  CHECK(g2.radius_squared()[3 * 16 + 5] == doctest::Approx(x[3] * x[3] + x[5] * x[5]));
}

TEST_CASE("half Laplacian of a Gaussian at the origin") {
  // On the periodic box the value is the lattice sum (1/2L) sum_k |xi_k| sqrt(2 pi) e^{-xi_k^2/2};
  // the continuum value sqrt(2/pi) is reached as (pi/L)^2 -> 0.
  const double L = 20.0;
  const Grid g = make_grid(1, L, 1024);
  const auto f = gaussian(g);
  std::vector<double> out(g.size());
  apply_symbol(g, fractional_symbol(g, 0.5), f, out);
  double lattice = 0.0;
  for (int k = -2000; k <= 2000; ++k) {
    const double xi = std::numbers::pi * k / L;
    lattice += std::abs(xi) * std::sqrt(2.0 * std::numbers::pi) * std::exp(-xi * xi / 2.0);
  }
  lattice /= 2.0 * L;
  CHECK(out[g.origin_index()] == doctest::Approx(lattice).epsilon(1e-12));

  const Grid wide = make_grid(1, 200.0, 4096);
  const auto fw = gaussian(wide);
  std::vector<double> ow(wide.size());
  apply_symbol(wide, fractional_symbol(wide, 0.5), fw, ow);
  CHECK(ow[wide.origin_index()] == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-4));
}

TEST_CASE("s = 1 reproduces -f'' pointwise in 1D and 2D") {
  const Grid g = make_grid(1, 12.0, 256);
  const auto f = gaussian(g);
  std::vector<double> out(g.size());
  apply_symbol(g, fractional_symbol(g, 1.0), f, out);
  const auto r2 = g.radius_squared();
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(out[i] - (1.0 - r2[i]) * f[i]));
  CHECK(err < 1e-12);

  const Grid g2 = make_grid(2, 10.0, 128);
  const auto f2 = gaussian(g2);
  std::vector<double> out2(g2.size());
  apply_symbol(g2, fractional_symbol(g2, 1.0), f2, out2);
  const auto q2 = g2.radius_squared();
  double err2 = 0.0;
  for (std::size_t i = 0; i < f2.size(); ++i) err2 = std::max(err2, std::abs(out2[i] - (2.0 - q2[i]) * f2[i]));
  CHECK(err2 < 1e-11);
}

TEST_CASE("symbol vanishes at zero frequency") {
  const Grid g = make_grid(2, 4.0, 16);
  for (double s : {0.25, 0.5, 1.0}) {
    const auto sym = fractional_symbol(g, s);
    CHECK(sym[0] == 0.0);
    CHECK(sym[1] == doctest::Approx(std::pow(std::numbers::pi / 4.0, 2.0 * s)));
  }
}

TEST_CASE("Parseval, composition and self-adjointness") {
  const Grid g = make_grid(1, 8.0, 128);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  std::vector<double> a(g.size()), b(g.size());
  for (auto& v : a) v = n(rng);
  for (auto& v : b) v = n(rng);
  const Field fa = Field::real(g, a);
  CHECK(spectral_l2_norm(fa) == doctest::Approx(l2_norm(fa)).epsilon(1e-13));

  const Field quarter = apply_fractional_power(apply_fractional_power(fa, 0.25), 0.25);
  const Field half = apply_fractional_power(fa, 0.5);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(quarter.values()[i] - half.values()[i]));
    scale = std::max(scale, std::abs(half.values()[i]));
  }
  CHECK(diff <= 1e-12 * scale);

  const auto sym = fractional_symbol(g, 0.7);
  std::vector<double> aa(g.size()), bb(g.size());
  apply_symbol(g, sym, a, aa);
  apply_symbol(g, sym, b, bb);
  CHECK(inner(g, aa, b) == doctest::Approx(inner(g, a, bb)).epsilon(1e-12));
  CHECK(spectral_quadratic_form(g, sym, a) == doctest::Approx(inner(g, a, aa)).epsilon(1e-12));
}

TEST_CASE("complex multiplier path matches the real one") {
  const Grid g = make_grid(1, 8.0, 64);
  const auto f = gaussian(g, 0.7);
  std::vector<std::complex<double>> z(f.begin(), f.end());
  const auto sym = fractional_symbol(g, 0.4);
  std::vector<double> out(g.size());
  std::vector<std::complex<double>> zout(g.size());
  apply_symbol(g, sym, f, out);
  apply_symbol(g, sym, z, zout);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(zout[i].real() == doctest::Approx(out[i]).epsilon(1e-12));
    CHECK(std::abs(zout[i].imag()) < 1e-13);
  }
}

TEST_CASE("Gaussian observables") {
  const Grid g = make_grid(1, 12.0, 256);
  const Field u = Field::real(g, gaussian(g));
  const Observables o = observables(u, ModelParams{1, 1.0, 4.0, 0.0});
  const double rp = std::sqrt(std::numbers::pi);
  CHECK(o.mass == doctest::Approx(rp).epsilon(1e-13));
  CHECK(o.potential == doctest::Approx(rp / 2).epsilon(1e-13));
  CHECK(o.kinetic_s == doctest::Approx(rp / 2).epsilon(1e-13));
  CHECK(o.power_q == doctest::Approx(std::sqrt(std::numbers::pi / 2)).epsilon(1e-13));
}

TEST_CASE("spectral tail and boundary diagnostics") {
  const Grid g = make_grid(1, 12.0, 256);
  const Field smooth = Field::real(g, gaussian(g));
  CHECK(spectral_tail_fraction(smooth) < 1e-20);
  CHECK(boundary_small(smooth));

  std::vector<double> spike(g.size(), 0.0);
  spike[g.origin_index()] = 1.0;
  CHECK(spectral_tail_fraction(Field::real(g, spike)) > 0.05);

  std::vector<double> edge = gaussian(g);
  edge[0] = 0.5;
  CHECK(boundary_ratio(Field::real(g, edge)) == doctest::Approx(0.5));
  CHECK_FALSE(boundary_small(Field::real(g, edge)));
}

TEST_CASE("fields keep complex values interleaved") {
  const Grid g = make_grid(1, 4.0, 8);
  std::vector<std::complex<double>> z(8);
  for (int i = 0; i < 8; ++i) z[i] = {double(i), -double(i) - 0.5};
  const Field f = Field::complex(g, z);
  CHECK(f.kind() == FieldKind::kComplex);
  CHECK(f.values().size() == 16);
  CHECK(f.values()[2] == 1.0);
  CHECK(f.values()[3] == -1.5);
  CHECK(f.complex_values()[5] == z[5]);
  CHECK_THROWS_AS(Field::real(g, std::vector<double>(7)), Error);
}
