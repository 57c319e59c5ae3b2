#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fracgs/grid.hpp"
#include "fracgs/params.hpp"

namespace fracgs {

/// |xi|^{2 sigma} at every spectral index; the zero frequency maps to 0.
std::vector<double> fractional_symbol(const Grid& grid, double sigma);

/// out = IFFT(symbol * FFT(in)) for real samples. The imaginary part left by the
/// inverse transform is checked against 1e-12 relative and discarded.
void apply_symbol(const Grid& grid, std::span<const double> symbol, std::span<const double> in,
                  std::span<double> out);
void apply_symbol(const Grid& grid, std::span<const double> symbol,
                  std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
/// Same with a complex symbol (used by the propagator exp(-i |xi|^{2s} dt)).
void apply_symbol(const Grid& grid, std::span<const std::complex<double>> symbol,
                  std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

/// Sum over spectral indices of symbol * |u_hat|^2, scaled so that it equals the
/// rectangle-rule integral of u * IFFT(symbol u_hat).
double spectral_quadratic_form(const Grid& grid, std::span<const double> symbol,
                               std::span<const double> u);
double spectral_quadratic_form(const Grid& grid, std::span<const double> symbol,
                               std::span<const std::complex<double>> u);

/// (-Delta)^sigma as the Fourier multiplier |xi|^{2 sigma}, sigma in (0, 1].
Field apply_fractional_power(const Field& f, double sigma);

/// Rectangle-rule L^2 inner product h^N sum a b.
double inner(const Grid& grid, std::span<const double> a, std::span<const double> b);
double l2_norm(const Grid& grid, std::span<const double> a);
double l2_norm(const Field& f);
/// Spectral-side L^2 norm through Parseval.
double spectral_l2_norm(const Field& f);

struct Observables {
  double mass = 0.0;       ///< integral of u^2
  double kinetic_s = 0.0;  ///< integral of |(-Delta)^{s/2} u|^2
  double potential = 0.0;  ///< integral of |x|^2 u^2
  double power_q = 0.0;    ///< integral of |u|^q
};

Observables observables(const Field& u, const ModelParams& params);
/// Same quantities with a precomputed |xi|^{2s} table.
Observables observables(const Grid& grid, std::span<const double> symbol_s, double q,
                        std::span<const double> u);

/// Fraction of spectral mass carried by modes whose largest per-axis index is in
/// the top 10% of the Nyquist range.
double spectral_tail_fraction(const Field& f);

}  // namespace fracgs
