#pragma once

namespace fracgs {

struct CriticalExponents {
  double lower;  ///< mass-critical exponent 2 + 4s/N
  double upper;  ///< fractional Sobolev exponent 2N/(N-2s), +inf when N <= 2s
};

CriticalExponents critical_exponents(int dim, double s);

/// Parameters of (-Delta)^s u + |x|^2 u = lambda u + |u|^{q-2} u.
/// Regime flags are derived on every call, never cached.
struct ModelParams {
  int dim = 1;
  double s = 0.5;
  double q = 6.0;
  double lambda = 0.0;

  /// q > 2 + 4s/N.
  bool mass_supercritical() const;
  /// q < 2_s^*.
  bool sobolev_subcritical() const;
  /// Throws Error(kRegime) unless s in (0,1], q > 2 and dim >= 1.
  void validate() const;
};

}  // namespace fracgs
