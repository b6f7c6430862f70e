#pragma once

// Analytic semicircle law with scale sigma: support [-2 sigma, 2 sigma],
// even moments Catalan(l) sigma^{2l}.

#include <complex>
#include <functional>

namespace rmt::semicircle {

struct SemicircleParams {
  double sigma = 1.0;
};

/// sqrt(4 sigma^2 - x^2) / (2 pi sigma^2) on the support, 0 outside.
double density(double x, SemicircleParams p);

/// Cumulative distribution function.
double cdf(double x, SemicircleParams p);

/// 0 for odd k; Catalan(k/2) sigma^k for even k.
double moment(int k, SemicircleParams p);

/// Resolvent G(z) = (z - sqrt(z^2 - 4 sigma^2)) / (2 sigma^2) on the branch
/// with G(z) ~ 1/z at infinity. Parameter error when z lies on the cut.
std::complex<double> resolvent(std::complex<double> z, SemicircleParams p);

/// Iterates G <- 1/(z - sigma^2 G) from G = 1/z until |dG| <= 1e-14.
/// Requires |z| > 2 sigma; numerical error after 1e4 iterations.
std::complex<double> solve_schwinger_dyson(std::complex<double> z, SemicircleParams p);

/// (G(x - i eps) - G(x + i eps)) / (2 pi i), returned as a real number.
double stieltjes_invert(const std::function<std::complex<double>(std::complex<double>)>& g, double x,
                        double eps);

}  // namespace rmt::semicircle
