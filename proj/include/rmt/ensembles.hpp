#pragma once

// Matrix ensembles: independent-entry Wigner laws, common-factor
// constructions with dependent entries, and a unitary-invariant quartic model
// sampled by Metropolis.

#include "rmt/exact.hpp"
#include "rmt/graph.hpp"
#include "rmt/hermitian.hpp"
#include "rmt/rng.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rmt {

enum class EnsembleKind { gue, wigner, common_factor, damped_common_factor, quartic_invariant };
enum class EntryDist { gaussian, rademacher, uniform, centered_exponential };

std::string to_string(EnsembleKind kind);
std::string to_string(EntryDist dist);

/// One atom of the discrete law of g^2.
struct FactorAtom {
  Rational g_squared;
  Rational weight;
};

struct MetropolisOptions {
  long burn_in = 200;      // sweeps discarded before the first retained state
  long steps = 10;         // sweeps between retained states
  double step_size = 0.5;  // initial proposal scale, in units of sigma; adapted during burn-in
};

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gue;
  double sigma = 1.0;
  EntryDist entry_dist = EntryDist::gaussian;
  std::vector<FactorAtom> factor_dist;
  double damping_alpha = 0.0;
  double quartic_g = 0.0;
  double diagonal_variance_factor = 1.0;
  MetropolisOptions metropolis;

  /// Throws a parameter error naming the offending field.
  void validate() const;

  /// E[g^k] for the undamped factor law, k even; 1 for independent kinds.
  Rational factor_moment(int k) const;

  nlohmann::json to_json() const;
  /// Strict: unknown fields and type mismatches are parameter errors.
  static EnsembleSpec from_json(const nlohmann::json& j, const std::string& path = "ensemble");
};

/// FNV-1a over the canonical JSON text, as 16 hex digits.
std::string spec_hash(const EnsembleSpec& spec);

struct SampleDiagnostics {
  std::optional<double> acceptance_rate;  // Metropolis only, post burn-in
  double final_step_size = 0.0;
  std::vector<std::string> warnings;
};

struct SampledMatrix {
  HermitianMatrix matrix;
  SampleDiagnostics diagnostics;
};

/// One draw. Quartic kinds run a fresh chain (burn_in + steps sweeps).
SampledMatrix sample_with_diagnostics(const EnsembleSpec& spec, std::size_t n, RngHandle rng);
HermitianMatrix sample(const EnsembleSpec& spec, std::size_t n, RngHandle rng);

/// Quartic kind: `count` states from one chain, `steps` sweeps apart, after
/// burn-in. Other kinds: `count` independent draws on derived streams.
std::vector<SampledMatrix> sample_chain(const EnsembleSpec& spec, std::size_t n, RngHandle rng, std::size_t count);

/// E[X^k] of the unit-variance entry law.
Rational entry_moment(EntryDist dist, int k);

/// Polynomial in eps = N^{-alpha/2} with Gaussian-rational coefficients.
struct EpsPolynomial {
  std::vector<ExactComplex> coeffs;  // coeffs[k] multiplies eps^k

  EpsPolynomial() = default;
  EpsPolynomial(long c) : coeffs{ExactComplex(Rational(c))} {}
  EpsPolynomial(ExactComplex c) : coeffs{std::move(c)} {}

  bool is_zero() const;
  friend EpsPolynomial operator+(const EpsPolynomial& a, const EpsPolynomial& b);
  friend EpsPolynomial operator*(const EpsPolynomial& a, const EpsPolynomial& b);
  EpsPolynomial& operator+=(const EpsPolynomial& b) { return *this = *this + b; }
  EpsPolynomial& operator*=(const EpsPolynomial& b) { return *this = *this * b; }
  friend bool operator==(const EpsPolynomial& a, const EpsPolynomial& b);
};

/// Exact joint cumulant: value(eps) * sigma^sigma_power * 2^{-half_power_of_two/2}.
struct OracleValue {
  EpsPolynomial value;
  int sigma_power = 0;
  int inverse_sqrt2_power = 0;

  std::complex<double> evaluate(double sigma, double n, double alpha) const;
  /// Exact value when eps = 1 (undamped) and sigma = 1; requires an even power of sqrt 2.
  ExactComplex at_unit_scale() const;
};

/// Joint cumulant of the entries M_{indices[s(e)], indices[t(e)]}. nullopt
/// when the kind or order is outside what is computed analytically.
std::optional<OracleValue> entry_cumulant_oracle(const EnsembleSpec& spec, const CumulantGraph& graph,
                                                 std::span<const long> indices);

}  // namespace rmt
