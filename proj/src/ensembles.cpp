#include "rmt/ensembles.hpp"

#include "rmt/detail/quartic_chain.hpp"
#include "rmt/error.hpp"
#include "rmt/json_util.hpp"
#include "rmt/partitions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

namespace rmt {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EnsembleKind, const char*>, 5> kKindNames = {{
    {EnsembleKind::gue, "gue"},
    {EnsembleKind::wigner, "wigner"},
    {EnsembleKind::common_factor, "common_factor"},
    {EnsembleKind::damped_common_factor, "damped_common_factor"},
    {EnsembleKind::quartic_invariant, "quartic_invariant"},
}};

constexpr std::array<std::pair<EntryDist, const char*>, 4> kDistNames = {{
    {EntryDist::gaussian, "gaussian"},
    {EntryDist::rademacher, "rademacher"},
    {EntryDist::uniform, "uniform"},
    {EntryDist::centered_exponential, "centered_exponential"},
}};

template <class E, std::size_t K>
E parse_enum(const std::array<std::pair<E, const char*>, K>& names, const std::string& text,
             const std::string& path) {
  std::string expected;
  for (const auto& [value, name] : names) {
    if (text == name) return value;
    expected += (expected.empty() ? "" : ", ") + std::string(name);
  }
  fail(ErrorKind::parameter, path + ": unknown value '" + text + "' (expected one of " + expected + ")");
}

bool is_common_factor(EnsembleKind k) {
  return k == EnsembleKind::common_factor || k == EnsembleKind::damped_common_factor;
}

double draw_entry(EntryDist dist, Rng& rng) {
  switch (dist) {
    case EntryDist::gaussian:
      return rng.normal();
    case EntryDist::rademacher:
      return rng.rademacher();
    case EntryDist::uniform:
      return std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
    case EntryDist::centered_exponential:
      return -std::log(rng.uniform_open()) - 1.0;
  }
  return 0.0;
}

// g^2 for one matrix.
double draw_factor_squared(const EnsembleSpec& spec, std::size_t n, Rng& rng) {
  if (!is_common_factor(spec.kind)) return 1.0;
  const double u = rng.uniform();
  double cumulative = 0.0;
  double g0 = to_double(spec.factor_dist.back().g_squared);
  for (const auto& atom : spec.factor_dist) {
    cumulative += to_double(atom.weight);
    if (u < cumulative) {
      g0 = to_double(atom.g_squared);
      break;
    }
  }
  if (spec.kind == EnsembleKind::common_factor) return g0;
  return 1.0 + (g0 - 1.0) * std::pow(static_cast<double>(n), -spec.damping_alpha / 2.0);
}

HermitianMatrix sample_independent(const EnsembleSpec& spec, std::size_t n, Rng& rng) {
  const double g = std::sqrt(draw_factor_squared(spec, n, rng));
  const double off = spec.sigma * g / std::numbers::sqrt2;
  const double diag = spec.sigma * g * std::sqrt(spec.diagonal_variance_factor);
  HermitianMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h.set(i, i, diag * draw_entry(spec.entry_dist, rng));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double x = draw_entry(spec.entry_dist, rng);
      const double y = draw_entry(spec.entry_dist, rng);
      h.set(i, j, {off * x, off * y});
    }
  }
  return h;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string to_string(EnsembleKind kind) {
  for (const auto& [value, name] : kKindNames)
    if (value == kind) return name;
  return "?";
}

std::string to_string(EntryDist dist) {
  for (const auto& [value, name] : kDistNames)
    if (value == dist) return name;
  return "?";
}

// ---------------------------------------------------------------------------
// Spec validation and JSON.

void EnsembleSpec::validate() const {
  const std::string p = "ensemble";
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::parameter, p + ".sigma: must be positive");
  require(damping_alpha >= 0.0 && std::isfinite(damping_alpha), ErrorKind::parameter,
          p + ".damping_alpha: must be >= 0");
  require(quartic_g >= 0.0 && std::isfinite(quartic_g), ErrorKind::parameter, p + ".quartic_g: must be >= 0");
  require(diagonal_variance_factor > 0.0 && std::isfinite(diagonal_variance_factor), ErrorKind::parameter,
          p + ".diagonal_variance_factor: must be positive");
  if (kind == EnsembleKind::gue)
    require(entry_dist == EntryDist::gaussian, ErrorKind::parameter,
            p + ".entry_dist: gue requires gaussian entries");
  if (is_common_factor(kind)) {
    require(!factor_dist.empty(), ErrorKind::parameter, p + ".factor_dist: required for " + to_string(kind));
    Rational total = 0, second = 0;
    for (std::size_t i = 0; i < factor_dist.size(); ++i) {
      const std::string at = p + ".factor_dist[" + std::to_string(i) + "]";
      require(factor_dist[i].weight > 0, ErrorKind::parameter, at + ".weight: must be positive");
      require(factor_dist[i].g_squared >= 0, ErrorKind::parameter, at + ".g_squared: must be >= 0");
      total += factor_dist[i].weight;
      second += factor_dist[i].weight * factor_dist[i].g_squared;
    }
    require(total == 1, ErrorKind::parameter, p + ".factor_dist: weights sum to " + to_string(total) + ", not 1");
    require(second == 1, ErrorKind::parameter, p + ".factor_dist: E[g^2] = " + to_string(second) + ", must be 1");
  } else {
    require(factor_dist.empty(), ErrorKind::parameter, p + ".factor_dist: only used by common_factor kinds");
  }
  if (kind == EnsembleKind::quartic_invariant) {
    require(metropolis.burn_in >= 0, ErrorKind::parameter, p + ".metropolis.burn_in: must be >= 0");
    require(metropolis.steps >= 1, ErrorKind::parameter, p + ".metropolis.steps: must be >= 1");
    require(metropolis.step_size > 0.0 && std::isfinite(metropolis.step_size), ErrorKind::parameter,
            p + ".metropolis.step_size: must be positive");
  }
}

Rational EnsembleSpec::factor_moment(int k) const {
  require(k >= 0 && k % 2 == 0, ErrorKind::parameter, "factor_moment: k must be even and >= 0");
  if (!is_common_factor(kind)) return 1;
  Rational m = 0;
  for (const auto& atom : factor_dist) m += atom.weight * rational_pow(atom.g_squared, k / 2);
  return m;
}

json EnsembleSpec::to_json() const {
  json atoms = json::array();
  for (const auto& a : factor_dist) atoms.push_back({{"g_squared", to_string(a.g_squared)}, {"weight", to_string(a.weight)}});
  return {{"kind", to_string(kind)},
          {"sigma", sigma},
          {"entry_dist", to_string(entry_dist)},
          {"factor_dist", atoms},
          {"damping_alpha", damping_alpha},
          {"quartic_g", quartic_g},
          {"diagonal_variance_factor", diagonal_variance_factor},
          {"metropolis",
           {{"burn_in", metropolis.burn_in}, {"steps", metropolis.steps}, {"step_size", metropolis.step_size}}}};
}

EnsembleSpec EnsembleSpec::from_json(const json& j, const std::string& path) {
  using namespace json_util;
  reject_unknown(j,
                 {"kind", "sigma", "entry_dist", "factor_dist", "damping_alpha", "quartic_g",
                  "diagonal_variance_factor", "metropolis"},
                 path);
  require(j.contains("kind"), ErrorKind::parameter, path + ".kind: missing");
  EnsembleSpec s;
  s.kind = parse_enum(kKindNames, get_string(j, "kind", path, ""), path + ".kind");
  s.sigma = get_number(j, "sigma", path, 1.0);
  s.entry_dist = parse_enum(kDistNames, get_string(j, "entry_dist", path, "gaussian"), path + ".entry_dist");
  if (j.contains("factor_dist")) {
    const json& atoms = j.at("factor_dist");
    require(atoms.is_array(), ErrorKind::parameter, path + ".factor_dist: expected an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string at = path + ".factor_dist[" + std::to_string(i) + "]";
      reject_unknown(atoms[i], {"g_squared", "weight"}, at);
      s.factor_dist.push_back({get_rational(atoms[i], "g_squared", at), get_rational(atoms[i], "weight", at)});
    }
  }
  s.damping_alpha = get_number(j, "damping_alpha", path, 0.0);
  s.quartic_g = get_number(j, "quartic_g", path, 0.0);
  s.diagonal_variance_factor = get_number(j, "diagonal_variance_factor", path, 1.0);
  if (j.contains("metropolis")) {
    const json& m = j.at("metropolis");
    const std::string at = path + ".metropolis";
    reject_unknown(m, {"burn_in", "steps", "step_size"}, at);
    s.metropolis.burn_in = get_integer(m, "burn_in", at, s.metropolis.burn_in);
    s.metropolis.steps = get_integer(m, "steps", at, s.metropolis.steps);
    s.metropolis.step_size = get_number(m, "step_size", at, s.metropolis.step_size);
  }
  s.validate();
  return s;
}

std::string spec_hash(const EnsembleSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(spec.to_json().dump())));
  return buf;
}

// ---------------------------------------------------------------------------
// Quartic chain.

namespace detail {

QuarticChain::QuarticChain(std::size_t n, double sigma, double g, Rng& rng)
    : n_(n), sigma_(sigma), g_(g), m_(n * n), q_(n * n) {
  // Start from an exact g = 0 draw.
  EnsembleSpec gue;
  gue.sigma = sigma;
  const auto h = sample_independent(gue, n, rng);
  std::copy(h.data().begin(), h.data().end(), m_.begin());
  recompute_square();
  action_ = recomputed_action();
}

void QuarticChain::recompute_square() {
  std::fill(q_.begin(), q_.end(), Complex{});
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t c = 0; c < n_; ++c) {
      const Complex mac = m_[a * n_ + c];
      if (mac == Complex{}) continue;
      const Complex* row = &m_[c * n_];
      Complex* out = &q_[a * n_];
      for (std::size_t b = 0; b < n_; ++b) out[b] += mac * row[b];
    }
}

double QuarticChain::recomputed_action() const {
  double tr2 = 0.0, tr4 = 0.0;
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = 0; b < n_; ++b) {
      tr2 += std::norm(m_[a * n_ + b]);
      Complex sq{};
      for (std::size_t c = 0; c < n_; ++c) sq += m_[a * n_ + c] * m_[c * n_ + b];
      tr4 += std::norm(sq);
    }
  return tr2 / (2.0 * sigma_ * sigma_) + g_ / static_cast<double>(n_) * tr4;
}

std::size_t QuarticChain::sweep(Rng& rng, double step) {
  const std::size_t n = n_;
  std::vector<Complex> colpart(n * 2), rowpart(2 * n);
  std::size_t accepted = 0;
  const double scale = step * sigma_;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      // Delta restricted to the index set S = {i, j}, as an m x m block.
      const std::size_t S[2] = {i, j};
      const std::size_t m = (i == j) ? 1 : 2;
      Complex D[2][2] = {};
      if (m == 1) {
        D[0][0] = scale * rng.normal();
      } else {
        const Complex d = rng.gaussian_complex(scale);
        D[0][1] = d;
        D[1][0] = std::conj(d);
      }
      // R = M Delta + Delta M + Delta^2: columns S (colpart) plus rows S (rowpart).
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t s = 0; s < m; ++s) {
          Complex v{};
          for (std::size_t t = 0; t < m; ++t) v += m_[a * n + S[t]] * D[t][s];
          colpart[a * 2 + s] = v;
        }
      for (std::size_t s = 0; s < m; ++s)
        for (std::size_t u = 0; u < m; ++u) {
          Complex v{};
          for (std::size_t t = 0; t < m; ++t) v += D[s][t] * D[t][u];
          colpart[S[s] * 2 + u] += v;
        }
      for (std::size_t s = 0; s < m; ++s)
        for (std::size_t b = 0; b < n; ++b) {
          Complex v{};
          for (std::size_t t = 0; t < m; ++t) v += D[s][t] * m_[S[t] * n + b];
          rowpart[s * n + b] = v;
        }

      Complex tr_qr{}, tr_cw{}, tr_cc{}, tr_ww{};
      for (std::size_t s = 0; s < m; ++s)
        for (std::size_t a = 0; a < n; ++a) {
          tr_qr += q_[S[s] * n + a] * colpart[a * 2 + s];
          tr_qr += q_[a * n + S[s]] * rowpart[s * n + a];
          tr_cw += colpart[a * 2 + s] * rowpart[s * n + a];
        }
      for (std::size_t s = 0; s < m; ++s)
        for (std::size_t t = 0; t < m; ++t) {
          tr_cc += colpart[S[s] * 2 + t] * colpart[S[t] * 2 + s];
          tr_ww += rowpart[s * n + S[t]] * rowpart[t * n + S[s]];
        }
      const double d_tr4 = (2.0 * tr_qr + tr_cc + 2.0 * tr_cw + tr_ww).real();

      Complex tr_md{}, tr_dd{};
      for (std::size_t s = 0; s < m; ++s)
        for (std::size_t t = 0; t < m; ++t) {
          tr_md += m_[S[s] * n + S[t]] * D[t][s];
          tr_dd += D[s][t] * D[t][s];
        }
      const double d_tr2 = (2.0 * tr_md + tr_dd).real();
      const double d_action = d_tr2 / (2.0 * sigma_ * sigma_) + g_ / static_cast<double>(n) * d_tr4;

      if (d_action <= 0.0 || std::log(rng.uniform_open()) < -d_action) {
        ++accepted;
        action_ += d_action;
        for (std::size_t s = 0; s < m; ++s)
          for (std::size_t t = 0; t < m; ++t) m_[S[s] * n + S[t]] += D[s][t];
        if (m == 1) m_[i * n + i] = m_[i * n + i].real();
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t s = 0; s < m; ++s) q_[a * n + S[s]] += colpart[a * 2 + s];
        for (std::size_t s = 0; s < m; ++s)
          for (std::size_t b = 0; b < n; ++b) q_[S[s] * n + b] += rowpart[s * n + b];
      }
    }
  }
  // Drop accumulated rounding in M^2 once per sweep.
  recompute_square();
  return accepted;
}

HermitianMatrix QuarticChain::matrix() const {
  HermitianMatrix h(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    h.set(i, i, m_[i * n_ + i].real());
    for (std::size_t j = i + 1; j < n_; ++j) h.set(i, j, m_[i * n_ + j]);
  }
  return h;
}

}  // namespace detail

namespace {

std::vector<SampledMatrix> run_quartic(const EnsembleSpec& spec, std::size_t n, RngHandle handle, std::size_t count) {
  Rng rng(handle);
  detail::QuarticChain chain(n, spec.sigma, spec.quartic_g, rng);
  const double per_sweep = static_cast<double>(chain.proposals_per_sweep());
  double step = spec.metropolis.step_size;
  for (long s = 0; s < spec.metropolis.burn_in; ++s) {
    const double rate = static_cast<double>(chain.sweep(rng, step)) / per_sweep;
    step = std::clamp(step * std::exp(rate - 0.5), 1e-4, 10.0);
  }
  std::vector<SampledMatrix> out;
  std::size_t accepted = 0, proposed = 0;
  for (std::size_t k = 0; k < count; ++k) {
    for (long s = 0; s < spec.metropolis.steps; ++s) {
      accepted += chain.sweep(rng, step);
      proposed += chain.proposals_per_sweep();
    }
    require(std::isfinite(chain.action()), ErrorKind::numerical, "quartic chain produced a non-finite action");
    out.push_back({chain.matrix(), {}});
  }
  const double rate = static_cast<double>(accepted) / static_cast<double>(proposed);
  SampleDiagnostics diag;
  diag.acceptance_rate = rate;
  diag.final_step_size = step;
  if (rate < 0.1 || rate > 0.9) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "metropolis acceptance rate %.3f outside [0.1, 0.9]", rate);
    diag.warnings.emplace_back(buf);
  }
  for (auto& s : out) s.diagnostics = diag;
  return out;
}

}  // namespace

SampledMatrix sample_with_diagnostics(const EnsembleSpec& spec, std::size_t n, RngHandle rng) {
  return std::move(sample_chain(spec, n, rng, 1).front());
}

HermitianMatrix sample(const EnsembleSpec& spec, std::size_t n, RngHandle rng) {
  return std::move(sample_with_diagnostics(spec, n, rng).matrix);
}

std::vector<SampledMatrix> sample_chain(const EnsembleSpec& spec, std::size_t n, RngHandle rng, std::size_t count) {
  spec.validate();
  require(n >= 1, ErrorKind::parameter, "sample: N must be >= 1");
  require(n <= 2048, ErrorKind::capacity, "sample: N above 2048 is not supported");
  if (spec.kind == EnsembleKind::quartic_invariant) return run_quartic(spec, n, rng, count);
  std::vector<SampledMatrix> out;
  for (std::size_t k = 0; k < count; ++k) {
    Rng r(count == 1 ? rng : derive(rng, k));
    out.push_back({sample_independent(spec, n, r), {}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact entry cumulants.

Rational entry_moment(EntryDist dist, int k) {
  require(k >= 0, ErrorKind::parameter, "entry_moment: negative order");
  if (k == 0) return 1;
  switch (dist) {
    case EntryDist::gaussian: {
      if (k % 2) return 0;
      Rational r = 1;
      for (int i = k - 1; i > 1; i -= 2) r *= i;
      return r;
    }
    case EntryDist::rademacher:
      return k % 2 ? Rational(0) : Rational(1);
    case EntryDist::uniform:
      // E[(sqrt3 (2U-1))^k] = 3^{k/2} / (k+1) for even k
      return k % 2 ? Rational(0) : rational_pow(Rational(3), k / 2) / Rational(k + 1);
    case EntryDist::centered_exponential: {
      // E[(X-1)^k] for X ~ Exp(1) is the subfactorial !k.
      BigInt a = 1, b = 0;  // !0, !1
      for (int i = 2; i <= k; ++i) {
        BigInt c = (i - 1) * (a + b);
        a = b;
        b = c;
      }
      return Rational(b);
    }
  }
  return 0;
}

bool EpsPolynomial::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const ExactComplex& c) { return c.is_zero(); });
}

EpsPolynomial operator+(const EpsPolynomial& a, const EpsPolynomial& b) {
  EpsPolynomial r;
  r.coeffs.resize(std::max(a.coeffs.size(), b.coeffs.size()));
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) r.coeffs[i] += a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) r.coeffs[i] += b.coeffs[i];
  return r;
}

EpsPolynomial operator*(const EpsPolynomial& a, const EpsPolynomial& b) {
  EpsPolynomial r;
  if (a.coeffs.empty() || b.coeffs.empty()) return r;
  r.coeffs.resize(a.coeffs.size() + b.coeffs.size() - 1);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  return r;
}

bool operator==(const EpsPolynomial& a, const EpsPolynomial& b) {
  const std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const ExactComplex x = i < a.coeffs.size() ? a.coeffs[i] : ExactComplex{};
    const ExactComplex y = i < b.coeffs.size() ? b.coeffs[i] : ExactComplex{};
    if (!(x == y)) return false;
  }
  return true;
}

std::complex<double> OracleValue::evaluate(double sigma, double n, double alpha) const {
  const double eps = std::pow(n, -alpha / 2.0);
  std::complex<double> v{};
  double p = 1.0;
  for (const auto& c : value.coeffs) {
    v += c.to_complex() * p;
    p *= eps;
  }
  return v * std::pow(sigma, sigma_power) * std::pow(std::numbers::sqrt2, -inverse_sqrt2_power);
}

ExactComplex OracleValue::at_unit_scale() const {
  require(inverse_sqrt2_power % 2 == 0, ErrorKind::parameter, "at_unit_scale: odd power of sqrt 2");
  ExactComplex total;
  for (const auto& c : value.coeffs) total += c;
  return total * ExactComplex(rational_pow(Rational(2), -inverse_sqrt2_power / 2));
}

namespace {

struct Unavailable {};

// E[(X + iY)^p (X - iY)^q] for X, Y independent copies of the entry law.
ExactComplex complex_entry_moment(EntryDist dist, int p, int q) {
  auto binom = [](int n, int k) {
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return Rational(r);
  };
  ExactComplex total;
  for (int a = 0; a <= p; ++a)
    for (int b = 0; b <= q; ++b) {
      const Rational mx = entry_moment(dist, a + b);
      const Rational my = entry_moment(dist, p - a + q - b);
      if (mx == 0 || my == 0) continue;
      // i^{p-a} (-i)^{q-b}
      ExactComplex phase = i_power(p - a) * i_power(3 * (q - b));
      total += phase * ExactComplex(binom(p, a) * binom(q, b) * mx * my);
    }
  return total;
}

// E[g^k] as a polynomial in eps; throws Unavailable when not polynomial.
EpsPolynomial factor_moment_poly(const EnsembleSpec& spec, int k) {
  if (!is_common_factor(spec.kind)) return EpsPolynomial(1);
  if (k % 2 == 1) throw Unavailable{};
  const int half = k / 2;
  if (spec.kind == EnsembleKind::common_factor || spec.damping_alpha == 0.0)
    return EpsPolynomial(ExactComplex(spec.factor_moment(k)));
  // g^2 = 1 + (g0^2 - 1) eps
  EpsPolynomial total;
  for (const auto& atom : spec.factor_dist) {
    EpsPolynomial base;
    base.coeffs = {ExactComplex(1), ExactComplex(atom.g_squared - 1)};
    EpsPolynomial power(1);
    for (int i = 0; i < half; ++i) power *= base;
    total += EpsPolynomial(ExactComplex(atom.weight)) * power;
  }
  return total;
}

}  // namespace

std::optional<OracleValue> entry_cumulant_oracle(const EnsembleSpec& spec, const CumulantGraph& graph,
                                                 std::span<const long> indices) {
  if (spec.kind == EnsembleKind::quartic_invariant) return std::nullopt;
  if (graph.num_edges() == 0 || graph.num_edges() > 4) return std::nullopt;
  require(indices.size() == static_cast<std::size_t>(graph.num_vertices()), ErrorKind::shape,
          "entry_cumulant_oracle: one index per vertex required");
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = a + 1; b < indices.size(); ++b)
      require(indices[a] != indices[b], ErrorKind::parameter, "entry_cumulant_oracle: indices must be distinct");

  int off_diagonal = 0;
  bool touches_diagonal = false;
  for (const auto& e : graph.edges()) {
    if (indices[e.source] == indices[e.target])
      touches_diagonal = true;
    else
      ++off_diagonal;
  }
  if (touches_diagonal && spec.diagonal_variance_factor != 1.0) return std::nullopt;

  const auto& edges = graph.edges();
  auto block_moment = [&](std::span<const int> block) -> EpsPolynomial {
    // Per position: (count of Z, count of conj Z) or diagonal count.
    std::map<std::pair<long, long>, std::pair<int, int>> counts;
    for (int k : block) {
      const long a = indices[edges[k].source], b = indices[edges[k].target];
      if (a <= b)
        ++counts[{a, b}].first;
      else
        ++counts[{b, a}].second;
    }
    ExactComplex w(1);
    for (const auto& [pos, pq] : counts) {
      if (pos.first == pos.second)
        w *= ExactComplex(entry_moment(spec.entry_dist, pq.first));
      else
        w *= complex_entry_moment(spec.entry_dist, pq.first, pq.second);
      if (w.is_zero()) return EpsPolynomial();
    }
    return EpsPolynomial(w) * factor_moment_poly(spec, static_cast<int>(block.size()));
  };

  try {
    OracleValue out;
    out.value = cumulant_from_subset_moments<EpsPolynomial>(graph.num_edges(), block_moment);
    while (!out.value.coeffs.empty() && out.value.coeffs.back().is_zero()) out.value.coeffs.pop_back();
    out.sigma_power = graph.num_edges();
    out.inverse_sqrt2_power = off_diagonal;
    return out;
  } catch (const Unavailable&) {
    return std::nullopt;
  }
}

}  // namespace rmt
