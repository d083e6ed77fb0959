#include "hysim/infovalue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hysim/errors.hpp"
#include "hysim/isotonic.hpp"
#include "hysim/parallel.hpp"

namespace hysim {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Running mean and sum of squared deviations, merged pairwise (Chan et al.).
struct Moments {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

struct BatchResult {
  Moments basic;
  Moments advanced;
};

// Per-channel occupancy weights of the W slots for advanced and basic users.
struct Occupancy {
  std::vector<std::vector<double>> advanced;  // [channel][slot]
  std::vector<std::vector<double>> basic;
};

Occupancy expected_occupancy(int channels, int slots, double m_a, double m_total) {
  std::vector<double> wa(slots), wb(slots);
  for (int i = 0; i < slots; ++i) {
    const double a = std::clamp(m_a - i, 0.0, 1.0);
    const double t = std::clamp(m_total - i, 0.0, 1.0);
    wa[i] = a;
    wb[i] = t - a;
  }
  return {std::vector(channels, wa), std::vector(channels, wb)};
}

Occupancy rounded_occupancy(int users, int channels, int slots, const MarketShares& s) {
  long n_a = std::lround(users * s.eta_a);
  long n_b = std::lround(users * s.eta_b());
  n_a = std::clamp<long>(n_a, 0, users);
  n_b = std::clamp<long>(n_b, 0, users - n_a);
  Occupancy occ{std::vector(channels, std::vector<double>(slots, 0.0)),
                std::vector(channels, std::vector<double>(slots, 0.0))};
  const long offset = n_a % channels;
  for (int k = 0; k < channels; ++k) {
    const long ka = n_a / channels + (k < offset ? 1 : 0);
    const long shifted = (k - offset + channels) % channels;
    const long kb = n_b / channels + (shifted < n_b % channels ? 1 : 0);
    for (long i = 0; i < ka + kb && i < slots; ++i) {
      (i < ka ? occ.advanced : occ.basic)[k][i] = 1.0;
    }
  }
  return occ;
}

}  // namespace

void DistributionSpec::validate() const {
  auto fail = [](const std::string& what) { throw DistributionError(what); };
  const bool finite = std::isfinite(a) && std::isfinite(b);
  if (!finite) fail("distribution parameters must be finite");
  switch (kind) {
    case Kind::point:
      if (a < 0.0) fail("point mass must be nonnegative");
      break;
    case Kind::uniform:
      if (a < 0.0 || b < a) fail("uniform(a,b) needs 0 <= a <= b");
      break;
    case Kind::exponential:
      if (!(a > 0.0)) fail("exponential mean must be positive");
      break;
    case Kind::lognormal:
      if (b < 0.0) fail("lognormal sigma must be nonnegative");
      break;
  }
}

double DistributionSpec::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::point:
      return a;
    case Kind::uniform:
      return a == b ? a : std::uniform_real_distribution<double>(a, b)(rng);
    case Kind::exponential:
      return std::exponential_distribution<double>(1.0 / a)(rng);
    case Kind::lognormal:
      return b == 0.0 ? std::exp(a) : std::lognormal_distribution<double>(a, b)(rng);
  }
  return a;
}

void InterferenceModel::validate() const {
  if (channels < 1) throw DistributionError("need at least one channel");
  if (users < channels) throw DistributionError("need at least as many users as channels");
  if (samples < 1) throw DistributionError("need at least one sample");
  if (batches < 1) throw DistributionError("need at least one batch");
  if (!(power > 0.0) || !(noise > 0.0)) throw DistributionError("power and noise must be positive");
  if (utility == UtilityKind::power && !(rho > 0.0 && rho <= 1.0)) {
    throw DistributionError("power utility exponent must lie in (0,1]");
  }
  dist_L.validate();
  dist_W.validate();
  dist_I.validate();
}

double InterferenceModel::rate(double interference) const {
  return std::log2(1.0 + power / (interference + noise));
}

double InterferenceModel::utility_of(double r) const {
  return utility == UtilityKind::log1p ? std::log1p(r) : std::pow(r, rho);
}

double InterferenceModel::utility_slope(double r) const {
  if (utility == UtilityKind::log1p) return 1.0 / (1.0 + r);
  return r > 0.0 ? rho * std::pow(r, rho - 1.0) : std::numeric_limits<double>::infinity();
}

InfoValueEstimate simulate_info_value(const InterferenceModel& im, const MarketShares& shares) {
  im.validate();
  if (!shares.on_simplex(1e-12)) throw std::invalid_argument("shares off the simplex");
  const MarketShares s = shares.clamped();
  const int K = im.channels;
  const double per_channel = static_cast<double>(im.users) / K;
  const int slots = static_cast<int>(std::ceil(per_channel - 1e-12));
  const double m_a = per_channel * s.eta_a;
  const double m_b = per_channel * s.eta_b();

  Occupancy occ;
  if (im.count_mode == CountMode::expected) {
    occ = expected_occupancy(K, slots, m_a, m_a + m_b);
  } else if (im.count_mode == CountMode::rounded) {
    occ = rounded_occupancy(im.users, K, slots, s);
  }

  const int batches = static_cast<int>(std::min<long>(im.batches, im.samples));
  std::vector<BatchResult> results(batches);
  parallel_for(batches, [&](std::size_t b) {
    const long count = im.samples / batches + (static_cast<long>(b) < im.samples % batches ? 1 : 0);
    std::seed_seq seq{static_cast<std::uint32_t>(im.seed), static_cast<std::uint32_t>(im.seed >> 32),
                      static_cast<std::uint32_t>(b)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> pick(0, K - 1);
    std::vector<double> L(K), I(K), X(K), Y(K), W(static_cast<std::size_t>(K) * slots);
    BatchResult& out = results[b];
    for (long t = 0; t < count; ++t) {
      for (int k = 0; k < K; ++k) {
        L[k] = im.dist_L.sample(rng);
        I[k] = im.dist_I.sample(rng);
      }
      if (im.count_mode == CountMode::poisson) {
        for (int k = 0; k < K; ++k) {
          const long na = m_a > 0.0 ? std::poisson_distribution<long>(m_a)(rng) : 0;
          const long nb = m_b > 0.0 ? std::poisson_distribution<long>(m_b)(rng) : 0;
          X[k] = L[k];
          Y[k] = I[k];
          for (long i = 0; i < na; ++i) X[k] += im.dist_W.sample(rng);
          for (long i = 0; i < nb; ++i) Y[k] += im.dist_W.sample(rng);
        }
      } else {
        for (double& w : W) w = im.dist_W.sample(rng);
        for (int k = 0; k < K; ++k) {
          double x = L[k];
          double y = I[k];
          const double* wk = &W[static_cast<std::size_t>(k) * slots];
          for (int i = 0; i < slots; ++i) {
            x += occ.advanced[k][i] * wk[i];
            y += occ.basic[k][i] * wk[i];
          }
          X[k] = x;
          Y[k] = y;
        }
      }
      const int random_channel = pick(rng);
      const int best = static_cast<int>(std::min_element(X.begin(), X.end()) - X.begin());
      out.basic.add(im.rate(X[random_channel] + Y[random_channel]));
      out.advanced.add(im.rate(X[best] + Y[best]));
    }
  });

  Moments basic, advanced;
  for (const auto& r : results) {
    basic.merge(r.basic);
    advanced.merge(r.advanced);
  }
  auto half_width = [&](const Moments& m) {
    if (m.n < 2) return std::numeric_limits<double>::infinity();
    return kZ95 * im.utility_slope(m.mean) * std::sqrt(m.variance() / static_cast<double>(m.n));
  };
  InfoValueEstimate est;
  est.s_b = im.utility_of(basic.mean);
  est.s_a = im.utility_of(advanced.mean);
  est.ci_b = half_width(basic);
  est.ci_a = half_width(advanced);
  est.g_est = est.s_a - est.s_b;
  return est;
}

namespace {

MonotoneStats monotone_stats(const std::vector<double>& raw, const std::vector<double>& ci,
                             bool increasing) {
  MonotoneStats st;
  if (raw.size() < 2) return st;
  int within = 0;
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const double step = increasing ? raw[i - 1] - raw[i] : raw[i] - raw[i - 1];
    const double violation = std::max(step, 0.0);
    st.max_violation = std::max(st.max_violation, violation);
    if (violation <= ci[i] + ci[i - 1]) ++within;
  }
  st.within_ci_fraction = static_cast<double>(within) / static_cast<double>(raw.size() - 1);
  return st;
}

std::vector<double> inverse_variance(const std::vector<double>& ci) {
  std::vector<double> w(ci.size());
  for (std::size_t i = 0; i < ci.size(); ++i) {
    const double c = std::isfinite(ci[i]) ? std::max(ci[i], 1e-12) : 1e12;
    w[i] = 1.0 / (c * c);
  }
  return w;
}

}  // namespace

DerivedExternality derive_externality(const InterferenceModel& im,
                                      const std::vector<double>& x_grid,
                                      const std::vector<double>& y_grid, double ref_eta_l,
                                      std::optional<double> leasing_utility) {
  im.validate();
  if (!(ref_eta_l >= 0.0 && ref_eta_l < 1.0)) {
    throw ParameterError("reference leasing share must lie in [0,1)");
  }
  if (x_grid.size() < 2 || y_grid.size() < 2) throw GridError("grids need at least two points");
  for (double y : y_grid) {
    if (y < 0.0 || y > 1.0 - ref_eta_l + 1e-12) {
      std::ostringstream msg;
      msg << "y grid point " << y << " infeasible with reference leasing share " << ref_eta_l;
      throw GridError(msg.str());
    }
  }
  for (double x : x_grid) {
    if (x < 0.0 || x > 1.0) throw GridError("x grid must lie in [0,1]");
  }

  std::vector<double> f_raw, f_ci, g_raw, g_ci;
  for (double x : x_grid) {
    const auto e = simulate_info_value(im, {1.0 - x, 0.0});
    f_raw.push_back(e.s_b);
    f_ci.push_back(e.ci_b);
  }
  for (double y : y_grid) {
    const auto e = simulate_info_value(im, MarketShares{ref_eta_l, y}.clamped());
    g_raw.push_back(e.g_est);
    g_ci.push_back(e.ci_g());
  }

  std::vector<double> f_smooth = isotonic_fit(f_raw, inverse_variance(f_ci), false);
  std::vector<double> g_smooth = isotonic_fit(g_raw, inverse_variance(g_ci), true);
  for (double& v : g_smooth) v = std::max(v, 0.0);
  for (double& v : f_smooth) v = std::max(v, 0.0);

  std::vector<double> y_table = y_grid;
  std::vector<double> g_table = g_smooth;
  if (y_table.back() < 1.0) {
    y_table.push_back(1.0);
    g_table.push_back(g_table.back());
  }

  double worst_ci = 0.0;
  for (double c : f_ci) worst_ci = std::max(worst_ci, std::isfinite(c) ? c : 0.0);
  for (double c : g_ci) worst_ci = std::max(worst_ci, std::isfinite(c) ? c : 0.0);
  const double shape_tol = 2.0 * worst_ci + 1e-9;

  const double peak = *std::max_element(f_smooth.begin(), f_smooth.end()) +
                      *std::max_element(g_table.begin(), g_table.end());
  const double rl = leasing_utility.value_or(peak > 0.0 ? 1.25 * peak : 1.0);
  if (!(rl > peak)) {
    std::ostringstream msg;
    msg << "R_L = " << rl << " must exceed the tabulated max f + max g = " << peak;
    throw ParameterError(msg.str());
  }

  DerivedExternality out(
      make_table_model(x_grid, f_smooth, y_table, g_table, rl, Family::montecarlo, shape_tol));
  out.x_grid = x_grid;
  out.f_raw = std::move(f_raw);
  out.f_ci = std::move(f_ci);
  out.f_smooth = std::move(f_smooth);
  out.y_grid = y_grid;
  out.g_raw = std::move(g_raw);
  out.g_ci = std::move(g_ci);
  out.g_smooth = std::move(g_smooth);
  out.f_stats = monotone_stats(out.f_raw, out.f_ci, false);
  out.g_stats = monotone_stats(out.g_raw, out.g_ci, true);
  out.shape_tol = shape_tol;
  out.leasing_utility = rl;

  // Separability probe: simulated S_A against f(1 - eta_l) + g(eta_a).
  double residual = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double eta_l = 0.2 * i;
    for (int j = 0; j < 5; ++j) {
      const double eta_a = 0.25 * j * (1.0 - eta_l);
      const auto e = simulate_info_value(im, MarketShares{eta_l, eta_a}.clamped());
      const double approx = out.model.f(1.0 - eta_l) + out.model.g(eta_a);
      residual = std::max(residual, std::abs(e.s_a - approx));
    }
  }
  out.separability_residual = residual;
  return out;
}

std::string_view to_string(CountMode mode) {
  switch (mode) {
    case CountMode::expected: return "expected";
    case CountMode::rounded: return "rounded";
    case CountMode::poisson: return "poisson";
  }
  return "expected";
}

std::string_view to_string(UtilityKind kind) {
  return kind == UtilityKind::log1p ? "log1p" : "power";
}

}  // namespace hysim
