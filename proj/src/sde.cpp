#include "hgap/sde.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "hgap/error.hpp"

namespace hgap {

HorizontalWalker::HorizontalWalker(const HTypeStructure& s, IntegralRule rule, bool track_covariation)
    : m_(s.m()), n_(s.n()), rule_(rule), track_covariation_(track_covariation) {
  const auto report = verify_structure(s);
  if (!report.passed()) throw Error(ErrorCode::InvalidStructure, "structure fails verification");
  cols_.resize(static_cast<std::size_t>(m_) * n_);
  signs_.resize(static_cast<std::size_t>(m_) * n_);
  for (int i = 0; i < n_; ++i) {
    SignedPermutation sp;
    if (!to_signed_permutation(s.generator(i), sp)) {
      throw Error(ErrorCode::InvalidStructure, "generator is not a signed permutation");
    }
    for (int r = 0; r < m_; ++r) {
      cols_[static_cast<std::size_t>(i) * m_ + r] = sp.column[static_cast<std::size_t>(r)];
      signs_[static_cast<std::size_t>(i) * m_ + r] = sp.sign[static_cast<std::size_t>(r)];
    }
  }
  const auto um = static_cast<std::size_t>(m_);
  const auto un = static_cast<std::size_t>(n_);
  B_.assign(um, 0.0);
  dB_.assign(um, 0.0);
  mid_.assign(um, 0.0);
  A_.assign(un, 0.0);
  dA_.assign(un, 0.0);
  covariation_.assign(track_covariation_ ? un * un : 0, 0.0);
}

void HorizontalWalker::reset() noexcept {
  std::fill(B_.begin(), B_.end(), 0.0);
  std::fill(A_.begin(), A_.end(), 0.0);
  std::fill(dA_.begin(), dA_.end(), 0.0);
  std::fill(covariation_.begin(), covariation_.end(), 0.0);
  tau_ = 0.0;
  b_sq_ = 0.0;
}

std::int64_t step_count(double T, double dt, std::int64_t budget) {
  if (!(T > 0.0) || !(dt > 0.0) || !std::isfinite(T) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, "T and dt must be positive and finite");
  }
  if (dt > T * (1.0 + 1e-12)) throw Error(ErrorCode::InvalidArgument, "dt must not exceed T");
  const double steps = std::round(T / dt);
  if (steps > static_cast<double>(budget)) {
    throw Error(ErrorCode::StepBudgetExceeded,
                "T/dt = " + std::to_string(steps) + " exceeds the step budget " + std::to_string(budget));
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(steps));
}

PathSample simulate_path(const HTypeStructure& s, double T, double dt, std::uint64_t seed,
                         std::uint64_t path_index, IntegralRule rule) {
  const auto steps = step_count(T, dt);
  HorizontalWalker walker(s, rule);
  PathSample p;
  p.m = s.m();
  p.n = s.n();
  p.dt = dt;
  p.steps = steps;
  p.seed = seed;
  p.path_index = path_index;
  const auto rows = static_cast<std::size_t>(steps + 1);
  p.B.assign(rows * static_cast<std::size_t>(p.m), 0.0);
  p.A.assign(rows * static_cast<std::size_t>(p.n), 0.0);
  p.tau.assign(rows, 0.0);

  PathStream rng(seed, path_index);
  const double sqrt_dt = std::sqrt(dt);
  for (std::int64_t k = 1; k <= steps; ++k) {
    walker.step(rng, dt, sqrt_dt);
    const auto row = static_cast<std::size_t>(k);
    std::copy(walker.B().begin(), walker.B().end(), p.B.begin() + static_cast<std::ptrdiff_t>(row * p.m));
    std::copy(walker.A().begin(), walker.A().end(), p.A.begin() + static_cast<std::ptrdiff_t>(row * p.n));
    p.tau[row] = walker.tau();
  }
  return p;
}

double empirical_quadratic_covariation(const PathSample& p, int i, int j) {
  if (i < 0 || j < 0 || i >= p.n || j >= p.n) {
    throw Error(ErrorCode::IndexOutOfRange, "covariation index out of range");
  }
  double acc = 0.0;
  for (std::int64_t k = 0; k < p.steps; ++k) {
    const double di = p.A_at(k + 1, i) - p.A_at(k, i);
    const double dj = p.A_at(k + 1, j) - p.A_at(k, j);
    acc += di * dj;
  }
  return acc;
}

std::vector<TerminalSample> time_change_samples(const HTypeStructure& s, double T, double dt,
                                                std::uint64_t seed, std::int64_t count,
                                                const SimulationOptions& options) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be at least 1");
  const auto steps = step_count(T, dt, options.step_budget);
  const HorizontalWalker prototype(s, options.rule, options.track_covariation);
  const double sqrt_dt = std::sqrt(dt);

  std::vector<TerminalSample> out(static_cast<std::size_t>(count));
  for_each_path(count, options.execution, [&](std::int64_t path) {
    HorizontalWalker walker = prototype;
    PathStream rng(seed, static_cast<std::uint64_t>(path));
    double max4 = 0.0;
    for (std::int64_t k = 0; k < steps; ++k) {
      walker.step(rng, dt, sqrt_dt);
      max4 = std::max(max4, walker.norm4());
    }
    auto& rec = out[static_cast<std::size_t>(path)];
    rec.A.assign(walker.A().begin(), walker.A().end());
    rec.tau = walker.tau();
    rec.b_squared = walker.b_squared();
    rec.max_norm = std::sqrt(std::sqrt(max4));
    rec.covariation.assign(walker.covariation().begin(), walker.covariation().end());
  });
  return out;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_critical_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

double ks_statistic_normal(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InsufficientSamples, "KS statistic of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = standard_normal_cdf(values[i]);
    const double di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - cdf, cdf - di / n});
  }
  return d;
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "correlation needs two equally long samples");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {
double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}
}  // namespace

bool LemmaDiagnostics::covariation_pass(double threshold) const {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !(cross_covariations[static_cast<std::size_t>(i * n + j)] < threshold)) return false;
  return true;
}

bool LemmaDiagnostics::passed() const {
  for (int i = 0; i < n; ++i)
    if (!ks_pass(i) || !independence_pass(i) || !moment_pass(i)) return false;
  return covariation_pass();
}

LemmaDiagnostics lemma_diagnostics(const std::vector<TerminalSample>& samples, int m, double T,
                                   double alpha) {
  if (samples.size() < 1000) {
    throw Error(ErrorCode::InsufficientSamples, "lemma diagnostics need at least 1000 samples");
  }
  LemmaDiagnostics d;
  d.sample_count = static_cast<std::int64_t>(samples.size());
  d.m = m;
  d.n = static_cast<int>(samples.front().A.size());
  d.T = T;
  d.alpha = alpha;
  const double count = static_cast<double>(samples.size());
  d.ks_critical = ks_critical_coefficient(alpha) / std::sqrt(count);
  d.corr_threshold = 3.0 / std::sqrt(count);
  d.expected_a_squared = m * T * T / 8.0;
  const int n = d.n;

  std::vector<double> tau(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) tau[k] = samples[k].tau;
  {
    const double mean = std::accumulate(tau.begin(), tau.end(), 0.0) / count;
    double ss = 0.0;
    for (double t : tau) ss += (t - mean) * (t - mean);
    d.mean_tau = mean;
    d.se_tau = std::sqrt(ss / (count - 1.0) / count);
  }

  std::vector<double> normalized(samples.size());
  std::vector<double> ratio(samples.size());
  std::vector<double> a_sq(samples.size());
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double a = samples[k].A[ui];
      const double t = samples[k].tau;
      normalized[k] = t > 0.0 ? a / std::sqrt(t) : 0.0;
      ratio[k] = t > 0.0 ? a * a / t : 0.0;
      a_sq[k] = a * a;
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double z : normalized) {
      sum += z;
      sum_sq += z * z;
    }
    const double zmean = sum / count;
    d.normalized_variance.push_back((sum_sq - count * zmean * zmean) / (count - 1.0));
    d.ks_statistics.push_back(ks_statistic_normal(normalized));
    d.independence_corr.push_back(pearson_correlation(ratio, tau));

    const double mean = std::accumulate(a_sq.begin(), a_sq.end(), 0.0) / count;
    double ss = 0.0;
    for (double v : a_sq) ss += (v - mean) * (v - mean);
    d.mean_a_squared.push_back(mean);
    d.se_a_squared.push_back(std::sqrt(ss / (count - 1.0) / count));
  }

  d.cross_covariations.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> normalized_cov(samples.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(i * n + j);
      if (i == j) {
        d.cross_covariations[idx] = 1.0;
        continue;
      }
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& cov = samples[k].covariation;
        if (cov.size() != static_cast<std::size_t>(n) * n) {
          throw Error(ErrorCode::InvalidArgument, "samples were simulated without covariation tracking");
        }
        const double qi = cov[static_cast<std::size_t>(i * n + i)];
        normalized_cov[k] = qi > 0.0 ? std::abs(cov[idx]) / qi : 0.0;
      }
      d.cross_covariations[idx] = median(normalized_cov);
    }
  }
  return d;
}

namespace {

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorCode::IoError, "truncated path file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_paths_binary(const std::filesystem::path& file, const std::vector<PathSample>& paths) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  const PathSample empty{};
  const PathSample& first = paths.empty() ? empty : paths.front();
  out.write("HGAP", 4);
  put<std::uint32_t>(out, kPathFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(first.m));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(first.n));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(first.steps));
  put<double>(out, first.dt);
  for (const auto& p : paths) {
    if (p.m != first.m || p.n != first.n || p.steps != first.steps || p.dt != first.dt) {
      throw Error(ErrorCode::InvalidArgument, "all paths in a file must share m, n, steps and dt");
    }
    for (double v : p.B) put(out, v);
    for (double v : p.A) put(out, v);
    for (double v : p.tau) put(out, v);
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + file.string());
}

std::vector<PathSample> read_paths_binary(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != "HGAP") {
    throw Error(ErrorCode::IoError, "bad magic in " + file.string());
  }
  if (get<std::uint32_t>(in) != kPathFormatVersion) throw Error(ErrorCode::IoError, "unsupported path format version");
  const auto m = static_cast<int>(get<std::uint32_t>(in));
  const auto n = static_cast<int>(get<std::uint32_t>(in));
  const auto steps = static_cast<std::int64_t>(get<std::uint64_t>(in));
  const double dt = get<double>(in);
  const auto rows = static_cast<std::size_t>(steps + 1);
  std::vector<PathSample> paths;
  while (in.peek() != std::char_traits<char>::eof()) {
    PathSample p;
    p.m = m;
    p.n = n;
    p.steps = steps;
    p.dt = dt;
    p.path_index = paths.size();
    p.B.resize(rows * static_cast<std::size_t>(m));
    p.A.resize(rows * static_cast<std::size_t>(n));
    p.tau.resize(rows);
    for (auto& v : p.B) v = get<double>(in);
    for (auto& v : p.A) v = get<double>(in);
    for (auto& v : p.tau) v = get<double>(in);
    paths.push_back(std::move(p));
  }
  return paths;
}

}  // namespace hgap
