#include "numerics.hpp"

#include "errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace escapelab {

const GaussRule& gauss_legendre(int points) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  if (points < 1) throw DomainError("Gauss rule needs at least one point");
  std::lock_guard lock(mutex);
  auto& slot = cache[points];
  if (!slot) {
    auto rule = std::make_unique<GaussRule>();
    // legendre_p_zeros returns the non-negative zeros in increasing order.
    std::vector<double> zeros = boost::math::legendre_p_zeros<double>(points);
    for (double x : zeros) {
      double dp = boost::math::legendre_p_prime(points, x);
      double w = 2.0 / ((1.0 - x * x) * dp * dp);
      if (x == 0.0) {
        rule->nodes.push_back(0.0);
        rule->weights.push_back(w);
      } else {
        rule->nodes.push_back(-x);
        rule->weights.push_back(w);
        rule->nodes.push_back(x);
        rule->weights.push_back(w);
      }
    }
    slot = std::move(rule);
  }
  return *slot;
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                          double* error) {
  double err = 0.0;
  double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 30, rel_tol, &err);
  if (error) *error = err;
  return value;
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma) {
  LineFit fit;
  fit.points = static_cast<int>(x.size());
  if (x.size() < 2) throw SignalError("line fit needs at least two points");
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double w = 1.0 / (sigma[i] * sigma[i]);
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  double det = s * sxx - sx * sx;
  if (!(det > 0.0)) throw SignalError("degenerate abscissae in line fit");
  fit.slope = (s * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = (y[i] - fit.intercept - fit.slope * x[i]) / sigma[i];
    fit.chi2 += r * r;
  }
  double var = s / det;
  if (x.size() > 2) {
    double red = fit.chi2 / static_cast<double>(x.size() - 2);
    if (red > 1.0) var *= red;
  }
  fit.slope_stderr = std::sqrt(var);
  return fit;
}

LineFit line_fit(std::span<const double> x, std::span<const double> y) {
  LineFit fit;
  std::size_t n = x.size();
  fit.points = static_cast<int>(n);
  if (n < 2) throw SignalError("line fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw SignalError("degenerate abscissae in line fit");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.chi2 += r * r;
  }
  fit.slope_stderr = n > 2 ? std::sqrt(fit.chi2 / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ESCAPELAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void parallel_chunks(int chunks, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, chunks));
  if (threads == 1) {
    for (int c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int c = next++; c < chunks; c = next++) {
        try {
          body(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace escapelab
