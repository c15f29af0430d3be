#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace escapelab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached; safe to call concurrently.
const GaussRule& gauss_legendre(int points);

// Integrates f over [a, b] with a points-point Gauss-Legendre rule.
template <class F>
double gauss_integrate(F&& f, double a, double b, int points) {
  const GaussRule& r = gauss_legendre(points);
  double half = 0.5 * (b - a), mid = 0.5 * (a + b), sum = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * f(mid + half * r.nodes[i]);
  return sum * half;
}

// Adaptive Gauss-Kronrod (15 point) with relative tolerance.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double* error = nullptr);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double chi2 = 0.0;
  int points = 0;
};

// Weighted least squares y = intercept + slope * x with weights 1/sigma^2.
// The slope error is scaled by sqrt(reduced chi^2) when that exceeds one.
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma);
// Ordinary least squares with the textbook residual-based slope error.
LineFit line_fit(std::span<const double> x, std::span<const double> y);

// Independent random stream for (seed, stream) pairs.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);
double uniform01(std::mt19937_64& rng);

// Number of worker threads: explicit value, else ESCAPELAB_THREADS, else 1.
int resolve_threads(int requested);

// Runs body(chunk) for chunk in [0, chunks) across threads. Chunks are the
// unit of determinism: results must depend only on the chunk index.
void parallel_chunks(int chunks, int threads, const std::function<void(int)>& body);

}  // namespace escapelab
