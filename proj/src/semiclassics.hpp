#pragma once

#include "geometry.hpp"
#include "measures.hpp"

#include <complex>
#include <string>
#include <vector>

namespace escapelab {

// Generalised eigenfunction of the free model: e^{i lambda m.xi / h} on the
// plane, ((1 - |q|^2) / |q - p|^2)^{1/2 + i lambda / h} on the ball.
struct PlaneWaveSpec {
  ModelGeometry geometry = ModelGeometry::hyperbolic();
  BoundaryPoint xi;
  double lambda = 1.0;
  double h = 0.1;

  void validate() const;
};

enum class Quantization { Left, Weyl };
std::string to_string(Quantization q);
Quantization parse_quantization(const std::string& s);

cplx evaluate_wave(const PlaneWaveSpec& spec, const BallPoint& m);

struct MatrixElement {
  cplx value;
  double error_bound = 0.0;  // difference to a coarser grid
  int m_points = 0;
  int y_points = 0;
  int required_points = 0;
};

// <Op_h(a) E_h, E_h> for separable symbols with a Gaussian fibre. The nu
// integral is done in closed form, leaving a nested integral over m and the
// scaled offset y = (m' - m) / h. Throws ResolutionError when quad.points is
// below six points per wavelength of the y oscillation.
MatrixElement matrix_element(const SymbolFunction& a, const PlaneWaveSpec& spec, Quantization conv,
                             const QuadratureSpec& quad = {});

// (2 pi h)^{-(n+1)} times the phase-space integral of a over |nu|_g^2 <= s.
double weyl_leading_term(const SymbolFunction& a, double s, double h, int n, Quantization conv,
                         const QuadratureSpec& quad = {});
// Same integral on flat space by adaptive Gauss-Kronrod over Cartesian chords.
// Separable Euclidean symbols only.
double free_trace_oracle(const SymbolFunction& a, double s, double h, int n, double rel_tol = 1e-10);

struct ConvergenceRow {
  double h = 0.0;
  cplx matrix_element;
  double mu_xi = 0.0;
  double abs_error = 0.0;
  double quadrature_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double fitted_order = 0.0;
  double order_stderr = 0.0;
  bool exact = false;  // every error at quadrature tolerance; no order fitted
};

// Trivial group only; lambda is 1 so that E_h microlocalises on the unit
// cosphere bundle where mu_xi lives.
ConvergenceStudy convergence_study(const SymbolFunction& a, const ModelGeometry& geom, const BoundaryPoint& xi,
                                   const std::vector<double>& h_list, Quantization conv,
                                   const QuadratureSpec& quad = {});

}  // namespace escapelab
