#pragma once

#include <array>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mis::cost {

enum class Family { poly, frac, legacy };

const char* to_string(Family f);
Family parse_family(const std::string& text);

/// f(x) = C + a1 x + a2 x^2 + a3 x^3 + a4 x^4 + b1/x + b2/x^2 + b3/x^3 + b4/x^4
struct PolyParams {
  double C = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0;
  double w = 0;
};

/// f(x) = C + a1 x + a2 x^2 + a3 x^3 + a4 x^4 + b2 x^(1/2) + b3 x^(1/3) + b4 x^(1/4)
struct FracParams {
  double C = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0, b2 = 0, b3 = 0, b4 = 0;
  double w = 0;
};

/// f(x) = [t + M x + r (1 - x) + y / (x + s)]^p
struct LegacyParams {
  double p = 1, t = 0, M = 0, r = 0, s = 0, y = 0;
  double w = 0;
};

using CostParams = std::variant<PolyParams, FracParams, LegacyParams>;

Family family_of(const CostParams& params);
double floor_size(const CostParams& params);
CostParams with_floor(CostParams params, double w);

// The poly and frac families are linear in their coefficients. These expose
// that structure so the fitting LP and the evaluator share one definition.
inline constexpr std::size_t kMaxCoefficients = 9;
using Basis = std::array<long double, kMaxCoefficients>;

/// "C","a1",...; 9 names for poly, 8 for frac.
const std::vector<std::string>& coefficient_names(Family f);
std::vector<double> coefficients(const CostParams& params);
CostParams from_coefficients(Family f, const std::vector<double>& coefs, double w);
/// Basis functions phi_i(x) with f(x) = sum_i coef_i phi_i(x). Throws
/// DomainError at poles.
Basis value_basis(Family f, long double x);
Basis second_derivative_basis(Family f, long double x);

/// Exact term-by-term evaluation in long double with compensated summation.
/// Throws DomainError at or below a pole, or for a negative base under a
/// fractional power.
long double eval_ld(const CostParams& params, long double x);
double eval(const CostParams& params, double x);
double first_derivative(const CostParams& params, double x);
double second_derivative(const CostParams& params, double x);

/// Midpoint-convexity count over `subintervals` equal pieces of [lo, hi]:
/// a piece [u, v] passes when f((u+v)/2) <= (f(u)+f(v))/2 + tol. A negative
/// `tol` selects 1e-12 * max(1, |f(lo)|, |f(hi)|).
struct ConvexityMeasure {
  int numerator = 0;
  int denominator = 0;
};
ConvexityMeasure convexity_measure(const CostParams& params, double lo, double hi, int subintervals,
                                   double tol = -1.0);

/// k f(1) + (N - k) f(w).
double desired_cost(const CostParams& params, int N, int k);

/// Multiset of bin contents: sum over (count, size) of count * f(size).
struct Placement {
  std::vector<std::pair<double, double>> pieces;
  long double cost(const CostParams& params) const;
};

/// Flat key=value text (keys C, a1.., b4, w, family; legacy uses p,t,M,r,s,y).
CostParams parse_params(const std::string& text);
CostParams read_params(const std::string& path);
std::string format_params(const CostParams& params);

}  // namespace mis::cost
