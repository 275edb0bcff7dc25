#include "mis/costfn.hpp"

#include <cmath>
#include <set>

#include "mis/errors.hpp"
#include "mis/kvfile.hpp"

namespace mis::cost {
namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(long double v) {
    const long double s = sum_ + v;
    comp_ += std::fabs(sum_) >= std::fabs(v) ? (sum_ - s) + v : (v - s) + sum_;
    sum_ = s;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0, comp_ = 0;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void pole(const char* family, long double x) {
  throw DomainError(std::string(family) + " cost function undefined at x = " +
                    std::to_string(static_cast<double>(x)));
}

bool has_poles(const PolyParams& p) { return p.b1 != 0 || p.b2 != 0 || p.b3 != 0 || p.b4 != 0; }

long double legacy_base(const LegacyParams& p, long double x) {
  if (std::fabs(x + p.s) < 1e-9L) pole("legacy", x);
  const long double g = p.t + p.M * x + p.r * (1 - x) + p.y / (x + p.s);
  if (g < 0 && p.p != std::floor(p.p)) pole("legacy (negative base)", x);
  return g;
}

long double dot(const Basis& basis, const std::vector<double>& coefs) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < coefs.size(); ++i) sum.add(basis[i] * coefs[i]);
  return sum.value();
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::poly: return "poly";
    case Family::frac: return "frac";
    case Family::legacy: return "legacy";
  }
  return "?";
}

Family parse_family(const std::string& text) {
  if (text == "poly") return Family::poly;
  if (text == "frac") return Family::frac;
  if (text == "legacy") return Family::legacy;
  throw ParseError(0, "unknown cost family '" + text + "' (expected poly, frac or legacy)");
}

Family family_of(const CostParams& params) {
  return std::visit(overloaded{[](const PolyParams&) { return Family::poly; },
                               [](const FracParams&) { return Family::frac; },
                               [](const LegacyParams&) { return Family::legacy; }},
                    params);
}

double floor_size(const CostParams& params) {
  return std::visit([](const auto& p) { return p.w; }, params);
}

CostParams with_floor(CostParams params, double w) {
  std::visit([w](auto& p) { p.w = w; }, params);
  return params;
}

const std::vector<std::string>& coefficient_names(Family f) {
  static const std::vector<std::string> poly{"C", "a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"};
  static const std::vector<std::string> frac{"C", "a1", "a2", "a3", "a4", "b2", "b3", "b4"};
  static const std::vector<std::string> legacy{"p", "t", "M", "r", "s", "y"};
  switch (f) {
    case Family::poly: return poly;
    case Family::frac: return frac;
    case Family::legacy: return legacy;
  }
  return poly;
}

std::vector<double> coefficients(const CostParams& params) {
  return std::visit(overloaded{[](const PolyParams& p) {
                                 return std::vector<double>{p.C, p.a1, p.a2, p.a3, p.a4, p.b1, p.b2, p.b3, p.b4};
                               },
                               [](const FracParams& p) {
                                 return std::vector<double>{p.C, p.a1, p.a2, p.a3, p.a4, p.b2, p.b3, p.b4};
                               },
                               [](const LegacyParams& p) {
                                 return std::vector<double>{p.p, p.t, p.M, p.r, p.s, p.y};
                               }},
                    params);
}

CostParams from_coefficients(Family f, const std::vector<double>& c, double w) {
  if (c.size() != coefficient_names(f).size())
    throw PreconditionError(std::string("wrong coefficient count for family ") + to_string(f));
  switch (f) {
    case Family::poly: return PolyParams{c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8], w};
    case Family::frac: return FracParams{c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], w};
    case Family::legacy: return LegacyParams{c[0], c[1], c[2], c[3], c[4], c[5], w};
  }
  throw PreconditionError("unknown family");
}

Basis value_basis(Family f, long double x) {
  const long double x2 = x * x;
  if (f == Family::poly) {
    if (!(x > 0)) pole("poly", x);
    const long double u = 1 / x;
    return {1, x, x2, x2 * x, x2 * x2, u, u * u, u * u * u, u * u * u * u};
  }
  if (f == Family::frac) {
    if (!(x >= 0)) pole("frac", x);
    return {1, x, x2, x2 * x, x2 * x2, std::sqrt(x), std::cbrt(x), std::sqrt(std::sqrt(x)), 0};
  }
  throw PreconditionError("legacy family is not linear in its parameters");
}

Basis second_derivative_basis(Family f, long double x) {
  if (!(x > 0)) pole(to_string(f), x);
  if (f == Family::poly) {
    const long double u = 1 / x, u3 = u * u * u;
    return {0, 0, 2, 6 * x, 12 * x * x, 2 * u3, 6 * u3 * u, 12 * u3 * u * u, 20 * u3 * u3};
  }
  if (f == Family::frac) {
    return {0, 0, 2, 6 * x, 12 * x * x,
            -0.25L * std::pow(x, -1.5L),
            -2.0L / 9.0L * std::pow(x, -5.0L / 3.0L),
            -3.0L / 16.0L * std::pow(x, -1.75L),
            0};
  }
  throw PreconditionError("legacy family is not linear in its parameters");
}

long double eval_ld(const CostParams& params, long double x) {
  if (std::isnan(x)) throw DomainError("cost function evaluated at NaN");
  return std::visit(
      overloaded{[&](const PolyParams& p) -> long double {
                   if (!(x > 0) && !has_poles(p)) {
                     const long double x2 = x * x;
                     CompensatedSum s;
                     for (long double v : {(long double)p.C, p.a1 * x, p.a2 * x2, p.a3 * x2 * x, p.a4 * x2 * x2})
                       s.add(v);
                     return s.value();
                   }
                   return dot(value_basis(Family::poly, x), coefficients(params));
                 },
                 [&](const FracParams&) { return dot(value_basis(Family::frac, x), coefficients(params)); },
                 [&](const LegacyParams& p) { return std::pow(legacy_base(p, x), (long double)p.p); }},
      params);
}

double eval(const CostParams& params, double x) { return static_cast<double>(eval_ld(params, x)); }

double first_derivative(const CostParams& params, double xd) {
  const long double x = xd;
  return std::visit(
      overloaded{[&](const PolyParams& p) -> double {
                   if (!(x > 0)) pole("poly", x);
                   const long double u = 1 / x;
                   CompensatedSum s;
                   for (long double v : {(long double)p.a1, 2 * p.a2 * x, 3 * p.a3 * x * x, 4 * p.a4 * x * x * x,
                                         -p.b1 * u * u, -2 * p.b2 * u * u * u, -3 * p.b3 * u * u * u * u,
                                         -4 * p.b4 * u * u * u * u * u})
                     s.add(v);
                   return static_cast<double>(s.value());
                 },
                 [&](const FracParams& p) -> double {
                   if (!(x > 0)) pole("frac", x);
                   CompensatedSum s;
                   for (long double v : {(long double)p.a1, 2 * p.a2 * x, 3 * p.a3 * x * x, 4 * p.a4 * x * x * x,
                                         p.b2 / (2 * std::sqrt(x)), p.b3 / (3 * std::pow(x, 2.0L / 3.0L)),
                                         p.b4 / (4 * std::pow(x, 0.75L))})
                     s.add(v);
                   return static_cast<double>(s.value());
                 },
                 [&](const LegacyParams& p) -> double {
                   const long double g = legacy_base(p, x);
                   const long double g1 = p.M - p.r - p.y / ((x + p.s) * (x + p.s));
                   return static_cast<double>(p.p * std::pow(g, (long double)p.p - 1) * g1);
                 }},
      params);
}

double second_derivative(const CostParams& params, double xd) {
  const long double x = xd;
  if (auto* lp = std::get_if<LegacyParams>(&params)) {
    const auto& p = *lp;
    const long double g = legacy_base(p, x);
    const long double xs = x + p.s;
    const long double g1 = p.M - p.r - p.y / (xs * xs);
    const long double g2 = 2 * p.y / (xs * xs * xs);
    long double out = p.p * std::pow(g, (long double)p.p - 1) * g2;
    if (p.p != 1) out += p.p * (p.p - 1) * std::pow(g, (long double)p.p - 2) * g1 * g1;
    return static_cast<double>(out);
  }
  const Family f = family_of(params);
  return static_cast<double>(dot(second_derivative_basis(f, x), coefficients(params)));
}

ConvexityMeasure convexity_measure(const CostParams& params, double lo, double hi, int subintervals, double tol) {
  if (!(lo < hi)) throw PreconditionError("convexity_measure: need lo < hi");
  if (subintervals < 1) throw PreconditionError("convexity_measure: need at least one subinterval");
  const long double L = lo, H = hi;
  if (tol < 0) {
    tol = 1e-12 * std::max({1.0L, std::fabs(eval_ld(params, L)), std::fabs(eval_ld(params, H))});
  }
  ConvexityMeasure out{0, subintervals};
  long double fu = eval_ld(params, L);
  for (int i = 0; i < subintervals; ++i) {
    const long double u = L + (H - L) * i / subintervals;
    const long double v = i + 1 == subintervals ? H : L + (H - L) * (i + 1) / subintervals;
    const long double fv = eval_ld(params, v);
    const long double fm = eval_ld(params, (u + v) / 2);
    if (fm <= (fu + fv) / 2 + tol) ++out.numerator;
    fu = fv;
  }
  return out;
}

long double Placement::cost(const CostParams& params) const {
  CompensatedSum sum;
  for (const auto& [count, x] : pieces)
    if (count != 0) sum.add(count * eval_ld(params, x));
  return sum.value();
}

double desired_cost(const CostParams& params, int N, int k) {
  if (k < 0 || k > N) throw PreconditionError("desired_cost: need 0 <= k <= N");
  const double w = floor_size(params);
  return static_cast<double>(Placement{{{double(k), 1.0}, {double(N - k), w}}}.cost(params));
}

CostParams parse_params(const std::string& text) {
  const KvFile kv = KvFile::parse(text);
  const Family f = parse_family(kv.get("family").value_or("poly"));
  const auto& names = coefficient_names(f);
  std::set<std::string> allowed(names.begin(), names.end());
  allowed.insert({"w", "family"});
  for (const auto& [key, value] : kv.entries())
    if (!allowed.count(key))
      throw ParseError(0, "unknown key '" + key + "' for family " + to_string(f));
  std::vector<double> coefs;
  for (const auto& name : names) coefs.push_back(kv.number(name, f == Family::legacy && name == "p" ? 1.0 : 0.0));
  const double w = kv.number("w", 0.0);
  if (!(w >= 0.0 && w < 1.0)) throw ParseError(0, "w must lie in [0, 1)");
  return from_coefficients(f, coefs, w);
}

CostParams read_params(const std::string& path) {
  const KvFile kv = KvFile::read(path);
  try {
    return parse_params(kv.to_string());
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.message());
  }
}

std::string format_params(const CostParams& params) {
  const Family f = family_of(params);
  std::string out = std::string("family = ") + to_string(f) + "\n";
  const auto& names = coefficient_names(f);
  const auto coefs = coefficients(params);
  for (std::size_t i = 0; i < names.size(); ++i) out += names[i] + " = " + format_double(coefs[i]) + "\n";
  out += "w = " + format_double(floor_size(params)) + "\n";
  return out;
}

}  // namespace mis::cost
