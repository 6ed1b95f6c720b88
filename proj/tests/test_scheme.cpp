#include <gtest/gtest.h>

#include <cmath>

#include "degenfd/scheme.hpp"
#include "degenfd/verify.hpp"

using namespace degenfd;

namespace {

Scheme pure_1d(const Grid& g, double eps, double f, double theta = 2.0, GridFunction bnd = {}) {
  if (bnd.size() == 0) bnd = GridFunction(g);
  return Scheme(SchemeParams{IsaacsOperator::negative_laplacian(1), DegeneracyLaw::constant(theta), eps,
                             GridFunction(g, f), std::move(bnd)});
}

IsaacsOperator isaacs_2d() {
  Matrix a(2, 2), b(2, 2), c(2, 2);
  a << 2.0, 0.5, 0.5, 1.5;
  b << 1.0, -0.4, -0.4, 1.0;
  c << 1.5, 0.0, 0.0, 1.5;
  return IsaacsOperator({{a, b}, {c}}, 0.5, 2.5);
}

}  // namespace

TEST(SchemeEval, BoundaryNodeIsUMinusG) {
  const Grid g = build_grid({0.0}, {1.0}, 0.25);
  const Scheme s = pure_1d(g, 1.0, 1.0, 2.0, GridFunction(g, 0.7));
  EXPECT_DOUBLE_EQ(scheme_eval(s, GridFunction(g, 0.7), 0), 0.0);
  EXPECT_DOUBLE_EQ(scheme_eval(s, GridFunction(g, 1.0), 4), 0.3);
}

TEST(SchemeEval, ZeroIterateUnitSource) {
  const Grid g = build_grid({0.0}, {1.0}, 0.25);
  const Scheme s = pure_1d(g, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(scheme_eval(s, GridFunction(g), 2), -1.0);
}

TEST(SchemeEval, QuadraticWithoutSource) {
  const Grid g = build_grid({0.0}, {2.0}, 0.5);
  const Scheme s = pure_1d(g, 0.5, 0.0);
  const GridFunction u = GridFunction::sample(g, [](std::span<const double> x) { return x[0] * x[0]; });
  EXPECT_NEAR(scheme_eval(s, u, 2), -1.5, 1e-12);  // node 2 is x = 1
}

TEST(SchemeEval, HomogeneousFallbackReplacesZeroSource) {
  const Grid g = build_grid({0.0}, {1.0}, 0.25);
  const Scheme s(SchemeParams{IsaacsOperator::negative_laplacian(1), DegeneracyLaw::constant(2.0), 0.5,
                              GridFunction(g), GridFunction(g), true});
  EXPECT_DOUBLE_EQ(s.source(2), 0.5);
  EXPECT_DOUBLE_EQ(scheme_eval(s, GridFunction(g), 2), -0.5 / 0.5);
  GridFunction f(g);
  f[2] = 1.0;
  const Scheme t(SchemeParams{IsaacsOperator::negative_laplacian(1), DegeneracyLaw::constant(2.0), 0.5, f,
                              GridFunction(g), true});
  EXPECT_DOUBLE_EQ(t.source(1), 0.0);  // fallback only applies when f vanishes identically
}

TEST(SchemeEval, TransmissionUsesCentreValueExponent) {
  const Grid g = build_grid({0.0}, {1.0}, 0.25);
  const Scheme s(SchemeParams{IsaacsOperator::negative_laplacian(1), DegeneracyLaw::transmission(2.0, 4.0, 0.1), 0.5,
                              GridFunction(g, 1.0), GridFunction(g)});
  const GridFunction hi(g, 1.0), lo(g, -1.0);
  EXPECT_NEAR(scheme_eval(s, hi, 2), 0.5 - 1.0 / std::pow(0.5, 2.0), 1e-12);
  EXPECT_NEAR(scheme_eval(s, lo, 2), -0.5 - 1.0 / 0.5, 1e-12);
}

TEST(SchemeConstruction, RejectsInvalidParams) {
  const Grid g = build_grid({0.0}, {1.0}, 0.25);
  const Grid other = build_grid({0.0}, {1.0}, 0.5);
  const auto lap = IsaacsOperator::negative_laplacian(1);
  const auto law = DegeneracyLaw::constant(2.0);
  EXPECT_THROW(Scheme(SchemeParams{lap, law, 0.0, GridFunction(g), GridFunction(g)}), InputError);
  EXPECT_THROW(Scheme(SchemeParams{lap, law, 0.1, GridFunction(g), GridFunction(other)}), InputError);
  EXPECT_THROW(Scheme(SchemeParams{IsaacsOperator::negative_laplacian(2), law, 0.1, GridFunction(g), GridFunction(g)}),
               InputError);
  GridFunction bad(g);
  bad[2] = std::nan("");
  EXPECT_THROW(Scheme(SchemeParams{lap, law, 0.1, bad, GridFunction(g)}), InputError);
  GridFunction interior_nan(g);
  interior_nan[2] = std::nan("");
  EXPECT_NO_THROW(Scheme(SchemeParams{lap, law, 0.1, GridFunction(g), interior_nan}));  // g read on the boundary only
}

TEST(SchemeResidual, Examples) {
  const Grid g = build_grid({0.0}, {1.0}, 0.25);
  const Scheme s = pure_1d(g, 1.0, 1.0);
  EXPECT_GE(scheme_residual(s, GridFunction(g)), 1.0);
  const Grid one = build_grid({0.0}, {1.0}, 0.5);
  const Scheme t = pure_1d(one, 1.0, 1.0);
  const GridFunction u(one, std::vector<double>{0.0, 0.3, 0.0});
  EXPECT_DOUBLE_EQ(scheme_residual(t, u), std::abs(scheme_eval(t, u, 1)));
}

TEST(LipschitzBound, ClosedFormWithoutSource) {
  for (double h : {0.5, 0.25, 0.125}) {
    const Grid g = build_grid({-1.0}, {1.0}, h);
    const Scheme s = pure_1d(g, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(lipschitz_bound(s), 1.0 + 4.0 / (h * h));
  }
  const Grid a = build_grid({-1.0}, {1.0}, 0.25), b = build_grid({-1.0}, {1.0}, 0.125);
  EXPECT_DOUBLE_EQ((lipschitz_bound(pure_1d(b, 1.0, 0.0)) - 1.0) / (lipschitz_bound(pure_1d(a, 1.0, 0.0)) - 1.0), 4.0);
}

TEST(LipschitzBound, CrossStencilsDoubleTheHessianConstant) {
  const Grid g = build_grid({-1.0, -1.0}, {1.0, 1.0}, 0.25);
  const Scheme s(SchemeParams{isaacs_2d(), DegeneracyLaw::constant(2.0), 1.0, GridFunction(g), GridFunction(g)});
  EXPECT_DOUBLE_EQ(lipschitz_constants(s).c_F, 4.0 * 2.0 * 2.5 * 2.0);
}

namespace {
double apply_distance(const Scheme& s, const GridFunction& u, const GridFunction& v) {
  double m = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) m = std::max(m, std::abs(s.eval(u, n) - s.eval(v, n)));
  return m;
}
}  // namespace

TEST(LipschitzBound, EmpiricalRatioNeverExceedsBound) {
  const Grid g = build_grid({-1.0}, {1.0}, 0.1);
  const Scheme s = pure_1d(g, 0.5, 1.0);
  const auto e = check_lipschitz(s, lipschitz_bound(s), 1000, 5);
  EXPECT_TRUE(e.passed) << e.worst_violation;
  const GridFunction u = GridFunction::sample(g, [](std::span<const double> x) { return std::sin(x[0]); });
  EXPECT_EQ(apply_distance(s, u, u), 0.0);
}

TEST(LipschitzBound, EmpiricalRatioScalesLikeInverseSquareSpacing) {
  // A small spike at the midpoint; the Hessian term dominates the response.
  std::vector<double> hs{0.1, 0.05, 0.025}, ratios;
  for (double h : hs) {
    const Grid g = build_grid({-1.0}, {1.0}, h);
    const Scheme s = pure_1d(g, 0.5, 1.0);
    const GridFunction u(g);
    GridFunction v(g);
    v[g.size() / 2] = 1e-3;
    ratios.push_back(apply_distance(s, u, v) / 1e-3);
  }
  const double slope = std::log(ratios.back() / ratios.front()) / std::log(hs.front() / hs.back());
  EXPECT_NEAR(slope, 2.0, 0.1);
}

TEST(Barriers, ConstantBarrierValues) {
  const Grid g = build_grid({0.0}, {1.0}, 0.25);
  const Scheme one(SchemeParams{IsaacsOperator::negative_laplacian(1), DegeneracyLaw::transmission(2.0, 4.0, 1.0), 1.0,
                                GridFunction(g, 1.0), GridFunction(g)});
  const BarrierPair b1 = build_barriers(one);
  EXPECT_FALSE(b1.quadratic);
  EXPECT_DOUBLE_EQ(b1.upper[2], 2.0);
  EXPECT_DOUBLE_EQ(b1.lower[2], -2.0);

  const double eps = 0.2;
  const Scheme zero(SchemeParams{IsaacsOperator::negative_laplacian(1), DegeneracyLaw::transmission(2.0, 4.0, eps), eps,
                                 GridFunction(g), GridFunction(g)});
  EXPECT_DOUBLE_EQ(build_barriers(zero).upper[1], 1.0 / eps);
}

TEST(Barriers, SignConditionsAndBoundaryOrdering) {
  const Grid g = build_grid({-1.0, -1.0}, {1.0, 1.0}, 0.25);
  GridFunction bnd = GridFunction::sample(g, [](std::span<const double> x) { return x[0] - 0.5 * x[1]; });
  const GridFunction f = GridFunction::sample(g, [](std::span<const double> x) { return 2.0 + x[0]; });
  for (const auto& law : {DegeneracyLaw::constant(2.0), DegeneracyLaw::transmission(2.0, 4.0, 0.3)}) {
    const Scheme s(SchemeParams{isaacs_2d(), law, 0.3, f, bnd});
    const BarrierPair b = build_barriers(s);
    EXPECT_EQ(b.quadratic, law.is_constant());
    EXPECT_TRUE(check_barriers(s, b).passed);
    for (std::size_t n : g.boundary_nodes()) {
      EXPECT_LE(b.lower[n], bnd[n]);
      EXPECT_GE(b.upper[n], bnd[n]);
    }
    for (std::size_t n = 0; n < g.size(); ++n) EXPECT_LE(b.lower[n], b.upper[n]);
  }
}

TEST(Barriers, HomogeneousFallbackWithConstantData) {
  const Grid g = build_grid({0.0}, {1.0}, 0.05);
  const Scheme s(SchemeParams{IsaacsOperator::negative_laplacian(1), DegeneracyLaw::constant(2.0), 0.1,
                              GridFunction(g), GridFunction(g, 0.4), true});
  EXPECT_TRUE(check_barriers(s, build_barriers(s)).passed);
}

TEST(Monotonicity, NegativeSourceBreaksItByHand) {
  // u = (0, m, 0), v = (d, m, d): raising both neighbours lowers the Hessian
  // term by 2d but shrinks the upwind gradient, and with f < 0 the source
  // term grows faster.
  const Grid g = build_grid({0.0}, {2.0}, 1.0);
  const double m = 0.1, d = 0.1;
  const GridFunction u(g, std::vector<double>{0.0, m, 0.0});
  const GridFunction v(g, std::vector<double>{d, m, d});
  const Scheme negative = pure_1d(g, 0.01, -1.0);
  EXPECT_GT(negative.eval(v, 1), negative.eval(u, 1) + 1.0);
  const Scheme positive = pure_1d(g, 0.01, 1.0);
  EXPECT_LE(positive.eval(v, 1), positive.eval(u, 1));
}
