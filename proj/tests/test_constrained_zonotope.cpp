#include "zest/constrained_zonotope.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace zest;
using namespace zest::test_support;

namespace {

ConstrainedZonotope box(const VectorXd& lo, const VectorXd& hi) {
  return cz_from_zonotope(Zonotope::box(0.5 * (lo + hi), 0.5 * (hi - lo)));
}

VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

}  // namespace

TEST(ConstrainedZonotope, ShapeValidation) {
  EXPECT_THROW(ConstrainedZonotope(VectorXd::Zero(2), MatrixXd::Identity(2, 3), MatrixXd::Ones(1, 2), VectorXd::Ones(1)),
               std::invalid_argument);
  EXPECT_THROW(ConstrainedZonotope(VectorXd::Zero(2), MatrixXd::Identity(2, 2), MatrixXd::Ones(1, 2), VectorXd::Ones(2)),
               std::invalid_argument);
}

TEST(CzFromZonotope, RoundTrip) {
  std::mt19937_64 rng(1);
  const Zonotope z = random_zonotope(3, 5, rng);
  const ConstrainedZonotope c = cz_from_zonotope(z);
  EXPECT_EQ(c.num_constraints(), 0);
  const IntervalVector a = interval_hull(z), b = cz_interval_hull(c);
  EXPECT_LE((a.lower - b.lower).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((a.upper - b.upper).cwiseAbs().maxCoeff(), 1e-9);
  for (int i = 0; i < 1000; ++i) ASSERT_TRUE(cz_contains_point(c, sample_point(z, rng), 1e-9));
}

TEST(CzIntersect, DisjointBoxesAreEmpty) {
  const ConstrainedZonotope a = box(v2(-1, -1), v2(1, 1));
  const ConstrainedZonotope b = box(v2(1.5, -1), v2(3.5, 1));
  EXPECT_TRUE(cz_is_empty(cz_intersect(a, b)));
  EXPECT_THROW(cz_intersect(a, cz_from_zonotope(Zonotope(VectorXd::Zero(3)))), std::invalid_argument);
}

TEST(CzIntersect, OverlappingBoxesHull) {
  const ConstrainedZonotope r = cz_intersect(box(v2(-1, -1), v2(1, 1)), box(v2(0, 0), v2(2, 2)));
  EXPECT_EQ(r.num_constraints(), 2);
  EXPECT_EQ(r.num_generators(), 4);
  const IntervalVector h = cz_interval_hull(r);
  EXPECT_LE((h.lower - v2(0, 0)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((h.upper - v2(1, 1)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CzIntersect, SelfIntersectionIsBidirectional) {
  std::mt19937_64 rng(2);
  const ConstrainedZonotope c = random_feasible_cz(2, 5, 1, rng);
  const ConstrainedZonotope cc = cz_intersect(c, c);
  ConstrainedSampler sc(c), scc(cc);
  ASSERT_FALSE(sc.empty());
  for (int i = 0; i < 1000; ++i) {
    ASSERT_TRUE(cz_contains_point(cc, sc.sample(rng), 1e-8));
    ASSERT_TRUE(cz_contains_point(c, scc.sample(rng), 1e-8));
  }
}

TEST(CzIntersect, ExactOnRandomPairs) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const ConstrainedZonotope a = random_feasible_cz(2, 4, 1, rng);
    const Zonotope bz(a.center() + random_vector(2, rng, 0.3), random_matrix(2, 3, rng));
    const ConstrainedZonotope b = cz_from_zonotope(bz);
    const ConstrainedZonotope r = cz_intersect(a, b);
    if (cz_is_empty(r)) continue;
    ConstrainedSampler sr(r), sa(a);
    for (int i = 0; i < 200; ++i) {
      const VectorXd x = sr.sample(rng);
      ASSERT_TRUE(cz_contains_point(a, x, 1e-8));
      ASSERT_TRUE(contains_point(bz, x, 1e-8));
    }
    int accepted = 0;
    for (int i = 0; i < 2000 && accepted < 200; ++i) {
      const VectorXd x = sa.sample(rng);
      if (!contains_point(bz, x, 0.0)) continue;
      ++accepted;
      ASSERT_TRUE(cz_contains_point(r, x, 1e-8));
    }
  }
}

TEST(CzContainsPoint, AgreesWithZonotopeContainment) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const Zonotope z = random_zonotope(2, 2 + t % 4, rng);
    const ConstrainedZonotope c = cz_from_zonotope(z);
    const VectorXd x = t % 2 ? sample_point(z, rng) : outside_point(z, rng, 0.05 * (1 + t % 3));
    EXPECT_EQ(cz_contains_point(c, x), contains_point(z, x)) << t;
  }
}

TEST(CzContainsPoint, CenterAndEmpty) {
  std::mt19937_64 rng(5);
  const MatrixXd a = random_matrix(2, 4, rng);
  const ConstrainedZonotope c(v2(1, 2), random_matrix(2, 4, rng), a, VectorXd::Zero(2));
  EXPECT_TRUE(cz_contains_point(c, v2(1, 2)));

  const ConstrainedZonotope empty(v2(0, 0), MatrixXd::Identity(2, 1), MatrixXd::Ones(1, 1), VectorXd::Constant(1, 2.0));
  for (int i = 0; i < 20; ++i) EXPECT_FALSE(cz_contains_point(empty, random_vector(2, rng)));
  EXPECT_THROW(cz_contains_point(c, VectorXd::Zero(3)), std::invalid_argument);
}

TEST(CzIsEmpty, Examples) {
  std::mt19937_64 rng(6);
  EXPECT_FALSE(cz_is_empty(cz_from_zonotope(random_zonotope(2, 3, rng))));
  EXPECT_TRUE(cz_is_empty(ConstrainedZonotope(VectorXd::Zero(1), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1),
                                              VectorXd::Constant(1, 2.0))));
  for (int t = 0; t < 100; ++t) EXPECT_FALSE(cz_is_empty(random_feasible_cz(2, 5, 1 + t % 3, rng)));
}

TEST(CzIntervalHull, Cases) {
  std::mt19937_64 rng(7);
  const Zonotope z = random_zonotope(3, 6, rng);
  const IntervalVector a = interval_hull(z), b = cz_interval_hull(cz_from_zonotope(z));
  EXPECT_LE((a.lower - b.lower).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((a.upper - b.upper).cwiseAbs().maxCoeff(), 1e-9);

  // A = I pins beta to beta0.
  const VectorXd beta0 = random_vector(3, rng, 0.8);
  const MatrixXd g = random_matrix(2, 3, rng);
  const ConstrainedZonotope pinned(v2(1, -1), g, MatrixXd::Identity(3, 3), beta0);
  const IntervalVector h = cz_interval_hull(pinned);
  EXPECT_LE((h.lower - (v2(1, -1) + g * beta0)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(h.width().maxCoeff(), 1e-9);

  const ConstrainedZonotope empty(VectorXd::Zero(1), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1), VectorXd::Constant(1, 2.0));
  EXPECT_THROW(cz_interval_hull(empty), std::domain_error);
}

TEST(CzIntervalHull, IntersectionHullWithinOperandHulls) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    const ConstrainedZonotope a = random_feasible_cz(2, 4, 1, rng);
    const ConstrainedZonotope b = cz_from_zonotope(Zonotope(a.center() + random_vector(2, rng, 0.2), random_matrix(2, 3, rng)));
    const ConstrainedZonotope r = cz_intersect(a, b);
    if (cz_is_empty(r)) continue;
    const IntervalVector hr = cz_interval_hull(r), ha = cz_interval_hull(a), hb = cz_interval_hull(b);
    EXPECT_TRUE((hr.lower.array() >= ha.lower.cwiseMax(hb.lower).array() - 1e-8).all());
    EXPECT_TRUE((hr.upper.array() <= ha.upper.cwiseMin(hb.upper).array() + 1e-8).all());
  }
}

TEST(CzIntervalHull, TightAgainstSamples) {
  std::mt19937_64 rng(9);
  const ConstrainedZonotope c = random_feasible_cz(2, 4, 1, rng);
  const IntervalVector h = cz_interval_hull(c);
  ConstrainedSampler s(c);
  for (int i = 0; i < 1000; ++i) {
    const VectorXd x = s.sample(rng);
    ASSERT_TRUE((x.array() >= h.lower.array() - 1e-9).all() && (x.array() <= h.upper.array() + 1e-9).all());
  }
  for (Eigen::Index d = 0; d < 2; ++d) {
    VectorXd e = VectorXd::Zero(2);
    e(d) = 1.0;
    EXPECT_NEAR(cz_support_abs(c, e), std::max(std::abs(h.lower(d)), std::abs(h.upper(d))), 1e-9);
  }
}

TEST(CzReduce, NoOpWithinBudget) {
  std::mt19937_64 rng(10);
  const ConstrainedZonotope c = random_feasible_cz(2, 6, 2, rng);
  const ConstrainedZonotope r = cz_reduce(c, 5.0, 5);
  EXPECT_EQ(r.generators(), c.generators());
  EXPECT_EQ(r.con_matrix(), c.con_matrix());
  EXPECT_EQ(r.con_rhs(), c.con_rhs());
  EXPECT_EQ(r.center(), c.center());
}

TEST(CzReduce, SoundAndWithinBudgets) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const ConstrainedZonotope c = random_feasible_cz(2, 14, 5, rng);
    for (const auto& [order, cons] : {std::pair<double, Eigen::Index>{2.0, 1}, {3.0, 0}, {5.0, 2}, {1.0, 3}}) {
      const ConstrainedZonotope r = cz_reduce(c, order, cons);
      EXPECT_LE(r.num_generators(), static_cast<Eigen::Index>(std::ceil(order * 2)));
      EXPECT_LE(r.num_constraints(), cons);
      const IntervalVector hr = cz_interval_hull(r), hc = cz_interval_hull(c);
      EXPECT_TRUE(hr.contains(hc, 1e-8));
    }
  }
  const ConstrainedZonotope c = random_feasible_cz(2, 14, 5, rng);
  const ConstrainedZonotope r = cz_reduce(c, 2.0, 1);
  ConstrainedSampler s(c);
  for (int i = 0; i < 1000; ++i) ASSERT_TRUE(cz_contains_point(r, s.sample(rng), 1e-8));
  EXPECT_THROW(cz_reduce(c, 0.5, 1), std::invalid_argument);
  EXPECT_THROW(cz_reduce(c, 2.0, -1), std::invalid_argument);
}

TEST(CzOperations, MapSumProductSound) {
  std::mt19937_64 rng(12);
  const ConstrainedZonotope c = random_feasible_cz(2, 5, 2, rng);
  const MatrixXd a = random_matrix(3, 2, rng);
  const Zonotope z2 = random_zonotope(2, 2, rng);
  const Zonotope z1 = random_zonotope(1, 2, rng);
  const ConstrainedZonotope mapped = cz_linear_map(a, c);
  const ConstrainedZonotope summed = cz_minkowski_sum(c, z2);
  const ConstrainedZonotope product = cz_cartesian_product(c, z1);
  ConstrainedSampler s(c);
  for (int i = 0; i < 1000; ++i) {
    const VectorXd x = s.sample(rng);
    ASSERT_TRUE(cz_contains_point(mapped, a * x, 1e-8));
    ASSERT_TRUE(cz_contains_point(summed, x + sample_point(z2, rng), 1e-8));
    VectorXd xy(3);
    xy << x, sample_point(z1, rng);
    ASSERT_TRUE(cz_contains_point(product, xy, 1e-8));
  }
}

TEST(ConstrainedSampler, SamplesSatisfyConstraints) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 5; ++t) {
    const ConstrainedZonotope c = random_feasible_cz(3, 6, 2, rng);
    ConstrainedSampler s(c);
    for (int i = 0; i < 200; ++i) ASSERT_TRUE(cz_contains_point(c, s.sample(rng), 1e-9));
  }
  const ConstrainedZonotope empty(VectorXd::Zero(1), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1), VectorXd::Constant(1, 2.0));
  EXPECT_TRUE(ConstrainedSampler(empty).empty());
}

TEST(ConstrainedZonotope, DegenerateConsistencyWithZonotope) {
  std::mt19937_64 rng(14);
  const Zonotope z = random_zonotope(2, 4, rng);
  const ConstrainedZonotope c(z);
  ConstrainedSampler s(c);
  for (int i = 0; i < 1000; ++i) {
    const VectorXd x = s.sample(rng);
    ASSERT_TRUE(contains_point(z, x, 1e-9));
    const VectorXd out = outside_point(z, rng, 1e-3);
    ASSERT_EQ(cz_contains_point(c, out, 1e-9), contains_point(z, out, 1e-9));
  }
}
