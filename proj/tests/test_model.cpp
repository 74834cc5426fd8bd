#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "preyswitch/error.hpp"
#include "preyswitch/model.hpp"
#include "support.hpp"

using namespace preyswitch;
using namespace testing_support;

namespace {

template <class F>
std::string error_message(ErrorKind expected, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.kind() == expected);
    return e.what();
  }
  FAIL("no error thrown");
  return {};
}

}  // namespace

TEST_CASE("reference parameters are admissible with the expected derived constants") {
  const Parameters p = reference_params();
  CHECK(p.phi() == doctest::Approx(0.710).epsilon(1e-14));
  CHECK(p.tau() == doctest::Approx(0.790 / (0.948 * 0.772)).epsilon(1e-14));
  CHECK(p.tau() == doctest::Approx(1.0794).epsilon(1e-4));
  CHECK(p.b_q() == doctest::Approx(0.5745).epsilon(1e-4));
}

TEST_CASE("constraint violations name the inequality") {
  RawParameters r = reference_raw();
  r.r1 = 0.5;
  r.r2 = 0.5;
  CHECK(error_message(ErrorKind::ConstraintViolation, [&] { validate_parameters(r); }).find("r1 > r2") !=
        std::string::npos);

  r = reference_raw();
  r.q2 = 0.1;
  r.a_q = 1.0;
  r.q1 = 0.5;
  CHECK(error_message(ErrorKind::ConstraintViolation, [&] { validate_parameters(r); }).find("b_q >= 0") !=
        std::string::npos);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double RawParameters::*fields[] = {&RawParameters::r1, &RawParameters::r2,    &RawParameters::a_q,
                                     &RawParameters::q1, &RawParameters::q2,    &RawParameters::beta1,
                                     &RawParameters::beta2, &RawParameters::m, &RawParameters::e};
  for (auto f : fields) {
    RawParameters bad = reference_raw();
    bad.*f = nan;
    CHECK_THROWS_AS(validate_parameters(bad), Error);
    bad = reference_raw();
    bad.*f = -1.0;
    CHECK_THROWS_AS(validate_parameters(bad), Error);
  }
}

TEST_CASE("q1 = 0 is admissible but tau-dependent operations are not") {
  RawParameters r = reference_raw();
  r.q1 = 0.0;
  const Parameters p = validate_parameters(r);
  CHECK_FALSE(p.has_tau());
  error_message(ErrorKind::DegenerateTau, [&] { (void)p.tau(); });
  error_message(ErrorKind::DegenerateTau, [&] { first_integral_F(0.5, 0.9, p); });
}

TEST_CASE("biological to model coordinates") {
  const Parameters p = reference_params();
  const State o = to_model_coords({0, 0, 0}, p);
  CHECK(o.x == 0.0);
  CHECK(o.y == 0.0);
  CHECK(o.z == 0.0);
  const State u = to_model_coords({p.beta1(), p.a_q() * p.beta2(), p.beta1()}, p);
  CHECK(u.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u.y == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u.z == doctest::Approx(1.0).epsilon(1e-15));
  const State w = to_model_coords({0.994, 0.660 * 0.896, 1.988}, p);
  CHECK(w.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.y == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.z == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(to_model_coords({-1, 0, 0}, p), Error);
}

TEST_CASE("field values") {
  const Parameters p = reference_params();
  for (double y0 : {0.0, 0.3, 1.0, 7.5}) {
    const Vec3 v = eval_field(Piece::X, {p.tau(), y0, p.r1()}, p);
    CHECK(std::abs(v[0]) <= 1e-15);
    CHECK(v[1] == doctest::Approx(p.r2() * y0));
    CHECK(std::abs(v[2]) <= 1e-15);
  }
  const Vec3 y = eval_field(Piece::Y, {0.4, 0.7, 0.0}, p);
  CHECK(y[0] == doctest::Approx(p.r1() * 0.4));
  CHECK(y[1] == doctest::Approx(p.r2() * 0.7));
  CHECK(y[2] == 0.0);
  const Vec3 lv = eval_field(Piece::PlanarLV, {0.5, 123.0, 0.9}, p);
  CHECK(lv[0] == doctest::Approx(-0.032).epsilon(1e-12));
  CHECK(lv[1] == 0.0);
  CHECK(lv[2] == doctest::Approx(-0.381665).epsilon(1e-6));
  const Vec2 planar = field_planar(0.5, 0.9, p);
  CHECK(planar[0] == lv[0]);
  CHECK(planar[1] == lv[2]);
}

TEST_CASE("X leaves the plane y = 0 invariant") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Parameters p = validate_parameters(random_raw(rng));
    const Vec3 v = field_x({rng.uniform(0, 3), 0.0, rng.uniform(0, 3)}, p);
    CHECK(v[1] == 0.0);
  }
}

TEST_CASE("lie derivatives") {
  const Parameters p = reference_params();
  const LieDerivatives fold = lie_derivatives({1.0, p.phi()}, p);
  CHECK(std::abs(fold.xh) <= 1e-15);
  CHECK(fold.x2h == doctest::Approx(0.710 * (0.790 - 0.948 * 0.772)).epsilon(1e-12));
  CHECK(fold.x2h == doctest::Approx(0.041282).epsilon(1e-5));
  const LieDerivatives axis = lie_derivatives({0.0, 0.8}, p);
  CHECK(axis.xh == 0.0);
  CHECK(axis.yh == 0.0);
  CHECK(axis.x2h == 0.0);
  const LieDerivatives c = lie_derivatives({1.0, 0.3}, p);
  CHECK(c.yh == doctest::Approx(0.710 + 0.896 / 0.994 * 0.3).epsilon(1e-14));
  CHECK(c.yh == doctest::Approx(0.98043).epsilon(1e-5));
}

TEST_CASE("classification examples") {
  const Parameters p = reference_params();
  CHECK(classify_sigma_point({1.0, 0.3}, p) == RegionLabel::Crossing);
  CHECK(classify_sigma_point({0.5, 0.710}, p) == RegionLabel::VisibleFold);
  CHECK(classify_sigma_point({p.tau(), p.phi()}, p) == RegionLabel::Cusp);
  CHECK(classify_sigma_point({0.5, 1.5}, p) == RegionLabel::Sliding);
  CHECK(classify_sigma_point({1.5, p.phi()}, p) == RegionLabel::Boundary);
  CHECK(classify_sigma_point({0.5, 0.0}, p) == RegionLabel::Boundary);
  CHECK(classify_sigma_point({0.0, 0.5}, p) == RegionLabel::OriginLine);
  CHECK_THROWS_AS(classify_sigma_point({-0.1, 0.5}, p), Error);
}

TEST_CASE("classification agrees with the sign-based classifier; escaping region is empty") {
  Rng rng(2024);
  int sliding = 0, crossing = 0;
  for (int i = 0; i < 10000; ++i) {
    const RawParameters raw = i % 2 == 0 ? reference_raw(rng.uniform(0.5, 10)) : random_raw(rng);
    const Parameters p = validate_parameters(raw);
    const double x = rng.uniform(0.0, 2.0 * p.tau());
    const double z = rng.uniform(0.0, 2.0 * p.phi());
    const RegionLabel label = classify_sigma_point({x, z}, p);
    const SignRegion truth = sign_region(raw, x, z);
    CHECK(truth != SignRegion::Escaping);
    CHECK(lie_derivatives({x, z}, p).yh > 0.0);
    if (truth == SignRegion::Sliding) {
      CHECK(label == RegionLabel::Sliding);
      ++sliding;
    } else if (truth == SignRegion::Crossing) {
      CHECK(label == RegionLabel::Crossing);
      ++crossing;
    }
  }
  CHECK(sliding > 1000);
  CHECK(crossing > 1000);

  // boundary points are hit exactly
  for (int i = 0; i < 200; ++i) {
    const RawParameters raw = random_raw(rng);
    const Parameters p = validate_parameters(raw);
    const double x = rng.uniform(0.01, 0.99) * p.tau();
    CHECK(sign_region(raw, x, p.phi()) == SignRegion::Fold);
    CHECK(classify_sigma_point({x, p.phi()}, p) == RegionLabel::VisibleFold);
  }
}

TEST_CASE("fold visibility and cusp degeneracy") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const Parameters p = validate_parameters(random_raw(rng));
    const double x = rng.uniform(1e-3, 1 - 1e-3) * p.tau();
    CHECK(lie_derivatives({x, p.phi()}, p).x2h > 0.0);
    CHECK(std::abs(lie_derivatives({p.tau(), p.phi()}, p).x2h) <= 1e-14);
  }
}

TEST_CASE("first integral F") {
  const Parameters p = reference_params();
  CHECK(std::abs(first_integral_F(p.tau(), p.r1(), p)) <= 1e-15);
  // -m - r1 + e q1 x + z - m log(e q1 x / m) - r1 log(z / r1), by hand
  const double k = 0.948 * 0.772;
  const double hand = -0.790 - 0.836 + k * 0.5 + 0.9 - 0.790 * std::log(k * 0.5 / 0.790) - 0.836 * std::log(0.9 / 0.836);
  CHECK(first_integral_F(0.5, 0.9, p) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(first_integral_F(0.5, 0.9, p) == doctest::Approx(0.186245).epsilon(1e-5));
  CHECK_THROWS_AS(first_integral_F(0.0, 0.9, p), Error);

  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(1e-3, 3.0);
    const double z = rng.uniform(1e-3, 3.0);
    if (std::hypot(x - p.tau(), z - p.r1()) < 1e-3) continue;
    CHECK(first_integral_F(x, z, p) > 0.0);
  }
}
