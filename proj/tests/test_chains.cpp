#include <doctest.h>

#include "crw/chains.hpp"
#include "crw/errors.hpp"
#include "support.hpp"

using namespace crw;

namespace {

double fixed_point_defect(const IncrementKernel& k, const std::vector<double>& pi) {
  double worst = 0.0;
  for (std::size_t j = 0; j < k.states.size(); ++j) {
    double acc = -pi[j];
    for (std::size_t i = 0; i < k.states.size(); ++i) acc += pi[i] * k.rows[i][j];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

}  // namespace

TEST_CASE("two-state stationary distribution") {
  SUBCASE("symmetric chain splits evenly") {
    const auto s = stationary_two_state(make_two_state(0.5, 0.5));
    CHECK(s.up == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.down == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("p=0.5 q=0.25 evaluates to (0.6, 0.4)") {
    const auto s = stationary_two_state(make_two_state(0.5, 0.25));
    CHECK(s.up == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(s.down == doctest::Approx(0.4).epsilon(1e-15));

    const auto k = kernel(Chain{make_two_state(0.5, 0.25)});
    const auto pi = testsupport::power_iteration(k.rows);
    CHECK(std::abs(pi[0] - 0.6) < 1e-12);
    CHECK(std::abs(pi[1] - 0.4) < 1e-12);
  }
  SUBCASE("fixed point over a grid") {
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.95}) {
      for (double q : {0.05, 0.4, 0.6, 0.9}) {
        const Chain c{make_two_state(p, q)};
        const auto pi = stationary(c);
        CHECK(std::abs(pi[0] + pi[1] - 1.0) < 1e-12);
        CHECK(fixed_point_defect(kernel(c), pi) < 1e-12);
      }
    }
  }
}

TEST_CASE("symmetric-delay stationary distribution") {
  SUBCASE("no delay mass when r = 0") {
    const auto s = stationary_delay(make_symmetric_delay(0.3, 0.6, 0.0));
    CHECK(s.up == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.mid == 0.0);
    CHECK(s.down == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("p=1/4 q=1/3 r=1/2 gives (2/7, 3/7, 2/7)") {
    const auto s = stationary_delay(make_symmetric_delay(0.25, 1.0 / 3.0, 0.5));
    CHECK(s.up == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(s.mid == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
    CHECK(s.down == doctest::Approx(2.0 / 7.0).epsilon(1e-14));

    const auto k = kernel(Chain{make_symmetric_delay(0.25, 1.0 / 3.0, 0.5)});
    const auto pi = testsupport::power_iteration(k.rows);
    CHECK(std::abs(pi[1] - 3.0 / 7.0) < 1e-12);
  }
  SUBCASE("fixed point over a grid") {
    for (double p : {0.0, 0.2, 0.45}) {
      for (double q : {0.0, 0.3, 0.9}) {
        for (double r : {0.0, 0.25, 0.55}) {
          const Chain c{make_symmetric_delay(p, q, r)};
          const auto pi = stationary(c);
          CHECK(fixed_point_defect(kernel(c), pi) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("general stationary distribution") {
  SUBCASE("embedded symmetric-delay chain matches the closed form") {
    const auto delay = make_symmetric_delay(0.25, 1.0 / 3.0, 0.5);
    const auto g = embed(delay);
    const auto pi = stationary_general(g);
    const auto s = stationary_delay(delay);
    CHECK(std::abs(pi.up - s.up) < 1e-12);
    CHECK(std::abs(pi.mid - s.mid) < 1e-12);
    CHECK(std::abs(pi.down - s.down) < 1e-12);
  }
  SUBCASE("embedded two-state chain keeps its stationary vector") {
    const auto two = make_two_state(0.7, 0.2);
    const auto pi = stationary_general(embed(two));
    const auto s = stationary_two_state(two);
    CHECK(std::abs(pi.up - s.up) < 1e-12);
    CHECK(pi.mid < 1e-12);
    CHECK(std::abs(pi.down - s.down) < 1e-12);
  }
  SUBCASE("pinned three-state matrix: fixed point and power iteration agree") {
    const Chain c{testsupport::example_chain()};
    const auto pi = stationary(c);
    CHECK(fixed_point_defect(kernel(c), pi) < 1e-12);
    const auto ref = testsupport::power_iteration(kernel(c).rows);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(pi[j] - ref[j]) < 1e-12);
  }
  SUBCASE("absorbing delay state makes the chain reducible") {
    GeneralChain g;
    g.p = 0.3; g.p0 = 0.0;
    g.r1 = 0.0; g.r = 1.0;
    g.q = 0.4; g.q0 = 0.0;
    g.initial = {0.5, 0.0, 0.5};
    CHECK_THROWS_WITH_AS(stationary_general(g), doctest::Contains("stationary"),
                         Error);
    try {
      stationary_general(g);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Reducible);
    }
  }
}

TEST_CASE("validation names the violated invariant") {
  SUBCASE("two-state out-of-range p") {
    const auto v = validate(make_two_state(0.5, 0.5, 0.5));
    CHECK(v.empty());
    TwoStateChain bad{1.2, 0.5, {0.5, 0.5}};
    const auto violations = validate(bad);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("p out of range") != std::string::npos);
  }
  SUBCASE("two-state boundary values are rejected (open interval)") {
    CHECK(!validate(TwoStateChain{1.0, 0.5, {0.5, 0.5}}).empty());
    CHECK(!validate(TwoStateChain{0.5, 0.0, {0.5, 0.5}}).empty());
  }
  SUBCASE("general chain with p + p0 > 1") {
    GeneralChain g;
    g.p = 0.6; g.p0 = 0.5;
    const auto violations = validate(g);
    REQUIRE(!violations.empty());
    CHECK(violations[0].find("p+p0") != std::string::npos);
  }
  SUBCASE("delay chain with p + r > 1") {
    CHECK(!validate(make_symmetric_delay(0.7, 0.1, 0.4)).empty());
    CHECK(validate(make_symmetric_delay(0.7, 0.1, 0.3)).empty());
  }
  SUBCASE("initial distribution must sum to one") {
    TwoStateChain c{0.5, 0.5, {0.7, 0.2}};
    CHECK(!validate(c).empty());
    CHECK_THROWS_AS(ensure_valid(Chain{c}), Error);
  }
}

TEST_CASE("kernel initial override") {
  const Chain c{testsupport::example_chain()};
  const double init[3] = {0.2, 0.3, 0.5};
  const auto k = kernel(c, init);
  CHECK(k.initial[0] == 0.2);
  CHECK(k.initial[2] == 0.5);
  const double bad[3] = {0.2, 0.3, 0.6};
  CHECK_THROWS_AS(kernel(c, bad), Error);
  const double short_init[2] = {0.5, 0.5};
  CHECK_THROWS_AS(kernel(c, std::span<const double>(short_init, 2)), Error);
}
