#include "doctest.h"

#include <limits>
#include <random>
#include <vector>

#include "deepair/queueing.hpp"

using namespace deepair;

namespace {

std::vector<TaskProfile> copies(int n, const TaskProfile& t = {}) { return std::vector<TaskProfile>(n, t); }

// Independent oracle: delay and stability straight from the parameters.
bool fits_by_hand(int n, const TaskProfile& t, double f, double v) {
  const double load = n * t.arrival_rate * t.size_bits * t.cycles_per_bit;
  if (f - load <= 0) return false;
  return t.size_bits / v + n * t.size_bits * t.cycles_per_bit / (f - load) <= t.max_delay;
}

}  // namespace

TEST_CASE("local and uav service times") {
  TaskProfile t;
  CHECK(local_delay(t, 1e7) == doctest::Approx(4.5));
  CHECK(uav_service_time(t, ServingSpec{}) == doctest::Approx(0.15));
  CHECK(uav_service_time(t, ServingSpec{}) == doctest::Approx(local_delay(t, 3e8)));
  TaskProfile t2 = t;
  t2.cycles_per_bit *= 2;
  CHECK(local_delay(t2, 1e7) == doctest::Approx(9.0));
  CHECK(local_delay(t, 1e30) < 1e-20);
}

TEST_CASE("summed-numerator delay hand values") {
  const ServingSpec spec;
  CHECK(mm1_total_delay(copies(1), spec) == doctest::Approx(4.5e7 / (3e8 - 1.35e7)));
  CHECK(mm1_total_delay(copies(1), spec) == doctest::Approx(0.1571).epsilon(1e-3));
  CHECK(mm1_total_delay(copies(5), spec) == doctest::Approx(0.9677).epsilon(1e-4));
  CHECK_THROWS_AS(mm1_total_delay(copies(23), spec), CapacityExceeded);
}

TEST_CASE("queueing delay is total minus own service") {
  const ServingSpec spec;
  CHECK(mm1_queueing_delay(copies(5), spec) == doctest::Approx(0.8177).epsilon(1e-3));
  CHECK(mm1_queueing_delay(copies(1), spec) == doctest::Approx(0.0071).epsilon(1e-2));
  CHECK(mm1_queueing_delay(copies(3), spec) >= 0.0);
}

TEST_CASE("textbook sojourn is a separate quantity") {
  const ServingSpec spec;
  const TaskProfile t;
  // 1 / (mu - 5 lambda) with mu = 1 / 0.15
  CHECK(mm1_sojourn_time(t, copies(5), spec) == doctest::Approx(1.0 / (1.0 / 0.15 - 1.5)));
}

TEST_CASE("delay is increasing in load and decreasing in capacity") {
  const ServingSpec spec;
  double prev = 0;
  for (int n = 1; n <= 22; ++n) {
    const double d = mm1_total_delay(copies(n), spec);
    CHECK(d > prev);
    prev = d;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double f = 1e8; f <= 1e9; f += 5e7) {
    const double d = mm1_total_delay(copies(5), ServingSpec{f});
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("total task delay and the inclusive deadline") {
  const ServingSpec spec;
  const RadioParams radio;
  const TaskProfile t;
  const auto five = total_task_delay(true, t, spec, copies(5), radio, 1e7);
  CHECK(five.network == doctest::Approx(0.005));
  CHECK(five.total == doctest::Approx(0.9727).epsilon(1e-4));
  CHECK(five.total == doctest::Approx(five.network + five.service));
  CHECK(five.success);

  const auto six = total_task_delay(true, t, spec, copies(6), radio, 1e7);
  CHECK(six.total == doctest::Approx(2.7e8 / 2.19e8 + 0.005));
  CHECK_FALSE(six.success);

  const auto local = total_task_delay(false, t, spec, {}, radio, 4.5e7);
  CHECK(local.network == 0.0);
  CHECK(local.total == 1.0);
  CHECK(local.success);

  CHECK_THROWS_AS(total_task_delay(true, t, spec, copies(30), radio, 1e7), CapacityExceeded);
}

TEST_CASE("max users per uav against an increment oracle") {
  const ServingSpec spec;
  const RadioParams radio;
  TaskProfile t;
  CHECK(max_users_per_uav(t, spec, radio) == 5);

  t.max_delay = std::numeric_limits<double>::infinity();
  CHECK(max_users_per_uav(t, spec, radio) == 22);

  t = {};
  CHECK(max_users_per_uav(t, ServingSpec{6e8}, radio) >= 5);

  t.max_delay = 0.1;
  CHECK(max_users_per_uav(t, spec, radio) == 0);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    TaskProfile p;
    p.size_bits = 1e5 + 9e5 * u(rng);
    p.cycles_per_bit = 10 + 190 * u(rng);
    p.arrival_rate = 0.05 + u(rng);
    p.max_delay = 0.2 + 3 * u(rng);
    const ServingSpec s{1e8 + 9e8 * u(rng)};
    int expect = 0;
    while (fits_by_hand(expect + 1, p, s.capacity, radio.data_rate)) ++expect;
    REQUIRE(max_users_per_uav(p, s, radio) == expect);
  }
}

TEST_CASE("group feasibility") {
  const ServingSpec spec;
  const RadioParams radio;
  CHECK(group_feasible(copies(5), spec, radio));
  CHECK_FALSE(group_feasible(copies(6), spec, radio));
  CHECK(group_feasible({}, spec, radio));
}
