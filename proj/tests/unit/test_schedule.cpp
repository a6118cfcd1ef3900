#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "pvqa/schedule.hpp"

using namespace pvqa;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) {
      return true;
    }
  }
  return false;
}

std::vector<Schedule> random_schedules(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Schedule> out;
  for (int k = 0; k < count; ++k) {
    const double T = 0.1 + 10.0 * u();
    ContinuousSchedule c{{}, T};
    for (int i = 0; i < 7; ++i) {
      c.values.push_back(u());
    }
    out.emplace_back(c);
    out.emplace_back(LinearSchedule{u(), u(), T});
    out.emplace_back(AnnealerSchedule{u(), u(), T});
    std::vector<double> b{u() * T, u() * T, u() * T, u() * T};
    std::sort(b.begin(), b.end());
    out.emplace_back(QaoaSchedule{b, T});
  }
  return out;
}

}  // namespace

TEST_CASE("linear schedule values") {
  CHECK(eval_s(LinearSchedule{0.5, 0.5, 3.0}, 1.7) == 0.5);
  CHECK(eval_s(LinearSchedule{1.0, 0.0, 0.1}, 0.05) == doctest::Approx(0.5));
  CHECK(eval_s(LinearSchedule{0.0, 1.0, 2.0}, 0.0) == 0.0);
  CHECK(eval_s(LinearSchedule{0.0, 1.0, 2.0}, 2.0) == 1.0);
  CHECK_THROWS_AS(eval_s(LinearSchedule{0.0, 1.0, 2.0}, 2.5), std::out_of_range);
  CHECK_THROWS_AS(eval_s(LinearSchedule{0.0, 1.0, 2.0}, -0.1), std::out_of_range);
}

TEST_CASE("qaoa schedule is bang-bang with half-open intervals") {
  const QaoaSchedule q{{0.3, 0.7}, 1.0};
  CHECK(eval_s(q, 0.1) == 1.0);
  CHECK(eval_s(q, 0.3) == 0.0);
  CHECK(eval_s(q, 0.5) == 0.0);
  CHECK(eval_s(q, 0.9) == 0.0);
  const QaoaSchedule q2{{0.1, 0.2, 0.4, 0.6}, 1.0};
  CHECK(eval_s(q2, 0.0) == 1.0);
  CHECK(eval_s(q2, 0.15) == 0.0);
  CHECK(eval_s(q2, 0.2) == 1.0);
  CHECK(eval_s(q2, 0.5) == 0.0);
}

TEST_CASE("continuous schedule picks the containing sub-interval") {
  const ContinuousSchedule c{{0.1, 0.2, 0.3, 0.4}, 2.0};
  CHECK(eval_s(c, 0.0) == 0.1);
  CHECK(eval_s(c, 0.49) == 0.1);
  CHECK(eval_s(c, 0.5) == 0.2);
  CHECK(eval_s(c, 1.9) == 0.4);
  CHECK(eval_s(c, 2.0) == 0.4);
}

TEST_CASE("annealer schedule interpolates between its anchors") {
  const AnnealerSchedule a{0.4, 0.8, 10.0};
  CHECK(eval_s(a, 0.0) == 0.0);
  CHECK(eval_s(a, 0.5) == doctest::Approx(0.2));
  CHECK(eval_s(a, 1.0) == doctest::Approx(0.4));
  CHECK(eval_s(a, 5.0) == doctest::Approx(0.6));
  CHECK(eval_s(a, 9.0) == doctest::Approx(0.8));
  CHECK(eval_s(a, 10.0) == doctest::Approx(1.0));
}

TEST_CASE("validate reports every violation") {
  CHECK(contains(validate(QaoaSchedule{{0.5, 0.3}, 1.0}), "s_2 < s_1"));
  CHECK(contains(validate(LinearSchedule{1.2, 0.5, 1.0}), "s out of [0,1]"));
  CHECK(validate(ContinuousSchedule{std::vector<double>(10, 0.5), 1.0}).empty());
  const auto many = validate(LinearSchedule{-0.1, 1.5, -1.0});
  CHECK(many.size() == 3);
  CHECK(contains(validate(QaoaSchedule{{0.2, 1.5}, 1.0}), "s_2 > T"));
  CHECK(contains(validate(QaoaSchedule{{0.2}, 1.0}), "2p breakpoints"));
}

TEST_CASE("clamp_project clips and sorts") {
  const auto l = std::get<LinearSchedule>(clamp_project(LinearSchedule{-0.1, 1.3, 1.0}));
  CHECK(l.s1 == 0.0);
  CHECK(l.s2 == 1.0);
  const auto q = std::get<QaoaSchedule>(clamp_project(QaoaSchedule{{0.8, 0.2}, 1.0}));
  CHECK(q.breakpoints == std::vector<double>{0.2, 0.8});
  const auto q2 = std::get<QaoaSchedule>(clamp_project(QaoaSchedule{{1.4, -0.2}, 1.0}));
  CHECK(q2.breakpoints == std::vector<double>{0.0, 1.0});
  const LinearSchedule ok{0.3, 0.6, 2.0};
  const auto same = std::get<LinearSchedule>(clamp_project(ok));
  CHECK(same.s1 == ok.s1);
  CHECK(same.s2 == ok.s2);
}

TEST_CASE("clamp_project is idempotent and yields valid schedules") {
  std::mt19937_64 rng(5);
  auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 3.0 - 1.0; };
  for (int k = 0; k < 200; ++k) {
    const double T = 2.0;
    std::vector<Schedule> raw{ContinuousSchedule{{u(), u(), u()}, T}, LinearSchedule{u(), u(), T},
                              AnnealerSchedule{u(), u(), T}, QaoaSchedule{{u() * T, u() * T, u() * T, u() * T}, T}};
    for (const auto& s : raw) {
      const auto once = clamp_project(s);
      CHECK(validate(once).empty());
      CHECK(nlohmann::json(clamp_project(once)) == nlohmann::json(once));
    }
  }
}

TEST_CASE("values stay in the unit interval") {
  for (const auto& s : random_schedules(17, 50)) {
    const double T = horizon(s);
    for (int i = 0; i <= 100; ++i) {
      const double v = eval_s(s, T * i / 100.0);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("linear zero-to-one path is the baseline path") {
  const LinearSchedule l{0.0, 1.0, 4.0};
  for (int i = 0; i <= 8; ++i) {
    CHECK(eval_s(l, 0.5 * i) == doctest::Approx(0.5 * i / 4.0));
  }
}

TEST_CASE("qaoa on and off time add up to the last breakpoint") {
  const QaoaSchedule q{{0.1, 0.25, 0.5, 0.55, 0.7, 0.9}, 1.0};
  double on = 0.0;
  double off = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < q.breakpoints.size(); ++i) {
    (i % 2 == 0 ? on : off) += q.breakpoints[i] - prev;
    prev = q.breakpoints[i];
  }
  CHECK(on + off == doctest::Approx(0.9));
  double seg_total = 0.0;
  for (const auto& seg : segments(q)) {
    seg_total += seg.end - seg.begin;
    CHECK(seg.s_begin == seg.s_end);
  }
  CHECK(seg_total == doctest::Approx(0.9));
}

TEST_CASE("segments cover the evolved window") {
  const auto lin = segments(LinearSchedule{0.2, 0.9, 3.0});
  REQUIRE(lin.size() == 1);
  CHECK(lin[0].begin == 0.0);
  CHECK(lin[0].end == 3.0);
  CHECK(lin[0].s_begin == 0.2);
  CHECK(lin[0].s_end == 0.9);
  CHECK(segments(ContinuousSchedule{std::vector<double>(5, 0.1), 1.0}).size() == 5);
  CHECK(segments(AnnealerSchedule{0.2, 0.9, 1.0}).size() == 3);
  // Zero-length pieces are dropped.
  CHECK(segments(QaoaSchedule{{0.0, 0.4}, 1.0}).size() == 1);
  CHECK(segments(QaoaSchedule{{0.0, 0.0}, 1.0}).empty());
  for (const auto& s : random_schedules(3, 10)) {
    for (const auto& seg : segments(s)) {
      const double mid = 0.5 * (seg.begin + seg.end);
      CHECK(seg.value_at(mid) == doctest::Approx(eval_s(s, mid)));
    }
  }
}

TEST_CASE("schedule json descriptors round trip") {
  const nlohmann::json j = Schedule{LinearSchedule{0.5, 0.5, 1.0}};
  CHECK(j.at("kind") == "linear");
  CHECK(j.at("s1") == 0.5);
  CHECK(j.at("T") == 1.0);
  for (const auto& s : random_schedules(9, 5)) {
    CHECK(nlohmann::json(schedule_from_json(nlohmann::json(s))) == nlohmann::json(s));
    CHECK(schedule_kind(schedule_from_json(nlohmann::json(s))) == schedule_kind(s));
  }
  CHECK_THROWS(schedule_from_json(nlohmann::json{{"kind", "spiral"}, {"T", 1.0}}));
}
