#include <random>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "evauth/threshold.hpp"
#include "oracles.hpp"

using namespace evauth;

namespace {

AggregateScorePoint as_point(std::uint64_t index, double value, Timestamp ts = -1) {
  AggregateScorePoint p;
  p.index = index;
  p.ts = ts >= 0 ? ts : static_cast<Timestamp>(index) * 60;
  p.value = value;
  return p;
}

std::vector<ThresholdPoint> run_strategy(const ThresholdConfig& cfg,
                                         const std::vector<double>& scores) {
  auto strategy = make_strategy(cfg);
  std::vector<ThresholdPoint> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.push_back(strategy->observe(as_point(i + 1, scores[i])));
  }
  return out;
}

}  // namespace

TEST_CASE("static_fit is mean minus population sd") {
  CHECK(static_fit({10, 20, 30}) == Catch::Approx(11.835034190722740).epsilon(1e-12));
  CHECK(static_fit({5, 5, 5}) == Catch::Approx(5.0));
  CHECK_THROWS_AS(static_fit({7}), TrainingError);
  CHECK_THROWS_AS(static_fit({}), TrainingError);
}

TEST_CASE("static strategy trains then freezes") {
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::static_threshold;
  cfg.training_len_events = 3;
  const auto points = run_strategy(cfg, {10, 20, 30, 7, 99, 4});
  for (int i = 0; i < 3; ++i) CHECK(points[i].warmup());
  for (int i = 3; i < 6; ++i) {
    REQUIRE_FALSE(points[i].warmup());
    CHECK(*points[i].value == Catch::Approx(11.835034190722740));
  }
}

TEST_CASE("static strategy day-based training window") {
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::static_threshold;
  cfg.training_len_days = 2.0;
  auto strategy = make_strategy(cfg);
  const Timestamp t0 = 1000;
  // two points inside the window, one exactly at the boundary
  CHECK(strategy->observe(as_point(1, 10, t0)).warmup());
  CHECK(strategy->observe(as_point(2, 20, t0 + 86400)).warmup());
  const auto p3 = strategy->observe(as_point(3, 99, t0 + 2 * 86400));
  REQUIRE_FALSE(p3.warmup());
  CHECK(*p3.value == Catch::Approx(15.0 - 5.0));  // mean 15, sd 5
}

TEST_CASE("sd_block uses the previous block, constant within a block") {
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::sd_block;
  cfg.block_len_events = 3;
  const auto points = run_strategy(cfg, {10, 20, 30, 40, 40, 40, 1, 2, 3});
  for (int i = 0; i < 3; ++i) CHECK(points[i].warmup());
  for (int i = 3; i < 6; ++i) CHECK(*points[i].value == Catch::Approx(11.835034190722740));
  for (int i = 6; i < 9; ++i) CHECK(*points[i].value == Catch::Approx(40.0));
}

TEST_CASE("sd_block with unit blocks tracks the previous score") {
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::sd_block;
  cfg.block_len_events = 1;
  const std::vector<double> scores{42, 7, 19, 3};
  const auto points = run_strategy(cfg, scores);
  CHECK(points[0].warmup());
  for (std::size_t i = 1; i < scores.size(); ++i) {
    CHECK(*points[i].value == Catch::Approx(scores[i - 1]));
  }
}

TEST_CASE("sd_block matches the batch oracle") {
  std::mt19937_64 rng(5);
  for (std::size_t block_len : {1u, 3u, 10u}) {
    ThresholdConfig cfg;
    cfg.strategy = ThresholdStrategyKind::sd_block;
    cfg.block_len_events = static_cast<int>(block_len);
    std::vector<double> scores;
    for (int i = 0; i < 120; ++i) {
      scores.push_back(static_cast<double>(rng() % 10000) / 100.0);
    }
    const auto points = run_strategy(cfg, scores);
    for (std::size_t i = 1; i <= scores.size(); ++i) {
      const auto expected = oracle::sd_block_expected(scores, block_len, i);
      if (!expected) {
        CHECK(points[i - 1].warmup());
      } else {
        REQUIRE_FALSE(points[i - 1].warmup());
        CHECK(*points[i - 1].value == Catch::Approx(*expected).margin(1e-9));
      }
    }
  }
}

TEST_CASE("ewma_direct needs no training and follows the recurrence") {
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::ewma_direct;
  cfg.alpha = 0.2;

  SECTION("first threshold equals the first score") {
    const auto points = run_strategy(cfg, {50});
    REQUIRE(points.size() == 1);
    REQUIRE_FALSE(points[0].warmup());
    CHECK(*points[0].value == Catch::Approx(50.0));
  }
  SECTION("spec recurrence") {
    const auto points = run_strategy(cfg, {50, 60, 70});
    CHECK(*points[0].value == Catch::Approx(50.0));
    CHECK(*points[1].value == Catch::Approx(50.0));  // 0.2*50 + 0.8*50
    CHECK(*points[2].value == Catch::Approx(52.0));  // 0.2*60 + 0.8*50
  }
  SECTION("alpha = 1 shifts the stream by one") {
    cfg.alpha = 1.0;
    const std::vector<double> scores{3, 14, 15, 92, 65};
    const auto points = run_strategy(cfg, scores);
    CHECK(*points[0].value == Catch::Approx(3.0));
    for (std::size_t i = 1; i < scores.size(); ++i) {
      CHECK(*points[i].value == Catch::Approx(scores[i - 1]));
    }
  }
}

TEST_CASE("ewma_direct matches the closed-form oracle") {
  std::mt19937_64 rng(9);
  for (double alpha : {0.05, 0.2, 0.5, 1.0}) {
    ThresholdConfig cfg;
    cfg.strategy = ThresholdStrategyKind::ewma_direct;
    cfg.alpha = alpha;
    std::vector<double> scores;
    for (int i = 0; i < 100; ++i) scores.push_back(static_cast<double>(rng() % 100));
    const auto points = run_strategy(cfg, scores);
    for (std::size_t t = 1; t <= scores.size(); ++t) {
      CHECK(*points[t - 1].value ==
            Catch::Approx(oracle::ewma_closed_form(scores, alpha, t)).margin(1e-9));
    }
  }
}

TEST_CASE("ewma_direct stays within the range of its inputs") {
  std::mt19937_64 rng(13);
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::ewma_direct;
  cfg.alpha = 0.3;
  std::vector<double> scores;
  for (int i = 0; i < 300; ++i) scores.push_back(20.0 + static_cast<double>(rng() % 600) / 10.0);
  for (const auto& p : run_strategy(cfg, scores)) {
    CHECK(*p.value >= 20.0);
    CHECK(*p.value <= 80.0);
  }
}

TEST_CASE("block_average") {
  CHECK(block_average({40, 50, 60}) == Catch::Approx(50.0));
  CHECK(block_average({17.5}) == Catch::Approx(17.5));
  CHECK_THROWS_AS(block_average({}), ValidationError);
}

TEST_CASE("ewma_sd_block trains, then blends block averages") {
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::ewma_sd_block;
  cfg.training_len_events = 3;
  cfg.asba_block_size = 3;
  cfg.alpha = 0.2;
  const auto points = run_strategy(cfg, {10, 20, 30, 50, 50, 50, 1, 1, 1});
  for (int i = 0; i < 3; ++i) CHECK(points[i].warmup());
  // first monitored block holds the trained threshold
  for (int i = 3; i < 6; ++i) {
    CHECK(*points[i].value == Catch::Approx(11.835034190722740));
  }
  // next block: 0.2 * 50 + 0.8 * 11.835034190722740
  for (int i = 6; i < 9; ++i) {
    CHECK(*points[i].value == Catch::Approx(19.468027352578192).epsilon(1e-12));
  }
}

TEST_CASE("ewma_sd_block with unit blocks degenerates to the direct recurrence") {
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::ewma_sd_block;
  cfg.training_len_events = 2;
  cfg.asba_block_size = 1;
  cfg.alpha = 0.2;
  const std::vector<double> scores{10, 20, 40, 50, 60};
  const auto points = run_strategy(cfg, scores);
  CHECK(points[0].warmup());
  CHECK(points[1].warmup());
  double expected = static_fit({10, 20});
  for (std::size_t i = 2; i < scores.size(); ++i) {
    CHECK(*points[i].value == Catch::Approx(expected));
    expected = 0.2 * scores[i] + 0.8 * expected;
  }
}

TEST_CASE("ewma_sd_block day-based training window") {
  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::ewma_sd_block;
  cfg.training_len_days = 1.0;
  cfg.asba_block_size = 2;
  cfg.alpha = 0.5;
  auto strategy = make_strategy(cfg);
  const Timestamp t0 = 5000;
  CHECK(strategy->observe(as_point(1, 10, t0)).warmup());
  CHECK(strategy->observe(as_point(2, 20, t0 + 43200)).warmup());
  // first point past the one-day boundary is monitored with the trained value
  const auto p3 = strategy->observe(as_point(3, 40, t0 + 86400));
  REQUIRE_FALSE(p3.warmup());
  CHECK(*p3.value == Catch::Approx(10.0));  // mean 15 - sd 5
  const auto p4 = strategy->observe(as_point(4, 60, t0 + 90000));
  CHECK(*p4.value == Catch::Approx(10.0));  // block of 2 completes after this point
  const auto p5 = strategy->observe(as_point(5, 60, t0 + 93600));
  CHECK(*p5.value == Catch::Approx(0.5 * 50.0 + 0.5 * 10.0));
}

TEST_CASE("constant streams are fixed points of every strategy") {
  const std::vector<double> scores(40, 33.0);
  for (auto kind : {ThresholdStrategyKind::static_threshold, ThresholdStrategyKind::sd_block,
                    ThresholdStrategyKind::ewma_direct, ThresholdStrategyKind::ewma_sd_block}) {
    ThresholdConfig cfg;
    cfg.strategy = kind;
    cfg.training_len_events = 10;
    cfg.block_len_events = 10;
    cfg.asba_block_size = 4;
    for (const auto& p : run_strategy(cfg, scores)) {
      if (p.warmup()) continue;
      CHECK(*p.value == Catch::Approx(33.0));
    }
  }
}

TEST_CASE("one threshold point per score point; warmup prefix lengths are exact") {
  std::vector<double> scores;
  std::mt19937_64 rng(21);
  for (int i = 0; i < 137; ++i) scores.push_back(static_cast<double>(rng() % 100));

  auto warmup_len = [&](const ThresholdConfig& cfg) {
    const auto points = run_strategy(cfg, scores);
    REQUIRE(points.size() == scores.size());
    std::size_t n = 0;
    while (n < points.size() && points[n].warmup()) ++n;
    for (std::size_t i = n; i < points.size(); ++i) CHECK_FALSE(points[i].warmup());
    return n;
  };

  ThresholdConfig cfg;
  cfg.strategy = ThresholdStrategyKind::ewma_direct;
  CHECK(warmup_len(cfg) == 0);

  cfg.strategy = ThresholdStrategyKind::sd_block;
  cfg.block_len_events = 25;
  CHECK(warmup_len(cfg) == 25);

  cfg.strategy = ThresholdStrategyKind::static_threshold;
  cfg.training_len_events = 17;
  CHECK(warmup_len(cfg) == 17);

  cfg.strategy = ThresholdStrategyKind::ewma_sd_block;
  cfg.training_len_events = 31;
  cfg.asba_block_size = 8;
  CHECK(warmup_len(cfg) == 31);
}

TEST_CASE("threshold CSV format") {
  std::vector<ThresholdPoint> points;
  points.push_back({1, 1000, std::nullopt});
  points.push_back({2, 2000, 11.835034190722740});
  std::ostringstream out;
  write_threshold_csv(out, points);
  CHECK(out.str() ==
        "index,ts,threshold,warmup\n"
        "1,1000,warmup,1\n"
        "2,2000,11.835034,0\n");
}
