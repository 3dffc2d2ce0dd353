#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "feedsim/poisson_feed.hpp"

using namespace feedsim;

namespace {

Population three_senders() {
  return make_population_with_signals({2.0, 1.0, 1.0}, {SignalModel(0.75, 0.25)},
                                      {1, 1, 0}, WorldState::one);
}

}  // namespace

TEST_CASE("arrival times are sorted, interior, and empty at rate zero") {
  RngEngine rng(3);
  CHECK(sample_arrivals(0.0, 10.0, rng).empty());
  const auto times = sample_arrivals(3.0, 10.0, rng);
  CHECK(!times.empty());
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(times[i] > 0.0);
    CHECK(times[i] < 10.0);
    if (i > 0) CHECK(times[i] > times[i - 1]);
  }
}

TEST_CASE("arrival counts have Poisson mean and variance") {
  const double rate = 2.5;
  const double horizon = 4.0;
  const int reps = 4000;
  RngEngine rng(17);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double c = static_cast<double>(sample_arrivals(rate, horizon, rng).size());
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / reps;
  const double var = sum2 / reps - mean * mean;
  const double expected = rate * horizon;  // 10
  // 3 standard errors of the sample mean; sd of the variance is ~sigma^2*sqrt(2/n)
  CHECK(std::fabs(mean - expected) < 3.0 * std::sqrt(expected / reps));
  CHECK(std::fabs(var - expected) < 4.0 * expected * std::sqrt(2.0 / reps));
}

TEST_CASE("feeds merge sender streams in time order with correct content") {
  const Population pop = three_senders();
  RngEngine rng(5);
  const Feed feed = sample_feed(pop, 50.0, rng);
  CHECK(feed.horizon == 50.0);
  CHECK(!feed.messages.empty());
  for (std::size_t i = 0; i < feed.messages.size(); ++i) {
    const Message& m = feed.messages[i];
    CHECK(m.source_id >= 1);
    CHECK(m.source_id <= 3);
    CHECK(m.content == pop.sender(m.source_id).signal);
    if (i > 0) CHECK(m.time >= feed.messages[i - 1].time);
  }
}

TEST_CASE("per-sender message counts scale with the sender rate") {
  const Population pop = three_senders();
  RngEngine rng(11);
  const int reps = 300;
  const double horizon = 20.0;
  std::vector<double> counts(4, 0.0);
  for (int i = 0; i < reps; ++i) {
    const Feed feed = sample_feed(pop, horizon, rng);
    for (const Message& m : feed.messages) counts[m.source_id] += 1.0;
  }
  for (int id = 1; id <= 3; ++id) {
    const double expected = pop.sender(id).rate * horizon;
    const double se = std::sqrt(expected / reps);
    CHECK(std::fabs(counts[id] / reps - expected) < 4.0 * se);
  }
}

TEST_CASE("feed sampling is deterministic in the seed") {
  const Population pop = three_senders();
  RngEngine a(123), b(123), c(124);
  const Feed fa = sample_feed(pop, 10.0, a);
  const Feed fb = sample_feed(pop, 10.0, b);
  const Feed fc = sample_feed(pop, 10.0, c);
  REQUIRE(fa.messages.size() == fb.messages.size());
  for (std::size_t i = 0; i < fa.messages.size(); ++i) {
    CHECK(fa.messages[i].time == fb.messages[i].time);
    CHECK(fa.messages[i].source_id == fb.messages[i].source_id);
  }
  bool differs = fa.messages.size() != fc.messages.size();
  for (std::size_t i = 0; !differs && i < fa.messages.size(); ++i)
    differs = fa.messages[i].time != fc.messages[i].time;
  CHECK(differs);
}

TEST_CASE("thinning keeps everything at 1, nothing at 0, and preserves order") {
  const Population pop = three_senders();
  RngEngine rng(7);
  const Feed feed = sample_feed(pop, 30.0, rng);

  RngEngine t1(1);
  const Feed all = thin_feed(feed, 1.0, t1);
  REQUIRE(all.messages.size() == feed.messages.size());
  for (std::size_t i = 0; i < all.messages.size(); ++i)
    CHECK(all.messages[i].time == feed.messages[i].time);

  RngEngine t0(1);
  CHECK(thin_feed(feed, 0.0, t0).messages.empty());

  RngEngine th(2);
  const Feed half = thin_feed(feed, 0.5, th);
  CHECK(half.messages.size() <= feed.messages.size());
  for (std::size_t i = 1; i < half.messages.size(); ++i)
    CHECK(half.messages[i].time >= half.messages[i - 1].time);
  CHECK(half.horizon == feed.horizon);
}

TEST_CASE("thinned counts match the scaled Poisson rate") {
  const Population pop = three_senders();
  RngEngine rng(19);
  const int reps = 2000;
  const double horizon = 10.0;
  const double keep = 0.4;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    const Feed feed = sample_feed(pop, horizon, rng);
    sum += static_cast<double>(thin_feed(feed, keep, rng).messages.size());
  }
  const double expected = keep * pop.alpha_bar() * horizon;  // 16
  CHECK(std::fabs(sum / reps - expected) < 3.0 * std::sqrt(expected / reps));
}

TEST_CASE("feed csv carries the header and one line per message") {
  const Population pop = three_senders();
  RngEngine rng(2);
  const Feed feed = sample_feed(pop, 5.0, rng);
  const auto path =
      (std::filesystem::temp_directory_path() / "feedsim_feed_test.csv").string();
  write_feed_csv(feed, path, "# demo header");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# demo header");
  std::getline(in, line);
  CHECK(line == "time,source_id,content");
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == feed.messages.size());
  std::filesystem::remove(path);
}
