#include "feedsim/poisson_feed.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "feedsim/io.hpp"

namespace feedsim {

std::vector<double> sample_arrivals(double rate, double horizon,
                                    RngEngine& rng) {
  if (rate < 0.0)
    throw std::domain_error(fmt::format("arrival rate must be >= 0, got {}", rate));
  if (horizon < 0.0)
    throw std::domain_error(fmt::format("horizon must be >= 0, got {}", horizon));
  std::vector<double> times;
  if (rate == 0.0 || horizon == 0.0) return times;
  std::exponential_distribution<double> gap(rate);
  double t = gap(rng);
  while (t < horizon) {
    times.push_back(t);
    t += gap(rng);
  }
  return times;
}

Feed sample_feed(const Population& population, double horizon, RngEngine& rng) {
  Feed feed;
  feed.horizon = horizon;
  for (const Sender& s : population.senders()) {
    for (double t : sample_arrivals(s.rate, horizon, rng))
      feed.messages.push_back(Message{t, s.id, s.signal});
  }
  std::sort(feed.messages.begin(), feed.messages.end(),
            [](const Message& a, const Message& b) {
              if (a.time != b.time) return a.time < b.time;
              return a.source_id < b.source_id;  // deterministic tie-break
            });
  return feed;
}

Feed thin_feed(const Feed& feed, double keep_prob, RngEngine& rng) {
  if (!(keep_prob >= 0.0 && keep_prob <= 1.0))
    throw std::domain_error(
        fmt::format("keep probability must lie in [0, 1], got {}", keep_prob));
  Feed thinned;
  thinned.horizon = feed.horizon;
  std::bernoulli_distribution keep(keep_prob);
  for (const Message& m : feed.messages)
    if (keep(rng)) thinned.messages.push_back(m);
  return thinned;
}

void write_feed_csv(const Feed& feed, const std::string& path,
                    const std::string& header) {
  std::string out;
  if (!header.empty()) out += header + "\n";
  out += "time,source_id,content\n";
  for (const Message& m : feed.messages)
    out += fmt::format("{},{},{}\n", format_number(m.time), m.source_id,
                       m.content);
  write_text_file(path, out);
}

}  // namespace feedsim
