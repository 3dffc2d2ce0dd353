#pragma once

#include <string>
#include <vector>

#include "feedsim/model.hpp"

namespace feedsim {

struct Message {
  double time = 0.0;
  int source_id = 0;
  int content = 0;  // the sender's signal value
};

/// Time-ordered messages observed on (0, horizon). Simultaneous arrivals are
/// ordered by sender id.
struct Feed {
  std::vector<Message> messages;
  double horizon = 0.0;
};

/// Arrival times of a Poisson process on the open interval (0, horizon),
/// built from exponential gaps. A zero rate yields no arrivals.
std::vector<double> sample_arrivals(double rate, double horizon, RngEngine& rng);

/// Superposes the senders' independent Poisson streams into one feed.
Feed sample_feed(const Population& population, double horizon, RngEngine& rng);

/// Keeps each message independently with probability keep_prob, preserving
/// order. A thinned Poisson feed is again Poisson at the scaled rate.
Feed thin_feed(const Feed& feed, double keep_prob, RngEngine& rng);

/// Writes columns time, source_id, content. `header` is prepended as a
/// comment line when non-empty.
void write_feed_csv(const Feed& feed, const std::string& path,
                    const std::string& header = "");

}  // namespace feedsim
