#pragma once

#include <cstdint>
#include <vector>

#include "feedsim/model.hpp"

namespace feedsim {

/// Running message counts used by the recall rule. States are value types:
/// recording a message returns a new state and leaves the old one intact.
class RecallState {
 public:
  RecallState() = default;
  explicit RecallState(int num_senders);

  /// Count of messages recorded for one sender; ids beyond the tracked
  /// range count as zero.
  std::int64_t count_for(int source_id) const;

  /// Total messages recorded across all senders.
  std::int64_t total() const { return total_; }

  /// New state with one more message from source_id.
  RecallState recorded(int source_id) const;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

/// Probability of recalling a sender who accounts for m of the prior
/// messages while others account for t_other, with interference strength r:
/// m / (m + r * t_other). The empty-history case (both terms zero) is 0.
double recall_probability(double m, double t_other, double r);

/// Long-run recall probability of a sender with rate alpha_i inside a
/// population with total rate alpha_bar: alpha_i / (alpha_i + r*(alpha_bar -
/// alpha_i)).
double asymptotic_recall(double alpha_i, double alpha_bar, double r);

/// Draws whether the source of a newly arrived message is recalled, using
/// strictly-prior counts (the arriving message itself is not yet recorded).
bool sample_recall(const RecallState& state, int source_id, double r,
                   RngEngine& rng);

/// Pure update: state with the arrival appended.
RecallState record_message(const RecallState& state, int source_id);

}  // namespace feedsim
