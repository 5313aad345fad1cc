#pragma once

// Network instances, routing profiles and the closed-form traffic quantities
// of a loss network with m sources sharing one destination.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lossnet {

// Absolute tolerance for every equality/ordering decision on analytic values.
inline constexpr double kTolerance = 1e-9;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CapacityExceeded : public std::runtime_error {
 public:
  CapacityExceeded(const std::string& what, std::uint64_t count, std::uint64_t cap)
      : std::runtime_error(what), count_(count), cap_(cap) {}
  std::uint64_t count() const { return count_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t count_;
  std::uint64_t cap_;
};

using SourceIndex = std::size_t;

struct Instance {
  std::vector<int> user_counts;  // n_i, users arriving at source i
  double phi = 1.0;              // per-user Poisson packet rate
  double mu = 1.0;               // exponential service rate of each direct link
  double q = 0.0;                // sidelink loss probability

  std::size_t m() const { return user_counts.size(); }
  int total_users() const;
  int max_users() const;
  int min_users() const;
  // 1 - q, evaluated at each use.
  double relay_success() const { return 1.0 - q; }

  // Throws InvalidArgument naming the first offending field.
  void validate() const;
};

// An instance relabelled so that user counts are non-increasing.
// order[k] is the original index of canonical source k.
struct CanonicalInstance {
  Instance instance;
  std::vector<SourceIndex> order;
};

CanonicalInstance canonicalize(const Instance& inst);

// Aggregate pure-strategy profile: flow(i, j) users of source i route via
// source j; flow(i, i) is the direct-path count of source i.
class RoutingProfile {
 public:
  RoutingProfile() = default;
  explicit RoutingProfile(std::size_t m) : m_(m), flow_(m * m, 0) {}

  static RoutingProfile all_direct(const Instance& inst);
  static RoutingProfile from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t m() const { return m_; }
  int operator()(SourceIndex from, SourceIndex via) const { return flow_[from * m_ + via]; }
  int& operator()(SourceIndex from, SourceIndex via) { return flow_[from * m_ + via]; }

  int direct(SourceIndex i) const { return (*this)(i, i); }  // u_i
  int incoming(SourceIndex i) const;                         // v_i
  int load(SourceIndex i) const { return direct(i) + incoming(i); }  // y_i
  int row_sum(SourceIndex i) const;
  int relayed_users() const;
  bool uses_relay(SourceIndex from, SourceIndex via) const {
    return from != via && (*this)(from, via) >= 1;
  }

  // Moves one user of `from` from route `via` to route `to`.
  void move_user(SourceIndex from, SourceIndex via, SourceIndex to);

  std::span<const int> flat() const { return flow_; }
  std::vector<std::vector<int>> rows() const;

  // Relabels sources: result(order[a], order[b]) = (*this)(a, b).
  RoutingProfile relabelled(std::span<const SourceIndex> order) const;

  bool operator==(const RoutingProfile&) const = default;
  auto operator<=>(const RoutingProfile& other) const { return flow_ <=> other.flow_; }

 private:
  std::size_t m_ = 0;
  std::vector<int> flow_;
};

struct RoutingProfileHash {
  std::size_t operator()(const RoutingProfile& p) const;
};

// Throws InvalidArgument on dimension mismatch, negative entries or a row
// whose sum differs from n_i.
void validate_profile(const Instance& inst, const RoutingProfile& prof);

struct TrafficSummary {
  std::vector<double> t;                   // T_i per direct link
  std::vector<double> no_congestion_prob;  // mu / (T_i + mu)
  std::vector<double> class_loss_rate;     // m*m, indexed origin * m + relay
  double total_traffic = 0.0;

  double class_loss(SourceIndex origin, SourceIndex relay) const {
    return class_loss_rate[origin * t.size() + relay];
  }
};

std::vector<double> traffic_rates(const Instance& inst, const RoutingProfile& prof);

// Loss rate of a user of `origin` routed via `relay` given link rates `t`.
double loss_rate(const Instance& inst, std::span<const double> t, SourceIndex origin,
                 SourceIndex relay);
double loss_rate(const Instance& inst, const RoutingProfile& prof, SourceIndex origin,
                 SourceIndex relay);

// Delivered traffic summed over direct links.
double total_traffic(double mu, std::span<const double> t);
double total_traffic(const Instance& inst, const RoutingProfile& prof);
// Delivered traffic summed over users, phi - LR_k per user.
double total_traffic_by_users(const Instance& inst, const RoutingProfile& prof);

TrafficSummary summarize(const Instance& inst, const RoutingProfile& prof);

// All ways to split `total` users over `parts` routes, lexicographically.
std::vector<std::vector<int>> compositions(int total, std::size_t parts);

// Number of flow matrices with the right row sums, saturating at UINT64_MAX.
std::uint64_t profile_count(const Instance& inst);

// Visits every valid flow matrix of `inst` in lexicographic order of the
// flattened matrix. The visitor returns false to stop early.
void for_each_profile(const Instance& inst,
                      const std::function<bool(const RoutingProfile&)>& visit);

}  // namespace lossnet
