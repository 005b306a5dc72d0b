#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace d2d {

inline constexpr int kMaxServers = 64;

/// A time-reuse pattern: the set of servers transmitting simultaneously.
///
/// Server n (0-based; BSs first, then DUE relays) is active when bit n is set.
/// The all-zero pattern is not representable.
class Pattern {
 public:
  Pattern() = default;
  Pattern(int num_servers, std::uint64_t bits);

  static Pattern unit(int num_servers, int server);
  /// Parses "1010"-style strings, server 1 leftmost.
  static Pattern parse(std::string_view bits);

  int num_servers() const { return num_servers_; }
  std::uint64_t bits() const { return bits_; }
  bool active(int server) const { return (bits_ >> server) & 1U; }
  int num_active() const;
  std::vector<int> active_set() const;

  /// Pattern with server n toggled. Throws if the result would be all-zero.
  Pattern flipped(int server) const;

  /// Binary string, server 1 leftmost.
  std::string to_string() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
  friend auto operator<=>(const Pattern&, const Pattern&) = default;

 private:
  int num_servers_ = 0;
  std::uint64_t bits_ = 0;
};

int hamming(const Pattern& a, const Pattern& b);

/// Ordered, duplicate-free, nonempty list of patterns over a common server count.
class PatternSet {
 public:
  PatternSet() = default;
  explicit PatternSet(std::vector<Pattern> members);

  const std::vector<Pattern>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const Pattern& operator[](std::size_t i) const { return members_[i]; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  bool contains(const Pattern& p) const;
  /// Appends p unless already present. Returns true when inserted.
  bool insert(const Pattern& p);

 private:
  std::vector<Pattern> members_;
};

/// V^1: {e_1 + e_{B+u}} for every DUE u, preceded by the singleton BS
/// patterns {e_b} when B > 1.
PatternSet initial_set(int num_bs, int num_due);

/// {v xor e_n : v in V, v != e_n}, deduplicated in first-seen order.
std::vector<Pattern> flip_neighborhood(const PatternSet& set, int server);

/// Keeps patterns with share > eps1. When none qualify the single pattern
/// with the largest share survives (ties to the lower index).
PatternSet trim(const PatternSet& set, std::span<const double> shares, double eps1);

/// Indices kept by trim(), in input order.
std::vector<int> trim_indices(std::span<const double> shares, double eps1);

}  // namespace d2d
