#include "d2d/pattern.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace d2d {

namespace {

std::uint64_t mask_for(int num_servers) {
  return num_servers == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_servers) - 1;
}

}  // namespace

Pattern::Pattern(int num_servers, std::uint64_t bits) : num_servers_(num_servers), bits_(bits) {
  if (num_servers < 1 || num_servers > kMaxServers)
    throw std::invalid_argument("pattern: server count must be in [1, 64]");
  if (bits == 0) throw std::invalid_argument("pattern: the all-zero pattern is not allowed");
  if ((bits & ~mask_for(num_servers)) != 0)
    throw std::invalid_argument("pattern: bit set beyond the server count");
}

Pattern Pattern::unit(int num_servers, int server) {
  if (server < 0 || server >= num_servers) throw std::out_of_range("pattern: server index");
  return Pattern(num_servers, std::uint64_t{1} << server);
}

Pattern Pattern::parse(std::string_view text) {
  const int n = static_cast<int>(text.size());
  if (n < 1 || n > kMaxServers) throw std::invalid_argument("pattern: bad length");
  std::uint64_t bits = 0;
  for (int k = 0; k < n; ++k) {
    if (text[k] == '1')
      bits |= std::uint64_t{1} << k;
    else if (text[k] != '0')
      throw std::invalid_argument("pattern: expected only '0' and '1'");
  }
  return Pattern(n, bits);
}

int Pattern::num_active() const { return std::popcount(bits_); }

std::vector<int> Pattern::active_set() const {
  std::vector<int> out;
  out.reserve(num_active());
  for (int n = 0; n < num_servers_; ++n)
    if (active(n)) out.push_back(n);
  return out;
}

Pattern Pattern::flipped(int server) const {
  if (server < 0 || server >= num_servers_) throw std::out_of_range("pattern: server index");
  return Pattern(num_servers_, bits_ ^ (std::uint64_t{1} << server));
}

std::string Pattern::to_string() const {
  std::string s(num_servers_, '0');
  for (int n = 0; n < num_servers_; ++n)
    if (active(n)) s[n] = '1';
  return s;
}

int hamming(const Pattern& a, const Pattern& b) {
  if (a.num_servers() != b.num_servers())
    throw std::invalid_argument("hamming: patterns differ in length");
  return std::popcount(a.bits() ^ b.bits());
}

PatternSet::PatternSet(std::vector<Pattern> members) {
  if (members.empty()) throw std::invalid_argument("pattern set: must be nonempty");
  const int n = members.front().num_servers();
  for (auto& p : members) {
    if (p.num_servers() != n) throw std::invalid_argument("pattern set: mixed server counts");
    if (contains(p)) throw std::invalid_argument("pattern set: duplicate pattern " + p.to_string());
    members_.push_back(p);
  }
}

bool PatternSet::contains(const Pattern& p) const {
  return std::find(members_.begin(), members_.end(), p) != members_.end();
}

bool PatternSet::insert(const Pattern& p) {
  if (!members_.empty() && p.num_servers() != members_.front().num_servers())
    throw std::invalid_argument("pattern set: mixed server counts");
  if (contains(p)) return false;
  members_.push_back(p);
  return true;
}

PatternSet initial_set(int num_bs, int num_due) {
  if (num_bs < 1 || num_due < 1) throw std::invalid_argument("initial_set: need B >= 1 and U >= 1");
  const int n = num_bs + num_due;
  std::vector<Pattern> out;
  if (num_bs > 1)
    for (int b = 0; b < num_bs; ++b) out.push_back(Pattern::unit(n, b));
  for (int u = 0; u < num_due; ++u)
    out.emplace_back(n, (std::uint64_t{1} << 0) | (std::uint64_t{1} << (num_bs + u)));
  return PatternSet(std::move(out));
}

std::vector<Pattern> flip_neighborhood(const PatternSet& set, int server) {
  std::vector<Pattern> out;
  for (const auto& v : set) {
    if (v == Pattern::unit(v.num_servers(), server)) continue;
    Pattern w = v.flipped(server);
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
  return out;
}

std::vector<int> trim_indices(std::span<const double> shares, double eps1) {
  if (shares.empty()) throw std::invalid_argument("trim: no shares");
  std::vector<int> keep;
  for (std::size_t i = 0; i < shares.size(); ++i)
    if (shares[i] > eps1) keep.push_back(static_cast<int>(i));
  if (keep.empty()) {
    auto best = std::max_element(shares.begin(), shares.end());
    keep.push_back(static_cast<int>(best - shares.begin()));
  }
  return keep;
}

PatternSet trim(const PatternSet& set, std::span<const double> shares, double eps1) {
  if (shares.size() != set.size()) throw std::invalid_argument("trim: share count mismatch");
  std::vector<Pattern> kept;
  for (int i : trim_indices(shares, eps1)) kept.push_back(set[i]);
  return PatternSet(std::move(kept));
}

}  // namespace d2d
