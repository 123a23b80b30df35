#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sumset/errors.hpp"
#include "sumset/rational.hpp"

namespace sumset {

// Strictly increasing window endpoints N_1 < ... < N_K for density profiles.
struct Schedule {
  std::string name;
  std::vector<std::uint64_t> windows;

  std::size_t size() const { return windows.size(); }
};

inline Schedule schedule_linear(std::uint64_t K) {
  if (K < 1) throw UnknownSchedule("linear(K) needs K >= 1");
  Schedule s{"linear(" + std::to_string(K) + ")", {}};
  s.windows.reserve(K);
  for (std::uint64_t k = 1; k <= K; ++k) s.windows.push_back(k);
  return s;
}

inline Schedule schedule_powers4(std::uint64_t K) {
  if (K < 1 || K > 31) throw UnknownSchedule("powers4(K) needs 1 <= K <= 31");
  Schedule s{"powers4(" + std::to_string(K) + ")", {}};
  std::uint64_t p = 1;
  for (std::uint64_t k = 1; k <= K; ++k) {
    p *= 4;
    s.windows.push_back(p);
  }
  return s;
}

// Windows sitting at the top of the k-th doubling block: N_k = ceil((2-1/k)*4^k)-1.
// Along these the block-family densities attain their upper limit.
inline Schedule schedule_prop41(std::uint64_t K) {
  if (K < 1 || K > 30) throw UnknownSchedule("prop41(K) needs 1 <= K <= 30");
  Schedule s{"prop41(" + std::to_string(K) + ")", {}};
  for (std::uint64_t k = 1; k <= K; ++k) {
    Rational v = (Rational(2) - Rational(1, k)) * pow_rat(Rational(4), BigInt(k));
    s.windows.push_back(to_u64(ceil_rat(v) - 1, "schedule window"));
  }
  return s;
}

inline Schedule schedule_explicit(std::vector<std::uint64_t> windows, std::string name = "") {
  if (windows.empty()) throw UnknownSchedule("schedule needs at least one window");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i] < 1 || (i > 0 && windows[i] <= windows[i - 1]))
      throw UnknownSchedule("schedule windows must be strictly increasing naturals");
  }
  if (name.empty()) {
    name = "explicit:";
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (i) name += ",";
      name += std::to_string(windows[i]);
    }
  }
  return Schedule{std::move(name), std::move(windows)};
}

// Accepts linear(K), powers4(K), prop41(K), or a comma-separated list.
inline Schedule parse_schedule(std::string_view text) {
  auto read_k = [&](std::string_view head) -> std::uint64_t {
    std::string_view inner = text.substr(head.size());
    if (inner.empty() || inner.front() != '(' || inner.back() != ')')
      throw UnknownSchedule("expected " + std::string(head) + "(K)");
    inner = inner.substr(1, inner.size() - 2);
    std::uint64_t k = 0;
    auto [p, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), k);
    if (ec != std::errc{} || p != inner.data() + inner.size())
      throw UnknownSchedule("bad K in " + std::string(text));
    return k;
  };
  if (text.starts_with("linear")) return schedule_linear(read_k("linear"));
  if (text.starts_with("powers4")) return schedule_powers4(read_k("powers4"));
  if (text.starts_with("prop41")) return schedule_prop41(read_k("prop41"));
  // Comma-separated explicit windows.
  std::vector<std::uint64_t> windows;
  std::size_t i = 0;
  while (i < text.size()) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data() + i, text.data() + text.size(), v);
    if (ec != std::errc{} || p == text.data() + i)
      throw UnknownSchedule("unrecognized schedule: " + std::string(text));
    windows.push_back(v);
    i = static_cast<std::size_t>(p - text.data());
    if (i < text.size()) {
      if (text[i] != ',') throw UnknownSchedule("unrecognized schedule: " + std::string(text));
      ++i;
    }
  }
  return schedule_explicit(std::move(windows));
}

}  // namespace sumset
