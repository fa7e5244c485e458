#include "reccoord/kor.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace reccoord {

namespace {

void check(std::span<const double> offers, double request) {
  if (!(request >= 0.0)) throw std::invalid_argument("request must be non-negative");
  for (double o : offers) {
    if (!(o >= 0.0)) throw std::invalid_argument("offers must be non-negative");
  }
}

}  // namespace

std::string_view to_string(KeyKind k) {
  switch (k) {
    case KeyKind::Equal: return "equal";
    case KeyKind::Prorate: return "prorate";
    case KeyKind::Cascade: return "cascade";
  }
  return "?";
}

KeyKind parse_key(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "equal") return KeyKind::Equal;
  if (lower == "prorate") return KeyKind::Prorate;
  if (lower == "cascade") return KeyKind::Cascade;
  throw std::invalid_argument("unknown key '" + std::string(name) +
                              "' (expected equal, prorate or cascade)");
}

std::vector<double> equal_key(std::span<const double> offers, double request) {
  check(offers, request);
  std::vector<double> act(offers.size(), 0.0);
  const auto n = std::count_if(offers.begin(), offers.end(), [](double o) { return o > 0.0; });
  if (n == 0) return act;
  const double share = request / static_cast<double>(n);
  for (std::size_t u = 0; u < offers.size(); ++u) {
    if (offers[u] > 0.0) act[u] = std::min(share, offers[u]);
  }
  return act;
}

std::vector<double> prorate_key(std::span<const double> offers, double request) {
  check(offers, request);
  std::vector<double> act(offers.size(), 0.0);
  double total = 0.0;
  for (double o : offers) total += o;
  if (total <= 0.0) return act;
  for (std::size_t u = 0; u < offers.size(); ++u) {
    act[u] = std::min(offers[u] / total * request, offers[u]);
  }
  return act;
}

std::vector<double> cascade_key(std::span<const double> offers, double request) {
  check(offers, request);
  // Repeated equal shares: every round either saturates some members or
  // hands the same share to all open ones, so open members always sit at a
  // common level. Tracking that level directly avoids summing rounded shares.
  std::vector<double> act(offers.size(), 0.0);
  if (request <= kCascadeEpsilon) return act;
  std::vector<bool> open(offers.size());
  std::size_t n_open = 0;
  for (std::size_t u = 0; u < offers.size(); ++u) {
    open[u] = offers[u] > kCascadeEpsilon;
    if (open[u]) ++n_open;
  }
  double saturated = 0.0;
  while (n_open > 0) {
    const double level = (request - saturated) / static_cast<double>(n_open);
    bool any = false;
    for (std::size_t u = 0; u < offers.size(); ++u) {
      if (open[u] && offers[u] <= level) {
        open[u] = false;
        act[u] = offers[u];
        saturated += offers[u];
        --n_open;
        any = true;
      }
    }
    if (!any) {
      for (std::size_t u = 0; u < offers.size(); ++u) {
        if (open[u]) act[u] = level;
      }
      break;
    }
  }
  return act;
}

std::vector<double> apply_key(KeyKind k, std::span<const double> offers, double request) {
  switch (k) {
    case KeyKind::Equal: return equal_key(offers, request);
    case KeyKind::Prorate: return prorate_key(offers, request);
    case KeyKind::Cascade: return cascade_key(offers, request);
  }
  throw std::invalid_argument("bad key");
}

}  // namespace reccoord
