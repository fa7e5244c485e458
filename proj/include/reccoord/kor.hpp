// Keys of repartition: how the community operator splits one requested
// volume (one timestep, one direction) across the members' offers.
#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace reccoord {

enum class KeyKind { Equal, Prorate, Cascade };

std::string_view to_string(KeyKind k);
// Accepts "equal", "prorate", "cascade" (case-insensitive); throws
// std::invalid_argument otherwise.
KeyKind parse_key(std::string_view name);

inline constexpr double kCascadeEpsilon = 1e-9;  // kW

// Same share 1/|members with a positive offer| for everyone, capped.
std::vector<double> equal_key(std::span<const double> offers, double request);
// Share proportional to the offer, capped.
std::vector<double> prorate_key(std::span<const double> offers, double request);
// Equal shares repeated over the members with capacity left until the
// request or the capacity runs out.
std::vector<double> cascade_key(std::span<const double> offers, double request);

std::vector<double> apply_key(KeyKind k, std::span<const double> offers, double request);

}  // namespace reccoord
