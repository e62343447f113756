#pragma once

#include <string>

namespace pmp {

enum class Lateral { HardLeft, SoftLeft, SameLane, SoftRight, HardRight };
enum class Longitudinal { Accelerate, Cruise, Decelerate, Brake };

constexpr int kNumLateral = 5;
constexpr int kNumLongitudinal = 4;

// A discrete decision pair. Used both as an agent action and as the
// maneuver label extracted from recorded trajectories.
struct MetaAction {
    Lateral lat = Lateral::SameLane;
    Longitudinal lon = Longitudinal::Cruise;

    bool operator==(const MetaAction&) const = default;
};

using ManeuverLabel = MetaAction;

const char* lateral_name(Lateral a);
const char* longitudinal_name(Longitudinal a);
Lateral lateral_from_index(int i);
Longitudinal longitudinal_from_index(int i);

inline int lateral_index(Lateral a) { return static_cast<int>(a); }
inline int longitudinal_index(Longitudinal a) { return static_cast<int>(a); }

// Ordinal smoothness scales for the jerk metric:
// lateral hard_left..hard_right -> -2..+2, longitudinal brake -2 .. accelerate +1.
int lateral_ordinal(Lateral a);
int longitudinal_ordinal(Longitudinal a);

std::string action_name(const MetaAction& a);

}  // namespace pmp
