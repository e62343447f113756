#include "pmp/actions.hpp"

#include "pmp/error.hpp"

namespace pmp {

const char* lateral_name(Lateral a) {
    switch (a) {
        case Lateral::HardLeft: return "hard_left";
        case Lateral::SoftLeft: return "soft_left";
        case Lateral::SameLane: return "same_lane";
        case Lateral::SoftRight: return "soft_right";
        case Lateral::HardRight: return "hard_right";
    }
    return "?";
}

const char* longitudinal_name(Longitudinal a) {
    switch (a) {
        case Longitudinal::Accelerate: return "accelerate";
        case Longitudinal::Cruise: return "cruise";
        case Longitudinal::Decelerate: return "decelerate";
        case Longitudinal::Brake: return "brake";
    }
    return "?";
}

Lateral lateral_from_index(int i) {
    if (i < 0 || i >= kNumLateral) throw Error(ErrCode::Domain, "lateral index out of range");
    return static_cast<Lateral>(i);
}

Longitudinal longitudinal_from_index(int i) {
    if (i < 0 || i >= kNumLongitudinal)
        throw Error(ErrCode::Domain, "longitudinal index out of range");
    return static_cast<Longitudinal>(i);
}

int lateral_ordinal(Lateral a) {
    switch (a) {
        case Lateral::HardLeft: return -2;
        case Lateral::SoftLeft: return -1;
        case Lateral::SameLane: return 0;
        case Lateral::SoftRight: return 1;
        case Lateral::HardRight: return 2;
    }
    return 0;
}

int longitudinal_ordinal(Longitudinal a) {
    switch (a) {
        case Longitudinal::Brake: return -2;
        case Longitudinal::Decelerate: return -1;
        case Longitudinal::Cruise: return 0;
        case Longitudinal::Accelerate: return 1;
    }
    return 0;
}

std::string action_name(const MetaAction& a) {
    return std::string(lateral_name(a.lat)) + "/" + longitudinal_name(a.lon);
}

const char* err_code_name(ErrCode c) {
    switch (c) {
        case ErrCode::Usage: return "usage error";
        case ErrCode::Config: return "config error";
        case ErrCode::Io: return "io error";
        case ErrCode::Schema: return "schema error";
        case ErrCode::Track: return "track error";
        case ErrCode::Lookup: return "lookup error";
        case ErrCode::Boundary: return "boundary error";
        case ErrCode::Data: return "data error";
        case ErrCode::Shape: return "shape error";
        case ErrCode::Domain: return "domain error";
        case ErrCode::Dependency: return "dependency error";
        case ErrCode::Protocol: return "protocol error";
        case ErrCode::Internal: return "internal error";
    }
    return "error";
}

}  // namespace pmp
