#pragma once

#include <string>

#include "cosim/util.hpp"

namespace cosim {

/// Intervention signal families. `fact_check_offer` is the availability
/// notice; `fact_check_evidence` is the evidence actually delivered after a
/// positive verification request.
enum class SignalKind {
    empty,
    accuracy_prompt,
    persuasion,
    fact_check_offer,
    fact_check_evidence,
    source_warning,
};

inline const char* signal_kind_name(SignalKind k) {
    switch (k) {
        case SignalKind::empty: return "empty";
        case SignalKind::accuracy_prompt: return "accuracy_prompt";
        case SignalKind::persuasion: return "persuasion";
        case SignalKind::fact_check_offer: return "fact_check_offer";
        case SignalKind::fact_check_evidence: return "fact_check_evidence";
        case SignalKind::source_warning: return "source_warning";
    }
    return "empty";
}

inline SignalKind signal_kind_from_name(const std::string& name) {
    if (name == "empty") return SignalKind::empty;
    if (name == "accuracy_prompt") return SignalKind::accuracy_prompt;
    if (name == "persuasion") return SignalKind::persuasion;
    if (name == "fact_check_offer") return SignalKind::fact_check_offer;
    if (name == "fact_check_evidence") return SignalKind::fact_check_evidence;
    if (name == "source_warning") return SignalKind::source_warning;
    throw ConfigError("unknown signal kind: " + name);
}

/// One agent-round context signal z. Interventions only ever enter the
/// simulation through these; agent traits and backend parameters are never
/// modified.
struct InterventionSignal {
    SignalKind kind = SignalKind::empty;
    std::string text;
    int target = -1;
    int round = 0;

    bool empty() const { return kind == SignalKind::empty; }

    static InterventionSignal none(int target, int round) {
        InterventionSignal s;
        s.target = target;
        s.round = round;
        return s;
    }
};

}  // namespace cosim
