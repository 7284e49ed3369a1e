#include "drmdp/model.hpp"

#include <cmath>
#include <map>

namespace drmdp {

std::vector<std::vector<int>> DrMdpModel::stage_members() const {
    std::vector<std::vector<int>> out(std::max(stages, 0));
    for (int s = 0; s < num_states(); ++s) {
        const int t = states[s].stage;
        if (t >= 1 && t <= stages) out[t - 1].push_back(s);
    }
    return out;
}

amb::ValidationReport DrMdpModel::validate() const {
    amb::ValidationReport rep;
    const int S = num_states();
    rep.add("state count", S > 0, std::to_string(S) + " states");
    if (S == 0) return rep;
    rep.add("initial state", initial >= 0 && initial < S, "index " + std::to_string(initial));

    if (horizon == Horizon::Finite) {
        rep.add("stage count", stages >= 1, std::to_string(stages) + " stages");
        rep.add("terminal values", static_cast<int>(terminal.size()) == S,
                std::to_string(terminal.size()) + " entries for " + std::to_string(S) + " states");
        std::string bad;
        for (int s = 0; s < S && bad.empty(); ++s) {
            const auto& st = states[s];
            if (st.stage < 1 || st.stage > stages) bad = st.name + " has stage " + std::to_string(st.stage);
            else if (st.stage == stages && !st.terminal()) bad = st.name + " is in the last stage but has actions";
            else if (st.stage < stages && st.terminal()) bad = st.name + " has no actions before the last stage";
            else
                for (int nx : st.successors)
                    if (nx < 0 || nx >= S || states[nx].stage != st.stage + 1) {
                        bad = st.name + " moves to a state outside stage " + std::to_string(st.stage + 1);
                        break;
                    }
        }
        rep.add("stage partition", bad.empty(), bad);
        if (initial >= 0 && initial < S) {
            const auto members = stage_members();
            const bool ok = !members.empty() && members[0].size() == 1 && members[0][0] == initial;
            rep.add("single initial stage state", ok, ok ? "" : "stage 1 must hold exactly the initial state");
        }
        for (std::size_t s = 0; s < terminal.size(); ++s)
            if (!std::isfinite(terminal[s])) {
                rep.add("terminal values finite", false, "state " + std::to_string(s));
                break;
            }
    } else {
        rep.add("discount", discount > 0.0 && discount < 1.0, "discount " + std::to_string(discount));
        std::string bad;
        for (int s = 0; s < S && bad.empty(); ++s) {
            const auto& st = states[s];
            if (st.terminal()) bad = st.name + " has no actions";
            for (int nx : st.successors)
                if (nx < 0 || nx >= S) bad = st.name + " has an unknown successor";
        }
        rep.add("transition structure", bad.empty(), bad);
    }

    for (const auto& st : states) {
        if (st.terminal()) continue;
        const bool shape = st.factors.actions == static_cast<int>(st.actions.size()) &&
                           st.factors.successors == static_cast<int>(st.successors.size());
        rep.add("state " + st.name + " factor map size", shape,
                shape ? ""
                      : "factor map covers " + std::to_string(st.factors.actions) + " actions and " +
                            std::to_string(st.factors.successors) + " successors");
        if (!shape) continue;
        auto sub = amb::validate(st.ambiguity, st.factors);
        for (auto& c : sub.checks) c.name = "state " + st.name + ": " + c.name;
        rep.merge(sub);
    }
    return rep;
}

DrMdpModel expand_stationary(const StationaryDescription& desc) {
    const int S = static_cast<int>(desc.states.size());
    require(S > 0, ErrorKind::Structural, "stationary description has no states");
    require(desc.periods >= 1, ErrorKind::Structural, "at least one decision period is required");
    require(desc.initial >= 0 && desc.initial < S, ErrorKind::Structural, "initial state out of range");
    require(static_cast<int>(desc.terminal.size()) == S, ErrorKind::Structural,
            "terminal values must cover every state");

    DrMdpModel m;
    m.horizon = Horizon::Finite;
    m.stages = desc.periods + 1;
    m.initial = 0;

    std::map<int, int> current; // original index -> copy index in this stage
    auto make_copy = [&](int orig, int stage) {
        State st = desc.states[orig];
        st.name = desc.states[orig].name + "@" + std::to_string(stage);
        st.stage = stage;
        st.successors.clear();
        if (stage == m.stages) {
            st.actions.clear();
            st.factors = {};
            st.ambiguity = {};
        }
        m.states.push_back(std::move(st));
        m.terminal.push_back(stage == m.stages ? desc.terminal[orig] : 0.0);
        return m.num_states() - 1;
    };
    current[desc.initial] = make_copy(desc.initial, 1);
    for (int t = 1; t < m.stages; ++t) {
        std::map<int, int> next;
        for (const auto& [orig, copy] : current) {
            for (int nx : desc.states[orig].successors) {
                require(nx >= 0 && nx < S, ErrorKind::Structural, "successor index out of range");
                if (!next.count(nx)) next[nx] = make_copy(nx, t + 1);
            }
        }
        for (const auto& [orig, copy] : current)
            for (int nx : desc.states[orig].successors) m.states[copy].successors.push_back(next[nx]);
        current = std::move(next);
    }
    return m;
}

} // namespace drmdp
