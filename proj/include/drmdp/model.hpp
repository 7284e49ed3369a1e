#pragma once

#include "drmdp/ambiguity.hpp"

#include <string>
#include <vector>

namespace drmdp {

enum class Horizon { Finite, Infinite };

struct State {
    std::string name;
    int stage = 0;                     ///< 1-based; unused for infinite horizons
    std::vector<std::string> actions;  ///< empty for final-stage states
    std::vector<int> successors;       ///< state indices, order matches the factor map
    amb::FactorMap factors;
    amb::LiftedAmbiguitySet ambiguity;

    bool terminal() const { return actions.empty(); }
};

/// Finite models: stages 1..T, stage 1 holds exactly the initial state,
/// stage-T states carry terminal values only and every other state moves to
/// the next stage. Infinite models: one recurrent state set and a discount.
struct DrMdpModel {
    Horizon horizon = Horizon::Finite;
    int stages = 0;
    double discount = 1.0;
    int initial = 0;
    std::vector<State> states;
    numvec terminal; ///< per state, read for final-stage states

    int num_states() const { return static_cast<int>(states.size()); }
    /// Continuation factor applied to next-state values.
    double continuation() const { return horizon == Horizon::Infinite ? discount : 1.0; }
    /// State indices per stage, stage t at position t-1.
    std::vector<std::vector<int>> stage_members() const;

    /// Structural checks plus every state's ambiguity validation.
    amb::ValidationReport validate() const;
};

/// A stationary description turned into a staged model: each state visited
/// at period t becomes its own copy "name@t".
struct StationaryDescription {
    std::vector<State> states;  ///< successors index into this list
    numvec terminal;            ///< per state, value after the last period
    int periods = 1;            ///< decision periods; stages = periods + 1
    int initial = 0;
};

DrMdpModel expand_stationary(const StationaryDescription& desc);

} // namespace drmdp
