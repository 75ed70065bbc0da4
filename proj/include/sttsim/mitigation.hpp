#pragma once

#include <vector>

#include "sttsim/attack.hpp"
#include "sttsim/config.hpp"
#include "sttsim/types.hpp"

// Mitigation policies react to sensor edges:
//   stall:             flush the LLC and halt until deassert, then
//                      invalidate and resume. A sudden attack additionally
//                      flags restart_required (volatile state is suspect).
//   bypass:            flush, then force every LLC access to miss (BP=1)
//                      until deassert, then invalidate and drop BP.
//   checkpoint_bypass: roll back to the last checkpoint (no flush; the
//                      stale LLC is abandoned), re-execute under bypass with
//                      direct memory commits, and on deassert invalidate,
//                      drop BP and checkpoint immediately.
// The bypass phase walks off -> preparing -> active -> exiting -> off only.

namespace sttsim {

class Engine;

enum class BypassPhase { off, preparing, active, exiting };

enum class ActionType {
    flush,
    bp_assert,
    bp_deassert,
    invalidate,
    halt,
    resume,
    rollback,
    checkpoint,
    forced_checkpoint,
    restart_flag,
};

const char* to_string(ActionType type);

struct Action {
    Cycle cycle = 0;
    ActionType type = ActionType::flush;
};

class MitigationController {
  public:
    explicit MitigationController(PolicyKind policy) : policy_(policy) {}

    // Called once per sensor sample in cycle order; acts on edges only, so
    // identical consecutive readings may be skipped by the caller.
    void on_sensor(Engine& engine, const SensorReading& reading);

    bool attack_active() const { return attack_active_; }
    BypassPhase phase() const { return phase_; }

  private:
    void advance_phase(BypassPhase next);

    PolicyKind policy_;
    bool attack_active_ = false;
    BypassPhase phase_ = BypassPhase::off;
};

} // namespace sttsim
