#include "sttsim/mitigation.hpp"

#include "sttsim/engine.hpp"

namespace sttsim {

const char* to_string(ActionType type) {
    switch (type) {
        case ActionType::flush: return "flush";
        case ActionType::bp_assert: return "bp_assert";
        case ActionType::bp_deassert: return "bp_deassert";
        case ActionType::invalidate: return "invalidate";
        case ActionType::halt: return "halt";
        case ActionType::resume: return "resume";
        case ActionType::rollback: return "rollback";
        case ActionType::checkpoint: return "checkpoint";
        case ActionType::forced_checkpoint: return "forced_checkpoint";
        case ActionType::restart_flag: return "restart_flag";
    }
    return "?";
}

void MitigationController::advance_phase(BypassPhase next) {
    const bool legal =
        (phase_ == BypassPhase::off && next == BypassPhase::preparing) ||
        (phase_ == BypassPhase::preparing && next == BypassPhase::active) ||
        (phase_ == BypassPhase::active && next == BypassPhase::exiting) ||
        (phase_ == BypassPhase::exiting && next == BypassPhase::off);
    if (!legal) throw ProtocolError("illegal bypass phase transition");
    phase_ = next;
}

void MitigationController::on_sensor(Engine& engine,
                                     const SensorReading& reading) {
    if (reading.attack_asserted && !attack_active_) {
        attack_active_ = true;
        engine.note_attack_detected(reading.classification);
        switch (policy_) {
            case PolicyKind::none:
                break;
            case PolicyKind::stall:
                engine.flush_llc();
                engine.halt();
                break;
            case PolicyKind::bypass:
                advance_phase(BypassPhase::preparing);
                engine.flush_llc();
                engine.set_bypass(true);
                advance_phase(BypassPhase::active);
                break;
            case PolicyKind::checkpoint_bypass:
                // no flush: the stale LLC is abandoned wholesale and the
                // epoch since the last checkpoint is squashed
                advance_phase(BypassPhase::preparing);
                engine.rollback();
                engine.set_bypass(true);
                advance_phase(BypassPhase::active);
                break;
        }
    } else if (!reading.attack_asserted && attack_active_) {
        attack_active_ = false;
        switch (policy_) {
            case PolicyKind::none:
                break;
            case PolicyKind::stall:
                engine.invalidate_llc();
                engine.resume();
                break;
            case PolicyKind::bypass:
                advance_phase(BypassPhase::exiting);
                engine.invalidate_llc();
                engine.set_bypass(false);
                advance_phase(BypassPhase::off);
                break;
            case PolicyKind::checkpoint_bypass:
                advance_phase(BypassPhase::exiting);
                engine.invalidate_llc();
                engine.set_bypass(false);
                advance_phase(BypassPhase::off);
                // commit immediately: the attack window ran with direct
                // memory commits, so rolling back across it is illegal
                engine.exit_attack_checkpoint();
                break;
        }
    }
}

} // namespace sttsim
