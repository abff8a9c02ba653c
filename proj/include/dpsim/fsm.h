#ifndef DPSIM_FSM_H
#define DPSIM_FSM_H

#include <cstdint>
#include <string>
#include <vector>

namespace dpsim {

enum class FsmState { POWERED_OFF, DESTRUCTION_IN_PROGRESS, READY };
enum class FsmVariant { self_destruct, command_based };

// External commands seen on the DRAM interface. DESTROY_ROW is the sanctioned
// destruction op of the command-based variant.
enum class ExtCommand { READ, WRITE, ACT, PRE, REF, MRS, DESTROY_ROW };
constexpr int kExtCommands = 7;

enum class FsmEventKind { power_on, power_off, external_command, destruction_tick, destruction_complete };

struct FsmEvent {
    FsmEventKind kind;
    ExtCommand command = ExtCommand::READ;

    bool operator==(const FsmEvent&) const = default;
};

std::string to_string(FsmState s);
std::string to_string(FsmEventKind k);
std::string to_string(ExtCommand c);
std::string to_string(const FsmEvent& e);

struct DramFsm {
    FsmState state = FsmState::POWERED_OFF;
    FsmVariant variant = FsmVariant::self_destruct;
    std::uint64_t progress = 0;
    std::uint64_t rows_total = 1;

    bool operator==(const DramFsm&) const = default;
};

struct FsmStep {
    DramFsm fsm;
    bool accepted;
};

FsmStep fsm_step(const DramFsm& f, const FsmEvent& e);

bool is_data_command(const FsmEvent& e);

// Every event the alphabet of the model check ranges over.
std::vector<FsmEvent> fsm_alphabet();

// Exhaustive check over every event sequence of length 1..max_len from the
// powered-off state. A step is bad if it accepts READ/WRITE outside READY or
// enters READY with progress < rows_total.
struct SafetyResult {
    std::uint64_t sequences = 0;      // sequences checked
    std::uint64_t violations = 0;     // sequences containing a bad step
    std::vector<FsmEvent> counterexample;
};

using FsmStepFn = FsmStep (*)(const DramFsm&, const FsmEvent&);

SafetyResult check_fsm_safety(FsmVariant v, std::uint64_t rows_total, int max_len, FsmStepFn step = fsm_step);

// Same property by plain enumeration, for cross-checking on short lengths.
SafetyResult check_fsm_safety_bruteforce(FsmVariant v, std::uint64_t rows_total, int max_len,
                                         FsmStepFn step = fsm_step);

}  // namespace dpsim

#endif
